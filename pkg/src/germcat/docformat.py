"""Plain-text workspace documents.

A document is a sequence of sections::

    # provenance: one line shown by the gallery listing
    [category V]
    builtin = power(finset(2), finset(2))

    [filter phi]
    category = V
    spec = principal:(1,empty)

Body lines are ``key = value``; some keys may repeat.  ``#`` starts a comment
line.  Sections refer to each other by name.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import catalog
from .fincat import FiniteCategory, category_from_raw, subterminal_poset
from .filterprod import EventualSequence, parse_seq
from .filtquot import Filter, make_filter, principal_filter, trivial_filter
from .model import ModelStructureData, parse_class
from .sset import SymbolicFamily, parse_sset


class DocError(ValueError):
    """A parse or reference error at a position in the document."""

    def __init__(self, message: str, line: int = 0, col: int = 0) -> None:
        self.message, self.line, self.col = message, line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


class ResourceError(RuntimeError):
    """A size or window bound was exceeded; distinct from a failed check."""


@dataclass
class Entry:
    key: str
    value: str
    line: int = 0
    col: int = 0


@dataclass
class Section:
    kind: str
    name: str
    entries: list[Entry] = field(default_factory=list)
    line: int = 0

    def get(self, key: str, default: str | None = None) -> str | None:
        vals = [e for e in self.entries if e.key == key]
        return vals[-1].value if vals else default

    def entry(self, key: str) -> Entry | None:
        vals = [e for e in self.entries if e.key == key]
        return vals[-1] if vals else None

    def all(self, key: str) -> list[Entry]:
        return [e for e in self.entries if e.key == key]

    def require(self, key: str) -> Entry:
        e = self.entry(key)
        if e is None:
            raise DocError(f"section [{self.kind} {self.name}] needs '{key}'", self.line, 1)
        return e


# kind -> (required keys, optional keys, repeatable keys)
SCHEMA: dict[str, tuple[set[str], set[str], set[str]]] = {
    "settings": (set(), {"max-size", "window"}, set()),
    "category": (set(), {"builtin", "objects"}, {"arrow", "identity", "compose"}),
    "filter": ({"category", "spec"}, set(), set()),
    "model": ({"category", "cofibrations", "fibrations", "weak"}, {"filter"}, set()),
    "product": ({"category", "index", "filter"}, set(), set()),
    "shapes": ({"builtin"}, {"filter"}, set()),
    "family": ({"literal"}, {"window", "expect", "discrete"}, set()),
    "sset": ({"literal"}, {"truncation"}, set()),
    "sequences": (set(), set(), {"seq"}),
    "unique-arrow": ({"context"}, {"truncation", "max-cells"}, set()),
    "random-filters": (set(), {"count", "seed", "max-elements"}, set()),
}

_HEADER = re.compile(r"^\[\s*([a-z-]+)\s+([A-Za-z0-9_.+-]+)\s*\]\s*$")
_KEYVAL = re.compile(r"^([a-z-]+)\s*=\s*(.*?)\s*$")


@dataclass
class Document:
    sections: list[Section]
    provenance: str = ""
    path: str = ""

    def section(self, name: str) -> Section:
        for s in self.sections:
            if s.name == name:
                return s
        raise KeyError(name)

    def of_kind(self, kind: str) -> list[Section]:
        return [s for s in self.sections if s.kind == kind]

    def setting(self, key: str) -> str | None:
        for s in self.of_kind("settings"):
            v = s.get(key)
            if v is not None:
                return v
        return None


def parse_document(text: str, path: str = "") -> Document:
    sections: list[Section] = []
    provenance = ""
    current: Section | None = None
    names: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*provenance:\s*(.*)$", line)
            if m and not provenance:
                provenance = m.group(1).strip()
            continue
        if line.startswith("["):
            m = _HEADER.match(line)
            if not m:
                raise DocError("malformed section header", lineno, raw.index("[") + 1)
            kind, name = m.groups()
            if kind not in SCHEMA:
                raise DocError(f"unknown section kind {kind!r}", lineno, raw.index(kind) + 1)
            if name in names:
                raise DocError(f"duplicate section name {name!r}", lineno, raw.index(name) + 1)
            names.add(name)
            current = Section(kind, name, [], lineno)
            sections.append(current)
            continue
        if current is None:
            raise DocError("entry outside any section", lineno, 1)
        m = _KEYVAL.match(line)
        if not m:
            raise DocError("expected 'key = value'", lineno, len(raw) - len(raw.lstrip()) + 1)
        key, value = m.groups()
        req, opt, rep = SCHEMA[current.kind]
        col = raw.index(key) + 1
        if key not in req | opt | rep:
            raise DocError(f"key {key!r} not allowed in [{current.kind}]", lineno, col)
        if key not in rep and current.entry(key) is not None:
            raise DocError(f"key {key!r} given twice", lineno, col)
        eq = raw.index("=", col - 1)
        vcol = (raw.index(value, eq) if value else len(raw)) + 1
        current.entries.append(Entry(key, value, lineno, vcol))
    for s in sections:
        req, _, rep = SCHEMA[s.kind]
        for k in sorted(req):
            s.require(k)
        if s.kind == "category" and (s.get("builtin") is None) == (s.get("objects") is None):
            raise DocError(f"[category {s.name}] needs exactly one of 'builtin' or 'objects'", s.line, 1)
        if s.kind == "sequences" and not s.all("seq"):
            raise DocError(f"[sequences {s.name}] needs at least one 'seq'", s.line, 1)
    return Document(sections, provenance, path)


def load_document(path: str) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read(), path)


def serialize(doc: Document) -> str:
    out: list[str] = []
    if doc.provenance:
        out += [f"# provenance: {doc.provenance}", ""]
    for s in doc.sections:
        out.append(f"[{s.kind} {s.name}]")
        out += [f"{e.key} = {e.value}" for e in s.entries]
        out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# literal resolution


def _split_args(text: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        parts.append(cur.strip())
    return parts


def normalize_object(name: str) -> str:
    """``empty`` is accepted for the empty set inside object names."""
    return re.sub(r"\bempty\b", "0", name.replace(" ", ""))


def parse_filter(C: FiniteCategory, text: str, name: str = "") -> Filter:
    """``trivial``, ``principal:<object>`` or ``{<object>, ...}``."""
    text = text.strip()
    if text == "trivial":
        return trivial_filter(C)
    if text.startswith("principal:"):
        obj = normalize_object(text[len("principal:") :])
        if obj not in C.objects:
            raise ValueError(f"unknown object {obj!r} in {C.name}")
        return principal_filter(C, obj)
    m = re.match(r"^\{(.*)\}$", text)
    if m:
        items = [normalize_object(s) for s in _split_args(m.group(1))]
        unknown = [s for s in items if s not in C.objects]
        if unknown:
            raise ValueError(f"unknown objects {unknown}")
        return make_filter(subterminal_poset(C), items, name=name or text)
    raise ValueError(f"bad filter literal {text!r}")


def parse_subset_filter(index: tuple[str, ...], text: str) -> list[frozenset[str]]:
    """``principal:{1}`` (all supersets) or an explicit list ``{1} {1,2}``."""
    text = text.strip()
    if text.startswith("principal:"):
        m = re.match(r"^\{(.*)\}$", text[len("principal:") :].strip())
        if not m:
            raise ValueError(f"bad subset {text!r}")
        base = frozenset(s.strip() for s in m.group(1).split(",") if s.strip())
        rest = [i for i in index if i not in base]
        import itertools

        return [base | frozenset(c) for r in range(len(rest) + 1) for c in itertools.combinations(rest, r)]
    subsets = re.findall(r"\{([^{}]*)\}", text)
    if not subsets:
        raise ValueError(f"bad subset filter {text!r}")
    return [frozenset(s.strip() for s in sub.split(",") if s.strip()) for sub in subsets]


_BUILTIN = re.compile(r"^([a-z-]+)\s*(?:\((.*)\))?$")


@dataclass
class BuiltCategory:
    category: FiniteCategory
    factors: list[FiniteCategory] | None = None


class Workspace:
    """Lazily resolves a document's sections into library objects."""

    def __init__(self, doc: Document, max_size: int | None = None) -> None:
        self.doc = doc
        self.max_size = max_size
        self._built: dict[str, Any] = {}

    def _err(self, entry: Entry | None, msg: str) -> DocError:
        return DocError(msg, entry.line if entry else 0, entry.col if entry else 0)

    def _check_size(self, C: FiniteCategory, entry: Entry | None) -> FiniteCategory:
        if self.max_size is not None and C.n_arrows > self.max_size:
            raise ResourceError(f"{C.name} has {C.n_arrows} arrows, above --max-size {self.max_size}")
        return C

    def _expr(self, text: str, entry: Entry) -> BuiltCategory:
        text = text.strip()
        try:
            sec = self.doc.section(text)
        except KeyError:
            sec = None
        if sec is not None:
            if sec.kind != "category":
                raise self._err(entry, f"{text!r} is a {sec.kind}, not a category")
            return self.category(text)
        m = _BUILTIN.match(text)
        if not m:
            raise self._err(entry, f"bad category expression {text!r}")
        fn, args = m.group(1), _split_args(m.group(2) or "")
        ints = lambda: [int(a) for a in args]  # noqa: E731
        try:
            if fn == "finset":
                return BuiltCategory(catalog.finset(*ints()))
            if fn == "chain":
                return BuiltCategory(catalog.chain(*ints()))
            if fn == "sierpinski":
                return BuiltCategory(catalog.sierpinski(*ints()))
            if fn == "walking-arrow":
                return BuiltCategory(catalog.walking_arrow())
            if fn == "terminal":
                return BuiltCategory(catalog.terminal_category())
            if fn == "power":
                factors = [self._expr(a, entry).category for a in args]
                if not factors:
                    raise ValueError("power needs at least one factor")
                return BuiltCategory(catalog.power_category(factors), factors)
        except (TypeError, ValueError) as exc:
            raise self._err(entry, f"bad arguments for {fn}: {exc}") from None
        raise self._err(entry, f"unknown builtin {fn!r}")

    def category(self, name: str) -> BuiltCategory:
        key = ("category", name)
        if key in self._built:
            return self._built[key]
        sec = self.doc.section(name)
        if sec.get("builtin") is not None:
            e = sec.require("builtin")
            built = self._expr(e.value, e)
            built.category.name = built.category.name or name
        else:
            raw = self.raw_category(sec)
            try:
                built = BuiltCategory(category_from_raw(raw, name=name))
            except ValueError as exc:
                raise DocError(str(exc), sec.line, 1) from None
        self._check_size(built.category, None)
        self._built[key] = built
        return built

    @staticmethod
    def raw_category(sec: Section) -> dict[str, Any]:
        objs = [o.strip() for o in sec.require("objects").value.split(",") if o.strip()]
        arrows, idents, comp = [], {}, []
        for e in sec.all("arrow"):
            m = re.match(r"^(\S+)\s*:\s*(\S+)\s*->\s*(\S+)$", e.value)
            if not m:
                raise DocError("expected 'name: dom -> cod'", e.line, e.col)
            arrows.append(m.groups())
        for e in sec.all("identity"):
            m = re.match(r"^(\S+)\s*:\s*(\S+)$", e.value)
            if not m:
                raise DocError("expected 'object: arrow'", e.line, e.col)
            idents[m.group(1)] = m.group(2)
        for e in sec.all("compose"):
            m = re.match(r"^(\S+)\s*\.\s*(\S+)\s*=\s*(\S+)$", e.value)
            if not m:
                raise DocError("expected 'g . f = h'", e.line, e.col)
            comp.append(m.groups())
        return {"objects": objs, "arrows": arrows, "identities": idents, "compose": comp}

    def _category_ref(self, sec: Section) -> BuiltCategory:
        e = sec.require("category")
        try:
            ref = self.doc.section(e.value)
        except KeyError:
            raise self._err(e, f"unresolved reference {e.value!r}") from None
        if ref.kind != "category":
            raise self._err(e, f"{e.value!r} is not a category")
        return self.category(e.value)

    def filter(self, name: str, override: str | None = None) -> Filter:
        sec = self.doc.section(name)
        C = self._category_ref(sec).category
        e = sec.require("spec")
        try:
            return parse_filter(C, override or e.value, name=name)
        except ValueError as exc:
            raise self._err(e, str(exc)) from None

    def filter_for(self, sec: Section, C: FiniteCategory, override: str | None = None) -> Filter | None:
        """A ``filter`` key naming a filter section or holding a literal."""
        e = sec.entry("filter")
        if override is not None:
            return parse_filter(C, override)
        if e is None:
            return None
        try:
            ref = self.doc.section(e.value)
        except KeyError:
            ref = None
        if ref is not None:
            phi = self.filter(e.value)
            if phi.category is not C:
                raise self._err(e, f"filter {e.value!r} lives on another category")
            return phi
        try:
            return parse_filter(C, e.value)
        except ValueError as exc:
            raise self._err(e, str(exc)) from None

    def model(self, name: str) -> ModelStructureData:
        sec = self.doc.section(name)
        built = self._category_ref(sec)
        C = built.category
        classes = {}
        for key in ("fibrations", "cofibrations", "weak"):
            e = sec.require(key)
            try:
                classes[key] = parse_class(C, e.value, built.factors)
            except (ValueError, KeyError) as exc:
                raise self._err(e, str(exc)) from None
        return ModelStructureData(C, classes["fibrations"], classes["cofibrations"], classes["weak"], name=name)

    def product_data(self, name: str):
        sec = self.doc.section(name)
        C = self._category_ref(sec).category
        index = tuple(s.strip() for s in sec.require("index").value.split(",") if s.strip())
        e = sec.require("filter")
        try:
            phi = parse_subset_filter(index, e.value)
        except ValueError as exc:
            raise self._err(e, str(exc)) from None
        if len(index) > 4:
            raise ResourceError(f"index set of size {len(index)} exceeds the desk bound 4")
        return C, index, phi

    def family(self, name: str) -> SymbolicFamily:
        e = self.doc.section(name).require("literal")
        try:
            return SymbolicFamily(parse_seq(e.value))
        except ValueError as exc:
            raise self._err(e, str(exc)) from None

    def sequences(self, name: str) -> list[EventualSequence]:
        out = []
        for e in self.doc.section(name).all("seq"):
            try:
                out.append(parse_seq(e.value))
            except ValueError as exc:
                raise self._err(e, str(exc)) from None
        return out

    def sset(self, name: str):
        sec = self.doc.section(name)
        e = sec.require("literal")
        d = self.int_key(sec, "truncation", 2)
        try:
            return parse_sset(e.value, d)
        except ValueError as exc:
            raise self._err(e, str(exc)) from None

    def int_key(self, sec: Section, key: str, default: int) -> int:
        e = sec.entry(key)
        if e is None:
            return default
        if not e.value.isdigit():
            raise self._err(e, f"{key} must be a natural number")
        return int(e.value)


def random_filter_cases(seed: int, count: int, max_elements: int = 6):
    """``count`` pairs (random poset, random subset of its elements)."""
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(count):
        n = int(rng.integers(1, max_elements + 1))
        P = catalog.random_poset(rng, n, float(rng.uniform(0.2, 0.7)))
        mask = rng.random(n) < rng.uniform(0.2, 0.8)
        cases.append((P, [P.objects[i] for i in np.flatnonzero(mask)]))
    return cases


__all__ = [
    "DocError",
    "Document",
    "Entry",
    "ResourceError",
    "SCHEMA",
    "Section",
    "Workspace",
    "load_document",
    "normalize_object",
    "parse_document",
    "parse_filter",
    "parse_subset_filter",
    "random_filter_cases",
    "serialize",
]
