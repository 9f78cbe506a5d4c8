"""Filter products.

For a finite index set the filter product is the filter quotient of the power
category along the subterminals ``U_S`` (terminal on ``S``, initial off it).
Over the naturals only the Frechet filter is supported, on sequences with a
finite exception table and a tail drawn from a closed generator family.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .catalog import power_category, poset_category
from .fincat import FiniteCategory, subterminal_poset
from .filtquot import FilterQuotient, filter_quotient, make_filter, validate_filter
from .report import Report

__all__ = [
    "UNDECIDABLE",
    "EventualSequence",
    "FilterProduct",
    "Partition",
    "Tail",
    "check_powerset_embedding",
    "distinct_germs",
    "finite_filter_product",
    "frechet_germ_eq",
    "internal_naturals",
    "parse_seq",
    "powerset_poset",
]


# ---------------------------------------------------------------------------
# finite index sets


def _subset_name(S: Iterable) -> str:
    return "{" + ",".join(str(i) for i in S) + "}"


def powerset_poset(I: Sequence[Any]):
    """The powerset of ``I`` as a subterminal poset (of its own thin category)."""
    subsets = [frozenset(c) for r in range(len(I) + 1) for c in itertools.combinations(I, r)]
    names = [_subset_name(sorted(s, key=list(I).index)) for s in subsets]
    C = poset_category(names, lambda i, j: subsets[i] <= subsets[j], name=f"P{_subset_name(I)}")
    return subterminal_poset(C), subsets


@dataclass
class FilterProduct:
    quotient: FilterQuotient
    power: FiniteCategory
    index: tuple
    subsets: list[frozenset]
    U: dict[frozenset, int]
    report: Report = field(default_factory=lambda: Report("filter product"))

    @property
    def category(self) -> FiniteCategory:
        return self.quotient.category


def strict_initial(C: FiniteCategory) -> int | None:
    """The initial object if every arrow into it is an isomorphism."""
    z = C.initial()
    if z is None:
        return None
    iso = C.iso_mask()
    return z if all(iso[f] for f in C.into(z)) else None


def finite_filter_product(
    C: FiniteCategory, I: Sequence[Any], phi: Iterable[Iterable[Any]], name: str = ""
) -> FilterProduct:
    """``prod_Phi C`` for a filter ``phi`` of subsets of the finite set ``I``."""
    I = tuple(I)
    zero, one = strict_initial(C), C.terminal()
    if zero is None:
        raise ValueError(f"{C.name} has no strict initial object")
    if one is None:
        raise ValueError(f"{C.name} has no terminal object")
    PS, subsets = powerset_poset(I)
    wanted = [frozenset(s) for s in phi]
    unknown = [sorted(s) for s in wanted if not s <= set(I)]
    if unknown:
        raise ValueError(f"subsets outside the index set: {unknown}")
    ids = [subsets.index(s) for s in wanted]
    rep = validate_filter(PS, ids)
    if not rep.ok:
        bad = rep.first_failure()
        raise ValueError(f"not a filter of subsets: {bad.name} :: {bad.witnesses[:3]}")
    power = power_category([C] * len(I), name=f"{C.name}^{len(I)}")
    U = {}
    for S in subsets:
        key = tuple(one if i in S else zero for i in I)
        U[S] = power.obj_data.index(key)
    P = subterminal_poset(power)
    phi_p = make_filter(P, [U[s] for s in set(wanted)], name="{" + ",".join(sorted(_subset_name(s) for s in set(wanted))) + "}")
    Q = filter_quotient(power, phi_p, name=name or f"prod_Phi {C.name}")
    out = FilterProduct(Q, power, I, subsets, U)
    out.report.extend(rep, prefix="index filter: ")
    return out


def check_powerset_embedding(C: FiniteCategory, I: Sequence[Any]) -> Report:
    """``S -> U_S`` is an order isomorphism onto its image in the subterminal
    poset of the power, and ``U_S`` are exactly the subterminals when C's only
    subterminals are 0 and 1."""
    rep = Report(f"powerset embedding {C.name}^{len(I)}")
    I = tuple(I)
    zero, one = strict_initial(C), C.terminal()
    power = power_category([C] * len(I))
    P = subterminal_poset(power)
    _, subsets = powerset_poset(I)
    U = {S: power.obj_data.index(tuple(one if i in S else zero for i in I)) for S in subsets}
    bad = [_subset_name(S) for S in subsets if U[S] not in P]
    rep.add("every U_S is subterminal", not bad, bad, anchor="filter-product")
    bad = [
        (_subset_name(S), _subset_name(T))
        for S in subsets
        for T in subsets
        if (S <= T) != bool(power.hom_sizes()[U[S], U[T]])
    ]
    rep.add("S <= T iff U_S <= U_T", not bad, bad[:3], anchor="filter-product")
    reps = {P.rep[U[S]] for S in subsets}
    rep.add("U_S pairwise non-isomorphic", len(reps) == len(subsets), anchor="filter-product")
    return rep


# ---------------------------------------------------------------------------
# sequences over the naturals


class _Undecidable:
    """Verdict for pairs outside the decidable fragment; refuses truth-testing."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __bool__(self) -> bool:
        raise TypeError("undecidable in this fragment")

    def __repr__(self) -> str:
        return "UNDECIDABLE"


UNDECIDABLE = _Undecidable()

CONSTRUCTORS = ("sphere", "simplex", "constant")


@dataclass(frozen=True)
class Tail:
    """``const(v)``, ``identity``, ``half`` (n -> n // 2) or ``periodic(v0, ..., vk)``.

    ``identity(c)`` and ``half(c)`` add a constant offset ``c``.
    """

    kind: str
    params: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("const", "identity", "half", "periodic"):
            raise ValueError(f"unsupported tail generator {self.kind!r}")
        if self.kind == "const" and len(self.params) != 1:
            raise ValueError("const takes one value")
        if self.kind == "periodic" and not self.params:
            raise ValueError("periodic needs at least one value")
        if self.kind in ("identity", "half"):
            if len(self.params) > 1:
                raise ValueError(f"{self.kind} takes at most one offset")
            if self.params == (0,):
                object.__setattr__(self, "params", ())
        if any(v < 0 for v in self.params):
            raise ValueError("values are natural numbers")

    def __call__(self, n: int) -> int:
        if self.kind == "const":
            return self.params[0]
        if self.kind == "identity":
            return n + self.offset
        if self.kind == "half":
            return n // 2 + self.offset
        return self.params[n % len(self.params)]

    def encode(self) -> str:
        if self.params:
            return f"{self.kind}({','.join(map(str, self.params))})"
        return self.kind

    @property
    def bounded(self) -> bool:
        return self.kind in ("const", "periodic")

    @property
    def offset(self) -> int:
        return self.params[0] if not self.bounded and self.params else 0


def tails_eventually_equal(a: Tail, b: Tail) -> bool:
    """Do two generators agree on a cofinite set?  Total on the family."""
    if a.bounded != b.bounded:
        return False  # one is unbounded, the other takes finitely many values
    if not a.bounded:
        # n + a and n // 2 + b meet at most twice; equal kinds need equal offsets
        return a.kind == b.kind and a.offset == b.offset
    # const(v) is periodic with period one
    pa, pb = a.params, b.params
    period = math.lcm(len(pa), len(pb))
    return all(pa[n % len(pa)] == pb[n % len(pb)] for n in range(period))


Value = Any  # int, or (constructor, int)


@dataclass(frozen=True)
class EventualSequence:
    """A natural-number sequence (or a family of constructed objects) given by a
    finite exception table over a tail generator."""

    tail: Tail
    exceptions: tuple[tuple[int, Value], ...] = ()
    constructor: str | None = None

    def __post_init__(self) -> None:
        if self.constructor is not None and self.constructor not in CONSTRUCTORS:
            raise ValueError(f"unknown constructor {self.constructor!r}")
        ns = [n for n, _ in self.exceptions]
        if len(set(ns)) != len(ns) or any(n < 0 for n in ns):
            raise ValueError("exception indices must be distinct naturals")
        for _, v in self.exceptions:
            if self.constructor is None and not isinstance(v, int):
                raise ValueError("plain sequences take natural-number exceptions")
            if self.constructor is not None and not (isinstance(v, tuple) and v[0] in CONSTRUCTORS):
                raise ValueError("family exceptions must be constructed values")
        object.__setattr__(self, "exceptions", tuple(sorted(self.exceptions)))

    @classmethod
    def of(cls, tail: Tail | str, exceptions: dict | None = None, constructor: str | None = None) -> "EventualSequence":
        if isinstance(tail, str):
            tail = _parse_tail(tail)
        return cls(tail, tuple((exceptions or {}).items()), constructor)

    def __call__(self, n: int) -> Value:
        for k, v in self.exceptions:
            if k == n:
                return v
        t = self.tail(n)
        return (self.constructor, t) if self.constructor else t

    def window(self, N: int) -> list[Value]:
        return [self(n) for n in range(N + 1)]

    def encode(self) -> str:
        kw = "family" if self.constructor else "seq"
        tail = f"{self.constructor}({self.tail.encode()})" if self.constructor else self.tail.encode()
        exc = ", ".join(f"{n}:{_enc_value(v)}" for n, v in self.exceptions)
        return f"{kw} tail={tail} except {{{exc}}}"

    def __str__(self) -> str:
        return self.encode()


def _enc_value(v: Value) -> str:
    return f"{v[0]}({v[1]})" if isinstance(v, tuple) else str(v)


def frechet_germ_eq(s: EventualSequence, t: EventualSequence):
    """True iff ``s`` and ``t`` disagree on a finite set; ``UNDECIDABLE`` for
    mixed constructors."""
    if (s.constructor is None) != (t.constructor is None):
        raise ValueError("sequences live in different value universes")
    if s.constructor != t.constructor:
        return UNDECIDABLE
    # constructors are injective on parameters, so only tails matter
    return tails_eventually_equal(s.tail, t.tail)


@dataclass
class Partition:
    classes: list[list[EventualSequence]]
    flagged: list[EventualSequence]

    @property
    def count(self) -> int:
        return len(self.classes)


def internal_naturals(sample: Iterable[EventualSequence]) -> Partition:
    """Partition a sample into Frechet germ classes, ordered by encoding."""
    items = sorted(set(sample), key=lambda s: s.encode())
    classes: list[list[EventualSequence]] = []
    flagged: list[EventualSequence] = []
    for s in items:
        placed = False
        undecided = False
        for cls in classes:
            v = frechet_germ_eq(s, cls[0])
            if v is UNDECIDABLE:
                undecided = True
                continue
            if v:
                cls.append(s)
                placed = True
                break
        if not placed:
            classes.append([s])
            if undecided:
                flagged.append(s)
    return Partition(classes, flagged)


def distinct_germs(k: int) -> list[EventualSequence]:
    """``k`` pairwise inequivalent germs (constant sequences)."""
    return [EventualSequence.of(Tail("const", (c,))) for c in range(k)]


# ---------------------------------------------------------------------------
# literal syntax


_TAIL = re.compile(r"^\s*(const|identity|half|periodic)\s*(?:\(([^()]*)\))?\s*$")
_CTOR_TAIL = re.compile(r"^\s*(sphere|simplex|constant)\s*\((.*)\)\s*$")


def _parse_tail(text: str) -> Tail:
    m = _TAIL.match(text)
    if not m:
        raise ValueError(f"bad tail generator {text!r}")
    kind, args = m.group(1), m.group(2)
    params = tuple(int(a) for a in args.split(",") if a.strip()) if args else ()
    return Tail(kind, params)


def _parse_value(text: str, family: bool) -> Value:
    text = text.strip()
    if family:
        m = re.match(r"^(sphere|simplex|constant)\s*\(\s*(\d+)\s*\)$", text)
        if not m:
            raise ValueError(f"bad family value {text!r}")
        return (m.group(1), int(m.group(2)))
    if not text.isdigit():
        raise ValueError(f"bad sequence value {text!r}")
    return int(text)


def parse_seq(text: str) -> EventualSequence:
    """Parse ``seq tail=<gen> except {n:v, ...}`` or
    ``family tail=<ctor>(<gen>) except {n:<ctor>(k), ...}``."""
    m = re.match(r"^\s*(seq|family)\s+tail\s*=\s*(.+?)(?:\s+except\s*\{(.*)\})?\s*$", text)
    if not m:
        raise ValueError(f"bad sequence literal {text!r}")
    family = m.group(1) == "family"
    tail_text = m.group(2)
    ctor = None
    if family:
        cm = _CTOR_TAIL.match(tail_text)
        if not cm:
            raise ValueError(f"family tail needs a constructor: {tail_text!r}")
        ctor, tail_text = cm.group(1), cm.group(2)
    tail = _parse_tail(tail_text)
    exc: dict[int, Value] = {}
    body = (m.group(3) or "").strip()
    if body:
        for part in re.split(r",(?![^()]*\))", body):
            if not part.strip():
                continue
            k, _, v = part.partition(":")
            if not k.strip().isdigit() or not v.strip():
                raise ValueError(f"bad exception entry {part!r}")
            if int(k) in exc:
                raise ValueError(f"duplicate exception index {k.strip()}")
            exc[int(k)] = _parse_value(v, family)
    return EventualSequence(tail, tuple(exc.items()), ctor)
