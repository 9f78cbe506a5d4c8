"""Verification reports shared by every pipeline."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any

SCHEMA_VERSION = 1

PASS = "pass"
FAIL = "fail"
UNDECIDABLE = "undecidable"
SKIPPED = "skipped"

# Claim strings attached to checks.  Reports may only use anchors from this table.
ANCHORS: dict[str, str] = {
    "category-laws": "composition table is associative and unital",
    "model-axioms": "model structure: two weak factorization systems and two-out-of-three",
    "wfs": "weak factorization system: factorization, lifting, mutual determination",
    "filter": "filter: non-empty, upwards closed, intersection closed",
    "subterminals": "subterminal objects admit at most one morphism from each object",
    "filter-quotient": "filter quotient: same objects, germs of morphisms over the filter",
    "projection": "projection preserves finite (co)limits, monos, exponentials, subobject classifiers",
    "germ-mono": "a germ is mono iff some filter element makes its product mono",
    "model-filter": "model filter: fibrant elements, cofibrations and weak equivalences product stable",
    "transfer": "the filter quotient of a model category carries the induced model structure",
    "filter-product": "filter product: filter quotient of a power along a filter of subsets",
    "eventual-equality": "germs over the Frechet filter are sequences up to eventual equality",
    "shapes": "finitary model category with shapes: clauses (1)-(4)",
    "shapes-filter": "model filter for shapes: compatible filters on theory, V and M",
    "fibration": "filter quotients of Grothendieck fibrations are fibrations",
    "regular": "induced functors between filter quotients are regular",
    "shapes-quotient": "filter quotients preserve finitary model categories with shapes",
    "interval": "strict interval: two distinct points satisfying lattice axioms",
    "unique-arrow": "the walking arrow over a subterminal is characterized by six conditions",
    "external-discrete": "externally discrete objects: local for simplices over the truncation",
    "dn": "the d_n sequence of an externally discrete family diverges",
    "equivalence": "equivalence of categories witnessed by explicit functors",
    "coherent": "coherent functor: finite limits, regular epis, finite unions",
}


@dataclass
class Check:
    name: str
    status: str
    witnesses: list[Any] = field(default_factory=list)
    anchor: str = ""
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status in (PASS, SKIPPED)


class Report:
    """An ordered list of checks for one suite."""

    def __init__(self, suite: str) -> None:
        self.suite = suite
        self.checks: list[Check] = []
        self._t0 = time.perf_counter()
        self.elapsed = 0.0

    def add(self, name: str, ok: bool | None, witnesses=None, anchor: str = "", detail: str = "") -> Check:
        if anchor and anchor not in ANCHORS:
            raise KeyError(f"unknown anchor {anchor!r}")
        if ok is None:
            status = UNDECIDABLE
        else:
            status = PASS if ok else FAIL
        wit = list(witnesses or [])
        if status == FAIL and not wit:
            wit = [name]
        check = Check(name, status, wit, anchor, detail)
        self.checks.append(check)
        self.elapsed = time.perf_counter() - self._t0
        return check

    def skip(self, name: str, detail: str = "", anchor: str = "") -> Check:
        check = Check(name, SKIPPED, [], anchor, detail)
        self.checks.append(check)
        return check

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.status, c.witnesses, c.anchor, c.detail))
        self.elapsed = time.perf_counter() - self._t0

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    def first_failure(self) -> Check | None:
        for c in self.checks:
            if c.status in (FAIL, UNDECIDABLE):
                return c
        return None

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self) -> str:
        n_fail = sum(1 for c in self.checks if not c.ok)
        return f"<Report {self.suite}: {len(self.checks)} checks, {n_fail} not passing>"

    def to_text(self) -> str:
        lines = [f"== {self.suite} ({'PASS' if self.ok else 'FAIL'}, {self.elapsed:.2f}s)"]
        for c in self.checks:
            line = f"  [{c.status:>11}] {c.name}"
            if c.detail:
                line += f" -- {c.detail}"
            if c.status in (FAIL, UNDECIDABLE) and c.witnesses:
                line += f" :: witness {_short(c.witnesses[0])}"
            lines.append(line)
        return "\n".join(lines)

    def to_records(self) -> list[dict[str, Any]]:
        return [
            {
                "schema": SCHEMA_VERSION,
                "suite": self.suite,
                "check": c.name,
                "status": c.status,
                "witnesses": [_jsonable(w) for w in c.witnesses],
                "anchor": ANCHORS.get(c.anchor, ""),
                "detail": c.detail,
            }
            for c in self.checks
        ] + [
            {
                "schema": SCHEMA_VERSION,
                "suite": self.suite,
                "check": "__summary__",
                "status": PASS if self.ok else FAIL,
                "seconds": round(self.elapsed, 4),
            }
        ]

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(r, sort_keys=True) for r in self.to_records())


def _jsonable(w: Any) -> Any:
    if isinstance(w, (str, int, float, bool)) or w is None:
        return w
    if isinstance(w, dict):
        return {str(k): _jsonable(v) for k, v in w.items()}
    if isinstance(w, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in w]
    if hasattr(w, "item"):
        return w.item()
    return str(w)


def _short(w: Any, n: int = 160) -> str:
    s = str(_jsonable(w))
    return s if len(s) <= n else s[: n - 3] + "..."
