"""Collects one verdict line per acceptance criterion for the terminal summary."""
from __future__ import annotations

import time
from contextlib import contextmanager

LINES: list[str] = []


@contextmanager
def criterion(number: int, title: str, limit: float | None = None):
    """Time the body; record PASS only if it returns without error inside ``limit``."""
    state = {"detail": ""}
    t0 = time.perf_counter()
    ok = False
    try:
        yield state
        ok = True
    finally:
        dt = time.perf_counter() - t0
        within = limit is None or dt < limit
        budget = f"{dt:.1f}s" + (f" < {limit:.0f}s" if limit is not None else "")
        verdict = "PASS" if ok and within else "FAIL"
        extra = f" [{state['detail']}]" if state["detail"] else ""
        line = f"criterion {number}: {verdict} {title} ({budget}, exact){extra}"
        LINES.append(line)
        print(line)
    assert within, f"criterion {number} exceeded {limit}s: {dt:.1f}s"
