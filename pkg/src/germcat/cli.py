"""Command line: ``germcat run <command> <doc>... [flags]`` and ``germcat gallery``.

Exit status: 0 all checks pass, 1 some check fails, 2 parse or reference
error, 3 a resource bound was exceeded.
"""
from __future__ import annotations

import argparse
import io
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import catalog
from .docformat import (
    DocError,
    Document,
    ResourceError,
    Section,
    Workspace,
    load_document,
    parse_filter,
    random_filter_cases,
)
from .equivalence import find_equivalence
from .fincat import subterminal_poset, validate_category
from .filterprod import check_powerset_embedding, finite_filter_product, internal_naturals
from .filtquot import filter_quotient, germ_mono_characterization, validate_filter, verify_projection
from .model import transfer_model_structure, validate_model_filter, verify_model_structure
from .report import Report
from .shapes import (
    ShapesFilterTriple,
    check_strict_interval,
    interval_fragment,
    quotient_shapes_tuple,
    validate_shapes_tuple,
    validate_triple,
)
from .sset import (
    builtin_contexts,
    dn_sequence,
    frechet_externally_discrete,
    hom_set,
    is_externally_discrete,
    passes_all,
    simplex,
    suitable_propositions,
    unique_arrow_check,
    unique_arrow_search,
)

GALLERY = Path(__file__).with_name("gallery")
COMMANDS = ("validate", "quotient", "product", "model-check", "shapes-check", "sset-demo", "report")
MAX_WINDOW = 200
DEFAULT_MAX_SIZE = 5000


@dataclass
class Flags:
    window: int | None = None
    max_size: int | None = None
    filter: str | None = None
    format: str = "text"
    seed: int | None = None


# ---------------------------------------------------------------------------
# pipelines


def _validate(ws: Workspace, flags: Flags) -> list[Report]:
    out = []
    for sec in ws.doc.sections:
        k = sec.kind
        if k == "category":
            r = validate_category(ws.category(sec.name).category)
        elif k == "filter":
            phi = ws.filter(sec.name, flags.filter)
            r = validate_filter(phi.poset, phi.elements)
        elif k == "model":
            r = verify_model_structure(ws.model(sec.name))
        elif k == "product":
            C, index, phi = ws.product_data(sec.name)
            fp = finite_filter_product(C, index, phi)
            r = Report(f"product {sec.name}")
            r.extend(fp.report)
            r.extend(check_powerset_embedding(C, index))
        elif k == "shapes":
            r = validate_shapes_tuple(_shapes(ws, sec)[0])
        elif k == "family":
            r = _family_validate(ws, sec)
        elif k == "sset":
            r = ws.sset(sec.name).validate()
        elif k == "sequences":
            seqs = ws.sequences(sec.name)
            part = internal_naturals(seqs)
            r = Report(f"sequences {sec.name}")
            r.add("literals parse", True, detail=f"{len(seqs)} sequences, {part.count} germ classes")
            r.add("germ equality decided", not part.flagged, [s.encode() for s in part.flagged],
                  anchor="eventual-equality")
        elif k == "unique-arrow":
            r = suitable_propositions(ws.int_key(sec, "truncation", 2))
        elif k == "random-filters":
            r = _random_filters(ws, sec, flags)
        else:
            continue
        r.suite = f"validate [{k} {sec.name}]: {r.suite}"
        out.append(r)
    return out


def _family_validate(ws: Workspace, sec: Section) -> Report:
    F = ws.family(sec.name)
    r = Report(f"family {sec.name}")
    r.add("literal parses", True, detail=F.encode())
    verdict = frechet_externally_discrete(F)
    exp = sec.get("discrete")
    if exp is None:
        r.add("externally discrete over the Frechet filter", True, detail="yes" if verdict else "no",
              anchor="external-discrete")
    else:
        r.add("externally discrete verdict matches the declared one", verdict == (exp == "yes"),
              [F.encode()], anchor="external-discrete", detail=f"computed {'yes' if verdict else 'no'}")
    return r


def _random_filters(ws: Workspace, sec: Section, flags: Flags) -> Report:
    seed = flags.seed if flags.seed is not None else ws.int_key(sec, "seed", 0)
    count = ws.int_key(sec, "count", 200)
    cases = random_filter_cases(seed, count, ws.int_key(sec, "max-elements", 6))
    r = Report(f"random filters (seed {seed})")
    n_ok = sum(validate_filter(subterminal_poset(P), S).ok for P, S in cases)
    r.add(f"classified {count} random subsets", True, anchor="filter",
          detail=f"{n_ok} filters, {count - n_ok} non-filters")
    return r


def _quotient(ws: Workspace, flags: Flags) -> list[Report]:
    out = []
    for sec in ws.doc.of_kind("filter"):
        phi = ws.filter(sec.name, flags.filter)
        QC = filter_quotient(phi.category, phi)
        r = verify_projection(phi.category, phi, QC)
        r.extend(germ_mono_characterization(QC), prefix="germ monos: ")
        r.suite = f"quotient [{sec.name}] by {phi.name}"
        out.append(r)
    return out


def _product(ws: Workspace, flags: Flags) -> list[Report]:
    out = []
    for sec in ws.doc.of_kind("product"):
        C, index, phi = ws.product_data(sec.name)
        fp = finite_filter_product(C, index, phi)
        r = Report(f"product [{sec.name}]")
        r.extend(fp.report)
        least = frozenset.intersection(*map(frozenset, phi))
        k = len(least)
        target = catalog.power_category([C] * k) if k else catalog.terminal_category()
        eq = find_equivalence(fp.category, target)
        r.add(f"equivalent to {C.name}^{k} (the least index set)", eq is not None and eq.report.ok,
              [sorted(least)], anchor="equivalence",
              detail=f"{fp.category.n_objects} objects vs {target.n_objects}")
        if eq is not None:
            r.extend(eq.report, prefix="equivalence: ")
        out.append(r)
    return out


def _model_check(ws: Workspace, flags: Flags) -> list[Report]:
    out = []
    for sec in ws.doc.of_kind("model"):
        M = ws.model(sec.name)
        r = verify_model_structure(M)
        r.suite = f"model-check [{sec.name}]"
        phi = ws.filter_for(sec, M.category, flags.filter)
        if phi is not None:
            r.extend(validate_model_filter(M, phi, check_model=False), prefix="model filter: ")
            res = transfer_model_structure(M, phi)
            r.extend(res.report, prefix="transfer: ")
        out.append(r)
    return out


def _shapes(ws: Workspace, sec: Section, override: str | None = None):
    e = sec.require("builtin")
    if e.value != "interval-fragment":
        raise DocError(f"unknown shapes builtin {e.value!r}", e.line, e.col)
    fr = interval_fragment()
    tup, triple = fr.tuple, fr.triple
    spec = override or sec.get("filter")
    if spec is not None:
        try:
            triple = ShapesFilterTriple(
                parse_filter(tup.theory.T0, spec), parse_filter(tup.V, spec), parse_filter(tup.M.category, spec)
            )
        except ValueError as exc:
            ent = sec.entry("filter")
            raise DocError(str(exc), ent.line if ent else 0, ent.col if ent else 0) from None
    return tup, triple


def _shapes_check(ws: Workspace, flags: Flags) -> list[Report]:
    out = []
    for sec in ws.doc.of_kind("shapes"):
        tup, triple = _shapes(ws, sec, flags.filter)
        up = validate_shapes_tuple(tup)
        r = Report(f"shapes-check [{sec.name}]")
        r.extend(up, prefix="tuple: ")
        r.extend(validate_triple(tup, triple), prefix="triple: ")
        qt, qrep = quotient_shapes_tuple(tup, triple, upstream=up)
        r.extend(qrep, prefix="quotient: ")
        if qt is not None and qt.interval is not None:
            r.extend(check_strict_interval(qt.theory, qt.interval), prefix="quotient interval: ")
        else:
            r.add("quotient tuple carries the interval", False, [tup.name], anchor="interval")
        out.append(r)
    return out


def _window(ws: Workspace, sec: Section, flags: Flags) -> int:
    if flags.window is not None:
        N = flags.window
    else:
        N = ws.int_key(sec, "window", int(ws.doc.setting("window") or 30))
    if N > MAX_WINDOW:
        raise ResourceError(f"window {N} exceeds the bound {MAX_WINDOW}")
    return N


def _sset_demo(ws: Workspace, flags: Flags) -> list[Report]:
    out = []
    for sec in ws.doc.sections:
        if sec.kind == "family":
            F = ws.family(sec.name)
            N = _window(ws, sec, flags)
            exp = sec.get("expect")
            res = dn_sequence(F, N, expect=None if exp is None else exp == "diverges")
            r = Report(f"sset-demo [{sec.name}] window {N}")
            r.add("d_n table", True, anchor="dn", detail="d = " + " ".join(map(str, res.values)))
            r.extend(res.report)
            r.extend(_family_validate(ws, sec), prefix="external: ")
        elif sec.kind == "sset":
            X = ws.sset(sec.name)
            r = X.validate()
            r.suite = f"sset-demo [{sec.name}] {X.name}"
            r.add("levels", True, detail=" ".join(map(str, X.sizes)))
            r.add("points", True, detail=str(len(hom_set(simplex(0, X.d), X))))
            r.add("externally discrete", True, anchor="external-discrete",
                  detail="yes" if is_externally_discrete(X) else "no")
        elif sec.kind == "unique-arrow":
            r = _unique_arrow(ws, sec, flags)
        else:
            continue
        out.append(r)
    return out


def _unique_arrow(ws: Workspace, sec: Section, flags: Flags) -> Report:
    d = ws.int_key(sec, "truncation", 2)
    cells = ws.int_key(sec, "max-cells", 6)
    if flags.max_size is not None:
        cells = min(cells, flags.max_size)
    want = sec.require("context").value
    ctxs = [c for c in builtin_contexts(d) if want in ("all", c.name)]
    if not ctxs:
        e = sec.require("context")
        raise DocError(f"unknown context {want!r}", e.line, e.col)
    r = Report(f"sset-demo [{sec.name}] unique arrow")
    for ctx in ctxs:
        for U in ctx.subterminals():
            rep = unique_arrow_check(ctx, U, ctx.times(simplex(1, d), U))
            r.add(f"{ctx.name} U={U}: Delta[1] x U passes (1)-(6)", passes_all(rep),
                  [c.name for c in rep.checks if c.status != "pass"], anchor="unique-arrow")
            s = unique_arrow_search(ctx, U, cells)
            r.add(f"{ctx.name} U={U}: no other candidate up to {cells} cells", s.all_isomorphic_to_arrow,
                  [len(s.survivors)], anchor="unique-arrow", detail=f"{s.examined} examined")
    return r


PIPELINES: dict[str, Callable[[Workspace, Flags], list[Report]]] = {
    "validate": _validate,
    "quotient": _quotient,
    "product": _product,
    "model-check": _model_check,
    "shapes-check": _shapes_check,
    "sset-demo": _sset_demo,
}


def run(command: str, doc: Document, flags: Flags | None = None) -> list[Report]:
    """Run a pipeline on a parsed document and return its reports."""
    flags = flags or Flags()
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    max_size = flags.max_size
    if max_size is None:
        max_size = int(doc.setting("max-size") or DEFAULT_MAX_SIZE)
    ws = Workspace(doc, max_size=max_size)
    if command == "report":
        reports: list[Report] = []
        for name in PIPELINES:
            reports += PIPELINES[name](ws, flags)
        return reports
    return PIPELINES[command](ws, flags)


# ---------------------------------------------------------------------------
# entry point


def resolve_path(p: str) -> Path:
    path = Path(p)
    if path.exists():
        return path
    alt = GALLERY / path.name
    if alt.exists():
        return alt
    alt = GALLERY / f"{path.name}.doc"
    if alt.exists():
        return alt
    raise FileNotFoundError(p)


def gallery() -> list[tuple[str, Path, str]]:
    """Shipped documents as (name, path, provenance)."""
    out = []
    for p in sorted(GALLERY.glob("*.doc")):
        out.append((p.stem, p, load_document(str(p)).provenance))
    return out


def _run_one(command: str, path: str, flags: Flags) -> tuple[int, str]:
    buf = io.StringIO()
    try:
        doc = load_document(str(resolve_path(path)))
        reports = run(command, doc, flags)
    except FileNotFoundError:
        buf.write(f"error: no such document {path}\n")
        return 2, buf.getvalue()
    except DocError as exc:
        buf.write(f"{path}:{exc.line}:{exc.col}: error: {exc.message}\n")
        return 2, buf.getvalue()
    except ResourceError as exc:
        buf.write(f"{path}: resource bound exceeded: {exc}\n")
        return 3, buf.getvalue()
    except ValueError as exc:  # a malformed flag literal, e.g. --filter
        buf.write(f"{path}: error: {exc}\n")
        return 2, buf.getvalue()
    ok = all(r.ok for r in reports)
    if flags.format == "records":
        for r in reports:
            buf.write(r.to_jsonl() + "\n")
    else:
        buf.write(f"# {command} {path}\n")
        for r in reports:
            buf.write(r.to_text() + "\n")
        buf.write(f"# {'PASS' if ok else 'FAIL'}: {sum(r.ok for r in reports)}/{len(reports)} suites pass\n")
    return (0 if ok else 1), buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="germcat", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    rp = sub.add_parser("run", help="run a pipeline on documents")
    rp.add_argument("command", choices=COMMANDS)
    rp.add_argument("docs", nargs="+")
    rp.add_argument("--window", type=int, default=None, help=f"index window for sequences and d_n (at most {MAX_WINDOW})")
    rp.add_argument("--max-size", type=int, default=None, help=f"largest arrow count to build (default {DEFAULT_MAX_SIZE})")
    rp.add_argument("--filter", default=None, help="override every filter: trivial, principal:<obj> or {<obj>, ...}")
    rp.add_argument("--format", choices=("text", "records"), default="text", help="human text or one JSON record per suite")
    rp.add_argument("--seed", type=int, default=None, help="seed for random-filters sections")
    rp.add_argument("--jobs", type=int, default=4, help="documents processed in parallel")
    sub.add_parser("gallery", help="list the shipped documents")
    args = ap.parse_args(argv)
    if args.cmd == "gallery":
        for name, _, prov in gallery():
            print(f"{name:<24} {prov}")
        return 0
    flags = Flags(args.window, args.max_size, args.filter, args.format, args.seed)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda p: _run_one(args.command, p, flags), args.docs))
    for _, text in results:  # buffered per document, printed in order
        sys.stdout.write(text)
    return max(code for code, _ in results)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
