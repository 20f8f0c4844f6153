"""
``tabkit`` command line: kl, cells, asymptotic, verify-tabular, quotient, standard.

Exit codes: 0 success, 2 axiom failure, 3 validation error, 4 horizon
overflow, 5 partial result without ``--allow-partial``, 64 usage error.
JSON reports go to ``--out``; a short summary goes to stdout and
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .cellmods import (GammaRepresentation, ModuleError, NonSplitError, check_hecke_relations,
                       gamma_simples, parse_field, standard_module, w_prime_and_theta)
from .coxeter import HorizonCapExceeded, PresentationMismatch
from .hecke import HorizonExceeded
from .io import (FormatError, LoadedAlgebra, emit, hecke_descriptor, load_algebra, read_json,
                 table_to_json, write_json)
from .table_algebra import AxiomReport, NotATableAlgebra, verify_table_axioms
from .tabular import (DatumError, IdealClosureError, TableDatum, cell_ideal_and_quotient,
                      cross_check_cells, hecke_datum, verify_tabular_axioms)

EXIT_OK = 0
EXIT_AXIOM = 2
EXIT_VALIDATION = 3
EXIT_HORIZON = 4
EXIT_PARTIAL = 5
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


class _Outcome:
    """Collects a status (pass / partial / fail) and the JSON report."""

    def __init__(self):
        self.status = "pass"
        self.messages: list[str] = []

    def fail(self, msg: str) -> None:
        self.status = "fail"
        self.messages.append(msg)

    def partial(self, msg: str) -> None:
        if self.status == "pass":
            self.status = "partial"
        self.messages.append(msg)

    def absorb(self, report: AxiomReport, what: str) -> None:
        for r in report.results:
            if r.status == "fail":
                w = f" witness {list(r.witness)}" if r.witness else ""
                self.fail(f"{what} {r.name} fails:{w} {r.detail}".rstrip())
            elif r.status in ("partial", "untested"):
                self.partial(f"{what} {r.name} {r.status} ({r.tested} tested, {r.untested} untested)")


# -- helpers ----------------------------------------------------------------------

def _load_datum(path: str) -> TableDatum:
    doc = read_json(path)
    if not isinstance(doc, dict) or doc.get("kind") != "datum":
        raise FormatError(f"{path}: not a datum file (kind must be 'datum')")
    return TableDatum.from_json(doc)


def _check_datum_labels(datum: TableDatum, table) -> None:
    missing = [l for l in datum.coords if l not in table.index]
    if missing and table.bound is None:
        raise DatumError(f"datum label {missing[0]!r} is not a basis label of the algebra")


def _distinguished_from_datum(datum: Optional[TableDatum], table):
    if datum is None or datum.idempotents is None:
        return None
    return [table.index[d] for d in datum.idempotents if d in table.index]


def _parse_labeling(text: Optional[str]) -> Optional[dict]:
    if text is None:
        return None
    p = Path(text)
    doc = read_json(p) if p.exists() else json.loads(text)
    if not isinstance(doc, dict):
        raise FormatError("a labeling is a JSON object partition -> basis label")
    return doc


def _write(args, doc: dict) -> None:
    if getattr(args, "out", None) and args.command != "kl":
        write_json(args.out, doc)


# -- subcommands --------------------------------------------------------------------

def cmd_kl(args, out: _Outcome) -> dict:
    from .io import algebra_from_json
    desc = hecke_descriptor(args.family, args.n, extended=not args.no_extended,
                            horizon=args.horizon, m=args.m, product_bound=args.product_bound)
    if args.family == "affA" and args.horizon is None:
        raise UsageError("affA needs --horizon")
    la = algebra_from_json(desc)
    table = la.table
    failures = table.kl.check_invariants() if not args.skip_checks else []
    for f in failures:
        out.fail(f"KL invariant: {f}")
    cov = table.coverage()
    origin = desc
    if args.descriptor_only:
        doc = desc
    else:
        doc = table_to_json(table, origin=origin)
    write_json(args.out, doc)
    print(f"{len(table)} basis elements; products known {cov['known']}/{cov['pairs']}, "
          f"complete {cov['complete']}/{cov['pairs']}; invariants "
          f"{'skipped' if args.skip_checks else ('ok' if not failures else 'FAILED')}")
    return {"kind": "kl-report", "labels": len(table), "coverage": cov,
            "invariant_failures": failures}


def cmd_cells(args, out: _Outcome) -> dict:
    from .pipeline import analyze
    la = load_algebra(args.alg)
    an = analyze(la.table)
    t, cells, af = la.table, an.cells, an.afunc
    doc = _cells_report(an)
    unc = sum(not c for c in cells.certified) + sum(not c for c in af.certified)
    if unc:
        out.partial(f"{sum(not c for c in cells.certified)} labels have uncertified cells, "
                    f"{sum(not c for c in af.certified)} uncertified a-values")
    if af.inconsistent_cells:
        out.fail(f"a is not constant on two-sided cells {af.inconsistent_cells}")
    ncell = {f: len(cells.cells[f]) for f in ("two_sided", "left", "right")}
    print(f"{ncell['two_sided']} two-sided, {ncell['left']} left, {ncell['right']} right cells; "
          f"a-values {sorted({af.values[i] for i in range(len(t)) if af.certified[i]})}")
    return doc


def _cells_report(an) -> dict:
    t, cells, af = an.table, an.cells, an.afunc
    labels = t.labels
    return {
        "kind": "cells-report",
        "cells": {f: cells.label_cells(f) for f in ("two_sided", "left", "right")},
        "order": {f: [list(e) for e in sorted(cells.order[f])] for f in ("two_sided", "left", "right")},
        "a_function": [{"label": labels[i],
                        "a": af.values[i] if isinstance(af.values[i], int) else None,
                        "certified": bool(af.certified[i] and cells.certified[i])}
                       for i in range(len(t))],
        "distinguished": [labels[d] for d in sorted(an.distinguished)],
        "undecided": [labels[d] for d in sorted(an.undecided)],
        "coverage": t.coverage(),
    }


def cmd_asymptotic(args, out: _Outcome) -> dict:
    from .asymptotic import corner_ring, prop_identity_check, verify_based_ring
    from .pipeline import analyze
    la = load_algebra(args.alg)
    datum = _load_datum(args.datum) if args.datum else None
    an = analyze(la.table, _distinguished_from_datum(datum, la.table))
    t, labels = la.table, la.table.labels
    based = verify_based_ring(an.asym, an.inverse, an.gamma)
    out.absorb(based, "based ring")
    blocks = []
    for ci, blk in sorted(an.asym.blocks.items()):
        consts = [[labels[i], labels[j], labels[k], c]
                  for (i, j), row in sorted(blk.constants.items()) for k, c in sorted(row.items())]
        blocks.append({"cell": ci, "members": [labels[m] for m in blk.members],
                       "identity": [labels[d] for d in blk.identity],
                       "constants": consts, "uncertified_pairs": len(blk.uncertified)})
    corners = []
    if an.inverse is not None:
        for lc in range(len(an.cells.cells["left"])):
            try:
                cr = corner_ring(an.asym, an.cells, lc, an.inverse)
            except ValueError as exc:
                out.partial(f"corner ring of left cell {lc}: {exc}")
                corners.append({"left_cell": lc, "error": str(exc)})
                continue
            rep = verify_table_axioms(cr)
            out.absorb(rep, f"corner ring L{lc}")
            corners.append({"left_cell": lc, "labels": cr.labels, **rep.to_json()})
    prop = prop_identity_check(t, an.gamma, an.cells, samples=args.samples, seed=args.seed) \
        if args.samples else prop_identity_check(t, an.gamma, an.cells)
    if prop["failures"]:
        out.fail(f"identity check fails on {prop['failures'][0]}")
    print(f"{len(blocks)} blocks; based ring {'ok' if not based.failed else 'FAILED'}; "
          f"{len(corners)} corner rings; identity checked on {prop['tested']} quadruples, "
          f"{len(prop['failures'])} failures")
    return {"kind": "asymptotic-report", "blocks": blocks, "based_ring": based.to_json(),
            "corner_rings": corners,
            "identity_check": {"tested": prop["tested"],
                               "failures": [[str(x) for x in f] for f in prop["failures"]]},
            "cross_cell_nonzero": len(an.asym.cross_cell)}


def _natural_datum(la: LoadedAlgebra, labeling):
    from .pipeline import analyze
    table = la.hecke_table()
    an = analyze(table)
    return table, an, hecke_datum(table, an.cells, an.afunc, an.gamma, labeling=labeling)


def cmd_verify_tabular(args, out: _Outcome) -> dict:
    from .pipeline import analyze
    la = load_algebra(args.alg)
    if args.datum and args.natural:
        raise UsageError("give either --datum or --natural")
    if args.natural:
        table, an, datum = _natural_datum(la, _parse_labeling(args.labeling))
    elif args.datum:
        datum = _load_datum(args.datum)
        table = la.table
        _check_datum_labels(datum, table)
        an = analyze(table, _distinguished_from_datum(datum, table))
    else:
        raise UsageError("verify-tabular needs --datum or --natural")
    if args.emit_datum:
        write_json(args.emit_datum, datum.to_json())
    rep = verify_tabular_axioms(datum, table, afunc=an.afunc, cells=an.cells)
    out.absorb(rep, "axiom")
    cross = cross_check_cells(datum, table, an.cells)
    for c in cross:
        out.fail(f"cells disagree with the datum: {c}")
    print("; ".join(f"{r.name} {r.status}" for r in rep.results)
          + f"; {rep.coverage.get('coordinated')}/{rep.coverage.get('labels')} labels coordinated")
    return {"kind": "tabular-report", **rep.to_json(), "cell_cross_check": cross}


def cmd_quotient(args, out: _Outcome) -> dict:
    la = load_algebra(args.alg)
    datum = _load_datum(args.datum)
    _check_datum_labels(datum, la.table)
    res = cell_ideal_and_quotient(datum, la.table, list(args.down_set))
    if res.untested:
        out.partial(f"ideal closure: {res.untested} instances need products beyond the horizon")
    if args.emit_alg:
        write_json(args.emit_alg, table_to_json(res.table))
    if args.emit_datum:
        write_json(args.emit_datum, res.datum.to_json())
    print(f"ideal spans {len(res.ideal)} labels; {len(res.table)} labels survive; "
          f"closure checked on {res.tested} instances ({res.untested} untested)")
    return {"kind": "quotient-report", "down_set": sorted(args.down_set), "ideal": res.ideal,
            "surviving": list(res.table.labels), "surviving_count": len(res.table),
            "tested": res.tested, "untested": res.untested,
            "lambdas": res.datum.lambdas}


def _default_generators(table) -> list[int]:
    if table.is_finite_complete() or table.lengths is None:
        return list(range(len(table)))
    return [i for i in range(len(table)) if table.lengths[i] <= 1]


def cmd_standard(args, out: _Outcome) -> dict:
    from .pipeline import analyze
    la = load_algebra(args.alg)
    datum = _load_datum(args.datum)
    table = la.table
    _check_datum_labels(datum, table)
    lam = args.lam
    if lam not in datum.lambdas:
        raise DatumError(f"{lam!r} is not an element of Lambda {datum.lambdas}")
    fld = parse_field(args.field)
    r = fld(Fraction(args.r))
    if r.is_zero():
        raise DatumError("r must be nonzero")
    gam = datum.gamma[lam]
    if args.rep:
        rep = GammaRepresentation.from_json(read_json(args.rep))
        if rep.field.tag != fld.tag:
            raise DatumError(f"representation is over {rep.field.tag}, not {fld.tag}")
        problems = rep.check(gam)
        if problems:
            raise ModuleError(f"N is not a Gamma({lam})-module: {problems[0]}")
        reps = [rep]
    else:
        reps = gamma_simples(gam, fld)
    an = analyze(table, _distinguished_from_datum(datum, table))
    in_table = [l for l in datum.cell(lam) if l in table.index]
    if not in_table:
        raise DatumError(f"no basis element of c_{lam} is loaded")
    cell = an.two_sided_cell(in_table[0])
    gens = ([table.index[g] for g in args.generators.split(",")] if args.generators
            else _default_generators(table))
    _, _, theta = w_prime_and_theta(datum, table, an.asym, lam, cell, gens)
    if theta["mismatch"] or not theta["right_ok"]:
        out.fail(f"theta does not intertwine on {theta['mismatch'][:3]}")
    modules = []
    for k, rep in enumerate(reps):
        sm = standard_module(datum, table, an.asym, lam, cell, rep, fld, r, gens)
        if sm.mismatch:
            out.fail(f"character {k}: tensor and pullback constructions differ on {sm.mismatch[:3]}")
        missing = [table.labels[g] for g in gens if g not in sm.tensor or g not in sm.pullback]
        if missing:
            out.partial(f"character {k}: no matrix for {missing[:3]}")
        relations = []
        if hasattr(table, "kl") and table.is_finite_complete():
            relations = check_hecke_relations(table, sm.tensor, fld, r)
            for p in relations:
                out.fail(f"character {k}: {p}")
        modules.append({
            "N": rep.to_json(), "dim": sm.dim, "equal": sm.equal,
            "matrices": {table.labels[a]: [[x.to_json() for x in row] for row in m]
                         for a, m in sorted(sm.tensor.items())},
            "relation_failures": relations,
        })
    print(f"lambda {lam} over {fld.tag} at r = {args.r}: {len(modules)} standard module(s), "
          f"dimensions {[m['dim'] for m in modules]}, constructions "
          f"{'agree' if all(m['equal'] for m in modules) else 'DISAGREE'}")
    return {"kind": "standard-report", "lambda": lam, "field": fld.tag, "r": args.r,
            "generators": [table.labels[g] for g in gens],
            "theta": {"tested": theta["tested"], "mismatch": theta["mismatch"]},
            "modules": modules}


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tabkit", description="Tabular algebras, cells and KL bases.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, alg=True):
        if alg:
            sp.add_argument("--alg", required=True, help="algebra JSON file")
        sp.add_argument("--out", help="write the JSON report here")
        sp.add_argument("--allow-partial", action="store_true",
                        help="exit 0 on partial (horizon-limited) results")

    sp = sub.add_parser("kl", help="KL basis and structure constants of a Hecke algebra")
    sp.add_argument("--family", required=True, choices=["A", "B", "I", "affA"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, help="dihedral order for family I")
    sp.add_argument("--horizon", type=int, help="length bound (affA)")
    sp.add_argument("--product-bound", type=int, help="KL length bound for products (affA)")
    sp.add_argument("--no-extended", action="store_true", help="drop the Omega factor (affA)")
    sp.add_argument("--descriptor-only", action="store_true",
                    help="write the short descriptor instead of all constants")
    sp.add_argument("--skip-checks", action="store_true")
    sp.add_argument("--out", required=True, help="algebra file to write")
    sp.add_argument("--allow-partial", action="store_true")
    sp.set_defaults(func=cmd_kl)

    sp = sub.add_parser("cells", help="cells, their order and the a-function")
    common(sp)
    sp.set_defaults(func=cmd_cells)

    sp = sub.add_parser("asymptotic", help="gamma, the asymptotic algebra and its checks")
    common(sp)
    sp.add_argument("--datum", help="datum file (its idempotents are used as D)")
    sp.add_argument("--samples", type=int, default=600)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_asymptotic)

    sp = sub.add_parser("verify-tabular", help="check A1-A5 for a datum")
    common(sp)
    sp.add_argument("--datum")
    sp.add_argument("--natural", action="store_true",
                    help="build the KL datum of a Hecke algebra")
    sp.add_argument("--labeling", help="partition -> label map (JSON text or file) for --natural")
    sp.add_argument("--emit-datum", help="write the datum used")
    sp.set_defaults(func=cmd_verify_tabular)

    sp = sub.add_parser("quotient", help="quotient by the cell ideal of a down-set")
    common(sp)
    sp.add_argument("--datum", required=True)
    sp.add_argument("--down-set", action="append", required=True,
                    help="element of Lambda (repeat for several)")
    sp.add_argument("--emit-alg")
    sp.add_argument("--emit-datum")
    sp.set_defaults(func=cmd_quotient)

    sp = sub.add_parser("standard", help="standard modules for one lambda")
    common(sp)
    sp.add_argument("--datum", required=True)
    sp.add_argument("--lambda", dest="lam", required=True)
    sp.add_argument("--field", default="QQ", help="QQ or GF(p)")
    sp.add_argument("--r", default="1", help="value of v (integer or fraction)")
    sp.add_argument("--rep", help="Gamma-representation JSON file (else all characters)")
    sp.add_argument("--generators", help="comma-separated basis labels")
    sp.set_defaults(func=cmd_standard)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("tabkit: a subcommand is required "
                             "(kl, cells, asymptotic, verify-tabular, quotient, standard)")
        out = _Outcome()
        doc = args.func(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HorizonCapExceeded, HorizonExceeded) as exc:
        print(f"horizon overflow: {exc}", file=sys.stderr)
        return EXIT_HORIZON
    except IdealClosureError as exc:
        print(f"axiom failure: ideal closure: {exc} (witness {list(exc.witness)})", file=sys.stderr)
        return EXIT_AXIOM
    except NonSplitError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (FormatError, DatumError, ModuleError, NotATableAlgebra, PresentationMismatch,
            KeyError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    doc["status"] = out.status
    if out.messages:
        doc["messages"] = out.messages
    _write(args, doc)
    for m in out.messages:
        print(m, file=sys.stderr)
    if out.status == "fail":
        return EXIT_AXIOM
    if out.status == "partial":
        print("partial result" + ("" if args.allow_partial else
                                  " (pass --allow-partial to accept)"), file=sys.stderr)
        return EXIT_OK if args.allow_partial else EXIT_PARTIAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
