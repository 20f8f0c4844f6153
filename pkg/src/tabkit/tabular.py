"""
Table data (Lambda, Gamma, B, M, C, *) and mechanical verification of the
tabular axioms A1-A5 against a structure table.

A datum refers to ambient basis elements by label. ``coords`` maps a label to
its coordinates (lambda, S, b, T), where S, T are in M(lambda) and b is a
basis label of Gamma(lambda). For a horizon-bounded ambient table the datum
may cover only part of the loaded labels, and every check reports how many
of its instances could not be tested.

Elements of Gamma(lambda)[v, v^-1] are dicts {b index: LaurentPoly}.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import networkx as nx

from .cells import (AFunctionTable, CellDecomposition, GammaTable, StructureTable,
                    UnknownProduct, a_function, cell_decomposition)
from .laurent import LaurentPoly, ONE, ZERO
from .table_algebra import (AxiomReport, AxiomResult, NotATableAlgebra, TableAlgebra,
                            derive_bar, verify_table_axioms)

__all__ = [
    "DatumError", "IdealClosureError", "TableDatum", "RCoefficients", "PairingResult",
    "QuotientResult", "reduce_mod_lower", "r_coefficients", "pairing",
    "verify_tabular_axioms", "cell_ideal_and_quotient", "hecke_datum",
    "parse_partition", "dominates", "cross_check_cells", "hecke_trace_check", "hecke_tau",
]


class DatumError(ValueError):
    """The datum is malformed or does not match the ambient algebra."""


class IdealClosureError(RuntimeError):
    """Basis elements claimed to span an ideal do not."""

    def __init__(self, message: str, witness: tuple):
        super().__init__(message)
        self.witness = witness


@dataclass
class TableDatum:
    lambdas: list[str]
    covers: list[tuple[str, str]]  # (lower, higher)
    gamma: dict[str, TableAlgebra]
    M: dict[str, list[str]]
    coords: dict[str, tuple[str, str, str, str]]
    star: Optional[dict[str, str]] = None
    idempotents: Optional[list[str]] = None
    members: dict[str, list[str]] = field(default_factory=dict)
    trace: Optional[dict[str, LaurentPoly]] = None
    name: str = ""

    def __post_init__(self):
        if len(set(self.lambdas)) != len(self.lambdas):
            raise DatumError("duplicate labels in Lambda")
        lam = set(self.lambdas)
        g = nx.DiGraph()
        g.add_nodes_from(self.lambdas)
        for lo, hi in self.covers:
            if lo not in lam or hi not in lam:
                raise DatumError(f"cover ({lo}, {hi}) mentions an unknown element of Lambda")
            g.add_edge(lo, hi)
        if not nx.is_directed_acyclic_graph(g):
            raise DatumError("the order on Lambda has a cycle")
        self._order = g
        self._lower = {x: set(nx.ancestors(g, x)) for x in self.lambdas}
        for x in self.lambdas:
            if x not in self.gamma or x not in self.M:
                raise DatumError(f"missing Gamma or M for {x}")
        self._inverse: dict = {}
        for label, (x, s, b, t) in self.coords.items():
            if x not in lam:
                raise DatumError(f"{label}: unknown lambda {x}")
            ms = self.M[x]
            if s not in ms or t not in ms:
                raise DatumError(f"{label}: index not in M({x})")
            if b not in self.gamma[x].index:
                raise DatumError(f"{label}: {b} is not a basis label of Gamma({x})")
            key = (x, s, b, t)
            if key in self._inverse:
                raise DatumError(f"C is not injective: {label} and {self._inverse[key]} "
                                 f"both have coordinates {key}")
            self._inverse[key] = label
        self._lambda_of = {label: c[0] for label, c in self.coords.items()}
        for x, labels in self.members.items():
            for label in labels:
                self._lambda_of.setdefault(label, x)

    def C(self, lam: str, s: str, b: str, t: str) -> Optional[str]:
        return self._inverse.get((lam, s, b, t))

    def lower(self, lam: str) -> set[str]:
        """Elements strictly below lam."""
        return self._lower[lam]

    def leq(self, mu: str, lam: str) -> bool:
        return mu == lam or mu in self._lower[lam]

    def lambda_of(self, label: str) -> Optional[str]:
        return self._lambda_of.get(label)

    def cell(self, lam: str) -> list[str]:
        return sorted(l for l, x in self._lambda_of.items() if x == lam)

    def bar(self, lam: str) -> list[int]:
        g = self.gamma[lam]
        if g.bar is None:
            g.bar = derive_bar(g)
        return g.bar

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "kind": "datum",
            "lambdas": list(self.lambdas),
            "covers": [list(c) for c in sorted(self.covers)],
            "gamma": {x: self.gamma[x].to_json() for x in self.lambdas},
            "M": {x: list(self.M[x]) for x in self.lambdas},
            "C": [[label, *self.coords[label]] for label in sorted(self.coords)],
        }
        if self.star is not None:
            out["star"] = [[k, self.star[k]] for k in sorted(self.star)]
        if self.idempotents is not None:
            out["idempotents"] = list(self.idempotents)
        extra = {x: sorted(v) for x, v in self.members.items() if v}
        if extra:
            out["members"] = extra
        if self.trace is not None:
            out["trace"] = [[k, self.trace[k].to_pairs()] for k in sorted(self.trace)]
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, doc: dict) -> "TableDatum":
        try:
            lambdas = list(doc["lambdas"])
            gamma = {x: TableAlgebra.from_json(doc["gamma"][x]) for x in lambdas}
            coords = {}
            for entry in doc["C"]:
                label, x, s, b, t = entry
                if label in coords:
                    raise DatumError(f"label {label} has two coordinate triples")
                coords[label] = (x, s, b, t)
            star = {a: b for a, b in doc["star"]} if doc.get("star") is not None else None
            trace = ({k: LaurentPoly.from_pairs(p) for k, p in doc["trace"]}
                     if doc.get("trace") is not None else None)
            return cls(lambdas, [tuple(c) for c in doc.get("covers", [])], gamma,
                       {x: list(doc["M"][x]) for x in lambdas}, coords, star,
                       doc.get("idempotents"), {x: list(v) for x, v in doc.get("members", {}).items()},
                       trace, doc.get("name", ""))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DatumError):
                raise
            raise DatumError(f"malformed datum: {exc!r}") from exc


class _Bound:
    """A datum resolved against the indices of a structure table."""

    def __init__(self, datum: TableDatum, table: StructureTable):
        self.datum = datum
        self.table = table
        n = len(table)
        self.coord: list = [None] * n
        self.lam: list = [None] * n
        self.where: dict = {}
        for i, label in enumerate(table.labels):
            self.lam[i] = datum.lambda_of(label)
            c = datum.coords.get(label)
            if c is not None:
                x, s, b, t = c
                bi = datum.gamma[x].index[b]
                self.coord[i] = (x, s, bi, t)
                self.where[(x, s, bi, t)] = i
        self.outside = [label for label in datum.coords if label not in table.index]

    def index(self, x: str, s: str, bi: int, t: str) -> Optional[int]:
        return self.where.get((x, s, bi, t))


def _gmul(gam: TableAlgebra, x: dict, y: dict) -> Optional[dict]:
    """Product in Gamma[v, v^-1]; None when a needed product is unknown."""
    out: dict = {}
    for i, a in x.items():
        for j, b in y.items():
            r = gam.product(i, j)
            if r is None:
                return None
            ab = a * b
            for k, c in r.items():
                s = out.get(k, ZERO) + ab * c
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
    return out


def reduce_mod_lower(datum: TableDatum, table: StructureTable, x: dict, lam: str) -> dict:
    """Drop the coordinates of x lying in c_mu for mu < lam."""
    low = datum.lower(lam)
    if not low:
        return dict(x)
    labels = table.labels
    return {k: c for k, c in x.items() if datum.lambda_of(labels[k]) not in low}


@dataclass
class RCoefficients:
    lam: str
    matrix: dict  # (S', S) -> {b label: LaurentPoly}
    tested: int = 0
    untested: int = 0
    violations: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.violations

    def entry(self, s_prime: str, s: str) -> dict:
        return self.matrix.get((s_prime, s), {})


def _decompose(bound: _Bound, prod: dict, lam: str, t: str):
    """Split a reduced product into {S': {b: poly}} along column t.

    Returns (parts, problem, undecided): problem is a violation message,
    undecided is true when some label has no known coordinates.
    """
    parts: dict = {}
    labels = bound.table.labels
    for k, c in prod.items():
        co = bound.coord[k]
        if co is None:
            if bound.lam[k] is None or bound.lam[k] == lam:
                return None, None, True
            return None, f"{labels[k]} lies in c_{bound.lam[k]}, not in c_{lam} or below", False
        x, s2, b2, t2 = co
        if x != lam:
            return None, f"{labels[k]} lies in c_{x}, not in c_{lam} or below", False
        if t2 != t:
            return None, f"{labels[k]} has second index {t2}, expected {t}", False
        parts.setdefault(s2, {})[b2] = c
    return parts, None, False


def r_coefficients(datum: TableDatum, table: StructureTable, a: dict, lam: str,
                   *, bound: Optional[_Bound] = None) -> RCoefficients:
    """The matrix r_a(S', S) for lam, checked for independence of T and g.

    It is read off from the first column T whose products a C^1_{S,T} are all
    fully known, then every other available (T, g) is compared against
    sum_{S'} C^{r_a(S', S) g}_{S', T}.
    """
    if bound is None:
        bound = _Bound(datum, table)
    gam = datum.gamma[lam]
    ms = datum.M[lam]
    unit = gam.unit
    res = RCoefficients(lam, {})
    observed: dict = {}
    for t in ms:
        for g in range(len(gam)):
            for s in ms:
                idx = bound.index(lam, s, g, t)
                if idx is None:
                    res.untested += 1
                    continue
                try:
                    prod = table.multiply(a, {idx: ONE})
                except UnknownProduct:
                    res.untested += 1
                    continue
                prod = reduce_mod_lower(datum, table, prod, lam)
                parts, problem, undecided = _decompose(bound, prod, lam, t)
                if undecided:
                    res.untested += 1
                    continue
                if problem:
                    res.violations.append((table.labels[idx], problem))
                    res.tested += 1
                    continue
                observed[(t, g, s)] = parts
    base_t = next((t for t in ms if all((t, unit, s) in observed for s in ms)), None)
    if base_t is None:
        res.untested += len(observed)
        return res
    labels = gam.labels
    for s in ms:
        for s2, vec in observed[(base_t, unit, s)].items():
            res.matrix[(s2, s)] = {labels[b]: c for b, c in vec.items()}
    for (t, g, s), parts in observed.items():
        expected: dict = {}
        ok = True
        for s2 in ms:
            r = {gam.index[b]: c for b, c in res.matrix.get((s2, s), {}).items()}
            if not r:
                continue
            rg = _gmul(gam, r, {g: ONE})
            if rg is None:
                ok = False
                break
            if rg:
                expected[s2] = rg
        if not ok:
            res.untested += 1
            continue
        # labels outside the loaded table cannot be compared
        if any(bound.index(lam, s2, b, t) is None for s2, vec in expected.items() for b in vec):
            res.untested += 1
            continue
        res.tested += 1
        if expected != parts:
            res.violations.append(
                (table.labels[bound.index(lam, s, g, t)],
                 f"r_a depends on T or g (column {t}, g = {labels[g]})"))
    return res


@dataclass
class PairingResult:
    value: dict  # b label -> LaurentPoly
    consistent: bool
    tested: int
    violations: list


def pairing(datum: TableDatum, table: StructureTable, t: str, u: str, lam: str,
            *, bound: Optional[_Bound] = None) -> PairingResult:
    """<T, U> from C^1_{S,T} C^1_{U,V} = C^{<T,U>}_{S,V} mod A(<lam), over all S, V."""
    if bound is None:
        bound = _Bound(datum, table)
    gam = datum.gamma[lam]
    ms = datum.M[lam]
    value = None
    tested = 0
    violations = []
    for s in ms:
        for v_ in ms:
            i = bound.index(lam, s, gam.unit, t)
            j = bound.index(lam, u, gam.unit, v_)
            if i is None or j is None or not table.is_complete(i, j):
                continue
            prod = reduce_mod_lower(datum, table, table.row(i, j), lam)
            parts, problem, undecided = _decompose(bound, prod, lam, v_)
            if undecided:
                continue
            tested += 1
            if problem or set(parts) - {s}:
                violations.append(((s, t, u, v_), problem or "first index changed"))
                continue
            got = {gam.labels[b]: c for b, c in parts.get(s, {}).items()}
            if value is None:
                value = got
            elif got != value:
                violations.append(((s, t, u, v_), "pairing depends on S or V"))
    return PairingResult(value or {}, not violations and tested > 0, tested, violations)


# -- axioms ----------------------------------------------------------------

def _no_positive(p: LaurentPoly, const: int) -> bool:
    """p == const mod v^-1 Z[v^-1]."""
    return p.constant_term() == const and all(e <= 0 for e, _ in p.items())


def verify_tabular_axioms(datum: TableDatum, table: StructureTable, *,
                          tau: Optional[Callable[[int], LaurentPoly]] = None,
                          afunc: Optional[AFunctionTable] = None,
                          cells: Optional[CellDecomposition] = None,
                          axioms: tuple = ("A1", "A2", "A3", "A4", "A5")) -> AxiomReport:
    """Check A1-A5 of the datum against the table; see the module docstring."""
    bound = _Bound(datum, table)
    labels = table.labels
    n = len(table)
    finite = table.is_finite_complete()
    if afunc is None:
        if cells is None:
            cells = cell_decomposition(table)
        afunc = a_function(table, cells)
    results = []
    coverage = table.coverage()
    coverage["coordinated"] = sum(c is not None for c in bound.coord)
    coverage["labels"] = n
    if "A1" in axioms:
        results.append(_check_a1(datum, table, bound, finite))
    if "A2" in axioms:
        results.append(_check_a2(datum, table, bound, afunc))
    if "A3" in axioms:
        results.append(_check_a3(datum, table, bound))
    if "A4" in axioms:
        results.append(_check_a4(datum, table, bound, afunc))
    if "A5" in axioms:
        if tau is None and datum.trace is not None:
            tr = datum.trace
            tau = lambda i: tr.get(labels[i], ZERO)  # noqa: E731
        results.append(_check_a5(datum, table, bound, afunc, tau))
    return AxiomReport(results, coverage)


def _check_a1(datum, table, bound, finite) -> AxiomResult:
    labels = table.labels
    tested = untested = 0
    for x in datum.lambdas:
        rep = verify_table_axioms(datum.gamma[x])
        tested += 1
        if rep.failed:
            bad = next(r for r in rep.results if r.status == "fail")
            return AxiomResult.from_counts("A1", tested, untested, (x, bad.name),
                                           f"Gamma({x}) fails {bad.name}: {bad.detail}")
        if not rep.passed:
            untested += 1
    uncovered = [labels[i] for i in range(len(table)) if bound.coord[i] is None]
    if uncovered:
        if finite:
            return AxiomResult.from_counts("A1", tested, untested, (uncovered[0],),
                                           "basis element outside the image of C")
        untested += len(uncovered)
    if bound.outside and finite:
        return AxiomResult.from_counts("A1", tested, untested, (bound.outside[0],),
                                       "C maps to a label that is not an ambient basis element")
    eps = datum.idempotents if datum.idempotents is not None else [labels[u] for u in table.unit]
    idx = []
    for e in eps:
        if e not in table.index or e not in datum.coords:
            return AxiomResult.from_counts("A1", tested, untested, (e,),
                                           "idempotent is not in the image of C")
        idx.append(table.index[e])
    for e in idx:
        for f in idx:
            r = table.row(e, f)
            if r is None:
                untested += 1
                continue
            tested += 1
            want = {e: ONE} if e == f else {}
            if r != want:
                return AxiomResult.from_counts("A1", tested, untested, (labels[e], labels[f]),
                                               "idempotents are not mutually orthogonal idempotents")
    for k in range(len(table)):
        if bound.coord[k] is None:
            continue
        left = right = None
        for e in idx:
            r = table.row(e, k)
            if r is None:
                left = left or "unknown"
            elif r == {k: ONE}:
                left = "ok"
            r = table.row(k, e)
            if r is None:
                right = right or "unknown"
            elif r == {k: ONE}:
                right = "ok"
        if left == "ok" and right == "ok":
            tested += 1
        elif "unknown" in (left, right):
            untested += 1
        else:
            return AxiomResult.from_counts("A1", tested, untested, (labels[k],),
                                           "no idempotents e, e' with e X e' = X")
    return AxiomResult.from_counts("A1", tested, untested)


def _check_a2(datum, table, bound, afunc) -> AxiomResult:
    labels = table.labels
    n = len(table)
    tested = untested = 0
    if datum.star is not None:
        star = [table.index.get(datum.star.get(l, "")) for l in labels]
    elif table.star is not None:
        star = list(table.star)
    else:
        return AxiomResult("A2", "untested", None, "no star map supplied")
    for i in range(n):
        if star[i] is None:
            if table.bound is None:
                return AxiomResult.from_counts("A2", tested, untested, (labels[i],),
                                               "star is not defined on this basis element")
            untested += 1
            continue
        if star[star[i]] != i:
            return AxiomResult.from_counts("A2", tested, untested, (labels[i],),
                                           "star is not an involution")
    for i in range(n):
        for j in range(n):
            si, sj = star[i], star[j]
            if si is None or sj is None:
                untested += 1
                continue
            r = table.row(i, j)
            r2 = table.row(sj, si)
            if r is None or r2 is None:
                untested += 1
                continue
            tested += 1
            mapped = {star[k]: c for k, c in r.items()}
            if None in mapped or mapped != r2:
                return AxiomResult.from_counts("A2", tested, untested, (labels[i], labels[j]),
                                               "(XY)* != Y* X*")
    for i in range(n):
        co = bound.coord[i]
        if co is None:
            continue
        x, s, b, t = co
        want = bound.index(x, t, datum.bar(x)[b], s)
        if want is None or star[i] is None:
            untested += 1
            continue
        tested += 1
        if star[i] != want:
            return AxiomResult.from_counts(
                "A2", tested, untested, (labels[i],),
                f"star({labels[i]}) = {labels[star[i]]}, expected {labels[want]}")
    for x in datum.lambdas:
        vals = {afunc.values[i] for i in range(n)
                if bound.coord[i] is not None and bound.coord[i][0] == x and afunc.certified[i]}
        tested += 1
        if len(vals) > 1:
            return AxiomResult.from_counts("A2", tested, untested, (x, sorted(vals)),
                                           "a-function is not constant on c_lambda")
    return AxiomResult.from_counts("A2", tested, untested)


def _check_a3(datum, table, bound) -> AxiomResult:
    labels = table.labels
    tested = untested = 0
    for a in range(len(table)):
        for x in datum.lambdas:
            rc = r_coefficients(datum, table, {a: ONE}, x, bound=bound)
            tested += rc.tested
            untested += rc.untested
            if rc.violations:
                where, why = rc.violations[0]
                return AxiomResult.from_counts("A3", tested, untested, (labels[a], where), why)
    return AxiomResult.from_counts("A3", tested, untested)


def _check_a4(datum, table, bound, afunc) -> AxiomResult:
    labels = table.labels
    n = len(table)
    tested = untested = 0
    coord = bound.coord
    for i in range(n):
        ci = coord[i]
        for j in range(n):
            r = table.row(i, j)
            if r is None:
                untested += 1
                continue
            cj = coord[j]
            expect: Optional[dict] = None  # K'' index -> kappa, when the pattern applies
            if ci is not None and cj is not None and ci[0] == cj[0] and ci[3] == cj[1]:
                gam = datum.gamma[ci[0]]
                bb = gam.product(ci[2], cj[2])
                if bb is None:
                    untested += len(r)
                    continue
                expect = {}
                for b2, kap in bb.items():
                    k = bound.index(ci[0], ci[1], b2, cj[3])
                    if k is not None:
                        expect[k] = kap
            for k, g in r.items():
                if coord[k] is None or not afunc.certified[k] or ci is None or cj is None:
                    untested += 1
                    continue
                tested += 1
                a = afunc.values[k]
                deg = g.degree()
                if deg > a:
                    return AxiomResult.from_counts("A4", tested, untested,
                                                   (labels[i], labels[j], labels[k]),
                                                   "degree exceeds a")
                hit = deg == a
                want = expect is not None and k in expect
                if hit != want:
                    return AxiomResult.from_counts(
                        "A4", tested, untested, (labels[i], labels[j], labels[k]),
                        "maximum degree attained" if hit else "maximum degree not attained")
                if hit and _is_unit(datum, ci) and _is_unit(datum, cj) and _is_unit(datum, coord[k]):
                    if g.coefficient(a) != 1:
                        return AxiomResult.from_counts(
                            "A4", tested, untested, (labels[i], labels[j], labels[k]),
                            "gamma != 1 for a product of unit coordinates")
            if expect:
                for k in expect:
                    if k not in r and afunc.certified[k]:
                        tested += 1
                        return AxiomResult.from_counts(
                            "A4", tested, untested, (labels[i], labels[j], labels[k]),
                            "maximum degree not attained")
    return AxiomResult.from_counts("A4", tested, untested)


def _is_unit(datum: TableDatum, co) -> bool:
    return co[2] == datum.gamma[co[0]].unit


def _check_a5(datum, table, bound, afunc, tau) -> AxiomResult:
    labels = table.labels
    n = len(table)
    if tau is None:
        return AxiomResult("A5", "untested", None, "no trace supplied")
    tested = untested = 0
    tv = [tau(i) for i in range(n)]
    star = table.star
    if datum.star is not None:
        star = [table.index.get(datum.star.get(l, "")) for l in labels]
    if star is not None:
        for i in range(n):
            if star[i] is None:
                untested += 1
                continue
            tested += 1
            if tv[i] != tv[star[i]]:
                return AxiomResult.from_counts("A5", tested, untested, (labels[i],),
                                               "tau(X) != tau(X*)")
    for i in range(n):
        for j in range(i + 1, n):
            if not (table.is_complete(i, j) and table.is_complete(j, i)):
                untested += 1
                continue
            tested += 1
            t1 = sum((g * tv[k] for k, g in table.row(i, j).items()), ZERO)
            t2 = sum((g * tv[k] for k, g in table.row(j, i).items()), ZERO)
            if t1 != t2:
                return AxiomResult.from_counts("A5", tested, untested, (labels[i], labels[j]),
                                               "tau(XY) != tau(YX)")
    for i in range(n):
        co = bound.coord[i]
        if co is None or not afunc.certified[i]:
            untested += 1
            continue
        tested += 1
        x, s, b, t = co
        want = 1 if (s == t and b == datum.gamma[x].unit) else 0
        p = tv[i].shift(afunc.values[i])
        if not _no_positive(p, want):
            return AxiomResult.from_counts("A5", tested, untested, (labels[i], repr(p)),
                                           f"tau(v^a X) is not {want} mod v^-1 Z[v^-1]")
    return AxiomResult.from_counts("A5", tested, untested)


# -- cross-checks with the cells computed from the basis alone ------------

def cross_check_cells(datum: TableDatum, table: StructureTable,
                      cells: CellDecomposition) -> list[str]:
    """Compare computed cells with the datum's classes on certified labels.

    Two-sided cells should be the sets c_lambda, left cells the classes of
    (lambda, T) and right cells the classes of (lambda, S).
    """
    bound = _Bound(datum, table)
    keys = {
        "two_sided": lambda c: c[0],
        "left": lambda c: (c[0], c[3]),
        "right": lambda c: (c[0], c[1]),
    }
    problems = []
    ok = [i for i in range(len(table)) if bound.coord[i] is not None and cells.certified[i]]
    for flavor, key in keys.items():
        by_key: dict = {}
        by_cell: dict = {}
        for i in ok:
            by_key.setdefault(key(bound.coord[i]), set()).add(cells.cell_of[flavor][i])
            by_cell.setdefault(cells.cell_of[flavor][i], set()).add(key(bound.coord[i]))
        for k, v in by_key.items():
            if len(v) > 1:
                problems.append(f"{flavor}: datum class {k} spans {len(v)} computed cells")
        for c, v in by_cell.items():
            if len(v) > 1:
                problems.append(f"{flavor}: computed cell {c} meets {len(v)} datum classes")
    return problems


# -- cell ideals and quotients ----------------------------------------------

@dataclass
class QuotientResult:
    table: StructureTable
    datum: TableDatum
    ideal: list[str]
    tested: int
    untested: int


def cell_ideal_and_quotient(datum: TableDatum, table: StructureTable,
                            down_set: list[str]) -> QuotientResult:
    """Quotient by the span of c_mu, mu in down_set.

    Raises DatumError when down_set is not downward closed and
    IdealClosureError when a product involving the ideal leaves it.
    """
    down = set(down_set)
    for x in down:
        if x not in datum.lambdas:
            raise DatumError(f"{x} is not an element of Lambda")
        missing = datum.lower(x) - down
        if missing:
            raise DatumError(f"down-set is not downward closed: {sorted(missing)[0]} < {x}")
    labels = table.labels
    in_ideal = [datum.lambda_of(l) in down if datum.lambda_of(l) is not None else None
                for l in labels]
    tested = untested = 0
    n = len(table)
    for i in range(n):
        for j in range(n):
            if not (in_ideal[i] or in_ideal[j]):
                continue
            r = table.row(i, j)
            if r is None:
                untested += 1
                continue
            for k in r:
                if in_ideal[k] is None:
                    untested += 1
                    continue
                tested += 1
                if not in_ideal[k]:
                    raise IdealClosureError(
                        f"{labels[i]} * {labels[j]} has {labels[k]} outside the ideal",
                        (labels[i], labels[j], labels[k]))
    keep = [i for i in range(n) if not in_ideal[i]]
    ideal = [labels[i] for i in range(n) if in_ideal[i]]
    qtable = table.restrict(keep, name=(table.name + " / ideal").strip())
    qtable.bound = table.bound
    kept = set(qtable.labels)
    lambdas = [x for x in datum.lambdas if x not in down]
    qdatum = TableDatum(
        lambdas,
        [(a, b) for a, b in datum.covers if a not in down and b not in down],
        {x: datum.gamma[x] for x in lambdas},
        {x: list(datum.M[x]) for x in lambdas},
        {l: c for l, c in datum.coords.items() if c[0] not in down},
        None if datum.star is None else
        {a: b for a, b in datum.star.items() if a in kept and b in kept},
        None if datum.idempotents is None else [e for e in datum.idempotents if e in kept],
        {x: v for x, v in datum.members.items() if x not in down},
        None,  # no trace is claimed on the quotient
        (datum.name + " / ideal").strip())
    return QuotientResult(qtable, qdatum, ideal, tested, untested)


# -- partitions ---------------------------------------------------------------

def parse_partition(text: str) -> tuple[int, ...]:
    """'(2,1)', '2,1' or '21' (single digits) -> (2, 1)."""
    body = text.strip().strip("()[]")
    parts = [p for p in re.split(r"[,\s]+", body) if p] if ("," in body or " " in body) \
        else list(body)
    try:
        lam = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise DatumError(f"not a partition: {text!r}") from exc
    if not lam or any(p <= 0 for p in lam) or list(lam) != sorted(lam, reverse=True):
        raise DatumError(f"not a partition: {text!r}")
    return lam


def dominates(lam: tuple, mu: tuple) -> bool:
    """lam dominates mu (same size assumed)."""
    a = b = 0
    for k in range(max(len(lam), len(mu))):
        a += lam[k] if k < len(lam) else 0
        b += mu[k] if k < len(mu) else 0
        if a < b:
            return False
    return True


def _fmt_partition(p: tuple) -> str:
    return "(" + ",".join(map(str, p)) + ")"


# -- Hecke instances ----------------------------------------------------------

def hecke_datum(table, cells: CellDecomposition, afunc: AFunctionTable,
                gamma: GammaTable, *, labeling: Optional[dict[str, str]] = None) -> TableDatum:
    """Table datum of a KL structure table, built from matrix units in J.

    Each left cell L_j of a two-sided cell contributes the index j to M, named
    after its distinguished involution d_j. An element u_{1j} with
    t_u t_{u^-1} = t_{d_1} and t_{u^-1} t_u = t_{d_j} plays the role of the
    matrix unit e_{1j}; the Gamma-coordinate of w in row S and column T is the
    single basis element t_{u_{1S}} t_w t_{u_{1T}^-1} of the corner ring at d_1.

    ``labeling`` maps partition strings to a representative basis label; the
    resulting Lambda order must then agree with the computed cell order (the
    convention: lam <= mu iff lam dominates mu).

    Labels whose coordinates cannot be certified on the horizon stay outside
    ``coords`` and are listed in ``members`` when their cell is known.
    """
    from .hecke import distinguished_involutions

    labels = table.labels
    group = table.kl.group
    elements = table.elements
    inv = [table.element_index[group.inverse(x)] for x in elements]
    dset, _ = distinguished_involutions(table, afunc)
    dset = set(dset)
    left_of = cells.cell_of["left"]
    two_of = cells.cell_of["two_sided"]
    cert = [cells.certified[i] and afunc.certified[i] for i in range(len(table))]

    def jprod(x: int, y: int) -> Optional[dict]:
        return gamma.product(x, y)

    def jprod3(x: int, w: int, y: int) -> Optional[dict]:
        first = jprod(x, w)
        if first is None:
            return None
        out: dict = {}
        for z, c in first.items():
            p = jprod(z, y)
            if p is None:
                return None
            for k, d in p.items():
                out[k] = out.get(k, 0) + c * d
        return {k: c for k, c in out.items() if c}

    lambdas, gammas, Ms, coords, members = [], {}, {}, {}, {}
    cell_name = {}
    for ci, comp in enumerate(cells.cells["two_sided"]):
        ds = sorted(d for d in dset if two_of[d] == ci and cert[d])
        if not ds:
            continue
        name = f"c{ci}"
        cell_name[ci] = name
        lambdas.append(name)
        d_of_left = {}
        for d in ds:
            if left_of[d] in d_of_left:
                raise DatumError(f"two distinguished involutions in one left cell: "
                                 f"{labels[d_of_left[left_of[d]]]}, {labels[d]}")
            d_of_left[left_of[d]] = d
        m_labels = [labels[d] for d in ds]
        Ms[name] = m_labels
        pos = {left_of[d]: k for k, d in enumerate(ds)}
        d1 = ds[0]
        # matrix units u_{1j}
        units = {0: d1}
        for w in sorted(comp, key=lambda i: (table.lengths[i], i)):
            if not cert[w] or left_of[inv[w]] != left_of[d1] or left_of[w] not in pos:
                continue
            j = pos[left_of[w]]
            if j in units:
                continue
            if jprod(w, inv[w]) == {d1: 1} and jprod(inv[w], w) == {ds[j]: 1}:
                units[j] = w
        corner: dict = {}
        for w in comp:
            if not cert[w] or left_of[w] not in pos or left_of[inv[w]] not in pos:
                members.setdefault(name, []).append(labels[w])
                continue
            s, t = pos[left_of[inv[w]]], pos[left_of[w]]
            if s not in units or t not in units:
                members.setdefault(name, []).append(labels[w])
                continue
            b = jprod3(units[s], w, inv[units[t]])
            if b is None or len(b) != 1 or next(iter(b.values())) != 1:
                members.setdefault(name, []).append(labels[w])
                continue
            (bk,) = b
            if left_of[bk] != left_of[d1] or left_of[inv[bk]] != left_of[d1]:
                raise DatumError(f"{labels[w]}: corner coordinate {labels[bk]} is not in the corner")
            corner[w] = bk
            coords[labels[w]] = (name, m_labels[s], labels[bk], m_labels[t])
        blist = sorted(set(corner.values()) | {d1}, key=lambda i: (table.lengths[i], i))
        bpos = {b: k for k, b in enumerate(blist)}
        consts = {}
        for b in blist:
            for b2 in blist:
                p = jprod(b, b2)
                if p is None or any(k not in bpos for k in p):
                    consts[(bpos[b], bpos[b2])] = None
                else:
                    consts[(bpos[b], bpos[b2])] = {bpos[k]: c for k, c in p.items()}
        bar = [bpos.get(inv[b]) for b in blist]
        gam = TableAlgebra([labels[b] for b in blist], consts, bpos[d1],
                           None if None in bar else bar,
                           complete=all(c is not None for c in consts.values()),
                           name=f"Gamma({name})")
        gammas[name] = gam
    covers = _cell_covers(cells, cell_name)
    if labeling is not None:
        lambdas, covers, gammas, Ms, coords, members = _relabel(
            labeling, table, cells, cell_name, lambdas, covers, gammas, Ms, coords, members)
    star = {labels[i]: labels[inv[i]] for i in range(len(table))}
    trace = {labels[i]: hecke_tau(table, i) for i in range(len(table))}
    return TableDatum(lambdas, covers, gammas, Ms, coords, star, None, members, trace,
                      name=table.name)


def hecke_tau(table, i: int) -> LaurentPoly:
    """tau(C_w): the T_e coefficient, zero off the identity fibre."""
    x = table.elements[i]
    if x.omega:
        return ZERO
    kl = table.kl
    k = kl.index_of(x)
    e = kl.ix.index[kl.group.identity()]
    return kl.coeff[k].get(e, ZERO)


def hecke_trace_check(table, afunc: AFunctionTable, distinguished) -> AxiomResult:
    """tau(v^a(w) C_w) == [w in D] mod v^-1 Z[v^-1] on every certified label.

    Needs no datum, so it also covers labels the natural datum leaves
    without coordinates.
    """
    dset = set(distinguished)
    tested = untested = 0
    for i in range(len(table)):
        if not afunc.certified[i]:
            untested += 1
            continue
        tested += 1
        p = hecke_tau(table, i).shift(afunc.values[i])
        want = 1 if i in dset else 0
        if not _no_positive(p, want):
            return AxiomResult.from_counts("A5", tested, untested, (table.labels[i], repr(p)),
                                           f"tau(v^a C_w) is not {want} mod v^-1 Z[v^-1]")
    return AxiomResult.from_counts("A5", tested, untested)


def _cell_covers(cells: CellDecomposition, cell_name: dict) -> list[tuple[str, str]]:
    g = nx.DiGraph()
    g.add_nodes_from(cell_name)
    for lo, hi in cells.order["two_sided"]:
        g.add_edge(lo, hi)
    closure = nx.transitive_closure_dag(g)
    sub = closure.subgraph(cell_name)
    red = nx.transitive_reduction(nx.DiGraph(sub))
    return sorted((cell_name[a], cell_name[b]) for a, b in red.edges())


def _relabel(labeling, table, cells, cell_name, lambdas, covers, gammas, Ms, coords, members):
    rename = {}
    parts = {}
    for ptext, rep in labeling.items():
        p = parse_partition(ptext)
        if rep not in table.index:
            raise DatumError(f"labeling representative {rep!r} is not a loaded basis label")
        ci = cells.cell_of["two_sided"][table.index[rep]]
        if ci not in cell_name:
            raise DatumError(f"{ptext}: representative {rep} lies in an uncertified cell")
        old = cell_name[ci]
        if old in rename:
            raise DatumError(f"{ptext} and another partition label the same cell")
        rename[old] = _fmt_partition(p)
        parts[old] = p
    if set(rename) != set(lambdas):
        raise DatumError("labeling does not cover every cell of Lambda")
    sizes = {sum(p) for p in parts.values()}
    if len(sizes) != 1:
        raise DatumError("labeling partitions have different sizes")
    # lam <= mu iff lam dominates mu; compare with the computed order
    g = nx.DiGraph()
    g.add_nodes_from(lambdas)
    g.add_edges_from(covers)
    for a in lambdas:
        for b in lambdas:
            if a == b:
                continue
            computed = nx.has_path(g, a, b)
            claimed = dominates(parts[a], parts[b])
            if computed != claimed:
                raise DatumError(
                    f"cell order disagrees with dominance for {rename[a]}, {rename[b]}")
    r = rename.__getitem__
    coords = {l: (r(x), s, b, t) for l, (x, s, b, t) in coords.items()}
    for x in gammas:
        gammas[x].name = f"Gamma({r(x)})"
    return ([r(x) for x in lambdas], [(r(a), r(b)) for a, b in covers],
            {r(x): g for x, g in gammas.items()}, {r(x): m for x, m in Ms.items()},
            coords, {r(x): v for x, v in members.items()})
