"""
Normalized table algebras over the integers.

A table algebra is a based Z-algebra with unit 1 in the basis, nonnegative
structure constants (T1), an anti-automorphism permuting the basis (T2) and
the symmetry kappa(b_m, b_i b_j) = kappa(b_i, b_m bbar_j) (T3).

Products may be missing (``None`` in :attr:`TableAlgebra.constants` means
unknown) for horizon-bounded algebras; verification then only uses complete
products and reports coverage.

>>> z2 = TableAlgebra.group_ring(["1", "g"], lambda a, b: "1" if a == b else "g")
>>> verify_table_axioms(z2).passed
True
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

__all__ = [
    "TableAlgebra", "NotATableAlgebra", "AxiomReport", "AxiomResult",
    "kappa", "derive_bar", "verify_table_axioms",
]


class NotATableAlgebra(ValueError):
    """The input cannot be a normalized table algebra (bad bar, bad constants)."""


IntRow = dict  # label index -> int


@dataclass
class AxiomResult:
    """Outcome of one axiom: "pass" (every instance tested and fine), "partial"
    (no failures but some instances could not be tested), "fail" or "untested"."""
    name: str
    status: str
    witness: Optional[tuple] = None
    detail: str = ""
    tested: int = 0
    untested: int = 0

    @classmethod
    def from_counts(cls, name: str, tested: int, untested: int,
                    witness: Optional[tuple] = None, detail: str = "") -> "AxiomResult":
        if witness is not None:
            status = "fail"
        elif not tested:
            status = "untested"
        elif untested:
            status = "partial"
        else:
            status = "pass"
        return cls(name, status, witness, detail, tested, untested)

    def to_json(self) -> dict:
        out = {"axiom": self.name, "status": self.status, "tested": self.tested,
               "untested": self.untested}
        if self.witness is not None:
            out["witness"] = [str(w) for w in self.witness]
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class AxiomReport:
    results: list[AxiomResult]
    coverage: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.status == "pass" for r in self.results)

    @property
    def failed(self) -> bool:
        return any(r.status == "fail" for r in self.results)

    @property
    def partial(self) -> bool:
        return not self.failed and not self.passed

    def __getitem__(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"results": [r.to_json() for r in self.results], "coverage": self.coverage}


class TableAlgebra:
    """Basis labels, a unit label and integer structure constants.

    ``constants[(i, j)]`` is a dict k -> int for b_i b_j, or ``None`` when the
    product is unknown. Pairs that are absent count as known and zero only when
    ``complete`` is true.
    """

    def __init__(self, labels: Sequence[str], constants: dict, unit: str | int,
                 bar: Optional[Sequence[int]] = None, *, complete: bool = True,
                 name: str = ""):
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise ValueError("duplicate basis labels")
        self.unit = self.index[unit] if isinstance(unit, str) else int(unit)
        if not 0 <= self.unit < len(self.labels):
            raise ValueError("unit label is not a basis element")
        self.complete = complete
        self.name = name
        self._c: dict = {}
        for key, row in constants.items():
            i, j = (self.index[k] if isinstance(k, str) else k for k in key)
            if row is None:
                self._c[(i, j)] = None
                continue
            clean = {}
            for k, c in row.items():
                k = self.index[k] if isinstance(k, str) else k
                if isinstance(c, bool) or not isinstance(c, (int, Fraction)) or \
                        (isinstance(c, Fraction) and c.denominator != 1):
                    raise NotATableAlgebra(
                        f"structure constant for {self.labels[i]}*{self.labels[j]} "
                        f"is not an integer: {c!r}")
                if c:
                    clean[k] = int(c)
            self._c[(i, j)] = clean
        self.bar = list(bar) if bar is not None else None

    def __len__(self) -> int:
        return len(self.labels)

    @classmethod
    def group_ring(cls, elements: Sequence[str], mult: Callable[[str, str], str],
                   unit: str = "1") -> "TableAlgebra":
        idx = {e: i for i, e in enumerate(elements)}
        consts = {(a, b): {idx[mult(a, b)]: 1} for a in elements for b in elements}
        return cls(list(elements), consts, unit)

    def product(self, i: int, j: int) -> Optional[IntRow]:
        """b_i b_j as {k: coefficient}; None when unknown."""
        if (i, j) in self._c:
            row = self._c[(i, j)]
            return None if row is None else row
        return {} if self.complete else None

    def is_known(self, i: int, j: int) -> bool:
        return self.product(i, j) is not None

    def multiply(self, a: IntRow, b: IntRow) -> Optional[IntRow]:
        out: dict = {}
        for i, x in a.items():
            for j, y in b.items():
                r = self.product(i, j)
                if r is None:
                    return None
                for k, c in r.items():
                    out[k] = out.get(k, 0) + x * y * c
        return {k: c for k, c in out.items() if c}

    def unit_problems(self) -> list[str]:
        problems = []
        u = self.unit
        for i in range(len(self.labels)):
            for r, side in ((self.product(u, i), "left"), (self.product(i, u), "right")):
                if r is not None and r != {i: 1}:
                    problems.append(f"unit is not a {side} identity on {self.labels[i]}")
        return problems

    def to_json(self) -> dict:
        consts = []
        for (i, j), row in sorted(self._c.items()):
            if row is None:
                continue
            for k, c in sorted(row.items()):
                consts.append([self.labels[i], self.labels[j], self.labels[k], c])
        out = {"labels": list(self.labels), "unit": self.labels[self.unit],
               "constants": consts}
        unknown = sorted((self.labels[i], self.labels[j])
                         for (i, j), r in self._c.items() if r is None)
        if unknown:
            out["unknown"] = [list(p) for p in unknown]
        if self.bar is not None:
            out["bar"] = [self.labels[b] for b in self.bar]
        return out

    @classmethod
    def from_json(cls, doc: dict) -> "TableAlgebra":
        labels = doc["labels"]
        consts: dict = {}
        for a, b, c, val in doc.get("constants", []):
            consts.setdefault((a, b), {})[c] = val
        for a, b in doc.get("unknown", []):
            consts[(a, b)] = None
        index = {lab: i for i, lab in enumerate(labels)}
        bar = [index[x] for x in doc["bar"]] if doc.get("bar") else None
        return cls(labels, consts, doc.get("unit", labels[0]), bar,
                   complete=not doc.get("unknown"))


def kappa(t: TableAlgebra, m: str | int, x: IntRow) -> int:
    """Coefficient of basis element m in x."""
    if isinstance(m, str):
        if m not in t.index:
            raise KeyError(f"unknown label {m!r}")
        m = t.index[m]
    elif not 0 <= m < len(t):
        raise KeyError(f"unknown label index {m}")
    return x.get(m, 0)


def derive_bar(t: TableAlgebra) -> list[int]:
    """For each i, the unique j with the unit occurring in b_i b_j.

    Raises NotATableAlgebra when some i has no candidate or several, or when
    a needed product is unknown.
    """
    n = len(t)
    bar = []
    for i in range(n):
        cands = []
        for j in range(n):
            r = t.product(i, j)
            if r is None:
                raise NotATableAlgebra(
                    f"cannot derive bar: {t.labels[i]}*{t.labels[j]} is unknown")
            if r.get(t.unit, 0):
                cands.append(j)
        if len(cands) != 1:
            which = "no" if not cands else "several"
            raise NotATableAlgebra(
                f"{which} basis element x has the unit occurring in "
                f"{t.labels[i]}*x (candidates: {[t.labels[c] for c in cands]})")
        bar.append(cands[0])
    return bar


def verify_table_axioms(t: TableAlgebra) -> AxiomReport:
    """T1 (nonnegativity), T2 (bar is an involutive anti-automorphism on B)
    and T3 (kappa symmetry), each with a witness on failure.

    Instances needing an unknown product are counted as untested.
    """
    n = len(t)
    lab = t.labels
    results = []
    known = [(i, j) for i in range(n) for j in range(n) if t.is_known(i, j)]
    coverage = {"pairs": n * n, "known": len(known),
                "known_fraction": len(known) / (n * n) if n else 1.0}
    n_unknown = n * n - len(known)

    # T1
    witness, detail = None, ""
    for i, j in known:
        neg = [(k, c) for k, c in sorted(t.product(i, j).items()) if c < 0]
        if neg:
            k, c = neg[0]
            witness, detail = (lab[i], lab[j], lab[k], c), "negative structure constant"
            break
    if witness is None:
        problems = t.unit_problems()
        if problems:
            witness, detail = (lab[t.unit],), problems[0]
    results.append(AxiomResult.from_counts("T1", len(known), n_unknown, witness, detail))

    # bar: supplied or derived
    bar = t.bar
    if bar is None:
        try:
            bar = derive_bar(t)
        except NotATableAlgebra as exc:
            status = "fail" if t.complete else "untested"
            results.append(AxiomResult("T2", status, () if status == "fail" else None, str(exc)))
            results.append(AxiomResult("T3", "untested", None, "no bar map"))
            return AxiomReport(results, coverage)

    # T2: involution permuting B, fixing 1, anti-multiplicative on known pairs
    witness, detail = None, ""
    tested = untested = 0
    if sorted(bar) != list(range(n)):
        witness, detail = (), "bar does not permute the basis"
    elif any(bar[bar[i]] != i for i in range(n)):
        i = next(i for i in range(n) if bar[bar[i]] != i)
        witness, detail = (lab[i],), "bar is not an involution"
    elif bar[t.unit] != t.unit:
        witness, detail = (lab[t.unit],), "bar does not fix the unit"
    else:
        untested = n_unknown
        for i, j in known:
            rhs = t.product(bar[j], bar[i])
            if rhs is None:
                untested += 1
                continue
            tested += 1
            if {bar[k]: c for k, c in t.product(i, j).items()} != rhs:
                witness = (lab[i], lab[j])
                detail = "bar(b_i b_j) != bar(b_j) bar(b_i)"
                break
    results.append(AxiomResult.from_counts("T2", max(tested, 1 if witness else 0),
                                           untested, witness, detail))

    # T3: kappa(b_m, b_i b_j) = kappa(b_i, b_m bbar_j)
    witness, detail = None, ""
    tested = 0
    untested = n_unknown * n
    for i, j in known:
        r = t.product(i, j)
        for m in range(n):
            other = t.product(m, bar[j])
            if other is None:
                untested += 1
                continue
            tested += 1
            if r.get(m, 0) != other.get(i, 0):
                witness = (lab[m], lab[i], lab[j])
                detail = f"kappa mismatch {r.get(m, 0)} != {other.get(i, 0)}"
                break
        if witness:
            break
    results.append(AxiomResult.from_counts("T3", tested, untested, witness, detail))
    return AxiomReport(results, coverage)
