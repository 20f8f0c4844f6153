"""
Asymptotic algebras: the integer ring J spanned by t_x with structure
constants gamma, split into blocks J_c over two-sided cells, together with
the map Phi_lambda, corner rings and matrix-ring witnesses.

Only certified gamma entries are used; products that cannot be certified
are listed per block rather than treated as zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Optional, Sequence

from .cells import CellDecomposition, GammaTable, StructureTable
from .laurent import LaurentPoly, ZERO
from .table_algebra import AxiomReport, AxiomResult, TableAlgebra

__all__ = [
    "AsymptoticBlock", "AsymptoticAlgebra", "MatrixRingWitness", "build_asymptotic",
    "phi_lambda", "phi_from_r", "corner_ring", "verify_matrix_ring", "verify_based_ring",
    "witness_from_datum", "witness_from_cells", "n_mu", "dual_partition",
    "prop_identity_check", "gamma_symmetry_check",
]


@dataclass
class AsymptoticBlock:
    cell: int
    members: list[int]
    constants: dict  # (i, j) -> {k: int}, only pairs inside the block
    uncertified: set = field(default_factory=set)
    identity: list[int] = field(default_factory=list)  # the d in D for this cell

    def product(self, i: int, j: int) -> Optional[dict]:
        if (i, j) in self.uncertified:
            return None
        return self.constants.get((i, j), {})


@dataclass
class AsymptoticAlgebra:
    labels: list[str]
    blocks: dict[int, AsymptoticBlock]
    cell_of: list[int]
    cross_cell: list = field(default_factory=list)  # nonzero gamma between cells

    def product(self, i: int, j: int) -> Optional[dict]:
        """t_i t_j, or None when not certified."""
        ci, cj = self.cell_of[i], self.cell_of[j]
        if ci != cj:
            return {}
        blk = self.blocks.get(ci)
        return None if blk is None else blk.product(i, j)

    def multiply(self, x: dict, y: dict) -> Optional[dict]:
        """Product of elements {index: coefficient}; coefficients may be Laurent."""
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                r = self.product(i, j)
                if r is None:
                    return None
                for k, c in r.items():
                    s = out.get(k, 0) + a * b * c
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        return out

    def block_table_algebra(self, cell: int) -> TableAlgebra:
        blk = self.blocks[cell]
        pos = {m: k for k, m in enumerate(blk.members)}
        consts = {}
        for i in blk.members:
            for j in blk.members:
                r = blk.product(i, j)
                consts[(pos[i], pos[j])] = None if r is None else {pos[k]: c for k, c in r.items()}
        unit = pos[blk.identity[0]] if blk.identity else 0
        return TableAlgebra([self.labels[m] for m in blk.members], consts, unit,
                            complete=not blk.uncertified)


def build_asymptotic(gamma: GammaTable, cells: CellDecomposition,
                     distinguished: Iterable[int] = (),
                     requested: Optional[Iterable[int]] = None) -> AsymptoticAlgebra:
    """Blocks J_c from the certified gamma entries.

    A pair (x, y) in a block is uncertified unless its product is fully known
    and every target has a certified a-value. ``distinguished`` lists D.
    """
    table = gamma.table
    two = cells.cell_of["two_sided"]
    comps = cells.cells["two_sided"]
    wanted = set(range(len(comps))) if requested is None else set(requested)
    dset = set(distinguished)
    blocks = {}
    for ci in sorted(wanted):
        members = comps[ci]
        consts, unc = {}, set()
        for i in members:
            for j in members:
                p = gamma.product(i, j)
                if p is None:
                    unc.add((i, j))
                    continue
                inside = {k: c for k, c in p.items() if two[k] == ci}
                if inside:
                    consts[(i, j)] = inside
        blocks[ci] = AsymptoticBlock(ci, list(members), consts, unc,
                                     sorted(d for d in dset if two[d] == ci))
    cross = [((i, j, k), c) for (i, j, k), c in gamma.nonzero()
             if not (two[i] == two[j] == two[k])]
    return AsymptoticAlgebra(list(table.labels), blocks, list(two), cross)


# -- Phi_lambda --------------------------------------------------------------

def phi_lambda(table: StructureTable, asym: AsymptoticAlgebra, x: dict,
               cell: int) -> Optional[dict]:
    """Phi(x) = sum_{d in D_c, z in c} g_{x,d,z} t_z, or None when some needed
    product is unknown or leaves the loaded labels."""
    blk = asym.blocks[cell]
    members = set(blk.members)
    out: dict = {}
    for i, a in x.items():
        for d in blk.identity:
            if not table.is_complete(i, d):
                return None
            for z, g in table.row(i, d).items():
                if z in members:
                    s = out.get(z, ZERO) + a * g
                    if s:
                        out[z] = s
                    else:
                        out.pop(z, None)
    return out


def phi_from_r(datum, table: StructureTable, x: dict, lam: str) -> Optional[dict]:
    """The same map through the datum: sum (r_x(S', S))_b t of C(S', b, S)."""
    from .tabular import r_coefficients
    rc = r_coefficients(datum, table, x, lam)
    if rc.violations or rc.untested:
        return None
    out = {}
    for (s2, s), vec in rc.matrix.items():
        for b, c in vec.items():
            label = datum.C(lam, s2, b, s)
            if label is None or label not in table.index:
                return None
            out[table.index[label]] = c
    return out


# -- corner rings and matrix rings ---------------------------------------

def corner_ring(asym: AsymptoticAlgebra, cells: CellDecomposition, left_cell: int,
                inverse: Sequence[int]) -> TableAlgebra:
    """J restricted to L cap L^-1 with bar t_w -> t_{w^-1}.

    The unit is the distinguished involution of L; products that are not
    certified, or that leave the loaded part of L cap L^-1, are unknown.
    """
    left_of = cells.cell_of["left"]
    members = [w for w in cells.cells["left"][left_cell] if left_of[inverse[w]] == left_cell]
    two = cells.cell_of["two_sided"][members[0]]
    blk = asym.blocks[two]
    ds = [d for d in blk.identity if left_of[d] == left_cell]
    if len(ds) != 1:
        raise ValueError(f"left cell {left_cell} has {len(ds)} distinguished involutions loaded")
    pos = {w: k for k, w in enumerate(members)}
    consts = {}
    for i in members:
        for j in members:
            r = blk.product(i, j)
            if r is None or any(k not in pos for k in r):
                consts[(pos[i], pos[j])] = None
            else:
                consts[(pos[i], pos[j])] = {pos[k]: c for k, c in r.items()}
    bar = [pos[inverse[w]] for w in members]
    return TableAlgebra([asym.labels[w] for w in members], consts, pos[ds[0]], bar,
                        complete=all(c is not None for c in consts.values()),
                        name=f"J(L{left_cell} cap L{left_cell}^-1)")


@dataclass
class MatrixRingWitness:
    cell: int
    size: int
    gamma: TableAlgebra
    entries: dict  # ambient index -> (row, col, gamma label)


def witness_from_datum(datum, table: StructureTable, lam: str, cell: int) -> MatrixRingWitness:
    ms = datum.M[lam]
    entries = {}
    for label, (x, s, b, t) in datum.coords.items():
        if x == lam and label in table.index:
            entries[table.index[label]] = (ms.index(s), ms.index(t), b)
    return MatrixRingWitness(cell, len(ms), datum.gamma[lam], entries)


def witness_from_cells(asym: AsymptoticAlgebra, cells: CellDecomposition, cell: int,
                       inverse: Sequence[int]) -> MatrixRingWitness:
    """Rows and columns from the left cells of c, Gamma = Z.

    Only valid when every intersection (left cell of w^-1) x (left cell of w)
    is a single element; otherwise a datum must supply the witness.
    """
    left_of = cells.cell_of["left"]
    members = asym.blocks[cell].members
    lcs = sorted({left_of[w] for w in members})
    pos = {c: k for k, c in enumerate(lcs)}
    entries = {}
    seen = set()
    for w in members:
        key = (pos[left_of[inverse[w]]], pos[left_of[w]])
        if key in seen:
            raise ValueError("left-cell intersections are not singletons; supply a datum")
        seen.add(key)
        entries[w] = (key[0], key[1], "1")
    gam = TableAlgebra(["1"], {(0, 0): {0: 1}}, 0, [0])
    return MatrixRingWitness(cell, len(lcs), gam, entries)


def verify_matrix_ring(asym: AsymptoticAlgebra, w: MatrixRingWitness) -> AxiomResult:
    """Compare t_x t_y with (e_ij (x) b)(e_kl (x) b') = delta_jk e_il (x) bb'."""
    blk = asym.blocks[w.cell]
    where = {v: k for k, v in w.entries.items()}
    gam = w.gamma
    tested = untested = 0
    for x, (i, j, b) in w.entries.items():
        for y, (k, l, b2) in w.entries.items():
            got = blk.product(x, y)
            if got is None:
                untested += 1
                continue
            if j != k:
                want = {}
            else:
                p = gam.product(gam.index[b], gam.index[b2])
                if p is None:
                    untested += 1
                    continue
                want = {}
                missing = False
                for bb, c in p.items():
                    z = where.get((i, l, gam.labels[bb]))
                    if z is None:
                        missing = True
                        break
                    want[z] = c
                if missing:
                    untested += 1
                    continue
            tested += 1
            if got != want:
                diff = sorted(set(got) ^ set(want) | {z for z in got if got.get(z) != want.get(z)})
                return AxiomResult.from_counts(
                    "matrix ring", tested, untested,
                    (asym.labels[x], asym.labels[y], asym.labels[diff[0]] if diff else ""),
                    "structure constants differ from the matrix ring")
    return AxiomResult.from_counts("matrix ring", tested, untested)


def dual_partition(lam: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(1 for p in lam if p > i) for i in range(max(lam, default=0)))


def n_mu(lam: Sequence[int]) -> int:
    """n! / (mu_1! ... mu_r!) with mu the dual partition of lam."""
    n = sum(lam)
    out = factorial(n)
    for m in dual_partition(lam):
        out //= factorial(m)
    return out


# -- based-ring checks ---------------------------------------------------

def verify_based_ring(asym: AsymptoticAlgebra, inverse: Optional[Sequence[int]] = None,
                      gamma: Optional[GammaTable] = None) -> AxiomReport:
    """Nonnegativity, block diagonality, the unit sum_d t_d, and (with an
    inversion map) the gamma symmetries."""
    labels = asym.labels
    results = []
    tested = untested = 0
    neg = None
    for blk in asym.blocks.values():
        untested += len(blk.uncertified)
        for (i, j), row in sorted(blk.constants.items()):
            tested += 1
            for k, c in row.items():
                if c < 0 and neg is None:
                    neg = (labels[i], labels[j], labels[k], c)
    results.append(AxiomResult.from_counts("nonnegative", tested, untested, neg,
                                           "negative gamma" if neg else ""))
    cross = asym.cross_cell[0] if asym.cross_cell else None
    results.append(AxiomResult.from_counts(
        "block diagonal", 1, 0,
        None if cross is None else tuple(labels[i] for i in cross[0]),
        "gamma links different two-sided cells" if cross else ""))
    tested = untested = 0
    bad = None
    for blk in asym.blocks.values():
        if not blk.identity:
            untested += len(blk.members)
            continue
        one = {d: 1 for d in blk.identity}
        for x in blk.members:
            for prod in (asym.multiply(one, {x: 1}), asym.multiply({x: 1}, one)):
                if prod is None:
                    untested += 1
                    continue
                tested += 1
                if prod != {x: 1} and bad is None:
                    bad = (labels[x],)
    results.append(AxiomResult.from_counts("unit", tested, untested, bad,
                                           "sum of t_d is not the unit" if bad else ""))
    if inverse is not None and gamma is not None:
        results.append(gamma_symmetry_check(gamma, inverse))
    return AxiomReport(results)


def gamma_symmetry_check(gamma: GammaTable, inverse: Sequence[int]) -> AxiomResult:
    """gamma_{x,y,z} = gamma_{y^-1,x^-1,z^-1} = gamma_{y,z^-1,x^-1} where both sides
    are certified; nonzero entries drive the scan in both directions."""
    labels = gamma.table.labels
    tested = untested = 0
    keys = set(k for k, _ in gamma.nonzero())
    inv = inverse
    for x, y, z in sorted(keys):
        for img in ((inv[y], inv[x], inv[z]), (y, inv[z], inv[x])):
            other = gamma.get(*img)
            mine = gamma.get(x, y, z)
            if other is None or mine is None:
                untested += 1
                continue
            tested += 1
            if other != mine:
                return AxiomResult.from_counts(
                    "gamma symmetry", tested, untested,
                    (labels[x], labels[y], labels[z]),
                    f"gamma = {mine} but {other} at ({', '.join(labels[i] for i in img)})")
    # the images of nonzero entries are themselves in keys when certified, so the
    # converse direction (zero maps to zero) is covered by applying the maps to keys
    return AxiomResult.from_counts("gamma symmetry", tested, untested)


def prop_identity_check(table: StructureTable, gamma: GammaTable, cells: CellDecomposition,
                        *, samples: Optional[int] = None, seed: int = 0,
                        quadruples: Optional[Iterable[tuple]] = None) -> dict:
    """sum_beta g_{b1,b2,beta} gamma_{beta,b3,beta'} = sum_beta g_{b1,beta,beta'} gamma_{b2,b3,beta}
    over beta in the cell c of b2 and beta'.

    A quadruple is certified when both sums are fully determined: rows
    (b1, b2) and (b2, b3) are complete, every gamma needed is certified and
    every g_{b1, beta, beta'} needed is known. With ``samples`` set, random
    quadruples are drawn (seeded) until that many certified ones are found or
    a large attempt budget runs out.
    """
    two = cells.cell_of["two_sided"]
    n = len(table)
    labels = table.labels
    rng = random.Random(seed)

    def check(b1, b2, b3, bp):
        c = two[b2]
        if two[bp] != c:
            return None
        if not (table.is_complete(b1, b2) and table.is_complete(b2, b3)):
            return None
        if not gamma.afunc.certified[bp]:
            return None
        lhs = ZERO
        for beta, g in table.row(b1, b2).items():
            if two[beta] != c:
                continue
            gm = gamma.get(beta, b3, bp)
            if gm is None:
                return None
            if gm:
                lhs = lhs + g * gm
        rhs = ZERO
        for beta in table.row(b2, b3):
            if two[beta] != c:
                continue
            gm = gamma.get(b2, b3, beta)
            if gm is None:
                return None
            if gm:
                g = table.coefficient(b1, beta, bp)
                if g is None:
                    return None
                rhs = rhs + g * gm
        return lhs == rhs

    tested = 0
    failures = []
    if quadruples is None:
        budget = (samples or 0) * 200
        attempts = 0
        seen = set()
        quads = []
        while len(quads) < (samples or 0) and attempts < budget:
            attempts += 1
            b2 = rng.randrange(n)
            members = cells.cells["two_sided"][two[b2]]
            q = (rng.randrange(n), b2, rng.randrange(n), rng.choice(members))
            if q in seen:
                continue
            seen.add(q)
            r = check(*q)
            if r is None:
                continue
            quads.append(q)
            tested += 1
            if not r:
                failures.append(tuple(labels[i] for i in q))
        return {"tested": tested, "failures": failures, "attempts": attempts}
    for q in quadruples:
        r = check(*q)
        if r is None:
            continue
        tested += 1
        if not r:
            failures.append(tuple(labels[i] for i in q))
    return {"tested": tested, "failures": failures}
