"""
Cell modules W(lambda), the bimodule E(lambda), the module W'(lambda) with
the isomorphism theta, specialization at (k, r) and standard modules.

Matrices act on column vectors; entry [i][j] is the coefficient of basis
vector i in the image of basis vector j. Laurent matrices hold LaurentPoly
entries, specialized matrices hold FieldScalar entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from sympy import GF as _SymGF, QQ as _SymQQ, Poly, symbols
from sympy.polys.matrices import DomainMatrix

from .cells import CellDecomposition, StructureTable
from .laurent import Field, FieldScalar, LaurentPoly, ONE, ZERO
from .table_algebra import TableAlgebra

__all__ = [
    "ModuleError", "NonSplitError", "CellModule", "SpecializedModule", "GammaRepresentation",
    "StandardModule", "CellBimodule", "cell_module", "cell_module_from_basis",
    "compare_modules", "e_bimodule", "w_prime_and_theta", "specialize_module",
    "standard_module", "gamma_simples", "check_hecke_relations", "trivial_representation",
]


class ModuleError(ValueError):
    """A module construction failed a required compatibility check."""


class NonSplitError(ModuleError):
    """gamma_simples cannot handle this Gamma over this field."""


Matrix = list  # list of rows


def _zeros(n: int, m: int, zero) -> Matrix:
    return [[zero] * m for _ in range(n)]


def _identity(n: int, zero, one) -> Matrix:
    out = _zeros(n, n, zero)
    for i in range(n):
        out[i][i] = one
    return out


def _matmul(a: Matrix, b: Matrix, zero) -> Matrix:
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    out = _zeros(n, m, zero)
    for i in range(n):
        ai = a[i]
        for t in range(k):
            x = ai[t]
            if x == 0:
                continue
            bt = b[t]
            row = out[i]
            for j in range(m):
                if bt[j] != 0:
                    row[j] = row[j] + x * bt[j]
    return out


def _matadd(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _scale(c, a: Matrix) -> Matrix:
    return [[c * x for x in row] for row in a]


# -- cell modules over the Laurent ring ------------------------------------

@dataclass
class CellModule:
    """W(lambda) with basis C_S^g, (S, g) in M(lambda) x B(lambda).

    ``action[i]`` is the matrix of ambient basis element i; ``right[b]`` the
    matrix of the right action of b in Gamma(lambda).
    """
    lam: str
    basis: list[tuple[str, str]]
    action: dict[int, Matrix]
    right: dict[str, Matrix] = field(default_factory=dict)
    partial: list[int] = field(default_factory=list)  # ambient elements with no matrix

    @property
    def dim(self) -> int:
        return len(self.basis)


def _gamma_times(gam: TableAlgebra, x: dict, g: int) -> Optional[dict]:
    out: dict = {}
    for b, c in x.items():
        r = gam.product(b, g)
        if r is None:
            return None
        for k, m in r.items():
            s = out.get(k, ZERO) + c * m
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def cell_module(datum, table: StructureTable, lam: str,
                generators: Optional[Iterable[int]] = None) -> CellModule:
    """Action a C_S^g = sum_{S'} C_{S'}^{r_a(S', S) g} for each generator a."""
    from .tabular import _Bound, r_coefficients
    bound = _Bound(datum, table)
    gam = datum.gamma[lam]
    ms = datum.M[lam]
    basis = [(s, b) for s in ms for b in gam.labels]
    pos = {key: k for k, key in enumerate(basis)}
    gens = range(len(table)) if generators is None else generators
    action, partial = {}, []
    for a in gens:
        rc = r_coefficients(datum, table, {a: ONE}, lam, bound=bound)
        if rc.violations:
            raise ModuleError(f"r-coefficients of {table.labels[a]} are inconsistent: "
                              f"{rc.violations[0]}")
        if rc.untested and not rc.matrix:
            partial.append(a)
            continue
        mat = _zeros(len(basis), len(basis), ZERO)
        ok = True
        for s in ms:
            for g, glab in enumerate(gam.labels):
                col = pos[(s, glab)]
                for s2 in ms:
                    r = {gam.index[b]: c for b, c in rc.matrix.get((s2, s), {}).items()}
                    if not r:
                        continue
                    rg = _gamma_times(gam, r, g)
                    if rg is None:
                        ok = False
                        break
                    for b2, c in rg.items():
                        mat[pos[(s2, gam.labels[b2])]][col] = c
                if not ok:
                    break
            if not ok:
                break
        if ok:
            action[a] = mat
        else:
            partial.append(a)
    right = {}
    for h, hlab in enumerate(gam.labels):
        mat = _zeros(len(basis), len(basis), ZERO)
        for s in ms:
            for g, glab in enumerate(gam.labels):
                r = gam.product(g, h)
                if r is None:
                    continue
                for k, c in r.items():
                    mat[pos[(s, gam.labels[k])]][pos[(s, glab)]] = LaurentPoly.monomial(c, 0)
        right[hlab] = mat
    return CellModule(lam, basis, action, right, partial)


def cell_module_from_basis(table: StructureTable, cells: CellDecomposition,
                           left_cell: int,
                           generators: Optional[Iterable[int]] = None) -> CellModule:
    """Module on a left cell L: a l = sum_{l' in L} g_{a,l,l'} l' (the quotient of
    the span of everything <=_L L by the part strictly below)."""
    members = cells.cells["left"][left_cell]
    pos = {w: k for k, w in enumerate(members)}
    gens = range(len(table)) if generators is None else generators
    action, partial = {}, []
    for a in gens:
        mat = _zeros(len(members), len(members), ZERO)
        ok = True
        for w in members:
            if not table.is_known(a, w):
                ok = False
                break
            for z, g in table.row(a, w).items():
                if z in pos:
                    mat[pos[z]][pos[w]] = g
        if ok:
            action[a] = mat
        else:
            partial.append(a)
    basis = [(table.labels[w], "") for w in members]
    return CellModule(f"L{left_cell}", basis, action, {}, partial)


def compare_modules(m1: CellModule, m2: CellModule, correspondence: dict[int, int]) -> list:
    """Generators whose matrices differ once basis k of m1 is matched with
    basis correspondence[k] of m2."""
    bad = []
    for a, mat in m1.action.items():
        other = m2.action.get(a)
        if other is None:
            continue
        for i in range(m1.dim):
            for j in range(m1.dim):
                if mat[i][j] != other[correspondence[i]][correspondence[j]]:
                    bad.append(a)
                    break
            else:
                continue
            break
    return bad


# -- E(lambda) ------------------------------------------------------------

@dataclass
class CellBimodule:
    """E(lambda) on basis c_lambda with left A-action and right J_lambda action."""
    lam: str
    basis: list[int]  # ambient indices
    left: dict[int, Matrix]
    right: dict[int, Matrix]  # t_Y for Y in c_lambda, via the matrix-unit formula
    right_gamma: dict[int, Matrix]  # the same, from the regular representation
    commutation: dict = field(default_factory=dict)
    decomposition_ok: bool = True


def e_bimodule(datum, table: StructureTable, gamma, lam: str) -> CellBimodule:
    """Build both actions and check them.

    Right action of t_Y, Y = e_{ST} (x) b: C_{U,V}^{b'} -> delta_{VS} C_{U,T}^{b'b};
    it is compared with X t_Y = sum_Z gamma_{X,Y,Z} Z, then commutation
    (a X) t_Y = a (X t_Y) is checked over all triples, and every column of c_lambda is
    checked to carry the matrices of W(lambda).
    """
    from .tabular import _Bound, reduce_mod_lower
    bound = _Bound(datum, table)
    gam = datum.gamma[lam]
    basis = [i for i in range(len(table)) if bound.coord[i] is not None
             and bound.coord[i][0] == lam]
    pos = {w: k for k, w in enumerate(basis)}
    n = len(basis)
    left = {}
    for a in range(len(table)):
        mat = _zeros(n, n, ZERO)
        ok = True
        for x in basis:
            if not table.is_complete(a, x):
                ok = False
                break
            red = reduce_mod_lower(datum, table, table.row(a, x), lam)
            for z, g in red.items():
                if z not in pos:
                    raise ModuleError(f"{table.labels[a]} * {table.labels[x]} leaves c_{lam} "
                                      f"and its lower part")
                mat[pos[z]][pos[x]] = g
        if ok:
            left[a] = mat
    right, right_g = {}, {}
    for y in basis:
        _, s, b, t = bound.coord[y]
        mat = _zeros(n, n, ZERO)
        for x in basis:
            _, u, b2, v_ = bound.coord[x]
            if v_ != s:
                continue
            p = gam.product(b2, b)
            if p is None:
                mat = None
                break
            for bb, c in p.items():
                z = bound.index(lam, u, bb, t)
                if z is None:
                    mat = None
                    break
                mat[pos[z]][pos[x]] = LaurentPoly.monomial(c, 0)
            if mat is None:
                break
        if mat is not None:
            right[y] = mat
        mg = _zeros(n, n, ZERO)
        ok = True
        for x in basis:
            for z in basis:
                c = gamma.get(x, y, z)
                if c is None:
                    ok = False
                    break
                if c:
                    mg[pos[z]][pos[x]] = LaurentPoly.monomial(c, 0)
            if not ok:
                break
        if ok:
            right_g[y] = mg
    mismatch = [table.labels[y] for y in right if y in right_g and right[y] != right_g[y]]
    tested = failures = 0
    for a, la in left.items():
        for y, ry in right.items():
            tested += 1
            # right action composes on the other side: (a X) t_Y vs a (X t_Y)
            if _matmul(ry, la, ZERO) != _matmul(la, ry, ZERO):
                failures += 1
    # column decomposition into |M| copies of W(lambda)
    wmod = cell_module(datum, table, lam, left.keys())
    decomposition_ok = True
    for t in datum.M[lam]:
        col = [pos[bound.index(lam, s, gam.index[b], t)] for (s, b) in wmod.basis
               if bound.index(lam, s, gam.index[b], t) is not None]
        if len(col) != wmod.dim:
            continue
        for a, mat in wmod.action.items():
            if a not in left:
                continue
            for i in range(wmod.dim):
                if any(left[a][col[i]][col[j]] != mat[i][j] for j in range(wmod.dim)):
                    decomposition_ok = False
    return CellBimodule(lam, basis, left, right, right_g,
                        {"tested": tested, "failures": failures, "right_mismatch": mismatch},
                        decomposition_ok)


# -- W'(lambda) and theta -------------------------------------------------

def w_prime_and_theta(datum, table: StructureTable, asym, lam: str, cell: int,
                      generators: Optional[Iterable[int]] = None):
    """W'(lambda) = V(lambda) (x) Gamma with A acting through Phi_lambda.

    Returns (wprime, report). In the canonical bases (v_T (x) b <-> C_T^b) theta
    is the identity matrix, so intertwining means equal action matrices.
    """
    from .asymptotic import phi_lambda
    from .tabular import _Bound
    bound = _Bound(datum, table)
    gam = datum.gamma[lam]
    wmod = cell_module(datum, table, lam, generators)
    pos = {key: k for k, key in enumerate(wmod.basis)}
    action = {}
    for a in wmod.action:
        phi = phi_lambda(table, asym, {a: ONE}, cell)
        if phi is None:
            continue
        mat = _zeros(wmod.dim, wmod.dim, ZERO)
        ok = True
        for z, c in phi.items():
            co = bound.coord[z]
            if co is None:
                ok = False
                break
            _, s, bz, t = co
            for g, glab in enumerate(gam.labels):
                p = gam.product(bz, g)
                if p is None:
                    ok = False
                    break
                for k, m in p.items():
                    i = pos[(s, gam.labels[k])]
                    j = pos[(t, glab)]
                    mat[i][j] = mat[i][j] + c * m
            if not ok:
                break
        if ok:
            action[a] = mat
    wprime = CellModule(lam, list(wmod.basis), action, dict(wmod.right))
    bad = [table.labels[a] for a in action if action[a] != wmod.action[a]]
    right_ok = all(wprime.right[h] == wmod.right[h] for h in wmod.right)
    report = {"tested": len(action), "mismatch": bad, "right_ok": right_ok,
              "theta": {f"{s}|{b}": f"v_{s} (x) {b}" for s, b in wmod.basis}}
    return wprime, wmod, report


# -- specialization ---------------------------------------------------------

@dataclass
class SpecializedModule:
    field: Field
    r: FieldScalar
    dim: int
    action: dict[int, Matrix]


def specialize_matrix(mat: Matrix, r: FieldScalar) -> Matrix:
    return [[x.specialize(r) for x in row] for row in mat]


def specialize_module(m: CellModule, field: Field, r) -> SpecializedModule:
    r = field(r)
    if r.is_zero():
        raise ZeroDivisionError("cannot specialize v at 0")
    return SpecializedModule(field, r, m.dim,
                             {a: specialize_matrix(mat, r) for a, mat in m.action.items()})


# -- Gamma representations ----------------------------------------------------

@dataclass
class GammaRepresentation:
    field: Field
    dim: int
    matrices: dict[str, Matrix]  # Gamma basis label -> matrix over field

    def check(self, gam: TableAlgebra) -> list[str]:
        """Relations of Gamma violated by the matrices (empty when fine)."""
        f = self.field
        problems = []
        if set(self.matrices) != set(gam.labels):
            return ["matrices must be given for every basis label of Gamma"]
        one = _identity(self.dim, f.zero(), f.one())
        if self.matrices[gam.labels[gam.unit]] != one:
            problems.append("the unit does not act as the identity")
        for i, b in enumerate(gam.labels):
            for j, b2 in enumerate(gam.labels):
                p = gam.product(i, j)
                if p is None:
                    continue
                lhs = _matmul(self.matrices[b], self.matrices[b2], f.zero())
                rhs = _zeros(self.dim, self.dim, f.zero())
                for k, c in p.items():
                    rhs = _matadd(rhs, _scale(f(c), self.matrices[gam.labels[k]]))
                if lhs != rhs:
                    problems.append(f"rho({b}) rho({b2}) does not match the structure constants")
        return problems

    def to_json(self) -> dict:
        return {"kind": "gamma-rep", "field": self.field.tag, "dim": self.dim,
                "matrices": {b: [[x.to_json() for x in row] for row in m]
                             for b, m in sorted(self.matrices.items())}}

    @classmethod
    def from_json(cls, doc: dict) -> "GammaRepresentation":
        f = parse_field(doc["field"])
        mats = {b: [[f(Fraction(x)) for x in row] for row in m]
                for b, m in doc["matrices"].items()}
        return cls(f, int(doc["dim"]), mats)


def parse_field(tag: str) -> Field:
    tag = tag.strip()
    if tag in ("QQ", "Q", "0"):
        return Field(0)
    if tag.startswith("GF(") and tag.endswith(")"):
        return Field(int(tag[3:-1]))
    if tag.isdigit():
        return Field(int(tag))
    raise ValueError(f"unknown field {tag!r}")


def trivial_representation(gam: TableAlgebra, field: Field) -> GammaRepresentation:
    """Only for Gamma = Z (a single basis element)."""
    if len(gam) != 1:
        raise ModuleError("the trivial representation needs Gamma = Z")
    return GammaRepresentation(field, 1, {gam.labels[0]: [[field.one()]]})


def _sym_domain(field: Field):
    return _SymQQ if not field.characteristic else _SymGF(field.characteristic)


def _to_sym(x: FieldScalar, dom):
    if x.field.characteristic:
        return dom(x.value)
    return dom(x.value.numerator, x.value.denominator)


def _from_sym(e, field: Field) -> FieldScalar:
    if field.characteristic:
        return field(int(e) % field.characteristic)
    return field(Fraction(int(e.numerator), int(e.denominator)))


def _roots(coeffs: list, field: Field) -> Optional[list[FieldScalar]]:
    """Distinct roots of the polynomial, or None when it does not split."""
    deg = len(coeffs) - 1
    if field.characteristic:
        p = field.characteristic
        cs = [int(c) % p for c in coeffs]
        # repeated division to count multiplicities
        roots, total = [], 0
        for a in range(p):
            mult = 0
            poly = cs
            while len(poly) > 1:
                q, rem = [poly[0]], None
                for c in poly[1:]:
                    q.append((c + q[-1] * a) % p)
                rem = q.pop()
                if rem:
                    break
                mult += 1
                poly = q
            if mult:
                roots.append(field(a))
                total += mult
        return roots if total == deg else None
    x = symbols("x")
    poly = Poly([_SymQQ.to_sympy(c) for c in coeffs], x, domain="QQ")
    found = poly.ground_roots()
    if sum(found.values()) != deg:
        return None
    return [field(Fraction(str(r))) for r in found]


def gamma_simples(gam: TableAlgebra, field: Field) -> list[GammaRepresentation]:
    """All one-dimensional representations of a split commutative Gamma over field."""
    n = len(gam)
    if not gam.complete or any(not gam.is_known(i, j) for i in range(n) for j in range(n)):
        raise NonSplitError("Gamma is not fully known; supply N manually")
    for i in range(n):
        for j in range(i + 1, n):
            if gam.product(i, j) != gam.product(j, i):
                raise NonSplitError(
                    f"Gamma is noncommutative ({gam.labels[i]}, {gam.labels[j]}); supply N manually")
    dom = _sym_domain(field)
    # transpose of the left regular representation: characters are joint eigenvectors
    regs = []
    for b in range(n):
        rows = [[dom(0)] * n for _ in range(n)]
        for x in range(n):
            for k, c in gam.product(b, x).items():
                rows[x][k] = dom(c % field.characteristic if field.characteristic else c)
        regs.append(DomainMatrix(rows, (n, n), dom))
    eig = []
    for b in range(n):
        roots = _roots(list(regs[b].charpoly()), field)
        if roots is None:
            raise NonSplitError(
                f"the regular representation of {gam.labels[b]} does not split over "
                f"{field.tag}; supply N manually")
        eig.append(roots)
    branches = [([], [])]  # (assigned values, stacked constraint rows)
    for b in range(n):
        nxt = []
        for vals, rows in branches:
            for mu in eig[b]:
                m = regs[b] - DomainMatrix.eye(n, dom) * _to_sym(mu, dom)
                stacked = rows + m.to_list()
                ker = DomainMatrix(stacked, (len(stacked), n), dom).nullspace()
                if ker.shape[0]:
                    nxt.append((vals + [mu], stacked))
        branches = nxt
    reps = []
    for vals, _ in branches:
        rep = GammaRepresentation(field, 1, {gam.labels[b]: [[vals[b]]] for b in range(n)})
        if not rep.check(gam):
            reps.append(rep)
    reps.sort(key=lambda r: [str(r.matrices[b][0][0]) for b in gam.labels])
    return reps


# -- standard modules ---------------------------------------------------------

@dataclass
class StandardModule:
    lam: str
    field: Field
    r: FieldScalar
    dim: int
    tensor: dict[int, Matrix]
    pullback: dict[int, Matrix]
    equal: bool
    mismatch: list = field(default_factory=list)


def standard_module(datum, table: StructureTable, asym, lam: str, cell: int,
                    N: GammaRepresentation, field: Field, r,
                    generators: Optional[Iterable[int]] = None) -> StandardModule:
    """V(lambda) (x) N built twice: block (S', S) = sum_b spec(r_a(S',S)_b) rho(b)
    from the cell module, and through Phi_lambda with e_{ST} (x) b acting as
    v_U (x) n -> delta_{TU} v_S (x) rho(b) n. Both must agree entrywise."""
    from .asymptotic import phi_lambda
    from .tabular import _Bound, r_coefficients
    r = field(r)
    gam = datum.gamma[lam]
    problems = N.check(gam)
    if problems:
        raise ModuleError(f"N is not a Gamma-module: {problems[0]}")
    bound = _Bound(datum, table)
    ms = datum.M[lam]
    d = N.dim
    dim = len(ms) * d
    zero = field.zero()
    gens = list(range(len(table)) if generators is None else generators)
    tensor, pull = {}, {}
    for a in gens:
        rc = r_coefficients(datum, table, {a: ONE}, lam, bound=bound)
        if rc.violations or not rc.matrix and rc.untested:
            continue
        mat = _zeros(dim, dim, zero)
        for (s2, s), vec in rc.matrix.items():
            block = _zeros(d, d, zero)
            for b, c in vec.items():
                block = _matadd(block, _scale(c.specialize(r), N.matrices[b]))
            _put_block(mat, block, ms.index(s2) * d, ms.index(s) * d)
        tensor[a] = mat
        phi = phi_lambda(table, asym, {a: ONE}, cell)
        if phi is None:
            continue
        mat2 = _zeros(dim, dim, zero)
        ok = True
        for z, c in phi.items():
            co = bound.coord[z]
            if co is None:
                ok = False
                break
            _, s, bz, t = co
            block = _scale(c.specialize(r), N.matrices[gam.labels[bz]])
            _add_block(mat2, block, ms.index(s) * d, ms.index(t) * d)
        if ok:
            pull[a] = mat2
    mismatch = [table.labels[a] for a in tensor if a in pull and tensor[a] != pull[a]]
    equal = not mismatch and set(tensor) == set(pull)
    return StandardModule(lam, field, r, dim, tensor, pull, equal, mismatch)


def _put_block(mat: Matrix, block: Matrix, i0: int, j0: int) -> None:
    for i, row in enumerate(block):
        for j, x in enumerate(row):
            mat[i0 + i][j0 + j] = x


def _add_block(mat: Matrix, block: Matrix, i0: int, j0: int) -> None:
    for i, row in enumerate(block):
        for j, x in enumerate(row):
            mat[i0 + i][j0 + j] = mat[i0 + i][j0 + j] + x


# -- Hecke relations ------------------------------------------------------------

def check_hecke_relations(table, action: dict[int, Matrix], field: Field, r) -> list[str]:
    """Check a specialized representation of a finite-type Hecke KL table.

    With T_s = r C_s - 1: the quadratic relation (T_s - r^2)(T_s + 1) = 0,
    the braid relations, and rho(C_x) rho(C_y) = sum_z g_{x,y,z}(r) rho(C_z)
    on every fully known pair with all matrices present.
    """
    group = table.kl.group
    r = field(r)
    zero, one = field.zero(), field.one()
    problems = []
    dim = len(next(iter(action.values()))) if action else 0
    ident = _identity(dim, zero, one)
    e = table.element_index[group.identity()]
    if e in action and action[e] != ident:
        problems.append("C_e does not act as the identity")
    ts = {}
    for s in range(group.rank):
        idx = table.element_index.get(group.generators()[s])
        if idx is None or idx not in action:
            continue
        t = _matadd(_scale(r, action[idx]), _scale(field(-1), ident))
        ts[s] = t
        q = _matmul(_matadd(t, _scale(-(r * r), ident)), _matadd(t, ident), zero)
        if q != _zeros(dim, dim, zero):
            problems.append(f"quadratic relation fails for {group.gen_names[s]}")
    m = group.presentation.matrix
    for s in ts:
        for t in ts:
            if s >= t or m[s][t] == 0:
                continue
            lhs, rhs = ident, ident
            for k in range(m[s][t]):
                lhs = _matmul(lhs, ts[s] if k % 2 == 0 else ts[t], zero)
                rhs = _matmul(rhs, ts[t] if k % 2 == 0 else ts[s], zero)
            if lhs != rhs:
                problems.append(f"braid relation fails for {group.gen_names[s]}, "
                                f"{group.gen_names[t]}")
    for x in action:
        for y in action:
            if not table.is_complete(x, y):
                continue
            row = table.row(x, y)
            if any(z not in action for z in row):
                continue
            lhs = _matmul(action[x], action[y], zero)
            rhs = _zeros(dim, dim, zero)
            for z, g in row.items():
                rhs = _matadd(rhs, _scale(g.specialize(r), action[z]))
            if lhs != rhs:
                problems.append(f"C_{table.labels[x]} C_{table.labels[y]} is not respected")
    return problems
