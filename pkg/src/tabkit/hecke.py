"""
Hecke algebras of (extended) Coxeter groups with parameter v^2.

Conventions: (T_s - v^2)(T_s + 1) = 0, bar(v) = v^-1, bar(T_w) = T_{w^-1}^-1,
and the Kazhdan--Lusztig element

    C_w = v^-l(w) * sum_{y <= w} P_{y,w}(v^2) T_y

is the unique bar-invariant element with P_{w,w} = 1 and
deg_q P_{y,w} <= (l(w) - l(y) - 1) / 2.  In particular C_s = v^-1 (T_s + 1).

The KL elements are built by the usual recursion on length,
C_s C_{w'} - sum mu(z, w') C_z; :meth:`KLBasis.check_invariants` validates the
output against the uniqueness characterization directly.

For an extended group, C_{r^k w} = T_{r^k} C_w, so everything is computed on
the Coxeter part W' and transported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .cells import AFunctionTable, StructureTable
from .coxeter import CoxeterGroup, GroupElement, enumerate_horizon
from .laurent import LaurentPoly, ONE, ZERO, v

__all__ = [
    "HorizonExceeded", "HeckeElement", "HeckeAlgebra", "KLBasis",
    "HeckeStructureTable", "kl_structure_constants", "distinguished_involutions",
]

_V_PLUS_VINV = v + ~v


class HorizonExceeded(RuntimeError):
    """A result would need group elements beyond the loaded length bound."""


class HeckeElement:
    """Finite T-basis expansion: GroupElement -> nonzero LaurentPoly."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Optional[dict] = None):
        self.coeffs = {} if coeffs is None else {w: c for w, c in coeffs.items() if c}

    def __add__(self, other: "HeckeElement") -> "HeckeElement":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            s = out.get(w, ZERO) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return HeckeElement._raw(out)

    def __sub__(self, other: "HeckeElement") -> "HeckeElement":
        return self + other.scale(-ONE)

    def __neg__(self) -> "HeckeElement":
        return self.scale(-ONE)

    def scale(self, c) -> "HeckeElement":
        if isinstance(c, int):
            c = LaurentPoly.monomial(c, 0)
        if not c:
            return HeckeElement()
        return HeckeElement._raw({w: a * c for w, a in self.coeffs.items()})

    __rmul__ = scale

    @classmethod
    def _raw(cls, coeffs: dict) -> "HeckeElement":
        h = object.__new__(cls)
        h.coeffs = coeffs
        return h

    def coefficient(self, w: GroupElement) -> LaurentPoly:
        return self.coeffs.get(w, ZERO)

    def support(self) -> list[GroupElement]:
        return list(self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, HeckeElement) and self.coeffs == other.coeffs

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        return f"HeckeElement({len(self.coeffs)} terms)"


class HeckeAlgebra:
    """T-basis arithmetic, bar involution, * anti-automorphism and trace."""

    def __init__(self, group: CoxeterGroup, bound: Optional[int] = None):
        if bound is None and group.affine:
            raise ValueError("an infinite group needs a length bound")
        self.group = group
        self.bound = bound
        self._tinv_cache: dict = {}

    def _guard(self, w: GroupElement) -> GroupElement:
        if self.bound is not None and self.group.length(w) > self.bound:
            raise HorizonExceeded(
                f"{self.group.label(w)} has length {self.group.length(w)} > {self.bound}")
        return w

    def T(self, w) -> HeckeElement:
        if isinstance(w, str):
            w = self.group.parse(w)
        return HeckeElement._raw({self._guard(w): ONE})

    def one(self) -> HeckeElement:
        return self.T(self.group.identity())

    def C_generator(self, s: int) -> HeckeElement:
        """C_s = v^-1 (T_s + T_e)."""
        g = self.group
        return HeckeElement._raw({g.generator(g.gen_names[s]): ~v, g.identity(): ~v})

    # -- multiplication -------------------------------------------------
    def _times_generator(self, h: dict, s: int) -> dict:
        """h * T_s for a raw coefficient dict."""
        g = self.group
        out: dict = {}
        for w, c in h.items():
            ws = g.right_multiply_generator(w, s)
            if g.is_right_descent(w, s):
                _acc(out, w, c * _V2_MINUS_1)
                _acc(out, ws, c.shift(2))
            else:
                _acc(out, self._guard(ws), c)
        return out

    def _times_omega(self, h: dict, k: int) -> dict:
        if not k:
            return h
        om = self.group.omega(k)
        return {self.group.multiply(w, om): c for w, c in h.items()}

    def right_multiply_T(self, h: HeckeElement, w: GroupElement) -> HeckeElement:
        """h * T_w, via T_w = T_{r^k} T_{s_1} ... T_{s_m}."""
        out = self._times_omega(h.coeffs, w.omega)
        for s in self.group.reduced_word(w):
            out = self._times_generator(out, s)
        return HeckeElement._raw(out)

    def multiply(self, x: HeckeElement, y: HeckeElement) -> HeckeElement:
        """Exact product in the T-basis (t_arithmetic)."""
        result: dict = {}
        for w, c in y.coeffs.items():
            part = self.right_multiply_T(x, w)
            for u, a in part.coeffs.items():
                _acc(result, u, a * c)
        return HeckeElement._raw(result)

    def T_inverse(self, w: GroupElement) -> HeckeElement:
        """T_w^-1 = T_{s_m}^-1 ... T_{s_1}^-1 T_{r^-k} for w = r^k s_1 ... s_m."""
        g = self.group
        word = g.reduced_word(w)
        h: dict = {g.identity(): ONE}
        for s in reversed(word):
            h = self._times_generator_inverse(h, s)
        h = self._times_omega(h, (-w.omega) % g.omega_order)
        return HeckeElement._raw(h)

    def _times_generator_inverse(self, h: dict, s: int) -> dict:
        # T_s^-1 = v^-2 T_s + (v^-2 - 1)
        ts = self._times_generator(h, s)
        out: dict = {}
        for w, c in ts.items():
            _acc(out, w, c.shift(-2))
        for w, c in h.items():
            _acc(out, w, c * _VM2_MINUS_1)
        return out

    def _bar_T(self, w: GroupElement) -> dict:
        """bar(T_w) = T_{w^-1}^-1 = T_{r^k} T_{s_1}^-1 ... T_{s_m}^-1, memoized on W'."""
        g = self.group
        base = GroupElement(0, w.key)
        cached = self._tinv_cache.get(base)
        if cached is None:
            word = g.reduced_word(base)
            if not word:
                cached = {g.identity(): ONE}
            else:
                prefix = g.right_multiply_generator(base, word[-1])
                cached = self._times_generator_inverse(self._bar_T(prefix), word[-1])
            self._tinv_cache[base] = cached
        if w.omega:
            om = g.omega(w.omega)
            return {g.multiply(om, u): c for u, c in cached.items()}
        return cached

    def bar(self, x: HeckeElement) -> HeckeElement:
        out: dict = {}
        for w, c in x.coeffs.items():
            cb = c.bar()
            for u, a in self._bar_T(w).items():
                _acc(out, u, a * cb)
        return HeckeElement._raw(out)

    def star(self, x: HeckeElement) -> HeckeElement:
        """The anti-automorphism T_w -> T_{w^-1}."""
        g = self.group
        return HeckeElement._raw({g.inverse(w): c for w, c in x.coeffs.items()})

    def tau(self, x: HeckeElement) -> LaurentPoly:
        """Coefficient of T_e."""
        return x.coeffs.get(self.group.identity(), ZERO)


_V2_MINUS_1 = LaurentPoly({2: 1, 0: -1})
_VM2_MINUS_1 = LaurentPoly({-2: 1, 0: -1})


def _acc(d: dict, k, c: LaurentPoly) -> None:
    if not c:
        return
    s = d.get(k)
    if s is None:
        d[k] = c
        return
    s = s + c
    if s:
        d[k] = s
    else:
        del d[k]


@dataclass
class _Index:
    """Compact tables for the W' elements up to the KL bound."""
    elements: list
    index: dict
    length: list
    left: list   # left[s][i] = index of s*w_i, or -1 beyond the bound
    right: list  # right[s][i] = index of w_i*s, or -1
    inverse: list


class KLBasis:
    """Kazhdan--Lusztig elements C_w for all w in W' with l(w) <= bound.

    ``coeff[i]`` maps W'-indices y to the T-coefficient of T_y in C_{w_i}, and
    ``mu[i]`` maps z to mu(z, w_i) (the coefficient of q^((l(w)-l(z)-1)/2) in
    P_{z,w}), kept only for the recursion and the C_s action.
    """

    def __init__(self, group: CoxeterGroup, bound: Optional[int] = None,
                 cap: Optional[int] = None):
        self.group = group
        self.bound = bound
        full = enumerate_horizon(group, bound, cap)
        base = [x for x in full.elements if x.omega == 0]
        index = {x: i for i, x in enumerate(base)}
        length = [group.length(x) for x in base]
        left, right = [], []
        for s in range(group.rank):
            left.append([index.get(group.left_multiply_generator(s, x), -1) for x in base])
            right.append([index.get(group.right_multiply_generator(x, s), -1) for x in base])
        inverse = [index[group.inverse(x)] for x in base]
        self.ix = _Index(base, index, length, left, right, inverse)
        self.horizon = full
        self.coeff: list[dict] = []
        self.mu: list[dict] = []
        self._compute()
        self._mu_left = [[[(z, m) for z, m in self.mu[w].items()
                           if length[self.ix.left[s][z]] < length[z]]
                          for w in range(len(base))] for s in range(group.rank)]
        self._mu_right = [[[(z, m) for z, m in self.mu[w].items()
                            if length[self.ix.right[s][z]] < length[z]]
                           for w in range(len(base))] for s in range(group.rank)]
        self._conj_cache: dict = {}

    def __len__(self) -> int:
        return len(self.ix.elements)

    def _compute(self) -> None:
        ix = self.ix
        length, left = ix.length, ix.left
        rank = self.group.rank
        for w in range(len(ix.elements)):
            if length[w] == 0:
                self.coeff.append({w: ONE})
                self.mu.append({})
                continue
            s = next(t for t in range(rank) if left[t][w] >= 0 and length[left[t][w]] < length[w])
            wp = left[s][w]
            res: dict = {}
            for y, c in self.coeff[wp].items():
                sy = left[s][y]
                if length[sy] > length[y]:
                    cv = c.shift(-1)
                else:
                    cv = c.shift(1)
                _acc(res, y, cv)
                _acc(res, sy, cv)
            for z, m in self.mu[wp].items():
                sz = left[s][z]
                if length[sz] < length[z]:
                    for y, c in self.coeff[z].items():
                        _acc(res, y, c * (-m))
            self.coeff.append(res)
            mu = {}
            for z, c in res.items():
                if z != w:
                    m = c.coefficient(-length[z] - 1)
                    if m:
                        mu[z] = m
            self.mu.append(mu)

    # -- access ---------------------------------------------------------
    def index_of(self, x: GroupElement) -> int:
        return self.ix.index[GroupElement(0, x.key)]

    def element(self, w: GroupElement) -> HeckeElement:
        """C_w as a T-basis expansion (kl_element)."""
        i = self.ix.index.get(GroupElement(0, w.key))
        if i is None:
            raise HorizonExceeded(f"{self.group.label(w)} is beyond the KL bound {self.bound}")
        els = self.ix.elements
        if w.omega:
            om = self.group.omega(w.omega)
            return HeckeElement._raw({self.group.multiply(om, els[y]): c
                                      for y, c in self.coeff[i].items()})
        return HeckeElement._raw({els[y]: c for y, c in self.coeff[i].items()})

    def P(self, y: GroupElement, w: GroupElement) -> LaurentPoly:
        """P_{y,w} as a polynomial in q = v^2 (exponents are q-degrees)."""
        if y.omega != w.omega:
            return ZERO
        i, j = self.index_of(w), self.index_of(y)
        c = self.coeff[i].get(j, ZERO).shift(self.ix.length[i])
        return LaurentPoly({e // 2: a for e, a in c.items()})

    def mu_value(self, z: GroupElement, w: GroupElement) -> int:
        if z.omega != w.omega:
            return 0
        return self.mu[self.index_of(w)].get(self.index_of(z), 0)

    def conjugation(self, k: int) -> list[int]:
        """Index permutation w -> r^k w r^-k on W'."""
        k %= self.group.omega_order
        cached = self._conj_cache.get(k)
        if cached is None:
            g = self.group
            cached = [self.ix.index[g.conjugate_by_omega(x, k)] for x in self.ix.elements]
            self._conj_cache[k] = cached
        return cached

    # -- C-basis arithmetic on W' (vectors: index -> LaurentPoly) -------
    def left_multiply_C_generator(self, s: int, vec: dict) -> dict:
        """C_s * vec in the C-basis."""
        ix = self.ix
        left, length = ix.left[s], ix.length
        mul = self._mu_left[s]
        out: dict = {}
        for w, c in vec.items():
            sw = left[w]
            if sw >= 0 and length[sw] < length[w]:
                _acc(out, w, c * _V_PLUS_VINV)
                continue
            if sw < 0:
                raise HorizonExceeded("C_s C_w needs an element beyond the KL bound")
            _acc(out, sw, c)
            for z, m in mul[w]:
                _acc(out, z, c * m)
        return out

    def right_multiply_C_generator(self, vec: dict, s: int) -> dict:
        """vec * C_s in the C-basis."""
        ix = self.ix
        right, length = ix.right[s], ix.length
        mur = self._mu_right[s]
        out: dict = {}
        for w, c in vec.items():
            ws = right[w]
            if ws >= 0 and length[ws] < length[w]:
                _acc(out, w, c * _V_PLUS_VINV)
                continue
            if ws < 0:
                raise HorizonExceeded("C_w C_s needs an element beyond the KL bound")
            _acc(out, ws, c)
            for z, m in mur[w]:
                _acc(out, z, c * m)
        return out

    def products_with(self, y: int, max_left_length: int) -> list[Optional[dict]]:
        """C_x C_y in the C-basis for every W'-index x with l(x) <= max_left_length.

        Entries are None when the product needs elements beyond the KL bound.
        """
        ix = self.ix
        length, left = ix.length, ix.left
        rank = self.group.rank
        out: list[Optional[dict]] = []
        for x in range(len(ix.elements)):
            if length[x] > max_left_length:
                out.append(None)
                continue
            if length[x] == 0:
                out.append({y: ONE})
                continue
            s = next(t for t in range(rank) if left[t][x] >= 0 and length[left[t][x]] < length[x])
            xp = left[s][x]
            base = out[xp]
            if base is None:
                out.append(None)
                continue
            try:
                res = self.left_multiply_C_generator(s, base)
            except HorizonExceeded:
                out.append(None)
                continue
            ok = True
            for z, m in self._mu_left[s][xp]:
                pz = out[z]
                if pz is None:
                    ok = False
                    break
                for k, c in pz.items():
                    _acc(res, k, c * (-m))
            out.append(res if ok else None)
        return out

    # -- validation against the uniqueness characterization --------------
    def check_invariants(self, algebra: Optional[HeckeAlgebra] = None,
                         indices: Optional[Iterable[int]] = None) -> list[str]:
        """Check bar-invariance, P_{w,w} = 1, the degree bound and Bruhat support.

        Returns a list of failure messages (empty when every element passes).
        Elements r^k w are T_{r^k} C_w by construction; bar(T_{r^k}) = T_{r^k}
        is checked once, so checking W' suffices.
        """
        g = self.group
        if algebra is None:
            algebra = HeckeAlgebra(g, self.bound)
        failures = []
        for k in range(1, g.omega_order):
            om = g.omega(k)
            if algebra.bar(algebra.T(om)) != algebra.T(om):
                failures.append(f"T_r^{k} is not bar-invariant")
        ix = self.ix
        if indices is None:
            indices = range(len(ix.elements))
        for i in indices:
            w = ix.elements[i]
            lw = ix.length[i]
            name = g.label(w)
            cw = self.element(w)
            if cw.coefficient(w) != LaurentPoly.monomial(1, -lw):
                failures.append(f"C_{name}: coefficient of T_w is not v^-l(w)")
            for y, c in cw.coeffs.items():
                if y == w:
                    continue
                p = c.shift(lw)
                ly = g.length(y)
                if any(e < 0 or e % 2 for e, _ in p.items()):
                    failures.append(f"C_{name}: P_{{{g.label(y)},w}} is not a polynomial in v^2")
                if p.degree() > lw - ly - 1:
                    failures.append(f"C_{name}: degree bound fails at {g.label(y)}")
                if not g.bruhat_leq(y, w):
                    failures.append(f"C_{name}: support element {g.label(y)} is not <= w")
            if algebra.bar(cw) != cw:
                failures.append(f"C_{name} is not bar-invariant")
        return failures


class HeckeStructureTable(StructureTable):
    """KL structure constants g_{x,y,z} over the elements of length <= horizon.

    Products are computed on W' and transported by
    C_{r^a x} C_{r^b y} = T_{r^(a+b)} C_{r^-b x r^b} C_y. A pair is known when
    l(x) + l(y) <= product_bound (the KL bound); its row lists the z inside
    the horizon, and it escapes when its support also leaves the horizon.
    """

    def __init__(self, kl: KLBasis, horizon_bound: Optional[int] = None):
        g = kl.group
        self.kl = kl
        product_bound = kl.bound
        if horizon_bound is None:
            horizon_bound = product_bound
        if product_bound is not None and horizon_bound > product_bound:
            raise ValueError("horizon cannot exceed the KL bound")
        self.horizon_bound = horizon_bound
        elements = [x for x in kl.horizon.elements
                    if horizon_bound is None or g.length(x) <= horizon_bound]
        labels = [g.label(x) for x in elements]
        self.elements = elements
        self.element_index = {x: i for i, x in enumerate(elements)}
        ix = kl.ix
        # W' horizon indices in KL numbering, and map back
        base_ids = [i for i in range(len(ix.elements))
                    if horizon_bound is None or ix.length[i] <= horizon_bound]
        self._base_ids = base_ids
        in_horizon = set(base_ids)
        n_om = g.omega_order
        # table index of r^k * (W' index)
        self._pos = {}
        for t, x in enumerate(elements):
            self._pos[(x.omega, ix.index[GroupElement(0, x.key)])] = t
        self._wrows: dict = {}
        self._wunknown: set = set()
        self._wescape: set = set()
        max_len = max((ix.length[i] for i in base_ids), default=0)
        for y in base_ids:
            limit = max_len if product_bound is None else min(max_len, product_bound - ix.length[y])
            prods = kl.products_with(y, limit)
            for x in base_ids:
                p = prods[x]
                if p is None:
                    self._wunknown.add((x, y))
                    continue
                row = {z: c for z, c in p.items() if z in in_horizon}
                if len(row) != len(p):
                    self._wescape.add((x, y))
                if row:
                    self._wrows[(x, y)] = row
        unknown = set()
        escaping = set()
        self._decomp = [(x.omega, ix.index[GroupElement(0, x.key)]) for x in elements]
        for i, (a, x) in enumerate(self._decomp):
            for j, (b, y) in enumerate(self._decomp):
                xc = kl.conjugation(-b)[x] if b else x
                if (xc, y) in self._wunknown:
                    unknown.add((i, j))
                elif (xc, y) in self._wescape:
                    escaping.add((i, j))
        star = [self.element_index[g.inverse(x)] for x in elements]
        super().__init__(labels, None, unknown=unknown, escaping=escaping,
                         unit=[self.element_index[g.identity()]],
                         lengths=[g.length(x) for x in elements],
                         bound=None if not g.affine else horizon_bound,
                         star=star, name=f"hecke({g.presentation.family}, rank {g.rank})")
        self._n_om = n_om

    def row(self, i: int, j: int):
        if (i, j) in self._unknown:
            return None
        a, x = self._decomp[i]
        b, y = self._decomp[j]
        xc = self.kl.conjugation(-b)[x] if b else x
        r = self._wrows.get((xc, y))
        if not r:
            return {}
        shift = (a + b) % self._n_om
        pos = self._pos
        return {pos[(shift, z)]: c for z, c in r.items()}


def kl_structure_constants(group: CoxeterGroup, horizon: Optional[int] = None,
                           product_bound: Optional[int] = None,
                           kl: Optional[KLBasis] = None) -> HeckeStructureTable:
    """Structure table of the KL basis.

    For finite groups pass no bounds. For affine groups, elements up to
    ``horizon`` are tabulated and products are computed exactly whenever
    l(x) + l(y) <= product_bound (default 2 * horizon, i.e. all of them).
    """
    if kl is None:
        if group.affine:
            if horizon is None:
                raise ValueError("affine groups need a horizon")
            if product_bound is None:
                product_bound = 2 * horizon
            kl = KLBasis(group, product_bound)
        else:
            kl = KLBasis(group, None)
    return HeckeStructureTable(kl, horizon)


def distinguished_involutions(table: HeckeStructureTable, afunc: AFunctionTable):
    """Elements z with 2 deg P_{e,z} = l(z) - a(z).

    Returns (members, undecidable): label indices in the set, and indices
    whose a-value is not certified (never silently excluded).
    """
    kl = table.kl
    g = kl.group
    e_idx = kl.ix.index[g.identity()]
    members, undecidable = [], []
    for t, x in enumerate(table.elements):
        if x.omega:
            continue  # tau(C_{r^k z}) = 0 for k != 0: never distinguished
        if not afunc.certified[t]:
            undecidable.append(t)
            continue
        i = kl.ix.index[x]
        p = kl.coeff[i].get(e_idx, ZERO).shift(kl.ix.length[i])
        if 2 * (p.degree() // 2) == kl.ix.length[i] - afunc.values[t] and p.degree() >= 0:
            members.append(t)
    return members, undecidable
