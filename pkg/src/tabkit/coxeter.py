"""
Finite and (extended) affine Coxeter groups.

Finite groups are given by a Coxeter matrix and realized as permutations of
their root system (the geometric representation is used once, in floating
point, to discover the roots; after that everything is exact permutation
arithmetic). Affine type A~_{n-1} is realized by affine permutations in
window notation, optionally extended by the rotation group Omega = Z_n of
the Coxeter graph, where the rotation ``r`` is the shift i -> i + 1 and
r^n is identified with the identity.

Elements are written omega * w with w in the Coxeter group W', and

    (r^a * w1) (r^b * w2) = r^(a+b) * (r^-b w1 r^b) w2,

so that length and Bruhat order extend by l(r^a w) = l(w), and r^a w <= r^b u
iff a == b and w <= u.

>>> G = CoxeterGroup(CoxeterPresentation.affine_A(3))
>>> r, s1 = G.omega(), G.generator(1)
>>> G.label(G.multiply(G.multiply(r, s1), G.inverse(r)))
's2'
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

__all__ = [
    "CoxeterPresentation", "GroupElement", "CoxeterGroup", "GroupHorizon",
    "enumerate_horizon", "HorizonCapExceeded", "PresentationMismatch",
    "DEFAULT_ENUMERATION_CAP",
]

INFINITY = 0  # marker for m(s, t) = infinity in a Coxeter matrix

DEFAULT_ENUMERATION_CAP = 10 ** 6


class HorizonCapExceeded(RuntimeError):
    """Enumeration would exceed the configured element budget."""


class PresentationMismatch(ValueError):
    """Elements from two different groups were combined."""


@dataclass(frozen=True)
class CoxeterPresentation:
    """Coxeter matrix plus family tag and size of the rotation group."""
    matrix: tuple[tuple[int, ...], ...]
    family: str = "finite"  # "finite" or "affine_A"
    omega_order: int = 1

    def __post_init__(self):
        m = self.matrix
        r = len(m)
        for i in range(r):
            if len(m[i]) != r:
                raise ValueError("Coxeter matrix must be square")
            if m[i][i] != 1 and m[i][i] != 2:
                # accept both the usual m(s,s)=1 and the diagonal-2 convention
                raise ValueError("Coxeter matrix diagonal must be 1 or 2")
            for j in range(r):
                if m[i][j] != m[j][i]:
                    raise ValueError("Coxeter matrix must be symmetric")
                if i != j and m[i][j] != INFINITY and m[i][j] < 2:
                    raise ValueError("off-diagonal bond orders must be >= 2 or infinity")
        if self.family not in ("finite", "affine_A"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.omega_order < 1:
            raise ValueError("omega_order must be positive")
        if self.omega_order > 1 and self.family != "affine_A":
            raise ValueError("a nontrivial rotation group needs the affine_A family")
        if self.family == "affine_A":
            if r < 3:
                raise ValueError("affine type A~_{n-1} needs n >= 3")
            if self.omega_order not in (1, r):
                raise ValueError("omega_order must be 1 or n for affine type A")
            if self.matrix != _affine_A_matrix(r):
                raise ValueError("matrix does not match affine type A")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[int]]) -> "CoxeterPresentation":
        return cls(tuple(tuple(int(x) for x in row) for row in matrix), "finite", 1)

    @classmethod
    def type_A(cls, n: int) -> "CoxeterPresentation":
        """Finite type A_n, i.e. the symmetric group on n + 1 letters."""
        m = [[2] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = 1
            if i + 1 < n:
                m[i][i + 1] = m[i + 1][i] = 3
        return cls.from_matrix(m)

    @classmethod
    def type_B(cls, n: int) -> "CoxeterPresentation":
        m = [list(row) for row in cls.type_A(n).matrix]
        if n >= 2:
            m[0][1] = m[1][0] = 4
        return cls.from_matrix(m)

    @classmethod
    def dihedral(cls, order: int) -> "CoxeterPresentation":
        return cls.from_matrix([[1, order], [order, 1]])

    @classmethod
    def affine_A(cls, n: int, extended: bool = True) -> "CoxeterPresentation":
        """A~_{n-1} on generators s0..s_{n-1}, extended by Z_n if requested."""
        return cls(_affine_A_matrix(n), "affine_A", n if extended else 1)

    def to_json(self) -> dict:
        if self.family == "affine_A":
            return {"family": "affA", "n": self.rank, "extended": self.omega_order > 1}
        return {"family": "matrix", "matrix": [list(r) for r in self.matrix]}


def _affine_A_matrix(n: int) -> tuple[tuple[int, ...], ...]:
    m = [[2] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = 1
        m[i][(i + 1) % n] = m[(i + 1) % n][i] = 3
    return tuple(tuple(r) for r in m)


class GroupElement(NamedTuple):
    """omega-part (exponent of the rotation) and a canonical key for the W' part.

    For finite groups the key is the permutation of the root system; for
    affine type A it is the window [w(1), ..., w(n)] of the W' part.
    """
    omega: int
    key: tuple


# -- finite groups via their root systems ---------------------------------

class _RootSystem:
    def __init__(self, matrix, max_roots: int = 100000):
        r = len(matrix)
        bil = [[(-math.cos(math.pi / matrix[i][j]) if matrix[i][j] != INFINITY else -1.0)
                if i != j else 1.0 for j in range(r)] for i in range(r)]
        self.rank = r

        def reflect(s, vec):
            c = 2 * sum(bil[s][j] * vec[j] for j in range(r))
            out = list(vec)
            out[s] -= c
            return tuple(out)

        def key(vec):
            return tuple(round(x, 7) + 0.0 for x in vec)

        simple = [tuple(1.0 if j == i else 0.0 for j in range(r)) for i in range(r)]
        roots = []
        index = {}
        queue = deque()
        for vec in simple + [tuple(-x for x in s) for s in simple]:
            k = key(vec)
            if k not in index:
                index[k] = len(roots)
                roots.append(vec)
                queue.append(vec)
        while queue:
            vec = queue.popleft()
            for s in range(r):
                w = reflect(s, vec)
                k = key(w)
                if k not in index:
                    if len(roots) >= max_roots:
                        raise ValueError("root system too large; is the Coxeter group finite?")
                    index[k] = len(roots)
                    roots.append(w)
                    queue.append(w)
        self.roots = roots
        self.positive = tuple(all(x > -1e-9 for x in vec) for vec in roots)
        self.simple = tuple(range(r))
        # action of each simple reflection as a permutation of root indices
        self.gen_perm = []
        for s in range(r):
            self.gen_perm.append(tuple(index[key(reflect(s, vec))] for vec in roots))


class CoxeterGroup:
    """Element arithmetic, lengths, descents, words and Bruhat order."""

    def __init__(self, presentation: CoxeterPresentation):
        self.presentation = presentation
        self.rank = presentation.rank
        self.omega_order = presentation.omega_order
        self.affine = presentation.family == "affine_A"
        self._bruhat_cache: dict = {}
        self._word_cache: dict = {}
        if self.affine:
            n = self.rank
            self.n = n
            self.gen_names = [f"s{i}" for i in range(n)]
            self._identity_key = tuple(range(1, n + 1))
        else:
            self._roots = _RootSystem(presentation.matrix)
            self.gen_names = [f"s{i + 1}" for i in range(self.rank)]
            self._identity_key = tuple(range(len(self._roots.roots)))
            self._neg_positive = [not p for p in self._roots.positive]
            self._positive_idx = [i for i, p in enumerate(self._roots.positive) if p]

    # -- construction --------------------------------------------------
    def identity(self) -> GroupElement:
        return GroupElement(0, self._identity_key)

    def generator(self, name) -> GroupElement:
        """Simple reflection by index or name (``1`` or ``"s1"``)."""
        i = self._gen_index(name)
        if self.affine:
            return GroupElement(0, self._affine_right(self._identity_key, i))
        return GroupElement(0, self._roots.gen_perm[i])

    def generators(self) -> list[GroupElement]:
        return [self.generator(name) for name in self.gen_names]

    def omega(self, k: int = 1) -> GroupElement:
        return GroupElement(k % self.omega_order, self._identity_key)

    def omegas(self) -> list[GroupElement]:
        return [self.omega(k) for k in range(self.omega_order)]

    def _gen_index(self, name) -> int:
        if isinstance(name, str):
            return self.gen_names.index(name)
        name = int(name)
        if self.affine:
            if not 0 <= name < self.rank:
                raise ValueError(f"no generator s{name}")
            return name
        if not 1 <= name <= self.rank:
            raise ValueError(f"no generator s{name}")
        return name - 1

    def from_window(self, window: Sequence[int]) -> GroupElement:
        """Affine permutation from its window [f(1), ..., f(n)]."""
        if not self.affine:
            raise ValueError("window notation only for affine type A")
        n = self.n
        window = tuple(int(x) for x in window)
        if len(window) != n or len({x % n for x in window}) != n:
            raise ValueError("window entries must be n values distinct mod n")
        total = sum(window) - n * (n + 1) // 2
        if total % n:
            raise ValueError("window is not an affine permutation")
        shift = total // n
        if self.omega_order == 1 and shift:
            raise ValueError("window has a rotation part but the group is not extended")
        return GroupElement(shift % self.omega_order, tuple(x - shift for x in window))

    def window(self, x: GroupElement) -> tuple[int, ...]:
        """Full window of r^k * w (the representative with shift k in [0, n))."""
        return tuple(a + x.omega for a in x.key)

    def from_word(self, word: Sequence, omega: int = 0) -> GroupElement:
        x = self.omega(omega) if omega else self.identity()
        for s in word:
            x = self.right_multiply_generator(x, self._gen_index(s))
        return x

    # -- affine helpers -------------------------------------------------
    def _eval(self, w: tuple, j: int) -> int:
        n = self.n
        q, r = divmod(j - 1, n)
        return w[r] + q * n

    def _affine_right(self, w: tuple, i: int) -> tuple:
        n = self.n
        w = list(w)
        if i == 0:
            w[0], w[n - 1] = w[n - 1] - n, w[0] + n
        else:
            w[i - 1], w[i] = w[i], w[i - 1]
        return tuple(w)

    def _affine_canonical(self, full: Sequence[int]) -> GroupElement:
        n = self.n
        total = sum(full) - n * (n + 1) // 2
        shift = total // n
        return GroupElement(shift % self.omega_order, tuple(a - shift for a in full))

    # -- group law ------------------------------------------------------
    def _check(self, *xs):
        for x in xs:
            if not isinstance(x, tuple) or len(x) != 2 or len(x[1]) != len(self._identity_key):
                raise PresentationMismatch("element does not belong to this group")
            if not 0 <= x[0] < self.omega_order:
                raise PresentationMismatch("omega part out of range for this group")

    def multiply(self, x: GroupElement, y: GroupElement) -> GroupElement:
        self._check(x, y)
        if self.affine:
            fx, fy = self.window(x), self.window(y)
            return self._affine_canonical([self._eval(fx, j) for j in fy])
        kx, ky = x.key, y.key
        return GroupElement(0, tuple(kx[j] for j in ky))

    def inverse(self, x: GroupElement) -> GroupElement:
        self._check(x)
        if self.affine:
            n = self.n
            f = self.window(x)
            inv = [0] * n
            for i, val in enumerate(f, start=1):
                q, r = divmod(val - 1, n)
                inv[r] = i - q * n
            return self._affine_canonical(inv)
        key = x.key
        inv = [0] * len(key)
        for i, j in enumerate(key):
            inv[j] = i
        return GroupElement(0, tuple(inv))

    def right_multiply_generator(self, x: GroupElement, s: int) -> GroupElement:
        """x * s for generator index s (fast path)."""
        if self.affine:
            return GroupElement(x.omega, self._affine_right(x.key, s))
        perm = self._roots.gen_perm[s]
        return GroupElement(0, tuple(x.key[j] for j in perm))

    def left_multiply_generator(self, s: int, x: GroupElement) -> GroupElement:
        """s * x for generator index s."""
        if self.affine:
            return self.multiply(GroupElement(0, self._affine_right(self._identity_key, s)), x)
        perm = self._roots.gen_perm[s]
        return GroupElement(0, tuple(perm[j] for j in x.key))

    def conjugate_by_omega(self, x: GroupElement, k: int = 1) -> GroupElement:
        """r^k x r^-k."""
        om = self.omega(k)
        return self.multiply(self.multiply(om, x), self.omega(-k))

    def coxeter_part(self, x: GroupElement) -> GroupElement:
        return GroupElement(0, x.key)

    # -- length and descents --------------------------------------------
    def length(self, x: GroupElement) -> int:
        if self.affine:
            n, w = self.n, x.key
            total = 0
            for i in range(n):
                for j in range(i + 1, n):
                    total += abs((w[j] - w[i]) // n)
            return total
        neg = self._neg_positive
        return sum(1 for i in self._positive_idx if neg[x.key[i]])

    def length_and_inverse(self, x: GroupElement) -> tuple[int, GroupElement]:
        return self.length(x), self.inverse(x)

    def is_right_descent(self, x: GroupElement, s: int) -> bool:
        if self.affine:
            n, w = self.n, x.key
            if s == 0:
                return w[n - 1] - n > w[0]
            return w[s - 1] > w[s]
        return not self._roots.positive[x.key[s]]

    def is_left_descent(self, s: int, x: GroupElement) -> bool:
        return self.is_right_descent(self.inverse(x), s)

    def right_descents(self, x: GroupElement) -> list[int]:
        return [s for s in range(self.rank) if self.is_right_descent(x, s)]

    def left_descents(self, x: GroupElement) -> list[int]:
        xi = self.inverse(x)
        return [s for s in range(self.rank) if self.is_right_descent(xi, s)]

    # -- words, labels --------------------------------------------------
    def reduced_word(self, x: GroupElement) -> tuple[int, ...]:
        """Lexicographically first reduced word of the W' part (generator indices)."""
        w = GroupElement(0, x.key)
        cached = self._word_cache.get(w)
        if cached is not None:
            return cached
        word = []
        # left descents of cur are right descents of cur^-1
        cur_inv = self.inverse(w)
        while True:
            s = next((t for t in range(self.rank) if self.is_right_descent(cur_inv, t)), None)
            if s is None:
                break
            word.append(s)
            cur_inv = self.right_multiply_generator(cur_inv, s)
        out = tuple(word)
        self._word_cache[w] = out
        return out

    def label(self, x: GroupElement) -> str:
        parts = []
        if x.omega:
            parts.append("r" if x.omega == 1 else f"r^{x.omega}")
        parts.extend(self.gen_names[s] for s in self.reduced_word(x))
        return "*".join(parts) if parts else "e"

    def parse(self, label: str) -> GroupElement:
        label = label.strip()
        if label in ("e", "1", ""):
            return self.identity()
        omega = 0
        word = []
        for tok in label.split("*"):
            tok = tok.strip()
            if tok == "r":
                omega += 1
            elif tok.startswith("r^"):
                omega += int(tok[2:])
            else:
                if word == [] and omega == 0 and tok == "e":
                    continue
                word.append(self._gen_index(tok))
        x = self.omega(omega) if omega else self.identity()
        for s in word:
            x = self.right_multiply_generator(x, s)
        return x

    def sort_key(self, x: GroupElement):
        return (self.length(x), x.omega, self.reduced_word(x))

    # -- Bruhat order ---------------------------------------------------
    def bruhat_leq(self, x: GroupElement, y: GroupElement) -> bool:
        self._check(x, y)
        if x.omega != y.omega:
            return False
        return self._bruhat(GroupElement(0, x.key), GroupElement(0, y.key))

    def _bruhat(self, x: GroupElement, y: GroupElement) -> bool:
        key = (x, y)
        hit = self._bruhat_cache.get(key)
        if hit is not None:
            return hit
        lx, ly = self.length(x), self.length(y)
        if lx > ly:
            out = False
        elif lx == ly:
            out = x == y
        elif lx == 0:
            out = True
        else:
            s = next(t for t in range(self.rank) if self.is_right_descent(y, t))
            ys = self.right_multiply_generator(y, s)
            if self.is_right_descent(x, s):
                out = self._bruhat(self.right_multiply_generator(x, s), ys)
            else:
                out = self._bruhat(x, ys)
        self._bruhat_cache[key] = out
        return out


@dataclass
class GroupHorizon:
    """All elements of length <= bound (bound None means the whole finite group).

    Elements are stored sorted by (length, omega, reduced word); their position
    in ``elements`` is used as a compact index by the Hecke machinery.
    """
    group: CoxeterGroup
    bound: Optional[int]
    elements: list[GroupElement]
    index: dict[GroupElement, int] = field(repr=False)
    lengths: list[int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.index

    def __iter__(self):
        return iter(self.elements)

    def label(self, x: GroupElement) -> str:
        return self.group.label(x)

    def labels(self) -> list[str]:
        return [self.group.label(x) for x in self.elements]

    def depth(self, x: GroupElement) -> Optional[int]:
        """Distance from the truncation boundary (None when nothing is truncated)."""
        if self.bound is None:
            return None
        return self.bound - self.group.length(x)


def enumerate_horizon(group: CoxeterGroup, bound: Optional[int] = None,
                      cap: Optional[int] = None) -> GroupHorizon:
    """Breadth-first closure of the identity under right multiplication."""
    if cap is None:
        cap = int(os.environ.get("TABKIT_ENUM_CAP", DEFAULT_ENUMERATION_CAP))
    if bound is None and group.affine:
        raise ValueError("an infinite group needs a finite length bound")
    if bound is not None and bound < 0:
        raise ValueError("length bound must be nonnegative")
    level = [group.omega(k) for k in range(group.omega_order)]
    found = list(level)
    seen = set(level)
    lengths = [0] * len(level)
    depth = 0
    while level and (bound is None or depth < bound):
        nxt = []
        for x in level:
            for s in range(group.rank):
                if group.is_right_descent(x, s):
                    continue
                y = group.right_multiply_generator(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise HorizonCapExceeded(
                            f"more than {cap} elements below length {bound}")
        depth += 1
        found.extend(nxt)
        lengths.extend([depth] * len(nxt))
        level = nxt
    order = sorted(range(len(found)), key=lambda i: (lengths[i], found[i].omega,
                                                     group.reduced_word(found[i])))
    elements = [found[i] for i in order]
    return GroupHorizon(group, bound, elements, {x: i for i, x in enumerate(elements)},
                        [lengths[i] for i in order])
