"""
Exact Laurent polynomials in one variable ``v`` with integer coefficients,
and scalars in the fields used for specialization (the rationals and prime
fields).

>>> p = (v + ~v) * (v + ~v)
>>> p
v^2 + 2 + v^-2
>>> p.bar() == p, p.degree()
(True, 2)
>>> (v + ~v).specialize(GF(5)(2))
0 (mod 5)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

__all__ = [
    "LaurentPoly", "MINUS_INFINITY", "v", "ONE", "ZERO",
    "Field", "QQ", "GF", "FieldScalar",
]

# degree of the zero polynomial; compares below every int and absorbs sums
MINUS_INFINITY = float("-inf")


class LaurentPoly:
    """An immutable element of Z[v, v^-1], stored as {exponent: coefficient}."""

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping[int, int] | None = None):
        if terms:
            self._t = {int(e): int(c) for e, c in terms.items() if c}
        else:
            self._t = {}
        self._hash = None

    @classmethod
    def _raw(cls, t: dict) -> "LaurentPoly":
        # t must already be normalized (no zero coefficients)
        p = object.__new__(cls)
        p._t = t
        p._hash = None
        return p

    @classmethod
    def monomial(cls, coeff: int = 1, exp: int = 0) -> "LaurentPoly":
        return cls._raw({exp: coeff} if coeff else {})

    @classmethod
    def from_pairs(cls, pairs: Iterable[Iterable[int]]) -> "LaurentPoly":
        t: dict[int, int] = {}
        for e, c in pairs:
            t[e] = t.get(e, 0) + c
        return cls(t)

    def to_pairs(self) -> list[list[int]]:
        """Canonical serialization: [exponent, coefficient] sorted by exponent."""
        return [[e, self._t[e]] for e in sorted(self._t)]

    # -- inspection ----------------------------------------------------
    def terms(self) -> dict[int, int]:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def coefficient(self, exp: int) -> int:
        return self._t.get(exp, 0)

    def degree(self) -> Union[int, float]:
        """Highest exponent; ``MINUS_INFINITY`` for the zero polynomial."""
        return max(self._t) if self._t else MINUS_INFINITY

    def valuation(self) -> Union[int, float]:
        return min(self._t) if self._t else float("inf")

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_term(self) -> int:
        return self._t.get(0, 0)

    # -- ring operations -----------------------------------------------
    @staticmethod
    def _coerce(other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, int):
            return LaurentPoly._raw({0: other} if other else {})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._t:
            return self
        if not self._t:
            return other
        t = dict(self._t)
        for e, c in other._t.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = s
            else:
                del t[e]
        return LaurentPoly._raw(t)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw({e: -c for e, c in self._t.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return ZERO
            return LaurentPoly._raw({e: c * other for e, c in self._t.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if not self._t or not other._t:
            return ZERO
        t: dict[int, int] = {}
        for e1, c1 in self._t.items():
            for e2, c2 in other._t.items():
                e = e1 + e2
                t[e] = t.get(e, 0) + c1 * c2
        return LaurentPoly._raw({e: c for e, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            if len(self._t) != 1:
                raise ValueError("only monomials are invertible in Z[v, v^-1]")
            (e, c), = self._t.items()
            if c not in (1, -1):
                raise ValueError("only monomials with unit coefficient are invertible")
            return LaurentPoly._raw({e * k: c ** (-k)})
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __invert__(self) -> "LaurentPoly":
        """``~v`` is v^-1; defined for unit monomials only."""
        return self ** -1

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by v^k."""
        if not k:
            return self
        return LaurentPoly._raw({e + k: c for e, c in self._t.items()})

    def bar(self) -> "LaurentPoly":
        """The ring involution v -> v^-1."""
        return LaurentPoly._raw({-e: c for e, c in self._t.items()})

    def truncate_above(self, exp: int) -> "LaurentPoly":
        """Keep only the terms of exponent > exp."""
        return LaurentPoly._raw({e: c for e, c in self._t.items() if e > exp})

    def specialize(self, r: "FieldScalar") -> "FieldScalar":
        """Evaluate at v = r in r's field; r must be nonzero."""
        if r.is_zero():
            raise ZeroDivisionError("cannot specialize v at 0")
        field = r.field
        total = field.zero()
        inv = r.inverse()
        for e, c in self._t.items():
            total = total + field(c) * (r ** e if e >= 0 else inv ** (-e))
        return total

    # -- comparison / hashing ------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly._coerce(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for e in sorted(self._t, reverse=True):
            c = self._t[e]
            mono = "" if e == 0 else ("v" if e == 1 else f"v^{e}")
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


ZERO = LaurentPoly._raw({})
ONE = LaurentPoly._raw({0: 1})
v = LaurentPoly._raw({1: 1})


@dataclass(frozen=True)
class Field:
    """The rationals (characteristic 0) or the prime field F_p."""
    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p < 0 or p == 1 or (p > 1 and any(p % d == 0 for d in range(2, int(p ** 0.5) + 1))):
            raise ValueError(f"characteristic must be 0 or a prime, got {p}")

    def __call__(self, x) -> "FieldScalar":
        if isinstance(x, FieldScalar):
            if x.field != self:
                raise ValueError("scalar belongs to a different field")
            return x
        if self.characteristic:
            if isinstance(x, Fraction):
                num = x.numerator % self.characteristic
                den = x.denominator % self.characteristic
                if not den:
                    raise ZeroDivisionError("denominator vanishes mod p")
                return FieldScalar(self, num * pow(den, -1, self.characteristic) % self.characteristic)
            return FieldScalar(self, int(x) % self.characteristic)
        return FieldScalar(self, Fraction(x))

    def zero(self) -> "FieldScalar":
        return self(0)

    def one(self) -> "FieldScalar":
        return self(1)

    def elements(self):
        """All elements of a prime field (brute-force searches)."""
        if not self.characteristic:
            raise ValueError("the rationals are infinite")
        return [FieldScalar(self, a) for a in range(self.characteristic)]

    @property
    def tag(self) -> str:
        return "QQ" if not self.characteristic else f"GF({self.characteristic})"

    def __repr__(self) -> str:
        return self.tag


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)


@dataclass(frozen=True)
class FieldScalar:
    field: Field
    value: Union[Fraction, int]

    def _other(self, other) -> "FieldScalar":
        if isinstance(other, FieldScalar):
            if other.field != self.field:
                raise ValueError("mixing scalars from different fields")
            return other
        return self.field(other)

    def _make(self, value) -> "FieldScalar":
        p = self.field.characteristic
        return FieldScalar(self.field, value % p if p else value)

    def __add__(self, other):
        return self._make(self.value + self._other(other).value)

    __radd__ = __add__

    def __sub__(self, other):
        return self._make(self.value - self._other(other).value)

    def __rsub__(self, other):
        return self._make(self._other(other).value - self.value)

    def __neg__(self):
        return self._make(-self.value)

    def __mul__(self, other):
        return self._make(self.value * self._other(other).value)

    __rmul__ = __mul__

    def inverse(self) -> "FieldScalar":
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse")
        p = self.field.characteristic
        if p:
            return FieldScalar(self.field, pow(self.value, -1, p))
        return FieldScalar(self.field, 1 / self.value)

    def __truediv__(self, other):
        return self * self._other(other).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        p = self.field.characteristic
        if p:
            return FieldScalar(self.field, pow(self.value, k, p))
        return FieldScalar(self.field, self.value ** k)

    def is_zero(self) -> bool:
        return self.value == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field(other)
        if not isinstance(other, FieldScalar):
            return NotImplemented
        return self.field == other.field and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.field, self.value))

    def to_json(self):
        if self.field.characteristic:
            return self.value
        return str(self.value)

    def __repr__(self) -> str:
        if self.field.characteristic:
            return f"{self.value} (mod {self.field.characteristic})"
        return str(self.value)
