"""Exact scalars: Laurent polynomials in s = q**(1/2) and the quadratic extension by lambda.

``LaurentPoly`` keeps integer exponents of ``s`` with rational coefficients.
``LambdaExt`` represents ``a + b*lam`` where ``lam**2 = -T*lam - 1``.  Numeric
work uses plain Python ``complex`` and numpy arrays.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Rational
from typing import Mapping, NamedTuple

from .errors import Degenerate, ZeroBase


def _clean(v):
    """Store integral Fractions as int, which keeps the common case fast."""
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v.numerator)
    return v


def _to_rational(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, int):
        return v
    if isinstance(v, Rational):
        return _clean(Fraction(v))
    if isinstance(v, float):
        if not v.is_integer():
            raise TypeError("float coefficients are not exact; pass a Fraction")
        return int(v)
    raise TypeError(f"cannot use {type(v).__name__} as an exact coefficient")


class LaurentPoly:
    """Immutable Laurent polynomial in ``s`` with exact rational coefficients."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        c = {}
        for e, v in (coeffs or {}).items():
            v = _to_rational(v)
            if v:
                c[int(e)] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: dict) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj._c = c
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def const(cls, v) -> "LaurentPoly":
        return cls({0: v})

    @classmethod
    def s(cls, power: int = 1, coeff=1) -> "LaurentPoly":
        return cls({power: coeff})

    @classmethod
    def q(cls, power=1, coeff=1) -> "LaurentPoly":
        """Monomial ``coeff * q**power``; ``power`` may be a half-integer."""
        e = Fraction(power) * 2
        if e.denominator != 1:
            raise ValueError(f"q**{power} is not an integer power of s")
        return cls({int(e): coeff})

    # inspection
    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def coeff(self, e: int):
        return self._c.get(e, 0)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def is_const(self) -> bool:
        return not self._c or set(self._c) == {0}

    def min_exp(self) -> int:
        return min(self._c) if self._c else 0

    def max_exp(self) -> int:
        return max(self._c) if self._c else 0

    def height(self) -> float:
        """Largest absolute coefficient; 0.0 only for the zero polynomial."""
        return float(max((abs(v) for v in self._c.values()), default=0))

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        c = dict(self._c)
        for e, v in other._c.items():
            w = c.get(e, 0) + v
            if w:
                c[e] = _clean(w)
            else:
                c.pop(e, None)
        return LaurentPoly._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return LaurentPoly._raw({})
            return LaurentPoly._raw({e: _clean(v * other) for e, v in self._c.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        c: dict = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = e1 + e2
                c[e] = c.get(e, 0) + v1 * v2
        return LaurentPoly._raw({e: _clean(v) for e, v in c.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if len(self._c) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, v), = self._c.items()
            return LaurentPoly._raw({e * n: _clean(Fraction(v) ** n)})
        out = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(other)
        if isinstance(other, LambdaExt):
            return other == self
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    # maps
    def invert_variable(self) -> "LaurentPoly":
        """Substitute s -> 1/s (equivalently q -> 1/q)."""
        return LaurentPoly._raw({-e: v for e, v in self._c.items()})

    def evaluate(self, s0) -> complex:
        return evaluate(self, s0)

    def __repr__(self):
        if not self._c:
            return "0"
        terms = []
        for e in sorted(self._c, reverse=True):
            v = self._c[e]
            mono = "" if e == 0 else ("s" if e == 1 else f"s^{e}")
            if mono and v == 1:
                terms.append(mono)
            elif mono and v == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{v}{'*' + mono if mono else ''}")
        return " + ".join(terms).replace("+ -", "- ")

    # serialization
    def to_json(self) -> dict:
        out = {}
        for e in sorted(self._c):
            f = Fraction(self._c[e])
            out[str(e)] = [f.numerator, f.denominator]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "LaurentPoly":
        return cls({int(e): Fraction(n, d) for e, (n, d) in data.items()})


ZERO = LaurentPoly()
ONE = LaurentPoly.const(1)


def evaluate(p: LaurentPoly, s0) -> complex:
    """Evaluate ``p`` at ``s = s0`` by Horner on the positive and negative parts."""
    s0 = complex(s0)
    if s0 == 0:
        raise ZeroBase("cannot evaluate a Laurent polynomial at s = 0")
    if not p._c:
        return 0j
    lo, hi = min(p._c), max(p._c)
    pos = 0j
    for e in range(max(hi, 0), -1, -1):
        pos = pos * s0 + float(p._c.get(e, 0))
    neg = 0j
    inv = 1 / s0
    for e in range(min(lo, 0), 0):
        neg = (neg + float(p._c.get(e, 0))) * inv
    return pos + neg


def quantum_bracket(n: int) -> LaurentPoly:
    """``[n] = q**(n-1) + q**(n-3) + ... + q**(1-n)``."""
    if n < 0:
        raise ValueError("quantum_bracket needs n >= 0")
    return LaurentPoly({2 * (n - 1 - 2 * k): 1 for k in range(n)})


class LambdaExt:
    """Element ``a + b*lam`` of LaurentPoly[lam] / (lam**2 + T*lam + 1).

    The modulus ``T`` travels with each element so that products can reduce
    ``lam**2`` without an ambient context.  Pure scalars may leave it unset.
    """

    __slots__ = ("a", "b", "T")

    def __init__(self, a=ZERO, b=ZERO, T: LaurentPoly | None = None):
        self.a = a if isinstance(a, LaurentPoly) else LaurentPoly.const(a)
        self.b = b if isinstance(b, LaurentPoly) else LaurentPoly.const(b)
        if T is None and self.b:
            raise ValueError("an element with a lambda part needs its modulus T")
        self.T = T

    @classmethod
    def generator(cls, T: LaurentPoly) -> "LambdaExt":
        return cls(ZERO, ONE, T)

    @classmethod
    def inverse_generator(cls, T: LaurentPoly) -> "LambdaExt":
        """``lam**-1 = -T - lam``."""
        return cls(-T, LaurentPoly.const(-1), T)

    def _modulus(self, other: "LambdaExt"):
        if self.T is None:
            return other.T
        if other.T is None or other.T is self.T or other.T == self.T:
            return self.T
        raise ValueError("LambdaExt operands carry different moduli")

    def _coerce(self, other):
        if isinstance(other, LambdaExt):
            return other
        if isinstance(other, (LaurentPoly, int, Fraction)):
            return LambdaExt(other, ZERO, self.T)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return LambdaExt(self.a + other.a, self.b + other.b, self._modulus(other))

    __radd__ = __add__

    def __neg__(self):
        return LambdaExt(-self.a, -self.b, self.T)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (LaurentPoly, int, Fraction)):
            return LambdaExt(self.a * other, self.b * other, self.T)
        if not isinstance(other, LambdaExt):
            return NotImplemented
        T = self._modulus(other)
        a, b, c, d = self.a, self.b, other.a, other.b
        if not b or not d:
            return LambdaExt(a * c, a * d + b * c, T)
        bd = b * d
        return LambdaExt(a * c - bd, a * d + b * c - bd * T, T)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if self.a or self.b != ONE:
                raise ValueError("only powers of the generator have closed-form inverses")
            return LambdaExt.inverse_generator(self.T) ** (-n)
        out = LambdaExt(ONE, ZERO, self.T)
        for _ in range(n):
            out = out * self
        return out

    def conj(self) -> "LambdaExt":
        """Swap ``lam <-> lam**-1``; an involutive ring map."""
        if not self.b:
            return self
        return LambdaExt(self.a - self.b * self.T, -self.b, self.T)

    def invert_variable(self) -> "LambdaExt":
        """Apply s -> 1/s to both parts; requires T to be symmetric under it."""
        if self.T is not None and self.T.invert_variable() != self.T:
            raise ValueError("modulus is not invariant under s -> 1/s")
        return LambdaExt(self.a.invert_variable(), self.b.invert_variable(), self.T)

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def __bool__(self):
        return not self.is_zero()

    def height(self) -> float:
        return max(self.a.height(), self.b.height())

    def __eq__(self, other):
        if isinstance(other, (LaurentPoly, int, Fraction)):
            return not self.b and self.a == other
        if not isinstance(other, LambdaExt):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def evaluate(self, s0, lam0) -> complex:
        return evaluate(self.a, s0) + evaluate(self.b, s0) * complex(lam0)

    def __repr__(self):
        if not self.b:
            return repr(self.a)
        return f"({self.a!r}) + ({self.b!r})*lam"

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json()}

    @classmethod
    def from_json(cls, data: Mapping, T: LaurentPoly | None = None) -> "LambdaExt":
        return cls(LaurentPoly.from_json(data["a"]), LaurentPoly.from_json(data["b"]), T)


class LambdaRoots(NamedTuple):
    plus: complex
    minus: complex

    @property
    def degenerate(self) -> bool:
        return self.plus == self.minus

    @property
    def exp_eta(self) -> complex:
        """``e**eta = -1/lambda_plus``."""
        return -self.minus


def lambda_numeric_roots(T, degenerate_tol: float = 1e-12) -> LambdaRoots:
    """Roots of ``lam + 1/lam + T = 0`` as ``(lambda_plus, lambda_minus)``.

    The branch is fixed by ``|e**eta| >= 1`` with ``e**eta = (T + sqrt(T*T - 4))/2``,
    which for real ``T >= 2`` gives the real root ``e**eta >= 1``.
    When ``T*T - 4`` vanishes to within ``degenerate_tol`` the double root
    ``-T/2`` is returned for both.
    """
    T = complex(T)
    disc = T * T - 4
    if abs(disc) <= degenerate_tol * max(1.0, abs(T) ** 2):
        r = -T / 2
        return LambdaRoots(r, r)
    root = cmath.sqrt(disc)
    e = (T + root) / 2
    if abs(e) < 1:
        e = (T - root) / 2
    return LambdaRoots(-1 / e, -e)


def require_nondegenerate(roots: LambdaRoots) -> LambdaRoots:
    if roots.degenerate:
        raise Degenerate("lambda_+ == lambda_- (T**2 == 4)")
    return roots


def scalar_to_json(x):
    if isinstance(x, LambdaExt):
        return x.to_json()
    if isinstance(x, LaurentPoly):
        return x.to_json()
    x = complex(x)
    return [x.real, x.imag]
