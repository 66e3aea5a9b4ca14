"""Rank-one projector P0' and the braid matrices I + lam*P0' built from it."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, InvalidDimension, NoRealEta, PoleAtTheta
from .matrix import ExactMatrix, is_exact, lift, residual
from .report import Check
from .scalar import ONE, ZERO, LambdaExt, LaurentPoly, lambda_numeric_roots


class Family(str, Enum):
    OHAT = "ohat"
    PHAT = "phat"


class Tag(str, Enum):
    RHAT_PLUS = "RHatPlus"
    RHAT_MINUS = "RHatMinus"
    BAXTERIZED = "Baxterized"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class AlgebraSpec:
    family: Family
    N: int
    rho: tuple[Fraction, ...]
    eps: tuple[int, ...]
    T: LaurentPoly = field(compare=False)

    def prime(self, i: int) -> int:
        """0-based partner index ``i' = N - 1 - i``."""
        return self.N - 1 - i

    def qpow(self, exponent) -> LaurentPoly:
        return LaurentPoly.q(exponent)

    def c(self, i: int, j: int) -> LaurentPoly:
        """Entry of P0' in row (i, i'), column (j, j'): q^(rho_i' - rho_j) eps_i eps_j."""
        return LaurentPoly.q(self.rho[self.prime(i)] - self.rho[j], self.eps[i] * self.eps[j])

    def weight(self, j: int) -> LaurentPoly:
        """``eps_j q^(-rho_j)``, the weight that appears in the quadratic invariants."""
        return LaurentPoly.q(-self.rho[j], self.eps[j])

    def T_at(self, q0) -> complex:
        return self.T.evaluate(s_of(q0))

    @property
    def label(self) -> str:
        return f"{self.family.value}{self.N}"


def s_of(q0) -> complex:
    """Principal square root, the numeric value of s = q**(1/2)."""
    return cmath.sqrt(complex(q0))


def make_spec(family, N: int) -> AlgebraSpec:
    family = Family(family)
    if family is Family.OHAT:
        if N < 3:
            raise InvalidDimension(f"ohat needs N >= 3, got {N}")
        if N % 2:
            n = (N - 1) // 2
            top = [Fraction(2 * n - 1, 2) - k for k in range(n)]
            rho = top + [Fraction(0)] + [-r for r in reversed(top)]
        else:
            n = (N - 2) // 2
            top = [Fraction(n - k) for k in range(n)]
            rho = top + [Fraction(0), Fraction(0)] + [-r for r in reversed(top)]
        eps = [1] * N
    else:
        if N < 4 or N % 2:
            raise InvalidDimension(f"phat needs even N >= 4, got {N}")
        n = N // 2
        rho = [Fraction(n - k) for k in range(n)] + [Fraction(-(k + 1)) for k in range(n)]
        eps = [1] * n + [-1] * n
    T = ZERO
    for i in range(N):
        T = T + LaurentPoly.q(rho[N - 1 - i] - rho[i], eps[i] * eps[i])
    return AlgebraSpec(family, N, tuple(rho), tuple(eps), T)


@dataclass(frozen=True)
class BraidMatrix:
    """An N^2 x N^2 matrix with its construction tag.

    ``entries`` is an ExactMatrix (LaurentPoly or LambdaExt entries) or a
    complex numpy array.
    """

    N: int
    entries: object
    tag: Tag = Tag.CUSTOM
    theta: float | None = None

    @property
    def dim(self) -> int:
        return self.N * self.N

    @property
    def backend(self) -> str:
        if not is_exact(self.entries):
            return "complex"
        if any(isinstance(v, LambdaExt) for _, v in self.entries.items()):
            return "lambda"
        return "laurent"

    def numeric(self, q0, lam0=None) -> np.ndarray:
        if not is_exact(self.entries):
            return np.asarray(self.entries)
        s0 = s_of(q0)
        if lam0 is None and self.backend == "lambda":
            # entries carry T; evaluate it to pick lambda_+
            T = next(v.T for _, v in self.entries.items() if isinstance(v, LambdaExt) and v.T is not None)
            lam0 = lambda_numeric_roots(T.evaluate(s0)).plus
        return self.entries.to_numpy(s0, lam0)

    def to_json(self) -> dict:
        if is_exact(self.entries):
            rows = self.entries.to_json()
        else:
            rows = [[[complex(v).real, complex(v).imag] for v in row] for row in np.asarray(self.entries)]
        out = {"dim": self.dim, "backend": self.backend, "tag": self.tag.value, "entries": rows}
        if self.theta is not None:
            out["theta"] = self.theta
        return out


def projector_p0prime(spec: AlgebraSpec) -> BraidMatrix:
    N = spec.N
    e = {}
    for i in range(N):
        for j in range(N):
            e[(i * N + spec.prime(i), j * N + spec.prime(j))] = spec.c(i, j)
    return BraidMatrix(N, ExactMatrix((N * N, N * N), e), Tag.CUSTOM)


def p0prime_numeric(spec: AlgebraSpec, q0) -> np.ndarray:
    return projector_p0prime(spec).entries.to_numpy(s_of(q0))


def braid_matrix(spec: AlgebraSpec, sign: int = 1) -> BraidMatrix:
    """``I + lam*P0'`` (sign +1) or ``I + lam**-1 * P0'`` (sign -1) over LambdaExt."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    T = spec.T
    lam = LambdaExt.generator(T) if sign == 1 else LambdaExt.inverse_generator(T)
    P = projector_p0prime(spec).entries
    I = ExactMatrix.identity(spec.N ** 2, LambdaExt(ONE, ZERO, T))
    m = I + lift(P, T).scale(lam)
    return BraidMatrix(spec.N, m, Tag.RHAT_PLUS if sign == 1 else Tag.RHAT_MINUS)


def has_real_eta(T0: complex, tol: float = 1e-12) -> bool:
    T0 = complex(T0)
    return abs(T0.imag) <= tol * max(1.0, abs(T0)) and T0.real >= 2 - tol


def eta_at(spec: AlgebraSpec, q0, allow_complex: bool = False) -> complex:
    """``eta`` with ``e**eta`` on the branch of ``lambda_numeric_roots``."""
    T0 = spec.T_at(q0)
    if not has_real_eta(T0):
        if not allow_complex:
            raise NoRealEta(f"T({q0}) = {T0} is not real and >= 2")
        return cmath.log(lambda_numeric_roots(T0).exp_eta)
    return complex(math.log(lambda_numeric_roots(T0.real).exp_eta.real))


def rhat_numeric(spec: AlgebraSpec, q0, sign: int = 1, lam0=None) -> np.ndarray:
    """Numeric ``I + lam_(+/-) P0'``; ``lam0`` overrides lambda_+ when given."""
    P = p0prime_numeric(spec, q0)
    if lam0 is None:
        roots = lambda_numeric_roots(np.trace(P))
        lam0 = roots.plus if sign == 1 else roots.minus
    elif sign == -1:
        lam0 = 1 / lam0
    return np.eye(spec.N ** 2, dtype=complex) + lam0 * P


def baxterized(spec: AlgebraSpec, theta: float, q0, allow_complex: bool = False) -> BraidMatrix:
    """``I - sinh(theta)/sinh(eta + theta) * P0'`` evaluated numerically."""
    eta = eta_at(spec, q0, allow_complex)
    den = cmath.sinh(eta + theta)
    if abs(den) < 1e-14:
        raise PoleAtTheta(f"sinh(eta + theta) vanishes at theta = {theta}")
    if eta.imag == 0:
        eta = eta.real
    coeff = cmath.sinh(theta) / den
    m = np.eye(spec.N ** 2, dtype=complex) - coeff * p0prime_numeric(spec, q0)
    return BraidMatrix(spec.N, m, Tag.BAXTERIZED, theta=float(theta))


def permutation_P(N: int, exact: bool = True):
    e = {(i * N + j, j * N + i): ONE for i in range(N) for j in range(N)}
    m = ExactMatrix((N * N, N * N), e)
    return m if exact else m.to_numpy(1.0)


def _unwrap(m):
    return m.entries if isinstance(m, BraidMatrix) else m


def _infer_N(m) -> int:
    d = m.shape[0]
    N = int(round(math.sqrt(d)))
    if N * N != d or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"matrix of shape {m.shape} is not N^2 x N^2")
    return N


def _id(m, n):
    if is_exact(m):
        one = next((v for _, v in m.items()), ONE)
        unit = LambdaExt(ONE, ZERO, one.T) if isinstance(one, LambdaExt) else ONE
        return ExactMatrix.identity(n, unit)
    return np.eye(n, dtype=complex)


def _kron(a, b):
    return a.kron(b) if is_exact(a) else np.kron(a, b)


def _check(name: str, diff, exact: bool, tol: float) -> Check:
    return Check(name, residual(diff), 0.0 if exact else tol, exact)


def check_braid_equation(m, tol: float = 1e-9) -> Check:
    """Residual of R12 R23 R12 - R23 R12 R23 with R12 = R (x) I_N, R23 = I_N (x) R."""
    m = _unwrap(m)
    N = _infer_N(m)
    I = _id(m, N)
    a = _kron(m, I)
    b = _kron(I, m)
    diff = a @ b @ a - b @ a @ b
    return _check("braid equation", diff, is_exact(m), tol)


def check_baxterized_braid(spec: AlgebraSpec, theta: float, theta_p: float, q0, tol: float = 1e-9,
                           allow_complex: bool = False) -> Check:
    """Residual of R12(t) R23(t + t') R12(t') - R23(t') R12(t + t') R23(t)."""
    N = spec.N
    I = np.eye(N, dtype=complex)

    def R(t):
        return baxterized(spec, t, q0, allow_complex).entries

    r1, r2, r3 = R(theta), R(theta + theta_p), R(theta_p)
    lhs = np.kron(r1, I) @ np.kron(I, r2) @ np.kron(r3, I)
    rhs = np.kron(I, r3) @ np.kron(r2, I) @ np.kron(I, r1)
    return _check("baxterized braid equation", lhs - rhs, False, tol)


def check_hecke(spec: AlgebraSpec) -> Check:
    """(R - I)(R + lam**2 I) = 0 over the extension ring."""
    R = braid_matrix(spec, 1).entries
    T = spec.T
    I = ExactMatrix.identity(spec.N ** 2, LambdaExt(ONE, ZERO, T))
    lam = LambdaExt.generator(T)
    diff = (R - I) @ (R + I.scale(lam * lam))
    return _check("Hecke relation", diff, True, 0.0)


def check_projector_square(spec: AlgebraSpec) -> Check:
    P = projector_p0prime(spec).entries
    return _check("P0'^2 = T P0'", P @ P - P.scale(spec.T), True, 0.0)


def check_inverse(spec: AlgebraSpec) -> Check:
    R = braid_matrix(spec, 1).entries
    Ri = braid_matrix(spec, -1).entries
    I = ExactMatrix.identity(spec.N ** 2, LambdaExt(ONE, ZERO, spec.T))
    return _check("R R^-1 = I", R @ Ri - I, True, 0.0)


def spectrum(spec: AlgebraSpec, q0, sign: int = 1, allow_complex: bool = False) -> np.ndarray:
    """Eigenvalues of the numeric R^(+/-1), sorted by real then imaginary part."""
    eta_at(spec, q0, allow_complex)
    ev = np.linalg.eigvals(rhat_numeric(spec, q0, sign))
    return np.array(sorted(ev, key=lambda z: (round(z.real, 12), round(z.imag, 12))))


def expected_spectrum(spec: AlgebraSpec, q0, sign: int = 1) -> np.ndarray:
    """``{-e**(-2*sign*eta)}`` once and 1 with multiplicity N^2 - 1."""
    roots = lambda_numeric_roots(spec.T_at(q0))
    lam = roots.plus if sign == 1 else roots.minus
    vals = [-(lam ** 2)] + [1.0 + 0j] * (spec.N ** 2 - 1)
    return np.array(sorted(vals, key=lambda z: (round(z.real, 12), round(z.imag, 12))))
