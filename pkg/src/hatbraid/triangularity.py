"""Triangularity (R^2 = I, i.e. T(q) = 2) as polynomial equations, with numeric roots.

Integer polynomials are tuples of coefficients in ascending degree.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import comb

import numpy as np

from .braidgen import AlgebraSpec, Family, check_braid_equation, p0prime_numeric
from .errors import NonConvergence
from .scalar import LaurentPoly

IntPoly = tuple


# integer polynomial helpers

def _trim(c) -> IntPoly:
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def padd(a, b) -> IntPoly:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def pscale(a, k) -> IntPoly:
    return _trim([k * x for x in a])


def pmul(a, b) -> IntPoly:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def peval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pderiv(a) -> IntPoly:
    return _trim([i * a[i] for i in range(1, len(a))] or [0])


def sn_polynomial(n: int, method: str = "closed") -> IntPoly:
    """S_n(Y) with S_0 = 0, S_1 = Y and S_(n+1) = Y S_n - S_(n-1) + Y - 2."""
    if n < 0:
        raise ValueError("n >= 0 required")
    if method == "recursion":
        prev, cur = (0,), (0, 1)
        if n == 0:
            return prev
        for _ in range(n - 1):
            prev, cur = cur, padd(padd(pmul((0, 1), cur), pscale(prev, -1)), (-2, 1))
        return cur
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    if n == 0:
        return (0,)
    c = [0] * (n + 1)
    for r in range(n // 2 + 1):
        c[n - 2 * r] += (-1) ** r * comb(n - r, r)
    for r in range((n - 1) // 2 + 1):
        e = n - 2 * r - 1
        if e >= 1:
            c[e] += (-1) ** r * comb(n - r - 1, r)
    c[0] = -2 if n % 4 in (2, 3) else 0
    return _trim(c)


def sigma_polynomial(m: int) -> IntPoly:
    """Sigma_(2m-1)(z) = sum over r of (-1)^r C(2m-r-1, r) z^(2m-2r-1)."""
    if m < 1:
        raise ValueError("m >= 1 required")
    deg = 2 * m - 1
    c = [0] * (deg + 1)
    for r in range(m):
        c[deg - 2 * r] += (-1) ** r * comb(deg - r, r)
    return _trim(c)


def chebyshev_sum(exponents, variable_power: int) -> IntPoly:
    """Express sum of (q^(k*p) + q^(-k*p)) over k in ``exponents`` as a polynomial in
    ``w = q^p + q^-p`` using V_0 = 2, V_1 = w, V_(k+1) = w V_k - V_(k-1).

    Independent of the closed forms; used as a cross-check.
    """
    V = [(2,), (0, 1)]
    top = max(exponents, default=0)
    while len(V) <= top:
        V.append(padd(pmul((0, 1), V[-1]), pscale(V[-2], -1)))
    out = (0,)
    for k in exponents:
        out = padd(out, V[k])
    return out


@dataclass(frozen=True)
class TriangularityProblem:
    spec: AlgebraSpec
    raw: LaurentPoly          # T - 2 as a Laurent polynomial in s
    reduced: IntPoly          # S_n(Y) or Sigma_(2m-1)(z), ascending coefficients
    variable: str             # "Y" = q^2 + q^-2 or "z" = q + q^-1
    target: int

    @property
    def equation(self) -> IntPoly:
        return padd(self.reduced, (-self.target,))

    def variable_poly(self) -> LaurentPoly:
        return LaurentPoly.q(2) + LaurentPoly.q(-2) if self.variable == "Y" else LaurentPoly.q(1) + LaurentPoly.q(-1)

    def back_substitute(self) -> LaurentPoly:
        w = self.variable_poly()
        acc = LaurentPoly()
        for c in reversed(self.equation):
            acc = acc * w + c
        return acc


def build_problem(spec: AlgebraSpec) -> TriangularityProblem:
    raw = spec.T - 2
    N = spec.N
    if spec.family is Family.OHAT and N % 2 == 0:
        return TriangularityProblem(spec, raw, sn_polynomial((N - 2) // 2), "Y", 0)
    if spec.family is Family.OHAT:
        return TriangularityProblem(spec, raw, sigma_polynomial((N - 1) // 2), "z", 1)
    return TriangularityProblem(spec, raw, sn_polynomial(N // 2), "Y", 2)


# root finding

def aberth(coeffs, tol: float = 1e-14, max_iter: int = 500) -> np.ndarray:
    """All roots of a polynomial (ascending coefficients) by Aberth-Ehrlich iteration."""
    a = np.array(coeffs, dtype=complex)
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    deg = len(a) - 1
    if deg < 1:
        return np.array([], dtype=complex)
    p = a[::-1] / a[-1]
    dp = np.polyder(p)
    radius = 1 + np.max(np.abs(p[1:]))
    z = radius * 0.5 * np.exp(1j * (2 * np.pi * np.arange(deg) / deg + 0.4))
    for _ in range(max_iter):
        pv = np.polyval(p, z)
        dv = np.polyval(dp, z)
        ratio = np.where(dv != 0, pv / np.where(dv != 0, dv, 1), pv)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1)
        inv = 1 / diff
        np.fill_diagonal(inv, 0)
        s = inv.sum(axis=1)
        step = ratio / (1 - ratio * s)
        z = z - step
        if np.max(np.abs(step)) <= tol * max(1.0, np.max(np.abs(z))):
            return z
    # double roots converge linearly; accept if the residual is small
    if np.max(np.abs(np.polyval(p, z))) < 1e-10 * max(1.0, np.max(np.abs(p))):
        return z
    raise NonConvergence(f"Aberth iteration did not converge in {max_iter} steps")


def companion_roots(coeffs) -> np.ndarray:
    a = np.array(_trim(coeffs), dtype=complex)
    deg = len(a) - 1
    if deg < 1:
        return np.array([], dtype=complex)
    C = np.zeros((deg, deg), dtype=complex)
    C[1:, :-1] = np.eye(deg - 1)
    C[:, -1] = -a[:-1] / a[-1]
    return np.linalg.eigvals(C)


def _match_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Greedy matching distance between two root sets of equal size."""
    b = list(b)
    worst = 0.0
    for x in a:
        k = int(np.argmin([abs(x - y) for y in b]))
        worst = max(worst, abs(x - b.pop(k)))
    return worst


def _newton(coeffs, x: complex, steps: int = 8) -> complex:
    d = pderiv(coeffs)
    for _ in range(steps):
        fx = peval(coeffs, x)
        dx = peval(d, x)
        if dx == 0 or fx == 0:
            break
        nx = x - fx / dx
        if abs(peval(coeffs, nx)) >= abs(fx):
            break
        x = nx
    return x


@dataclass(frozen=True)
class RootClass:
    value: complex            # q
    kind: str                 # "root_of_unity" | "unit_modulus" | "off_circle"
    order: int | None
    residual: float           # |T(q) - 2|
    reduced_root: complex     # root in Y or z
    branch: str

    def describe(self) -> str:
        if self.kind == "root_of_unity":
            return f"q^{self.order}=1"
        return self.kind


def classify(q: complex, bound: int = 1024, tol: float = 1e-8) -> tuple[str, int | None]:
    if abs(abs(q) - 1) < tol:
        p = 1 + 0j
        for k in range(1, bound + 1):
            p *= q
            if abs(p - 1) < tol:
                return "root_of_unity", k
        return "unit_modulus", None
    return "off_circle", None


def _lift(variable: str, w: complex) -> list[tuple[str, complex]]:
    if variable == "z":
        r = cmath.sqrt(w * w - 4)
        return [("+", (w + r) / 2), ("-", (w - r) / 2)]
    r = cmath.sqrt(w * w - 4)
    out = []
    for sp, p in (("+", (w + r) / 2), ("-", (w - r) / 2)):
        sq = cmath.sqrt(p)
        out.append((sp + "+", sq))
        out.append((sp + "-", -sq))
    return out


def laurent_in_q(raw: LaurentPoly) -> dict[int, int]:
    """Rewrite a polynomial with only even s-exponents as a dict of q-exponents."""
    out = {}
    for e, v in raw.coeffs.items():
        if e % 2:
            raise ValueError("odd power of s cannot be written in q")
        out[e // 2] = v
    return out


def _raw_value(qpoly: dict, q: complex) -> complex:
    return sum(complex(v) * q ** e for e, v in qpoly.items())


def _polish_q(qpoly: dict, q: complex, steps: int = 6) -> complex:
    for _ in range(steps):
        f = _raw_value(qpoly, q)
        df = sum(complex(v) * e * q ** (e - 1) for e, v in qpoly.items())
        if f == 0 or df == 0:
            break
        nq = q - f / df
        if abs(_raw_value(qpoly, nq)) >= abs(f):
            break
        q = nq
    return q


def solve_roots(problem: TriangularityProblem, bound: int = 1024, tol: float = 1e-8,
                cross_check_tol: float = 1e-6) -> list[RootClass]:
    eq = problem.equation
    found = aberth(eq)
    ref = companion_roots(eq)
    if _match_distance(found, ref) > cross_check_tol * max(1.0, float(np.max(np.abs(ref)))):
        raise NonConvergence("Aberth roots disagree with companion-matrix eigenvalues")
    qpoly = laurent_in_q(problem.raw)
    out = []
    for w in found:
        w = _newton(eq, complex(w))
        for label, q in _lift(problem.variable, w):
            q = _polish_q(qpoly, q)
            kind, order = classify(q, bound, tol)
            out.append(RootClass(q, kind, order, abs(_raw_value(qpoly, q)), w, label))
    return out


def root_orders(roots: list[RootClass]) -> set[int]:
    return {r.order for r in roots if r.order is not None}


@dataclass(frozen=True)
class TriangularVerification:
    square_residual: float
    braid_residual: float | None     # None when the braid check was skipped

    def passed(self, tol: float = 1e-9) -> bool:
        return self.square_residual < tol and (self.braid_residual is None or self.braid_residual < tol)


def verify_triangular(spec: AlgebraSpec, q0, braid: bool = True) -> TriangularVerification:
    """Build R = I - P0' (lambda = -1) at ``q0`` and measure ||R^2 - I|| and the braid residual.

    The braid check works with N^3 x N^3 matrices; pass ``braid=False`` for large N.
    """
    P = p0prime_numeric(spec, q0)
    n = spec.N ** 2
    R = np.eye(n, dtype=complex) - P
    sq = float(np.abs(R @ R - np.eye(n)).max())
    br = check_braid_equation(R).residual if braid else None
    return TriangularVerification(sq, br)
