"""L-operators L = R^(+/-1) P, RLL checks, quadratic central elements and coproducts.

An ``LOperator`` is an N x N grid of d x d blocks, exact (ExactMatrix over
LambdaExt) or numeric (complex numpy arrays evaluated at ``q0``).  Indices are
0-based; the partner of ``i`` is ``N - 1 - i``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from .braidgen import (
    AlgebraSpec, braid_matrix, eta_at, p0prime_numeric, permutation_P, projector_p0prime, s_of,
)
from .errors import Degenerate, DimensionMismatch, PoleAtTheta, UnsupportedSpec
from .matrix import ExactMatrix, block_matrix, is_exact, kron, lift, residual, split_blocks
from .report import Check
from .scalar import ONE, ZERO, LambdaExt, LaurentPoly, lambda_numeric_roots


@dataclass(frozen=True)
class LOperator:
    N: int
    blocks: tuple
    variant: str = "plus"          # "plus" | "minus" | "spectral" | "custom"
    theta: float | None = None
    q0: complex | None = None      # set for numeric operators
    lam0: complex | None = field(default=None, compare=False)

    @property
    def d(self) -> int:
        return self.blocks[0][0].shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.blocks[0][0])

    def __getitem__(self, ij):
        i, j = ij
        return self.blocks[i][j]

    def full(self):
        return block_matrix([list(r) for r in self.blocks])

    def numeric(self, q0, lam0=None) -> "LOperator":
        """Evaluate an exact operator at ``q0`` with lambda -> lambda_+ unless ``lam0`` is given."""
        if not self.exact:
            return self
        s0 = s_of(q0)
        if lam0 is None:
            T = _modulus_of(self)
            lam0 = lambda_numeric_roots(T.evaluate(s0)).plus
        blocks = tuple(tuple(b.to_numpy(s0, lam0) for b in row) for row in self.blocks)
        return LOperator(self.N, blocks, self.variant, self.theta, complex(q0), lam0)

    def transposed(self) -> "LOperator":
        """Block transpose: the (i, j) block becomes the (j, i) block."""
        blocks = tuple(tuple(self.blocks[j][i] for j in range(self.N)) for i in range(self.N))
        return LOperator(self.N, blocks, self.variant, self.theta, self.q0, self.lam0)

    def map_blocks(self, fn) -> "LOperator":
        blocks = tuple(tuple(fn(b) for b in row) for row in self.blocks)
        return LOperator(self.N, blocks, self.variant, self.theta, self.q0, self.lam0)


def _modulus_of(L: LOperator) -> LaurentPoly:
    for row in L.blocks:
        for b in row:
            for _, v in b.items():
                if isinstance(v, LambdaExt) and v.T is not None:
                    return v.T
    raise ValueError("operator carries no lambda modulus")


def _from_matrix(M, N: int, variant: str, **kw) -> LOperator:
    return LOperator(N, tuple(tuple(r) for r in split_blocks(M, N)), variant, **kw)


def fundamental_L(spec: AlgebraSpec, variant: str = "plus") -> LOperator:
    """Blocks of ``R^(+/-1) P`` over the extension ring."""
    sign = {"plus": 1, "minus": -1}[variant]
    R = braid_matrix(spec, sign).entries
    M = R @ lift(permutation_P(spec.N), spec.T)
    return _from_matrix(M, spec.N, variant)


def _coef(L: LOperator, poly: LaurentPoly):
    """A Laurent coefficient in the scalar backend of ``L``."""
    return poly if L.exact else poly.evaluate(s_of(L.q0))


def _lam(L: LOperator, sign: int = 1):
    if L.exact:
        T = _modulus_of(L)
        return LambdaExt.generator(T) if sign == 1 else LambdaExt.inverse_generator(T)
    if L.lam0 is None:
        raise ValueError("numeric operator carries no lambda value")
    return L.lam0 if sign == 1 else 1 / L.lam0


def _scale(m, c):
    return m.scale(c) if is_exact(m) else c * m


def _same_shape(a: LOperator, b: LOperator):
    if a.N != b.N or a.d != b.d or a.exact != b.exact:
        raise DimensionMismatch("operators differ in N, block size or backend")


def operator_product(La: LOperator, Lb: LOperator):
    """The N^2 d x N^2 d matrix L2 L1 with L2 = La (second space) and L1 = Lb (first space).

    Its block at row (i, k), column (j, l) is ``La[k, l] @ Lb[i, j]``.
    """
    _same_shape(La, Lb)
    N = La.N
    grid = [[None] * (N * N) for _ in range(N * N)]
    for i in range(N):
        for k in range(N):
            for j in range(N):
                for l in range(N):
                    grid[i * N + k][j * N + l] = La[k, l] @ Lb[i, j]
    return block_matrix(grid)


def _p0_on(spec: AlgebraSpec, L: LOperator):
    """P0' (x) I_d in the backend of ``L``."""
    if L.exact:
        return projector_p0prime(spec).entries.kron(ExactMatrix.identity(L.d))
    return np.kron(p0prime_numeric(spec, L.q0), np.eye(L.d))


def check_RLL(spec: AlgebraSpec, Lfirst: LOperator, Lsecond: LOperator | None = None,
              coeff="auto", tol: float = 1e-9) -> Check:
    """Residual of ``R X - Y R`` with X = Lfirst_2 Lsecond_1 and Y = Lsecond_2 Lfirst_1.

    ``R = I + coeff P0'``.  With ``coeff=None`` the coefficient-free form
    ``P0' X - X P0'`` is used (same operator in both slots).  The default picks
    that form for equal operators and otherwise ``lambda_+`` when Lfirst is L^+,
    ``lambda_-`` when Lfirst is L^- (the same relation conjugated by R^-1).
    """
    if Lsecond is None:
        Lsecond = Lfirst
    _same_shape(Lfirst, Lsecond)
    if Lfirst.N != spec.N:
        raise DimensionMismatch("operator index range differs from spec")
    X = operator_product(Lfirst, Lsecond)
    Y = operator_product(Lsecond, Lfirst)
    P = _p0_on(spec, Lfirst)
    if coeff == "auto":
        if Lfirst is Lsecond or Lfirst.variant == Lsecond.variant:
            coeff = None
        else:
            coeff = _lam(Lfirst, -1 if Lfirst.variant == "minus" else 1)
    if coeff is None:
        diff = P @ X - Y @ P
        name = "RLL (P0' form)"
    else:
        Pc = _scale(P, coeff)
        diff = (X + Pc @ X) - (Y + Y @ Pc)
        name = "RLL"
    exact = Lfirst.exact
    return Check(f"{name} {Lfirst.variant}/{Lsecond.variant}", residual(diff), 0.0 if exact else tol, exact)


def S1(spec: AlgebraSpec, L: LOperator, l: int, k: int, Lp: LOperator | None = None):
    """``sum_j eps_j q^(-rho_j) L[j', l] Lp[j, k]``."""
    Lp = L if Lp is None else Lp
    out = None
    for j in range(spec.N):
        term = _scale(L[spec.prime(j), l] @ Lp[j, k], _coef(L, spec.weight(j)))
        out = term if out is None else out + term
    return out


def S2(spec: AlgebraSpec, L: LOperator, l: int, k: int, Lp: LOperator | None = None):
    """``sum_j eps_j q^(-rho_j) L[l, j'] Lp[k, j]``, i.e. S1 of the block transpose."""
    return S1(spec, L.transposed(), l, k, None if Lp is None else Lp.transposed())


def S2_direct(spec: AlgebraSpec, L: LOperator, l: int, k: int):
    out = None
    for j in range(spec.N):
        term = _scale(L[l, spec.prime(j)] @ L[k, j], _coef(L, spec.weight(j)))
        out = term if out is None else out + term
    return out


def central_members(spec: AlgebraSpec, L: LOperator) -> list:
    """The 2N quadratic elements that the RLL relations force to be equal."""
    out = []
    for i in range(spec.N):
        w = _coef(L, LaurentPoly.q(-spec.rho[i], spec.eps[spec.prime(i)]))
        out.append(_scale(S1(spec, L, i, spec.prime(i)), w))
    for j in range(spec.N):
        w = _coef(L, LaurentPoly.q(-spec.rho[j], spec.eps[spec.prime(j)]))
        out.append(_scale(S2(spec, L, j, spec.prime(j)), w))
    return out


def _scalar_multiple_of_identity(m):
    """Return c when m == c I, else None."""
    n = m.shape[0]
    if is_exact(m):
        c = m[0, 0]
        if all(m[i, i] == c for i in range(n)) and all(i == j for (i, j), _ in m.items()):
            return c
        return None
    c = m[0, 0]
    if np.abs(m - c * np.eye(n)).max() <= 1e-9 * max(1.0, abs(c)):
        return complex(c)
    return None


@dataclass(frozen=True)
class CentralReport:
    members: list
    equality_residual: float
    scalar_value: object
    centrality_residual: float
    exact: bool

    def checks(self, tol: float = 1e-9) -> list[Check]:
        t = 0.0 if self.exact else tol
        return [
            Check("S3 members equal", self.equality_residual, t, self.exact),
            Check("S3 members central", self.centrality_residual, t, self.exact),
        ]


def central_elements(L: LOperator, spec: AlgebraSpec) -> CentralReport:
    members = central_members(spec, L)
    m0 = members[0]
    eq = max(residual(m - m0) for m in members)
    cen = 0.0
    for m in members:
        for row in L.blocks:
            for b in row:
                cen = max(cen, residual(m @ b - b @ m))
    return CentralReport(members, eq, _scalar_multiple_of_identity(m0), cen, L.exact)


def annihilator_members(spec: AlgebraSpec, L: LOperator) -> list[tuple[str, int, int, object]]:
    """All S1 and S2 entries with l + k != N - 1 (0-based); these must vanish."""
    out = []
    for l in range(spec.N):
        for k in range(spec.N):
            if l + k != spec.N - 1:
                out.append(("S1", l, k, S1(spec, L, l, k)))
                out.append(("S2", l, k, S2(spec, L, l, k)))
    return out


def check_S1_S2(L: LOperator, spec: AlgebraSpec, tol: float = 1e-9) -> Check:
    res = max(residual(m) for *_, m in annihilator_members(spec, L))
    return Check("S1/S2 annihilators", res, 0.0 if L.exact else tol, L.exact)


def sum_diagonal(L: LOperator):
    out = L[0, 0]
    for i in range(1, L.N):
        out = out + L[i, i]
    return out


def coproduct(L: LOperator, depth: int = 1, cap: int = 2) -> LOperator:
    """``(Delta L)[i, j] = sum_k L[i, k] (x) L[k, j]``, iterated ``depth`` times."""
    if depth > cap:
        raise ValueError(f"coproduct depth {depth} exceeds cap {cap}")
    for _ in range(depth):
        blocks = []
        for i in range(L.N):
            row = []
            for j in range(L.N):
                acc = None
                for k in range(L.N):
                    t = kron(L[i, k], L[k, j])
                    acc = t if acc is None else acc + t
                row.append(acc)
            blocks.append(tuple(row))
        L = LOperator(L.N, tuple(blocks), L.variant, L.theta, L.q0, L.lam0)
    return L


def group_like_residual(spec: AlgebraSpec, L: LOperator) -> float:
    """max over members m of |m(Delta L) - m(L) (x) m(L)|."""
    base = central_members(spec, L)
    top = central_members(spec, coproduct(L))
    return max(residual(t - kron(b, b)) for b, t in zip(base, top))


def f_map(m: ExactMatrix) -> ExactMatrix:
    """Rotate a block by 180 degrees and substitute q -> 1/q in every entry."""
    r, c = m.shape
    e = {(r - 1 - i, c - 1 - j): v.invert_variable() for (i, j), v in m.items()}
    return ExactMatrix((r, c), e)


def f_symmetry_residual(spec: AlgebraSpec, L: LOperator) -> float:
    """max over (i, j) of |f(L[i, j]) - L[i', j']| for an exact operator."""
    worst = 0.0
    for i in range(spec.N):
        for j in range(spec.N):
            worst = max(worst, residual(f_map(L[i, j]) - L[spec.prime(i), spec.prime(j)]))
    return worst


# A + lambda B decomposition

def decompose_AB(Lplus: LOperator, Lminus: LOperator):
    """Split ``L^(+/-) = A + lambda_(+/-) B`` block by block."""
    _same_shape(Lplus, Lminus)
    N = Lplus.N
    if Lplus.exact:
        def parts(b):
            a = ExactMatrix(b.shape, {k: v.a for k, v in b.items()})
            bb = ExactMatrix(b.shape, {k: v.b for k, v in b.items()})
            return a, bb
        A = [[None] * N for _ in range(N)]
        B = [[None] * N for _ in range(N)]
        T = _modulus_of(Lplus)
        inv = LambdaExt.inverse_generator(T)
        for i in range(N):
            for j in range(N):
                A[i][j], B[i][j] = parts(Lplus[i, j])
                recon = lift(A[i][j], T) + lift(B[i][j], T).scale(inv)
                if not (recon - Lminus[i, j]).is_zero():
                    raise ValueError("L^- is not A + lambda^-1 B for the A, B of L^+")
        return A, B
    lp = Lplus.lam0
    lm = 1 / lp
    if abs(lp - lm) <= 1e-12 * max(1.0, abs(lp)):
        raise Degenerate("lambda_+ == lambda_-")
    A = [[None] * N for _ in range(N)]
    B = [[None] * N for _ in range(N)]
    for i in range(N):
        for j in range(N):
            B[i][j] = (Lplus[i, j] - Lminus[i, j]) / (lp - lm)
            A[i][j] = Lplus[i, j] - lp * B[i][j]
    return A, B


def reduced_commutation_residual(spec: AlgebraSpec, A, B) -> float:
    """max |A[k,l] B[i,j] - B[k,l] A[i,j]| over k != i', l != j'."""
    N = spec.N
    worst = 0.0
    for i in range(N):
        for j in range(N):
            for k in range(N):
                for l in range(N):
                    if k != spec.prime(i) and l != spec.prime(j):
                        worst = max(worst, residual(A[k][l] @ B[i][j] - B[k][l] @ A[i][j]))
    return worst


# mixed-sign relations

def mixed_row_relation_residual(spec: AlgebraSpec, Lp: LOperator, Lm: LOperator) -> float:
    """Rows (a, a') of the mixed RLL relation where the right-hand P0' drops out.

    For l != j': lam_+ w_a S1_(l j)(L^+, L^-) = L^-[a', l] L^+[a, j] - L^+[a', l] L^-[a, j],
    with w_a = eps_a q^(-rho_a).
    """
    lam = _lam(Lp, 1)
    worst = 0.0
    for a in range(spec.N):
        w = _coef(Lp, spec.weight(a))
        for l in range(spec.N):
            for j in range(spec.N):
                if l == spec.prime(j):
                    continue
                lhs = _scale(S1(spec, Lp, l, j, Lm), lam * w)
                rhs = Lm[spec.prime(a), l] @ Lp[a, j] - Lp[spec.prime(a), l] @ Lm[a, j]
                worst = max(worst, residual(lhs - rhs))
    return worst


def o3_mixed_instances(Lp: LOperator, Lm: LOperator) -> dict[str, float]:
    """Residuals of the illustrative mixed-sign identities for ohat(3), with L = L^+ and L' = L^-.

    Keys:
      ``central_type``: lam ((q L'31 L13 + q^(1/2) L'32 L12 + L'33 L11)
        - (q L13 L'31 + q^(1/2) L23 L'21 + L33 L'11)) = q (L33 L'11 - L'33 L11);
      ``chain_b=c``, ``chain_c=d``: equalities between the three commutator forms of
        lam (sum) for the (1,1) column;
      ``first_swapped``: the first equality with the middle term written L'21 L21;
      ``first_corrected``: the same with the middle term L21 L'21.
    """
    if Lp.N != 3:
        raise UnsupportedSpec("these instances are specific to N = 3")
    half = _coef(Lp, LaurentPoly.q(Fraction(1, 2)))
    mhalf = _coef(Lp, LaurentPoly.q(Fraction(-1, 2)))
    lam = _lam(Lp, 1)

    def L(i, j):
        return Lp[i - 1, j - 1]

    def M(i, j):
        return Lm[i - 1, j - 1]

    q = _coef(Lp, LaurentPoly.q(1))
    central_lhs = _scale(
        _scale(M(3, 1) @ L(1, 3), q) + _scale(M(3, 2) @ L(1, 2), half) + M(3, 3) @ L(1, 1)
        - _scale(L(1, 3) @ M(3, 1), q) - _scale(L(2, 3) @ M(2, 1), half) - L(3, 3) @ M(1, 1),
        lam,
    )
    central_rhs = _scale(L(3, 3) @ M(1, 1) - M(3, 3) @ L(1, 1), q)
    b = _scale(M(3, 1) @ L(1, 1) - L(3, 1) @ M(1, 1), half)
    c = M(2, 1) @ L(2, 1) - L(2, 1) @ M(2, 1)
    d = _scale(M(1, 1) @ L(3, 1) - L(1, 1) @ M(3, 1), mhalf)
    swapped = _scale(_scale(L(3, 1) @ M(1, 1), mhalf) + M(2, 1) @ L(2, 1) + _scale(L(1, 1) @ M(3, 1), half), lam)
    corrected = _scale(_scale(L(3, 1) @ M(1, 1), mhalf) + L(2, 1) @ M(2, 1) + _scale(L(1, 1) @ M(3, 1), half), lam)
    return {
        "central_type": residual(central_lhs - central_rhs),
        "chain_b=c": residual(b - c),
        "chain_c=d": residual(c - d),
        "first_swapped": residual(swapped - b),
        "first_corrected": residual(corrected - b),
    }


# spectral-parameter operator

def spectral_L(spec: AlgebraSpec, theta: float, q0) -> LOperator:
    """``(e^(eta+theta) L^+ - e^(-eta-theta) L^-) / (e^(eta+theta) - e^(-eta-theta))``."""
    eta = eta_at(spec, q0).real
    x = eta + theta
    den = 2 * math.sinh(x)
    if abs(den) < 1e-14:
        raise PoleAtTheta(f"eta + theta = 0 at theta = {theta}")
    Lp = fundamental_L(spec, "plus").numeric(q0)
    Lm = fundamental_L(spec, "minus").numeric(q0)
    ep, em = math.exp(x), math.exp(-x)
    blocks = tuple(
        tuple((ep * Lp[i, j] - em * Lm[i, j]) / den for j in range(spec.N)) for i in range(spec.N)
    )
    return LOperator(spec.N, blocks, "spectral", float(theta), complex(q0), Lp.lam0)


def spectral_rll_residual(spec: AlgebraSpec, theta: float, theta_p: float, q0) -> float:
    """|R(t - t') L2(t) L1(t') - L2(t') L1(t) R(t - t')| with R the Baxterized matrix."""
    from .braidgen import baxterized

    La = spectral_L(spec, theta, q0)
    Lb = spectral_L(spec, theta_p, q0)
    R = np.kron(baxterized(spec, theta - theta_p, q0).entries, np.eye(spec.N))
    X = operator_product(La, Lb)
    Y = operator_product(Lb, La)
    return residual(R @ X - Y @ R)


# ohat(3) coproduct conjugation

_BLOCKS = ((0, 2), (2, 4), (4, 7), (7, 9))


def o3_conjugator(q0: float) -> np.ndarray:
    """The 9 x 9 orthogonal matrix that diagonalizes sum_i Delta L_ii for ohat(3)."""
    s = math.sqrt(q0)
    z = s + 1 / s
    k = (q0 + 4 + 1 / q0) ** -0.5
    r2 = math.sqrt(2)
    rows = np.zeros((9, 9))
    rows[0, [1, 3]] = [1, 1]
    rows[1, [1, 3]] = [1, -1]
    rows[2, [5, 7]] = [1, -1]
    rows[3, [5, 7]] = [1, 1]
    rows[4, [2, 6]] = [1, -1]
    rows[5, [2, 4, 6]] = [z * k, 2 * k, z * k]
    rows[6, [2, 4, 6]] = [r2 * k, -r2 * z * k, r2 * k]
    rows[7, 0] = r2
    rows[8, 8] = r2
    return rows / r2


def o3_reference_blocks(q0: float, lam: complex) -> dict[tuple[str, int], np.ndarray]:
    """Expected diagonal blocks (alpha, beta, gamma, delta) of the conjugated Delta L_ii."""
    q = q0
    s = math.sqrt(q)
    mu, z = s - 1 / s, s + 1 / s
    k = (q + 4 + 1 / q) ** -0.5
    r2 = math.sqrt(2)
    l2 = lam * lam
    out = {
        ("alpha", 1): 0.5 * np.array([[1, 1], [-1, -1]]),
        ("alpha", 2): 0.5 * np.array([[l2 + 1, l2 - 1], [-l2 + 1, -l2 - 1]]),
        ("alpha", 3): l2 / 2 * np.array([[1, -1], [1, -1]]),
        ("beta", 1): l2 / 2 * np.array([[-1, -1], [1, 1]]),
        ("beta", 2): 0.5 * np.array([[-l2 - 1, l2 - 1], [-l2 + 1, l2 + 1]]),
        ("beta", 3): 0.5 * np.array([[-1, 1], [-1, 1]]),
        ("delta", 1): np.diag([1, l2]),
        ("delta", 2): np.zeros((2, 2)),
        ("delta", 3): np.diag([l2, 1]),
        ("gamma", 1): lam / 2 * np.array([
            [3, mu * k, r2 * (2 + 1 / q) * k],
            [mu * k, 3 * z * z * k * k, r2 * (2 + 1 / q) * mu * k * k],
            [-r2 * (2 + q) * k, -r2 * (2 + q) * mu * k * k, -2 * (z * z - 1) * k * k],
        ]),
        ("gamma", 3): lam / 2 * np.array([
            [3, mu * k, -r2 * (2 + q) * k],
            [mu * k, 3 * (1 - 2 * k * k), -r2 * (2 + q) * mu * k * k],
            [r2 * (2 + 1 / q) * k, r2 * (2 + 1 / q) * mu * k * k, -2 * (1 - 3 * k * k)],
        ]),
        ("gamma", 2): lam / 2 * np.array([
            [0, -2 * mu * k, r2 * mu * z * k],
            [-2 * mu * k, 12 * k * k, r2 * mu * mu * z * k * k],
            [r2 * mu * z * k, r2 * mu * mu * z * k * k, -2 * (z * z - 1) * z * z * k * k],
        ]),
    }
    return {key: np.asarray(v, dtype=complex) for key, v in out.items()}


def _block_mask() -> np.ndarray:
    mask = np.zeros((9, 9), dtype=bool)
    for a, b in _BLOCKS:
        mask[a:b, a:b] = True
    return mask


@dataclass(frozen=True)
class ConjugationReport:
    q0: float
    lam: complex
    orthogonality: float
    sum_diagonal: float
    off_block: float                      # largest entry outside the blocks of N dL_ii N^T
    block_mismatch: dict                  # (name, i) -> residual against the reference blocks
    nilpotency: dict                      # (name, i) -> |X^2|
    offdiag_inside_blocks: float          # largest entry inside the blocks for N dL_ij N^T, i != j
    offdiag_outside_nonempty: bool

    def checks(self, tol: float = 1e-9) -> list[Check]:
        out = [
            Check("conjugator orthogonal", self.orthogonality, 1e-10),
            Check("sum of Delta L_ii diagonalized", self.sum_diagonal, tol),
            Check("Delta L_ii block diagonal", self.off_block, tol),
        ]
        out += [Check(f"{n}_{i} matches reference", r, tol) for (n, i), r in sorted(self.block_mismatch.items())]
        out += [Check(f"{n}_{i}^2 = 0", r, tol) for (n, i), r in sorted(self.nilpotency.items())]
        out.append(Check("Delta L_ij (i != j) vanish inside the blocks", self.offdiag_inside_blocks, tol))
        return out


def conjugate_sumLii(spec: AlgebraSpec, q0: float, lam: complex | None = None) -> ConjugationReport:
    if spec.N != 3 or spec.family.value != "ohat":
        raise UnsupportedSpec("the conjugator is defined for ohat(3) only")
    q0 = float(np.real(q0))
    L = fundamental_L(spec, "plus").numeric(q0, lam)
    lam = L.lam0
    D = coproduct(L)
    C = o3_conjugator(q0)
    y = q0 + 1 + 1 / q0
    orth = float(np.abs(C @ C.T - np.eye(9)).max())
    total = C @ sum_diagonal(D) @ C.T
    target = lam * np.diag([-y, y, y, -y, 3, 3, -y, -y, -y])
    mask = _block_mask()
    ref = o3_reference_blocks(q0, lam)
    off, mismatch, nil = 0.0, {}, {}
    for i in range(3):
        Ci = C @ D[i, i] @ C.T
        off = max(off, float(np.abs(Ci[~mask]).max()))
        for name, (a, b) in zip(("alpha", "beta", "gamma", "delta"), _BLOCKS):
            blk = Ci[a:b, a:b]
            mismatch[(name, i + 1)] = float(np.abs(blk - ref[(name, i + 1)]).max())
            if name in ("alpha", "beta") and i != 1:
                nil[(name, i + 1)] = float(np.abs(blk @ blk).max())
    inside, outside = 0.0, False
    for i in range(3):
        for j in range(3):
            if i != j:
                Cij = C @ D[i, j] @ C.T
                inside = max(inside, float(np.abs(Cij[mask]).max()))
                outside = outside or bool(np.abs(Cij[~mask]).max() > 1e-12)
    return ConjugationReport(q0, lam, orth, float(np.abs(total - target).max()), off, mismatch, nil,
                             inside, outside)
