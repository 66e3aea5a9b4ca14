"""Noncommutative coordinates x_i with P0'(x (x) x) = 0, differentials, frames and towers.

Coordinates at level n are N matrices of equal size.  The transfer map sends
x_i to sum_k t[i, k] (x) x_k with t = P R (blocks of L^+ in swapped spaces).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .braidgen import AlgebraSpec, braid_matrix, eta_at, make_spec, p0prime_numeric, permutation_P, s_of
from .errors import Degenerate, DimensionMismatch, NegativeParameter, RelationViolated
from .matrix import ExactMatrix, is_exact, kron, lift, residual, split_blocks
from .report import Check
from .scalar import LaurentPoly, lambda_numeric_roots


@dataclass(frozen=True)
class CoordSet:
    level: int
    coords: tuple

    @property
    def dim(self) -> int:
        return self.coords[0].shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.coords[0])

    def __getitem__(self, i):
        return self.coords[i]

    def __len__(self):
        return len(self.coords)


def _scalar_coords(values) -> tuple:
    return tuple(np.array([[complex(v)]]) for v in values)


def _weights(spec: AlgebraSpec, q0=None) -> list:
    """eps_j q^(-rho_j); exact when q0 is None."""
    w = [spec.weight(j) for j in range(spec.N)]
    if q0 is None:
        return w
    s0 = s_of(q0)
    return [p.evaluate(s0) for p in w]


def base_cone_solution(a: float, b: float, sign: int = 1, q0: float = 1.0,
                       spec: AlgebraSpec | None = None, mirror: bool = False) -> CoordSet:
    """Commuting scalars on the relation surface.

    x_1 = a, x_N = -b (or the mirror -a, b) and the innermost pair set to
    +/- sqrt(W_out a b / W_in), where W are the summed weights of each pair.
    For ohat(3) this is (a, +/- sqrt((q^(1/2) + q^(-1/2)) a b), -b).
    """
    if a < 0 or b < 0:
        raise NegativeParameter("a and b must be non-negative")
    q0 = float(q0)
    if q0 <= 0:
        raise NegativeParameter("q0 must be a positive real")
    spec = spec or make_spec("ohat", 3)
    N = spec.N
    w = [complex(v).real for v in _weights(spec, q0)]
    x = [0.0] * N
    x[0], x[-1] = (-a, b) if mirror else (a, -b)
    w_out = w[0] + w[-1]
    lo = (N - 1) // 2
    hi = N - 1 - lo
    w_in = w[lo] if lo == hi else w[lo] + w[hi]
    if abs(w_in) < 1e-14:
        # both pair weights vanish (phat at q = 1): every commuting point qualifies
        ratio = a * b
    else:
        ratio = w_out * a * b / w_in
    mid = sign * math.sqrt(max(ratio, 0.0))
    x[lo] = mid
    x[hi] = mid
    return CoordSet(0, _scalar_coords(x))


def exact_base_solution(spec: AlgebraSpec | None = None) -> CoordSet:
    """An exact ohat(3) base point: (1, s + 1/s, -(s + 1/s)), since (s + 1/s)^2 = (s + 1/s) * 1 * (s + 1/s)."""
    spec = spec or make_spec("ohat", 3)
    if spec.N != 3 or spec.family.value != "ohat":
        raise ValueError("the exact base point is provided for ohat(3)")
    z = LaurentPoly.s(1) + LaurentPoly.s(-1)
    vals = [LaurentPoly.const(1), z, -z]
    return CoordSet(0, tuple(ExactMatrix((1, 1), {(0, 0): v}) for v in vals))


def coordinate_relation(spec: AlgebraSpec, c: CoordSet, q0=None):
    """The single quadratic relation sum_j eps_j q^(-rho_j) x_j x_j'."""
    w = _weights(spec, None if c.exact else q0)
    out = None
    for j in range(spec.N):
        t = c[j] @ c[spec.prime(j)]
        t = t.scale(w[j]) if c.exact else w[j] * t
        out = t if out is None else out + t
    return out


def row_residuals(spec: AlgebraSpec, c: CoordSet, q0) -> list[float]:
    """Residual of every row of P0'(x (x) x) = 0, each row built from P0' directly."""
    P = p0prime_numeric(spec, q0)
    N = spec.N
    out = []
    for r in range(N * N):
        acc = np.zeros((c.dim, c.dim), dtype=complex)
        for col in range(N * N):
            if P[r, col] != 0:
                k, l = divmod(col, N)
                acc += P[r, col] * (np.asarray(c[k]) @ np.asarray(c[l]))
        out.append(float(np.abs(acc).max()))
    return out


def check_coordinate_relation(spec: AlgebraSpec, c: CoordSet, q0=None, tol: float = 1e-8) -> Check:
    if len(c) != spec.N:
        raise DimensionMismatch(f"expected {spec.N} coordinates, got {len(c)}")
    if any(x.shape != c[0].shape or x.shape[0] != x.shape[1] for x in c.coords):
        raise DimensionMismatch("coordinates must be square matrices of equal size")
    rel = coordinate_relation(spec, c, q0)
    if c.exact:
        return Check(f"coordinate relation (level {c.level})", residual(rel), 0.0, True)
    scale = max(1.0, max(float(np.abs(x).max()) for x in c.coords) ** 2)
    return Check(f"coordinate relation (level {c.level})", residual(rel) / scale, tol)


def transfer_blocks(spec: AlgebraSpec, q0=None, lambda_choice: int = 1, t_sign: int = 1):
    """Blocks t[i][k] of P R^(t_sign) with lambda = lambda_(lambda_choice).

    With ``q0=None`` the blocks are exact over the extension ring.
    """
    N = spec.N
    if q0 is None:
        sign = lambda_choice * t_sign
        M = lift(permutation_P(N), spec.T) @ braid_matrix(spec, sign).entries
        return split_blocks(M, N)
    P = p0prime_numeric(spec, q0)
    roots = lambda_numeric_roots(np.trace(P))
    if roots.degenerate:
        raise Degenerate("T^2 = 4: lambda_+ = lambda_-")
    lam = roots.plus if lambda_choice == 1 else roots.minus
    if t_sign == -1:
        lam = 1 / lam
    M = permutation_P(N, exact=False) @ (np.eye(N * N) + lam * P)
    return split_blocks(M, N)


def tower_step(spec: AlgebraSpec, c: CoordSet, q0=None, lambda_choice: int = 1, t_sign: int = 1,
               check_input: bool = True, tol: float = 1e-8) -> CoordSet:
    """x_i -> sum_k t[i, k] (x) x_k."""
    if check_input:
        chk = check_coordinate_relation(spec, c, q0, tol)
        if not chk.passed:
            raise RelationViolated(f"input violates the coordinate relation: {chk.residual:.3e}")
    t = transfer_blocks(spec, None if c.exact else q0, lambda_choice, t_sign)
    out = []
    for i in range(spec.N):
        acc = None
        for k in range(spec.N):
            term = kron(t[i][k], c[k])
            acc = term if acc is None else acc + term
        out.append(acc)
    return CoordSet(c.level + 1, tuple(out))


def tower(spec: AlgebraSpec, base: CoordSet, levels: int, q0=None, lambda_choice: int = 1,
          t_sign: int = 1) -> list[CoordSet]:
    out = [base]
    for _ in range(levels):
        out.append(tower_step(spec, out[-1], q0, lambda_choice, t_sign))
    return out


def block_support(x: np.ndarray, N: int, tol: float = 1e-12) -> np.ndarray:
    """Boolean N x N grid: which blocks of ``x`` are nonzero."""
    grid = split_blocks(np.asarray(x), N)
    return np.array([[float(np.abs(b).max()) > tol for b in row] for row in grid])


def is_cross_shaped(support: np.ndarray) -> bool:
    """True when all nonzero blocks lie in a single row plus a single column."""
    n = support.shape[0]
    for r in range(n):
        for c in range(n):
            mask = np.zeros_like(support)
            mask[r, :] = True
            mask[:, c] = True
            if not np.any(support & ~mask):
                return True
    return False


# relation tables

@dataclass(frozen=True)
class RelationTable:
    """Rewriting rules ``A_i B_j = sum_(k,l) coeffs[i, j, k, l] C_k D_l``.

    ``sections`` maps a name to (lhs symbols, rhs symbols, coefficient tensor).
    """

    N: int
    q0: complex
    exp_eta: complex
    sections: dict

    def tensor(self, name: str) -> np.ndarray:
        return self.sections[name][2]

    def lines(self, name: str, tol: float = 1e-12) -> list[str]:
        (a, b), (c, d), C = self.sections[name]
        out = []
        for i in range(self.N):
            for j in range(self.N):
                terms = []
                for k in range(self.N):
                    for l in range(self.N):
                        v = C[i, j, k, l]
                        if abs(v) > tol:
                            terms.append(f"({_fmt(v)}) {c}{k + 1} {d}{l + 1}")
                out.append(f"{a}{i + 1} {b}{j + 1} = " + (" + ".join(terms) if terms else "0"))
        return out


def _fmt(v: complex) -> str:
    v = complex(v)
    if abs(v.imag) < 1e-14:
        return f"{v.real:.10g}"
    return f"{v.real:.10g}{v.imag:+.10g}j"


def _to_tensor(M: np.ndarray, N: int) -> np.ndarray:
    """Reshape an N^2 x N^2 matrix into [i, j, k, l] with rows (i, j) and columns (k, l)."""
    return np.asarray(M).reshape(N, N, N, N)


def xi_relation_table(spec: AlgebraSpec, q0, prescription: int = 1, allow_complex: bool = False) -> RelationTable:
    """x-xi and xi-xi relations from R.

    Prescription 1 (the one tested in depth): (R - I) x x = 0, x xi = e^(2 eta) R xi x,
    (R + e^(-2 eta)) xi xi = 0.  Prescription 2 interchanges the quadratic
    conditions and uses x xi = -R xi x.

    Sections:
      ``x_xi``:  x_i xi_j = sum coeffs[i,j,k,l] xi_k x_l
      ``xi_xi``: xi_i xi_j = sum coeffs[i,j,k,l] xi_k xi_l (prescription 1: P0'/T, a projection)
      ``x_x``:   x_i x_j = sum coeffs[i,j,k,l] x_k x_l (prescription 2)
    """
    eta = eta_at(spec, q0, allow_complex)
    e = complex(np.exp(eta))
    N = spec.N
    P = p0prime_numeric(spec, q0)
    T = np.trace(P)
    R = np.eye(N * N) - P / e
    if prescription == 1:
        sections = {
            "x_xi": (("x", "xi"), ("xi", "x"), _to_tensor(e * e * R, N)),
            "xi_xi": (("xi", "xi"), ("xi", "xi"), _to_tensor(P / T, N)),
        }
    elif prescription == 2:
        sections = {
            "x_xi": (("x", "xi"), ("xi", "x"), _to_tensor(-R, N)),
            "x_x": (("x", "x"), ("x", "x"), _to_tensor(P / T, N)),
        }
    else:
        raise ValueError("prescription must be 1 or 2")
    return RelationTable(N, complex(q0), e, sections)


def frame_commutators(spec: AlgebraSpec, q0, allow_complex: bool = False) -> RelationTable:
    """x_i theta_j = e^(-2 eta) sum_(k,l) theta_k L^-_(kj,il) x_l with L^- = R^-1 P."""
    eta = eta_at(spec, q0, allow_complex)
    e = complex(np.exp(eta))
    N = spec.N
    P0 = p0prime_numeric(spec, q0)
    Lm = (np.eye(N * N) - e * P0) @ permutation_P(N, exact=False)
    L4 = _to_tensor(Lm, N)              # L4[k, i, j, l] = element at row (k, i), column (j, l)
    C = np.zeros((N, N, N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            C[i, j] = L4[:, i, j, :] / (e * e)
    return RelationTable(N, complex(q0), e, {"x_theta": (("x", "theta"), ("theta", "x"), C)})


def o3_reference_frame_table(q0, exp_eta: complex) -> np.ndarray:
    """The ohat(3) frame commutators as a hand-written tensor, 0-based indices.

    Off-diagonal lines: x_i theta_j = -e^(-eta) q^(...) theta_k x_l.
    Diagonal lines: x_i theta_i = e^(-2 eta) tau - e^(-eta) theta_i' x_i',
    with tau = sum_k theta_k x_k.
    """
    s = complex(np.sqrt(complex(q0)))
    e = exp_eta
    C = np.zeros((3, 3, 3, 3), dtype=complex)
    off = {
        (0, 1): (2, 1, s), (0, 2): (2, 0, 1),
        (1, 0): (1, 2, s), (1, 2): (1, 0, 1 / s),
        (2, 0): (0, 2, 1), (2, 1): (0, 1, 1 / s),
    }
    for (i, j), (k, l, c) in off.items():
        C[i, j, k, l] = -c / e
    for i in range(3):
        for k in range(3):
            C[i, i, k, k] += 1 / (e * e)
        C[i, i, 2 - i, 2 - i] += -1 / e
    return C


def frame_line_mismatches(generated: np.ndarray, reference: np.ndarray, tol: float = 1e-9) -> list[tuple[int, int, float]]:
    """Lines (i, j) whose coefficient tensors differ by more than ``tol``."""
    N = generated.shape[0]
    out = []
    for i in range(N):
        for j in range(N):
            d = float(np.abs(generated[i, j] - reference[i, j]).max())
            if d > tol:
                out.append((i, j, d))
    return out


def frame_resubstitution_residual(spec: AlgebraSpec, q0) -> float:
    """Check theta = sum_b theta_b xi_b commutes with each x_i.

    x_i theta = sum_b (x_i theta_b) xi_b is rewritten with the frame table into
    theta_k x_l xi_b, then with the x-xi table into theta_k xi_m x_n.  The
    result must equal theta x_i = sum_k theta_k xi_k x_i.
    """
    C = frame_commutators(spec, q0).tensor("x_theta")
    D = xi_relation_table(spec, q0).tensor("x_xi")
    N = spec.N
    got = np.einsum("ibkl,lbmn->ikmn", C, D)
    want = np.zeros_like(got)
    for i in range(N):
        for k in range(N):
            want[i, k, k, i] = 1
    return float(np.abs(got - want).max())


def xi_base_nullity(spec: AlgebraSpec, c: CoordSet, q0, tol: float = 1e-10) -> int:
    """Dimension of scalar xi solving the x-xi relations at a commutative base point."""
    D = xi_relation_table(spec, q0).tensor("x_xi")
    x = np.array([complex(np.asarray(v)[0, 0]) for v in c.coords])
    N = spec.N
    rows = []
    for i in range(N):
        for j in range(N):
            r = np.zeros(N, dtype=complex)
            r[j] += x[i]
            r -= np.einsum("kl,l->k", D[i, j], x)
            rows.append(r)
    sv = np.linalg.svd(np.array(rows), compute_uv=False)
    return int(np.sum(sv <= tol * max(1.0, sv[0])))


# SO_q(3) comparison tower

def soq3_relations(c: CoordSet, q0) -> tuple[float, float, float]:
    """Residuals of x1 x2 = q x2 x1, x3 x2 = q^-1 x2 x3, x1 x3 - x3 x1 = (q^(1/2) - q^(-1/2)) x2^2."""
    q = complex(q0)
    s = complex(np.sqrt(q))
    x1, x2, x3 = (np.asarray(v) for v in c.coords)
    return (
        float(np.abs(x1 @ x2 - q * x2 @ x1).max()),
        float(np.abs(x3 @ x2 - x2 @ x3 / q).max()),
        float(np.abs(x1 @ x3 - x3 @ x1 - (s - 1 / s) * x2 @ x2).max()),
    )


def soq3_relations_reversed(c: CoordSet, q0) -> float:
    """Third relation with the commutator written x3 x1 - x1 x3."""
    q = complex(q0)
    s = complex(np.sqrt(q))
    x1, x2, x3 = (np.asarray(v) for v in c.coords)
    return float(np.abs(x3 @ x1 - x1 @ x3 - (s - 1 / s) * x2 @ x2).max())


def soq3_base(x1: float, x3: float) -> CoordSet:
    return CoordSet(0, _scalar_coords([x1, 0.0, x3]))


def soq3_tower_step(c: CoordSet, q0, check_input: bool = True, tol: float = 1e-9) -> CoordSet:
    if check_input:
        scale = max(1.0, max(float(np.abs(v).max()) for v in c.coords) ** 2)
        worst = max(soq3_relations(c, q0)) / scale
        if worst > tol:
            raise RelationViolated(f"input violates the SO_q(3) relations: {worst:.3e}")
    q = complex(q0)
    s = complex(np.sqrt(q))
    k = q - 1 / q
    x1, x2, x3 = (np.asarray(v) for v in c.coords)

    def E(i, j):
        m = np.zeros((3, 3), dtype=complex)
        m[i, j] = 1
        return m

    n1 = np.kron(np.diag([q, 1, 1 / q]), x1)
    n2 = np.kron(np.eye(3), x2) + k * np.kron(E(0, 1), x1) + k / s * np.kron(E(1, 2), x1)
    n3 = (np.kron(np.diag([1 / q, 1, q]), x3) + k / s * np.kron(E(0, 1), x2)
          + k * (1 - 1 / q) * np.kron(E(0, 2), x1) + k * np.kron(E(1, 2), x2))
    return CoordSet(c.level + 1, (n1, n2, n3))
