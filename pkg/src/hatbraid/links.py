"""Enhanced Yang-Baxter operator (R, f, a, b) and link invariants of braid closures.

Generator exponent +1 is represented by R = I + lam_+ P0', exponent -1 by R^-1.
The invariant of a braid word on m strands is

    P(beta) = a^(-writhe) tr(rho(beta) f^(x)m),   a = e^eta.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .braidgen import AlgebraSpec, braid_matrix, eta_at, p0prime_numeric, projector_p0prime, s_of
from .errors import CapExceeded, InvalidDimension, WordsNotSkeinTriple
from .matrix import ExactMatrix, lift
from .report import Check
from .scalar import ONE, ZERO, LambdaExt, LaurentPoly, lambda_numeric_roots

DEFAULT_CAP = 4096


@dataclass(frozen=True)
class EnhancedOperator:
    spec: AlgebraSpec
    f: tuple                    # diagonal of f as LaurentPoly entries
    a: LambdaExt                # e^eta = -lambda_- = T + lam
    b: int = 1

    @property
    def N(self) -> int:
        return self.spec.N

    def f_matrix(self) -> ExactMatrix:
        return ExactMatrix((self.N, self.N), {(i, i): v for i, v in enumerate(self.f)})

    def f_numeric(self, q0) -> np.ndarray:
        s0 = s_of(q0)
        return np.array([v.evaluate(s0) for v in self.f])

    def a_numeric(self, q0) -> complex:
        return lambda_numeric_roots(self.spec.T_at(q0)).exp_eta


def enhancement(spec: AlgebraSpec) -> EnhancedOperator:
    """f = diag(q^(-2 rho_i)), the diagonal entries of P0' at rows (i, i')."""
    f = tuple(LaurentPoly.q(-2 * r) for r in spec.rho)
    T = spec.T
    a = LambdaExt(T, ONE, T)
    return EnhancedOperator(spec, f, a)


def partial_trace2(M, N: int):
    """Trace over the second tensor factor of an N^2 x N^2 matrix."""
    if isinstance(M, ExactMatrix):
        e = {}
        for (r, c), v in M.items():
            i, k = divmod(r, N)
            j, l = divmod(c, N)
            if k == l:
                e[(i, j)] = e[(i, j)] + v if (i, j) in e else v
        return ExactMatrix((N, N), e)
    M = np.asarray(M).reshape(N, N, N, N)
    return np.einsum("ikjk->ij", M)


def check_eyb(E: EnhancedOperator) -> list[Check]:
    """Commutation with f (x) f and the partial-trace conditions, exactly over the ring."""
    spec = E.spec
    T = spec.T
    f = E.f_matrix()
    ff = lift(f.kron(f), T)
    P = projector_p0prime(spec).entries
    out = [
        Check("P0'(f x f) = (f x f)P0'", (P @ f.kron(f) - f.kron(f) @ P).height(), 0.0, True),
        Check("tr2(P0' f x f) = f", (partial_trace2(P @ f.kron(f), spec.N) - f).height(), 0.0, True),
    ]
    a_inv = LambdaExt(ZERO, LaurentPoly.const(-1), T)  # e^-eta = -lam
    for sign, av in ((1, E.a), (-1, a_inv)):
        R = braid_matrix(spec, sign).entries
        comm = R @ ff - ff @ R
        tr = partial_trace2(R @ ff, spec.N) - lift(f, T).scale(av * E.b)
        label = "R" if sign == 1 else "R^-1"
        out.append(Check(f"{label}(f x f) = (f x f){label}", comm.height(), 0.0, True))
        out.append(Check(f"tr2({label} f x f) = a^{sign:+d} b f", tr.height(), 0.0, True))
    return out


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if self.strands < 1:
            raise InvalidDimension("a braid needs at least one strand")
        for g in self.letters:
            if g == 0 or abs(g) > self.strands - 1:
                raise InvalidDimension(f"generator {g} out of range for {self.strands} strands")

    @classmethod
    def parse(cls, text: str, strands: int) -> "BraidWord":
        tokens = [t for t in re.split(r"[\s,]+", text.strip()) if t]
        return cls(strands, tuple(int(t) for t in tokens))

    @property
    def writhe(self) -> int:
        return sum(1 if g > 0 else -1 for g in self.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-g for g in reversed(self.letters)))

    def __add__(self, other: "BraidWord") -> "BraidWord":
        return BraidWord(max(self.strands, other.strands), self.letters + other.letters)

    def on(self, strands: int) -> "BraidWord":
        return BraidWord(strands, self.letters)

    def __str__(self):
        return " ".join(f"{g:+d}" for g in self.letters)


def _apply_letter(state: np.ndarray, R: np.ndarray, i: int, N: int, m: int) -> np.ndarray:
    """Left-multiply ``state`` (N^m x K) by I^(i-1) (x) R (x) I^(m-i-1)."""
    left, right = N ** (i - 1), N ** (m - i - 1)
    K = state.shape[1]
    v = state.reshape(left, N * N, right, K)
    v = np.einsum("ab,lbrk->lark", R, v)
    return v.reshape(N ** m, K)


def braid_rep(E: EnhancedOperator, word: BraidWord, q0, cap: int = DEFAULT_CAP,
              allow_complex: bool = False) -> np.ndarray:
    N, m = E.N, word.strands
    dim = N ** m
    if dim > cap:
        raise CapExceeded(f"N^m = {dim} exceeds cap {cap}")
    Rp, Rm = _rhat_pair(E.spec, q0)
    M = np.eye(dim, dtype=complex)
    for g in reversed(word.letters):
        M = _apply_letter(M, Rp if g > 0 else Rm, abs(g), N, m)
    return M


def _rhat_pair(spec: AlgebraSpec, q0):
    P = p0prime_numeric(spec, q0)
    roots = lambda_numeric_roots(np.trace(P))
    I = np.eye(spec.N ** 2, dtype=complex)
    return I + roots.plus * P, I + roots.minus * P


def weighted_trace(E: EnhancedOperator, word: BraidWord, q0, cap: int = DEFAULT_CAP) -> complex:
    """tr(rho(beta) f^(x)m) with f^(x)m contracted as a diagonal weight vector."""
    fw = E.f_numeric(q0)
    w = np.ones(1, dtype=complex)
    for _ in range(word.strands):
        w = np.kron(w, fw)
    return complex(np.einsum("ii,i->", braid_rep(E, word, q0, cap), w))


def link_invariant(E: EnhancedOperator, word: BraidWord, q0, allow_complex: bool = False,
                   cap: int = DEFAULT_CAP) -> complex:
    eta_at(E.spec, q0, allow_complex)
    a = E.a_numeric(q0)
    return a ** (-word.writhe) * weighted_trace(E, word, q0, cap)


def free_reduce(letters) -> tuple[int, ...]:
    """Cancel adjacent g, -g pairs until none remain."""
    out: list[int] = []
    for g in letters:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def _skein_position(wp: BraidWord, wm: BraidWord, w0: BraidWord) -> int:
    """Position of the crossing in L+, allowing L- and L0 to be given up to free reduction."""
    if not (wp.strands == wm.strands == w0.strands):
        raise WordsNotSkeinTriple("words live on different strand counts")
    rm, r0 = free_reduce(wm.letters), free_reduce(w0.letters)
    for i, g in enumerate(wp.letters):
        if g <= 0:
            continue
        flipped = wp.letters[:i] + (-g,) + wp.letters[i + 1:]
        removed = wp.letters[:i] + wp.letters[i + 1:]
        if free_reduce(flipped) == rm and free_reduce(removed) == r0:
            return i
    raise WordsNotSkeinTriple("no crossing of L+ turns it into L- and L0")


def check_skein(E: EnhancedOperator, wp: BraidWord, wm: BraidWord, w0: BraidWord, q0,
                tol: float = 1e-9, allow_complex: bool = False) -> Check:
    """Skein relation of the normalized invariant:

        e^(2 eta) P(L+) - e^(-2 eta) P(L-) = (e^eta - e^(-eta)) P(L0).

    Follows from R^-1 = e^(2 eta) R + (1 - e^(2 eta)) I, which is the quadratic
    relation rewritten, together with the writhes w0 + 1, w0 - 1, w0.
    """
    _skein_position(wp, wm, w0)
    a = E.a_numeric(q0)
    P = lambda w: link_invariant(E, w, q0, allow_complex)
    lhs = a ** 2 * P(wp) - a ** -2 * P(wm)
    rhs = (a - 1 / a) * P(w0)
    scale = max(1.0, abs(lhs), abs(rhs))
    return Check("skein relation", abs(lhs - rhs) / scale, tol)


def check_skein_unnormalized(E: EnhancedOperator, wp: BraidWord, wm: BraidWord, w0: BraidWord, q0,
                             tol: float = 1e-9) -> Check:
    """Skein relation on traces carrying one common normalization a^(-writhe(L0)):

        e^-eta Q(L+) - e^eta Q(L-) = (e^-eta - e^eta) Q(L0),   Q(w) = a^(-writhe(L0)) tr(rho(w) f).

    Here R^-1 stands at the L+ position: the letter that carries the crossing is
    evaluated with its sign reversed relative to ``link_invariant``.
    """
    i = _skein_position(wp, wm, w0)
    a = E.a_numeric(q0)
    norm = a ** (-w0.writhe)
    g = wp.letters[i]
    swapped_p = BraidWord(wp.strands, wp.letters[:i] + (-g,) + wp.letters[i + 1:])
    swapped_m = wp
    Q = lambda w: norm * weighted_trace(E, w, q0)
    lhs = Q(swapped_p) / a - a * Q(swapped_m)
    rhs = (1 / a - a) * Q(w0)
    scale = max(1.0, abs(lhs), abs(rhs))
    return Check("skein relation (common normalization)", abs(lhs - rhs) / scale, tol)


def check_skein_eta_coefficients(E: EnhancedOperator, wp: BraidWord, wm: BraidWord, w0: BraidWord,
                                   q0, tol: float = 1e-9) -> Check:
    """The coefficients e^-eta, e^eta, (e^-eta - e^eta) applied to the normalized invariant."""
    _skein_position(wp, wm, w0)
    a = E.a_numeric(q0)
    P = lambda w: link_invariant(E, w, q0)
    lhs = P(wp) / a - a * P(wm)
    rhs = (1 / a - a) * P(w0)
    scale = max(1.0, abs(lhs), abs(rhs))
    return Check("skein relation (e^-eta, e^eta coefficients on P)", abs(lhs - rhs) / scale, tol)


def check_markov(E: EnhancedOperator, word: BraidWord, q0, gamma: BraidWord | None = None,
                 stabilizer: int = 1, tol: float = 1e-9, cap: int = DEFAULT_CAP) -> list[Check]:
    """Move I: P(gamma beta gamma^-1) = P(beta).  Move II: P(beta sigma_m^(+/-1)) on m+1 strands = P(beta)."""
    base = link_invariant(E, word, q0, cap=cap)
    scale = max(1.0, abs(base))
    out = []
    if gamma is not None:
        g = gamma.on(word.strands)
        conj = BraidWord(word.strands, g.letters + word.letters + g.inverse().letters)
        out.append(Check("Markov I (conjugation)", abs(link_invariant(E, conj, q0, cap=cap) - base) / scale, tol))
    m = word.strands
    st = BraidWord(m + 1, word.letters + (stabilizer * m,))
    out.append(Check("Markov II (stabilization)", abs(link_invariant(E, st, q0, cap=cap) - base) / scale, tol))
    return out


def random_word(rng: np.random.Generator, strands: int, length: int) -> BraidWord:
    if strands < 2:
        return BraidWord(strands, ())
    letters = tuple(int(rng.integers(1, strands)) * int(rng.choice([-1, 1])) for _ in range(length))
    return BraidWord(strands, letters)


def random_skein_triple(rng: np.random.Generator, strands: int, length: int):
    """(L+, L-, L0) with the crossing at a random position of a random word."""
    w = random_word(rng, strands, max(length - 1, 0))
    pos = int(rng.integers(0, len(w.letters) + 1))
    g = int(rng.integers(1, strands))
    before, after = w.letters[:pos], w.letters[pos:]
    return (BraidWord(strands, before + (g,) + after),
            BraidWord(strands, before + (-g,) + after),
            BraidWord(strands, before + after))
