"""Binary codes U in {0,1}^k with a sign function that every low-junta-degree
polynomial averages to zero against.

U is the image of a k x w generator matrix M over F_2, and
chi(Mz) = (-1)^<z, eta> for a vector eta outside the span of every d rows of
M.  Then for each set I of at most d coordinates, chi sums to zero over
{y in U : y_i = 1 for i in I}, so no junta-degree-d polynomial is nonzero at
exactly one point of U.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .groups import AbelianGroup, prime_power_components
from .junta_poly import JuntaPolynomial, pattern_matrix, patterns_up_to
from .linalg import nullspace_mod_p, rank_mod_p, solvable_mod_prime_power


class ConstructionFailed(RuntimeError):
    pass


def code_dimension(k: int, d: int) -> int:
    """Smallest w with C(k,d) * 2^d < 2^w."""
    target = math.comb(k, d) * 2**d
    w = 0
    while 2**w <= target:
        w += 1
    return w


@dataclass(frozen=True)
class HittingSet:
    k: int
    d: int
    w: int
    M: np.ndarray  # k x w over F_2
    eta: np.ndarray  # length w
    U: np.ndarray  # 2^w x k, row z is M z
    chi: np.ndarray  # +-1 per row of U
    attempts: int = 1

    def to_text(self) -> str:
        lines = [f"k {self.k} d {self.d} w {self.w}", "M"]
        lines += ["".join(map(str, row)) for row in self.M]
        lines += ["eta", "".join(map(str, self.eta)), "U"]
        lines += ["".join(map(str, y)) + (" +" if c > 0 else " -") for y, c in zip(self.U, self.chi)]
        return "\n".join(lines) + "\n"


def _all_vectors(w: int) -> np.ndarray:
    return ((np.arange(2**w)[:, None] >> np.arange(w)[::-1]) & 1).astype(np.int64)


def _codewords(M: np.ndarray) -> np.ndarray:
    return _all_vectors(M.shape[1]) @ M.T % 2


def reed_muller_generator(m: int, r: int = 2) -> np.ndarray:
    """Rows are the monomials of degree <= r in m variables, evaluated on F_2^m."""
    pts = _all_vectors(m)
    rows = []
    for deg in range(r + 1):
        for S in itertools.combinations(range(m), deg):
            rows.append(np.prod(pts[:, list(S)], axis=1) if S else np.ones(2**m, dtype=np.int64))
    return np.array(rows, dtype=np.int64)


def _distances_ok(M: np.ndarray) -> bool:
    """Every nonzero codeword (so every pairwise distance) has weight in [k/4, 3k/4]."""
    k = M.shape[0]
    weights = _codewords(M)[1:].sum(axis=1)
    return bool(np.all((4 * weights >= k) & (4 * weights <= 3 * k)))


def _sample_generator(k: int, w: int, rng: np.random.Generator, rm: np.ndarray | None) -> np.ndarray:
    if rm is None:
        return rng.integers(0, 2, size=(k, w))
    # random w-dimensional subcode of the Reed-Muller code, coordinates shuffled
    A = rng.integers(0, 2, size=(w, rm.shape[0]))
    return (A @ rm % 2).T[rng.permutation(k)]


def _forbidden_etas(M: np.ndarray, d: int) -> np.ndarray:
    """Boolean mask over F_2^w (as integers) of vectors in the span of <= d rows of M."""
    w = M.shape[1]
    weights = 1 << np.arange(w)[::-1]
    row_codes = M @ weights
    bad = np.zeros(2**w, dtype=bool)
    for size in range(d + 1):
        for rows in itertools.combinations(range(M.shape[0]), size):
            span = np.zeros(1, dtype=np.int64)
            for r in rows:
                span = np.concatenate([span, span ^ row_codes[r]])
            bad[span] = True
    return bad


def build_hitting_set(
    k: int, d: int, s: int, rng: np.random.Generator, max_retries: int = 1000, method: str = "auto"
) -> HittingSet:
    """Sample (M, eta) until all invariants verify exhaustively.

    ``method`` is ``uniform`` (M uniformly random), ``reed-muller`` (M spans a
    random subcode of RM(2, log k), k a power of two) or ``auto``, which picks
    ``reed-muller`` when it applies.  The Reed-Muller route is what makes
    k = 16, d = 2 feasible: its nonzero weights other than k lie in [k/4, 3k/4].
    """
    if d < 0 or s < 2 or k < 1:
        raise ValueError(f"invalid parameters k={k}, d={d}, s={s}")
    w = code_dimension(k, d)
    if w > k:
        raise ValueError(f"code dimension w={w} exceeds k={k}; k is too small for d={d}")
    power_of_two = k >= 4 and k & (k - 1) == 0
    if method == "auto":
        method = "reed-muller" if power_of_two else "uniform"
    if method == "reed-muller":
        if not power_of_two:
            raise ValueError(f"reed-muller construction needs k a power of two, got {k}")
        rm = reed_muller_generator(k.bit_length() - 1)
        if rm.shape[0] < w:
            raise ValueError(f"RM(2, log k) has dimension {rm.shape[0]} < w={w}")
    elif method == "uniform":
        rm = None
    else:
        raise ValueError(f"unknown method {method!r}")

    for attempt in range(1, max_retries + 1):
        M = _sample_generator(k, w, rng, rm)
        if rank_mod_p(M, 2) < w or not _distances_ok(M):
            continue
        allowed = np.flatnonzero(~_forbidden_etas(M, d))
        if allowed.size == 0:
            continue
        code = int(rng.choice(allowed))
        eta = np.array([(code >> (w - 1 - i)) & 1 for i in range(w)], dtype=np.int64)
        Z = _all_vectors(w)
        U = Z @ M.T % 2
        chi = np.where(Z @ eta % 2 == 0, 1, -1)
        hs = HittingSet(k, d, w, M, eta, U, chi, attempts=attempt)
        if verify_hitting_set(hs):
            return hs
    raise ConstructionFailed(f"no valid (M, eta) for k={k}, d={d} after {max_retries} attempts")


# -- verification ----------------------------------------------------------


def _binary_patterns(k: int, d: int) -> list:
    return list(patterns_up_to(2, k, d))


def sign_sums(U: np.ndarray, chi: np.ndarray, d: int) -> np.ndarray:
    """Sum of chi over {y in U : y_i = 1 on I}, one entry per |I| <= d."""
    V = pattern_matrix(U, _binary_patterns(U.shape[1], d))
    return V.T @ np.asarray(chi, dtype=np.int64)


def eta_avoids_row_spans(M: np.ndarray, eta: np.ndarray, d: int) -> bool:
    w = M.shape[1]
    code = int(np.asarray(eta) @ (1 << np.arange(w)[::-1]))
    return not _forbidden_etas(M, d)[code]


def verify_hitting_set(hs: HittingSet) -> bool:
    U = hs.U
    if len(U) != 2**hs.w or len({tuple(y) for y in U}) != len(U):
        return False
    dist = (U[:, None, :] != U[None, :, :]).sum(axis=2)
    off = ~np.eye(len(U), dtype=bool)
    if not np.all((4 * dist[off] >= hs.k) & (4 * dist[off] <= 3 * hs.k)):
        return False
    if np.any(sign_sums(U, hs.chi, hs.d)):
        return False
    return eta_avoids_row_spans(hs.M, hs.eta, hs.d)


def sign_sum(P: JuntaPolynomial, U: np.ndarray, chi: np.ndarray) -> tuple:
    """Sum over y in U of P(y) * chi(y), in the coefficient group of P."""
    patterns = list(P.coeffs)
    if not patterns:
        return P.group.zero()
    V = pattern_matrix(U, patterns)
    G = np.array([P.coeffs[a] for a in patterns], dtype=np.int64)
    total = (np.asarray(chi, dtype=np.int64) @ (V @ G)) % P.group.orders_array
    return tuple(int(v) for v in total)


def random_sign_sums(
    U: np.ndarray, chi: np.ndarray, d: int, s: int, group: AbelianGroup, trials: int, rng: np.random.Generator
) -> np.ndarray:
    """Sign sums of ``trials`` random junta-degree-d polynomials over Z_s^k; shape (trials, r)."""
    patterns = list(patterns_up_to(s, U.shape[1], d))
    V = pattern_matrix(U, patterns)
    G = np.stack([rng.integers(0, m, size=(len(patterns), trials)) for m in group.orders], axis=-1)
    values = np.einsum("up,ptr->utr", V, G)  # P_t(y) before reduction
    return (np.einsum("u,utr->tr", np.asarray(chi, dtype=np.int64), values)) % group.orders_array


def verify_one_point_separation(U, chi, d: int, s: int, group: AbelianGroup) -> bool:
    """True iff no junta-degree-d polynomial over the group is nonzero at exactly one point of U.

    When the sign identity holds this is immediate: sum_y P(y) chi(y) = 0 and
    chi = +-1.  Otherwise each prime-power piece Z_{q^e} is searched exactly
    for a function q^{e-1} e_y in the span of the restricted monomials.
    """
    U = np.asarray(U, dtype=np.int64)
    chi = np.asarray(chi, dtype=np.int64)
    if U.ndim != 2 or len(U) == 0:
        raise ValueError("U must be a non-empty 2-d array of points")
    k = U.shape[1]
    # only symbols present in U matter; others make the monomial vanish on U
    patterns = list(patterns_up_to(s, k, d))
    V = pattern_matrix(U, patterns)
    V = V[:, V.any(axis=0)]
    if len(chi) == len(U) and set(np.unique(chi)) <= {-1, 1} and not np.any(V.T @ chi):
        return True
    for _, q, e in prime_power_components(group):
        if e == 1:
            kernel = nullspace_mod_p(V.T, q)  # u with u^T V = 0
            # e_y in colspan(V) iff every left-kernel vector vanishes at y
            if kernel.size == 0 or np.any(~kernel.any(axis=0)):
                return False
        else:
            for y in range(len(U)):
                target = np.zeros(len(U), dtype=np.int64)
                target[y] = q ** (e - 1)
                if solvable_mod_prime_power(V, target, q, e):
                    return False
    return True
