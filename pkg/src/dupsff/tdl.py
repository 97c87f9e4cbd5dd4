"""Thermodynamic-limit PSFF from the permutation calculus: K_A(t) = tr(T W).

The Gram matrix of the cyclic-shift eigenvectors and its inverse (the
Weingarten matrix) are t x t; the T matrix comes from cycle counts of the
partial-trace-induced shifts.  All T entries are exact integer powers of d,
kept as exponents to stay meaningful at large t.  Deviations from the CUE
curve are assembled without ever subtracting two O(D_A) numbers: the
Weingarten correction is solved from G*(W-1) = 1-G and the trace mismatch is
summed term by term.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from . import perm
from .rmt import psff_cue_tdl

__all__ = [
    "GramMatrix",
    "WeingartenMatrix",
    "TMatrix",
    "BOUND_CONSTANT",
    "gram",
    "weingarten",
    "weingarten_delta",
    "weingarten_prime_t",
    "t_matrix",
    "t_matrix_bruteforce",
    "psff_tdl",
    "psff_tdl_deviation",
    "deviation_report",
]

# c >= 1 + (e ln 2 - 1)^-1 ~ 2.131 from the geometric-series bound
BOUND_CONSTANT = 2.131


@dataclass(frozen=True)
class GramMatrix:
    t: int
    d: int
    entries: np.ndarray


@dataclass(frozen=True)
class WeingartenMatrix:
    t: int
    d: int
    entries: np.ndarray
    residual: float  # max |W G - 1|


@dataclass(frozen=True)
class TMatrix:
    t: int
    l: int
    d: int
    exponents: np.ndarray  # integer E with T = d**E

    def values(self) -> np.ndarray:
        return np.power(float(self.d), self.exponents.astype(float))


def gram(t: int, d: int) -> GramMatrix:
    """G_{r,s} = d^(-2(t - gcd(|r-s|, t))); unit diagonal."""
    if t < 1 or d < 2:
        raise ValueError("need t >= 1 and d >= 2")
    g = np.empty((t, t))
    for r in range(t):
        for s in range(t):
            g[r, s] = float(d) ** (-2 * (t - gcd(abs(r - s), t))) if r != s else 1.0
    return GramMatrix(t, d, g)


def weingarten_delta(t: int, d: int) -> np.ndarray:
    """W - 1 solved from G (W - 1) = 1 - G, avoiding the cancellation of
    inverting G and subtracting the identity."""
    g = gram(t, d).entries
    rhs = np.eye(t) - g
    return np.linalg.solve(g, rhs)


def weingarten(t: int, d: int) -> WeingartenMatrix:
    """Numerical inverse of the Gram matrix, certified by the W G = 1 residual."""
    g = gram(t, d).entries
    w = np.eye(t) + weingarten_delta(t, d)
    residual = float(np.abs(w @ g - np.eye(t)).max())
    if residual > 1e-10:
        raise ArithmeticError(f"Gram inversion ill-conditioned: residual {residual:.2e}")
    return WeingartenMatrix(t, d, w, residual)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def weingarten_prime_t(t: int, d: int) -> WeingartenMatrix:
    """Closed form for prime t, where G = (1-a) 1 + a E with a = d^(-2(t-1)).

    W = (1-a)^(-1) (1 - g/(1+g t) E), g = a/(1-a).  The sign makes W G = 1
    hold identically (off-diagonal Weingarten entries are negative).
    """
    if not _is_prime(t):
        raise ValueError("t must be prime")
    if d < 2:
        raise ValueError("d must be >= 2")
    alpha = float(d) ** (-2 * (t - 1))
    gamma = alpha / (1.0 - alpha)
    if gamma * t >= 1:
        raise ArithmeticError("geometric series does not converge")
    w = (np.eye(t) - gamma / (1.0 + gamma * t) * np.ones((t, t))) / (1.0 - alpha)
    residual = float(np.abs(w @ gram(t, d).entries - np.eye(t)).max())
    return WeingartenMatrix(t, d, w, residual)


def _induced_shift_data(t: int, l: int) -> tuple[np.ndarray, np.ndarray]:
    """Images (0-indexed) of the induced shifts and their M-cycle counts.

    Returns (A, cM): A[r] is the image array of (eta^(2r))' on the 2(t-l)
    inner points, cM[r] the number of shift cycles inside the boundary.
    """
    split = perm.LatticeSplit(t, l)
    n = 2 * (t - l)
    A = np.empty((t, n), dtype=np.int64)
    cM = np.empty(t, dtype=np.int64)
    for r in range(t):
        res = perm.induced(perm.shift(t, r), split)
        A[r] = res.reduced.as_array()
        cM[r] = res.cycles_in_M
    return A, cM


def t_matrix(t: int, l: int, d: int) -> TMatrix:
    """T_{r,s} = d^(-2t + |eta^2r|_M + |eta^2s|_M + |(eta^-2s)'(eta^2r)'|).

    The induced shifts map odd/even pairs of the inner lattice to pairs, so
    the composite's cycles are counted on the half-size pair lattice (each
    pair-cycle lifts to exactly two cycles).
    """
    if not t > l >= 0:
        raise ValueError("need t > l >= 0 (the t <= l branch is exact and constant)")
    if d < 2:
        raise ValueError("d must be >= 2")
    A, cM = _induced_shift_data(t, l)
    # pairwise-mapping reduction: sigma[r][j] = A[r][2j] // 2 on t-l points
    if not np.array_equal(A[:, 1::2], A[:, ::2] + 1):
        raise AssertionError("induced shifts lost the pair structure")
    sigma = A[:, ::2] // 2
    npairs = sigma.shape[1]
    sigma_inv = np.empty_like(sigma)
    for r in range(t):
        sigma_inv[r, sigma[r]] = np.arange(npairs)
    exponents = np.empty((t, t), dtype=np.int64)
    for s in range(t):
        # composite (eta^-2s)' o (eta^2r)' for all r at once
        composites = sigma_inv[s][sigma]
        ncyc = 2 * perm.batch_cycle_counts(composites)
        exponents[:, s] = -2 * t + cM + cM[s] + ncyc
    return TMatrix(t, l, d, exponents)


def t_matrix_bruteforce(t: int, l: int, d: int) -> np.ndarray:
    """Independent route: d^(2t) T_{r,s} as exact integers from explicit
    permutation operators, numeric partial traces over M, and the trace of
    the operator product on the inner sites."""
    split = perm.LatticeSplit(t, l)
    reduced_ops = []
    for r in range(t):
        big = perm.permutation_operator(perm.shift(t, r), d)
        reduced_ops.append(perm.partial_trace_sites(big, d, 2 * t, split.M))
    scaled = np.empty((t, t), dtype=np.int64)
    for r in range(t):
        for s in range(t):
            scaled[r, s] = np.trace(reduced_ops[(t - s) % t] @ reduced_ops[r])
    return scaled


def psff_tdl(t: int, l: int, d: int) -> float:
    """Thermodynamic-limit PSFF: exact constant d^(2l) for t <= l, else tr(T W)."""
    if t < 1 or l < 0 or d < 2:
        raise ValueError("need t >= 1, l >= 0, d >= 2")
    if t <= l:
        return float(d) ** (2 * l)
    tm = t_matrix(t, l, d).values()
    delta = weingarten_delta(t, d)
    return float(np.trace(tm) + np.sum(tm * delta.T))


def psff_tdl_deviation(t: int, l: int, d: int) -> float:
    """K_A(t) - K_A_CUE(t) assembled without large-number cancellation."""
    D_A = float(d) ** (2 * l)
    if t <= l:
        return -(t - 1) / D_A
    tm = t_matrix(t, l, d)
    vals = tm.values()
    expected = np.full(t, 1.0 / D_A)
    expected[0] = D_A
    trace_mismatch = float(np.sum(vals.diagonal() - expected))
    delta = weingarten_delta(t, d)
    return trace_mismatch + float(np.sum(vals * delta.T))


def deviation_report(t_max: int, l: int, d: int):
    """Per-time deviation from CUE with the analytic bound c D_A t^2 d^-t.

    Returns a list of dict rows (t, K_A, K_CUE, abs_dev, bound, violated);
    the bound is only claimed for t > 2l.
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    D_A = float(d) ** (2 * l)
    rows = []
    for t in range(1, t_max + 1):
        k_cue = psff_cue_tdl(t, D_A)
        dev = psff_tdl_deviation(t, l, d)
        bound = BOUND_CONSTANT * D_A * t**2 * float(d) ** (-t)
        rows.append(
            {
                "t": t,
                "K_A": k_cue + dev,
                "K_CUE": k_cue,
                "abs_dev": abs(dev),
                "bound": bound,
                "violated": bool(t > 2 * l and abs(dev) > bound),
            }
        )
    return rows
