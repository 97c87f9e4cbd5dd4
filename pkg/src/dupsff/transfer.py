"""Explicit space transfer operators on the folded time lattice.

The folded space is H_2t (x) H_2t, sheet-major: forward lattice first, then
the conjugated backward lattice, so a state is the flattened matrix X and a
per-sample transfer step acts as X -> S_f X S_f^dag with S_f built from the
space-time duals of the actual circuit gates.  One spatial step consumes two
columns: the even-bond dual layer on time pairs (1,2),(3,4),.. followed by
the odd-bond layer conjugated by the time shift.

In subsystem columns the time direction is open; each capped column inserts
d |o><o| at time-lattice site 1 (the glued boundary slot).  The fixed-
realization identity psff_via_transfer ties every one of these conventions
to the direct circuit computation, gate for gate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import perm
from .circuit import draw_disorder, floquet_matrix, layer_gates, shift_basis_map
from .gates import LocalGate, dual

__all__ = [
    "FoldedOperator",
    "ShiftVector",
    "MEMORY_BUDGET_BYTES",
    "shift_vector",
    "build_t_op",
    "build_s_op_sample",
    "averaged_s_op",
    "s_sample_sheet",
    "unimodular_count",
    "conjugation_invariance_check",
    "psff_via_transfer",
    "t_matrix_via_transfer",
    "certificates",
]

MEMORY_BUDGET_BYTES = 512 * 2**20

_SHEET_TAG = "sheet-major: forward (x) conjugated backward"


@dataclass(frozen=True)
class FoldedOperator:
    t: int
    d: int
    matrix: np.ndarray
    ordering: str = _SHEET_TAG

    def __post_init__(self):
        dim = (self.d**2) ** (2 * self.t)
        if self.matrix.shape != (dim, dim):
            raise ValueError("matrix dimension must be (d^2)^(2t)")


@dataclass(frozen=True)
class ShiftVector:
    t: int
    d: int
    r: int
    vector: np.ndarray


def _check_budget(t: int, d: int, budget: int = MEMORY_BUDGET_BYTES):
    dim = d ** (4 * t)
    if 16 * dim * dim > budget:
        raise MemoryError(
            f"folded operator at t={t}, d={d} needs {16 * dim * dim / 2**20:.0f} MiB "
            f"(budget {budget / 2**20:.0f} MiB)"
        )


def _kron_power(m: np.ndarray, k: int) -> np.ndarray:
    out = m
    for _ in range(k - 1):
        out = np.kron(out, m)
    return out


def _shift_conj(op: np.ndarray, n_sites: int, d: int) -> np.ndarray:
    """Pi op Pi^-1 on (C^d)^n, moving a gate up one lattice site."""
    m = shift_basis_map(n_sites, d)
    out = np.empty_like(op)
    out[np.ix_(m, m)] = op
    return out


def _sheet_pair(op_f: np.ndarray) -> np.ndarray:
    """Forward-sheet operator to the folded space: op_f (x) conj(op_f)."""
    return np.kron(op_f, op_f.conj())


def _site_to_sheet(matrix: np.ndarray, t: int, d: int) -> np.ndarray:
    """Reorder a site-major folded operator (f1,b1,f2,b2,..) to sheet-major."""
    n = 2 * t
    side = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    axes = side + [2 * n + a for a in side]
    dim = matrix.shape[0]
    return matrix.reshape((d,) * (4 * n)).transpose(axes).reshape(dim, dim)


def shift_vector(t: int, d: int, r: int) -> ShiftVector:
    """Normalized vectorized shift operator |r> = vec(P_eta^2r) / d^t."""
    p = perm.permutation_operator(perm.shift(t, r), d).astype(float)
    return ShiftVector(t, d, r % t, p.reshape(-1) / d**t)


def _forward_column(gate_a: np.ndarray, gate_b: np.ndarray, t: int, d: int) -> np.ndarray:
    """Forward-sheet transfer across one column pair: shifted odd-bond dual
    layer after the even-bond dual layer."""
    fa = _kron_power(dual(gate_a), t)
    fb = _shift_conj(_kron_power(dual(gate_b), t), 2 * t, d)
    return fb @ fa


def s_sample_sheet(
    t: int, d: int, base_gate: LocalGate, sigma: float, rng: np.random.Generator
) -> np.ndarray:
    """Forward-sheet factor of one disordered transfer-operator sample.

    One sample uses four single-site draws (two per layer), each replicated
    across the t tensor copies of its column, mirroring the Floquet circuit.
    """
    v = draw_disorder(d, sigma, 2, rng)
    ga = np.kron(v[0][0], v[0][1]) @ base_gate.matrix
    gb = np.kron(v[1][0], v[1][1]) @ base_gate.matrix
    return _forward_column(ga, gb, t, d)


def build_s_op_sample(
    t: int, d: int, base_gate: LocalGate, sigma: float, rng: np.random.Generator
) -> FoldedOperator:
    """One disorder realization of the spatial transfer operator (unitary)."""
    _check_budget(t, d)
    return FoldedOperator(t, d, _sheet_pair(s_sample_sheet(t, d, base_gate, sigma, rng)))


def averaged_s_op(
    t: int,
    d: int,
    base_gate: LocalGate,
    sigma: float,
    n_samples: int,
    rng: np.random.Generator,
) -> FoldedOperator:
    """Monte-Carlo disorder average of the spatial transfer operator."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    _check_budget(t, d)
    acc = _sheet_pair(s_sample_sheet(t, d, base_gate, sigma, rng)).astype(complex)
    for _ in range(n_samples - 1):
        acc += _sheet_pair(s_sample_sheet(t, d, base_gate, sigma, rng))
    return FoldedOperator(t, d, acc / n_samples)


def _cup(d: int) -> np.ndarray:
    return np.eye(d).reshape(-1)  # sqrt(d) |o> on one folded site


def build_t_op(t: int, d: int, base_gate: LocalGate) -> FoldedOperator:
    """Clean subsystem transfer operator
    d^2 (|o><o| (x) W^(t-1) (x) |o><o|) W^t with W the folded dual gate."""
    _check_budget(t, d)
    df = dual(base_gate.matrix)
    first = _sheet_pair(_kron_power(df, t))
    proj = np.outer(_cup(d), _cup(d)) / d
    w_site = _site_to_sheet(_sheet_pair(df), 1, d)  # one folded pair, site-major
    mid_site = proj
    for _ in range(t - 1):
        mid_site = np.kron(mid_site, w_site)
    mid_site = np.kron(mid_site, proj)
    mid = _site_to_sheet(mid_site, t, d)
    return FoldedOperator(t, d, d**2 * (mid @ first))


def unimodular_count(
    matrix: np.ndarray, atol: float = 1e-3
) -> tuple[int, np.ndarray]:
    """Number of eigenvalues within atol of the unit circle, plus all moduli
    sorted in descending order."""
    moduli = np.sort(np.abs(np.linalg.eigvals(matrix)))[::-1]
    return int(np.sum(np.abs(moduli - 1.0) < atol)), moduli


def conjugation_invariance_check(
    t: int, k: int, r: int, d: int, base_gate: LocalGate
) -> float:
    """Residual of U~^(t-k) tr_M(P_eta^2r) U~dag^(t-k) = tr_M(P_eta^2r).

    The partial trace is taken numerically on the explicit d^2t operator.
    """
    if not 0 <= k < t:
        raise ValueError("need 0 <= k < t")
    split = perm.LatticeSplit(t, k)
    big = perm.permutation_operator(perm.shift(t, r), d).astype(float)
    reduced = perm.partial_trace_sites(big, d, 2 * t, split.M)
    v = _kron_power(dual(base_gate.matrix), t - k)
    return float(np.abs(v @ reduced @ v.conj().T - reduced).max())


def psff_via_transfer(
    t: int,
    l: int,
    L: int,
    d: int,
    base_gate: LocalGate,
    sigma: float,
    rng: np.random.Generator,
) -> tuple[float, float, float]:
    """Fixed-realization network identity.

    One shared disorder draw; returns (circuit value, folded-network value,
    absolute difference).  The circuit side is tr_A[U_A(t) U_A(-t)] from
    literal matrix powers; the network side is the trace of the bond-dual
    operators with a d|o><o| insertion at time-site 1 for every capped
    column, which handles the two gates straddling the subsystem boundary
    exactly.
    """
    if not 0 <= l <= L:
        raise ValueError("need 0 <= l <= L")
    _check_budget(t, d)
    v0, v1 = draw_disorder(d, sigma, 2 * L, rng)
    ga, gb = layer_gates(base_gate.matrix, v0, v1)

    # circuit side
    u = floquet_matrix(d, L, ga, gb)
    ut = np.linalg.matrix_power(u, t)
    da = d ** (2 * l)
    dc = d ** (2 * (L - l))
    u_a = np.einsum("acbc->ab", ut.reshape(da, dc, da, dc))
    lhs = float(np.sum(u_a.real**2 + u_a.imag**2))

    # folded network side
    dim = d ** (4 * t)
    cap_site = np.outer(_cup(d), _cup(d))  # d |o><o| on one folded site
    cap = _site_to_sheet(np.kron(cap_site, np.eye(dim // d**2)), t, d)
    total = np.eye(dim, dtype=complex)
    for x in range(1, L + 1):
        if 2 * x - 1 <= 2 * l:
            total = cap @ total
        total = _sheet_pair(_kron_power(dual(ga[x - 1]), t)) @ total
        if 2 * x <= 2 * l:
            total = cap @ total
        fb = _shift_conj(_kron_power(dual(gb[x - 1]), t), 2 * t, d)
        total = _sheet_pair(fb) @ total
    rhs_c = np.trace(total)
    rhs = float(rhs_c.real)
    return lhs, rhs, abs(lhs - rhs_c)


def t_matrix_via_transfer(t: int, l: int, d: int, base_gate: LocalGate) -> np.ndarray:
    """<s| T_t^l |r> on the explicit folded space (physics route to the
    permutation-calculus T matrix)."""
    top = build_t_op(t, d, base_gate).matrix
    power = np.linalg.matrix_power(top, l)
    vecs = np.stack([shift_vector(t, d, r).vector for r in range(t)])
    return vecs.conj() @ power @ vecs.T


def certificates(
    d: int,
    base_gate: LocalGate,
    sigma: float,
    seed: int,
    n_samples: int = 500,
    t_max: int = 3,
) -> list[dict]:
    """JSON-ready transfer-operator certificates for the CLI."""
    out = []
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0)))
    for t in range(1, t_max + 1):
        v0 = shift_vector(t, d, 0).vector
        top = build_t_op(t, d, base_gate).matrix
        res = float(np.abs(top @ v0 - d**2 * v0).max())
        out.append(
            {
                "claim": "T_t|0> = d^2 |0>",
                "parameters": {"t": t, "d": d},
                "residual": res,
                "pass": res < 1e-10,
            }
        )
        sample = build_s_op_sample(t, d, base_gate, sigma, rng).matrix
        eye = np.eye(sample.shape[0])
        res = float(np.abs(sample @ sample.conj().T - eye).max())
        out.append(
            {
                "claim": "per-sample S_t unitary",
                "parameters": {"t": t, "d": d, "sigma": sigma},
                "residual": res,
                "pass": res < 1e-10,
            }
        )
        res = 0.0
        for r in range(t):
            vr = shift_vector(t, d, r).vector
            res = max(res, float(np.abs(sample @ vr - vr).max()))
        out.append(
            {
                "claim": "per-sample S_t |r> = |r>",
                "parameters": {"t": t, "d": d, "sigma": sigma},
                "residual": res,
                "pass": res < 1e-10,
            }
        )
    for t, l in [(1, 1), (2, 2), (2, 3)]:
        top = build_t_op(t, d, base_gate).matrix
        v0 = shift_vector(t, d, 0).vector
        rank1 = d ** (2 * l) * np.outer(v0, v0.conj())
        res = float(np.abs(np.linalg.matrix_power(top, l) - rank1).max())
        out.append(
            {
                "claim": "T_t^l = D_A |0><0| for t <= l",
                "parameters": {"t": t, "l": l, "d": d},
                "residual": res,
                "pass": res < 1e-8,
            }
        )
    avg = averaged_s_op(2, d, base_gate, sigma, n_samples, rng).matrix
    count, moduli = unimodular_count(avg)
    out.append(
        {
            "claim": "averaged S_2 has exactly t unimodular eigenvalues",
            "parameters": {"t": 2, "d": d, "sigma": sigma, "n_samples": n_samples},
            "residual": float(moduli[2]),
            "pass": bool(count == 2 and moduli[2] < 0.99),
        }
    )
    for t, l, L in [(2, 1, 2), (2, 2, 3)]:
        worst = 0.0
        for i in range(20):
            sub = np.random.default_rng(np.random.SeedSequence((seed, 100 + i)))
            lhs, rhs, diff = psff_via_transfer(t, l, L, d, base_gate, sigma, sub)
            worst = max(worst, diff / max(abs(lhs), 1.0))
        out.append(
            {
                "claim": "fixed-realization network identity",
                "parameters": {"t": t, "l": l, "L": L, "d": d, "sigma": sigma},
                "residual": worst,
                "pass": worst < 1e-8,
            }
        )
    return out
