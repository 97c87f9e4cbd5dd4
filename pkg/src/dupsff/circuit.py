"""Exact finite-size PSFF: disordered brickwork Floquet operators on 2L qudits,
reduced evolution via the spectral resolution, and disorder-ensemble averages.

The Floquet operator is diagonalized once per realization (complex Schur keeps
the eigenvector matrix exactly unitary); every later time then costs one phase
sum over the stack of reduced eigenprojectors, which makes times far beyond
the Heisenberg time affordable.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .gates import DisorderSpec, LocalGate, disorder_unitary

__all__ = [
    "CircuitSpec",
    "FloquetRealization",
    "PsffSeries",
    "realization_rng",
    "shift_basis_map",
    "floquet_matrix",
    "build_floquet",
    "reduced_evolution",
    "reduced_evolution_direct",
    "psff_sample",
    "psff_ensemble",
    "purity_check",
    "worker_count",
]


def worker_count() -> int:
    """Worker pool size; the PSFF_THREADS environment variable overrides."""
    env = os.environ.get("PSFF_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("PSFF_THREADS must be >= 1")
        return n
    return max(1, os.cpu_count() or 1)


def realization_rng(seed: int, index: int) -> np.random.Generator:
    """Fixed (seed, realization) -> stream mixing; independent of scheduling."""
    return np.random.default_rng(np.random.SeedSequence((seed, index)))


@dataclass(frozen=True)
class CircuitSpec:
    """Full experiment configuration for the 2L-site brickwork ensemble."""

    d: int
    L: int
    l: int
    J: float
    sigma: float
    base_gate: LocalGate
    seed: int
    n_samples: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if not 0 <= self.l <= self.L:
            raise ValueError("l must satisfy 0 <= l <= L")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.base_gate.d != self.d:
            raise ValueError("base gate dimension mismatch")

    @property
    def dim(self) -> int:
        return self.d ** (2 * self.L)

    @property
    def dim_a(self) -> int:
        return self.d ** (2 * self.l)


def shift_basis_map(n_sites: int, d: int) -> np.ndarray:
    """Index map of the one-site cyclic shift Pi |j_1 .. j_n> = |j_n j_1 ..>.

    Site 1 is the most significant digit, so the last digit moves to the top.
    """
    idx = np.arange(d**n_sites)
    return (idx % d) * d ** (n_sites - 1) + idx // d


def _kron_chain(mats) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def draw_disorder(d: int, sigma: float, n_sites: int, rng: np.random.Generator):
    """Per-site single-qudit disorder for both layers: (layer0, layer1) lists."""
    spec = DisorderSpec(d, sigma)
    v0 = [disorder_unitary(spec, rng) for _ in range(n_sites)]
    v1 = [disorder_unitary(spec, rng) for _ in range(n_sites)]
    return v0, v1


def layer_gates(base: np.ndarray, v0: list, v1: list):
    """Dressed two-site gates: layer-0 on bonds (2x-1,2x), layer-1 on (2x,2x+1)."""
    n = len(v0)
    L = n // 2
    a = [np.kron(v0[2 * x], v0[2 * x + 1]) @ base for x in range(L)]
    b = [np.kron(v1[(2 * x + 1) % n], v1[(2 * x + 2) % n]) @ base for x in range(L)]
    return a, b


def floquet_matrix(d: int, L: int, gates_a: list, gates_b: list) -> np.ndarray:
    """U = U_1 U_0 with U_0 the even-bond layer and U_1 the shifted odd-bond
    layer, Pi (x) U_{2x,2x+1} Pi^-1."""
    u0 = _kron_chain(gates_a)
    u1_slots = _kron_chain(gates_b)
    m = shift_basis_map(2 * L, d)
    u1 = np.empty_like(u1_slots)
    u1[np.ix_(m, m)] = u1_slots
    return u1 @ u0


@dataclass(frozen=True)
class FloquetRealization:
    """Spectral resolution of one disorder realization."""

    d: int
    L: int
    phases: np.ndarray  # quasi-energies phi_n
    vectors: np.ndarray  # unitary eigenvector matrix (columns)
    _proj_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.d ** (2 * self.L)

    def operator(self) -> np.ndarray:
        v = self.vectors
        return (v * np.exp(1j * self.phases)) @ v.conj().T

    def reduced_projectors(self, l: int, first_site: int = 1) -> np.ndarray:
        """Stack of reduced eigenvector density matrices tr_rest |n><n|.

        The window is the 2l contiguous sites starting at ``first_site``.
        Shape (D, D_A, D_A).
        """
        if not 0 <= l <= self.L:
            raise ValueError("l must satisfy 0 <= l <= L")
        key = (l, first_site)
        if key not in self._proj_cache:
            d, n = self.d, 2 * self.L
            win = 2 * l
            if first_site < 1 or first_site + win - 1 > n:
                raise ValueError("window out of range")
            pre = d ** (first_site - 1)
            mid = d**win
            post = d ** (n - first_site + 1 - win)
            v4 = self.vectors.reshape(pre, mid, post, self.dim)
            self._proj_cache[key] = np.einsum(
                "awbn,acbn->nwc", v4, v4.conj(), optimize=True
            )
        return self._proj_cache[key]


def build_floquet(spec: CircuitSpec, rng: np.random.Generator) -> FloquetRealization:
    """Draw one disorder realization and diagonalize its Floquet operator."""
    v0, v1 = draw_disorder(spec.d, spec.sigma, 2 * spec.L, rng)
    ga, gb = layer_gates(spec.base_gate.matrix, v0, v1)
    u = floquet_matrix(spec.d, spec.L, ga, gb)
    tri, vecs = sla.schur(u, output="complex")
    lam = np.diagonal(tri)
    if np.abs(np.abs(lam) - 1).max() > 1e-10:
        raise ArithmeticError("eigenvalues left the unit circle: eigensolver failure")
    return FloquetRealization(spec.d, spec.L, np.angle(lam), vecs)


def reduced_evolution(
    real: FloquetRealization, l: int, t: int, first_site: int = 1
) -> np.ndarray:
    """U_A(t) = tr_Ac(U^t) from the spectral resolution."""
    if t < 1:
        raise ValueError("t must be >= 1")
    proj = real.reduced_projectors(l, first_site)
    return np.einsum("n,nab->ab", np.exp(1j * real.phases * t), proj, optimize=True)


def reduced_evolution_direct(
    u: np.ndarray, d: int, L: int, l: int, t: int
) -> np.ndarray:
    """Oracle route: literal matrix power and index-blocked partial trace."""
    ut = np.linalg.matrix_power(u, t)
    da = d ** (2 * l)
    dc = d ** (2 * (L - l))
    return np.einsum("acbc->ab", ut.reshape(da, dc, da, dc))


def psff_sample(
    real: FloquetRealization, l: int, t: int, first_site: int = 1
) -> float:
    """Non-averaged PSFF tr(M M^dag) with M = U_A(t); real and >= 0."""
    m = reduced_evolution(real, l, t, first_site)
    return float(np.sum(m.real**2 + m.imag**2))


@dataclass(frozen=True)
class PsffSeries:
    """Ensemble-averaged PSFF table, one row per time."""

    method: str
    t: np.ndarray
    value: np.ndarray
    stderr: np.ndarray
    n_samples: np.ndarray

    def rows(self):
        for k in range(len(self.t)):
            yield (
                int(self.t[k]),
                float(self.value[k]),
                float(self.stderr[k]),
                int(self.n_samples[k]),
                self.method,
            )


def _one_realization(args) -> np.ndarray:
    spec, index, t_list = args
    real = build_floquet(spec, realization_rng(spec.seed, index))
    return np.array([psff_sample(real, spec.l, t) for t in t_list])


def psff_ensemble(
    spec: CircuitSpec, t_list, workers: int | None = None
) -> PsffSeries:
    """Disorder-averaged PSFF over ``spec.n_samples`` independent realizations.

    Realizations are scheduled on a process pool; the (seed, index) stream
    mixing makes the result independent of worker count and arrival order.
    """
    t_arr = np.asarray(list(t_list), dtype=np.int64)
    if t_arr.size == 0 or t_arr.min() < 1:
        raise ValueError("need at least one time, all >= 1")
    n = spec.n_samples
    jobs = [(spec, i, t_arr) for i in range(n)]
    nwork = workers if workers is not None else worker_count()
    if nwork > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=nwork) as pool:
            samples = np.stack(list(pool.map(_one_realization, jobs, chunksize=8)))
    else:
        samples = np.stack([_one_realization(job) for job in jobs])
    mean = samples.mean(axis=0)
    stderr = (
        samples.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(mean)
    )
    return PsffSeries(
        method="finite-size",
        t=t_arr,
        value=mean,
        stderr=stderr,
        n_samples=np.full_like(t_arr, n),
    )


def purity_check(
    real: FloquetRealization, l: int, window: int | None = None
) -> tuple[float, float]:
    """Time-averaged PSFF / D versus the mean eigenstate purity.

    Returns (window average of psff/D over t = 1..T, (1/D) sum_n tr rho_n^2).
    Near-degenerate quasi-energies make the window average converge slowly,
    so they are rejected.
    """
    D = real.dim
    phases = np.sort(real.phases)
    gaps = np.diff(np.concatenate([phases, [phases[0] + 2 * np.pi]]))
    if gaps.min() < 1e-10:
        raise ArithmeticError("near-degenerate quasi-energy pair; window average unreliable")
    T = window if window is not None else 10 * D
    proj = real.reduced_projectors(l)
    lhs = np.mean([psff_sample(real, l, t) for t in range(1, T + 1)]) / D
    rhs = float(np.einsum("nab,nba->", proj, proj).real) / D
    return lhs, rhs
