"""Closed-form reference curves: CUE (P)SFF and the two Poissonian models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EnsembleParams",
    "sff_cue",
    "psff_cue_finite",
    "psff_cue_tdl",
    "psff_poisson_product",
    "psff_poisson_cue_states",
    "poisson_product_mc",
]


@dataclass(frozen=True)
class EnsembleParams:
    """Bipartition of a D-dimensional Hilbert space, D = D_A * D_Ac."""

    D: int
    D_A: int
    D_Ac: int

    def __post_init__(self):
        if min(self.D, self.D_A, self.D_Ac) < 1:
            raise ValueError("dimensions must be positive")
        if self.D != self.D_A * self.D_Ac:
            raise ValueError("D must factor as D_A * D_Ac")


def sff_cue(t: int, D: int) -> float:
    """CUE spectral form factor min(t, D): linear ramp, then plateau."""
    if D < 1:
        raise ValueError("D must be >= 1")
    if t < 0:
        raise ValueError("t must be >= 0")
    return float(min(t, D))


def psff_cue_finite(t: int, params: EnsembleParams) -> float:
    """Finite-D CUE partial spectral form factor."""
    D, D_A = params.D, params.D_A
    if D < 2:
        raise ValueError("D must be >= 2")
    offset = D**2 / (D**2 - 1) * (D_A - 1 / D_A)
    ramp = (D**2 - D_A**-2) / (D**2 - 1) * sff_cue(t, D) / D_A
    return offset + ramp


def psff_cue_tdl(t: int, D_A) -> float:
    """Thermodynamic-limit CUE PSFF: D_A + (t-1)/D_A."""
    if D_A < 1:
        raise ValueError("D_A must be >= 1")
    if t < 1:
        raise ValueError("t must be >= 1")
    return float(D_A + (t - 1) / D_A)


def psff_poisson_product(D: int) -> float:
    """Poisson spectrum with fixed product eigenbasis: constant D."""
    if D < 1:
        raise ValueError("D must be >= 1")
    return float(D)


def psff_poisson_cue_states(D_A: int, D_Ac: int, finite_d: bool = False) -> float:
    """Poisson spectrum with CUE eigenstates.

    The large-dimension limit is D_A + D_Ac.  With ``finite_d`` the finite-D
    CUE expression is evaluated at the Poissonian plateau SFF value K = D
    (a completeness extra; the limit is what the reference model states).
    """
    if min(D_A, D_Ac) < 1:
        raise ValueError("dimensions must be positive")
    if not finite_d:
        return float(D_A + D_Ac)
    D = D_A * D_Ac
    offset = D**2 / (D**2 - 1) * (D_A - 1 / D_A)
    ramp = (D**2 - D_A**-2) / (D**2 - 1) * D / D_A
    return offset + ramp


def poisson_product_mc(
    D_A: int, D_Ac: int, t: int, n_samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Monte-Carlo estimate of the product-basis Poisson model.

    Draws independent uniform phases phi_ij, evaluates
    sum_i |sum_j exp(i phi_ij t)|^2 per realization and returns
    (mean, standard error).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    phases = rng.uniform(-np.pi, np.pi, size=(n_samples, D_A, D_Ac))
    amps = np.exp(1j * phases * t).sum(axis=2)
    vals = (np.abs(amps) ** 2).sum(axis=1)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / np.sqrt(n_samples)) if n_samples > 1 else 0.0
    return mean, stderr
