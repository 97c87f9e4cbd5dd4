"""Permutations of the periodic time lattice and the partial-trace-induced map.

Points are 1-indexed throughout.  The lattice of length 2t is split into a
boundary segment M (the first and last k points) and the inner segment K;
tracing a permutation operator over M induces a permutation of K, obtained by
following orbits until they return to K.  Cycles that never leave M each
contribute a factor d to the trace and are counted separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

__all__ = [
    "Permutation",
    "LatticeSplit",
    "InducedResult",
    "identity",
    "shift",
    "compose",
    "inverse",
    "cycles",
    "cycles_within",
    "return_time",
    "induced",
    "permutation_operator",
    "partial_trace_sites",
    "batch_cycle_counts",
]


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1, .., n}; ``images[i-1]`` is the image of point i."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if n == 0:
            raise ValueError("permutation must act on at least one point")
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"not a bijection of 1..{n}: {self.images}")

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def as_array(self) -> np.ndarray:
        """0-indexed image array, for vectorized work."""
        return np.asarray(self.images, dtype=np.int64) - 1


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(1, n + 1)))


def shift(t: int, r: int) -> Permutation:
    """Even shift eta^(2r) on 2t points: x -> ((x-1+2r) mod 2t) + 1."""
    if t < 1:
        raise ValueError("t must be >= 1")
    n = 2 * t
    return Permutation(tuple((x + 2 * r) % n + 1 for x in range(n)))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """(p o q)(x) = p(q(x))."""
    if p.size != q.size:
        raise ValueError("size mismatch")
    return Permutation(tuple(p.images[q.images[x] - 1] for x in range(p.size)))


def inverse(p: Permutation) -> Permutation:
    inv = [0] * p.size
    for x, y in enumerate(p.images, start=1):
        inv[y - 1] = x
    return Permutation(tuple(inv))


def cycles(p: Permutation) -> list[tuple[int, ...]]:
    """Disjoint cycles, each starting at its minimum, sorted by minimum."""
    seen = [False] * p.size
    out = []
    for start in range(1, p.size + 1):
        if seen[start - 1]:
            continue
        cyc = [start]
        seen[start - 1] = True
        x = p(start)
        while x != start:
            cyc.append(x)
            seen[x - 1] = True
            x = p(x)
        out.append(tuple(cyc))
    return out


def cycles_within(p: Permutation, subset) -> int:
    """Number of cycles of p whose every point lies in ``subset``."""
    sub = set(subset)
    if not sub <= set(range(1, p.size + 1)):
        raise ValueError("subset must consist of lattice points")
    return sum(1 for cyc in cycles(p) if set(cyc) <= sub)


@dataclass(frozen=True)
class LatticeSplit:
    """Boundary segment M = {1..k} u {2t-k+1..2t} and inner segment K."""

    t: int
    k: int
    M: tuple[int, ...] = field(init=False)
    K: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if not 0 <= self.k <= self.t:
            raise ValueError("k must satisfy 0 <= k <= t")
        n = 2 * self.t
        m = tuple(range(1, self.k + 1)) + tuple(range(n - self.k + 1, n + 1))
        object.__setattr__(self, "M", m)
        object.__setattr__(self, "K", tuple(range(self.k + 1, n - self.k + 1)))


@dataclass(frozen=True)
class InducedResult:
    """Reduced permutation of K (relabeled to 1..|K|) plus the M-cycle count."""

    reduced: Permutation
    cycles_in_M: int


def return_time(p: Permutation, split: LatticeSplit, x: int) -> int:
    """Smallest tau >= 1 with p^tau(x) back in K.  Orbits are finite, so this
    always terminates."""
    if x not in split.K:
        raise ValueError(f"{x} is not in K")
    kset = set(split.K)
    tau = 1
    y = p(x)
    while y not in kset:
        y = p(y)
        tau += 1
    return tau


def induced(p: Permutation, split: LatticeSplit) -> InducedResult:
    """Map pi -> pi' induced by the partial trace over M.

    pi'(x) = pi^(tau(pi,x))(x) for x in K, relabeled to 1..|K| preserving the
    lattice order; cycles of pi entirely inside M are counted, not mapped.
    """
    if p.size != 2 * split.t:
        raise ValueError("permutation size must equal 2t")
    if split.k == split.t:
        raise ValueError("K is empty for k = t")
    kset = set(split.K)
    relabel = {x: i + 1 for i, x in enumerate(split.K)}
    images = []
    for x in split.K:
        y = p(x)
        while y not in kset:
            y = p(y)
        images.append(relabel[y])
    return InducedResult(
        reduced=Permutation(tuple(images)),
        cycles_in_M=cycles_within(p, split.M),
    )


def permutation_operator(p: Permutation, d: int) -> np.ndarray:
    """Unitary representation on (C^d)^n permuting tensor factors.

    Acts as P|i_1 .. i_n> = |i_{p^-1(1)} .. i_{p^-1(n)}>, with site 1 the most
    significant factor of the row-major product basis.  Integer matrix.
    """
    n = p.size
    dim = d**n
    cols = np.arange(dim)
    digits = np.empty((n, dim), dtype=np.int64)
    rem = cols
    for site in range(n - 1, -1, -1):
        digits[site] = rem % d
        rem = rem // d
    pinv = inverse(p)
    rows = np.zeros(dim, dtype=np.int64)
    for site in range(n):
        rows = rows * d + digits[pinv(site + 1) - 1]
    op = np.zeros((dim, dim), dtype=np.int64)
    op[rows, cols] = 1
    return op


def partial_trace_sites(op: np.ndarray, d: int, n: int, sites) -> np.ndarray:
    """Trace an operator on (C^d)^n over the given (1-indexed) sites.

    Remaining sites keep their lattice order.
    """
    traced = sorted(set(sites))
    if not set(traced) <= set(range(1, n + 1)):
        raise ValueError("sites out of range")
    tens = np.asarray(op).reshape((d,) * (2 * n))
    for site in reversed(traced):
        ax = site - 1
        nleft = tens.ndim // 2
        tens = np.trace(tens, axis1=ax, axis2=nleft + ax)
    dim = d ** (n - len(traced))
    return tens.reshape(dim, dim)


def batch_cycle_counts(perms: np.ndarray) -> np.ndarray:
    """Cycle counts for a batch of 0-indexed image arrays of shape (m, n).

    Pointer-doubling min-propagation: after ceil(log2 n) rounds every point
    knows the minimum of its orbit; cycle count = number of orbit minima.
    """
    perms = np.asarray(perms, dtype=np.int64)
    if perms.ndim == 1:
        perms = perms[None, :]
    m, n = perms.shape
    leader = np.tile(np.arange(n, dtype=np.int64), (m, 1))
    power = perms.copy()
    rounds = max(1, int(np.ceil(np.log2(n)))) if n > 1 else 1
    for _ in range(rounds):
        leader = np.minimum(leader, np.take_along_axis(leader, power, axis=1))
        power = np.take_along_axis(power, power, axis=1)
    return (leader == np.arange(n)).sum(axis=1)
