"""Center-of-mass / relational partition of an N-particle phase space.

The linear map sends external coordinates (x_1..x_N, p_1..p_N) to

    x_cm   = sum_k (m_k / M) x_k          p_cm   = sum_k p_k
    x_i|1  = x_i - x_1   (i >= 2)         p_i|1  = p_i - (m_i / M) p_cm

which is symplectic for any positive masses. Particle 1 is the reference;
picking a different reference is a relabeling with identical entanglement
content (callers can permute the particle order to get it).

Finite-width packets change width under the map. The transformed slot
packets carry the exact marginal position variances; the induced
inter-slot correlations (present for N >= 3 or unequal masses) are
reported separately via :func:`covariance_report` rather than silently
dropped. In the highly squeezed regime used throughout (branch
separations of many widths) these correlations do not affect overlaps at
any tested tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, PartitionTagError
from .states import (
    CM_RELATIONAL,
    EXTERNAL,
    ProductStateSuperposition,
    normalized,
    slot_gram,
    superposition,
)
from .wavepackets import Wavepacket

SYMPLECTIC_TOL = 1e-13
COINCIDENCE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ParticleConfig:
    """Per-particle branch superpositions in the external partition.

    ``branches`` holds, for each particle, a list of (amplitude, center)
    pairs; a single pair means the particle is not in superposition.
    All particles share the packet frequency ``omega``.
    """

    masses: tuple
    branches: tuple
    omega: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "masses", tuple(float(m) for m in self.masses))
        object.__setattr__(self, "branches", tuple(
            tuple((complex(a), float(c)) for a, c in per) for per in self.branches))
        if len(self.masses) < 1:
            raise ValueError("need at least one particle")
        if any(m <= 0 for m in self.masses):
            raise ValueError("masses must be positive")
        if len(self.branches) != len(self.masses):
            raise DimensionMismatchError("one branch list per particle")
        if any(len(per) == 0 for per in self.branches):
            raise ValueError("every particle needs at least one branch")
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    @property
    def n_particles(self) -> int:
        return len(self.masses)

    def build_state(self) -> ProductStateSuperposition:
        """Expand per-particle branches into a normalized external state."""
        terms = [(1.0 + 0.0j, ())]
        for per in self.branches:
            terms = [(amp * a, centers + (c,))
                     for amp, centers in terms for a, c in per]
        branches = [(amp, tuple(Wavepacket(c, 0.0, self.omega) for c in centers))
                    for amp, centers in terms]
        return superposition(EXTERNAL, branches)


@dataclass(frozen=True, eq=False)
class PartitionMap:
    """Symplectic map from external to CM/relational coordinates."""

    masses: tuple
    matrix: np.ndarray
    inverse: np.ndarray

    @property
    def n_particles(self) -> int:
        return len(self.masses)

    @property
    def position_block(self) -> np.ndarray:
        n = self.n_particles
        return self.matrix[:n, :n]

    @property
    def momentum_block(self) -> np.ndarray:
        n = self.n_particles
        return self.matrix[n:, n:]


def _canonical_omega(n: int) -> np.ndarray:
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def build_partition_map(masses) -> PartitionMap:
    """Construct the CM/relational transform for the given masses.

    For a single particle the map is the identity with the lone
    coordinate relabeled as the center of mass.
    """
    masses = tuple(float(m) for m in masses)
    if len(masses) < 1:
        raise ValueError("need at least one mass")
    if any(m <= 0 for m in masses):
        raise ValueError("masses must be positive")
    n = len(masses)
    frac = np.array(masses) / sum(masses)
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    a[0, :] = frac
    b[0, :] = 1.0
    for i in range(1, n):
        a[i, 0] = -1.0
        a[i, i] = 1.0
        b[i, :] = -frac[i]
        b[i, i] += 1.0
    t = np.block([[a, np.zeros((n, n))], [np.zeros((n, n)), b]])
    pmap = PartitionMap(masses=masses, matrix=t, inverse=np.linalg.inv(t))
    if not check_canonical(pmap):
        raise RuntimeError("constructed map failed the symplectic check")
    return pmap


def check_canonical(pmap: PartitionMap, tol: float = SYMPLECTIC_TOL) -> bool:
    """True iff T Omega T^T = Omega, i.e. the new coordinates satisfy the
    canonical commutation relations with no cross terms."""
    omega = _canonical_omega(pmap.n_particles)
    residual = pmap.matrix @ omega @ pmap.matrix.T - omega
    return float(np.max(np.abs(residual))) <= tol


def transformed_covariance(pmap: PartitionMap, omegas) -> np.ndarray:
    """Phase-space covariance of a product of packets after the map.

    Input packets are uncorrelated with position variance 1/(4 w_k) and
    momentum variance w_k per particle; the output is T Sigma T^T in
    (x-block, p-block) ordering.
    """
    omegas = np.asarray(omegas, dtype=float)
    n = pmap.n_particles
    if omegas.shape != (n,):
        raise DimensionMismatchError("one frequency per particle")
    sigma = np.diag(np.concatenate([1.0 / (4.0 * omegas), omegas]))
    return pmap.matrix @ sigma @ pmap.matrix.T


def covariance_report(pmap: PartitionMap, omegas):
    """Marginal slot frequencies plus the dropped inter-slot correlations.

    Returns (slot_omegas, correlation_matrix, max_off_diagonal). Slot
    frequencies are fixed by the exact marginal position variances,
    w_s = 1 / (4 var_x_s). The correlation matrix covers the full
    2N-dimensional transformed covariance.
    """
    sigma = transformed_covariance(pmap, omegas)
    n = pmap.n_particles
    var_x = np.diag(sigma)[:n]
    slot_omegas = 1.0 / (4.0 * var_x)
    scale = np.sqrt(np.diag(sigma))
    corr = sigma / np.outer(scale, scale)
    off = corr - np.diag(np.diag(corr))
    return slot_omegas, corr, float(np.max(np.abs(off)))


def to_cm_relational(state: ProductStateSuperposition,
                     pmap: PartitionMap) -> ProductStateSuperposition:
    """Rewrite an external product-state superposition in CM/relational slots.

    Branch centers and kicks map through the linear transform; widths are
    set from the exact transformed marginals. Amplitudes are untouched.
    """
    if state.partition != EXTERNAL:
        raise PartitionTagError("input must be tagged external")
    n = pmap.n_particles
    if state.n_slots != n:
        raise DimensionMismatchError(
            f"state has {state.n_slots} slots, map expects {n}")
    new_branches = []
    for amp, packets in zip(state.amplitudes, state.factors):
        centers = np.array([w.center for w in packets])
        kicks = np.array([w.kick for w in packets])
        omegas = np.array([w.omega for w in packets])
        slot_omegas, _, _ = covariance_report(pmap, omegas)
        new_centers = pmap.position_block @ centers
        new_kicks = pmap.momentum_block @ kicks
        new_branches.append((amp, tuple(
            Wavepacket(c, k, w)
            for c, k, w in zip(new_centers, new_kicks, slot_omegas))))
    out = ProductStateSuperposition(
        CM_RELATIONAL,
        np.array([b[0] for b in new_branches], dtype=complex),
        tuple(b[1] for b in new_branches))
    return normalized(out)


def from_cm_relational(state: ProductStateSuperposition,
                       pmap: PartitionMap) -> ProductStateSuperposition:
    """Inverse transform, returning branch centers to external coordinates."""
    if state.partition != CM_RELATIONAL:
        raise PartitionTagError("input must be tagged cm-relational")
    n = pmap.n_particles
    if state.n_slots != n:
        raise DimensionMismatchError("slot count does not match the map")
    inv_x = np.linalg.inv(pmap.position_block)
    inv_p = np.linalg.inv(pmap.momentum_block)
    new_branches = []
    for amp, packets in zip(state.amplitudes, state.factors):
        centers = inv_x @ np.array([w.center for w in packets])
        kicks = inv_p @ np.array([w.kick for w in packets])
        # invert the width map through the covariance, slot marginals in,
        # particle marginals out
        slot_omegas = np.array([w.omega for w in packets])
        sigma = np.diag(np.concatenate([1.0 / (4.0 * slot_omegas), slot_omegas]))
        back = pmap.inverse @ sigma @ pmap.inverse.T
        particle_omegas = 1.0 / (4.0 * np.diag(back)[:n])
        new_branches.append((amp, tuple(
            Wavepacket(c, k, w)
            for c, k, w in zip(centers, kicks, particle_omegas))))
    out = ProductStateSuperposition(
        EXTERNAL,
        np.array([b[0] for b in new_branches], dtype=complex),
        tuple(b[1] for b in new_branches))
    return normalized(out)


@dataclass(frozen=True, eq=False)
class DistinctnessReport:
    """Pairwise branch-overlap magnitudes per slot, with coincidence flags."""

    slot_overlaps: tuple        # one |S| matrix per slot
    coincident_slots: tuple     # slot indices where some branch pair coincides
    coincident_pairs: tuple     # (slot, i, j) triples


def branch_distinctness(state: ProductStateSuperposition,
                        tol: float = COINCIDENCE_TOL) -> DistinctnessReport:
    """Report which slots fail to distinguish the branches.

    A slot is flagged when two branch packets have overlap magnitude
    above 1 - tol, e.g. equal centers of mass arising from different
    external configurations.
    """
    mats = []
    flagged = []
    pairs = []
    for s in range(state.n_slots):
        mag = np.abs(slot_gram(state, s))
        mats.append(mag)
        hit = False
        for i in range(state.n_branches):
            for j in range(i + 1, state.n_branches):
                if mag[i, j] > 1.0 - tol:
                    pairs.append((s, i, j))
                    hit = True
        if hit:
            flagged.append(s)
    return DistinctnessReport(tuple(mats), tuple(flagged), tuple(pairs))
