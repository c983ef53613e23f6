"""Pure N-slot states as weighted sums of product-wavepacket terms.

A state is a list of branches; each branch carries a complex amplitude
and one wavepacket per tensor slot. Branches are generally non-orthogonal,
so norms and expectations always go through the Gram matrix of pairwise
term overlaps. Partition tags record which factorization the slots refer
to (external particles, center-of-mass plus relational coordinates, or
purely relational coordinates after the center of mass has been removed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .wavepackets import Wavepacket, overlap, position_moment

EXTERNAL = "external"
CM_RELATIONAL = "cm-relational"
RELATIONAL = "relational"
_TAGS = (EXTERNAL, CM_RELATIONAL, RELATIONAL)


@dataclass(frozen=True, eq=False)
class ProductStateSuperposition:
    """Sum_i a_i |w_i1> x ... x |w_iS> with a recorded partition tag."""

    partition: str
    amplitudes: np.ndarray
    factors: tuple  # tuple of branches, each a tuple of Wavepacket per slot

    def __post_init__(self):
        if self.partition not in _TAGS:
            raise ValueError(f"unknown partition tag {self.partition!r}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "factors",
                           tuple(tuple(branch) for branch in self.factors))
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("need at least one branch")
        if len(self.factors) != amps.size:
            raise DimensionMismatchError("one factor tuple per amplitude")
        slots = {len(branch) for branch in self.factors}
        if len(slots) != 1:
            raise DimensionMismatchError("all branches need the same slot count")

    @property
    def n_branches(self) -> int:
        return self.amplitudes.size

    @property
    def n_slots(self) -> int:
        return len(self.factors[0])

    def slot_packets(self, slot: int) -> tuple:
        return tuple(branch[slot] for branch in self.factors)


def slot_gram(state: ProductStateSuperposition, slot: int) -> np.ndarray:
    """Gram matrix S_ij = <w_i|w_j> of one slot's branch packets."""
    packets = state.slot_packets(slot)
    n = len(packets)
    s = np.eye(n, dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            # deliberate general-width call: slots may mix packet widths
            v = overlap(packets[i], packets[j], allow_unequal_omega=True)
            s[i, j] = v
            s[j, i] = np.conj(v)
    return s


def term_gram(state: ProductStateSuperposition, slots=None) -> np.ndarray:
    """Gram matrix of the product terms, restricted to ``slots`` if given."""
    if slots is None:
        slots = range(state.n_slots)
    s = np.ones((state.n_branches, state.n_branches), dtype=complex)
    for slot in slots:
        s *= slot_gram(state, slot)
    return s


def state_norm(state: ProductStateSuperposition) -> float:
    s = term_gram(state)
    val = np.conj(state.amplitudes) @ s @ state.amplitudes
    return float(np.sqrt(max(val.real, 0.0)))


def normalized(state: ProductStateSuperposition) -> ProductStateSuperposition:
    """Rescale amplitudes to unit Gram norm."""
    n = state_norm(state)
    if n == 0.0:
        raise ValueError("state has zero norm")
    return ProductStateSuperposition(state.partition, state.amplitudes / n,
                                     state.factors)


def superposition(partition: str, branches) -> ProductStateSuperposition:
    """Build a unit-norm state from (amplitude, [packets...]) pairs."""
    amps = np.array([b[0] for b in branches], dtype=complex)
    factors = tuple(tuple(b[1]) for b in branches)
    return normalized(ProductStateSuperposition(partition, amps, factors))


def product_state(partition: str, packets) -> ProductStateSuperposition:
    """Single-branch product state."""
    return superposition(partition, [(1.0, tuple(packets))])


def weighted_position_expectation(state: ProductStateSuperposition,
                                  weights) -> float:
    """Expectation of sum_s weights[s] * x_s on a normalized pure state,
    including all Gram cross terms."""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (state.n_slots,):
        raise DimensionMismatchError("one weight per slot")
    grams = [slot_gram(state, s) for s in range(state.n_slots)]
    n = state.n_branches
    total = np.zeros((n, n), dtype=complex)
    for s, w in enumerate(weights):
        if w == 0.0:
            continue
        moment = np.empty((n, n), dtype=complex)
        packets = state.slot_packets(s)
        for i in range(n):
            for j in range(n):
                moment[i, j] = position_moment(packets[i], packets[j],
                                               allow_unequal_omega=True)
        block = moment.copy()
        for t in range(state.n_slots):
            if t != s:
                block *= grams[t]
        total += w * block
    gram_all = np.ones((n, n), dtype=complex)
    for g in grams:
        gram_all = gram_all * g
    a = state.amplitudes
    norm = np.conj(a) @ gram_all @ a
    value = np.conj(a) @ total @ a
    return float((value / norm).real)
