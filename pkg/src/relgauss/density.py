"""Density operators over non-orthogonal product-wavepacket bases.

An operator is a coefficient matrix C over product terms,
rho = sum_ij C_ij |term_i><term_j|, together with the Gram matrix
S_ij = <term_i|term_j> of the terms. Finite-width packets are never
exactly orthogonal, so every trace, spectrum and norm is computed by
mapping to an orthonormal frame: diagonalize S, drop directions below
the rank tolerance (coincident branches are legitimate inputs and must
not crash), and conjugate C with the square-root factors.

The translation group average over the center of mass reduces to a
partial trace over the CM slot; the divergent scale of the continuum
average is returned as a separate number and never feeds back into any
physical quantity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (
    DimensionMismatchError,
    MixedStateError,
    PartitionTagError,
)
from .states import (
    CM_RELATIONAL,
    RELATIONAL,
    ProductStateSuperposition,
)
from .wavepackets import Wavepacket, overlap, position_moment

log = logging.getLogger(__name__)

RANK_TOL = 1e-12
HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class Bipartition:
    """Slot split (A | B): nonempty, disjoint, covering all slots."""

    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        if not self.a or not self.b:
            raise ValueError("both sides of a bipartition must be nonempty")
        if set(self.a) & set(self.b):
            raise ValueError("bipartition sides must be disjoint")

    @classmethod
    def of(cls, n_slots: int, a) -> "Bipartition":
        a = tuple(a)
        b = tuple(s for s in range(n_slots) if s not in a)
        return cls(a, b)

    def check_covers(self, n_slots: int):
        if set(self.a) | set(self.b) != set(range(n_slots)):
            raise ValueError("bipartition must cover all slots")


def _pair_overlap(bra: Wavepacket, ket: Wavepacket) -> complex:
    return overlap(bra, ket, allow_unequal_omega=True)


def _terms_gram(terms, slots) -> np.ndarray:
    n = len(terms)
    s = np.ones((n, n), dtype=complex)
    for slot in slots:
        block = np.empty((n, n), dtype=complex)
        for i in range(n):
            block[i, i] = 1.0
            for j in range(i + 1, n):
                v = _pair_overlap(terms[i][slot], terms[j][slot])
                block[i, j] = v
                block[j, i] = np.conj(v)
        s *= block
    return s


def orthonormal_frame(gram: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Factor A with A^dagger A = S, rows spanning an orthonormal frame.

    Directions with Gram eigenvalue at or below ``rank_tol`` are projected
    out (rank reduction is logged); conjugating a coefficient matrix as
    A C A^dagger yields the operator's matrix in the orthonormal frame.
    """
    gram = 0.5 * (gram + gram.conj().T)
    vals, vecs = np.linalg.eigh(gram)
    keep = vals > rank_tol
    if not np.all(keep):
        log.info("gram rank reduced from %d to %d", vals.size, int(keep.sum()))
    vals = vals[keep]
    vecs = vecs[:, keep]
    return np.diag(np.sqrt(vals)) @ vecs.conj().T


@dataclass(frozen=True, eq=False)
class WavepacketDensityOperator:
    """Unit-trace operator sum_ij C_ij |term_i><term_j| plus its Gram data.

    ``raw_scale`` records the trace divided out at the last normalization
    (the continuum average's divergent constant in disguise).
    """

    partition: str
    terms: tuple                 # product terms, one tuple of packets each
    coefficients: np.ndarray
    raw_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "terms",
                           tuple(tuple(t) for t in self.terms))
        c = np.asarray(self.coefficients, dtype=complex)
        object.__setattr__(self, "coefficients", c)
        n = len(self.terms)
        if n == 0:
            raise ValueError("operator needs at least one term")
        if c.shape != (n, n):
            raise DimensionMismatchError("coefficient matrix must be n x n")
        slots = {len(t) for t in self.terms}
        if len(slots) != 1:
            raise DimensionMismatchError("terms must share the slot count")
        object.__setattr__(self, "_gram", _terms_gram(self.terms,
                                                      range(self.n_slots)))

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @property
    def n_slots(self) -> int:
        return len(self.terms[0])

    @property
    def gram(self) -> np.ndarray:
        return self._gram

    def slot_gram(self, slots) -> np.ndarray:
        return _terms_gram(self.terms, tuple(slots))

    def trace(self) -> complex:
        return complex(np.trace(self.coefficients @ self.gram))

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        c = self.coefficients
        return float(np.max(np.abs(c - c.conj().T))) <= tol

    def orthonormal_matrix(self) -> np.ndarray:
        """The operator's matrix in an orthonormal frame of its term span."""
        a = orthonormal_frame(self.gram)
        return a @ self.coefficients @ a.conj().T

    def purity(self) -> float:
        m = self.orthonormal_matrix()
        return float(np.trace(m @ m).real)


def _normalized(partition, terms, coefficients) -> WavepacketDensityOperator:
    op = WavepacketDensityOperator(partition, terms, coefficients)
    tr = op.trace()
    if abs(tr) == 0.0:
        raise ValueError("operator has zero trace")
    if abs(tr.imag) > 1e-10 * max(1.0, abs(tr.real)):
        raise ValueError("operator trace is not real")
    return WavepacketDensityOperator(partition, terms,
                                     np.asarray(coefficients) / tr.real,
                                     raw_scale=tr.real)


def pure_to_density(state: ProductStateSuperposition) -> WavepacketDensityOperator:
    """Outer product of a pure superposition, renormalized to unit trace."""
    a = state.amplitudes
    c = np.outer(a, np.conj(a))
    return _normalized(state.partition, state.factors, c)


def partial_trace(rho: WavepacketDensityOperator,
                  traced_slots) -> WavepacketDensityOperator:
    """Trace out the given slots.

    The coefficient matrix contracts with the Gram matrix of the traced
    slots, C'_ij = C_ij <term_j|term_i>_traced; the result is renormalized
    to unit trace with the discarded scale kept on ``raw_scale``.
    """
    traced = tuple(sorted(set(traced_slots)))
    if any(s < 0 or s >= rho.n_slots for s in traced):
        raise DimensionMismatchError("traced slot out of range")
    if len(traced) == rho.n_slots:
        raise ValueError("tracing every slot yields a scalar; use trace()")
    if not traced:
        return rho
    s_traced = rho.slot_gram(traced)
    new_c = rho.coefficients * s_traced.T
    kept = tuple(s for s in range(rho.n_slots) if s not in traced)
    new_terms = tuple(tuple(t[s] for s in kept) for t in rho.terms)
    tag = rho.partition
    if tag == CM_RELATIONAL and 0 in traced:
        tag = RELATIONAL
    return _normalized(tag, new_terms, new_c)


def g_twirl(rho: WavepacketDensityOperator) -> WavepacketDensityOperator:
    """Group-average over translations, i.e. trace out the CM slot.

    Defined only on the cm-relational partition, where the translation
    action is a phase on the CM slot alone; the output carries the purely
    relational tag and reports the discarded scale on ``raw_scale``.
    """
    if rho.partition != CM_RELATIONAL:
        raise PartitionTagError(
            "the translation average is the CM trace only in the "
            "cm-relational partition")
    return partial_trace(rho, (0,))


def attach_dummy_cm(rho: WavepacketDensityOperator,
                    packet: Wavepacket) -> WavepacketDensityOperator:
    """Reattach a fixed CM factor, e.g. to re-run the twirl on its output."""
    if rho.partition != RELATIONAL:
        raise PartitionTagError("expected a purely relational operator")
    new_terms = tuple((packet,) + t for t in rho.terms)
    return WavepacketDensityOperator(CM_RELATIONAL, new_terms,
                                     rho.coefficients, rho.raw_scale)


# ---------------------------------------------------------------------------
# Entanglement quantifiers
# ---------------------------------------------------------------------------

def _entropy_of_spectrum(vals: np.ndarray) -> float:
    vals = np.clip(vals.real, 0.0, None)
    total = vals.sum()
    if total <= 0.0:
        return 0.0
    vals = vals / total
    vals = vals[vals > 1e-300]
    return float(-np.sum(vals * np.log(vals)))


def entanglement_entropy(state: ProductStateSuperposition,
                         cut: Bipartition) -> float:
    """Von Neumann entropy of the reduced state across ``cut``.

    Pure states only. The reduction contracts the branch outer product
    with the Gram matrix of the traced side; the spectrum is read off in
    an orthonormal frame of the kept side, so non-orthogonal branches are
    handled exactly. Product states give 0; two equally weighted branches
    with orthogonal factors give ln 2.
    """
    cut.check_covers(state.n_slots)
    rho = pure_to_density(state)
    reduced = partial_trace(rho, cut.b)
    vals = np.linalg.eigvalsh(reduced.orthonormal_matrix())
    return _entropy_of_spectrum(vals)


def log_negativity(rho: WavepacketDensityOperator, cut: Bipartition) -> float:
    """log2 of the trace norm of the partial transpose across ``cut``.

    Separable operators in this family give 0 (up to rank tolerance);
    a maximally entangled two-branch pure state gives 1.

    Raises:
        MixedStateError: the coefficient matrix is not Hermitian.
    """
    cut.check_covers(rho.n_slots)
    if not rho.is_hermitian():
        raise MixedStateError("log-negativity needs a Hermitian operator")
    frame_a = orthonormal_frame(rho.slot_gram(cut.a))
    frame_b = orthonormal_frame(rho.slot_gram(cut.b))
    da, db = frame_a.shape[0], frame_b.shape[0]
    n = rho.n_terms
    k = np.empty((da * db, n), dtype=complex)
    for i in range(n):
        k[:, i] = np.kron(frame_a[:, i], frame_b[:, i])
    mat = k @ rho.coefficients @ k.conj().T
    tr = np.trace(mat).real
    if tr <= 0:
        raise ValueError("operator has nonpositive trace on its span")
    mat /= tr
    mat = mat.reshape(da, db, da, db).transpose(0, 3, 2, 1).reshape(da * db, da * db)
    vals = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    return float(np.log2(np.sum(np.abs(vals))))


def max_negativity_over_cuts(rho: WavepacketDensityOperator) -> float:
    """Largest log-negativity over all slot bipartitions.

    Operators with a single slot have no cut and carry no internal
    entanglement; they report 0.
    """
    if rho.n_slots < 2:
        return 0.0
    best = 0.0
    slots = range(rho.n_slots)
    for size in range(1, rho.n_slots // 2 + 1):
        for a in combinations(slots, size):
            if 0 not in a and 2 * size == rho.n_slots:
                continue  # complement already visited
            cut = Bipartition.of(rho.n_slots, a)
            best = max(best, log_negativity(rho, cut))
    return best


def trace_distance(rho1: WavepacketDensityOperator,
                   rho2: WavepacketDensityOperator) -> float:
    """(1/2) || rho1 - rho2 ||_1 over the union of the two term bases."""
    if rho1.n_slots != rho2.n_slots:
        raise DimensionMismatchError("operators live on different slot counts")
    terms = rho1.terms + rho2.terms
    n1, n2 = rho1.n_terms, rho2.n_terms
    c = np.zeros((n1 + n2, n1 + n2), dtype=complex)
    c[:n1, :n1] = rho1.coefficients / rho1.trace().real
    c[n1:, n1:] = -rho2.coefficients / rho2.trace().real
    gram = _terms_gram(terms, range(rho1.n_slots))
    frame = orthonormal_frame(gram)
    vals = np.linalg.eigvalsh(frame @ c @ frame.conj().T)
    return float(0.5 * np.sum(np.abs(vals)))


def position_expectation(rho: WavepacketDensityOperator, weights) -> float:
    """Tr[rho sum_s weights[s] x_s] / Tr[rho] with full Gram corrections."""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (rho.n_slots,):
        raise DimensionMismatchError("one weight per slot")
    n = rho.n_terms
    grams = [rho.slot_gram((s,)) for s in range(rho.n_slots)]
    x_elems = np.zeros((n, n), dtype=complex)
    for s, w in enumerate(weights):
        if w == 0.0:
            continue
        moment = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                moment[i, j] = position_moment(rho.terms[i][s], rho.terms[j][s],
                                               allow_unequal_omega=True)
        block = moment.copy()
        for t in range(rho.n_slots):
            if t != s:
                block *= grams[t]
        x_elems += w * block
    # Tr(rho X) = sum_ij C_ij <term_j| X |term_i> = sum_ij C_ij x_elems[j, i]
    value = np.sum(rho.coefficients * x_elems.T)
    tr = rho.trace()
    return float((value / tr).real)
