"""Kahler triples (metric, symplectic form, complex structure) on finite
phase spaces, for bosonic and fermionic Gaussian states.

Two basis orderings are supported and always recorded explicitly:

* ``position-momentum-blocked``: operator vector (q_1..q_N, p_1..p_N),
  all components Hermitian.
* ``fock-paired``: operator vector (a_1, a_1+, ..., a_N, a_N+) with
  adjacent ladder pairs.

The two are related by a per-mode linear map; see
:func:`ordering_change_matrix`. Conventions that look inconsistent across
orderings (a real canonical symplectic form versus one with +-i entries)
are images of each other under this map.

All values are immutable after construction and every operation is a pure
function, so concurrent use needs no synchronization.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    IncompatibleStructureError,
    SingularFormError,
)

DEFAULT_TOL = 1e-12
SYMMETRY_TOL = 1e-14


class Ordering(enum.Enum):
    POSITION_MOMENTUM = "position-momentum-blocked"
    FOCK_PAIRED = "fock-paired"


class Statistics(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"


@dataclass(frozen=True)
class PhaseSpaceLayout:
    """Dimension, basis ordering and statistics of a phase space."""

    n_modes: int
    ordering: Ordering = Ordering.POSITION_MOMENTUM
    statistics: Statistics = Statistics.BOSON

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be a positive integer")

    @property
    def dim(self) -> int:
        return 2 * self.n_modes


def _max_abs(m) -> float:
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def canonical_symplectic_form(n_modes: int,
                              ordering: Ordering = Ordering.POSITION_MOMENTUM) -> np.ndarray:
    """Bosonic symplectic form in the requested ordering.

    In (q, p) blocked ordering this is the real form [[0, I], [-I, 0]].
    In Fock-paired ordering the same form acquires +-i entries,
    blocks [[0, -i], [i, 0]] per mode.
    """
    if ordering is Ordering.POSITION_MOMENTUM:
        eye = np.eye(n_modes)
        zero = np.zeros((n_modes, n_modes))
        return np.block([[zero, eye], [-eye, zero]])
    block = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    return np.kron(np.eye(n_modes), block).astype(complex)


def canonical_fermion_metric(n_modes: int,
                             ordering: Ordering = Ordering.POSITION_MOMENTUM) -> np.ndarray:
    """State-independent fermionic metric: identity in the Hermitian basis,
    off-diagonal pair blocks [[0, 1], [1, 0]] in the Fock-paired basis."""
    if ordering is Ordering.POSITION_MOMENTUM:
        return np.eye(2 * n_modes)
    block = np.array([[0.0, 1.0], [1.0, 0.0]])
    return np.kron(np.eye(n_modes), block)


def ordering_change_matrix(layout: PhaseSpaceLayout, omegas=None) -> np.ndarray:
    """Matrix Q such that xi_fock = Q @ xi_qp.

    For bosons the per-mode map depends on the ladder frequency,
    a = sqrt(w/2) (x + i p / w); ``omegas`` defaults to 1 for every mode.
    Fermionic ladders are dimensionless, a = (x + i p) / sqrt(2).
    """
    n = layout.n_modes
    if omegas is None:
        omegas = np.ones(n)
    omegas = np.asarray(omegas, dtype=float)
    if omegas.shape != (n,):
        raise DimensionMismatchError("need one frequency per mode")
    q = np.zeros((2 * n, 2 * n), dtype=complex)
    for k, w in enumerate(omegas):
        if layout.statistics is Statistics.FERMION:
            cx, cp = 1.0 / np.sqrt(2.0), 1.0j / np.sqrt(2.0)
        else:
            cx, cp = np.sqrt(w / 2.0), 1.0j / np.sqrt(2.0 * w)
        q[2 * k, k] = cx
        q[2 * k, n + k] = cp
        q[2 * k + 1, k] = np.conj(cx)
        q[2 * k + 1, n + k] = np.conj(cp)
    return q


def to_position_momentum(matrix: np.ndarray, layout: PhaseSpaceLayout,
                         omegas=None) -> np.ndarray:
    """Convert a bilinear-form matrix (G or Omega) from the layout's
    ordering to position-momentum-blocked ordering."""
    if layout.ordering is Ordering.POSITION_MOMENTUM:
        return np.asarray(matrix)
    q = ordering_change_matrix(layout, omegas)
    qinv = np.linalg.inv(q)
    return qinv @ np.asarray(matrix) @ qinv.T


def complex_structure(g: np.ndarray, omega: np.ndarray,
                      tol: float = DEFAULT_TOL) -> np.ndarray:
    """Complex structure J = -G Omega^{-1} from a metric and symplectic form.

    The equivalent expression Omega G^{-1} is evaluated as well; the two
    must agree to ``tol`` or the inputs are rejected as incompatible.

    Raises:
        DimensionMismatchError: shapes differ or are not square.
        SingularFormError: Omega (or G) is degenerate.
        IncompatibleStructureError: the two formulas disagree.
    """
    g = np.asarray(g)
    omega = np.asarray(omega)
    if g.shape != omega.shape or g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatchError(
            f"incompatible shapes {g.shape} and {omega.shape}")
    scale = max(_max_abs(omega), 1.0)
    if np.abs(np.linalg.det(omega)) <= (tol * scale) ** omega.shape[0]:
        raise SingularFormError("symplectic form is degenerate")
    if np.abs(np.linalg.det(g)) <= (tol * max(_max_abs(g), 1.0)) ** g.shape[0]:
        raise SingularFormError("metric is degenerate")
    j1 = -g @ np.linalg.inv(omega)
    j2 = omega @ np.linalg.inv(g)
    if _max_abs(j1 - j2) > max(tol, tol * _max_abs(j1)):
        raise IncompatibleStructureError(
            "-G Omega^-1 and Omega G^-1 disagree; inputs are not a "
            "compatible metric/symplectic pair")
    return j1


def check_kahler_compatible(j: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff J^2 = -I holds entrywise to ``tol``."""
    j = np.asarray(j)
    if j.ndim != 2 or j.shape[0] != j.shape[1]:
        raise DimensionMismatchError("J must be square")
    return _max_abs(j @ j + np.eye(j.shape[0])) <= tol


@dataclass(frozen=True, eq=False)
class KahlerStructure:
    """Validated triple (G, Omega, J) plus the one-point function z.

    Use :func:`kahler_structure` to construct; the initializer checks all
    invariants (symmetries, J^2 = -I, the relation between the three
    operators, positive-definiteness of G on the Hermitian basis, and
    z = 0 for fermions).
    """

    layout: PhaseSpaceLayout
    g: np.ndarray
    omega: np.ndarray
    j: np.ndarray
    z: np.ndarray
    tol: float = DEFAULT_TOL
    ladder_omegas: tuple = field(default=None)

    def __post_init__(self):
        dim = self.layout.dim
        for name, m in (("G", self.g), ("Omega", self.omega), ("J", self.j)):
            if np.shape(m) != (dim, dim):
                raise DimensionMismatchError(
                    f"{name} has shape {np.shape(m)}, expected {(dim, dim)}")
        if np.shape(self.z) != (dim,):
            raise DimensionMismatchError("z must have length 2N")
        if _max_abs(self.g - self.g.T) > SYMMETRY_TOL:
            raise IncompatibleStructureError("metric is not symmetric")
        if _max_abs(self.omega + self.omega.T) > SYMMETRY_TOL:
            raise IncompatibleStructureError("symplectic form is not antisymmetric")
        if not check_kahler_compatible(self.j, self.tol):
            raise IncompatibleStructureError("J^2 != -I")
        jref = complex_structure(self.g, self.omega, self.tol)
        if _max_abs(self.j - jref) > self.tol:
            raise IncompatibleStructureError("J does not match -G Omega^-1")
        g_qp = to_position_momentum(self.g, self.layout, self.ladder_omegas)
        if _max_abs(g_qp.imag) > 1e-10:
            raise IncompatibleStructureError(
                "metric is not real in the Hermitian basis")
        if np.min(np.linalg.eigvalsh(g_qp.real)) <= 0:
            raise IncompatibleStructureError("metric is not positive-definite")
        if self.layout.statistics is Statistics.FERMION:
            if _max_abs(self.z) > 0:
                raise IncompatibleStructureError(
                    "fermionic one-point function must vanish")
            gref = canonical_fermion_metric(self.layout.n_modes,
                                            self.layout.ordering)
            if _max_abs(self.g - gref) > self.tol:
                raise IncompatibleStructureError(
                    "fermionic metric must equal its canonical form")

    @property
    def n_modes(self) -> int:
        return self.layout.n_modes


def kahler_structure(layout: PhaseSpaceLayout, g, omega, z=None,
                     tol: float = DEFAULT_TOL, ladder_omegas=None) -> KahlerStructure:
    """Build and validate a Kahler structure, deriving J from G and Omega.

    ``z`` defaults to zero (and is forced to zero for fermions).
    ``ladder_omegas`` gives the per-mode ladder frequencies used when a
    Fock-paired bosonic structure has to be mapped to the Hermitian basis
    for validation; defaults to 1.
    """
    g = np.asarray(g, dtype=complex)
    omega = np.asarray(omega, dtype=complex)
    if z is None or layout.statistics is Statistics.FERMION:
        # fermionic one-point functions are hard-zeroed, never stored
        z = np.zeros(layout.dim)
    z = np.asarray(z, dtype=complex)
    j = complex_structure(g, omega, tol)
    return KahlerStructure(layout=layout, g=g, omega=omega, j=j, z=z,
                           tol=tol, ladder_omegas=ladder_omegas)


def gaussianity_projector(structure: KahlerStructure) -> np.ndarray:
    """Projector P = (I + iJ)/2 onto the annihilator half of the mode space.

    Applied to the operator vector, P singles out the linear combinations
    that annihilate the Gaussian state labeled by J. P is idempotent and
    has rank N (trace N), since the eigenvalues of J come in +-i pairs.
    """
    dim = structure.layout.dim
    p = 0.5 * (np.eye(dim) + 1j * structure.j)
    if _max_abs(p @ p - p) > structure.tol:
        raise IncompatibleStructureError("projector is not idempotent")
    return p


def mode_transformation_check(v: np.ndarray, structure: KahlerStructure,
                              tol: float = 1e-10, omegas=None) -> bool:
    """Check that the rows of ``v`` define canonical annihilation operators.

    Each row gives an annihilation functional a_i = v_ia xi^a. For bosons
    the requirements are  Omega^{ab} v_ia v_jb = 0  and
    Omega^{ab} v*_ia v_jb = i delta_ij; for fermions the metric replaces
    the symplectic form and the right-hand side of the second condition
    is delta_ij. The conditions are evaluated in the Hermitian
    (position-momentum) basis, where conjugating coefficients implements
    the operator adjoint; Fock-paired inputs are converted first.
    """
    v = np.atleast_2d(np.asarray(v, dtype=complex))
    dim = structure.layout.dim
    if v.shape[1] != dim:
        raise DimensionMismatchError(
            f"rows of v must have length {dim}, got {v.shape[1]}")
    if structure.layout.ordering is Ordering.FOCK_PAIRED:
        q = ordering_change_matrix(structure.layout, omegas)
        v = v @ q
    if structure.layout.statistics is Statistics.BOSON:
        form = to_position_momentum(structure.omega, structure.layout,
                                    structure.ladder_omegas)
        target = 1j * np.eye(v.shape[0])
    else:
        form = to_position_momentum(structure.g, structure.layout,
                                    structure.ladder_omegas)
        target = np.eye(v.shape[0])
    first = v @ form @ v.T
    second = np.conj(v) @ form @ v.T
    return _max_abs(first) <= tol and _max_abs(second - target) <= tol


# ---------------------------------------------------------------------------
# Quadratic Hamiltonians and the fermionic-oscillator worked case
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    """Coefficient matrix h of a quadratic Hamiltonian H = (1/2) h_ab xi^a xi^b."""

    h: np.ndarray
    omega: float
    layout: PhaseSpaceLayout

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("frequency must be positive")
        h = np.asarray(self.h)
        if h.shape != (self.layout.dim, self.layout.dim):
            raise DimensionMismatchError("h must be 2N x 2N")
        if self.layout.ordering is Ordering.POSITION_MOMENTUM:
            hermitian = _max_abs(h - h.conj().T) <= SYMMETRY_TOL * max(1.0, _max_abs(h))
        else:
            # adjoint in the paired ladder basis swaps each (a, a+) pair
            n = self.layout.n_modes
            perm = np.kron(np.eye(n), np.array([[0.0, 1.0], [1.0, 0.0]]))
            hermitian = _max_abs(perm @ h.conj() @ perm - h) \
                <= SYMMETRY_TOL * max(1.0, _max_abs(h))
        if not hermitian:
            raise IncompatibleStructureError(
                "h is not Hermitian as an operator coefficient matrix")


def fermionic_oscillator_ground(omega: float):
    """Hamiltonian matrix and Kahler structure of the fermionic-oscillator
    ground state, in the Fock-paired basis xi = (a, a+).

    H = i w x p has h = [[0, i w], [-i w, 0]]; the metric is the canonical
    [[0, 1], [1, 0]], the symplectic form [[0, -i], [i, 0]], and the
    resulting complex structure diag(-i, i).
    """
    layout = PhaseSpaceLayout(1, Ordering.FOCK_PAIRED, Statistics.FERMION)
    h = np.array([[0.0, 1j * omega], [-1j * omega, 0.0]])
    g = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    om = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    return HamiltonianMatrix(h=h, omega=omega, layout=layout), \
        kahler_structure(layout, g, om)


def fermionic_oscillator_excited(omega: float) -> KahlerStructure:
    """Kahler structure of the first excited fermionic-oscillator state
    (complex structure diag(i, -i))."""
    layout = PhaseSpaceLayout(1, Ordering.FOCK_PAIRED, Statistics.FERMION)
    g = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    om = np.array([[0.0, 1.0j], [-1.0j, 0.0]])
    return kahler_structure(layout, g, om)


def bosonic_vacuum(omega: float = 1.0) -> KahlerStructure:
    """Single-mode bosonic vacuum structure in the (q, p) basis."""
    layout = PhaseSpaceLayout(1, Ordering.POSITION_MOMENTUM, Statistics.BOSON)
    g = np.diag([1.0 / omega, omega]).astype(complex)
    om = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
    return kahler_structure(layout, g, om, ladder_omegas=(omega,))
