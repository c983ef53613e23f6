"""Capacitor coupling that gives absolute position physical meaning, and
the swap-based entanglement extraction bookkeeping built on it.

A uniform field between plates of charge density +-sigma makes the
interaction energy of a charge q linear in position: a Gaussian branch
centered at x contributes q sigma x. Distinct superposition branches
then carry distinct energies, which is exactly the resource the
extraction protocol trades. Outside the plates there is no gradient and
the construction (and the protocol) is unavailable.

Extraction itself swaps entangled source modes onto fresh target modes
with mode-swap unitaries; the energy cost is the difference of
source-Hamiltonian expectations before and after. Partner-mode selection
that would minimize the cost is deliberately not implemented; reported
costs are not minima.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import (
    Bipartition,
    WavepacketDensityOperator,
    log_negativity,
    max_negativity_over_cuts,
    position_expectation,
    pure_to_density,
)
from .errors import (
    DimensionMismatchError,
    FieldRegionError,
    ProtocolNotApplicableError,
    StatisticsError,
)
from .states import CM_RELATIONAL, EXTERNAL, ProductStateSuperposition
from .wavepackets import annihilation_matrix

ENTANGLEMENT_THRESHOLD = 1e-8
SWAP_TOL = 1e-10
ALGEBRA_TOL = 1e-12


@dataclass(frozen=True)
class CapacitorZModel:
    """Parallel-plate configuration in natural units."""

    charge: float
    plate_density: float
    separation: float
    x_left: float = 0.0

    def __post_init__(self):
        if not self.separation > 0:
            raise ValueError("plate separation must be positive")
        if not np.isfinite(self.charge * self.plate_density):
            raise ValueError("coupling strength must be finite")

    @property
    def coupling(self) -> float:
        """Linear energy-per-position coefficient q sigma."""
        return self.charge * self.plate_density

    @property
    def x_right(self) -> float:
        return self.x_left + self.separation

    def contains(self, x: float) -> bool:
        return self.x_left <= x <= self.x_right


def _mass_fractions(n: int, masses) -> np.ndarray:
    if masses is None:
        masses = np.ones(n)
    masses = np.asarray(masses, dtype=float)
    if masses.shape != (n,):
        raise DimensionMismatchError("one mass per external slot")
    return masses / masses.sum()


def _cm_weights(obj, masses) -> np.ndarray:
    """Per-slot weights of the center-of-mass position operator."""
    partition = obj.partition
    n = obj.n_slots
    if partition == EXTERNAL:
        return _mass_fractions(n, masses)
    if partition == CM_RELATIONAL:
        w = np.zeros(n)
        w[0] = 1.0
        return w
    raise FieldRegionError(
        "a purely relational state has no absolute position to couple to")


def _branch_center_check(obj, z: CapacitorZModel):
    """Every branch's physical position content must sit inside the field."""
    if isinstance(obj, ProductStateSuperposition):
        branches = obj.factors
    else:
        branches = obj.terms
    check_slots = None
    if obj.partition == CM_RELATIONAL:
        check_slots = (0,)
    for branch in branches:
        slots = range(len(branch)) if check_slots is None else check_slots
        for s in slots:
            if not z.contains(branch[s].center):
                raise FieldRegionError(
                    f"branch center {branch[s].center} lies outside the "
                    f"field region [{z.x_left}, {z.x_right}]; the protocol "
                    "does not operate there")


def interaction_energy(obj, z: CapacitorZModel, masses=None) -> float:
    """Expectation q sigma <x_cm> on a state or density operator.

    External states use mass-fraction weighted particle positions (masses
    default to 1); cm-relational states read the CM slot directly, since
    the relational coordinates do not couple to the potential. All Gram
    cross terms are included.
    """
    weights = _cm_weights(obj, masses) * z.coupling
    _branch_center_check(obj, z)
    if isinstance(obj, ProductStateSuperposition):
        obj = pure_to_density(obj)
    return position_expectation(obj, weights)


def branch_energies(state: ProductStateSuperposition, z: CapacitorZModel,
                    masses=None) -> tuple:
    """Per-branch interaction energies q sigma x_cm(branch).

    Branch values are exact: a product of symmetric Gaussians has its CM
    expectation at the weighted centers.
    """
    weights = _cm_weights(state, masses)
    _branch_center_check(state, z)
    out = []
    for branch in state.factors:
        centers = np.array([w.center for w in branch])
        out.append(float(z.coupling * weights @ centers))
    return tuple(out)


# ---------------------------------------------------------------------------
# Swap unitaries and mode algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModePair:
    """One target/source mode pairing for a swap unitary.

    A full extraction uses two of these, (A, 1) and (B, 2); sources must
    be distinct modes and disjoint from the targets, so pairing a mode
    with itself is rejected.
    """

    source: int
    target: int
    statistics: str = "fermion"
    truncation: int = 16

    def __post_init__(self):
        if self.statistics not in ("boson", "fermion"):
            raise StatisticsError(f"unknown statistics {self.statistics!r}")
        if self.source == self.target:
            raise ValueError("cannot swap a mode with itself")
        if self.statistics == "boson" and self.truncation < 2:
            raise ValueError("bosonic truncation must be at least 2")


def fermion_mode_operators(n_modes: int) -> list:
    """Annihilation matrices of n fermionic modes (Jordan-Wigner chain)."""
    lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    zmat = np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2, dtype=complex)
    ops = []
    for k in range(n_modes):
        factors = [zmat] * k + [lower] + [eye] * (n_modes - k - 1)
        m = factors[0]
        for f in factors[1:]:
            m = np.kron(m, f)
        ops.append(m)
    return ops


def boson_mode_operators(n_modes: int, truncation: int) -> list:
    """Annihilation matrices of n bosonic modes on a D^n product space."""
    a = annihilation_matrix(truncation)
    eye = np.eye(truncation, dtype=complex)
    ops = []
    for k in range(n_modes):
        factors = [eye] * k + [a] + [eye] * (n_modes - k - 1)
        m = factors[0]
        for f in factors[1:]:
            m = np.kron(m, f)
        ops.append(m)
    return ops


def build_swap_unitary(pair: ModePair) -> np.ndarray:
    """Unitary exchanging the pair's two modes on their joint space.

    Fermions get the signed two-mode swap (exact on the 4-dimensional
    space); bosons get the occupation-permutation |n, m> -> |m, n>, which
    realizes the conjugation relations exactly on the truncated space.
    The returned matrix is verified against those relations before being
    handed back.
    """
    if pair.statistics == "fermion":
        u = np.zeros((4, 4), dtype=complex)
        u[0, 0] = 1.0
        u[1, 2] = 1.0
        u[2, 1] = 1.0
        u[3, 3] = -1.0
        a0, a1 = fermion_mode_operators(2)
        tol = 1e-14
    else:
        d = pair.truncation
        u = np.zeros((d * d, d * d), dtype=complex)
        for n in range(d):
            for m in range(d):
                u[m * d + n, n * d + m] = 1.0
        a0, a1 = boson_mode_operators(2, d)
        tol = SWAP_TOL
    udag = u.conj().T
    checks = [udag @ a0 @ u - a1, udag @ a1 @ u - a0,
              udag @ u - np.eye(u.shape[0])]
    if max(float(np.max(np.abs(c))) for c in checks) > tol:
        raise RuntimeError("swap construction failed its conjugation checks")
    return u


def check_extraction_condition(a_mode_a: np.ndarray, a_mode_b: np.ndarray,
                               statistics: str = "fermion",
                               tol: float = ALGEBRA_TOL) -> bool:
    """Verify that two source modes are algebraically independent.

    Fermions must anticommute in all four combinations
    {a_A, a_B}, {a_A, a_B+}, {a_A+, a_B}, {a_A+, a_B+}; bosons must
    commute likewise. This guarantees the swap operations cannot create
    entanglement that was not already present.
    """
    a = np.asarray(a_mode_a, dtype=complex)
    b = np.asarray(a_mode_b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatchError("mode operators live on different spaces")
    if statistics == "fermion":
        def bracket(x, y):
            return x @ y + y @ x
    elif statistics == "boson":
        def bracket(x, y):
            return x @ y - y @ x
    else:
        raise StatisticsError(f"unknown statistics {statistics!r}")
    pairs = ((a, b), (a, b.conj().T), (a.conj().T, b),
             (a.conj().T, b.conj().T))
    return all(float(np.max(np.abs(bracket(x, y)))) <= tol for x, y in pairs)


# ---------------------------------------------------------------------------
# Energy cost of extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PositionCoupling:
    """Hamiltonian restricted to the relevant modes: sum_s c_s x_s + const."""

    coefficients: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coefficients",
                           np.asarray(self.coefficients, dtype=float))

    @classmethod
    def cm_coupling(cls, z: CapacitorZModel, n_slots: int) -> "PositionCoupling":
        c = np.zeros(n_slots)
        c[0] = z.coupling
        return cls(c)

    @classmethod
    def external_coupling(cls, z: CapacitorZModel, masses) -> "PositionCoupling":
        frac = np.asarray(masses, dtype=float)
        frac = frac / frac.sum()
        return cls(z.coupling * frac)

    def energy(self, rho: WavepacketDensityOperator) -> float:
        if self.coefficients.shape != (rho.n_slots,):
            raise DimensionMismatchError(
                "Hamiltonian couples modes outside the declared cut")
        return position_expectation(rho, self.coefficients) + self.constant


@dataclass(frozen=True)
class ExtractionResult:
    """Energy bookkeeping of one extraction run.

    The final state is reported three ways: the statistical mixture of
    branch products, and each single-branch collapse. None of these is an
    energy minimum (partner modes are not selected).
    """

    initial_energy: float
    mixture_energy: float
    branch_final_energies: tuple
    negativity: float

    @property
    def delta_mixture(self) -> float:
        return self.mixture_energy - self.initial_energy

    @property
    def delta_branches(self) -> tuple:
        return tuple(e - self.initial_energy for e in self.branch_final_energies)


def _dephased(rho: WavepacketDensityOperator) -> WavepacketDensityOperator:
    c = np.diag(np.diag(rho.coefficients))
    op = WavepacketDensityOperator(rho.partition, rho.terms, c)
    tr = op.trace().real
    return WavepacketDensityOperator(rho.partition, rho.terms, c / tr, tr)


def _single_branch(rho: WavepacketDensityOperator, i: int) -> WavepacketDensityOperator:
    return WavepacketDensityOperator(rho.partition, (rho.terms[i],),
                                     np.eye(1, dtype=complex))


def extraction_energy_cost(hamiltonian: PositionCoupling,
                           rho_initial: WavepacketDensityOperator,
                           rho_final: WavepacketDensityOperator = None,
                           cut: Bipartition = None,
                           threshold: float = ENTANGLEMENT_THRESHOLD):
    """Energy difference Tr[rho_final H] - Tr[rho_initial H].

    The initial operator must be entangled across the extraction cut
    (log-negativity above ``threshold``); otherwise there is nothing to
    extract and the protocol cannot even be performed, which is raised as
    :class:`ProtocolNotApplicableError`. Group-averaged (twirled) inputs
    always end up there.

    With ``rho_final`` given, returns that single difference. Otherwise
    returns an :class:`ExtractionResult` covering the statistical mixture
    and both single-branch collapses.
    """
    negativity = (log_negativity(rho_initial, cut) if cut is not None
                  else max_negativity_over_cuts(rho_initial))
    if negativity <= threshold:
        raise ProtocolNotApplicableError(
            "initial state carries no extractable entanglement "
            f"(log-negativity {negativity:.3e} <= {threshold:.0e}); "
            "the extraction protocol cannot be performed")
    e_initial = hamiltonian.energy(rho_initial)
    if rho_final is not None:
        return hamiltonian.energy(rho_final) - e_initial
    mixture = _dephased(rho_initial)
    e_mixture = hamiltonian.energy(mixture)
    branch_energies_final = tuple(
        hamiltonian.energy(_single_branch(rho_initial, i))
        for i in range(rho_initial.n_terms))
    return ExtractionResult(
        initial_energy=e_initial,
        mixture_energy=e_mixture,
        branch_final_energies=branch_energies_final,
        negativity=negativity,
    )
