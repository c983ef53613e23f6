"""Gaussian wavepackets as regularized position/momentum kets, and the
truncated Fock-space operations (squeeze, displace) used to build them.

A packet with center x0, momentum kick p0 and frequency omega has the
normalized position profile

    psi(x) = (2 omega / pi)^(1/4) exp[-omega (x - x0)^2 + i p0 (x - x0)].

Its width parameter is b = (1 / 2 omega)^(1/2); two equal-frequency
packets overlap as exp[-(x - x')^2 / (2 b)^2] after unit normalization.
The divergent delta-like normalization, under which the self-overlap is
1 / (b sqrt(pi)), is exposed through ``raw=True`` flags. Sharp position
kets are realized only as b -> 0 parameter sequences.

Everything here is a pure function over immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import (
    StatisticsError,
    TruncationOverflowError,
    WidthMismatchError,
)

LEAK_THRESHOLD = 1e-6
DEFAULT_TRUNCATION = 32


@dataclass(frozen=True)
class Wavepacket:
    """Normalized Gaussian mode standing in for a position/momentum ket."""

    center: float
    kick: float
    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    @property
    def width(self) -> float:
        """Width parameter b = (1 / 2 omega)^(1/2)."""
        return float(1.0 / np.sqrt(2.0 * self.omega))

    def profile(self, x):
        """Position-space amplitude psi(x)."""
        x = np.asarray(x, dtype=float)
        return ((2.0 * self.omega / np.pi) ** 0.25
                * np.exp(-self.omega * (x - self.center) ** 2
                         + 1j * self.kick * (x - self.center)))

    def momentum_profile(self, p):
        """Momentum-space amplitude, the Fourier transform of profile()."""
        p = np.asarray(p, dtype=float)
        a = self.omega
        return ((1.0 / (2.0 * np.pi * a)) ** 0.25
                * np.exp(-((p - self.kick) ** 2) / (4.0 * a)
                         - 1j * p * self.center))


def omega_for_width(b: float) -> float:
    """Frequency whose packet width equals ``b``."""
    if not b > 0:
        raise ValueError("width must be positive")
    return 1.0 / (2.0 * b * b)


def position_wavepacket(center: float, omega: float) -> Wavepacket:
    """Finite-width stand-in for the position ket |x = center>."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    return Wavepacket(center=float(center), kick=0.0, omega=float(omega))


def momentum_wavepacket(kick: float, omega: float) -> Wavepacket:
    """Finite-width stand-in for the momentum ket |p = kick>.

    The momentum-space profile is a Gaussian centered at ``kick`` whose
    width is the Fourier dual of the position packet's. Realized as an
    anti-squeezed packet: the stored frequency is omega / 4, giving a
    position width of 2b (the reciprocal of b at omega = 1).
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    return Wavepacket(center=0.0, kick=float(kick), omega=float(omega) / 4.0)


def _pair_integral(bra: Wavepacket, ket: Wavepacket, moment: int = 0) -> complex:
    """Exact Gaussian integral <bra| x^moment |ket> for arbitrary widths."""
    a1, x1, p1 = bra.omega, bra.center, bra.kick
    a2, x2, p2 = ket.omega, ket.center, ket.kick
    total = a1 + a2
    b_lin = 2.0 * a1 * x1 + 2.0 * a2 * x2 + 1j * (p2 - p1)
    log_pref = 0.25 * np.log(4.0 * a1 * a2) - 0.5 * np.log(total)
    exponent = (b_lin * b_lin / (4.0 * total)
                - a1 * x1 * x1 - a2 * x2 * x2
                + 1j * (p1 * x1 - p2 * x2))
    base = np.exp(log_pref + exponent)
    if moment == 0:
        return complex(base)
    if moment == 1:
        return complex(base * b_lin / (2.0 * total))
    raise ValueError("only moments 0 and 1 are supported")


def overlap(bra: Wavepacket, ket: Wavepacket, raw: bool = False,
            allow_unequal_omega: bool = False) -> complex:
    """Inner product <bra|ket> of two wavepackets.

    For equal frequencies the closed form is

        exp[-w dx^2/2 - dp^2/(8 w) + i dx (p1 + p2)/2],

    with dx = x1 - x2, dp = p1 - p2; kick-free packets reduce to the
    Gaussian exp[-(x - x')^2 / (2 b)^2] after unit normalization.
    ``raw=True`` rescales by 1 / (b sqrt(pi)) so that the self-overlap
    matches the delta-like ket convention.

    Packets of different frequency require ``allow_unequal_omega=True``,
    in which case the general two-Gaussian integral is evaluated (raw
    rescaling then uses the geometric-mean width).

    Raises:
        WidthMismatchError: frequencies differ and the flag is not set.
    """
    if not np.isclose(bra.omega, ket.omega, rtol=1e-12, atol=0.0):
        if not allow_unequal_omega:
            raise WidthMismatchError(
                f"packet frequencies {bra.omega} and {ket.omega} differ; "
                "pass allow_unequal_omega=True for the general integral")
        value = _pair_integral(bra, ket)
        b_eff = np.sqrt(bra.width * ket.width)
        return complex(value / (b_eff * np.sqrt(np.pi))) if raw else value
    w = bra.omega
    dx = bra.center - ket.center
    dp = bra.kick - ket.kick
    value = np.exp(-0.5 * w * dx * dx - dp * dp / (8.0 * w)
                   + 0.5j * dx * (bra.kick + ket.kick))
    if raw:
        value /= bra.width * np.sqrt(np.pi)
    return complex(value)


def position_moment(bra: Wavepacket, ket: Wavepacket,
                    allow_unequal_omega: bool = False) -> complex:
    """Matrix element <bra| x |ket> of the position operator."""
    if not np.isclose(bra.omega, ket.omega, rtol=1e-12, atol=0.0) \
            and not allow_unequal_omega:
        raise WidthMismatchError(
            "unequal frequencies; pass allow_unequal_omega=True")
    return _pair_integral(bra, ket, moment=1)


def momentum_projection(packet: Wavepacket, p: float,
                        paper_normalization: bool = False) -> complex:
    """Momentum amplitude <p|packet>.

    With ``paper_normalization=True`` the p-independent prefactor is
    replaced by (1 / (pi omega))^(1/2), the delta-like ket convention in
    which a kick-free packet at the origin projects to
    (1/(pi w))^(1/2) exp[-p^2 / (4 w)]. The Gaussian shape is identical
    either way; only the constant differs.
    """
    value = packet.momentum_profile(p)
    if paper_normalization:
        a = packet.omega
        value *= (1.0 / (np.pi * a)) ** 0.5 / (1.0 / (2.0 * np.pi * a)) ** 0.25
    return complex(value)


# ---------------------------------------------------------------------------
# Truncated Fock space
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FockVector:
    """State vector on a truncated number basis.

    Fermionic vectors live on the two-level space {|0>, |1>}.
    """

    amplitudes: np.ndarray
    statistics: str = "boson"

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if self.statistics not in ("boson", "fermion"):
            raise StatisticsError(f"unknown statistics {self.statistics!r}")
        if self.statistics == "fermion" and amps.shape != (2,):
            raise StatisticsError("fermionic vectors have exactly 2 entries")
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("amplitudes must be a nonempty vector")
        if self.norm > 1.0 + 1e-10:
            raise ValueError("amplitudes exceed unit norm")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def fock_vacuum(dim: int = DEFAULT_TRUNCATION, statistics: str = "boson") -> FockVector:
    if statistics == "fermion":
        dim = 2
    amps = np.zeros(dim, dtype=complex)
    amps[0] = 1.0
    return FockVector(amps, statistics)


def annihilation_matrix(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, dim)), k=1).astype(complex)


def position_matrix(dim: int, omega: float = 1.0) -> np.ndarray:
    a = annihilation_matrix(dim)
    return (a + a.conj().T) / np.sqrt(2.0 * omega)


def momentum_matrix(dim: int, omega: float = 1.0) -> np.ndarray:
    a = annihilation_matrix(dim)
    return 1j * np.sqrt(omega / 2.0) * (a.conj().T - a)


def _tail_population(vec: np.ndarray, keep: int) -> float:
    return float(np.sum(np.abs(vec[keep:]) ** 2))


def _checked_truncation(vec: np.ndarray, keep: int, what: str) -> np.ndarray:
    leaked = _tail_population(vec, keep)
    if leaked > LEAK_THRESHOLD:
        raise TruncationOverflowError(
            f"{what} leaked norm {leaked:.3e} beyond level {keep}; "
            "increase the truncation dimension")
    out = vec[:keep]
    return out / np.linalg.norm(out)


def squeeze(state: FockVector, r: float, pad: int = 32) -> FockVector:
    """Apply the squeezing operator exp[r (a a - a+ a+)].

    Fermionic states are left unchanged (Grassmann algebra collapses the
    generator), which preserves both occupation states exactly. Bosonic
    states are evolved on a padded space; the result is truncated back
    and renormalized. Note the generator carries twice the conventional
    squeezing rate: the position variance of a squeezed vacuum shrinks
    by exp(-4 r).

    Raises:
        TruncationOverflowError: population leaked past the truncation
            exceeds the 1e-6 threshold.
    """
    if state.statistics == "fermion":
        return state
    dim = state.dim
    big = dim + pad
    a = annihilation_matrix(big)
    gen = r * (a @ a - a.conj().T @ a.conj().T)
    vec = np.zeros(big, dtype=complex)
    vec[:dim] = state.amplitudes
    vec = expm(gen) @ vec
    return FockVector(_checked_truncation(vec, dim, "squeeze"), "boson")


def displace(state: FockVector, gamma: complex, pad: int = 32) -> FockVector:
    """Apply the displacement operator exp[a+ gamma - gamma* a].

    Only bosonic input is accepted; Grassmann-valued displacement is out
    of scope. The expectation of the annihilation operator on a displaced
    vacuum equals gamma up to truncation error.
    """
    if state.statistics == "fermion":
        raise StatisticsError("displacement of fermionic states is not supported")
    dim = state.dim
    big = dim + pad
    a = annihilation_matrix(big)
    gen = gamma * a.conj().T - np.conj(gamma) * a
    vec = np.zeros(big, dtype=complex)
    vec[:dim] = state.amplitudes
    vec = expm(gen) @ vec
    return FockVector(_checked_truncation(vec, dim, "displace"), "boson")


def fock_representation(packet: Wavepacket, dim: int = 48, pad: int = 32) -> FockVector:
    """Truncated number-basis amplitudes of a wavepacket on its own ladder.

    Every packet is a squeezed displaced vacuum relative to the ladder at
    its frequency: position variance 1/(4 w) against the ground state's
    1/(2 w), i.e. squeezing parameter r = ln(2)/4 in the convention of
    :func:`squeeze`, displaced to (center, kick). The global phase is
    fixed so that number-basis inner products reproduce :func:`overlap`
    (within truncation error).
    """
    if dim < 8:
        raise ValueError("truncation dimension must be at least 8")
    w = packet.omega
    big = dim + pad
    a = annihilation_matrix(big)
    ad = a.conj().T
    vec = np.zeros(big, dtype=complex)
    vec[0] = 1.0
    vec = expm(np.log(2.0) / 4.0 * (a @ a - ad @ ad)) @ vec
    gamma = np.sqrt(w / 2.0) * packet.center + 1j * packet.kick / np.sqrt(2.0 * w)
    vec = expm(gamma * ad - np.conj(gamma) * a) @ vec
    # Weyl displacement leaves a phase referenced to the midpoint; shift
    # the reference to the packet center used by profile()
    vec *= np.exp(-0.5j * packet.kick * packet.center)
    return FockVector(_checked_truncation(vec, dim, "fock_representation"), "boson")


def position_eigenket_series(center: float, omega: float, dim: int = 48) -> np.ndarray:
    """Truncated series of the exact position eigenket
    (w/pi)^(1/4) exp[-i x' p] exp[-(a+)^2 / 2] |0>.

    The full series has divergent norm (it is the infinitely squeezed
    limit), so the returned vector is a raw truncation, not a state; its
    even amplitudes satisfy c_{2k} = (-1/2)^k sqrt((2k)!) / k! times the
    overall prefactor. Useful as the symbolic-expansion reference for the
    finite-width representation above.
    """
    if dim < 8:
        raise ValueError("truncation dimension must be at least 8")
    series = np.zeros(dim, dtype=complex)
    series[0] = 1.0
    for k in range(1, dim // 2 + (dim % 2)):
        if 2 * k >= dim:
            break
        series[2 * k] = series[2 * k - 2] * (-0.5) \
            * np.sqrt((2.0 * k) * (2.0 * k - 1.0)) / k
    shift = expm(-1j * center * momentum_matrix(dim, omega))
    return (omega / np.pi) ** 0.25 * (shift @ series)
