import numpy as np
import pytest
from scipy.integrate import quad

import relgauss as rg
from relgauss.errors import (
    StatisticsError,
    TruncationOverflowError,
    WidthMismatchError,
)


# ---------------------------------------------------------------------------
# Quadrature oracles, independent of the closed-form algebra under test
# ---------------------------------------------------------------------------

def overlap_momentum_oracle(bra, ket):
    """Resolution-of-identity form: integrate the momentum profiles."""
    def f(p):
        return np.conj(bra.momentum_profile(p)) * ket.momentum_profile(p)
    spread = 6.0 * np.sqrt(max(bra.omega, ket.omega)) \
        + abs(bra.kick) + abs(ket.kick) + 10.0
    re, _ = quad(lambda p: f(p).real, -spread, spread, limit=200,
                 epsabs=1e-12, epsrel=1e-12)
    im, _ = quad(lambda p: f(p).imag, -spread, spread, limit=200,
                 epsabs=1e-12, epsrel=1e-12)
    return re + 1j * im


def overlap_position_oracle(bra, ket):
    def f(x):
        return np.conj(bra.profile(x)) * ket.profile(x)
    lo = min(bra.center, ket.center) - 30.0 * max(bra.width, ket.width)
    hi = max(bra.center, ket.center) + 30.0 * max(bra.width, ket.width)
    re, _ = quad(lambda x: f(x).real, lo, hi, limit=200, epsabs=1e-12)
    im, _ = quad(lambda x: f(x).imag, lo, hi, limit=200, epsabs=1e-12)
    return re + 1j * im


def fourier_transform_oracle(packet, p):
    """Direct numeric Fourier transform of the position profile."""
    lo = packet.center - 30.0 * packet.width
    hi = packet.center + 30.0 * packet.width
    re, _ = quad(lambda x: (packet.profile(x)
                            * np.exp(-1j * p * x)).real / np.sqrt(2 * np.pi),
                 lo, hi, limit=300, epsabs=1e-12)
    im, _ = quad(lambda x: (packet.profile(x)
                            * np.exp(-1j * p * x)).imag / np.sqrt(2 * np.pi),
                 lo, hi, limit=300, epsabs=1e-12)
    return re + 1j * im


class TestConstruction:
    def test_width_formula(self):
        assert rg.position_wavepacket(0.0, 0.5).width == pytest.approx(1.0)
        w = rg.position_wavepacket(3.0, 50.0)
        assert w.width == pytest.approx(0.1, rel=1e-12)
        assert w.center == 3.0 and w.kick == 0.0

    def test_raw_self_overlap(self):
        w = rg.position_wavepacket(1.3, 2.0)
        raw = rg.overlap(w, w, raw=True)
        assert raw == pytest.approx(1.0 / (w.width * np.sqrt(np.pi)), rel=1e-12)

    def test_nonpositive_omega_rejected(self):
        with pytest.raises(ValueError):
            rg.position_wavepacket(0.0, 0.0)
        with pytest.raises(ValueError):
            rg.momentum_wavepacket(0.0, -1.0)

    def test_profile_is_normalized(self):
        w = rg.position_wavepacket(0.7, 3.0)
        val, _ = quad(lambda x: abs(w.profile(x)) ** 2, -20, 20, limit=200)
        assert val == pytest.approx(1.0, abs=1e-10)


class TestOverlap:
    def test_unit_self_overlap(self):
        w = rg.position_wavepacket(2.0, 5.0)
        assert rg.overlap(w, w) == pytest.approx(1.0, abs=1e-12)

    def test_ten_widths_apart(self):
        w = rg.position_wavepacket(0.0, 1.0)
        v = rg.position_wavepacket(10.0 * w.width, 1.0)
        assert abs(rg.overlap(w, v)) == pytest.approx(np.exp(-25.0), rel=1e-10)

    def test_hermitian(self):
        a = rg.Wavepacket(0.3, 1.1, 2.0)
        b = rg.Wavepacket(-0.4, -0.2, 2.0)
        assert rg.overlap(a, b) == pytest.approx(np.conj(rg.overlap(b, a)),
                                                 abs=1e-15)

    @pytest.mark.parametrize("omega", [0.5, 1.0, 10.0])
    @pytest.mark.parametrize("separation_in_widths", [-5, -2, -0.5, 0, 0.5, 2, 5])
    def test_against_momentum_integral_oracle(self, omega, separation_in_widths):
        a = rg.position_wavepacket(0.0, omega)
        b = rg.position_wavepacket(separation_in_widths * a.width, omega)
        assert rg.overlap(a, b) == pytest.approx(
            overlap_momentum_oracle(a, b), abs=1e-8)

    def test_kicked_overlap_against_position_oracle(self):
        a = rg.Wavepacket(0.1, 0.8, 2.0)
        b = rg.Wavepacket(-0.5, -1.3, 2.0)
        assert rg.overlap(a, b) == pytest.approx(
            overlap_position_oracle(a, b), abs=1e-10)

    def test_unequal_omega_needs_flag(self):
        a = rg.position_wavepacket(0.0, 1.0)
        b = rg.position_wavepacket(0.0, 2.0)
        with pytest.raises(WidthMismatchError):
            rg.overlap(a, b)
        val = rg.overlap(a, b, allow_unequal_omega=True)
        assert val == pytest.approx(overlap_position_oracle(a, b), abs=1e-10)

    def test_narrowing_sequence_becomes_indicator(self):
        # b -> 0 realizes completely localized kets pointwise
        prev = 1.0
        for b in (0.1, 0.01, 0.001):
            omega = rg.omega_for_width(b)
            same = rg.overlap(rg.position_wavepacket(0.4, omega),
                              rg.position_wavepacket(0.4, omega))
            apart = abs(rg.overlap(rg.position_wavepacket(0.0, omega),
                                   rg.position_wavepacket(0.4, omega)))
            assert same == pytest.approx(1.0, abs=1e-12)
            assert apart < prev
            prev = apart
        assert prev < 1e-300 or prev == 0.0


class TestMomentumPackets:
    def test_fourier_pair_at_unit_frequency(self):
        # FT of the momentum packet equals the position packet profile
        # with reciprocal width
        rho = rg.momentum_wavepacket(0.0, 1.0)
        chi = rg.position_wavepacket(0.0, 1.0)
        assert rho.width == pytest.approx(1.0 / chi.width, rel=1e-12)
        for p in (0.0, 0.4, 1.1):
            ft = fourier_transform_oracle(rho, p)
            assert abs(ft) == pytest.approx(abs(chi.profile(p)), abs=1e-9)

    def test_paper_normalized_projection(self):
        omega = 2.5
        chi = rg.position_wavepacket(0.0, omega)
        for p in (0.0, 0.7, -1.9):
            want = np.sqrt(1.0 / (np.pi * omega)) * np.exp(-p * p / (4 * omega))
            assert rg.momentum_projection(chi, p, paper_normalization=True) \
                == pytest.approx(want, rel=1e-12)

    def test_projection_shape_against_fourier_oracle(self):
        w = rg.Wavepacket(0.3, 2.0, 1.0)
        for p in (-1.0, 0.0, 2.7):
            assert rg.momentum_projection(w, p) == pytest.approx(
                fourier_transform_oracle(w, p), abs=1e-8)

    def test_kicked_momentum_center(self):
        rho = rg.momentum_wavepacket(2.0, 1.0)
        grid = np.linspace(-2, 6, 1601)
        vals = np.abs(rho.momentum_profile(grid))
        assert grid[np.argmax(vals)] == pytest.approx(2.0, abs=0.01)


class TestSqueezeDisplace:
    def test_fermion_squeeze_is_identity(self):
        for amps in ([1.0, 0.0], [0.0, 1.0], [0.6, 0.8]):
            v = rg.FockVector(np.array(amps, dtype=complex), "fermion")
            out = rg.squeeze(v, 1.7)
            assert np.array_equal(out.amplitudes, v.amplitudes)

    def test_zero_parameter_identity(self):
        vac = rg.fock_vacuum(32)
        assert np.allclose(rg.squeeze(vac, 0.0).amplitudes, vac.amplitudes)
        assert np.allclose(rg.displace(vac, 0.0).amplitudes, vac.amplitudes)

    def test_squeezed_variance_analytic_oracle(self):
        # generator r(aa - a+a+) carries twice the conventional rate, so
        # the position variance of the squeezed vacuum is exp(-4r)/2
        r = 0.25
        out = rg.squeeze(rg.fock_vacuum(48), r)
        x = rg.wavepackets.position_matrix(48)
        var = np.real(out.amplitudes.conj() @ x @ x @ out.amplitudes)
        assert var == pytest.approx(0.5 * np.exp(-4.0 * r), rel=1e-10)

    def test_squeeze_truncation_overflow(self):
        with pytest.raises(TruncationOverflowError):
            rg.squeeze(rg.fock_vacuum(8), 1.0, pad=64)

    def test_coherent_state_poisson_oracle(self):
        out = rg.displace(rg.fock_vacuum(32), 1.0 + 0.0j)
        n = np.arange(32)
        mean_n = float(np.sum(n * np.abs(out.amplitudes) ** 2))
        assert mean_n == pytest.approx(1.0, abs=1e-8)
        # Poisson amplitudes |c_n|^2 = e^{-1} / n!
        from math import e, factorial
        for k in range(6):
            assert abs(out.amplitudes[k]) ** 2 == pytest.approx(
                (1.0 / e) / factorial(k), abs=1e-10)

    def test_displacement_unitarity(self):
        for gamma in (0.5, 1.0 + 1.0j, 2.0j, -2.0):
            out = rg.displace(rg.fock_vacuum(64), gamma)
            assert out.norm == pytest.approx(1.0, abs=1e-10)

    def test_mean_annihilation_equals_gamma(self):
        gamma = 0.7 - 0.3j
        out = rg.displace(rg.fock_vacuum(48), gamma)
        a = rg.wavepackets.annihilation_matrix(48)
        assert out.amplitudes.conj() @ a @ out.amplitudes == pytest.approx(
            gamma, abs=1e-10)

    def test_fermion_displacement_rejected(self):
        v = rg.fock_vacuum(statistics="fermion")
        with pytest.raises(StatisticsError):
            rg.displace(v, 0.3)


class TestFockRepresentation:
    def test_centered_packet_has_even_amplitudes_only(self):
        v = rg.fock_representation(rg.position_wavepacket(0.0, 1.0), 32)
        assert np.max(np.abs(v.amplitudes[1::2])) <= 1e-14

    def test_cross_check_against_closed_form(self):
        a = rg.position_wavepacket(0.0, 1.0)
        b = rg.position_wavepacket(0.5, 1.0)
        va = rg.fock_representation(a, 48)
        vb = rg.fock_representation(b, 48)
        inner = np.vdot(va.amplitudes, vb.amplitudes)
        assert inner == pytest.approx(rg.overlap(a, b), abs=1e-6)

    def test_cross_check_with_kicks(self):
        a = rg.Wavepacket(0.0, 0.4, 1.0)
        b = rg.Wavepacket(0.6, -0.8, 1.0)
        inner = np.vdot(rg.fock_representation(a, 48).amplitudes,
                        rg.fock_representation(b, 48).amplitudes)
        assert inner == pytest.approx(rg.overlap(a, b), abs=1e-8)

    def test_eigenket_series_amplitude_ratio(self):
        # symbolic expansion of the sharp-ket series: c2/c0 = -1/sqrt(2)
        series = rg.position_eigenket_series(0.0, 1.0, 16)
        assert series[2] / series[0] == pytest.approx(-1.0 / np.sqrt(2.0),
                                                      rel=1e-12)
        assert np.max(np.abs(series[1::2])) == 0.0

    def test_small_truncation_rejected(self):
        with pytest.raises(ValueError):
            rg.fock_representation(rg.position_wavepacket(0.0, 1.0), 4)

    def test_far_displaced_packet_overflows(self):
        with pytest.raises(TruncationOverflowError):
            rg.fock_representation(rg.position_wavepacket(12.0, 1.0), 16, pad=96)


class TestFockVectorInvariants:
    def test_norm_cap(self):
        with pytest.raises(ValueError):
            rg.FockVector(np.array([1.1, 0.0]), "boson")

    def test_fermion_dimension(self):
        with pytest.raises(StatisticsError):
            rg.FockVector(np.array([1.0, 0.0, 0.0]), "fermion")
