import numpy as np
import pytest
from hypothesis import given, strategies as st

from plcwt.checks import gaussian_atoms
from plcwt.errors import DomainError, GridMismatch, MomentOverflow
from plcwt.grid import ComplexField2D, GridSpec
from plcwt.lct import LctParams, fourier_params
from plcwt.theorems import (InequalityReport, convolve_full, convolve_in_b, correlate_full,
                            generalized_heisenberg, heisenberg, log_uncertainty_constant,
                            logarithmic_uncertainty, reflect, uncertainty_signals,
                            verify_convolution_theorem, verify_correlation_theorem,
                            wavelet_convolve, wavelet_correlate)
from plcwt.transform import ScaleAngleGrid, plcwt_forward
from plcwt.wavelet import WaveletSpec, admissibility

SPEC = GridSpec.square(16, 0.25)
WF = WaveletSpec(k0=(4.0, 0.0), sigma=0.5, zero_mean=True)
WG = WaveletSpec(k0=(3.2, 2.4), sigma=0.5, zero_mean=True)
GRID = ScaleAngleGrid.from_lists([0.75, 1.0], np.arange(4) * np.pi / 4)


@pytest.fixture(scope="module")
def fg():
    rng = np.random.default_rng(0)
    return gaussian_atoms(SPEC, rng), gaussian_atoms(SPEC, rng)


# -- building blocks -----------------------------------------------------------

def test_reflect_maps_index_k_to_n_minus_k(rng):
    x = rng.normal(size=(6, 6)) + 0j
    r = reflect(x)
    for i in range(1, 6):
        for j in range(1, 6):
            assert r[i, j] == x[6 - i, 6 - j]
    assert not np.any(r[0]) and not np.any(r[:, 0])


def _direct_conv(f, g, sign):
    """h[p] = sum_k f[k] g[p + sign*k] dA on the centred lattice, zero outside."""
    n = f.spec.n1
    h = np.zeros((n, n), dtype=complex)
    for p1 in range(n):
        for p2 in range(n):
            for k1 in range(n):
                for k2 in range(n):
                    # centred index arithmetic: (p - n/2) + sign (k - n/2) + n/2
                    q1 = p1 + sign * (k1 - n // 2)
                    q2 = p2 + sign * (k2 - n // 2)
                    if 0 <= q1 < n and 0 <= q2 < n:
                        h[p1, p2] += f.values[k1, k2] * g.values[q1, q2]
    return h * f.spec.cell_area


def test_convolve_and_correlate_full_match_direct_sums(rng):
    spec = GridSpec.square(8, 0.5)
    f = ComplexField2D(spec, rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
    g = ComplexField2D(spec, rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
    assert np.allclose(convolve_full(f, g).values, _direct_conv(f, g, -1), atol=1e-12)
    # correlation reflects f, which zeroes its most negative row and column
    f0 = f.with_values(np.pad(f.values[1:, 1:], ((1, 0), (1, 0))))
    assert np.allclose(correlate_full(f0, g).values, _direct_conv(f0, g, +1), atol=1e-12)


def test_convolve_full_rejects_mismatch():
    with pytest.raises(GridMismatch):
        convolve_full(ComplexField2D.zeros(SPEC), ComplexField2D.zeros(GridSpec.square(8, 0.25)))


@pytest.mark.parametrize("theta", [0.0, 0.7, 2.0])
def test_rotated_wavelet_products_match_closed_forms(theta):
    spec = GridSpec.square(16, 0.25)
    t1, t2 = spec.coords()
    conv = wavelet_convolve(WF, WG, theta, spec)
    corr = wavelet_correlate(WF, WG, theta, spec)
    mix = WF.as_mixture()
    assert np.allclose(conv.values, mix.convolve(WG).evaluate(t1, t2), atol=1e-8)
    assert np.allclose(corr.values, mix.correlate(WG).evaluate(t1, t2), atol=1e-8)


def test_convolve_in_b_rejects_mismatched_volumes(fg):
    f, _ = fg
    v1 = plcwt_forward(f, WF, fourier_params(), GRID)
    v2 = plcwt_forward(f, WF, fourier_params(), ScaleAngleGrid.from_lists([1.0], [0.0]))
    with pytest.raises(GridMismatch):
        convolve_in_b(v1, v2)


# -- theorems ------------------------------------------------------------------

def test_convolution_theorem_exact_for_fourier(fg):
    f, g = fg
    rep = verify_convolution_theorem(f, g, WF, WG, fourier_params(), GRID)
    assert rep.passed and rep.max_relative_error < 1e-6
    assert rep.canonical_error is None
    # the scale factor matters: dropping 1/a is visibly wrong
    assert rep.literal_error > 0.1


def test_correlation_theorem_exact_for_fourier(fg):
    f, g = fg
    rep = verify_correlation_theorem(f, g, WF, WG, fourier_params(), GRID)
    assert rep.passed and rep.max_relative_error < 1e-6
    assert rep.literal_error > 0.1
    d = rep.to_dict()
    assert d["name"] == "correlation" and d["passed"]


def test_canonical_convolution_exact_with_chirp(fg):
    f, g = fg
    rep = verify_convolution_theorem(f, g, WF, WG, LctParams.from_ratio(0.05), GRID)
    assert rep.canonical_error < 1e-6


# -- uncertainty ---------------------------------------------------------------

def test_log_constant_matches_series():
    # digamma(1/2) = -gamma + sum_{n>=0} (1/(n+1) - 1/(n+1/2)); tail ~ -1/(2N)
    n = np.arange(2_000_000, dtype=float)
    s = np.sum(1 / (n + 1) - 1 / (n + 0.5)) - 0.5 / 2_000_000
    ref = -np.euler_gamma + s - np.log(np.pi)
    assert abs(log_uncertainty_constant() - ref) < 1e-9
    assert abs(log_uncertainty_constant() - (-np.euler_gamma - 2 * np.log(2) - np.log(np.pi))) < 1e-14


@pytest.fixture(scope="module")
def gauss_setup():
    w = WaveletSpec()
    m = LctParams.from_ratio(0.2)
    grid = ScaleAngleGrid.log_uniform(0.5, 8.0, 12, 16)
    f = uncertainty_signals()["gaussian"]
    c = admissibility(w, m)
    vol = plcwt_forward(f, w, m, grid, padding=2)
    return f, w, m, grid, c, vol


def test_inequalities_hold_for_gaussian(gauss_setup):
    f, w, m, grid, c, vol = gauss_setup
    for rep in (heisenberg(f, w, m, grid, c=c, volume=vol),
                generalized_heisenberg(f, w, m, grid, 1.0, c=c, volume=vol),
                generalized_heisenberg(f, w, m, grid, 1.5, c=c, volume=vol),
                logarithmic_uncertainty(f, w, m, grid, c=c, volume=vol)):
        assert rep.satisfied and rep.ratio > 1


def test_p2_is_heisenberg(gauss_setup):
    f, w, m, grid, c, vol = gauss_setup
    a = heisenberg(f, w, m, grid, c=c, volume=vol)
    b = generalized_heisenberg(f, w, m, grid, 2.0, c=c, volume=vol)
    assert abs(a.lhs - b.lhs) <= 1e-9 * a.lhs and abs(a.rhs - b.rhs) <= 1e-9 * a.rhs
    # at p = 2 the bound does not depend on the scale
    assert np.ptp(b.details["per_scale_rhs"]) <= 1e-12 * b.rhs


@pytest.mark.parametrize("p", [0.5, 2.5, float("nan")])
def test_generalized_domain(gauss_setup, p):
    f, w, m, grid, c, vol = gauss_setup
    with pytest.raises(DomainError):
        generalized_heisenberg(f, w, m, grid, p, c=c, volume=vol)


def test_undecayed_signal_overflows():
    spec = GridSpec.square(16, 0.25)
    f = ComplexField2D(spec, np.ones(spec.shape))
    with pytest.raises(MomentOverflow):
        heisenberg(f, WaveletSpec(), fourier_params(), GRID)
    with pytest.raises(MomentOverflow):
        heisenberg(ComplexField2D.zeros(spec), WaveletSpec(), fourier_params(), GRID)


@given(st.floats(0, 1e6), st.floats(0, 1e6), st.floats(0, 0.1))
def test_report_satisfied_flag_is_consistent(lhs, rhs, eps):
    rep = InequalityReport.build(lhs, rhs, eps, {})
    assert rep.satisfied == (lhs >= rhs * (1 - eps))


def test_report_rejects_inconsistent_values():
    with pytest.raises(ValueError):
        InequalityReport(1.0, 2.0, 0.5, True, 0.0)
    with pytest.raises(ValueError):
        InequalityReport(-1.0, 2.0, 0.5, False, 0.0)
    with pytest.raises(ValueError):
        InequalityReport(float("inf"), 2.0, 0.5, True, 0.0)


def test_uncertainty_ratios_are_homogeneous(gauss_setup):
    f, w, m, grid, c, _ = gauss_setup
    f2 = f * 2.0
    for fn in (heisenberg, logarithmic_uncertainty):
        a, b = fn(f, w, m, grid, c=c), fn(f2, w, m, grid, c=c)
        assert abs(a.ratio - b.ratio) <= 1e-10 * a.ratio
    h1, h2 = heisenberg(f, w, m, grid, c=c), heisenberg(f2, w, m, grid, c=c)
    assert np.isclose(h2.lhs, 4 * h1.lhs, rtol=1e-12) and np.isclose(h2.rhs, 4 * h1.rhs)
