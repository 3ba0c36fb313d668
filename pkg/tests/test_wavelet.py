import numpy as np
import pytest
from hypothesis import given, strategies as st

from plcwt.errors import DivergenceError, ScaleError
from plcwt.grid import ComplexField2D, GridSpec, rotate_point
from plcwt.lct import LctParams, fourier_params, fourier_transform, lct_forward
from plcwt.wavelet import (AdmissibilityConstant, GaussianMixtureWavelet, ScaleQuadrature,
                           WaveletSpec, admissibility, as_mixture, daughter_eval,
                           daughter_kernel, lc_wavelet_spectrum, mother_eval, wavelet_from_dict)

# int |psi_hat(eta)|^2 / |eta|^2 d eta by adaptive polar quadrature (scipy dblquad)
ADMISSIBILITY_ORACLE = {
    ((4.0, 0.0), 1.0, True): 8.311816333513853,
    ((6.0, 0.0), 1.0, False): 3.546657355597701,
    ((3.0, 0.0), 1.0, True): 15.703852646113669,
}

FINE = GridSpec.square(128, 0.125)


def test_default_is_classical_morlet():
    w = WaveletSpec()
    assert w.k0 == (6.0, 0.0) and w.sigma == 1.0 and w.correction == 0.0
    assert mother_eval(w, 0.0, 0.0) == 1.0


def test_small_carrier_needs_zero_mean():
    with pytest.raises(ValueError):
        WaveletSpec(k0=(3.0, 0.0))
    WaveletSpec(k0=(3.0, 0.0), zero_mean=True)
    with pytest.raises(ValueError):
        WaveletSpec(sigma=0.0)


def test_dict_round_trip_and_unknown_keys():
    w = WaveletSpec(k0=(3.2, 2.4), sigma=0.5, zero_mean=True)
    assert WaveletSpec.from_dict(w.to_dict()) == w
    assert wavelet_from_dict(w.to_dict()) == w
    with pytest.raises(ValueError):
        WaveletSpec.from_dict(dict(w.to_dict(), colour="red"))
    mix = as_mixture(w)
    assert wavelet_from_dict(mix.to_dict()) == mix


@pytest.mark.parametrize("w", [WaveletSpec(), WaveletSpec(k0=(3.0, 1.0), sigma=0.8,
                                                          zero_mean=True)])
def test_spectrum_matches_numerical_fourier_transform(w):
    f = ComplexField2D.from_function(FINE, w.evaluate)
    F = fourier_transform(f)
    u1, u2 = F.spec.coords()
    assert np.max(np.abs(F.values - w.spectrum(u1, u2))) < 1e-10


def test_zero_mean_variant_integrates_to_zero():
    w = WaveletSpec(k0=(2.0, 0.0), zero_mean=True)
    assert w.spectrum(0.0, 0.0) == 0.0
    vals = mother_eval(w, *FINE.coords())
    assert abs(vals.sum() * FINE.cell_area) < 1e-12


@given(st.floats(0.3, 4.0), st.floats(-np.pi, np.pi))
def test_daughter_definition(a, theta):
    w = WaveletSpec()
    s = (0.7, -0.4)
    r = rotate_point(s, -theta)
    expected = mother_eval(w, r[0] / a, r[1] / a) / a
    assert np.isclose(daughter_eval(w, s[0], s[1], a, theta), expected, rtol=1e-13)


def test_daughter_carrier_points_along_rotated_k0():
    w = WaveletSpec()
    theta = 0.6
    kern = daughter_kernel(w, FINE, (0.0, 0.0), 1.0, theta)
    F = np.abs(fourier_transform(kern).values)
    u1, u2 = fourier_transform(kern).spec.coords()
    i = np.unravel_index(np.argmax(F), F.shape)
    direction = np.arctan2(u2[i], u1[i])
    want = np.arctan2(*rotate_point((6.0, 0.0), theta)[::-1])
    assert abs(direction - want) < 0.1


def test_nonpositive_scale_rejected():
    with pytest.raises(ScaleError):
        daughter_eval(WaveletSpec(), 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(ScaleError):
        daughter_eval(WaveletSpec(), 0.0, 0.0, -1.0, 0.0)


def test_mixture_convolution_closed_form():
    wf = WaveletSpec(k0=(4.0, 0.0), sigma=0.5, zero_mean=True)
    wg = WaveletSpec(k0=(3.2, 2.4), sigma=0.7, zero_mean=True)
    spec = GridSpec.square(160, 0.0625)
    t1, t2 = spec.coords()
    ff = wf.evaluate(t1, t2)
    conv = as_mixture(wf).convolve(wg)
    corr = as_mixture(wf).correlate(wg)
    for x in [(0.0, 0.0), (0.4, -0.3), (-1.1, 0.7)]:
        num = np.sum(ff * wg.evaluate(x[0] - t1, x[1] - t2)) * spec.cell_area
        assert abs(num - conv.evaluate(*x)) < 1e-10
        num = np.sum(ff * wg.evaluate(x[0] + t1, x[1] + t2)) * spec.cell_area
        assert abs(num - corr.evaluate(*x)) < 1e-10


def test_mixture_spectrum_is_sum_of_terms():
    mix = GaussianMixtureWavelet(((1.0, (2.0, 0.0), 1.0), (-0.5j, (0.0, 1.0), 0.5)))
    u = (0.3, -0.2)
    want = 0.0
    for c, k, sig in mix.terms:
        want += c * 2 * np.pi * sig ** 2 * np.exp(-0.5 * sig ** 2 * ((u[0] - k[0]) ** 2
                                                                  + (u[1] - k[1]) ** 2))
    assert np.isclose(mix.spectrum(*u), want, rtol=1e-14)
    assert mix.reflected().reflected() == mix


@pytest.mark.parametrize("m", [fourier_params(), LctParams.from_ratio(0.2, b=2.0, d=0.5)])
def test_lc_wavelet_spectrum_is_lct_of_dechirped_wavelet(m):
    w = WaveletSpec(k0=(3.0, 0.0), zero_mean=True)
    spec = GridSpec.square(128, 0.125)
    t1, t2 = spec.coords()
    psi = w.evaluate(t1, t2) * np.exp(-1j * m.input_chirp_rate * (t1 ** 2 + t2 ** 2))
    F = lct_forward(ComplexField2D(spec, psi), m)
    x1, x2 = F.spec.coords()
    assert np.max(np.abs(F.values - lc_wavelet_spectrum(w, m, x1, x2))) < 1e-10


@pytest.mark.parametrize("key", sorted(ADMISSIBILITY_ORACLE))
@pytest.mark.parametrize("m", [fourier_params(), LctParams.from_ratio(0.2, b=2.0, d=0.5),
                               LctParams.from_ratio(-0.1)])
def test_admissibility_against_frozen_quadrature(key, m):
    k0, sigma, zm = key
    c = admissibility(WaveletSpec(k0=k0, sigma=sigma, zero_mean=zm), m)
    assert abs(c.value / ADMISSIBILITY_ORACLE[key] - 1) < 1e-6
    assert np.isclose(c.literal_value * (2 * np.pi * m.b) ** 2, c.value, rtol=1e-14)


def test_admissibility_serialises():
    c = admissibility(WaveletSpec(), fourier_params())
    back = AdmissibilityConstant.from_dict(c.to_dict())
    assert back == c
    with pytest.raises(ValueError):
        AdmissibilityConstant(0.0, 0.0, 0.0)


def test_nonzero_mean_wavelet_is_not_admissible():
    gaussian = GaussianMixtureWavelet(((1.0, (0.0, 0.0), 1.0),))
    with pytest.raises(DivergenceError):
        admissibility(gaussian, fourier_params())


def test_truncated_scale_range_detected():
    with pytest.raises(DivergenceError):
        admissibility(WaveletSpec(), fourier_params(), ScaleQuadrature(a_min=1.0, a_max=4.0))
