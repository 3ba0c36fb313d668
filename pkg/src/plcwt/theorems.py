"""Convolution and correlation operators, theorem verifiers and uncertainty evaluators."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import digamma

from .errors import DomainError, GridMismatch, MomentOverflow
from .grid import ComplexField2D, GridSpec, check_same_grid, rotate_point
from .lct import LctParams, fourier_params, lct_forward
from .transform import CoefficientVolume, ScaleAngleGrid, plcwt_forward
from .wavelet import AdmissibilityConstant, as_mixture, admissibility


# -- linear convolution and correlation --------------------------------------

def _embed_stack(x, big):
    out = np.zeros(x.shape[:-2] + big, dtype=complex)
    o1 = big[0] // 2 - x.shape[-2] // 2
    o2 = big[1] // 2 - x.shape[-1] // 2
    out[..., o1:o1 + x.shape[-2], o2:o2 + x.shape[-1]] = x
    return out


def _crop_stack(x, shape):
    o1 = x.shape[-2] // 2 - shape[0] // 2
    o2 = x.shape[-1] // 2 - shape[1] // 2
    return x[..., o1:o1 + shape[0], o2:o2 + shape[1]]


def _linear_conv(x: np.ndarray, y: np.ndarray, guard: int) -> np.ndarray:
    """Centred linear convolution over the last two axes, cropped to ``x``'s shape."""
    if guard < 2:
        raise ValueError("guard padding factor must be at least 2")
    big = (x.shape[-2] * guard, x.shape[-1] * guard)
    axes = (-2, -1)
    fx = np.fft.fft2(np.fft.ifftshift(_embed_stack(x, big), axes=axes))
    fy = np.fft.fft2(np.fft.ifftshift(_embed_stack(y, big), axes=axes))
    full = np.fft.fftshift(np.fft.ifft2(fx * fy), axes=axes)
    return _crop_stack(full, x.shape[-2:])


def reflect(values: np.ndarray) -> np.ndarray:
    """``x(-t)`` on a centred lattice; the unmatched most-negative row and column become zero."""
    out = np.zeros_like(values)
    out[..., 1:, 1:] = values[..., :0:-1, :0:-1]
    return out


def convolve_full(f: ComplexField2D, g: ComplexField2D, guard: int = 2) -> ComplexField2D:
    """``h(x) = int f(t) g(x - t) dt`` on ``f``'s grid, without wrap-around.

    Both inputs are zero-padded by ``guard`` before the FFT, so the result
    is the exact linear Riemann sum restricted to the grid.
    """
    check_same_grid(f, g)
    return f.with_values(_linear_conv(f.values, g.values, guard) * f.spec.cell_area)


def correlate_full(f: ComplexField2D, g: ComplexField2D, guard: int = 2) -> ComplexField2D:
    """``h(x) = int f(t) g(x + t) dt``, computed as ``convolve_full(f(-.), g)``."""
    check_same_grid(f, g)
    return convolve_full(f.with_values(reflect(f.values)), g, guard)


def _check_volumes(v1: CoefficientVolume, v2: CoefficientVolume) -> None:
    if v1.spatial != v2.spatial or not v1.grid.same_as(v2.grid):
        raise GridMismatch("volumes must share the b-lattice and the (a, theta) grid")


def convolve_in_b(v1: CoefficientVolume, v2: CoefficientVolume, guard: int = 2) -> CoefficientVolume:
    """Plane-wise ``int W1(t, a, theta) W2(b - t, a, theta) dt`` at every ``(a, theta)``."""
    _check_volumes(v1, v2)
    return v1.with_data(_linear_conv(v1.data, v2.data, guard) * v1.spatial.cell_area)


def correlate_in_b(v1: CoefficientVolume, v2: CoefficientVolume, guard: int = 2) -> CoefficientVolume:
    """Plane-wise ``int W1(t, a, theta) W2(b + t, a, theta) dt``."""
    _check_volumes(v1, v2)
    return v1.with_data(_linear_conv(reflect(v1.data), v2.data, guard) * v1.spatial.cell_area)


def _rotated_sum(wf, wg, theta: float, spec: GridSpec, guard: int, sign: int) -> ComplexField2D:
    # psi_h(t) = sum_y psi_f(R_{-theta} y) psi_g(R_{-theta}(R_theta t + sign*y)) dy
    n_big = (spec.n1 * guard, spec.n2 * guard)
    y1, y2 = GridSpec(n_big[0], n_big[1], spec.spacing).coords()
    fy = wf.evaluate(*rotate_point((y1, y2), -theta)).ravel()
    t1, t2 = spec.coords()
    x1, x2 = rotate_point((t1.ravel(), t2.ravel()), theta)
    out = np.empty(x1.size, dtype=complex)
    y1r, y2r = y1.ravel(), y2.ravel()
    for i in range(x1.size):
        g_arg = rotate_point((x1[i] + sign * y1r, x2[i] + sign * y2r), -theta)
        out[i] = np.sum(fy * wg.evaluate(*g_arg))
    return ComplexField2D(spec, out.reshape(spec.shape) * spec.cell_area)


def wavelet_convolve(wf, wg, theta: float, spec: GridSpec, guard: int = 2) -> ComplexField2D:
    """Samples of ``int psi_f(R_{-theta} y) psi_g(R_{-theta}(R_theta t - y)) dy`` on ``spec``.

    Both factors are evaluated analytically at rotated points and the
    integral is a Riemann sum over a ``guard``-times larger lattice.  The
    rotations cancel, so the result equals the plain convolution
    ``psi_f * psi_g`` (see :meth:`GaussianMixtureWavelet.convolve`).
    """
    return _rotated_sum(wf, wg, theta, spec, guard, -1)


def wavelet_correlate(wf, wg, theta: float, spec: GridSpec, guard: int = 2) -> ComplexField2D:
    """Samples of ``int psi_f(R_{-theta} y) psi_g(R_{-theta}(R_theta t + y)) dy``."""
    return _rotated_sum(wf, wg, theta, spec, guard, +1)


# -- theorem verifiers -------------------------------------------------------

@dataclass
class TheoremReport:
    """Plane-wise comparison of the two sides of a convolution-type theorem.

    ``max_relative_error`` compares the transform of the combined signal
    with ``(1/a)`` times the b-convolution (or b-correlation evaluated at
    ``+b``) of the separate transforms.  ``literal_error`` drops the ``1/a``
    factor and, for correlation, evaluates at ``-b``.  ``canonical_error``
    uses the chirp-compensated convolution, which is exact for every ``M``.
    """

    name: str
    max_relative_error: float
    plane_errors: list
    literal_error: float
    canonical_error: Optional[float]
    tolerance: float
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_relative_error <= self.tolerance)

    def to_dict(self) -> dict:
        return {"name": self.name, "max_relative_error": self.max_relative_error,
                "plane_errors": self.plane_errors, "literal_error": self.literal_error,
                "canonical_error": self.canonical_error, "tolerance": self.tolerance,
                "passed": self.passed, "config": self.config}


def _plane_errors(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    num = np.linalg.norm((lhs - rhs).reshape(lhs.shape[:2] + (-1,)), axis=-1)
    den = np.linalg.norm(lhs.reshape(lhs.shape[:2] + (-1,)), axis=-1)
    return num / np.where(den > 0, den, 1.0)


def _scale_factor(grid: ScaleAngleGrid) -> np.ndarray:
    return (1.0 / grid.scales)[:, None, None, None]


def pad_field(f: ComplexField2D, guard: int) -> ComplexField2D:
    """Zero-extend ``f`` to ``guard`` times as many samples per axis."""
    big = GridSpec(f.spec.n1 * guard, f.spec.n2 * guard, f.spec.spacing)
    return ComplexField2D(big, _embed_stack(f.values, big.shape))


def _chirp_b(v: CoefficientVolume, sign: int) -> np.ndarray:
    rate = v.params.input_chirp_rate
    return np.exp(1j * sign * rate * v.spatial.radius_squared())


def verify_convolution_theorem(f: ComplexField2D, g: ComplexField2D, wf, wg, m: LctParams,
                               grid: ScaleAngleGrid, guard: int = 2,
                               tolerance: float = 1e-4) -> TheoremReport:
    """Compare ``W^M_h`` for ``h = f * g`` against ``(1/a) (W^M_f *_b W^M_g)``.

    ``f`` and ``g`` are first zero-extended by ``guard``; every field and
    coefficient plane then lives on that larger lattice, which must hold
    the combined support.
    """
    check_same_grid(f, g)
    f, g = pad_field(f, guard), pad_field(g, guard)
    psi_h = as_mixture(wf).convolve(wg)
    h = convolve_full(f, g, guard)
    vf = plcwt_forward(f, wf, m, grid, padding=1)
    vg = plcwt_forward(g, wg, m, grid, padding=1)
    lhs = plcwt_forward(h, psi_h, m, grid, padding=1).data
    conv = convolve_in_b(vf, vg, guard).data
    errs = _plane_errors(lhs, conv * _scale_factor(grid))
    literal = _plane_errors(lhs, conv).max()
    canonical = None
    if m.input_chirp_rate:
        # exact analogue: chirp W_f back to the PWT of the chirped signal,
        # convolve with the plain PWT of g, re-chirp; pair with the canonical h
        chirp = np.exp(1j * m.input_chirp_rate * f.spec.radius_squared())
        hc = f.with_values(_linear_conv(f.values * chirp, g.values, guard)
                           * f.spec.cell_area / chirp)
        lhs_c = plcwt_forward(hc, psi_h, m, grid, padding=1).data
        vg0 = plcwt_forward(g, wg, fourier_params(), grid, padding=1)
        inner = vf.with_data(vf.data * _chirp_b(vf, +1))
        rhs_c = convolve_in_b(inner, vg0, guard).data * _chirp_b(vf, -1)
        canonical = float(_plane_errors(lhs_c, rhs_c * _scale_factor(grid)).max())
    return TheoremReport("convolution", float(errs.max()), errs.tolist(), float(literal),
                         canonical, tolerance, {"params": m.to_dict(), "guard": guard})


def verify_correlation_theorem(f: ComplexField2D, g: ComplexField2D, wf, wg, m: LctParams,
                               grid: ScaleAngleGrid, guard: int = 2,
                               tolerance: float = 1e-4) -> TheoremReport:
    """Compare ``W^M_h`` for ``h = f (.) g`` against ``(1/a) (W^M_f (.)_b W^M_g)(+b)``.

    ``literal_error`` evaluates the right-hand side at ``-b`` without the
    ``1/a`` factor.  Padding is handled as in :func:`verify_convolution_theorem`.
    """
    check_same_grid(f, g)
    f, g = pad_field(f, guard), pad_field(g, guard)
    psi_h = as_mixture(wf).correlate(wg)
    h = correlate_full(f, g, guard)
    vf = plcwt_forward(f, wf, m, grid, padding=1)
    vg = plcwt_forward(g, wg, m, grid, padding=1)
    lhs = plcwt_forward(h, psi_h, m, grid, padding=1).data
    corr = correlate_in_b(vf, vg, guard).data
    errs = _plane_errors(lhs, corr * _scale_factor(grid))
    literal = _plane_errors(lhs, reflect(corr)).max()
    return TheoremReport("correlation", float(errs.max()), errs.tolist(), float(literal),
                         None, tolerance, {"params": m.to_dict(), "guard": guard})


# -- uncertainty inequalities ------------------------------------------------

LOG_MU = float(digamma(0.5) - np.log(np.pi))


def log_uncertainty_constant() -> float:
    """``mu = digamma(1/2) - ln(pi) = -gamma - 2 ln 2 - ln pi``."""
    return LOG_MU


def uncertainty_signals(spec: GridSpec = GridSpec.square(64, 0.25)) -> dict:
    """Unit-width Gaussian, chirped Gaussian and off-centre Gaussian on ``spec``.

    The chirp rate and shift are small enough that the coefficient volume
    still decays to the lattice border on the default 64 x 64 grid.
    """
    t1, t2 = spec.coords()
    r2 = t1 ** 2 + t2 ** 2
    shifted = (t1 - 0.75) ** 2 + (t2 + 0.5) ** 2
    return {"gaussian": ComplexField2D(spec, np.exp(-r2 / 2)),
            "chirped_gaussian": ComplexField2D(spec, np.exp(-r2 / 2 + 0.15j * r2)),
            "shifted_gaussian": ComplexField2D(spec, np.exp(-shifted / 2))}


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    ratio: float
    satisfied: bool
    epsilon_quad: float
    config: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (np.isfinite(self.lhs) and np.isfinite(self.rhs)):
            raise ValueError("inequality sides must be finite")
        if self.lhs < 0 or self.rhs < 0:
            raise ValueError("inequality sides must be nonnegative")
        if self.satisfied != bool(self.lhs >= self.rhs * (1 - self.epsilon_quad)):
            raise ValueError("satisfied flag inconsistent with lhs and rhs")

    @classmethod
    def build(cls, lhs: float, rhs: float, eps: float, config: dict, **details):
        ratio = lhs / rhs if rhs > 0 else np.inf
        return cls(float(lhs), float(rhs), float(ratio), bool(lhs >= rhs * (1 - eps)),
                   eps, config, details)

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
                "satisfied": self.satisfied, "epsilon_quad": self.epsilon_quad,
                "config": self.config, "details": self.details}


def _check_decay(values: np.ndarray, what: str, tol: float) -> None:
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0:
        raise MomentOverflow(f"{what} is identically zero")
    border = max(mag[0].max(), mag[-1].max(), mag[:, 0].max(), mag[:, -1].max())
    if border > tol * peak:
        raise MomentOverflow(f"{what} has not decayed at the grid border "
                             f"({border / peak:.2e} of peak, limit {tol:.0e})")


@dataclass
class _Moments:
    volume: CoefficientVolume
    spectrum: ComplexField2D
    c: float
    f_energy: float
    config: dict


def _moments(f, w, m, grid, c, padding, border_tol, volume=None) -> _Moments:
    _check_decay(f.values, "signal", border_tol)
    spec = lct_forward(f, m)
    _check_decay(spec.values, "LCT spectrum", border_tol)
    if c is None:
        c = admissibility(w, m)
    cval = float(getattr(c, "value", c))
    if volume is None:
        volume = plcwt_forward(f, w, m, grid, padding=padding)
    v = volume
    cfg = {"params": m.to_dict(), "wavelet": w.to_dict(), "grid": grid.to_dict(),
           "signal_grid": f.spec.to_dict(), "padding": padding, "admissibility": cval}
    return _Moments(v, spec, cval, f.norm() ** 2, cfg)


def _b_moment(v: CoefficientVolume, fn) -> float:
    b2 = v.spatial.radius_squared()
    per_plane = np.sum(fn(b2, np.abs(v.data)), axis=(2, 3)) * v.spatial.cell_area
    return float(np.sum(per_plane * v.grid.weights()))


def _xi_moment(spec: ComplexField2D, fn) -> float:
    return float(np.sum(fn(spec.spec.radius_squared(), np.abs(spec.values))) * spec.spec.cell_area)


def generalized_heisenberg(f: ComplexField2D, w, m: LctParams, grid: ScaleAngleGrid, p: float,
                           c: Optional[AdmissibilityConstant] = None, padding: int = 2,
                           epsilon: float = 0.01, border_tol: float = 1e-10,
                           volume: Optional[CoefficientVolume] = None) -> InequalityReport:
    """``(int |b|^p |W|^p)^(1/p) (int |xi|^p |L^M f|^p)^(1/p)`` against its lower bound.

    The bound ``a^(3/p - 3/2) |B|^(1/p + 1/2) sqrt(C) ||f||^2 / 2`` contains a
    free scale ``a``; it is evaluated at every grid scale and the smallest
    value is used.  All per-scale values are kept in ``details``.
    """
    if not 1 <= p <= 2:
        raise DomainError(f"p must lie in [1, 2], got {p}")
    mo = _moments(f, w, m, grid, c, padding, border_tol, volume)
    tb = _b_moment(mo.volume, lambda r2, mag: r2 ** (p / 2) * mag ** p)
    tx = _xi_moment(mo.spectrum, lambda r2, mag: r2 ** (p / 2) * mag ** p)
    lhs = tb ** (1 / p) * tx ** (1 / p)
    b = abs(m.b)
    per_scale = (grid.scales ** (3 / p - 1.5) * b ** (1 / p + 0.5) / 2
                 * np.sqrt(mo.c) * mo.f_energy)
    rhs = float(per_scale.min())
    return InequalityReport.build(lhs, rhs, epsilon, dict(mo.config, p=p),
                                  per_scale_rhs=per_scale.tolist(),
                                  binding_scale=float(grid.scales[np.argmin(per_scale)]))


def heisenberg(f: ComplexField2D, w, m: LctParams, grid: ScaleAngleGrid,
               c: Optional[AdmissibilityConstant] = None, padding: int = 2,
               epsilon: float = 0.01, border_tol: float = 1e-10,
               volume: Optional[CoefficientVolume] = None) -> InequalityReport:
    """``sqrt(int |b|^2 |W|^2) sqrt(int |xi|^2 |L^M f|^2) >= |B| sqrt(C) ||f||^2 / 2``."""
    return generalized_heisenberg(f, w, m, grid, 2.0, c, padding, epsilon, border_tol, volume)


def logarithmic_uncertainty(f: ComplexField2D, w, m: LctParams, grid: ScaleAngleGrid,
                            c: Optional[AdmissibilityConstant] = None, padding: int = 2,
                            epsilon: float = 0.01, border_tol: float = 1e-10,
                            volume: Optional[CoefficientVolume] = None) -> InequalityReport:
    """Logarithmic uncertainty ``S >= (mu + ln|B|) C ||f||^2``.

    ``S = int ln|b| |W|^2 db da dtheta / a^3 + C int ln|xi| |L^M f|^2 dxi``.
    The origin samples are masked out of both log moments.  Both sides can
    be negative, so the report stores the equivalent positive comparison
    ``exp(S / (C ||f||^2)) >= |B| exp(mu)``; the signed values are kept in
    ``details``.
    """
    mo = _moments(f, w, m, grid, c, padding, border_tol, volume)

    def logw(r2, mag):
        out = np.zeros_like(mag)
        mask = np.broadcast_to(r2 > 0, mag.shape)
        out[mask] = (0.5 * np.log(np.broadcast_to(r2, mag.shape)[mask])) * mag[mask] ** 2
        return out

    tb = _b_moment(mo.volume, logw)
    tx = _xi_moment(mo.spectrum, logw)
    norm = mo.c * mo.f_energy
    signed_lhs = tb + mo.c * tx
    signed_rhs = (LOG_MU + np.log(abs(m.b))) * norm
    lhs = float(np.exp(signed_lhs / norm))
    rhs = float(abs(m.b) * np.exp(LOG_MU))
    return InequalityReport.build(lhs, rhs, epsilon, mo.config, signed_lhs=signed_lhs,
                                  signed_rhs=signed_rhs, mu=LOG_MU)
