"""Polar Morlet wavelets, daughter kernels and admissibility constants."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .errors import DivergenceError, ScaleError
from .grid import ComplexField2D, GridSpec, rotate_point
from .lct import LctParams

MORLET = "morlet2d"


@dataclass(frozen=True)
class WaveletSpec:
    """Isotropic 2D Morlet wavelet ``exp(j k0.t) exp(-|t|^2 / (2 sigma^2))``.

    With ``zero_mean=True`` the constant ``exp(-sigma^2 |k0|^2 / 2)`` is
    subtracted from the carrier so the wavelet integrates to exactly zero.
    Without it the product ``|k0| sigma`` must be at least 5, where the
    missing correction is below 4e-6 of the peak.
    """

    k0: Tuple[float, float] = (6.0, 0.0)
    sigma: float = 1.0
    zero_mean: bool = False
    kind: str = MORLET

    def __post_init__(self):
        k0 = tuple(float(v) for v in self.k0)
        if len(k0) != 2:
            raise ValueError("k0 must have two components")
        object.__setattr__(self, "k0", k0)
        if self.kind != MORLET:
            raise ValueError(f"unknown wavelet kind {self.kind!r}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.zero_mean and np.hypot(*k0) * self.sigma < 5.0:
            raise ValueError("|k0| * sigma < 5 requires zero_mean=True")

    @property
    def correction(self) -> float:
        if not self.zero_mean:
            return 0.0
        return float(np.exp(-0.5 * self.sigma ** 2 * (self.k0[0] ** 2 + self.k0[1] ** 2)))

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "k0": list(self.k0), "sigma": self.sigma}
        if self.zero_mean:
            d["zero_mean"] = True
        return d

    def evaluate(self, t1, t2):
        k1, k2 = self.k0
        envelope = np.exp(-(t1 * t1 + t2 * t2) / (2 * self.sigma ** 2))
        return (np.exp(1j * (k1 * t1 + k2 * t2)) - self.correction) * envelope

    def spectrum(self, u1, u2):
        k1, k2 = self.k0
        s2 = self.sigma ** 2
        main = np.exp(-0.5 * s2 * ((u1 - k1) ** 2 + (u2 - k2) ** 2))
        if self.correction:
            main = main - self.correction * np.exp(-0.5 * s2 * (u1 * u1 + u2 * u2))
        return 2 * np.pi * s2 * main

    def as_mixture(self) -> "GaussianMixtureWavelet":
        terms = [(1.0, self.k0, self.sigma)]
        if self.correction:
            terms.append((-self.correction, (0.0, 0.0), self.sigma))
        return GaussianMixtureWavelet(tuple(terms))

    @classmethod
    def from_dict(cls, d: dict) -> "WaveletSpec":
        unknown = set(d) - {"kind", "k0", "sigma", "zero_mean"}
        if unknown:
            raise ValueError(f"unknown wavelet keys: {sorted(unknown)}")
        return cls(k0=tuple(d.get("k0", (6.0, 0.0))), sigma=d.get("sigma", 1.0),
                   zero_mean=bool(d.get("zero_mean", False)), kind=d.get("kind", MORLET))


@dataclass(frozen=True)
class GaussianMixtureWavelet:
    """Finite sum of Gaussian-windowed plane waves ``c exp(j k.t) exp(-|t|^2/(2 s^2))``.

    The family is closed under convolution and correlation, which makes it
    the natural home for the composite wavelets of the convolution and
    correlation theorems.  ``terms`` holds ``(c, (k1, k2), s)`` triples.
    """

    terms: tuple
    kind: str = "gaussian_mixture"

    def __post_init__(self):
        clean = []
        for c, k, s in self.terms:
            if not s > 0:
                raise ValueError("term widths must be positive")
            clean.append((complex(c), (float(k[0]), float(k[1])), float(s)))
        if not clean:
            raise ValueError("a mixture needs at least one term")
        object.__setattr__(self, "terms", tuple(clean))

    def evaluate(self, t1, t2):
        r2 = t1 * t1 + t2 * t2
        out = 0
        for c, (k1, k2), s in self.terms:
            out = out + c * np.exp(1j * (k1 * t1 + k2 * t2) - r2 / (2 * s * s))
        return out

    def spectrum(self, u1, u2):
        out = 0
        for c, (k1, k2), s in self.terms:
            out = out + c * 2 * np.pi * s * s * np.exp(-0.5 * s * s * ((u1 - k1) ** 2 + (u2 - k2) ** 2))
        return out

    def reflected(self) -> "GaussianMixtureWavelet":
        """``psi(-t)``."""
        return GaussianMixtureWavelet(tuple((c, (-k[0], -k[1]), s) for c, k, s in self.terms))

    def convolve(self, other) -> "GaussianMixtureWavelet":
        """Closed-form ``int psi_self(y) psi_other(t - y) dy``."""
        other = as_mixture(other)
        terms = []
        for c1, k1, s1 in self.terms:
            for c2, k2, s2 in other.terms:
                v1, v2 = s1 * s1, s2 * s2
                tot = v1 + v2
                kc = ((v1 * k1[0] + v2 * k2[0]) / tot, (v1 * k1[1] + v2 * k2[1]) / tot)
                dk2 = (k1[0] - k2[0]) ** 2 + (k1[1] - k2[1]) ** 2
                c = c1 * c2 * 2 * np.pi * v1 * v2 / tot * np.exp(-v1 * v2 * dk2 / (2 * tot))
                terms.append((c, kc, np.sqrt(tot)))
        return GaussianMixtureWavelet(tuple(terms))

    def correlate(self, other) -> "GaussianMixtureWavelet":
        """Closed-form ``int psi_self(y) psi_other(t + y) dy``."""
        return self.reflected().convolve(other)

    def to_dict(self) -> dict:
        return {"kind": self.kind,
                "terms": [[c.real, c.imag, k[0], k[1], s] for c, k, s in self.terms]}

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianMixtureWavelet":
        return cls(tuple((complex(t[0], t[1]), (t[2], t[3]), t[4]) for t in d["terms"]))


def as_mixture(w) -> GaussianMixtureWavelet:
    return w if isinstance(w, GaussianMixtureWavelet) else w.as_mixture()


def wavelet_from_dict(d: dict):
    """Rebuild a :class:`WaveletSpec` or :class:`GaussianMixtureWavelet`."""
    if d.get("kind") == "gaussian_mixture":
        return GaussianMixtureWavelet.from_dict(d)
    return WaveletSpec.from_dict(d)


def mother_eval(w, t1, t2):
    """Evaluate the mother wavelet at ``(t1, t2)`` (scalars or arrays)."""
    return w.evaluate(t1, t2)


def mother_spectrum(w, u1, u2):
    """Closed-form Fourier transform ``int psi(t) exp(-j u.t) dt``."""
    return w.spectrum(u1, u2)


def _check_scale(a):
    if not np.all(np.asarray(a) > 0):
        raise ScaleError(f"scale must be positive, got {a}")


def daughter_eval(w, s1, s2, a: float, theta: float):
    """``(1/a) psi(R_{-theta} s / a)`` at offsets ``s = t - b``."""
    _check_scale(a)
    r1, r2 = rotate_point((s1, s2), -theta)
    return mother_eval(w, r1 / a, r2 / a) / a


def daughter_kernel(w, g: GridSpec, b, a: float, theta: float) -> ComplexField2D:
    """Sample ``psi_{b,a,theta}`` on ``g`` by analytic evaluation (no interpolation)."""
    t1, t2 = g.coords()
    return ComplexField2D(g, daughter_eval(w, t1 - b[0], t2 - b[1], a, theta))


def lc_daughter_kernel(w, g: GridSpec, b, a: float, theta: float,
                       m: LctParams) -> ComplexField2D:
    """``exp(-j A/(2B) (|t|^2 - |b|^2)) psi_{b,a,theta}(t)`` sampled on ``g``."""
    psi = daughter_kernel(w, g, b, a, theta)
    rate = m.input_chirp_rate
    if rate == 0:
        return psi
    phase = g.radius_squared() - (b[0] ** 2 + b[1] ** 2)
    return psi.with_values(psi.values * np.exp(-1j * rate * phase))


def lc_wavelet_spectrum(w, m: LctParams, eta1, eta2):
    """LCT of the de-chirped mother wavelet ``exp(-j A/(2B)|t|^2) psi(t)`` at ``eta``.

    The two chirps cancel, leaving ``exp(j D/(2B)|eta|^2) psi_hat(eta/B) / (2 pi B)``.
    """
    phase = m.output_chirp_rate * (eta1 * eta1 + eta2 * eta2)
    return np.exp(1j * phase) * mother_spectrum(w, eta1 / m.b, eta2 / m.b) / (2 * np.pi * m.b)


@dataclass(frozen=True)
class ScaleQuadrature:
    """Log-spaced scale nodes and uniform angles used by :func:`admissibility`."""

    a_min: float = 1e-2
    a_max: float = 1e3
    n_scales: int = 256
    n_angles: int = 64
    tol: float = 5e-3
    max_refinements: int = 6

    def to_dict(self) -> dict:
        return {"a_min": self.a_min, "a_max": self.a_max, "n_scales": self.n_scales,
                "n_angles": self.n_angles, "tol": self.tol,
                "max_refinements": self.max_refinements}


@dataclass(frozen=True)
class AdmissibilityConstant:
    """Numerical admissibility constant.

    ``value`` is normalised so that the energy and reconstruction identities
    hold with it directly; it equals the raw LCT-domain integral
    ``literal_value`` multiplied by ``(2 pi B)^2``.
    """

    value: float
    relative_error_estimate: float
    literal_value: float
    quadrature: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (np.isfinite(self.value) and self.value > 0):
            raise ValueError(f"admissibility constant must be finite and positive, got {self.value}")

    def to_dict(self) -> dict:
        return {"value": self.value, "relative_error_estimate": self.relative_error_estimate,
                "literal_value": self.literal_value, "quadrature": self.quadrature}

    @classmethod
    def from_dict(cls, d: dict) -> "AdmissibilityConstant":
        return cls(float(d["value"]), float(d.get("relative_error_estimate", 0.0)),
                   float(d.get("literal_value", d["value"])), dict(d.get("quadrature", {})))


def _ray_integrand(w, m, xi_probe, log_a, theta):
    a = np.exp(log_a)[:, None]
    r1, r2 = rotate_point(xi_probe, -theta)
    vals = lc_wavelet_spectrum(w, m, a * r1[None, :], a * r2[None, :])
    return np.abs(vals) ** 2


def _ray_quadrature(w, m, xi_probe, aq, n_a, n_t):
    log_a = np.linspace(np.log(aq.a_min), np.log(aq.a_max), n_a)
    theta = np.arange(n_t) * (2 * np.pi / n_t)
    dens = _ray_integrand(w, m, xi_probe, log_a, theta)
    # da/a == d(log a); trapezoid in log a, periodic rectangle rule in theta
    wa = np.full(n_a, log_a[1] - log_a[0])
    wa[0] *= 0.5
    wa[-1] *= 0.5
    per_scale = dens.sum(axis=1) * (2 * np.pi / n_t)
    return float(np.sum(per_scale * wa)), per_scale


def admissibility(w, m: LctParams, aq: ScaleQuadrature = ScaleQuadrature(),
                  xi_probe=(1.0, 0.0)) -> AdmissibilityConstant:
    """Integrate ``|L^M{chirp psi}(a R_{-theta} xi)|^2 da dtheta / a`` along one probe ray.

    The node counts are doubled until successive estimates agree to
    ``aq.tol``.  The integrand must also have decayed at both ends of the
    scale range, otherwise the wavelet is treated as inadmissible.

    Raises
    ------
    DivergenceError
        If refinement does not settle or the scale-range tails carry weight.
    """
    xi_probe = (float(xi_probe[0]), float(xi_probe[1]))
    if xi_probe == (0.0, 0.0):
        raise ValueError("xi_probe must be nonzero")
    n_a, n_t = aq.n_scales, aq.n_angles
    prev, _ = _ray_quadrature(w, m, xi_probe, aq, n_a, n_t)
    for _ in range(aq.max_refinements):
        n_a, n_t = 2 * n_a - 1, 2 * n_t
        cur, per_scale = _ray_quadrature(w, m, xi_probe, aq, n_a, n_t)
        rel = abs(cur - prev) / abs(cur) if cur else np.inf
        if rel < aq.tol:
            break
        prev = cur
    else:
        raise DivergenceError(f"admissibility quadrature did not settle (last change {rel:.3g})")
    # the density per unit log-scale at either end bounds the truncated tail
    tail = max(per_scale[0], per_scale[-1])
    if not cur > 0 or tail > aq.tol * cur:
        raise DivergenceError(
            f"admissibility integrand has not decayed at the scale range ends "
            f"(tail density {tail:.3g} vs integral {cur:.3g})")
    richardson = cur + (cur - prev) / 3.0
    norm = (2 * np.pi * m.b) ** 2
    quad = aq.to_dict()
    quad.update(n_scales_used=n_a, n_angles_used=n_t, xi_probe=list(xi_probe))
    return AdmissibilityConstant(value=richardson * norm, relative_error_estimate=max(rel, 1e-15),
                                 literal_value=richardson, quadrature=quad)
