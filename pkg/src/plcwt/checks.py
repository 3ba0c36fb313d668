"""Quick self-checks behind ``plcwt verify``.

Each check recomputes one identity two independent ways on small random
inputs and records the discrepancy against a fixed tolerance.
"""
from __future__ import annotations

import numpy as np

from .edge import EdgeConfig, bundled_wheel, edge_detect, pwt_baseline
from .grid import ComplexField2D, GridSpec
from .lct import LctParams, fourier_params, lct_forward, lct_inverse
from .theorems import (generalized_heisenberg, heisenberg, log_uncertainty_constant,
                       logarithmic_uncertainty, uncertainty_signals,
                       verify_convolution_theorem, verify_correlation_theorem)
from .transform import (ScaleAngleGrid, plcwt_direct, plcwt_forward, pwt_forward,
                        spectral_factorization)
from .wavelet import WaveletSpec, admissibility


def gaussian_atoms(spec: GridSpec, rng: np.random.Generator, count: int = 3,
                   width: float = 0.5, spread: float = 0.2) -> ComplexField2D:
    """Sum of modulated Gaussian atoms near the origin; smooth and well inside the grid."""
    t1, t2 = spec.coords()
    v = np.zeros(spec.shape, dtype=complex)
    for _ in range(count):
        c = rng.normal(size=2) * spread
        k = rng.normal(size=2)
        amp = rng.normal() + 1j * rng.normal()
        v += amp * np.exp(-((t1 - c[0]) ** 2 + (t2 - c[1]) ** 2) / (2 * width ** 2)
                          + 1j * (k[0] * t1 + k[1] * t2))
    return ComplexField2D(spec, v)


def _rel(x, ref) -> float:
    return float(np.linalg.norm(x - ref) / np.linalg.norm(ref))


def _check(name, value, tolerance, passed=None, bound="upper"):
    if passed is None:
        passed = value <= tolerance if bound == "upper" else value >= tolerance
    return dict(name=name, value=float(value), tolerance=float(tolerance), bound=bound,
                passed=bool(passed))


def run_checks(size: int = 16, m: LctParams = None, threads: int = 1, seed: int = 0):
    """Run the suite on ``size x size`` signals; returns one dict per check."""
    if m is None:
        m = LctParams.from_ratio(0.01)
    rng = np.random.default_rng(seed)
    spec = GridSpec.square(size, 4.0 / size)
    w = WaveletSpec(k0=(4.0, 0.0), sigma=0.5, zero_mean=True)
    grid = ScaleAngleGrid.from_lists([0.75, 1.0], np.arange(4) * np.pi / 4)
    f = gaussian_atoms(spec, rng)
    g = gaussian_atoms(spec, rng)
    out = []

    F = lct_forward(f, m)
    back = lct_inverse(F, m, spec)
    out.append(_check("lct_unitarity", abs(F.norm() / f.norm() - 1), 1e-6))
    out.append(_check("lct_round_trip", _rel(back.values, f.values), 1e-8))

    v = plcwt_forward(f, w, fourier_params(), grid, threads=threads)
    p = pwt_forward(f, w, grid, threads=threads)
    out.append(_check("pwt_reduction", np.max(np.abs(v.data - p.data)), 1e-12))

    v = plcwt_forward(f, w, m, grid, threads=threads)
    t1, t2 = v.spatial.coords()
    worst = 0.0
    for i, a in enumerate(grid.scales):
        for j, th in enumerate(grid.angles):
            for k in rng.choice(v.spatial.n1 * v.spatial.n2, size=8, replace=False):
                r, c = divmod(int(k), v.spatial.n2)
                ref = plcwt_direct(f, w, m, (t1[r, c], t2[r, c]), a, th)
                worst = max(worst, abs(v.data[i, j, r, c] - ref) / max(abs(ref), 1e-300))
    out.append(_check("direct_oracle", worst, 1e-8))

    # the LCT-domain product is cyclic, so both paths need the padded lattice
    v2 = plcwt_forward(f, w, m, grid, padding=2, threads=threads)
    plane = spectral_factorization(f, w, m, grid.scales[1], grid.angles[1], padding=2)
    out.append(_check("spectral_factorization", _rel(plane.values, v2.data[1, 1]), 1e-6))

    alpha, beta = 0.7 - 0.2j, -1.3 + 0.5j
    vfg = plcwt_forward(f.with_values(alpha * f.values + beta * g.values), w, m, grid)
    vg = plcwt_forward(g, w, m, grid)
    out.append(_check("linearity", _rel(vfg.data, alpha * v.data + beta * vg.data),
                      1e-10))

    # theorem checks use the Fourier matrix: the identities are exact there
    wf = WaveletSpec(k0=(4.0, 0.0), sigma=0.5, zero_mean=True)
    wg = WaveletSpec(k0=(3.2, 2.4), sigma=0.5, zero_mean=True)
    conv = verify_convolution_theorem(f, g, wf, wg, fourier_params(), grid)
    corr = verify_correlation_theorem(f, g, wf, wg, fourier_params(), grid)
    out.append(_check("convolution_theorem", conv.max_relative_error, conv.tolerance))
    out.append(_check("correlation_theorem", corr.max_relative_error, corr.tolerance))

    mu_ref = -np.euler_gamma - 2 * np.log(2) - np.log(np.pi)
    out.append(_check("log_constant", abs(log_uncertainty_constant() - mu_ref), 1e-12))

    # the moments need a field that has decayed at the border: fixed 64 x 64 grid
    iw = WaveletSpec()
    igrid = ScaleAngleGrid.log_uniform(0.5, 8.0, 12, 16)
    c = admissibility(iw, m)
    sig = uncertainty_signals()["gaussian"]
    vol = plcwt_forward(sig, iw, m, igrid, padding=2, threads=threads)
    for name, rep in (("heisenberg", heisenberg(sig, iw, m, igrid, c=c, volume=vol)),
                      ("heisenberg_p1", generalized_heisenberg(sig, iw, m, igrid, 1.0, c=c,
                                                               volume=vol)),
                      ("log_uncertainty", logarithmic_uncertainty(sig, iw, m, igrid, c=c,
                                                                  volume=vol))):
        out.append(_check(name, rep.ratio, 1.0, passed=rep.satisfied, bound="lower"))

    img, mask = bundled_wheel()
    cfg = EdgeConfig(ab_ratio=m.ab_ratio if abs(m.ab_ratio) <= 0.2 else 0.01)
    em = edge_detect(img, cfg, threads)
    recall = float((em.binary & mask).sum() / mask.sum())
    out.append(_check("edge_recall", recall, 0.9, bound="lower"))
    base = pwt_baseline(img, cfg, threads)
    again = edge_detect(img, EdgeConfig(ab_ratio=0.0, wavelet=cfg.wavelet), threads)
    same = np.array_equal(base.magnitude, again.magnitude)
    out.append(_check("pwt_baseline_identity", 0.0 if same else 1.0, 0.0))
    return out
