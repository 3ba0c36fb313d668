"""Two-dimensional linear canonical transform.

The transform with matrix ``M = (A, B; C, D)`` (``AD - BC = 1``, ``B != 0``)
uses the kernel::

    h_M(t, xi) = 1/(2 pi B) * exp(j [A/(2B) |t|^2 - t.xi/B + D/(2B) |xi|^2])

and is evaluated as chirp -> centred DFT -> chirp.  The output lives on a
``xi``-lattice with spacing ``2 pi |B| / (n * spacing)``, chosen so that
``xi / B`` falls exactly on the DFT angular-frequency lattice.  With that
choice the discrete transform is unitary and its inverse is exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandwidthError, GridMismatch
from .grid import (ComplexField2D, GridSpec, centered_to_origin, check_same_grid,
                   chirp_multiply, cyclic_convolve, origin_to_centered)

UNIMODULAR_TOL = 1e-12


@dataclass(frozen=True)
class LctParams:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("LCT parameters must be finite")
        if self.b == 0:
            raise ValueError("B = 0 is not supported")
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > UNIMODULAR_TOL:
            raise ValueError(f"AD - BC must equal 1, got {det!r}")

    @classmethod
    def from_ratio(cls, ab_ratio: float, b: float = 1.0, d: float = 1.0) -> "LctParams":
        """Build ``M`` with ``A/B = ab_ratio``; ``C`` completes unimodularity."""
        a = ab_ratio * b
        return cls(a, b, (a * d - 1.0) / b, d)

    @property
    def input_chirp_rate(self) -> float:
        """``A / (2B)``."""
        return self.a / (2.0 * self.b)

    @property
    def output_chirp_rate(self) -> float:
        """``D / (2B)``."""
        return self.d / (2.0 * self.b)

    @property
    def inverse_b(self) -> float:
        return 1.0 / self.b

    @property
    def ab_ratio(self) -> float:
        return self.a / self.b

    def inverse(self) -> "LctParams":
        return LctParams(self.d, -self.b, -self.c, self.a)

    def is_fourier(self) -> bool:
        return self.a == 0 and self.b == 1 and self.c == -1 and self.d == 0

    def to_dict(self) -> dict:
        return {"A": self.a, "B": self.b, "C": self.c, "D": self.d}

    @classmethod
    def from_dict(cls, d: dict) -> "LctParams":
        return cls(d["A"], d["B"], d["C"], d["D"])


def fourier_params() -> LctParams:
    """``M = (0, 1; -1, 0)``, under which the LCT is the (scaled) Fourier transform."""
    return LctParams(0.0, 1.0, -1.0, 0.0)


def lct_kernel(m: LctParams, t, xi) -> complex:
    t1, t2 = t
    x1, x2 = xi
    phase = (m.input_chirp_rate * (t1 * t1 + t2 * t2)
             - (t1 * x1 + t2 * x2) / m.b
             + m.output_chirp_rate * (x1 * x1 + x2 * x2))
    return np.exp(1j * phase) / (2 * np.pi * m.b)


def frequency_grid(spec: GridSpec, m: LctParams) -> GridSpec:
    """The ``xi``-lattice on which :func:`lct_forward` returns its output."""
    if spec.n1 != spec.n2:
        raise GridMismatch("the LCT needs a square grid")
    return GridSpec(spec.n1, spec.n2, 2 * np.pi * abs(m.b) / (spec.n1 * spec.spacing))


def check_chirp_bandwidth(spec: GridSpec, rate: float) -> None:
    """Raise if the chirp ``exp(j rate |t|^2)`` turns by more than pi per sample."""
    step = abs(2 * rate) * spec.max_abs_coordinate() * spec.spacing
    if step > np.pi:
        raise BandwidthError(
            f"chirp phase step {step:.3g} rad exceeds pi on this grid; "
            "use a finer spacing or a smaller |A/B|")


def centered_dft2(x: np.ndarray, sign: int = -1) -> np.ndarray:
    """``X[k] = sum_m x[m] exp(sign * 2 pi j (m - n/2)(k - n/2) / n)`` on both axes."""
    x0 = centered_to_origin(x)
    if sign < 0:
        out = np.fft.fft2(x0)
    else:
        out = np.fft.ifft2(x0) * x.size
    return origin_to_centered(out)


def _lct(f: ComplexField2D, m: LctParams, out_spec=None) -> ComplexField2D:
    if out_spec is None:
        out_spec = frequency_grid(f.spec, m)
    elif not np.isclose(out_spec.spacing, frequency_grid(f.spec, m).spacing, rtol=1e-9):
        raise GridMismatch("target grid is not the reciprocal lattice of the input")
    ft = chirp_multiply(f, m.input_chirp_rate)
    sign = -1 if m.b > 0 else 1
    spectrum = centered_dft2(ft.values, sign) * f.spec.cell_area / (2 * np.pi * m.b)
    out = ComplexField2D(out_spec, spectrum)
    return chirp_multiply(out, m.output_chirp_rate)


def lct_forward(f: ComplexField2D, m: LctParams) -> ComplexField2D:
    """Linear canonical transform of ``f`` sampled on its native ``xi``-grid.

    Raises
    ------
    BandwidthError
        If the input chirp ``A/(2B) |t|^2`` aliases on ``f``'s grid.
    """
    check_chirp_bandwidth(f.spec, m.input_chirp_rate)
    return _lct(f, m)


def lct_inverse(F: ComplexField2D, m: LctParams, spec: GridSpec = None) -> ComplexField2D:
    """Exact inverse of :func:`lct_forward` for the same ``m``.

    The inverse kernel is ``conj(h_M)``, which equals ``-h_{M^-1}`` with the
    roles of ``t`` and ``xi`` exchanged.  Pass the original ``spec`` to get
    back a field on exactly that grid (the reciprocal spacing is otherwise
    recomputed and may differ in the last bit).
    """
    out = _lct(F, m.inverse(), spec) * -1.0
    check_chirp_bandwidth(out.spec, m.input_chirp_rate)
    return out


def fourier_transform(f: ComplexField2D) -> ComplexField2D:
    """Unnormalised FT ``int f(t) exp(-j t.u) dt`` on the angular-frequency lattice."""
    out_spec = frequency_grid(f.spec, fourier_params())
    return ComplexField2D(out_spec, centered_dft2(f.values, -1) * f.spec.cell_area)


def lc_convolution(f: ComplexField2D, g: ComplexField2D, m: LctParams) -> ComplexField2D:
    """Canonical convolution ``exp(-j a|t|^2) [(f exp(j a|t|^2)) * g](t)``, ``a = A/(2B)``.

    The inner convolution is cyclic; pad the inputs when wrap-around matters.
    """
    check_same_grid(f, g)
    rate = m.input_chirp_rate
    inner = cyclic_convolve(chirp_multiply(f, rate), g)
    return chirp_multiply(inner, rate, sign=-1)
