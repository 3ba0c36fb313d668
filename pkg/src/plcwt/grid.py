"""Sampling geometry, rotations, chirps and FFT convolution.

All fields live on centred square-cell lattices: array index ``k`` along
either axis maps to the coordinate ``(k - n/2) * spacing``.  Axis 0 of the
value array carries the first coordinate ``t1``, axis 1 carries ``t2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .errors import GridMismatch


@dataclass(frozen=True)
class GridSpec:
    n1: int
    n2: int
    spacing: float

    def __post_init__(self):
        for n in (self.n1, self.n2):
            if int(n) != n or n < 2 or n % 2:
                raise ValueError(f"grid sizes must be even integers >= 2, got {n}")
        if not (np.isfinite(self.spacing) and self.spacing > 0):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "n1", int(self.n1))
        object.__setattr__(self, "n2", int(self.n2))
        object.__setattr__(self, "spacing", float(self.spacing))

    @classmethod
    def square(cls, n: int, spacing: float = 1.0) -> "GridSpec":
        return cls(n, n, spacing)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def cell_area(self) -> float:
        return self.spacing ** 2

    def axis(self, which: int) -> np.ndarray:
        n = self.n1 if which == 0 else self.n2
        return (np.arange(n) - n // 2) * self.spacing

    def coords(self) -> Tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays ``(t1, t2)`` of shape ``(n1, n2)``."""
        return np.meshgrid(self.axis(0), self.axis(1), indexing="ij")

    def radius_squared(self) -> np.ndarray:
        t1, t2 = self.coords()
        return t1 * t1 + t2 * t2

    def coordinate(self, index):
        i, j = index
        return ((i - self.n1 // 2) * self.spacing, (j - self.n2 // 2) * self.spacing)

    def index(self, coord):
        c1, c2 = coord
        return (int(round(c1 / self.spacing)) + self.n1 // 2,
                int(round(c2 / self.spacing)) + self.n2 // 2)

    def max_abs_coordinate(self) -> float:
        return max(self.n1, self.n2) // 2 * self.spacing

    def padded(self, factor: int) -> "GridSpec":
        return GridSpec(self.n1 * factor, self.n2 * factor, self.spacing)

    def to_dict(self) -> dict:
        return {"n1": self.n1, "n2": self.n2, "spacing": self.spacing}


@dataclass(frozen=True, eq=False)
class ComplexField2D:
    """Complex samples of a function on a :class:`GridSpec`.

    The value array is copied to ``complex128`` and frozen on construction.
    """

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128, copy=True)
        if v.shape != self.spec.shape:
            raise GridMismatch(f"values shape {v.shape} != grid shape {self.spec.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite samples")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, spec: GridSpec, fn) -> "ComplexField2D":
        t1, t2 = spec.coords()
        return cls(spec, fn(t1, t2))

    @classmethod
    def zeros(cls, spec: GridSpec) -> "ComplexField2D":
        return cls(spec, np.zeros(spec.shape, dtype=complex))

    def norm(self) -> float:
        return float(np.sqrt(self.spec.cell_area * np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "ComplexField2D") -> complex:
        """L2 inner product, linear in ``self`` and antilinear in ``other``."""
        check_same_grid(self, other)
        return complex(self.spec.cell_area * np.vdot(other.values, self.values))

    def with_values(self, values) -> "ComplexField2D":
        return ComplexField2D(self.spec, values)

    def __add__(self, other):
        check_same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        check_same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__


def check_same_grid(*fields_) -> None:
    spec = fields_[0].spec
    for f in fields_[1:]:
        if f.spec != spec:
            raise GridMismatch(f"grid {f.spec} does not match {spec}")


@dataclass(frozen=True)
class Rotation:
    """The rotation ``R_theta``; note it turns points clockwise for theta > 0."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % (2 * np.pi))

    def matrix(self) -> np.ndarray:
        c, s = np.cos(self.theta), np.sin(self.theta)
        return np.array([[c, s], [-s, c]])

    def apply(self, t1, t2):
        return rotate_point((t1, t2), self.theta)

    def inverse(self) -> "Rotation":
        return Rotation(-self.theta)

    def compose(self, other: "Rotation") -> "Rotation":
        return Rotation(self.theta + other.theta)


def rotate_point(t, theta: float):
    """Apply ``R_theta``: ``(t1, t2) -> (cos t1 + sin t2, -sin t1 + cos t2)``.

    Works elementwise when ``t`` holds arrays.
    """
    t1, t2 = t
    c, s = np.cos(theta), np.sin(theta)
    return (c * t1 + s * t2, -s * t1 + c * t2)


def chirp_multiply(f: ComplexField2D, rate: float, sign: int = 1) -> ComplexField2D:
    """Multiply by the unimodular chirp ``exp(j * sign * rate * |t|^2)``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if rate == 0:
        return f
    return f.with_values(f.values * np.exp(1j * sign * rate * f.spec.radius_squared()))


def centered_to_origin(x: np.ndarray) -> np.ndarray:
    """Reorder a centred array so the origin sample sits at index 0."""
    return np.fft.ifftshift(x)


def origin_to_centered(x: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(x)


def cyclic_convolve(f: ComplexField2D, g: ComplexField2D) -> ComplexField2D:
    """Periodic Riemann-sum convolution ``int f(tau) g(t - tau) dtau``."""
    check_same_grid(f, g)
    ff = np.fft.fft2(centered_to_origin(f.values))
    gg = np.fft.fft2(centered_to_origin(g.values))
    out = origin_to_centered(np.fft.ifft2(ff * gg)) * f.spec.cell_area
    return f.with_values(out)


def discrete_delta(spec: GridSpec) -> ComplexField2D:
    """Unit-mass delta: ``1/spacing^2`` at the origin sample."""
    v = np.zeros(spec.shape, dtype=complex)
    v[spec.n1 // 2, spec.n2 // 2] = 1.0 / spec.cell_area
    return ComplexField2D(spec, v)


def embed(values: np.ndarray, shape) -> np.ndarray:
    """Zero-pad a centred array into a larger centred array."""
    out = np.zeros(shape, dtype=np.result_type(values, complex))
    o1 = shape[0] // 2 - values.shape[0] // 2
    o2 = shape[1] // 2 - values.shape[1] // 2
    out[o1:o1 + values.shape[0], o2:o2 + values.shape[1]] = values
    return out


def crop(values: np.ndarray, shape) -> np.ndarray:
    """Inverse of :func:`embed`."""
    o1 = values.shape[0] // 2 - shape[0] // 2
    o2 = values.shape[1] // 2 - shape[1] // 2
    return values[o1:o1 + shape[0], o2:o2 + shape[1]]


def offset_grid(n1: int, n2: int, spacing: float):
    """Coordinates of the centred ``n1 x n2`` lattice in origin-first order."""
    s1 = np.fft.ifftshift((np.arange(n1) - n1 // 2)) * spacing
    s2 = np.fft.ifftshift((np.arange(n2) - n2 // 2)) * spacing
    return np.meshgrid(s1, s2, indexing="ij")
