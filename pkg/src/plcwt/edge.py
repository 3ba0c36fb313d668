"""Multi-scale, multi-direction edge detection with the discrete PLCWT.

Images are real arrays in ``[0, 1]`` indexed ``[row, col]``.  Pixel ``(i, j)``
of an ``H x W`` image sits at the centred coordinate ``(i - H/2, j - W/2)``
in pixel units, so the chirp ``exp(-j A/(2B) |x|^2)`` is symmetric about the
image centre.  For every channel ``(a, theta)`` the coefficient is::

    W(b) = norm(a) * sum_{x in window(b)} f(x) exp(-j A/(2B) (|x|^2 - |b|^2)) psi(R (x - b) / a)

over the ``(N+1) x (N+1)`` window centred on ``b``, with replicate padding
past the borders.  ``norm`` is ``1/a^2`` (``paper_discrete``) or ``1/a``
(``l2``).
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Optional, Tuple, Union

import numpy as np
from scipy.signal import fftconvolve

from .errors import EmptyStack, FormatError
from .grid import rotate_point
from .transform import _run, default_threads
from .wavelet import WaveletSpec, mother_eval

NORMALIZATIONS = ("paper_discrete", "l2")
FUSIONS = ("max_abs", "sum_abs")
OTSU = "otsu"
N_BINS = 256


def default_edge_wavelet() -> WaveletSpec:
    """Zero-mean Morlet with ``k0 = (3, 0)``: resolved in pixel units down to a = 1.5."""
    return WaveletSpec(k0=(3.0, 0.0), sigma=1.0, zero_mean=True)


@dataclass(frozen=True)
class EdgeConfig:
    """Parameters of the edge pipeline.

    ``threshold`` is ``"otsu"`` or a fixed level in ``[0, 1]``.  ``window_n``
    is the side of the summation window minus one; a short window keeps the
    coarse scales from blurring neighbouring edges together.
    ``rotation_sign = -1`` rotates window offsets by ``R_{-theta}`` as in
    the continuous transform; ``+1`` uses ``R_theta``.
    """

    ab_ratio: float = 0.01
    scale_base: float = 1.5
    n_scales: int = 5
    angles: Tuple[float, ...] = tuple(k * np.pi / 8 for k in range(8))
    window_n: int = 8
    fusion: str = "max_abs"
    threshold: Union[str, float] = OTSU
    normalization: str = "paper_discrete"
    rotation_sign: int = -1
    wavelet: WaveletSpec = field(default_factory=default_edge_wavelet)

    def __post_init__(self):
        angles = tuple(float(t) for t in self.angles)
        object.__setattr__(self, "angles", angles)
        if int(self.n_scales) != self.n_scales or self.n_scales < 1:
            raise ValueError("n_scales must be a positive integer")
        if not self.scale_base > 0:
            raise ValueError("scale_base must be positive")
        if not angles or len(set(angles)) != len(angles):
            raise ValueError("angles must be nonempty and distinct")
        if any(not 0 <= t < np.pi for t in angles):
            raise ValueError("angles must lie in [0, pi)")
        if int(self.window_n) != self.window_n or self.window_n < 4 or self.window_n % 2:
            raise ValueError("window_n must be an even integer >= 4")
        if not 0 <= self.ab_ratio <= 0.2:
            raise ValueError("ab_ratio must lie in [0, 0.2]")
        if self.fusion not in FUSIONS:
            raise ValueError(f"fusion must be one of {FUSIONS}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        if self.rotation_sign not in (1, -1):
            raise ValueError("rotation_sign must be +1 or -1")
        if isinstance(self.threshold, str):
            if self.threshold != OTSU:
                raise ValueError("threshold must be 'otsu' or a number")
        elif not 0 <= float(self.threshold) <= 1:
            raise ValueError("fixed threshold must lie in [0, 1]")

    @property
    def scales(self) -> np.ndarray:
        """``scale_base^k`` for ``k = 1..n_scales``."""
        return self.scale_base ** np.arange(1, self.n_scales + 1)

    @property
    def chirp_rate(self) -> float:
        return self.ab_ratio / 2.0

    def to_dict(self) -> dict:
        return {"ab_ratio": self.ab_ratio, "scale_base": self.scale_base,
                "n_scales": self.n_scales, "angles": list(self.angles),
                "window_n": self.window_n, "fusion": self.fusion,
                "threshold": self.threshold, "normalization": self.normalization,
                "rotation_sign": self.rotation_sign, "wavelet": self.wavelet.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "EdgeConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown edge config keys: {sorted(unknown)}")
        d = dict(d)
        if "wavelet" in d:
            d["wavelet"] = WaveletSpec.from_dict(d["wavelet"])
        if "angles" in d:
            d["angles"] = tuple(d["angles"])
        return cls(**d)


@dataclass(frozen=True, eq=False)
class EdgeMap:
    """Fused magnitude, binary edge map and the channel stack they came from."""

    magnitude: np.ndarray
    binary: np.ndarray
    config: EdgeConfig
    threshold_value: float
    degenerate: bool = False
    per_channel: Optional[np.ndarray] = None

    def __post_init__(self):
        if np.any(self.magnitude < 0):
            raise ValueError("magnitude must be nonnegative")
        if self.binary.shape != self.magnitude.shape:
            raise ValueError("binary and magnitude shapes differ")

    def metadata(self) -> dict:
        return {"config": self.config.to_dict(), "threshold": self.threshold_value,
                "degenerate_histogram": self.degenerate, "shape": list(self.magnitude.shape),
                "edge_pixels": int(self.binary.sum())}


def _pixel_coords(shape):
    i = np.arange(shape[0]) - shape[0] // 2
    j = np.arange(shape[1]) - shape[1] // 2
    return np.meshgrid(i.astype(float), j.astype(float), indexing="ij")


def _norm(a: float, cfg: EdgeConfig) -> float:
    return 1.0 / (a * a) if cfg.normalization == "paper_discrete" else 1.0 / a


def _window_kernel(a: float, theta: float, cfg: EdgeConfig) -> np.ndarray:
    h = cfg.window_n // 2
    d1, d2 = np.meshgrid(np.arange(-h, h + 1.0), np.arange(-h, h + 1.0), indexing="ij")
    r1, r2 = rotate_point((d1, d2), cfg.rotation_sign * theta)
    return mother_eval(cfg.wavelet, r1 / a, r2 / a)


def discrete_window_coefficient(img: np.ndarray, b, a: float, theta: float,
                                cfg: EdgeConfig) -> complex:
    """Direct window sum for pixel ``b = (row, col)``; the reference for :func:`directional_maps`."""
    img = np.asarray(img, dtype=float)
    h = cfg.window_n // 2
    rows = np.clip(np.arange(b[0] - h, b[0] + h + 1), 0, img.shape[0] - 1)
    cols = np.clip(np.arange(b[1] - h, b[1] + h + 1), 0, img.shape[1] - 1)
    patch = img[np.ix_(rows, cols)]
    c1 = b[0] - img.shape[0] // 2
    c2 = b[1] - img.shape[1] // 2
    x1, x2 = np.meshgrid(np.arange(c1 - h, c1 + h + 1.0), np.arange(c2 - h, c2 + h + 1.0),
                         indexing="ij")
    chirp = np.exp(-1j * cfg.chirp_rate * ((x1 ** 2 + x2 ** 2) - (c1 ** 2 + c2 ** 2)))
    kern = _window_kernel(a, theta, cfg)
    return complex(_norm(a, cfg) * np.sum(patch * chirp * kern))


def directional_maps(img: np.ndarray, cfg: EdgeConfig,
                     threads: Optional[int] = None) -> np.ndarray:
    """``|W|`` for every pixel and channel, shape ``(n_scales, n_angles, H, W)``."""
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise ValueError("expected a 2D grayscale image")
    if threads is None:
        threads = default_threads()
    h = cfg.window_n // 2
    padded = np.pad(img, h, mode="edge")
    rate = cfg.chirp_rate
    if rate:
        p1, p2 = _pixel_coords(img.shape)
        # the chirp uses the coordinates of the padded samples themselves
        q1 = (np.arange(padded.shape[0]) - h - img.shape[0] // 2.0)[:, None]
        q2 = (np.arange(padded.shape[1]) - h - img.shape[1] // 2.0)[None, :]
        source = padded * np.exp(-1j * rate * (q1 ** 2 + q2 ** 2))
        out_chirp = np.exp(1j * rate * (p1 ** 2 + p2 ** 2))
    else:
        source, out_chirp = padded, None
    scales = cfg.scales

    def channel(idx):
        i, j = idx
        a = scales[i]
        kern = _window_kernel(a, cfg.angles[j], cfg)
        # sum_d f(b + d) K(d) is a convolution with the flipped kernel
        resp = fftconvolve(source, kern[::-1, ::-1], mode="valid") * _norm(a, cfg)
        if out_chirp is not None:
            resp = resp * out_chirp
        return np.abs(resp)

    idx = [(i, j) for i in range(len(scales)) for j in range(len(cfg.angles))]
    maps = _run(channel, idx, threads)
    return np.stack(maps).reshape((len(scales), len(cfg.angles)) + img.shape)


def fuse(stack: np.ndarray, method: str = "max_abs", scales=None) -> np.ndarray:
    """Combine a ``(n_scales, n_angles, H, W)`` magnitude stack into one map in ``[0, 1]``.

    ``max_abs`` normalises every channel by its own peak and takes the
    pointwise maximum.  ``sum_abs`` sums channels with weight ``1/a``.
    """
    stack = np.asarray(stack, dtype=float)
    if stack.size == 0:
        raise EmptyStack("nothing to fuse")
    if stack.ndim == 2:
        stack = stack[None, None]
    if method == "max_abs":
        peaks = stack.max(axis=(-2, -1), keepdims=True)
        normed = np.divide(stack, peaks, out=np.zeros_like(stack), where=peaks > 0)
        out = normed.max(axis=(0, 1))
    elif method == "sum_abs":
        if scales is None:
            scales = np.ones(stack.shape[0])
        w = (1.0 / np.asarray(scales, dtype=float))[:, None, None, None]
        out = np.sum(stack * w, axis=(0, 1))
    else:
        raise ValueError(f"unknown fusion method {method!r}")
    peak = out.max()
    return out / peak if peak > 0 else out


def otsu_level(mag: np.ndarray) -> Tuple[float, bool]:
    """Otsu threshold on a 256-bin histogram of ``[0, 1]``.

    Returns ``(tau, degenerate)``; the lowest bin wins ties, and pixels
    with ``mag >= tau`` are foreground.  A histogram occupying one bin is
    degenerate and yields ``tau = inf``.
    """
    v = np.asarray(mag, dtype=float).ravel()
    bins = np.minimum((v * N_BINS).astype(int), N_BINS - 1)
    hist = np.bincount(bins, minlength=N_BINS).astype(float)
    p = hist / hist.sum()
    centers = (np.arange(N_BINS) + 0.5) / N_BINS
    w0 = np.cumsum(p)
    m0 = np.cumsum(p * centers)
    mt = m0[-1]
    w1 = 1.0 - w0
    valid = (w0 > 0) & (w1 > 1e-15)
    if not np.any(valid):
        return float("inf"), True
    between = np.zeros(N_BINS)
    between[valid] = (mt * w0[valid] - m0[valid]) ** 2 / (w0[valid] * w1[valid])
    k = int(np.argmax(between))
    return (k + 1) / N_BINS, False


def threshold(mag: np.ndarray, method: Union[str, float] = OTSU):
    """Binary map ``mag >= tau``; returns ``(binary, tau, degenerate)``."""
    mag = np.asarray(mag, dtype=float)
    if isinstance(method, str):
        if method != OTSU:
            raise ValueError(f"unknown threshold method {method!r}")
        tau, degenerate = otsu_level(mag)
    else:
        tau, degenerate = float(method), False
    if degenerate:
        return np.zeros(mag.shape, dtype=bool), tau, True
    return mag >= tau, tau, False


def edge_detect(img: np.ndarray, cfg: EdgeConfig = EdgeConfig(),
                threads: Optional[int] = None) -> EdgeMap:
    """Directional maps, fusion and thresholding in one call."""
    stack = directional_maps(img, cfg, threads)
    mag = fuse(stack, cfg.fusion, cfg.scales)
    binary, tau, degenerate = threshold(mag, cfg.threshold)
    return EdgeMap(mag, binary, cfg, tau, degenerate, stack)


def pwt_baseline(img: np.ndarray, cfg: EdgeConfig = EdgeConfig(),
                 threads: Optional[int] = None) -> EdgeMap:
    """The same pipeline with the chirp switched off (``A/B = 0``)."""
    return edge_detect(img, replace(cfg, ab_ratio=0.0), threads)


def carrier_angle(theta: float, cfg: EdgeConfig) -> float:
    """Direction (radians, mod pi) of the oscillation a channel responds to."""
    k1, k2 = cfg.wavelet.k0
    # psi(R d / a) oscillates along R^T k0
    c1, c2 = rotate_point((k1, k2), -cfg.rotation_sign * theta)
    return float(np.arctan2(c2, c1) % np.pi)


def matched_channel(line_angle: float, cfg: EdgeConfig) -> int:
    """Index of the angle channel tuned to a line with direction ``(cos phi, sin phi)``."""
    normal = (line_angle + np.pi / 2) % np.pi
    diffs = [abs((carrier_angle(t, cfg) - normal + np.pi / 2) % np.pi - np.pi / 2)
             for t in cfg.angles]
    return int(np.argmin(diffs))


# -- synthetic wheel ---------------------------------------------------------

WHEEL_SIZE = 64
WHEEL_SPOKES = 8
WHEEL_RADIUS = 26.0
WHEEL_WIDTH = 2.0


def line_distance(shape, angle: float) -> np.ndarray:
    """Distance of each pixel centre from the line through the origin with direction angle."""
    p1, p2 = _pixel_coords(shape)
    return np.abs(-np.sin(angle) * p1 + np.cos(angle) * p2)


def spoke_angles(n_spokes: int = WHEEL_SPOKES) -> np.ndarray:
    return np.arange(n_spokes) * (np.pi / n_spokes)


def synthetic_wheel(n: int = WHEEL_SIZE, n_spokes: int = WHEEL_SPOKES,
                    radius: float = WHEEL_RADIUS, width: float = WHEEL_WIDTH):
    """Bright antialiased spokes through the centre on a dark disk-free background.

    Returns ``(image, mask, labels)``: ``mask`` marks pixels within
    ``width/2`` of a spoke axis and inside ``radius``; ``labels`` holds the
    index of the nearest spoke for mask pixels and ``-1`` elsewhere.
    """
    shape = (n, n)
    p1, p2 = _pixel_coords(shape)
    r = np.hypot(p1, p2)
    dists = np.stack([line_distance(shape, phi) for phi in spoke_angles(n_spokes)])
    nearest = dists.min(axis=0)
    radial = np.clip(radius + 0.5 - r, 0.0, 1.0)
    img = np.clip(width / 2 + 0.5 - nearest, 0.0, 1.0) * radial
    mask = (nearest <= width / 2) & (r <= radius)
    labels = np.where(mask, dists.argmin(axis=0), -1)
    return img, mask, labels


def _data_bytes(name: str) -> bytes:
    return resources.files("plcwt").joinpath("data").joinpath(name).read_bytes()


def bundled_wheel():
    """Load the bundled wheel image and spoke mask; verifies their SHA-256 digests."""
    from .io import decode_pgm
    raw_img, raw_mask = _data_bytes("wheel.pgm"), _data_bytes("wheel_mask.pgm")
    for raw, want in ((raw_img, WHEEL_DIGESTS["wheel.pgm"]),
                      (raw_mask, WHEEL_DIGESTS["wheel_mask.pgm"])):
        got = hashlib.sha256(raw).hexdigest()
        if got != want:
            raise FormatError(f"bundled asset checksum mismatch: {got}")
    return decode_pgm(raw_img), decode_pgm(raw_mask) > 0.5


WHEEL_DIGESTS = {
    "wheel.pgm": "f3a9334dcea24b0ac4949736a149ce4d206557ee5b0e8e15008fcf1f389faa82",
    "wheel_mask.pgm": "a22403e1ebfb8c4e60616c68cc01e062efcfd1a296dd596e20e441ab537dbc4f",
}
