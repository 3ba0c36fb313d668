"""Binary PGM images, ``.plcwt`` coefficient files and JSON sidecars."""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .grid import GridSpec
from .lct import LctParams
from .transform import CoefficientVolume, ScaleAngleGrid
from .wavelet import wavelet_from_dict

PLCWT_MAGIC = b"PLCW"
PLCWT_VERSION = 1


def _pgm_tokens(raw: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens; returns them and the payload offset."""
    tokens, pos, n = [], 0, len(raw)
    while len(tokens) < count:
        while pos < n and raw[pos:pos + 1].isspace():
            pos += 1
        if pos < n and raw[pos:pos + 1] == b"#":
            while pos < n and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not raw[pos:pos + 1].isspace() and raw[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        tokens.append(raw[start:pos])
    # exactly one whitespace byte separates the header from the raster
    if pos >= n or not raw[pos:pos + 1].isspace():
        raise FormatError("malformed PGM header")
    return tokens, pos + 1


def decode_pgm(raw: bytes) -> np.ndarray:
    """Decode a binary (P5) PGM into a float array scaled to ``[0, 1]``."""
    if raw[:2] != b"P5":
        raise FormatError("not a binary PGM (magic must be P5)")
    try:
        tokens, offset = _pgm_tokens(raw[2:], 3)
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise FormatError("malformed PGM header") from None
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise FormatError("invalid PGM dimensions or maxval")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = width * height * dtype.itemsize
    payload = raw[2 + offset:2 + offset + need]
    if len(payload) < need:
        raise FormatError(f"truncated PGM payload: {len(payload)} of {need} bytes")
    data = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return data.astype(float) / maxval


def load_image(path) -> np.ndarray:
    """Read a P5 PGM as a ``[0, 1]`` float array; raises ``OSError`` if unreadable."""
    return decode_pgm(Path(path).read_bytes())


def quantize(values: np.ndarray) -> np.ndarray:
    """Map ``[0, 1]`` to 8-bit codes, rounding halves up."""
    v = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
    return np.floor(v * 255.0 + 0.5).astype(np.uint8)


def encode_pgm(values: np.ndarray) -> bytes:
    q = quantize(values)
    if q.ndim != 2:
        raise ValueError("PGM images must be 2D")
    header = f"P5\n{q.shape[1]} {q.shape[0]}\n255\n".encode("ascii")
    return header + q.tobytes()


def save_image(values: np.ndarray, path) -> Path:
    path = Path(path)
    path.write_bytes(encode_pgm(values))
    return path


def write_sidecar(path, payload: dict) -> Path:
    """Write ``payload`` as indented JSON next to ``path`` (``<path>.json``)."""
    side = Path(str(path) + ".json")
    side.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default))
    return side


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def save_edge_map(edge_map, prefix, extra: dict = None):
    """Write ``<prefix>_magnitude.pgm``, ``<prefix>_binary.pgm`` and ``<prefix>.json``."""
    prefix = Path(prefix)
    mag = save_image(edge_map.magnitude, f"{prefix}_magnitude.pgm")
    binary = save_image(edge_map.binary.astype(float), f"{prefix}_binary.pgm")
    meta = dict(edge_map.metadata(), magnitude=mag.name, binary=binary.name)
    if extra:
        meta.update(extra)
    side = Path(f"{prefix}.json")
    side.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_json_default))
    return mag, binary, side


def write_volume(v: CoefficientVolume, path) -> Path:
    """``PLCW`` magic, little-endian uint32 header length, JSON header, complex64 planes."""
    header = dict(v.header(), version=PLCWT_VERSION, dtype="<c8", order="scale,angle,row,col")
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(PLCWT_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(v.data, dtype="<c8").tobytes())
    return path


def read_volume(path) -> CoefficientVolume:
    raw = Path(path).read_bytes()
    if raw[:4] != PLCWT_MAGIC:
        raise FormatError("not a .plcwt file")
    if len(raw) < 8:
        raise FormatError("truncated .plcwt header")
    (hlen,) = struct.unpack("<I", raw[4:8])
    try:
        header = json.loads(raw[8:8 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"bad .plcwt header: {exc}") from None
    shape = tuple(header["shape"])
    payload = raw[8 + hlen:]
    need = int(np.prod(shape)) * 8
    if len(payload) != need:
        raise FormatError(f".plcwt payload has {len(payload)} bytes, expected {need}")
    data = np.frombuffer(payload, dtype="<c8").reshape(shape)
    sp, sg = header["spatial"], header["signal"]
    return CoefficientVolume(
        grid=ScaleAngleGrid.from_dict(header["grid"]),
        spatial=GridSpec(sp["n1"], sp["n2"], sp["spacing"]),
        data=data.astype(np.complex128),
        params=LctParams.from_dict(header["params"]),
        wavelet=wavelet_from_dict(header["wavelet"]),
        signal=GridSpec(sg["n1"], sg["n2"], sg["spacing"]))
