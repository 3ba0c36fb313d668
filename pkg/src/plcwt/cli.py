"""Command-line front end: ``plcwt {transform,reconstruct,edge,admissibility,verify}``.

Every command prints a JSON report on stdout (or writes it to ``--json``).
Exit status is 0 on success, 1 when a numerical step fails and 2 for bad
configuration or unreadable input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .edge import EdgeConfig, bundled_wheel, default_edge_wavelet, edge_detect
from .errors import ConfigError, FormatError, PlcwtError
from .grid import ComplexField2D, GridSpec
from .io import (_json_default, load_image, read_volume, save_edge_map, save_image,
                 write_sidecar, write_volume)
from .lct import LctParams
from .transform import (ScaleAngleGrid, default_threads, plcwt_forward,
                        plcwt_inverse, relative_error)
from .wavelet import AdmissibilityConstant, ScaleQuadrature, WaveletSpec, admissibility

COMMANDS = ("transform", "reconstruct", "edge", "admissibility", "verify")
EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; serialises to JSON and back unchanged.

    ``matrix`` is ``None`` until resolved; :meth:`lct` returns the default
    ``A/B = 0.01`` matrix in that case.  ``wavelet`` likewise falls back to
    the per-command default.
    """

    command: str
    matrix: Optional[LctParams] = None
    wavelet: Optional[WaveletSpec] = None
    scale_base: float = 1.5
    n_scales: int = 5
    n_angles: int = 8
    scale_min: Optional[float] = None
    full_circle: bool = False
    spacing: float = 1.0
    padding: int = 1
    input: Optional[str] = None
    output: Optional[str] = None
    admissibility: Optional[str] = None
    reference: Optional[str] = None
    size: int = 16
    window_n: int = 8
    fusion: str = "max_abs"
    threshold: object = "otsu"
    normalization: str = "paper_discrete"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("n_scales", "n_angles", "padding", "size"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if not self.scale_base > 1:
            raise ConfigError("scale base must exceed 1")
        if self.scale_min is not None and not self.scale_min > 0:
            raise ConfigError("scale_min must be positive")
        if self.command == "edge" and (self.scale_min is not None or self.full_circle):
            raise ConfigError("the edge pipeline uses base^k scales over [0, pi)")
        if not self.spacing > 0:
            raise ConfigError("spacing must be positive")
        if self.command == "verify" and self.size < 16:
            # coarser lattices under-resolve the test wavelets
            raise ConfigError("verify needs --size >= 16")
        if self.command == "edge":
            self.edge_config()  # validates the edge fields

    def lct(self) -> LctParams:
        return self.matrix if self.matrix is not None else LctParams.from_ratio(0.01)

    def mother(self) -> WaveletSpec:
        if self.wavelet is not None:
            return self.wavelet
        return default_edge_wavelet() if self.command == "edge" else WaveletSpec()

    def grid(self) -> ScaleAngleGrid:
        """``base^k`` (k = 1..n) or ``scale_min base^k`` (k = 0..n-1); angles over a half or full turn."""
        if self.scale_min is None:
            scales = self.scale_base ** np.arange(1, self.n_scales + 1)
        else:
            scales = self.scale_min * self.scale_base ** np.arange(self.n_scales)
        span = 2 * np.pi if self.full_circle else np.pi
        return ScaleAngleGrid.from_lists(scales, np.arange(self.n_angles) * (span / self.n_angles))

    def edge_config(self) -> EdgeConfig:
        m = self.lct()
        try:
            return EdgeConfig(
                ab_ratio=m.ab_ratio, scale_base=self.scale_base, n_scales=self.n_scales,
                angles=tuple(np.arange(self.n_angles) * (np.pi / self.n_angles)),
                window_n=self.window_n, fusion=self.fusion, threshold=self.threshold,
                normalization=self.normalization, wavelet=self.mother())
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["matrix"] = None if self.matrix is None else self.matrix.to_dict()
        d["wavelet"] = None if self.wavelet is None else self.wavelet.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        try:
            if d.get("matrix") is not None:
                d["matrix"] = LctParams.from_dict(d["matrix"])
            if d.get("wavelet") is not None:
                d["wavelet"] = WaveletSpec.from_dict(d["wavelet"])
            return cls(**d)
        except (TypeError, ValueError, KeyError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid config: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_json_default)

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        # accept a sidecar written by a previous run
        return cls.from_dict(d.get("run_config", d))


# -- argument parsing --------------------------------------------------------

def _floats(text: str, count=None):
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if count is not None and len(vals) not in count:
        raise argparse.ArgumentTypeError(f"expected {' or '.join(map(str, count))} numbers")
    return vals


def _threshold(text: str):
    if text == "otsu":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("threshold must be 'otsu' or a number") from None


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("shared options")
    lct = g.add_mutually_exclusive_group()
    lct.add_argument("--ab", type=float, help="A/B ratio with B = D = 1 (default 0.01)")
    lct.add_argument("--matrix", type=lambda s: _floats(s, (4,)), metavar="A,B,C,D",
                     help="full LCT matrix, AD - BC = 1")
    g.add_argument("--base", type=float, dest="scale_base", help="scale ladder base (1.5)")
    g.add_argument("--scales", type=int, dest="n_scales", help="number of scales (5)")
    g.add_argument("--angles", type=int, dest="n_angles", help="number of angles over [0, pi) (8)")
    g.add_argument("--scale-min", type=float, help="first scale; ladder becomes a_min base^k")
    g.add_argument("--full-circle", action="store_true", default=None,
                   help="spread the angles over [0, 2 pi) instead of [0, pi)")
    g.add_argument("--wavelet-k0", type=lambda s: _floats(s, (1, 2)), metavar="K1[,K2]")
    g.add_argument("--wavelet-sigma", type=float)
    g.add_argument("--zero-mean", action="store_true", default=None,
                   help="subtract the Morlet mean correction")
    g.add_argument("--config", type=Path, help="JSON RunConfig or a previous run's sidecar")
    g.add_argument("--out", dest="output", help="output path or prefix")
    g.add_argument("--json", type=Path, dest="json_out", help="write the report here")

    p = argparse.ArgumentParser(prog="plcwt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", parents=[shared], help="image -> .plcwt coefficient file")
    t.add_argument("input", nargs="?", help="P5 PGM or .npy array")
    t.add_argument("--spacing", type=float, help="sample spacing (1.0)")
    t.add_argument("--padding", type=int, help="coefficient lattice size factor (1)")

    r = sub.add_parser("reconstruct", parents=[shared], help=".plcwt -> image")
    r.add_argument("input", nargs="?", help=".plcwt file")
    r.add_argument("--admissibility", help="JSON from the admissibility command")
    r.add_argument("--reference", help="original image for the error report")

    e = sub.add_parser("edge", parents=[shared], help="edge map of a grayscale image")
    e.add_argument("input", nargs="?", help="P5 PGM (bundled wheel when omitted)")
    e.add_argument("--window", type=int, dest="window_n", help="window size N (8)")
    e.add_argument("--fusion", choices=("max_abs", "sum_abs"))
    e.add_argument("--threshold", type=_threshold, help="'otsu' or a level in [0, 1]")
    e.add_argument("--normalization", choices=("paper_discrete", "l2"))

    sub.add_parser("admissibility", parents=[shared], help="admissibility constant as JSON")

    v = sub.add_parser("verify", parents=[shared], help="run the self-check suite")
    v.add_argument("--size", type=int, help="signal side length (16)")
    return p


_FIELD_ARGS = ("scale_base", "n_scales", "n_angles", "scale_min", "full_circle", "spacing", "padding", "input", "output",
               "admissibility", "reference", "size", "window_n", "fusion", "threshold",
               "normalization")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    """Merge a ``--config`` file (if any) with the flags given on the command line."""
    if ns.config is not None:
        try:
            base = RunConfig.loads(ns.config.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        base = replace(base, command=ns.command)
    else:
        base = RunConfig(ns.command)
    updates = {k: getattr(ns, k) for k in _FIELD_ARGS if getattr(ns, k, None) is not None}
    try:
        if ns.matrix is not None:
            updates["matrix"] = LctParams(*ns.matrix)
        elif ns.ab is not None:
            updates["matrix"] = LctParams.from_ratio(ns.ab)
        if ns.wavelet_k0 is not None or ns.wavelet_sigma is not None or ns.zero_mean:
            w = base.mother()
            k0 = ns.wavelet_k0 if ns.wavelet_k0 is not None else w.k0
            if len(k0) == 1:
                k0 = (k0[0], 0.0)
            updates["wavelet"] = WaveletSpec(
                k0=tuple(k0), sigma=ns.wavelet_sigma if ns.wavelet_sigma is not None else w.sigma,
                zero_mean=bool(ns.zero_mean) or w.zero_mean)
        return replace(base, **updates)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


# -- commands ----------------------------------------------------------------

def _read_signal(path: str, spacing: float) -> ComplexField2D:
    p = Path(path)
    arr = np.load(p) if p.suffix == ".npy" else load_image(p)
    arr = np.asarray(arr)
    if arr.ndim != 2:
        raise FormatError("input must be a 2D array")
    return ComplexField2D(GridSpec(arr.shape[0], arr.shape[1], spacing), arr.astype(complex))


def _require(value, what):
    if value is None:
        raise ConfigError(f"{what} is required")
    return value


def cmd_transform(cfg: RunConfig, threads: int) -> dict:
    f = _read_signal(_require(cfg.input, "an input image"), cfg.spacing)
    out = Path(_require(cfg.output, "--out"))
    v = plcwt_forward(f, cfg.mother(), cfg.lct(), cfg.grid(), padding=cfg.padding,
                      threads=threads)
    write_volume(v, out)
    report = {"output": str(out), "shape": list(v.data.shape),
              "energy_fraction_in_border": _border_fraction(v.data),
              "run_config": cfg.to_dict()}
    write_sidecar(out, report)
    return report


def _border_fraction(data: np.ndarray) -> float:
    total = float(np.sum(np.abs(data) ** 2))
    inner = np.abs(data[..., 1:-1, 1:-1]) ** 2
    return 0.0 if total == 0 else float(1.0 - inner.sum() / total)


def _load_admissibility(cfg: RunConfig, v) -> AdmissibilityConstant:
    if cfg.admissibility:
        try:
            d = json.loads(Path(cfg.admissibility).read_text())
            return AdmissibilityConstant.from_dict(d.get("admissibility", d))
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad admissibility file: {exc}") from None
    return admissibility(v.wavelet, v.params)


def cmd_reconstruct(cfg: RunConfig, threads: int) -> dict:
    v = read_volume(_require(cfg.input, "a .plcwt input"))
    c = _load_admissibility(cfg, v)
    rec = plcwt_inverse(v, c, threads=threads)
    report = {"admissibility": c.to_dict(), "relative_error": None,
              "run_config": cfg.to_dict()}
    if cfg.reference:
        ref = _read_signal(cfg.reference, v.signal.spacing)
        if ref.spec.shape != rec.spec.shape:
            raise ConfigError("reference image shape differs from the transformed signal")
        report["relative_error"] = relative_error(rec, ref)
    if cfg.output:
        out = Path(cfg.output)
        if out.suffix == ".npy":
            np.save(out, rec.values)
        else:
            save_image(np.real(rec.values), out)
        report["output"] = str(out)
        write_sidecar(out, report)
    return report


def cmd_edge(cfg: RunConfig, threads: int) -> dict:
    if cfg.input:
        img = load_image(cfg.input)
        source = cfg.input
    else:
        img, _ = bundled_wheel()
        source = "bundled:wheel.pgm"
    ecfg = cfg.edge_config()
    em = edge_detect(img, ecfg, threads)
    report = dict(em.metadata(), input=source, run_config=cfg.to_dict())
    if cfg.output:
        files = save_edge_map(em, cfg.output, {"input": source, "run_config": cfg.to_dict()})
        report["files"] = [str(p) for p in files]
    return report


def cmd_admissibility(cfg: RunConfig, threads: int) -> dict:
    c = admissibility(cfg.mother(), cfg.lct(), ScaleQuadrature())
    report = dict(c.to_dict(), wavelet=cfg.mother().to_dict(), matrix=cfg.lct().to_dict())
    if cfg.output:
        Path(cfg.output).write_text(json.dumps(report, indent=2, default=_json_default))
    return report


def cmd_verify(cfg: RunConfig, threads: int) -> dict:
    from .checks import run_checks
    checks = run_checks(cfg.size, cfg.lct(), threads=threads)
    return {"size": cfg.size, "passed": all(c["passed"] for c in checks), "checks": checks}


HANDLERS = {"transform": cmd_transform, "reconstruct": cmd_reconstruct, "edge": cmd_edge,
            "admissibility": cmd_admissibility, "verify": cmd_verify}


def _emit(report: dict, json_out: Optional[Path]):
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default)
    if json_out is not None:
        json_out.write_text(text + "\n")
    else:
        print(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        threads = default_threads()
    except (ConfigError, ValueError) as exc:
        print(f"plcwt: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    start = time.perf_counter()
    try:
        report = HANDLERS[cfg.command](cfg, threads)
    except (ConfigError, FormatError, OSError) as exc:
        print(f"plcwt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PlcwtError, ArithmeticError, ValueError) as exc:
        print(f"plcwt: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    report["elapsed_s"] = round(time.perf_counter() - start, 3)
    _emit(report, ns.json_out)
    if cfg.command == "verify" and not report["passed"]:
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
