"""Batch driver: config -> potential -> count -> search -> verification -> files.

Config files are INI text.  One ``[potential]`` section gives a single run;
several ``[potential:<label>]`` sections give a suite whose runs write to
``<out>/<label>/``.  Shared sections: ``[tolerances]``, ``[region]``,
``[output]``.  Any numeric key ``k`` may instead be given as ``k_over_pi``.

Exit codes: 0 success, 1 configuration error, 2 verification failure
(including numerical failures that prevent verification).  Errors are also
printed to stderr as one JSON object per line.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import potentials as pot
from .errors import ConfigError, SpectralError
from .krein import symmetry_orbit
from .potentials import PotentialProfile
from .pruefer import count_report, prufer_curve
from .scattering import DEFAULT_TOL, Side, integrate_jost
from .search import EIGEN_THRESHOLD, PolarRect, certify, default_region, default_workers, search, verify_spectrum

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2
EMIT_DEFAULTS = {"spectrum_json": True, "prufer_csv": False, "trajectory_dump": False, "plane_scatter": False}

# family -> (required keys, optional keys with defaults)
FAMILIES = {
    "buckingham_miller": ((), {}),
    "monotone_kink": ((), {"shape": "atan-exp", "scale": None, "I": None}),
    "klaus_shaw_breather": (("peak",), {"width": None, "I": None}),
    "zero": ((), {"half_width": 1.0}),
    "odd": ((), {"amplitude": math.pi}),
    "compact_bump": (("peak", "half_width"), {}),
    "smoothed_box": (("height", "half_width", "ramp"), {}),
    "table": (("path",), {}),
}
_TEXT_KEYS = {"family", "shape", "path", "name"}


@dataclass
class RunConfig:
    label: str
    family: str
    params: dict
    tol: float = DEFAULT_TOL
    quad_tol: float = pot.QUADRATURE_TOL
    threshold: float = EIGEN_THRESHOLD
    region: PolarRect | None = None
    out: Path = Path("out")
    emit: dict = field(default_factory=lambda: dict(EMIT_DEFAULTS))
    base_dir: Path = Path(".")

    def __post_init__(self):
        for k in ("tol", "quad_tol", "threshold"):
            v = getattr(self, k)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"tolerance {k} must be positive, got {v}")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown potential family {self.family!r}; choose from {sorted(FAMILIES)}")
        required, optional = FAMILIES[self.family]
        missing = [k for k in required if k not in self.params]
        if missing:
            raise ConfigError(f"family {self.family}: missing keys {missing}")
        unknown = set(self.params) - set(required) - set(optional) - {"name"}
        if unknown:
            raise ConfigError(f"family {self.family}: unknown keys {sorted(unknown)}")
        if self.family == "klaus_shaw_breather" and (self.params.get("width") is None) == (self.params.get("I") is None):
            raise ConfigError("klaus_shaw_breather needs exactly one of width, I")
        if self.family == "monotone_kink" and "scale" in self.params and "I" in self.params:
            raise ConfigError("monotone_kink takes at most one of scale, I")

    def build(self) -> PotentialProfile:
        q = {**FAMILIES[self.family][1], **self.params}
        q.pop("name", None)
        f = self.family
        if f == "buckingham_miller":
            return pot.make_buckingham_miller()
        if f == "monotone_kink":
            if q["I"] is not None:
                return pot.make_monotone_kink(q["shape"], pot.kink_scale_for_l1(q["shape"], q["I"]))
            return pot.make_monotone_kink(q["shape"], 1.0 if q["scale"] is None else q["scale"])
        if f == "klaus_shaw_breather":
            width = q["width"] if q["width"] is not None else pot.breather_width_for_l1(q["peak"], q["I"])
            return pot.make_klaus_shaw_breather(q["peak"], width)
        if f == "zero":
            return pot.make_zero_potential(q["half_width"])
        if f == "odd":
            return pot.make_odd_potential(q["amplitude"])
        if f == "compact_bump":
            return pot.make_compact_bump(q["peak"], q["half_width"])
        if f == "smoothed_box":
            return pot.make_smoothed_box(q["height"], q["half_width"], q["ramp"])
        path = Path(q["path"])
        return pot.load_table(path if path.is_absolute() else self.base_dir / path)


def _number(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None


def _params(sec: configparser.SectionProxy) -> tuple[str, dict]:
    if "family" not in sec:
        raise ConfigError(f"[{sec.name}] needs a family key")
    out: dict = {}
    for key, text in sec.items():
        if key == "family":
            continue
        scale = 1.0
        if key.endswith("_over_pi"):
            key, scale = key[: -len("_over_pi")], math.pi
        if key == "i":
            key = "I"
        if key in _TEXT_KEYS:
            out[key] = text.strip()
        else:
            out[key] = scale * _number(key, text)
    return sec["family"].strip(), out


def parse_region(text: str) -> PolarRect:
    """'r_min, r_max, theta_min, theta_max' -> annulus-sector."""
    vals = [_number("region", t) for t in text.replace(",", " ").split()]
    if len(vals) != 4:
        raise ConfigError(f"region needs 4 numbers r_min r_max theta_min theta_max, got {text!r}")
    r0, r1, t0, t1 = vals
    if not (0 < r0 < r1 and 0 <= t0 < t1 <= math.pi):
        raise ConfigError(f"invalid region {vals}")
    return PolarRect(math.log(r0), math.log(r1), t0, t1)


def _section_region(sec: configparser.SectionProxy) -> PolarRect:
    d = default_region()
    r0 = _number("r_min", sec.get("r_min", repr(math.exp(d.rho0))))
    r1 = _number("r_max", sec.get("r_max", repr(math.exp(d.rho1))))
    t0 = _number("theta_min", sec.get("theta_min", repr(d.th0)))
    t1 = _number("theta_max", sec.get("theta_max", repr(d.th1)))
    return parse_region(f"{r0} {r1} {t0} {t1}")


def resolve_config(name: str | Path) -> Path:
    """A config path, falling back to the bundled configs by file name."""
    path = Path(name)
    if path.exists():
        return path
    bundled = Path(__file__).parent / "data" / path.name
    return bundled if bundled.exists() else path


def load_config(path: str | Path) -> list[RunConfig]:
    """Parse a config file into one RunConfig per potential section.

    Table paths are relative to the config file; the output directory is
    relative to the working directory.
    """
    path = resolve_config(path)
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc

    known = {"tolerances", "region", "output"}
    pots = [s for s in cp.sections() if s == "potential" or s.startswith("potential:")]
    stray = [s for s in cp.sections() if s not in known and s not in pots]
    if stray:
        raise ConfigError(f"unknown sections {stray}")
    if not pots:
        raise ConfigError("no [potential] section")
    if "potential" in pots and len(pots) > 1:
        raise ConfigError("use either one [potential] section or several [potential:<label>] sections")

    common: dict = {"base_dir": path.parent}
    if cp.has_section("tolerances"):
        t = cp["tolerances"]
        for key, attr in (("integrator", "tol"), ("quadrature", "quad_tol"), ("eigen_threshold", "threshold")):
            if key in t:
                common[attr] = _number(key, t[key])
        extra = set(t) - {"integrator", "quadrature", "eigen_threshold"}
        if extra:
            raise ConfigError(f"[tolerances]: unknown keys {sorted(extra)}")
    if cp.has_section("region"):
        common["region"] = _section_region(cp["region"])
    emit = dict(EMIT_DEFAULTS)
    out = Path("out")
    if cp.has_section("output"):
        o = cp["output"]
        for k in o:
            if k == "dir":
                continue
            if k not in emit:
                raise ConfigError(f"[output]: unknown key {k}")
            try:
                emit[k] = o.getboolean(k)
            except ValueError as exc:
                raise ConfigError(f"[output] {k}: {exc}") from None
        if "dir" in o:
            out = Path(o["dir"])

    runs = []
    for s in pots:
        family, params = _params(cp[s])
        label = s.split(":", 1)[1].strip() if ":" in s else str(params.get("name", family))
        run_out = out / label if len(pots) > 1 else out
        runs.append(RunConfig(label, family, params, out=run_out, emit=dict(emit), **common))
    return runs


# ---------------------------------------------------------------------------
# output


def _clean(obj):
    """JSON-ready copy: numpy scalars to Python, complex to [re, im], non-finite to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path: Path, obj) -> None:
    # float repr is the shortest string that round-trips, so reloads are exact
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([x if isinstance(x, str) else _fmt(x) for x in r])


def _diagnostic(kind: str, message: str, code: int, **extra) -> dict:
    return {"status": "error", "error": kind, "message": message, "exit_code": code, **extra}


def _emit_diag(d: dict) -> None:
    print(json.dumps(_clean(d), sort_keys=True), file=sys.stderr)


# ---------------------------------------------------------------------------
# verbs


def _count(cfg: RunConfig, p: PotentialProfile):
    rep = count_report(p, tol=cfg.tol, quad_tol=cfg.quad_tol)
    write_json(cfg.out / "count.json", {"potential": p.descriptor(), "count": rep.to_dict()})
    return rep


def _prufer_csv(cfg: RunConfig, p: PotentialProfile) -> None:
    th, L, M = prufer_curve(p, tol=cfg.tol)
    write_csv(cfg.out / "prufer.csv", ["theta", "L_eta", "mismatch"], zip(th, L, M))


def _scatter_csv(cfg: RunConfig, points) -> None:
    rows = []
    for k, q in enumerate(points):
        rows.append((str(k), "located", q.z.real, q.z.imag, abs(q.z), q.theta, q.residual))
        for m in symmetry_orbit(q.z)[1:]:
            rows.append((str(k), m.label, m.z.real, m.z.imag, abs(m.z), math.atan2(m.z.imag, m.z.real), float("nan")))
    write_csv(cfg.out / "scatter.csv", ["point", "source", "re", "im", "r", "theta", "residual"], rows)


def _trajectories(cfg: RunConfig, p: PotentialProfile, points) -> None:
    header = ["x", "re_phi1", "im_phi1", "re_phi2", "im_phi2", "omega_exponent"]
    for k, q in enumerate(points):
        for side in (Side.LEFT, Side.RIGHT):
            traj = integrate_jost(side, q.z, p, cfg.tol, end=p.matching_point)
            write_csv(cfg.out / "trajectories" / f"point{k}_{side.value}.csv", header, traj.rows())


def _spectrum(cfg: RunConfig, p: PotentialProfile, rep) -> tuple[int, dict]:
    region = cfg.region or default_region()
    res = search(p, region, cfg.tol, cfg.threshold, workers=default_workers())
    ver = verify_spectrum(res.points, p, rep, res.scale, region, cfg.tol, cfg.threshold)
    doc = {
        "potential": p.descriptor(),
        "count": rep.to_dict(),
        "region": region.to_dict(),
        "scale": res.scale,
        "winding": res.winding,
        "spectral_points": [q.to_dict() for q in res.points],
        "verification": ver.to_dict(),
        "search": {"cells_visited": res.cells_visited, "evaluations": res.evaluations, "perturbations": res.perturbations, "notes": res.notes},
        "tolerances": {"integrator": cfg.tol, "quadrature": cfg.quad_tol, "eigen_threshold": cfg.threshold},
    }
    if cfg.emit["spectrum_json"]:
        write_json(cfg.out / "spectrum.json", doc)
    if cfg.emit["plane_scatter"]:
        _scatter_csv(cfg, res.points)
    if cfg.emit["trajectory_dump"]:
        _trajectories(cfg, p, res.points)
    return (EXIT_OK if ver.passed else EXIT_VERIFY), {"points": len(res.points), "verification": ver.passed}


def _verify(cfg: RunConfig, p: PotentialProfile, rep) -> tuple[int, dict]:
    """Re-certify the points in an existing spectrum.json; search afresh if there is none."""
    path = cfg.out / "spectrum.json"
    if not path.exists():
        return _spectrum(cfg, p, rep)
    try:
        doc = json.loads(path.read_text())
        zs = [complex(*q["z"]) for q in doc["spectral_points"]]
        scale = float(doc["scale"])
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"unreadable {path}: {exc}") from exc
    region = cfg.region or default_region()
    points = [certify(z, p, scale, cfg.tol, cfg.threshold) for z in zs]
    ver = verify_spectrum(points, p, rep, scale, region, cfg.tol, cfg.threshold)
    write_json(cfg.out / "verification.json", {"potential": p.descriptor(), "source": path.name, "verification": ver.to_dict()})
    return (EXIT_OK if ver.passed else EXIT_VERIFY), {"points": len(points), "verification": ver.passed}


def run(cfg: RunConfig, verb: str = "spectrum") -> tuple[int, dict]:
    """Execute one configured run; returns (exit code, summary)."""
    t0 = time.perf_counter()
    try:
        p = cfg.build()
        pot.l1_sine_half(p, cfg.quad_tol)  # rejects profiles with non-integrable tails
    except (SpectralError, ValueError, OSError) as exc:
        return EXIT_CONFIG, _diagnostic(type(exc).__name__, str(exc), EXIT_CONFIG, label=cfg.label)
    try:
        rep = _count(cfg, p)
        summary: dict = {"I": rep.I, "exact_count": rep.exact_count, "lower_bound_N": rep.lower_bound_N}
        code = EXIT_OK
        if verb == "count":
            code = EXIT_VERIFY if rep.scan_agrees is False else EXIT_OK
        elif verb == "prufer":
            _prufer_csv(cfg, p)
        else:
            if cfg.emit["prufer_csv"]:
                _prufer_csv(cfg, p)
            code, extra = (_spectrum if verb == "spectrum" else _verify)(cfg, p, rep)
            summary.update(extra)
    except ConfigError as exc:
        return EXIT_CONFIG, _diagnostic("ConfigError", str(exc), EXIT_CONFIG, label=cfg.label)
    except SpectralError as exc:
        d = _diagnostic(type(exc).__name__, str(exc), EXIT_VERIFY, label=cfg.label)
        write_json(cfg.out / "diagnostics.json", d)
        return EXIT_VERIFY, d
    summary.update(status="ok" if code == EXIT_OK else "verification-failed", label=cfg.label, exit_code=code)
    summary["seconds"] = round(time.perf_counter() - t0, 3)
    return code, summary


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sgspectral", description="Discrete spectrum of the sine-Gordon scattering problem.")
    ap.add_argument("verb", choices=["spectrum", "count", "prufer", "verify"])
    ap.add_argument("config", help="INI run configuration")
    ap.add_argument("--tol", type=float, help="integrator tolerance override")
    ap.add_argument("--out", help="output directory override")
    ap.add_argument("--region", help="search region override: 'r_min,r_max,theta_min,theta_max'")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        runs = load_config(args.config)
        over: dict = {}
        if args.tol is not None:
            over["tol"] = args.tol
        if args.region is not None:
            over["region"] = parse_region(args.region)
        if over:
            runs = [replace(r, **over) for r in runs]
        if args.out is not None:
            base = Path(args.out)
            runs = [replace(r, out=base / r.label if len(runs) > 1 else base) for r in runs]
    except ConfigError as exc:
        _emit_diag(_diagnostic("ConfigError", str(exc), EXIT_CONFIG))
        return EXIT_CONFIG

    worst = EXIT_OK
    for r in runs:
        code, summary = run(r, args.verb)
        if code == EXIT_OK:
            print(json.dumps(_clean(summary), sort_keys=True))
        else:
            _emit_diag(summary if summary.get("status") == "error" else {**summary, "status": "error", "error": "VerificationFailed"})
        # configuration errors dominate verification failures
        worst = EXIT_CONFIG if EXIT_CONFIG in (code, worst) else max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
