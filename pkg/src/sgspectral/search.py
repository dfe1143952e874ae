"""Argument-principle search for eigenvalues in the upper half plane.

W is integrated on the fundamental domain {Re z >= 0, 0.05 <= |z| <= 1};
other points follow from the exact identities

    W(-conj z) = conj W(z),     W(1/conj z) = (-1)^Q conj W(z).

Contours that dip below |z| = 0.05 are evaluated at the image beyond 20.  Contours are sampled on
dyadic parameter grids so neighbouring cells share (cached) W values.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import HypothesisNotMet, NotAnEigenvalue, SubdivisionLimit, ZeroOnContour
from .krein import (
    SignatureReport,
    eigenfunction,
    signature_report,
    symmetry_orbit,
    zero_momentum_check,
)
from .potentials import HypothesisTag, PotentialProfile, classify, l1_sine_half, u_x_l1
from .pruefer import CountReport, count_report
from .scattering import DEFAULT_TOL, MIN_MODULUS, wronskian_batch, wronskian_derivative

EIGEN_THRESHOLD = 1e-8
SAFETY = 1e-6
MAX_DEPTH = 40
R_MIN, R_MAX = 0.05, 20.0
AXIS_MARGIN = 0.01
SPLIT_FRACTIONS = (0.5789, 0.4321, 0.6180, 0.3819, 0.5333)
ON_CIRCLE_TOL = 1e-6
LOG_MIN_MODULUS = math.log(MIN_MODULUS)
SIMPLE_TOL = 1e-6
MAX_EDGE_LEVEL = 14


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SGSPECTRAL_WORKERS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# W evaluation with symmetry reduction and caching


class WEvaluator:
    """Cached W(z) on the closed upper half plane via the fundamental domain.

    Points are mapped to Re z >= 0 and, for 0.05 <= |z| <= 20, to |z| <= 1;
    points with |z| < 0.05 are evaluated at their image beyond |z| = 20.
    """

    def __init__(self, p: PotentialProfile, tol: float = DEFAULT_TOL, workers: int | None = None, chunk: int = 64):
        self.p = p
        self.tol = tol
        self.workers = default_workers() if workers is None else workers
        self.chunk = chunk
        self.sign = -1.0 if p.charge % 2 else 1.0
        self._cache: dict[tuple[float, float], complex] = {}
        self.evaluations = 0

    @staticmethod
    def _canonical(z: np.ndarray):
        """(canonical rho, theta, conjugate?, uses inversion?) for z in the upper half plane."""
        rho = np.log(np.abs(z))
        th = np.arctan2(z.imag, z.real)
        refl = th > 0.5 * np.pi
        th = np.where(refl, np.pi - th, th)
        # fold 0.05 <= |z| <= 20 onto |z| <= 1; |z| < 0.05 goes beyond 20, |z| > 20 stays
        inv = ((rho > 0) & (rho <= -LOG_MIN_MODULUS)) | (rho < LOG_MIN_MODULUS)
        rho = np.where(inv, -rho, rho)
        return np.round(rho, 12), np.round(th, 12), refl ^ inv, inv

    def _fill(self, keys: list[tuple[float, float]]):
        todo = sorted({k for k in keys if k not in self._cache})
        if not todo:
            return
        zs = np.array([math.exp(r) * complex(math.cos(t), math.sin(t)) for r, t in todo])
        chunks = [zs[i : i + self.chunk] for i in range(0, zs.size, self.chunk)]

        def run(c):
            return wronskian_batch(c, self.p, tol=self.tol)

        if self.workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(self.workers) as ex:
                results = list(ex.map(run, chunks))
        else:
            results = [run(c) for c in chunks]
        vals = np.concatenate(results)
        self.evaluations += zs.size
        for k, v in zip(todo, vals):
            self._cache[k] = complex(v)

    def __call__(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(z.imag < 0):
            raise ValueError("W is evaluated on the closed upper half plane only")
        rho, th, conj, inv = self._canonical(z)
        keys = list(zip(rho.tolist(), th.tolist()))
        self._fill(keys)
        w = np.array([self._cache[k] for k in keys])
        w = np.where(conj, np.conj(w), w)
        return np.where(inv, self.sign * w, w)


# ---------------------------------------------------------------------------
# contours


@dataclass(frozen=True)
class PolarRect:
    """{rho0 <= log|z| <= rho1, th0 <= arg z <= th1}, traversed counter-clockwise."""

    rho0: float
    rho1: float
    th0: float
    th1: float

    def point(self, edge: int, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if edge == 0:
            rho, th = self.rho0 + (self.rho1 - self.rho0) * t, np.full_like(t, self.th0)
        elif edge == 1:
            rho, th = np.full_like(t, self.rho1), self.th0 + (self.th1 - self.th0) * t
        elif edge == 2:
            rho, th = self.rho1 + (self.rho0 - self.rho1) * t, np.full_like(t, self.th1)
        else:
            rho, th = np.full_like(t, self.rho0), self.th1 + (self.th0 - self.th1) * t
        return np.exp(rho) * (np.cos(th) + 1j * np.sin(th))

    def contains(self, z: complex) -> bool:
        rho, th = math.log(abs(z)), math.atan2(z.imag, z.real)
        return self.rho0 < rho < self.rho1 and self.th0 < th < self.th1

    def split(self, f_rho: float, f_th: float) -> list["PolarRect"]:
        rm = self.rho0 + f_rho * (self.rho1 - self.rho0)
        tm = self.th0 + f_th * (self.th1 - self.th0)
        return [
            PolarRect(self.rho0, rm, self.th0, tm),
            PolarRect(rm, self.rho1, self.th0, tm),
            PolarRect(self.rho0, rm, tm, self.th1),
            PolarRect(rm, self.rho1, tm, self.th1),
        ]

    @property
    def size(self) -> float:
        return max(self.rho1 - self.rho0, self.th1 - self.th0)

    def offset(self, d: float) -> "PolarRect":
        return PolarRect(self.rho0 + d, self.rho1 - d, self.th0 + d, self.th1 - d)

    def to_dict(self) -> dict:
        return {"kind": "annulus-sector", "r": [math.exp(self.rho0), math.exp(self.rho1)], "theta": [self.th0, self.th1]}


@dataclass(frozen=True)
class Rect:
    """Cartesian rectangle [x0, x1] x [y0, y1]."""

    x0: float
    x1: float
    y0: float
    y1: float

    def point(self, edge: int, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        c = [complex(self.x0, self.y0), complex(self.x1, self.y0), complex(self.x1, self.y1), complex(self.x0, self.y1)]
        a, b = c[edge], c[(edge + 1) % 4]
        return a + (b - a) * t

    def contains(self, z: complex) -> bool:
        return self.x0 < z.real < self.x1 and self.y0 < z.imag < self.y1

    def split(self, fx: float, fy: float) -> list["Rect"]:
        xm = self.x0 + fx * (self.x1 - self.x0)
        ym = self.y0 + fy * (self.y1 - self.y0)
        return [Rect(self.x0, xm, self.y0, ym), Rect(xm, self.x1, self.y0, ym), Rect(self.x0, xm, ym, self.y1), Rect(xm, self.x1, ym, self.y1)]

    @property
    def size(self) -> float:
        return max(self.x1 - self.x0, self.y1 - self.y0)

    def offset(self, d: float) -> "Rect":
        return Rect(self.x0 + d, self.x1 - d, self.y0 + d, self.y1 - d)

    def to_dict(self) -> dict:
        return {"kind": "rectangle", "x": [self.x0, self.x1], "y": [self.y0, self.y1]}


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def point(self, edge: int, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.center + self.radius * np.exp(0.5j * np.pi * (edge + t))

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) < self.radius

    @property
    def size(self) -> float:
        return 2 * self.radius

    def to_dict(self) -> dict:
        return {"kind": "disk", "center": [self.center.real, self.center.imag], "radius": self.radius}


@dataclass
class ContourSample:
    z: np.ndarray  # closed: last point equals first
    w: np.ndarray

    @property
    def dlog(self) -> np.ndarray:
        ratio = self.w[1:] / self.w[:-1]
        return np.log(np.abs(ratio)) + 1j * np.angle(ratio)


def _refine(t: np.ndarray, lev: np.ndarray, bad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bisect the flagged steps of a dyadic grid."""
    new_t, new_lev = [], []
    for i in range(lev.size):
        new_t.append(t[i])
        if bad[i]:
            new_t.append(0.5 * (t[i] + t[i + 1]))
            new_lev += [lev[i] + 1, lev[i] + 1]
        else:
            new_lev.append(lev[i])
    new_t.append(t[-1])
    return np.array(new_t), np.array(new_lev)


def sample_contours(contours, W: WEvaluator, level: int = 4, scale: float | None = None, safety: float = SAFETY) -> list[ContourSample]:
    """Adaptive dyadic sampling until every step has |d arg W| < pi/4 and |d log|W|| < 0.5.

    All edges of all contours are refined together, so each round is one
    batched W call.
    """
    edges = [(c, e) for c in contours for e in range(4)]
    t0 = np.linspace(0.0, 1.0, 2**level + 1)
    ts = [t0] * len(edges)
    levs = [np.full(t0.size - 1, level) for _ in edges]
    out_z: list = [None] * len(edges)
    out_w: list = [None] * len(edges)
    todo = list(range(len(edges)))
    while todo:
        zz = [edges[k][0].point(edges[k][1], ts[k]) for k in todo]
        ww = np.split(W(np.concatenate(zz)), np.cumsum([z.size for z in zz])[:-1])
        nxt = []
        for k, z, w in zip(todo, zz, ww):
            if scale is not None and np.min(np.abs(w)) < safety * scale:
                i = int(np.argmin(np.abs(w)))
                raise ZeroOnContour(f"|W| = {abs(w[i]):.3g} on the contour at z = {z[i]:.8g}")
            ratio = w[1:] / w[:-1]
            bad = (np.abs(np.angle(ratio)) >= 0.25 * np.pi) | (np.abs(np.log(np.abs(ratio))) >= 0.5)
            bad &= levs[k] < MAX_EDGE_LEVEL
            out_z[k], out_w[k] = z, w
            if bad.any():
                ts[k], levs[k] = _refine(ts[k], levs[k], bad)
                nxt.append(k)
        todo = nxt
    samples = []
    for i in range(len(contours)):
        zs = [out_z[4 * i + e][:-1] for e in range(4)]
        ws = [out_w[4 * i + e][:-1] for e in range(4)]
        z = np.concatenate(zs + [zs[0][:1]])
        w = np.concatenate(ws + [ws[0][:1]])
        if np.any(w == 0):
            raise ZeroOnContour("W vanishes exactly at a contour sample")
        samples.append(ContourSample(z, w))
    return samples


def sample_contour(contour, W: WEvaluator, level: int = 4, scale: float | None = None, safety: float = SAFETY) -> ContourSample:
    return sample_contours([contour], W, level, scale, safety)[0]


def winding_from_sample(s: ContourSample) -> int:
    total = float(np.sum(np.angle(s.w[1:] / s.w[:-1]))) / (2.0 * math.pi)
    n = round(total)
    if abs(total - n) > 0.05:
        raise ZeroOnContour(f"non-integer winding {total:.4f}; contour too close to a zero")
    return int(n)


def winding_number(contour, p: PotentialProfile, W: WEvaluator | None = None, scale: float | None = None) -> int:
    """Number of zeros of W inside ``contour`` (argument principle)."""
    W = WEvaluator(p) if W is None else W
    return winding_from_sample(sample_contour(contour, W, scale=scale))


def zero_estimate(s: ContourSample) -> complex:
    """(1/2 pi i) * contour integral of z dlog W, for a cell holding one simple zero."""
    zm = 0.5 * (s.z[1:] + s.z[:-1])
    return complex(np.sum(zm * s.dlog) / (2j * math.pi))


# ---------------------------------------------------------------------------
# search


def default_region() -> PolarRect:
    return PolarRect(math.log(R_MIN), math.log(R_MAX), AXIS_MARGIN, math.pi - AXIS_MARGIN)


def _newton(z0: complex, W: WEvaluator, cell, max_iter: int = 30, tol: float = 1e-10) -> complex | None:
    z = complex(z0)
    stencil = np.exp(0.5j * np.pi * np.arange(4))
    for _ in range(max_iter):
        h = 1e-4 * max(abs(z), 0.05)
        pts = np.concatenate([[z], z + h * stencil])
        if np.any(pts.imag < 0):
            return None
        vals = wronskian_batch(pts, W.p, tol=W.tol)
        d = np.sum(vals[1:] * np.conj(stencil)) / (4.0 * h)
        if d == 0:
            return None
        step = vals[0] / d
        z = z - step
        if z.imag <= 0 or not _near(cell, z):
            return None
        if abs(step) < tol * max(1.0, abs(z)):
            return z
    return None


def _near(cell, z: complex) -> bool:
    if cell.contains(z):
        return True
    # allow a small overshoot beyond the cell edge
    if isinstance(cell, PolarRect):
        rho, th = math.log(abs(z)), math.atan2(z.imag, z.real)
        m = 0.1 * cell.size
        return cell.rho0 - m < rho < cell.rho1 + m and cell.th0 - m < th < cell.th1 + m
    return False


@dataclass
class SpectralPoint:
    z: complex
    residual: float
    wdot: complex
    wdot_method: str
    on_circle: bool
    signature: SignatureReport | None
    simple: bool
    zero_momentum: float | None = None

    @property
    def theta(self) -> float:
        return math.atan2(self.z.imag, self.z.real)

    def to_dict(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "r": abs(self.z),
            "theta": self.theta,
            "residual": self.residual,
            "wdot": [self.wdot.real, self.wdot.imag],
            "wdot_method": self.wdot_method,
            "on_circle": self.on_circle,
            "simple": self.simple,
            "zero_momentum": self.zero_momentum,
            "signature": None if self.signature is None else self.signature.to_dict(),
        }


@dataclass
class SearchResult:
    points: list[SpectralPoint]
    region: object
    scale: float
    winding: int
    cells_visited: int
    evaluations: int
    perturbations: int = 0
    notes: list[str] = field(default_factory=list)


def _dedupe(zs: list[complex], tol: float = 1e-7) -> list[complex]:
    out: list[complex] = []
    for z in sorted(zs, key=lambda w: (round(w.real, 9), round(w.imag, 9))):
        if all(abs(z - o) > tol for o in out):
            out.append(z)
    return out


def _isolate(root, n_root: int, W: WEvaluator, scale: float, notes: list[str]) -> tuple[list[complex], int]:
    found: list[complex] = []
    visited = 0
    stack = [(root, n_root, 0)]
    while stack:
        cell, n, depth = stack.pop()
        visited += 1
        if n == 0:
            continue
        if depth > MAX_DEPTH:
            raise SubdivisionLimit(f"could not isolate {n} zero(s) after {MAX_DEPTH} levels", cell=cell)
        if n == 1:
            s = sample_contour(cell, W, scale=scale)
            z = _newton(zero_estimate(s), W, cell)
            if z is not None:
                found.append(z)
                continue
        # subdivide, trying alternative split lines if one passes through a zero
        for attempt, f in enumerate(SPLIT_FRACTIONS):
            children = cell.split(f, SPLIT_FRACTIONS[(attempt + 1) % len(SPLIT_FRACTIONS)])
            try:
                counts = [winding_from_sample(x) for x in sample_contours(children, W, scale=scale)]
            except ZeroOnContour:
                continue
            if sum(counts) != n:
                notes.append(f"additivity failed at depth {depth}: {n} != {counts}")
                continue
            break
        else:
            raise SubdivisionLimit("no split line avoided the zeros of W", cell=cell)
        for c, k in zip(children, counts):
            if k:
                stack.append((c, k, depth + 1))
    return _dedupe(found), visited


def certify(z: complex, p: PotentialProfile, scale: float, tol: float = DEFAULT_TOL, threshold: float = EIGEN_THRESHOLD) -> SpectralPoint:
    """Residual, derivative, signature and simplicity for a located zero."""
    res = abs(wronskian_batch([z], p, tol=tol)[0]) / scale
    on_circle = abs(abs(z) - 1.0) < ON_CIRCLE_TOL
    wd = wronskian_derivative(z, p, tol=tol)
    sig = None
    zm = None
    try:
        ef = eigenfunction(z, p, tol=tol, threshold=threshold, scale=scale)
        sig = signature_report(ef)
        zm = zero_momentum_check(ef)
    except NotAnEigenvalue:
        pass
    return SpectralPoint(complex(z), float(res), wd.value, wd.method, on_circle, sig, abs(wd.value) > SIMPLE_TOL, zm)


def search(
    p: PotentialProfile,
    region=None,
    tol: float = DEFAULT_TOL,
    threshold: float = EIGEN_THRESHOLD,
    workers: int | None = None,
    evaluator: WEvaluator | None = None,
    max_perturb: int = 5,
) -> SearchResult:
    """Locate every zero of W inside ``region`` (default: the annulus-sector) and certify it."""
    root = default_region() if region is None else region
    W = WEvaluator(p, tol, workers) if evaluator is None else evaluator
    notes: list[str] = []
    for attempt in range(max_perturb + 1):
        cell = root if attempt == 0 else root.offset(1e-3 * attempt)
        try:
            s = sample_contour(cell, W)
            scale = float(np.max(np.abs(s.w)))
            if np.min(np.abs(s.w)) < SAFETY * scale:
                raise ZeroOnContour("zero on the outer contour")
            n = winding_from_sample(s)
            zs, visited = _isolate(cell, n, W, scale, notes)
            break
        except ZeroOnContour as exc:
            notes.append(f"outer contour perturbed: {exc}")
            if attempt == max_perturb:
                raise
    points = [certify(z, p, scale, tol, threshold) for z in zs]
    points.sort(key=lambda q: (round(q.z.real, 9), round(q.z.imag, 9)))
    return SearchResult(points, cell, scale, n, visited, W.evaluations, attempt, notes)


def locate_eigenvalues(region, p: PotentialProfile, tol: float = DEFAULT_TOL, threshold: float = EIGEN_THRESHOLD, workers: int | None = None) -> list[SpectralPoint]:
    return search(p, region, tol, threshold, workers).points


# ---------------------------------------------------------------------------
# exclusion regions


@dataclass(frozen=True)
class ExclusionRegions:
    """No-eigenvalue regions for single-hump breathers.

    ``C`` bounds the coupling in a gauge where the 1/z part is diagonal:
    rotating Phi by u/4 gives chi' = (d sigma3 + O) chi with
    Re d = (Im z / 4)(1/|z|^2 + cos u) and off-diagonal entries
    (i z / 4) sin u +- u_x / 4.  A decaying solution then needs
    sup|O| * int|O| >= Re d, and for |z| < 1 that fails whenever
    |z|^2 < Im z / (2C) with
    C = (1 + sup|u_x|)(2 int|sin(u/2)| + int|u_x|)/8 + 1/2.
    The disk |z|^2 < Im z/(2C) has centre i/(4C) and radius 1/(4C); its
    image under z -> 1/conj z is the half plane Im z > 2C.
    """

    C: float
    u0: float
    disk: Circle
    imag_bound: float
    sector: tuple[float, float]  # closed complement [u0/2, pi - u0/2]

    def in_disk(self, z: complex) -> bool:
        return abs(z - self.disk.center) < self.disk.radius

    def in_half_plane(self, z: complex) -> bool:
        return z.imag > self.imag_bound

    def in_sector_complement(self, z: complex) -> bool:
        th = math.atan2(z.imag, z.real)
        return self.sector[0] <= th <= self.sector[1]

    def excludes(self, z: complex) -> bool:
        return self.in_disk(z) or self.in_half_plane(z) or self.in_sector_complement(z)

    def disk_contour(self) -> Circle:
        return Circle(self.disk.center, 0.9 * self.disk.radius)

    def sector_contour(self, margin: float = 1e-3) -> PolarRect:
        return PolarRect(math.log(R_MIN), math.log(R_MAX), self.sector[0] + margin, self.sector[1] - margin)

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "u0": self.u0,
            "disk": self.disk.to_dict(),
            "imag_bound": self.imag_bound,
            "sector_complement": list(self.sector),
        }


def exclusion_regions(p: PotentialProfile) -> ExclusionRegions:
    hyp = classify(p)
    if hyp.tag is not HypothesisTag.KLAUS_SHAW_BREATHER:
        raise HypothesisNotMet(f"{p.name}: exclusion regions need a single-hump breather")
    s1 = l1_sine_half(p).absolute
    ux1 = u_x_l1(p)
    uxinf = float(np.max(np.abs(p.u_x(p.sample(8001)))))
    C = (1.0 + uxinf) * (2.0 * s1 + ux1) / 8.0 + 0.5
    R = 1.0 / (4.0 * C)
    u0 = float(hyp.u0)
    return ExclusionRegions(C, u0, Circle(complex(0.0, R), R), 2.0 * C, (0.5 * u0, math.pi - 0.5 * u0))


def exclusion_winding(p: PotentialProfile, W: WEvaluator | None = None) -> dict:
    """Winding numbers on contours inside the disk and the sector complement."""
    ex = exclusion_regions(p)
    W = WEvaluator(p) if W is None else W
    return {
        "disk": winding_number(ex.disk_contour(), p, W),
        "sector_complement": winding_number(ex.sector_contour(), p, W),
    }


# ---------------------------------------------------------------------------
# verification


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _is_odd(p: PotentialProfile) -> bool:
    if p.charge != 0:
        return False
    x = np.linspace(0.0, min(-p.x_min, p.x_max), 401)
    u = p.u(x)
    return bool(np.max(np.abs(u + p.u(-x))) < 1e-10 * max(1.0, float(np.max(np.abs(u)))))


def verify_spectrum(
    points: Sequence[SpectralPoint],
    p: PotentialProfile,
    report: CountReport | None = None,
    scale: float | None = None,
    region=None,
    tol: float = DEFAULT_TOL,
    threshold: float = EIGEN_THRESHOLD,
) -> VerificationReport:
    """Per-theorem pass/fail entries for a located spectrum."""
    report = count_report(p, tol=tol) if report is None else report
    hyp = report.applicability
    region = default_region() if region is None else region
    checks: list[Check] = []
    zs = [q.z for q in points]
    quadrant = [z for z in zs if z.real > 1e-9]
    kink = p.charge % 2 != 0

    # counts
    found = len(zs) if kink else len(quadrant)
    if report.exact_count is not None:
        checks.append(Check("count", found == report.exact_count, f"found {found}, expected {report.exact_count}"))
    else:
        checks.append(Check("count_lower_bound", found >= report.lower_bound_N, f"found {found} >= lower bound {report.lower_bound_N}"))

    if hyp.satisfied:
        off = [z for z in zs if abs(abs(z) - 1.0) >= ON_CIRCLE_TOL]
        checks.append(Check("on_circle", not off, f"off-circle points: {off}" if off else "all on |z| = 1"))
    checks.append(Check("simple", all(q.simple for q in points), "all |W'| > 1e-6" if all(q.simple for q in points) else "non-simple point"))
    checks.append(Check("residual", all(q.residual < threshold for q in points), f"max residual {max([q.residual for q in points], default=0.0):.3g}"))

    if hyp.tag is HypothesisTag.KLAUS_SHAW_BREATHER:
        ex = exclusion_regions(p)
        bad = [z for z in zs if ex.in_sector_complement(z)]
        checks.append(Check("sector", not bad, f"theta < {ex.u0 / 2:.6g} or > pi - that"))
        bad = [z for z in zs if ex.in_disk(z) or ex.in_half_plane(z)]
        checks.append(Check("exclusion", not bad, f"C = {ex.C:.6g}"))

    # symmetry closure: images in the region were found, and W vanishes there by direct evaluation
    missing, big = [], []
    scale = 1.0 if scale is None else scale
    for z in zs:
        for m in symmetry_orbit(z):
            w = m.z
            if w.imag <= 0:
                continue
            if region.contains(w) and all(abs(w - o) > 1e-7 for o in zs):
                missing.append(w)
        imgs = [1.0 / np.conj(z), -np.conj(z)]
        vals = np.abs(wronskian_batch(imgs, p, tol=tol)) / scale
        big += [complex(i) for i, v in zip(imgs, vals) if v >= 10 * threshold]
    checks.append(Check("symmetry_closure", not missing and not big, f"missing {missing}, large |W| at {big}"))

    sigs = [q for q in points if q.signature is not None]
    if hyp.satisfied:
        sign = 1.0 if report.I >= 0 else -1.0
        bad = [q.z for q in points if q.signature is None or not sign * q.signature.bracket.real > 1e-8]
        checks.append(Check("krein_positive", not bad, f"non-positive bracket at {bad}" if bad else "bracket > 1e-8"))
    bad = [q.z for q in sigs if abs(q.signature.kappa_circle) > 1e-6 and abs(abs(q.z) - 1.0) >= 1e-6]
    checks.append(Check("kappa_on_circle", not bad, ""))
    bad = [q.z for q in sigs if abs(q.signature.kappa_imag) > 1e-6 and abs(q.z.real) >= 1e-8]
    checks.append(Check("kappa_imag_axis", not bad, ""))
    bad = [q.z for q in sigs if abs(q.signature.kappa_circle) > 1e-6 and not q.simple]
    checks.append(Check("kappa_simple", not bad, ""))

    if hyp.is_kink or (hyp.is_breather and hyp.u0 is not None and hyp.u0 <= 0.5 * math.pi + 1e-12):
        bad = [q.z for q in points if q.zero_momentum is None or q.zero_momentum >= 1e-7]
        checks.append(Check("zero_momentum", not bad, f"max {max([q.zero_momentum or 0.0 for q in points], default=0.0):.3g}"))

    if _is_odd(p):
        on = [q.z for q in points if q.on_circle]
        checks.append(Check("odd_no_circle", not on, "odd potential: no unit-circle eigenvalues"))
    return VerificationReport(checks)
