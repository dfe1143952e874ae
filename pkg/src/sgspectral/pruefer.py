"""Unit-circle eigenvalues and eigenvalue counts through the Pruefer angle.

On z = exp(i theta) the components p = phi1 and q = i phi2 are real.  With
(p, q) = rho (cos eta, sin eta):

    -2 eta'     = cos(theta) sin(u/2) + sin(theta) cos(u/2) sin(2 eta)
    (log rho)'  = (sin(theta)/2) cos(u/2) cos(2 eta)

The left solution starts at eta = 0.  Every routine works on an oriented
copy of the profile whose left limit has cos(u/2) -> +1 (reflect x -> -x,
or lift u by 2 pi), which leaves the unit-circle spectrum unchanged.

Besides the endpoint angle L(theta) = eta(x_max) we use the matched
mismatch M(theta) = eta_L(x_m) - eta_R(x_m) where eta_R is integrated
backwards from its decaying limit at x_max.  z = exp(i theta) is an
eigenvalue exactly when M is a multiple of pi, and unlike L (which on long
tails is a near step function) M is smooth in theta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import GridTooCoarse, HypothesisNotMet, NonPositiveDerivative, StepFailure
from .potentials import (
    QUADRATURE_TOL,
    HypothesisClass,
    PotentialProfile,
    classify,
    l1_sine_half,
    reflect,
    shift_level,
)

DEFAULT_TOL = 1e-11
THRESHOLD_BAND = 1e-6
MAX_GRID = 1 << 14
HALF_PI = 0.5 * math.pi


def oriented(p: PotentialProfile) -> PotentialProfile:
    """Copy of ``p`` with cos(u/2) -> +1 at the left end and the same circle spectrum."""
    if p.c_minus == 1:
        return p
    if p.c_plus == 1:
        return reflect(p)
    return shift_level(p, 1)


def _right_start(p: PotentialProfile) -> float:
    # decaying right solution is (0, 1) when cos(u/2) -> +1, (1, 0) otherwise
    return HALF_PI if p.c_plus == 1 else 0.0


def _solve(fun, x0, x1, y0, p: PotentialProfile, tol: float, dense: bool = False):
    lo, hi = min(x0, x1), max(x0, x1)
    inner = sorted(b for b in p.breakpoints if lo < b < hi)
    if x1 < x0:
        inner = inner[::-1]
    stops = [x0, *inner, x1]
    y = np.asarray(y0, dtype=float)
    sols = []
    for a, b in zip(stops[:-1], stops[1:]):
        res = solve_ivp(fun, (a, b), y, method="DOP853", rtol=tol, atol=tol * 1e-2, dense_output=dense)
        if res.status != 0:
            raise StepFailure(f"Pruefer integration failed: {res.message}", location=float(res.t[-1]))
        y = res.y[:, -1]
        if dense:
            sols.append((min(a, b), max(a, b), res.sol))
    return y, sols


def _angle_system(p: PotentialProfile, thetas: np.ndarray, weights: int = 0):
    """Right-hand side for (eta, log rho) per theta.

    ``weights`` = +1 (forward) or -1 (backward) appends two scaled
    accumulators w = (int rho^2 g) / rho^2 and m = (int rho^2) / rho^2 with
    g = (sin th/2) s - (cos th/2) c sin 2 eta, integrated from the start
    point.  Dividing by rho^2 keeps them O(1) where rho grows exponentially.
    """
    st = np.sin(thetas)
    # exact zero at theta = pi/2, where cos() would leave a 6e-17 forcing that
    # the unstable branch behind a kink amplifies
    ct = np.sin(HALF_PI - thetas)
    n = thetas.size

    def fun(x, y):
        s = float(p.sin_half(x))
        c = float(p.cos_half(x))
        eta = y[:n]
        s2 = np.sin(2.0 * eta)
        out = np.empty_like(y)
        out[:n] = -0.5 * (ct * s + st * c * s2)
        dlr = 0.5 * st * c * np.cos(2.0 * eta)
        out[n : 2 * n] = dlr
        if weights:
            g = 0.5 * (st * s - ct * c * s2)
            out[2 * n : 3 * n] = weights * g - 2.0 * dlr * y[2 * n : 3 * n]
            out[3 * n :] = weights - 2.0 * dlr * y[3 * n :]
        return out

    return fun


def _thetas(theta) -> np.ndarray:
    return np.atleast_1d(np.asarray(theta, dtype=float))


def pruefer_flow_batch(thetas, p: PotentialProfile, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Endpoint angles L(theta) = eta(x_max) for an array of theta."""
    q = oriented(p)
    th = _thetas(thetas)
    y0 = np.zeros(2 * th.size)
    y, _ = _solve(_angle_system(q, th), q.x_min, q.x_max, y0, q, tol)
    return y[: th.size]


def pruefer_flow(theta: float, p: PotentialProfile, tol: float = DEFAULT_TOL) -> float:
    """L(theta): unwrapped Pruefer angle at x_max for the solution with eta(x_min) = 0."""
    return float(pruefer_flow_batch([theta], p, tol)[0])


@dataclass(frozen=True)
class PrueferState:
    eta: float
    log_rho: float


@dataclass(frozen=True, eq=False)
class PrueferTrajectory:
    theta: float
    profile: PotentialProfile  # the oriented profile the angle refers to
    _sols: list = field(repr=False)

    def __call__(self, x) -> np.ndarray:
        """(eta, log rho) at x, shape (2, len(x))."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty((2, x.size))
        for lo, hi, sol in self._sols:
            sel = (x >= lo) & (x <= hi)
            if sel.any():
                out[:, sel] = sol(x[sel])
        return out

    def state(self, x: float) -> PrueferState:
        eta, lr = self(x)[:, 0]
        return PrueferState(float(eta), float(lr))


def pruefer_trajectory(theta: float, p: PotentialProfile, tol: float = DEFAULT_TOL) -> PrueferTrajectory:
    q = oriented(p)
    th = _thetas(theta)
    _, sols = _solve(_angle_system(q, th), q.x_min, q.x_max, np.zeros(2), q, tol, dense=True)
    return PrueferTrajectory(float(theta), q, sols)


def mismatch_batch(thetas, p: PotentialProfile, tol: float = DEFAULT_TOL, x_m: float | None = None) -> np.ndarray:
    """M(theta) = eta_L(x_m) - eta_R(x_m) on the oriented profile."""
    q = oriented(p)
    th = _thetas(thetas)
    n = th.size
    xm = q.matching_point if x_m is None else float(x_m)
    fun = _angle_system(q, th)
    yl, _ = _solve(fun, q.x_min, xm, np.zeros(2 * n), q, tol)
    y0 = np.zeros(2 * n)
    y0[:n] = _right_start(q)
    yr, _ = _solve(fun, q.x_max, xm, y0, q, tol)
    return yl[:n] - yr[:n]


def mismatch(theta: float, p: PotentialProfile, tol: float = DEFAULT_TOL) -> float:
    return float(mismatch_batch([theta], p, tol)[0])


# ---------------------------------------------------------------------------
# scanning


def _is_kink(p: PotentialProfile) -> bool:
    return p.charge % 2 != 0


def _scan_grid(p: PotentialProfile, n: int) -> np.ndarray:
    th = HALF_PI * np.arange(n + 1) / n
    if _is_kink(p):
        # z = i is a known eigenvalue for odd charge; keep the bracket away from it
        th = th[:-1]
    return th


def _brackets(th: np.ndarray, m: np.ndarray) -> list[tuple[int, float]]:
    jumps = np.abs(np.diff(m))
    if np.any(jumps > HALF_PI):
        i = int(np.argmax(jumps))
        raise GridTooCoarse(f"mismatch jumps by {jumps[i]:.3g} between theta = {th[i]:.6g} and {th[i + 1]:.6g}")
    level = np.floor(m / math.pi)
    out = []
    for i in np.nonzero(level[1:] != level[:-1])[0]:
        k = int(max(level[i], level[i + 1]))
        out.append((int(i), k * math.pi))
    return out


def scan_mismatch(p: PotentialProfile, grid_size: int = 256, tol: float = DEFAULT_TOL):
    """(theta grid, M values) at the first resolution without GridTooCoarse."""
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    n = grid_size
    while True:
        th = _scan_grid(p, n)
        m = mismatch_batch(th, p, tol)
        try:
            return th, m, _brackets(th, m)
        except GridTooCoarse:
            if 2 * n > MAX_GRID:
                raise
            n *= 2


def circle_scan(p: PotentialProfile, grid_size: int = 256, tol: float = DEFAULT_TOL, xtol: float = 1e-13) -> list[float]:
    """Eigenangles theta in (0, pi/2) with exp(i theta) an eigenvalue; pi/2 appended for odd charge."""
    th, m, brackets = scan_mismatch(p, grid_size, tol)
    angles = []
    for i, lev in brackets:
        a, b = th[i], th[i + 1]
        fa, fb = m[i] - lev, m[i + 1] - lev
        if fa == 0.0:
            angles.append(float(a))
            continue
        if fb == 0.0:
            angles.append(float(b))
            continue
        root = brentq(lambda t: mismatch(t, p, tol) - lev, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps)
        angles.append(float(root))
    # a level hit exactly at a grid point is reported by two brackets
    angles = sorted(set(angles))
    angles = [t for t in angles if 0.0 < t < HALF_PI]
    if _is_kink(p):
        angles.append(HALF_PI)
    return angles


def prufer_curve(p: PotentialProfile, n: int = 257, tol: float = DEFAULT_TOL):
    """(theta, L(theta), M(theta)) samples on [0, pi/2] for export."""
    th = np.linspace(0.0, HALF_PI, n)
    return th, pruefer_flow_batch(th, p, tol), mismatch_batch(th, p, tol)


# ---------------------------------------------------------------------------
# counting


def count_lower_bound(I: float, charge: int) -> int:
    """Lower bound from the L1 norm of sin(u/2).

    Even charge: largest N >= 0 with |I| > (2N - 1) pi (eigenvalues in the
    open quadrant).  Odd charge: 2N + 1 with N the largest integer with
    |I| > 2 N pi (eigenvalues in the upper half plane, z = i included).
    """
    a = abs(float(I)) / math.pi
    if charge % 2 == 0:
        return max(0, math.ceil((a + 1.0) / 2.0) - 1)
    n = max(0, math.ceil(a / 2.0) - 1)
    return 2 * n + 1


def _thresholds_near(I: float, charge: int) -> bool:
    a = abs(float(I))
    if charge % 2 == 0:
        k = round((a / math.pi + 1.0) / 2.0)
        return abs(a - (2 * k - 1) * math.pi) < THRESHOLD_BAND
    k = round(a / (2.0 * math.pi))
    return k >= 1 and abs(a - 2 * k * math.pi) < THRESHOLD_BAND


_CITATION = {
    "KinkMonotoneQ1": "monotone kink, |Q| = 1: exactly 2N+1 eigenvalues, all on the unit circle and simple",
    "KinkMonotoneQminus1": "monotone kink, |Q| = 1: exactly 2N+1 eigenvalues, all on the unit circle and simple",
    "KlausShawBreather": "single-hump breather, 0 < u0 < pi: exactly N eigenvalues in the open quadrant, on the unit circle",
    "General": "hypotheses not met: lower bound only",
}


@dataclass
class CountReport:
    I: float
    charge: int
    lower_bound_N: int
    exact_count: int | None
    circle_angles: list[float]
    applicability: HypothesisClass
    near_threshold: bool
    scan_angles: list[float] = field(default_factory=list)
    scan_agrees: bool | None = None

    @property
    def citation(self) -> str:
        return _CITATION[self.applicability.tag.value]

    def to_dict(self) -> dict:
        return {
            "I": self.I,
            "charge": self.charge,
            "lower_bound_N": self.lower_bound_N,
            "exact_count": self.exact_count,
            "circle_angles": list(self.circle_angles),
            "applicability": {**self.applicability.to_dict(), "theorem": self.citation},
            "near_threshold": self.near_threshold,
            "scan_angles": list(self.scan_angles),
            "scan_agrees": self.scan_agrees,
        }


def _circle_set(quadrant: list[float], kink: bool) -> list[float]:
    """Full set of upper-half-plane circle angles from the quadrant ones."""
    inner = [t for t in quadrant if t < HALF_PI]
    out = inner + [math.pi - t for t in inner]
    if kink:
        out.append(HALF_PI)
    return sorted(out)


def count_report(
    p: PotentialProfile, grid_size: int = 256, tol: float = DEFAULT_TOL, scan: bool = True, quad_tol: float = QUADRATURE_TOL
) -> CountReport:
    """Counts for any profile; ``exact_count`` is filled only under the theorem hypotheses."""
    hyp = classify(p)
    I = l1_sine_half(p, quad_tol).signed
    lb = count_lower_bound(I, p.charge)
    angles = circle_scan(p, grid_size, tol) if scan else []
    kink = _is_kink(p)
    report = CountReport(
        I=I,
        charge=p.charge,
        lower_bound_N=lb,
        exact_count=None,
        circle_angles=[],
        applicability=hyp,
        near_threshold=_thresholds_near(I, p.charge),
        scan_angles=angles,
    )
    if hyp.satisfied:
        report.exact_count = lb
        if kink:
            report.circle_angles = _circle_set(angles, True)
        else:
            # breather counts refer to the open quadrant
            report.circle_angles = [t for t in angles if t < HALF_PI]
        if scan:
            report.scan_agrees = len(report.circle_angles) == lb
    return report


def count_exact(p: PotentialProfile, grid_size: int = 256, tol: float = DEFAULT_TOL) -> CountReport:
    """Exact count under the kink or breather hypotheses, cross-checked with the circle scan.

    Raises HypothesisNotMet (carrying the lower-bound report) otherwise.
    """
    report = count_report(p, grid_size, tol)
    if not report.applicability.satisfied:
        raise HypothesisNotMet(f"{p.name}: counting hypotheses not met; lower bound only", report=report)
    return report


# ---------------------------------------------------------------------------
# monotonicity of the endpoint angle


def eta_derivative(theta: float, p: PotentialProfile, tol: float = DEFAULT_TOL) -> float:
    """d eta(x_max; theta)/d theta from the integral formula, left solution only.

    rho^2 eta_theta = int_{-inf}^{x} rho^2 [ (sin th/2) s - (cos th/2) c sin 2 eta ] dy.
    """
    q = oriented(p)
    th = _thetas(theta)
    y, _ = _solve(_angle_system(q, th, weights=1), q.x_min, q.x_max, np.zeros(4), q, tol)
    return float(y[2])


def eta_derivative_fd(theta: float, p: PotentialProfile, h: float = 1e-5, tol: float = 1e-12) -> float:
    """Central difference of L(theta); only well conditioned for compact support."""
    v = pruefer_flow_batch([theta - h, theta + h], p, tol)
    return float((v[1] - v[0]) / (2.0 * h))


@dataclass(frozen=True)
class MonotonicityCertificate:
    eta_dot: float  # d eta(x_max)/d theta
    weighted_integral: float  # int rho^2 [...] with rho(x_max) = 1
    normalized_integral: float  # the same with int rho^2 = 1
    theta: float


def angle_monotonicity_certificate(
    p: PotentialProfile, theta: float, tol: float = DEFAULT_TOL, raise_on_failure: bool = True
) -> MonotonicityCertificate:
    """Positive derivative of the endpoint angle at an eigenangle.

    Computed from left and right flows joined at x_m, so it stays finite on
    long tails where the left solution alone decays below resolution.
    On long tails eta_dot itself is huge (the endpoint angle is nearly a
    step); ``normalized_integral`` is the scale-free version.  Signs are
    taken relative to the sign of I (a negative hump mirrors the picture).
    """
    q = oriented(p)
    th = _thetas(theta)
    xm = q.matching_point
    # beyond the domain g vanishes and rho^2 decays like exp(-sin(theta) |x|),
    # so each tail adds rho^2 / sin(theta) to the mass accumulator
    tail = 1.0 / max(math.sin(theta), 1e-12)
    yl, _ = _solve(_angle_system(q, th, weights=1), q.x_min, xm, np.array([0.0, 0.0, 0.0, tail]), q, tol)
    yr, _ = _solve(_angle_system(q, th, weights=-1), q.x_max, xm, np.array([_right_start(q), 0.0, 0.0, tail]), q, tol)
    # both accumulators are divided by rho(x_m)^2, so they add directly;
    # rho(x_max) = 1 gives rho(x_m)^2 = exp(2 log rho_R(x_m))
    ratio = (yl[2] + yr[2]) / (yl[3] + yr[3])
    total = (yl[2] + yr[2]) * math.exp(2.0 * yr[1])
    sign = 1.0 if l1_sine_half(q).signed >= 0 else -1.0
    eta_dot = sign * float(total)
    cert = MonotonicityCertificate(eta_dot, float(total), sign * float(ratio), float(theta))
    if raise_on_failure and not eta_dot > 0.0:
        raise NonPositiveDerivative(f"eta derivative {eta_dot:.3g} <= 0 at theta = {theta}")
    return cert
