"""Jost solutions, Wronskian and transfer matrices for the stationary problem.

The first-order system is

    Phi' = A(x, z) Phi,   A = alpha c tau1 + beta s tau2,

with alpha = (z - 1/z)/4, beta = (z + 1/z)/4, s = sin(u/2), c = cos(u/2),
tau1 = diag(-i, i) and tau2 = [[0, i], [i, 0]].

Jost solutions are integrated in factored variables.  If the solution
is normalised on component j (0 or 1) then Phi = v * exp(sigma) with
sigma = sign_j * i * alpha * C(x), C(x) the running integral of c, and
v' = (A - A_jj) v.  C is carried as an extra ODE component so dense
output gives it at any x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InconsistentJost, NearZeroZ, StepFailure
from .potentials import PotentialProfile
from .quadrature import integrate

DEFAULT_TOL = 1e-11
MIN_MODULUS = 0.05

TAU1 = np.array([[-1j, 0], [0, 1j]])
TAU2 = np.array([[0, 1j], [1j, 0]])
TAU3 = np.array([[0, 1], [-1, 0]], dtype=complex)


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class SpectralParameter:
    z: complex

    def __post_init__(self):
        if self.z == 0:
            raise NearZeroZ("z = 0 is excluded: the pencil is singular there")

    @property
    def r(self) -> float:
        return abs(self.z)

    @property
    def theta(self) -> float:
        return math.atan2(self.z.imag, self.z.real) % (2.0 * math.pi)

    @property
    def alpha(self) -> complex:
        return 0.25 * (self.z - 1.0 / self.z)

    @property
    def beta(self) -> complex:
        return 0.25 * (self.z + 1.0 / self.z)

    @classmethod
    def polar(cls, r: float, theta: float) -> "SpectralParameter":
        return cls(complex(r * math.cos(theta), r * math.sin(theta)))


def alpha_beta(z):
    z = np.asarray(z, dtype=complex)
    return 0.25 * (z - 1.0 / z), 0.25 * (z + 1.0 / z)


def coefficient_matrix(x: float, z: complex, p: PotentialProfile) -> np.ndarray:
    a, b = alpha_beta(z)
    s = float(p.sin_half(np.asarray(x, dtype=float)))
    c = float(p.cos_half(np.asarray(x, dtype=float)))
    return a * c * TAU1 + b * s * TAU2


def rhs(x: float, z, v, p: PotentialProfile) -> np.ndarray:
    """A(x, z) v for the stationary eigenvalue problem."""
    if z == 0:
        raise NearZeroZ("z = 0")
    return coefficient_matrix(x, complex(z), p) @ np.asarray(v, dtype=complex)


def jost_component(side: Side, p: PotentialProfile) -> int:
    """Index of the component that carries the decaying asymptotics on ``side``."""
    if side is Side.LEFT:
        return 0 if p.c_minus == 1 else 1
    return 1 if p.c_plus == 1 else 0


def _exponent_sign(j: int) -> float:
    # diagonal entry A_jj = -i alpha c (j = 0) or +i alpha c (j = 1)
    return -1.0 if j == 0 else 1.0


# ---------------------------------------------------------------------------
# piecewise integration with dense output


class _Dense:
    """Dense output stitched across integration segments."""

    def __init__(self, sols, spans):
        self._sols = sols
        self._lo = np.array([min(a, b) for a, b in spans])
        self._hi = np.array([max(a, b) for a, b in spans])
        self.lo = float(self._lo.min())
        self.hi = float(self._hi.max())

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = None
        idx = np.clip(np.searchsorted(self._hi, x, side="left"), 0, len(self._sols) - 1)
        for k in np.unique(idx):
            sel = idx == k
            y = self._sols[k](x[sel])
            if out is None:
                out = np.empty((y.shape[0], x.size), dtype=y.dtype)
            out[:, sel] = y
        return out


def _solve(fun, x0, x1, y0, breakpoints, rtol, atol, dense):
    """Integrate from x0 to x1, restarting at interior breakpoints.

    Returns (y_end, dense or None, sample grid).
    """
    direction = 1.0 if x1 >= x0 else -1.0
    inner = sorted(b for b in breakpoints if min(x0, x1) < b < max(x0, x1))
    if direction < 0:
        inner = inner[::-1]
    stops = [x0, *inner, x1]
    y = np.asarray(y0, dtype=complex)
    sols, spans, grids = [], [], []
    for a, b in zip(stops[:-1], stops[1:]):
        if a == b:
            continue
        res = solve_ivp(fun, (a, b), y, method="DOP853", rtol=rtol, atol=atol, dense_output=dense)
        if res.status != 0:
            raise StepFailure(f"integrator failed: {res.message}", location=float(res.t[-1]))
        y = res.y[:, -1]
        grids.append(res.t)
        if dense:
            sols.append(res.sol)
            spans.append((a, b))
    grid = np.concatenate(grids) if grids else np.array([x0])
    if dense and sols:
        order = np.argsort([min(s) for s in spans])
        sols = [sols[i] for i in order]
        spans = [spans[i] for i in order]
        return y, _Dense(sols, spans), grid
    return y, None, grid


def _factored_system(p: PotentialProfile, z: np.ndarray, j: int):
    a, b = alpha_beta(z)
    n = z.size
    ia2 = 2j * a
    ib = 1j * b

    def fun(x, y):
        s = float(p.sin_half(x))
        c = float(p.cos_half(x))
        v1 = y[:n]
        v2 = y[n : 2 * n]
        out = np.empty(2 * n + 1, dtype=complex)
        if j == 0:
            out[:n] = ib * s * v2
            out[n : 2 * n] = ib * s * v1 + ia2 * c * v2
        else:
            out[:n] = -ia2 * c * v1 + ib * s * v2
            out[n : 2 * n] = ib * s * v1
        out[2 * n] = c
        return out

    return fun


def _start_state(n: int, j: int, c0: float) -> np.ndarray:
    y0 = np.zeros(2 * n + 1, dtype=complex)
    y0[j * n : (j + 1) * n] = 1.0
    y0[2 * n] = c0
    return y0


def _check_zs(z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(z) < MIN_MODULUS * (1.0 - 1e-9)):
        raise NearZeroZ(f"|z| < {MIN_MODULUS}: evaluate at 1/z and use the symmetry instead")
    return z


def _atol(tol: float) -> float:
    return tol * 1e-2


@dataclass(frozen=True, eq=False)
class JostTrajectory:
    """Factored Jost solution.  Raw values are v * exp(sign * i * alpha * C)."""

    side: Side
    z: complex
    component: int
    grid: np.ndarray
    values: np.ndarray  # (n, 2) factored samples
    omega_exponent: np.ndarray  # running integral of cos(u/2) at the grid
    dense: _Dense

    @property
    def exponent_coefficient(self) -> complex:
        return _exponent_sign(self.component) * 1j * 0.25 * (self.z - 1.0 / self.z)

    @property
    def span(self) -> tuple[float, float]:
        return self.dense.lo, self.dense.hi

    def factored(self, x) -> np.ndarray:
        """Factored values at x, shape (2, len(x))."""
        return self.dense(x)[:2]

    def omega(self, x) -> np.ndarray:
        return self.dense(x)[2].real

    def exponent(self, x) -> np.ndarray:
        return self.exponent_coefficient * self.omega(x)

    def raw(self, x) -> np.ndarray:
        y = self.dense(x)
        return y[:2] * np.exp(self.exponent_coefficient * y[2].real)

    def rows(self) -> list[tuple[float, float, float, float, float, float]]:
        """(x, Re phi1, Im phi1, Re phi2, Im phi2, omega) in factored variables."""
        return [
            (float(x), v[0].real, v[0].imag, v[1].real, v[1].imag, float(w))
            for x, v, w in zip(self.grid, self.values, self.omega_exponent)
        ]


def _end_points(side: Side, p: PotentialProfile, end: float | None, x_m: float | None):
    if end is None:
        end = p.matching_point if x_m is None else x_m
    if side is Side.LEFT:
        return p.x_min, float(end), p.c_minus * p.x_min
    return p.x_max, float(end), p.c_plus * p.x_max


def integrate_jost(
    side: Side | str,
    z: complex,
    p: PotentialProfile,
    tol: float = DEFAULT_TOL,
    end: float | None = None,
) -> JostTrajectory:
    """Jost solution in factored variables from the truncation boundary to ``end``.

    ``end`` defaults to the matching point.  Left solutions start at x_min,
    right solutions at x_max and are integrated backwards.
    """
    side = Side(side)
    zz = _check_zs(z)
    if zz[0].imag < 0:
        raise ValueError("Jost solutions are only decaying for Im z >= 0")
    j = jost_component(side, p)
    x0, x1, c0 = _end_points(side, p, end, None)
    fun = _factored_system(p, zz, j)
    _, dense, grid = _solve(fun, x0, x1, _start_state(1, j, c0), p.interior_breakpoints, tol, _atol(tol), True)
    grid = np.unique(grid)
    y = dense(grid)
    return JostTrajectory(side, complex(zz[0]), j, grid, y[:2].T.copy(), y[2].real.copy(), dense)


def _jost_ends(z: np.ndarray, p: PotentialProfile, x_m: float, tol: float):
    out = {}
    for side in (Side.LEFT, Side.RIGHT):
        j = jost_component(side, p)
        x0, x1, c0 = _end_points(side, p, x_m, None)
        fun = _factored_system(p, z, j)
        y, _, _ = _solve(fun, x0, x1, _start_state(z.size, j, c0), p.interior_breakpoints, tol, _atol(tol), False)
        n = z.size
        out[side] = (y[:n], y[n : 2 * n], y[2 * n].real, j)
    return out


def wronskian_batch(z, p: PotentialProfile, x_m: float | None = None, tol: float = DEFAULT_TOL) -> np.ndarray:
    """W(z) = psi1 phi2 - psi2 phi1 for an array of z, integrated in one batch."""
    z = _check_zs(z)
    if np.any(z.imag < 0):
        raise ValueError("wronskian requires Im z >= 0")
    x_m = p.matching_point if x_m is None else float(x_m)
    ends = _jost_ends(z, p, x_m, tol)
    l1, l2, cl, jl = ends[Side.LEFT]
    r1, r2, cr, jr = ends[Side.RIGHT]
    a, _ = alpha_beta(z)
    sigma = 1j * a * (_exponent_sign(jl) * cl + _exponent_sign(jr) * cr)
    return (l1 * r2 - l2 * r1) * np.exp(sigma)


def wronskian(z: complex, p: PotentialProfile, x_m: float | None = None, tol: float = DEFAULT_TOL) -> complex:
    return complex(wronskian_batch([z], p, x_m=x_m, tol=tol)[0])


def wronskian_along(z: complex, p: PotentialProfile, a: float, b: float, n: int = 41, tol: float = DEFAULT_TOL):
    """W evaluated at n points of [a, b] from overlapping left and right trajectories."""
    left = integrate_jost(Side.LEFT, z, p, tol, end=b)
    right = integrate_jost(Side.RIGHT, z, p, tol, end=a)
    x = np.linspace(a, b, n)
    psi, phi = left.raw(x), right.raw(x)
    return x, psi[0] * phi[1] - psi[1] * phi[0]


# ---------------------------------------------------------------------------
# derivative in z


@dataclass(frozen=True)
class WronskianDerivative:
    value: complex
    method: str


def _stencil_derivative(z: complex, p: PotentialProfile, tol: float, step: float | None = None) -> complex:
    h = (1e-3 * abs(z)) if step is None else step
    w = np.exp(0.5j * np.pi * np.arange(4))
    pts = z + h * w
    if np.any(pts.imag < 0):
        # central difference along the real direction stays in the closed upper half plane
        # only if z is above the real axis; fall back to a one-sided imaginary step
        pts = z + h * np.array([1, -1, 1j, 2j])
        vals = wronskian_batch(pts, p, tol=tol)
        return complex((vals[0] - vals[1]) / (2 * h))
    vals = wronskian_batch(pts, p, tol=tol)
    return complex(np.sum(vals * np.conj(w)) / (4.0 * h))


def _dot_coefficients(z: complex) -> tuple[complex, complex]:
    return 0.25 * (1.0 + 1.0 / z**2), 0.25 * (1.0 - 1.0 / z**2)


@dataclass(frozen=True, eq=False)
class MatchedEigenfunction:
    """Raw eigenfunction stitched from left and right Jost solutions at x_m.

    On the left it is the left Jost solution; on the right the right Jost
    solution times K, where K = Psi(x_m) / Phi(x_m).  Beyond the truncated
    domain the potential is constant to 1e-12, so each Jost solution is
    continued as its pure exponential there.  That matters for small
    sin(theta), where the eigenfunction decays much more slowly than u.
    """

    z: complex
    left: JostTrajectory
    right: JostTrajectory
    x_m: float
    K: complex
    mismatch: float
    rate_left: complex  # raw left solution ~ exp(rate_left * x) for x < x_min
    rate_right: complex  # raw right solution ~ exp(rate_right * x) for x > x_max

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty((2, x.size), dtype=complex)
        lo, hi = self.left.span[0], self.right.span[1]
        m = x < lo
        if m.any():
            out[:, m] = self.left.raw(lo) * np.exp(self.rate_left * (x[m] - lo))
        m = (x >= lo) & (x <= self.x_m)
        if m.any():
            out[:, m] = self.left.raw(x[m])
        m = (x > self.x_m) & (x <= hi)
        if m.any():
            out[:, m] = self.K * self.right.raw(x[m])
        m = x > hi
        if m.any():
            out[:, m] = self.K * self.right.raw(hi) * np.exp(self.rate_right * (x[m] - hi))
        return out

    def tail_lengths(self, decades: float = 36.0) -> tuple[float, float]:
        """Extra lengths beyond the domain after which |Phi|^2 has dropped by e^-decades."""
        cap = 1e5
        tl = decades / (2.0 * max(self.rate_left.real, decades / cap))
        tr = decades / (2.0 * max(-self.rate_right.real, decades / cap))
        return tl, tr

    def bounds(self, p: PotentialProfile) -> tuple[float, float, list[float]]:
        """Integration interval covering the tails, with panel cuts."""
        tl, tr = self.tail_lengths()
        cuts = sorted({p.x_min, p.x_max, self.x_m, *p.interior_breakpoints})
        return p.x_min - tl, p.x_max + tr, cuts


def matched_eigenfunction(
    z: complex, p: PotentialProfile, tol: float = DEFAULT_TOL, x_m: float | None = None, proportionality_tol: float = 1e-6
) -> MatchedEigenfunction:
    """Left/right Jost solutions joined at x_m; raises InconsistentJost if they are not proportional."""
    x_m = p.matching_point if x_m is None else float(x_m)
    left = integrate_jost(Side.LEFT, z, p, tol, end=x_m)
    right = integrate_jost(Side.RIGHT, z, p, tol, end=x_m)
    psi = left.raw(x_m)[:, 0]
    phi = right.raw(x_m)[:, 0]
    k = int(np.argmax(np.abs(phi)))
    K = psi[k] / phi[k]
    mismatch = float(np.linalg.norm(psi - K * phi) / max(np.linalg.norm(psi), 1e-300))
    if mismatch > proportionality_tol:
        raise InconsistentJost(f"Jost solutions not proportional at z = {z}: relative mismatch {mismatch:.3g}")
    rate_left = left.exponent_coefficient * p.c_minus
    rate_right = right.exponent_coefficient * p.c_plus
    return MatchedEigenfunction(complex(z), left, right, x_m, complex(K), mismatch, complex(rate_left), complex(rate_right))


def eigen_integral(ef: MatchedEigenfunction, p: PotentialProfile, integrand, abs_tol: float = 1e-12) -> complex:
    """Integrate integrand(x, s, c, phi) over the real line (domain plus exponential tails).

    ``phi`` has shape (2, n).  Domain ends, the matching point and
    breakpoints are panel edges.
    """

    def f(x):
        return integrand(x, p.sin_half(x), p.cos_half(x), ef(x))

    a, b, cuts = ef.bounds(p)
    val, _ = integrate(f, a, b, abs_tol=abs_tol, breakpoints=cuts)
    return complex(val)


def closed_form_derivative(z: complex, p: PotentialProfile, tol: float = DEFAULT_TOL) -> complex:
    """dW/dz at an eigenvalue from the Jost solutions themselves.

    With Psi = K Phi at an eigenvalue, W' = (1/K) * int [A' Psi, Psi] dx where
    A' = dA/dz and [a, b] = a1 b2 - a2 b1.  This gives
    W' = (1/K) int ( -2i alpha' c psi1 psi2 - i beta' s (psi1^2 - psi2^2) ) dx.
    """
    ef = matched_eigenfunction(z, p, tol)
    ad, bd = _dot_coefficients(complex(z))

    def integrand(x, s, c, phi):
        # ef is Psi on the left and K Phi on the right, so it is Psi throughout
        return -2j * ad * c * phi[0] * phi[1] - 1j * bd * s * (phi[0] ** 2 - phi[1] ** 2)

    return eigen_integral(ef, p, integrand) / ef.K


def wronskian_derivative(
    z: complex, p: PotentialProfile, tol: float = DEFAULT_TOL, method: str = "auto"
) -> WronskianDerivative:
    """dW/dz.  ``method``: 'closed-form' (eigenvalues only), 'finite-difference' or 'auto'.

    'auto' uses the closed form on the unit circle when z is an eigenvalue,
    finite differences otherwise.
    """
    if method == "finite-difference":
        return WronskianDerivative(_stencil_derivative(complex(z), p, tol), method)
    if method == "closed-form":
        return WronskianDerivative(closed_form_derivative(z, p, tol), method)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if abs(abs(z) - 1.0) < 1e-6:
        try:
            return WronskianDerivative(closed_form_derivative(z, p, tol), "closed-form")
        except InconsistentJost:
            pass
    return WronskianDerivative(_stencil_derivative(complex(z), p, tol), "finite-difference")


# ---------------------------------------------------------------------------
# transfer matrices


@dataclass(frozen=True)
class TransferMatrix:
    entries: np.ndarray
    interval: tuple[float, float]

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))


def transfer_matrix(
    z: complex,
    p: PotentialProfile,
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    breakpoints: Sequence[float] | None = None,
) -> TransferMatrix:
    """Fundamental matrix M with Phi(b) = M Phi(a) for the raw system."""
    if z == 0:
        raise NearZeroZ("z = 0")
    if a == b:
        return TransferMatrix(np.eye(2, dtype=complex), (a, b))
    al, be = alpha_beta(complex(z))
    al, be = complex(al), complex(be)

    def fun(x, y):
        s = float(p.sin_half(x))
        c = float(p.cos_half(x))
        m = al * c * TAU1 + be * s * TAU2
        return (m @ y.reshape(2, 2)).ravel()

    bps = p.breakpoints if breakpoints is None else breakpoints
    y, _, _ = _solve(fun, a, b, np.eye(2, dtype=complex).ravel(), bps, tol, _atol(tol), False)
    return TransferMatrix(y.reshape(2, 2), (a, b))
