"""Stationary potentials u(x): construction, truncation, classification.

A profile stores u unwrapped (never reduced mod 2*pi) together with the
truncated domain [x_min, x_max] outside of which both |sin(u/2)| and
1 - |cos(u/2)| are below ``TRUNCATION_LEVEL`` and the remaining tail of
sin(u/2) is certified below the same level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq, minimize_scalar

from .errors import TailNotIntegrable
from .quadrature import integrate

TRUNCATION_LEVEL = 1e-12
QUADRATURE_TOL = 1e-10
CHARGE_TOL = 1e-6

Fn = Callable[[np.ndarray], np.ndarray]


class ProfileKind(str, Enum):
    ANALYTIC = "analytic-closed-form"
    TABULATED = "tabulated-with-interpolation"


class HypothesisTag(str, Enum):
    KINK_MONOTONE_Q1 = "KinkMonotoneQ1"
    KINK_MONOTONE_QMINUS1 = "KinkMonotoneQminus1"
    KLAUS_SHAW_BREATHER = "KlausShawBreather"
    GENERAL = "General"


@dataclass(frozen=True)
class HypothesisClass:
    tag: HypothesisTag
    u0: float | None = None

    @property
    def is_kink(self) -> bool:
        return self.tag in (HypothesisTag.KINK_MONOTONE_Q1, HypothesisTag.KINK_MONOTONE_QMINUS1)

    @property
    def is_breather(self) -> bool:
        return self.tag is HypothesisTag.KLAUS_SHAW_BREATHER

    @property
    def satisfied(self) -> bool:
        return self.tag is not HypothesisTag.GENERAL

    def to_dict(self) -> dict:
        return {"tag": self.tag.value, "u0": self.u0}


@dataclass(frozen=True, eq=False)
class PotentialProfile:
    """Immutable potential with derivative, asymptotic data and truncated domain."""

    name: str
    u: Fn
    u_x: Fn
    x_min: float
    x_max: float
    k_minus: int
    k_plus: int
    kind: ProfileKind = ProfileKind.ANALYTIC
    params: dict = field(default_factory=dict)
    support_hint: tuple[float, float] | None = None
    breakpoints: tuple[float, ...] = ()
    sin_half_fn: Fn | None = None
    cos_half_fn: Fn | None = None

    def sin_half(self, x):
        if self.sin_half_fn is not None:
            return self.sin_half_fn(x)
        return np.sin(0.5 * self.u(x))

    def cos_half(self, x):
        if self.cos_half_fn is not None:
            return self.cos_half_fn(x)
        return np.cos(0.5 * self.u(x))

    @property
    def charge(self) -> int:
        return self.k_plus - self.k_minus

    @property
    def c_minus(self) -> int:
        """Limit of cos(u/2) at -infinity (+1 or -1)."""
        return 1 if self.k_minus % 2 == 0 else -1

    @property
    def c_plus(self) -> int:
        return 1 if self.k_plus % 2 == 0 else -1

    @property
    def interior_breakpoints(self) -> tuple[float, ...]:
        return tuple(b for b in self.breakpoints if self.x_min < b < self.x_max)

    def sample(self, n: int = 4001) -> np.ndarray:
        x = np.linspace(self.x_min, self.x_max, n)
        return np.union1d(x, np.asarray(self.interior_breakpoints, dtype=float))

    @cached_property
    def matching_point(self) -> float:
        """Default point where left and right Jost solutions are matched.

        Breathers: the extremum of u.  Kinks: the crossing of the mid value
        (u = pi for a 0 -> 2 pi kink).  Otherwise: the maximum of |sin(u/2)|.
        """
        x = self.sample()
        u = self.u(x)
        lo, hi = self.x_min, self.x_max
        if self.charge != 0:
            mid = math.pi * (self.k_minus + self.k_plus)
            g = u - mid
            idx = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0)[0]
            if idx.size:
                i = idx[np.argmin(np.abs(x[idx]))]
                if g[i] == 0.0:
                    return float(x[i])
                return float(brentq(lambda t: float(self.u(t)) - mid, x[i], x[i + 1], xtol=1e-14))
            target = -np.abs(np.sin(0.5 * u))
        elif np.ptp(u) > 0:
            target = -np.abs(u - 2.0 * math.pi * self.k_minus)
        else:
            return float(np.clip(0.0, lo, hi))
        flat = np.nonzero(target <= target.min() + 1e-12 * max(1.0, abs(target.min())))[0]
        if flat.size > 2:
            # plateau: take its midpoint
            return float(0.5 * (x[flat[0]] + x[flat[-1]]))
        i = int(np.argmin(target))
        a, b = x[max(i - 1, 0)], x[min(i + 1, x.size - 1)]
        if b <= a:
            return float(x[i])
        if self.charge == 0:
            obj = lambda t: -abs(float(self.u(t)) - 2.0 * math.pi * self.k_minus)  # noqa: E731
        else:
            obj = lambda t: -abs(math.sin(0.5 * float(self.u(t))))  # noqa: E731
        res = minimize_scalar(obj, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
        return float(res.x)

    def descriptor(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "params": dict(self.params),
            "x_min": self.x_min,
            "x_max": self.x_max,
            "k_minus": self.k_minus,
            "k_plus": self.k_plus,
            "charge": self.charge,
        }


# ---------------------------------------------------------------------------
# domain truncation


def _tail_measure(p_s: Fn, p_c: Fn, x: np.ndarray) -> np.ndarray:
    return np.maximum(np.abs(p_s(x)), 1.0 - np.abs(p_c(x)))


def _truncation_edge(s: Fn, c: Fn, start: float, direction: float, level: float = TRUNCATION_LEVEL) -> float:
    """Walk outward from ``start`` until the tail is certified below ``level``.

    Assumes eventual monotone (exponential or faster) decay of |sin(u/2)|.
    """
    step = 1.0
    x_prev = start
    for _ in range(200):
        x = start + direction * step
        g = _tail_measure(s, c, np.array([x, x + direction * 0.5]))
        if g[0] < level and g[1] <= g[0]:
            break
        x_prev = x
        step *= 1.5
    else:
        raise TailNotIntegrable(f"potential does not decay within {step:.3g} of {start}")
    # bisect for the first crossing below level
    a, b = x_prev, x
    for _ in range(80):
        m = 0.5 * (a + b)
        if _tail_measure(s, c, np.array([m]))[0] < level:
            b = m
        else:
            a = m
        if abs(b - a) < 1e-6:
            break
    edge = b
    # push further out until the exponential tail estimate is also below level
    for _ in range(200):
        h = 0.25
        s0 = abs(float(s(np.array([edge]))[0]))
        if s0 == 0.0:
            return edge
        s1 = abs(float(s(np.array([edge + direction * h]))[0]))
        if s1 >= s0:
            edge += direction * h
            continue
        rate = math.log(s0 / s1) / h
        tail = s0 / rate
        if tail < level:
            return edge
        edge += direction * max(h, math.log(tail / level) / rate)
    raise TailNotIntegrable(f"tail of sin(u/2) not certified below {level} near x = {edge:.6g}")


def _build(
    name: str,
    u: Fn,
    u_x: Fn,
    *,
    params: dict,
    center: float = 0.0,
    support: tuple[float, float] | None = None,
    breakpoints: tuple[float, ...] = (),
    sin_half: Fn | None = None,
    cos_half: Fn | None = None,
    kind: ProfileKind = ProfileKind.ANALYTIC,
    domain: tuple[float, float] | None = None,
) -> PotentialProfile:
    s = sin_half if sin_half is not None else (lambda x: np.sin(0.5 * u(x)))
    c = cos_half if cos_half is not None else (lambda x: np.cos(0.5 * u(x)))
    if domain is not None:
        x_min, x_max = domain
    elif support is not None:
        x_min, x_max = support
    else:
        x_min = _truncation_edge(s, c, center, -1.0)
        x_max = _truncation_edge(s, c, center, +1.0)
    k_minus = int(round(float(u(np.array([x_min]))[0]) / (2.0 * math.pi)))
    k_plus = int(round(float(u(np.array([x_max]))[0]) / (2.0 * math.pi)))
    profile = PotentialProfile(
        name=name,
        u=u,
        u_x=u_x,
        x_min=float(x_min),
        x_max=float(x_max),
        k_minus=k_minus,
        k_plus=k_plus,
        kind=kind,
        params=params,
        support_hint=support,
        breakpoints=tuple(sorted(breakpoints)),
        sin_half_fn=sin_half,
        cos_half_fn=cos_half,
    )
    check_charge(profile)
    return profile


def topological_charge_integral(p: PotentialProfile) -> float:
    """(1/2 pi) * integral of u_x over the truncated domain, by quadrature."""
    val, _ = integrate(p.u_x, p.x_min, p.x_max, abs_tol=1e-11, breakpoints=p.interior_breakpoints)
    return float(val) / (2.0 * math.pi)


def check_charge(p: PotentialProfile) -> None:
    q = topological_charge_integral(p)
    if abs(q - p.charge) > CHARGE_TOL:
        raise ValueError(f"{p.name}: (1/2pi) int u_x = {q:.9f} disagrees with charge {p.charge}")


# ---------------------------------------------------------------------------
# families


def _sech(x):
    return 1.0 / np.cosh(x)


def make_buckingham_miller() -> PotentialProfile:
    """u = pi - 2 gd(x):  sin(u/2) = sech x,  cos(u/2) = tanh x."""
    return _build(
        "buckingham_miller",
        lambda x: np.pi - 4.0 * np.arctan(np.tanh(0.5 * np.asarray(x))),
        lambda x: -2.0 * _sech(np.asarray(x)),
        params={},
        sin_half=lambda x: _sech(np.asarray(x)),
        cos_half=lambda x: np.tanh(np.asarray(x)),
    )


KINK_SHAPES = ("atan-exp", "tanh", "erf")


def make_monotone_kink(shape: str = "atan-exp", scale: float = 1.0) -> PotentialProfile:
    """Increasing kink from 0 to 2 pi (charge +1).

    Shapes: ``atan-exp`` (4 atan(exp(x/scale)), the sine-Gordon kink),
    ``tanh`` (pi (1 + tanh(x/scale))), ``erf`` (pi (1 + erf(x/scale))).
    """
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    from scipy.special import erf, erfc

    a = float(scale)
    if shape == "atan-exp":
        u = lambda x: 4.0 * np.arctan(np.exp(np.asarray(x) / a))  # noqa: E731
        ux = lambda x: 2.0 * _sech(np.asarray(x) / a) / a  # noqa: E731
        s = lambda x: _sech(np.asarray(x) / a)  # noqa: E731
        c = lambda x: -np.tanh(np.asarray(x) / a)  # noqa: E731
    elif shape == "tanh":
        u = lambda x: np.pi * (1.0 + np.tanh(np.asarray(x) / a))  # noqa: E731
        ux = lambda x: np.pi * _sech(np.asarray(x) / a) ** 2 / a  # noqa: E731
        s = lambda x: np.sin(np.pi / (1.0 + np.exp(2.0 * np.abs(np.asarray(x)) / a)))  # noqa: E731
        c = lambda x: -np.sin(0.5 * np.pi * np.tanh(np.asarray(x) / a))  # noqa: E731
    elif shape == "erf":
        u = lambda x: np.pi * (1.0 + erf(np.asarray(x) / a))  # noqa: E731
        ux = lambda x: 2.0 * np.sqrt(np.pi) * np.exp(-(np.asarray(x) / a) ** 2) / a  # noqa: E731
        s = lambda x: np.sin(0.5 * np.pi * erfc(np.abs(np.asarray(x)) / a))  # noqa: E731
        c = lambda x: -np.sin(0.5 * np.pi * erf(np.asarray(x) / a))  # noqa: E731
    else:
        raise ValueError(f"unknown kink shape {shape!r}; expected one of {KINK_SHAPES}")
    return _build(f"kink_{shape}", u, ux, params={"shape": shape, "scale": a}, sin_half=s, cos_half=c)


def make_klaus_shaw_breather(peak: float, width: float = 1.0) -> PotentialProfile:
    """Single hump u = peak * sech(x / width) with 0 < peak < pi."""
    if not 0.0 < peak < math.pi:
        raise ValueError(f"peak must lie in (0, pi), got {peak}")
    if not width > 0:
        raise ValueError(f"width must be positive, got {width}")
    w = float(width)
    return _build(
        "klaus_shaw_breather",
        lambda x: peak * _sech(np.asarray(x) / w),
        lambda x: -peak * _sech(np.asarray(x) / w) * np.tanh(np.asarray(x) / w) / w,
        params={"peak": float(peak), "width": w},
    )


def sech_sine_integral(peak: float) -> float:
    """Integral over R of sin(peak * sech(t) / 2) dt (width-one breather)."""
    f = lambda t: np.sin(0.5 * peak * _sech(t))  # noqa: E731
    # sech(t) < 1e-17 beyond |t| = 40
    val, _ = integrate(f, -40.0, 40.0, abs_tol=1e-13)
    return float(val)


def breather_width_for_l1(peak: float, target: float) -> float:
    """Width of the sech breather with given peak whose I = int sin(u/2) equals ``target``.

    I scales linearly with the width, so this is a single quadrature.
    """
    return float(target) / sech_sine_integral(peak)


def kink_scale_for_l1(shape: str, target: float) -> float:
    """Scale of the monotone kink of given shape whose I equals ``target`` (I is linear in the scale)."""
    return float(target) / l1_sine_half(make_monotone_kink(shape, 1.0)).signed


def make_zero_potential(half_width: float = 1.0) -> PotentialProfile:
    return _build(
        "zero",
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        params={},
        domain=(-half_width, half_width),
    )


def make_odd_potential(amplitude: float = math.pi) -> PotentialProfile:
    """u = amplitude * tanh(x) sech(x); odd, so the unit circle carries no eigenvalues."""
    return _build(
        "odd_tanh_sech",
        lambda x: amplitude * np.tanh(np.asarray(x)) * _sech(np.asarray(x)),
        lambda x: amplitude * _sech(np.asarray(x)) * (_sech(np.asarray(x)) ** 2 - np.tanh(np.asarray(x)) ** 2),
        params={"amplitude": float(amplitude)},
    )


def make_compact_bump(peak: float, half_width: float) -> PotentialProfile:
    """C^1 bump u = peak (1 - (x/d)^2)^2 on [-d, d], zero outside."""
    if not half_width > 0:
        raise ValueError("half_width must be positive")
    d = float(half_width)

    def u(x):
        x = np.asarray(x, dtype=float)
        t = np.clip(x / d, -1.0, 1.0)
        return peak * (1.0 - t * t) ** 2

    def ux(x):
        x = np.asarray(x, dtype=float)
        t = np.clip(x / d, -1.0, 1.0)
        return -4.0 * peak * t * (1.0 - t * t) / d

    return _build(
        "compact_bump",
        u,
        ux,
        params={"peak": float(peak), "half_width": d},
        support=(-d, d),
    )


def make_smoothed_box(height: float, half_width: float, ramp: float) -> PotentialProfile:
    """Plateau of given height on [-L, L] with C^1 cubic ramps of width ``ramp`` inside the support."""
    L, r = float(half_width), float(ramp)
    if not 0 < r <= L:
        raise ValueError("need 0 < ramp <= half_width")

    def _t(x):
        # distance from the nearer support edge, in ramp units, clipped to [0, 1]
        return np.clip((L - np.abs(np.asarray(x, dtype=float))) / r, 0.0, 1.0)

    def u(x):
        t = _t(x)
        return height * t * t * (3.0 - 2.0 * t)

    def ux(x):
        x = np.asarray(x, dtype=float)
        t = _t(x)
        inside = (t > 0.0) & (t < 1.0)
        return np.where(inside, -np.sign(x) * height * 6.0 * t * (1.0 - t) / r, 0.0)

    return _build(
        "smoothed_box",
        u,
        ux,
        params={"height": float(height), "half_width": L, "ramp": r},
        support=(-L, L),
        breakpoints=(-L, -L + r, L - r, L),
    )


def make_piecewise_constant(edges, values) -> PotentialProfile:
    """Step potential: u = values[i] on [edges[i], edges[i+1]); used as a transfer-matrix oracle.

    Not C^1; only meant for transfer-matrix checks on the interval [edges[0], edges[-1]].
    """
    edges = np.asarray(edges, dtype=float)
    values = np.asarray(values, dtype=float)
    if edges.size != values.size + 1 or np.any(np.diff(edges) <= 0):
        raise ValueError("need strictly increasing edges with len(edges) == len(values) + 1")

    def u(x):
        i = np.clip(np.searchsorted(edges, np.asarray(x, dtype=float), side="right") - 1, 0, values.size - 1)
        return values[i]

    return PotentialProfile(
        name="piecewise_constant",
        u=u,
        u_x=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        x_min=float(edges[0]),
        x_max=float(edges[-1]),
        k_minus=int(round(values[0] / (2 * math.pi))),
        k_plus=int(round(values[-1] / (2 * math.pi))),
        kind=ProfileKind.ANALYTIC,
        params={"edges": edges.tolist(), "values": values.tolist()},
        breakpoints=tuple(edges[1:-1].tolist()),
    )


def from_table(x, u, name: str = "tabulated") -> PotentialProfile:
    """Tabulated profile with monotone C^1 (PCHIP) interpolation; constant beyond the table."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.ndim != 1 or x.shape != u.shape or x.size < 4:
        raise ValueError("table needs at least four (x, u) rows")
    if np.any(np.diff(x) <= 0):
        raise ValueError("x column must be strictly increasing")
    interp = PchipInterpolator(x, u, extrapolate=False)
    deriv = interp.derivative()
    lo, hi = x[0], x[-1]

    def uf(t):
        t = np.clip(np.asarray(t, dtype=float), lo, hi)
        return interp(t)

    def uxf(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= lo) & (t <= hi)
        return np.where(inside, deriv(np.clip(t, lo, hi)), 0.0)

    return _build(
        name,
        uf,
        uxf,
        params={"rows": int(x.size)},
        kind=ProfileKind.TABULATED,
        domain=(lo, hi),
        breakpoints=(),
    )


def load_table(path: str | Path) -> PotentialProfile:
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns (x, u), found {data.shape[1]}")
    return from_table(data[:, 0], data[:, 1], name=Path(path).stem)


def write_table(p: PotentialProfile, path: str | Path, n: int = 2001) -> None:
    x = np.linspace(p.x_min, p.x_max, n)
    np.savetxt(path, np.column_stack([x, p.u(x)]), fmt="%.17g", header=f"x u  ({p.name})")


def reflect(p: PotentialProfile) -> PotentialProfile:
    """x -> -x.  Reverses the sign of the topological charge."""
    u, ux = p.u, p.u_x
    s, c = p.sin_half_fn, p.cos_half_fn
    return PotentialProfile(
        name=f"{p.name}_reflected",
        u=lambda x: u(-np.asarray(x, dtype=float)),
        u_x=lambda x: -ux(-np.asarray(x, dtype=float)),
        x_min=-p.x_max,
        x_max=-p.x_min,
        k_minus=p.k_plus,
        k_plus=p.k_minus,
        kind=p.kind,
        params={**p.params, "reflected": True},
        support_hint=None if p.support_hint is None else (-p.support_hint[1], -p.support_hint[0]),
        breakpoints=tuple(sorted(-b for b in p.breakpoints)),
        sin_half_fn=None if s is None else (lambda x: s(-np.asarray(x, dtype=float))),
        cos_half_fn=None if c is None else (lambda x: c(-np.asarray(x, dtype=float))),
    )


def translate(p: PotentialProfile, shift: float) -> PotentialProfile:
    """u(x) -> u(x - shift)."""
    u, ux = p.u, p.u_x
    s, c = p.sin_half_fn, p.cos_half_fn
    a = float(shift)
    return PotentialProfile(
        name=f"{p.name}_shifted",
        u=lambda x: u(np.asarray(x, dtype=float) - a),
        u_x=lambda x: ux(np.asarray(x, dtype=float) - a),
        x_min=p.x_min + a,
        x_max=p.x_max + a,
        k_minus=p.k_minus,
        k_plus=p.k_plus,
        kind=p.kind,
        params={**p.params, "shift": a},
        support_hint=None if p.support_hint is None else (p.support_hint[0] + a, p.support_hint[1] + a),
        breakpoints=tuple(b + a for b in p.breakpoints),
        sin_half_fn=None if s is None else (lambda x: s(np.asarray(x, dtype=float) - a)),
        cos_half_fn=None if c is None else (lambda x: c(np.asarray(x, dtype=float) - a)),
    )


# ---------------------------------------------------------------------------
# functionals


class L1SineHalf(NamedTuple):
    signed: float
    absolute: float
    error: float
    tail: float


def _tail_bound(p: PotentialProfile, edge: float, direction: float) -> float:
    if p.support_hint is not None:
        return 0.0
    s0 = abs(float(p.sin_half(np.array([edge]))[0]))
    if s0 == 0.0:
        return 0.0
    h = 0.25
    s_in = abs(float(p.sin_half(np.array([edge - direction * h]))[0]))
    if p.kind is ProfileKind.TABULATED:
        # constant beyond the table: the tail is integrable only if sin(u/2) vanishes there
        if s0 > TRUNCATION_LEVEL:
            raise TailNotIntegrable(f"{p.name}: |sin(u/2)| = {s0:.3g} at the table edge")
        return 0.0
    if s_in <= s0:
        raise TailNotIntegrable(f"{p.name}: sin(u/2) not decaying at x = {edge:.6g}")
    rate = math.log(s_in / s0) / h
    return s0 / rate


def l1_sine_half(p: PotentialProfile, abs_tol: float = QUADRATURE_TOL) -> L1SineHalf:
    """Signed integral I = int sin(u/2) dx and the L1 norm int |sin(u/2)| dx.

    Quadrature over the truncated domain plus an exponential tail bound at
    each end; raises TailNotIntegrable when the bound exceeds tolerance.
    """
    bps = p.interior_breakpoints
    signed, e1 = integrate(p.sin_half, p.x_min, p.x_max, abs_tol=abs_tol, breakpoints=bps)
    absolute, e2 = integrate(lambda x: np.abs(p.sin_half(x)), p.x_min, p.x_max, abs_tol=abs_tol, breakpoints=bps)
    tail = _tail_bound(p, p.x_min, -1.0) + _tail_bound(p, p.x_max, +1.0)
    if tail > 10 * abs_tol:
        raise TailNotIntegrable(f"{p.name}: tail estimate {tail:.3g} exceeds tolerance")
    return L1SineHalf(float(signed), float(absolute), max(e1, e2), tail)


def u_x_l1(p: PotentialProfile) -> float:
    val, _ = integrate(lambda x: np.abs(p.u_x(x)), p.x_min, p.x_max, abs_tol=1e-10, breakpoints=p.interior_breakpoints)
    return float(val)


# ---------------------------------------------------------------------------
# classification


def _sign_changes(values: np.ndarray, eps: float) -> int:
    signs = np.sign(values[np.abs(values) > eps])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def classify(p: PotentialProfile) -> HypothesisClass:
    """Strictest hypothesis class whose predicate holds on a dense sample."""
    x = p.sample(8001)
    u = p.u(x)
    ux = p.u_x(x)
    scale = max(float(np.max(np.abs(ux))), 1e-300)
    eps = 1e-10 * scale
    q = p.charge
    if abs(q) == 1:
        if np.all(ux >= -eps) and q == 1 or np.all(ux <= eps) and q == -1:
            return HypothesisClass(HypothesisTag.KINK_MONOTONE_Q1 if q == 1 else HypothesisTag.KINK_MONOTONE_QMINUS1)
        return HypothesisClass(HypothesisTag.GENERAL)
    if q == 0 and p.k_minus == 0 and np.ptp(u) > 0:
        ueps = 1e-12 * max(1.0, float(np.max(np.abs(u))))
        nonneg = bool(np.all(u >= -ueps))
        nonpos = bool(np.all(u <= ueps))
        if (nonneg or nonpos) and _sign_changes(ux, eps) == 1:
            # refine the extremum on the sample neighbourhood
            u0 = abs(float(p.u(np.array([p.matching_point]))[0]))
            u0 = max(u0, float(np.max(np.abs(u))))
            if 0.0 < u0 < math.pi:
                return HypothesisClass(HypothesisTag.KLAUS_SHAW_BREATHER, u0)
    return HypothesisClass(HypothesisTag.GENERAL)


def shift_level(p: PotentialProfile, m: int) -> PotentialProfile:
    """u -> u + 2 pi m.  Flips the signs of sin(u/2) and cos(u/2) when m is odd."""
    u, ux = p.u, p.u_x
    s, c = p.sin_half_fn, p.cos_half_fn
    sign = -1.0 if m % 2 else 1.0
    offset = 2.0 * math.pi * m
    return PotentialProfile(
        name=f"{p.name}_lifted",
        u=lambda x: u(x) + offset,
        u_x=ux,
        x_min=p.x_min,
        x_max=p.x_max,
        k_minus=p.k_minus + m,
        k_plus=p.k_plus + m,
        kind=p.kind,
        params={**p.params, "level_shift": m},
        support_hint=p.support_hint,
        breakpoints=p.breakpoints,
        sin_half_fn=None if s is None else (lambda x: sign * s(x)),
        cos_half_fn=None if c is None else (lambda x: sign * c(x)),
    )
