"""Krein signatures, symmetry orbits and flux diagnostics.

Inner products are <a, b> = conj(a) . b.  Along any solution of
Phi' = A Phi the quadratic forms obey

    <tau2>'  = -2 Re(alpha) c <tau3> - 2i Im(beta) s |Phi|^2
    <tau3>'  =  2 Re(alpha) c <tau2> - 2 Re(beta) s <tau1>
    |Phi|^2' =  2i Im(alpha) c <tau1> + 2i Im(beta) s <tau2>
    <tau1>'  = -2i Im(alpha) c |Phi|^2 + 2 Re(beta) s <tau3>

with <M> = <Phi, M Phi>.  ``flux_residuals`` checks the integrated form of
these along a factored Jost trajectory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InconsistentJost, NotAnEigenvalue
from .potentials import PotentialProfile
from .quadrature import integrate, integrate_panels, panel_nodes
from .scattering import (
    DEFAULT_TOL,
    TAU1,
    TAU2,
    TAU3,
    JostTrajectory,
    MatchedEigenfunction,
    alpha_beta,
    matched_eigenfunction,
    wronskian,
    wronskian_batch,
)

EIGEN_THRESHOLD = 1e-8
DEFINITE_TOL = 1e-8


# ---------------------------------------------------------------------------
# eigenfunctions


def local_scale(z: complex, p: PotentialProfile, radius: float | None = None, tol: float = DEFAULT_TOL) -> float:
    """max |W| on a small circle around z, used to normalise |W(z)|."""
    rad = 0.05 * abs(z) if radius is None else radius
    rad = min(rad, 0.5 * z.imag) if z.imag > 0 else rad
    pts = z + rad * np.exp(2j * np.pi * np.arange(8) / 8)
    pts = pts[(pts.imag >= 0) & (np.abs(pts) >= 0.05)]
    return float(np.max(np.abs(wronskian_batch(pts, p, tol=tol))))


@dataclass(frozen=True, eq=False)
class Eigenfunction:
    """Unit-L2 eigenfunction with fixed phase.

    Phase: phi1(x_m) real positive, or i phi2(x_m) real positive when phi2
    dominates there.  On |z| = 1 this makes phi1 real and phi2 imaginary.
    """

    z: complex
    profile: PotentialProfile
    matched: MatchedEigenfunction
    factor: complex
    residual: float  # |W(z)| / local scale

    @property
    def x_m(self) -> float:
        return self.matched.x_m

    def __call__(self, x) -> np.ndarray:
        return self.factor * self.matched(x)

    def derivative(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        phi = self(x)
        a, b = alpha_beta(self.z)
        s = self.profile.sin_half(x)
        c = self.profile.cos_half(x)
        d1 = -1j * a * c * phi[0] + 1j * b * s * phi[1]
        d2 = 1j * b * s * phi[0] + 1j * a * c * phi[1]
        return np.vstack([d1, d2])

    def integrate(self, integrand: Callable, abs_tol: float = 1e-12) -> complex:
        """int integrand(x, s, c, phi) dx over the real line (domain plus tails)."""
        p = self.profile

        def f(x):
            return integrand(x, p.sin_half(x), p.cos_half(x), self(x))

        a, b, cuts = self.matched.bounds(p)
        val, _ = integrate(f, a, b, abs_tol=abs_tol, breakpoints=cuts)
        return complex(val)

    def phase_alignment(self, n: int = 201) -> float:
        """max of |Im phi1| and |Re phi2| on a grid, relative to max |Phi| (zero on |z| = 1)."""
        p = self.profile
        x = np.linspace(p.x_min, p.x_max, n)
        phi = self(x)
        scale = float(np.max(np.abs(phi)))
        return float(max(np.max(np.abs(phi[0].imag)), np.max(np.abs(phi[1].real))) / scale)


def eigenfunction(
    z: complex,
    p: PotentialProfile,
    tol: float = DEFAULT_TOL,
    threshold: float = EIGEN_THRESHOLD,
    scale: float | None = None,
) -> Eigenfunction:
    """Normalised eigenfunction at a certified eigenvalue; NotAnEigenvalue otherwise."""
    z = complex(z)
    sc = local_scale(z, p, tol=tol) if scale is None else scale
    res = abs(wronskian(z, p, tol=tol)) / sc
    if res > threshold:
        raise NotAnEigenvalue(f"|W(z)|/scale = {res:.3g} exceeds {threshold:g} at z = {z}")
    try:
        m = matched_eigenfunction(z, p, tol, proportionality_tol=max(1e-6, 100 * threshold))
    except InconsistentJost as exc:
        raise NotAnEigenvalue(str(exc)) from exc
    a, b, cuts = m.bounds(p)
    norm2, _ = integrate(lambda x: np.sum(np.abs(m(x)) ** 2, axis=0), a, b, abs_tol=1e-13, breakpoints=cuts)
    phi_m = m(m.x_m)[:, 0]
    if abs(phi_m[0]) >= abs(phi_m[1]):
        ph = abs(phi_m[0]) / phi_m[0]
    else:
        ph = abs(phi_m[1]) / (1j * phi_m[1])
    return Eigenfunction(z, p, m, complex(ph / math.sqrt(float(norm2))), float(res))


# ---------------------------------------------------------------------------
# signatures


def _n2(phi):
    return np.abs(phi[0]) ** 2 + np.abs(phi[1]) ** 2


def _q(phi, m):
    mp = np.einsum("ij,jn->in", m, phi)
    return np.sum(np.conj(phi) * mp, axis=0)


@dataclass(frozen=True)
class SignatureReport:
    kappa_circle: complex
    kappa_imag: complex
    bracket: complex  # sin th int s |Phi|^2 - i cos th int c <tau3>
    bracket_integrals: dict
    definite: bool

    def to_dict(self) -> dict:
        cx = lambda w: [w.real, w.imag]  # noqa: E731
        return {
            "kappa_circle": cx(self.kappa_circle),
            "kappa_imag": cx(self.kappa_imag),
            "bracket": cx(self.bracket),
            "bracket_integrals": {k: cx(v) for k, v in self.bracket_integrals.items()},
            "definite": self.definite,
        }


def bracket_integrals(ef: Eigenfunction) -> dict:
    return {
        "s_norm2": ef.integrate(lambda x, s, c, phi: s * _n2(phi)),
        "c_tau3": ef.integrate(lambda x, s, c, phi: c * _q(phi, TAU3)),
        "c_tau2": ef.integrate(lambda x, s, c, phi: c * _q(phi, TAU2)),
        "s_tau1": ef.integrate(lambda x, s, c, phi: s * _q(phi, TAU1)),
    }


def _polar(z: complex) -> tuple[float, float]:
    return abs(z), math.atan2(z.imag, z.real)


def circle_signature(ef: Eigenfunction, integrals: dict | None = None) -> tuple[complex, complex]:
    """(kappa, inner bracket) for the unit-circle symmetry.

    kappa = 2 i r (sin th int s |Phi|^2 - i cos th int c <Phi, tau3 Phi>).
    """
    b = bracket_integrals(ef) if integrals is None else integrals
    r, th = _polar(ef.z)
    bracket = math.sin(th) * b["s_norm2"] - 1j * math.cos(th) * b["c_tau3"]
    return 2j * r * bracket, bracket


def imag_axis_signature(ef: Eigenfunction, integrals: dict | None = None) -> complex:
    """kappa~ = (i/2)(r - 1/r) int c <tau2> - (i/2)(r + 1/r) int s <tau1>."""
    b = bracket_integrals(ef) if integrals is None else integrals
    r, _ = _polar(ef.z)
    return 0.5j * (r - 1.0 / r) * b["c_tau2"] - 0.5j * (r + 1.0 / r) * b["s_tau1"]


def signature_report(ef: Eigenfunction) -> SignatureReport:
    b = bracket_integrals(ef)
    kappa, bracket = circle_signature(ef, b)
    kt = imag_axis_signature(ef, b)
    return SignatureReport(kappa, kt, bracket, b, abs(kappa) > DEFINITE_TOL)


# ---------------------------------------------------------------------------
# flux identities


def _forms(v):
    return _q(v, TAU2), _q(v, TAU3), _n2(v).astype(complex), _q(v, TAU1)


def _flux_rhs(z: complex, s, c, v):
    a, b = alpha_beta(z)
    t2, t3, n2, t1 = _forms(v)
    return (
        -2.0 * a.real * c * t3 - 2j * b.imag * s * n2,
        2.0 * a.real * c * t2 - 2.0 * b.real * s * t1,
        2j * a.imag * c * t1 + 2j * b.imag * s * t2,
        -2j * a.imag * c * n2 + 2.0 * b.real * s * t3,
    )


FLUX_NAMES = ("tau2", "tau3", "norm2", "tau1")


def flux_residuals(traj: JostTrajectory, p: PotentialProfile) -> np.ndarray:
    """Integrated residuals of the four identities, scaled by max |v|^2.

    Works in factored variables v (Phi = v exp(sigma)); each identity then
    picks up -2 Re(sigma') <M> on the right.  For each form Q the residual is
    max_k |Q(x_k) - Q(x_0) - int_{x_0}^{x_k} RHS| over the integrator grid,
    with the integral taken by GK15 on every step of the dense output.
    Returned in the order <tau2>, <tau3>, |Phi|^2, <tau1>.
    """
    grid = traj.grid
    nodes, half = panel_nodes(grid)
    flat = nodes.ravel()
    v = traj.factored(flat)
    s = p.sin_half(flat)
    c = p.cos_half(flat)
    re_sigma_rate = (traj.exponent_coefficient * c).real
    rhs = _flux_rhs(traj.z, s, c, v)
    forms_nodes = _forms(v)
    v_grid = traj.factored(grid)
    forms_grid = _forms(v_grid)
    amp = float(np.max(_n2(v_grid)))
    out = np.empty(4)
    for k in range(4):
        integrand = (rhs[k] - 2.0 * re_sigma_rate * forms_nodes[k]).reshape(nodes.shape)
        pieces, _ = integrate_panels(integrand, half)
        cum = np.concatenate([[0.0], np.cumsum(pieces)])
        q = forms_grid[k]
        out[k] = float(np.max(np.abs(q - q[0] - cum))) / amp
    return out


def integrated_flux_check(ef: Eigenfunction) -> dict:
    """Integrals over R of the <tau2> and <tau3> identities at an eigenvalue.

    Both sides vanish for a decaying eigenfunction, giving
    (r - 1/r) * bracket = 0 and cos(theta) * kappa~ = 0 up to constants.
    """
    b = bracket_integrals(ef)
    a, be = alpha_beta(ef.z)
    n2 = ef.integrate(lambda x, s, c, phi: s * _n2(phi))
    # int <tau2>' = 0 and int <tau3>' = 0
    tau2 = -2.0 * a.real * b["c_tau3"] - 2j * be.imag * n2
    tau3 = 2.0 * a.real * b["c_tau2"] - 2.0 * be.real * b["s_tau1"]
    r, th = _polar(ef.z)
    _, bracket = circle_signature(ef, b)
    return {
        "int_tau2_flux": tau2,
        "int_tau3_flux": tau3,
        "r_minus_inv_r_times_bracket": (r - 1.0 / r) * bracket,
    }


# ---------------------------------------------------------------------------
# symmetry orbit


@dataclass(frozen=True)
class OrbitMember:
    z: complex
    label: str
    matrix: np.ndarray  # eigenfunction map Phi -> matrix @ (conj(Phi) if conjugate else Phi)
    conjugate: bool

    def apply(self, phi: np.ndarray) -> np.ndarray:
        base = np.conj(phi) if self.conjugate else phi
        return np.einsum("ij,j...->i...", self.matrix, base)


_GENERATORS = {
    # z map, matrix, conjugates
    "inv": (lambda z: 1.0 / z, TAU2, False),
    "neg": (lambda z: -z, TAU3, False),
    "conj": (lambda z: z.conjugate(), TAU3, True),
}


def symmetry_orbit(z: complex, tol: float = 1e-12) -> list[OrbitMember]:
    """Images of z under the eight symmetries, deduplicated, with eigenfunction maps."""
    z = complex(z)
    if z == 0:
        raise ValueError("z = 0 has no orbit")
    members: list[OrbitMember] = []
    for mask in range(8):
        w = z
        mat = np.eye(2, dtype=complex)
        conj = False
        names = []
        for bit, key in enumerate(("conj", "neg", "inv")):
            if not mask >> bit & 1:
                continue
            fz, m, cj = _GENERATORS[key]
            w = fz(w)
            # new map: m @ conj?(mat @ conj?(Phi))
            mat = m @ (np.conj(mat) if cj else mat)
            conj = conj ^ cj
            names.append(key)
        if any(abs(w - o.z) < tol * max(1.0, abs(w)) for o in members):
            continue
        members.append(OrbitMember(w, "+".join(names) or "id", mat, conj))
    return members


# ---------------------------------------------------------------------------
# zero momentum


def zero_momentum_residual(ef: Eigenfunction) -> complex:
    """int conj(phi1) phi1' - int conj(phi2) phi2' for the normalised eigenfunction."""
    a, b = alpha_beta(ef.z)

    def integrand(x, s, c, phi):
        d1 = -1j * a * c * phi[0] + 1j * b * s * phi[1]
        d2 = 1j * b * s * phi[0] + 1j * a * c * phi[1]
        return np.conj(phi[0]) * d1 - np.conj(phi[1]) * d2

    return ef.integrate(integrand)


def zero_momentum_check(ef: Eigenfunction) -> float:
    return abs(zero_momentum_residual(ef))
