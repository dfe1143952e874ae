"""Independent reference computations used only by the tests.

None of these share code with the package: Romberg and mpmath quadrature for
integrals, scipy.linalg.expm for piecewise-constant propagators, mpmath for
high-precision right-hand sides.
"""
from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy.linalg import expm

TAU1 = np.array([[-1j, 0], [0, 1j]])
TAU2 = np.array([[0, 1j], [1j, 0]])


def romberg(f, a: float, b: float, levels: int = 18) -> float:
    """Classical Romberg extrapolation of the trapezoid rule."""
    r = [[0.5 * (b - a) * (f(a) + f(b))]]
    n = 1
    for k in range(1, levels + 1):
        h = (b - a) / (2 * n)
        x = a + h * (2 * np.arange(n) + 1)
        row = [0.5 * r[-1][0] + h * float(np.sum(f(x)))]
        for j in range(1, k + 1):
            row.append(row[j - 1] + (row[j - 1] - r[-1][j - 1]) / (4**j - 1))
        r.append(row)
        n *= 2
    return r[-1][-1]


def mp_quad(f, a, b, dps: int = 30) -> float:
    with mp.workdps(dps):
        return float(mp.quad(f, [a, b]))


def rhs_mp(u: float, z: complex, v, dps: int = 40):
    """A(z, u) v from the defining formula, in extended precision."""
    with mp.workdps(dps):
        zz = mp.mpc(z)
        a = (zz - 1 / zz) / 4
        b = (zz + 1 / zz) / 4
        s, c = mp.sin(mp.mpf(u) / 2), mp.cos(mp.mpf(u) / 2)
        v1, v2 = mp.mpc(v[0]), mp.mpc(v[1])
        d1 = -1j * a * c * v1 + 1j * b * s * v2
        d2 = 1j * b * s * v1 + 1j * a * c * v2
        return np.array([complex(d1), complex(d2)])


def segment_propagator(z: complex, edges, values) -> np.ndarray:
    """Product of exp(A_k L_k) over the segments of a piecewise-constant u."""
    a, b = 0.25 * (z - 1 / z), 0.25 * (z + 1 / z)
    m = np.eye(2, dtype=complex)
    for x0, x1, u in zip(edges[:-1], edges[1:], values):
        A = a * math.cos(u / 2) * TAU1 + b * math.sin(u / 2) * TAU2
        m = expm(A * (x1 - x0)) @ m
    return m
