"""Real elliptic special functions: Carlson RF, incomplete F(phi, l) and the
Jacobi triple sn, cn, dn.  The second argument is always the modulus ``l``
(not the parameter ``l**2``).  All functions accept numpy arrays in the
first argument(s) and a scalar modulus.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

_EPS = np.finfo(float).eps
# Carlson's stopping rule for relative error ~ eps
_RF_QFACTOR = (3 * _EPS) ** (-1 / 6)
# below this distance from 1 the modulus is treated as exactly 1
NEAR_ONE = 1e-12


def carlson_rf(x, y, z):
    """Symmetric elliptic integral R_F(x, y, z) by duplication.

    At most one argument may be zero; negative arguments are rejected.
    """
    x, y, z = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, y, z)))
    if np.any((x < 0) | (y < 0) | (z < 0)) or np.any(np.isnan(x + y + z)):
        raise DomainError("carlson_rf arguments must be nonnegative")
    zeros = (x == 0).astype(int) + (y == 0) + (z == 0)
    if np.any(zeros > 1):
        raise DomainError("carlson_rf: at most one argument may be zero")

    x0, y0 = x, y
    x, y, z = x.copy(), y.copy(), z.copy()
    a0 = (x + y + z) / 3
    a = a0.copy()
    q = _RF_QFACTOR * np.maximum.reduce([np.abs(a0 - x), np.abs(a0 - y), np.abs(a0 - z)])
    scale = np.ones_like(a)
    for _ in range(100):
        active = q * scale > np.abs(a)
        if not np.any(active):
            break
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x = np.where(active, (x + lam) / 4, x)
        y = np.where(active, (y + lam) / 4, y)
        z = np.where(active, (z + lam) / 4, z)
        a = np.where(active, (a + lam) / 4, a)
        scale = np.where(active, scale / 4, scale)
    dx = (a0 - x0) * scale / a
    dy = (a0 - y0) * scale / a
    dz = -(dx + dy)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    series = (1 - e2 / 10 + e3 / 14 + e2 * e2 / 24 - 3 * e2 * e3 / 44
              - 5 * e2**3 / 208 + 3 * e3 * e3 / 104 + e2 * e2 * e3 / 16)
    out = series / np.sqrt(a)
    return out[()] if out.ndim == 0 else out


def _check_modulus(l: float) -> float:
    l = float(l)
    if not 0 <= l <= 1:
        raise DomainError(f"modulus must lie in [0, 1], got {l!r}")
    return l


def complementary(l: float) -> float:
    return math.sqrt((1 - l) * (1 + l))


def ellip_k(l: float) -> float:
    """Complete integral K(l); infinite at l = 1."""
    l = _check_modulus(l)
    if l == 1:
        return math.inf
    return float(carlson_rf(0.0, (1 - l) * (1 + l), 1.0))


def ellip_f(phi, l: float):
    """Incomplete elliptic integral of the first kind F(phi, l), odd in phi."""
    l = _check_modulus(l)
    phi = np.asarray(phi, dtype=float)
    n = np.round(phi / np.pi)
    red = phi - n * np.pi
    s = np.sin(red)
    c2 = np.cos(red) ** 2
    w = (1 - l * s) * (1 + l * s)
    out = np.empty_like(phi)
    pole = (c2 == 0) & (w == 0)
    ok = ~pole
    out[ok] = s[ok] * carlson_rf(c2[ok], w[ok], 1.0)
    out[pole] = np.copysign(np.inf, s[pole])
    if np.any(n != 0):
        kk = ellip_k(l)
        shift = np.where(n != 0, 2 * n * kk, 0.0)
        out = out + shift
    return out[()] if out.ndim == 0 else out


def _agm_table(l: float):
    a, b, c = 1.0, complementary(l), l
    table = [(a, c)]
    for _ in range(60):
        if abs(c) <= _EPS * a:
            break
        a, b, c = (a + b) / 2, math.sqrt(a * b), (a - b) / 2
        table.append((a, c))
    return table


def jacobi_sncndn(u, l: float):
    """Jacobi elliptic functions (sn, cn, dn) for real ``u`` and modulus ``l``.

    Descending Landen / AGM recursion after reducing ``u`` modulo 2K.
    """
    l = _check_modulus(l)
    u = np.asarray(u, dtype=float)
    if l == 0:
        sn, cn, dn = np.sin(u), np.cos(u), np.ones_like(u)
    elif 1 - l < NEAR_ONE:
        sn = np.tanh(u)
        cn = 1 / np.cosh(u)
        dn = cn.copy()
    else:
        table = _agm_table(l)
        n_lev = len(table) - 1
        a_n = table[-1][0]
        half_period = math.pi / a_n  # 2K
        turns = np.round(u / half_period)
        ur = u - turns * half_period
        phi = (2.0**n_lev) * a_n * ur
        for a, c in reversed(table[1:]):
            phi = (phi + np.arcsin(c / a * np.sin(phi))) / 2
        sign = 1 - 2 * (np.abs(turns) % 2)
        sn = sign * np.sin(phi)
        cn = sign * np.cos(phi)
        # dn > 0 for real u; the sum of squares avoids cancellation near sn = +-1
        dn = np.sqrt(complementary(l) ** 2 + (l * cn) ** 2)
    if u.ndim == 0:
        return float(sn), float(cn), float(dn)
    return sn, cn, dn


def jacobi_sn(u, l: float):
    return jacobi_sncndn(u, l)[0]


def jacobi_am(u, l: float):
    """Amplitude am(u, l), continuous in u (used by the inversion checks)."""
    sn, cn, _ = jacobi_sncndn(u, l)
    l = _check_modulus(l)
    u = np.asarray(u, dtype=float)
    base = np.arctan2(sn, cn)
    if 1 - l < NEAR_ONE:
        return base
    period = 4 * ellip_k(l)
    turns = np.floor((u + period / 2) / period)
    return base + 2 * np.pi * turns
