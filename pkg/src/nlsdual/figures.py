"""Figure-data reproduction from the published caption constants.

The captions fix ``tau1`` and the roots directly instead of deriving them
from the trial-equation coefficients, so the fields produced here do not
solve the PDE in general.  They are evaluated with the formulas exactly as
they were published (including the published ``A**2 > 0``) and are kept
apart from the verified families in :mod:`nlsdual.families`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .params import ProblemParams, printed_amplitude_squared
from .special import jacobi_sn
from .verify import Grid

SLICE_T = 1.0
# points whose denominator falls below this (relative) are written as nan
FIGURE_SINGULAR_RTOL = 1e-13

# x, y in [-5, 5] with the three time levels 0.5, 1, 1.5 (t = 1 lies on the grid)
DEFAULT_FIGURE_GRID = Grid(-5.0, 5.0, 40, -5.0, 5.0, 40, 0.5, 1.5, 3)

_BASE = dict(m=1.0, k=1.0, tau0=1.0, tau1=1.0, xi3=1.0, xi4=1.0,
             omega1=-1.0, omega2=1.0, omega3=2.0, chi1=1.0, chi2=2.0, chi3=3.0)
_COTH = dict(_BASE, alpha1=2.0, alpha2=1.0)
_SECH = dict(_BASE, alpha1=1.0, alpha2=2.0, alpha3=3.0)
_SN = dict(_BASE, alpha1=1.0, alpha2=2.0, alpha3=3.0, alpha4=4.0)


@dataclass(frozen=True)
class FigureSpec:
    figure_id: int
    family: str  # "coth", "sech" or "sn"
    part: str  # which part the published plot shows: "imag" or "real"
    constants: dict


FIGURES = {
    1: FigureSpec(1, "coth", "imag", _COTH),
    2: FigureSpec(2, "coth", "real", _COTH),
    3: FigureSpec(3, "sech", "imag", _SECH),
    4: FigureSpec(4, "sech", "real", _SECH),
    5: FigureSpec(5, "sn", "imag", _SN),
    6: FigureSpec(6, "sn", "real", _SN),
}


def figure_spec(figure_id: int) -> FigureSpec:
    try:
        return FIGURES[int(figure_id)]
    except (KeyError, TypeError, ValueError):
        raise ConfigError(f"figure_id must be one of 1..6, got {figure_id!r}") from None


def caption_amplitude(c: dict) -> float:
    """Published ``A`` for the caption's (m, k, tau0, xi3, xi4, omega1, omega2)."""
    p = ProblemParams(m=c["m"], k=c["k"], chi1=c["chi1"], chi2=c["chi2"],
                      omega1=c["omega1"], omega2=c["omega2"], xi1=0.0,
                      xi3=c["xi3"], xi4=c["xi4"], tau0=c["tau0"])
    return math.sqrt(printed_amplitude_squared(p))


def _cpow(z, expo):
    return np.power(np.asarray(z, dtype=complex), expo)


def _envelope(spec: FigureSpec, eta, sign: int):
    """(u, |denominator|, scale) for the published reduced forms."""
    c = spec.constants
    a = caption_amplitude(c)
    expo = 1 / (2 * c["m"])
    t1 = c["tau1"]
    if spec.family == "coth":
        a1, a2 = c["alpha1"], c["alpha2"]
        z = (a1 - a2) / a * eta
        sh = np.sinh(z)
        base = (a2 - a1) * t1 / 2 * (1 + sign * np.cosh(z) / sh)
        return _cpow(base, expo), np.abs(sh), np.maximum(np.cosh(z), 1.0)
    if spec.family == "sech":
        a1, a2, a3 = c["alpha1"], c["alpha2"], c["alpha3"]
        amp = _cpow(2 * t1 * (a1 - a2) * (a1 - a3) / (a3 - a2), expo)
        b = np.sqrt(complex((a1 - a2) * (a1 - a3))) / a
        d = (2 * a1 - a2 - a3) / (a3 - a2)
        ch = np.cosh(b * eta)
        ch = ch.real if b.imag == 0 else ch
        den = d + ch
        return amp / _cpow(den, expo), np.abs(den), abs(d) + np.abs(ch)
    a1, a2, a3, a4 = c["alpha1"], c["alpha2"], c["alpha3"], c["alpha4"]
    amp = _cpow(2 * t1 * (a1 - a2) * (a1 - a3), expo)
    mm, nn = a4 - a2, a1 - a4
    l2 = (a2 - a3) * (a1 - a4) / ((a1 - a3) * (a2 - a4))
    if not 0.0 <= l2 <= 1.0:
        raise ConfigError(f"caption roots give modulus squared {l2!r} outside [0, 1]")
    phi = sign * math.sqrt((a1 - a3) * (a2 - a4)) / (2 * a) * eta
    sn = jacobi_sn(phi, math.sqrt(l2))
    den = mm + nn * sn * sn
    return amp / _cpow(den, expo), np.abs(den), abs(mm) + abs(nn) * sn * sn


def figure_field(figure_id: int, x, y, t, sign: int = 1):
    """Complex field at caption constants; nan where the published form has a pole."""
    spec = figure_spec(figure_id)
    c = spec.constants
    x, y, t = (np.asarray(v, dtype=float) for v in (x, y, t))
    eta = c["omega1"] * x + c["omega2"] * y + c["omega3"] * t
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        u, den, scale = _envelope(spec, eta, sign)
        q = np.exp(1j * (c["chi1"] * x + c["chi2"] * y + c["chi3"] * t)) * u
    bad = ~(den >= FIGURE_SINGULAR_RTOL * scale)
    return np.where(bad, complex(np.nan, np.nan), q)


def figure_data(figure_id: int, grid: Grid | None = None, sign: int = 1):
    """Surface on the full grid and the plane at ``t = 1`` taken from it.

    Returns ``(axes, q, q_slice)`` with ``q`` indexed ``[ix, iy, it]``.
    """
    grid = DEFAULT_FIGURE_GRID if grid is None else grid
    xs, ys, ts = grid.axes()
    hits = np.flatnonzero(ts == SLICE_T)
    if hits.size == 0:
        raise ConfigError("figure grid must contain t = 1 exactly")
    X, Y, T = np.meshgrid(xs, ys, ts, indexing="ij")
    q = figure_field(figure_id, X, Y, T, sign=sign)
    return (xs, ys, ts), q, q[:, :, hits[0]]
