"""Independent checks that a constructed solution solves the equations.

Three routes, deliberately sharing no code path with the constructors:

* ``ode_identity_residual``: exact algebra, plugs the trial equation into the
  reduced envelope ODE at sample Gamma values;
* ``pde_residual``: central finite differences of the complex field
  substituted into the (1+2)-dimensional equation;
* ``ode_shoot_compare``: integrates the reduced ODE from the closed-form
  initial state and measures the drift from the closed form.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp

from .errors import AllPointsSingular, StiffnessFailure
from .families import SolutionDescriptor, evaluate_base, evaluate_base_mp, evaluate_field, evaluate_field_mp, singular_mask
from .params import DerivedCoefficients, ProblemParams

# stencil points whose family denominator is below this fraction of its scale
EXCLUSION_RTOL = 1e-6

_D1 = {
    2: ((-1, -0.5), (1, 0.5)),
    4: ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)),
}
_D2 = {
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    4: ((-2, -1 / 12), (-1, 16 / 12), (0, -30 / 12), (1, 16 / 12), (2, -1 / 12)),
}


def reduced_ode_terms(params: ProblemParams, chi3: float, m: float, v, vp2, vpp):
    """The five terms of the reduced envelope ODE for ``u = v**(1/(2m))``."""
    w = params.width_sq
    k = params.k
    return (
        (-2 * chi3 - params.freq_sq) * 4 * m * m * v * v,
        w * (1 - 2 * m) * vp2,
        w * 2 * m * v * vpp,
        8 * m * m * v**3,
        8 * k * m * m * v**4,
    )


def _poly_and_slope(c, g):
    """Horner values of sum c[i] g**i and of its derivative."""
    val = np.zeros_like(g)
    der = np.zeros_like(g)
    for a in reversed(c):
        der = der * g + val
        val = val * g + a
    return val, der


def ode_identity_residual(params: ProblemParams, derived: DerivedCoefficients, gamma_samples) -> float:
    """Max over samples of |sum of ODE terms| relative to a backward-error scale.

    Uses ``v = tau0 + tau1*G``, ``v'^2 = tau1^2 Lambda(G)`` and
    ``v'' = tau1 Lambda'(G)/2`` with ``Lambda = phi(G)/zeta0``.  The scale at
    each sample is the sum of the terms evaluated with every coefficient and
    ``G`` replaced by its absolute value, i.e. the size of the rounding error
    an exact identity can show.  It stays away from zero at the double root,
    where the terms themselves vanish.
    """
    g = np.asarray(gamma_samples, dtype=float)
    xi = (derived.xi0, params.xi1, derived.xi2, params.xi3, params.xi4)
    t0, t1, z = params.tau0, derived.tau1, derived.zeta0
    phi, dphi = _poly_and_slope(xi, g)
    terms = reduced_ode_terms(params, derived.chi3, params.m, t0 + t1 * g, t1 * t1 * phi / z, t1 * dphi / (2 * z))
    a = np.abs(g)
    phi_a, dphi_a = _poly_and_slope([abs(c) for c in xi], a)
    za = abs(z)
    bound = reduced_ode_terms(params, derived.chi3, params.m, abs(t0) + abs(t1) * a,
                              t1 * t1 * phi_a / za, abs(t1) * dphi_a / (2 * za))
    scale = sum(np.abs(b) for b in bound)
    num = np.abs(sum(terms))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0, num / np.where(scale > 0, scale, 1.0), 0.0)
    return float(np.max(rel, initial=0.0))


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    nx: int
    y_min: float
    y_max: float
    ny: int
    t_min: float
    t_max: float
    nt: int

    def axes(self):
        return (np.linspace(self.x_min, self.x_max, self.nx),
                np.linspace(self.y_min, self.y_max, self.ny),
                np.linspace(self.t_min, self.t_max, self.nt))

    def mesh(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    @classmethod
    def from_dict(cls, d: dict) -> "Grid":
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ResidualReport:
    sup_norm: float
    mean_abs: float
    n_points: int
    n_excluded: int
    step: float
    stencil_order: int
    converged_order: float

    def to_dict(self) -> dict:
        return asdict(self)


def _nonlinear(q, m, k):
    # |q|^2 is real and nonnegative, so a real power is safe
    mod2 = (q * np.conj(q)).real
    a = mod2**m
    return (a + k * a * a) * q


def _residual_field(desc, k, x, y, t, h, order):
    f = lambda dx, dy, dt: evaluate_field(desc, x + dx, y + dy, t + dt)
    q = f(0, 0, 0)
    qt = sum(w * f(0, 0, j * h) for j, w in _D1[order]) / h
    qxx = sum(w * f(j * h, 0, 0) for j, w in _D2[order]) / (h * h)
    qyy = sum(w * f(0, j * h, 0) for j, w in _D2[order]) / (h * h)
    return 1j * qt + 0.5 * (qxx + qyy) + _nonlinear(q, desc.m, k)


# the same stencils as exact integer ratios for the extended-precision path
_D1_MP = {o: tuple((j, Fraction(w).limit_denominator(12)) for j, w in st) for o, st in _D1.items()}
_D2_MP = {o: tuple((j, Fraction(w).limit_denominator(12)) for j, w in st) for o, st in _D2.items()}


def _residual_point_mp(desc, k, x, y, t, h, order):
    x, y, t, h = (mp.mpf(float(v)) for v in (x, y, t, h))
    f = lambda dx, dy, dt: evaluate_field_mp(desc, x + dx, y + dy, t + dt)
    frac = lambda w: mp.mpf(w.numerator) / w.denominator
    q = f(0, 0, 0)
    qt = mp.fsum(frac(w) * f(0, 0, j * h) for j, w in _D1_MP[order]) / h
    qxx = mp.fsum(frac(w) * f(j * h, 0, 0) for j, w in _D2_MP[order]) / (h * h)
    qyy = mp.fsum(frac(w) * f(0, j * h, 0) for j, w in _D2_MP[order]) / (h * h)
    amp = mp.power(abs(q), 2 * mp.mpf(desc.m))
    return abs(1j * qt + (qxx + qyy) / 2 + (amp + mp.mpf(k) * amp * amp) * q)


def _sup_norm_mp(desc, k, pts, h, order, dps):
    with mp.workdps(dps):
        return np.array([float(_residual_point_mp(desc, k, *p, h, order)) for p in zip(*pts)])


def _stencil_excluded(desc, x, y, t, h, order):
    reach = order // 2
    bad = np.zeros(np.shape(x), dtype=bool)
    offs = [(0, 0, 0)]
    for j in range(-reach, reach + 1):
        if j:
            offs += [(j * h, 0, 0), (0, j * h, 0), (0, 0, j * h)]
    for dx, dy, dt in offs:
        eta = desc.eta(x + dx, y + dy, t + dt)
        bad |= singular_mask(desc, eta, EXCLUSION_RTOL)
    return bad


def _sup_norm(desc, k, pts, h, order):
    x, y, t = pts
    with np.errstate(all="ignore"):
        r = np.abs(_residual_field(desc, k, x, y, t, h, order))
    return r


def pde_residual(desc: SolutionDescriptor, grid: Grid, step: float, stencil_order: int = 4,
                 dps: int | None = None) -> ResidualReport:
    """Finite-difference residual of ``i q_t + (q_xx + q_yy)/2 + (|q|^2m + k|q|^4m) q``.

    ``converged_order`` compares the sup-norm at ``step`` and ``step/2``.
    In double precision the cancellation error grows like ``eps/step**2``, so
    small steps stop showing the stencil order; ``dps`` evaluates the field
    and stencil with that many decimal digits instead (slow, point by point).
    """
    if stencil_order not in _D2:
        raise ValueError("stencil_order must be 2 or 4")
    k = desc.k
    x, y, t = (a.ravel() for a in grid.mesh())
    excl = _stencil_excluded(desc, x, y, t, step, stencil_order)
    excl |= _stencil_excluded(desc, x, y, t, step / 2, stencil_order)
    n_points = x.size
    keep = ~excl
    if not np.any(keep):
        raise AllPointsSingular(f"all {n_points} grid points are next to a singularity")
    pts = (x[keep], y[keep], t[keep])
    if dps is None:
        r = _sup_norm(desc, k, pts, step, stencil_order)
        r_half = _sup_norm(desc, k, pts, step / 2, stencil_order)
    else:
        r = _sup_norm_mp(desc, k, pts, step, stencil_order, int(dps))
        r_half = _sup_norm_mp(desc, k, pts, step / 2, stencil_order, int(dps))
    sup, sup_half = float(r.max()), float(r_half.max())
    if sup > 0 and sup_half > 0:
        order = math.log2(sup / sup_half)
    else:
        order = math.nan
    return ResidualReport(
        sup_norm=sup,
        mean_abs=float(r.mean()),
        n_points=int(n_points),
        n_excluded=int(excl.sum()),
        step=float(step),
        stencil_order=int(stencil_order),
        converged_order=order,
    )


def fitted_order(desc: SolutionDescriptor, grid: Grid, steps, stencil_order: int = 4):
    """Least-squares slope of log(sup-norm) against log(step); returns (slope, norms)."""
    norms = [pde_residual(desc, grid, h, stencil_order).sup_norm for h in steps]
    slope = np.polyfit(np.log(steps), np.log(norms), 1)[0]
    return float(slope), norms


def ode_shoot_compare(desc: SolutionDescriptor, eta_range, n_steps: int = 1000,
                      rtol: float = 1e-12, atol: float = 1e-14) -> float:
    """Integrate the reduced ODE for ``v`` from the closed-form state at the
    left end of ``eta_range`` and return max |v_numeric - v_closed| over
    ``n_steps + 1`` equally spaced points.
    """
    e0, e1 = map(float, eta_range)
    m, k = desc.m, desc.k
    w = desc.width_sq
    lin = (-2 * desc.phase[2] - desc.freq_sq) * 4 * m * m

    v0 = complex(evaluate_base(desc, e0))
    if desc.tau1 != 0:
        # tau1*sqrt(Lambda) loses half the digits near a turning point, where
        # Lambda has a simple zero; differentiate the closed form at 30 digits
        with mp.workdps(30):
            vp0 = complex(mp.diff(lambda e: evaluate_base_mp(desc, e), mp.mpf(e0)))
    else:
        vp0 = 0j
    is_real = abs(v0.imag) == 0 and abs(vp0.imag) <= 1e-15 * (1 + abs(vp0))

    def rhs(_, y):
        v, vp = y[0], y[1]
        acc = -(lin * v * v + w * (1 - 2 * m) * vp * vp + 8 * m * m * v**3 + 8 * k * m * m * v**4) / (2 * m * w * v)
        return [vp, acc]

    y0 = np.array([v0.real, vp0.real]) if is_real else np.array([v0, vp0])
    etas = np.linspace(e0, e1, n_steps + 1)
    sol = solve_ivp(rhs, (e0, e1), y0, method="RK45", t_eval=etas, rtol=rtol, atol=atol)
    if not sol.success:
        raise StiffnessFailure(sol.message)
    if sol.t.size > 1 and np.min(np.abs(np.diff(sol.t))) < 1e-12 and sol.t.size < etas.size:
        raise StiffnessFailure("step size collapsed below 1e-12")
    closed = evaluate_base(desc, sol.t, check=False)
    return float(np.max(np.abs(sol.y[0] - closed)))
