"""Closed-form envelope families and the complex field built from them.

Every family is evaluated through ``Gamma(eta)``, the solution of
``Gamma'**2 = prod(Gamma - alpha_i) / A**2``, and then
``v = tau0 + tau1*Gamma`` and ``u = v**(1/(2m))`` (principal branch).
``A**2`` may be negative; the hyperbolic and elliptic forms then switch to
their trigonometric / complementary-modulus counterparts, which keeps the
arithmetic real.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace

import mpmath as mp
import numpy as np

from .errors import NotDegenerate, SingularPoint, UnsupportedPattern, NonRealAmplitude
from .params import DerivedCoefficients, ProblemParams
from .quartic import DEFAULT_CLUSTER_TOL, Pattern, RootClassification, modulus_squared
from .special import complementary, ellip_k, jacobi_sncndn

# evaluate_profile refuses points with |denominator| below this times its scale
SINGULAR_RTOL = 1e-13


class Family(enum.Enum):
    Q1 = "rational-pole"
    Q2 = "rational"
    Q3 = "coth"
    Q4 = "soliton"
    Q5 = "elliptic"
    Q6 = "tanh-limit"
    Q7 = "periodic-limit"


_FAMILY_OF = {
    Pattern.QUADRUPLE: Family.Q1,
    Pattern.TRIPLE_SIMPLE: Family.Q2,
    Pattern.DOUBLE_DOUBLE: Family.Q3,
    Pattern.DOUBLE_TWO_SIMPLE: Family.Q4,
    Pattern.FOUR_DISTINCT: Family.Q5,
}


@dataclass(frozen=True)
class SolutionDescriptor:
    family: Family
    roots: tuple[float, ...]
    quartic_roots: tuple[float, float, float, float]
    a_squared: float
    tau0: float
    tau1: float
    eta0: float
    m: float
    k: float
    phase: tuple[float, float, float]
    wave: tuple[float, float, float]
    branch_sign: int = 1
    reduced: bool = False
    modulus: float | None = None
    constants: dict = field(default_factory=dict, compare=False)
    cluster_tol: float = DEFAULT_CLUSTER_TOL

    @property
    def exponent(self) -> float:
        return 1 / (2 * self.m)

    @property
    def a_const(self) -> complex:
        return cmath.sqrt(self.a_squared)

    def eta(self, x, y, t):
        w1, w2, w3 = self.wave
        return w1 * np.asarray(x) + w2 * np.asarray(y) + w3 * np.asarray(t)

    @property
    def width_sq(self) -> float:
        return self.wave[0] ** 2 + self.wave[1] ** 2

    @property
    def freq_sq(self) -> float:
        return self.phase[0] ** 2 + self.phase[1] ** 2

    def lam(self, gamma):
        """Right side of the trial equation, Gamma'**2 as a function of Gamma."""
        out = 1.0
        for r in self.quartic_roots:
            out = out * (gamma - r)
        return out / self.a_squared


def _sqrt_signed(x: float):
    """(sqrt(|x|), x >= 0)"""
    return math.sqrt(abs(x)), x >= 0


# --- per-family Gamma = ref + delta, with the denominator that can vanish ---

def _parts_q1(d, et):
    a1 = d.roots[0]
    return a1, d.branch_sign * d.a_const / et, et, np.full(np.shape(et), max(1.0, abs(d.a_const)))


def _parts_q2(d, et):
    a1, a2 = d.roots
    a2x4 = 4 * d.a_squared
    den = a2x4 - ((a1 - a2) * et) ** 2
    return a1, a2x4 * (a2 - a1) / den, den, abs(a2x4) + ((a1 - a2) * et) ** 2


def _parts_q3(d, et):
    a1, a2 = d.roots
    z = (a1 - a2) * np.asarray(et, dtype=complex) / (2 * d.a_const)
    sh, ch = np.sinh(z), np.cosh(z)
    delta = d.branch_sign * (a2 - a1) / 2 * ch / sh
    if d.a_squared > 0:
        delta = delta.real
    return (a1 + a2) / 2, delta, sh, np.maximum(np.abs(ch), 1.0)


def _parts_q4(d, et):
    a1, a2, a3 = d.roots
    prod = (a1 - a2) * (a1 - a3)
    rate, hyperbolic = _sqrt_signed(prod / d.a_squared)
    ch = np.cosh(rate * et) if hyperbolic else np.cos(rate * et)
    s0, dd = 2 * a1 - a2 - a3, a3 - a2
    den = s0 + dd * ch
    return a1, -2 * prod / den, den, abs(s0) + abs(dd) * np.abs(ch)


def _parts_elliptic(d, et):
    a1, a2, a3, a4 = d.roots
    l = d.modulus
    rate, real_arg = _sqrt_signed((a1 - a3) * (a2 - a4) / (4 * d.a_squared))
    if real_arg:
        sn = jacobi_sncndn(rate * np.asarray(et, dtype=float), l)[0]
        p, q = sn * sn, np.ones_like(sn)
    else:
        # sn(i y, l)**2 = -sn(y, l')**2 / cn(y, l')**2
        sn, cn, _ = jacobi_sncndn(rate * np.asarray(et, dtype=float), complementary(l))
        p, q = -sn * sn, cn * cn
    mm, nn = a4 - a2, a1 - a4
    den = mm * q + nn * p
    return a2, -(a1 - a2) * (a2 - a4) * q / den, den, abs(mm) * np.abs(q) + abs(nn) * np.abs(p)


_PARTS = {
    Family.Q1: _parts_q1,
    Family.Q2: _parts_q2,
    Family.Q3: _parts_q3,
    Family.Q4: _parts_q4,
    Family.Q5: _parts_elliptic,
    Family.Q6: _parts_elliptic,
    Family.Q7: _parts_elliptic,
}


def _parts(desc, eta):
    et = np.asarray(eta, dtype=float) - desc.eta0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return _PARTS[desc.family](desc, et)


def denominator(desc: SolutionDescriptor, eta):
    """(|denominator|, scale) of the family at ``eta``; poles where the ratio vanishes."""
    _, _, den, scale = _parts(desc, eta)
    return np.abs(den), np.asarray(scale, dtype=float)


def singular_mask(desc: SolutionDescriptor, eta, rtol: float = SINGULAR_RTOL):
    den, scale = denominator(desc, eta)
    return ~(den >= rtol * scale)


def gamma_of_eta(desc: SolutionDescriptor, eta):
    ref, delta, _, _ = _parts(desc, eta)
    return ref + delta


def evaluate_base(desc: SolutionDescriptor, eta, check: bool = True):
    """``v = tau0 + tau1*Gamma`` before the fractional power."""
    ref, delta, den, scale = _parts(desc, eta)
    if check:
        bad = ~(np.abs(den) >= SINGULAR_RTOL * np.asarray(scale))
        if np.any(bad):
            where = np.asarray(eta, dtype=float)
            loc = float(where[bad][0]) if where.ndim else float(where)
            raise SingularPoint(loc, f"{desc.family.name} denominator vanishes at eta={loc!r}")
    return (desc.tau0 + desc.tau1 * ref) + desc.tau1 * delta


def evaluate_profile(desc: SolutionDescriptor, eta):
    """Complex envelope ``u(eta) = v**(1/(2m))`` on the principal branch."""
    v = evaluate_base(desc, eta)
    u = np.power(np.asarray(v, dtype=complex), desc.exponent)
    return u[()] if np.ndim(u) == 0 else u


def evaluate_field(desc: SolutionDescriptor, x, y, t):
    """``q = exp(i(chi1 x + chi2 y + chi3 t)) * u(omega1 x + omega2 y + omega3 t)``"""
    c1, c2, c3 = desc.phase
    x, y, t = np.asarray(x, dtype=float), np.asarray(y, dtype=float), np.asarray(t, dtype=float)
    u = evaluate_profile(desc, desc.eta(x, y, t))
    return np.exp(1j * (c1 * x + c2 * y + c3 * t)) * u


def _gamma_mp(desc, et):
    r = [mp.mpf(x) for x in desc.roots]
    a_sq = mp.mpf(desc.a_squared)
    a = mp.sqrt(mp.mpc(a_sq))
    fam, sgn = desc.family, desc.branch_sign
    if fam is Family.Q1:
        return r[0] + sgn * a / et
    if fam is Family.Q2:
        return r[0] + 4 * a_sq * (r[1] - r[0]) / (4 * a_sq - ((r[0] - r[1]) * et) ** 2)
    if fam is Family.Q3:
        return (r[0] + r[1]) / 2 + sgn * (r[1] - r[0]) / 2 * mp.coth((r[0] - r[1]) * et / (2 * a))
    if fam is Family.Q4:
        prod = (r[0] - r[1]) * (r[0] - r[2])
        ch = mp.cosh(mp.sqrt(mp.mpc(prod / a_sq)) * et)
        return r[0] - 2 * prod / (2 * r[0] - r[1] - r[2] + (r[2] - r[1]) * ch)
    a1, a2, a3, a4 = r
    phi = mp.sqrt(mp.mpc((a1 - a3) * (a2 - a4) / (4 * a_sq))) * et
    sn = mp.ellipfun("sn", phi, m=mp.mpf(desc.modulus) ** 2)
    return a2 - (a1 - a2) * (a2 - a4) / ((a4 - a2) + (a1 - a4) * sn * sn)


def evaluate_base_mp(desc: SolutionDescriptor, eta):
    """``v`` at the current mpmath precision, float constants taken as exact."""
    et = eta - mp.mpf(desc.eta0)
    return mp.mpf(desc.tau0) + mp.mpf(desc.tau1) * _gamma_mp(desc, et)


def evaluate_field_mp(desc: SolutionDescriptor, x, y, t):
    """Scalar ``q`` at the current mpmath precision (same closed forms as
    :func:`evaluate_field`).  Coordinates should be mpmath numbers.
    """
    w1, w2, w3 = (mp.mpf(v) for v in desc.wave)
    c1, c2, c3 = (mp.mpf(v) for v in desc.phase)
    v = evaluate_base_mp(desc, w1 * x + w2 * y + w3 * t)
    return mp.expj(c1 * x + c2 * y + c3 * t) * mp.power(mp.mpc(v), 1 / (2 * mp.mpf(desc.m)))


# --- constants ---------------------------------------------------------------

def _root(z: float, exponent: float) -> complex:
    return complex(np.power(complex(z), exponent))


def _constants(family, roots, a_sq, tau1, m):
    expo = 1 / (2 * m)
    a = cmath.sqrt(a_sq)
    out = {"A": a}
    if family is Family.Q1:
        out["A1"] = tau1 * a
    elif family is Family.Q4:
        a1, a2, a3 = roots
        prod = (a1 - a2) * (a1 - a3)
        out["A2"] = _root(2 * tau1 * prod / (a2 - a3), expo)
        out["B"] = cmath.sqrt(prod / a_sq)
        out["D"] = (2 * a1 - a2 - a3) / (a3 - a2)
    elif family in (Family.Q5, Family.Q6, Family.Q7):
        a1, a2, a3, a4 = roots
        out["A3"] = _root(-tau1 * (a1 - a2) * (a2 - a4), expo)
        out["M"] = a4 - a2
        out["N"] = a1 - a4
    return out


# --- orbit choice for Q4 / Q5 -------------------------------------------------

def _q4_candidates(a1, s_hi, s_lo):
    return [(a1, s_hi, s_lo), (a1, s_lo, s_hi)]


def _q4_orbit(roots, a_sq):
    a1, a2, a3 = roots
    if (a1 - a2) * (a1 - a3) / a_sq > 0:
        return True, (a3, a1)
    # cosine form: Gamma runs between a3 and a2, finite iff a1 lies outside
    bounded = not (min(a2, a3) <= a1 <= max(a2, a3))
    return bounded, (a3, a2)


def _q5_candidates(r):
    a1, a2, a3, a4 = r
    return [(a1, a2, a3, a4), (a3, a4, a1, a2), (a2, a3, a4, a1), (a4, a1, a2, a3)]


def _q5_orbit(roots, a_sq):
    a1, a2, a3, a4 = roots
    l2 = modulus_squared(*roots)
    if not 0 <= l2 <= 1:
        return False, (a1, a2)
    mm, nn = a4 - a2, a1 - a4
    if (a1 - a3) * (a2 - a4) / a_sq >= 0:
        # M + N sn^2 on sn^2 in [0, 1]
        return mm * (mm + nn) > 0, (a1, a4)
    # M cn^2 - N sn^2 with cn^2 + sn^2 = 1
    return mm * (-nn) > 0, (a1, a2)


def _pick(cands, orbit_fn, a_sq, tau0_of, tau1):
    fallback = None
    for roots in cands:
        bounded, ends = orbit_fn(roots, a_sq)
        if not bounded:
            continue
        if fallback is None:
            fallback = roots
        t0 = tau0_of(roots)
        vals = [t0 + tau1 * g for g in ends]
        if min(vals) >= -1e-12 * max(1.0, max(abs(v) for v in vals)):
            return roots
    return fallback or cands[0]


def construct_solution(
    cls: RootClassification,
    params: ProblemParams,
    derived: DerivedCoefficients,
    reduced: bool = False,
    eta0: float = 0.0,
    branch_sign: int = 1,
    orbit: str = "auto",
    real_only: bool = False,
) -> SolutionDescriptor:
    """Build the family selected by the root pattern.

    ``reduced`` pins ``tau0`` to ``-tau1*alpha_1`` (``-tau1*alpha_2`` for the
    elliptic family) and ``eta0`` to 0.  ``orbit="auto"`` orders the simple
    roots of the soliton family, and labels the four roots of the elliptic
    family, so that the orbit is bounded and ``v`` stays nonnegative when
    such a choice exists; ``"descending"`` keeps the classification order.
    With ``real_only`` a negative radicand under an even root raises
    ``NonRealAmplitude`` instead of returning a complex amplitude.
    """
    if cls.pattern is Pattern.UNSUPPORTED:
        raise UnsupportedPattern(cls.description or "complex roots")
    if branch_sign not in (1, -1):
        raise ValueError("branch_sign must be +1 or -1")
    if orbit not in ("auto", "descending"):
        raise ValueError("orbit must be 'auto' or 'descending'")
    family = _FAMILY_OF[cls.pattern]
    tau1 = derived.tau1
    a_sq = derived.a_squared
    roots = tuple(float(r) for r in cls.roots)
    slot = 1 if family is Family.Q5 else 0

    def tau0_of(rs):
        return -tau1 * rs[slot] if reduced else params.tau0

    if orbit == "auto" and family is Family.Q4:
        roots = _pick(_q4_candidates(*roots), _q4_orbit, a_sq, tau0_of, tau1)
    elif orbit == "auto" and family is Family.Q5:
        roots = _pick(_q5_candidates(roots), _q5_orbit, a_sq, tau0_of, tau1)

    modulus = None
    if family is Family.Q5:
        modulus = math.sqrt(min(1.0, max(0.0, modulus_squared(*roots))))
    consts = _constants(family, roots, a_sq, tau1, params.m)
    desc = SolutionDescriptor(
        family=family,
        roots=roots,
        quartic_roots=tuple(cls.multiset),
        a_squared=a_sq,
        tau0=tau0_of(roots),
        tau1=tau1,
        eta0=0.0 if reduced else float(eta0),
        m=params.m,
        k=params.k,
        phase=(params.chi1, params.chi2, derived.chi3),
        wave=(params.omega1, params.omega2, derived.omega3),
        branch_sign=branch_sign,
        reduced=reduced,
        modulus=modulus,
        constants=consts,
        cluster_tol=cls.cluster_tol,
    )
    if real_only:
        _require_real(desc)
    return desc


def _require_real(desc):
    c = desc.constants
    if desc.family is Family.Q4:
        a1, a2, a3 = desc.roots
        base = 2 * desc.tau1 * (a1 - a2) * (a1 - a3) / (a2 - a3)
    elif desc.family in (Family.Q5, Family.Q6, Family.Q7):
        a1, a2, a3, a4 = desc.roots
        base = -desc.tau1 * (a1 - a2) * (a2 - a4)
    else:
        base = None
    if base is not None and base < 0:
        raise NonRealAmplitude(f"negative radicand {base!r} under the 1/(2m) root")
    if abs(c["A"].imag) > 0 and desc.family in (Family.Q1, Family.Q3):
        raise NonRealAmplitude("A is imaginary for this family")


def degenerate_limits(desc: SolutionDescriptor) -> SolutionDescriptor:
    """Collapse an elliptic descriptor with coincident roots to its limit.

    ``alpha3 == alpha4`` gives the tanh**2 family (modulus 1), ``alpha2 ==
    alpha3`` the sin**2 family (modulus 0).  Constants are carried over.
    """
    if desc.family is not Family.Q5:
        raise NotDegenerate(f"expected an elliptic descriptor, got {desc.family.name}")
    a1, a2, a3, a4 = desc.roots
    tol = desc.cluster_tol * (1 + max(abs(r) for r in desc.roots))
    if abs(a3 - a4) <= tol:
        return replace(desc, family=Family.Q6, modulus=1.0)
    if abs(a2 - a3) <= tol:
        return replace(desc, family=Family.Q7, modulus=0.0)
    raise NotDegenerate("no coincident roots among alpha2, alpha3, alpha4")


def profile_period(desc: SolutionDescriptor) -> float:
    """Period in eta of the periodic families (inf for the others)."""
    if desc.family is Family.Q4:
        a1, a2, a3 = desc.roots
        val = (a1 - a2) * (a1 - a3) / desc.a_squared
        return math.inf if val > 0 else 2 * math.pi / math.sqrt(-val)
    if desc.family in (Family.Q5, Family.Q6, Family.Q7):
        a1, a2, a3, a4 = desc.roots
        rate, real_arg = _sqrt_signed((a1 - a3) * (a2 - a4) / (4 * desc.a_squared))
        l = desc.modulus if real_arg else complementary(desc.modulus)
        kk = ellip_k(l)
        return 2 * kk / rate if math.isfinite(kk) else math.inf
    return math.inf
