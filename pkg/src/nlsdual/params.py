"""Problem parameters and the closed-form trial-equation coefficients.

The envelope is written as ``u = v**(1/(2m))`` with ``v = tau0 + tau1*Gamma``
and ``Gamma'**2 = (xi4 G^4 + xi3 G^3 + xi2 G^2 + xi1 G + xi0) / zeta0``.
Given the free inputs ``(xi1, xi3, xi4, tau0)`` the remaining coefficients
are fixed by requiring the reduced envelope ODE to vanish identically in
``Gamma``.
"""

from __future__ import annotations

import cmath
import math
import numbers
from dataclasses import asdict, dataclass, fields

from .errors import InvalidParameters, NonRealAmplitude

# |value| must exceed NONZERO_RTOL * (1 + |scale|) to count as nonzero.
NONZERO_RTOL = 1e-12


@dataclass(frozen=True)
class ProblemParams:
    m: float
    k: float
    chi1: float
    chi2: float
    omega1: float
    omega2: float
    xi1: float
    xi3: float
    xi4: float
    tau0: float

    def __post_init__(self):
        for f in fields(self):
            val = getattr(self, f.name)
            if isinstance(val, bool) or not isinstance(val, numbers.Real):
                raise InvalidParameters([Violation(f.name, f"not a real number: {val!r}")])
            object.__setattr__(self, f.name, float(val))

    @property
    def upsilon(self) -> float:
        return 1 + 2 * self.m + 4 * self.k * (1 + self.m) * self.tau0

    @property
    def width_sq(self) -> float:
        """omega1**2 + omega2**2"""
        return self.omega1**2 + self.omega2**2

    @property
    def freq_sq(self) -> float:
        """chi1**2 + chi2**2"""
        return self.chi1**2 + self.chi2**2

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Violation:
    field: str
    message: str


@dataclass(frozen=True)
class DerivedCoefficients:
    xi0: float
    xi2: float
    zeta0: float
    tau1: float
    chi3: float
    omega3: float
    upsilon: float
    a_squared: float

    @property
    def a_const(self) -> complex:
        """Principal square root of ``zeta0/xi4``; purely imaginary when negative."""
        return cmath.sqrt(self.a_squared)

    @property
    def amplitude_is_real(self) -> bool:
        return self.a_squared > 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["a_const"] = self.a_const
        return d


def _nonzero(value: float, scale: float = 0.0) -> bool:
    return abs(value) > NONZERO_RTOL * (1 + abs(scale))


def validate(params: ProblemParams) -> list[Violation]:
    """Return every violated parameter invariant; an empty list means valid."""
    out = []
    for name, value in params.to_dict().items():
        if not math.isfinite(value):
            out.append(Violation(name, "must be finite"))
    if out:
        return out

    m = params.m
    for bad in (0.0, -1.0, -0.5):
        if not _nonzero(m - bad, bad):
            out.append(Violation("m", "m ∈ {0,−1,−1/2}"))
            break
    for name in ("k", "xi3", "xi4", "tau0"):
        if not _nonzero(getattr(params, name)):
            out.append(Violation(name, f"{name} = 0"))
    if not params.width_sq > NONZERO_RTOL:
        out.append(Violation("omega1,omega2", "omega1² + omega2² = 0"))
    if not _nonzero(params.upsilon, 1 + 2 * m):
        out.append(Violation("tau0", "Υ = 0"))
    return out


def balance_exponents(delta: int, epsilon: int) -> int:
    """Degree of the trial-equation numerator balancing the reduced ODE."""
    if delta < 0 or epsilon < 0:
        raise ValueError("delta and epsilon must be nonnegative")
    return 2 * delta + epsilon + 2


def derive_coefficients(params: ProblemParams, require_real_amplitude: bool = False) -> DerivedCoefficients:
    """Solve for ``xi0, xi2, zeta0, tau1, chi3`` and the traveling velocity.

    ``zeta0`` carries the sign demanded by the Γ⁴ balance of the reduced ODE,
    so ``a_squared = zeta0/xi4`` is negative whenever ``k(1+2m) > 0``.  Those
    parameters still produce real envelopes (the soliton and the bounded
    elliptic orbits); pass ``require_real_amplitude=True`` to reject them.
    """
    problems = validate(params)
    if problems:
        raise InvalidParameters(problems)

    m, k, t0 = params.m, params.k, params.tau0
    x1, x3, x4 = params.xi1, params.xi3, params.xi4
    mp1 = 1 + m
    m2p1 = 1 + 2 * m
    ups = m2p1 + 4 * k * mp1 * t0
    kq = k * mp1 * x3  # recurring k(1+m)xi3
    # common pieces: xi1 xi4^2 Y^3 and k^2 (1+m)^2 xi3^3 tau0
    lin = x1 * x4 * x4 * ups**3
    cub = kq * kq * x3 * t0

    tau1 = x4 * ups / kq
    zeta0 = -k * mp1 * mp1 * m2p1 * params.width_sq * x3 * x3 / (8 * m * m * x4 * ups * ups)
    xi2 = (lin + cub * t0 * (3 * m2p1 + 8 * k * mp1 * t0)) / (2 * kq * x4 * t0 * ups * ups)
    xi0 = -kq * t0 * (cub * t0 * (m2p1 + 2 * k * mp1 * t0) - lin) / (2 * x4**3 * ups**4)
    chi3 = -(lin + cub * (mp1 * m2p1 * params.freq_sq - t0 * (3 * m2p1 + 4 * k * mp1 * t0))) / (
        2 * k * kq * mp1 * mp1 * m2p1 * x3 * x3 * t0
    )
    omega3 = -(params.chi1 * params.omega1 + params.chi2 * params.omega2)
    a_squared = zeta0 / x4
    if require_real_amplitude and not a_squared > 0:
        raise NonRealAmplitude(f"zeta0/xi4 = {a_squared!r} is not positive")
    return DerivedCoefficients(
        xi0=xi0, xi2=xi2, zeta0=zeta0, tau1=tau1, chi3=chi3,
        omega3=omega3, upsilon=ups, a_squared=a_squared,
    )


def printed_amplitude_squared(params: ProblemParams) -> float:
    """The positive ``A**2`` obtained from the printed (sign-flipped) zeta0.

    Used only to reproduce published figures, never for verified solutions.
    """
    m, k = params.m, params.k
    ups = params.upsilon
    return (k * (1 + m) ** 2 * (1 + 2 * m) * params.width_sq * params.xi3**2
            / (8 * m * m * params.xi4**2 * ups * ups))
