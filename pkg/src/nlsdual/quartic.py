"""Monic quartic in Gamma, its roots, and the multiplicity pattern that
selects the closed-form solution family."""

from __future__ import annotations

import cmath
import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousClustering
from .params import DerivedCoefficients, ProblemParams

DEFAULT_CLUSTER_TOL = 1e-6


@dataclass(frozen=True)
class QuarticPoly:
    """G^4 + c3 G^3 + c2 G^2 + c1 G + c0"""

    c3: float
    c2: float
    c1: float
    c0: float

    @property
    def coeffs(self) -> tuple[float, float, float, float, float]:
        """Highest degree first, leading 1 included."""
        return (1.0, self.c3, self.c2, self.c1, self.c0)

    @property
    def norm(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def __call__(self, z):
        return (((z + self.c3) * z + self.c2) * z + self.c1) * z + self.c0

    def derivative(self, z, order: int = 1):
        c = list(self.coeffs)
        for _ in range(order):
            n = len(c) - 1
            c = [a * (n - i) for i, a in enumerate(c[:-1])]
        acc = 0.0 * z
        for a in c:
            acc = acc * z + a
        return acc

    @classmethod
    def from_roots(cls, roots) -> "QuarticPoly":
        c = np.poly(np.asarray(roots))
        if np.iscomplexobj(c):
            c = c.real
        return cls(*(float(x) for x in c[1:]))


def build_quartic(params: ProblemParams, derived: DerivedCoefficients) -> QuarticPoly:
    x4 = params.xi4
    return QuarticPoly(params.xi3 / x4, derived.xi2 / x4, params.xi1 / x4, derived.xi0 / x4)


def _cubic_roots(a: complex, b: complex, c: complex) -> list[complex]:
    # t^3 + a t^2 + b t + c, Cardano on the depressed cubic
    p = b - a * a / 3
    q = 2 * a**3 / 27 - a * b / 3 + c
    disc = cmath.sqrt(q * q / 4 + p**3 / 27)
    u3 = -q / 2 + disc if abs(-q / 2 + disc) >= abs(-q / 2 - disc) else -q / 2 - disc
    if u3 == 0:
        return [-a / 3] * 3
    u = u3 ** (1 / 3)
    w = complex(-0.5, math.sqrt(3) / 2)
    out = []
    for j in range(3):
        uj = u * w**j
        out.append(uj - p / (3 * uj) - a / 3)
    return out


def _ferrari(q: QuarticPoly) -> list[complex]:
    a, b, c, d = q.c3, q.c2, q.c1, q.c0
    s = a / 4
    # depressed: y^4 + p y^2 + r1 y + r0 with G = y - a/4
    p = b - 6 * s * s
    r1 = c - 2 * b * s + 8 * s**3
    r0 = d - c * s + b * s * s - 3 * s**4
    scale = max(1.0, abs(p), abs(r1), abs(r0))
    if abs(r1) <= 1e-14 * scale:
        disc = cmath.sqrt(p * p - 4 * r0)
        ys = []
        for w in ((-p + disc) / 2, (-p - disc) / 2):
            rt = cmath.sqrt(w)
            ys += [rt, -rt]
    else:
        # resolvent: 8 m^3 + 8 p m^2 + (2 p^2 - 8 r0) m - r1^2 = 0
        ms = _cubic_roots(p, (p * p - 4 * r0) / 4, -r1 * r1 / 8)
        mm = max(ms, key=abs)
        s2m = cmath.sqrt(2 * mm)
        ys = []
        for sgn in (1, -1):
            inner = cmath.sqrt(-(2 * p + 2 * mm + sgn * 2 * r1 / s2m))
            ys += [(sgn * s2m + inner) / 2, (sgn * s2m - inner) / 2]
    return [y - s for y in ys]


def _polish(q: QuarticPoly, z: complex, iters: int = 30) -> complex:
    fz = q(z)
    for _ in range(iters):
        if fz == 0:
            break
        dz = q.derivative(z)
        if dz == 0:
            break
        znew = z - fz / dz
        fnew = q(znew)
        if not abs(fnew) < abs(fz):
            break
        z, fz = znew, fnew
    return z


def find_roots(q: QuarticPoly) -> list[complex]:
    """All four roots of ``q``, Newton-polished on the original polynomial."""
    return [_polish(q, complex(z)) for z in _ferrari(q)]


class Pattern(enum.Enum):
    QUADRUPLE = (4,)
    TRIPLE_SIMPLE = (3, 1)
    DOUBLE_DOUBLE = (2, 2)
    DOUBLE_TWO_SIMPLE = (2, 1, 1)
    FOUR_DISTINCT = (1, 1, 1, 1)
    UNSUPPORTED = ()

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return self.value


@dataclass(frozen=True)
class RootClassification:
    """Multiplicity pattern with its distinct real roots.

    ``roots`` follows the slot order of the matching family: the root of
    highest multiplicity first, equal multiplicities in descending order.
    """

    pattern: Pattern
    roots: tuple[float, ...]
    roots_raw: tuple[complex, ...] = ()
    cluster_tol: float = DEFAULT_CLUSTER_TOL
    description: str = ""

    @property
    def multiset(self) -> list[float]:
        out = []
        for r, mult in zip(self.roots, self.pattern.multiplicities):
            out += [r] * mult
        return out

    def reconstruct(self) -> QuarticPoly:
        return QuarticPoly.from_roots(self.multiset)


def _set_partitions(items):
    if len(items) == 1:
        yield [items]
        return
    first, rest = items[0], items[1:]
    for smaller in _set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]
        yield [[first]] + smaller


def _refine_cluster(q: QuarticPoly, c: complex, mult: int) -> complex:
    # a root of multiplicity k is a simple root of the (k-1)th derivative
    if mult == 1:
        return _polish(q, c)
    for _ in range(8):
        f = q.derivative(c, mult - 1)
        df = q.derivative(c, mult)
        if df == 0 or f == 0:
            break
        cn = c - f / df
        if abs(cn - c) > 0.5 * (1 + abs(c)):
            break
        c = cn
    return c


def classify_roots(roots, tol: float = DEFAULT_CLUSTER_TOL, poly: QuarticPoly | None = None) -> RootClassification:
    """Group the four roots into clusters and name the multiplicity pattern.

    A grouping is admissible when the quartic rebuilt from the cluster
    centres (with multiplicities) matches the original coefficients to
    relative accuracy ``tol``.  The admissible grouping with the fewest
    clusters wins; two different winners raise ``AmbiguousClustering``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    roots = [complex(r) for r in roots]
    if len(roots) != 4:
        raise ValueError("expected four roots")
    if poly is None:
        poly = QuarticPoly.from_roots(roots)
    target = np.array(poly.coeffs[1:])
    cscale = max(1.0, poly.norm)
    rscale = 1 + max(abs(r) for r in roots)

    best = None
    winners = []
    for part in _set_partitions(list(range(4))):
        centres = [_refine_cluster(poly, sum(roots[i] for i in g) / len(g), len(g)) for g in part]
        multiset = [c for c, g in zip(centres, part) for _ in g]
        rebuilt = np.poly(np.array(multiset))[1:]
        err = float(np.max(np.abs(rebuilt - target))) / cscale
        if err > tol:
            continue
        n = len(part)
        if best is None or n < best:
            best, winners = n, [(part, centres)]
        elif n == best:
            winners.append((part, centres))
    if not winners:
        # cannot happen for a consistent poly/roots pair; treat as distinct
        winners = [([[i] for i in range(4)], roots)]
    if len(winners) > 1:
        raise AmbiguousClustering(
            f"{len(winners)} groupings with {best} clusters fit within tol={tol}"
        )
    part, centres = winners[0]
    clusters = sorted(((len(g), c) for g, c in zip(part, centres)), key=lambda t: (-t[0], -t[1].real))
    raw = tuple(roots)
    if any(abs(c.imag) > tol * rscale for _, c in clusters):
        desc = ", ".join(f"{c.real:.6g}{c.imag:+.6g}j (x{n})" for n, c in clusters)
        return RootClassification(Pattern.UNSUPPORTED, (), raw, tol, f"complex roots: {desc}")
    mults = tuple(n for n, _ in clusters)
    pattern = next(p for p in Pattern if p.multiplicities == mults)
    return RootClassification(pattern, tuple(c.real for _, c in clusters), raw, tol)


def modulus_squared(a1: float, a2: float, a3: float, a4: float) -> float:
    """Elliptic parameter l**2 for four ordered roots."""
    return (a2 - a3) * (a1 - a4) / ((a1 - a3) * (a2 - a4))
