"""Truncated power families and their dyadic approximation ladder.

``psi_v(u) = (u - v)_+**(q-1)`` (a Heaviside step for ``q = 1``, a hinge for
``q = 2``). The ladder ``V_k`` of piecewise polynomials of degree ``< q`` on
the level-``k`` dyadic cells has dimension ``q 2**k`` and satisfies

    dist(psi_v, V_k)**2 <= gamma**2 * 2**(-2k/W),
    gamma = 1/sqrt(2q - 1),  W = 2/(2q - 1),

i.e. ``dist**2 <= 2**(-(2q-1)k) / (2q-1)``. The right-hand side is rational,
so the certificate is checked with exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence

from .covering import CoveringReport, greedy_cover
from .errors import CapacityError, DomainError
from .exactpoly import DyadicPiecewisePoly, as_fraction, is_dyadic, poly_shifted_power
from .mrabasis import OrthonormalDictionary, analyze, build_dictionary


def truncated_power(q: int, v) -> DyadicPiecewisePoly:
    """``u -> (u - v)_+**(q-1)`` with ``u_+**0 = 1{u >= 0}``.

    For ``q = 1, v = 1`` the step sits on the single point ``u = 1`` and the
    returned function is the zero element of ``L2``.
    """
    if q < 1:
        raise DomainError("q must be >= 1")
    v = as_fraction(v)
    if not 0 <= v <= 1:
        raise DomainError(f"v = {v} outside [0, 1]")
    if not is_dyadic(v):
        raise DomainError(f"v = {v} is not dyadic")
    poly = poly_shifted_power(v, q - 1)
    if v == 0:
        return DyadicPiecewisePoly((0, 1), (poly,))
    if v == 1:
        return DyadicPiecewisePoly.zero()
    return DyadicPiecewisePoly((0, v, 1), ((), poly))


@dataclass(frozen=True)
class TruncatedPowerFamily:
    q: int

    def __call__(self, v) -> DyadicPiecewisePoly:
        return truncated_power(self.q, v)

    def norm2(self, v) -> Fraction:
        """``||psi_v||**2 = (1 - v)**(2q-1) / (2q-1)``."""
        v = as_fraction(v)
        return (1 - v) ** (2 * self.q - 1) / (2 * self.q - 1)


@dataclass(frozen=True)
class ApproximationLadder:
    """The dyadic ladder ``V_0 ⊂ V_1 ⊂ ...`` for the order-``q`` family.

    The dictionary realizing the ladder is built lazily up to ``max_level``.
    """

    q: int
    max_level: int = 8

    @property
    def gamma2(self) -> Fraction:
        return Fraction(1, 2 * self.q - 1)

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(2 * self.q - 1)

    @property
    def W(self) -> float:
        return 2.0 / (2 * self.q - 1)

    def bound2(self, k: int) -> Fraction:
        """``gamma**2 2**(-2k/W)`` exactly."""
        return Fraction(1, (2 * self.q - 1) << ((2 * self.q - 1) * k))

    def bound(self, k: int) -> float:
        return self.gamma * 2.0 ** (-k / self.W)

    def dimension(self, k: int) -> int:
        return self.q << k

    @cached_property
    def dictionary(self) -> OrthonormalDictionary:
        return build_dictionary(self.q, self.max_level)

    @cached_property
    def family(self) -> TruncatedPowerFamily:
        return TruncatedPowerFamily(self.q)


def _check_level(ladder, k):
    if not 0 <= k <= ladder.max_level:
        raise CapacityError(
            f"level {k} exceeds ladder max_level {ladder.max_level}", parameter="k", required=k
        )


def projection_residual2(f: DyadicPiecewisePoly, ladder: ApproximationLadder, k: int) -> Fraction:
    """Exact ``||f - proj_{V_k} f||**2``."""
    _check_level(ladder, k)
    return analyze(ladder.dictionary, f).residuals2()[k]


def projection_residual(f: DyadicPiecewisePoly, ladder: ApproximationLadder, k: int) -> float:
    """``||f - proj_{V_k} f||`` from the exact squared value."""
    return math.sqrt(projection_residual2(f, ladder, k))


def residual_profile(f: DyadicPiecewisePoly, ladder: ApproximationLadder):
    """Exact squared residuals for every ``k = 0..max_level`` from one analysis."""
    return analyze(ladder.dictionary, f).residuals2()


class ApproximationNumber(NamedTuple):
    delta: float
    argmax: Fraction
    bound: float
    delta2: Fraction


def approximation_number(ladder: ApproximationLadder, k: int, v_grid: Sequence) -> ApproximationNumber:
    """Largest residual of ``psi_v`` against ``V_k`` over ``v_grid``.

    This is a lower bound on the approximation number (a sup over all of
    [0, 1]); the analytic upper bound ``gamma 2**(-k/W)`` is returned next to it.
    """
    if len(v_grid) == 0:
        raise DomainError("empty v grid")
    _check_level(ladder, k)
    best, arg = None, None
    for v in v_grid:
        r2 = projection_residual2(truncated_power(ladder.q, v), ladder, k)
        if best is None or r2 > best:
            best, arg = r2, as_fraction(v)
    return ApproximationNumber(math.sqrt(best), arg, ladder.bound(k), best)


def m_epsilon(ladder: ApproximationLadder, epsilon, max_level=None):
    """Smallest ladder level ``k`` with ``gamma 2**(-k/W) <= epsilon`` and ``dim V_k``.

    The comparison ``gamma**2 2**(-(2q-1)k) <= epsilon**2`` is done in exact
    rationals (floats are converted exactly).
    """
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise DomainError("epsilon must be positive")
    cap = ladder.max_level if max_level is None else max_level
    e2 = eps * eps
    k = 0
    while ladder.bound2(k) > e2:
        k += 1
        if k > cap:
            # keep searching to report the level that would be needed
            while ladder.bound2(k) > e2:
                k += 1
            raise CapacityError(
                f"epsilon={float(eps)} needs level {k} > max_level {cap}", parameter="epsilon", required=k
            )
    return k, ladder.dimension(k)


def greedy_cover_family(q: int, v_grid: Sequence, epsilon) -> CoveringReport:
    """Greedy ``L2`` epsilon-net of ``{psi_v : v in v_grid}``."""
    fs = [truncated_power(q, v) for v in v_grid]
    return greedy_cover(fs, epsilon, params=list(v_grid))
