"""Exact hitting-time analytics for overlap-symmetric target sets.

For a start state ``x`` and a symmetric target set ``A`` the Laplace
transform of the hitting time factors into a ratio of resolvent-kernel sums:

    E_x[exp(-u * T_A_continuous)] = sum_z kernel(s(x,z), u)
                                    / sum_z kernel(s(y,z), u)

with ``z`` running over ``A`` and ``y`` any fixed element of ``A`` (overlap
symmetry makes the denominator independent of that choice; we fix the
lexicographically smallest element and assert the independence in tests).
The discrete-time transform is the same ratio evaluated at
``u = balls * (e**lambda - 1)``.

Means, variances and arbitrary raw moments come out of the centered kernel:
the mean and variance by direct closed forms in the kernel values and first
derivatives at zero, higher moments by carrying the full Taylor jets of
numerator and denominator through the argument substitution and reading
coefficients off the quotient.  Everything on this analytic path is exact
rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import Jet, Rational, expm1_rational
from .model import (
    ModelParams,
    SetDescriptor,
    State,
    SetNotSymmetricError,
    overlap,
    symmetry_defect,
)
from .resolvent import (
    centered_kernel,
    centered_kernel_derivative,
    centered_kernel_jet,
    resolvent_kernel,
)


@dataclass(frozen=True)
class HittingQuery:
    """A start state and a symmetric target set, validated on construction."""

    params: ModelParams
    start: State
    target: SetDescriptor

    def __post_init__(self):
        object.__setattr__(self, "start", self.params.check_state(self.start))
        states = self.target.materialize(self.params)
        defect = symmetry_defect(states)
        if defect is not None:
            raise SetNotSymmetricError(*defect)
        object.__setattr__(self, "_states", tuple(states))

    @property
    def target_states(self) -> tuple[State, ...]:
        return self._states  # type: ignore[attr-defined]

    @property
    def reference(self) -> State:
        """The fixed denominator element: lexicographically smallest target."""
        return self.target_states[0]

    def start_overlaps(self) -> list[int]:
        return [overlap(self.start, z) for z in self.target_states]

    def reference_overlaps(self) -> list[int]:
        y = self.reference
        return [overlap(y, z) for z in self.target_states]

    def start_in_target(self) -> bool:
        return self.start in self.target_states


def laplace_u(query: HittingQuery, u: Rational) -> Fraction:
    """Transform of the continuous-time hitting time at rational ``u > 0``."""
    u = Fraction(u)
    if u <= 0:
        raise ValueError("transform argument must be positive")
    if query.start_in_target():
        return Fraction(1)
    p = query.params
    num = sum((resolvent_kernel(p, k, u) for k in query.start_overlaps()), Fraction(0))
    den = sum((resolvent_kernel(p, k, u) for k in query.reference_overlaps()), Fraction(0))
    return num / den


def laplace_lambda(query: HittingQuery, lam: float, digits: int = 20) -> Fraction:
    """Transform of the discrete hitting time at ``lambda >= 0``.

    Evaluates the exact u-domain ratio at a rational approximation of
    ``balls * (e**lambda - 1)`` whose relative error is below
    ``10**-(digits + 6)``, comfortably inside the rendering precision.
    Returns exactly 1 at ``lambda = 0``.
    """
    if lam < 0:
        raise ValueError("transform argument must be non-negative")
    if lam == 0 or query.start_in_target():
        return Fraction(1)
    rel = Fraction(1, 10 ** (digits + 6))
    u = query.params.balls * expm1_rational(Fraction(lam), rel)
    return laplace_u(query, u)


def green_potential(params: ModelParams, x: Sequence[int], z: Sequence[int], u: Rational) -> Fraction:
    """Expected discounted occupation of the single state ``z`` started at ``x``.

    Depends on ``(x, z)`` only through their overlap; summed over all ``z``
    it recovers the total resolvent mass ``1/u``.
    """
    u = Fraction(u)
    if u <= 0:
        raise ValueError("discount rate must be positive")
    x = params.check_state(x)
    z = params.check_state(z)
    n, m = params.urns, params.balls
    return Fraction(n - 1, n**m) * resolvent_kernel(params, overlap(x, z), u)


def mean(query: HittingQuery) -> Fraction:
    """Exact expected number of steps to reach the target set."""
    if query.start_in_target():
        return Fraction(0)
    p = query.params
    n, m = p.urns, p.balls
    size = len(query.target_states)
    total = sum(
        (
            centered_kernel(p, ky) - centered_kernel(p, kx)
            for ky, kx in zip(query.reference_overlaps(), query.start_overlaps())
        ),
        Fraction(0),
    )
    return Fraction(m * (n - 1), size) * total


def variance(query: HittingQuery) -> Fraction:
    """Exact variance of the number of steps to reach the target set."""
    if query.start_in_target():
        return Fraction(0)
    p = query.params
    n, m = p.urns, p.balls
    size = len(query.target_states)
    expected = mean(query)
    total = Fraction(0)
    for ky, kx in zip(query.reference_overlaps(), query.start_overlaps()):
        total += (
            m * centered_kernel_derivative(p, kx, 1)
            - m * centered_kernel_derivative(p, ky, 1)
            + expected * centered_kernel(p, kx)
        )
    return Fraction(2 * m * (n - 1), size) * total + expected**2 - expected


def raw_moments(query: HittingQuery, order: int) -> list[Fraction]:
    """Exact raw moments ``E[T**r]`` for ``r = 1..order``.

    Builds the u-domain Taylor jets of the transform's numerator and
    denominator from centered-kernel derivatives, substitutes the series of
    ``balls * (e**lambda - 1)``, divides, and converts coefficients to
    moments via ``E[T**r] = (-1)**r * r! * [lambda**r]``.
    """
    if order < 1:
        raise ValueError("moment order must be >= 1")
    if query.start_in_target():
        return [Fraction(0)] * order
    p = query.params
    n, m = p.urns, p.balls
    jet_order = max(order, 2) + 1  # one guard coefficient past the top moment

    def ratio_side(overlaps: Sequence[int]) -> Jet:
        acc = Jet.constant(0, jet_order)
        for k in overlaps:
            acc = acc + centered_kernel_jet(p, k, jet_order)
        shifted = Jet.variable(jet_order) * acc
        return Jet.constant(len(query.target_states), jet_order) + (n - 1) * shifted

    substitution = Jet.scaled_expm1(m, jet_order)
    num = ratio_side(query.start_overlaps()).compose(substitution)
    den = ratio_side(query.reference_overlaps()).compose(substitution)
    transform = num / den
    return [
        Fraction((-1) ** r * math.factorial(r)) * transform.coeffs[r]
        for r in range(1, order + 1)
    ]


@dataclass(frozen=True)
class CtmcStats:
    """Mean and variance of the continuous-time hitting time."""

    mean: Fraction
    variance: Fraction


def ctmc_stats(query: HittingQuery) -> CtmcStats:
    """Continuous-time mean/variance from the discrete ones.

    The discrete chain is the embedded jump chain of the continuous one with
    Exponential(balls) holding times, which ties the two summaries together:
    ``mean = balls * mean_Y`` and ``variance = balls**2 * variance_Y - mean``.
    """
    m = query.params.balls
    e = mean(query)
    v = variance(query)
    return CtmcStats(mean=e / m, variance=(v + e) / Fraction(m**2))


@dataclass(frozen=True)
class HittingSummary:
    """Exact summary of one hitting-time query."""

    mean: Fraction
    variance: Fraction
    raw_moments: tuple[Fraction, ...]
    u_samples: tuple[tuple[Fraction, Fraction], ...] = ()
    lambda_samples: tuple[tuple[float, Fraction], ...] = ()
    exit_distribution: dict[State, Fraction] | None = None


def summarize(
    query: HittingQuery,
    order: int = 2,
    u_grid: Sequence[Rational] = (),
    lambda_grid: Sequence[float] = (),
    digits: int = 20,
    exit_distribution: dict[State, Fraction] | None = None,
) -> HittingSummary:
    """Bundle the exact statistics and transform samples for one query."""
    moments = tuple(raw_moments(query, order)) if order >= 1 else ()
    e = moments[0] if moments else mean(query)
    v = moments[1] - e**2 if len(moments) >= 2 else variance(query)
    return HittingSummary(
        mean=e,
        variance=v,
        raw_moments=moments,
        u_samples=tuple((Fraction(u), laplace_u(query, u)) for u in u_grid),
        lambda_samples=tuple((float(l), laplace_lambda(query, l, digits)) for l in lambda_grid),
        exit_distribution=exit_distribution,
    )
