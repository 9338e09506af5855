"""Upper bounds on the design rate of LDPC ensembles that decode reliably.

Every bound has the shape

    scale * (1 - (1 - Cbar) / (1 - S / (2 ln 2)))

where ``S = sum_p Gamma(x_p) / (p (2p - 1))`` and ``x_p`` is an effective
moment of the channel(s) seen by a random edge.  Truncating ``S`` only
loosens the bound, so a truncated value is still a valid upper bound and the
reported remainder says how much tighter the untruncated value could be.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .channel import BEC, DEFAULT_CONTROLS, LN2, ChannelModel, NumericControls, series_tail, series_weights
from .degree import DegreePolynomial, to_node
from .errors import DegenerateBoundError, ValidationError
from .parallel import (
    IntentionalPuncturing,
    ParallelAssignment,
    RandomPuncturing,
    rp_assignment,
)


@dataclass(frozen=True)
class BoundResult:
    """A bound plus what is needed to audit it."""

    value: float
    series_terms_used: int
    series_remainder_bound: float
    controls: NumericControls = field(default=DEFAULT_CONTROLS)
    design_rate: float | None = None
    average_capacity: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["controls"] = asdict(self.controls)
        return d


@dataclass(frozen=True)
class SeriesSum:
    value: float
    terms: int
    tail_bound: float


def gamma_series(
    gamma_node: DegreePolynomial,
    arguments: Callable[[int], np.ndarray],
    constant_in_p: bool,
    ctrl: NumericControls,
) -> SeriesSum:
    """``sum_p Gamma(x_p) / (p (2p - 1))`` with a rigorous tail bound.

    ``arguments(P)`` returns ``x_1..x_P``, which must be non-increasing in
    ``p``.  When the arguments do not depend on ``p`` the tail is summed
    exactly.  Otherwise the tail after ``P`` terms is at most
    ``Gamma(x_P) * sum_{p > P} 1/(p(2p-1))``; ``P`` is the smallest depth at
    which that falls below ``series_tol``, capped at ``series_pmax``.
    """
    if constant_in_p:
        x1 = float(arguments(1)[0])
        return SeriesSum(gamma_node(x1) * 2.0 * LN2, 1, 0.0)
    pmax = ctrl.series_pmax
    x = np.clip(np.asarray(arguments(pmax), dtype=float), 0.0, 1.0)
    terms = gamma_node(x) * series_weights(pmax)
    tails = gamma_node(x) * series_tail(np.arange(1, pmax + 1))
    ok = np.nonzero(tails <= ctrl.series_tol)[0]
    P = int(ok[0]) + 1 if len(ok) else pmax
    return SeriesSum(math.fsum(terms[:P]), P, float(tails[P - 1]))


def _assemble(cbar: float, series: SeriesSum, scale: float, ctrl: NumericControls, rate=None) -> BoundResult:
    if not 0.0 <= cbar <= 1.0 + 1e-15:
        raise ValidationError(f"average capacity {cbar!r} outside [0, 1]")
    if cbar >= 1.0:
        # noiseless limit: the numerator vanishes and no rate is excluded
        return BoundResult(1.0, series.terms, 0.0, ctrl, rate, cbar)
    if cbar <= 0.0:
        raise DegenerateBoundError("average capacity is zero")

    def value(s: float) -> float:
        den = 1.0 - s / (2.0 * LN2)
        if den <= 0.0:
            raise DegenerateBoundError(
                "bound denominator is not positive (effective edge moment equals 1 with imperfect channels)"
            )
        return scale * (1.0 - (1.0 - cbar) / den)

    v = value(series.value)
    if series.tail_bound > 0:
        try:
            remainder = v - value(series.value + series.tail_bound)
        except DegenerateBoundError:
            remainder = math.inf
    else:
        remainder = 0.0
    return BoundResult(v, series.terms, float(remainder), ctrl, rate, cbar)


def rate_bound_parallel(
    a: ParallelAssignment, Gamma_node: DegreePolynomial, ctrl: NumericControls = DEFAULT_CONTROLS
) -> BoundResult:
    """Upper bound on the design rate over ``J`` parallel channels."""
    if Gamma_node.perspective != "node":
        raise ValidationError("Gamma_node must be a node-perspective check distribution")
    q = a.q
    cbar = math.fsum(a.p * a.capacities(ctrl))
    constant = all(c.moments_constant_in_p for c in a.channels)
    series = gamma_series(Gamma_node, lambda P: q @ a.moment_matrix(P, ctrl), constant, ctrl)
    return _assemble(cbar, series, 1.0, ctrl)


def rate_bound_bec(a: ParallelAssignment, Gamma_node: DegreePolynomial) -> BoundResult:
    """Closed form of the parallel-channel bound when every channel is a BEC."""
    eps = []
    for c in a.channels:
        base = getattr(c, "base", None)
        if isinstance(c, BEC):
            eps.append(c.erasure_prob)
        elif isinstance(base, BEC):
            eps.append(1.0 - (1.0 - c.puncture_rate) * (1.0 - base.erasure_prob))
        else:
            raise ValidationError("rate_bound_bec needs every channel to be a BEC")
    eps = np.asarray(eps)
    cbar = math.fsum(a.p * (1.0 - eps))
    num = 1.0 - cbar
    g = Gamma_node(1.0 - math.fsum(a.q * eps))
    # same edge cases, in the same order, as the general series path
    if cbar >= 1.0:
        return BoundResult(1.0, 0, 0.0, DEFAULT_CONTROLS, None, 1.0)
    if cbar <= 0.0:
        raise DegenerateBoundError("average capacity is zero")
    if g >= 1.0:
        raise DegenerateBoundError("Gamma(1 - sum q_j eps_j) equals 1")
    return BoundResult(1.0 - num / (1.0 - g), 0, 0.0, DEFAULT_CONTROLS, None, cbar)


def punctured_design_rate(R_prime_d: float, gamma: float) -> float:
    """Design rate after puncturing a fraction ``gamma`` of the code bits."""
    if not 0.0 <= gamma < 1.0:
        raise ValidationError(f"overall puncturing rate {gamma!r} must lie in [0, 1)")
    return R_prime_d / (1.0 - gamma)


def rate_bound_rp(
    lambda_edge: DegreePolynomial,
    Gamma_node: DegreePolynomial,
    base: ChannelModel,
    rp: RandomPuncturing,
    ctrl: NumericControls = DEFAULT_CONTROLS,
    xi: float | None = None,
) -> BoundResult:
    """Bound for random puncturing of a fraction ``alpha`` of the bits.

    ``xi`` overrides the edge-correction term (``xi=0`` gives the looser
    variant used when comparing against older complexity bounds).
    """
    info = rp_assignment(lambda_edge, base, rp)
    xi = info.xi if xi is None else float(xi)
    factor = 1.0 - rp.p_pct + xi
    gamma = rp.overall_rate
    if gamma >= 1.0:
        raise DegenerateBoundError("every code bit is punctured")
    cbar = (1.0 - gamma) * base.capacity(ctrl)
    series = gamma_series(
        Gamma_node,
        lambda P: factor * np.asarray(base.g_moments(P, ctrl)),
        base.moments_constant_in_p,
        ctrl,
    )
    return _assemble(cbar, series, 1.0 / (1.0 - gamma), ctrl)


def rate_bound_ip(
    lambda_edge: DegreePolynomial,
    Gamma_node: DegreePolynomial,
    base: ChannelModel,
    pi: IntentionalPuncturing,
    ctrl: NumericControls = DEFAULT_CONTROLS,
    Lambda_node: DegreePolynomial | None = None,
) -> BoundResult:
    """Bound for intentional (per-degree) puncturing."""
    pi.check_support(lambda_edge)
    Lam = (Lambda_node or to_node(lambda_edge)).coefficients
    lam = lambda_edge.coefficients
    p0 = math.fsum(Lam[d] * r for d, r in pi.pi)
    e0 = math.fsum(lam[d] * r for d, r in pi.pi)
    if p0 >= 1.0:
        raise DegenerateBoundError("every code bit is punctured")
    cbar = (1.0 - p0) * base.capacity(ctrl)
    series = gamma_series(
        Gamma_node,
        lambda P: (1.0 - e0) * np.asarray(base.g_moments(P, ctrl)),
        base.moments_constant_in_p,
        ctrl,
    )
    return _assemble(cbar, series, 1.0 / (1.0 - p0), ctrl)
