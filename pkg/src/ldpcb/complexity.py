"""Lower bounds on the decoding complexity per iteration.

Complexity is counted as edges of the Tanner graph per information bit.  The
bounds have the form ``K1 + K2 * ln(1 / eps)`` where ``eps`` is the
multiplicative gap of the rate to the (average) capacity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import BEC, DEFAULT_CONTROLS, LN2, ChannelModel, EffectiveChannel, NumericControls
from .degree import DegreePolynomial
from .errors import DegenerateBoundError, ValidationError
from .parallel import IntentionalPuncturing, ParallelAssignment, RandomPuncturing, rp_assignment

PARALLEL = "parallel"
RP = "rp"
IP = "ip"
LEGACY_MBIOS = "legacy_mbios"
LEGACY_BEC = "legacy_bec"


@dataclass(frozen=True)
class ComplexityBound:
    K1: float
    K2: float
    variant: str
    epsilon: float | None = None

    def value_at(self, epsilon: float) -> float:
        _check_gap(epsilon)
        return self.K1 + self.K2 * math.log(1.0 / epsilon)

    @property
    def value(self) -> float:
        if self.epsilon is None:
            raise ValidationError("no gap attached; use value_at(epsilon)")
        return self.value_at(self.epsilon)


def _check_gap(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ValidationError(f"gap to capacity must lie in (0, 1), got {epsilon!r}")


def chi_d(R_d: float, a_R: float) -> float:
    """Edges per information bit, ``(1 - R_d) / R_d * a_R``."""
    if not 0.0 < R_d < 1.0:
        raise ValidationError("design rate must lie in (0, 1)")
    return (1.0 - R_d) / R_d * a_R


def chi_d_punctured(R_d_punctured: float, gamma: float, a_R: float) -> float:
    """Complexity of a punctured code, which decodes on the mother graph."""
    r = (1.0 - gamma) * R_d_punctured
    if not 0.0 < r < 1.0:
        raise ValidationError("mother-code rate must lie in (0, 1)")
    return (1.0 - r) / r * a_R


def gamma_power_lower(Gamma_node: DegreePolynomial, alpha: float) -> tuple[float, float]:
    """Return ``(Gamma(alpha), alpha ** a_R)``; the first is never below the second.

    This is Jensen's inequality applied to the convex map ``d -> alpha**d``.
    """
    if alpha < 0:
        raise ValidationError("alpha must be non-negative")
    a_R = Gamma_node.derivative_at_one()
    g = float(Gamma_node(alpha))
    pw = alpha**a_R
    if g < pw * (1 - 1e-12) - 1e-300:
        raise ArithmeticError(f"Gamma({alpha}) = {g} fell below alpha**a_R = {pw}")
    return g, pw


def _is_bec(ch: ChannelModel) -> bool:
    if isinstance(ch, EffectiveChannel):
        return _is_bec(ch.base)
    return isinstance(ch, BEC)


def _coefficients(cbar: float, x: float, bec: bool, variant: str, epsilon=None) -> ComplexityBound:
    if not 0.0 < cbar < 1.0:
        raise DegenerateBoundError(f"average capacity {cbar!r} must lie strictly between 0 and 1")
    if not 0.0 < x < 1.0:
        raise DegenerateBoundError(f"effective edge moment {x!r} must lie strictly between 0 and 1")
    c = 1.0 if bec else 1.0 / (2.0 * LN2)
    lnx = math.log(x)
    K2 = -(1.0 - cbar) / (cbar * lnx)
    K1 = K2 * math.log(c * (1.0 - cbar) / cbar)
    if epsilon is not None:
        _check_gap(epsilon)
    return ComplexityBound(K1, K2, variant, epsilon)


def complexity_bound_parallel(
    a: ParallelAssignment, ctrl: NumericControls = DEFAULT_CONTROLS, epsilon: float | None = None
) -> ComplexityBound:
    cbar = math.fsum(a.p * a.capacities(ctrl))
    x = float(a.q @ a.moment_matrix(1, ctrl)[:, 0])
    bec = all(_is_bec(c) for c in a.channels)
    return _coefficients(cbar, x, bec, PARALLEL, epsilon)


def complexity_bound_rp(
    lambda_edge: DegreePolynomial,
    base: ChannelModel,
    rp: RandomPuncturing,
    ctrl: NumericControls = DEFAULT_CONTROLS,
    epsilon: float | None = None,
) -> ComplexityBound:
    info = rp_assignment(lambda_edge, base, rp)
    cbar = (1.0 - rp.overall_rate) * base.capacity(ctrl)
    x = info.surrogate_factor * float(base.g_moments(1, ctrl)[0])
    return _coefficients(cbar, x, _is_bec(base), RP, epsilon)


def complexity_bound_ip(
    lambda_edge: DegreePolynomial,
    base: ChannelModel,
    pi: IntentionalPuncturing,
    ctrl: NumericControls = DEFAULT_CONTROLS,
    epsilon: float | None = None,
) -> ComplexityBound:
    """Intentional puncturing; both the moment and the capacity are scaled
    by the punctured edge fraction ``sum lambda_j pi_j``."""
    e0 = pi.edge_fraction(lambda_edge)
    cbar = (1.0 - e0) * base.capacity(ctrl)
    x = (1.0 - e0) * float(base.g_moments(1, ctrl)[0])
    return _coefficients(cbar, x, _is_bec(base), IP, epsilon)


def legacy_alpha(C: float, p_pct: float, epsilon: float) -> float:
    """Fraction of punctured bits when it equals the punctured code rate."""
    _check_gap(epsilon)
    alpha = (1.0 - epsilon) * C / (1.0 + (1.0 - epsilon) * C * p_pct)
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"derived alpha {alpha!r} outside [0, 1]")
    return alpha


def legacy_bound(base: ChannelModel, p_pct: float, epsilon: float, variant: str = "mbios",
                  ctrl: NumericControls = DEFAULT_CONTROLS) -> float:
    """Looser complexity bounds for random puncturing of the information bits.

    ``mbios`` uses only the uncoded error probability ``w`` of the channel;
    ``bec`` keeps the whole series, which is summable in closed form for a
    BEC.  Both can be negative (vacuous) when the gap is large.
    """
    _check_gap(epsilon)
    if not 0.0 <= p_pct < 1.0:
        raise ValidationError("puncture rate must lie in [0, 1)")
    C = base.capacity(ctrl)
    if not 0.0 < C < 1.0:
        raise DegenerateBoundError(f"channel capacity {C!r} must lie strictly between 0 and 1")
    if variant == "mbios":
        w = base.uncoded_error_prob()
        denom = math.log(1.0 / ((1.0 - p_pct) * (1.0 - 2.0 * w)))
        if denom <= 0:
            raise DegenerateBoundError("uncoded channel is noiseless")
        arg = (1.0 - (1.0 - p_pct) * C) / (epsilon * 2.0 * C * LN2)
        return (1.0 - C) / (2.0 * C) * math.log(arg) / denom
    if variant == "bec":
        if not _is_bec(base):
            raise ValidationError("the bec variant needs a BEC")
        alpha = legacy_alpha(C, p_pct, epsilon)
        cbar = (1.0 - alpha * p_pct) * C
        x = (1.0 - p_pct) * C
        a_R = math.log((1.0 - (1.0 - epsilon) * cbar) / (epsilon * cbar)) / math.log(1.0 / x)
        return (1.0 - C) / C * a_R
    raise ValidationError(f"unknown variant {variant!r}")
