"""Bookkeeping for transmission over parallel channels.

A code whose bits are split over ``J`` channels is described by the bit
fractions ``p_j`` and the edge fractions ``q_j``.  Puncturing maps onto this
picture: each punctured bit class sees its channel through a BEC whose
erasure probability is the puncture rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .channel import DEFAULT_CONTROLS, ChannelModel, EffectiveChannel, NumericControls, puncture_channel
from .degree import DegreePolynomial, to_node
from .errors import InconsistentAssignmentError, ValidationError

_FRACTION_TOL = 1e-12


@dataclass(frozen=True)
class ParallelEntry:
    channel: ChannelModel
    p: float
    q: float


@dataclass(frozen=True)
class ParallelAssignment:
    entries: tuple[ParallelEntry, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValidationError("a parallel assignment needs at least one channel")
        for e in self.entries:
            if not (e.p > 0 and e.q > 0):
                raise ValidationError("bit and edge fractions must be strictly positive")
        for name in ("p", "q"):
            total = math.fsum(getattr(e, name) for e in self.entries)
            if abs(total - 1.0) > _FRACTION_TOL:
                raise ValidationError(f"{name} fractions sum to {total!r}, not 1")

    @classmethod
    def build(cls, channels: Sequence[ChannelModel], p: Sequence[float], q: Sequence[float] | None = None):
        q = p if q is None else q
        if not (len(channels) == len(p) == len(q)):
            raise ValidationError("channels, p and q must have equal lengths")
        return cls(tuple(ParallelEntry(c, float(a), float(b)) for c, a, b in zip(channels, p, q)))

    @property
    def J(self) -> int:
        return len(self.entries)

    @property
    def channels(self) -> list[ChannelModel]:
        return [e.channel for e in self.entries]

    @property
    def p(self) -> np.ndarray:
        return np.array([e.p for e in self.entries])

    @property
    def q(self) -> np.ndarray:
        return np.array([e.q for e in self.entries])

    def capacities(self, ctrl: NumericControls = DEFAULT_CONTROLS) -> np.ndarray:
        return np.array([c.capacity(ctrl) for c in self.channels])

    def moment_matrix(self, pmax: int, ctrl: NumericControls = DEFAULT_CONTROLS) -> np.ndarray:
        """``g[j, p-1]`` for every channel and ``p = 1..pmax``."""
        return np.vstack([np.asarray(c.g_moments(pmax, ctrl)) for c in self.channels])


@dataclass(frozen=True)
class IntentionalPuncturing:
    """Per-degree puncture rates; degrees not listed are left unpunctured."""

    pi: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        seen = set()
        for d, r in self.pi:
            if d in seen:
                raise ValidationError(f"degree {d} listed twice in puncturing pattern")
            seen.add(d)
            if not 0.0 <= r <= 1.0:
                raise ValidationError(f"puncture rate {r!r} at degree {d} outside [0, 1]")

    @classmethod
    def from_mapping(cls, pi: Mapping[int, float] | Sequence[tuple[int, float]]):
        items = pi.items() if isinstance(pi, Mapping) else pi
        return cls(tuple(sorted((int(d), float(r)) for d, r in items)))

    def rate(self, degree: int) -> float:
        return dict(self.pi).get(degree, 0.0)

    def check_support(self, lambda_edge: DegreePolynomial) -> None:
        support = set(lambda_edge.coefficients)
        extra = sorted(d for d, _ in self.pi if d not in support)
        if extra:
            raise ValidationError(f"puncturing pattern names degrees {extra} outside the left support")

    def bit_fraction(self, lambda_edge: DegreePolynomial) -> float:
        """Fraction ``sum Lambda_j pi_j`` of punctured code bits."""
        self.check_support(lambda_edge)
        Lam = to_node(lambda_edge).coefficients
        return math.fsum(Lam[d] * r for d, r in self.pi)

    def edge_fraction(self, lambda_edge: DegreePolynomial) -> float:
        """Fraction ``sum lambda_j pi_j`` of edges attached to punctured bits."""
        self.check_support(lambda_edge)
        lam = lambda_edge.coefficients
        return math.fsum(lam[d] * r for d, r in self.pi)


@dataclass(frozen=True)
class RandomPuncturing:
    """Puncture rate ``p_pct`` applied to a fixed fraction ``alpha`` of the bits."""

    alpha: float
    p_pct: float

    def __post_init__(self):
        for name in ("alpha", "p_pct"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} = {v!r} outside [0, 1]")

    @property
    def overall_rate(self) -> float:
        return self.alpha * self.p_pct


def edge_fractions(
    lambda_edge: DegreePolynomial,
    per_channel_lambdas: Sequence[DegreePolynomial],
    p: Sequence[float],
    tol: float = 1e-9,
) -> np.ndarray:
    """Edge fractions ``q_j`` implied by bit fractions and per-channel degree laws.

    The mixture of the per-channel edge distributions weighted by ``q_j`` must
    reproduce ``lambda_edge``; a mismatch raises InconsistentAssignmentError.
    """
    p = np.asarray(p, dtype=float)
    if len(per_channel_lambdas) != len(p):
        raise ValidationError("need one degree distribution per channel")
    if np.any(p <= 0) or abs(p.sum() - 1.0) > _FRACTION_TOL:
        raise ValidationError("bit fractions must be positive and sum to 1")
    # mean left degree of the bits on channel j is 1 / int(lambda_j)
    inv = np.array([1.0 / lj.integral() for lj in per_channel_lambdas])
    q = p * inv
    q = q / q.sum()
    mix: dict[int, float] = {}
    for qj, lj in zip(q, per_channel_lambdas):
        for d, w in lj.terms:
            mix[d] = mix.get(d, 0.0) + qj * w
    target = lambda_edge.coefficients
    for d in set(mix) | set(target):
        if abs(mix.get(d, 0.0) - target.get(d, 0.0)) > tol:
            raise InconsistentAssignmentError(
                f"per-channel distributions do not mix back to lambda at degree {d}"
            )
    return q


def ip_assignment(
    lambda_edge: DegreePolynomial,
    base: ChannelModel,
    pi: IntentionalPuncturing,
    Lambda_node: DegreePolynomial | None = None,
) -> ParallelAssignment:
    """One channel per left degree, seen through that degree's puncture rate."""
    pi.check_support(lambda_edge)
    Lam = (Lambda_node or to_node(lambda_edge)).coefficients
    lam = lambda_edge.coefficients
    degs = sorted(lam)
    return ParallelAssignment.build(
        [puncture_channel(base, pi.rate(d)) for d in degs],
        [Lam[d] for d in degs],
        [lam[d] for d in degs],
    )


@dataclass(frozen=True)
class RandomAssignment:
    """Parallel view of random puncturing.

    The per-channel degree laws are unknown, so instead of ``q_j`` the bound
    uses the surrogate scaling ``(1 - p_pct + xi)`` on ``g_p``.
    """

    channels: tuple[EffectiveChannel, EffectiveChannel]
    p: tuple[float, float]
    xi: float
    surrogate_factor: float
    overall_rate: float


def rp_assignment(lambda_edge: DegreePolynomial, base: ChannelModel, rp: RandomPuncturing) -> RandomAssignment:
    xi = 2.0 * (1.0 - rp.alpha) * rp.p_pct * lambda_edge.integral()
    return RandomAssignment(
        channels=(puncture_channel(base, rp.p_pct), puncture_channel(base, 0.0)),
        p=(rp.alpha, 1.0 - rp.alpha),
        xi=xi,
        surrogate_factor=1.0 - rp.p_pct + xi,
        overall_rate=rp.overall_rate,
    )


def average_capacity(a: ParallelAssignment | RandomAssignment, ctrl: NumericControls = DEFAULT_CONTROLS) -> float:
    """Bit-weighted average capacity of the component channels."""
    if isinstance(a, RandomAssignment):
        return math.fsum(pj * c.capacity(ctrl) for pj, c in zip(a.p, a.channels))
    return math.fsum(e.p * e.channel.capacity(ctrl) for e in a.entries)
