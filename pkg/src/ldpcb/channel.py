"""MBIOS channel models and the functionals the bounds are built from.

All LLR densities are taken conditioned on the input symbol +1 (bit 0); by
output symmetry the moments do not depend on that choice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import NumericError, ValidationError

LN2 = math.log(2.0)


@dataclass(frozen=True)
class NumericControls:
    series_pmax: int = 200
    series_tol: float = 1e-10
    quad_rel_tol: float = 1e-10
    quad_nodes: int = 301

    def __post_init__(self):
        if self.series_pmax < 1 or self.quad_nodes < 1:
            raise ValidationError("series_pmax and quad_nodes must be positive")
        if not (self.series_tol > 0 and self.quad_rel_tol > 0):
            raise ValidationError("tolerances must be strictly positive")


DEFAULT_CONTROLS = NumericControls()


# ---------------------------------------------------------------------------
# binary entropy and its series around 1/2


def h2(x):
    """Binary entropy in bits."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise ValidationError("h2 is defined on [0, 1]")
    out = (special.entr(x) + special.entr(1 - x)) / LN2
    return out if out.ndim else float(out)


def series_weights(pmax: int) -> np.ndarray:
    """``1 / (p (2p - 1))`` for ``p = 1..pmax``."""
    p = np.arange(1, pmax + 1, dtype=float)
    return 1.0 / (p * (2 * p - 1))


def series_tail(P) -> np.ndarray | float:
    """Exact tail ``sum_{p > P} 1 / (p (2p - 1))``.

    Telescoping gives ``digamma(P + 1) - digamma(P + 1/2)``; at ``P = 0``
    this is the full sum ``2 ln 2``.
    """
    P = np.asarray(P, dtype=float)
    out = special.digamma(P + 1) - special.digamma(P + 0.5)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SeriesValue:
    partial_sum: float
    remainder_bound: float


def h2_series(x: float, pmax: int) -> SeriesValue:
    """Truncated expansion of ``h2`` around 1/2.

    Every dropped term is non-negative, so ``partial_sum`` over-estimates
    ``h2(x)`` and ``partial_sum - remainder_bound`` under-estimates it.
    """
    if not 0 <= x <= 1:
        raise ValidationError("h2_series is defined on [0, 1]")
    if pmax < 1:
        raise ValidationError("pmax must be positive")
    z2 = (1 - 2 * x) ** 2
    w = series_weights(pmax)
    powers = z2 ** np.arange(1, pmax + 1)
    partial = 1.0 - math.fsum(w * powers) / (2 * LN2)
    remainder = z2 ** pmax * series_tail(pmax) / (2 * LN2)
    return SeriesValue(partial, remainder)


# ---------------------------------------------------------------------------
# Gauss-Hermite expectations of functions of a Gaussian LLR


@lru_cache(maxsize=16)
def _hermite(n: int):
    x, w = special.roots_hermite(n)
    x.setflags(write=False)
    w = w / math.sqrt(math.pi)
    w.setflags(write=False)
    return x, w


def _gauss_expect(func, mean: float, std: float, n: int) -> np.ndarray:
    x, w = _hermite(n)
    vals = func(mean + math.sqrt(2.0) * std * x)
    return np.tensordot(w, vals, axes=(0, 0))


def gaussian_expectation(func, mean: float, std: float, ctrl: NumericControls = DEFAULT_CONTROLS):
    """``E[func(L)]`` for ``L ~ N(mean, std^2)``.

    ``func`` maps an array of ``m`` sample points to an array whose leading
    axis has length ``m``.  The fixed-order Gauss-Hermite rule is accepted
    when it agrees with the rule of order ``2n + 1`` to ``quad_rel_tol``;
    otherwise an adaptive quadrature over the real line takes over.
    """
    n = ctrl.quad_nodes
    coarse = _gauss_expect(func, mean, std, n)
    fine = _gauss_expect(func, mean, std, 2 * n + 1)
    scale = np.maximum(np.abs(fine), 1e-300)
    err = np.abs(fine - coarse)
    if np.all(err <= ctrl.quad_rel_tol * scale + 1e-300):
        return fine

    def integrand(l):
        dens = math.exp(-0.5 * ((l - mean) / std) ** 2) / (std * math.sqrt(2 * math.pi))
        return dens * np.asarray(func(np.array([l])))[0]

    lo, hi = mean - 40 * std, mean + 40 * std
    points = [0.0] if lo < 0 < hi else None
    res, abserr = integrate.quad_vec(
        integrand, lo, hi, epsabs=1e-300, epsrel=ctrl.quad_rel_tol, points=points, norm="max", limit=2000
    )
    res = np.asarray(res)
    achieved = float(abserr / max(np.max(np.abs(res)), 1e-300))
    if not np.isfinite(achieved) or achieved > 10 * ctrl.quad_rel_tol:
        raise NumericError(
            f"quadrature reached relative error {achieved:.3g}, requested {ctrl.quad_rel_tol:.3g}",
            achieved=achieved,
        )
    return res


# ---------------------------------------------------------------------------
# channel models


class ChannelModel:
    """Common interface of the MBIOS channels."""

    family: str = ""
    #: True when g_p does not depend on p (BEC, and the trivial BSCs)
    moments_constant_in_p: bool = False

    def capacity(self, ctrl: NumericControls = DEFAULT_CONTROLS) -> float:
        raise NotImplementedError

    def g_moments(self, pmax: int, ctrl: NumericControls = DEFAULT_CONTROLS) -> np.ndarray:
        """``g_1 .. g_pmax`` as a read-only array."""
        raise NotImplementedError

    def uncoded_error_prob(self) -> float:
        raise NotImplementedError

    @property
    def parameter(self) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class BEC(ChannelModel):
    erasure_prob: float

    family = "bec"
    moments_constant_in_p = True

    def __post_init__(self):
        if not 0.0 <= self.erasure_prob <= 1.0:
            raise ValidationError(f"BEC erasure probability {self.erasure_prob!r} outside [0, 1]")

    @property
    def parameter(self) -> float:
        return self.erasure_prob

    def capacity(self, ctrl=DEFAULT_CONTROLS) -> float:
        return 1.0 - self.erasure_prob

    def g_moments(self, pmax, ctrl=DEFAULT_CONTROLS):
        out = np.full(pmax, 1.0 - self.erasure_prob)
        out.setflags(write=False)
        return out

    def uncoded_error_prob(self) -> float:
        return 0.5 * self.erasure_prob


@dataclass(frozen=True)
class BSC(ChannelModel):
    crossover: float

    family = "bsc"

    def __post_init__(self):
        if not 0.0 <= self.crossover <= 0.5:
            raise ValidationError(f"BSC crossover {self.crossover!r} outside [0, 1/2]")

    @property
    def parameter(self) -> float:
        return self.crossover

    @property
    def moments_constant_in_p(self) -> bool:  # type: ignore[override]
        return self.crossover in (0.0, 0.5)

    def capacity(self, ctrl=DEFAULT_CONTROLS) -> float:
        return 1.0 - h2(self.crossover)

    def g_moments(self, pmax, ctrl=DEFAULT_CONTROLS):
        # two-point LLR law: tanh^2(L/2) = (1 - 2w)^2 at both mass points
        out = (1.0 - 2.0 * self.crossover) ** (2.0 * np.arange(1, pmax + 1))
        out.setflags(write=False)
        return out

    def uncoded_error_prob(self) -> float:
        return self.crossover


def ebno_db_to_sigma(ebno_db: float, rate: float) -> float:
    """Noise standard deviation for unit-energy BPSK at rate ``rate``."""
    if not 0 < rate:
        raise ValidationError("rate must be positive")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0)))


def sigma_to_ebno_db(sigma: float, rate: float) -> float:
    if not (sigma > 0 and rate > 0):
        raise ValidationError("sigma and rate must be positive")
    return 10.0 * math.log10(1.0 / (2.0 * rate * sigma * sigma))


@lru_cache(maxsize=4096)
def _biawgn_capacity(sigma: float, ctrl: NumericControls) -> float:
    mean = 2.0 / sigma**2
    std = 2.0 / sigma
    e = gaussian_expectation(lambda l: np.logaddexp(0.0, -l) / LN2, mean, std, ctrl)
    return float(1.0 - e)


@lru_cache(maxsize=4096)
def _biawgn_moments(sigma: float, pmax: int, ctrl: NumericControls) -> np.ndarray:
    mean = 2.0 / sigma**2
    std = 2.0 / sigma
    p = np.arange(1, pmax + 1)

    def f(l):
        t2 = np.tanh(l / 2.0) ** 2
        return t2[:, None] ** p[None, :]

    out = np.clip(np.asarray(gaussian_expectation(f, mean, std, ctrl), dtype=float), 0.0, 1.0)
    # enforce the monotonicity in p that quadrature noise could break
    out = np.minimum.accumulate(out)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class BIAWGN(ChannelModel):
    """Binary-input AWGN channel with unit-energy BPSK and noise std ``sigma``.

    The LLR under input +1 is Gaussian with mean ``2/sigma^2`` and variance
    ``4/sigma^2``.
    """

    sigma: float

    family = "biawgn"

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValidationError(f"BIAWGN noise std must be positive, got {self.sigma!r}")

    @classmethod
    def from_ebno_db(cls, ebno_db: float, rate: float) -> "BIAWGN":
        return cls(ebno_db_to_sigma(ebno_db, rate))

    @property
    def parameter(self) -> float:
        return self.sigma

    @property
    def llr_mean(self) -> float:
        return 2.0 / self.sigma**2

    @property
    def llr_std(self) -> float:
        return 2.0 / self.sigma

    def ebno_db(self, rate: float) -> float:
        return sigma_to_ebno_db(self.sigma, rate)

    def capacity(self, ctrl=DEFAULT_CONTROLS) -> float:
        return _biawgn_capacity(float(self.sigma), ctrl)

    def g_moments(self, pmax, ctrl=DEFAULT_CONTROLS):
        return _biawgn_moments(float(self.sigma), int(pmax), ctrl)

    def uncoded_error_prob(self) -> float:
        return float(special.ndtr(-1.0 / self.sigma))


@dataclass(frozen=True)
class DiscreteChannel(ChannelModel):
    """MBIOS channel with a finite output alphabet, described by its LLR law.

    ``llrs`` and ``probs`` list the LLR value of every output symbol and its
    probability under input +1.  Infinite LLRs are allowed (BEC-like outputs).
    """

    llrs: tuple[float, ...]
    probs: tuple[float, ...]
    name: str = "discrete"

    family = "discrete"

    def __post_init__(self):
        if len(self.llrs) != len(self.probs) or not self.llrs:
            raise ValidationError("llrs and probs must be non-empty and of equal length")
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValidationError("output probabilities must be non-negative and sum to 1")
        # symmetry a(l) = e^l a(-l): the mass at +l must equal e^l times the mass at -l
        table: dict[float, float] = {}
        for l, q in zip(self.llrs, self.probs):
            table[l] = table.get(l, 0.0) + q
        for l, q in table.items():
            if math.isinf(l) or l <= 0:
                continue
            q_neg = table.get(-l, 0.0)
            if abs(q - math.exp(l) * q_neg) > 1e-9 * max(q, 1e-300) and abs(q_neg - math.exp(-l) * q) > 1e-12:
                raise ValidationError("LLR law is not output-symmetric")
        if table.get(-math.inf, 0.0) > 0:
            raise ValidationError("LLR -inf cannot occur under input +1 for a symmetric channel")

    @property
    def parameter(self) -> float:
        return float("nan")

    @property
    def magnitudes(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct LLR magnitudes and their probabilities."""
        mags: dict[float, float] = {}
        for l, q in zip(self.llrs, self.probs):
            mags[abs(l)] = mags.get(abs(l), 0.0) + q
        keys = sorted(mags)
        return np.array(keys), np.array([mags[k] for k in keys])

    def _expect(self, f):
        l = np.asarray(self.llrs, dtype=float)
        p = np.asarray(self.probs, dtype=float)
        return np.tensordot(p, f(l), axes=(0, 0))

    def capacity(self, ctrl=DEFAULT_CONTROLS) -> float:
        return float(1.0 - self._expect(lambda l: np.logaddexp(0.0, -l) / LN2))

    def g_moments(self, pmax, ctrl=DEFAULT_CONTROLS):
        p = np.arange(1, pmax + 1)
        out = self._expect(lambda l: (np.tanh(l / 2.0) ** 2)[:, None] ** p[None, :])
        out = np.clip(out, 0.0, 1.0)
        out.setflags(write=False)
        return out

    @property
    def moments_constant_in_p(self) -> bool:  # type: ignore[override]
        mags, probs = self.magnitudes
        return bool(np.all((mags == 0) | np.isinf(mags) | (probs == 0)))

    def uncoded_error_prob(self) -> float:
        l = np.asarray(self.llrs, dtype=float)
        p = np.asarray(self.probs, dtype=float)
        return float(p[l < 0].sum() + 0.5 * p[l == 0].sum())


def as_discrete(ch: ChannelModel, bins: int = 8, step: float | None = None) -> DiscreteChannel:
    """Finite-alphabet view of ``ch``; BIAWGN outputs are quantized symmetrically."""
    if isinstance(ch, DiscreteChannel):
        return ch
    if isinstance(ch, BEC):
        e = ch.erasure_prob
        return DiscreteChannel((0.0, math.inf), (e, 1.0 - e), name=f"bec({e})")
    if isinstance(ch, BSC):
        w = ch.crossover
        if w == 0.0:
            return DiscreteChannel((math.inf,), (1.0,), name="bsc(0)")
        if w == 0.5:
            return DiscreteChannel((0.0,), (1.0,), name="bsc(0.5)")
        l = math.log((1 - w) / w)
        return DiscreteChannel((l, -l), (1 - w, w), name=f"bsc({w})")
    if isinstance(ch, BIAWGN):
        return quantize_biawgn(ch.sigma, bins, step)
    if isinstance(ch, EffectiveChannel):
        base = as_discrete(ch.base, bins, step)
        pi = ch.puncture_rate
        llrs = (0.0,) + base.llrs
        probs = (pi,) + tuple((1 - pi) * q for q in base.probs)
        return DiscreteChannel(llrs, probs, name=f"punctured({base.name},{pi})")
    raise ValidationError(f"cannot discretize {ch!r}")


def quantize_biawgn(sigma: float, bins: int = 8, step: float | None = None) -> DiscreteChannel:
    """Quantize the BIAWGN output ``y = 1 + noise`` into ``bins`` symmetric cells.

    Cell edges sit at multiples of ``step`` (default ``sigma / 2``) around 0;
    the two outer cells are unbounded.  Symmetric cells keep the channel MBIOS.
    """
    if bins < 2 or bins % 2:
        raise ValidationError("bins must be a positive even number")
    step = sigma / 2.0 if step is None else step
    half = bins // 2
    edges = np.concatenate(([-np.inf], step * np.arange(-half + 1, half), [np.inf]))
    cdf_plus = special.ndtr((edges - 1.0) / sigma)
    cdf_minus = special.ndtr((edges + 1.0) / sigma)
    p_plus = np.diff(cdf_plus)
    p_minus = np.diff(cdf_minus)
    with np.errstate(divide="ignore"):
        llrs = np.log(p_plus) - np.log(p_minus)
    # cells i and bins-1-i are mirror images: force exact antisymmetry
    llrs = 0.5 * (llrs - llrs[::-1])
    probs = p_plus / p_plus.sum()
    # rebuild the mirror masses from the symmetry relation to remove rounding drift
    for i in range(half):
        j = bins - 1 - i
        total = probs[i] + probs[j]
        lj = llrs[j]
        probs[j] = total / (1.0 + math.exp(-lj))
        probs[i] = total - probs[j]
    return DiscreteChannel(tuple(float(v) for v in llrs), tuple(float(v) for v in probs), name=f"q{bins}-biawgn({sigma})")


# ---------------------------------------------------------------------------
# puncturing


@dataclass(frozen=True)
class EffectiveChannel(ChannelModel):
    """``base`` preceded by a BEC that erases with the puncturing rate."""

    base: ChannelModel
    puncture_rate: float

    def __post_init__(self):
        if not 0.0 <= self.puncture_rate <= 1.0:
            raise ValidationError(f"puncture rate {self.puncture_rate!r} outside [0, 1]")

    @property
    def family(self) -> str:  # type: ignore[override]
        return self.base.family

    @property
    def moments_constant_in_p(self) -> bool:  # type: ignore[override]
        return self.puncture_rate == 1.0 or self.base.moments_constant_in_p

    @property
    def parameter(self) -> float:
        return self.base.parameter

    def capacity(self, ctrl=DEFAULT_CONTROLS) -> float:
        return (1.0 - self.puncture_rate) * self.base.capacity(ctrl)

    def g_moments(self, pmax, ctrl=DEFAULT_CONTROLS):
        out = (1.0 - self.puncture_rate) * np.asarray(self.base.g_moments(pmax, ctrl))
        out.setflags(write=False)
        return out

    def uncoded_error_prob(self) -> float:
        return 0.5 * self.puncture_rate + (1.0 - self.puncture_rate) * self.base.uncoded_error_prob()


def puncture_channel(ch: ChannelModel, pi: float) -> EffectiveChannel:
    return EffectiveChannel(ch, float(pi))


# ---------------------------------------------------------------------------
# functional interface


def capacity(ch: ChannelModel, ctrl: NumericControls = DEFAULT_CONTROLS) -> float:
    """Capacity in bits per channel use."""
    return ch.capacity(ctrl)


def g_moment(ch: ChannelModel, p: int, ctrl: NumericControls = DEFAULT_CONTROLS) -> float:
    if p < 1:
        raise ValidationError("moment order p must be >= 1")
    return float(ch.g_moments(int(p), ctrl)[p - 1])


def g_moments(ch: ChannelModel, pmax: int, ctrl: NumericControls = DEFAULT_CONTROLS) -> np.ndarray:
    if pmax < 1:
        raise ValidationError("pmax must be >= 1")
    return ch.g_moments(int(pmax), ctrl)


def uncoded_error_prob(ch: ChannelModel) -> float:
    return ch.uncoded_error_prob()


def make_channel(family: str, parameter: float) -> ChannelModel:
    """Build a channel of ``family`` from its natural parameter (eps, w or sigma)."""
    family = family.lower()
    if family == "bec":
        return BEC(parameter)
    if family == "bsc":
        return BSC(parameter)
    if family == "biawgn":
        return BIAWGN(parameter)
    raise ValidationError(f"unknown channel family {family!r}")
