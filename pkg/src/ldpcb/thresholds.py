"""Threshold searches: capacity limit, ML bound and iterative decoding.

Channel quality is expressed by the natural parameter of each family:
``E_b/N_0`` in dB for the BIAWGN channel (larger is better), the erasure
probability for the BEC and the crossover probability for the BSC (smaller
is better).  Every search returns the worst parameter that still works.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .bounds_rate import punctured_design_rate, rate_bound_ip, rate_bound_rp
from .channel import (
    BEC,
    BIAWGN,
    BSC,
    DEFAULT_CONTROLS,
    NumericControls,
    ebno_db_to_sigma,
    h2,
    sigma_to_ebno_db,
)
from .degree import Ensemble
from .density_evolution import DEControls, bec_recursion, biawgn_de
from .errors import BracketError, DegenerateBoundError, MonotonicityError, ValidationError
from .parallel import IntentionalPuncturing, RandomPuncturing

FAMILIES = ("biawgn", "bec", "bsc")

_SAMPLES = 13
_MAX_EXPANSIONS = 6


@dataclass(frozen=True)
class ThresholdRow:
    pattern_id: int
    design_rate: float
    capacity_limit_db: float
    ml_bound_db: float
    it_threshold_db: float | None = None
    fractional_gap: float | None = None


def _check_family(family: str) -> str:
    family = family.lower()
    if family not in FAMILIES:
        raise ValidationError(f"unknown channel family {family!r}")
    return family


def overall_puncturing(ensemble: Ensemble, pattern) -> float:
    if pattern is None:
        return 0.0
    if isinstance(pattern, RandomPuncturing):
        return pattern.overall_rate
    return pattern.bit_fraction(ensemble.lambda_edge)


def pattern_design_rate(ensemble: Ensemble, pattern) -> float:
    gamma = overall_puncturing(ensemble, pattern)
    if gamma >= 1.0:
        raise DegenerateBoundError("every code bit is punctured")
    return punctured_design_rate(ensemble.design_rate, gamma)


def capacity_limit(rate: float, family: str, ctrl: NumericControls = DEFAULT_CONTROLS) -> float:
    """Channel parameter at which capacity equals ``rate``."""
    family = _check_family(family)
    if not 0.0 < rate < 1.0:
        raise ValidationError(f"rate {rate!r} must lie strictly between 0 and 1")
    if family == "bec":
        return 1.0 - rate
    if family == "bsc":
        return optimize.brentq(lambda w: 1.0 - h2(w) - rate, 0.0, 0.5, xtol=1e-15)
    # capacity decreases in sigma; bracket it on a log scale
    f = lambda ls: BIAWGN(math.exp(ls)).capacity(ctrl) - rate
    lo, hi = -3.0, 3.0
    while f(lo) < 0:
        lo -= 2.0
    while f(hi) > 0:
        hi += 2.0
    sigma = math.exp(optimize.brentq(f, lo, hi, xtol=1e-14))
    return sigma_to_ebno_db(sigma, rate)


def _channel(family: str, theta: float, rate: float):
    if family == "biawgn":
        return BIAWGN(ebno_db_to_sigma(theta, rate))
    if family == "bec":
        return BEC(theta)
    return BSC(theta)


def _better(family: str) -> int:
    """+1 when larger parameters mean a better channel."""
    return 1 if family == "biawgn" else -1


def _bound_for(ensemble: Ensemble, pattern, ctrl: NumericControls):
    lam, gam = ensemble.lambda_edge, ensemble.Gamma_node
    if isinstance(pattern, RandomPuncturing):
        return lambda ch: rate_bound_rp(lam, gam, ch, pattern, ctrl).value
    pat = pattern or IntentionalPuncturing()
    Lam = ensemble.Lambda_node
    return lambda ch: rate_bound_ip(lam, gam, ch, pat, ctrl, Lambda_node=Lam).value


def _search_interval(family: str, cap: float, rate: float) -> tuple[float, float]:
    # (worse end, better end) of the parameter range to sample
    if family == "biawgn":
        return cap, cap + 6.0
    return cap, 0.0


def ml_threshold(
    ensemble: Ensemble,
    pattern=None,
    family: str = "biawgn",
    ctrl: NumericControls = DEFAULT_CONTROLS,
    tol: float = 1e-6,
) -> float:
    """Worst channel parameter at which the rate bound still reaches the
    punctured design rate.

    The bound is sampled along the bracket first; a sampled decrease in the
    bound as the channel improves raises MonotonicityError instead of
    bisecting through it.
    """
    family = _check_family(family)
    rate = pattern_design_rate(ensemble, pattern)
    bound = _bound_for(ensemble, pattern, ctrl)

    def excess(theta: float) -> float:
        try:
            return bound(_channel(family, theta, rate)) - rate
        except DegenerateBoundError:
            return -rate

    cap = capacity_limit(rate, family, ctrl)
    worse, better = _search_interval(family, cap, rate)
    for _ in range(_MAX_EXPANSIONS):
        thetas = np.linspace(worse, better, _SAMPLES)
        vals = np.array([excess(t) for t in thetas])
        slack = 1e-9 + 10 * ctrl.series_tol
        if np.any(np.diff(vals) < -slack):
            k = int(np.argmax(np.diff(vals) < -slack))
            raise MonotonicityError(
                f"rate bound decreases between parameters {thetas[k]:.6g} and {thetas[k + 1]:.6g}"
            )
        ok = np.nonzero(vals >= 0)[0]
        if len(ok):
            k = int(ok[0])
            if k == 0:
                return float(thetas[0])
            return float(optimize.brentq(excess, thetas[k - 1], thetas[k], xtol=tol))
        if family != "biawgn":
            break
        worse, better = better, better + 2.0 * (better - worse)
    raise BracketError("the rate bound never reaches the design rate on the searched range")


def de_converges(
    ensemble: Ensemble,
    pattern: IntentionalPuncturing | None,
    family: str,
    theta: float,
    de_ctrl: DEControls = DEControls(),
) -> bool:
    family = _check_family(family)
    pi = dict(pattern.pi) if pattern is not None else {}
    lam, rho = ensemble.lambda_edge, ensemble.rho_edge
    if family == "bec":
        return bec_recursion(lam, rho, theta, pi, de_ctrl).converged
    if family == "biawgn":
        rate = pattern_design_rate(ensemble, pattern)
        return biawgn_de(lam, rho, ebno_db_to_sigma(theta, rate), pi, de_ctrl).converged
    raise ValidationError("density evolution is available for the biawgn and bec families")


def _bisect(works: Callable[[float], bool], bad: float, good: float, tol: float) -> float:
    while abs(good - bad) > tol:
        mid = 0.5 * (bad + good)
        if works(mid):
            good = mid
        else:
            bad = mid
    return good


def de_threshold(
    ensemble: Ensemble,
    pattern: IntentionalPuncturing | None = None,
    family: str = "biawgn",
    de_ctrl: DEControls = DEControls(),
    start: float | None = None,
    tol: float | None = None,
) -> float:
    """Iterative-decoding threshold by bisection over density evolution.

    ``start`` is a parameter where decoding is expected to fail (for example
    the ML threshold); by default the capacity limit is used.
    """
    family = _check_family(family)
    if pattern is not None and not isinstance(pattern, IntentionalPuncturing):
        raise ValidationError("density evolution supports intentional puncturing patterns")
    if overall_puncturing(ensemble, pattern) >= 1.0:
        raise BracketError("every code bit is punctured; decoding cannot succeed")
    works = lambda t: de_converges(ensemble, pattern, family, t, de_ctrl)

    if family == "bec":
        tol = 1e-6 if tol is None else tol
        if works(0.0) is False:
            raise BracketError("density evolution fails even on a noiseless channel")
        bad = 1.0 if start is None else start
        if works(bad):
            return bad
        return _bisect(works, bad, 0.0, tol)

    tol = de_ctrl.bisection_tol_db if tol is None else tol
    rate = pattern_design_rate(ensemble, pattern)
    bad = capacity_limit(rate, family) if start is None else float(start)
    width = 0.5
    good = bad + width
    for _ in range(_MAX_EXPANSIONS):
        if works(good):
            break
        bad, width = good, 2.0 * width
        good = bad + width
    else:
        raise BracketError("density evolution did not converge anywhere on the searched range")
    if works(bad):
        # start was already above threshold: walk down toward capacity
        cap = capacity_limit(rate, family)
        good = bad
        bad = cap
        if works(bad):
            raise BracketError("density evolution converges at the capacity limit")
    return _bisect(works, bad, good, tol)


def fractional_gap(cap_db: float, ml_db: float, it_db: float) -> float:
    """Share of the iterative gap to capacity that remains under ML decoding."""
    if it_db <= cap_db:
        raise ValidationError("iterative threshold must lie above the capacity limit")
    return (ml_db - cap_db) / (it_db - cap_db)


def table_row(
    ensemble: Ensemble,
    pattern: IntentionalPuncturing | None,
    pattern_id: int = 0,
    family: str = "biawgn",
    ctrl: NumericControls = DEFAULT_CONTROLS,
    de_ctrl: DEControls | None = None,
) -> ThresholdRow:
    rate = pattern_design_rate(ensemble, pattern)
    cap = capacity_limit(rate, family, ctrl)
    ml = ml_threshold(ensemble, pattern, family, ctrl)
    it = gap = None
    if de_ctrl is not None:
        it = de_threshold(ensemble, pattern, family, de_ctrl, start=ml)
        gap = fractional_gap(cap, ml, it)
    return ThresholdRow(pattern_id, rate, cap, ml, it, gap)


def table_report(
    ensemble: Ensemble,
    patterns: Sequence[IntentionalPuncturing | None],
    family: str = "biawgn",
    ctrl: NumericControls = DEFAULT_CONTROLS,
    de_ctrl: DEControls | None = None,
    workers: int = 1,
) -> list[ThresholdRow]:
    """One row per pattern, in input order.  ``de_ctrl=None`` skips density evolution."""
    jobs = list(enumerate(patterns, start=1))
    if workers <= 1 or len(jobs) <= 1:
        return [table_row(ensemble, p, i, family, ctrl, de_ctrl) for i, p in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(table_row, ensemble, p, i, family, ctrl, de_ctrl) for i, p in jobs]
        return [f.result() for f in futures]
