"""Degree-distribution algebra for LDPC ensembles.

Edge-perspective polynomials carry ``x**(d-1)`` per degree ``d``; node
perspective polynomials carry ``x**d``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy import optimize

from .errors import ValidationError

EDGE = "edge"
NODE = "node"
VARIABLE = "variable"
CHECK = "check"

_SUM_TOL = 1e-12
_RENORMALIZE_TOL = 1e-9


@dataclass(frozen=True)
class DegreePolynomial:
    """Sparse degree distribution.

    ``terms`` is a sorted tuple of ``(degree, weight)`` pairs with strictly
    positive weights.  Use :meth:`from_mapping` to build one from a dict or
    from ``[[degree, weight], ...]`` pairs; it validates and, when the weights
    are off by no more than 1e-9 (rounded table coefficients), renormalizes.
    """

    terms: tuple[tuple[int, float], ...]
    perspective: str = EDGE
    side: str = VARIABLE

    def __post_init__(self):
        if self.perspective not in (EDGE, NODE):
            raise ValidationError(f"unknown perspective {self.perspective!r}")
        if self.side not in (VARIABLE, CHECK):
            raise ValidationError(f"unknown side {self.side!r}")
        if not self.terms:
            raise ValidationError("degree distribution has no terms")
        prev = 0
        for d, w in self.terms:
            if not isinstance(d, (int, np.integer)) or d < 1:
                raise ValidationError(f"degree must be a positive integer, got {d!r}")
            if d <= prev:
                raise ValidationError("degrees must be strictly increasing")
            if not (0.0 < w <= 1.0):
                raise ValidationError(f"weight {w!r} at degree {d} is outside (0, 1]")
            prev = d
        total = math.fsum(w for _, w in self.terms)
        if abs(total - 1.0) > _SUM_TOL:
            raise ValidationError(f"weights sum to {total!r}, not 1")

    @classmethod
    def from_mapping(
        cls,
        coefficients: Mapping[int, float] | Iterable[tuple[int, float]],
        perspective: str = EDGE,
        side: str = VARIABLE,
    ) -> "DegreePolynomial":
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        acc: dict[int, float] = {}
        for d, w in items:
            d_int = int(d)
            if d_int != d:
                raise ValidationError(f"degree must be an integer, got {d!r}")
            w = float(w)
            if w < 0 or not math.isfinite(w):
                raise ValidationError(f"invalid weight {w!r} at degree {d_int}")
            acc[d_int] = acc.get(d_int, 0.0) + w
        acc = {d: w for d, w in acc.items() if w > 0}
        if not acc:
            raise ValidationError("degree distribution has no positive weights")
        total = math.fsum(acc.values())
        drift = abs(total - 1.0)
        if drift > _RENORMALIZE_TOL:
            raise ValidationError(f"weights sum to {total!r}; drift {drift:.3g} exceeds 1e-9")
        if drift > _SUM_TOL:
            warnings.warn(
                f"renormalizing {side} degree distribution (sum {total!r})", stacklevel=2
            )
        if drift > 0:
            acc = {d: w / total for d, w in acc.items()}
        return cls(tuple(sorted(acc.items())), perspective, side)

    @property
    def coefficients(self) -> dict[int, float]:
        return dict(self.terms)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([d for d, _ in self.terms], dtype=int)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.terms], dtype=float)

    @property
    def min_degree(self) -> int:
        return self.terms[0][0]

    @property
    def max_degree(self) -> int:
        return self.terms[-1][0]

    def __call__(self, x):
        """Evaluate the polynomial (elementwise for arrays)."""
        x = np.asarray(x, dtype=float)
        shift = 1 if self.perspective == EDGE else 0
        out = np.zeros_like(x)
        for d, w in self.terms:
            out = out + w * x ** (d - shift)
        return out if out.ndim else float(out)

    def integral(self) -> float:
        """Integral over [0, 1]."""
        shift = 1 if self.perspective == EDGE else 0
        return math.fsum(w / (d - shift + 1) for d, w in self.terms)

    def derivative_at_one(self) -> float:
        shift = 1 if self.perspective == EDGE else 0
        return math.fsum(w * (d - shift) for d, w in self.terms)

    def mean_degree(self) -> float:
        """Average node degree, whichever perspective the polynomial uses."""
        if self.perspective == NODE:
            return self.derivative_at_one()
        return 1.0 / self.integral()

    def with_side(self, side: str) -> "DegreePolynomial":
        return DegreePolynomial(self.terms, self.perspective, side)


def _require_normalized(d: DegreePolynomial) -> None:
    total = math.fsum(w for _, w in d.terms)
    if abs(total - 1.0) > _SUM_TOL:
        raise ValidationError(f"distribution is not normalized (sum {total!r})")


def convert(d: DegreePolynomial, target: str) -> DegreePolynomial:
    """Switch ``d`` to the ``target`` perspective (``"edge"`` or ``"node"``)."""
    if target not in (EDGE, NODE):
        raise ValidationError(f"unknown perspective {target!r}")
    _require_normalized(d)
    if target == d.perspective:
        return d
    if target == NODE:
        raw = [(deg, w / deg) for deg, w in d.terms]
    else:
        raw = [(deg, w * deg) for deg, w in d.terms]
    total = math.fsum(w for _, w in raw)
    terms = tuple((deg, w / total) for deg, w in raw)
    # guard against the last-ulp drift of the division
    s = math.fsum(w for _, w in terms)
    if s != 1.0:
        terms = tuple((deg, w / s) for deg, w in terms)
    return DegreePolynomial(terms, target, d.side)


def to_edge(d: DegreePolynomial) -> DegreePolynomial:
    return convert(d, EDGE)


def to_node(d: DegreePolynomial) -> DegreePolynomial:
    return convert(d, NODE)


def _check_pair(lambda_edge: DegreePolynomial, rho_edge: DegreePolynomial) -> None:
    if lambda_edge.side != VARIABLE or rho_edge.side != CHECK:
        raise ValidationError("expected a variable-side lambda and a check-side rho")
    if lambda_edge.perspective != EDGE or rho_edge.perspective != EDGE:
        raise ValidationError("design_rate expects edge-perspective distributions")


def design_rate(lambda_edge: DegreePolynomial, rho_edge: DegreePolynomial) -> float:
    """``1 - int(rho) / int(lambda)``, cross-checked against the node form."""
    _check_pair(lambda_edge, rho_edge)
    rate = 1.0 - rho_edge.integral() / lambda_edge.integral()
    node_rate = 1.0 - to_node(lambda_edge).derivative_at_one() / to_node(rho_edge).derivative_at_one()
    if abs(rate - node_rate) > 1e-12:
        raise ArithmeticError(f"edge and node design rates disagree: {rate!r} vs {node_rate!r}")
    return rate


def average_right_degree(rho_edge: DegreePolynomial) -> float:
    if rho_edge.side != CHECK or rho_edge.perspective != EDGE:
        raise ValidationError("average_right_degree expects an edge-perspective check distribution")
    return 1.0 / rho_edge.integral()


def _log2_one_plus_power(r: float, i: np.ndarray) -> np.ndarray:
    # log2(1 + r**i) for r in [-1, 1], accurate when 1 + r**i is tiny
    if r >= 0:
        return np.log1p(r ** i) / math.log(2)
    if r == -1.0:
        with np.errstate(divide="ignore"):
            return np.where(i % 2 == 0, 1.0, -np.inf)
    s = i * math.log(-r)
    with np.errstate(divide="ignore"):
        odd = np.log(-np.expm1(s))
    even = np.log1p(np.exp(s))
    return np.where(i % 2 == 0, even, odd) / math.log(2)


def _v_of_u(u: float, lam: DegreePolynomial) -> float:
    i = lam.degrees.astype(float)
    w = lam.weights
    if u <= 1.0:
        num = np.sum(w * u ** (i - 1) / (1 + u ** i))
        den = np.sum(w / (1 + u ** i))
        return float(num / den)
    t = 1.0 / u
    num = np.sum(w * t / (1 + t ** i))
    den = np.sum(w * t ** i / (1 + t ** i))
    if den == 0.0:
        return math.inf
    return float(num / den)


def psi(
    u: float,
    lambda_edge: DegreePolynomial,
    Lambda_node: DegreePolynomial | None = None,
    Gamma_node: DegreePolynomial | None = None,
    rho_edge: DegreePolynomial | None = None,
) -> float:
    """Rate-convergence functional of a ``(Lambda, Gamma)`` ensemble at ``u``.

    Either ``Gamma_node`` or ``rho_edge`` must be given; ``Lambda_node``
    defaults to the node form of ``lambda_edge``.  ``u = inf`` returns the
    analytic limit, which is ``-inf`` whenever some check degree is odd.
    """
    if Lambda_node is None:
        Lambda_node = to_node(lambda_edge)
    if Gamma_node is None:
        if rho_edge is None:
            raise ValidationError("psi needs Gamma_node or rho_edge")
        Gamma_node = to_node(rho_edge)
    if u < 0 or math.isnan(u):
        raise ValidationError(f"psi is defined for u >= 0, got {u!r}")

    lam_prime = Lambda_node.derivative_at_one()
    gam_prime = Gamma_node.derivative_at_one()
    li = Lambda_node.degrees.astype(float)
    lw = Lambda_node.weights
    gi = Gamma_node.degrees
    gw = Gamma_node.weights

    if math.isinf(u):
        lam1 = lambda_edge.coefficients.get(1, 0.0)
        if lam1 > 0:
            v = 1.0 / lam1
            first = math.log2(v / (1 + v))
        else:
            v = math.inf
            first = 0.0
        second = -math.fsum(lw)
    else:
        v = _v_of_u(u, lambda_edge)
        if u <= 1.0:
            first = math.log2((1 + u * v) / ((1 + u) * (1 + v))) if not math.isinf(v) else math.log2(u / (1 + u))
            second = float(np.sum(lw * (np.log2(1 + u ** li) - 1 - li * np.log2(1 + u))))
        else:
            t = 1.0 / u
            if math.isinf(v):
                first = math.log2(1 / (1 + t))
            else:
                first = math.log2((t + v) / ((1 + t) * (1 + v)))
            second = float(np.sum(lw * (np.log2(1 + t ** li) - 1 - li * np.log2(1 + t))))

    r = -1.0 if math.isinf(v) else (1 - v) / (1 + v)
    third_terms = _log2_one_plus_power(r, gi)
    with np.errstate(invalid="ignore"):
        third = float(np.sum(gw * third_terms))
    return -lam_prime * first + second + (lam_prime / gam_prime) * third


@dataclass(frozen=True)
class GridSpec:
    """Log-spaced search grid for :func:`check_rate_convergence`."""

    u_min: float = 1e-6
    u_max: float = 1e6
    points: int = 2000
    refine: bool = True


@dataclass(frozen=True)
class RateConvergence:
    passes: bool
    argmax: float
    max_value: float
    psi_at_one: float = field(default=0.0)


def check_rate_convergence(
    lambda_edge: DegreePolynomial,
    rho_edge: DegreePolynomial,
    grid_spec: GridSpec | None = None,
    tol: float = 1e-9,
) -> RateConvergence:
    """Numerically test whether ``psi`` peaks at ``u = 1``.

    A pass is numerical support for the sufficient condition, not a proof.
    Ties (within 1e-12) resolve to the smallest ``u``.
    """
    _check_pair(lambda_edge, rho_edge)
    g = grid_spec or GridSpec()
    Lam = to_node(lambda_edge)
    Gam = to_node(rho_edge)
    us = np.unique(np.concatenate([np.geomspace(g.u_min, g.u_max, g.points), [1.0]]))
    vals = np.array([psi(float(u), lambda_edge, Lam, Gam) for u in us])
    k = int(np.argmax(vals))
    best_u, best_val = float(us[k]), float(vals[k])

    if g.refine and 0 < k < len(us) - 1:
        f = lambda u: -psi(float(u), lambda_edge, Lam, Gam)
        lo, hi = float(us[k - 1]), float(us[k + 1])
        res = optimize.minimize_scalar(
            f, bracket=(lo, best_u, hi), method="golden", options={"xtol": 1e-10}
        )
        if lo <= res.x <= hi and -res.fun > best_val + 1e-12:
            best_u, best_val = float(res.x), float(-res.fun)

    ties = us[vals >= best_val - 1e-12]
    if len(ties) and ties[0] < best_u:
        best_u = float(ties[0])

    at_one = psi(1.0, lambda_edge, Lam, Gam)
    return RateConvergence(
        passes=bool(best_val <= at_one + tol),
        argmax=best_u,
        max_value=best_val,
        psi_at_one=at_one,
    )


@dataclass(frozen=True)
class Ensemble:
    """An LDPC ensemble given by its edge-perspective pair ``(lambda, rho)``."""

    lambda_edge: DegreePolynomial
    rho_edge: DegreePolynomial

    def __post_init__(self):
        _check_pair(self.lambda_edge, self.rho_edge)

    @classmethod
    def from_pairs(cls, lam, rho, perspective: str = EDGE) -> "Ensemble":
        lam_p = DegreePolynomial.from_mapping(lam, perspective, VARIABLE)
        rho_p = DegreePolynomial.from_mapping(rho, perspective, CHECK)
        return cls(to_edge(lam_p), to_edge(rho_p))

    @property
    def Lambda_node(self) -> DegreePolynomial:
        return to_node(self.lambda_edge)

    @property
    def Gamma_node(self) -> DegreePolynomial:
        return to_node(self.rho_edge)

    @property
    def design_rate(self) -> float:
        return design_rate(self.lambda_edge, self.rho_edge)

    @property
    def average_right_degree(self) -> float:
        return average_right_degree(self.rho_edge)
