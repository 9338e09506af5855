"""Density evolution for sum-product decoding of (punctured) LDPC ensembles.

Two engines are provided.  The BEC engine is the exact scalar erasure
recursion.  The BIAWGN engine tracks quantized LLR densities on a uniform
grid: variable nodes convolve densities with FFTs, and check nodes combine
two densities at a time through a precomputed lookup table of
``2 atanh(tanh(a/2) tanh(b/2))`` on the magnitude grid, carrying the sign
separately.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sfft
from scipy import special

from .degree import DegreePolynomial
from .errors import ValidationError


@dataclass(frozen=True)
class DEControls:
    llr_quantization_step: float = 0.04
    llr_range: float = 30.0
    max_iterations: int = 2000
    target_error: float = 1e-6
    bisection_tol_db: float = 1e-3
    # a run that improves by less than this relative amount for
    # ``stall_iterations`` consecutive iterations is declared stuck
    stall_rel_tol: float = 1e-5
    stall_iterations: int = 20

    def __post_init__(self):
        for name in ("llr_quantization_step", "llr_range", "max_iterations", "target_error",
                     "bisection_tol_db", "stall_rel_tol", "stall_iterations"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if self.llr_range / self.llr_quantization_step > 5000:
            raise ValidationError("LLR grid too fine: range/step must not exceed 5000")


@dataclass(frozen=True)
class DEOutcome:
    converged: bool
    iterations: int
    error_probability: float


def _puncture_rates(lam: DegreePolynomial, pi: dict[int, float]) -> dict[int, float]:
    return {d: float(pi.get(d, 0.0)) for d in lam.coefficients}


# ---------------------------------------------------------------------------
# BEC


def bec_recursion(
    lam: DegreePolynomial,
    rho: DegreePolynomial,
    eps: float,
    pi: dict[int, float] | None = None,
    ctrl: DEControls = DEControls(),
) -> DEOutcome:
    """Erasure recursion ``x <- sum_j lam_j e_j (1 - rho(1 - x))**(j-1)``.

    ``e_j = 1 - (1 - pi_j)(1 - eps)`` is the erasure probability seen by a
    degree-``j`` bit once puncturing is folded into the channel.
    """
    rates = _puncture_rates(lam, pi or {})
    degs = lam.degrees
    e = np.array([1.0 - (1.0 - rates[int(d)]) * (1.0 - eps) for d in degs])
    w = lam.weights * e
    x = float(w.sum())
    for it in range(1, ctrl.max_iterations + 1):
        y = 1.0 - float(rho(1.0 - x))
        x_new = float(np.sum(w * y ** (degs - 1)))
        if x_new < ctrl.target_error:
            return DEOutcome(True, it, x_new)
        if x_new >= x:
            return DEOutcome(False, it, x_new)
        x = x_new
    return DEOutcome(False, ctrl.max_iterations, x)


# ---------------------------------------------------------------------------
# BIAWGN


@lru_cache(maxsize=4)
def _check_table(K: int, step: float) -> tuple[np.ndarray, int]:
    """Quantized check-node output magnitude for every pair of input bins.

    Far from the diagonal the output is exactly ``min(i, j)``, so only a band
    of half-width ``D`` is stored: ``band[i, D + d]`` is the output index for
    the pair ``(i, i + d)``.
    """
    m = np.arange(K + 1) * step
    t = np.tanh(m / 2.0)
    prod = np.minimum(np.outer(t, t), np.nextafter(1.0, 0.0))
    full = np.minimum(np.rint(2.0 * np.arctanh(prod) / step).astype(np.int64), K)
    i, j = np.indices(full.shape)
    off = np.abs(i - j)[full != np.minimum(i, j)]
    D = int(off.max()) if off.size else 0
    cols = np.arange(K + 1)[:, None] + np.arange(-D, D + 1)[None, :]
    valid = (cols >= 0) & (cols <= K)
    band = np.where(valid, full[np.arange(K + 1)[:, None], np.clip(cols, 0, K)], 0)
    band = band.ravel()
    band.setflags(write=False)
    return band, D


class _Grid:
    def __init__(self, ctrl: DEControls):
        self.step = ctrl.llr_quantization_step
        self.K = int(round(ctrl.llr_range / self.step))
        self.N = 2 * self.K + 1
        self.llr = np.arange(-self.K, self.K + 1) * self.step
        self.band, self.D = _check_table(self.K, self.step)
        self.fft_len = sfft.next_fast_len(2 * self.N - 1)

    def quantize_gaussian(self, mean: float, std: float) -> np.ndarray:
        edges = np.concatenate(([-np.inf], self.llr[:-1] + self.step / 2, [np.inf]))
        return np.diff(special.ndtr((edges - mean) / std))

    def delta_zero(self) -> np.ndarray:
        out = np.zeros(self.N)
        out[self.K] = 1.0
        return out

    def convolve(self, x: np.ndarray, fy: np.ndarray) -> np.ndarray:
        """Convolve ``x`` with the density whose spectrum is ``fy``; mass
        leaving the grid is clamped to the end bins."""
        K, N = self.K, self.N
        full = sfft.irfft(sfft.rfft(x, self.fft_len) * fy, self.fft_len)[: 2 * N - 1]
        out = full[K : K + N].copy()
        out[0] += full[:K].sum()
        out[-1] += full[K + N :].sum()
        return np.maximum(out, 0.0)

    def spectrum(self, x: np.ndarray) -> np.ndarray:
        return sfft.rfft(x, self.fft_len)

    def split(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(positive, negative) mass per magnitude bin; magnitude 0 counts as positive."""
        K = self.K
        pos = v[K:].copy()
        neg = np.concatenate(([0.0], v[K - 1 :: -1]))
        return pos, neg

    def join(self, pos: np.ndarray, neg: np.ndarray) -> np.ndarray:
        K = self.K
        out = np.zeros(self.N)
        out[K:] = pos
        out[K - 1 :: -1] += neg[1:]
        out[K] += neg[0]
        return out

    def _pair_sum(self, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        """``out[k] = sum of u[i] * w[j]`` over pairs whose check output is bin ``k``."""
        n, D = self.K + 1, self.D
        out = np.zeros(n)
        if D + 1 < n:
            # outside the band the output is the smaller index
            su = np.concatenate((np.cumsum(u[::-1])[::-1], [0.0]))
            sw = np.concatenate((np.cumsum(w[::-1])[::-1], [0.0]))
            k = np.arange(n - D - 1)
            out[: n - D - 1] = u[k] * sw[k + D + 1] + w[k] * su[k + D + 1]
        wins = np.lib.stride_tricks.sliding_window_view(np.pad(w, D), 2 * D + 1)
        out += np.bincount(self.band, weights=(u[:, None] * wins).ravel(), minlength=n)
        return out

    def box(self, a: tuple[np.ndarray, np.ndarray], b: tuple[np.ndarray, np.ndarray]):
        """Check-node combination of two independent messages."""
        ap, an = a
        bp, bn = b
        # same-sign and opposite-sign masses from their sum and difference
        tot = self._pair_sum(ap + an, bp + bn)
        sgn = self._pair_sum(ap - an, bp - bn)
        pos = 0.5 * (tot + sgn)
        neg = 0.5 * (tot - sgn)
        pos[0] += neg[0]
        neg[0] = 0.0
        return np.maximum(pos, 0.0), np.maximum(neg, 0.0)


def biawgn_de(
    lam: DegreePolynomial,
    rho: DegreePolynomial,
    sigma: float,
    pi: dict[int, float] | None = None,
    ctrl: DEControls = DEControls(),
) -> DEOutcome:
    """Run quantized density evolution at noise level ``sigma``.

    Punctured bits of degree ``j`` start from a point mass at LLR 0 with
    probability ``pi_j``; the degree classes keep separate channel mixtures.
    """
    grid = _Grid(ctrl)
    rates = _puncture_rates(lam, pi or {})
    lam_c = lam.coefficients
    rho_c = rho.coefficients
    a = grid.quantize_gaussian(2.0 / sigma**2, 2.0 / sigma)
    fa = grid.spectrum(a)
    delta = grid.delta_zero()
    v = sum(lam_c[d] * (rates[d] * delta + (1.0 - rates[d]) * a) for d in lam_c)
    dc_max = rho.max_degree
    dv_max = lam.max_degree

    pe_prev = 1.0
    stall = 0
    K = grid.K
    for it in range(1, ctrl.max_iterations + 1):
        base = grid.split(v)
        c = np.zeros(grid.N)
        if 1 in rho_c:
            c += rho_c[1] * delta
        acc = base
        for k in range(2, dc_max + 1):
            if k in rho_c:
                c += rho_c[k] * grid.join(*acc)
            if k < dc_max:
                acc = grid.box(acc, base)
        c /= c.sum()

        fc = grid.spectrum(c)
        power = delta
        new_v = np.zeros(grid.N)
        for k in range(1, dv_max + 1):
            if k > 1:
                power = c if k == 2 else grid.convolve(power, fc)
            if k in lam_c:
                p = rates[k]
                new_v += lam_c[k] * (p * power + (1.0 - p) * grid.convolve(power, fa))
        v = new_v / new_v.sum()

        pe = float(v[:K].sum() + 0.5 * v[K])
        if pe < ctrl.target_error:
            return DEOutcome(True, it, pe)
        if pe >= pe_prev * (1.0 - ctrl.stall_rel_tol):
            stall += 1
            if stall >= ctrl.stall_iterations:
                return DEOutcome(False, it, pe)
        else:
            stall = 0
        pe_prev = pe
    return DEOutcome(False, ctrl.max_iterations, pe)
