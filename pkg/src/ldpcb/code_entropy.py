"""Conditional-entropy bounds for explicit parity-check matrices.

The exact oracle uses the magnitude/sign split of an MBIOS channel: given
the LLR magnitudes ``omega``, the channel acts as independent BSCs with
crossover ``1 / (1 + e**omega)``.  The syndrome law of that noise follows
from its Walsh-Hadamard transform, so no output sequence is enumerated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import linalg

from .bounds_rate import BoundResult
from .channel import (
    DEFAULT_CONTROLS,
    LN2,
    ChannelModel,
    NumericControls,
    as_discrete,
    h2,
    series_tail,
    series_weights,
)
from .errors import InstanceTooLargeError, ValidationError

MAX_ORACLE_N = 14
MAX_ORACLE_CONFIGS = 1 << 20
MAX_ORACLE_ROWS = 12


@dataclass(frozen=True)
class ParityCheckMatrix:
    n: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("block length must be positive")
        if not self.rows:
            raise ValidationError("parity-check matrix needs at least one row")
        for r in self.rows:
            if not r:
                raise ValidationError("empty parity-check rows are not allowed")
            if len(set(r)) != len(r):
                raise ValidationError("duplicate column index within a row")
            if min(r) < 0 or max(r) >= self.n:
                raise ValidationError(f"column index out of range [0, {self.n})")

    @classmethod
    def from_rows(cls, n: int, rows: Sequence[Sequence[int]]) -> "ParityCheckMatrix":
        return cls(int(n), tuple(tuple(sorted(int(i) for i in r)) for r in rows))

    @classmethod
    def from_dense(cls, H) -> "ParityCheckMatrix":
        H = np.asarray(H, dtype=int) % 2
        return cls.from_rows(H.shape[1], [np.nonzero(r)[0] for r in H])

    @property
    def c(self) -> int:
        return len(self.rows)

    @property
    def design_rate(self) -> float:
        return 1.0 - self.c / self.n

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.c, self.n), dtype=np.uint8)
        for m, r in enumerate(self.rows):
            H[m, list(r)] = 1
        return H

    def rank(self) -> int:
        return len(gf2_rref(self.to_dense())[1])

    @property
    def rate(self) -> float:
        return (self.n - self.rank()) / self.n

    # -- alist -----------------------------------------------------------
    def to_alist(self) -> str:
        cols: list[list[int]] = [[] for _ in range(self.n)]
        for m, r in enumerate(self.rows):
            for i in r:
                cols[i].append(m)
        dc = max(len(c) for c in cols)
        dr = max(len(r) for r in self.rows)
        lines = [f"{self.n} {self.c}", f"{dc} {dr}"]
        lines.append(" ".join(str(len(c)) for c in cols))
        lines.append(" ".join(str(len(r)) for r in self.rows))
        for c in cols:
            lines.append(" ".join(str(m + 1) for m in c) + " 0" * (dc - len(c)))
        for r in self.rows:
            lines.append(" ".join(str(i + 1) for i in r) + " 0" * (dr - len(r)))
        return "\n".join(line.strip() for line in lines) + "\n"

    @classmethod
    def from_alist(cls, text: str) -> "ParityCheckMatrix":
        try:
            tok = [int(t) for t in text.split()]
            n, c = tok[0], tok[1]
            pos = 4 + n + c
            col_deg = tok[4 : 4 + n]
            row_deg = tok[4 + n : 4 + n + c]
            dc, dr = tok[2], tok[3]
            cols = []
            for j in range(n):
                cols.append([v - 1 for v in tok[pos : pos + dc][: col_deg[j]]])
                pos += dc
            rows = []
            for m in range(c):
                rows.append([v - 1 for v in tok[pos : pos + dr][: row_deg[m]]])
                pos += dr
        except (IndexError, ValueError):
            raise ValidationError("malformed alist text") from None
        H = cls.from_rows(n, rows)
        # the column section must describe the same matrix
        seen = {(m, i) for m, r in enumerate(H.rows) for i in r}
        from_cols = {(m, j) for j, cm in enumerate(cols) for m in cm}
        if seen != from_cols:
            raise ValidationError("alist column and row sections disagree")
        return H

    @classmethod
    def read(cls, path: str | Path) -> "ParityCheckMatrix":
        """Read an alist file, or JSON ``{"n": .., "rows": [[..], ..]}`` (0-based)."""
        text = Path(path).read_text()
        if text.lstrip().startswith("{"):
            import json

            data = json.loads(text)
            return cls.from_rows(data["n"], data["rows"])
        return cls.from_alist(text)


def gf2_rref(H: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and the pivot columns."""
    A = np.array(H, dtype=np.uint8) % 2
    pivots: list[int] = []
    r = 0
    rows, cols = A.shape
    for j in range(cols):
        if r == rows:
            break
        hit = np.nonzero(A[r:, j])[0]
        if not len(hit):
            continue
        k = r + hit[0]
        A[[r, k]] = A[[k, r]]
        others = np.nonzero(A[:, j])[0]
        others = others[others != r]
        A[others] ^= A[r]
        pivots.append(j)
        r += 1
    return A, pivots


def information_set(H: ParityCheckMatrix) -> list[int]:
    """Positions that carry the information bits under a systematic encoder."""
    _, piv = gf2_rref(H.to_dense())
    return [j for j in range(H.n) if j not in set(piv)]


@dataclass(frozen=True)
class BitAssignment:
    channel_of: tuple[int, ...]

    def __post_init__(self):
        if not self.channel_of:
            raise ValidationError("empty bit assignment")
        if min(self.channel_of) < 0:
            raise ValidationError("channel indices must be non-negative")
        used = set(self.channel_of)
        if used != set(range(max(used) + 1)):
            raise ValidationError("every channel index must be used by at least one bit")

    @classmethod
    def single(cls, n: int) -> "BitAssignment":
        return cls((0,) * n)

    @property
    def J(self) -> int:
        return max(self.channel_of) + 1

    @property
    def fractions(self) -> np.ndarray:
        return np.bincount(self.channel_of, minlength=self.J) / len(self.channel_of)


def beta_counts(H: ParityCheckMatrix, a: BitAssignment) -> np.ndarray:
    """``beta[j, m]``: bits of row ``m`` that are sent over channel ``j``."""
    if len(a.channel_of) != H.n:
        raise ValidationError("assignment length differs from the block length")
    beta = np.zeros((a.J, H.c), dtype=int)
    ch = np.asarray(a.channel_of)
    for m, r in enumerate(H.rows):
        beta[:, m] = np.bincount(ch[list(r)], minlength=a.J)
    return beta


def syndrome_prob_one(alphas: Sequence[float]) -> float:
    """Probability that a parity check is violated by the hard decisions
    when its bits have LLR magnitudes ``alphas``."""
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas < 0):
        raise ValidationError("LLR magnitudes must be non-negative")
    return 0.5 * (1.0 - float(np.prod(np.tanh(alphas / 2.0))))


def _row_products(log_g: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """``sum_m prod_j g[j, p] ** beta[j, m]`` for every ``p``, in the log domain.

    ``log_g`` has shape (J, P) and may contain ``-inf`` for zero moments.
    """
    with np.errstate(invalid="ignore"):
        terms = np.where(beta[:, :, None] > 0, beta[:, :, None] * log_g[:, None, :], 0.0)
    return np.exp(terms.sum(axis=0)).sum(axis=0)


def entropy_lower_bound(
    H: ParityCheckMatrix,
    a: BitAssignment,
    channels: Sequence[ChannelModel],
    ctrl: NumericControls = DEFAULT_CONTROLS,
) -> BoundResult:
    """Lower bound on ``H(X|Y) / n`` for one code and one bit-to-channel map."""
    if len(channels) != a.J:
        raise ValidationError(f"assignment uses {a.J} channels but {len(channels)} were given")
    beta = beta_counts(H, a)
    p = a.fractions
    cbar = math.fsum(p * np.array([ch.capacity(ctrl) for ch in channels]))
    n, c = H.n, H.c
    constant = all(ch.moments_constant_in_p for ch in channels)
    P = 1 if constant else ctrl.series_pmax
    g = np.vstack([np.asarray(ch.g_moments(P, ctrl)) for ch in channels])
    with np.errstate(divide="ignore"):
        log_g = np.log(g)
    rows = _row_products(log_g, beta)
    if constant:
        series, used, tail = float(rows[0]) * 2 * LN2, 1, 0.0
    else:
        w = series_weights(P)
        tails = rows * series_tail(np.arange(1, P + 1))
        ok = np.nonzero(tails <= ctrl.series_tol)[0]
        used = int(ok[0]) + 1 if len(ok) else P
        series, tail = math.fsum((w * rows)[:used]), float(tails[used - 1])
    value = 1.0 - cbar - (c / n) + series / (2.0 * n * LN2)
    # the series enters with a positive sign, so the remainder only raises it
    return BoundResult(value, used, tail / (2.0 * n * LN2), ctrl, H.design_rate, cbar)


def entropy_upper_bound(rate: float, p_b: float) -> float:
    """``R * h2(P_b)``: upper bound on ``H(X|Y) / n`` from the bit error rate."""
    if not 0.0 <= p_b <= 0.5:
        raise ValidationError("bit error probability must lie in [0, 1/2]")
    return rate * float(h2(p_b))


# ---------------------------------------------------------------------------
# exhaustive oracle


def _magnitude_configs(a: BitAssignment, channels: Sequence[ChannelModel]):
    """All joint LLR-magnitude patterns with their probabilities.

    Returns ``(t, eps_entropy, prob)`` where ``t[k, i] = tanh(omega_i / 2)``.
    """
    laws = [as_discrete(ch).magnitudes for ch in channels]
    per_bit = [laws[j] for j in a.channel_of]
    sizes = [len(m) for m, _ in per_bit]
    total = math.prod(sizes)
    if total > MAX_ORACLE_CONFIGS:
        raise InstanceTooLargeError(f"{total} magnitude patterns exceed the oracle limit")
    idx = np.indices(sizes).reshape(len(sizes), -1).T
    n = len(per_bit)
    t = np.empty((total, n))
    hb = np.empty((total, n))
    prob = np.ones(total)
    for i, (mags, probs) in enumerate(per_bit):
        with np.errstate(over="ignore"):
            eps = 1.0 / (1.0 + np.exp(mags))
        t_i = np.tanh(mags / 2.0)
        t[:, i] = t_i[idx[:, i]]
        hb[:, i] = np.asarray(h2(np.clip(eps, 0, 1)))[idx[:, i]]
        prob *= probs[idx[:, i]]
    return t, hb, prob


def _syndrome_law(t: np.ndarray, Hd: np.ndarray) -> np.ndarray:
    """``P(H z = s | omega)`` for every magnitude pattern (rows) and syndrome (columns)."""
    r = Hd.shape[0]
    if r > MAX_ORACLE_ROWS:
        raise InstanceTooLargeError(f"{r} parity checks exceed the oracle limit")
    us = ((np.arange(1 << r)[:, None] >> np.arange(r)[None, :]) & 1).astype(np.uint8)
    support = (us @ Hd) % 2  # (2^r, n): bits covered by each Walsh index
    zero = t == 0.0
    with np.errstate(divide="ignore"):
        logt = np.where(zero, 0.0, np.log(np.where(zero, 1.0, t)))
    chi = np.exp(logt @ support.T.astype(float))
    chi[(zero.astype(float) @ support.T.astype(float)) > 0] = 0.0
    # the bit order of u matches natural Hadamard ordering of s
    W = linalg.hadamard(1 << r)
    law = chi @ W / float(1 << r)
    return np.clip(law, 0.0, 1.0)


def _check_oracle_size(H: ParityCheckMatrix, a: BitAssignment) -> None:
    if H.n > MAX_ORACLE_N:
        raise InstanceTooLargeError(f"block length {H.n} exceeds the oracle limit {MAX_ORACLE_N}")
    if len(a.channel_of) != H.n:
        raise ValidationError("assignment length differs from the block length")


def exact_conditional_entropy(H: ParityCheckMatrix, a: BitAssignment, channels: Sequence[ChannelModel]) -> float:
    """Exact ``H(X|Y) / n`` for a uniformly chosen codeword (bits per symbol).

    Continuous channels are replaced by their discretized versions (8-bin
    quantization for the BIAWGN channel).
    """
    _check_oracle_size(H, a)
    t, hb, prob = _magnitude_configs(a, channels)
    law = _syndrome_law(t, H.to_dense())
    with np.errstate(divide="ignore", invalid="ignore"):
        hs = -np.sum(np.where(law > 0, law * np.log2(law), 0.0), axis=1)
    value = prob @ (hb.sum(axis=1) - hs)
    return max(float(value), 0.0) / H.n


def map_bit_error_probability(H: ParityCheckMatrix, a: BitAssignment, channels: Sequence[ChannelModel]) -> float:
    """Bitwise-MAP error probability averaged over the information bits."""
    _check_oracle_size(H, a)
    info = information_set(H)
    if not info:
        return 0.0
    t, _, prob = _magnitude_configs(a, channels)
    Hd = H.to_dense()
    total = 0.0
    for i in info:
        e = np.zeros((1, H.n), dtype=np.uint8)
        e[0, i] = 1
        law = _syndrome_law(t, np.vstack([Hd, e]))
        half = law.shape[1] // 2
        # the appended row is the most significant bit of the syndrome index
        total += prob @ np.minimum(law[:, :half], law[:, half:]).sum(axis=1)
    return float(total) / len(info)
