"""
Unit-cube rounding: turn a non-negative vector z into a 0/1 vector delta
with a large normalized inner product <z, delta> / (||z|| ||delta||).

All logarithms are natural. Ties between candidate supports go to the
smallest support (smallest prefix length, largest threshold).
"""

from typing import Iterable, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np

from .base import DomainError
from .graph_core import rho_witness
from ..models import LemmaTag, RoundingOutcome

logger = logging.getLogger(__name__)

VectorArg = Union[np.ndarray, Sequence[float]]

BRUTE_FORCE_LIMIT = 20
PREFIX_TIE_RTOL = 1e-12
EXACT_INTEGER_LIMIT = 2 ** 53


class RoundingError(DomainError):
    """Rounding input outside the lemma's domain"""
    pass


def _as_vector(z: VectorArg) -> np.ndarray:
    arr = np.asarray(z, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise RoundingError("rounding needs a non-empty one-dimensional vector")
    if not np.isfinite(arr).all():
        raise RoundingError("vector has non-finite entries")
    if (arr < 0).any():
        raise RoundingError("vector has negative entries")
    if not arr.any():
        raise RoundingError("cannot round the zero vector")
    return arr


def _ratio(z: np.ndarray, support: Iterable[int]) -> float:
    idx = list(support)
    return float(z[idx].sum()) / (float(np.linalg.norm(z)) * math.sqrt(len(idx)))


def prefix_guarantee(n: int) -> float:
    return 2.0 / math.sqrt(math.log(n) + 4.0)


def threshold_guarantee(delta_cap: int) -> float:
    return 1.0 / math.sqrt(math.log(delta_cap) + 1.0)


def smooth_guarantee(rho_value: float) -> float:
    return 1.0 / math.sqrt(8.0 * (math.log(rho_value) + 1.0))


def _best_prefix_length(ordered: np.ndarray, sums: np.ndarray) -> int:
    """
    Smallest k maximizing S_k^2 / k. Integer-valued vectors are compared
    exactly; otherwise scores within PREFIX_TIE_RTOL of the maximum tie.
    """
    if ordered[0] < EXACT_INTEGER_LIMIT and (ordered == np.floor(ordered)).all():
        best_k, best_sum, total = 1, int(ordered[0]), 0
        for k, value in enumerate(ordered.tolist(), start=1):
            total += int(value)
            if total * total * best_k > best_sum * best_sum * k:
                best_k, best_sum = k, total
        return best_k
    scores = sums * sums / np.arange(1, sums.size + 1, dtype=float)
    return int(np.argmax(scores >= scores.max() * (1.0 - PREFIX_TIE_RTOL))) + 1


def round_prefix(z: VectorArg) -> RoundingOutcome:
    """
    Best prefix of z sorted non-increasingly. For a fixed support size the
    inner product is maximized by the top entries, so this is the optimum
    over every non-zero 0/1 vector.
    """
    arr = _as_vector(z)
    order = np.argsort(-arr, kind='stable')
    sums = np.cumsum(arr[order])
    k = _best_prefix_length(arr[order], sums)
    support = tuple(sorted(int(i) for i in order[:k]))
    return RoundingOutcome(
        support=support,
        achieved_ratio=float(sums[k - 1]) / (float(np.linalg.norm(arr)) * math.sqrt(k)),
        guarantee=prefix_guarantee(arr.size),
        lemma_tag=LemmaTag.PREFIX,
    )


def _as_integer_vector(z: VectorArg, delta_cap: int) -> np.ndarray:
    if isinstance(delta_cap, bool) or int(delta_cap) != delta_cap or delta_cap < 1:
        raise RoundingError(f"threshold cap must be an integer >= 1, got {delta_cap!r}")
    raw = np.asarray(z)
    if raw.ndim != 1 or raw.size == 0:
        raise RoundingError("rounding needs a non-empty one-dimensional vector")
    if raw.dtype.kind == 'f':
        if not np.isfinite(raw).all() or (raw != np.floor(raw)).any():
            raise RoundingError("threshold rounding needs integer entries")
    elif raw.dtype.kind not in 'iub':
        raise RoundingError("threshold rounding needs integer entries")
    arr = raw.astype(np.int64)
    if (arr < 0).any():
        raise RoundingError("vector has negative entries")
    if (arr > delta_cap).any():
        raise RoundingError(f"entry {int(arr.max())} exceeds the cap {int(delta_cap)}")
    if not arr.any():
        raise RoundingError("cannot round the zero vector")
    return arr


def round_threshold(z: VectorArg, delta_cap: int) -> RoundingOutcome:
    """
    Best level set {j : z_j >= i} of an integer vector with entries in [0, delta_cap].

    Only levels present in z are evaluated; candidates are compared exactly
    as S^2 / k in integers. The reported level is the largest threshold
    giving the chosen support.
    """
    arr = _as_integer_vector(z, delta_cap)
    best: Optional[Tuple[int, int, int]] = None  # (level, sum, size)
    for level in sorted({int(v) for v in arr if v > 0}, reverse=True):
        mask = arr >= level
        total, size = int(arr[mask].sum()), int(mask.sum())
        if best is None or total * total * best[2] > best[1] * best[1] * size:
            best = (level, total, size)
    level, total, size = best
    support = tuple(int(i) for i in np.flatnonzero(arr >= level))
    return RoundingOutcome(
        support=support,
        achieved_ratio=total / (float(np.linalg.norm(arr.astype(float))) * math.sqrt(size)),
        guarantee=threshold_guarantee(int(delta_cap)),
        lemma_tag=LemmaTag.THRESHOLD,
        level=level,
    )


def round_smooth(z: VectorArg) -> RoundingOutcome:
    """
    Rounding whose guarantee depends on the smoothness rho(z).

    Divides by z_k (the rho index), floors, runs threshold rounding with cap
    floor(rho) and scores the resulting support against the original z. The
    prefix optimum is returned instead when it is strictly better; both meet
    the same guarantee.
    """
    arr = _as_vector(z)
    rho_value, k = rho_witness(arr)
    z_k = float(np.sort(arr, kind='stable')[::-1][k - 1])
    scaled = np.floor(arr / z_k).astype(np.int64)
    cap = max(1, int(math.floor(rho_value)))
    construction = round_threshold(np.minimum(scaled, cap), cap)
    constructed_ratio = _ratio(arr, construction.support)
    prefix = round_prefix(arr)
    if prefix.achieved_ratio > constructed_ratio:
        support, ratio, level = prefix.support, prefix.achieved_ratio, None
    else:
        support, ratio, level = construction.support, constructed_ratio, construction.level
    return RoundingOutcome(
        support=support,
        achieved_ratio=ratio,
        guarantee=smooth_guarantee(rho_value),
        lemma_tag=LemmaTag.SMOOTH,
        level=level,
        rho=rho_value,
    )


def brute_force_best(z: VectorArg) -> Tuple[float, Tuple[int, ...]]:
    """Maximum ratio over all 2^n - 1 non-zero 0/1 vectors (n <= 20)"""
    arr = _as_vector(z)
    n = arr.size
    if n > BRUTE_FORCE_LIMIT:
        raise RoundingError(f"brute force is limited to {BRUTE_FORCE_LIMIT} coordinates")
    masks = np.arange(1, 1 << n, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n)) & 1
    ratios = (bits @ arr) / (np.linalg.norm(arr) * np.sqrt(bits.sum(axis=1)))
    best = int(np.argmax(ratios))
    return float(ratios[best]), tuple(int(i) for i in np.flatnonzero(bits[best]))


def harmonic_root_vector(n: int) -> np.ndarray:
    """z = (1, 1/sqrt(2), ..., 1/sqrt(n)), the family on which prefix rounding is tight"""
    if n < 1:
        raise DomainError("n must be at least 1")
    return 1.0 / np.sqrt(np.arange(1, n + 1, dtype=float))


def projection_beta_ratio(n: int) -> dict:
    """
    max over 0/1 eta of ||B eta|| / (||B|| ||eta||) for B the orthogonal
    projection onto the harmonic root vector. Shows that the first rounding
    step's coefficient cannot be improved beyond order 1/sqrt(ln n).
    """
    z = harmonic_root_vector(n)
    projection = np.outer(z, z) / float(z @ z)
    outcome = round_prefix(z)
    eta = outcome.indicator(n).astype(float)
    ratio = float(np.linalg.norm(projection @ eta)) / (float(np.linalg.norm(projection, 2))
                                                      * float(np.linalg.norm(eta)))
    return {
        'n': n,
        'ratio': ratio,
        'prefix_ratio': outcome.achieved_ratio,
        'upper': 2.0 / math.sqrt(math.log(n)) if n >= 2 else math.inf,
        'guarantee': outcome.guarantee,
    }
