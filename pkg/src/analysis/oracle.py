"""
Exact maximum bi-average degree M by subset enumeration.

For a fixed Y the best X is a top-k set of the degrees d_Y(v) into Y, so
only one side is enumerated: O(2^n n log n) instead of O(4^n). Masks are
processed in numpy chunks; chunks are contiguous mask ranges (fixed high
bits) and may run on a thread pool. The cross-chunk reduction compares
e^2 / (|X||Y|) as exact rationals, then the tie-break key
(|Y|, Y-mask, |X|).
"""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple
import logging
import math
import time

import numpy as np

from .base import BaseAnalysis, CapExceededError, DomainError
from .graph_core import degree_stats
from .spectral import SpectralSolver
from ..config import BIDENSITY_EXACT_TIME_LIMIT, DEFAULT_EXACT_CAP, MAX_EXACT_CAP
from ..models import BipartiteGraph, ExactMResult, Graph, VertexSet

logger = logging.getLogger(__name__)

CHUNK_BITS = 14
NAIVE_LIMIT = 10

# (edges, |S|, S-mask, |T|) for the best pair of one chunk
_ChunkBest = Tuple[int, int, int, int]


def _bits(masks: np.ndarray, width: int) -> np.ndarray:
    return ((masks[:, None] >> np.arange(width, dtype=np.int64)) & 1).astype(float)


def _better(a: _ChunkBest, b: Optional[_ChunkBest]) -> bool:
    if b is None:
        return True
    value_a = Fraction(a[0] * a[0], a[1] * a[3])
    value_b = Fraction(b[0] * b[0], b[1] * b[3])
    if value_a != value_b:
        return value_a > value_b
    return (a[1], a[2], a[3]) < (b[1], b[2], b[3])


def _prefix_side(degrees: np.ndarray, k: int) -> Tuple[int, ...]:
    order = np.argsort(-degrees, kind='stable')
    return tuple(sorted(int(i) for i in order[:k]))


class ExactOracle(BaseAnalysis):
    """Enumerates one side, prefix-optimizes the other"""

    def __init__(self, config: Dict[str, Any] = None):
        super().__init__("exact_oracle", config)
        self.cap = self.config.get('cap', DEFAULT_EXACT_CAP)
        self.threads = self.config.get('threads', 1)
        self.time_limit = self.config.get('time_limit', BIDENSITY_EXACT_TIME_LIMIT)

    def execute(self, g: Graph) -> ExactMResult:
        return self.m_exact(g)

    def _check_cap(self, size: int, what: str):
        if size > self.cap:
            raise CapExceededError(f"exact search over {what} of size {size} exceeds cap {self.cap}")

    def _chunks(self, width: int) -> List[Tuple[int, int]]:
        step = 1 << min(CHUNK_BITS, width)
        total = 1 << width
        return [(max(start, 1), min(start + step, total)) for start in range(0, total, step)]

    def _scan_chunk(self, M: np.ndarray, start: int, stop: int, deadline: float) -> Optional[_ChunkBest]:
        if time.monotonic() > deadline:
            raise CapExceededError(f"exact search exceeded the time limit of {self.time_limit} s")
        if start >= stop:
            return None
        masks = np.arange(start, stop, dtype=np.int64)
        S = _bits(masks, M.shape[0])
        D = S @ M
        totals = np.cumsum(-np.sort(-D, axis=1), axis=1)
        sizes = S.sum(axis=1)
        ks = np.arange(1, M.shape[1] + 1, dtype=float)
        values = totals * totals / (ks[None, :] * sizes[:, None])
        best_k = np.argmax(values, axis=1)
        rows = np.arange(len(masks))
        best_values = values[rows, best_k]
        winner = int(np.lexsort((masks, sizes, -best_values))[0])
        k = int(best_k[winner]) + 1
        return int(round(totals[winner, k - 1])), int(sizes[winner]), int(masks[winner]), k

    def _enumerate(self, M: np.ndarray) -> Tuple[_ChunkBest, int]:
        """Best (edges, |S|, S-mask, |T|) over non-empty S (rows of M) and prefix T (columns)"""
        width = M.shape[0]
        deadline = time.monotonic() + self.time_limit
        chunks = self._chunks(width)
        if self.threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                results = list(pool.map(lambda c: self._scan_chunk(M, c[0], c[1], deadline), chunks))
        else:
            results = [self._scan_chunk(M, start, stop, deadline) for start, stop in chunks]
        best: Optional[_ChunkBest] = None
        for candidate in results:
            if candidate is not None and _better(candidate, best):
                best = candidate
        return best, (1 << width) - 1

    def _witness(self, M: np.ndarray, best: _ChunkBest) -> Tuple[VertexSet, VertexSet]:
        edges, _, mask, k = best
        s_members = tuple(i for i in range(M.shape[0]) if mask >> i & 1)
        degrees = M[list(s_members)].sum(axis=0)
        return VertexSet(s_members), VertexSet(_prefix_side(degrees, k))

    def m_exact(self, g: Graph) -> ExactMResult:
        n = g.vertex_count
        self._check_cap(n, "vertex set")
        if g.edge_count == 0:
            return ExactMResult(0.0, VertexSet((0,)), VertexSet((0,)), 0, 0)
        A = g.matrix.toarray().astype(float)
        best, scanned = self._enumerate(A)
        y_set, x_set = self._witness(A, best)
        result = ExactMResult(best[0] / math.sqrt(len(x_set) * len(y_set)), x_set, y_set, best[0], scanned)
        self.log_metric("m_exact", result.value, {"vertices": n, "subsets": scanned})
        return result

    def m_exact_bipartite(self, bg: BipartiteGraph) -> ExactMResult:
        m, n = bg.left_count, bg.right_count
        self._check_cap(min(m, n), "smaller partite set")
        if bg.edge_count == 0:
            return ExactMResult(0.0, VertexSet((0,)), VertexSet((0,)), 0, 0)
        B = bg.matrix.toarray().astype(float)
        if m <= n:
            best, scanned = self._enumerate(B)
            x_set, y_set = self._witness(B, best)
        else:
            best, scanned = self._enumerate(B.T.copy())
            y_set, x_set = self._witness(B.T, best)
        result = ExactMResult(best[0] / math.sqrt(len(x_set) * len(y_set)), x_set, y_set, best[0], scanned)
        self.log_metric("m_exact_bipartite", result.value, {"left": m, "right": n, "subsets": scanned})
        return result

    def k_exact(self, bg: BipartiteGraph) -> Dict[str, Any]:
        """K = max over non-empty Y subset W of rho((d_Y(u))_{u in U})"""
        m, n = bg.left_count, bg.right_count
        self._check_cap(n, "right partite set")
        Bt = bg.matrix.T.toarray().astype(float)
        deadline = time.monotonic() + self.time_limit
        best_value, best_mask = 0.0, 0
        for start, stop in self._chunks(n):
            if time.monotonic() > deadline:
                raise CapExceededError(f"K search exceeded the time limit of {self.time_limit} s")
            masks = np.arange(start, stop, dtype=np.int64)
            D = -np.sort(-(_bits(masks, n) @ Bt), axis=1)
            prefix = np.cumsum(D * D, axis=1)
            k_index = np.argmax(prefix >= prefix[:, -1:] - prefix, axis=1)
            d_k = D[np.arange(len(masks)), k_index]
            safe = np.where(d_k > 0, d_k, 1.0)
            rho_values = np.where(d_k > 0, D[:, 0] / safe, 1.0)
            winner = int(np.argmax(rho_values))
            if rho_values[winner] > best_value:
                best_value, best_mask = float(rho_values[winner]), int(masks[winner])
        return {
            'value': best_value,
            'y_witness': [i for i in range(n) if best_mask >> i & 1],
            'subsets_scanned': (1 << n) - 1,
        }

    def bounds_check(self, g: Graph, solver: Optional[SpectralSolver] = None) -> Dict[str, Any]:
        """mean degree <= M <= Delta and M <= lambda_max"""
        _, mean, delta, _ = degree_stats(g)
        exact = self.m_exact(g)
        lam = (solver or SpectralSolver()).lambda_max(g).lambda_max
        slack = 1e-9 * max(1.0, float(delta))
        report = {
            'mean_degree': mean,
            'm_exact': exact.value,
            'max_degree': delta,
            'lambda': lam,
            'x': list(exact.x_witness.members),
            'y': list(exact.y_witness.members),
            'lower_ok': mean <= exact.value + slack,
            'upper_ok': exact.value <= delta + slack,
            'spectral_ok': exact.value <= lam + slack,
        }
        report['ok'] = report['lower_ok'] and report['upper_ok'] and report['spectral_ok']
        if not report['ok']:
            self.logger.error(f"Bounds violated: {report}")
        return report

    def validate_config(self) -> bool:
        return 1 <= self.cap <= MAX_EXACT_CAP and self.threads >= 1 and self.time_limit > 0


def m_exact(g: Graph, cap: int = DEFAULT_EXACT_CAP, config: Dict[str, Any] = None) -> ExactMResult:
    return ExactOracle({**(config or {}), 'cap': cap}).m_exact(g)


def m_exact_bipartite(bg: BipartiteGraph, cap: int = DEFAULT_EXACT_CAP,
                      config: Dict[str, Any] = None) -> ExactMResult:
    return ExactOracle({**(config or {}), 'cap': cap}).m_exact_bipartite(bg)


def k_exact(bg: BipartiteGraph, cap: int = DEFAULT_EXACT_CAP) -> Dict[str, Any]:
    return ExactOracle({'cap': cap}).k_exact(bg)


def bounds_check(g: Graph, cap: int = DEFAULT_EXACT_CAP) -> Dict[str, Any]:
    return ExactOracle({'cap': cap}).bounds_check(g)


def m_exact_naive(g: Graph) -> Fraction:
    """M^2 by enumerating every (X, Y) pair; reference for n <= 10"""
    n = g.vertex_count
    if n > NAIVE_LIMIT:
        raise DomainError(f"naive enumeration is limited to {NAIVE_LIMIT} vertices")
    A = g.matrix.toarray().astype(np.int64)
    S = _bits(np.arange(1, 1 << n, dtype=np.int64), n).astype(np.int64)
    E = S @ A @ S.T
    sizes = S.sum(axis=1)
    values = (E * E) / np.outer(sizes, sizes).astype(float)
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    return Fraction(int(E[i, j]) ** 2, int(sizes[i] * sizes[j]))
