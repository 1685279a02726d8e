"""
Largest adjacency eigenvalue and the non-negative Perron vector.

Plain power iteration stalls on bipartite spectra (+lambda and -lambda have
the same magnitude), so every solver here iterates a squared operator: A^2
for a graph, B B^t for a biadjacency matrix. Both are positive semidefinite,
so the Rayleigh quotient sequence is non-decreasing.
"""

from typing import Any, Callable, Dict, Optional, Tuple
import logging
import math

import numpy as np

from .base import BaseAnalysis, ConvergenceError
from .graph_core import degree_stats, side_degree_stats
from ..config import DEFAULT_TOLERANCE, default_max_iter
from ..models import BipartiteGraph, Graph, SpectralResult

logger = logging.getLogger(__name__)

Operator = Callable[[np.ndarray], np.ndarray]


class SpectralSolver(BaseAnalysis):
    """Squared-operator power iteration for graphs and bipartite graphs"""

    def __init__(self, config: Dict[str, Any] = None):
        super().__init__("spectral_solver", config)
        self.tolerance = self.config.get('tolerance', DEFAULT_TOLERANCE) or DEFAULT_TOLERANCE
        self.max_iter = self.config.get('max_iter')
        self.debug_checks = self.config.get('debug_checks', False)

    def execute(self, g: Graph) -> SpectralResult:
        return self.lambda_max(g)

    def _iteration_cap(self, size: int) -> int:
        return self.max_iter if self.max_iter else default_max_iter(size)

    def _iterate(self, forward: Operator, backward: Operator, size: int,
                 residual_of: Callable[[np.ndarray, np.ndarray, np.ndarray, float], float]
                 ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float, int, bool]:
        """
        Power iteration on forward(backward(.)) from the normalized all-ones vector.

        Returns (z, w, y, theta, iterations, converged) for the last iterate,
        with w = backward(z), y = forward(w) and theta = ||w||^2 (z is a unit
        vector, so theta is the Rayleigh quotient of the squared operator).
        """
        cap = self._iteration_cap(size)
        z = np.full(size, 1.0 / math.sqrt(size))
        previous = 0.0
        for iteration in range(1, cap + 1):
            w = backward(z)
            y = forward(w)
            theta = float(w @ w)
            if self.debug_checks and theta < previous * (1.0 - 1e-12):
                raise ConvergenceError(
                    f"Rayleigh quotient decreased at iteration {iteration}: {previous} -> {theta}")
            previous = theta
            lam = math.sqrt(theta)
            if residual_of(z, w, y, theta) <= self.tolerance * max(lam, 1.0):
                return z, w, y, theta, iteration, True
            norm = float(np.linalg.norm(y))
            z = y / norm
        w = backward(z)
        y = forward(w)
        theta = float(w @ w)
        self.logger.warning(f"Power iteration did not converge within {cap} iterations "
                            f"(size={size}, lambda~{math.sqrt(theta):.12g})")
        return z, w, y, theta, cap, False

    def lambda_max(self, g: Graph) -> SpectralResult:
        """Dominant adjacency eigenvalue with its non-negative unit eigenvector"""
        n = g.vertex_count
        if g.edge_count == 0:
            return SpectralResult(0.0, np.full(n, 1.0 / math.sqrt(n)), 0, 0.0, True)
        A = g.matrix.astype(float)

        def projected_residual(z, w, y, theta):
            # p = z + Az/lambda drops the -lambda component; ||Ap - lambda p|| = ||y - theta z|| / lambda
            lam = math.sqrt(theta)
            p_norm = float(np.linalg.norm(z + w / lam))
            if p_norm < 1e-8:
                return math.inf
            return float(np.linalg.norm(y - theta * z)) / (lam * p_norm)

        z, w, y, theta, iterations, converged = self._iterate(A.dot, A.dot, n, projected_residual)
        lam = math.sqrt(theta)
        p = z + w / lam
        if float(np.linalg.norm(p)) < 1e-8:
            p = z
        perron = np.abs(p)
        perron /= np.linalg.norm(perron)
        residual = float(np.linalg.norm(A.dot(perron) - lam * perron))
        self.log_metric("lambda_max", lam, {"vertices": n, "iterations": iterations, "converged": converged})
        return SpectralResult(lam, perron, iterations, residual, converged)

    def lambda_max_bipartite(self, bg: BipartiteGraph) -> Tuple[SpectralResult, np.ndarray, np.ndarray]:
        """
        Top singular value of B via B B^t. The left vector x is the non-negative
        unit vector with ||B^t x|| = ||B|| ||x||; the right vector is B^t x normalized.
        """
        m, n = bg.left_count, bg.right_count
        if bg.edge_count == 0:
            left = np.full(m, 1.0 / math.sqrt(m))
            right = np.full(n, 1.0 / math.sqrt(n))
            perron = np.concatenate((left, right)) / math.sqrt(2.0)
            return SpectralResult(0.0, perron, 0, 0.0, True), left, right
        B = bg.matrix.astype(float)
        Bt = B.T.tocsr()

        def block_residual(z, w, y, theta):
            return float(np.linalg.norm(y - theta * z)) / math.sqrt(theta)

        z, w, y, theta, iterations, converged = self._iterate(B.dot, Bt.dot, m, block_residual)
        lam = math.sqrt(theta)
        left = np.abs(z)
        left /= np.linalg.norm(left)
        right = Bt.dot(left)
        right /= np.linalg.norm(right)
        perron = np.concatenate((left, right)) / math.sqrt(2.0)
        residual = float(np.linalg.norm(np.concatenate((B.dot(right) - lam * left,
                                                        Bt.dot(left) - lam * right)))) / math.sqrt(2.0)
        self.log_metric("lambda_max_bipartite", lam,
                        {"left": m, "right": n, "iterations": iterations, "converged": converged})
        return SpectralResult(lam, perron, iterations, residual, converged), left, right

    def validate_config(self) -> bool:
        return self.tolerance > 0 and (self.max_iter is None or self.max_iter > 0)


def lambda_max(g: Graph, tol: float = DEFAULT_TOLERANCE, max_iter: Optional[int] = None) -> SpectralResult:
    return SpectralSolver({'tolerance': tol, 'max_iter': max_iter}).lambda_max(g)


def lambda_max_bipartite(bg: BipartiteGraph, tol: float = DEFAULT_TOLERANCE,
                         max_iter: Optional[int] = None) -> Tuple[SpectralResult, np.ndarray, np.ndarray]:
    return SpectralSolver({'tolerance': tol, 'max_iter': max_iter}).lambda_max_bipartite(bg)


def dense_lambda_max(g: Graph) -> float:
    """Reference value from a dense symmetric eigensolve (small graphs only)"""
    return float(np.linalg.eigvalsh(g.matrix.toarray().astype(float))[-1])


def _slack(solver: SpectralSolver, *values: float) -> float:
    """Comparison slack scaled by the solver tolerance"""
    return solver.tolerance * max(1.0, *values)


def eigen_bound_chain(g: Graph, solver: Optional[SpectralSolver] = None) -> Dict[str, Any]:
    """||d||_2 <= lambda_max <= Delta, with ||d||_2 the root-mean-square degree"""
    solver = solver or SpectralSolver()
    _, _, delta, rms = degree_stats(g)
    result = solver.lambda_max(g)
    lam = result.lambda_max
    slack = _slack(solver, delta)
    return {
        'rms': rms,
        'lambda': lam,
        'delta': float(delta),
        'ok': rms <= lam + slack and lam <= delta + slack,
        'converged': result.converged,
        'iterations': result.iterations,
        'residual': result.residual,
    }


def bipartite_bound_chain(bg: BipartiteGraph, solver: Optional[SpectralSolver] = None) -> Dict[str, Any]:
    """
    The bipartite eigenvalue chain and the bounds on M:

        max{sqrt(m/n)||d_U||_2, sqrt(n/m)||d_W||_2} <= lambda <= sqrt(Delta_U Delta_W)
        sqrt(||d_U||_2 ||d_W||_2) <= lambda
        sqrt(||d_U||_1 ||d_W||_1) <= M <= sqrt(Delta_U Delta_W)
    """
    solver = solver or SpectralSolver()
    m, n = bg.left_count, bg.right_count
    stats = side_degree_stats(bg)
    left_lower = math.sqrt(m / n) * stats['left_rms']
    right_lower = math.sqrt(n / m) * stats['right_rms']
    lower = max(left_lower, right_lower)
    geometric = math.sqrt(stats['left_rms'] * stats['right_rms'])
    upper = math.sqrt(stats['left_max'] * stats['right_max'])
    m_lower = math.sqrt(stats['left_mean'] * stats['right_mean'])
    result, _, _ = solver.lambda_max_bipartite(bg)
    lam = result.lambda_max
    slack = _slack(solver, upper)
    report = {
        'left_lower': left_lower,
        'right_lower': right_lower,
        'lower': lower,
        'geometric_lower': geometric,
        'lambda': lam,
        'upper': upper,
        'm_lower': m_lower,
        'm_upper': upper,
        'lower_ok': lower <= lam + slack,
        'geometric_ok': geometric <= lam + slack,
        'upper_ok': lam <= upper + slack,
        'm_bounds_ok': m_lower <= upper + slack,
        'lower_strict': lower < lam - slack,
        'upper_strict': lam < upper - slack,
        'converged': result.converged,
    }
    report['ok'] = all(report[k] for k in ('lower_ok', 'geometric_ok', 'upper_ok', 'm_bounds_ok'))
    return report
