# tests/test_acceptance.py
"""
End-to-end acceptance checks:
- Regular and biregular identities
- The certificate sandwich on seeded random graphs
- Rounding exactness, double-cover invariants and the inequality suites
- Base-family algebra, the separation trend and byte-level determinism
"""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from src.analysis.certifier import certify
from src.analysis.gap import (base_lambda, base_matrix, gap_report, m_upper_bound,
                              minimal_poly_check, perron_base_vector)
from src.analysis.graph_core import (complete_bipartite, cycle_graph, double_cover,
                                     gnp_random_graph, petersen_graph)
from src.analysis.oracle import m_exact, m_exact_bipartite
from src.analysis.spectral import lambda_max, lambda_max_bipartite
from src.analysis.verification import LemmaVerifier, run_suite
from src.models import CertificateVariant, GapGraphSpec
from src.services.report_service import ReportService

SANDWICH_SEED = 101
ROUNDING_SEED = 202
COVER_SEED = 303


def _sandwich_artifacts(seed):
    """Certificates and exact values for 100 seeded G(n, p) samples, as JSON lines"""
    rng = np.random.default_rng(seed)
    service = ReportService()
    lines = []
    for _ in range(100):
        n = int(rng.integers(8, 17))
        p = float(rng.choice([0.2, 0.5, 0.8]))
        g = gnp_random_graph(n, p, rng)
        if g.edge_count == 0:
            continue
        cert = certify(g, CertificateVariant.T1)
        exact = m_exact(g)
        lines.append((g, cert, exact, service.certificate_json(cert) + service.exact_json(exact)))
    return lines


class TestRegularIdentities:
    """Test lambda = M = r on regular graphs"""

    @pytest.mark.parametrize("graph,r", [(petersen_graph(), 3), (cycle_graph(6), 2)])
    def test_regular(self, graph, r):
        """Test Petersen (3) and C6 (2)"""
        assert lambda_max(graph).lambda_max == pytest.approx(r, abs=1e-9)
        assert m_exact(graph).squared == Fraction(r * r)

    def test_biregular(self):
        """Test K_{2,3}: lambda = M = sqrt(6)"""
        g = complete_bipartite(2, 3)

        assert lambda_max(g).lambda_max == pytest.approx(math.sqrt(6.0), abs=1e-9)
        assert m_exact(g).squared == Fraction(6)


class TestSandwich:
    """Test lambda/(ln(n)/4 + 1) <= density <= M <= lambda"""

    def test_random_graphs(self):
        """Test 100 seeded samples with n in [8, 16]"""
        for g, cert, exact, _ in _sandwich_artifacts(SANDWICH_SEED):
            lam = cert.lambda_max
            lower = lam / (0.25 * math.log(g.vertex_count) + 1.0)

            assert lower - 1e-9 <= cert.density <= lam + 1e-9
            assert cert.density <= exact.value + 1e-9
            assert exact.value <= lam + 1e-9


class TestRounding:
    """Test prefix exactness and the three guarantees"""

    def test_thousand_vectors_per_size(self):
        """Test 1000 seeded vectors for every n in [1, 12] and the harmonic root family"""
        report = LemmaVerifier({'seed': ROUNDING_SEED, 'samples': 1000}).rounding_suite(sizes=range(1, 13))

        assert report['total'] == 12000
        assert report['failed'] == 0
        assert [c['name'] for c in report['checks']] == [f'harmonic_root_{n}' for n in range(2, 65)]


class TestDoubleCover:
    """Test M and lambda under the bipartite double cover"""

    def test_invariants(self):
        """Test 50 seeded graphs with n <= 12"""
        rng = np.random.default_rng(COVER_SEED)
        for _ in range(50):
            g = gnp_random_graph(int(rng.integers(2, 13)), float(rng.choice([0.2, 0.5, 0.8])), rng)
            cover = double_cover(g)

            assert m_exact(g).squared == m_exact_bipartite(cover).squared
            assert lambda_max_bipartite(cover)[0].lambda_max == pytest.approx(lambda_max(g).lambda_max, abs=2e-10)


class TestInequalitySuites:
    """Test the binomial, deviation and tensor suites at full size"""

    @pytest.mark.parametrize("suite", ['binest', 'deviation', 'tensor'])
    def test_suite_passes(self, suite):
        """Test that no hard violation is reported"""
        report = run_suite(suite)

        assert report['failed'] == 0
        assert report['passed'] == report['total']


class TestBaseFamily:
    """Test the algebra of the base matrices"""

    @pytest.mark.parametrize("s", range(1, 7))
    def test_algebra(self, s):
        """Test the minimal polynomial, lambda and the Perron vector"""
        A = base_matrix(s).matrix.toarray().astype(float)
        e = perron_base_vector(s)

        assert minimal_poly_check(s) is True
        assert lambda_max(base_matrix(s)).lambda_max == pytest.approx(base_lambda(s), abs=1e-10)
        assert np.allclose(A @ e, base_lambda(s) * e)


class TestSeparationTrend:
    """Test the bound ratio trend and the ordering on a materialized power"""

    def test_trend(self):
        """Test that ratio_bound strictly decreases for s = 5, t = 1..6"""
        bounds = [m_upper_bound(GapGraphSpec(5, t))['ratio_bound'] for t in range(1, 7)]

        assert all(a > b for a, b in zip(bounds, bounds[1:]))

    def test_materialized_ordering(self):
        """Test density <= M <= m_upper <= lambda^2 and measured lambda on 16 vertices"""
        report = gap_report(GapGraphSpec(2, 2), materialize=True)
        lam2 = base_lambda(2) ** 2

        assert report['certificate_density'] <= report['m_exact'] + 1e-9
        assert report['m_exact'] <= report['m_upper'] + 1e-9
        assert report['m_upper'] <= lam2 + 1e-9
        assert report['lambda_measured'] == pytest.approx(lam2, rel=1e-8)


class TestDeterminism:
    """Test byte-identical artifacts for repeated seeded runs"""

    def test_sandwich_artifacts(self):
        """Test that certificates and exact values serialize identically"""
        first = [line for *_, line in _sandwich_artifacts(SANDWICH_SEED)]
        second = [line for *_, line in _sandwich_artifacts(SANDWICH_SEED)]

        assert first == second

    def test_rounding_report(self):
        """Test that the rounding suite serializes identically"""
        service = ReportService()
        first = service.suite_json(run_suite('rounding', seed=ROUNDING_SEED, samples=200))
        second = service.suite_json(run_suite('rounding', seed=ROUNDING_SEED, samples=200))

        assert first == second
        assert json.loads(first)['seed'] == ROUNDING_SEED
