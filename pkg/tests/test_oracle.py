# tests/test_oracle.py
"""
Tests for the exact oracle:
- M on graphs with known values, against the naive double enumeration
- Bipartite M and the double-cover identity
- The K constant, caps and time limits
- mean degree <= M <= Delta and M <= lambda_max
- Side-respecting subsets on bipartite graphs, monotonicity under edge addition
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from src.analysis.base import CapExceededError, DomainError
from src.analysis.graph_core import (bi_average_degree, complete_bipartite_bg, double_cover,
                                     empty_graph, gnp_random_graph, path_graph)
from src.analysis.oracle import (ExactOracle, bounds_check, k_exact, m_exact, m_exact_bipartite,
                                 m_exact_naive)
from src.analysis.spectral import lambda_max
from src.models import BipartiteGraph, Graph


class TestExactM:
    """Test M on named graphs"""

    def test_petersen(self, petersen):
        """Test that an r-regular graph has M = r"""
        result = m_exact(petersen)

        assert result.squared == Fraction(9)
        assert result.value == pytest.approx(3.0)

    def test_even_cycle(self, c6):
        """Test M(C6) = 2 exactly"""
        assert m_exact(c6).squared == Fraction(4)

    def test_complete_bipartite(self, k23):
        """Test M(K_{2,3}) = sqrt(6)"""
        result = m_exact(k23)

        assert result.squared == Fraction(6)
        assert result.value == pytest.approx(math.sqrt(6.0))

    def test_path(self, p3):
        """Test M(P3) = sqrt(2) with the witness ({v}, {u, w}) up to symmetry"""
        result = m_exact(p3)

        assert result.squared == Fraction(2)
        assert {result.x_witness.members, result.y_witness.members} == {(1,), (0, 2)}

    def test_star(self, star4):
        """Test M(K_{1,4}) = 2"""
        assert m_exact(star4).squared == Fraction(4)

    def test_witness_is_consistent(self, rng):
        """Test that the witness pair attains the reported value"""
        g = gnp_random_graph(11, 0.4, rng)
        result = m_exact(g)

        assert bi_average_degree(g, result.x_witness, result.y_witness) == pytest.approx(result.value)
        assert result.subsets_scanned == 2 ** 11 - 1

    def test_edgeless(self):
        """Test that an edgeless graph has M = 0"""
        result = m_exact(empty_graph(4))

        assert result.value == 0.0
        assert result.edges == 0

    def test_matches_naive(self, rng):
        """Test the one-sided enumeration against the two-sided one"""
        for _ in range(15):
            g = gnp_random_graph(int(rng.integers(2, 11)), float(rng.choice([0.2, 0.5, 0.8])), rng)

            assert m_exact(g).squared == m_exact_naive(g)

    def test_naive_limit(self):
        """Test that the naive reference refuses large graphs"""
        with pytest.raises(DomainError):
            m_exact_naive(path_graph(11))


class TestBipartiteM:
    """Test M on bipartite graphs"""

    def test_complete_bipartite(self):
        """Test K_{3,5} from either side"""
        result = m_exact_bipartite(complete_bipartite_bg(3, 5))

        assert result.squared == Fraction(15)
        assert m_exact_bipartite(complete_bipartite_bg(5, 3)).squared == Fraction(15)

    def test_wide_graph_enumerates_smaller_side(self):
        """Test that a 2 x 40 graph is within the cap"""
        bg = BipartiteGraph(2, 40, [list(range(40)), [0]])
        result = m_exact_bipartite(bg, cap=26)

        assert result.subsets_scanned == 3
        assert result.x_witness.members == (0,)
        assert result.value == pytest.approx(math.sqrt(40.0))

    def test_double_cover_identity(self, rng):
        """Test M(G) = M(G x K2) exactly"""
        for _ in range(15):
            g = gnp_random_graph(int(rng.integers(2, 12)), 0.4, rng)

            assert m_exact(g).squared == m_exact_bipartite(double_cover(g)).squared

    def test_mixed_subsets(self, k23_bipartite):
        """Test that the graph view of a bipartite graph has the same M"""
        assert m_exact(k23_bipartite.to_graph()).squared == m_exact_bipartite(k23_bipartite).squared


class TestKConstant:
    """Test K = max rho over the localized degree sequences"""

    def test_complete_bipartite(self):
        """Test that every d_Y is constant on K_{2,3}, so K = 1"""
        result = k_exact(complete_bipartite_bg(2, 3))

        assert result['value'] == 1.0
        assert result['subsets_scanned'] == 7

    def test_star_rows(self):
        """Test a graph whose localized degrees are uneven"""
        # u0 sees both right vertices, u1 and u2 only the first
        bg = BipartiteGraph(3, 2, [[0, 1], [0], [0]])
        result = k_exact(bg)

        assert result['value'] >= 1.0
        assert result['y_witness']


class TestCaps:
    """Test the refusal paths"""

    def test_vertex_cap(self):
        """Test that 28 vertices exceed the default cap of 26"""
        with pytest.raises(CapExceededError) as info:
            m_exact(path_graph(28))

        assert info.value.exit_code == 5

    def test_bipartite_cap(self):
        """Test that both sides above the cap are refused"""
        with pytest.raises(CapExceededError):
            m_exact_bipartite(complete_bipartite_bg(8, 9), cap=7)

    def test_time_limit(self):
        """Test that an exhausted time budget is a cap error"""
        oracle = ExactOracle({'cap': 26, 'time_limit': -1.0})

        with pytest.raises(CapExceededError):
            oracle.m_exact(path_graph(6))

    def test_threads_agree(self, rng):
        """Test that a threaded scan returns the same witness"""
        g = gnp_random_graph(16, 0.3, rng)
        serial = ExactOracle({'threads': 1}).m_exact(g)
        threaded = ExactOracle({'threads': 4}).m_exact(g)

        assert serial == threaded

    def test_validate_config(self):
        """Test configuration validation"""
        assert ExactOracle().validate_config() is True
        assert ExactOracle({'cap': 31}).validate_config() is False


class TestBounds:
    """Test mean degree <= M <= Delta and M <= lambda_max"""

    def test_star(self, star4):
        """Test 8/5 <= 2 <= 4 on K_{1,4}"""
        report = bounds_check(star4)

        assert report['mean_degree'] == pytest.approx(8 / 5)
        assert report['m_exact'] == pytest.approx(2.0)
        assert report['max_degree'] == 4
        assert report['ok'] is True

    def test_random_graphs(self, rng):
        """Test the bounds on random graphs"""
        for _ in range(10):
            g = gnp_random_graph(int(rng.integers(3, 13)), 0.5, rng)
            report = bounds_check(g)

            assert report['ok'] is True
            assert report['m_exact'] <= lambda_max(g).lambda_max + 1e-9


class TestStructuralProperties:
    """Test properties of M that hold on every graph"""

    def test_bipartite_sides_suffice(self, rng):
        """Test that mixed subsets of a bipartite graph never beat side-respecting ones"""
        for _ in range(30):
            m, n = int(rng.integers(1, 8)), int(rng.integers(1, 8))
            rows = [np.flatnonzero(rng.random(n) < 0.4).tolist() for _ in range(m)]
            bg = BipartiteGraph(m, n, rows)

            assert m_exact(bg.to_graph()).squared == m_exact_bipartite(bg).squared

    def test_monotone_under_edge_addition(self, rng):
        """Test that adding an edge never lowers M"""
        for _ in range(30):
            n = int(rng.integers(3, 11))
            g = gnp_random_graph(n, 0.3, rng)
            present = set(g.edges())
            missing = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in present]
            if not missing:
                continue
            extra = missing[int(rng.integers(len(missing)))]
            bigger = Graph.from_edges(n, [*present, extra])

            assert bigger.edge_count == g.edge_count + 1
            assert m_exact(bigger).squared >= m_exact(g).squared
