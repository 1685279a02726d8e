# src/analysis/manager.py
"""
Central manager for all analysis components.
One facade for the CLI and for scripted use: every operation returns
(ok, result), where result is the error on failure.
"""

from typing import Any, Dict, Optional, Tuple
import logging

from .base import AnalysisError, GuaranteeViolation
from .certifier import Certifier
from .gap import GapBuilder
from .graph_core import read_graph_file
from .oracle import ExactOracle
from .spectral import SpectralSolver, eigen_bound_chain
from .verification import LemmaVerifier
from ..config import RunConfig
from ..models import CertificateVariant, GapGraphSpec, Graph

logger = logging.getLogger(__name__)


class AnalysisManager:
    """
    Central manager for all analysis components.
    Each component receives its own configuration section.
    """

    def __init__(self, run_config: Optional[RunConfig] = None):
        self.run_config = run_config or RunConfig()
        self.config = self.run_config.as_component_config()
        self.logger = logging.getLogger(__name__)
        self._initialize_components()

    def _initialize_components(self):
        """Initialize all analysis components"""
        try:
            self.spectral = SpectralSolver(self.config.get('spectral', {}))
            self.certifier = Certifier(self.config.get('certifier', {}))
            self.oracle = ExactOracle(self.config.get('oracle', {}))
            self.gap = GapBuilder(self.config.get('gap', {}))
            self.verifier = LemmaVerifier(self.config.get('verification', {}))
            self.logger.info("All analysis components initialized successfully")
        except Exception as e:
            self.logger.error(f"Failed to initialize analysis components: {e}")
            raise

    def _run(self, label: str, operation, *args, **kwargs) -> Tuple[bool, Any]:
        try:
            return True, operation(*args, **kwargs)
        except AnalysisError as e:
            self.logger.error(f"{label} failed: {e.message}")
            return False, e

    # ==============================================
    # GRAPH INPUT
    # ==============================================

    def load_graph(self, path: str, fmt: Optional[str] = None) -> Tuple[bool, Any]:
        """Returns (graph, load report)"""
        return self._run("Graph loading", read_graph_file, path, fmt)

    # ==============================================
    # SPECTRAL
    # ==============================================

    def lambda_report(self, g: Graph) -> Tuple[bool, Any]:
        """lambda_max with the degree bound chain and convergence information"""
        return self._run("Spectral solve", eigen_bound_chain, g, self.spectral)

    # ==============================================
    # CERTIFICATES
    # ==============================================

    def certify(self, g: Graph, variant: CertificateVariant = CertificateVariant.T1) -> Tuple[bool, Any]:
        """Certificate checked by the independent verifier before it is returned"""
        def certify_and_verify():
            cert = self.certifier.certify(g, variant)
            if not self.certifier.verify(g, cert):
                raise GuaranteeViolation(f"certificate failed verification: {cert.to_dict()}")
            return cert
        return self._run("Certification", certify_and_verify)

    # ==============================================
    # EXACT ORACLE
    # ==============================================

    def m_exact(self, g: Graph) -> Tuple[bool, Any]:
        return self._run("Exact M", self.oracle.m_exact, g)

    def bounds(self, g: Graph) -> Tuple[bool, Any]:
        """mean degree <= M <= Delta, M <= lambda_max; a failed inequality is a GuaranteeViolation"""
        def checked():
            report = self.oracle.bounds_check(g, self.spectral)
            if not report['ok']:
                raise GuaranteeViolation(f"degree/spectral bounds violated: {report}")
            return report
        return self._run("Bounds check", checked)

    # ==============================================
    # GAP CONSTRUCTION AND LEMMA SUITES
    # ==============================================

    def gap_report(self, s: int, t: int, materialize: bool = False) -> Tuple[bool, Any]:
        return self._run("Gap report", lambda: self.gap.gap_report(GapGraphSpec(s, t), materialize))

    def verify_lemmas(self, suite: str) -> Tuple[bool, Any]:
        return self._run("Lemma suite", self.verifier.execute, suite)

    def validate_all_components(self) -> Dict[str, bool]:
        """Validate all component configurations"""
        return {
            "spectral": self.spectral.validate_config(),
            "certifier": self.certifier.validate_config(),
            "oracle": self.oracle.validate_config(),
            "gap": self.gap.validate_config(),
            "verification": self.verifier.validate_config(),
        }
