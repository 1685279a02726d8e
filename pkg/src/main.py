# src/main.py
"""
bidensity command line.

    python run.py lambda GRAPH            lambda_max with the degree bound chain
    python run.py certify GRAPH           certificate (X, Y) with a guaranteed density
    python run.py m-exact GRAPH           exact M by enumeration (small graphs)
    python run.py bounds GRAPH            mean degree <= M <= Delta, M <= lambda_max
    python run.py gap --s S --t T         tensor-power separation report
    python run.py verify-lemmas --suite   seeded property suites

Exit codes: 0 ok, 1 guarantee violation, 2 parse error, 3 non-convergence,
4 degenerate input, 5 cap or budget exceeded.
"""

from typing import Any, Dict, List, Optional
import argparse
import logging
import sys

from src.analysis.base import AnalysisError
from src.analysis.graph_core import EDGE_LIST, FORMATS
from src.analysis.manager import AnalysisManager
from src.analysis.verification import SUITES
from src.config import (BIDENSITY_LOG_LEVEL, BIDENSITY_THREADS, DEFAULT_EXACT_CAP,
                        DEFAULT_MEMORY_BUDGET, DEFAULT_TOLERANCE, RunConfig)
from src.models import CertificateVariant
from src.services.report_service import ReportService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_GUARANTEE = 1
EXIT_PARSE = 2
EXIT_CONVERGENCE = 3


def _print(text: str):
    sys.stdout.write(text + "\n")


def _fail(error: AnalysisError) -> int:
    sys.stderr.write(f"error: {error.message}\n")
    return error.exit_code


def _emit(args: argparse.Namespace, service: ReportService, payload: Dict[str, Any],
          schema: str, headline: Optional[str] = None):
    if args.json:
        _print(service.render(payload, schema))
        return
    service.render(payload, schema)
    if headline:
        _print(headline)
    _print(service.render_human(payload))


def _load(manager: AnalysisManager, args: argparse.Namespace, service: ReportService):
    ok, result = manager.load_graph(args.graph, args.format)
    if not ok:
        return None, _fail(result)
    graph, report = result
    for line in service.remap_lines(report):
        (sys.stderr if args.json else sys.stdout).write(line + "\n")
    return graph, EXIT_OK


# ==============================================
# COMMANDS
# ==============================================

def cmd_lambda(args: argparse.Namespace, manager: AnalysisManager, service: ReportService) -> int:
    g, code = _load(manager, args, service)
    if g is None:
        return code
    ok, chain = manager.lambda_report(g)
    if not ok:
        return _fail(chain)
    payload = {'vertices': g.vertex_count, 'edges': g.edge_count, **chain}
    _emit(args, service, payload, 'lambda', f"lambda_max = {chain['lambda']:.10f}")
    if not chain['converged']:
        sys.stderr.write("error: power iteration did not converge\n")
        return EXIT_CONVERGENCE
    return EXIT_OK if chain['ok'] else EXIT_GUARANTEE


def cmd_certify(args: argparse.Namespace, manager: AnalysisManager, service: ReportService) -> int:
    g, code = _load(manager, args, service)
    if g is None:
        return code
    ok, cert = manager.certify(g, CertificateVariant.parse(args.variant))
    if not ok:
        return _fail(cert)
    bound = cert.guarantee_factor * cert.lambda_max
    _emit(args, service, cert.to_dict(), 'certificate',
          f"density {cert.density:.10f} >= {cert.guarantee_factor:.10f} * {cert.lambda_max:.10f}"
          f" = {bound:.10f}")
    return EXIT_OK if cert.converged else EXIT_CONVERGENCE


def cmd_m_exact(args: argparse.Namespace, manager: AnalysisManager, service: ReportService) -> int:
    g, code = _load(manager, args, service)
    if g is None:
        return code
    ok, result = manager.m_exact(g)
    if not ok:
        return _fail(result)
    _emit(args, service, service.exact_payload(result), 'exact', f"M = {result.value:.10f}")
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace, manager: AnalysisManager, service: ReportService) -> int:
    g, code = _load(manager, args, service)
    if g is None:
        return code
    ok, report = manager.bounds(g)
    if not ok:
        return _fail(report)
    _emit(args, service, report, 'bounds',
          f"{report['mean_degree']:.10f} <= {report['m_exact']:.10f} <= {report['max_degree']}, "
          f"M <= lambda_max = {report['lambda']:.10f}")
    return EXIT_OK


def cmd_gap(args: argparse.Namespace, manager: AnalysisManager, service: ReportService) -> int:
    ok, report = manager.gap_report(args.s, args.t, args.materialize)
    if not ok:
        return _fail(report)
    _emit(args, service, report, 'gapreport')
    if report['materialized'] and not (report['ordering_ok'] and report['lambda_agrees']):
        return EXIT_GUARANTEE
    return EXIT_OK


def cmd_verify_lemmas(args: argparse.Namespace, manager: AnalysisManager, service: ReportService) -> int:
    ok, report = manager.verify_lemmas(args.suite)
    if not ok:
        return _fail(report)
    _emit(args, service, report, 'suite', f"{report['passed']}/{report['total']} pass")
    return EXIT_GUARANTEE if report['failed'] else EXIT_OK


COMMANDS = {
    'lambda': cmd_lambda,
    'certify': cmd_certify,
    'm-exact': cmd_m_exact,
    'bounds': cmd_bounds,
    'gap': cmd_gap,
    'verify-lemmas': cmd_verify_lemmas,
}


# ==============================================
# ARGUMENTS
# ==============================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE,
                        help="relative power-iteration tolerance (default 1e-10)")
    common.add_argument("--max-iter", type=int, default=None,
                        help="power-iteration cap (default 100*n + 1000)")
    common.add_argument("--cap", type=int, default=DEFAULT_EXACT_CAP,
                        help="largest vertex count for exact enumeration (at most 30)")
    common.add_argument("--budget", type=int, default=DEFAULT_MEMORY_BUDGET,
                        help="ordered adjacency pairs allowed for tensor powers")
    common.add_argument("--seed", "--rng-seed", "--rng_seed", dest="seed", type=int, default=0,
                        help="seed for randomized suites")
    common.add_argument("--threads", type=int, default=BIDENSITY_THREADS,
                        help="worker threads, at most BIDENSITY_THREADS")
    common.add_argument("--json", action="store_true", help="machine-readable JSON output")
    common.add_argument("--debug-checks", action="store_true",
                        help="assert monotone Rayleigh quotients during iteration")

    graph_input = argparse.ArgumentParser(add_help=False)
    graph_input.add_argument("graph", help="graph file (edge list, or Matrix Market for .mtx)")
    graph_input.add_argument("--format", choices=FORMATS, default=None,
                             help=f"input format (default: by extension, else {EDGE_LIST})")

    parser = argparse.ArgumentParser(prog="bidensity", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("lambda", parents=[common, graph_input], help="largest adjacency eigenvalue")
    certify = sub.add_parser("certify", parents=[common, graph_input], help="density certificate")
    certify.add_argument("--variant", default="t1", choices=["t1", "t2", "t3", "T1", "T2", "T3"])
    sub.add_parser("m-exact", parents=[common, graph_input], help="exact maximum bi-average degree")
    sub.add_parser("bounds", parents=[common, graph_input], help="degree and spectral bounds on M")
    gap = sub.add_parser("gap", parents=[common], help="tensor-power separation report")
    gap.add_argument("--s", type=int, required=True)
    gap.add_argument("--t", type=int, required=True)
    gap.add_argument("--materialize", action="store_true", help="build the graph and measure")
    lemmas = sub.add_parser("verify-lemmas", parents=[common], help="seeded property suites")
    lemmas.add_argument("--suite", choices=SUITES, required=True)
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    threads = args.threads
    if threads > BIDENSITY_THREADS:
        logger.warning(f"--threads {threads} exceeds BIDENSITY_THREADS={BIDENSITY_THREADS}; using {BIDENSITY_THREADS}")
        threads = BIDENSITY_THREADS
    return RunConfig(
        tolerance=args.tol,
        max_iter=args.max_iter,
        exact_cap=args.cap,
        memory_budget=args.budget,
        rng_seed=args.seed,
        output='json' if args.json else 'human',
        threads=threads,
        debug_checks=args.debug_checks,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, BIDENSITY_LOG_LEVEL.upper(), logging.WARNING),
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    config = run_config_from_args(args)
    valid, message = config.validate()
    if not valid:
        sys.stderr.write(f"error: {message}\n")
        return EXIT_PARSE
    try:
        manager = AnalysisManager(config)
        invalid = [name for name, ok in manager.validate_all_components().items() if not ok]
        if invalid:
            sys.stderr.write(f"error: invalid configuration for {', '.join(invalid)}\n")
            return EXIT_PARSE
        return COMMANDS[args.command](args, manager, ReportService())
    except AnalysisError as e:
        return _fail(e)


if __name__ == "__main__":
    sys.exit(main())
