import os
from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional, Tuple
from dotenv import load_dotenv

load_dotenv()  # Load environment variables from .env file

BIDENSITY_THREADS = int(os.getenv('BIDENSITY_THREADS', '1') or 1)
BIDENSITY_LOG_LEVEL = os.getenv('BIDENSITY_LOG_LEVEL', 'WARNING')
BIDENSITY_EXACT_TIME_LIMIT = float(os.getenv('BIDENSITY_EXACT_TIME_LIMIT', '600') or 600)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_EXACT_CAP = 26
MAX_EXACT_CAP = 30
DEFAULT_MEMORY_BUDGET = 200_000_000  # ordered adjacency pairs
PERRON_CLAMP = 1e-13


def default_max_iter(vertex_count: int) -> int:
    return 100 * vertex_count + 1000


@dataclass
class RunConfig:
    tolerance: float = DEFAULT_TOLERANCE
    max_iter: Optional[int] = None
    exact_cap: int = DEFAULT_EXACT_CAP
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    rng_seed: int = 0
    output: str = 'human'
    threads: int = BIDENSITY_THREADS
    time_limit: float = BIDENSITY_EXACT_TIME_LIMIT
    debug_checks: bool = False

    def validate(self) -> Tuple[bool, str]:
        if not self.tolerance > 0:
            return False, "tolerance must be positive"
        if self.max_iter is not None and self.max_iter < 1:
            return False, "max_iter must be at least 1"
        if not 1 <= self.exact_cap <= MAX_EXACT_CAP:
            return False, f"exact_cap must lie in [1, {MAX_EXACT_CAP}]"
        if self.memory_budget < 1:
            return False, "memory_budget must be positive"
        if self.output not in ('human', 'json'):
            return False, "output must be 'human' or 'json'"
        if self.threads < 1:
            return False, "threads must be at least 1"
        return True, "ok"

    def as_component_config(self) -> Dict[str, Dict[str, Any]]:
        """Per-component configuration sections for AnalysisManager"""
        spectral = {
            'tolerance': self.tolerance,
            'max_iter': self.max_iter,
            'debug_checks': self.debug_checks,
        }
        return {
            'spectral': spectral,
            'certifier': {'spectral': spectral, 'threads': min(self.threads, 2)},
            'oracle': {'cap': self.exact_cap, 'threads': self.threads, 'time_limit': self.time_limit},
            'gap': {'memory_budget': self.memory_budget, 'spectral': spectral,
                    'exact_cap': self.exact_cap, 'threads': self.threads},
            'verification': {'seed': self.rng_seed, 'threads': self.threads},
        }

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
