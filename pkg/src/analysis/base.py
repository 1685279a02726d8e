"""
Base classes and error types shared by all analysis components.

Every stateful component (spectral solver, certifier, exact oracle, gap
builder, lemma suites) derives from BaseAnalysis and is configured with a
plain dictionary, like the rest of the package.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional
import logging

logger = logging.getLogger(__name__)


# ==============================================
# ERRORS
# ==============================================

class AnalysisError(Exception):
    """Base error; exit_code is what the CLI returns when it surfaces"""
    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class GuaranteeViolation(AnalysisError):
    """A proven lower/upper bound failed to hold on a concrete instance"""
    exit_code = 1


class GraphParseError(AnalysisError):
    """Malformed graph input; carries the offending position when known"""
    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        location = ""
        if line is not None:
            location = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


class DomainError(AnalysisError, ValueError):
    """Argument outside the documented domain of an operation"""
    exit_code = 2


class ConvergenceError(AnalysisError):
    exit_code = 3


class DegenerateInputError(AnalysisError):
    """Input for which the requested object does not exist (e.g. no edges)"""
    exit_code = 4


class CapExceededError(AnalysisError):
    """Exact search or construction refused: size cap or memory budget"""
    exit_code = 5


# ==============================================
# BASE COMPONENT
# ==============================================

class BaseAnalysis(ABC):
    """Abstract base class for all analysis components"""

    def __init__(self, name: str, config: Dict[str, Any] = None):
        self.name = name
        self.config = config or {}
        self.logger = logging.getLogger(f"{__name__}.{name}")

    @abstractmethod
    def execute(self, *args, **kwargs) -> Any:
        """Run the component's main operation"""
        pass

    @abstractmethod
    def validate_config(self) -> bool:
        """Validate the component configuration"""
        pass

    def log_metric(self, metric_name: str, value: float, tags: Dict[str, Any] = None):
        """Log a metric line for monitoring"""
        self.logger.info(f"Metric: {metric_name}={value}, tags={tags or {}}")


class BaseAdapter(ABC):
    """Converts one external representation into an internal one"""

    def __init__(self, name: str):
        self.name = name
        self.logger = logging.getLogger(f"{__name__}.{name}")

    @abstractmethod
    def adapt(self, data: Any) -> Any:
        """Adapt data from the external format"""
        pass

    @abstractmethod
    def can_handle(self, data: Any) -> bool:
        """Check if this adapter recognises the data"""
        pass
