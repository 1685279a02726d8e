# src/services/report_service.py
import json
import math
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from jsonschema import Draft7Validator

from src.analysis.base import AnalysisError
from src.models import Certificate, ExactMResult, LoadReport, VertexSet
import logging

logger = logging.getLogger(__name__)

SCHEMA_DIR = Path(__file__).resolve().parents[2] / 'docs' / 'schemas'

SCHEMAS = {
    'certificate': 'certificate.schema.json',
    'gapreport': 'gapreport.schema.json',
    'lambda': 'lambda.schema.json',
    'exact': 'exact.schema.json',
    'bounds': 'bounds.schema.json',
    'suite': 'suite.schema.json',
}


class ReportValidationError(AnalysisError):
    """Output did not match its shipped JSON schema"""
    exit_code = 1


def to_builtin(value: Any) -> Any:
    """Recursively convert numpy scalars/arrays, tuples, enums and sets to JSON-ready values"""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, VertexSet):
        return list(value.members)
    if isinstance(value, np.ndarray):
        return [to_builtin(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, Enum):
        return value.value
    return value


class ReportService:
    """Service class for rendering analysis results as schema-checked JSON"""

    def __init__(self, schema_dir: Optional[Path] = None):
        self.schema_dir = Path(schema_dir) if schema_dir else SCHEMA_DIR
        self._validators: Dict[str, Draft7Validator] = {}

    def _validator(self, name: str) -> Draft7Validator:
        if name not in self._validators:
            with open(self.schema_dir / SCHEMAS[name], encoding='utf-8') as fh:
                schema = json.load(fh)
            Draft7Validator.check_schema(schema)
            self._validators[name] = Draft7Validator(schema)
        return self._validators[name]

    def validate(self, payload: Dict[str, Any], schema: str) -> Tuple[bool, List[str]]:
        """Validate a payload against a shipped schema"""
        errors = sorted(self._validator(schema).iter_errors(payload), key=lambda e: list(e.path))
        messages = [f"{'/'.join(str(p) for p in e.path) or '<root>'}: {e.message}" for e in errors]
        return not messages, messages

    def render(self, payload: Dict[str, Any], schema: Optional[str] = None) -> str:
        """Stable-order JSON; raises ReportValidationError when the schema check fails"""
        data = to_builtin(payload)
        if schema:
            ok, messages = self.validate(data, schema)
            if not ok:
                logger.error(f"Report does not match schema {schema}: {messages}")
                raise ReportValidationError(f"report does not match schema {schema}: {messages[0]}")
        return json.dumps(data, indent=2, sort_keys=False, allow_nan=False, ensure_ascii=False)

    # ---------------------------------------------- per-result payloads

    def certificate_json(self, cert: Certificate) -> str:
        return self.render(cert.to_dict(), 'certificate')

    def exact_payload(self, result: ExactMResult) -> Dict[str, Any]:
        return {
            'value': result.value,
            'squared': f"{result.squared.numerator}/{result.squared.denominator}",
            'edges': result.edges,
            'x': list(result.x_witness.members),
            'y': list(result.y_witness.members),
            'subsets_scanned': result.subsets_scanned,
        }

    def exact_json(self, result: ExactMResult) -> str:
        return self.render(self.exact_payload(result), 'exact')

    def suite_json(self, report: Dict[str, Any]) -> str:
        return self.render(report, 'suite')

    # ---------------------------------------------- human output

    @staticmethod
    def render_human(payload: Dict[str, Any], skip: Tuple[str, ...] = ('cases', 'checks')) -> str:
        lines = []
        for key, value in to_builtin(payload).items():
            if key in skip:
                continue
            if isinstance(value, float):
                value = f"{value:.10f}"
            lines.append(f"{key}: {value}")
        return "\n".join(lines)

    @staticmethod
    def remap_lines(report: LoadReport) -> List[str]:
        """Original label for each vertex index, printed when ids had gaps"""
        if not report.remapped:
            return []
        return [f"vertex {index} <- {label}" for index, label in enumerate(report.labels)]


def certificate_json(cert: Certificate) -> str:
    return ReportService().certificate_json(cert)
