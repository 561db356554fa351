"""Python front end to the relic compositional verification core."""

import json

from . import _core
from ._core import RelicError, eliminate, is_valid

__all__ = ["RelicError", "check_sat", "compose", "eliminate", "is_valid", "output_range", "verify"]


def compose(spec: str) -> dict:
    """Strongest system-property and initial condition of a spec text."""
    return json.loads(_core.compose(spec))


def verify(spec: str, k_max: int = 10) -> list:
    """One verdict dict per postulate of a spec text."""
    return json.loads(_core.verify(spec, k_max))


def check_sat(smtlib: str) -> dict:
    """Status and model of an SMT-LIB script; model values are exact rational strings."""
    return json.loads(_core.check_sat(smtlib))


def output_range(graph: str, output: str, baseline: bool = False) -> dict:
    """Range of an Output block of a JSON block graph."""
    return json.loads(_core.output_range(graph, output, baseline))
