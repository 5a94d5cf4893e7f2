"""Python front end for the metric-affine verification harness."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ._magcheck import (
    SCHEMA_VERSION,
    MagError,
    __version__,
    catalog_json,
    checks,
    run_scenario_json,
    summary_json,
)

__all__ = [
    "MagError",
    "SCHEMA_VERSION",
    "__version__",
    "catalog",
    "checks",
    "run",
    "run_file",
    "summary",
]


def _text(scenario: str | dict[str, Any]) -> str:
    return scenario if isinstance(scenario, str) else json.dumps(scenario)


def run(
    scenario: str | dict[str, Any],
    *,
    seed: int | None = None,
    strategy: str | None = None,
    points: int | None = None,
    include_timing: bool = True,
) -> dict[str, Any]:
    """Run a scenario (dict or JSON text) and return the report as a dict."""
    return json.loads(run_scenario_json(_text(scenario), seed, strategy, points, include_timing))


def run_file(path: str | Path, **overrides: Any) -> dict[str, Any]:
    return run(Path(path).read_text(), **overrides)


def summary(scenario: str | dict[str, Any]) -> str:
    return summary_json(_text(scenario))


def catalog() -> list[dict[str, Any]]:
    return json.loads(catalog_json())
