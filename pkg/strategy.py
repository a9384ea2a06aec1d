# strategy.py
import csv
import io
import json
import logging
from abc import ABC, abstractmethod
from dataclasses import asdict, is_dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np

from config import SCHEMA_VERSION, AppConfig, RunConfig


class OutputStrategy(ABC):
    """
    Abstract base class for the Strategy Pattern.
    Renders a command result as one machine-readable document.
    """

    def __init__(self, run_config: RunConfig, app_config: AppConfig):
        self.run_config = run_config
        self.app_config = app_config
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def render(self, result: Dict[str, Any]) -> str:
        """
        Render the result.

        Args:
            result: Dictionary returned by Command.execute()

        Returns:
            The document text
        """
        pass

    def write(self, result: Dict[str, Any]) -> Optional[str]:
        """Write to --out when given, otherwise return the text for stdout."""
        text = self.render(result)
        if self.run_config.out:
            with open(self.run_config.out, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            self.logger.info(f"Wrote {len(text)} bytes to {self.run_config.out}")
            return None
        return text


class JsonOutputStrategy(OutputStrategy):
    """Versioned JSON document with sorted keys; generated_at is the only varying field."""

    def render(self, result: Dict[str, Any]) -> str:
        document = {
            "schema_version": SCHEMA_VERSION,
            "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "command": self.run_config.subcommand,
            "config": {"run": self.run_config.model_dump(), "app": self.app_config.model_dump()},
            "seed": self.run_config.seed,
            "result": result.get("result", {}),
        }
        if result.get("rows") is not None:
            document["rows"] = result["rows"]
        return json.dumps(document, sort_keys=True, indent=2, default=_jsonable) + "\n"


class CsvOutputStrategy(OutputStrategy):
    """Header row plus one row per record, UNIX newlines."""

    def render(self, result: Dict[str, Any]) -> str:
        rows: List[Dict[str, Any]] = result.get("rows") or []
        columns = result.get("columns") or (list(rows[0]) if rows else [])
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
        return buffer.getvalue()


def create_output_strategy(run_config: RunConfig, app_config: AppConfig) -> OutputStrategy:
    if run_config.format == "csv":
        return CsvOutputStrategy(run_config, app_config)
    return JsonOutputStrategy(run_config, app_config)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if is_dataclass(value):
        return asdict(value)
    if isinstance(value, (set, tuple)):
        return list(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value, sort_keys=True, default=_jsonable)
    return value
