# config.py
import os
from typing import Any, Dict, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from mapdeg.errors import ConfigurationError

SCHEMA_VERSION = "1.0"


class AppConfig(BaseModel):
    """
    Tunables of the enumeration engine. Services never read the environment;
    the factory hands these values to their constructors.
    """
    max_order_bipartite: int = Field(400, ge=1)
    max_order_general: int = Field(80, ge=1)
    max_order_genus: int = Field(40, ge=1)
    oracle_max_edges: int = Field(5, ge=1)
    sampler_max_n: int = Field(2000, ge=1)
    sampler_memory_mib: int = Field(512, ge=1)
    mp_dps: int = Field(30, ge=15)
    fd_step: float = Field(1e-3, gt=0)
    richardson_tolerance: float = Field(1e-4, gt=0)
    tail_tolerance: float = Field(1e-14, gt=0)
    fit_window: int = Field(10, ge=3)
    fit_threshold: float = Field(5e-3, gt=0)
    threads: int = Field(1, ge=1)
    log_level: str = "WARNING"

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> 'AppConfig':
        """
        Create an AppConfig instance from a dictionary.

        Args:
            config_dict: Dictionary containing configuration values

        Returns:
            AppConfig instance with values from the dictionary
        """
        try:
            return cls(**{k: v for k, v in config_dict.items() if k in cls.model_fields})
        except ValidationError as exc:
            raise ConfigurationError(str(exc)) from exc

    @classmethod
    def from_env(cls) -> 'AppConfig':
        """
        Read MAPDEG_* variables (a .env file is honoured). MAPDEG_MAX_ORDER
        overrides every order guard.
        """
        load_dotenv()
        values: Dict[str, Any] = {}
        max_order = os.getenv("MAPDEG_MAX_ORDER")
        if max_order:
            values.update(max_order_bipartite=max_order, max_order_general=max_order, max_order_genus=max_order)
        for key, name in (("threads", "MAPDEG_THREADS"), ("mp_dps", "MAPDEG_MP_DPS"),
                          ("log_level", "MAPDEG_LOG_LEVEL")):
            value = os.getenv(name)
            if value:
                values[key] = value
        return cls.from_dict(values)


class RunConfig(BaseModel):
    """Resolved per-invocation settings; serialized into every output document."""
    subcommand: str
    degrees: Optional[str] = None
    weights: Optional[str] = None
    n: Optional[int] = None
    genus: int = 1
    d: Optional[int] = None
    reps: Optional[int] = None
    seed: Optional[int] = None
    format: Literal["json", "csv"] = "json"
    out: Optional[str] = None
    threads: int = 1
