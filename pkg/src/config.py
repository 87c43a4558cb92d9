"""
Configuration module for the extended Lorentz cone toolkit.
Defaults come from the dataclasses below, then config/config.json, then the
LORENTZ_* environment variables (a .env file is honoured), last one winning.
"""

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import load_dotenv

from .errors import ProblemFileError

# Load environment variables from .env file
load_dotenv()

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "config.json"

# environment variable -> (section, field); these win over config.json
ENVIRONMENT_KEYS = {
    'LORENTZ_EPS': ('tolerance', 'EPS'),
    'LORENTZ_MAX_ITER': ('solver', 'MAX_ITER'),
    'LORENTZ_SEED': ('sampling', 'SEED'),
    'LORENTZ_LOG_FILE': ('output', 'LOG_FILE'),
    'LORENTZ_LOG_LEVEL': ('output', 'LOG_LEVEL'),
}


@dataclass
class ToleranceConfig:
    """Slack used by membership tests and linear algebra guards"""
    EPS: float = float(os.getenv('LORENTZ_EPS', '1e-9'))
    CONDITION_LIMIT: float = 1e12
    ENUMERATION_LIMIT: int = 20
    # second-order projection never forms u/||u|| below this norm
    DIRECTION_FLOOR: float = 1e-300

    def __post_init__(self):
        if self.EPS < 0:
            raise ValueError(f"EPS must be nonnegative, got {self.EPS}")


@dataclass
class SolverConfig:
    """Defaults for the Picard iteration"""
    MAX_ITER: int = int(os.getenv('LORENTZ_MAX_ITER', '10000'))
    TOL_STEP: float = 1e-12
    TOL_RESIDUAL: float = 1e-10
    MONOTONE_CHECK: bool = True
    EXACT_DIGITS: int = 60


@dataclass
class SamplingConfig:
    """Seeds and sample sizes for the property suites"""
    SEED: int = int(os.getenv('LORENTZ_SEED', '42'))
    SAMPLES: int = 10000
    DUAL_SAMPLES: int = 1000
    HYPERPLANE_NORMALS: int = 1000
    # per-normal budget when refuting hyperplane isotonicity
    REFUTATION_SAMPLES: int = 2000


@dataclass
class OutputConfig:
    """Report and trace formatting"""
    SIGNIFICANT_DIGITS: int = 17
    LOG_FILE: str = os.getenv('LORENTZ_LOG_FILE', 'logs/lorentz_picard.log')
    LOG_LEVEL: str = os.getenv('LORENTZ_LOG_LEVEL', 'WARNING')
    LOG_FORMAT: str = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    LOG_MAX_BYTES: int = 10 * 1024 * 1024
    LOG_BACKUPS: int = 5


class Config:
    """Main configuration class"""

    SECTIONS = ('tolerance', 'solver', 'sampling', 'output')

    def __init__(self):
        self.tolerance = ToleranceConfig()
        self.solver = SolverConfig()
        self.sampling = SamplingConfig()
        self.output = OutputConfig()

    def apply_overrides(self, overrides: Mapping[str, Mapping[str, Any]], source: str = "<overrides>") -> None:
        """
        Apply a nested mapping of overrides, e.g. {"solver": {"max_iter": 50}}.

        Keys are matched case-insensitively against the dataclass fields;
        unknown sections or keys are rejected.
        """
        for section_name, values in overrides.items():
            if section_name not in self.SECTIONS:
                raise ProblemFileError("unknown configuration section", path=source, field=section_name)
            if not isinstance(values, Mapping):
                raise ProblemFileError("section must be an object", path=source, field=section_name)
            section = getattr(self, section_name)
            known = {f.name.lower(): f for f in fields(section)}
            for key, value in values.items():
                field_info = known.get(key.lower())
                if field_info is None:
                    raise ProblemFileError("unknown configuration key", path=source,
                                           field=f"{section_name}.{key}")
                current = getattr(section, field_info.name)
                if isinstance(current, bool) and not isinstance(value, bool):
                    raise ProblemFileError(f"expected true or false, got {value!r}", path=source,
                                           field=f"{section_name}.{key}")
                try:
                    converted = type(current)(value) if current is not None else value
                except (TypeError, ValueError) as exc:
                    raise ProblemFileError(f"cannot convert {value!r}: {exc}", path=source,
                                           field=f"{section_name}.{key}") from exc
                setattr(section, field_info.name, converted)

    def load_file(self, path: Optional[Path] = None) -> bool:
        """Apply overrides from a JSON file, then the environment; returns False if the file does not exist"""
        path = Path(path) if path else DEFAULT_CONFIG_PATH
        if not path.exists():
            self.apply_environment()
            return False
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ProblemFileError(exc.msg, path=str(path), line=exc.lineno) from exc
        self.apply_overrides(data, source=str(path))
        self.apply_environment()
        return True

    def apply_environment(self) -> None:
        """Re-apply the LORENTZ_* environment variables that are set"""
        overrides: Dict[str, Dict[str, Any]] = {}
        for variable, (section, key) in ENVIRONMENT_KEYS.items():
            value = os.getenv(variable)
            if value is not None:
                overrides.setdefault(section, {})[key] = value
        self.apply_overrides(overrides, source="environment")

    def as_dict(self) -> Dict[str, Dict[str, Any]]:
        """Current values, lower-case keys, in the layout of config.json"""
        return {
            name: {f.name.lower(): getattr(getattr(self, name), f.name)
                   for f in fields(getattr(self, name))}
            for name in self.SECTIONS
        }


# Global config instance
config = Config()
