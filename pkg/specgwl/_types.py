import ast
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Optional

from . import utils, validators  # skipcq: PY-W2000

logger = logging.getLogger(__name__)


class SpecGWLError(Exception):
    """Base class for every error raised by specgwl itself"""


class InputError(SpecGWLError):
    """Is being raised when the input breaks a precondition of an operation"""


class GraphError(InputError):
    """Malformed graph or a graph that doesn't fit the requested operator"""


class DistributionError(InputError):
    """Node distribution can't be built with full support"""


class CouplingError(InputError):
    """Coupling matrix violates its marginal or sign constraints"""


class DimensionError(InputError):
    """Matrix shapes don't agree with each other"""


class PartitionError(InputError):
    """Partitioning request can't be satisfied"""


class InterpolationError(InputError):
    """Coupling can't be turned into matching frames"""


class NumericalError(SpecGWLError):
    """Computation failed even though the input was valid"""


class DecompositionError(NumericalError):
    """Eigendecomposition or Perron iteration did not succeed"""


class SamplerError(NumericalError):
    """Hit-and-run sampler could not draw a usable direction"""


class SolverError(NumericalError):
    """Coupling optimizer produced non-finite values or the LP failed"""


class _Placeholder:
    """Placeholder to determine if the default value is going to be set"""


@dataclass(repr=True)
class ConfigValue:
    option: str
    default: Any = None
    doc: str = "No description"
    value: Any = field(default_factory=_Placeholder)
    validator: Optional[validators.Validator] = None
    required: bool = False

    def __post_init__(self):
        if isinstance(self.value, _Placeholder):
            self.value = self.default

    @property
    def flag(self) -> str:
        return "--" + self.option.replace("_", "-")

    def __setattr__(self, key: str, value: Any):
        if key == "value" and not isinstance(value, _Placeholder):
            if isinstance(value, str):
                try:
                    value = ast.literal_eval(value)
                except Exception:
                    pass

            # Keep json-friendly containers
            if isinstance(value, (set, tuple)):
                value = list(value)

            if self.validator is not None and value is not None:
                value = self.validator.validate(value)

        object.__setattr__(self, key, value)


class CommandConfig(dict):
    """Stores options of a single command"""

    def __init__(self, *entries: ConfigValue):
        self._config = {config.option: config for config in entries}
        super().__init__(
            {option: config.value for option, config in self._config.items()}
        )

    def getdoc(self, key: str) -> str:
        """Get the documentation by key"""
        return self._config[key].doc

    def getdef(self, key: str) -> Any:
        """Get the default value by key"""
        return self._config[key].default

    def entries(self):
        return self._config.values()

    def __setitem__(self, key: str, value: Any):
        if key not in self._config:
            raise validators.ValidationError(f"Unknown option {key}")

        try:
            self._config[key].value = value
        except validators.ValidationError as e:
            raise validators.ValidationError(f"{self._config[key].flag}: {e}") from e

        return dict.__setitem__(self, key, self._config[key].value)

    def __getitem__(self, key: str) -> Any:
        try:
            return self._config[key].value
        except KeyError:
            return None


class Command:
    """Base of every subcommand. Subclasses expose one `<name>cmd` coroutine"""

    strings = {"name": "Unknown"}


@dataclass
class RunConfig:
    """Resolved parameters of one command invocation"""

    command: str
    config: dict
    seed: int = 0
    threads: int = 1
    output_dir: str = "out"

    def __post_init__(self):
        for key, value in self.config.items():
            if key in {"graph", "target", "graph_dir", "truth", "coupling"} and value:
                if not os.path.exists(value):
                    raise validators.ValidationError(
                        f"Path passed as {key} ({value}) does not exist"
                    )

    def __getitem__(self, key: str) -> Any:
        return self.config[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.config.get(key, default)

    def path(self, *names: str) -> str:
        """Path inside of the output directory, parents are created on demand"""
        path = os.path.join(self.output_dir, *names)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        return path

    def metadata(self, wall_time: float) -> dict:
        return {
            "command": self.command,
            "config": {
                **self.config,
                "seed": self.seed,
                "threads": self.threads,
                "output": self.output_dir,
            },
            "seed": self.seed,
            "versions": utils.get_versions(),
            "git": utils.get_git_hash() or None,
            "wall_time_s": wall_time,
        }

    def write_metadata(self, wall_time: float) -> str:
        path = self.path("metadata.json")
        with open(path, "w") as f:
            f.write(json.dumps(self.metadata(wall_time), indent=2))

        logger.debug(f"Metadata written to {path}")
        return path
