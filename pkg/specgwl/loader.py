"""Discovers subcommands and holds the option groups they share"""

import importlib
import inspect
import logging
import os
import typing

from . import utils, validators  # skipcq: PY-W2000
from ._types import (  # skipcq: PY-W2000
    Command,
    CommandConfig,
    ConfigValue,
    RunConfig,
)
from .graph_core import Graph, LaplacianKind
from .gw_solver import SolverOptions
from .measures import NodeDistribution, node_distribution

logger = logging.getLogger(__name__)

COMMANDS_NAME = "commands"
AUTO = "auto"


def get_commands(instance: Command) -> typing.Dict[str, typing.Callable]:
    """Introspect the instance to get its commands"""
    return {
        method_name.rsplit("cmd", maxsplit=1)[0]: getattr(instance, method_name)
        for method_name in dir(instance)
        if callable(getattr(instance, method_name)) and method_name.endswith("cmd")
    }


class Commands:
    """Stores all registered commands"""

    def __init__(self):
        self.commands = {}
        self.instances = []

    def register_all(self, names: typing.Optional[typing.List[str]] = None):
        """Load all command modules of the commands directory"""
        if names is None:
            names = sorted(
                name.rsplit(".py", maxsplit=1)[0]
                for name in os.listdir(os.path.join(utils.get_base_dir(), COMMANDS_NAME))
                if name.endswith(".py") and not name.startswith("_")
            )

        for name in names:
            module_name = f"{__package__}.{COMMANDS_NAME}.{name}"
            logger.debug(f"Loading {module_name}")
            module = importlib.import_module(module_name)
            for _, cls in inspect.getmembers(module, inspect.isclass):
                if issubclass(cls, Command) and cls is not Command and cls.__module__ == module_name:
                    self.register_command(cls())

    def register_command(self, instance: Command):
        for command, method in get_commands(instance).items():
            if command in self.commands:
                raise RuntimeError(
                    f"Command {command} of {instance.strings['name']} is already registered"
                )

            self.commands[command] = (instance, method)

        self.instances.append(instance)

    def dispatch(self, command: str) -> tuple:
        """Instance and coroutine of a command"""
        return self.commands[command]

    def __iter__(self):
        return iter(sorted(self.commands.items()))


def laplacian_value() -> ConfigValue:
    return ConfigValue(
        "laplacian",
        AUTO,
        "Laplacian variant, auto picks normalized (undirected) or Chung's (directed)",
        validator=validators.Choice([AUTO] + [kind.value for kind in LaplacianKind]),
    )


def laplacian_kind(run: RunConfig) -> typing.Optional[str]:
    return None if run["laplacian"] == AUTO else run["laplacian"]


def distribution_values() -> typing.List[ConfigValue]:
    return [
        ConfigValue(
            "a",
            0.0,
            "Additive degree offset of node distributions",
            validator=validators.Float(minimum=0),
        ),
        ConfigValue(
            "b",
            0.0,
            "Degree exponent of node distributions, 0 is uniform",
            validator=validators.Probability(),
        ),
    ]


def distribution(run: RunConfig, g: Graph) -> NodeDistribution:
    return node_distribution(g, run["a"], run["b"])


def solver_values() -> typing.List[ConfigValue]:
    return [
        ConfigValue(
            "max_iters",
            1000,
            "Iteration cap of the coupling optimizer",
            validator=validators.Integer(minimum=1),
        ),
        ConfigValue(
            "rel_tol",
            1e-9,
            "Relative loss decrease that stops the optimizer",
            validator=validators.Float(minimum=0),
        ),
        ConfigValue(
            "vertex_snap",
            True,
            "Finish on a vertex of the coupling polytope when it doesn't raise the loss",
            validator=validators.Boolean(),
        ),
    ]


def solver_options(run: RunConfig) -> SolverOptions:
    return SolverOptions(
        max_iters=run["max_iters"],
        rel_tol=run["rel_tol"],
        vertex_snap=run["vertex_snap"],
    )
