"""Main script, where all the fun starts"""

import argparse
import asyncio
import logging
import os
import sys
import time
import typing

import numpy as np

from . import loader, log, storage, utils, validators
from ._types import InputError, NumericalError, RunConfig

try:
    import uvloop

    uvloop.install()
except Exception:
    pass

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2

COMMON_OPTIONS = {
    "seed": (0, validators.Integer(minimum=0), "Master seed of every random draw"),
    "output": ("out", validators.String(), "Directory receiving all outputs"),
    "threads": (1, validators.Integer(minimum=1), "Worker threads for independent solves"),
}


class ArgumentParser(argparse.ArgumentParser):
    """Exits with the validation code instead of argparse's default 2"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser(commands: loader.Commands) -> ArgumentParser:
    parser = ArgumentParser(
        prog="specgwl",
        description="Spectral Gromov-Wasserstein graph comparison",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"specgwl {utils.get_version_raw()}",
    )
    subparsers = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    subparsers.required = True

    for name, (instance, method) in commands:
        subparser = subparsers.add_parser(
            name,
            help=((method.__doc__ or instance.__doc__ or "").strip().splitlines() or [""])[0],
            description=instance.__doc__,
        )
        for option, (default, validator, doc) in COMMON_OPTIONS.items():
            subparser.add_argument(
                f"--{option}",
                dest=option,
                default=argparse.SUPPRESS,
                help=f"{doc} ({validator.doc}, default: {default})",
            )

        subparser.add_argument(
            "--config",
            dest="config",
            default=argparse.SUPPRESS,
            help="JSON file with option values, or metadata.json of an earlier run",
        )
        subparser.add_argument(
            "--verbose",
            dest="verbose",
            action="store_true",
            default=argparse.SUPPRESS,
            help="Log debug messages",
        )

        config = instance.config
        for entry in config.entries():
            typehint = entry.validator.doc if entry.validator else "value"
            default = "required" if entry.required else f"default: {config.getdef(entry.option)}"
            subparser.add_argument(
                entry.flag,
                dest=entry.option,
                default=argparse.SUPPRESS,
                metavar=entry.option.upper(),
                help=f"{config.getdoc(entry.option)} ({typehint}, {default})",
            )

    return parser


def _file_config(path: str) -> dict:
    data = storage.read_json(path)
    if not isinstance(data, dict):
        raise validators.ValidationError(f"{path} must contain a JSON object")

    # Metadata of an earlier run carries the options in its config member
    if isinstance(data.get("config"), dict) and "command" in data:
        data = data["config"]

    return data


def resolve_run(
    commands: loader.Commands,
    arguments: typing.Dict[str, typing.Any],
) -> typing.Tuple[loader.Command, typing.Callable, RunConfig]:
    """
    Merge defaults, the config file and command-line values, in that order
    of increasing priority
    """
    arguments = dict(arguments)
    name = arguments.pop("command")
    instance, method = commands.dispatch(name)

    common = {option: default for option, (default, _, _) in COMMON_OPTIONS.items()}
    layers = []
    if "config" in arguments:
        layers.append(_file_config(arguments.pop("config")))

    arguments.pop("verbose", None)
    layers.append(arguments)

    for layer in layers:
        for key, value in layer.items():
            if key in COMMON_OPTIONS:
                common[key] = COMMON_OPTIONS[key][1].validate(value)
            elif key in instance.config:
                instance.config[key] = value
            else:
                raise validators.ValidationError(f"Unknown option {key} for {name}")

    missing = [
        entry.flag
        for entry in instance.config.entries()
        if entry.required and instance.config[entry.option] is None
    ]
    if missing:
        raise validators.ValidationError(f"Missing required options: {', '.join(missing)}")

    run = RunConfig(
        command=name,
        config=dict(instance.config),
        seed=common["seed"],
        threads=common["threads"],
        output_dir=common["output"],
    )
    return instance, method, run


def main(argv: typing.Optional[typing.List[str]] = None) -> int:
    """Entry point, returns the process exit code"""
    memory = log.get_handler() or log.init()

    commands = loader.Commands()
    commands.register_all()
    parser = build_parser(commands)
    try:
        arguments = vars(parser.parse_args(argv))
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_VALIDATION

    memory.clear()

    memory.setLevel(logging.DEBUG if arguments.get("verbose") else logging.INFO)

    try:
        _, method, run = resolve_run(commands, arguments)
        os.makedirs(run.output_dir, exist_ok=True)
        logger.info(f"specgwl {utils.get_version_raw()} running {run.command} into {run.output_dir}")

        started = time.perf_counter()
        asyncio.run(method(run))
        run.write_metadata(time.perf_counter() - started)
        memory.write(run.path("run.log"))
    except (validators.ValidationError, InputError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as e:
        logger.debug("Numerical failure", exc_info=True)
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    return EXIT_OK
