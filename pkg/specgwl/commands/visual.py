"""Frames interpolating one graph drawing into another"""

import logging

from .. import loader, storage, utils
from .._types import InterpolationError
from ..gw_solver import spec_gw_distance
from ..interpolate import frames_to_json, interpolation_frames, render_svg

logger = logging.getLogger(__name__)


class InterpolateMod(loader.Command):
    """Animate a matching between two graphs"""

    strings = {
        "name": "Interpolate",
        "solving": "No coupling given, solving the spectral matching at t={}",
        "written": "{} frames written to {}",
    }

    def __init__(self):
        self.config = loader.CommandConfig(
            loader.ConfigValue(
                "graph",
                None,
                "Edge list of the source graph",
                validator=loader.validators.ExistingPath(),
                required=True,
            ),
            loader.ConfigValue(
                "target",
                None,
                "Edge list of the target graph",
                validator=loader.validators.ExistingPath(),
                required=True,
            ),
            loader.ConfigValue(
                "coupling",
                None,
                "Coupling CSV as written by match, solved on the fly when absent",
                validator=loader.validators.ExistingPath(),
            ),
            loader.ConfigValue(
                "t",
                10.0,
                "Diffusion time of the on-the-fly matching",
                validator=loader.validators.Float(minimum=0),
            ),
            loader.ConfigValue(
                "n_frames",
                30,
                "Frames from source (t=0) to target (t=1)",
                validator=loader.validators.Integer(minimum=2),
            ),
            loader.ConfigValue(
                "svg",
                False,
                "Also render every frame as SVG",
                validator=loader.validators.Boolean(),
            ),
            loader.laplacian_value(),
            *loader.distribution_values(),
            *loader.solver_values(),
        )

    async def interpolatecmd(self, run: loader.RunConfig):
        """Frame JSON (and SVG files) morphing the source into the target"""
        g = await utils.run_sync(storage.read_edge_list, run["graph"])
        h = await utils.run_sync(storage.read_edge_list, run["target"])

        if run["coupling"]:
            coupling = await utils.run_sync(storage.read_matrix_csv, run["coupling"])
            if coupling.shape != (g.n, h.n):
                raise InterpolationError(
                    f"{run['coupling']} holds a {coupling.shape[0]}x{coupling.shape[1]} coupling, "
                    f"expected {g.n}x{h.n}"
                )
        else:
            logger.info(self.strings["solving"].format(run["t"]))
            result = await utils.run_sync(
                spec_gw_distance,
                g,
                loader.distribution(run, g),
                h,
                loader.distribution(run, h),
                run["t"],
                loader.solver_options(run),
                loader.laplacian_kind(run),
            )
            coupling = result.coupling.matrix

        frames = await utils.run_sync(interpolation_frames, g, h, coupling, run["n_frames"], run.seed)
        path = storage.write_json(run.path("frames.json"), frames_to_json(frames))

        if run["svg"]:
            for index, frame in enumerate(frames):
                with open(run.path("frames", f"frame_{index:03d}.svg"), "w") as f:
                    f.write(render_svg(frame))

        logger.info(self.strings["written"].format(len(frames), path))
