"""Coupling ensembles: polytope samples and diffusion-time sweeps"""

import logging

import numpy as np

from .. import loader, storage, utils
from ..gw_solver import coupling_scale_sweep
from ..measures import sample_couplings

logger = logging.getLogger(__name__)


def _pair_values() -> list:
    return [
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
    ]


def _flattened(couplings: list) -> np.ndarray:
    return np.vstack([np.asarray(c.matrix).ravel() for c in couplings])


class SampleMod(loader.Command):
    """Random couplings between two graphs' node distributions"""

    strings = {
        "name": "Sample",
        "sampled": "{} couplings of shape {}x{} sampled",
    }

    def __init__(self):
        self.config = loader.CommandConfig(
            *_pair_values(),
            loader.ConfigValue(
                "n_samples",
                100,
                "Couplings to retain",
                validator=loader.validators.Integer(minimum=1),
            ),
            loader.ConfigValue(
                "steps_between",
                1000,
                "Hit-and-run steps between retained couplings",
                validator=loader.validators.Integer(minimum=1),
            ),
            *loader.distribution_values(),
        )

    async def samplecmd(self, run: loader.RunConfig):
        """Hit-and-run chain through the coupling polytope"""
        g = await utils.run_sync(storage.read_edge_list, run["graph"])
        h = await utils.run_sync(storage.read_edge_list, run["target"])
        samples = await utils.run_sync(
            sample_couplings,
            loader.distribution(run, g),
            loader.distribution(run, h),
            run["n_samples"],
            run["steps_between"],
            run.seed,
        )
        logger.info(self.strings["sampled"].format(len(samples), g.n, h.n))

        storage.write_json(
            run.path("couplings.json"),
            {"couplings": [storage.coupling_record(c) for c in samples]},
        )
        storage.write_matrix_csv(run.path("ensemble.csv"), _flattened(samples))


class SweepMod(loader.Command):
    """Optimal couplings over a range of diffusion times"""

    strings = {
        "name": "Sweep",
        "solved": "t={:g}: loss {:.6e}",
    }

    def __init__(self):
        self.config = loader.CommandConfig(
            *_pair_values(),
            loader.ConfigValue(
                "t_values",
                [1.0, 2.0, 5.0, 10.0, 20.0, 50.0],
                "Diffusion times to solve at",
                validator=loader.validators.Series(loader.validators.Float(minimum=0), min_len=1),
            ),
            loader.laplacian_value(),
            *loader.distribution_values(),
            *loader.solver_values(),
        )

    async def sweepcmd(self, run: loader.RunConfig):
        """Flattened spectral couplings, one row per diffusion time"""
        g = await utils.run_sync(storage.read_edge_list, run["graph"])
        h = await utils.run_sync(storage.read_edge_list, run["target"])
        results = await utils.run_sync(
            coupling_scale_sweep,
            g,
            h,
            run["t_values"],
            loader.distribution(run, g),
            loader.distribution(run, h),
            loader.solver_options(run),
            run.threads,
            loader.laplacian_kind(run),
        )
        for t, result in zip(run["t_values"], results):
            logger.info(self.strings["solved"].format(t, result.loss))

        storage.write_matrix_csv(run.path("couplings.csv"), _flattened([r.coupling for r in results]))
        storage.write_records_csv(
            run.path("sweep.csv"),
            [
                {"t": t, **{key: value for key, value in result.to_json().items() if key != "coupling_csv_path"}}
                for t, result in zip(run["t_values"], results)
            ],
        )
