import logging

from .. import loader, storage, utils
from .._types import InputError
from ..barycenter import BarycenterProblem, bootstrap_experiment, gw_barycenter
from ..graph_core import graph_heat_kernel, resolve_laplacian_kind

logger = logging.getLogger(__name__)


class BarycenterMod(loader.Command):
    """GW barycenters of graph representations"""

    strings = {
        "name": "Barycenter",
        "no_input": "Pass either --graph (bootstrap) or --graph-dir (direct barycenter)",
        "direct": "Barycenter of {} graphs, final loss {:.6e} after {} rounds",
    }

    def __init__(self):
        self.config = loader.CommandConfig(
            loader.ConfigValue(
                "graph",
                None,
                "Edge list bootstrapped into central subgraphs",
                validator=loader.validators.ExistingPath(),
            ),
            loader.ConfigValue(
                "graph_dir",
                None,
                "Directory of *.edges files averaged directly",
                validator=loader.validators.ExistingPath(directory=True),
            ),
            loader.ConfigValue(
                "loss",
                "spectral",
                "Representation averaged when using --graph-dir",
                validator=loader.validators.Choice(["adjacency", "spectral"]),
            ),
            loader.ConfigValue(
                "t",
                10.0,
                "Diffusion time when using --graph-dir",
                validator=loader.validators.Float(minimum=0),
            ),
            loader.ConfigValue(
                "t_values",
                [3.0, 7.0, 11.0],
                "Diffusion times compared by the bootstrap",
                validator=loader.validators.Series(loader.validators.Float(minimum=0), min_len=1),
            ),
            loader.ConfigValue(
                "n_subsets",
                10,
                "Bootstrapped subgraphs",
                validator=loader.validators.Integer(minimum=1),
            ),
            loader.ConfigValue(
                "subset_size",
                30,
                "Nodes per subgraph, also the barycenter size",
                validator=loader.validators.Integer(minimum=1),
            ),
            loader.ConfigValue(
                "pool_size",
                40,
                "Most central nodes the subsets are drawn from",
                validator=loader.validators.Integer(minimum=1),
            ),
            loader.ConfigValue(
                "n_inits",
                10,
                "Random barycenter starts per representation",
                validator=loader.validators.Integer(minimum=1),
            ),
            loader.ConfigValue(
                "target_size",
                None,
                "Barycenter size with --graph-dir, the first graph's size by default",
                validator=loader.validators.Integer(minimum=1),
            ),
            loader.ConfigValue(
                "max_outer",
                100,
                "Rounds of coupling and barycenter updates",
                validator=loader.validators.Integer(minimum=1),
            ),
            loader.laplacian_value(),
            *loader.solver_values(),
        )

    async def _direct(self, run: loader.RunConfig):
        dataset = await utils.run_sync(storage.read_graph_dir, run["graph_dir"])
        graphs = [g for _, g, _ in dataset]
        if run["loss"] == "adjacency":
            representations = [g.adjacency for g in graphs]
        else:
            kind = loader.laplacian_kind(run) or resolve_laplacian_kind(*graphs)
            representations = [graph_heat_kernel(g, run["t"], kind).matrix for g in graphs]

        prob = BarycenterProblem(representations, target_size=run["target_size"])
        barycenter, trace = await utils.run_sync(
            gw_barycenter,
            prob,
            run.seed,
            loader.solver_options(run),
            run["max_outer"],
            threads=run.threads,
        )
        logger.info(self.strings["direct"].format(len(graphs), trace[-1], len(trace)))
        storage.write_matrix_csv(run.path("barycenter.csv"), barycenter)
        storage.write_records_csv(
            run.path("trace.csv"),
            [{"round": index, "loss": loss} for index, loss in enumerate(trace)],
        )

    async def _bootstrap(self, run: loader.RunConfig):
        g = await utils.run_sync(storage.read_edge_list, run["graph"])
        rows, summary = await utils.run_sync(
            bootstrap_experiment,
            g,
            run["t_values"],
            run["n_subsets"],
            run["subset_size"],
            run["pool_size"],
            run["n_inits"],
            run.seed,
            loader.solver_options(run),
            threads=run.threads,
            max_outer=run["max_outer"],
        )
        storage.write_records_csv(run.path("bootstrap.csv"), rows)
        storage.write_json(run.path("summary.json"), {"representations": summary})

    async def barycentercmd(self, run: loader.RunConfig):
        """Bootstrap averaging experiment, or the barycenter of a graph directory"""
        if run["graph_dir"]:
            await self._direct(run)
        elif run["graph"]:
            await self._bootstrap(run)
        else:
            raise InputError(self.strings["no_input"])
