"""Template partitioning of a single graph"""

import logging

from .. import loader, storage, utils
from ..graph_core import graph_heat_kernel
from ..partition import adjusted_mutual_information, modularity, partition_graph, tune_partition

logger = logging.getLogger(__name__)


def _graph_value() -> loader.ConfigValue:
    return loader.ConfigValue(
        "graph",
        None,
        "Edge list of the graph to partition",
        validator=loader.validators.ExistingPath(),
        required=True,
    )


def _loss_value() -> loader.ConfigValue:
    return loader.ConfigValue(
        "loss",
        "spectral",
        "Graph representation matched against the template",
        validator=loader.validators.Choice(["adjacency", "spectral"]),
    )


def _truth_value() -> loader.ConfigValue:
    return loader.ConfigValue(
        "truth",
        None,
        "Ground-truth labels, 'node_id label' per line, scored with AMI",
        validator=loader.validators.ExistingPath(),
    )


class PartitionMod(loader.Command):
    """Partition a graph into k clusters"""

    strings = {
        "name": "Partition",
        "done": "{} nodes in {} clusters, modularity {:.4f}",
    }

    def __init__(self):
        self.config = loader.CommandConfig(
            _graph_value(),
            loader.ConfigValue(
                "k",
                2,
                "Number of clusters",
                validator=loader.validators.Integer(minimum=2),
            ),
            loader.ConfigValue(
                "t",
                10.0,
                "Diffusion time of the heat kernel",
                validator=loader.validators.Float(minimum=0),
            ),
            _loss_value(),
            loader.laplacian_value(),
            *loader.distribution_values(),
            *loader.solver_values(),
            _truth_value(),
        )

    async def partitioncmd(self, run: loader.RunConfig):
        """Labels and modularity for a fixed cluster count and diffusion time"""
        g = await utils.run_sync(storage.read_edge_list, run["graph"])
        if run["loss"] == "adjacency":
            rep_matrix = g.adjacency
        else:
            rep_matrix = await utils.run_sync(
                graph_heat_kernel, g, run["t"], loader.laplacian_kind(run)
            )

        labels, coupling = await utils.run_sync(
            partition_graph,
            rep_matrix,
            loader.distribution(run, g),
            run["k"],
            loader.solver_options(run),
        )
        score = modularity(g, labels)
        logger.info(self.strings["done"].format(g.n, len(set(labels.tolist())), score))

        storage.write_labels(run.path("labels.txt"), g, labels)
        storage.write_matrix_csv(run.path("coupling.csv"), coupling.matrix)
        result = {
            "k": run["k"],
            "t": run["t"] if run["loss"] == "spectral" else None,
            "loss_kind": run["loss"],
            "modularity": score,
        }
        if run["truth"]:
            result["ami"] = adjusted_mutual_information(
                storage.read_labels(run["truth"], g), labels
            )

        storage.write_json(run.path("result.json"), result)


class TuneMod(loader.Command):
    """Pick the cluster count and diffusion time by modularity"""

    strings = {"name": "Tune"}

    def __init__(self):
        self.config = loader.CommandConfig(
            _graph_value(),
            loader.ConfigValue(
                "k_range",
                [2, 3, 4, 5, 6],
                "Cluster counts tried in the first stage",
                validator=loader.validators.Series(loader.validators.Integer(minimum=2), min_len=1),
            ),
            loader.ConfigValue(
                "t_range",
                [1.0, 5.0, 10.0, 20.0, 50.0],
                "Diffusion times tried in the second stage",
                validator=loader.validators.Series(loader.validators.Float(minimum=0), min_len=1),
            ),
            loader.ConfigValue(
                "stage_one_t",
                10.0,
                "Diffusion time used while choosing the cluster count",
                validator=loader.validators.Float(minimum=0),
            ),
            _loss_value(),
            loader.laplacian_value(),
            *loader.distribution_values(),
            *loader.solver_values(),
            _truth_value(),
        )

    async def tunecmd(self, run: loader.RunConfig):
        """Two-stage unsupervised search, the whole grid goes to grid.csv"""
        g = await utils.run_sync(storage.read_edge_list, run["graph"])
        tuned = await utils.run_sync(
            tune_partition,
            g,
            run["k_range"],
            run["t_range"],
            loader.solver_options(run),
            loader.distribution(run, g),
            run["loss"],
            loader.laplacian_kind(run),
            run["stage_one_t"],
            run.threads,
        )

        storage.write_labels(run.path("labels.txt"), g, tuned.labels)
        storage.write_records_csv(run.path("grid.csv"), tuned.grid, ["stage", "k", "t", "modularity"])
        result = {"k": tuned.k, "t": tuned.t, "loss_kind": run["loss"], "modularity": tuned.modularity}
        if run["truth"]:
            result["ami"] = adjusted_mutual_information(
                storage.read_labels(run["truth"], g), tuned.labels
            )

        storage.write_json(run.path("result.json"), result)
