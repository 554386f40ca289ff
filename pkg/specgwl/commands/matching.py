"""Pairwise matching, matching benchmarks and loss landscapes"""

import logging
import time
import typing

import numpy as np

from .. import loader, storage, utils
from .._types import InputError
from ..graph_core import add_noise_edges, symmetrize
from ..gw_solver import landscape_experiment, minimize_gw, representation_pair
from ..matching_eval import PermutedPair, matching_benchmark, node_correctness, scale_sweep
from ..partition import adjusted_mutual_information, cross_validate_t, tune_partition

logger = logging.getLogger(__name__)

LOSS_KINDS = ["adjacency", "spectral"]


def _loss_value(default: str = "spectral") -> loader.ConfigValue:
    return loader.ConfigValue(
        "loss",
        default,
        "Representation compared by the GW loss",
        validator=loader.validators.Choice(LOSS_KINDS),
    )


def _time_value(default: float = 10.0) -> loader.ConfigValue:
    return loader.ConfigValue(
        "t",
        default,
        "Diffusion time of the heat kernels",
        validator=loader.validators.Float(minimum=0),
    )


class MatchMod(loader.Command):
    """Match the nodes of two graphs"""

    strings = {
        "name": "Match",
        "solved": "GW loss {:.6e} after {} iterations ({})",
        "correctness": "Node correctness {:.4f}",
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
            _loss_value(),
            _time_value(),
            loader.laplacian_value(),
            *loader.distribution_values(),
            *loader.solver_values(),
            loader.ConfigValue(
                "truth",
                None,
                "True correspondence, one 'source_node target_node' pair per line",
                validator=loader.validators.ExistingPath(),
            ),
            loader.ConfigValue(
                "epsilon",
                None,
                "Support threshold of node correctness, 1e-9 of the largest entry by default",
                validator=loader.validators.Float(minimum=0),
            ),
        )

    async def matchcmd(self, run: loader.RunConfig):
        """Coupling between two graphs, scored when the true matching is known"""
        g = await utils.run_sync(storage.read_edge_list, run["graph"])
        h = await utils.run_sync(storage.read_edge_list, run["target"])
        rep = representation_pair(g, h, run["loss"], run["t"], loader.laplacian_kind(run))
        result = await utils.run_sync(
            minimize_gw,
            rep,
            loader.distribution(run, g),
            loader.distribution(run, h),
            loader.solver_options(run),
        )
        logger.info(
            self.strings["solved"].format(
                result.loss,
                result.iterations,
                "converged" if result.converged else "iteration cap reached",
            )
        )

        coupling_path = storage.write_matrix_csv(
            run.path("coupling.csv"),
            result.coupling.matrix,
            [str(node) for node in h.node_ids],
        )
        storage.write_json(run.path("coupling.json"), storage.coupling_record(result.coupling))

        record = {"loss_kind": rep.label, **result.to_json(coupling_path)}
        if run["truth"]:
            sigma = storage.read_correspondence(run["truth"], g, h)
            score = node_correctness(result.coupling, PermutedPair(g, h, sigma), run["epsilon"])
            record.update(node_correctness=score.node_correctness, epsilon=score.epsilon)
            logger.info(self.strings["correctness"].format(score.node_correctness))

        storage.write_json(run.path("result.json"), record)


class BenchmarkMod(loader.Command):
    """Matching or partitioning over a directory of graphs"""

    strings = {
        "name": "Benchmark",
        "no_labels": "{} has no labels file, skipped",
        "partitioned": "{}: k={} t={} AMI={:.4f}",
    }

    def __init__(self):
        self.config = loader.CommandConfig(
            loader.ConfigValue(
                "graph_dir",
                None,
                "Directory of *.edges files, with *.labels files for partitioning",
                validator=loader.validators.ExistingPath(directory=True),
                required=True,
            ),
            loader.ConfigValue(
                "task",
                "matching",
                "Benchmark to run",
                validator=loader.validators.Choice(["matching", "partition"]),
            ),
            _loss_value(),
            _time_value(),
            loader.laplacian_value(),
            *loader.distribution_values(),
            *loader.solver_values(),
            loader.ConfigValue(
                "permute",
                True,
                "Match every graph against a random relabeling of itself",
                validator=loader.validators.Boolean(),
            ),
            loader.ConfigValue(
                "ground_truth_init",
                False,
                "Start the matching solver from the true permutation",
                validator=loader.validators.Boolean(),
            ),
            loader.ConfigValue(
                "t_values",
                None,
                "Also sweep these diffusion times against the adjacency loss",
                validator=loader.validators.Series(loader.validators.Float(minimum=0), min_len=1),
            ),
            loader.ConfigValue(
                "k_range",
                [2, 3, 4, 5, 6],
                "Cluster counts tried when partitioning",
                validator=loader.validators.Series(loader.validators.Integer(minimum=2), min_len=1),
            ),
            loader.ConfigValue(
                "t_range",
                [1.0, 5.0, 10.0, 20.0, 50.0],
                "Diffusion times tried when partitioning",
                validator=loader.validators.Series(loader.validators.Float(minimum=0), min_len=1),
            ),
            loader.ConfigValue(
                "cross_validate",
                False,
                "Also pick t by leave-one-out AMI against the labels",
                validator=loader.validators.Boolean(),
            ),
            loader.ConfigValue(
                "symmetrize",
                False,
                "Drop edge directions before partitioning",
                validator=loader.validators.Boolean(),
            ),
            loader.ConfigValue(
                "noise",
                0.0,
                "Add this fraction of |E| random edges to every graph before partitioning",
                validator=loader.validators.Float(minimum=0),
            ),
        )

    async def _matching(self, run: loader.RunConfig, dataset: list):
        graphs = [g for _, g, _ in dataset]
        options = loader.solver_options(run)
        dist_params = (run["a"], run["b"])
        result = await utils.run_sync(
            matching_benchmark,
            graphs,
            run["loss"],
            run["t"],
            dist_params,
            run.seed,
            options,
            run.threads,
            run["permute"],
            run["ground_truth_init"],
            loader.laplacian_kind(run),
        )
        storage.write_records_csv(
            run.path("benchmark.csv"),
            result.rows,
            ["graph_index", "n", "m_edges", "loss_kind", "t", "score", "wall_time_s"],
        )
        summary = {**result.summary, "graphs": [name for name, _, _ in dataset]}

        if run["t_values"]:
            sweep = await utils.run_sync(
                scale_sweep,
                graphs,
                run["t_values"],
                dist_params,
                run.seed,
                options,
                run.threads,
                loader.laplacian_kind(run),
            )
            storage.write_records_csv(run.path("sweep.csv"), sweep)
            summary["best_t"] = max(sweep, key=lambda row: row["spectral_mean"])["t"]

        storage.write_json(run.path("summary.json"), summary)

    async def _partition(self, run: loader.RunConfig, dataset: list):
        labelled = []
        for name, g, labels in dataset:
            if labels is None:
                logger.warning(self.strings["no_labels"].format(name))
                continue

            if run["symmetrize"]:
                g = symmetrize(g)

            if run["noise"]:
                g = add_noise_edges(g, run["noise"], utils.derive_seed(run.seed, len(labelled)))

            labelled.append((name, g, labels))

        if not labelled:
            raise InputError(f"No labelled graphs in {run['graph_dir']}")

        options = loader.solver_options(run)

        def score(item: typing.Tuple[int, tuple]) -> dict:
            index, (name, g, labels) = item
            started = time.perf_counter()
            tuned = tune_partition(
                g,
                run["k_range"],
                run["t_range"],
                options,
                loader.distribution(run, g),
                run["loss"],
                loader.laplacian_kind(run),
            )
            ami = adjusted_mutual_information(labels, tuned.labels)
            logger.info(self.strings["partitioned"].format(name, tuned.k, tuned.t, ami))
            return {
                "graph_index": index,
                "n": g.n,
                "m_edges": g.m_edges,
                "loss_kind": run["loss"],
                "t": tuned.t,
                "k": tuned.k,
                "modularity": tuned.modularity,
                "score": ami,
                "wall_time_s": time.perf_counter() - started,
            }

        rows = await utils.run_sync(utils.fan_out, score, list(enumerate(labelled)), run.threads)
        storage.write_records_csv(
            run.path("benchmark.csv"),
            rows,
            ["graph_index", "n", "m_edges", "loss_kind", "t", "k", "modularity", "score", "wall_time_s"],
        )
        scores = np.array([row["score"] for row in rows])
        summary = {
            "loss_kind": run["loss"],
            "n_graphs": len(rows),
            "mean": float(scores.mean()),
            "std": float(scores.std()),
            "graphs": [name for name, _, _ in labelled],
            "symmetrize": run["symmetrize"],
            "noise": run["noise"],
        }

        if run["cross_validate"]:
            folds = await utils.run_sync(
                cross_validate_t,
                [(g, labels) for _, g, labels in labelled],
                run["t_range"],
                options,
                run.threads,
                loader.laplacian_kind(run),
            )
            storage.write_records_csv(run.path("cross_validation.csv"), folds)
            summary["cross_validated_ami"] = float(np.mean([fold["ami"] for fold in folds]))

        storage.write_json(run.path("summary.json"), summary)

    async def benchmarkcmd(self, run: loader.RunConfig):
        """Score matchings of permuted graphs or partitions against labels"""
        dataset = await utils.run_sync(storage.read_graph_dir, run["graph_dir"])
        if run["task"] == "partition":
            await self._partition(run, dataset)
        else:
            await self._matching(run, dataset)


class LandscapeMod(loader.Command):
    """Loss landscape statistics from sampled initial couplings"""

    strings = {
        "name": "Landscape",
        "pair": "Pair {} of {}: {} vs {}",
        "no_input": "Pass either --graph and --target or --graph-dir",
    }

    def __init__(self):
        self.config = loader.CommandConfig(
            loader.ConfigValue(
                "graph",
                None,
                "Edge list of the source graph",
                validator=loader.validators.ExistingPath(),
            ),
            loader.ConfigValue(
                "target",
                None,
                "Edge list of the target graph",
                validator=loader.validators.ExistingPath(),
            ),
            loader.ConfigValue(
                "graph_dir",
                None,
                "Directory of *.edges files to draw random pairs from",
                validator=loader.validators.ExistingPath(directory=True),
            ),
            loader.ConfigValue(
                "pairs",
                20,
                "Random pairs drawn from --graph-dir",
                validator=loader.validators.Integer(minimum=1),
            ),
            loader.ConfigValue(
                "t_values",
                [5.0, 10.0, 20.0],
                "Diffusion times of the spectral losses",
                validator=loader.validators.Series(loader.validators.Float(minimum=0), min_len=1),
            ),
            loader.ConfigValue(
                "n_inits",
                100,
                "Sampled initial couplings per loss",
                validator=loader.validators.Integer(minimum=1),
            ),
            loader.ConfigValue(
                "steps_between",
                1000,
                "Sampler steps between retained couplings",
                validator=loader.validators.Integer(minimum=1),
            ),
            loader.laplacian_value(),
            *loader.distribution_values(),
            *loader.solver_values(),
        )

    async def _pairs(self, run: loader.RunConfig) -> list:
        if run["graph"] and run["target"]:
            g = await utils.run_sync(storage.read_edge_list, run["graph"])
            h = await utils.run_sync(storage.read_edge_list, run["target"])
            return [(run["graph"], g, run["target"], h)]

        if not run["graph_dir"]:
            raise InputError(self.strings["no_input"])

        dataset = await utils.run_sync(storage.read_graph_dir, run["graph_dir"])
        if len(dataset) < 2:
            raise InputError(f"{run['graph_dir']} holds fewer than two graphs")

        rng = np.random.default_rng(run.seed)
        pairs = []
        for _ in range(run["pairs"]):
            i, j = rng.choice(len(dataset), size=2, replace=False)
            pairs.append((dataset[i][0], dataset[i][1], dataset[j][0], dataset[j][1]))

        return pairs

    async def landscapecmd(self, run: loader.RunConfig):
        """Spread of local minima of the adjacency and spectral losses"""
        pairs = await self._pairs(run)
        rows = []
        for index, (g_name, g, h_name, h) in enumerate(pairs):
            logger.info(self.strings["pair"].format(index + 1, len(pairs), g_name, h_name))
            records = await utils.run_sync(
                landscape_experiment,
                g,
                h,
                run["t_values"],
                run["n_inits"],
                utils.derive_seed(run.seed, index),
                loader.solver_options(run),
                (run["a"], run["b"]),
                run["steps_between"],
                run.threads,
                loader.laplacian_kind(run),
            )
            rows += [{"trial": index, **record.to_row()} for record in records]

        storage.write_records_csv(run.path("landscape.csv"), rows)

        summary = {}
        for loss_kind in dict.fromkeys(row["loss_kind"] for row in rows):
            worst = [row["worst_error"] for row in rows if row["loss_kind"] == loss_kind]
            product = [row["product_error"] for row in rows if row["loss_kind"] == loss_kind]
            summary[loss_kind] = {
                "mean_worst_error": float(np.mean(worst)),
                "std_worst_error": float(np.std(worst)),
                "mean_product_error": float(np.mean(product)),
                "trials": len(worst),
            }

        storage.write_json(run.path("summary.json"), summary)
