"""Laplacian spectra and heat kernels of single graphs"""

import logging

from .. import loader, storage, utils
from ..graph_core import eigendecompose, heat_kernel, laplacian, resolve_laplacian_kind

logger = logging.getLogger(__name__)


class KernelMod(loader.Command):
    """Heat kernel of a graph"""

    strings = {
        "name": "Kernel",
        "written": "Heat kernel of {} nodes at t={} ({} Laplacian) written to {}",
    }

    def __init__(self):
        self.config = loader.CommandConfig(
            loader.ConfigValue(
                "graph",
                None,
                "Edge list of the graph",
                validator=loader.validators.ExistingPath(),
                required=True,
            ),
            loader.ConfigValue(
                "t",
                10.0,
                "Diffusion time, 0 gives the identity",
                validator=loader.validators.Float(minimum=0),
            ),
            loader.laplacian_value(),
        )

    async def kernelcmd(self, run: loader.RunConfig):
        """Emit the heat kernel and the Laplacian spectrum as CSV"""
        g = await utils.run_sync(storage.read_edge_list, run["graph"])
        kind = loader.laplacian_kind(run) or resolve_laplacian_kind(g)
        spectrum = await utils.run_sync(eigendecompose, laplacian(g, kind))
        kernel = heat_kernel(spectrum, run["t"])

        header = [str(node) for node in g.node_ids]
        path = storage.write_matrix_csv(run.path("kernel.csv"), kernel.matrix, header)
        storage.write_records_csv(
            run.path("eigenvalues.csv"),
            [{"index": i, "eigenvalue": repr(float(value))} for i, value in enumerate(spectrum.eigenvalues)],
        )
        logger.info(self.strings["written"].format(g.n, run["t"], getattr(kind, "value", kind), path))
