"""Utilities"""

import asyncio
import functools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Union

import numpy as np

try:
    import git
except ImportError:
    git = None

logger = logging.getLogger(__name__)

_SEED_SPACE = 2**32


def get_base_dir() -> str:
    """Get directory of this package"""
    return get_dir(__file__)


def get_dir(mod: str) -> str:
    """Get directory of given module"""
    return os.path.abspath(os.path.dirname(os.path.abspath(mod)))


def run_sync(func, *args, **kwargs):
    """
    Run a non-async function in a new thread and return an awaitable
    :param func: Sync-only function to execute
    :returns: Awaitable coroutine
    """
    return asyncio.get_event_loop().run_in_executor(
        None,
        functools.partial(func, *args, **kwargs),
    )


def fan_out(func: Callable, items: Iterable, threads: int = 1) -> list:
    """
    Apply `func` to every item, on a thread pool if `threads` > 1
    Results are returned in the order of `items`
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def derive_seed(master: int, index: int) -> int:
    """Deterministic per-task seed derived from the master seed"""
    sequence = np.random.SeedSequence([int(master) % _SEED_SPACE, int(index)])
    return int(sequence.generate_state(1)[0])


def get_git_hash() -> Union[str, bool]:
    """Get current git hash of the checkout, if any"""
    if git is None:
        return False

    try:
        repo = git.Repo(get_base_dir(), search_parent_directories=True)
        return repo.head.commit.hexsha
    except Exception:
        return False


def get_version_raw() -> str:
    """Get the version of the package"""
    from . import version

    return ".".join(list(map(str, list(version.__version__))))


def get_versions() -> dict:
    """Versions of the package and of the numerical stack"""
    import networkx
    import ot
    import scipy
    import sklearn

    return {
        "specgwl": get_version_raw(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "networkx": networkx.__version__,
        "POT": ot.__version__,
        "scikit-learn": sklearn.__version__,
    }
