"""Link-prediction filtered clustering for network A/B tests."""

import json

from . import _core
from ._core import (
    ConfigError,
    Graph,
    MissingInputError,
    NumericError,
    estimator_variance,
    interference,
    label_propagation,
    louvain,
    merge_random,
    modularity,
)

__all__ = [
    "ConfigError",
    "Graph",
    "MissingInputError",
    "NumericError",
    "compare",
    "default_config",
    "estimator_variance",
    "generate_graph",
    "interference",
    "label_propagation",
    "louvain",
    "merge_random",
    "modularity",
]


def _text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return json.dumps(config)


def default_config():
    return json.loads(_core.default_config())


def generate_graph(config=None, seed=0):
    """Returns (graph, block, region)."""
    return _core.generate_graph(_text(config), seed)


def compare(config=None):
    """Runs the method comparison and returns one dict per (seed, method)."""
    return json.loads(_core.compare(_text(config)))
