"""Insight discovery over tabular data with Monte Carlo tree search."""

import json

from ._core import (
    Dataset,
    InputError,
    MiningError,
    PreconditionError,
    generate,
    preset_json,
    presets,
    run_cli,
    scores,
    search_json,
)

__all__ = [
    "Dataset",
    "InputError",
    "MiningError",
    "PreconditionError",
    "discover",
    "generate",
    "preset",
    "presets",
    "run_cli",
    "scores",
]


def preset(name):
    """Return preset `name` (C1..C10) as a dict."""
    return json.loads(preset_json(name))


def discover(dataset, preset="C4", iterations=None, seed=0, **overrides):
    """Run a search and return the report as a dict.

    `dataset` is a Dataset or a CSV path. Extra keyword arguments override
    search settings using the JSON config names (e.g. treePolicy="spuct").
    """
    label = "dataset"
    if not isinstance(dataset, Dataset):
        label = str(dataset)
        dataset = Dataset.from_csv(label)
    config = {"preset": preset, "seed": seed, **overrides}
    if iterations is not None:
        config["iterations"] = iterations
    return json.loads(search_json(dataset, json.dumps(config), label))
