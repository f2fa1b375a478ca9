"""Python access to the blueprint field core.

Rasters are NumPy int32 arrays indexed [row, col] with row 0 at the
minimum y of the floor plane. Scenes and configs are plain dicts.
"""

import json

from . import _core
from ._core import BlueprintError

__all__ = [
    "BlueprintError",
    "evaluate",
    "ground_truth",
    "mvr",
    "project_views",
    "run_experiment",
    "train_blueprint",
    "two_room_scene",
]


def _scene_arg(scene):
    return "" if scene is None else json.dumps(scene)


def two_room_scene():
    return json.loads(_core.two_room_scene_json())


def ground_truth(scene=None, cell_size=0.1, gt_height=2.2):
    """Returns (labels, [x_min, x_max, y_min, y_max])."""
    labels, bounds = _core.ground_truth(_scene_arg(scene), cell_size, gt_height)
    return labels, bounds


def project_views(scene=None, frames=9, seed=0):
    """Back-projected samples: (xyz float64 [N, 3], labels int32 [N])."""
    return _core.project_views(_scene_arg(scene), frames, seed)


def mvr(scene=None, frames=9, seed=0, cell_size=0.1):
    return _core.mvr(_scene_arg(scene), frames, seed, cell_size)


def train_blueprint(scene=None, config=None, frames=9, seed=0):
    """Trains a field on `frames` trajectory views; returns (labels, losses)."""
    return _core.train_blueprint(_scene_arg(scene), json.dumps(config or {}), frames, seed)


def evaluate(pred, gt, bounds=(0.0, 1.0, 0.0, 1.0)):
    return json.loads(_core.evaluate(pred, gt, list(bounds)))


def run_experiment(config):
    """Runs an experiment grid and returns the results CSV text."""
    return _core.run_experiment(json.dumps(config))
