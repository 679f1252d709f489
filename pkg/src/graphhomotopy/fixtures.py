"""Small hand-checkable models used by the demo, the tests and the docs."""
from __future__ import annotations

import numpy as np

from .graphs import GgmModel, Partition, model_from_precision
from .homotopy import Status

# Four variables, clusters {1}, {2,3}, {4}. X_1 and X_4 interact only
# through the middle cluster.
WORKED_OMEGA = np.array([
    [1.0, 0.5, 0.5, 0.0],
    [0.5, 1.0, 0.5, 0.5],
    [0.5, 0.5, 1.0, 0.5],
    [0.0, 0.5, 0.5, 1.0],
])
WORKED_SIGMA = np.array([
    [2.0, -1.0, -1.0, 1.0],
    [-1.0, 2.0, 0.0, -1.0],
    [-1.0, 0.0, 2.0, -1.0],
    [1.0, -1.0, -1.0, 2.0],
])
WORKED_PARTITION = ((1,), (2, 3), (4,))

# Exact reduced concentrations of the worked example.
_R = 1.0 / np.sqrt(2.0)
WORKED_OMEGA_Y_MEAN = np.array([[1.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 1.0]])
WORKED_OMEGA_Y_PCA = np.array([[1.0, _R, 0.0], [_R, 1.5, _R], [0.0, _R, 1.0]])

# Reduced concentrations as they appear in print for this example. They do
# not follow from the model above and are kept only for side-by-side display.
PRINTED_OMEGA_Y_MEAN = np.array([[1.0, 1.0, -1.0], [1.0, 3.0, -2.0], [-1.0, -2.0, 2.0]])
PRINTED_OMEGA_Y_PCA = np.array([[1.00, 0.71, -0.71], [0.71, 1.50, -0.79], [-0.71, -0.79, 1.08]])

# Same partition; X_1 talks to X_2 only and X_4 to both X_2 and X_3, so the
# mean of the middle cluster no longer screens X_1 off from X_4.
BRIDGE_OMEGA = np.array([
    [1.0, 0.5, 0.0, 0.0],
    [0.5, 1.0, 0.4, 0.3],
    [0.0, 0.4, 1.0, 0.5],
    [0.0, 0.3, 0.5, 1.0],
])
BRIDGE_OMEGA_Y13 = 1.0 / 12.0
BRIDGE_DET = 0.4325


def worked_example() -> GgmModel:
    return model_from_precision(WORKED_OMEGA, Partition(WORKED_PARTITION))


def asymmetric_bridge_fixture() -> tuple[GgmModel, Status]:
    """A model whose mean reduction invents the cluster edge (1, 3)."""
    return model_from_precision(BRIDGE_OMEGA, Partition(WORKED_PARTITION)), Status.NOT_HOMOTOPIC
