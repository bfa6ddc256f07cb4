"""Independent brute-force oracles shared by the unit and acceptance tests.

Everything here recomputes quantities from first principles with plain loops
or dense grids; none of it reuses the library's search machinery.
"""
import itertools

import numpy as np

from robustgame.hypotheses import LossKind
from robustgame.model import GameInstance

_GRID_CACHE: dict[int, np.ndarray] = {}


def simplex_grid(dim: int, step: float = 1e-3) -> np.ndarray:
    if dim in _GRID_CACHE:
        return _GRID_CACHE[dim]
    ticks = int(round(1 / step))
    if dim == 1:
        grid = np.array([[1.0]])
    elif dim == 2:
        a = np.arange(ticks + 1) / ticks
        grid = np.stack([a, 1 - a], axis=1)
    elif dim == 3:
        i, j = np.meshgrid(np.arange(ticks + 1), np.arange(ticks + 1), indexing="ij")
        keep = i + j <= ticks
        i, j = i[keep], j[keep]
        grid = np.stack([i, j, ticks - i - j], axis=1) / ticks
    else:
        raise ValueError("grid oracle supports up to 3 hypotheses")
    _GRID_CACHE[dim] = grid
    return grid


def grid_search_value(instance: GameInstance, step: float = 1e-3) -> float:
    """Minimize the piecewise-max objective over a fine simplex grid."""
    grid = simplex_grid(instance.hypotheses.size, step)
    values = np.zeros(grid.shape[0])
    for x, y in instance.sample.pairs():
        losses = []
        for z in instance.rho.lists[x]:
            if instance.loss is LossKind.ZERO_ONE:
                losses.append(
                    (instance.hypotheses.table[:, z] != int(y)).astype(float)
                )
            else:
                diff = np.abs(instance.hypotheses.table[:, z] - y)
                losses.append(diff if instance.loss is LossKind.L1 else diff**2)
        values += (grid @ np.stack(losses).T).max(axis=1)
    return float(values.min() / len(instance.sample))


def zero_shattered(sub: np.ndarray, gamma: float, tol: float = 1e-9) -> bool:
    """Direct check that every sign pattern is realized with margin gamma
    around zero."""
    d = sub.shape[1]
    for b in itertools.product((1, -1), repeat=d):
        if not any(
            all(
                (row[i] >= gamma - tol) if b[i] == 1 else (row[i] <= -gamma + tol)
                for i in range(d)
            )
            for row in sub
        ):
            return False
    return True
