"""Uniform radial meshes on [0, 1]."""

from __future__ import annotations

import numpy as np

from src.common.config import MIN_MESH_INTERVALS, ConfigError
from src.discretization.models import RadialMesh


def build_mesh(M: int) -> RadialMesh:
    """Build the uniform mesh with M intervals.

    Nodes are computed as j / M so that r_0 = 0, r_M = 1 and r_{M/2} = 0.5 are exact.

    Raises:
        ConfigError: If M is not an integer >= 16.
    """
    if int(M) != M or M < MIN_MESH_INTERVALS:
        raise ConfigError(f"Mesh intervals M must be an integer >= {MIN_MESH_INTERVALS}, got {M}")
    M = int(M)
    nodes = np.arange(M + 1, dtype=float) / M
    nodes.setflags(write=False)
    return RadialMesh(nodes=nodes, h=1.0 / M)
