"""Radial meshes and the clamped discrete biharmonic.

Modules:
    models: RadialMesh, RadialField, DiscreteBiharmonic, ShapeError
    mesh: build_mesh()
    operator: assemble_biharmonic(), apply(), rounding_bound()
"""

from src.discretization.mesh import build_mesh
from src.discretization.models import (
    DiscreteBiharmonic,
    FieldLike,
    RadialField,
    RadialMesh,
    ShapeError,
    field_values,
)
from src.discretization.operator import apply, assemble_biharmonic, rounding_bound

__all__ = [
    "build_mesh",
    "assemble_biharmonic",
    "apply",
    "rounding_bound",
    "DiscreteBiharmonic",
    "FieldLike",
    "RadialField",
    "RadialMesh",
    "ShapeError",
    "field_values",
]
