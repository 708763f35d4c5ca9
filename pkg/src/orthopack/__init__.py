"""Ball and horoball packings of simply truncated Coxeter orthoschemes.

The family of cells is {inf,q,r,inf}: hyperbolic orthoschemes with two pairs
of parallel faces whose ultra-ideal vertex is cut by its polar plane.  The
package builds the cells from their Gram matrices, finds optimal inscribed
balls and horoball packings with densities, expands the reflection tiling,
and exports Beltrami-Cayley-Klein meshes.
"""

from .coxeter import ADMISSIBLE_SYMBOLS, CoxeterCell, SchlafliSymbol, build_cell
from .horoball import (
    DensityCurve,
    Horoball,
    TwoHoroballConfig,
    canonical_transform,
    density,
    feasible_range,
    horosphere_through_point,
    max_one_horoball,
    optimize_density,
    two_horoball_config,
)
from .inball import InscribedBall, inball_density, optimal_inball
from .lorentz import PointClass, Tolerance
from .scene import Mesh, Scene, export, mesh_ball, mesh_cell, mesh_horoball
from .tiling import CellInstance, CrownSpec, expand
from .volume import VolumeResult, ball_volume, cell_volume, horoball_sector_volume

__version__ = "0.1.0"

__all__ = [
    "ADMISSIBLE_SYMBOLS",
    "CoxeterCell",
    "SchlafliSymbol",
    "build_cell",
    "DensityCurve",
    "Horoball",
    "TwoHoroballConfig",
    "canonical_transform",
    "density",
    "feasible_range",
    "horosphere_through_point",
    "max_one_horoball",
    "optimize_density",
    "two_horoball_config",
    "InscribedBall",
    "inball_density",
    "optimal_inball",
    "PointClass",
    "Tolerance",
    "Mesh",
    "Scene",
    "export",
    "mesh_ball",
    "mesh_cell",
    "mesh_horoball",
    "CellInstance",
    "CrownSpec",
    "expand",
    "VolumeResult",
    "ball_volume",
    "cell_volume",
    "horoball_sector_volume",
    "__version__",
]
