"""Order-one biharmonic capacity, Wiener-type layer series, and
clamped-plate desk experiments on voxel and log-spherical grids.

The heads of each family re-export here; the full surfaces live in the
submodules (`kernel`, `sphgrid`, `pispace`, `fields`, `forms`, `capacity`,
`wiener`, `models`, `biharm`, `scene`, `report`, `cli`).
"""

from .backend import backend_name
from .biharm import punctured_ball_demo, solve_dirichlet
from .capacity import CapacityProblem, cap_gram, cap_inf, harmonic_cap
from .models import cusp_criterion
from .wiener import layer_capacities, sufficiency_sum, verdict

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "backend_name",
    "CapacityProblem",
    "cap_gram",
    "cap_inf",
    "harmonic_cap",
    "layer_capacities",
    "sufficiency_sum",
    "verdict",
    "cusp_criterion",
    "solve_dirichlet",
    "punctured_ball_demo",
]
