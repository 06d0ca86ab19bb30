from .errors import CFLError, CoefficientError, SolverError
from .one_d import solve_convdiff_1d, solve_elliptic_1d, solve_wave_1d
from .two_d import (assembled_elliptic_system, solve_convdiff_2d, solve_elliptic_2d,
                    solve_wave_2d)

__all__ = [
    "CFLError", "CoefficientError", "SolverError",
    "solve_elliptic_1d", "solve_convdiff_1d", "solve_wave_1d",
    "solve_elliptic_2d", "solve_convdiff_2d", "solve_wave_2d",
    "assembled_elliptic_system",
]
