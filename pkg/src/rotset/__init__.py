"""Rotation sets, entropy functions and periodic-orbit growth for vector potentials on SFTs."""

__version__ = "0.1.0"

from .errors import RotsetError
from .sft import (Sft, Skeleton, full_shift, golden_mean, k_block, make_sft, sft_from_json,
                  trace_power)
from .potential import TablePotential, birkhoff_mean, evaluate, parse_potential
from .geometry import Hull, hausdorff, hull
from .rotgeom import (RotationPolytope, approximate_rotation_polytope, max_mean_cycle,
                      rotation_polytope, sample_pointwise, support)
from .thermo import (ThermoSystem, entropy_profile, grad_pressure, hessian_pressure,
                     interior_probe, level_curve, pressure, solve_rotation)
from .perorbit import (census, count_in_ball, count_words_in_ball, h_per, h_word, per_count)
from .construct2d import (StagedPotential, advance, circle, construct, export_stage,
                          make_boundary, stage0, unit_square)
from .gallery import (Example2Spec, build_example2, check_lipschitz,
                      example2_entropy_suite)

__all__ = [
    "RotsetError", "Sft", "Skeleton", "full_shift", "golden_mean", "k_block", "make_sft",
    "sft_from_json", "trace_power", "TablePotential", "birkhoff_mean", "evaluate",
    "parse_potential", "Hull", "hausdorff", "hull", "RotationPolytope",
    "approximate_rotation_polytope", "max_mean_cycle", "rotation_polytope", "sample_pointwise",
    "support", "ThermoSystem", "entropy_profile", "grad_pressure", "hessian_pressure",
    "interior_probe", "level_curve", "pressure", "solve_rotation", "census", "count_in_ball",
    "count_words_in_ball", "h_per", "h_word", "per_count", "advance", "circle", "construct",
    "export_stage", "make_boundary", "stage0", "unit_square", "StagedPotential", "Example2Spec",
    "build_example2", "check_lipschitz", "example2_entropy_suite",
]
