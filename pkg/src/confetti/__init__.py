"""Confetti percolation laboratory.

Simulation of the dead leaves model with square leaves: occlusion colorings
observed from below, crossing-probability Monte Carlo, cube discretizations
and the instability diagnostics used to compare perturbed colorings.
"""

__version__ = "0.1.0"

from .geometry import Point2, Square, WindowSpec, boundary_overlap, in_unstable_set, \
    min_image_delta, square_contains
from .process import (AdaptiveHorizon, DiscreteConfig, FixedHorizon, Leaf, LeafProcess,
                      MeshParams, discretize, economical_horizon, from_leaves,
                      mesh_params, natural_coupling, omega_process, perturb,
                      sample_process, state_probabilities)
from .coloring import (ColorField, CoverageReport, black_dominates, boundary_visible,
                       color_at, coverage, height_at, rasterize, visible_leaves)
from .connectivity import (CrossingReport, LabelGrid, crossing_report,
                           horizontal_crossing, label_components, vertical_crossing)
from .diagnostics import (BadComponentReport, SpaceTimePoint, TailReport,
                          bad_components, boundary_visible_tail, pair_count_stats,
                          stable_neighborhood, temporally_unstable, unstable_pair,
                          unstable_triple)
from .experiments import (Estimate, SweepResult, critical_scan, domination_check,
                          estimate_crossing, estimate_theta_proxy, fkg_check,
                          rsw_check, wilson_interval)
