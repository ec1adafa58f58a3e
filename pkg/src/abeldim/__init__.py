"""abeldim: exact Abel-map image dimensions on resolution graphs.

Public surface re-exported from the submodules; see README for the CLI.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    AbeldimError, BoxTooLarge, DisconnectedSupport, DuplicateEdge, EmptyBox,
    GridTooLarge, InconsistentOracle, NoConvergence, NonIntegralShift,
    NotATree, NotInLipmanCone, NotNegativeDefinite, OracleDomainViolation,
    SOutOfRange, SupportEnumerationTooLarge, VertexMismatch,
)
from .lattice import (  # noqa: F401
    BlowupMap, Cycle, EStarCombination, PlumbingGraph, QCycle, ZERO,
    blow_up_generic, build_graph, canonical_cycle, chi, components,
    cycle, determinant, dual_cycle, estar_combination_of, in_dual_lattice,
    in_lipman_cone, pairing, restrict, support,
)
from .chiopt import (  # noqa: F401
    Box, EffectiveMin, MaxMinimizerReport, MinChiResult, brute_min_chi_box,
    default_cap_cycle, laufer_fundamental_cycle, max_of_minimizer_set,
    min_chi_box, min_chi_effective,
)
from .generic import (  # noqa: F401
    BoundReport, MinimizerPair, bound_T, bound_report, bound_t,
    check_recipe, codim_generic, codim_objective_at, d_generic, e_Z_of_I,
    h1_generic, is_dominant, structure_cycles, twisted_h1_lower_bounds,
)
from .pattern import (  # noqa: F401
    DimensionTable, MultiIndex, TestFunction, TowerState, TwistedDim,
    build_tower, closed_form_min, l_s_cycle, run_pattern_induction,
    stabilization_bound, test_first, test_second, twisted_d,
)
from .superisolated import (  # noqa: F401
    si_dim, si_gs, si_h1_L0, si_pg, si_test_function, si_twisted_dim,
    si_twisted_test_function,
)
from .examples import builtin_graph, star_graph, ex56_graph  # noqa: F401
