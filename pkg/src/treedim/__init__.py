"""Fractal dimensions of closed subsets of tree path spaces and of closed subgroups of profinite groups."""
from .cover_engine import (
    Cover,
    CostValue,
    brute_force_min_cover,
    covers_space,
    is_prefix_free,
    min_level_cost,
    normalize_cover,
    r_cost,
)
from .dimension import (
    Certification,
    DimensionReport,
    box_estimates,
    dimension_report,
    exact_box_limits,
    local_upper_box_check,
    ratio_sequence,
)
from .families import (
    SetSpec,
    constant_ratio_pair,
    example_alternating_blocks,
    example_countable_tree,
    full_binary,
)
from .profinite import (
    InverseSystem,
    c2_tower,
    cyclic_tower,
    density_subgroup_spec,
    group_dimension_report,
    subgroup_projections,
    subgroup_to_subtree,
    system_to_tree,
    validate_system,
)
from .tree_core import (
    BranchingProfile,
    TreeTruncation,
    build_tree,
    check_subtree,
    distance,
    is_levelwise_uniform,
    level_counts,
    node_measure,
    tree_from_predicate,
)

__version__ = "0.1.0"
