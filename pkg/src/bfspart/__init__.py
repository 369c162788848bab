"""Degree-aware graph partitioning for parallel breadth-first search.

Predicts which degree classes each BFS frontier draws on, turns that into
per-edge message weights, partitions the weighted graph and counts the
cross-block messages a level-synchronous parallel BFS would send.
"""

from .bfs import MessageTrace, bfs_levels, bfs_trace, message_class_counts, peak_stats
from .frontier import (
    FrontierProfile,
    WeightTable,
    build_frontier_profile,
    expected_cut,
    invert_touched_fraction,
    message_weight_table,
    per_edge_table,
    touched_fraction,
    touched_fraction_k,
)
from .graph import (
    DegreeStats,
    Graph,
    GraphFormatError,
    degree_stats,
    generate_config_model,
    generate_er,
    generate_power_law,
    load_edge_list,
)
from .partition import (
    Partition,
    WeightedGraph,
    comm_volume,
    edge_cut,
    export_partition,
    import_partition,
    partition_kway,
    random_partition,
)
from .strategies import StrategyKind, build_w_avg, build_w_emp, build_w_smooth, burn_in

__version__ = "0.1.0"
