"""Twoing decision trees with exhaustive or simulated-QAOA categorical splits."""

from .compare import ComparisonReport, compare_trees, node_equal, q_tree
from .criterion import (
    ContingencyTable,
    Partition,
    SplitScore,
    exhaustive_best_partition,
    objective_table,
    partition_histograms,
    twoing_from_histograms,
    twoing_of_partition,
)
from .dataset import Dataset, Schema, SubsetView, full_view, load_csv, load_schema
from .qaoa import QaoaAngles, QaoaConfig, calibrate_angles, qaoa_best_partition, ramp_angles, run_circuit
from .tree import DecisionTree, GrowParams, Leaf, Node, deserialize, grow_tree, predict, serialize

__version__ = "0.1.0"
