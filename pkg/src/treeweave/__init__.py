"""Random tree virtualization: pair leaves with internal nodes of a binary
tree overlay, contract the pairs into a physical graph, and measure how well
that graph expands, statically and under churn."""

from .churn import RoundTrace, ScenarioConfig, SimulationState, run_batch, run_scenario
from .errors import CapacityError, DomainError, ScenarioError, SolverError
from .graph import (
    ExpansionResult,
    PhysicalGraph,
    connected_components,
    exact_node_expansion,
    node_boundary,
    tree_as_graph,
)
from .mixing import MixRoundStats, matching_distance, mix_round, run_mixing
from .pairing import (
    InternalSlot,
    Pairing,
    RootMode,
    SlotCopy,
    canonical_pairing,
    contract,
    random_pairing,
)
from .report import SummaryStats, summarize
from .spectral import SpectralReport, lambda2, lambda2_dense, laplacian_apply
from .vtree import VirtualTree, build_complete

__version__ = "0.1.0"
