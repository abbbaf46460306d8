"""Multilayer modularity maximization with resolution and coupling parameters
estimated from a planted-partition model with label copying between layers."""
from .estimator import (
    DegenerateEstimate,
    beta_weights,
    estimate_K,
    estimate_p_multilevel,
    estimate_p_multiplex,
    estimate_p_temporal,
    estimate_sbm,
    estimate_theta,
    gamma_from_theta,
    omega_multiplex_pairwise,
    omega_multiplex_uniform,
    omega_temporal,
)
from .evalx import consensus_partition, layer_avg_nmi, layer_nmis, metadata_nmi, nmi, pairwise_nmi_matrix
from .itermodmax import IterConfig, IterResult, iterate, iterate_layer_dependent, multi_run
from .netcore import (
    InterlayerTopology,
    MultilayerNetwork,
    Partition,
    TopologyKind,
    ValidationError,
    load_network,
    load_parent_maps,
    load_partition,
    save_network,
    save_partition,
)
from .optimizer import MovePolicy, OptimizerConfig, maximize
from .params import ModularityParams, SBMParams
from .quality import log_posterior, multilayer_modularity, persistence

__version__ = "0.1.0"
