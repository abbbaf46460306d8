"""Partition comparison: normalized mutual information, layer averages,
pairwise matrices, co-classification consensus and metadata alignment."""
from __future__ import annotations

import logging
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .netcore import InterlayerTopology, MultilayerNetwork, Partition, ValidationError, coupling_weights
from .optimizer import OptimizerConfig, _Level, louvain

log = logging.getLogger(__name__)


class Normalization(str, Enum):
    MEAN = "MeanEntropy"
    JOINT = "JointEntropy"


class LayerMode(str, Enum):
    PER_LAYER = "PerLayer"
    FLATTEN = "Flatten"


def _entropy(counts: np.ndarray, n: int) -> float:
    q = counts[counts > 0] / n
    return float(-(q * np.log(q)).sum())


def nmi(a, b, normalization: Normalization | str = Normalization.MEAN) -> float:
    """Normalized mutual information of two labelings (natural logs).

    :param normalization: ``MeanEntropy`` divides by (H(a) + H(b)) / 2,
        ``JointEntropy`` by H(a, b)
    :return: value in [0, 1]; two constant labelings give 1
    """
    normalization = Normalization(normalization)
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if len(a) != len(b):
        raise ValidationError(f"labelings differ in length ({len(a)} vs {len(b)})")
    n = len(a)
    if n == 0:
        raise ValidationError("labelings must be non-empty")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    nb = int(ib.max()) + 1
    joint = np.bincount(ia * nb + ib)
    ca = np.bincount(ia)
    cb = np.bincount(ib)
    ha, hb, hab = _entropy(ca, n), _entropy(cb, n), _entropy(joint, n)
    mi = ha + hb - hab
    norm = 0.5 * (ha + hb) if normalization is Normalization.MEAN else hab
    if norm <= 0:
        return 1.0
    return float(min(max(mi / norm, 0.0), 1.0))


def layer_avg_nmi(p1: Partition, p2: Partition, normalization=Normalization.MEAN) -> float:
    """Mean over layers of the per-layer NMI."""
    return float(np.mean(layer_nmis(p1, p2, normalization)))


def layer_nmis(p1: Partition, p2: Partition, normalization=Normalization.MEAN) -> np.ndarray:
    if p1.layer_sizes != p2.layer_sizes:
        raise ValidationError(f"partitions have different shapes {p1.layer_sizes} vs {p2.layer_sizes}")
    return np.array([nmi(p1.layer(t), p2.layer(t), normalization) for t in range(p1.num_layers)])


def pairwise_nmi_matrix(partitions: Sequence[Partition], normalization=Normalization.MEAN) -> np.ndarray:
    """Symmetric matrix of layer-averaged NMI with unit diagonal."""
    R = len(partitions)
    if R == 0:
        raise ValidationError("need at least one partition")
    M = np.eye(R)
    for a in range(R):
        for b in range(a + 1, R):
            M[a, b] = M[b, a] = layer_avg_nmi(partitions[a], partitions[b], normalization)
    return M


def association_matrix(partitions: Sequence[Partition], topo: InterlayerTopology | None = None) -> sp.csr_matrix:
    """Co-classification frequencies over node-layer pairs.

    Within a layer, entry (i, j), i != j, is the fraction of partitions that
    put i and j together. For coupled copies of a node (pairs given by
    ``topo``) the entry is the fraction of partitions that keep its label.
    """
    R = len(partitions)
    if R == 0:
        raise ValidationError("need at least one partition")
    sizes = partitions[0].layer_sizes
    for p in partitions[1:]:
        if p.layer_sizes != sizes:
            raise ValidationError("partitions cover different node-layer sets")
    offsets = partitions[0].offsets
    n = int(offsets[-1])
    blocks = []
    for t, nt in enumerate(sizes):
        F = np.zeros((nt, nt))
        for p in partitions:
            g = p.layer(t)
            F += g[:, None] == g[None, :]
        F /= R
        np.fill_diagonal(F, 0.0)
        blocks.append(sp.csr_matrix(F))
    A = sp.block_diag(blocks, format="csr") if blocks else sp.csr_matrix((n, n))
    if topo is not None and len(sizes) > 1:
        shell = MultilayerNetwork([sp.csr_matrix((m, m)) for m in sizes])
        src, dst, ls, lt = topo.coupling_pairs(shell)
        freq = np.mean([p.labels[src] == p.labels[dst] for p in partitions], axis=0)
        C = sp.csr_matrix((freq * coupling_weights(1.0, ls, lt, len(sizes)), (src, dst)), shape=(n, n))
        A = (A + C).tocsr()
    return A


class ConsensusResult(NamedTuple):
    partition: Partition
    rounds: int
    converged: bool


def consensus_partition(partitions: Sequence[Partition], tau: float, cfg: OptimizerConfig | None = None,
                        topo: InterlayerTopology | None = None, max_rounds: int = 10,
                        return_rounds: bool = False):
    """Consensus of several partitions by thresholded co-classification.

    Entries of the association matrix below ``tau`` are dropped and the rest
    are re-clustered with the optimizer (no null model, so the threshold
    plays the role of the resolution). One re-clustering is run per input
    partition with its own seed; the procedure repeats on the new runs
    until all of them agree.

    :param tau: threshold in [0, 1]
    :param max_rounds: give up after this many rounds and return the last
        re-clustering
    """
    if not 0 <= tau <= 1:
        raise ValidationError("tau must lie in [0, 1]")
    if len(partitions) < 1:
        raise ValidationError("need at least one partition")
    cfg = cfg or OptimizerConfig()
    current = [p.canonical() for p in partitions]
    sizes = current[0].layer_sizes
    rounds = 0
    converged = all(p == current[0] for p in current)
    while not converged and rounds < max_rounds:
        rounds += 1
        A = association_matrix(current, topo)
        A.data[A.data < tau] = 0.0
        A.eliminate_zeros()
        n = A.shape[0]
        level = _Level((A + A.T).tocsr(), np.zeros(n + 1, np.int64), np.zeros(0, np.int64),
                       np.zeros(0), np.zeros(0))
        runs = []
        for k in range(len(current)):
            run_cfg = OptimizerConfig(cfg.move_policy, cfg.rng_seed + k, cfg.max_passes, cfg.min_gain)
            labels, _ = louvain(level, np.zeros(1), run_cfg)
            runs.append(Partition(labels, sizes).canonical())
        current = runs
        converged = all(p == current[0] for p in current)
    log.debug("consensus after %d rounds (converged=%s)", rounds, converged)
    res = ConsensusResult(current[0], rounds, converged)
    return res if return_rounds else res.partition


class MetadataNMI(NamedTuple):
    value: float
    per_layer: np.ndarray | None


def metadata_nmi(p: Partition, metadata, layer_mode: LayerMode | str = LayerMode.PER_LAYER,
                 normalization=Normalization.MEAN) -> MetadataNMI:
    """NMI between node metadata (broadcast to every layer) and a partition.

    ``PerLayer`` averages per-layer values; ``Flatten`` compares all
    node-layer pairs at once.
    """
    layer_mode = LayerMode(layer_mode)
    md = np.asarray(metadata).ravel()
    if any(n != len(md) for n in p.layer_sizes):
        raise ValidationError(f"metadata covers {len(md)} nodes, layers have {p.layer_sizes}")
    if layer_mode is LayerMode.FLATTEN:
        return MetadataNMI(nmi(np.tile(md, p.num_layers), p.labels, normalization), None)
    vals = np.array([nmi(md, p.layer(t), normalization) for t in range(p.num_layers)])
    return MetadataNMI(float(vals.mean()), vals)


__all__ = [
    "Normalization", "LayerMode", "nmi", "layer_nmis", "layer_avg_nmi", "pairwise_nmi_matrix",
    "association_matrix", "consensus_partition", "ConsensusResult", "metadata_nmi", "MetadataNMI",
]
