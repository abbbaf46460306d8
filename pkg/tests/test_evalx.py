import numpy as np
import pytest
from sklearn.metrics import normalized_mutual_info_score

from mlmod.evalx import (
    LayerMode,
    Normalization,
    association_matrix,
    consensus_partition,
    layer_avg_nmi,
    layer_nmis,
    metadata_nmi,
    nmi,
    pairwise_nmi_matrix,
)
from mlmod.netcore import InterlayerTopology, Partition, ValidationError


def test_nmi_examples():
    assert nmi([0, 1, 2, 2], [5, 6, 7, 7]) == 1.0
    assert nmi([0, 0, 0, 0], [0, 1, 0, 1]) == 0.0
    assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == 0.0
    assert nmi([3, 3, 3], [1, 1, 1]) == 1.0


def test_nmi_matches_sklearn(rng):
    for _ in range(20):
        a, b = rng.integers(0, 4, 50), rng.integers(0, 3, 50)
        assert nmi(a, b) == pytest.approx(normalized_mutual_info_score(a, b, average_method="arithmetic"))


def test_joint_normalization():
    # I = ln 2, H(a, b) = ln 4 for a fine vs coarse split
    assert nmi([0, 0, 1, 1], [0, 1, 2, 3], Normalization.JOINT) == pytest.approx(0.5)


def test_nmi_length_mismatch():
    with pytest.raises(ValidationError):
        nmi([0, 1], [0, 1, 2])


def test_layer_average(rng):
    g = np.arange(100) % 4
    p1 = Partition.from_layers([g, g])
    p2 = Partition.from_layers([g, rng.permutation(np.zeros(100, int))])
    assert list(layer_nmis(p1, p2)) == [1.0, 0.0]
    assert layer_avg_nmi(p1, p2) == pytest.approx(0.5)
    assert layer_avg_nmi(p1, p1) == 1.0


def test_pairwise_matrix():
    p = Partition([0, 1, 0, 1], [2, 2])
    assert np.array_equal(pairwise_nmi_matrix([p]), [[1.0]])
    M = pairwise_nmi_matrix([p, p, Partition([0, 0, 1, 1], [2, 2])])
    assert np.allclose(M, M.T) and M[0, 1] == 1.0


def test_association_matrix():
    a = Partition([0, 0, 1, 0, 0, 1], [3, 3])
    b = Partition([0, 1, 1, 0, 1, 1], [3, 3])
    A = association_matrix([a, b], InterlayerTopology.temporal()).toarray()
    assert A[0, 1] == 0.5 and A[1, 2] == 0.5 and A[0, 0] == 0
    assert A[0, 3] == 1.0 and A[3, 0] == 0.0


def test_consensus_of_identical_partitions_is_that_partition():
    p = Partition([0, 0, 1, 1, 0, 0, 1, 1], [4, 4])
    res = consensus_partition([p, p, p], 0.5, return_rounds=True)
    assert res.partition == p.canonical() and res.rounds == 0 and res.converged


def test_consensus_of_noisy_partitions():
    base = np.repeat([0, 1, 2], 10)
    parts = []
    for k in range(5):
        g = base.copy()
        g[k] = (g[k] + 1) % 3
        parts.append(Partition(g, [30]))
    res = consensus_partition(parts, 0.5, return_rounds=True)
    assert res.converged
    assert nmi(res.partition.labels, base) == 1.0


def test_metadata_nmi_modes():
    md = np.array([0, 0, 1, 1])
    p = Partition.from_layers([[0, 0, 1, 1], [0, 1, 0, 1]])
    per = metadata_nmi(p, md)
    assert per.value == pytest.approx(0.5) and list(per.per_layer) == [1.0, 0.0]
    flat = metadata_nmi(p, md, LayerMode.FLATTEN)
    assert flat.per_layer is None and 0 < flat.value < 1
    with pytest.raises(ValidationError):
        metadata_nmi(p, [0, 1, 2])
