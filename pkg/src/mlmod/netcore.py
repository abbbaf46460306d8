"""Multilayer network data model, interlayer topologies and text file I/O.

File conventions: layers are 1-based and nodes 0-based in every file format.
The Python API indexes layers from 0.
"""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


class ValidationError(ValueError):
    """Input data violates a structural requirement."""


class ParseError(ValidationError):
    """A text file line could not be parsed."""

    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


class TopologyKind(str, Enum):
    TEMPORAL = "temporal"
    MULTIPLEX = "multiplex"
    MULTILEVEL = "multilevel"


class MultilayerNetwork:
    """Intralayer adjacency matrices over per-layer node sets.

    Immutable after construction. Undirected layers store a self-loop as a
    diagonal entry of 2 so that row sums are degrees and ``sum(d) == 2 m``.

    :param layers: one square sparse (or dense) 0/1 adjacency matrix per layer
    :param directed: whether intralayer edges are directed
    """

    def __init__(self, layers: Sequence, directed: bool = False):
        if len(layers) == 0:
            raise ValidationError("a network needs at least one layer")
        mats = []
        for t, a in enumerate(layers):
            a = sp.csr_matrix(a, dtype=np.float64, copy=True)
            a.sum_duplicates()
            a.eliminate_zeros()
            if a.shape[0] != a.shape[1]:
                raise ValidationError(f"layer {t + 1} adjacency is not square")
            _check_entries(a, directed, t)
            a.sort_indices()
            a.data.setflags(write=False)
            mats.append(a)
        self._layers = tuple(mats)
        self.directed = bool(directed)
        self.layer_sizes = tuple(int(a.shape[0]) for a in mats)
        self.offsets = np.concatenate([[0], np.cumsum(self.layer_sizes)]).astype(np.int64)
        self.offsets.setflags(write=False)
        self._out = tuple(_frozen(np.asarray(a.sum(axis=1)).ravel()) for a in mats)
        self._in = tuple(_frozen(np.asarray(a.sum(axis=0)).ravel()) for a in mats)
        # total adjacency mass per layer: m'_t directed, 2 m_t undirected
        self._mass = _frozen(np.array([a.sum() for a in mats], dtype=np.float64))

    # -- shape ---------------------------------------------------------------
    @property
    def num_layers(self) -> int:
        return len(self._layers)

    @property
    def layers(self) -> tuple:
        return self._layers

    @property
    def num_states(self) -> int:
        """Total number of node-layer pairs."""
        return int(self.offsets[-1])

    @property
    def uniform_size(self) -> bool:
        return len(set(self.layer_sizes)) == 1

    @property
    def num_nodes(self) -> int:
        """Node count N, defined only when all layers share one node set."""
        if not self.uniform_size:
            raise ValidationError("layers have different node counts")
        return self.layer_sizes[0]

    def global_index(self, t: int, i) -> np.ndarray:
        return self.offsets[t] + np.asarray(i)

    def layer_of_state(self) -> np.ndarray:
        return np.repeat(np.arange(self.num_layers), self.layer_sizes)

    # -- degree and edge caches ---------------------------------------------
    def degrees(self, t: int) -> np.ndarray:
        if self.directed:
            raise ValidationError("directed layers have out- and in-degrees")
        return self._out[t]

    def out_degrees(self, t: int) -> np.ndarray:
        return self._out[t]

    def in_degrees(self, t: int) -> np.ndarray:
        return self._in[t]

    def edge_count(self, t: int) -> float:
        """m_t for undirected layers, m'_t for directed ones."""
        return float(self._mass[t] if self.directed else self._mass[t] / 2.0)

    def adjacency_mass(self, t: int) -> float:
        """sum_ij A_ij: the normalisation of the null model (2 m_t or m'_t)."""
        return float(self._mass[t])

    def edge_list(self, t: int) -> np.ndarray:
        """Edges of layer t as an (E, 2) array; undirected edges listed once."""
        a = self._layers[t].tocoo()
        keep = np.ones(a.nnz, bool) if self.directed else a.row <= a.col
        return np.column_stack([a.row[keep], a.col[keep]]).astype(np.int64)

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"MultilayerNetwork(T={self.num_layers}, sizes={self.layer_sizes}, {kind})"

    @classmethod
    def from_edges(cls, edges: Sequence[Iterable], layer_sizes: int | Sequence[int],
                   directed: bool = False) -> "MultilayerNetwork":
        """Build from per-layer (i, j) edge iterables.

        Undirected edges are listed once; listing both orientations is a
        multi-edge and is rejected.
        """
        T = len(edges)
        sizes = [int(layer_sizes)] * T if np.isscalar(layer_sizes) else [int(n) for n in layer_sizes]
        if len(sizes) != T:
            raise ValidationError("need one size per layer")
        mats = []
        for t, (es, n) in enumerate(zip(edges, sizes)):
            e = np.asarray(list(es) if not isinstance(es, np.ndarray) else es, dtype=np.int64).reshape(-1, 2)
            mats.append(_edges_to_matrix(e, n, directed, t))
        return cls(mats, directed=directed)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def _check_entries(a: sp.csr_matrix, directed: bool, t: int) -> None:
    if a.nnz == 0:
        return
    if a.data.min() < 0:
        raise ValidationError(f"layer {t + 1} has a negative edge weight")
    coo = a.tocoo()
    diag = coo.row == coo.col
    vals = coo.data
    if directed:
        ok = vals == 1
    else:
        ok = np.where(diag, vals == 2, vals == 1)
    if not ok.all():
        raise ValidationError(f"layer {t + 1} is not a simple unweighted graph")
    if not directed and (a != a.T).nnz:
        raise ValidationError(f"undirected layer {t + 1} is not symmetric")


def _edges_to_matrix(e: np.ndarray, n: int, directed: bool, t: int) -> sp.csr_matrix:
    if e.size and (e.min() < 0 or e.max() >= n):
        raise ValidationError(f"layer {t + 1} has a node id outside 0..{n - 1}")
    key = e if directed else np.sort(e, axis=1)
    if len(key) and len(np.unique(key, axis=0)) != len(key):
        raise ValidationError(f"layer {t + 1} contains a multi-edge")
    if directed:
        rows, cols = e[:, 0], e[:, 1]
        vals = np.ones(len(e))
    else:
        loop = e[:, 0] == e[:, 1]
        off = e[~loop]
        rows = np.concatenate([off[:, 0], off[:, 1], e[loop, 0]])
        cols = np.concatenate([off[:, 1], off[:, 0], e[loop, 0]])
        vals = np.concatenate([np.ones(2 * len(off)), np.full(int(loop.sum()), 2.0)])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


@dataclass(frozen=True)
class InterlayerTopology:
    """How layers are coupled.

    ``parents[k]`` maps nodes of layer ``k + 1`` to nodes of layer ``k``
    (multilevel only), so ``len(parents) == T - 1``.
    """

    kind: TopologyKind
    parents: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", TopologyKind(self.kind))
        if self.kind is TopologyKind.MULTILEVEL:
            if self.parents is None:
                raise ValidationError("a multilevel topology needs parent maps")
            ps = tuple(_frozen_int(p) for p in self.parents)
            object.__setattr__(self, "parents", ps)
        elif self.parents is not None:
            raise ValidationError("parent maps only apply to multilevel topologies")

    @classmethod
    def temporal(cls) -> "InterlayerTopology":
        return cls(TopologyKind.TEMPORAL)

    @classmethod
    def multiplex(cls) -> "InterlayerTopology":
        return cls(TopologyKind.MULTIPLEX)

    @classmethod
    def multilevel(cls, parents: Sequence) -> "InterlayerTopology":
        return cls(TopologyKind.MULTILEVEL, tuple(parents))

    @property
    def is_ordered(self) -> bool:
        return self.kind is not TopologyKind.MULTIPLEX

    def validate(self, net: MultilayerNetwork) -> None:
        if self.kind is TopologyKind.MULTILEVEL:
            if len(self.parents) != net.num_layers - 1:
                raise ValidationError(
                    f"expected {net.num_layers - 1} parent maps, got {len(self.parents)}")
            for k, p in enumerate(self.parents):
                n_child, n_par = net.layer_sizes[k + 1], net.layer_sizes[k]
                if len(p) != n_child:
                    raise ValidationError(f"parent map of layer {k + 2} is not total")
                if len(p) and (p.min() < 0 or p.max() >= n_par):
                    raise ValidationError(f"parent map of layer {k + 2} points outside layer {k + 1}")
        elif not net.uniform_size:
            raise ValidationError(f"{self.kind.value} networks need the same node set in every layer")

    def coupling_pairs(self, net: MultilayerNetwork):
        """Directed interlayer links as global-index arrays.

        :return: ``(src, dst, s, t)`` where each link runs from state ``src``
            in layer ``s`` to state ``dst`` in layer ``t``
        """
        self.validate(net)
        T = net.num_layers
        src, dst, ls, lt = [], [], [], []

        def add(s, t, i_src, i_dst):
            src.append(net.offsets[s] + i_src)
            dst.append(net.offsets[t] + i_dst)
            ls.append(np.full(len(i_dst), s))
            lt.append(np.full(len(i_dst), t))

        if self.kind is TopologyKind.TEMPORAL:
            idx = np.arange(net.layer_sizes[0])
            for t in range(1, T):
                add(t - 1, t, idx, idx)
        elif self.kind is TopologyKind.MULTIPLEX:
            idx = np.arange(net.layer_sizes[0])
            for s in range(T):
                for t in range(T):
                    if s != t:
                        add(s, t, idx, idx)
        else:
            for t in range(1, T):
                add(t - 1, t, self.parents[t - 1], np.arange(net.layer_sizes[t]))
        if not src:
            z = np.zeros(0, np.int64)
            return z, z, z, z
        return tuple(np.concatenate(x).astype(np.int64) for x in (src, dst, ls, lt))


def _frozen_int(p) -> np.ndarray:
    a = np.ascontiguousarray(p, dtype=np.int64)
    a.setflags(write=False)
    return a


class Partition:
    """Community label for every node-layer pair, in one shared label space.

    :param labels: flat non-negative integer labels ordered layer by layer
    :param layer_sizes: node count of each layer
    """

    def __init__(self, labels, layer_sizes: Sequence[int]):
        labels = np.array(labels, dtype=np.int64).ravel()
        self.layer_sizes = tuple(int(n) for n in layer_sizes)
        self.offsets = np.concatenate([[0], np.cumsum(self.layer_sizes)]).astype(np.int64)
        if len(labels) != self.offsets[-1]:
            raise ValidationError(
                f"partition has {len(labels)} labels for {self.offsets[-1]} node-layer pairs")
        if len(labels) and labels.min() < 0:
            raise ValidationError("community labels must be non-negative")
        labels.setflags(write=False)
        self.labels = labels

    @classmethod
    def from_layers(cls, layers: Sequence) -> "Partition":
        arrs = [np.asarray(a, dtype=np.int64).ravel() for a in layers]
        return cls(np.concatenate(arrs) if arrs else [], [len(a) for a in arrs])

    @classmethod
    def singletons(cls, layer_sizes: Sequence[int]) -> "Partition":
        return cls(np.arange(int(sum(layer_sizes))), layer_sizes)

    @property
    def num_layers(self) -> int:
        return len(self.layer_sizes)

    def layer(self, t: int) -> np.ndarray:
        return self.labels[self.offsets[t]:self.offsets[t + 1]]

    def layers(self) -> list:
        return [self.layer(t) for t in range(self.num_layers)]

    def check_matches(self, net: MultilayerNetwork) -> None:
        if self.layer_sizes != net.layer_sizes:
            raise ValidationError(
                f"partition layer sizes {self.layer_sizes} do not match network {net.layer_sizes}")

    def canonical(self) -> "Partition":
        """Relabel by order of first appearance (label-space normal form)."""
        _, first, inv = np.unique(self.labels, return_index=True, return_inverse=True)
        rank = np.empty(len(first), np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        return Partition(rank[inv], self.layer_sizes)

    def num_communities(self) -> int:
        return int(len(np.unique(self.labels)))

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.layer_sizes == other.layer_sizes and np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash((self.layer_sizes, self.labels.tobytes()))

    def __repr__(self):
        return f"Partition(T={self.num_layers}, K={self.num_communities()})"


def supra_adjacency(net: MultilayerNetwork, topo: InterlayerTopology, omega=1.0) -> sp.csr_matrix:
    """Supra-adjacency matrix with diagonal blocks A^t and coupling blocks.

    Global index of node i in layer t is ``offsets[t] + i``. Temporal and
    multilevel links run from layer t-1 to layer t (upper blocks only);
    multiplex links appear for both ordered layer pairs.

    :param omega: scalar, per-layer vector (entry t weights links into layer
        t; entry 0 unused) or a T x T matrix (multiplex)
    """
    src, dst, ls, lt = topo.coupling_pairs(net)
    w = coupling_weights(omega, ls, lt, net.num_layers)
    n = net.num_states
    coupling = sp.csr_matrix((w, (src, dst)), shape=(n, n))
    return (sp.block_diag(net.layers, format="csr") + coupling).tocsr()


def coupling_weights(omega, ls: np.ndarray, lt: np.ndarray, T: int) -> np.ndarray:
    om = np.asarray(omega, dtype=np.float64)
    if om.ndim == 0:
        w = np.full(len(lt), float(om))
    elif om.ndim == 1:
        if len(om) != T:
            raise ValidationError(f"per-layer coupling needs {T} entries")
        w = om[lt]
    elif om.shape == (T, T):
        w = om[ls, lt]
    else:
        raise ValidationError(f"cannot interpret coupling of shape {om.shape}")
    if np.any(w < 0):
        raise ValidationError("interlayer couplings must be non-negative")
    return w


# -- file I/O ----------------------------------------------------------------

_HEADER = re.compile(r"#\s*layers\s+(\d+)(?:\s+#\s*nodes\s+([\d,\s]+))?", re.I)


def load_network(path, directed: bool = False, layer_sizes=None) -> MultilayerNetwork:
    """Read a ``t i j [w]`` edge file.

    An optional ``#layers T #nodes N`` header fixes the layer count and node
    count (``#nodes N1,N2,...`` gives per-layer sizes). Without it, T is the
    largest layer index and every layer gets ``max node id + 1`` nodes.
    Weights must be 1 (or 0, meaning no edge).
    """
    path = Path(path)
    T_hdr, sizes_hdr = None, None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                m = _HEADER.match(s)
                if m:
                    T_hdr = int(m.group(1))
                    if m.group(2):
                        sizes_hdr = [int(x) for x in re.split(r"[,\s]+", m.group(2).strip()) if x]
                continue
            parts = s.split()
            if len(parts) not in (3, 4):
                raise ParseError(path, lineno, f"expected 't i j [w]', got {s!r}")
            try:
                t, i, j = (int(x) for x in parts[:3])
                w = float(parts[3]) if len(parts) == 4 else 1.0
            except ValueError:
                raise ParseError(path, lineno, f"non-numeric field in {s!r}") from None
            if w < 0:
                raise ValidationError(f"{path}:{lineno}: negative edge weight")
            if w not in (0.0, 1.0):
                raise ValidationError(f"{path}:{lineno}: weighted edges are not supported")
            if t < 1 or (T_hdr is not None and t > T_hdr):
                raise ValidationError(f"{path}:{lineno}: layer index {t} out of range")
            if i < 0 or j < 0:
                raise ValidationError(f"{path}:{lineno}: negative node id")
            if w:
                rows.append((t, i, j))
    e = np.array(rows, dtype=np.int64).reshape(-1, 3)
    T = T_hdr if T_hdr is not None else (int(e[:, 0].max()) if len(e) else 0)
    if T < 1:
        raise ValidationError(f"{path}: no layers")
    if layer_sizes is not None:
        sizes = [int(layer_sizes)] * T if np.isscalar(layer_sizes) else list(layer_sizes)
    elif sizes_hdr is not None:
        sizes = sizes_hdr * T if len(sizes_hdr) == 1 else sizes_hdr
    else:
        sizes = [int(e[:, 1:].max()) + 1 if len(e) else 1] * T
    if len(sizes) != T:
        raise ValidationError(f"{path}: {len(sizes)} layer sizes for {T} layers")
    edges = [e[e[:, 0] == t + 1, 1:] for t in range(T)]
    return MultilayerNetwork.from_edges(edges, sizes, directed=directed)


def save_network(net: MultilayerNetwork, path) -> None:
    sizes = net.layer_sizes
    node_hdr = str(sizes[0]) if net.uniform_size else ",".join(map(str, sizes))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#layers {net.num_layers} #nodes {node_hdr}\n")
        for t in range(net.num_layers):
            for i, j in net.edge_list(t):
                fh.write(f"{t + 1} {i} {j}\n")


def load_parent_maps(path, layer_sizes: Sequence[int] | None = None) -> tuple:
    """Read ``t i p`` lines meaning node i of layer t has parent p in layer t-1.

    :param layer_sizes: when given, maps are checked for totality against
        these sizes and parents are checked against layer t-1
    :return: tuple of T-1 integer arrays
    """
    path = Path(path)
    entries: dict[int, dict[int, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 3:
                raise ParseError(path, lineno, f"expected 't i p', got {s!r}")
            try:
                t, i, p = (int(x) for x in parts)
            except ValueError:
                raise ParseError(path, lineno, f"non-numeric field in {s!r}") from None
            if t < 2:
                raise ValidationError(f"{path}:{lineno}: parent maps start at layer 2")
            if i < 0 or p < 0:
                raise ValidationError(f"{path}:{lineno}: negative node id")
            layer = entries.setdefault(t, {})
            if i in layer:
                raise ValidationError(f"{path}:{lineno}: duplicate parent for node {i} of layer {t}")
            layer[i] = p
    T = (max(entries) if entries else 1) if layer_sizes is None else len(layer_sizes)
    maps = []
    for t in range(2, T + 1):
        layer = entries.get(t, {})
        n = len(layer) if layer_sizes is None else layer_sizes[t - 1]
        missing = [i for i in range(n) if i not in layer]
        if missing or len(layer) != n:
            raise ValidationError(f"{path}: parent map of layer {t} is not total (missing {missing[:5]})")
        arr = np.array([layer[i] for i in range(n)], dtype=np.int64)
        n_par = len(entries.get(t - 1, {})) if layer_sizes is None and t > 2 else None
        if layer_sizes is not None:
            n_par = layer_sizes[t - 2]
        if n_par is not None and n and arr.max() >= n_par:
            raise ValidationError(f"{path}: parent id of layer {t} not in layer {t - 1}")
        maps.append(arr)
    return tuple(maps)


def save_parent_maps(parents: Sequence, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for k, p in enumerate(parents):
            for i, par in enumerate(p):
                fh.write(f"{k + 2} {i} {int(par)}\n")


def save_partition(p: Partition, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# t i g\n")
        for t in range(p.num_layers):
            for i, g in enumerate(p.layer(t)):
                fh.write(f"{t + 1} {i} {int(g)}\n")


def load_partition(path, layer_sizes: Sequence[int] | None = None) -> Partition:
    """Read ``t i g`` lines. Every node-layer pair must appear exactly once."""
    path = Path(path)
    seen: dict[tuple, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 3:
                raise ParseError(path, lineno, f"expected 't i g', got {s!r}")
            try:
                t, i, g = (int(x) for x in parts)
            except ValueError:
                raise ParseError(path, lineno, f"non-numeric field in {s!r}") from None
            if t < 1 or i < 0 or g < 0:
                raise ValidationError(f"{path}:{lineno}: negative or zero index")
            if (t, i) in seen:
                raise ValidationError(f"{path}:{lineno}: duplicate entry for layer {t} node {i}")
            seen[(t, i)] = g
    if not seen:
        raise ValidationError(f"{path}: empty partition file")
    T = max(t for t, _ in seen) if layer_sizes is None else len(layer_sizes)
    if layer_sizes is None:
        layer_sizes = [1 + max((i for (tt, i) in seen if tt == t), default=-1) for t in range(1, T + 1)]
    labels = []
    for t in range(1, T + 1):
        for i in range(layer_sizes[t - 1]):
            if (t, i) not in seen:
                raise ValidationError(f"{path}: no label for layer {t} node {i}")
            labels.append(seen[(t, i)])
    if len(labels) != len(seen):
        raise ValidationError(f"{path}: entries outside the network's node-layer set")
    return Partition(labels, layer_sizes)


def load_metadata(path, bin_columns: Sequence[str] = (), bin_width: float = 5.0,
                  id_column: str | None = None) -> dict:
    """Read a per-node metadata CSV (header row, one row per node).

    Columns named in ``bin_columns`` are numeric and get grouped into
    ``bin_width``-wide bins. Other columns are categorical strings.

    :param id_column: optional column of 0-based node ids; rows are put in
        node order and the column is dropped
    :return: ordered mapping column name -> integer-coded label array
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValidationError(f"{path}: no metadata rows")
    if id_column is not None:
        try:
            ids = [int(r[id_column]) for r in rows]
        except (KeyError, ValueError):
            raise ValidationError(f"{path}: bad or missing id column {id_column!r}") from None
        if sorted(ids) != list(range(len(rows))):
            raise ValidationError(f"{path}: node ids must be 0..{len(rows) - 1}")
        rows = [r for _, r in sorted(zip(ids, rows), key=lambda x: x[0])]
    out = {}
    for col in rows[0].keys():
        if col == id_column:
            continue
        vals = [r[col] for r in rows]
        if col in bin_columns:
            try:
                num = np.array([float(v) for v in vals])
            except ValueError:
                raise ValidationError(f"{path}: column {col!r} is not numeric") from None
            coded = np.floor(num / bin_width).astype(np.int64)
        else:
            _, coded = np.unique(np.array(vals, dtype=object).astype(str), return_inverse=True)
        out[col] = np.asarray(coded, dtype=np.int64)
    return out
