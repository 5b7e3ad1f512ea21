"""Local network metrics compared across individual and household networks.

All metrics run on the flattened, undirected, simple skeleton of the input:
layer multiplicity, weights and direction are ignored. Correlation metrics
return ``None`` when a variance is zero; they never return NaN.

Inversity is taken to be the Pearson correlation, over oriented edges
``(i, j)``, between ``deg(i)`` and ``1 / deg(j)``. Star-like graphs score
high and graphs made of dense clusters score low.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from hhnet.errors import DegeneracyError, ValidationError
from hhnet.graph import AdjacencyDecomposition, HouseholdPartition, IndividualNetwork, decompose


@dataclass(frozen=True)
class MetricReport:
    network: str
    metric: str
    value: float | None
    params: dict = field(default_factory=dict)

    @property
    def defined(self) -> bool:
        return self.value is not None

    def to_dict(self) -> dict:
        return {"network": self.network, "metric": self.metric,
                "value": "undefined" if self.value is None else self.value,
                "params": dict(self.params)}


def skeleton_of(graph) -> sp.csr_matrix:
    """Symmetric 0/1 simple adjacency for a network object or a matrix."""
    if hasattr(graph, "skeleton"):
        return graph.skeleton()
    if isinstance(graph, AdjacencyDecomposition):
        graph = graph.A
    a = sp.csr_matrix(graph)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"adjacency must be square, got shape {a.shape}")
    a = ((a + a.T) != 0).astype(np.int8)
    a.setdiag(0)
    a.eliminate_zeros()
    return a.tocsr()


def _pearson(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    r = float((dx * dy).sum() / np.sqrt((dx * dx).sum() * (dy * dy).sum()))
    return min(1.0, max(-1.0, r))


def _oriented(u, v):
    return np.concatenate([u, v]), np.concatenate([v, u])


def _edge_arrays(graph):
    a = sp.triu(skeleton_of(graph), k=1).tocoo()
    return a.shape[0], a.row.astype(np.int64), a.col.astype(np.int64)


def _assortativity_from_edges(n, u, v):
    if len(u) == 0:
        raise DegeneracyError("assortativity needs at least one edge")
    deg = np.bincount(np.concatenate([u, v]), minlength=n)
    src, dst = _oriented(u, v)
    ds, dt = deg[src], deg[dst]
    if np.all(ds == ds[0]):
        return None
    return _pearson(ds, dt)


def _inversity_from_edges(n, u, v):
    if len(u) == 0:
        raise DegeneracyError("inversity needs at least one edge")
    deg = np.bincount(np.concatenate([u, v]), minlength=n)
    src, dst = _oriented(u, v)
    ds, dt = deg[src], deg[dst]
    # orientation makes both endpoint-degree lists the same multiset
    if np.all(ds == ds[0]):
        return None
    return _pearson(ds, 1.0 / dt)


def degree_assortativity(graph) -> float | None:
    """Pearson correlation of endpoint degrees over both orientations of
    every edge. ``None`` when all endpoint degrees are equal."""
    return _assortativity_from_edges(*_edge_arrays(graph))


def inversity(graph) -> float | None:
    return _inversity_from_edges(*_edge_arrays(graph))


def local_clustering(graph) -> np.ndarray:
    a = skeleton_of(graph).astype(np.int64)
    deg = np.asarray(a.sum(axis=1)).ravel()
    tri = np.asarray(a.multiply(a @ a).sum(axis=1)).ravel() / 2.0
    wedges = deg * (deg - 1) / 2.0
    out = np.zeros(a.shape[0])
    ok = deg >= 2
    out[ok] = tri[ok] / wedges[ok]
    return out


def average_clustering(graph) -> float:
    """Mean local clustering; nodes of degree < 2 contribute 0."""
    c = local_clustering(graph)
    if c.size == 0:
        raise ValidationError("average clustering of an empty graph")
    return float(c.mean())


def intrahousehold_edge_proportion(decomposition: AdjacencyDecomposition) -> float:
    total = (decomposition.A != 0).nnz
    if total == 0:
        raise DegeneracyError("network has no edges")
    return (decomposition.A_intra != 0).nnz / total


@dataclass(frozen=True)
class SweepRow:
    p: float
    mean_inversity: float | None
    q05: float | None
    q95: float | None
    undefined_count: int
    values: tuple = ()

    def to_dict(self) -> dict:
        def fmt(x):
            return "undefined" if x is None else x
        return {"p": self.p, "mean_inversity": fmt(self.mean_inversity), "q05": fmt(self.q05),
                "q95": fmt(self.q95), "undefined_count": self.undefined_count}


def _split_intra(network, partition):
    partition.check_covers(network.nodes)
    n, u, v = _edge_arrays(network)
    pos = {h: k for k, h in enumerate(partition.ids)}
    hh = np.array([pos[partition.household_of(x)] for x in network.nodes])
    intra = hh[u] == hh[v]
    return n, u, v, intra


def _band(values):
    if not values:
        return None, None, None
    arr = np.asarray(values)
    return float(arr.mean()), float(np.quantile(arr, 0.05)), float(np.quantile(arr, 0.95))


def inversity_removal_sweep(network: IndividualNetwork, partition: HouseholdPartition,
                            grid: Sequence[float], reps: int = 100, seed: int = 0) -> list[SweepRow]:
    """Inversity after removing each intrahousehold edge with probability p.

    Replication ``r`` at grid index ``k`` draws from its own stream keyed by
    ``(seed, k, r)``. Replications where inversity is undefined are left out
    of the mean and quantiles and counted in ``undefined_count``.
    """
    if reps < 1:
        raise ValidationError("reps must be >= 1")
    grid = [float(p) for p in grid]
    bad = [p for p in grid if not 0.0 <= p <= 1.0]
    if bad:
        raise ValidationError("grid values outside [0, 1]", [str(p) for p in bad])
    n, u, v, intra = _split_intra(network, partition)
    iu, iv = u[intra], v[intra]
    eu, ev = u[~intra], v[~intra]
    rows = []
    for k, p in enumerate(grid):
        vals = []
        undefined = 0
        for r in range(reps):
            rng = np.random.default_rng([seed, k, r])
            keep = rng.random(len(iu)) >= p
            uu = np.concatenate([eu, iu[keep]])
            vv = np.concatenate([ev, iv[keep]])
            val = _inversity_from_edges(n, uu, vv) if len(uu) else None
            if val is None:
                undefined += 1
            else:
                vals.append(val)
        mean, lo, hi = _band(vals)
        rows.append(SweepRow(p, mean, lo, hi, undefined, tuple(vals)))
    return rows


def aggregate_sweeps(sweeps: Iterable[Sequence[SweepRow]]) -> list[SweepRow]:
    """Combine per-network sweeps: mean of the per-network means with the
    5%/95% quantiles taken across networks."""
    sweeps = list(sweeps)
    if not sweeps:
        return []
    out = []
    for cells in zip(*sweeps):
        ps = {c.p for c in cells}
        if len(ps) != 1:
            raise ValidationError("sweeps use different p grids")
        means = [c.mean_inversity for c in cells if c.mean_inversity is not None]
        mean, lo, hi = _band(means)
        out.append(SweepRow(cells[0].p, mean, lo, hi,
                            sum(c.mean_inversity is None for c in cells), tuple(means)))
    return out


def summarize(network: IndividualNetwork, partition: HouseholdPartition | None = None,
              name: str = "individual") -> list[MetricReport]:
    """Assortativity, clustering and inversity of a network; with a partition,
    also the intrahousehold edge share and inversity with those edges removed."""

    def safe(fn, g):
        try:
            return fn(g)
        except DegeneracyError:
            return None

    reports = [
        MetricReport(name, "degree_assortativity", safe(degree_assortativity, network)),
        MetricReport(name, "average_clustering", average_clustering(network)),
        MetricReport(name, "inversity", safe(inversity, network)),
    ]
    if partition is not None:
        d = decompose(network, partition)
        reports.append(MetricReport(name, "intrahousehold_edge_proportion",
                                    safe(intrahousehold_edge_proportion, d)))
        reports.append(MetricReport(name, "inversity_without_intra", safe(inversity, d.A_extra),
                                    {"intra_removed": 1.0}))
    return reports


def metric_values(reports: Iterable[MetricReport]) -> dict[str, Any]:
    return {r.metric: r.value for r in reports}
