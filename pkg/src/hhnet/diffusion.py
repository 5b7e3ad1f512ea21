"""Independent cascades, greedy influence maximization and diffusion centrality.

Cascades are simulated through their live-edge form: in each replication every
edge draws one uniform and is live when the draw falls below its transmission
probability; the activated set is everything reachable from the seeds over
live edges. For undirected graphs one draw per edge matches the sequential
process, because an edge is only ever attempted from whichever endpoint is
activated first. Draws do not depend on the probabilities, so two runs with
the same seed share their randomness (common random numbers).

Replications are drawn in fixed-size blocks; block ``b`` uses the stream keyed
by ``(seed, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, connected_components, shortest_path

from hhnet.contraction import (HouseholdNetwork, map_households_to_individuals,
                               map_individuals_to_households)
from hhnet.errors import DegeneracyError, ValidationError
from hhnet.graph import (AdjacencyDecomposition, HouseholdPartition, IndividualNetwork,
                         decompose, sorted_ids)

BLOCK = 256


@dataclass(frozen=True)
class CascadeConfig:
    q: float = 0.05       # extrahousehold (and household-network) transmission
    intra: float = 0.7    # intrahousehold transmission, i.e. 1 - p
    reps: int = 1000
    seed: int = 0

    def __post_init__(self):
        problems = []
        for name in ("q", "intra"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                problems.append(f"{name}={val!r} outside [0, 1]")
        if self.reps < 1:
            problems.append(f"reps={self.reps!r} must be >= 1")
        if problems:
            raise ValidationError("invalid cascade configuration", problems)


@dataclass(frozen=True)
class SeedSet:
    nodes: tuple
    k: int
    level: str = "individual"
    estimated_reach: float | None = None
    gains: tuple = ()

    def __post_init__(self):
        if len(self.nodes) > self.k:
            raise ValidationError(f"seed set has {len(self.nodes)} nodes but K={self.k}")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValidationError("seed set contains repeated nodes")

    def to_dict(self) -> dict:
        return {"level": self.level, "k": self.k, "seeds": list(self.nodes),
                "estimated_reach": self.estimated_reach, "marginal_gains": list(self.gains)}


@dataclass(frozen=True)
class CascadeResult:
    mean: float
    std: float
    reaches: np.ndarray = field(repr=False)
    n: int = 0

    def to_dict(self) -> dict:
        return {"mean_reach": self.mean, "std_reach": self.std, "nodes": self.n,
                "replications": int(self.reaches.size)}


@dataclass(frozen=True)
class CascadeGraph:
    """Edge list with per-edge transmission probabilities."""

    nodes: tuple
    src: np.ndarray
    dst: np.ndarray
    prob: np.ndarray
    directed: bool = False

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.nodes)}

    def indices(self, ids: Iterable[Hashable]) -> np.ndarray:
        idx = self.index
        ids = list(ids)
        unknown = [v for v in ids if v not in idx]
        if unknown:
            raise ValidationError("seed(s) not in network", [repr(v) for v in unknown])
        return np.array(sorted({idx[v] for v in ids}), dtype=np.int64)


def _edges_of(adj: sp.spmatrix, directed: bool):
    a = sp.csr_matrix(adj)
    if not directed:
        a = sp.triu(a + a.T, k=1)
    a = a.tocoo()
    keep = a.data != 0
    return a.row[keep].astype(np.int64), a.col[keep].astype(np.int64)


def cascade_graph(target, config: CascadeConfig,
                  partition: HouseholdPartition | None = None) -> CascadeGraph:
    """Attach transmission probabilities to a network's edges.

    Individual networks with a partition (or a decomposition) transmit with
    ``config.intra`` inside households and ``config.q`` across them. Household
    networks and individual networks without a partition use ``q`` everywhere.
    Edge weights are not used.
    """
    if isinstance(target, IndividualNetwork) and partition is not None:
        target = decompose(target, partition)
    if isinstance(target, AdjacencyDecomposition):
        src, dst = _edges_of(target.A, target.directed)
        intra = target.household_index[src] == target.household_index[dst]
        prob = np.where(intra, config.intra, config.q)
        return CascadeGraph(target.nodes, src, dst, prob, target.directed)
    if isinstance(target, (IndividualNetwork, HouseholdNetwork)):
        src, dst = _edges_of(target.adjacency(), target.directed)
        return CascadeGraph(target.nodes, src, dst, np.full(len(src), config.q), target.directed)
    raise TypeError(f"cannot run a cascade on {type(target).__name__}")


def _blocks(reps, seed):
    for b, start in enumerate(range(0, reps, BLOCK)):
        yield min(BLOCK, reps - start), np.random.default_rng([seed, b])


def _block_graph(g, live, extra=0):
    size = live.shape[0]
    r, e = np.nonzero(live)
    rows = r * g.n + g.src[e]
    cols = r * g.n + g.dst[e]
    N = size * g.n + extra
    return rows, cols, N


def _components(g, live):
    rows, cols, N = _block_graph(g, live)
    mat = sp.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(N, N))
    k, labels = connected_components(mat, directed=False)
    return labels.reshape(live.shape[0], g.n), np.bincount(labels, minlength=k)


def _reach_directed(g, live, seed_idx):
    size = live.shape[0]
    if len(seed_idx) == 0:
        return np.zeros(size, dtype=np.int64)
    rows, cols, N = _block_graph(g, live, extra=1)
    root = N - 1
    sc = (np.arange(size)[:, None] * g.n + seed_idx[None, :]).ravel()
    rows = np.concatenate([rows, np.full(len(sc), root)])
    cols = np.concatenate([cols, sc])
    mat = sp.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(N, N))
    order = breadth_first_order(mat, root, directed=True, return_predecessors=False)
    order = order[order != root]
    return np.bincount(order // g.n, minlength=size)


def _reach_from_labels(labels, sizes, seed_idx):
    if len(seed_idx) == 0:
        return np.zeros(labels.shape[0], dtype=np.int64)
    s = np.sort(labels[:, seed_idx], axis=1)
    first = np.ones(s.shape, dtype=bool)
    first[:, 1:] = s[:, 1:] != s[:, :-1]
    return (sizes[s] * first).sum(axis=1)


class ReachEstimator:
    """Shared live-edge samples for evaluating many seed sets.

    Every seed set is scored on the same ``config.reps`` samples, so
    comparisons between sets are not blurred by independent noise.
    """

    def __init__(self, graph: CascadeGraph, reps: int, seed: int):
        self.graph = graph
        self.reps = reps
        self.live = []
        for size, rng in _blocks(reps, seed):
            u = rng.random((size, len(graph.src)))
            self.live.append(u < graph.prob[None, :])
        if not graph.directed:
            labels, sizes, offset = [], [], 0
            for live in self.live:
                L, S = _components(graph, live)
                labels.append(L + offset)
                sizes.append(S)
                offset += len(S)
            self.labels = np.vstack(labels)
            self.sizes = np.concatenate(sizes)

    def counts(self, seed_idx: np.ndarray) -> np.ndarray:
        """Number of activated nodes in each replication."""
        seed_idx = np.asarray(seed_idx, dtype=np.int64)
        if not self.graph.directed:
            return _reach_from_labels(self.labels, self.sizes, seed_idx)
        return np.concatenate([_reach_directed(self.graph, live, seed_idx) for live in self.live])

    def mean_reach(self, seed_idx) -> float:
        return float(self.counts(seed_idx).mean() / self.graph.n)

    def greedy(self, k: int):
        """Greedy seed indices with per-round marginal gains (as proportions)."""
        n = self.graph.n
        chosen, gains = [], []
        if not self.graph.directed:
            covered = np.zeros(len(self.sizes), dtype=bool)
            for _ in range(k):
                gain = (self.sizes[self.labels] * ~covered[self.labels]).sum(axis=0)
                gain[chosen] = -1
                v = int(np.argmax(gain))
                chosen.append(v)
                gains.append(gain[v] / (self.reps * n))
                covered[self.labels[:, v]] = True
            return chosen, gains
        base = 0
        for _ in range(k):
            best, best_total = -1, -1
            for v in range(n):
                if v in chosen:
                    continue
                total = int(self.counts(np.array(chosen + [v])).sum())
                if total > best_total:
                    best, best_total = v, total
            chosen.append(best)
            gains.append((best_total - base) / (self.reps * n))
            base = best_total
        return chosen, gains


def _result(counts, n):
    reach = counts / n
    return CascadeResult(float(reach.mean()), float(reach.std()), reach, n)


def independent_cascade(target, seeds: Iterable[Hashable] | SeedSet, config: CascadeConfig,
                        partition: HouseholdPartition | None = None) -> CascadeResult:
    """Reach distribution (proportion of nodes activated) of a seed set."""
    if isinstance(seeds, SeedSet):
        seeds = seeds.nodes
    g = cascade_graph(target, config, partition)
    idx = g.indices(seeds)
    if len(idx) == 0:
        raise ValidationError("seed set is empty")
    return _result(ReachEstimator(g, config.reps, config.seed).counts(idx), g.n)


def greedy_seed_selection(target, k: int, config: CascadeConfig,
                          partition: HouseholdPartition | None = None,
                          level: str | None = None) -> SeedSet:
    """Greedy influence maximization on shared live-edge samples.

    Each round adds the node with the largest gain in mean reach; ties go to
    the smallest node id.
    """
    g = cascade_graph(target, config, partition)
    if not 1 <= k <= g.n:
        raise ValidationError(f"K={k} must lie in [1, {g.n}]")
    est = ReachEstimator(g, config.reps, config.seed)
    chosen, gains = est.greedy(k)
    if level is None:
        level = "household" if isinstance(target, HouseholdNetwork) else "individual"
    return SeedSet(tuple(g.nodes[i] for i in chosen), k, level,
                   est.mean_reach(np.array(chosen)), tuple(float(x) for x in gains))


def _ids(s):
    return s.nodes if isinstance(s, SeedSet) else tuple(s)


def compare_seed_sets(individual_seeds, household_seeds, partition: HouseholdPartition) -> dict:
    """Overlap between household seeds and the households of individual seeds."""
    s_h = set(_ids(household_seeds))
    unknown = [h for h in s_h if h not in partition.households]
    if unknown:
        raise ValidationError("household seeds not in the partition", [repr(h) for h in unknown])
    s_ih = map_individuals_to_households(_ids(individual_seeds), partition)
    overlap = s_ih & s_h
    return {"overlap": len(overlap),
            "proportion": len(overlap) / len(s_h) if s_h else None,
            "mapped_individual_seeds": list(sorted_ids(s_ih)),
            "household_seeds": list(sorted_ids(s_h)),
            "shared": list(sorted_ids(overlap))}


def cross_evaluate(individual_seeds, household_seeds, individual, household: HouseholdNetwork,
                   partition: HouseholdPartition, config: CascadeConfig,
                   inclusion: float | None = None, mapping_seed: int | None = None) -> dict:
    """Score both seed sets on both networks.

    On the individual network: S_i and S_h mapped to a random subset of
    members (each included with ``inclusion``, default ``config.intra``). On
    the household network: S_h and the households of S_i. Both seed sets on a
    given network share live-edge samples. Households whose mapped subset came
    out empty are listed; an entirely empty mapped set scores zero reach.
    """
    if set(household.nodes) != set(partition.ids):
        raise ValidationError("household network and partition have different household ids")
    s_i = _ids(individual_seeds)
    s_h = _ids(household_seeds)
    inclusion = config.intra if inclusion is None else inclusion
    mapping_seed = config.seed if mapping_seed is None else mapping_seed
    s_ih = map_individuals_to_households(s_i, partition)
    s_hi = map_households_to_individuals(s_h, partition, inclusion, mapping_seed)
    empty = [h for h in sorted_ids(set(s_h)) if not (partition.households[h] & s_hi)]

    g_ind = cascade_graph(individual, config, partition)
    g_hh = cascade_graph(household, config)
    est_ind = ReachEstimator(g_ind, config.reps, config.seed)
    est_hh = ReachEstimator(g_hh, config.reps, config.seed)
    reach = {
        ("individual", "S_i"): est_ind.mean_reach(g_ind.indices(s_i)),
        ("individual", "S_h->i"): est_ind.mean_reach(g_ind.indices(s_hi)),
        ("household", "S_h"): est_hh.mean_reach(g_hh.indices(s_h)),
        ("household", "S_i->h"): est_hh.mean_reach(g_hh.indices(s_ih)),
    }
    return {
        "reach": [{"network": net, "seed_set": name, "mean_reach": val}
                  for (net, name), val in reach.items()],
        "difference_individual": reach[("individual", "S_i")] - reach[("individual", "S_h->i")],
        "difference_household": reach[("household", "S_h")] - reach[("household", "S_i->h")],
        "S_i": list(s_i), "S_h": list(s_h),
        "S_i->h": list(sorted_ids(s_ih)), "S_h->i": list(sorted_ids(s_hi)),
        "empty_mapped_households": list(empty),
        "params": {"q": config.q, "intra": config.intra, "reps": config.reps,
                   "seed": config.seed, "inclusion": inclusion, "mapping_seed": mapping_seed},
    }


def coupled_household_cascades(network: IndividualNetwork, partition: HouseholdPartition,
                               household: HouseholdNetwork, seeds: Iterable[Hashable],
                               q: float, reps: int, seed: int = 0):
    """Run cascades on both representations with intrahousehold transmission
    certain, sharing randomness between them.

    Each individual cross edge draws one uniform. A household edge is live
    when any of the member-level edges it was built from is live, so it is
    live with probability ``q`` exactly when one member-level edge underlies
    it. Returns, per replication, the households activated on each side.
    """
    if network.directed:
        raise ValidationError("coupled cascades are defined for undirected networks")
    config = CascadeConfig(q=q, intra=1.0, reps=reps, seed=seed)
    g = cascade_graph(network, config, partition)
    hpos = {h: i for i, h in enumerate(household.nodes)}
    member_hh = np.array([hpos[partition.household_of(v)] for v in g.nodes])
    hs, ht = member_hh[g.src], member_hh[g.dst]
    cross = np.nonzero(hs != ht)[0]
    pairs = {}
    for e in cross:
        key = (min(hs[e], ht[e]), max(hs[e], ht[e]))
        pairs.setdefault(key, []).append(e)
    hh_pairs = {(min(household.index[u], household.index[v]), max(household.index[u], household.index[v]))
                for u, v, _ in household.edges}
    if hh_pairs != set(pairs):
        raise ValidationError("household network is not the basic contraction of the network")
    keys = sorted(pairs)
    inc = sp.lil_matrix((len(g.src), len(keys)), dtype=np.int8)
    for j, key in enumerate(keys):
        for e in pairs[key]:
            inc[e, j] = 1
    inc = inc.tocsr()
    hg = CascadeGraph(household.nodes, np.array([k[0] for k in keys], dtype=np.int64),
                      np.array([k[1] for k in keys], dtype=np.int64), np.full(len(keys), q))
    seed_idx = g.indices(seeds)
    hh_seed = np.array(sorted({member_hh[i] for i in seed_idx}), dtype=np.int64)

    ind_sets, hh_sets = [], []
    for size, rng in _blocks(reps, seed):
        live = rng.random((size, len(g.src))) < g.prob[None, :]
        L, _ = _components(g, live)
        hh_live = (sp.csr_matrix(live.astype(np.int8)) @ inc).toarray() > 0
        HL, _ = _components(hg, hh_live)
        for r in range(size):
            on = np.isin(L[r], L[r, seed_idx])
            ind_sets.append(frozenset(household.nodes[i] for i in np.unique(member_hh[on])))
            hon = np.isin(HL[r], HL[r, hh_seed])
            hh_sets.append(frozenset(household.nodes[i] for i in np.nonzero(hon)[0]))
    return ind_sets, hh_sets


@dataclass(frozen=True)
class DiffusionCentralityConfig:
    w: np.ndarray
    T: int

    def __post_init__(self):
        w = self.w.toarray() if sp.issparse(self.w) else np.asarray(self.w, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValidationError(f"w must be square, got shape {w.shape}")
        if int(self.T) != self.T or self.T < 1:
            raise ValidationError(f"T must be a positive integer, got {self.T!r}")
        if w.size and (w.min() < 0 or w.max() > 1):
            raise ValidationError("entries of w must lie in [0, 1]")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "T", int(self.T))


def diffusion_centrality(w, T: int) -> np.ndarray:
    """sum_{t=1..T} w^t 1, accumulated with one matrix-vector product per step."""
    cfg = w if isinstance(w, DiffusionCentralityConfig) else DiffusionCentralityConfig(w, T)
    v = cfg.w.sum(axis=1)          # w 1: the row sums, exactly
    total = v.copy()
    for _ in range(cfg.T - 1):
        v = cfg.w @ v
        total += v
    return total


def _dc_matrix(net, share):
    a = net.adjacency()
    a = (a != 0).astype(float) if net.directed else net.skeleton().astype(float)
    return a * share


def largest_component(net) -> tuple:
    """Node ids of the largest (weakly) connected component; ties go to the
    component holding the smallest id."""
    if net.n == 0:
        return ()
    k, labels = connected_components(net.skeleton(), directed=False)
    sizes = np.bincount(labels, minlength=k)
    best = max(range(k), key=lambda c: (sizes[c], -np.nonzero(labels == c)[0][0]))
    return tuple(net.nodes[i] for i in np.nonzero(labels == best)[0])


def default_horizon(net) -> int:
    """Diameter of the largest component, at least 1."""
    comp = largest_component(net)
    if len(comp) <= 1:
        return 1
    idx = [net.index[v] for v in comp]
    d = shortest_path(net.skeleton()[idx][:, idx], unweighted=True, directed=False)
    return max(1, int(d[np.isfinite(d)].max()))


def network_dc(net, T: int | None = None, share: float = 1.0) -> dict:
    """Diffusion centrality of every node of a network, keyed by node id."""
    T = default_horizon(net) if T is None else T
    dc = diffusion_centrality(_dc_matrix(net, share), T)
    return dict(zip(net.nodes, dc.tolist()))


def _corr_or_none(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if len(x) < 3 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    return float(np.corrcoef(x, y)[0, 1])


def gendered_dc_correlation(household: HouseholdNetwork, ff: HouseholdNetwork,
                            mm: HouseholdNetwork, T: int | None = None,
                            share: float = 1.0) -> dict:
    """Pearson correlations between diffusion centralities on the household
    network and its two same-gender variants.

    Each network's centrality is computed on its own largest component, and
    the correlations run over households present in all three components.
    """
    if not (set(household.nodes) == set(ff.nodes) == set(mm.nodes)):
        raise ValidationError("networks do not share a household id set")
    if T is None:
        T = default_horizon(household)
    vecs, comps = {}, {}
    for name, net in (("B", household), ("B_FF", ff), ("B_MM", mm)):
        comp = largest_component(net)
        comps[name] = set(comp)
        vecs[name] = network_dc(net.subgraph(comp), T, share)
    common = sorted_ids(comps["B"] & comps["B_FF"] & comps["B_MM"])
    if not common:
        raise DegeneracyError("the three largest components share no household")
    cols = {name: [vecs[name][h] for h in common] for name in vecs}
    return {
        "corr_B_FF": _corr_or_none(cols["B"], cols["B_FF"]),
        "corr_B_MM": _corr_or_none(cols["B"], cols["B_MM"]),
        "corr_FF_MM": _corr_or_none(cols["B_FF"], cols["B_MM"]),
        "T": T, "share": share, "households": list(common),
        "dc": cols,
    }
