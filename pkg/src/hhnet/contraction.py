"""Household contraction rules: individual network + partition -> household network."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from hhnet.errors import ValidationError
from hhnet.graph import (HouseholdPartition, IndividualNetwork, NodeAttributes,
                         id_key, sorted_ids)


@dataclass(frozen=True)
class HouseholdNetwork:
    """Contracted graph over household ids.

    ``edges`` holds ``(u, v, weight)`` triples; undirected edges are stored
    once with ``u`` before ``v`` in id order. ``provenance`` records the rule
    and parameters that produced the network.
    """

    nodes: tuple
    edges: tuple
    directed: bool
    provenance: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not self.provenance or "rule" not in self.provenance:
            raise ValidationError("household network needs a provenance record with a rule name")
        nodes = sorted_ids(self.nodes)
        node_set = set(nodes)
        problems = []
        seen = set()
        edges = []
        for u, v, w in self.edges:
            if u not in node_set or v not in node_set:
                problems.append(f"edge ({u!r}, {v!r}) references an unknown household")
                continue
            if u == v:
                problems.append(f"self-loop on household {u!r}")
                continue
            if not self.directed and id_key(v) < id_key(u):
                u, v = v, u
            if (u, v) in seen:
                problems.append(f"duplicate household edge ({u!r}, {v!r})")
                continue
            seen.add((u, v))
            edges.append((u, v, float(w)))
        if problems:
            raise ValidationError("invalid household network", problems)
        edges.sort(key=lambda e: (id_key(e[0]), id_key(e[1])))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def rule(self) -> str:
        return self.provenance["rule"]

    @cached_property
    def index(self) -> dict:
        return {h: i for i, h in enumerate(self.nodes)}

    def edge_set(self) -> set:
        return {(u, v) for u, v, _ in self.edges}

    def weights(self) -> dict:
        return {(u, v): w for u, v, w in self.edges}

    def adjacency(self) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for u, v, w in self.edges:
            i, j = self.index[u], self.index[v]
            rows.append(i)
            cols.append(j)
            vals.append(w)
            if not self.directed:
                rows.append(j)
                cols.append(i)
                vals.append(w)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n), dtype=float)

    def skeleton(self) -> sp.csr_matrix:
        a = self.adjacency()
        a = ((a + a.T) != 0).astype(np.int8)
        a.setdiag(0)
        a.eliminate_zeros()
        return a.tocsr()

    def subgraph(self, keep: Iterable[Hashable]) -> HouseholdNetwork:
        keep = set(keep)
        prov = dict(self.provenance)
        prov["subgraph_of"] = len(self.nodes)
        return HouseholdNetwork(tuple(h for h in self.nodes if h in keep),
                                tuple(e for e in self.edges if e[0] in keep and e[1] in keep),
                                self.directed, prov)


@dataclass(frozen=True)
class GenderedPair:
    """Same-gender pairing ``gender <-> gender`` used by the gendered rule."""

    gender: str

    @property
    def tag(self) -> str:
        return f"{self.gender}{self.gender}"


def _cross_arcs(network, partition, edges=None):
    """Yield (household of source, household of target, source, target, weight)
    for edges whose endpoints live in different households."""
    partition.check_covers(network.nodes)
    for e in network.edges if edges is None else edges:
        hs, ht = partition.household_of(e.source), partition.household_of(e.target)
        if hs != ht:
            yield hs, ht, e.source, e.target, e.weight


def _provenance(rule, **params):
    return {"rule": rule, "params": params}


def _basic_from_edges(network, partition, edges, provenance):
    pairs = {(hs, ht) for hs, ht, *_ in _cross_arcs(network, partition, edges)}
    if not network.directed:
        pairs = {tuple(sorted(p, key=id_key)) for p in pairs}
    return HouseholdNetwork(partition.ids, tuple((u, v, 1.0) for u, v in pairs),
                            network.directed, provenance)


def contract_basic(network: IndividualNetwork, partition: HouseholdPartition) -> HouseholdNetwork:
    """Households are adjacent iff any pair of their members is adjacent."""
    return _basic_from_edges(network, partition, None, _provenance("basic"))


def _weighted_from_edges(network, partition, edges, normalize, directed_output, provenance):
    directed = network.directed or directed_output
    if not normalize:
        total = defaultdict(float)
        for hs, ht, _, _, w in _cross_arcs(network, partition, edges):
            if network.directed:
                total[(hs, ht)] += w
            elif directed_output:
                total[(hs, ht)] += w
                total[(ht, hs)] += w
            else:
                total[tuple(sorted((hs, ht), key=id_key))] += w
        out = total
    else:
        # members of H_i with at least one edge into H_j
        reach = defaultdict(set)
        for hs, ht, s, t, _ in _cross_arcs(network, partition, edges):
            reach[(hs, ht)].add(s)
            if not network.directed:
                reach[(ht, hs)].add(t)
        share = {(hi, hj): len(m) / len(partition.households[hi]) for (hi, hj), m in reach.items()}
        if directed:
            out = share
        else:
            out = {}
            for (hi, hj), w in share.items():
                key = tuple(sorted((hi, hj), key=id_key))
                out[key] = out.get(key, 0.0) + w / 2.0
    return HouseholdNetwork(partition.ids, tuple((u, v, w) for (u, v), w in out.items()),
                            directed, provenance)


def contract_weighted(network: IndividualNetwork, partition: HouseholdPartition,
                      normalize: bool = False, directed_output: bool = False) -> HouseholdNetwork:
    """Household edge weights from the member-level edges between them.

    Un-normalized: the sum of the weights of all cross edges. Normalized: the
    share of H_i's members with at least one edge into H_j. The share is
    one-sided, so an undirected result averages the two directions; pass
    ``directed_output=True`` to keep both arcs.
    """
    return _weighted_from_edges(network, partition, None, normalize, directed_output,
                                _provenance("weighted", normalize=normalize,
                                            directed_output=directed_output))


def contract_gendered(network: IndividualNetwork, partition: HouseholdPartition,
                      attributes: NodeAttributes, pair: GenderedPair | str, *,
                      weighted: bool = False, normalize: bool = False) -> HouseholdNetwork:
    """Keep only cross edges joining two persons of the given gender.

    With ``weighted=True`` the surviving edges are summed (or normalized) as in
    :func:`contract_weighted`.
    """
    if isinstance(pair, str):
        pair = GenderedPair(pair)
    if attributes.genders and pair.gender not in attributes.genders:
        raise ValidationError(f"gender {pair.gender!r} is not a declared category "
                              f"({', '.join(sorted(attributes.genders))})")
    missing = [v for v in network.nodes
               if v not in attributes.people or attributes.people[v].gender is None]
    if missing:
        raise ValidationError("nodes without a gender label", [repr(v) for v in missing])
    a = pair.gender
    edges = [e for e in network.edges
             if attributes.gender(e.source) == a and attributes.gender(e.target) == a]
    prov = _provenance("gendered", gender=a, pair=pair.tag, weighted=weighted, normalize=normalize)
    if weighted:
        return _weighted_from_edges(network, partition, edges, normalize, False, prov)
    return _basic_from_edges(network, partition, edges, prov)


def contract_layered(network: IndividualNetwork, partition: HouseholdPartition,
                     layers: Iterable[str]) -> HouseholdNetwork:
    """Basic contraction restricted to edges in the selected layers."""
    layers = sorted(set(layers))
    if not layers:
        raise ValidationError("layered contraction needs at least one layer")
    unknown = [L for L in layers if L not in network.layers]
    if unknown:
        raise ValidationError("unknown layer(s)", unknown)
    keep = set(layers)
    edges = [e for e in network.edges if e.layer in keep]
    return _basic_from_edges(network, partition, edges, _provenance("layered", layers=layers))


def map_individuals_to_households(seeds: Iterable, partition: HouseholdPartition) -> frozenset:
    return frozenset(partition.household_of(v) for v in seeds)


def map_households_to_individuals(seeds: Iterable, partition: HouseholdPartition,
                                  inclusion: float, seed=None) -> frozenset:
    """Include each member of each seeded household independently with
    probability ``inclusion``. Members are visited in id order so the draw is
    reproducible for a given ``seed``."""
    if not 0.0 <= inclusion <= 1.0:
        raise ValidationError(f"inclusion probability must lie in [0, 1], got {inclusion!r}")
    seeds = sorted_ids(set(seeds))
    unknown = [h for h in seeds if h not in partition.households]
    if unknown:
        raise ValidationError("unknown household(s)", [repr(h) for h in unknown])
    members = [v for h in seeds for v in sorted_ids(partition.households[h])]
    rng = np.random.default_rng(seed)
    keep = rng.random(len(members)) < inclusion
    return frozenset(v for v, k in zip(members, keep) if k)
