"""Brute-force reference implementations used by the tests.

Each oracle follows the textbook definition as literally as possible, in
plain Python, and shares no code with the package.
"""

from __future__ import annotations

import itertools
import math
import random
import statistics
from collections import defaultdict, deque


def simple_edges(edges):
    """Undirected simple edge set {frozenset({u, v})} from (u, v) pairs."""
    return {frozenset((u, v)) for u, v in edges if u != v}


def degrees(nodes, es):
    deg = {v: 0 for v in nodes}
    for e in es:
        for v in e:
            deg[v] += 1
    return deg


def assortativity(nodes, edges):
    """Newman's closed form over undirected edges; None if the denominator
    vanishes, 'degenerate' if there are no edges."""
    es = simple_edges(edges)
    if not es:
        return "degenerate"
    deg = degrees(nodes, es)
    M = len(es)
    pairs = [tuple(deg[v] for v in e) for e in es]
    s_prod = math.fsum(j * k for j, k in pairs) / M
    s_half = math.fsum(0.5 * (j + k) for j, k in pairs) / M
    s_sq = math.fsum(0.5 * (j * j + k * k) for j, k in pairs) / M
    den = s_sq - s_half ** 2
    if abs(den) < 1e-12:
        return None
    return (s_prod - s_half ** 2) / den


def inversity(nodes, edges):
    """corr(deg(i), 1/deg(j)) over both orientations of each edge."""
    es = simple_edges(edges)
    if not es:
        return "degenerate"
    deg = degrees(nodes, es)
    xs, ys = [], []
    for e in es:
        u, v = tuple(e)
        for a, b in ((u, v), (v, u)):
            xs.append(float(deg[a]))
            ys.append(1.0 / deg[b])
    try:
        return statistics.correlation(xs, ys)
    except statistics.StatisticsError:
        return None


def local_clustering(nodes, edges):
    es = simple_edges(edges)
    nbrs = {v: set() for v in nodes}
    for e in es:
        u, v = tuple(e)
        nbrs[u].add(v)
        nbrs[v].add(u)
    out = {}
    for v in nodes:
        k = len(nbrs[v])
        if k < 2:
            out[v] = 0.0
            continue
        links = sum(1 for a, b in itertools.combinations(sorted(nbrs[v]), 2) if b in nbrs[a])
        out[v] = links / (k * (k - 1) / 2)
    return out


def average_clustering(nodes, edges):
    c = local_clustering(nodes, edges)
    return math.fsum(c.values()) / len(c)


# ------------------------------------------------------------- contraction

def canon(u, v, directed):
    return (u, v) if directed else tuple(sorted((u, v), key=lambda x: (isinstance(x, str), x)))


def contract_basic(edges, owner, directed=False):
    """edges: iterable of (source, target, layer, weight)."""
    return {canon(owner[s], owner[t], directed) for s, t, *_ in edges if owner[s] != owner[t]}


def contract_weighted(edges, owner, directed=False):
    out = defaultdict(float)
    for s, t, _, w in edges:
        if owner[s] != owner[t]:
            out[canon(owner[s], owner[t], directed)] += w
    return dict(out)


def contract_normalized(edges, owner, households, directed=False):
    """Share of H_i's members with an edge into H_j; averaged over the two
    directions for undirected output."""
    linked = set()
    for s, t, *_ in edges:
        linked.add((s, t))
        if not directed:
            linked.add((t, s))
    share = {}
    for hi, mi in households.items():
        for hj, mj in households.items():
            if hi == hj:
                continue
            hits = [a for a in mi if any((a, b) in linked for b in mj)]
            if hits:
                share[(hi, hj)] = len(hits) / len(mi)
    if directed:
        return share
    out = defaultdict(float)
    for (hi, hj), w in share.items():
        out[canon(hi, hj, False)] += w / 2.0
    return dict(out)


def contract_gendered(edges, owner, gender, a, directed=False):
    return contract_basic([e for e in edges if gender[e[0]] == a and gender[e[1]] == a],
                          owner, directed)


def contract_layered(edges, owner, layers, directed=False):
    return contract_basic([e for e in edges if e[2] in layers], owner, directed)


# ----------------------------------------------------------------- cascades

def sequential_cascade(nodes, arcs, seeds, rng: random.Random):
    """Literal independent cascade: each newly active node gets one attempt
    per out-arc, succeeding with the arc's probability.

    arcs: dict node -> list of (neighbour, probability); for undirected
    graphs list each edge in both directions.
    """
    active = set(seeds)
    frontier = deque(sorted(active))
    while frontier:
        u = frontier.popleft()
        for v, p in arcs.get(u, ()):
            if v not in active and rng.random() < p:
                active.add(v)
                frontier.append(v)
    return len(active) / len(nodes)


def exact_reach(nodes, edge_probs, seeds, directed=False):
    """Expected reach by enumerating every live-edge subgraph.

    edge_probs: list of ((u, v), p). Exponential; keep the edge count small.
    """
    total = 0.0
    m = len(edge_probs)
    for mask in range(1 << m):
        weight = 1.0
        adj = defaultdict(list)
        for k, ((u, v), p) in enumerate(edge_probs):
            if mask >> k & 1:
                weight *= p
                adj[u].append(v)
                if not directed:
                    adj[v].append(u)
            else:
                weight *= 1 - p
        if weight == 0:
            continue
        seen = set(seeds)
        stack = list(seeds)
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        total += weight * len(seen) / len(nodes)
    return total


# ---------------------------------------------------------------------- DC

def dc_by_powers(w, T):
    """sum_{t=1..T} (w^t) 1 via explicit dense matrix powers."""
    import numpy as np

    w = np.asarray(w, dtype=float)
    total = np.zeros(w.shape[0])
    for t in range(1, T + 1):
        total += np.linalg.matrix_power(w, t) @ np.ones(w.shape[0])
    return total
