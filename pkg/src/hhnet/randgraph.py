"""Erdős–Rényi graphs with random households, and checks of how contraction
changes their edge probabilities."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from hhnet.contraction import contract_basic
from hhnet.errors import ValidationError
from hhnet.graph import (Edge, HouseholdPartition, IndividualNetwork, NetworkBundle,
                         NodeAttributes, PersonAttributes)


@dataclass(frozen=True)
class ErConfig:
    n: int
    p: float
    seed: int | Sequence[int] = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError(f"p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class HouseholdSizeSpec:
    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or min(sizes) < 1:
            raise ValidationError("household sizes must all be >= 1")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def equal(cls, R: int, size: int) -> HouseholdSizeSpec:
        return cls((size,) * R)

    @classmethod
    def cycling(cls, n: int, pattern: Sequence[int]) -> HouseholdSizeSpec:
        """Repeat ``pattern`` until the sizes add up to ``n`` exactly."""
        sizes, total = [], 0
        for s in itertools.cycle(pattern):
            if total >= n:
                break
            sizes.append(s)
            total += s
        if total != n:
            raise ValidationError(f"repeating sizes {tuple(pattern)} cannot add up to n={n}")
        return cls(tuple(sizes))

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def R(self) -> int:
        return len(self.sizes)


def generate_er(config: ErConfig) -> IndividualNetwork:
    """G(n, p) on nodes 0..n-1."""
    rng = np.random.default_rng(config.seed)
    iu, ju = np.triu_indices(config.n, k=1)
    keep = rng.random(len(iu)) < config.p
    edges = tuple(Edge(int(i), int(j)) for i, j in zip(iu[keep], ju[keep]))
    return IndividualNetwork(tuple(range(config.n)), edges)


def random_partition(n: int, spec: HouseholdSizeSpec | Sequence[int], seed=0) -> HouseholdPartition:
    """Assign nodes 0..n-1 uniformly at random to households 0..R-1 with the
    given sizes."""
    if not isinstance(spec, HouseholdSizeSpec):
        spec = HouseholdSizeSpec(tuple(spec))
    if spec.n != n:
        raise ValidationError(f"household sizes add up to {spec.n}, expected n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    bounds = np.cumsum((0,) + spec.sizes)
    return HouseholdPartition({r: frozenset(int(v) for v in perm[bounds[r]:bounds[r + 1]])
                               for r in range(spec.R)})


def contracted_edge_probability(p: float, size_q: int, size_r: int) -> float:
    """Chance that two households of the given sizes are adjacent after
    contracting G(n, p): 1 - (1 - p)^(size_q * size_r)."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    if size_q < 1 or size_r < 1:
        raise ValidationError("household sizes must be >= 1")
    return 1.0 - (1.0 - p) ** (size_q * size_r)


def expected_household_degree(p: float, sizes: Sequence[int], k: int) -> float:
    """Expected degree of household ``k`` (0-based) in the contracted graph."""
    if not 0 <= k < len(sizes):
        raise ValidationError(f"household index {k} out of range for {len(sizes)} households")
    return sum(contracted_edge_probability(p, sizes[k], s) for j, s in enumerate(sizes) if j != k)


def _z(observed, expected, se):
    if se == 0:
        return 0.0 if observed == expected else float("inf")
    return (observed - expected) / se


def verify_contraction_distribution(config: ErConfig, spec: HouseholdSizeSpec, draws: int,
                                    z_threshold: float = 4.0,
                                    degree_threshold: float = 3.0) -> dict:
    """Monte Carlo check of contracted edge probabilities and expected degrees.

    The household partition is drawn once and held fixed; only the graph is
    redrawn. Draw ``d`` uses the stream keyed by ``(seed, 1, d)`` and the
    partition the stream ``(seed, 0)``.
    """
    if draws < 100:
        raise ValidationError(f"draws must be >= 100, got {draws}")
    if spec.n != config.n:
        raise ValidationError(f"household sizes add up to {spec.n}, expected n={config.n}")
    seed = list(np.atleast_1d(config.seed).astype(int))
    partition = random_partition(config.n, spec, seed + [0])
    sizes = spec.sizes
    R = spec.R
    counts = np.zeros((R, R), dtype=np.int64)
    for d in range(draws):
        g = generate_er(ErConfig(config.n, config.p, seed + [1, d]))
        for u, v, _ in contract_basic(g, partition).edges:
            counts[u, v] += 1
    counts = counts + counts.T

    pairs = []
    for q in range(R):
        for r in range(q + 1, R):
            theo = contracted_edge_probability(config.p, sizes[q], sizes[r])
            emp = counts[q, r] / draws
            se = np.sqrt(theo * (1 - theo) / draws)
            pairs.append({"q": q, "r": r, "size_q": sizes[q], "size_r": sizes[r],
                          "count": int(counts[q, r]), "empirical": emp,
                          "theoretical": theo, "z": _z(emp, theo, se)})
    degrees = []
    for k in range(R):
        probs = np.array([contracted_edge_probability(config.p, sizes[k], sizes[j])
                          for j in range(R) if j != k])
        theo = float(probs.sum())
        emp = counts[k].sum() / draws
        se = np.sqrt((probs * (1 - probs)).sum() / draws)
        degrees.append({"household": k, "size": sizes[k], "empirical_mean_degree": emp,
                        "expected_degree": theo, "z": _z(emp, theo, se)})

    classes = {}
    for pr in pairs:
        key = tuple(sorted((pr["size_q"], pr["size_r"])))
        classes.setdefault(key, pr["theoretical"])
    max_pair_z = max((abs(pr["z"]) for pr in pairs), default=0.0)
    max_degree_z = max(abs(dg["z"]) for dg in degrees)
    return {
        "n": config.n, "p": config.p, "seed": config.seed, "draws": draws,
        "sizes": list(sizes), "partition": {str(h): sorted(m) for h, m in partition.households.items()},
        "probability_classes": [{"sizes": list(k), "probability": v} for k, v in sorted(classes.items())],
        "pairs": pairs, "degrees": degrees,
        "max_abs_pair_z": max_pair_z, "max_abs_degree_z": max_degree_z,
        "z_threshold": z_threshold, "degree_threshold": degree_threshold,
        "pass": bool(max_pair_z < z_threshold and max_degree_z < degree_threshold),
        "note": (f"{len(pairs)} pair tests and {R} degree tests share one threshold each; "
                 f"a Bonferroni-style bound at {z_threshold} sigma keeps the family-wise "
                 "false alarm rate small"),
    }


def homogeneity_test(report: dict, alpha: float = 0.01) -> list[dict]:
    """Chi-square tests, per probability class, that every household pair in
    the class has the same edge frequency (contingency test) and that this
    frequency is the theoretical one (goodness of fit)."""
    draws = report["draws"]
    out = []
    for cls in report["probability_classes"]:
        key = tuple(cls["sizes"])
        members = [pr for pr in report["pairs"] if tuple(sorted((pr["size_q"], pr["size_r"]))) == key]
        obs = np.array([pr["count"] for pr in members], dtype=float)
        theo = cls["probability"]
        row = {"sizes": list(key), "probability": theo, "pairs": len(members),
               "pooled_frequency": float(obs.sum() / (draws * len(members)))}
        if len(members) >= 2 and 0 < obs.sum() < draws * len(members):
            table = np.vstack([obs, draws - obs])
            chi2, pval, dof, _ = stats.chi2_contingency(table, correction=False)
            row.update(homogeneity_chi2=float(chi2), homogeneity_dof=int(dof),
                       homogeneity_pvalue=float(pval))
        else:
            row.update(homogeneity_chi2=0.0, homogeneity_dof=max(len(members) - 1, 0),
                       homogeneity_pvalue=1.0)
        if 0 < theo < 1:
            gof = float((((obs - draws * theo) ** 2) / (draws * theo * (1 - theo))).sum())
            row.update(gof_chi2=gof, gof_dof=len(members),
                       gof_pvalue=float(stats.chi2.sf(gof, len(members))))
        else:
            exact = bool(np.all(obs == draws * theo))
            row.update(gof_chi2=0.0 if exact else float("inf"), gof_dof=len(members),
                       gof_pvalue=1.0 if exact else 0.0)
        row["reject"] = bool(row["homogeneity_pvalue"] < alpha or row["gof_pvalue"] < alpha)
        out.append(row)
    return out


def clique_of_cliques(sizes: Sequence[int] = (5,) * 8, cross_degree: float = 1.0,
                      activity_shape: float | None = 2.0, seed=0,
                      genders: Sequence[str] = ("F", "M")) -> NetworkBundle:
    """Households as complete subgraphs joined by sparse member-level edges.

    Cross-household edges average ``cross_degree`` per person. With
    ``activity_shape`` set, each person gets a Pareto(shape) + 1 activity and a
    cross pair (i, j) is linked with probability proportional to the product of
    activities, so a few members carry most outside ties. With
    ``activity_shape=None`` every cross pair is equally likely. Genders are
    assigned alternately within each household.
    """
    rng = np.random.default_rng(seed)
    owner, people, v = {}, {}, 0
    for h, size in enumerate(sizes):
        for m in range(size):
            owner[v] = h
            people[v] = PersonAttributes(h, genders[m % len(genders)])
            v += 1
    n = v
    iu, ju = np.triu_indices(n, k=1)
    hh = np.array([owner[i] for i in range(n)])
    cross = hh[iu] != hh[ju]
    if activity_shape is None:
        act = np.ones(n)
    else:
        act = rng.pareto(activity_shape, n) + 1.0
    raw = act[iu] * act[ju]
    scale = cross_degree * n / 2.0 / raw[cross].sum() if cross.any() else 0.0
    draw = rng.random(len(iu)) < np.minimum(1.0, scale * raw)
    keep = ~cross | (cross & draw)
    edges = tuple(Edge(int(i), int(j)) for i, j in zip(iu[keep], ju[keep]))
    network = IndividualNetwork(tuple(range(n)), edges)
    return NetworkBundle(network, NodeAttributes(people, frozenset(genders)),
                         HouseholdPartition.from_assignment(owner))
