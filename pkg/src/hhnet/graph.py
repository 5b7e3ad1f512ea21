"""Attributed individual networks, household partitions and the intra/extra
household adjacency decomposition."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping, NamedTuple

import numpy as np
import scipy.sparse as sp

from hhnet.errors import ValidationError

DEFAULT_LAYER = "default"
UNION_LAYER = "union"

_TRUTHY = {"1", "true", "yes", "y", "t"}


def id_key(x):
    """Sort key giving a total order over int and str ids (ints first)."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return (0, int(x), "")
    return (1, 0, str(x))


def sorted_ids(ids: Iterable[Hashable]) -> tuple:
    return tuple(sorted(ids, key=id_key))


@dataclass(frozen=True)
class Edge:
    source: Hashable
    target: Hashable
    layer: str = DEFAULT_LAYER
    weight: float = 1.0


@dataclass(frozen=True)
class IndividualNetwork:
    """Person-level graph, optionally multilayer, weighted or directed.

    Undirected edges are stored once with endpoints in id order. Two records
    for the same pair in different layers are kept as distinct edges; use
    :meth:`flatten` to take the union of layers.
    """

    nodes: tuple
    edges: tuple = ()
    directed: bool = False
    layers: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        nodes = sorted_ids(set(self.nodes))
        if len(nodes) != len(self.nodes):
            raise ValidationError("duplicate node ids")
        object.__setattr__(self, "nodes", nodes)
        node_set = set(nodes)
        problems = []
        edges = []
        seen = set()
        for e in self.edges:
            if not isinstance(e, Edge):
                e = Edge(*e)
            s, t = e.source, e.target
            missing = [x for x in (s, t) if x not in node_set]
            if missing:
                problems.append(f"edge ({s!r}, {t!r}) references unknown node(s) {', '.join(map(repr, missing))}")
                continue
            if s == t:
                problems.append(f"self-loop on node {s!r}")
                continue
            w = float(e.weight)
            if not np.isfinite(w) or w < 0:
                problems.append(f"edge ({s!r}, {t!r}) has invalid weight {e.weight!r}")
                continue
            if not self.directed and id_key(t) < id_key(s):
                s, t = t, s
            layer = str(e.layer)
            if (s, t, layer) in seen:
                problems.append(f"duplicate edge ({s!r}, {t!r}) in layer {layer!r}")
                continue
            seen.add((s, t, layer))
            edges.append(Edge(s, t, layer, w))
        if problems:
            raise ValidationError("invalid network", problems)
        object.__setattr__(self, "edges", tuple(edges))
        layers = dict(self.layers)
        for e in edges:
            layers.setdefault(e.layer, e.layer)
        object.__setattr__(self, "layers", layers)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.nodes)}

    def adjacency(self, layers: Iterable[str] | None = None) -> sp.csr_matrix:
        """Weighted adjacency, summing weights across the selected layers.

        Undirected networks give a symmetric matrix.
        """
        keep = None if layers is None else set(layers)
        rows, cols, vals = [], [], []
        for e in self.edges:
            if keep is not None and e.layer not in keep:
                continue
            i, j = self.index[e.source], self.index[e.target]
            rows.append(i)
            cols.append(j)
            vals.append(e.weight)
            if not self.directed:
                rows.append(j)
                cols.append(i)
                vals.append(e.weight)
        a = sp.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n), dtype=float)
        a.sum_duplicates()
        return a

    def skeleton(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency of the flattened, undirected simple graph."""
        a = self.adjacency()
        a = ((a + a.T) != 0).astype(np.int8)
        a.setdiag(0)
        a.eliminate_zeros()
        return a.tocsr()

    def flatten(self) -> IndividualNetwork:
        """Union of all layers as a single unit-weight layer."""
        pairs = sorted({(e.source, e.target) for e in self.edges},
                       key=lambda p: (id_key(p[0]), id_key(p[1])))
        return IndividualNetwork(self.nodes, tuple(Edge(s, t, UNION_LAYER, 1.0) for s, t in pairs),
                                 self.directed, {UNION_LAYER: "union of " + ", ".join(sorted(self.layers))})

    def select_layers(self, layers: Iterable[str]) -> IndividualNetwork:
        layers = set(layers)
        unknown = layers - set(self.layers)
        if unknown:
            raise ValidationError("unknown layer(s)", sorted(unknown))
        return IndividualNetwork(self.nodes, tuple(e for e in self.edges if e.layer in layers),
                                 self.directed, {k: v for k, v in self.layers.items() if k in layers})


@dataclass(frozen=True)
class PersonAttributes:
    household: Hashable
    gender: str | None = None
    roles: frozenset = frozenset()


@dataclass(frozen=True)
class NodeAttributes:
    """Per-person household id, gender label and role flags."""

    people: Mapping[Hashable, PersonAttributes]
    genders: frozenset = frozenset()

    def __post_init__(self):
        observed = {a.gender for a in self.people.values() if a.gender is not None}
        if not self.genders:
            object.__setattr__(self, "genders", frozenset(observed))
        else:
            undeclared = observed - set(self.genders)
            if undeclared:
                raise ValidationError("gender labels outside the declared categories", sorted(undeclared))

    def gender(self, person):
        return self.people[person].gender

    def with_role(self, role: str) -> set:
        return {p for p, a in self.people.items() if role in a.roles}


@dataclass(frozen=True)
class HouseholdPartition:
    """Strict partition of persons into households."""

    households: Mapping[Hashable, frozenset]

    def __post_init__(self):
        hh = {h: frozenset(m) for h, m in self.households.items()}
        owner = {}
        problems = []
        for h in sorted_ids(hh):
            if not hh[h]:
                problems.append(f"household {h!r} is empty")
            for p in hh[h]:
                if p in owner:
                    problems.append(f"person {p!r} is in households {owner[p]!r} and {h!r}")
                owner[p] = h
        if problems:
            raise ValidationError("invalid household partition", problems)
        object.__setattr__(self, "households", {h: hh[h] for h in sorted_ids(hh)})
        object.__setattr__(self, "_owner", owner)

    @classmethod
    def from_assignment(cls, assignment: Mapping[Hashable, Hashable]) -> HouseholdPartition:
        groups = defaultdict(set)
        for person, h in assignment.items():
            groups[h].add(person)
        return cls(groups)

    @property
    def R(self) -> int:
        return len(self.households)

    @property
    def ids(self) -> tuple:
        return tuple(self.households)

    @property
    def sizes(self) -> tuple:
        return tuple(len(m) for m in self.households.values())

    @property
    def people(self) -> frozenset:
        return frozenset(self._owner)

    def household_of(self, person):
        try:
            return self._owner[person]
        except KeyError:
            raise ValidationError(f"person {person!r} is not in any household") from None

    def check_covers(self, nodes: Iterable) -> None:
        nodes = set(nodes)
        people = set(self._owner)
        problems = [f"node {v!r} has no household" for v in sorted_ids(nodes - people)]
        problems += [f"household member {v!r} is not a network node" for v in sorted_ids(people - nodes)]
        if problems:
            raise ValidationError("partition does not match the network node set", problems)


@dataclass(frozen=True)
class AdjacencyDecomposition:
    """A = A_extra + A_intra over persons indexed as in ``nodes``."""

    nodes: tuple
    A: sp.csr_matrix
    A_extra: sp.csr_matrix
    A_intra: sp.csr_matrix
    household_index: np.ndarray
    directed: bool = False

    @property
    def n(self) -> int:
        return len(self.nodes)


def decompose(network: IndividualNetwork, partition: HouseholdPartition) -> AdjacencyDecomposition:
    partition.check_covers(network.nodes)
    hh_pos = {h: k for k, h in enumerate(partition.ids)}
    hidx = np.array([hh_pos[partition.household_of(v)] for v in network.nodes], dtype=np.int64)
    A = network.adjacency().tocoo()
    same = hidx[A.row] == hidx[A.col]
    shape = A.shape
    intra = sp.csr_matrix((A.data[same], (A.row[same], A.col[same])), shape=shape)
    extra = sp.csr_matrix((A.data[~same], (A.row[~same], A.col[~same])), shape=shape)
    return AdjacencyDecomposition(network.nodes, A.tocsr(), extra, intra, hidx, network.directed)


def reweight_intra(decomposition: AdjacencyDecomposition, p: float) -> sp.csr_matrix:
    """A*_p = A_extra + (1 - p) A_intra."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {p!r}")
    return (decomposition.A_extra + (1.0 - p) * decomposition.A_intra).tocsr()


class NetworkBundle(NamedTuple):
    network: IndividualNetwork
    attributes: NodeAttributes
    partition: HouseholdPartition


def _field(rec: Mapping[str, Any], *names):
    for name in names:
        if name in rec and rec[name] not in (None, ""):
            return rec[name]
    return None


def build_network(node_records: Iterable, edge_records: Iterable,
                  attribute_records: Iterable[Mapping] | None = None, *,
                  directed: bool = False, genders: Iterable[str] | None = None) -> NetworkBundle:
    """Validate raw records and assemble network, attributes and partition.

    ``node_records`` may be bare ids or mappings with a ``person_id`` key. When
    they are mappings carrying ``household_id`` they double as attribute
    records. Extra keys beyond person_id/household_id/gender are role flags,
    set when their value is truthy ("1", "true", "yes"). Edge records are
    mappings (``source``, ``target``, optional ``layer`` and ``weight``) or
    tuples in that order. All problems are collected before raising.
    """
    problems = []
    nodes = []
    attr_recs = []
    for k, rec in enumerate(node_records):
        if isinstance(rec, Mapping):
            pid = _field(rec, "person_id", "id")
            if pid is None:
                problems.append(f"node record {k}: missing person_id")
                continue
            nodes.append(pid)
            if "household_id" in rec:
                attr_recs.append(rec)
        else:
            nodes.append(rec)
    if attribute_records is not None:
        attr_recs.extend(attribute_records)

    counts = Counter(nodes)
    problems += [f"node {v!r} listed {c} times" for v, c in counts.items() if c > 1]
    node_set = set(nodes)

    people = {}
    for rec in attr_recs:
        pid = _field(rec, "person_id", "id")
        hid = _field(rec, "household_id", "household")
        if pid not in node_set:
            problems.append(f"attribute record for unknown node {pid!r}")
            continue
        if hid is None:
            continue
        roles = frozenset(k for k, v in rec.items()
                          if k not in ("person_id", "id", "household_id", "household", "gender")
                          and v is not None and (v is True or str(v).strip().lower() in _TRUTHY))
        gender = _field(rec, "gender")
        people[pid] = PersonAttributes(hid, None if gender is None else str(gender), roles)
    problems += [f"node {v!r} has no household id" for v in sorted_ids(node_set - set(people))]

    edges = []
    for k, rec in enumerate(edge_records):
        if isinstance(rec, Mapping):
            s, t = _field(rec, "source"), _field(rec, "target")
            layer = _field(rec, "layer") or DEFAULT_LAYER
            weight = _field(rec, "weight")
        else:
            rec = tuple(rec)
            s, t = rec[0], rec[1]
            layer = rec[2] if len(rec) > 2 and rec[2] not in (None, "") else DEFAULT_LAYER
            weight = rec[3] if len(rec) > 3 else None
        try:
            weight = 1.0 if weight in (None, "") else float(weight)
        except (TypeError, ValueError):
            problems.append(f"edge record {k}: weight {weight!r} is not a number")
            continue
        missing = [x for x in (s, t) if x not in node_set]
        if missing:
            problems.append(f"edge record {k} ({s!r}, {t!r}): unknown node(s) {', '.join(map(repr, missing))}")
            continue
        edges.append(Edge(s, t, str(layer), weight))

    if problems:
        raise ValidationError("invalid network records", problems)
    network = IndividualNetwork(tuple(nodes), tuple(edges), directed)
    attributes = NodeAttributes(people, frozenset(genders or ()))
    partition = HouseholdPartition.from_assignment({p: a.household for p, a in people.items()})
    return NetworkBundle(network, attributes, partition)
