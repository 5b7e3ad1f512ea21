import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hhnet import randgraph as G
from hhnet.contraction import contract_basic
from hhnet.errors import ValidationError


def test_contracted_probability_value():
    assert G.contracted_edge_probability(0.1, 2, 3) == pytest.approx(1 - 0.9 ** 6)
    assert G.contracted_edge_probability(0.1, 2, 3) == pytest.approx(0.468559, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.integers(1, 6), st.integers(1, 6))
def test_contracted_probability_is_union_of_independent_pairs(p, a, b):
    # complement of "none of the a*b member pairs is linked"
    none = 1.0
    for _ in range(a * b):
        none *= 1 - p
    assert G.contracted_edge_probability(p, a, b) == pytest.approx(1 - none, abs=1e-12)


def test_expected_household_degree():
    # household index 1 (size 2) against sizes 1 and 3
    expected = (1 - 0.9 ** 2) + (1 - 0.9 ** 6)
    assert G.expected_household_degree(0.1, (1, 2, 3), 1) == pytest.approx(expected)
    assert expected == pytest.approx(0.658559, abs=1e-12)
    with pytest.raises(ValidationError):
        G.expected_household_degree(0.1, (1, 2), 2)


def test_er_edge_count_mean():
    counts = [len(G.generate_er(G.ErConfig(100, 0.1, s)).edges) for s in range(200)]
    assert abs(np.mean(counts) - 495) < 15


def test_er_is_deterministic_and_bounded():
    a = G.generate_er(G.ErConfig(30, 0.3, 4))
    assert a == G.generate_er(G.ErConfig(30, 0.3, 4))
    assert len(G.generate_er(G.ErConfig(10, 0.0, 1)).edges) == 0
    assert len(G.generate_er(G.ErConfig(10, 1.0, 1)).edges) == 45
    with pytest.raises(ValidationError):
        G.ErConfig(0, 0.5)
    with pytest.raises(ValidationError):
        G.ErConfig(5, 1.5)


def test_random_partition_pair_frequency():
    together = 0
    trials = 10_000
    for s in range(trials):
        part = G.random_partition(6, (2, 2, 2), s)
        together += part.household_of(0) == part.household_of(1)
    # node 0's single housemate is any of the other five with equal chance
    assert abs(together / trials - 0.2) < 4 * np.sqrt(0.16 / trials)


def test_partition_sizes_must_match():
    with pytest.raises(ValidationError):
        G.random_partition(5, (2, 2), 0)
    assert G.HouseholdSizeSpec.cycling(10, (1, 2, 3, 4)).sizes == (1, 2, 3, 4)
    assert G.HouseholdSizeSpec.cycling(60, (1, 2, 3, 4)).R == 24
    with pytest.raises(ValidationError):
        G.HouseholdSizeSpec.cycling(2, (3,))


def test_verify_with_p_zero_is_all_zero_and_passes():
    rep = G.verify_contraction_distribution(G.ErConfig(10, 0.0, 1), G.HouseholdSizeSpec.cycling(10, (1, 2, 3, 4)), 100)
    assert all(pr["empirical"] == 0 for pr in rep["pairs"])
    assert rep["pass"]


def test_verify_counts_match_a_direct_recount():
    cfg, spec, draws = G.ErConfig(12, 0.2, 3), G.HouseholdSizeSpec((3, 3, 2, 4)), 100
    rep = G.verify_contraction_distribution(cfg, spec, draws)
    part = G.random_partition(12, spec, [3, 0])
    direct = {}
    for d in range(draws):
        g = G.generate_er(G.ErConfig(12, 0.2, [3, 1, d]))
        for u, v in itertools.combinations(range(spec.R), 2):
            mu, mv = part.households[u], part.households[v]
            if any((min(a, b), max(a, b)) in {(e.source, e.target) for e in g.edges}
                   for a in mu for b in mv):
                direct[(u, v)] = direct.get((u, v), 0) + 1
    assert {(pr["q"], pr["r"]): pr["count"] for pr in rep["pairs"] if pr["count"]} == direct


def test_equal_sizes_reduce_to_er():
    cfg = G.ErConfig(30, 0.1, 5)
    rep = G.verify_contraction_distribution(cfg, G.HouseholdSizeSpec.equal(10, 3), 400)
    assert len(rep["probability_classes"]) == 1
    assert rep["probability_classes"][0]["probability"] == pytest.approx(1 - 0.9 ** 9)
    (row,) = G.homogeneity_test(rep)
    assert row["pairs"] == 45 and not row["reject"]


def test_homogeneity_test_rejects_wrong_probability():
    rep = G.verify_contraction_distribution(G.ErConfig(30, 0.1, 5), G.HouseholdSizeSpec.equal(10, 3), 400)
    rep["probability_classes"][0]["probability"] = 0.5
    assert G.homogeneity_test(rep)[0]["reject"]


def test_clique_of_cliques_structure():
    b = G.clique_of_cliques(sizes=(5,) * 8, seed=3)
    assert b.network.n == 40 and b.partition.R == 8
    hh = contract_basic(b.network, b.partition)
    intra = [e for e in b.network.edges if b.partition.household_of(e.source) == b.partition.household_of(e.target)]
    assert len(intra) == 8 * 10
    assert hh.n == 8
    genders = [b.attributes.gender(v) for v in sorted(b.partition.households[0])]
    assert set(genders) == {"F", "M"}
