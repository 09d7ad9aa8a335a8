from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from multibudget.errors import DimensionError, ValidationError
from multibudget.graphs import GraphSpec
from multibudget.instance import (
    BudgetedInstance,
    GroundSpec,
    RANDOM_KINDS,
    chain_of_cycles,
    disjoint_cycles,
    from_json,
    gen_partition_gadget,
    gen_random,
    load,
    save,
)
from multibudget import matroid as mt
from multibudget.oracle import brute_opt


def _tiny():
    return BudgetedInstance((Fraction(3),), ((),), (), GroundSpec("matroid", matroid=mt.Uniform(1, 1)))


def test_minimal_instance_round_trips_bytes():
    text = save(_tiny())
    assert load(text) == _tiny()
    assert save(load(text)) == text


@pytest.mark.parametrize("kind", RANDOM_KINDS)
@pytest.mark.parametrize("seed", [0, 5])
def test_random_instances_round_trip(kind, seed):
    inst = gen_random(kind, 7, 2, seed)
    assert save(load(save(inst))) == save(inst)
    assert load(save(inst)) == inst


def test_same_seed_same_bytes():
    assert save(gen_random("graphic", 9, 3, 11)) == save(gen_random("graphic", 9, 3, 11))
    assert save(gen_random("graphic", 9, 3, 11)) != save(gen_random("graphic", 9, 3, 12))


# frozen from the brute-force oracle on (kind, m=8, k=2, seed=7)
FROZEN = {
    "uniform": ("fcfb32e19c7b2745", Fraction(24), [0, 1, 2, 3]),
    "partition": ("825ce284bd1b420e", Fraction(10), [0, 2, 7]),
    "graphic": ("73fda3674e13d925", Fraction(20), [1, 4, 6]),
    "linear": ("7d24b9a9aab268b8", Fraction(15), [0, 3]),
    "forest": ("f309a8167bb3ac9b", Fraction(20), [1, 4, 6]),
    "matching": ("8321fc2790647d16", Fraction(19, 3), [1, 6]),
}


@pytest.mark.parametrize("kind", sorted(FROZEN))
def test_generator_is_stable(kind):
    digest, value, witness = FROZEN[kind]
    inst = gen_random(kind, 8, 2, 7)
    assert inst.digest() == digest
    v, w = brute_opt(inst)
    assert (v, sorted(w)) == (value, witness)


@pytest.mark.parametrize("kind", RANDOM_KINDS)
def test_random_budgets_bind(kind):
    # each budget sits below the largest usage any solution reaches
    from multibudget.oracle import enumerate_solutions

    for seed in range(4):
        inst = gen_random(kind, 8, 2, seed)
        for i, b in enumerate(inst.budgets):
            top = max(inst.usage(S)[i] for S in enumerate_solutions(inst))
            assert 0 <= b < top or top == 0


def test_schema_errors():
    doc = _tiny().to_json()
    bad = dict(doc, m=2)
    with pytest.raises(DimensionError):
        from_json(bad)
    with pytest.raises(ValidationError):
        load("{not json")
    with pytest.raises(ValidationError):
        load('{"m": 1}')
    with pytest.raises(ValidationError):
        BudgetedInstance((Fraction(-1),), ((),), (), GroundSpec("matroid", matroid=mt.Uniform(1, 1)))
    with pytest.raises(DimensionError):
        BudgetedInstance((1, 2), ((1,), (1,)), (), GroundSpec("matroid", matroid=mt.Uniform(2, 1)))
    with pytest.raises(ValidationError):
        GroundSpec("nonsense")


def test_rat_strings_in_json():
    inst = BudgetedInstance(
        (Fraction(3, 2),), ((Fraction(1, 3),),), (Fraction(5),), GroundSpec("matroid", matroid=mt.Uniform(1, 1))
    )
    doc = inst.to_json()
    assert doc["weights"] == ["3/2"] and doc["lengths"] == [["1/3"]] and doc["budgets"] == ["5"]


def test_chain_of_cycles_shape():
    g, cycles = chain_of_cycles(3)
    assert g.n == 10 and g.m == 12
    assert [c[0] for c in cycles[1:]] == [c[2] for c in cycles[:-1]]
    g2, cycles2 = disjoint_cycles(2)
    assert g2.n == 8 and g2.m == 8 and cycles2[1] == (4, 5, 6, 7)


@pytest.mark.parametrize("kind", ["spanning_tree", "perfect_matching", "path"])
def test_gadget_budgets(kind):
    inst = gen_partition_gadget(kind, [1, 2, 3], 3)
    M = Fraction(7)
    assert all(w == 1 for w in inst.weights)
    assert all(row[0] + row[1] == M for row in inst.lengths)
    target = 6 if kind == "perfect_matching" else 3
    assert inst.budgets[0] == target


def test_gadget_rejects_small_M_and_negatives():
    with pytest.raises(ValidationError):
        gen_partition_gadget("spanning_tree", [1, 2], 1, M=3)
    with pytest.raises(ValidationError):
        gen_partition_gadget("path", [-1, 2], 1)
    with pytest.raises(ValidationError):
        gen_partition_gadget("cube", [1], 1)


@given(st.integers(0, 10_000), st.sampled_from(RANDOM_KINDS), st.integers(1, 8), st.integers(0, 3))
def test_generated_instances_are_valid(seed, kind, m, k):
    inst = gen_random(kind, m, k, seed)
    assert inst.m == m and inst.k == k
    assert all(w >= 0 for w in inst.weights)
    assert load(save(inst)) == inst


def test_graph_validation():
    with pytest.raises(ValidationError):
        GraphSpec(2, ((0, 0),))
    with pytest.raises(ValidationError):
        GraphSpec(2, ((0, 2),))
