import itertools
import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from grassres.indexing import basic_variables, enumerate_indices, parse_index
from grassres.polyengine import Pi, evaluate
from grassres.relations import (express_in_basic, general_relation, linearize, primary_family,
                                primary_relation)


def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]]) for j in range(n))


def _plucker_point(d, n, rng):
    A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(d)]
    return {Pi(u): _det([[A[i][j - 1] for j in u] for i in range(d)]) for u in enumerate_indices(d, n)}


cases = st.sampled_from([("12", 4), ("45", 5), ("123", 6), ("135", 6), ("24", 5)])


@settings(max_examples=30)
@given(cases, st.integers(0, 10 ** 6))
def test_relations_vanish_on_grassmannian(case, seed):
    # oracle: maximal minors of a random integer matrix
    m, n = case
    pt = _plucker_point(len(m), n, random.Random(seed))
    for F in primary_family(m, n):
        assert evaluate(F.homogeneous(), pt) == 0


def test_general_relation_vanishes():
    pt = _plucker_point(2, 5, random.Random(1))
    for h, k in itertools.product([(1,), (2,), (3,)], [(2, 4, 5), (1, 3, 4)]):
        assert evaluate(general_relation(h, k), pt) == 0


def test_rank0_example():
    F = primary_relation("123", "145")
    assert str(F) == "x[145] - x[124]*x[135] + x[125]*x[134]"
    assert F.rank == 0 and F.t_F == 2
    assert str(linearize(F).polynomial()) == "x[123,145] - x[124,135] + x[125,134]"


@settings(max_examples=20)
@given(cases, st.integers(0, 10 ** 6))
def test_express_in_basic_on_chart(case, seed):
    m, n = case
    m = parse_index(m)
    rng = random.Random(seed)
    pt = _plucker_point(len(m), n, rng)
    scale = pt[Pi(m)]
    if scale == 0:
        return
    chart = {v: Fraction(x, scale) for v, x in pt.items()}
    basic = {Pi(u): chart[Pi(u)] for u in basic_variables(m, n)}
    for u in enumerate_indices(len(m), n):
        assert evaluate(express_in_basic(m, u, n), basic) == chart[Pi(u)]
