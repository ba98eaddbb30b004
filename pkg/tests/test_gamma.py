import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import shared_atlas

from grassres.errors import InsufficientSampling, InvalidChartForMatroid, InvalidEntry, NotAMatroid
from grassres.gamma import (Gamma, GammaTransport, Matroid, is_relevant, matroid_to_gamma,
                            sample_points)
from grassres.indexing import enumerate_indices, parse_index
from grassres.polyengine import Delta, Pi, evaluate
from grassres.relations import primary_family


def test_gamma_validation():
    g = Gamma.of([[3, 4]]).validate("12", 4)
    assert g.to_json() == [[3, 4]] and str(g) == "{x[34]}"
    with pytest.raises(InvalidEntry):
        Gamma.of(["12"]).validate("12", 4)


def test_matroid_checks():
    with pytest.raises(NotAMatroid):
        Matroid(n=4, d=2, bases=frozenset([(1, 2), (3, 4)]))
    with pytest.raises(NotAMatroid):
        Matroid.from_json({"n": 4})
    M = Matroid.from_json(json.loads('{"n": 4, "d": 2, "bases": [[1,2],[1,3],[1,4],[2,3],[2,4]]}'))
    assert matroid_to_gamma(M, "12") == Gamma.of(["34"])
    with pytest.raises(InvalidChartForMatroid):
        matroid_to_gamma(M, "34")


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([("12", 4, []), ("12", 4, ["34"]), ("45", 5, ["12"]), ("123", 6, ["456"])]),
       st.integers(0, 10 ** 6))
def test_samples_lie_on_dense_cell(case, seed):
    m, n, gamma = case
    pts = sample_points(gamma, m, n, 7, 5, random.Random(seed))
    assert pts
    for pt in pts:
        env = {Pi(u): v for u, v in pt.items()}
        env[Pi(m)] = 1
        for F in primary_family(m, n):
            assert evaluate(F.homogeneous(), env) % 7 == 0
        for u in enumerate_indices(len(m), n):
            if u != parse_index(m):
                assert (pt[u] == 0) == (u in Gamma.of(gamma).members)


def test_relevance():
    fam = primary_family("12", 4)
    assert is_relevant(fam[0], Gamma.of(["34"]))
    assert is_relevant(fam[0], Gamma())
    # leading variable and one factor of every quadratic term in Γ
    assert not is_relevant(fam[0], Gamma.of(["34", "13", "14"]))


def test_transport_gr24():
    atlas, _ = shared_atlas("12", 4)
    tr = GammaTransport(atlas, [["3", "4"]])
    states = tr.states()
    assert len(states) == 6
    for name, state in states.items():
        assert not state.flags
        assert Delta("12", "34") in state.zero_set
        assert name.endswith("/l1")


def test_transport_empty_cell():
    atlas, _ = shared_atlas("12", 4)
    with pytest.raises(InsufficientSampling):
        GammaTransport(atlas, [["1", "3"], ["1", "4"]])
