import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import shared_atlas

from grassres import fpsolve
from grassres.blowup import PipelineConfig, run_pipeline
from grassres.certify import (FAIL, SMOOTH, UNCERTAIN, birationality_probe, certify_smooth,
                              enumerate_points, jacobian_rank_at, rank_mod_p)
from grassres.errors import InvalidParameters, ResourceLimit
from grassres.polyengine import Pi, Polynomial, evaluate

X = [Pi((i, 9)) for i in range(1, 7)]
cone = Polynomial.var(Pi("13")) * Polynomial.var(Pi("24")) - Polynomial.var(Pi("14")) * Polynomial.var(Pi("23"))

terms = st.tuples(st.integers(-3, 3), st.lists(st.tuples(st.sampled_from(X[:4]), st.integers(1, 2)), max_size=2))
systems = st.lists(st.lists(terms, min_size=1, max_size=3), max_size=3)


def _poly(ts):
    q = Polynomial()
    for c, fs in ts:
        t = Polynomial.const(c)
        for v, e in fs:
            t = t * Polynomial.var(v) ** e
        q = q + t
    return q


@settings(max_examples=40, deadline=None)
@given(systems, st.sampled_from([3, 5]))
def test_enumeration_matches_nested_loops(raw, p):
    polys = [_poly(ts) for ts in raw]
    vs = X[:4]
    want = set()
    for vals in itertools.product(range(p), repeat=4):
        pt = dict(zip(vs, vals))
        if all(evaluate(q, pt) % p == 0 for q in polys):
            want.add(vals)
    got = {tuple(pt[v] for v in vs) for pt in enumerate_points(polys, p, variables=vs)}
    assert got == want


def test_trivial_counts():
    assert len(enumerate_points([], 5, variables=X[:3])) == 125
    assert enumerate_points([Polynomial.const(1)], 5, variables=X[:2]) == []
    assert len(enumerate_points([cone], 5)) == 145  # oracle below


def test_cone_count_oracle():
    n = sum(1 for a, b, c, d in itertools.product(range(5), repeat=4) if (a * d - b * c) % 5 == 0)
    assert len(enumerate_points([cone], 5)) == n


def test_solver_bounds():
    with pytest.raises(ResourceLimit):
        enumerate_points([], 3, variables=[Pi((i, 20)) for i in range(1, 14)])
    with pytest.raises(InvalidParameters):
        enumerate_points([], 4, variables=X[:1])


def test_compiled_system_reuse():
    t = Pi("78")
    sysm = fpsolve.System([Polynomial.var(X[0]) ** 2 - Polynomial.var(t)], [X[0]], 7, fixed={t})
    assert [sysm.count({t: a}) for a in range(7)] == [1, 2, 2, 0, 2, 0, 0]


def test_ranks():
    assert rank_mod_p([[1, 2], [2, 4]], 5) == 1
    assert rank_mod_p([[1, 0], [0, 1]], 3) == 2
    origin = {v: 0 for v in cone.variables()}
    assert jacobian_rank_at([cone], origin, 5) == 0
    one = {**origin, Pi("13"): 1}
    assert jacobian_rank_at([cone], one, 5) == 1
    lin = [Polynomial.var(X[0]) + Polynomial.var(X[1]), Polynomial.var(X[1]) - Polynomial.var(X[2])]
    assert jacobian_rank_at(lin, {v: 0 for v in X[:3]}, 7) == 2


@pytest.mark.parametrize("gamma", [[], [[3, 4]], [[2, 4]], [[2, 3]]])
def test_gr24_certificates(gamma):
    atlas, _ = shared_atlas("12", 4)
    cert = certify_smooth(atlas, gamma)
    assert cert.verdict == SMOOTH
    js = cert.to_json()
    assert js["schema_version"] == 1
    assert {"gamma", "primes", "charts", "verdict", "birational"} <= set(js)
    assert all({"id", "points_checked", "rank_expected", "rank_min", "pass"} <= set(c) for c in js["charts"])


def test_dimension_law():
    # free variables minus rank is the same on every chart
    atlas, _ = shared_atlas("12", 4)
    cert = certify_smooth(atlas, [])
    dims = set()
    for rep, ch in zip(cert.charts, [c for c in atlas.charts if c.name in {r.id for r in cert.charts}]):
        g = sum(1 for r in ch.relations if r.kind == "chart")
        dims.add(len(ch.variables) - rep.rank_min - g)
    assert dims == {4}


def test_sabotage_is_never_silently_smooth():
    atlas = run_pipeline("12", 4, PipelineConfig(skip_ell=True))
    cert = certify_smooth(atlas, [[3, 4]])
    assert cert.verdict in (FAIL, UNCERTAIN)


def test_probe_deterministic():
    atlas, _ = shared_atlas("12", 4)
    a = birationality_probe(atlas, [[3, 4]], 7, 10, seed=3)
    b = birationality_probe(atlas, [[3, 4]], 7, 10, seed=3)
    assert a == b and a["fiber_histogram"] == {"1": 10}


def test_parallel_matches_serial(monkeypatch):
    atlas, _ = shared_atlas("12", 4)
    serial = certify_smooth(atlas, [[3, 4]], jobs=1).to_json()
    monkeypatch.setenv("GRASSRES_JOBS", "2")
    parallel = certify_smooth(atlas, [[3, 4]]).to_json()
    assert serial == parallel
