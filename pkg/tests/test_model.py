import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grassres.errors import DomainError, InvalidChart, ResourceLimit
from grassres.model import (defining_system, kernel_binomials, main_binomials, phi,
                            residual_binomials)
from grassres.polyengine import Eps, Monomial, Pi, Polynomial, Rho
from grassres.relations import primary_family

cases = [("12", 4), ("45", 5), ("123", 6)]


def test_phi_images():
    mon = Monomial([(Rho("12", "34"), 2), (Pi("13"), 1)])
    assert phi(mon) == Monomial([(Pi("12"), 2), (Pi("34"), 2), (Pi("13"), 1)])
    assert phi(mon, "12") == Monomial([(Pi("34"), 2), (Pi("13"), 1)])
    with pytest.raises(DomainError):
        phi(Monomial([(Eps("13"), 1)]))


@pytest.mark.parametrize("m,n", cases)
def test_kernel_soundness(m, n):
    for F in primary_family(m, n):
        for b in main_binomials(F) + residual_binomials(F):
            assert phi(b.plus, m) == phi(b.minus, m)
    for b in kernel_binomials(m, n, 3):
        assert phi(b.plus, m) == phi(b.minus, m)
        assert not set(b.plus.variables()) & set(b.minus.variables())


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(cases), st.data())
def test_residual_is_combination_of_mains(case, data):
    # x_t·B_s - x_s·B_t equals x_u times the residual binomial R(s,t)
    m, n = case
    fam = primary_family(m, n)
    F = data.draw(st.sampled_from([G for G in fam if G.t_F >= 2]))
    mains = main_binomials(F)
    for b in residual_binomials(F):
        i, j = b.pair
        s, t = F.non_leading()[i - 1][1], F.non_leading()[j - 1][1]
        lhs = mains[i - 1].poly * _mono(Pi(t[0]), Pi(t[1])) - mains[j - 1].poly * _mono(Pi(s[0]), Pi(s[1]))
        assert lhs == b.poly * _mono(Pi(F.u))


def _mono(*vs):
    out = Polynomial.const(1)
    for v in vs:
        out = out * Polynomial.var(v)
    return out


def test_kernel_counts():
    assert kernel_binomials("12", 4, 3) == []
    assert len(kernel_binomials("45", 5, 3)) == 1
    assert len(kernel_binomials("123", 6, 3)) == 6


def test_kernel_limit():
    with pytest.raises(ResourceLimit):
        kernel_binomials("123", 7, 3, limit=10)


def test_defining_system_shape():
    sysm = defining_system("45", 5)
    assert len(sysm.main) == 6 and len(sysm.residual) == 3 and len(sysm.linear) == 3
    assert [r.name for r in sysm.linear] == ["L1", "L2", "L3"]
    with pytest.raises(InvalidChart):
        defining_system("45", 5, basepoint=[1, 1])
    with pytest.raises(InvalidChart):
        defining_system("45", 5, basepoint=[5, 1, 1])


def test_degree_four_search_finds_four_term_form():
    def r(u, v):
        return Polynomial.var(Rho(u, v))
    found = {b.poly for b in kernel_binomials("123", 6, 4)}
    for a, b, c in itertools.permutations((4, 5, 6)):
        q = (r("12%d" % a, "13%d" % b) * r("13%d" % a, "12%d" % c) * r("12%d" % b, "23%d" % c)
             * r("23%d" % b, "13%d" % c)
             - r("13%d" % a, "12%d" % b) * r("12%d" % a, "13%d" % c) * r("23%d" % b, "12%d" % c)
             * r("13%d" % b, "23%d" % c))
        assert q in found or -q in found
