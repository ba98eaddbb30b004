"""Plücker relations, primary relations for a chart and their linearizations."""

from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidEntry, NotPrimary
from .indexing import (ZERO, PluckerIndex, basic_variables, m_rank, normalize,
                       parse_index, primary_index_set, wp_key)
from .polyengine import Pi, Polynomial, Rho, var


@dataclass(frozen=True)
class PrimaryRelation:
    m: PluckerIndex
    u: PluckerIndex
    terms: tuple            # ((sign, (a, b)), ...), leading term first
    leading_position: int
    t_F: int
    rank: int

    @property
    def leading(self):
        return self.terms[self.leading_position]

    def non_leading(self):
        """Non-leading terms in the order used to index main binomials."""
        return [t for i, t in enumerate(self.terms) if i != self.leading_position]

    def polynomial(self):
        """The dehomogenized relation on the chart ``x_m = 1``."""
        p = var(Pi(self.u))
        for sign, (a, b) in self.non_leading():
            p = p + sign * var(Pi(a)) * var(Pi(b))
        return p

    def homogeneous(self):
        p = var(Pi(self.m)) * var(Pi(self.u))
        for sign, (a, b) in self.non_leading():
            p = p + sign * var(Pi(a)) * var(Pi(b))
        return p

    def pairs(self):
        return [pair for _, pair in self.terms]

    def __str__(self):
        return str(self.polynomial())


@dataclass(frozen=True)
class LinearizedRelation:
    terms: tuple            # ((sign, Rho variable), ...)
    leading: object

    def polynomial(self):
        p = Polynomial()
        for sign, v in self.terms:
            p = p + sign * var(v)
        return p


def general_relation(h, k):
    """sum_l (-1)^(l-1) p_{h k_l} p_{k minus k_l}, zero terms dropped."""
    h = tuple(h)
    k = tuple(k)
    p = Polynomial()
    for lam, kl in enumerate(k):
        a = normalize(h + (kl,))
        b = normalize(k[:lam] + k[lam + 1:])
        if a is ZERO or b is ZERO:
            continue
        sign = (-1) ** lam * a.sign * b.sign
        p = p + sign * var(Pi(a.index)) * var(Pi(b.index))
    return p


def _tau_key(pair, rank, m):
    if rank == 0:
        return tuple(wp_key(x, m) for x in pair)
    return (wp_key(pair[0], m),)


@lru_cache(maxsize=None)
def primary_relation(m, u):
    m, u = parse_index(m), parse_index(u)
    if len(m) != len(u):
        raise InvalidEntry("indices %s and %s have different lengths" % (m, u))
    outside = [e for e in u if e not in m]
    if len(outside) < 2:
        raise NotPrimary("%s is not %s-primary" % (u, m))
    u0 = outside[0]
    h = tuple(e for e in u if e != u0)
    lead = normalize(h + (u0,))
    # normalize so that p_m p_u carries +1
    flip = lead.sign
    rank = len(outside) - 2
    others = []
    for i, mi in enumerate(m, start=1):
        a = normalize(h + (mi,))
        if a is ZERO:
            continue
        b = normalize((u0,) + tuple(e for e in m if e != mi))
        sign = (-1) ** i * a.sign * b.sign * flip
        pair = (a.index, b.index)          # basic index second
        if rank == 0:
            pair = tuple(sorted(pair, key=lambda x: wp_key(x, m)))
        others.append((sign, pair))
    others.sort(key=lambda t: _tau_key(t[1], rank, m))
    terms = ((1, (m, u)),) + tuple(others)
    return PrimaryRelation(m=m, u=u, terms=terms, leading_position=0,
                           t_F=len(others), rank=rank)


def primary_family(m, n, blocks=None):
    m = parse_index(m)
    fam = [primary_relation(m, u) for u in primary_index_set(m, n)]
    if blocks is not None:
        fam = fam[:blocks]
    return fam


def linearize(F):
    terms = tuple((sign, Rho(a, b)) for sign, (a, b) in F.terms)
    return LinearizedRelation(terms=terms, leading=Rho(F.m, F.u))


@lru_cache(maxsize=None)
def _basic_cache(m, n):
    return frozenset(basic_variables(m, n))


_expr_cache = {}


def express_in_basic(m, u, n=None):
    """x_u as a polynomial in the basic variables of the chart U_m."""
    m, u = parse_index(m), parse_index(u)
    if u == m:
        return Polynomial.const(1)
    if m_rank(u, m) < 0:
        return var(Pi(u))
    key = (m, u)
    if key not in _expr_cache:
        F = primary_relation(m, u)
        p = Polynomial()
        for sign, (a, b) in F.non_leading():
            p = p - sign * express_in_basic(m, a) * express_in_basic(m, b)
        _expr_cache[key] = p
    return _expr_cache[key]
