"""Sparse multivariate polynomials with integer coefficients.

Variables are tagged by kind: Plücker (ϖ) coordinates, ϱ-coordinates of the
auxiliary projective factors, the two kinds of exceptional coordinates and
the invertible ``y`` coordinates introduced by the last family of blowups.
The kind order doubles as the global variable order, so sorting is cheap.
"""

import re
from typing import NamedTuple

from .errors import DivisionError, InvalidParameters
from .indexing import parse_index

PI, RHO, EPS, DELTA, YINV = 0, 1, 2, 3, 4
_PREFIX = {PI: "x", RHO: "x", EPS: "e", DELTA: "d", YINV: "y"}


class Variable(NamedTuple):
    kind: int
    label: tuple

    def __str__(self):
        if self.kind in (PI, EPS):
            return "%s[%s]" % (_PREFIX[self.kind], self.label)
        return "%s[%s,%s]" % (_PREFIX[self.kind], self.label[0], self.label[1])

    @property
    def is_pair(self):
        return self.kind in (RHO, DELTA, YINV)


def _pair(u, v):
    u, v = parse_index(u), parse_index(v)
    return (u, v) if u <= v else (v, u)


def Pi(u):
    return Variable(PI, parse_index(u))


def Rho(u, v):
    return Variable(RHO, _pair(u, v))


def Eps(u):
    return Variable(EPS, parse_index(u))


def Delta(u, v):
    return Variable(DELTA, _pair(u, v))


def YInv(u, v):
    return Variable(YINV, _pair(u, v))


class Monomial(tuple):
    """Sorted tuple of (Variable, exponent) with positive exponents."""

    __slots__ = ()

    def __new__(cls, items=()):
        if isinstance(items, dict):
            items = items.items()
        acc = {}
        for v, e in items:
            if e:
                acc[v] = acc.get(v, 0) + e
        for v, e in acc.items():
            if e < 0:
                raise ValueError("negative exponent for %s" % (v,))
        return super().__new__(cls, tuple(sorted((v, e) for v, e in acc.items() if e)))

    @classmethod
    def _raw(cls, items):
        return tuple.__new__(cls, items)

    def as_dict(self):
        return dict(self)

    def degree(self):
        return sum(e for _, e in self)

    def exponent(self, var):
        for v, e in self:
            if v == var:
                return e
        return 0

    def variables(self):
        return [v for v, _ in self]

    def __mul__(self, other):
        if not self:
            return other
        if not other:
            return self
        acc = dict(self)
        for v, e in other:
            acc[v] = acc.get(v, 0) + e
        return Monomial._raw(tuple(sorted(acc.items())))

    def divides(self, other):
        od = dict(other)
        return all(od.get(v, 0) >= e for v, e in self)

    def quotient(self, other):
        """self / other; raises DivisionError if other does not divide self."""
        acc = dict(self)
        for v, e in other:
            r = acc.get(v, 0) - e
            if r < 0:
                raise DivisionError("%s does not divide %s" % (_mon_str(other), _mon_str(self)))
            if r:
                acc[v] = r
            else:
                del acc[v]
        return Monomial._raw(tuple(sorted(acc.items())))

    def __str__(self):
        return _mon_str(self) or "1"


ONE_MON = Monomial()


def _mon_str(mon):
    parts = []
    for v, e in mon:
        parts.append(str(v) if e == 1 else "%s^%d" % (v, e))
    return "*".join(parts)


def _term_key(mon):
    # lower degree first, then variable order
    return (sum(e for _, e in mon), mon)


class Polynomial:
    """Immutable-by-convention sparse polynomial over the integers."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = {}
        self._hash = None
        if terms:
            for mon, c in (terms.items() if isinstance(terms, dict) else terms):
                if c:
                    mon = mon if isinstance(mon, Monomial) else Monomial(mon)
                    c = self.terms.get(mon, 0) + c
                    if c:
                        self.terms[mon] = c
                    else:
                        self.terms.pop(mon, None)

    @classmethod
    def _from_clean(cls, terms):
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c):
        return cls._from_clean({ONE_MON: c} if c else {})

    @classmethod
    def var(cls, v):
        return cls._from_clean({Monomial._raw(((v, 1),)): 1})

    @classmethod
    def monomial(cls, mon, coeff=1):
        return cls._from_clean({mon: coeff} if coeff else {})

    # ring operations

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial._from_clean(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._from_clean({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Polynomial._from_clean(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Polynomial.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # inspection

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and ONE_MON in self.terms)

    def constant_term(self):
        return self.terms.get(ONE_MON, 0)

    def variables(self):
        vs = set()
        for m in self.terms:
            for v, _ in m:
                vs.add(v)
        return sorted(vs)

    def degree(self):
        return max((m.degree() for m in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _term_key(t[0]))

    def common_monomial(self):
        """Largest monomial dividing every term (the gcd of the terms)."""
        it = iter(self.terms)
        try:
            first = dict(next(it))
        except StopIteration:
            return ONE_MON
        for m in it:
            md = dict(m)
            for v in list(first):
                e = md.get(v, 0)
                if e < first[v]:
                    if e:
                        first[v] = e
                    else:
                        del first[v]
            if not first:
                break
        return Monomial._raw(tuple(sorted(first.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            body = _mon_str(m)
            a = abs(c)
            if body:
                piece = body if a == 1 else "%d*%s" % (a, body)
            else:
                piece = str(a)
            if i == 0:
                out.append(piece if c > 0 else "-" + piece)
            else:
                out.append(("+ " if c > 0 else "- ") + piece)
        return " ".join(out)

    def __repr__(self):
        return "Polynomial(%s)" % self


def _coerce(x):
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, int):
        return Polynomial.const(x)
    if isinstance(x, Variable):
        return Polynomial.var(x)
    if isinstance(x, Monomial):
        return Polynomial.monomial(x)
    raise TypeError("cannot coerce %r to Polynomial" % (x,))


def as_poly(x):
    return _coerce(x)


def var(v):
    return Polynomial.var(v)


def add(p, q):
    return _coerce(p) + _coerce(q)


def mul(p, q):
    return _coerce(p) * _coerce(q)


def neg(p):
    return -_coerce(p)


def substitute(p, mapping):
    """Ring homomorphism sending each variable in ``mapping`` to its image."""
    if not mapping:
        return p
    images = {v: _coerce(img) for v, img in mapping.items()}
    # fast path: every image is a single monomial with coefficient 1 or -1
    if all(len(img.terms) == 1 for img in images.values()):
        mons = {v: next(iter(img.terms.items())) for v, img in images.items()}
        out = {}
        for m, c in p.terms.items():
            newm = []
            coef = c
            for v, e in m:
                if v in mons:
                    im, ic = mons[v]
                    coef *= ic ** e
                    for w, f in im:
                        newm.append((w, f * e))
                else:
                    newm.append((v, e))
            nm = Monomial(newm)
            s = out.get(nm, 0) + coef
            if s:
                out[nm] = s
            else:
                out.pop(nm, None)
        return Polynomial._from_clean(out)
    total = Polynomial()
    cache = {}
    for m, c in p.terms.items():
        acc = Polynomial.const(c)
        rest = []
        for v, e in m:
            if v in images:
                key = (v, e)
                if key not in cache:
                    cache[key] = images[v] ** e
                acc = acc * cache[key]
            else:
                rest.append((v, e))
        if rest:
            acc = acc * Polynomial.monomial(Monomial(rest))
        total = total + acc
    return total


def is_prime(p):
    if not isinstance(p, int) or p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def evaluate_mod_p(p, point, prime):
    if not is_prime(prime):
        raise InvalidParameters("%r is not prime" % (prime,))
    total = 0
    for m, c in p.terms.items():
        t = c
        for v, e in m:
            t = t * pow(point[v], e, prime) % prime
        total += t
    return total % prime


def evaluate(p, point):
    """Exact integer (or any ring) evaluation."""
    total = 0
    for m, c in p.terms.items():
        t = c
        for v, e in m:
            t = t * point[v] ** e
        total += t
    return total


def partial_derivative(p, v):
    out = {}
    for m, c in p.terms.items():
        e = m.exponent(v)
        if not e:
            continue
        rest = [(w, f - 1 if w == v else f) for w, f in m]
        nm = Monomial._raw(tuple((w, f) for w, f in rest if f))
        s = out.get(nm, 0) + c * e
        if s:
            out[nm] = s
        else:
            out.pop(nm, None)
    return Polynomial._from_clean(out)


def divide_out(p, mon):
    if not isinstance(mon, Monomial):
        mon = Monomial(mon)
    if not mon:
        return p
    return Polynomial._from_clean({m.quotient(mon): c for m, c in p.terms.items()})


_VAR_RE = re.compile(r"([xedy])\[([0-9.]+)(?:,([0-9.]+))?\]")
_TOKEN_RE = re.compile(r"\s*(?:([+-])|(\d+)|([xedy]\[[0-9.,]+\])|(\*)|(\^))")


def parse_variable(text):
    mt = _VAR_RE.fullmatch(text.strip())
    if not mt:
        raise ValueError("bad variable %r" % text)
    pre, a, b = mt.groups()
    if b is None:
        if pre == "x":
            return Pi(a)
        if pre == "e":
            return Eps(a)
        raise ValueError("bad variable %r" % text)
    return {"x": Rho, "d": Delta, "y": YInv}[pre](a, b)


def parse(text):
    """Inverse of ``str(Polynomial)``."""
    text = text.strip()
    if text == "0":
        return Polynomial()
    pos = 0
    terms = {}
    sign = 1
    coef = None
    factors = []
    expect_factor = True

    def flush():
        if coef is None and not factors:
            raise ValueError("empty term in %r" % text)
        mon = Monomial(factors)
        c = sign * (coef if coef is not None else 1)
        terms[mon] = terms.get(mon, 0) + c

    while pos < len(text):
        mt = _TOKEN_RE.match(text, pos)
        if not mt or mt.end() == pos:
            raise ValueError("cannot parse %r at %d" % (text, pos))
        pos = mt.end()
        pm, num, vtok, star, caret = mt.groups()
        if pm:
            if not expect_factor or factors or coef is not None:
                flush()
                sign, coef, factors = 1, None, []
            sign = sign * (-1 if pm == "-" else 1)
            expect_factor = True
        elif num:
            if factors and factors[-1][1] is None:
                factors[-1] = (factors[-1][0], int(num))
            else:
                coef = int(num)
            expect_factor = False
        elif vtok:
            factors.append((parse_variable(vtok), 1))
            expect_factor = False
        elif caret:
            factors[-1] = (factors[-1][0], None)
        # '*' needs no action
    flush()
    return Polynomial(terms)
