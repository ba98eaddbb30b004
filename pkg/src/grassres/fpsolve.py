"""Exhaustive 𝔽_p solver for small polynomial systems.

Depth-first search over a variable order chosen so that equations become
fully assigned as early as possible; each equation is checked at the level
of its last variable.  Domains can be pinned, restricted to nonzero values
or fixed to a constant.
"""

from .errors import InvalidParameters, ResourceLimit
from .polyengine import is_prime

DEFAULT_MAX_FREE = 12


def _compile(poly, index, p):
    terms = []
    for mon, c in poly.terms.items():
        c %= p
        if c:
            terms.append((c, tuple((index[v], e) for v, e in mon)))
    return terms


def _eval(terms, vals, p):
    s = 0
    for c, mon in terms:
        t = c
        for i, e in mon:
            x = vals[i]
            if not x:
                t = 0
                break
            t = t * (x if e == 1 else pow(x, e, p))
        s += t
    return s % p


_ORDER_CACHE = {}


def _order(variables, supports):
    """Greedy order: next variable completes most equations, then most frequent."""
    key = (frozenset(variables), tuple(frozenset(s) for s in supports))
    hit = _ORDER_CACHE.get(key)
    if hit is not None:
        return list(hit)
    remaining = set(variables)
    pending = [set(s) for s in supports]
    freq = {v: sum(v in s for s in supports) for v in variables}
    tie = {v: _neg_key(v) for v in variables}
    order = []
    while remaining:
        singles = {}
        pairs = {}
        for s in pending:
            if len(s) == 1:
                v = next(iter(s))
                singles[v] = singles.get(v, 0) + 1
            elif len(s) == 2:
                for v in s:
                    pairs[v] = pairs.get(v, 0) + 1
        best = max(remaining, key=lambda v: (singles.get(v, 0), pairs.get(v, 0), freq[v], tie[v]))
        order.append(best)
        remaining.discard(best)
        for s in pending:
            s.discard(best)
    if len(_ORDER_CACHE) > 20000:
        _ORDER_CACHE.clear()
    _ORDER_CACHE[key] = tuple(order)
    return order


def _neg_key(v):
    # deterministic tie-break; earlier variables win
    return tuple(-x for x in _flat(v))


def _flat(v):
    out = [v.kind]
    for part in (v.label if v.is_pair else (v.label,)):
        out.extend(part)
        out.append(0)
    return out


class System:
    """A compiled system whose fixed coordinates can be re-assigned cheaply."""

    def __init__(self, polys, variables, prime, zero=(), nonzero=(), fixed=(),
                 max_free=DEFAULT_MAX_FREE):
        if not is_prime(prime):
            raise InvalidParameters("%r is not prime" % (prime,))
        p = self.prime = prime
        fixed = set(fixed)
        zero = set(zero)
        nonzero = set(nonzero)
        allv = set(variables)
        for q in polys:
            allv.update(q.variables())
        allv |= zero | fixed
        free = [v for v in allv if v not in zero and v not in fixed]
        if max_free is not None and len(free) > max_free:
            raise ResourceLimit("%d free variables exceed the bound %d; use sampling instead"
                                % (len(free), max_free))
        consts = sorted(v for v in allv if v in zero or v in fixed)
        fset = set(free)
        order = consts + _order(free, [[v for v in q.variables() if v in fset] for q in polys])
        self.order = order
        index = {v: i for i, v in enumerate(order)}
        self.index = index
        self.empty = False
        checks = [[] for _ in order]
        for q in polys:
            terms = _compile(q, index, p)
            if not terms:
                continue
            last = max((i for _, mon in terms for i, _ in mon), default=-1)
            if last < 0:
                self.empty = True  # nonzero constant
                continue
            checks[last].append(terms)
        # an equation linear in its last variable determines that variable
        solvers = []
        for level, cs in enumerate(checks):
            lin = None
            for terms in cs:
                if all(e == 1 for _, mon in terms for i, e in mon if i == level):
                    with_v = [(c, tuple((i, e) for i, e in mon if i != level))
                              for c, mon in terms if any(i == level for i, _ in mon)]
                    rest = [(c, mon) for c, mon in terms if all(i != level for i, _ in mon)]
                    lin = (with_v, rest, [t for t in cs if t is not terms])
                    break
            solvers.append(lin)
        self.checks = checks
        self.solvers = solvers
        self.domains = []
        for v in order:
            if v in zero:
                self.domains.append((0,))
            elif v in fixed:
                self.domains.append(None)
            elif v in nonzero:
                self.domains.append(tuple(range(1, p)))
            else:
                self.domains.append(tuple(range(p)))
        self.inverse = [0] + [pow(x, p - 2, p) for x in range(1, p)]

    def solve(self, values=None, first_only=False):
        """Yield solutions with the fixed coordinates set from ``values``."""
        if self.empty:
            return
        p = self.prime
        domains = list(self.domains)
        values = values or {}
        for i, v in enumerate(self.order):
            if domains[i] is None:
                domains[i] = (values[v] % p,)
        order, checks, solvers, inverse = self.order, self.checks, self.solvers, self.inverse
        n = len(order)
        vals = [0] * n

        def rec(level):
            if level == n:
                yield {v: vals[i] for i, v in enumerate(order)}
                return
            cs = checks[level]
            dom = domains[level]
            lin = solvers[level]
            if lin is not None:
                with_v, rest, cs = lin
                vals[level] = 1
                a = _eval(with_v, vals, p)
                b = _eval(rest, vals, p)
                if a:
                    x = (-b * inverse[a]) % p
                    dom = (x,) if x in dom else ()
                elif b:
                    dom = ()
            for x in dom:
                vals[level] = x
                ok = True
                for terms in cs:
                    if _eval(terms, vals, p):
                        ok = False
                        break
                if ok:
                    yield from rec(level + 1)

        gen = rec(0)
        if first_only:
            for pt in gen:
                yield pt
                return
        else:
            yield from gen

    def count(self, values=None):
        return sum(1 for _ in self.solve(values))


def solve(polys, variables, prime, zero=(), nonzero=(), fixed=None,
          max_free=DEFAULT_MAX_FREE, first_only=False):
    """Yield every 𝔽_p point of ``polys = 0`` as a dict over ``variables``.

    ``zero`` variables are pinned to 0, ``nonzero`` range over 𝔽_p^*, and
    ``fixed`` maps variables to given residues.  Variables of the system not
    listed in ``variables`` are added automatically.
    """
    fixed = dict(fixed or {})
    system = System(polys, variables, prime, zero=zero, nonzero=nonzero, fixed=set(fixed),
                    max_free=max_free)
    yield from system.solve(fixed, first_only=first_only)


def has_point(polys, variables, prime, **kw):
    for _ in solve(polys, variables, prime, first_only=True, **kw):
        return True
    return False


def count_points(polys, variables, prime, **kw):
    return sum(1 for _ in solve(polys, variables, prime, **kw))
