"""Γ-schemes, matroids, and the transport of Γ-data through the atlas.

A Γ-scheme is the chart of the Grassmannian cut by ``x_u = 0`` for u in Γ.
Its transform on every chart is tracked through generic points: random
𝔽_p points of the dense cell (all coordinates outside Γ nonzero) are lifted
along the substitution chain.  A coordinate joins Γ̃⁼⁰ when it vanishes at
every landed sample; a coordinate left undetermined by a blowup whose center
contains the transform is fixed to 1 and joins Γ̃⁼¹.
"""

import random
from dataclasses import dataclass, field

from .errors import (InsufficientSampling, InvalidChartForMatroid, InvalidEntry,
                     NotAMatroid)
from .indexing import basic_variables, enumerate_indices, parse_index
from .polyengine import PI, RHO, Pi, Polynomial, Rho, Variable, substitute
from .relations import express_in_basic, primary_family

DEFAULT_SAMPLES = 12
MIN_LANDED = 3


@dataclass(frozen=True)
class Gamma:
    members: frozenset = frozenset()

    @classmethod
    def of(cls, items):
        if isinstance(items, Gamma):
            return items
        return cls(frozenset(parse_index(u) for u in (items or ())))

    def validate(self, m, n):
        m = parse_index(m)
        valid = set(enumerate_indices(len(m), n))
        for u in self.members:
            if u not in valid or u == m:
                raise InvalidEntry("%s is not a coordinate of the chart %s" % (u, m))
        return self

    def variables(self):
        return {Pi(u) for u in self.members}

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)

    def __str__(self):
        return "{%s}" % ", ".join("x[%s]" % (u,) for u in sorted(self.members))

    def to_json(self):
        return [list(u) for u in sorted(self.members)]


@dataclass(frozen=True)
class Matroid:
    n: int
    d: int
    bases: frozenset

    def __post_init__(self):
        bases = frozenset(parse_index(b) for b in self.bases)
        object.__setattr__(self, "bases", bases)
        if not bases:
            raise NotAMatroid("a matroid needs at least one basis")
        for b in bases:
            if len(b) != self.d or b[-1] > self.n:
                raise NotAMatroid("basis %s does not fit rank %d on %d elements" % (b, self.d, self.n))
        for a in bases:
            for b in bases:
                for x in set(a) - set(b):
                    if not any(parse_index(sorted((set(a) - {x}) | {y})) in bases
                               for y in set(b) - set(a)):
                        raise NotAMatroid("basis exchange fails for %s, %s at %d" % (a, b, x))

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(n=int(obj["n"]), d=int(obj["d"]), bases=frozenset(map(tuple, obj["bases"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise NotAMatroid("malformed matroid description: %s" % exc) from None

    @classmethod
    def uniform(cls, d, n):
        return cls(n=n, d=d, bases=frozenset(enumerate_indices(d, n)))


def matroid_to_gamma(M, m):
    m = parse_index(m)
    if m not in M.bases:
        raise InvalidChartForMatroid("%s is not a basis of the matroid" % (m,))
    return Gamma(frozenset(u for u in enumerate_indices(M.d, M.n) if u not in M.bases and u != m))


def gamma_scheme(gamma, m, n):
    m = parse_index(m)
    gamma = Gamma.of(gamma)
    return [Polynomial.var(Pi(u)) for u in gamma] + [F.polynomial() for F in primary_family(m, n)]


def is_relevant(F, gamma):
    g = Gamma.of(gamma).members
    if F.u in g:
        return any(a not in g and b not in g for _, (a, b) in F.non_leading())
    return True


# ---------------------------------------------------------------- states

@dataclass
class GammaState:
    chart_id: str
    zero_set: set = field(default_factory=set)
    one_set: set = field(default_factory=set)
    samples: list = field(default_factory=list)     # (prime, point)
    flags: set = field(default_factory=set)

    @property
    def landed(self):
        return len(self.samples)

    @property
    def uncertain(self):
        return bool(self.flags)

    def to_json(self):
        return {"chart": self.chart_id, "zero": sorted(map(str, self.zero_set)),
                "one": sorted(map(str, self.one_set)), "landed": self.landed,
                "flags": sorted(self.flags)}


def containment_test(state, center_vars):
    y0, y1 = center_vars
    return y0 in state.zero_set and y1 in state.zero_set


# ---------------------------------------------------------------- sampling

def sample_points(gamma, m, n, prime, count, rng, max_attempts=None):
    """Random 𝔽_p points of the dense cell of Z_Γ as {index: value}."""
    m = parse_index(m)
    gamma = Gamma.of(gamma)
    basic = sorted(basic_variables(m, n))
    others = [u for u in enumerate_indices(len(m), n) if u != m and u not in set(basic)]
    exprs = {u: express_in_basic(m, u, n) for u in others}
    max_attempts = max_attempts or 400 * count * (1 + len(gamma))
    out = []
    seen = set()
    for _ in range(max_attempts):
        pt = {u: 0 if u in gamma.members else rng.randrange(1, prime) for u in basic}
        env = {Pi(u): v for u, v in pt.items()}
        ok = True
        for u in others:
            val = _eval_mod(exprs[u], env, prime)
            if (val == 0) != (u in gamma.members):
                ok = False
                break
            pt[u] = val
        if not ok:
            continue
        key = tuple(sorted(pt.items()))
        if key in seen:
            continue
        seen.add(key)
        out.append(pt)
        if len(out) >= count:
            break
    return out


def _eval_mod(poly, env, p):
    s = 0
    for mon, c in poly.terms.items():
        t = c
        for v, e in mon:
            t = t * (env[v] if e == 1 else pow(env[v], e, p))
        s += t
    return s % p


# ---------------------------------------------------------------- lifting

def _solve_linear(rows, unknowns, p):
    """Row-reduce rows {var: coeff, None: const} (meaning Σ c·v + const = 0).

    Returns (pivots, solution) with non-pivot unknowns set to 0, or None when
    the system is inconsistent.
    """
    mat = [[r.get(v, 0) % p for v in unknowns] + [(-r.get(None, 0)) % p] for r in rows]
    pivots = []
    row = 0
    for col in range(len(unknowns)):
        piv = next((i for i in range(row, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        inv = pow(mat[row][col], p - 2, p)
        mat[row] = [x * inv % p for x in mat[row]]
        for i in range(len(mat)):
            if i != row and mat[i][col]:
                f = mat[i][col]
                mat[i] = [(a - f * b) % p for a, b in zip(mat[i], mat[row])]
        pivots.append(col)
        row += 1
    for i in range(row, len(mat)):
        if mat[i][-1]:
            return None
    sol = {v: 0 for v in unknowns}
    for i, col in enumerate(pivots):
        sol[unknowns[col]] = mat[i][-1]
    return [unknowns[c] for c in pivots], sol


def _linear_rows(polys, unknowns, p):
    rows = []
    for q in polys:
        r = {}
        for mon, c in q.terms.items():
            us = [(v, e) for v, e in mon if v in unknowns]
            if len(us) > 1 or (us and us[0][1] > 1):
                return None
            key = us[0][0] if us else None
            r[key] = (r.get(key, 0) + c) % p
        rows.append(r)
    return rows


def root_lift(chart, family, base, prime):
    """Lift a Plücker point to the root chart; None when it does not land."""
    p = prime
    pt = {Variable(PI, u): v % p for u, v in base.items()}
    m = family[0].m if family else None
    val = dict(pt)
    info = {"det": {}}
    for k, F in enumerate(family, start=1):
        b = chart.basepoint[k]
        phis = {Rho(a, c): (_pv(base, a, m) * _pv(base, c, m)) % p for _, (a, c) in F.terms}
        if any(phis.values()):
            den = phis[b]
            if not den:
                return None, info
            inv = pow(den, p - 2, p)
            for v, x in phis.items():
                if v != b:
                    val[v] = x * inv % p
            continue
        # all φ-images vanish: the block is read off from the linear relations
        block_vars = sorted(v for v in phis if v != b)
        rels = [r.poly for r in chart.relations
                if (r.kind == "linear" and r.block == k) or
                (r.kind == "quotient" and _rho_blocks(r.poly, family) <= set(range(1, k + 1))
                 and k in _rho_blocks(r.poly, family))]
        known = {v: x for v, x in val.items()}
        known[b] = 1
        polys = [substitute(q, {v: x for v, x in known.items() if v in set(q.variables())}) for q in rels]
        rows = _linear_rows(polys, set(block_vars), p)
        if rows is None:
            return None, info
        res = _solve_linear(rows, block_vars, p)
        if res is None:
            return None, info
        pivots, sol = res
        info["det"][k] = tuple(pivots)
        val.update(sol)
    return {v: val[v] for v in chart.variables}, info


def _pv(base, u, m):
    return 1 if u == m else base[u]


def _rho_blocks(poly, family):
    blocks = set()
    for v in poly.variables():
        if v.kind == RHO:
            for k, F in enumerate(family, start=1):
                if any(Rho(a, c) == v for _, (a, c) in F.terms):
                    blocks.add(k)
    return blocks


def _check(chart, point, p, relations=True):
    if not all(point[v] for v in chart.inverted):
        return False
    if relations:
        for r in chart.relations:
            if _eval_mod(r.poly, point, p):
                return False
    return True


def lift_step(child, parent_point, prime):
    """Lift a parent point across one blowup; returns (point, rank0_var, flag)."""
    p = prime
    st = child.step
    if st.kind == "ell":
        pt = dict(parent_point)
        pt[st.y] = (-st.sign) % p
        return pt, None, None
    a, b = parent_point[st.y0], parent_point[st.y1]
    pt = {v: x for v, x in parent_point.items() if v != st.y0}
    pt[st.zeta] = a
    if a:
        pt[st.y1] = b * pow(a, p - 2, p) % p
        return pt, None, None
    if b:
        return None, None, None
    # the point lies on the center: the new coordinate is read off the relations
    t = st.y1
    roots = None
    for r in child.relations:
        if t not in set(r.poly.variables()):
            continue
        q = substitute(r.poly, {v: x for v, x in pt.items() if v != t and v in set(r.poly.variables())})
        vals = {x for x in range(p) if _eval_mod(q, {t: x}, p) == 0}
        if len(vals) == p:
            continue
        roots = vals if roots is None else roots & vals
    if roots is None:
        pt[t] = 1
        return pt, t, None
    if not roots:
        return None, None, None
    flag = "multiple-roots" if len(roots) > 1 else None
    pt[t] = min(roots)
    return pt, None, flag


class GammaTransport:
    """Generic-point transport of Z_Γ through an atlas."""

    def __init__(self, atlas, gamma, primes=(5, 7), samples=DEFAULT_SAMPLES, seed=0,
                 min_landed=MIN_LANDED):
        self.atlas = atlas
        self.gamma = Gamma.of(gamma).validate(atlas.m, atlas.n)
        self.primes = tuple(primes)
        self.min_landed = min_landed
        rng = random.Random(seed)
        self.bases = {}
        for p in self.primes:
            pts = sample_points(self.gamma, atlas.m, atlas.n, p, samples, rng)
            self.bases[p] = pts
        if not any(self.bases.values()):
            raise InsufficientSampling("no dense-cell points of Z_Γ found at primes %s" % (self.primes,))
        self._memo = {}
        self.notes = []

    def lift(self, chart, prime, i):
        key = (id(chart), prime, i)
        if key in self._memo:
            return self._memo[key]
        base = self.bases[prime][i]
        if chart.parent is None:
            pt, info = root_lift(chart, self.atlas.family, base, prime)
            res = (pt, frozenset(), frozenset(), info.get("det", {}))
            if pt is not None and not _check(chart, pt, prime):
                res = (None, frozenset(), frozenset(["root-mismatch"]), {})
        else:
            ppt, rank0, flags, det = self.lift(chart.parent, prime, i)
            if ppt is None:
                res = (None, rank0, flags, det)
            else:
                pt, r0, flag = lift_step(chart, ppt, prime)
                if pt is not None:
                    pt = {v: pt[v] for v in chart.variables}
                    if not _check(chart, pt, prime, relations=False):
                        pt = None
                r0s = rank0 | ({r0} if r0 else set())
                fl = flags | ({flag} if flag else set())
                res = (pt, frozenset(r0s), frozenset(fl), det)
        self._memo[key] = res
        return res

    def state(self, chart):
        st = GammaState(chart.name)
        pts = []
        rank0 = set()
        dets = {}
        for p in self.primes:
            for i in range(len(self.bases[p])):
                pt, r0, fl, det = self.lift(chart, p, i)
                if pt is None:
                    continue
                if not _check(chart, pt, p):
                    st.flags.add("lift-mismatch")
                    continue
                pts.append((p, pt))
                rank0 |= r0
                st.flags |= fl
                for k, piv in det.items():
                    dets.setdefault(k, set()).add(piv)
        st.samples = pts
        if any(len(v) > 1 for v in dets.values()):
            st.flags.add("pivot-disagreement")
        if not pts:
            return st
        if len(pts) < self.min_landed and self.gamma.members:
            st.flags.add("few-samples")
        st.zero_set = {v for v in chart.variables if all(pt[v] == 0 for _, pt in pts)}
        st.one_set = {v for v in rank0 if v in chart.variables and all(pt[v] == 1 for _, pt in pts)}
        per_prime = {p: {v for v in chart.variables if all(pt[v] == 0 for q, pt in pts if q == p)}
                     for p in self.primes if any(q == p for q, _ in pts)}
        if len({frozenset(s) for s in per_prime.values()}) > 1:
            st.flags.add("prime-disagreement")
        return st

    def states(self, charts=None):
        out = {}
        for ch in charts if charts is not None else self.atlas.charts:
            st = self.state(ch)
            if st.samples:
                out[ch.name] = st
        return out


def f_transform_step(state, F, gamma, values):
    """Γ-state update of one block at the root from sampled values.

    ``values`` holds the lifted ϱ-coordinates of the block at each sample.
    Relevant blocks gain the ϱ-coordinates that vanish at every sample;
    irrelevant blocks gain the undetermined and identically-zero ones.
    """
    zero = set(state.zero_set)
    for v in sorted({Rho(a, b) for _, (a, b) in F.terms}):
        if values and all(pt.get(v, 1) == 0 for pt in values):
            zero.add(v)
    return GammaState(state.chart_id, zero, set(state.one_set), state.samples, set(state.flags))


def transform_through_blowup(transport, child):
    """Γ-state of a chart computed from the lifted samples of its lineage."""
    return transport.state(child)


def relevant_pairs(F, gamma):
    """ϱ-coordinates of a relevant block that vanish along Z_Γ."""
    g = Gamma.of(gamma).members
    return {Rho(a, b) for _, (a, b) in F.terms if a in g or b in g}
