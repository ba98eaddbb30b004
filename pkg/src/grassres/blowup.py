"""Chart atlas for the sequential ϑ-, ℘- and ℓ-blowups.

Every chart is an affine patch carrying its variable roster, the transformed
relations, the divisor each coordinate cuts out, and a monomial map from the
root coordinates.  A blowup along two coordinate divisors (y0, y1) produces
the chart y0 -> ζ, y1 -> ζ·y1 and its mirror image; the fresh exceptional
coordinate ζ inherits the label of the coordinate it replaces.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import total_ordering

from . import fpsolve
from .errors import InvalidChart, NonterminationError
from .indexing import parse_index, wp_key
from .model import ChartRelation, defining_system
from .polyengine import (DELTA, EPS, PI, RHO, Delta, Eps, Monomial,
                         Polynomial, Rho, Variable, YInv, substitute)
from .relations import primary_family

log = logging.getLogger(__name__)

VARPI, RHOD, EXC = "varpi", "rho", "exc"


@total_ordering
class Rev:
    """Wrapper that reverses the comparison of its payload."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __eq__(self, other):
        return self.value == other.value

    def __lt__(self, other):
        return other.value < self.value

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return "Rev(%r)" % (self.value,)


@dataclass(frozen=True)
class DivisorHandle:
    kind: str        # varpi | rho | exc
    label: object    # PluckerIndex | pair | occurrence stamp

    def __str__(self):
        if self.kind == VARPI:
            return "X[%s]" % (self.label,)
        if self.kind == RHOD:
            return "X[%s,%s]" % self.label
        return "E%s" % (".".join(str(x) for x in self.label),)


@dataclass(frozen=True)
class CenterSpec:
    first: DivisorHandle
    second: DivisorHandle

    def __str__(self):
        return "{%s, %s}" % (self.first, self.second)


def plus_key(h, m):
    if h.kind == EXC:
        return (0, Rev(h.label))
    if h.kind == VARPI:
        return (1, wp_key(h.label, m))
    return (2, h.label)


def minus_key(h, m):
    if h.kind == EXC:
        return (0, Rev(h.label))
    if h.kind == VARPI:
        return (1, wp_key(h.label, m))
    return (2, h.label)


def phi_key(pair, m):
    return (plus_key(pair[0], m), minus_key(pair[1], m))


@dataclass
class Step:
    kind: str                 # theta | wp | ell
    block: int
    center: object = None
    y0: Variable = None       # coordinate replaced by the exceptional one
    y1: Variable = None       # coordinate divided by it
    zeta: Variable = None
    y: Variable = None        # ℓ only
    sign: int = 1


@dataclass(eq=False)
class Chart:
    id: tuple
    stage: str
    variables: set
    inverted: set
    relations: list
    divisors: dict
    root_map: dict
    basepoint: dict
    parent: "Chart" = None
    step: Step = None
    l_set: frozenset = frozenset()
    flags: set = field(default_factory=set)
    _live: dict = field(default_factory=dict, repr=False)

    @property
    def name(self):
        return "/".join(self.id)

    @property
    def e_set(self):
        return sorted(v.label for v in self.variables if v.kind == EPS)

    @property
    def d_set(self):
        return sorted(v.label for v in self.variables if v.kind == DELTA)

    def var_of(self, handle):
        for v, h in self.divisors.items():
            if h == handle:
                return v
        return None

    def relation(self, name):
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(name)

    def main(self, k, tau):
        return self.relation("B%d.%d" % (k, tau))

    def by_kind(self, *kinds):
        return [r for r in self.relations if r.kind in kinds]

    def polys(self, kinds=None):
        return [r.poly for r in self.relations if kinds is None or r.kind in kinds]

    def is_unit(self, mon):
        return all(v in self.inverted for v, _ in mon)

    def lineage(self):
        out = []
        c = self
        while c is not None:
            out.append(c)
            c = c.parent
        return out[::-1]

    def to_json(self):
        return {
            "id": self.name,
            "stage": self.stage,
            "variables": [{"name": str(v), "invertible": v in self.inverted,
                           "divisor": str(self.divisors[v]) if v in self.divisors else None}
                          for v in sorted(self.variables)],
            "e_set": [str(u) for u in self.e_set],
            "d_set": ["%s,%s" % p for p in self.d_set],
            "l_set": sorted(self.l_set),
            "basepoint": {str(k): str(v) for k, v in sorted(self.basepoint.items())},
            "relations": [{"name": r.name, "kind": r.kind, "poly": str(r.poly)}
                          for r in self.relations],
            "flags": sorted(self.flags),
        }


@dataclass
class PipelineConfig:
    blocks: int = None            # process only the first blocks (truncated model)
    basepoints: str = "all"       # all | default
    max_rho_degree: int = 3
    quotient: bool = True
    primes: tuple = (5, 7)
    enum_bound: int = 12
    max_rounds: int = 64
    max_sets: int = 256
    prune: bool = True
    keep_varpi: bool = False
    stop_after: str = None        # theta | wp | None
    skip_ell: bool = False        # mutation control: leave out the ℓ-blowups


@dataclass
class Atlas:
    m: object
    n: int
    config: PipelineConfig
    family: list
    charts: list
    rho: dict = field(default_factory=dict)
    sigma: dict = field(default_factory=dict)
    drops: list = field(default_factory=list)
    pruned: int = 0
    stage: str = "root"
    notes: list = field(default_factory=list)

    @property
    def blocks(self):
        return len(self.family)

    def by_id(self, name):
        for c in self.charts:
            if c.name == name:
                return c
        raise KeyError(name)

    def stats(self):
        return {
            "charts": len(self.charts),
            "pruned": self.pruned,
            "dropped": len(self.drops),
            "rho": {"%d.%d" % k: v for k, v in sorted(self.rho.items())},
            "sigma": {"%d.%d.%d" % k: v for k, v in sorted(self.sigma.items())},
        }

    def to_json(self):
        return {
            "m": str(self.m),
            "n": self.n,
            "blocks": self.blocks,
            "stage": self.stage,
            "stats": self.stats(),
            "termination": {c.name: {"%d.%d" % k: v for k, v in sorted(termination_flags(self, c).items())}
                            for c in self.charts} if self.stage != "root" else {},
            "charts": [c.to_json() for c in sorted(self.charts, key=lambda c: c.id)],
            "notes": self.notes,
        }


# ---------------------------------------------------------------- centers

def theta_centers(m, n, blocks=None):
    m = parse_index(m)
    return [CenterSpec(DivisorHandle(VARPI, F.u), DivisorHandle(RHOD, Rho(F.m, F.u).label))
            for F in primary_family(m, n, blocks)]


def ell_center(F):
    return CenterSpec(DivisorHandle("L", F.u), DivisorHandle(EXC, (0, None)))


# ---------------------------------------------------------------- root charts

def root_charts(m, n, config):
    m = parse_index(m)
    full = primary_family(m, n)
    fam = full if config.blocks is None else full[:config.blocks]
    if config.basepoints == "all":
        choices = itertools.product(*[range(len(F.terms)) for F in fam])
    elif config.basepoints == "default":
        choices = [tuple(1 for _ in fam)]
    else:
        raise InvalidChart("unknown basepoint policy %r" % (config.basepoints,))
    charts = []
    for choice in choices:
        sys_ = defining_system(m, n, basepoint=list(choice), max_rho_degree=config.max_rho_degree,
                               blocks=len(fam), quotient=config.quotient)
        ones = set(sys_.basepoint.values())
        variables = {Variable(PI, u) for u in _all_indices(m, n)}
        for F in fam:
            variables |= {Rho(a, b) for _, (a, b) in F.terms}
        variables -= ones
        divisors = {}
        for v in variables:
            divisors[v] = DivisorHandle(VARPI if v.kind == PI else RHOD, v.label)
        root_map = {v: Monomial(((v, 1),)) for v in variables}
        for v in ones:
            root_map[v] = Monomial(())
        cid = ("s" + ".".join(str(c) for c in choice),)
        charts.append(Chart(id=cid, stage="root", variables=variables, inverted=set(),
                            relations=sys_.all(), divisors=divisors, root_map=root_map,
                            basepoint=dict(sys_.basepoint)))
    return fam, charts


def _all_indices(m, n):
    from .indexing import enumerate_indices
    return [u for u in enumerate_indices(len(m), n) if u != m]


# ---------------------------------------------------------------- transforms

def _mon_sub(mon, sub):
    out = []
    for v, e in mon:
        if v in sub:
            out.extend((w, f * e) for w, f in sub[v])
        else:
            out.append((v, e))
    return Monomial(out)


def _strip(mon, zeta, k):
    return Monomial([(v, e - k if v == zeta else e) for v, e in mon])


def proper_transform(rel, sub, zeta):
    """Pull back along a monomial substitution and divide out ζ."""
    if rel.plus is not None:
        plus, minus = _mon_sub(rel.plus, sub), _mon_sub(rel.minus, sub)
        k = min(plus.exponent(zeta), minus.exponent(zeta))
        if k:
            plus, minus = _strip(plus, zeta, k), _strip(minus, zeta, k)
        poly = Polynomial.monomial(plus) - Polynomial.monomial(minus)
        return ChartRelation(rel.name, rel.kind, poly, rel.block, rel.tau, plus, minus)
    poly = substitute(rel.poly, {v: Polynomial.monomial(m) for v, m in sub.items()})
    if poly.terms:
        k = min(mon.exponent(zeta) for mon in poly.terms)
        if k:
            poly = Polynomial._from_clean({_strip(mon, zeta, k): c for mon, c in poly.terms.items()})
    return ChartRelation(rel.name, rel.kind, poly, rel.block, rel.tau)


def exceptional_variable(y0):
    if y0.kind in (PI, EPS):
        return Eps(y0.label)
    if y0.kind in (RHO, DELTA):
        return Delta(*y0.label)
    raise InvalidChart("%s cannot carry a blowup center" % (y0,))


def blow_up(chart, y0, y1, stamp, tag, kind="wp", block=0, center=None):
    """The chart of the blowup along (y0, y1) on which y0 becomes exceptional."""
    if y0 not in chart.variables or y1 not in chart.variables:
        return chart
    zeta = exceptional_variable(y0)
    sub = {y0: Monomial(((zeta, 1),)), y1: Monomial(((zeta, 1), (y1, 1)))}
    rels = [proper_transform(r, sub, zeta) for r in chart.relations]
    variables = (chart.variables - {y0}) | {zeta}
    divisors = dict(chart.divisors)
    divisors.pop(y0, None)
    divisors[zeta] = DivisorHandle(EXC, stamp)
    root_map = {v: _mon_sub(mon, sub) for v, mon in chart.root_map.items()}
    child = Chart(id=chart.id + (tag,), stage=chart.stage, variables=variables,
                  inverted=set(chart.inverted), relations=rels, divisors=divisors,
                  root_map=root_map, basepoint=chart.basepoint, parent=chart,
                  step=Step(kind, block, center, y0=y0, y1=y1, zeta=zeta),
                  l_set=chart.l_set, flags=set(chart.flags) - {"liveness-disagreement"})
    return child


def propagate_units(chart):
    """Localize: the other term of a binomial with a unit term is a unit.

    Returns False when some relation is a unit, i.e. the chart misses 𝒱̃.
    """
    changed = True
    while changed:
        changed = False
        for r in chart.relations:
            terms = list(r.poly.terms.items())
            if not terms:
                continue
            if len(terms) == 1:
                if chart.is_unit(terms[0][0]):
                    return False
                continue
            if len(terms) != 2:
                continue
            (m0, _), (m1, _) = terms
            for a, b in ((m0, m1), (m1, m0)):
                if chart.is_unit(a) and not chart.is_unit(b):
                    chart.inverted.update(b.variables())
                    changed = True
    return True


# ---------------------------------------------------------------- emptiness / liveness

def _structurally_empty(chart, zero=()):
    zero = set(zero)
    if zero & chart.inverted:
        return True
    sub = {v: 0 for v in zero}
    for r in chart.relations:
        p = substitute(r.poly, sub) if zero.intersection(r.poly.variables()) else r.poly
        if len(p.terms) == 1 and chart.is_unit(next(iter(p.terms))):
            return True
    return False


def _enumerable(chart, config):
    return len(chart.variables) <= config.enum_bound


def has_points(chart, config, zero=()):
    """Three-valued: True / False / None (primes disagree).

    Structural emptiness is decisive; otherwise small charts are searched at
    every configured prime and larger ones are presumed nonempty.
    """
    if _structurally_empty(chart, zero):
        return False
    if not _enumerable(chart, config):
        return True
    polys = chart.polys()
    found = [fpsolve.has_point(polys, chart.variables, p, zero=zero,
                               nonzero=chart.inverted - set(zero), max_free=config.enum_bound)
             for p in config.primes]
    if all(found):
        return True
    if not any(found):
        return False
    return None


def center_live(chart, a, b, config):
    key = (a, b)
    if key not in chart._live:
        res = has_points(chart, config, zero=(a, b))
        if res is None:
            chart.flags.add("liveness-disagreement")
            res = True
        chart._live[key] = res
    return chart._live[key]


def chart_empty(chart, config):
    res = has_points(chart, config)
    if res is None:
        chart.flags.add("uncertain")
        return False
    return not res


# ---------------------------------------------------------------- ℘ machinery

def _excluded(handle, F, k):
    return (handle.kind == RHOD and handle.label == Rho(F.m, F.u).label) or \
           (handle.kind == EXC and handle.label == (0, k))


def pre_wp_sets(chart, k, tau, F, config, live=True):
    """Pairs (Y+, Y-) of divisors associated with the two terms of B_(kτ)."""
    try:
        rel = chart.main(k, tau)
    except KeyError:
        return []
    out = []
    plus = [v for v, _ in rel.plus if v not in chart.inverted and v in chart.divisors]
    minus = [v for v, _ in rel.minus if v not in chart.inverted and v in chart.divisors
             and not _excluded(chart.divisors[v], F, k)]
    for a in plus:
        for b in minus:
            if a == b:
                continue
            if live and not center_live(chart, a, b, config):
                continue
            out.append((chart.divisors[a], chart.divisors[b]))
    return out


def wp_sets(charts, k, tau, F, config):
    pairs = set()
    for ch in charts:
        pairs.update(pre_wp_sets(ch, k, tau, F, config))
    return sorted(pairs, key=lambda p: phi_key(p, F.m))


def _finish_children(parent, c0, c1, config, atlas):
    kept = []
    for c in (c0, c1):
        if not propagate_units(c):
            atlas.pruned += 1
            continue
        kept.append(c)
    alive = {id(c) for c in kept}
    drop0 = id(c0) in alive and c0.step.y1 in c0.inverted
    drop1 = id(c1) in alive and c1.step.y1 in c1.inverted
    if drop0 and drop1:
        drop1 = False
    out = []
    for c, drop in ((c0, drop0), (c1, drop1)):
        if id(c) not in alive:
            continue
        if drop:
            atlas.drops.append(c.name)
            continue
        if config.prune and chart_empty(c, config):
            atlas.pruned += 1
            continue
        out.append(c)
    return out


def _apply_center(chart, hp, hm, stamp, tag, config, atlas, kind, block, keep_both=False):
    a, b = chart.var_of(hp), chart.var_of(hm)
    if a is None or b is None or a in chart.inverted or b in chart.inverted:
        return [chart]
    if not center_live(chart, a, b, config):
        return [chart]
    center = CenterSpec(hp, hm)
    c0 = blow_up(chart, a, b, stamp, tag + "+", kind, block, center)
    c1 = blow_up(chart, b, a, stamp, tag + "-", kind, block, center)
    if keep_both:
        out = []
        for c in (c0, c1):
            if propagate_units(c):
                out.append(c)
            else:
                atlas.pruned += 1
        return out
    return _finish_children(chart, c0, c1, config, atlas)


# ---------------------------------------------------------------- stages

def theta_stage(atlas, config):
    charts = atlas.charts
    for k, F in enumerate(atlas.family, start=1):
        hp, hm = DivisorHandle(RHOD, Rho(F.m, F.u).label), DivisorHandle(VARPI, F.u)
        new = []
        for ch in charts:
            a, b = ch.var_of(hp), ch.var_of(hm)
            if a is None or b is None:
                new.append(ch)
                continue
            # ϱ-chart first (x_(m,u) exceptional), then the ϖ-chart
            c0 = blow_up(ch, a, b, (0, k), "t%dr" % k, "theta", k, CenterSpec(hm, hp))
            c1 = blow_up(ch, b, a, (0, k), "t%dw" % k, "theta", k, CenterSpec(hm, hp))
            for c in (c0, c1):
                c.stage = "theta%d" % k
            if config.keep_varpi:
                for c in (c0, c1):
                    if propagate_units(c):
                        new.append(c)
                    else:
                        atlas.pruned += 1
            else:
                new.extend(_finish_children(ch, c0, c1, config, atlas))
        charts = new
    atlas.charts = charts
    atlas.stage = "theta"


def wp_stage(atlas, k, config):
    F = atlas.family[k - 1]
    charts = atlas.charts
    for tau in range(1, F.t_F + 1):
        mu = 0
        while True:
            sets_ = wp_sets(charts, k, tau, F, config)
            if not sets_:
                break
            mu += 1
            if mu > config.max_rounds:
                raise NonterminationError("B%d.%d needs more than %d rounds" % (k, tau, config.max_rounds))
            if len(sets_) > config.max_sets:
                raise NonterminationError("B%d.%d round %d has %d centers (cap %d)"
                                          % (k, tau, mu, len(sets_), config.max_sets))
            atlas.sigma[(k, tau, mu)] = len(sets_)
            for h, (hp, hm) in enumerate(sets_, start=1):
                stamp = (1, k, 0, tau, mu, h)
                new = []
                for ch in charts:
                    out = _apply_center(ch, hp, hm, stamp, "p%d.%d.%d.%d" % (k, tau, mu, h),
                                        config, atlas, "wp", k)
                    for c in out:
                        if c is not ch:
                            c.stage = "wp%d.%d.%d.%d" % (k, tau, mu, h)
                    new.extend(out)
                charts = new
        atlas.rho[(k, tau)] = mu
    atlas.charts = charts
    atlas.stage = "wp%d" % k


def ell_blowup(atlas, k, config):
    """ℓ_k: on the chart where x_(m,u) is not set to one, L_k becomes 1 + sgn·y."""
    F = atlas.family[k - 1]
    delta = Delta(F.m, F.u)
    y = YInv(F.m, F.u)
    sgn = F.terms[0][0]
    out = []
    for ch in atlas.charts:
        if ch.basepoint[k] == Rho(F.m, F.u):
            out.append(ch)
            continue
        if delta not in ch.variables:
            ch.flags.add("no-ell-%d" % k)
            out.append(ch)
            continue
        L = ch.relation("L%d" % k)
        dterms = {mon: c for mon, c in L.poly.terms.items() if mon.exponent(delta)}
        if dterms != {Monomial(((delta, 1),)): sgn}:
            raise InvalidChart("chart %s: L%d is not of the form sgn·δ + L*" % (ch.name, k))
        Lstar = L.poly - Polynomial.var(delta) * sgn
        G = Polynomial.var(delta) - Lstar * Polynomial.var(y)
        rels = []
        for r in ch.relations:
            if r.name == "L%d" % k:
                rels.append(ChartRelation(r.name, "linear", Polynomial.const(1) + Polynomial.var(y) * sgn,
                                          block=k))
                rels.append(ChartRelation("G%d" % k, "chart", G, block=k))
            else:
                rels.append(r)
        divisors = dict(ch.divisors)
        divisors[delta] = DivisorHandle(EXC, (1, k, 1))
        child = Chart(id=ch.id + ("l%d" % k,), stage="ell%d" % k, variables=ch.variables | {y},
                      inverted=ch.inverted | {y}, relations=rels, divisors=divisors,
                      root_map=dict(ch.root_map), basepoint=ch.basepoint, parent=ch,
                      step=Step("ell", k, ell_center(F), y=y, sign=sgn),
                      l_set=ch.l_set | {k}, flags=set(ch.flags))
        if not propagate_units(child):
            atlas.pruned += 1
            continue
        if config.prune and chart_empty(child, config):
            atlas.pruned += 1
            continue
        out.append(child)
    atlas.charts = out
    atlas.stage = "ell%d" % k


def termination_flags(atlas, chart, blocks=None):
    """Per main binomial: unit+ / unit- / dead-centers / open."""
    out = {}
    done = atlas.blocks if blocks is None else blocks
    for k, F in enumerate(atlas.family[:done], start=1):
        for tau in range(1, F.t_F + 1):
            try:
                rel = chart.main(k, tau)
            except KeyError:
                continue
            if chart.is_unit(rel.plus):
                out[(k, tau)] = "unit+"
            elif chart.is_unit(rel.minus):
                out[(k, tau)] = "unit-"
            elif not pre_wp_sets(chart, k, tau, F, atlas.config):
                out[(k, tau)] = "dead-centers"
            else:
                out[(k, tau)] = "open"
    return out


def run_pipeline(m, n, config=None):
    config = config or PipelineConfig()
    m = parse_index(m)
    fam, charts = root_charts(m, n, config)
    atlas = Atlas(m=m, n=n, config=config, family=fam, charts=[])
    for ch in charts:
        if not propagate_units(ch) or (config.prune and chart_empty(ch, config)):
            atlas.pruned += 1
            continue
        atlas.charts.append(ch)
    theta_stage(atlas, config)
    if config.stop_after == "theta":
        return atlas
    for k in range(1, len(fam) + 1):
        wp_stage(atlas, k, config)
        if config.stop_after == "wp" and k == len(fam):
            return atlas
        if not config.skip_ell:
            ell_blowup(atlas, k, config)
    atlas.charts.sort(key=lambda c: c.id)
    atlas.stage = "final" if not config.skip_ell else "no-ell"
    return atlas


def theta_atlas(m, n, basepoints="default", keep_varpi=True, blocks=None, **kw):
    cfg = PipelineConfig(blocks=blocks, basepoints=basepoints, keep_varpi=keep_varpi,
                         stop_after="theta", prune=False, **kw)
    return run_pipeline(m, n, cfg)


def residual_identity_holds(chart, F, k):
    """Check B(s,t) against the two main transforms on a ϑ-stage chart."""
    nl = F.non_leading()
    eps = Eps(F.u)
    mains = {tau: chart.main(k, tau).poly for tau in range(1, F.t_F + 1)}
    ok = True
    for (i, (_, s)), (j, (_, t)) in itertools.combinations(enumerate(nl, start=1), 2):
        res = chart.relation("R%d.%d.%d" % (k, i, j)).poly
        if eps in chart.variables and chart.root_map[Variable(PI, F.u)] == Monomial(((eps, 1),)):
            ct = _pulled(chart, [Variable(PI, t[0]), Variable(PI, t[1])])
            cs = _pulled(chart, [Variable(PI, s[0]), Variable(PI, s[1])])
        else:
            ct = _pulled(chart, [Rho(*t)])
            cs = _pulled(chart, [Rho(*s)])
        ok &= (res == ct * mains[i] - cs * mains[j])
    return ok


def _pulled(chart, variables):
    mon = Monomial(())
    for v in variables:
        mon = mon * chart.root_map.get(v, Monomial(((v, 1),)))
    return Polynomial.monomial(mon)
