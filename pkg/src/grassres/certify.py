"""Point enumeration, Jacobian ranks and smoothness certificates over 𝔽_p.

On every final chart met by the transform of Z_Γ the certified system is
the main binomials, the linearized relations and the ℓ chart relations,
restricted by Γ̃⁼⁰ = 0.  The chart relation G_k = δ - L*·y contributes one
row of full rank through the δ column, so its rank is subtracted before
comparing with |ℬ^mn| + Υ.
"""

import logging
import os
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import fpsolve
from .errors import InsufficientSampling, ResourceLimit
from .gamma import Gamma, GammaState, GammaTransport, sample_points
from .polyengine import PI, Polynomial, Variable, partial_derivative, substitute

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SMOOTH, FAIL, UNCERTAIN = "SMOOTH", "FAIL", "UNCERTAIN"
CERT_KINDS = ("main", "linear", "chart", "extra")
SCOPE = ("finite-field evidence: Jacobian ranks checked at every point over the listed primes; "
         "not a proof of smoothness in characteristic zero")


def enumerate_points(system, prime, gamma_state=None, variables=None, nonzero=(),
                     max_free=fpsolve.DEFAULT_MAX_FREE):
    """All 𝔽_p points of ``system`` with Γ̃⁼⁰ pinned to 0, Γ̃⁼¹ and ``nonzero`` nonzero."""
    variables = set(variables or ())
    zero, ones = set(), set()
    if gamma_state is not None:
        zero, ones = set(gamma_state.zero_set), set(gamma_state.one_set)
    return list(fpsolve.solve(list(system), variables, prime, zero=zero,
                              nonzero=(set(nonzero) | ones) - zero, max_free=max_free))


def rank_mod_p(rows, p):
    mat = [[x % p for x in r] for r in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], p - 2, p)
        prow = [x * inv % p for x in mat[rank]]
        mat[rank] = prow
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                f = mat[i][col]
                mat[i] = [(a - f * b) % p for a, b in zip(mat[i], prow)]
        rank += 1
    return rank


def _eval(poly, point, p):
    s = 0
    for mon, c in poly.terms.items():
        t = c
        for v, e in mon:
            t = t * pow(point.get(v, 0), e, p)
        s += t
    return s % p


def jacobian(system, variables):
    variables = sorted(variables)
    return variables, [[partial_derivative(q, v) for v in variables] for q in system]


def jacobian_rank_at(system, point, prime, variables=None):
    if variables is None:
        variables = set()
        for q in system:
            variables.update(q.variables())
    cols, J = jacobian(system, variables)
    return rank_mod_p([[_eval(d, point, prime) for d in row] for row in J], prime)


@dataclass
class ChartReport:
    id: str
    points_checked: int = 0
    rank_expected: int = 0
    rank_min: int = None
    rank_max: int = None
    passed: bool = True
    witness: dict = None
    per_prime: dict = field(default_factory=dict)
    audit_quotient: bool = True
    flags: list = field(default_factory=list)

    def to_json(self):
        return {"id": self.id, "points_checked": self.points_checked,
                "rank_expected": self.rank_expected, "rank_min": self.rank_min,
                "pass": self.passed, "per_prime": {str(p): n for p, n in sorted(self.per_prime.items())},
                "quotient_audit": self.audit_quotient, "flags": self.flags,
                **({"witness": self.witness} if self.witness else {})}


@dataclass
class Certificate:
    gamma: Gamma
    primes: tuple
    charts: list
    verdict: str
    uncertain: list = field(default_factory=list)
    witness: dict = None
    birational: dict = None
    seed: int = 0
    m: str = ""
    n: int = 0

    def to_json(self):
        out = {
            "schema_version": SCHEMA_VERSION,
            "chart": self.m,
            "n": self.n,
            "gamma": self.gamma.to_json(),
            "primes": list(self.primes),
            "seed": self.seed,
            "charts": [c.to_json() for c in self.charts],
            "verdict": self.verdict,
            "uncertain": self.uncertain,
            "scope": SCOPE,
            "birational": self.birational or {"trials": 0, "fiber_histogram": {}},
        }
        if self.witness:
            out["witness"] = self.witness
        return out


def certification_system(chart, state):
    zero = state.zero_set if state else set()
    rels = [r for r in chart.relations if r.kind in CERT_KINDS]
    sub = {v: 0 for v in zero}
    polys = [substitute(r.poly, sub) if sub else r.poly for r in rels]
    return rels, polys


def expected_rank(chart):
    return sum(1 for r in chart.relations if r.kind in ("main", "linear", "extra"))


def certify_chart(chart, state, primes, max_free=fpsolve.DEFAULT_MAX_FREE):
    rels, polys = certification_system(chart, state)
    zero = set(state.zero_set) if state else set()
    cols = sorted(set(chart.variables) - zero)
    _, J = jacobian(polys, cols)
    g_rows = [i for i, r in enumerate(rels) if r.kind == "chart"]
    quotient = [r.poly for r in chart.relations if r.kind == "quotient"]
    rep = ChartReport(chart.name, rank_expected=expected_rank(chart))
    nonzero = set(chart.inverted)
    for p in primes:
        pts = enumerate_points(polys, p, state, variables=chart.variables, nonzero=nonzero,
                               max_free=max_free)
        rep.per_prime[p] = len(pts)
        for pt in pts:
            M = [[_eval(d, pt, p) for d in row] for row in J]
            r = rank_mod_p(M, p) - rank_mod_p([M[i] for i in g_rows], p)
            rep.points_checked += 1
            rep.rank_min = r if rep.rank_min is None else min(rep.rank_min, r)
            rep.rank_max = r if rep.rank_max is None else max(rep.rank_max, r)
            if r != rep.rank_expected and rep.passed:
                rep.passed = False
                rep.witness = {"prime": p, "rank": r,
                               "point": {str(v): x for v, x in sorted(pt.items())}}
            if any(_eval(q, pt, p) for q in quotient):
                rep.audit_quotient = False
    return rep


def _jobs(jobs):
    if jobs is None:
        jobs = int(os.environ.get("GRASSRES_JOBS", "1") or 1)
    return max(1, jobs)


def _certify_task(args):
    chart, state, primes, max_free = args
    return certify_chart(chart, state, primes, max_free)


def certify_smooth(atlas, gamma=(), primes=(5, 7), seed=0, samples=12, trials=0,
                   jobs=None, max_free=fpsolve.DEFAULT_MAX_FREE, transport=None):
    """Certify the final transform of Z_Γ chart by chart at every prime."""
    gamma = Gamma.of(gamma).validate(atlas.m, atlas.n)
    primes = tuple(primes)
    if transport is None:
        transport = GammaTransport(atlas, gamma, primes=primes, samples=samples, seed=seed)
    uncertain = []
    if atlas.stage != "final":
        # ranks on an unfinished atlas say nothing about the resolved model
        uncertain.append({"chart": None, "reason": ["atlas stage is %r, not final" % atlas.stage]})
    work = []
    states = {}
    for ch in atlas.charts:
        st = transport.state(ch)
        if not st.samples:
            continue
        if not gamma.members:
            st = GammaState(ch.name, samples=st.samples, flags=st.flags)
        states[ch.name] = st
        if st.flags:
            uncertain.append({"chart": ch.name, "reason": sorted(st.flags)})
        if ch.flags & {"uncertain", "liveness-disagreement"}:
            uncertain.append({"chart": ch.name, "reason": sorted(ch.flags)})
        work.append((ch, st, primes, max_free))
    for ch, st, _, _ in work:
        free = len(set(ch.variables) - st.zero_set)
        if free > max_free:
            raise ResourceLimit("chart %s has %d free variables (bound %d); use the sampling probe"
                                % (ch.name, free, max_free))
    n = _jobs(jobs)
    if n > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            reports = list(ex.map(_certify_task, work))
    else:
        reports = [_certify_task(w) for w in work]
    witness = None
    verdict = SMOOTH
    for rep in reports:
        if not rep.passed:
            verdict = FAIL
            witness = witness or {"chart": rep.id, **rep.witness}
    if not reports:
        uncertain.append({"chart": None, "reason": ["no chart met by the transform"]})
    if verdict == SMOOTH and uncertain:
        verdict = UNCERTAIN
    cert = Certificate(gamma=gamma, primes=primes, charts=reports, verdict=verdict,
                       uncertain=uncertain, witness=witness, seed=seed, m=str(atlas.m), n=atlas.n)
    if trials:
        cert.birational = birationality_probe(atlas, gamma, primes[-1], trials, seed=seed,
                                              transport=transport)
    return cert


PARAM = -1  # variable kind for base-point coordinates fed to a compiled fiber system


def fiber_system(chart, state, prime):
    """Compile the fiber equations of a chart once; base coordinates are parameters."""
    eqs = [r.poly for r in chart.relations if r.kind in CERT_KINDS]
    params = {}
    for v, mon in chart.root_map.items():
        if v.kind != PI:
            continue
        t = Variable(PARAM, v.label)
        params[v.label] = t
        eqs.append(Polynomial.monomial(mon) - Polynomial.var(t))
    ones = set(state.one_set) - set(state.zero_set)
    eqs.extend(Polynomial.var(v) - 1 for v in sorted(ones))
    nonzero = set(chart.inverted) - set(state.zero_set) - ones
    system = fpsolve.System(eqs, chart.variables, prime, zero=state.zero_set, nonzero=nonzero,
                            fixed=set(params.values()), max_free=None)
    return system, params


def fiber_size(atlas, chart, state, base, prime, compiled=None):
    """Number of 𝔽_p points of the chart's transform lying over a base point."""
    system, params = compiled or fiber_system(chart, state, prime)
    values = {t: base.get(u, 0) for u, t in params.items()}
    return system.count(values)


def birationality_probe(atlas, gamma=(), prime=7, trials=50, seed=0, transport=None, samples=12):
    """Fiber sizes of the final transform over dense-cell points of Z_Γ.

    The fiber size at a base point is the largest number of points over it
    found on a single chart; charts overlap, so points on different charts
    are not counted twice.
    """
    gamma = Gamma.of(gamma).validate(atlas.m, atlas.n)
    if transport is None:
        transport = GammaTransport(atlas, gamma, primes=(prime,), samples=samples, seed=seed)
    states = {}
    for ch in atlas.charts:
        st = transport.state(ch)
        if st.samples:
            states[ch.name] = (ch, st)
    rng = random.Random(seed + 1)
    bases = sample_points(gamma, atlas.m, atlas.n, prime, trials, rng)
    if not bases:
        raise InsufficientSampling("no dense-cell points of Z_Γ over F_%d" % prime)
    compiled = {name: fiber_system(ch, st, prime) for name, (ch, st) in states.items()}
    hist = Counter()
    for base in bases:
        size = 0
        for name, (ch, st) in states.items():
            size = max(size, fiber_size(atlas, ch, st, base, prime, compiled[name]))
        hist[size] += 1
    return {"prime": prime, "trials": len(bases),
            "fiber_histogram": {str(k): v for k, v in sorted(hist.items())}}
