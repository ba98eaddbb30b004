"""Binomial model of the chart: main, residual and quotient-type binomials.

The homomorphism ``phi`` sends a ϱ-variable x_(u,v) to x_u x_v and fixes the
Plücker variables; on the chart ``x_m = 1`` the variable x_m is dropped.
Quotient-type binomials are found by brute force over ϱ-linear monomials.
"""

from dataclasses import dataclass, field
from itertools import combinations, product

from .errors import DomainError, InvalidChart, ResourceLimit
from .indexing import parse_index
from .polyengine import PI, RHO, Monomial, Pi, Polynomial, Rho, substitute
from .relations import linearize, primary_family

KIND_MAIN, KIND_RESIDUAL, KIND_QUOTIENT = "main", "residual", "quotient"


@dataclass(frozen=True)
class Binomial:
    kind: str
    plus: Monomial
    minus: Monomial
    block: object = None          # index k of F_k (1-based), tuple of blocks for quotients
    main_index: object = None     # (k, tau) for main binomials
    pair: object = None           # (s, t) for residual binomials

    @property
    def poly(self):
        return Polynomial.monomial(self.plus) - Polynomial.monomial(self.minus)

    def __str__(self):
        return str(self.poly)


def _mon(*vs):
    return Monomial([(v, 1) for v in vs])


def phi(mon, m=None):
    """Image of a ϖ/ϱ monomial; ``m`` (if given) is dehomogenized away."""
    m = parse_index(m) if m is not None else None
    out = []
    for v, e in mon:
        if v.kind == PI:
            out.append((v, e))
        elif v.kind == RHO:
            out.append((Pi(v.label[0]), e))
            out.append((Pi(v.label[1]), e))
        else:
            raise DomainError("phi is undefined on %s" % (v,))
    if m is not None:
        out = [(v, e) for v, e in out if v.label != m]
    return Monomial(out)


def main_binomials(F, k=None):
    out = []
    lead = Rho(F.m, F.u)
    for tau, (_, (a, b)) in enumerate(F.non_leading(), start=1):
        out.append(Binomial(KIND_MAIN, _mon(Rho(a, b), Pi(F.u)),
                            _mon(lead, Pi(a), Pi(b)), block=k, main_index=(k, tau)))
    return out


def residual_binomials(F, k=None):
    out = []
    nl = F.non_leading()
    for (i, (_, s)), (j, (_, t)) in combinations(enumerate(nl, start=1), 2):
        out.append(Binomial(KIND_RESIDUAL, _mon(Rho(*s), Pi(t[0]), Pi(t[1])),
                            _mon(Rho(*t), Pi(s[0]), Pi(s[1])), block=k, pair=(i, j)))
    return out


def kernel_binomials(m, n, max_rho_degree=3, blocks=None, limit=2_000_000):
    """Quotient-type binomials X - X' in ker(phi), ϱ-linear and square-free.

    Both monomials use one ϱ-variable from each block of a common block set.
    Binomials whose terms share a variable, or that split into a product of
    lower-degree kernel binomials over a sub-block set, are skipped since the
    ideal they generate is already accounted for.
    """
    m = parse_index(m)
    fam = primary_family(m, n, blocks)
    choices = [[Rho(*pair) for _, pair in F.terms] for F in fam]
    images = [[phi(_mon(v), m) for v in ch] for ch in choices]
    est = 0
    for deg in range(2, max_rho_degree + 1):
        for combo in combinations(range(len(fam)), deg):
            c = 1
            for k in combo:
                c *= len(choices[k])
            est += c
    if est > limit:
        raise ResourceLimit("kernel search would visit %d monomials (limit %d)" % (est, limit))
    out = []
    seen = set()
    for deg in range(2, max_rho_degree + 1):
        for combo in combinations(range(len(fam)), deg):
            groups = {}
            for pick in product(*[range(len(choices[k])) for k in combo]):
                img = Monomial(())
                for k, i in zip(combo, pick):
                    img = img * images[k][i]
                if any(e > 1 for _, e in img):
                    continue
                groups.setdefault(img, []).append(pick)
            for img, picks in groups.items():
                if len(picks) < 2:
                    continue
                for p1, p2 in combinations(picks, 2):
                    if any(a == b for a, b in zip(p1, p2)):
                        continue
                    if _splits(combo, p1, p2, images):
                        continue
                    x1 = _mon(*[choices[k][i] for k, i in zip(combo, p1)])
                    x2 = _mon(*[choices[k][i] for k, i in zip(combo, p2)])
                    plus, minus = (x1, x2) if x1 < x2 else (x2, x1)
                    if (plus, minus) in seen:
                        continue
                    seen.add((plus, minus))
                    out.append(Binomial(KIND_QUOTIENT, plus, minus,
                                        block=tuple(k + 1 for k in combo)))
    return out


def _splits(combo, p1, p2, images):
    idx = range(len(combo))
    for r in range(1, len(combo)):
        for sub in combinations(idx, r):
            a = Monomial(())
            b = Monomial(())
            for j in sub:
                a = a * images[combo[j]][p1[j]]
                b = b * images[combo[j]][p2[j]]
            if a == b:
                return True
    return False


@dataclass
class ChartRelation:
    """A relation living on a chart, tagged with its role in the system."""
    name: str
    kind: str                      # main | residual | quotient | linear | chart | extra
    poly: Polynomial
    block: object = None
    tau: object = None
    plus: object = None            # binomial kinds keep poly == plus - minus
    minus: object = None

    def is_binomial(self):
        return self.plus is not None

    def __str__(self):
        return str(self.poly)


@dataclass
class DefiningSystem:
    m: object
    n: int
    family: list
    basepoint: dict                # block k -> dehomogenizing ϱ-variable
    main: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    quotient: list = field(default_factory=list)
    linear: list = field(default_factory=list)
    extra: list = field(default_factory=list)

    def all(self):
        return self.main + self.residual + self.quotient + self.linear + self.extra


def default_basepoint(family):
    """Choose the smallest non-leading term of each block (tau = 1)."""
    return {k: 1 for k in range(1, len(family) + 1)}


def _resolve_basepoint(family, basepoint):
    if basepoint is None:
        basepoint = default_basepoint(family)
    if isinstance(basepoint, (list, tuple)):
        if len(basepoint) != len(family):
            raise InvalidChart("need one choice per block, got %d for %d blocks"
                               % (len(basepoint), len(family)))
        basepoint = {k: c for k, c in enumerate(basepoint, start=1)}
    out = {}
    for k, F in enumerate(family, start=1):
        if k not in basepoint:
            raise InvalidChart("no dehomogenizing variable for block %d" % k)
        c = basepoint[k]
        lin = [v for _, v in linearize(F).terms]
        if isinstance(c, int):
            if not 0 <= c < len(lin):
                raise InvalidChart("block %d has no term %d" % (k, c))
            out[k] = lin[c]
        elif c in lin:
            out[k] = c
        else:
            raise InvalidChart("%s is not a ϱ-variable of block %d" % (c, k))
    extra = set(basepoint) - set(range(1, len(family) + 1))
    if extra:
        raise InvalidChart("unknown blocks %s" % sorted(extra))
    return out


def _dehom_binomial(b, ones, name, tau=None):
    sub = {v: 1 for v in ones}
    plus = Monomial([(v, e) for v, e in b.plus if v not in ones])
    minus = Monomial([(v, e) for v, e in b.minus if v not in ones])
    poly = substitute(b.poly, sub)
    return ChartRelation(name, b.kind, poly, block=b.block, tau=tau, plus=plus, minus=minus)


def defining_system(m, n, basepoint=None, max_rho_degree=3, blocks=None,
                    quotient=True, residual=True):
    """Relations cutting out the model on one standard chart.

    ``basepoint`` maps each block to the index (0 = leading) or the ϱ-variable
    set to 1.  With ``blocks`` set, only the first blocks get ϱ-coordinates and
    the remaining primary relations are kept as plain polynomials.
    """
    m = parse_index(m)
    full = primary_family(m, n)
    fam = full if blocks is None else full[:blocks]
    bp = _resolve_basepoint(fam, basepoint)
    ones = set(bp.values())
    system = DefiningSystem(m=m, n=n, family=fam, basepoint=bp)
    for k, F in enumerate(fam, start=1):
        for b in main_binomials(F, k):
            system.main.append(_dehom_binomial(b, ones, "B%d.%d" % b.main_index, tau=b.main_index[1]))
        if residual:
            for b in residual_binomials(F, k):
                system.residual.append(_dehom_binomial(b, ones, "R%d.%d.%d" % ((k,) + b.pair)))
        lp = substitute(linearize(F).polynomial(), {bp[k]: 1})
        system.linear.append(ChartRelation("L%d" % k, "linear", lp, block=k))
    if quotient and max_rho_degree >= 2 and len(fam) >= 2:
        for i, b in enumerate(kernel_binomials(m, n, max_rho_degree, blocks=len(fam)), start=1):
            system.quotient.append(_dehom_binomial(b, ones, "Q%d" % i))
    for j in range(len(fam), len(full)):
        system.extra.append(ChartRelation("F%d" % (j + 1), "extra", full[j].polynomial(), block=j + 1))
    return system
