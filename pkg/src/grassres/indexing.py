"""Plücker index combinatorics.

Indices are increasing tuples of integers.  The chart index ``m`` fixes the
affine chart ``p_m = 1``; everything else (ranks, the order used to sort the
primary relations, basic variables) is measured relative to it.
"""

from itertools import combinations
from math import comb

from .errors import InvalidEntry, InvalidParameters


class PluckerIndex(tuple):
    """A strictly increasing tuple of positive integers."""

    __slots__ = ()

    def __new__(cls, entries):
        entries = tuple(int(e) for e in entries)
        for a, b in zip(entries, entries[1:]):
            if a >= b:
                raise InvalidEntry("index entries must be strictly increasing: %r" % (entries,))
        if entries and entries[0] < 1:
            raise InvalidEntry("index entries must be positive: %r" % (entries,))
        return super().__new__(cls, entries)

    def __str__(self):
        if all(e < 10 for e in self):
            return "".join(str(e) for e in self)
        return ".".join(str(e) for e in self)

    def __repr__(self):
        return "PluckerIndex(%s)" % str(self)


def parse_index(text):
    """Parse ``"145"``, ``"1.4.10"`` or an iterable of ints into an index."""
    if isinstance(text, PluckerIndex):
        return text
    if isinstance(text, str):
        text = text.strip()
        if "." in text or "," in text:
            parts = text.replace(",", ".").split(".")
            return PluckerIndex(int(p) for p in parts if p)
        return PluckerIndex(int(c) for c in text)
    if isinstance(text, int):
        return PluckerIndex(int(c) for c in str(text))
    return PluckerIndex(text)


class _Zero:
    __slots__ = ()

    def __repr__(self):
        return "ZERO"

    def __bool__(self):
        return False


ZERO = _Zero()


class SignedIndex(tuple):
    """Pair (index, sign); the repeated-entry case is the ``ZERO`` singleton."""

    __slots__ = ()

    def __new__(cls, index, sign):
        if sign not in (1, -1):
            raise InvalidEntry("sign must be +1 or -1")
        return super().__new__(cls, (index, sign))

    @property
    def index(self):
        return self[0]

    @property
    def sign(self):
        return self[1]


def enumerate_indices(d, n):
    if d < 1 or d >= n:
        raise InvalidParameters("need 1 <= d < n, got d=%r n=%r" % (d, n))
    return [PluckerIndex(c) for c in combinations(range(1, n + 1), d)]


def normalize(raw, n=None):
    """Sort ``raw``, returning the sign of the sorting permutation or ZERO."""
    raw = [int(e) for e in raw]
    for e in raw:
        if e < 1 or (n is not None and e > n):
            raise InvalidEntry("entry %d out of range" % e)
    if len(set(raw)) != len(raw):
        return ZERO
    # parity via inversion count
    inv = 0
    for i in range(len(raw)):
        for j in range(i + 1, len(raw)):
            if raw[i] > raw[j]:
                inv += 1
    return SignedIndex(PluckerIndex(sorted(raw)), -1 if inv % 2 else 1)


def _check(m, n):
    if n is not None and m and m[-1] > n:
        raise InvalidEntry("index %s out of range for n=%d" % (m, n))


def m_rank(u, m):
    return len(set(u) - set(m)) - 2


def wp_key(u, m):
    """Sort key realising the order <_wp relative to ``m``."""
    ms = set(m)
    outside = tuple(e for e in u if e not in ms)
    inside = tuple(e for e in u if e in ms)
    return (len(outside) - 2, outside, inside)


def order_wp(u, v, m):
    """Return -1, 0 or 1 as u <_wp v, u == v, u >_wp v."""
    a, b = wp_key(u, m), wp_key(v, m)
    return (a > b) - (a < b)


def primary_index_set(m, n):
    m = parse_index(m)
    _check(m, n)
    d = len(m)
    out = [u for u in enumerate_indices(d, n) if m_rank(u, m) >= 0]
    out.sort(key=lambda u: wp_key(u, m))
    return out


def basic_variables(m, n):
    m = parse_index(m)
    _check(m, n)
    d = len(m)
    return [u for u in enumerate_indices(d, n) if m_rank(u, m) == -1 and u != m]


def upsilon(d, n):
    return comb(n, d) - 1 - d * (n - d)
