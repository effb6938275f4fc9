"""Crossingless connections on the disc, the annulus and the Moebius band.

Boundary points are labelled 0..2n-1 cyclically.  In the rectangle picture
the top row reads 0..n-1 left to right and the bottom row reads n..2n-1
right to left, so walking the boundary of the rectangle visits the labels in
cyclic order.  The gap between 2n-1 and 0 is the reference cut used for all
winding counts.

Annular and Moebius diagrams are encoded by *opener sets*: every trivial arc
is oriented so that the disc it cuts off lies on the increasing side, and the
opener is its first endpoint in that direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Literal

Kind = Literal["disc", "annulus", "mobius"]


@dataclass(frozen=True)
class Arc:
    """Arc between two boundary points.

    For a trivial arc ``(start, end)`` runs from the opener to its closer and
    ``wraps`` says whether the increasing walk from start to end crosses the
    reference cut.  A crosscap arc has ``start < end`` and ``crosscap=True``.
    """

    start: int
    end: int
    wraps: bool = False
    crosscap: bool = False


@dataclass(frozen=True)
class DiscDiagram:
    n: int
    match: tuple[int, ...]

    def __post_init__(self):
        if not is_noncrossing_matching(self.match) or len(self.match) != 2 * self.n:
            raise ValueError(f"not a noncrossing perfect matching: {self.match}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> DiscDiagram:
        m = [-1] * (2 * n)
        for a, b in pairs:
            m[a], m[b] = b, a
        return cls(n, tuple(m))

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.match) if i < j]

    def label(self) -> str:
        return " ".join(f"{i}-{j}" for i, j in self.pairs())


@dataclass(frozen=True)
class AnnularDiagram:
    n: int
    openers: frozenset[int]
    arcs: tuple[Arc, ...] = field(compare=False, repr=False, default=())

    @property
    def partner(self) -> tuple[int, ...]:
        return _partner_table(self.n, self.arcs)

    def label(self) -> str:
        return "{" + ",".join(str(i) for i in sorted(self.openers)) + "}"


@dataclass(frozen=True)
class MobiusDiagram:
    n: int
    openers: frozenset[int]
    arcs: tuple[Arc, ...] = field(compare=False, repr=False, default=())

    @property
    def crosscap_arcs(self) -> int:
        return self.n - len(self.openers)

    @property
    def partner(self) -> tuple[int, ...]:
        return _partner_table(self.n, self.arcs)

    def label(self) -> str:
        return "{" + ",".join(str(i) for i in sorted(self.openers)) + "}"


def _partner_table(n: int, arcs: tuple[Arc, ...]) -> tuple[int, ...]:
    p = [-1] * (2 * n)
    for a in arcs:
        p[a.start], p[a.end] = a.end, a.start
    return tuple(p)


def is_noncrossing_matching(match: tuple[int, ...]) -> bool:
    n2 = len(match)
    if n2 % 2:
        return False
    for i, j in enumerate(match):
        if not 0 <= j < n2 or j == i or match[j] != i:
            return False
    stack = []
    for i in range(n2):
        j = match[i]
        if j > i:
            stack.append(i)
        elif not stack or stack.pop() != j:
            return False
    return True


# -- decoding ---------------------------------------------------------------


def _cyclic_match(openers: frozenset[int], n: int) -> tuple[list[Arc], list[int]]:
    """Match each opener to the cyclically next unmatched non-opener.

    Returns the trivial arcs and the sorted list of points left unmatched.
    """
    size = 2 * n
    partner = [-1] * size
    stack: list[int] = []
    arcs = []
    for sweep in range(2):
        for p in range(size):
            if p in openers:
                if sweep == 0:
                    stack.append(p)
            elif partner[p] < 0 and stack:
                o = stack.pop()
                partner[o], partner[p] = p, o
                arcs.append(Arc(o, p, wraps=p < o))
    if stack:
        raise ValueError("more openers than closers")
    leftover = [p for p in range(size) if partner[p] < 0]
    arcs.sort(key=lambda a: a.start)
    return arcs, leftover


def decode_annular(openers: Iterable[int], n: int) -> list[Arc]:
    openers = frozenset(openers)
    if len(openers) != n or not openers <= set(range(2 * n)):
        raise ValueError(f"an annular diagram needs exactly {n} openers in 0..{2 * n - 1}")
    arcs, leftover = _cyclic_match(openers, n)
    assert not leftover
    return arcs


def decode_mobius(openers: Iterable[int], n: int) -> list[Arc]:
    """Trivial arcs by cyclic matching, leftovers q_j joined to q_{j+m} through the crosscap."""
    openers = frozenset(openers)
    if len(openers) > n or not openers <= set(range(2 * n)):
        raise ValueError(f"a Moebius diagram has at most {n} openers in 0..{2 * n - 1}")
    arcs, leftover = _cyclic_match(openers, n)
    m = len(leftover) // 2
    arcs.extend(Arc(leftover[j], leftover[j + m], crosscap=True) for j in range(m))
    return arcs


def encode(arcs: Iterable[Arc]) -> frozenset[int]:
    """Recover the opener set from an arc list (inverse of the decoders)."""
    return frozenset(a.start for a in arcs if not a.crosscap)


def annular_diagram(openers: Iterable[int], n: int) -> AnnularDiagram:
    openers = frozenset(openers)
    return AnnularDiagram(n, openers, tuple(decode_annular(openers, n)))


def mobius_diagram(openers: Iterable[int], n: int) -> MobiusDiagram:
    openers = frozenset(openers)
    return MobiusDiagram(n, openers, tuple(decode_mobius(openers, n)))


# -- enumeration --------------------------------------------------------------


def _noncrossing_matchings(points: tuple[int, ...]) -> list[list[tuple[int, int]]]:
    if not points:
        return [[]]
    first = points[0]
    out = []
    for k in range(1, len(points), 2):
        inner = points[1:k]
        outer = points[k + 1:]
        for a in _noncrossing_matchings(inner):
            for b in _noncrossing_matchings(outer):
                out.append([(first, points[k])] + a + b)
    return out


def _opener_key(openers: frozenset[int]) -> int:
    return sum(1 << p for p in openers)


@lru_cache(maxsize=None)
def _enum(kind: str, n: int) -> tuple:
    if n < 1:
        raise ValueError("n must be positive")
    if kind == "disc":
        diagrams = [DiscDiagram.from_pairs(n, pairs) for pairs in _noncrossing_matchings(tuple(range(2 * n)))]
        return tuple(sorted(diagrams, key=lambda dd: dd.match))
    subsets = [frozenset(p for p in range(2 * n) if mask >> p & 1) for mask in range(1 << (2 * n))]
    if kind == "annulus":
        chosen = sorted((s for s in subsets if len(s) == n), key=_opener_key)
        return tuple(annular_diagram(s, n) for s in chosen)
    if kind == "mobius":
        chosen = sorted((s for s in subsets if len(s) <= n), key=lambda s: (n - len(s), _opener_key(s)))
        return tuple(mobius_diagram(s, n) for s in chosen)
    raise ValueError(f"unknown surface kind {kind!r}")


def enum_basis(kind: Kind, n: int) -> list:
    """Ordered basis of crossingless connections.

    disc: matchings sorted by their partner arrays; annulus: opener sets
    sorted as binary numbers (bit p set when p opens an arc); mobius:
    by number of crosscap arcs, then as annulus.
    """
    return list(_enum(kind, n))


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def expected_count(kind: Kind, n: int) -> int:
    if kind == "disc":
        return catalan(n)
    if kind == "annulus":
        return comb(2 * n, n)
    if kind == "mobius":
        return sum(comb(2 * n, k) for k in range(n + 1))
    raise ValueError(kind)


def is_planar(diagram) -> bool:
    """Structural planarity check for decoded annular / Moebius diagrams.

    Trivial arcs must not interleave and no point may sit on the disc side
    of a trivial arc unless it is matched inside that side; crosscap arcs
    must realise the antipodal pairing of the leftover points.
    """
    n = diagram.n
    size = 2 * n
    trivial = [a for a in diagram.arcs if not a.crosscap]
    caps = [a for a in diagram.arcs if a.crosscap]
    covered = set()
    for a in diagram.arcs:
        covered.update((a.start, a.end))
    if len(covered) != size or len(diagram.arcs) != n:
        return False

    def inside(a: Arc) -> set[int]:
        pts, p = set(), (a.start + 1) % size
        while p != a.end:
            pts.add(p)
            p = (p + 1) % size
        return pts

    partner = diagram.partner
    for a in trivial:
        ins = inside(a)
        if any(partner[p] not in ins for p in ins):
            return False
    leftover = sorted(p for a in caps for p in (a.start, a.end))
    m = len(leftover) // 2
    want = {(leftover[j], leftover[j + m]) for j in range(m)}
    return want == {(a.start, a.end) for a in caps}


def rotate(diagram, k: int = 1):
    """Shift every boundary label by k (mod 2n).

    On the annulus and the Moebius band this is a slide along the core, so
    every pairing is invariant under rotating both arguments together.
    """
    n = diagram.n
    size = 2 * n
    if isinstance(diagram, DiscDiagram):
        return DiscDiagram.from_pairs(n, [((p + k) % size, (q + k) % size) for p, q in diagram.pairs()])
    shifted = frozenset((p + k) % size for p in diagram.openers)
    if isinstance(diagram, AnnularDiagram):
        return annular_diagram(shifted, n)
    return mobius_diagram(shifted, n)
