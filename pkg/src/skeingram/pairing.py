"""Bilinear forms on crossingless connections, evaluated by loop tracing.

Every pairing glues two diagrams along their marked boundary, traces the
closed curves that result and turns each curve into one variable.  For the
Moebius band the glued surface is a Klein bottle, and a curve is classified
by its element of the Klein bottle group

    <a, b | b a b^-1 = a^-1>,   g1 = b (inner crosscap), g2 = b^-1 a (outer),

in which the two Moebius cores satisfy g1^2 g2^2 = 1.

A traced loop is recorded as a :class:`LoopWord`: a cyclic sequence of
letters ``t1``/``t2`` (a crosscap arc of the inner/outer band) and
``r1``/``r2`` (a trivial arc crossing the reference cut).  Letter signs are
geometric: ``t`` is +1 when a crosscap arc is walked from its lower to its
higher endpoint, ``r`` is +1 when the cut is crossed in the increasing
direction (from 2n-1 to 0).  A :class:`SignConvention` maps signed letters
to generator powers; :data:`DEFAULT_CONVENTION` is the one that reproduces
the known n = 1 and n = 2 Gram matrices (see :func:`calibrate`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .diagrams import DiscDiagram, MobiusDiagram, AnnularDiagram
from .polyring import Polynomial

LETTERS = ("t1", "t2", "r1", "r2")
LOOP_VARIABLE = {"D": "d", "Z": "z", "X": "x", "Y": "y", "W": "w"}


class KleinClassificationError(RuntimeError):
    """A traced loop has a group element no simple closed curve can have."""


@dataclass(frozen=True)
class LoopWord:
    letters: tuple[tuple[str, int], ...] = ()

    def rotated(self, k: int) -> LoopWord:
        if not self.letters:
            return self
        k %= len(self.letters)
        return LoopWord(self.letters[k:] + self.letters[:k])

    def reversed(self) -> LoopWord:
        """The same loop walked the other way."""
        return LoopWord(tuple((l, -s) for l, s in reversed(self.letters)))

    def count(self, *names: str) -> int:
        return sum(1 for l, _ in self.letters if l in names)


@dataclass(frozen=True)
class SignConvention:
    """Exponent signs: ray letters map to g^(2*s*ray), crosscap letters to g^(s*cap)."""

    ray1: int
    ray2: int
    cap1: int
    cap2: int

    def generator_word(self, word: LoopWord) -> list[tuple[str, int]]:
        """Expand into powers of a and b (g1 = b, g2 = b^-1 a)."""
        out: list[tuple[str, int]] = []
        for letter, sign in word.letters:
            if letter == "t1":
                out.append(("b", sign * self.cap1))
            elif letter == "r1":
                out.append(("b", 2 * sign * self.ray1))
            else:
                e = sign * (self.cap2 if letter == "t2" else 2 * self.ray2)
                unit = [("b", -1), ("a", 1)] if e > 0 else [("a", -1), ("b", 1)]
                out.extend(unit * abs(e))
        return out


DEFAULT_CONVENTION = SignConvention(ray1=1, ray2=-1, cap1=-1, cap2=1)


def normal_form(word: Iterable[tuple[str, int]]) -> tuple[int, int]:
    """Exponents (m, n) with word = a^m b^n, using b a = a^-1 b."""
    m = n = 0
    for gen, e in word:
        if gen == "a":
            m += e if n % 2 == 0 else -e
        elif gen == "b":
            n += e
        else:
            raise ValueError(f"unknown generator {gen!r}")
    return m, n


def classify_normal_form(m: int, n: int) -> str:
    if n == 0 and m == 0:
        return "D"
    if n == 0 and abs(m) == 1:
        return "W"
    if abs(n) == 1:
        return "X" if m % 2 == 0 else "Y"
    if abs(n) == 2 and m == 0:
        return "Z"
    raise KleinClassificationError(f"a^{m} b^{n} is not the class of a simple closed curve")


def classify_klein_loop(word: LoopWord, convention: SignConvention = DEFAULT_CONVENTION) -> str:
    return classify_normal_form(*normal_form(convention.generator_word(word)))


def _monomial(classes: Iterable[str]) -> Polynomial:
    exps = {"d": 0, "z": 0, "x": 0, "y": 0, "w": 0}
    for c in classes:
        exps[LOOP_VARIABLE[c]] += 1
    return Polynomial.from_terms([(1, [exps[v] for v in ("d", "z", "x", "y", "w")])])


def _check_size(a, b):
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")


# -- loop tracing -------------------------------------------------------------


def _arc_letters(diagram, region: str) -> list[list[tuple[str, int]]]:
    """letters[p]: the letters emitted when walking the arc at p away from p."""
    letters: list[list[tuple[str, int]]] = [[] for _ in range(2 * diagram.n)]
    for arc in diagram.arcs:
        if arc.crosscap:
            letters[arc.start] = [("t" + region, 1)]
            letters[arc.end] = [("t" + region, -1)]
        elif arc.wraps:
            letters[arc.start] = [("r" + region, 1)]
            letters[arc.end] = [("r" + region, -1)]
    return letters


def trace_glued(inner, outer) -> list[LoopWord]:
    """Loops of two surface diagrams glued along their boundary.

    Each loop starts at its smallest unvisited point and first follows the
    inner diagram's arc.
    """
    _check_size(inner, outer)
    p_in, p_out = inner.partner, outer.partner
    l_in, l_out = _arc_letters(inner, "1"), _arc_letters(outer, "2")
    seen = [False] * (2 * inner.n)
    loops = []
    for start in range(2 * inner.n):
        if seen[start]:
            continue
        word: list[tuple[str, int]] = []
        p = start
        while True:
            seen[p] = True
            word.extend(l_in[p])
            q = p_in[p]
            seen[q] = True
            word.extend(l_out[q])
            p = p_out[q]
            if p == start:
                break
        loops.append(LoopWord(tuple(word)))
    return loops


def pair_mobius(a: MobiusDiagram, b: MobiusDiagram,
                convention: SignConvention = DEFAULT_CONVENTION) -> Polynomial:
    """Klein bottle pairing: ``a`` is the inner band, the inverted ``b`` the outer one."""
    return _monomial(classify_klein_loop(w, convention) for w in trace_glued(a, b))


def pair_annulus(a: AnnularDiagram, b: AnnularDiagram) -> Polynomial:
    """Two annuli glued along their outer boundaries: z for essential loops, d otherwise."""
    return _monomial(classify_klein_loop(w) for w in trace_glued(a, b))


def pair_disc(a: DiscDiagram, b: DiscDiagram) -> Polynomial:
    """d to the number of circles formed by the two matchings on shared labels."""
    _check_size(a, b)
    ma, mb = a.match, b.match
    seen = [False] * (2 * a.n)
    loops = 0
    for start in range(2 * a.n):
        if seen[start]:
            continue
        loops += 1
        p = start
        while not seen[p]:
            seen[p] = True
            q = ma[p]
            seen[q] = True
            p = mb[q]
    return Polynomial.var("d", loops)


def trace_two_regular(edges: Sequence[tuple[int, int, tuple]], size: int) -> list[list]:
    """Walk every cycle of a graph in which each node has degree two.

    ``edges`` holds ``(u, v, letters)``; walking u -> v emits ``letters`` and
    walking v -> u emits them reversed with flipped signs.  Cycles start at
    their smallest node and leave it along its first listed edge.
    """
    slots: list[list[tuple[int, int, int]]] = [[] for _ in range(size)]
    for idx, (u, v, _) in enumerate(edges):
        slots[u].append((idx, v, 1))
        slots[v].append((idx, u, -1))
    used = [False] * len(edges)
    cycles = []
    for start in range(size):
        if not slots[start] or all(used[i] for i, _, _ in slots[start]):
            continue
        word: list = []
        v = start
        while True:
            nxt = next((s for s in slots[v] if not used[s[0]]), None)
            if nxt is None:
                break
            idx, u, direction = nxt
            used[idx] = True
            letters = edges[idx][2]
            if direction == 1:
                word.extend(letters)
            else:
                word.extend((l, -s) for l, s in reversed(letters))
            v = u
        cycles.append(word)
    return cycles


def pair_trace_annular(a: DiscDiagram, b: DiscDiagram) -> Polynomial:
    """Annular closure of a composed with the reflection of b.

    a's bottom row is glued to the reflected b's top row, which is b's own
    bottom row, so the shared middle points carry a's labels n..2n-1.  Top
    point i of a is joined to top point i of b by a strand round the
    annulus; each such strand crosses the reference cut once, and a loop is
    essential when its crossings do not cancel.
    """
    _check_size(a, b)
    n = a.n
    edges = []
    for p, q in a.pairs():
        edges.append((p, q, ()))
    # b's top point i becomes node 2n + i; its bottom points coincide with a's
    node = lambda p: 2 * n + p if p < n else p
    for p, q in b.pairs():
        edges.append((node(p), node(q), ()))
    for i in range(n):
        edges.append((i, 2 * n + i, (("r1", 1),)))
    words = trace_two_regular(edges, 3 * n)
    return _monomial(classify_klein_loop(LoopWord(tuple(w))) for w in words)


def calibrate(targets: Sequence[tuple[int, Sequence[Sequence[Polynomial]]]]) -> list[SignConvention]:
    """All of the 16 sign conventions whose Moebius Gram matrices match every target.

    A target is ``(n, matrix)``; matrices are compared up to a permutation of
    the basis that preserves the number of crosscap arcs.
    """
    from .diagrams import enum_basis

    good = []
    for signs in itertools.product((1, -1), repeat=4):
        conv = SignConvention(*signs)
        ok = True
        for n, target in targets:
            basis = enum_basis("mobius", n)
            try:
                got = [[pair_mobius(u, v, conv) for v in basis] for u in basis]
            except KleinClassificationError:
                ok = False
                break
            groups = [m.crosscap_arcs for m in basis]
            if find_basis_permutation(got, target, groups) is None:
                ok = False
                break
        if ok:
            good.append(conv)
    return good


def find_basis_permutation(got, target, groups: Sequence[int]) -> list[int] | None:
    """A permutation ``perm`` with got[perm[i]][perm[j]] == target[i][j], searched group-wise.

    ``groups[i]`` is the group label of index i in both matrices; indices are
    only matched within equal labels.
    """
    size = len(groups)
    order = list(range(size))
    perm: list[int] = [-1] * size
    used = [False] * size

    def extend(i: int) -> bool:
        if i == size:
            return True
        for cand in range(size):
            if used[cand] or groups[cand] != groups[order[i]]:
                continue
            if got[cand][cand] != target[i][i]:
                continue
            if any(got[cand][perm[j]] != target[i][j] or got[perm[j]][cand] != target[j][i] for j in range(i)):
                continue
            perm[i] = cand
            used[cand] = True
            if extend(i + 1):
                return True
            used[cand] = False
        perm[i] = -1
        return False

    return perm if extend(0) else None
