"""Gram matrices, exact determinants and divisibility checks."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import __version__
from .diagrams import DiscDiagram, annular_diagram, enum_basis, mobius_diagram
from .pairing import pair_annulus, pair_disc, pair_mobius, pair_trace_annular
from .polyring import ONE, ZERO, NotDivisible, Polynomial

log = logging.getLogger(__name__)

KINDS = ("disc", "genA", "annulus", "mobius")
SIZE_LIMITS = {"disc": 6, "genA": 6, "annulus": 5, "mobius": 4}
COFACTOR_LIMIT = 7

_PAIRINGS = {
    "disc": pair_disc,
    "genA": pair_trace_annular,
    "annulus": pair_annulus,
    "mobius": pair_mobius,
}
_SURFACE = {"disc": "disc", "genA": "disc", "annulus": "annulus", "mobius": "mobius"}


class ResourceLimitError(RuntimeError):
    """The request exceeds a configured size bound; nothing was computed."""


class BareissError(ArithmeticError):
    """An exact division inside fraction-free elimination failed."""


@dataclass
class GramMatrix:
    kind: str
    n: int
    basis: list
    entries: list[list[Polynomial]]

    @property
    def size(self) -> int:
        return len(self.basis)

    def labels(self) -> list[str]:
        return [b.label() for b in self.basis]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "version": __version__,
            "basis": [_encode_diagram(b) for b in self.basis],
            "entries": [[p.to_json() for p in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict) -> GramMatrix:
        kind, n = data["kind"], data["n"]
        basis = [_decode_diagram(kind, n, b) for b in data["basis"]]
        entries = [[Polynomial.from_json(p) for p in row] for row in data["entries"]]
        return cls(kind, n, basis, entries)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        labels = self.labels()
        writer.writerow([""] + labels)
        for label, row in zip(labels, self.entries):
            writer.writerow([label] + [str(p) for p in row])
        return buf.getvalue()

    def to_text(self) -> str:
        cells = [[str(p) for p in row] for row in self.entries]
        width = max((len(c) for row in cells for c in row), default=1)
        return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells) + "\n"


def _encode_diagram(b) -> list[int]:
    if isinstance(b, DiscDiagram):
        return list(b.match)
    return sorted(b.openers)


def _decode_diagram(kind: str, n: int, enc: Sequence[int]):
    surface = _SURFACE[kind]
    if surface == "disc":
        return DiscDiagram(n, tuple(enc))
    if surface == "annulus":
        return annular_diagram(enc, n)
    return mobius_diagram(enc, n)


def _rows(args) -> list[list[Polynomial]]:
    kind, n, rows = args
    basis = enum_basis(_SURFACE[kind], n)
    pair = _PAIRINGS[kind]
    return [[pair(basis[i], v) for v in basis] for i in rows]


def build_gram(kind: str, n: int, *, workers: int = 1, allow_large: bool = False) -> GramMatrix:
    """Gram matrix of one of the four bilinear forms.

    Refuses (before doing any work) when ``n`` is above the size bound for
    ``kind`` unless ``allow_large`` is set.
    """
    if kind not in _PAIRINGS:
        raise ValueError(f"unknown Gram kind {kind!r}; expected one of {KINDS}")
    if n < 1:
        raise ValueError("n must be positive")
    if n > SIZE_LIMITS[kind] and not allow_large:
        raise ResourceLimitError(f"{kind} Gram matrix with n={n} exceeds the bound n <= {SIZE_LIMITS[kind]}")
    basis = enum_basis(_SURFACE[kind], n)
    size = len(basis)
    if workers > 1 and size > 1:
        chunks = [list(range(i, size, workers)) for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_rows, [(kind, n, c) for c in chunks]))
        entries: list[list[Polynomial]] = [None] * size  # type: ignore[list-item]
        for chunk, rows in zip(chunks, parts):
            for i, row in zip(chunk, rows):
                entries[i] = row
    else:
        entries = _rows((kind, n, range(size)))
    return GramMatrix(kind, n, basis, entries)


def _as_rows(M) -> list[list[Polynomial]]:
    rows = M.entries if isinstance(M, GramMatrix) else M
    return [[Polynomial._coerce(e) for e in row] for row in rows]


def bareiss_det(M, *, progress: bool = False) -> Polynomial:
    """Determinant by single-step fraction-free elimination.

    Every division is exact in an integral domain; a failure means a bug
    and raises :class:`BareissError`.
    """
    A = _as_rows(M)
    size = len(A)
    if any(len(row) != size for row in A):
        raise ValueError("matrix is not square")
    if size == 0:
        return ONE
    sign = 1
    prev = ONE
    t0 = time.perf_counter()
    for k in range(size - 1):
        if A[k][k].is_zero():
            swap = next((i for i in range(k + 1, size) if not A[i][k].is_zero()), None)
            if swap is None:
                return ZERO
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        pivot = A[k][k]
        row_k = A[k]
        for i in range(k + 1, size):
            row_i = A[i]
            lead = row_i[k]
            for j in range(k + 1, size):
                num = row_i[j] * pivot
                if not lead.is_zero() and not row_k[j].is_zero():
                    num = num - lead * row_k[j]
                try:
                    row_i[j] = num.exact_div(prev)
                except NotDivisible as exc:
                    raise BareissError(f"inexact division at step {k}, entry ({i}, {j})") from exc
            row_i[k] = ZERO
        prev = pivot
        if progress:
            log.info("bareiss step %d/%d, pivot terms %d, %.1fs",
                     k + 1, size - 1, len(pivot), time.perf_counter() - t0)
    det = A[size - 1][size - 1]
    return det if sign == 1 else -det


def cofactor_det(M) -> Polynomial:
    """Determinant by Laplace expansion along the first row (independent check)."""
    A = _as_rows(M)
    size = len(A)
    if size > COFACTOR_LIMIT:
        raise ResourceLimitError(f"cofactor expansion limited to size <= {COFACTOR_LIMIT}")
    memo: dict[tuple[int, int], Polynomial] = {}

    def minor(row: int, cols: int) -> Polynomial:
        # cols is a bitmask of the columns still available
        if row == size:
            return ONE
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = ZERO
        sign = 1
        for j in range(size):
            if cols >> j & 1:
                e = A[row][j]
                if not e.is_zero():
                    term = e * minor(row + 1, cols & ~(1 << j))
                    total = total + term if sign > 0 else total - term
                sign = -sign
        memo[key] = total
        return total

    return minor(0, (1 << size) - 1)


# -- rotation-symmetric block decomposition -----------------------------------
#
# Rotating all boundary labels by one step permutes the basis and leaves the
# annulus and Moebius forms invariant.  Over the cyclic group C_2n the Gram
# matrix then splits into one block per character; the characters of order e
# share a block over Z[zeta_e], written out over Z through the companion
# matrix of the e-th cyclotomic polynomial.  Its determinant is the norm of
# the block determinant, so the product over e is det(G).


def cyclotomic(e: int) -> list[int]:
    """Coefficients (constant term first) of the e-th cyclotomic polynomial."""
    num = [-1] + [0] * (e - 1) + [1]
    for k in range(1, e):
        if e % k:
            continue
        den = cyclotomic(k)
        quot = [0] * (len(num) - len(den) + 1)
        for i in range(len(quot) - 1, -1, -1):
            c = num[i + len(den) - 1] // den[-1]
            quot[i] = c
            for j, dc in enumerate(den):
                num[i + j] -= c * dc
        num = quot
    return num


def _companion_powers(e: int) -> list[list[list[int]]]:
    """Matrices of multiplication by zeta_e^t, t = 0..e-1, in the power basis."""
    phi = cyclotomic(e)
    f = len(phi) - 1
    C = [[0] * f for _ in range(f)]
    for j in range(f - 1):
        C[j + 1][j] = 1
    for i in range(f):
        C[i][f - 1] = -phi[i]
    out = [[[int(i == j) for j in range(f)] for i in range(f)]]
    for _ in range(e - 1):
        P = out[-1]
        out.append([[sum(C[i][k] * P[k][j] for k in range(f)) for j in range(f)] for i in range(f)])
    return out


def rotation_permutation(M: GramMatrix) -> list[int] | None:
    """perm[i] = index of the rotated i-th basis element, or None if G is not invariant."""
    from .diagrams import rotate

    index = {b: i for i, b in enumerate(M.basis)}
    perm = [index[rotate(b)] for b in M.basis]
    E = M.entries
    size = M.size
    if all(E[perm[i]][perm[j]] == E[i][j] for i in range(size) for j in range(size)):
        return perm
    return None


def _orbits(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if seen[i]:
            continue
        orbit, j = [], i
        while not seen[j]:
            seen[j] = True
            orbit.append(j)
            j = perm[j]
        out.append(orbit)
    return out


def symmetry_blocks(M: GramMatrix, perm: Sequence[int] | None = None) -> list[tuple[int, list[list[Polynomial]]]]:
    """Integer blocks (e, B_e), one per character order e dividing the rotation order."""
    if perm is None:
        perm = rotation_permutation(M)
        if perm is None:
            raise ValueError("matrix is not invariant under rotation")
    orbits = _orbits(perm)
    E = M.entries
    blocks = []
    for e in range(1, 2 * M.n + 1):
        if (2 * M.n) % e:
            continue
        powers = _companion_powers(e)
        f = len(powers[0])
        use = [o for o in orbits if len(o) % e == 0]
        size = len(use) * f
        B = [[ZERO] * size for _ in range(size)]
        for I, orb in enumerate(use):
            rep = orb[0]
            for J, orb2 in enumerate(use):
                for t, col in enumerate(orb2):
                    g = E[rep][col]
                    if g.is_zero():
                        continue
                    P = powers[(-t) % e]
                    for a in range(f):
                        for b in range(f):
                            if P[a][b]:
                                B[I * f + a][J * f + b] = B[I * f + a][J * f + b] + g.scale(P[a][b])
        if size:
            blocks.append((e, B))
    assert sum(len(B) for _, B in blocks) == M.size
    return blocks


def block_determinants(M: GramMatrix) -> list[tuple[int, int, Polynomial]] | None:
    """(e, block size, det) for each character block; None when G is not rotation invariant."""
    perm = rotation_permutation(M)
    if perm is None:
        return None
    return [(e, len(B), bareiss_det(B)) for e, B in symmetry_blocks(M, perm)]


def symmetric_det(M: GramMatrix) -> Polynomial:
    """det(G) as the product of its character-block determinants (Bareiss if not invariant)."""
    parts = block_determinants(M)
    if parts is None:
        return bareiss_det(M)
    out = ONE
    for _, _, det in sorted(parts, key=lambda p: len(p[2])):
        out = out * det
    return out


# -- verification reports ---------------------------------------------------


@dataclass
class VerificationReport:
    claim: str
    n: int
    status: str  # verified | failed | indeterminate
    witness: list[Polynomial] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)
    timing_ms: float = 0.0

    @property
    def verified(self) -> bool:
        return self.status == "verified"

    def to_json(self) -> dict:
        return {
            "claim": self.claim,
            "n": self.n,
            "status": self.status,
            "witness": [p.to_json() for p in self.witness],
            "details": self.details,
            "timing_ms": round(self.timing_ms, 3),
        }

    @classmethod
    def from_json(cls, data: dict) -> VerificationReport:
        return cls(
            data["claim"], data["n"], data["status"],
            [Polynomial.from_json(p) for p in data["witness"]],
            data.get("details", {}), data.get("timing_ms", 0.0),
        )

    def summary(self) -> str:
        line = f"{self.claim:<8} n={self.n:<3} {self.status:<13} {self.timing_ms:10.1f} ms"
        note = self.details.get("note")
        return f"{line}  {note}" if note else line


def divides_power(p: Polynomial, f: Polynomial, e: int, claim: str = "divides_power", n: int = 0) -> VerificationReport:
    """Divide ``p`` by ``f`` e times; verified iff every step is exact."""
    if f.is_zero():
        raise ZeroDivisionError("divisor is zero")
    q = p
    for step in range(1, e + 1):
        try:
            q = q.exact_div(f)
        except NotDivisible:
            return VerificationReport(claim, n, "failed", [q, f], {"failed_at_step": step, "exponent": e})
    return VerificationReport(claim, n, "verified", [q], {"exponent": e})


def localized_divides(p: Polynomial, q: Polynomial, s: Polynomial, k_max: int,
                      claim: str = "localized_divides", n: int = 0) -> VerificationReport:
    """Smallest k <= k_max with q | s^k * p; indeterminate if none is found."""
    if q.is_zero() or s.is_zero():
        raise ZeroDivisionError("q and s must be nonzero")
    scaled = p
    for k in range(k_max + 1):
        try:
            quotient = scaled.exact_div(q)
        except NotDivisible:
            scaled = scaled * s
            continue
        return VerificationReport(claim, n, "verified", [quotient], {"k": k})
    return VerificationReport(claim, n, "indeterminate", [], {"k_max": k_max})


def save_matrix(M: GramMatrix, path, fmt: str = "json") -> None:
    with open(path, "w") as fh:
        if fmt == "json":
            json.dump(M.to_json(), fh, separators=(",", ":"))
            fh.write("\n")
        elif fmt == "csv":
            fh.write(M.to_csv())
        else:
            fh.write(M.to_text())


def load_matrix(path) -> GramMatrix:
    with open(path) as fh:
        return GramMatrix.from_json(json.load(fh))
