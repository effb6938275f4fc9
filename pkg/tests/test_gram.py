import csv
import io
import json
import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from skeingram.diagrams import enum_basis, rotate
from skeingram.gram import (
    GramMatrix,
    ResourceLimitError,
    VerificationReport,
    bareiss_det,
    block_determinants,
    build_gram,
    cofactor_det,
    cyclotomic,
    divides_power,
    load_matrix,
    localized_divides,
    rotation_permutation,
    save_matrix,
    symmetric_det,
    symmetry_blocks,
)
from skeingram.polyring import ONE, Polynomial, d, parse_polynomial, w, x, y, z
from test_polyring import from_sympy, to_sympy

SMALL = [(k, n) for k, top in [("disc", 4), ("genA", 4), ("annulus", 2), ("mobius", 2)] for n in range(1, top + 1)]
SMALL = [(k, n) for k, n in SMALL if len(enum_basis("annulus" if k == "annulus" else "mobius" if k == "mobius" else "disc", n)) <= 6]


def random_monomial(rng):
    coeff = rng.choice([-3, -2, -1, 1, 2, 3])
    return Polynomial.from_terms([(coeff, [rng.randint(0, 2) for _ in range(5)])]) if rng.random() > 0.15 else Polynomial()


def random_matrix(rng, size):
    return [[random_monomial(rng) for _ in range(size)] for _ in range(size)]


@pytest.mark.parametrize("kind,n", SMALL)
def test_bareiss_matches_cofactor_on_gram_matrices(kind, n):
    G = build_gram(kind, n)
    assert G.size <= 6
    assert bareiss_det(G) == cofactor_det(G)


def test_bareiss_matches_cofactor_on_random_monomial_matrices():
    rng = random.Random(20261016)
    for _ in range(100):
        M = random_matrix(rng, rng.randint(1, 5))
        assert bareiss_det(M) == cofactor_det(M)


def test_bareiss_matches_sympy_on_random_matrices():
    rng = random.Random(7)
    for size in (2, 3, 4):
        M = random_matrix(rng, size)
        expected = sympy.Matrix([[to_sympy(p) for p in row] for row in M]).det(method="berkowitz")
        assert bareiss_det(M) == from_sympy(sympy.expand(expected))


def test_singular_and_degenerate_matrices():
    assert bareiss_det([[d, d], [d, d]]).is_zero()
    assert bareiss_det([[Polynomial(), ONE], [ONE, Polynomial()]]) == parse_polynomial("-1")
    assert bareiss_det([]) == ONE


@given(st.permutations(range(5)))
@settings(max_examples=20)
def test_determinant_invariant_under_simultaneous_shuffle(perm):
    G = build_gram("disc", 3)
    shuffled = [[G.entries[i][j] for j in perm] for i in perm]
    assert bareiss_det(shuffled) == bareiss_det(G)


@pytest.mark.parametrize("kind,n", [("disc", 3), ("disc", 4), ("annulus", 2), ("annulus", 3), ("mobius", 1), ("mobius", 2)])
def test_symmetric_det_matches_bareiss(kind, n):
    G = build_gram(kind, n)
    assert rotation_permutation(G) is not None
    assert symmetric_det(G) == bareiss_det(G)
    blocks = symmetry_blocks(G)
    assert sum(len(B) for _, B in blocks) == G.size


def test_rotation_permutation_agrees_with_diagram_rotation():
    G = build_gram("mobius", 2)
    perm = rotation_permutation(G)
    for i, b in enumerate(G.basis):
        assert G.basis[perm[i]] == rotate(b)


def test_genA_is_not_rotation_invariant_but_det_still_works():
    G = build_gram("genA", 2)
    assert rotation_permutation(G) is None
    assert block_determinants(G) is None
    assert symmetric_det(G) == bareiss_det(G)


@pytest.mark.parametrize("e", range(1, 13))
def test_cyclotomic_against_sympy(e):
    v = sympy.Symbol("v")
    expected = sympy.Poly(sympy.cyclotomic_poly(e, v), v).all_coeffs()[::-1]
    assert cyclotomic(e) == [int(c) for c in expected]


def test_small_gram_values():
    assert build_gram("genA", 2).entries == [[d * d, d], [d, z * z]]
    assert build_gram("annulus", 1).entries == [[d, z], [z, d]]
    assert build_gram("mobius", 1).entries == [[d, z, y], [z, d, y], [x, x, w]]


def test_size_limits_refuse_before_work(monkeypatch):
    import skeingram.gram as gram

    def boom(*a, **k):
        raise AssertionError("enumeration should not start")

    monkeypatch.setattr(gram, "enum_basis", boom)
    with pytest.raises(ResourceLimitError):
        build_gram("mobius", 5)
    with pytest.raises(ResourceLimitError):
        build_gram("disc", 7)
    with pytest.raises(ValueError):
        build_gram("sphere", 2)
    with pytest.raises(ValueError):
        build_gram("disc", 0)


def test_workers_give_identical_matrix():
    assert build_gram("mobius", 2, workers=2).entries == build_gram("mobius", 2).entries


def test_json_and_csv_export(tmp_path):
    G = build_gram("mobius", 2)
    path = tmp_path / "g.json"
    save_matrix(G, path)
    again = load_matrix(path)
    assert again.entries == G.entries and again.basis == G.basis
    assert GramMatrix.from_json(json.loads(json.dumps(G.to_json()))).entries == G.entries
    rows = list(csv.reader(io.StringIO(G.to_csv())))
    assert rows[0][1:] == G.labels()
    assert len(rows) == G.size + 1
    assert [parse_polynomial(c) for c in rows[1][1:]] == G.entries[0]


def test_divides_power():
    p = (d + z) ** 3 * w
    assert divides_power(p, d + z, 3).verified
    r = divides_power(p, d + z, 4)
    assert r.status == "failed" and r.details["failed_at_step"] == 4
    with pytest.raises(ZeroDivisionError):
        divides_power(p, Polynomial(), 1)


def test_localized_divides_finds_minimal_power():
    s = d * d - 1
    q = (d - 1) * x
    r = localized_divides(x * (d + 1), q, s, 4)
    assert r.verified and r.details["k"] == 1
    r = localized_divides(x, y, s, 3)
    assert r.status == "indeterminate"


def test_report_json_round_trip():
    r = VerificationReport("p2", 2, "verified", [d + w], {"k": 0}, 1.5)
    back = VerificationReport.from_json(json.loads(json.dumps(r.to_json())))
    assert back == r
    assert set(r.to_json()) >= {"claim", "n", "status", "witness", "timing_ms"}
