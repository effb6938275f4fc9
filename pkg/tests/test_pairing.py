import itertools

import pytest
from hypothesis import given, strategies as st

from golden_data import MOBIUS_2_GROUPS, MOBIUS_2_MATRIX
from skeingram.diagrams import enum_basis, rotate
from skeingram.pairing import (
    DEFAULT_CONVENTION,
    KleinClassificationError,
    LoopWord,
    SignConvention,
    calibrate,
    classify_klein_loop,
    classify_normal_form,
    find_basis_permutation,
    normal_form,
    pair_annulus,
    pair_disc,
    pair_mobius,
    pair_trace_annular,
    trace_glued,
)
from skeingram.polyring import Polynomial, d, parse_polynomial, w, x, y, z


def swap_xy(p: Polynomial) -> Polynomial:
    return p.subs(x=y, y=x)


def loop_count(a, b):
    # union-find on the 2n boundary points, joined by both diagrams' arcs
    parent = list(range(2 * a.n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for diag in (a, b):
        for i, j in enumerate(diag.partner):
            parent[find(i)] = find(j)
    return len({find(i) for i in range(2 * a.n)})


def test_mobius_n1_hand_matrix():
    basis = enum_basis("mobius", 1)
    got = [[pair_mobius(u, v) for v in basis] for u in basis]
    assert got == [[d, z, y], [z, d, y], [x, x, w]]


def test_mobius_n2_matches_printed_matrix_up_to_basis_order():
    basis = enum_basis("mobius", 2)
    got = [[pair_mobius(u, v) for v in basis] for u in basis]
    perm = find_basis_permutation(got, MOBIUS_2_MATRIX, MOBIUS_2_GROUPS)
    assert perm == [0, 4, 5, 2, 1, 3, 7, 6, 9, 8, 10]


def test_calibration_leaves_default_and_its_inverse():
    n1 = [[d, z, y], [z, d, y], [x, x, w]]
    good = calibrate([(1, n1), (2, MOBIUS_2_MATRIX)])
    assert DEFAULT_CONVENTION in good
    assert set(good) == {DEFAULT_CONVENTION, SignConvention(-1, 1, 1, -1)}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mobius_transpose_swaps_x_and_y(n):
    basis = enum_basis("mobius", n)
    for a, b in itertools.product(basis, repeat=2):
        assert pair_mobius(b, a) == swap_xy(pair_mobius(a, b))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_mobius_diagonal_law(n):
    for a in enum_basis("mobius", n):
        assert pair_mobius(a, a) == Polynomial.var("d", len(a.openers)) * Polynomial.var("w", a.crosscap_arcs)


@pytest.mark.parametrize("kind", ["annulus", "mobius"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_all_variables_to_d_counts_loops(kind, n):
    pair = pair_annulus if kind == "annulus" else pair_mobius
    for a, b in itertools.product(enum_basis(kind, n), repeat=2):
        flat = pair(a, b).subs(z=d, x=d, y=d, w=d)
        assert flat == Polynomial.var("d", loop_count(a, b))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_annulus_pairing_uses_only_d_and_z(n):
    for a, b in itertools.product(enum_basis("annulus", n), repeat=2):
        assert pair_annulus(a, b).variables() <= {"d", "z"}
        assert pair_annulus(a, b) == pair_annulus(b, a)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_loop_words_classify_invariantly(n):
    basis = enum_basis("mobius", n)
    for a, b in itertools.product(basis, repeat=2):
        loops = trace_glued(a, b)
        # every crosscap arc is walked exactly once
        assert sum(lw.count("t1") for lw in loops) == a.crosscap_arcs
        assert sum(lw.count("t2") for lw in loops) == b.crosscap_arcs
        for lw in loops:
            cls = classify_klein_loop(lw)
            assert classify_klein_loop(lw.reversed()) == cls
            for k in range(len(lw.letters)):
                assert classify_klein_loop(lw.rotated(k)) == cls


@pytest.mark.parametrize("n", [1, 2, 3])
def test_rotation_invariance(n):
    basis = enum_basis("mobius", n)
    for a, b in itertools.product(basis, repeat=2):
        assert pair_mobius(rotate(a), rotate(b)) == pair_mobius(a, b)


def test_klein_group_relations():
    assert normal_form([("b", 1), ("a", 1), ("b", -1), ("a", 1)]) == (0, 0)
    g1 = [("b", 1)]
    g2 = [("b", -1), ("a", 1)]
    assert normal_form(g1 * 2 + g2 * 2) == (0, 0)
    assert classify_normal_form(0, 0) == "D"
    assert classify_normal_form(1, 0) == "W"
    assert classify_normal_form(2, 1) == "X" and classify_normal_form(-1, -1) == "Y"
    assert classify_normal_form(0, 2) == "Z"
    for bad in [(2, 0), (0, 3), (2, 2)]:
        with pytest.raises(KleinClassificationError):
            classify_normal_form(*bad)


@given(st.lists(st.tuples(st.sampled_from(["t1", "t2", "r1", "r2"]), st.sampled_from([1, -1])), max_size=8))
def test_normal_form_of_inverse_word(letters):
    word = DEFAULT_CONVENTION.generator_word(LoopWord(tuple(letters)))
    inverse = [(g, -e) for g, e in reversed(word)]
    m, k = normal_form(word + inverse)
    assert (m, k) == (0, 0)


def test_disc_pairing_examples():
    e1, one = enum_basis("disc", 2)
    assert pair_disc(one, one) == d * d and pair_disc(e1, one) == d
    # two n = 4 matchings forming three circles
    from skeingram.diagrams import DiscDiagram

    a = DiscDiagram.from_pairs(4, [(0, 1), (2, 3), (4, 5), (6, 7)])
    b = DiscDiagram.from_pairs(4, [(0, 1), (2, 3), (4, 7), (5, 6)])
    assert pair_disc(a, b) == parse_polynomial("d^3")


def test_trace_annular_n2_and_specialisation():
    basis = enum_basis("disc", 2)
    got = [[pair_trace_annular(u, v) for v in basis] for u in basis]
    assert got == [[d * d, d], [d, z * z]]
    for n in (1, 2, 3):
        for a, b in itertools.product(enum_basis("disc", n), repeat=2):
            assert pair_trace_annular(a, b).subs(z=d) == pair_disc(a, b)
            assert pair_trace_annular(a, b) == pair_trace_annular(b, a)


def test_size_mismatch():
    with pytest.raises(ValueError):
        pair_mobius(enum_basis("mobius", 1)[0], enum_basis("mobius", 2)[0])
