"""Exact linear algebra: verdicts checked against brute force, witness
matrices checked by multiplying them back out."""

import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contextuality import (
    INTEGERS,
    FieldDecomposition,
    HomomorphismError,
    LinearSystem,
    ModularDecomposition,
    RingError,
    RingHom,
    RingMatrix,
    RingSpec,
    UnsupportedRingError,
    linear_decomposition,
    normal_form,
    smith_normal_form,
    solve_linear_system,
)
from contextuality.rings import mat_mul, mat_vec, ring_hom_apply, row_hermite


def brute_force_solve(modulus, rows, rhs):
    """Reference solver: try every candidate vector. Only for finite rings
    and small column counts."""
    ncols = len(rows[0]) if rows else 0
    assert modulus**ncols <= 2**20
    for cand in product(range(modulus), repeat=ncols):
        if all(
            sum(a * x for a, x in zip(row, cand)) % modulus == b % modulus
            for row, b in zip(rows, rhs)
        ):
            return list(cand)
    return None


def exact_det(m):
    """Fraction-free (Bareiss) integer determinant."""
    a = [list(row) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


# ---------------------------------------------------------------------------
# ring specs and homomorphisms


def test_ring_spec_parse_and_str():
    assert RingSpec.parse("z") == INTEGERS
    assert RingSpec.parse("Z2") == RingSpec(2)
    assert RingSpec.parse(" z12 ") == RingSpec(12)
    assert str(RingSpec(3)) == "Z3"
    assert str(INTEGERS) == "Z"
    with pytest.raises(UnsupportedRingError):
        RingSpec.parse("gf4")


def test_ring_spec_rejects_bad_moduli():
    with pytest.raises(RingError):
        RingSpec(1)
    with pytest.raises(RingError):
        RingSpec(True)


def test_field_detection():
    assert RingSpec(2).is_field and RingSpec(5).is_field and RingSpec(13).is_field
    assert not RingSpec(4).is_field
    assert not RingSpec(6).is_field
    assert not INTEGERS.is_field


def test_canonical_arithmetic():
    z5 = RingSpec(5)
    assert z5.canon(-1) == 4
    assert z5.add(3, 4) == 2
    assert z5.mul(3, 4) == 2
    assert z5.neg(0) == 0
    assert INTEGERS.canon(-7) == -7
    assert list(z5.elements()) == [0, 1, 2, 3, 4]
    with pytest.raises(UnsupportedRingError):
        INTEGERS.elements()


def test_hom_family():
    RingHom(INTEGERS, RingSpec(4))
    RingHom(RingSpec(6), RingSpec(3))
    RingHom(RingSpec(6), RingSpec(6))
    with pytest.raises(HomomorphismError):
        RingHom(RingSpec(6), RingSpec(4))
    with pytest.raises(HomomorphismError):
        RingHom(RingSpec(3), INTEGERS)


@given(
    n=st.sampled_from([2, 3, 4, 6, 12]),
    rows=st.lists(
        st.lists(st.integers(-9, 9), min_size=3, max_size=3),
        min_size=2,
        max_size=3,
    ),
    x=st.lists(st.integers(-9, 9), min_size=3, max_size=3),
)
def test_hom_commutes_with_matrix_action(n, rows, x):
    # h(A.x) == h(A).h(x) for the quotient Z -> Z_n
    hom = RingHom(INTEGERS, RingSpec(n))
    lhs = ring_hom_apply(hom, mat_vec(INTEGERS, rows, x))
    hx = list(ring_hom_apply(hom, x))
    ha = [list(ring_hom_apply(hom, row)) for row in rows]
    rhs = tuple(mat_vec(RingSpec(n), ha, hx))
    assert lhs == rhs


# ---------------------------------------------------------------------------
# Hermite and Smith forms


def _is_unimodular(m):
    return abs(exact_det(m)) == 1


@given(
    st.lists(
        st.lists(st.integers(-20, 20), min_size=3, max_size=3),
        min_size=1,
        max_size=4,
    )
)
def test_row_hermite_witness_and_shape(a):
    h, u, pivots = row_hermite(a)
    assert _is_unimodular(u)
    assert mat_mul(INTEGERS, u, a) == h
    # echelon: pivot columns strictly increase, pivots positive,
    # entries above each pivot reduced into [0, pivot)
    last_col = -1
    for (r, c) in pivots:
        assert c > last_col
        last_col = c
        assert h[r][c] > 0
        for i in range(r):
            assert 0 <= h[i][c] < h[r][c]
    rank = len(pivots)
    for i in range(rank, len(h)):
        assert all(x == 0 for x in h[i])


@given(
    st.lists(
        st.lists(st.integers(-10, 10), min_size=2, max_size=4),
        min_size=1,
        max_size=4,
    )
)
def test_smith_form_witnesses_and_divisibility(a):
    width = len(a[0])
    a = [row[:width] for row in a if len(row) == width] or [a[0]]
    d, left, right = smith_normal_form(a)
    assert _is_unimodular(left)
    assert _is_unimodular(right)
    assert mat_mul(INTEGERS, mat_mul(INTEGERS, left, a), right) == d
    diag = [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]
    for i in range(len(d)):
        for j in range(len(d[0]) if d else 0):
            if i != j:
                assert d[i][j] == 0
    for x, y in zip(diag, diag[1:]):
        assert x >= 0
        if x == 0:
            assert y == 0
        else:
            assert y % x == 0


def test_smith_form_known_matrix():
    d, left, right = smith_normal_form([[2, 4], [6, 8]])
    assert [d[0][0], d[1][1]] == [2, 4]
    assert mat_mul(INTEGERS, mat_mul(INTEGERS, left, [[2, 4], [6, 8]]), right) == d


def test_smith_form_zero_matrix():
    d, _, _ = smith_normal_form([[0, 0], [0, 0]])
    assert d == [[0, 0], [0, 0]]


# ---------------------------------------------------------------------------
# solving: brute-force oracle over finite rings


@given(
    n=st.sampled_from([2, 3, 4, 5, 6]),
    nrows=st.integers(1, 4),
    ncols=st.integers(1, 4),
    seed=st.integers(0, 10_000),
)
@settings(max_examples=200)
def test_solve_matches_brute_force(n, nrows, ncols, seed):
    rng = random.Random(seed)
    ring = RingSpec(n)
    rows = [[rng.randrange(n) for _ in range(ncols)] for _ in range(nrows)]
    rhs = tuple(rng.randrange(n) for _ in range(nrows))
    verdict = solve_linear_system(
        LinearSystem(RingMatrix.from_rows(ring, rows), rhs)
    )
    reference = brute_force_solve(n, rows, rhs)
    assert verdict.solvable == (reference is not None)
    if verdict.solvable:
        assert tuple(mat_vec(ring, rows, list(verdict.solution))) == rhs


def test_integer_solve_known_cases():
    ring = INTEGERS
    # 2x = 3 has no integer solution although it has one over the rationals
    sys1 = LinearSystem(RingMatrix.from_rows(ring, [[2]]), (3,))
    assert not solve_linear_system(sys1).solvable
    sys2 = LinearSystem(RingMatrix.from_rows(ring, [[2, 3]]), (1,))
    v = solve_linear_system(sys2)
    assert v.solvable
    x = list(v.solution)
    assert 2 * x[0] + 3 * x[1] == 1


@given(
    nrows=st.integers(1, 3),
    ncols=st.integers(1, 3),
    seed=st.integers(0, 10_000),
)
@settings(max_examples=100)
def test_integer_solve_consistent_with_construction(nrows, ncols, seed):
    # build b = A.x for a random integer x, so the system is solvable by
    # construction; the solver must agree and return an exact solution
    rng = random.Random(seed)
    rows = [[rng.randint(-6, 6) for _ in range(ncols)] for _ in range(nrows)]
    x = [rng.randint(-5, 5) for _ in range(ncols)]
    rhs = tuple(mat_vec(INTEGERS, rows, x))
    v = solve_linear_system(LinearSystem(RingMatrix.from_rows(INTEGERS, rows), rhs))
    assert v.solvable
    assert tuple(mat_vec(INTEGERS, rows, list(v.solution))) == rhs


def test_field_kernel_basis_spans_solution_set():
    p = 3
    rows = [[1, 2, 0, 1], [2, 1, 1, 0]]
    dec = FieldDecomposition(rows, p)
    basis = dec.kernel_basis()
    assert len(basis) == 4 - dec.rank
    for vec in basis:
        assert all(v % p == 0 for v in mat_vec(RingSpec(p), rows, vec))
    spanned = set()
    for coeffs in product(range(p), repeat=len(basis)):
        v = [0, 0, 0, 0]
        for c, vec in zip(coeffs, basis):
            v = [(a + c * b) % p for a, b in zip(v, vec)]
        spanned.add(tuple(v))
    reference = {
        cand
        for cand in product(range(p), repeat=4)
        if all(sum(a * x for a, x in zip(row, cand)) % p == 0 for row in rows)
    }
    assert spanned == reference


@given(
    n=st.sampled_from([4, 6]),
    nrows=st.integers(1, 3),
    ncols=st.integers(1, 3),
    seed=st.integers(0, 5_000),
)
@settings(max_examples=100)
def test_modular_kernel_generators_generate_solution_module(n, nrows, ncols, seed):
    rng = random.Random(seed)
    rows = [[rng.randrange(n) for _ in range(ncols)] for _ in range(nrows)]
    dec = ModularDecomposition(rows, ncols, n)
    gens = dec.kernel_generators()
    ring = RingSpec(n)
    for g in gens:
        assert all(v == 0 for v in mat_vec(ring, rows, g))
    spanned = set()
    for coeffs in product(range(n), repeat=len(gens)):
        v = [0] * ncols
        for c, g in zip(coeffs, gens):
            v = [(a + c * b) % n for a, b in zip(v, g)]
        spanned.add(tuple(v))
    reference = {
        cand
        for cand in product(range(n), repeat=ncols)
        if all(sum(a * x for a, x in zip(row, cand)) % n == 0 for row in rows)
    }
    assert spanned == reference


def test_decomposition_reuse_across_right_hand_sides():
    ring = RingSpec(2)
    rows = [[1, 1, 0], [0, 1, 1]]
    dec = linear_decomposition(ring, rows)
    assert dec.solve([0, 0]) is not None
    assert dec.solve([1, 1]) is not None
    full = [rhs for rhs in product(range(2), repeat=2) if dec.solve(list(rhs))]
    assert len(full) == 4  # rank 2: every rhs reachable


# ---------------------------------------------------------------------------
# normal forms with witnesses


def test_integer_normal_form_witnesses():
    m = RingMatrix.from_rows(INTEGERS, [[4, 6], [2, 2]])
    nf = normal_form(m)
    u = nf.hermite_transform.rows()
    assert _is_unimodular(u)
    assert mat_mul(INTEGERS, u, m.rows()) == nf.hermite.rows()
    l = nf.smith_left.rows()
    r = nf.smith_right.rows()
    assert _is_unimodular(l) and _is_unimodular(r)
    assert mat_mul(INTEGERS, mat_mul(INTEGERS, l, m.rows()), r) == nf.smith.rows()


@given(
    n=st.sampled_from([2, 3, 4, 6]),
    seed=st.integers(0, 5_000),
)
@settings(max_examples=100)
def test_modular_normal_form_witness_invertible(n, seed):
    rng = random.Random(seed)
    nrows, ncols = rng.randint(1, 4), rng.randint(1, 4)
    ring = RingSpec(n)
    m = RingMatrix.from_rows(
        ring, [[rng.randrange(n) for _ in range(ncols)] for _ in range(nrows)]
    )
    nf = normal_form(m)
    t = nf.transform.rows()
    assert mat_mul(ring, t, m.rows()) == nf.form.rows()
    # the witness reduces a unimodular integer matrix, so its determinant
    # must be a unit mod n
    from math import gcd

    assert gcd(exact_det(t), n) == 1


def test_ring_matrix_validation():
    with pytest.raises(RingError):
        RingMatrix(RingSpec(3), 1, 2, (0, 5))  # 5 not canonical mod 3
    with pytest.raises(RingError):
        RingMatrix(INTEGERS, 2, 2, (1, 2, 3))  # wrong entry count
    with pytest.raises(RingError):
        LinearSystem(RingMatrix.from_rows(RingSpec(2), [[1, 0]]), (1, 0))
