import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartan_forge import (
    GF,
    DimensionError,
    Matrix,
    Product,
    RingError,
    RingMismatchError,
    Zn,
    canonical_span,
    commutator,
    contains,
    determinant,
    howell_form,
    inverse,
    is_free_basis,
    kronecker,
    matmul,
    module_equal,
    solve_kernel,
    solve_kernel_crt,
    trace,
)
from cartan_forge.construct import build_generators, build_weyl, JIndex
from cartan_forge.matlin import is_invertible, is_submodule


def brute_det(ring, rows):
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = ring.one
        for i in range(n):
            term = ring.mul(term, int(rows[i][perm[i]]))
        total = ring.add(total, ring.neg(term) if inversions % 2 else term)
    return total


def brute_span(ring, vectors, dim):
    """Every linear combination of the vectors, as a set of tuples."""
    vectors = [tuple(int(x) for x in v) for v in vectors]
    out = {tuple([0] * dim)}
    for v in vectors:
        new = set()
        for s in out:
            for c in ring.elements():
                new.add(tuple(ring.add(a, ring.mul(c, b)) for a, b in zip(s, v)))
        out = new
    return out


def brute_kernel(ring, M):
    rows, cols = M.shape
    sols = set()
    for x in itertools.product(list(ring.elements()), repeat=cols):
        ok = True
        for r in range(rows):
            acc = 0
            for c in range(cols):
                acc = ring.add(acc, ring.mul(int(M[r, c]), x[c]))
            if acc:
                ok = False
                break
        if ok:
            sols.add(x)
    return sols


def rand_matrix(ring, rows, cols, seed):
    rng = np.random.default_rng(seed)
    return Matrix(ring, rng.integers(0, ring.size, size=(rows, cols)))


# ---------------------------------------------------------------- arithmetic


def test_commutator_with_itself_is_zero():
    A = rand_matrix(Zn(12), 4, 4, 1)
    assert commutator(A, A).is_zero()


def test_commutator_of_clock_and_shift():
    R = Zn(7)
    D, P = build_generators(R, 3, 2)
    J10, J01, J11 = (build_weyl(D, P, JIndex(a, b)) for a, b in [(1, 0), (0, 1), (1, 1)])
    assert commutator(J10, J01) == J11 * 4


def test_kronecker_trace_and_mixed_product():
    R = Zn(9)
    A, B, C, E = (rand_matrix(R, 2, 2, s) for s in range(4))
    assert trace(kronecker(A, B)) == trace(A) * trace(B)
    assert matmul(kronecker(A, B), kronecker(C, E)) == kronecker(A @ C, B @ E)


def test_kronecker_layout():
    R = Zn(5)
    A = Matrix.from_values(R, [[1, 2], [3, 4]])
    B = Matrix.identity(R, 2)
    assert kronecker(A, B).to_values() == [[1, 0, 2, 0], [0, 1, 0, 2], [3, 0, 4, 0], [0, 3, 0, 4]]


def test_shape_and_ring_errors():
    A = Matrix.identity(Zn(5), 2)
    with pytest.raises(DimensionError):
        matmul(A, Matrix.identity(Zn(5), 3))
    with pytest.raises(RingMismatchError):
        matmul(A, Matrix.identity(Zn(7), 2))
    with pytest.raises(DimensionError):
        determinant(Matrix.zeros(Zn(5), 2, 3))
    with pytest.raises(RingError):
        Matrix(Zn(5), [[7]])


def test_matrix_is_immutable():
    A = Matrix.identity(Zn(5), 2)
    with pytest.raises((AttributeError, ValueError)):
        A.codes[0, 0] = 3
    with pytest.raises(AttributeError):
        A.ring = Zn(7)


# ---------------------------------------------------------------- determinant


def test_determinant_examples():
    assert determinant(Matrix.identity(Zn(9), 5)).code == 1
    R = Zn(7)
    assert determinant(Matrix.diagonal(R, [1, 2, 4])).code == 1
    assert determinant(Matrix.from_values(GF(2), [[0, 1], [1, 1]])).code == 1


@pytest.mark.parametrize("ring", [Zn(12), Zn(9), GF(2, 2), GF(3, 2), Product((Zn(4), Zn(3)))], ids=lambda r: r.to_dsl())
def test_determinant_matches_permutation_expansion(ring):
    for n in range(1, 5):
        for seed in range(15):
            A = rand_matrix(ring, n, n, 100 * n + seed)
            assert determinant(A).code == brute_det(ring, A.codes)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 6), modulus=st.sampled_from([12, 9, 217, 64]))
def test_determinant_multiplicative(seed, n, modulus):
    R = Zn(modulus)
    A, B = rand_matrix(R, n, n, seed), rand_matrix(R, n, n, seed + 1)
    assert determinant(A @ B) == determinant(A) * determinant(B)


@pytest.mark.parametrize("ring", [Zn(4), Zn(6), GF(2, 2), Zn(9)], ids=lambda r: r.to_dsl())
def test_invertible_iff_unit_determinant(ring):
    elems = list(ring.elements())
    for n in (1, 2):
        all_mats = np.array(list(itertools.product(elems, repeat=n * n)), dtype=ring.dtype).reshape(-1, n, n)
        ident = Matrix.identity(ring, n)
        for arr in all_mats[:: max(1, len(all_mats) // 300)]:
            A = Matrix(ring, arr)
            products = ring.vmatmul(np.broadcast_to(arr, all_mats.shape), all_mats)
            has_inverse = bool((products == ident.codes).all(axis=(1, 2)).any())
            assert has_inverse == is_invertible(A) == ring.is_unit(determinant(A).code)
            if has_inverse:
                assert A @ inverse(A) == ident


def test_invertibility_up_to_4x4_by_random_sampling():
    R = Zn(16)
    rng = np.random.default_rng(5)
    for _ in range(40):
        A = Matrix(R, rng.integers(0, 16, size=(4, 4)))
        if is_invertible(A):
            assert A @ inverse(A) == Matrix.identity(R, 4)
        else:
            with pytest.raises(RingError):
                inverse(A)


# ---------------------------------------------------------------- spans and kernels


def test_canonical_span_examples():
    S = canonical_span([(1, 2), (2, 4)], GF(5), 2)
    assert S.basis_rows.tolist() == [[1, 2]]
    T = canonical_span([(2, 0), (0, 2)], Zn(4), 2)
    assert sorted(T.basis_rows.tolist()) == [[0, 2], [2, 0]]
    Z = canonical_span([], Zn(4), 3)
    assert Z.is_zero()


def test_membership_examples():
    S = canonical_span([(1, 1)], Zn(4), 2)
    assert contains(S, (2, 2))
    assert not contains(canonical_span([(2, 0)], Zn(4), 2), (1, 0))
    v = (1, 3, 5)
    assert module_equal(canonical_span([v], Zn(12), 3), canonical_span([[5 * x % 12 for x in v]], Zn(12), 3))


def test_kernel_examples():
    K = solve_kernel(Matrix(Zn(4), [[2]]))
    assert module_equal(K, canonical_span([(2,)], Zn(4), 1))
    assert solve_kernel(Matrix.identity(Zn(9), 3)).is_zero()
    K = solve_kernel(Matrix(GF(3), [[1, 1], [2, 2]]))
    assert module_equal(K, canonical_span([(1, 2)], GF(3), 2))


def test_howell_form_is_canonical_for_equal_spans():
    rows = np.array([[2, 4, 6], [4, 0, 2]])
    H1 = howell_form(rows, 8)
    H2 = howell_form(np.array([[6, 4, 0], [2, 4, 6], [4, 0, 2]]) % 8, 8)  # third = first + second
    same = brute_span(Zn(8), rows, 3) == brute_span(Zn(8), np.array([[6, 4, 0], [2, 4, 6], [4, 0, 2]]), 3)
    assert same == np.array_equal(H1, H2)


RINGS = [Zn(4), Zn(6), Zn(8), Zn(9), GF(2, 2), Zn(5), Product((Zn(2), Zn(3)))]


@pytest.mark.parametrize("ring", RINGS, ids=lambda r: r.to_dsl())
def test_span_membership_matches_enumeration(ring):
    rng = np.random.default_rng(ring.size)
    dim = 3
    for _ in range(8):
        gens = rng.integers(0, ring.size, size=(rng.integers(0, 3), dim))
        S = canonical_span(gens, ring, dim)
        span = brute_span(ring, gens, dim)
        for v in itertools.product(list(ring.elements()), repeat=dim):
            assert contains(S, v) == (v in span)
        assert module_equal(S, canonical_span(S.basis_rows, ring, dim))


@pytest.mark.parametrize("ring", RINGS, ids=lambda r: r.to_dsl())
def test_canonical_form_decides_equality(ring):
    rng = np.random.default_rng(10 + ring.size)
    dim = 2
    mods = []
    for _ in range(12):
        gens = rng.integers(0, ring.size, size=(rng.integers(0, 3), dim))
        mods.append((canonical_span(gens, ring, dim), frozenset(brute_span(ring, gens, dim))))
    for (S, s), (T, t) in itertools.product(mods, repeat=2):
        assert module_equal(S, T) == (s == t)
        assert is_submodule(S, T) == (s <= t)


@pytest.mark.parametrize("ring", RINGS, ids=lambda r: r.to_dsl())
def test_kernel_matches_enumeration(ring):
    rng = np.random.default_rng(99 + ring.size)
    for _ in range(6):
        M = rng.integers(0, ring.size, size=(rng.integers(1, 4), 3))
        K = solve_kernel(M, ring)
        brute = brute_kernel(ring, M)
        assert brute_span(ring, K.basis_rows, 3) == brute


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), rows=st.integers(1, 12), cols=st.integers(1, 12), modulus=st.sampled_from([12, 36, 60, 63, 100, 217]))
def test_kernel_direct_equals_crt(seed, rows, cols, modulus):
    M = rand_matrix(Zn(modulus), rows, cols, seed)
    assert module_equal(solve_kernel(M), solve_kernel_crt(M))


def test_free_basis_detection():
    R = Zn(9)
    assert is_free_basis(R, np.array([[1, 0], [0, 1]]))
    assert not is_free_basis(R, np.array([[3, 0], [0, 1]]))
    assert not is_free_basis(R, np.array([[1, 2], [2, 4]]))
    assert is_free_basis(R, np.zeros((0, 3), dtype=np.int64))
