import itertools
import json
import random

import numpy as np
import pytest

from cartan_forge import (
    GF,
    Decomposition,
    JIndex,
    Matrix,
    Obstruction,
    PreconditionError,
    Product,
    SlnAlgebra,
    Verdict,
    Zn,
    build_generators,
    build_weyl,
    build_weyl_tensor,
    center,
    check_root,
    cocycle,
    conjugate_decomposition,
    conjugate_subalgebra,
    construct_odac,
    construct_prime,
    construct_prime_power,
    coord_pairing,
    coords_of,
    field_trace,
    inverse,
    kronecker,
    module_equal,
    shift_matrix,
    sl3_monomial_decomposition,
    symplectic_basis,
    verify_odac,
)
from cartan_forge.construct import describe_matrix

# (ring, p, u) with u a primitive p-th root and u - 1 a unit
ROOTS = [(Zn(9), 2, 8), (Zn(7), 3, 2), (Zn(11), 5, 3), (Zn(217), 3, 191), (Zn(31), 5, 2), (GF(2, 2), 3, [0, 1])]


def scalar(ring, x):
    return ring.element(x)


# ---------------------------------------------------------------- generators and relations


def test_generator_examples():
    R = Zn(7)
    D, P = build_generators(R, 3, 2)
    assert D.to_values() == [[1, 0, 0], [0, 2, 0], [0, 0, 4]]
    assert D.trace().code == 0
    assert P.power(3) == Matrix.identity(R, 3)
    assert P.to_values() == [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
    u_inv = R.element(2).inverse()
    assert P @ D == (D @ P) * u_inv


@pytest.mark.parametrize("ring,p,u", ROOTS, ids=lambda x: str(x))
def test_generator_orders(ring, p, u):
    D, P = build_generators(ring, p, u)
    ident = Matrix.identity(ring, p)
    assert D.power(p) == ident and P.power(p) == ident
    for k in range(1, p):
        assert D.power(k) != ident and P.power(k) != ident


@pytest.mark.parametrize("bad", [(Zn(9), 3, 4), (Zn(7), 3, 1), (Zn(7), 3, 3), (Zn(7), 4, 2)])
def test_invalid_roots_rejected(bad):
    with pytest.raises(PreconditionError):
        check_root(*bad)


def test_identity_index():
    D, P = build_generators(Zn(7), 3, 2)
    J = build_weyl(D, P, JIndex(0, 0))
    assert J == Matrix.identity(Zn(7), 3) and J.trace().code == 3
    assert JIndex(4, -1).reduced(3) == JIndex(1, 2)


@pytest.mark.parametrize("ring,p,u", ROOTS, ids=lambda x: str(x))
def test_prime_relations_exhaustive(ring, p, u):
    D, P = build_generators(ring, p, u)
    ue = ring.element(u)
    uinv = ue.inverse()
    J = {(a, b): build_weyl(D, P, JIndex(a, b)) for a in range(p) for b in range(p)}
    for (a, b), M in J.items():
        assert M.trace().is_zero() == ((a, b) != (0, 0))
        assert P.power(b) @ D.power(a) == (D.power(a) @ P.power(b)) * uinv ** (a * b)
    for (a, b), (c, d) in itertools.product(J, repeat=2):
        target = J[((a + c) % p, (b + d) % p)]
        assert J[a, b] @ J[c, d] == target * uinv ** (b * c)
        bracket = J[a, b] @ J[c, d] - J[c, d] @ J[a, b]
        assert bracket == target * (uinv ** (b * c) - uinv ** (a * d))


def all_coordinate_vectors(p, m):
    for flat in itertools.product(range(p), repeat=2 * m):
        yield (tuple(flat[:m]), tuple(flat[m:]))


@pytest.mark.parametrize("ring,u", [(Zn(9), 8), (Zn(15), 14), (GF(5, 2), 4)], ids=str)
def test_tensor_relations_exhaustive_p2_m2(ring, u):
    p, m = 2, 2
    D, P = build_generators(ring, p, u)
    ue = ring.element(u)
    uinv = ue.inverse()
    vecs = list(all_coordinate_vectors(p, m))
    Jw = {w: build_weyl_tensor(D, P, w) for w in vecs}
    for w in vecs:
        assert Jw[w].trace().is_zero() == (w != ((0, 0), (0, 0)))
    for w, w2 in itertools.product(vecs, repeat=2):
        s = (tuple((x + y) % p for x, y in zip(w[0], w2[0])), tuple((x + y) % p for x, y in zip(w[1], w2[1])))
        assert Jw[w] @ Jw[w2] == Jw[s] * uinv ** cocycle(w, w2, p)
        bracket = Jw[w] @ Jw[w2] - Jw[w2] @ Jw[w]
        expect = Jw[s] * (uinv ** cocycle(w2, w, p) * (ue ** coord_pairing(w, w2, p) - 1))
        assert bracket == expect
        assert coord_pairing(w, w2, p) == (cocycle(w2, w, p) - cocycle(w, w2, p)) % p


def test_tensor_of_zero_is_identity():
    D, P = build_generators(Zn(7), 3, 2)
    w = ((0, 0), (0, 0))
    assert build_weyl_tensor(D, P, w) == Matrix.identity(Zn(7), 9)


# ---------------------------------------------------------------- symplectic space


def test_symplectic_basis_m1():
    S = symplectic_basis(5, 1)
    (e,), (f,) = S.e_basis, S.f_basis
    assert e[0].code == 1 and e[1].code == 0 and f[0].code == 0 and f[1].code == 1
    assert S.pairing(e, f) == 1


def test_symplectic_basis_2_2():
    S = symplectic_basis(2, 2)
    assert [list(a.value) for a in S.alphas] == [[1, 0], [0, 1]]
    assert [list(b.value) for b in S.betas] == [[1, 1], [1, 0]]
    es, fs = S.e_basis, S.f_basis
    for i, j in itertools.product(range(2), repeat=2):
        assert S.pairing(es[i], fs[j]) == (1 if i == j else 0)
        assert S.pairing(es[i], es[j]) == 0
        assert S.pairing(fs[i], fs[j]) == 0


@pytest.mark.parametrize("p,m", [(2, 2), (3, 2), (2, 3), (5, 2)])
def test_pairing_is_alternating_and_matches_coordinates(p, m):
    S = symplectic_basis(p, m)
    F = S.field
    elems = [F.element(list(F.decode(c))) for c in F.elements()]
    rng = random.Random(p * 10 + m)
    for _ in range(100):
        w = (rng.choice(elems), rng.choice(elems))
        w2 = (rng.choice(elems), rng.choice(elems))
        assert S.pairing(w, w) == 0
        assert coord_pairing(coords_of(S, (w[0].value, w[1].value)), coords_of(S, (w2[0].value, w2[1].value)), p) == S.pairing(w, w2)


def test_coords_of_basis_and_zero():
    S = symplectic_basis(3, 2)
    e1 = S.e_basis[0]
    assert coords_of(S, (e1[0].value, e1[1].value)) == ((1, 0), (0, 0))
    f2 = S.f_basis[1]
    assert coords_of(S, (f2[0].value, f2[1].value)) == ((0, 0), (0, 1))
    zero = S.field.element(0).value
    assert coords_of(S, (zero, zero)) == ((0, 0), (0, 0))


# ---------------------------------------------------------------- constructions


def span_equal(H, matrices):
    alg = H.algebra
    other = alg.subalgebra(matrices)
    return module_equal(H.coords, other.coords)


def test_sl2_over_z9_matches_the_three_lines():
    R = Zn(9)
    D = construct_prime(R, 2, 8)
    assert D.names == ["H_inf", "H_0", "H_1"]
    H_inf, H0, H1 = D.components
    assert span_equal(H0, [Matrix.from_values(R, [[1, 0], [0, -1]])])
    assert span_equal(H_inf, [Matrix.from_values(R, [[0, 1], [1, 0]])])
    assert span_equal(H1, [Matrix.from_values(R, [[0, 1], [-1, 0]])])
    assert D.provenance == {"p": 2, "m": 1, "u": 8, "ring": "Z/9"}


def test_sl3_over_z7_matches_theorem_listing():
    R = Zn(7)
    D = construct_prime(R, 3, 2)
    T = sl3_monomial_decomposition(R, 2)
    ours = [H.coords for H in D.components]
    theirs = [H.coords for H in T.components]
    assert len(ours) == 4
    for S in ours:
        assert sum(module_equal(S, X) for X in theirs) == 1
    assert verify_odac(D).passed


@pytest.mark.parametrize("ring,p,u", ROOTS, ids=lambda x: str(x))
def test_prime_construction_shape_and_verification(ring, p, u):
    D = construct_prime(ring, p, u)
    assert len(D.components) == p + 1
    assert all(H.rank == p - 1 for H in D.components)
    report = verify_odac(D, classical=False)
    assert report.passed, report.witness


def test_prime_power_z9_sl4():
    D = construct_prime_power(Zn(9), 2, 2, 8)
    assert len(D.components) == 5 and all(H.rank == 3 for H in D.components)
    assert D.names[0] == "H_inf" and D.names[1] == "H_[0,0]"
    assert verify_odac(D).passed
    assert D.provenance["symplectic_basis"]["beta"] == [[1, 1], [1, 0]]


def test_prime_power_gf7_sl9_shape():
    D = construct_prime_power(GF(7), 3, 2, 2)
    assert len(D.components) == 10 and all(H.rank == 8 for H in D.components)
    assert sum(H.rank for H in D.components) == 80


def test_prime_power_over_gf4_sl8():
    D = construct_prime_power(GF(5, 2), 2, 3, 4)
    assert len(D.components) == 9
    assert verify_odac(D, classical=False).passed


def test_prime_power_delegates_for_m1():
    a = construct_prime_power(Zn(7), 3, 1, 2)
    b = construct_prime(Zn(7), 3, 2)
    assert [H.basis_matrices for H in a.components] == [H.basis_matrices for H in b.components]


# ---------------------------------------------------------------- dispatch


def test_dispatch_examples():
    D = construct_odac(Zn(217), 3)
    assert isinstance(D, Decomposition) and D.provenance["u"] == 191
    assert verify_odac(D).passed
    ob = construct_odac(Zn(9), 3)
    assert isinstance(ob, Obstruction) and ob.verdict is Verdict.NO_ODAC
    assert "3I" in ob.reason
    assert ob.witness[0] == Matrix.diagonal(Zn(9), [3, 3, 3]) or describe_matrix(ob.witness[0]) in {"3I", "6I"}
    ob = construct_odac(Zn(2), 2)
    assert ob.verdict is Verdict.NO_ODAC and "1I" in ob.reason
    ob = construct_odac(Zn(5), 6)
    assert ob.verdict is Verdict.NO_CONSTRUCTION and "not a prime power" in ob.reason
    ob = construct_odac(Zn(5), 3)
    assert ob.verdict is Verdict.NO_CONSTRUCTION and "|k^x|" in ob.reason
    json.dumps(ob.to_json())


def test_obstruction_json():
    ob = construct_odac(Zn(9), 3)
    doc = ob.to_json()
    assert doc["verdict"] == "NoODAC"
    assert doc["witness"][0] in ([[3, 0, 0], [0, 3, 0], [0, 0, 3]], [[6, 0, 0], [0, 6, 0], [0, 0, 6]])


def test_describe_matrix():
    assert describe_matrix(Matrix.diagonal(Zn(9), [3, 3, 3])) == "3I"
    assert describe_matrix(Matrix.identity(GF(2, 2), 2)) == "[1,0]I"
    assert describe_matrix(Matrix.from_values(Zn(5), [[0, 1], [0, 0]])) == "[[0, 1], [0, 0]]"


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_no_odac_only_with_nonzero_center(n):
    for modulus in range(2, 41):
        R = Zn(modulus)
        result = construct_odac(R, n)
        has_center = not center(SlnAlgebra(R, n)).is_zero()
        if isinstance(result, Obstruction):
            assert (result.verdict is Verdict.NO_ODAC) == has_center
        else:
            assert not has_center
            if n <= 3 or modulus in (11, 31):
                assert verify_odac(result, classical=False).passed, (modulus, n)


def test_product_ring_construction():
    R = Product((Zn(7), GF(2, 2)))
    D = construct_odac(R, 3)
    assert isinstance(D, Decomposition)
    assert verify_odac(D).passed


# ---------------------------------------------------------------- shift matrix


def test_shift_matrix_example():
    X = shift_matrix(Zn(7), 3, 2)
    assert X.to_values() == [[1, 1, 2], [2, 1, 1], [1, 2, 1]]


def test_shift_matrix_rejects_p2():
    with pytest.raises(PreconditionError):
        shift_matrix(Zn(9), 2, 8)


@pytest.mark.parametrize("ring,p,u", [(Zn(7), 3, 2), (Zn(11), 5, 3), (Zn(31), 5, 2), (Zn(29), 7, 7)], ids=str)
def test_shift_matrix_cycles_components(ring, p, u):
    X = shift_matrix(ring, p, u)
    D, P = build_generators(ring, p, u)
    Xi = inverse(X)
    assert X @ P == P @ X
    assert Xi @ (D @ P) @ X == D
    dec = construct_prime(ring, p, u)
    moved = conjugate_decomposition(X, dec)
    assert module_equal(moved.components[0].coords, dec.components[0].coords)
    for k in range(p):
        target = dec.components[1 + (k - 1) % p]
        assert module_equal(moved.components[1 + k].coords, target.coords)


def test_theorem_x_and_y_directions():
    # under g^-1 h g, X sends the theorem's third block to the diagonal and X^-1 the second;
    # Y sends the all-ones block to the diagonal
    F, u = Zn(7), 2
    T = sl3_monomial_decomposition(F, u)
    H0, H1, H2, H3 = T.components
    X = Matrix.from_values(F, [[1, 1, u], [u, 1, 1], [1, u, 1]])
    assert module_equal(conjugate_subalgebra(X, H3).coords, H0.coords)
    assert module_equal(conjugate_subalgebra(inverse(X), H2).coords, H0.coords)
    Y = Matrix.from_values(F, [[u, u, 1], [u, 1, u], [u, u * u, u * u]])
    assert module_equal(conjugate_subalgebra(Y, H1).coords, H0.coords)


def test_shift_formula_matches_displayed_exponents():
    # displayed row i, column j exponent: T((i - j) mod p) with T(k) = k(k+1)/2, reduced mod p
    p, ring, u = 5, Zn(11), 3
    X = shift_matrix(ring, p, u)
    for i, j in itertools.product(range(p), repeat=2):
        k = (i - j) % p
        assert X[i, j] == ring.element(u) ** (k * (k + 1) // 2)
    assert X[0, 1] == ring.element(u) ** (p * (p - 1) // 2)
