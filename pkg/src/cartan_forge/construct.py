"""Explicit orthogonal abelian Cartan decompositions of sl_n(R) for n = p^m.

The building blocks are the clock matrix ``D = diag(1, u, ..., u^(p-1))`` and
the cyclic shift ``P`` for a primitive p-th root of unity u with u - 1 a unit.
Monomials ``D^a P^b`` (and Kronecker products of them for m >= 2) give a
basis of sl_n(R) that splits into n + 1 commuting, mutually orthogonal blocks.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Sequence

import numpy as np

from .errors import PreconditionError
from .matlin import Matrix, kronecker
from .rings import GF, Ring, RingElement, field_trace, find_primitive_root, is_prime, prime_power, trace_dual_basis
from .sln import Decomposition, SlnAlgebra, Subalgebra, center


@dataclass(frozen=True)
class JIndex:
    a: int
    b: int

    def reduced(self, p: int) -> "JIndex":
        return JIndex(self.a % p, self.b % p)


def _as_element(ring: Ring, u) -> RingElement:
    return ring.element(u)


def check_root(ring: Ring, p: int, u) -> RingElement:
    """Validate that u is a primitive p-th root of unity with u - 1 a unit."""
    u = _as_element(ring, u)
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    if u == ring.element(1) or u**p != ring.element(1):
        raise PreconditionError(f"{u!r} is not a primitive {p}-th root of unity")
    if not ring.is_unit((u - 1).code):
        raise PreconditionError(f"u - 1 = {(u - 1)!r} is not a unit")
    return u


def build_generators(ring: Ring, p: int, u) -> tuple[Matrix, Matrix]:
    """Clock matrix D and cyclic shift P (ones below the diagonal and top-right)."""
    u = check_root(ring, p, u)
    D = Matrix.diagonal(ring, [u**i for i in range(p)])
    shift = np.zeros((p, p), dtype=ring.dtype)
    for i in range(p - 1):
        shift[i + 1, i] = ring.one
    shift[0, p - 1] = ring.one
    return D, Matrix(ring, shift)


def build_weyl(D: Matrix, P: Matrix, idx: JIndex) -> Matrix:
    """D^a P^b with exponents taken mod p."""
    p = D.rows
    idx = idx.reduced(p)
    return D.power(idx.a) @ P.power(idx.b)


def _provenance_u(u: RingElement) -> Any:
    return u.to_json()


def construct_prime(ring: Ring, p: int, u) -> Decomposition:
    """sl_p(R) = H_inf + H_0 + ... + H_(p-1), H_k spanned by D^a P^(ka), H_inf by the powers of P."""
    u = check_root(ring, p, u)
    D, P = build_generators(ring, p, u)
    alg = SlnAlgebra(ring, p)
    units = range(1, p)
    comps = [Subalgebra(alg, [build_weyl(D, P, JIndex(0, a)) for a in units], "H_inf")]
    for k in range(p):
        comps.append(Subalgebra(alg, [build_weyl(D, P, JIndex(a, k * a)) for a in units], f"H_{k}"))
    return Decomposition(alg, comps, {"p": p, "m": 1, "u": _provenance_u(u), "ring": ring.to_dsl()})


# ---------------------------------------------------------------------------
# the symplectic space GF(p^m) + GF(p^m)

@dataclass(frozen=True)
class SymplecticSpace:
    """W = F + F with <(x; y), (x'; y')> = Tr(x y' - x' y) and a symplectic basis.

    ``e_basis[i] = (alphas[i]; 0)`` and ``f_basis[i] = (0; betas[i])`` with the
    betas trace-dual to the alphas.
    """

    p: int
    m: int
    field: GF
    alphas: tuple[RingElement, ...]
    betas: tuple[RingElement, ...]

    @property
    def e_basis(self) -> list[tuple[RingElement, RingElement]]:
        zero = self.field.element(0)
        return [(a, zero) for a in self.alphas]

    @property
    def f_basis(self) -> list[tuple[RingElement, RingElement]]:
        zero = self.field.element(0)
        return [(zero, b) for b in self.betas]

    def pairing(self, w, w2) -> int:
        (x, y), (x2, y2) = w, w2
        return field_trace(self.field, x * y2 - x2 * y).code


def symplectic_basis(p: int, m: int) -> SymplecticSpace:
    F = GF(p, m)
    t = RingElement(F, F.generator_element()) if m > 1 else F.element(1)
    alphas = tuple(t**i for i in range(m))
    betas = tuple(trace_dual_basis(F, alphas))
    return SymplecticSpace(p, m, F, alphas, betas)


def coords_of(space: SymplecticSpace, w) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Coordinates (a_1..a_m; b_1..b_m) of a field pair in the symplectic basis."""
    x, y = (space.field.element(c) for c in w)
    a = tuple(field_trace(space.field, x * beta).code for beta in space.betas)
    b = tuple(field_trace(space.field, alpha * y).code for alpha in space.alphas)
    return a, b


def coord_pairing(w, w2, p: int) -> int:
    """sum(a_i b'_i - a'_i b_i) mod p on coordinate tuples."""
    (a, b), (a2, b2) = w, w2
    return sum(x * y2 - x2 * y for x, y, x2, y2 in zip(a, b, a2, b2)) % p


def cocycle(w, w2, p: int) -> int:
    """Exponent sum(a'_i b_i) mod p in J_w J_w' = u^(-exponent) J_(w+w')."""
    (_, b), (a2, _) = w, w2
    return sum(x * y for x, y in zip(a2, b)) % p


def build_weyl_tensor(D: Matrix, P: Matrix, w) -> Matrix:
    """Kronecker product of D^(a_i) P^(b_i) over the coordinates (a; b) of w."""
    a, b = w
    return reduce(kronecker, [build_weyl(D, P, JIndex(x, y)) for x, y in zip(a, b)])


def _field_label(F: GF, x: RingElement) -> str:
    if F.m == 1:
        return str(x.code)
    return json.dumps(list(x.value), separators=(",", ":"))


def construct_prime_power(ring: Ring, p: int, m: int, u) -> Decomposition:
    """sl_(p^m)(R) = H_inf + sum over alpha in GF(p^m) of H_alpha."""
    if m == 1:
        return construct_prime(ring, p, u)
    if m < 1:
        raise PreconditionError("m must be positive")
    u = check_root(ring, p, u)
    D, P = build_generators(ring, p, u)
    space = symplectic_basis(p, m)
    F = space.field
    n = p**m
    alg = SlnAlgebra(ring, n)
    nonzero = [RingElement(F, c) for c in F.elements() if c != 0]
    zero = F.element(0)

    def block(pairs):
        return [build_weyl_tensor(D, P, coords_of(space, w)) for w in pairs]

    comps = [Subalgebra(alg, block([(zero, lam) for lam in nonzero]), "H_inf")]
    for alpha in (RingElement(F, c) for c in F.elements()):
        comps.append(Subalgebra(alg, block([(lam, alpha * lam) for lam in nonzero]), f"H_{_field_label(F, alpha)}"))
    provenance = {
        "p": p,
        "m": m,
        "u": _provenance_u(u),
        "ring": ring.to_dsl(),
        "symplectic_basis": {
            "field": F.to_dsl(),
            "alpha": [list(a.value) for a in space.alphas],
            "beta": [list(b.value) for b in space.betas],
        },
    }
    return Decomposition(alg, comps, provenance)


# ---------------------------------------------------------------------------
# dispatch

class Verdict(enum.Enum):
    NO_ODAC = "NoODAC"
    NO_CONSTRUCTION = "NoConstruction"
    CONSTRUCTIBLE = "Constructible"


@dataclass
class Obstruction:
    verdict: Verdict
    reason: str
    witness: list[Matrix] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "reason": self.reason,
            "witness": [
                [[m.ring.to_json_value(int(x)) for x in row] for row in m.codes] for m in self.witness
            ],
        }


def describe_matrix(M: Matrix) -> str:
    """``cI`` for scalar matrices, else the nested value list."""
    diag = np.diagonal(M.codes)
    off = M.codes - np.diag(diag)
    if not off.any() and (diag == diag[0]).all():
        value = M.ring.to_json_value(int(diag[0]))
        return f"{json.dumps(value, separators=(',', ':'))}I"
    return json.dumps(M.to_values())


def construct_odac(ring: Ring, n: int) -> Decomposition | Obstruction:
    alg = SlnAlgebra(ring, n)
    Z = center(alg)
    if not Z.is_zero():
        witness = [alg.from_coords(v) for v in Z.basis_rows]
        names = ", ".join(describe_matrix(M) for M in witness)
        return Obstruction(
            Verdict.NO_ODAC,
            f"sl_{n}({ring.to_dsl()}) has nonzero center containing {names}; "
            "every abelian Cartan subalgebra contains it, so no two components meet trivially",
            witness,
        )
    pk = prime_power(n)
    if pk is None:
        return Obstruction(Verdict.NO_CONSTRUCTION, f"n = {n} is not a prime power; existence is unknown")
    p, m = pk
    for lf in ring.local_factors():
        if lf.residue_field_unit_order % p:
            return Obstruction(
                Verdict.NO_CONSTRUCTION,
                f"p = {p} does not divide |k^x| = {lf.residue_field_unit_order} "
                f"for the local factor {lf.ring.to_dsl()}",
            )
    u = find_primitive_root(ring, p)
    if u is None:  # pragma: no cover - excluded by the residue criterion above
        return Obstruction(Verdict.NO_CONSTRUCTION, f"no primitive {p}-th root u with u - 1 a unit")
    return construct_prime_power(ring, p, m, u)


def shift_matrix(ring: Ring, p: int, u) -> Matrix:
    """Circulant with entry (i, j) = u^T((i - j) mod p), T(k) = k(k+1)/2.

    Conjugation by it fixes H_inf and moves H_k to H_(k-1).
    """
    if p == 2:
        raise PreconditionError("the shift matrix is only defined for odd p")
    u = check_root(ring, p, u)
    entries = [[u ** ((((i - j) % p) * (((i - j) % p) + 1) // 2) % p) for j in range(p)] for i in range(p)]
    return Matrix.from_values(ring, entries)


def sl3_monomial_decomposition(ring: Ring, u) -> Decomposition:
    """H_0 (diagonal) and the three monomial blocks listed for sl_3 over a field with a cube root u."""
    u = check_root(ring, 3, u)
    alg = SlnAlgebra(ring, 3)
    one, zero = ring.element(1), ring.element(0)

    def pair(a, b, c, d):
        first = Matrix.from_values(ring, [[zero, one, zero], [zero, zero, a], [b, zero, zero]])
        second = Matrix.from_values(ring, [[zero, zero, one], [c, zero, zero], [zero, d, zero]])
        return [first, second]

    h0 = [Matrix.diagonal(ring, [1, -1, 0]), Matrix.diagonal(ring, [0, 1, -1])]
    return Decomposition(
        alg,
        [
            Subalgebra(alg, h0, "H_0"),
            Subalgebra(alg, pair(one, one, one, one), "H_1"),
            Subalgebra(alg, pair(u, u**2, u**2, u), "H_2"),
            Subalgebra(alg, pair(u**2, u, u, u**2), "H_3"),
        ],
        {"u": u.to_json(), "ring": ring.to_dsl()},
    )
