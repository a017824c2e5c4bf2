"""The Lie algebra sl_n(R) and certification of orthogonal abelian Cartan decompositions.

Coordinates on sl_n follow a fixed basis: the off-diagonal units E_ij in
row-major order, then D_i = E_ii - E_(i+1)(i+1) for i = 1..n-1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from .errors import DimensionError, PreconditionError, RingError, RingMismatchError
from .matlin import (
    Matrix,
    Submodule,
    canonical_span,
    determinant,
    inverse,
    is_free_basis,
    module_equal,
    solve_kernel,
)
from .rings import Ring, RingElement


class SlnAlgebra:
    def __init__(self, ring: Ring, n: int):
        if n < 2:
            raise DimensionError(f"sl_n needs n >= 2, got {n}")
        self.ring = ring
        self.n = n
        self.dim = n * n - 1
        self._offdiag = [(i, j) for i in range(n) for j in range(n) if i != j]

    def __eq__(self, other):
        return isinstance(other, SlnAlgebra) and (self.ring, self.n) == (other.ring, other.n)

    def __hash__(self):
        return hash((self.ring, self.n))

    def __repr__(self):
        return f"sl_{self.n}({self.ring.to_dsl()})"

    @cached_property
    def basis_codes(self) -> np.ndarray:
        ring, n = self.ring, self.n
        out = np.zeros((self.dim, n, n), dtype=ring.dtype)
        for k, (i, j) in enumerate(self._offdiag):
            out[k, i, j] = ring.one
        for i in range(n - 1):
            k = len(self._offdiag) + i
            out[k, i, i] = ring.one
            out[k, i + 1, i + 1] = ring.neg(ring.one)
        out.setflags(write=False)
        return out

    @property
    def basis(self) -> list[Matrix]:
        return [Matrix._wrap(self.ring, b) for b in self.basis_codes]

    def is_traceless(self, M: Matrix) -> bool:
        return M.shape == (self.n, self.n) and M.trace().is_zero()

    def _check_member(self, M: Matrix):
        if not isinstance(M, Matrix):
            raise TypeError("expected a Matrix")
        if M.ring != self.ring:
            raise RingMismatchError(f"matrix over {M.ring.to_dsl()} used in {self!r}")
        if M.shape != (self.n, self.n):
            raise DimensionError(f"expected a {self.n}x{self.n} matrix, got {M.shape}")
        if not M.trace().is_zero():
            raise PreconditionError("matrix is not traceless")

    def coords_batch(self, arr: np.ndarray) -> np.ndarray:
        """Coordinates of a stack of traceless matrices (..., n, n) -> (..., n^2 - 1)."""
        ring, n = self.ring, self.n
        arr = np.asarray(arr)
        rows = np.array([i for i, _ in self._offdiag], dtype=int)
        cols = np.array([j for _, j in self._offdiag], dtype=int)
        off = arr[..., rows, cols]
        diag_parts = []
        acc = arr[..., 0, 0]
        diag_parts.append(acc)
        for i in range(1, n - 1):
            acc = ring.vadd(acc, arr[..., i, i])
            diag_parts.append(acc)
        diag = np.stack(diag_parts, axis=-1).astype(ring.dtype)
        return np.concatenate([off.astype(ring.dtype), diag], axis=-1)

    def coords(self, M: Matrix) -> np.ndarray:
        self._check_member(M)
        return self.coords_batch(M.codes)

    def from_coords(self, v) -> Matrix:
        ring, n = self.ring, self.n
        v = np.asarray(v, dtype=ring.dtype)
        if v.shape != (self.dim,):
            raise DimensionError(f"expected {self.dim} coordinates")
        out = ring.vsum(ring.vmul(v[:, None, None], self.basis_codes), axis=0)
        return Matrix._wrap(ring, out)

    def bracket_codes(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        ring = self.ring
        return ring.vsub(ring.vmatmul(a, b), ring.vmatmul(b, a))

    def right_bracket_map(self, h: np.ndarray) -> np.ndarray:
        """Coordinate matrix of x -> [x, h]; column k is coords([b_k, h])."""
        brackets = self.bracket_codes(self.basis_codes, np.asarray(h))
        return self.coords_batch(brackets).T.copy()

    def ad(self, A: Matrix) -> Matrix:
        """Coordinate matrix of ad A = [A, -]."""
        self._check_member(A)
        brackets = self.bracket_codes(np.asarray(A.codes)[None], self.basis_codes)
        return Matrix._wrap(self.ring, self.coords_batch(brackets).T.copy())

    def subalgebra(self, matrices: Sequence[Matrix], name: str | None = None) -> "Subalgebra":
        return Subalgebra(self, list(matrices), name)


class Subalgebra:
    """A submodule of sl_n(R) spanned by ``basis_matrices``."""

    def __init__(self, algebra: SlnAlgebra, basis_matrices: Sequence[Matrix], name: str | None = None):
        for M in basis_matrices:
            algebra._check_member(M)
        self.algebra = algebra
        self.basis_matrices = list(basis_matrices)
        self.name = name

    @cached_property
    def basis_codes(self) -> np.ndarray:
        n, ring = self.algebra.n, self.algebra.ring
        if not self.basis_matrices:
            return np.zeros((0, n, n), dtype=ring.dtype)
        return np.stack([M.codes for M in self.basis_matrices])

    @cached_property
    def coord_rows(self) -> np.ndarray:
        """Coordinates of the given basis matrices, one row each."""
        if not self.basis_matrices:
            return np.zeros((0, self.algebra.dim), dtype=self.algebra.ring.dtype)
        return self.algebra.coords_batch(self.basis_codes)

    @cached_property
    def coords(self) -> Submodule:
        return canonical_span(self.coord_rows, self.algebra.ring, self.algebra.dim)

    @property
    def rank(self) -> int:
        return len(self.basis_matrices)

    def closed_under_bracket(self) -> bool:
        H = self.basis_codes
        if not len(H):
            return True
        brackets = self.algebra.bracket_codes(H[:, None], H[None, :])
        vecs = self.algebra.coords_batch(brackets).reshape(-1, self.algebra.dim)
        return all(self.coords.contains(v) for v in vecs)

    def __repr__(self):
        label = self.name or "H"
        return f"Subalgebra({label}, rank={self.rank}, {self.algebra!r})"


@dataclass
class Decomposition:
    algebra: SlnAlgebra
    components: list[Subalgebra]
    provenance: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.components:
            raise PreconditionError("a decomposition needs at least one component")
        for H in self.components:
            if H.algebra != self.algebra:
                raise DimensionError("components live in different algebras")

    @property
    def names(self) -> list[str]:
        return [H.name or f"H{i}" for i, H in enumerate(self.components)]


@dataclass
class VerificationReport:
    components_free: bool
    direct_sum_spans: bool
    pairwise_orthogonal: bool
    each_abelian: bool
    each_self_normalizing: bool
    all_classical: bool | None = None
    witness: dict[str, Any] = field(default_factory=dict)

    MANDATORY = (
        "components_free",
        "direct_sum_spans",
        "pairwise_orthogonal",
        "each_abelian",
        "each_self_normalizing",
    )

    @property
    def passed(self) -> bool:
        return all(getattr(self, k) for k in self.MANDATORY)

    def checks(self) -> dict[str, bool | None]:
        out = {k: getattr(self, k) for k in self.MANDATORY}
        out["all_classical"] = self.all_classical
        return out

    def to_json(self) -> dict[str, Any]:
        return {**self.checks(), "passed": self.passed, "witness": self.witness}


# ---------------------------------------------------------------------------
# Killing forms

def killing_trace_form(algebra: SlnAlgebra, A: Matrix, B: Matrix) -> RingElement:
    """K(A, B) = 2n Tr(AB)."""
    algebra._check_member(A)
    algebra._check_member(B)
    return (A @ B).trace() * (2 * algebra.n)


def killing_ad_form(algebra: SlnAlgebra, A: Matrix, B: Matrix) -> RingElement:
    """K(A, B) = Tr(ad A . ad B), computed on coordinate matrices."""
    return (algebra.ad(A) @ algebra.ad(B)).trace()


def _killing_gram_codes(algebra: SlnAlgebra, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    ring, n = algebra.ring, algebra.n
    flat_left = np.asarray(left).reshape(len(left), n * n)
    flat_right_t = np.asarray(right).transpose(0, 2, 1).reshape(len(right), n * n)
    traces = ring.vmatmul(flat_left, flat_right_t.T.copy())
    return ring.vmul(traces, ring.from_int(2 * n))


def killing_gram(H: Subalgebra) -> Matrix:
    codes = _killing_gram_codes(H.algebra, H.basis_codes, H.basis_codes)
    return Matrix._wrap(H.algebra.ring, codes.reshape(H.rank, H.rank))


def is_nondegenerate(H: Subalgebra) -> bool:
    return H.algebra.ring.is_unit(determinant(killing_gram(H)).code)


# ---------------------------------------------------------------------------
# subalgebra structure

def is_abelian(H: Subalgebra) -> bool:
    B = H.basis_codes
    if not len(B):
        return True
    prods = H.algebra.ring.vmatmul(B[:, None], B[None, :])
    return bool(np.array_equal(prods, prods.transpose(1, 0, 2, 3)))


def center(algebra: SlnAlgebra) -> Submodule:
    """{A : [A, b] = 0 for every basis element b}, from one stacked kernel."""
    blocks = [algebra.right_bracket_map(b) for b in algebra.basis_codes]
    return solve_kernel(np.concatenate(blocks, axis=0), algebra.ring)


def normalizer(H: Subalgebra) -> Submodule:
    """N(H) = {A : [A, h] in H for all h in H} as a coordinate submodule.

    Solves coords([x, h_i]) - Hc^T y_i = 0 in the unknowns (x, y_1, ..., y_r)
    and projects the solution module onto x.
    """
    if not H.closed_under_bracket():
        raise PreconditionError("normalizer requires a bracket-closed subalgebra")
    alg, ring = H.algebra, H.algebra.ring
    N, r = alg.dim, H.rank
    if r == 0:
        return Submodule(ring, N, np.eye(N, dtype=np.int64) * ring.one)
    neg_hc_t = ring.vneg(H.coord_rows.T)
    system = np.zeros((r * N, N + r * r), dtype=ring.dtype)
    for i, h in enumerate(H.basis_codes):
        system[i * N:(i + 1) * N, :N] = alg.right_bracket_map(h)
        system[i * N:(i + 1) * N, N + i * r:N + (i + 1) * r] = neg_hc_t
    sol = solve_kernel(system, ring)
    return canonical_span(sol.project(slice(0, N)).generators, ring, N)


def is_self_normalizing(H: Subalgebra) -> bool:
    return module_equal(normalizer(H), H.coords)


def is_cartan_abelian(H: Subalgebra) -> bool:
    return is_abelian(H) and is_self_normalizing(H)


# ---------------------------------------------------------------------------
# verification

def _matrix_json(ring: Ring, codes: np.ndarray) -> list[list]:
    return [[ring.to_json_value(int(x)) for x in row] for row in codes]


def verify_odac(D: Decomposition, classical: bool | None = None) -> VerificationReport:
    """Certify a claimed orthogonal decomposition into abelian Cartan subalgebras.

    ``classical`` adds the root-space test for every component; by default it
    runs exactly when the base ring is a field.
    """
    alg, ring = D.algebra, D.algebra.ring
    comps = D.components
    names = D.names
    witness: dict[str, Any] = {}

    non_free = [i for i, H in enumerate(comps) if not is_free_basis(ring, H.coord_rows)]
    components_free = not non_free
    if non_free:
        witness["components_free"] = {
            "components": non_free,
            "names": [names[i] for i in non_free],
            "detail": "basis is not free over some residue field",
        }

    stacked = np.concatenate([H.coord_rows for H in comps], axis=0)
    total = stacked.shape[0]
    if total != alg.dim:
        direct = False
        detail = f"total basis size {total} differs from dim sl_n = {alg.dim}"
    else:
        direct = ring.is_unit(determinant(Matrix._wrap(ring, stacked)).code)
        detail = "stacked coordinate matrix has non-unit determinant"
    if not direct:
        culprits = list(non_free)
        if not culprits and total == alg.dim:
            for j in range(1, len(comps) + 1):
                if not is_free_basis(ring, np.concatenate([H.coord_rows for H in comps[:j]], axis=0)):
                    culprits = [j - 1]
                    break
        witness["direct_sum_spans"] = {
            "components": culprits,
            "names": [names[i] for i in culprits],
            "detail": detail,
        }

    orthogonal = True
    bounds = np.cumsum([0] + [H.rank for H in comps])
    all_codes = np.concatenate([H.basis_codes for H in comps], axis=0)
    gram = _killing_gram_codes(alg, all_codes, all_codes) if len(all_codes) else np.zeros((0, 0))
    owner = np.repeat(np.arange(len(comps)), [H.rank for H in comps])
    cross = owner[:, None] != owner[None, :]
    bad = np.argwhere(cross & (gram != 0))
    if len(bad):
        orthogonal = False
        a, b = (int(x) for x in bad[0])
        ca, cb = int(owner[a]), int(owner[b])
        witness["pairwise_orthogonal"] = {
            "components": [ca, cb],
            "names": [names[ca], names[cb]],
            "killing_value": ring.to_json_value(int(gram[a, b])),
            "matrices": [
                _matrix_json(ring, all_codes[a]),
                _matrix_json(ring, all_codes[b]),
            ],
            "basis_indices": [a - int(bounds[ca]), b - int(bounds[cb])],
        }

    non_abelian = [i for i, H in enumerate(comps) if not is_abelian(H)]
    if non_abelian:
        witness["each_abelian"] = {"components": non_abelian, "names": [names[i] for i in non_abelian]}

    not_self_norm = []
    for i, H in enumerate(comps):
        if not H.closed_under_bracket() or not is_self_normalizing(H):
            not_self_norm.append(i)
    if not_self_norm:
        witness["each_self_normalizing"] = {
            "components": not_self_norm,
            "names": [names[i] for i in not_self_norm],
        }

    all_classical = None
    if classical is None:
        classical = ring.is_field
    if classical:
        if not ring.is_field:
            raise RingError("classicality is only defined over a field")
        non_classical = [i for i, H in enumerate(comps) if i in non_abelian or not is_classical_cartan(H)]
        all_classical = not non_classical
        if non_classical:
            witness["all_classical"] = {
                "components": non_classical,
                "names": [names[i] for i in non_classical],
            }

    return VerificationReport(
        components_free=components_free,
        direct_sum_spans=direct,
        pairwise_orthogonal=orthogonal,
        each_abelian=not non_abelian,
        each_self_normalizing=not not_self_norm,
        all_classical=all_classical,
        witness=witness,
    )


# ---------------------------------------------------------------------------
# root spaces over a field

def _require_field(ring: Ring):
    if not ring.is_field:
        raise RingError(f"{ring.to_dsl()} is not a field")


def _field_dim(S: Submodule) -> int:
    return len(S.canonical)


def _shifted(ring: Ring, M: np.ndarray, lam: int) -> np.ndarray:
    out = np.array(M, dtype=ring.dtype)
    idx = np.arange(out.shape[0])
    out[idx, idx] = ring.vsub(out[idx, idx], lam)
    return out


def eigenvalues(ring: Ring, M: np.ndarray) -> list[int]:
    """All field elements lam with M - lam*I singular, by scanning the field."""
    _require_field(ring)
    return [lam for lam in ring.elements() if not solve_kernel(_shifted(ring, M, lam), ring).is_zero()]


def _root_spaces(H: Subalgebra) -> dict[tuple[int, ...], Submodule]:
    alg, ring = H.algebra, H.algebra.ring
    _require_field(ring)
    if not is_abelian(H):
        raise PreconditionError("root spaces are taken relative to an abelian subalgebra")
    ads = [alg.ad(M).codes for M in H.basis_matrices]
    # split the whole space one generator at a time; each piece stays invariant
    # under the remaining generators because they commute
    pieces: list[tuple[tuple[int, ...], np.ndarray]] = [((), np.eye(alg.dim, dtype=ring.dtype) * ring.one)]
    for a in ads:
        refined = []
        for alpha, K in pieces:
            image = ring.vmatmul(K, a.T)
            for lam in ring.elements():
                system = ring.vsub(image, ring.vmul(K, lam)).T
                coeffs = solve_kernel(system, ring)
                if coeffs.is_zero():
                    continue
                refined.append((alpha + (lam,), ring.vmatmul(coeffs.basis_rows, K)))
        pieces = refined
    return {alpha: canonical_span(K, ring, alg.dim) for alpha, K in pieces}


def root_space_decomposition(H: Subalgebra) -> dict[tuple, Submodule]:
    """Map each root (tuple of its values on H's basis) to its nonzero root space."""
    ring = H.algebra.ring
    return {tuple(ring.decode(a) for a in k): S for k, S in _root_spaces(H).items()}


def is_classical_cartan(H: Subalgebra) -> bool:
    """Root decomposition exists, [L_a, L_-a] is a line, and root strings break."""
    alg, ring = H.algebra, H.algebra.ring
    by_code = _root_spaces(H)
    if sum(_field_dim(S) for S in by_code.values()) != alg.dim:
        return False
    zero = tuple(0 for _ in H.basis_matrices)
    for alpha, S in by_code.items():
        if alpha == zero:
            continue
        T = by_code.get(tuple(ring.neg(a) for a in alpha))
        if T is None:
            return False
        left = np.stack([alg.from_coords(v).codes for v in S.basis_rows])
        right = np.stack([alg.from_coords(v).codes for v in T.basis_rows])
        brackets = alg.bracket_codes(left[:, None], right[None, :])
        span = canonical_span(alg.coords_batch(brackets).reshape(-1, alg.dim), ring, alg.dim)
        if _field_dim(span) != 1:
            return False
    p = ring.characteristic
    for alpha in by_code:
        for beta in by_code:
            if beta == zero:
                continue
            string = [
                tuple(ring.add(a, ring.mul(ring.from_int(k), b)) for a, b in zip(alpha, beta))
                for k in range(1, p)
            ]
            if all(s in by_code for s in string):
                return False
    return True


# ---------------------------------------------------------------------------
# conjugation

def conjugate_subalgebra(g: Matrix, H: Subalgebra) -> Subalgebra:
    """The subalgebra with basis g^-1 h g."""
    try:
        g_inv = inverse(g)
    except RingError as exc:
        raise PreconditionError(f"conjugating matrix is singular: {exc}") from None
    return Subalgebra(H.algebra, [g_inv @ h @ g for h in H.basis_matrices], H.name)


def conjugate_decomposition(g: Matrix, D: Decomposition) -> Decomposition:
    return Decomposition(D.algebra, [conjugate_subalgebra(g, H) for H in D.components], dict(D.provenance))
