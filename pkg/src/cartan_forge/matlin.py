"""Dense matrices over a :class:`~cartan_forge.rings.Ring` and module linear algebra.

Row spans are kept in a canonical form so that membership and equality are
exact: the Howell normal form over ``Z/n`` (which also records the
annihilator rows a plain echelon form would lose), reduced row echelon form
over ``GF(p^m)``, and factor-by-factor forms over product rings.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, RingError, RingMismatchError
from .rings import GF, Product, Ring, RingElement, Zn


def _scalar_code(ring: Ring, c) -> int:
    if isinstance(c, RingElement):
        if c.ring != ring:
            raise RingMismatchError("scalar from a different ring")
        return c.code
    if isinstance(c, (int, np.integer)):
        return ring.from_int(int(c))
    raise TypeError(f"cannot use {c!r} as a scalar")


class Matrix:
    """An immutable dense matrix whose entries are ring codes."""

    __slots__ = ("ring", "codes")

    def __init__(self, ring: Ring, codes):
        arr = np.array(codes, dtype=ring.dtype)
        if arr.ndim != 2:
            raise DimensionError(f"matrix data must be 2-dimensional, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= ring.size):
            raise RingError("matrix entry outside the ring's code range")
        arr.setflags(write=False)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "codes", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def _wrap(cls, ring: Ring, arr: np.ndarray) -> "Matrix":
        m = object.__new__(cls)
        arr = np.asarray(arr, dtype=ring.dtype)
        arr.setflags(write=False)
        object.__setattr__(m, "ring", ring)
        object.__setattr__(m, "codes", arr)
        return m

    # constructors ----------------------------------------------------------
    @classmethod
    def from_values(cls, ring: Ring, rows: Sequence[Sequence]) -> "Matrix":
        """Entries may be ints (mapped through Z -> R), canonical values or RingElements."""
        return cls._wrap(ring, [[ring.element(x).code for x in row] for row in rows])

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        arr = np.zeros((n, n), dtype=ring.dtype)
        np.fill_diagonal(arr, ring.one)
        return cls._wrap(ring, arr)

    @classmethod
    def zeros(cls, ring: Ring, rows: int, cols: int) -> "Matrix":
        return cls._wrap(ring, np.zeros((rows, cols), dtype=ring.dtype))

    @classmethod
    def diagonal(cls, ring: Ring, entries: Sequence) -> "Matrix":
        n = len(entries)
        arr = np.zeros((n, n), dtype=ring.dtype)
        for i, x in enumerate(entries):
            arr[i, i] = _scalar_code(ring, x)
        return cls._wrap(ring, arr)

    # basic protocol ------------------------------------------------------------
    @property
    def rows(self) -> int:
        return self.codes.shape[0]

    @property
    def cols(self) -> int:
        return self.codes.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.codes.shape

    def __getitem__(self, ij) -> RingElement:
        i, j = ij
        return RingElement(self.ring, int(self.codes[i, j]))

    def to_values(self) -> list[list]:
        return [[self.ring.decode(int(x)) for x in row] for row in self.codes]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.ring == other.ring and np.array_equal(self.codes, other.codes)

    def __hash__(self):
        return hash((self.ring, self.codes.shape, self.codes.astype(np.int64).tobytes()))

    def __repr__(self):
        return f"Matrix({self.ring.to_dsl()}, {self.to_values()})"

    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError("expected a Matrix")
        if other.ring != self.ring:
            raise RingMismatchError(f"{self.ring.to_dsl()} vs {other.ring.to_dsl()}")

    # arithmetic --------------------------------------------------------------
    def __add__(self, other):
        self._check(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return Matrix._wrap(self.ring, self.ring.vadd(self.codes, other.codes))

    def __sub__(self, other):
        self._check(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {self.shape} and {other.shape}")
        return Matrix._wrap(self.ring, self.ring.vsub(self.codes, other.codes))

    def __neg__(self):
        return Matrix._wrap(self.ring, self.ring.vneg(self.codes))

    def __mul__(self, c):
        if isinstance(c, Matrix):
            raise TypeError("use @ for matrix products")
        return Matrix._wrap(self.ring, self.ring.vmul(self.codes, _scalar_code(self.ring, c)))

    __rmul__ = __mul__

    def __matmul__(self, other):
        return matmul(self, other)

    def transpose(self) -> "Matrix":
        return Matrix._wrap(self.ring, self.codes.T.copy())

    T = property(transpose)

    def trace(self) -> RingElement:
        return trace(self)

    def power(self, k: int) -> "Matrix":
        if self.rows != self.cols:
            raise DimensionError("power of a non-square matrix")
        if k < 0:
            return inverse(self).power(-k)
        result, base = Matrix.identity(self.ring, self.rows), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return not self.codes.any()


# ---------------------------------------------------------------------------
# matrix operations

def matmul(A: Matrix, B: Matrix) -> Matrix:
    A._check(B)
    if A.cols != B.rows:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    return Matrix._wrap(A.ring, A.ring.vmatmul(A.codes, B.codes))


def trace(A: Matrix) -> RingElement:
    if A.rows != A.cols:
        raise DimensionError("trace of a non-square matrix")
    return RingElement(A.ring, int(A.ring.vsum(np.diagonal(A.codes), axis=0)))


def commutator(A: Matrix, B: Matrix) -> Matrix:
    if A.shape != B.shape or A.rows != A.cols:
        raise DimensionError(f"commutator needs equal square shapes, got {A.shape} and {B.shape}")
    return A @ B - B @ A


def kronecker(A: Matrix, B: Matrix) -> Matrix:
    A._check(B)
    ring = A.ring
    blocks = ring.vmul(A.codes[:, None, :, None], B.codes[None, :, None, :])
    return Matrix._wrap(ring, blocks.reshape(A.rows * B.rows, A.cols * B.cols))


def charpoly_coefficients(A: Matrix) -> list[int]:
    """Codes of det(xI - A), highest degree first, by Berkowitz's division-free recursion."""
    if A.rows != A.cols:
        raise DimensionError("characteristic polynomial of a non-square matrix")
    ring, M, n = A.ring, A.codes, A.rows
    one = ring.one
    if n == 0:
        return [one]
    coeffs = ring.asarray([one, ring.neg(int(M[0, 0]))])
    for k in range(1, n):
        Ak, row, col = M[:k, :k], M[k, :k], M[:k, k]
        t = [one, ring.neg(int(M[k, k]))]
        v = col
        for _ in range(k):
            t.append(ring.neg(int(ring.vsum(ring.vmul(row, v), axis=0))))
            v = ring.vmatmul(Ak, v[:, None])[:, 0]
        t_arr = ring.asarray(t + [0])
        i = np.arange(k + 2)[:, None]
        j = np.arange(k + 1)[None, :]
        toeplitz = t_arr[np.where(i >= j, i - j, len(t))]
        coeffs = ring.vmatmul(toeplitz, coeffs[:, None])[:, 0]
    return [int(c) for c in coeffs]


def determinant(A: Matrix) -> RingElement:
    """Exact determinant, valid over rings with zero divisors."""
    coeffs = charpoly_coefficients(A)
    c0 = coeffs[-1]
    return RingElement(A.ring, c0 if A.rows % 2 == 0 else A.ring.neg(c0))


def inverse(A: Matrix) -> Matrix:
    """Inverse via Cayley-Hamilton; raises RingError unless det(A) is a unit."""
    coeffs = charpoly_coefficients(A)
    ring, n = A.ring, A.rows
    if not ring.is_unit(coeffs[-1]):
        raise RingError("matrix is singular over its ring (determinant is not a unit)")
    I = Matrix.identity(ring, n)
    acc = I
    for c in coeffs[1:-1]:
        acc = A @ acc + I * RingElement(ring, c)
    return acc * RingElement(ring, ring.neg(ring.inv(coeffs[-1])))


def is_invertible(A: Matrix) -> bool:
    return A.ring.is_unit(determinant(A).code)


# ---------------------------------------------------------------------------
# canonical row forms

def _unit_normalizer(a: int, N: int) -> int:
    """A unit c of Z/N with c*a = gcd(a, N) mod N."""
    g = math.gcd(a, N)
    Np = N // g
    c = pow(a // g, -1, Np) if Np > 1 else 1
    while math.gcd(c, N) != 1:
        c += Np
    return c % N


def howell_form(rows: np.ndarray, N: int) -> np.ndarray:
    """Howell normal form of the row span of ``rows`` over Z/N."""
    rows = np.asarray(rows)
    dim = rows.shape[1]
    dtype = np.int64 if N < 2**31 else object
    work = [r.astype(dtype) % N for r in rows if (r % N).any()]
    pivots: list[tuple[int, np.ndarray]] = []
    for j in range(dim):
        cand = [w for w in work if w[j] != 0]
        if not cand:
            continue
        rest = [w for w in work if w[j] == 0]
        piv = cand[0]
        for w in cand[1:]:
            a, b = int(piv[j]), int(w[j])
            g = math.gcd(a, b)
            s, t = _bezout(a, b)
            u, v = (-b // g) % N, (a // g) % N
            new_w = (u * piv + v * w) % N
            piv = (s % N * piv + t % N * w) % N
            if new_w.any():
                rest.append(new_w)
        piv = _unit_normalizer(int(piv[j]), N) * piv % N
        ann = (N // int(piv[j])) * piv % N
        if ann.any():
            rest.append(ann)
        pivots.append((j, piv))
        work = rest
    result = [row for _, row in pivots]
    for t, (j, row) in enumerate(pivots):
        g = int(row[j])
        for k in range(t):
            qq = int(result[k][j]) // g
            if qq:
                result[k] = (result[k] - qq * row) % N
    if not result:
        return np.zeros((0, dim), dtype=dtype)
    return np.array(result, dtype=dtype)


def _bezout(a: int, b: int) -> tuple[int, int]:
    old_r, r, old_s, s, old_t, t = a, b, 1, 0, 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_s, old_t


def rref(ring: Ring, rows: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over a field ring; returns (nonzero rows, pivot columns)."""
    A = np.array(rows, dtype=ring.dtype)
    if A.ndim != 2:
        raise DimensionError("rref expects a 2-dimensional array")
    nrows, ncols = A.shape
    r = 0
    pivcols: list[int] = []
    for j in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(A[r:, j])[0]
        if not len(nz):
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = ring.vmul(A[r], ring.inv(int(A[r, j])))
        col = A[:, j].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if len(hit):
            A[hit] = ring.vsub(A[hit], ring.vmul(col[hit, None], A[r][None, :]))
        pivcols.append(j)
        r += 1
    return A[:r], pivcols


def _canonical_rows(ring: Ring, rows: np.ndarray) -> np.ndarray:
    if isinstance(ring, GF) or (isinstance(ring, Zn) and ring.is_field):
        return rref(ring, rows)[0]
    if isinstance(ring, Zn):
        return howell_form(rows, ring.modulus)
    raise RingError(f"no canonical row form over {ring.to_dsl()}")  # pragma: no cover


def field_rank(ring: Ring, rows) -> int:
    if not ring.is_field:
        raise RingError(f"{ring.to_dsl()} is not a field")
    rows = np.asarray(rows, dtype=ring.dtype)
    if rows.size == 0:
        return 0
    return rref(ring, rows)[0].shape[0]


def residue_ranks(ring: Ring, rows) -> list[int]:
    """Rank of ``rows`` reduced to the residue field of every local factor."""
    rows = np.asarray(rows, dtype=ring.dtype)
    out = []
    for i, lf in enumerate(ring.local_factors()):
        local = ring.to_local(rows, i) if rows.size else rows
        out.append(field_rank(lf.residue_field, lf.to_residue(np.asarray(local)).astype(lf.residue_field.dtype)))
    return out


def is_free_basis(ring: Ring, rows) -> bool:
    """True iff the rows form a basis of a free direct summand of R^d."""
    rows = np.asarray(rows, dtype=ring.dtype)
    k = rows.shape[0]
    return all(r == k for r in residue_ranks(ring, rows))


# ---------------------------------------------------------------------------
# submodules

class Submodule:
    """A submodule of R^dim, stored by generators plus a lazily computed canonical form."""

    def __init__(self, ring: Ring, dim: int, generators=()):
        gens = np.asarray(generators, dtype=ring.dtype) if len(generators) else np.zeros((0, dim), dtype=ring.dtype)
        if gens.ndim != 2 or gens.shape[1] != dim:
            raise DimensionError(f"generators must have shape (k, {dim}), got {gens.shape}")
        self.ring = ring
        self.dim = dim
        self.generators = gens

    @cached_property
    def canonical(self):
        """Canonical form: an array of rows, or a tuple of per-factor arrays over a product."""
        if isinstance(self.ring, Product):
            return tuple(sub.canonical for sub in self._factor_parts)
        return _canonical_rows(self.ring, self.generators)

    @cached_property
    def _factor_parts(self) -> list["Submodule"]:
        ring = self.ring
        split = ring.split(self.generators) if len(self.generators) else [
            np.zeros((0, self.dim), dtype=f.dtype) for f in ring.factors
        ]
        return [Submodule(f, self.dim, part) for f, part in zip(ring.factors, split)]

    @cached_property
    def basis_rows(self) -> np.ndarray:
        """A generating set in canonical form, embedded back into R^dim for products."""
        if not isinstance(self.ring, Product):
            return self.canonical
        out = []
        zeros = [np.zeros(self.dim, dtype=f.dtype) for f in self.ring.factors]
        for j, sub in enumerate(self._factor_parts):
            for row in sub.canonical:
                parts = list(zeros)
                parts[j] = row
                out.append(self.ring.join(parts))
        if not out:
            return np.zeros((0, self.dim), dtype=self.ring.dtype)
        return np.array(out, dtype=self.ring.dtype)

    def is_zero(self) -> bool:
        return len(self.basis_rows) == 0

    def contains(self, v) -> bool:
        return contains(self, v)

    def __eq__(self, other):
        if not isinstance(other, Submodule):
            return NotImplemented
        return module_equal(self, other)

    def __hash__(self):
        return hash((self.ring, self.dim, np.asarray(self.basis_rows, dtype=np.int64).tobytes()))

    def __repr__(self):
        return f"Submodule({self.ring.to_dsl()}, dim={self.dim}, rows={np.asarray(self.basis_rows).tolist()})"

    def project(self, cols: Sequence[int] | slice) -> "Submodule":
        """Image under the coordinate projection onto ``cols``."""
        idx = np.arange(self.dim)[cols]
        return Submodule(self.ring, len(idx), self.generators[:, idx])


def canonical_span(vectors, ring: Ring, ambient_dim: int) -> Submodule:
    vecs = [
        [_scalar_code(ring, x) if isinstance(x, RingElement) else x for x in v] for v in vectors
    ] if not isinstance(vectors, np.ndarray) else vectors
    S = Submodule(ring, ambient_dim, vecs)
    S.canonical  # noqa: B018 - force the reduction
    return S


def _reduce_member(rows: np.ndarray, v: np.ndarray, ring: Ring) -> bool:
    v = np.array(v, dtype=ring.dtype)
    for row in rows:
        j = int(np.nonzero(row)[0][0])
        if v[:j].any():
            return False
        g = int(row[j])
        x = int(v[j])
        if isinstance(ring, Zn):
            if x % g:
                return False
            q = x // g
        else:
            q = ring.mul(x, ring.inv(g))
        if q:
            v = ring.vsub(v, ring.vmul(q, row))
    return not v.any()


def contains(S: Submodule, v) -> bool:
    v = np.asarray([_scalar_code(S.ring, x) if isinstance(x, RingElement) else x for x in v], dtype=S.ring.dtype)
    if v.shape != (S.dim,):
        raise DimensionError(f"vector of length {len(v)} tested against ambient dimension {S.dim}")
    if isinstance(S.ring, Product):
        return all(
            _reduce_member(sub.canonical, part, sub.ring)
            for sub, part in zip(S._factor_parts, S.ring.split(v))
        )
    return _reduce_member(S.canonical, v, S.ring)


def module_equal(S: Submodule, T: Submodule) -> bool:
    if S.ring != T.ring or S.dim != T.dim:
        raise DimensionError("submodules live in different ambient modules")
    if isinstance(S.ring, Product):
        return all(np.array_equal(a, b) for a, b in zip(S.canonical, T.canonical))
    return np.array_equal(S.canonical, T.canonical)


def is_submodule(S: Submodule, T: Submodule) -> bool:
    """S is contained in T."""
    return all(contains(T, row) for row in S.basis_rows)


def _kernel_rows(ring: Ring, M: np.ndarray) -> np.ndarray:
    """Generators of {x : M x = 0} from the row span of [M^T | I]."""
    r, c = M.shape
    aug = np.concatenate([M.T.astype(ring.dtype), np.eye(c, dtype=np.int64).astype(ring.dtype) * ring.one], axis=1)
    form = _canonical_rows(ring, aug)
    if not len(form):
        return np.zeros((0, c), dtype=ring.dtype)
    keep = ~form[:, :r].any(axis=1) if r else np.ones(len(form), dtype=bool)
    return form[keep][:, r:]


def solve_kernel(M: Matrix | np.ndarray, ring: Ring | None = None) -> Submodule:
    """The full solution module {x : M x = 0} in canonical form."""
    if isinstance(M, Matrix):
        ring, arr = M.ring, M.codes
    else:
        arr = np.asarray(M, dtype=ring.dtype)
    c = arr.shape[1]
    if isinstance(ring, Product):
        parts = ring.split(arr)
        subs = [Submodule(f, c, _kernel_rows(f, p)) for f, p in zip(ring.factors, parts)]
        return _product_module(ring, c, subs)
    return canonical_span(_kernel_rows(ring, arr), ring, c)


def solve_kernel_crt(M: Matrix) -> Submodule:
    """Kernel over Z/n assembled from the kernels over each prime-power factor."""
    ring = M.ring
    if not isinstance(ring, Zn):
        raise RingError("CRT kernel route is defined for Z/n")
    c = M.cols
    lifted = []
    factors = ring.local_factors()
    for i, lf in enumerate(factors):
        local = _kernel_rows(lf.ring, ring.to_local(M.codes, i))
        for row in local:
            parts = [np.zeros(c, dtype=np.int64) for _ in factors]
            parts[i] = row
            lifted.append(ring.from_locals(parts))
    return canonical_span(np.array(lifted, dtype=ring.dtype).reshape(-1, c), ring, c)


def _product_module(ring: Product, dim: int, subs: Sequence[Submodule]) -> Submodule:
    zeros = [np.zeros(dim, dtype=f.dtype) for f in ring.factors]
    rows = []
    for j, sub in enumerate(subs):
        for row in sub.basis_rows:
            parts = list(zeros)
            parts[j] = row
            rows.append(ring.join(parts))
    return Submodule(ring, dim, np.array(rows, dtype=ring.dtype).reshape(-1, dim))


def stack(matrices: Iterable[Matrix]) -> np.ndarray:
    return np.stack([m.codes for m in matrices])
