"""Exact linear algebra over the prime field F_p.

Vectors are tuples of residues, matrices are tuples of rows.  A matrix acts
on column vectors, so its j-th column is the image of the j-th standard basis
vector.  Subspaces are kept in reduced row echelon form, which makes equality
of subspaces equality of representations.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_ENUMERATION_CAP = 2 ** 24
MAX_MODULUS = 2 ** 31

Vector = tuple  # tuple[int, ...]


class DimensionMismatch(ValueError):
    pass


class EnumerationTooLarge(RuntimeError):
    def __init__(self, size, cap, what="matrices"):
        super().__init__(f"enumeration of {size} {what} exceeds cap {cap}")
        self.size = size
        self.cap = cap


def is_prime(p: int) -> bool:
    """Deterministic primality test (trial division; moduli are below 2**31)."""
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    for d in range(3, math.isqrt(p) + 1, 2):
        if p % d == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    p: int
    n: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise ValueError(f"p={self.p} is not prime")
        if self.p >= MAX_MODULUS:
            raise ValueError(f"p={self.p} must be below 2**31")
        if self.n < 1:
            raise ValueError(f"n={self.n} must be >= 1")

    @property
    def size(self) -> int:
        """Number of vectors in F_p^n."""
        return self.p ** self.n


# ---------------------------------------------------------------------------
# vectors

def vec_to_index(v: Sequence[int], p: int) -> int:
    idx = 0
    for c in v:
        idx = idx * p + c
    return idx


def index_to_vec(idx: int, p: int, n: int) -> Vector:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        idx, out[i] = divmod(idx, p)
    return tuple(out)


def all_vectors(p: int, n: int) -> Iterator[Vector]:
    """All of F_p^n in index order."""
    return (tuple(v) for v in itertools.product(range(p), repeat=n))


def vec_add(u, v, p):
    return tuple((a + b) % p for a, b in zip(u, v))


def vec_scale(c, v, p):
    return tuple((c * a) % p for a in v)


def dot(u, v, p):
    return sum(a * b for a, b in zip(u, v)) % p


def unit_vector(i, n):
    return tuple(int(j == i) for j in range(n))


# ---------------------------------------------------------------------------
# row reduction

def _rref_rows(rows: Iterable[Sequence[int]], p: int, ncols: int):
    """Return (nonzero RREF rows, pivot columns) of the given rows."""
    mat = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][c], -1, p)
        mat[r] = [(x * inv) % p for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [(a - f * b) % p for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], pivots


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_p^n stored by its canonical RREF basis."""

    p: int
    n: int
    basis: tuple = ()

    @classmethod
    def span(cls, vectors, p, n) -> "Subspace":
        vectors = list(vectors)
        for v in vectors:
            if len(v) != n:
                raise DimensionMismatch(f"vector of length {len(v)} in F_{p}^{n}")
        rows, _ = _rref_rows(vectors, p, n)
        return cls(p, n, tuple(rows))

    @classmethod
    def zero(cls, p, n):
        return cls(p, n, ())

    @classmethod
    def full(cls, p, n):
        return cls(p, n, tuple(unit_vector(i, n) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> list:
        return [next(j for j, x in enumerate(r) if x) for r in self.basis]

    def __len__(self):
        return self.p ** self.dim

    def elements(self) -> Iterator[Vector]:
        """Every vector of the subspace (p**dim of them)."""
        for coeffs in itertools.product(range(self.p), repeat=self.dim):
            v = [0] * self.n
            for c, b in zip(coeffs, self.basis):
                if c:
                    for j in range(self.n):
                        v[j] = (v[j] + c * b[j]) % self.p
            yield tuple(v)

    def __contains__(self, v) -> bool:
        return contains(self, v)

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "basis": [list(b) for b in self.basis]}

    @classmethod
    def from_json(cls, obj) -> "Subspace":
        return cls.span(obj["basis"], obj["p"], obj["n"])


def rref(rows, p: int | None = None, ncols: int | None = None):
    """Canonical row space of ``rows`` and its rank.

    ``rows`` may be an :class:`FpMatrix` or a list of rows.
    """
    if isinstance(rows, FpMatrix):
        p, ncols, rows = rows.p, rows.n, rows.rows
    rows = [tuple(r) for r in rows]
    if ncols is None:
        if not rows:
            raise ValueError("ncols is required for an empty row list")
        ncols = len(rows[0])
    space = Subspace.span(rows, p, ncols)
    return space, space.dim


def nullspace(rows, p: int, ncols: int) -> list:
    """Basis of {x : A x = 0} for a (possibly rectangular) A given by rows."""
    red, pivots = _rref_rows(rows, p, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        x = [0] * ncols
        x[fcol] = 1
        for row, pc in zip(red, pivots):
            x[pc] = (-row[fcol]) % p
        basis.append(tuple(x))
    return basis


def _check_same(a: Subspace, b: Subspace):
    if a.p != b.p or a.n != b.n:
        raise DimensionMismatch(f"F_{a.p}^{a.n} vs F_{b.p}^{b.n}")


def contains(a: Subspace, v) -> bool:
    if len(v) != a.n:
        raise DimensionMismatch(f"vector of length {len(v)} in F_{a.p}^{a.n}")
    v = [x % a.p for x in v]
    # reduce v against the RREF basis; zero remainder iff v is in the span
    for row, pc in zip(a.basis, a.pivots):
        c = v[pc]
        if c:
            v = [(x - c * y) % a.p for x, y in zip(v, row)]
    return not any(v)


def contains_subspace(a: Subspace, b: Subspace) -> bool:
    """True when b is a subspace of a."""
    _check_same(a, b)
    return all(contains(a, v) for v in b.basis)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    return Subspace.span(a.basis + b.basis, a.p, a.n)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    p, n = a.p, a.n
    if not a.basis or not b.basis:
        return Subspace.zero(p, n)
    # solve sum(c_i a_i) = sum(d_j b_j): kernel of the n x (ka+kb) system
    ka = len(a.basis)
    cols = list(a.basis) + [vec_scale(p - 1, v, p) for v in b.basis]
    system = [tuple(col[i] for col in cols) for i in range(n)]
    sols = nullspace(system, p, len(cols))
    vecs = []
    for sol in sols:
        v = [0] * n
        for c, basis_vec in zip(sol[:ka], a.basis):
            for j in range(n):
                v[j] = (v[j] + c * basis_vec[j]) % p
        vecs.append(v)
    return Subspace.span(vecs, p, n)


def complement_in(z: Subspace, k: Subspace) -> Subspace:
    """A subspace Y with Y + Z = K and Y ∩ Z = {0}.

    Built by extending the basis of Z with the RREF rows of K, in pivot
    order, whenever a row is not yet in the running span.
    """
    _check_same(z, k)
    if not contains_subspace(k, z):
        raise ValueError("complement_in requires Z to be a subspace of K")
    running = z
    chosen = []
    for row in k.basis:
        if running.dim == k.dim:
            break
        if not contains(running, row):
            chosen.append(row)
            running = Subspace.span(running.basis + (row,), k.p, k.n)
    return Subspace.span(chosen, k.p, k.n)


def annihilator(h: Subspace) -> Subspace:
    """H^⊥ = {y : y·x = 0 for all x in H} under the standard dot product."""
    if not h.basis:
        return Subspace.full(h.p, h.n)
    return Subspace.span(nullspace(h.basis, h.p, h.n), h.p, h.n)


# ---------------------------------------------------------------------------
# matrices

@dataclass(frozen=True)
class FpMatrix:
    p: int
    n: int
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) % self.p for x in r) for r in self.rows)
        if len(rows) != self.n or any(len(r) != self.n for r in rows):
            raise DimensionMismatch(f"expected a {self.n}x{self.n} matrix")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows, p):
        return cls(p, len(rows), tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, p, n):
        return cls(p, n, tuple(unit_vector(i, n) for i in range(n)))

    @classmethod
    def zero(cls, p, n):
        return cls(p, n, tuple((0,) * n for _ in range(n)))

    @property
    def field(self) -> FieldSpec:
        return FieldSpec(self.p, self.n)

    def apply(self, x) -> Vector:
        if len(x) != self.n:
            raise DimensionMismatch(f"vector of length {len(x)} for a {self.n}x{self.n} matrix")
        return tuple(sum(a * b for a, b in zip(r, x)) % self.p for r in self.rows)

    __call__ = apply

    def column(self, j) -> Vector:
        return tuple(r[j] for r in self.rows)

    def negate(self) -> "FpMatrix":
        return FpMatrix(self.p, self.n, tuple(tuple(-x for x in r) for r in self.rows))

    def to_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(self.n, self.n)

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, obj) -> "FpMatrix":
        p, n = obj["p"], obj["n"]
        FieldSpec(p, n)
        return cls(p, n, tuple(tuple(r) for r in obj["rows"]))


def kernel(m: FpMatrix) -> Subspace:
    return Subspace.span(nullspace(m.rows, m.p, m.n), m.p, m.n)


def mat_inverse(rows, p):
    """Inverse of a square matrix over F_p (Gauss-Jordan on [A | I])."""
    n = len(rows)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = _rref_rows(aug, p, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ValueError("matrix is singular")
    return [list(r[n:]) for r in red]


def mat_mul(a, b, p):
    return [[sum(x * y for x, y in zip(row, col)) % p for col in zip(*b)] for row in a]


# ---------------------------------------------------------------------------
# counting

def _check_h(n, h):
    if not 0 <= h <= n:
        raise ValueError(f"need 0 <= h <= n, got h={h}, n={n}")


def alpha(n: int, h: int, p: int) -> int:
    """Number of ordered h-tuples of linearly independent vectors in F_p^n."""
    _check_h(n, h)
    out = 1
    for i in range(h):
        out *= p ** n - p ** i
    return out


def beta(n: int, h: int, p: int) -> int:
    """Gaussian binomial: number of h-dimensional subspaces of F_p^n."""
    q, r = divmod(alpha(n, h, p), alpha(h, h, p))
    assert r == 0
    return q


def count_FD(n: int, h: int, p: int) -> int:
    """|F_D| for D = p**h: linear maps on F_p^n with an h-dimensional kernel."""
    return beta(n, h, p) * alpha(n, n - h, p)


def _check_cap(p, n, cap, what="matrices"):
    cap = DEFAULT_ENUMERATION_CAP if cap is None else cap
    size = p ** (n * n)
    if size > cap:
        raise EnumerationTooLarge(size, cap, what)


def enumerate_subspaces(n: int, h: int, p: int, cap: int | None = None) -> Iterator[Subspace]:
    """Every h-dimensional subspace once, by walking all RREF h x n bases."""
    _check_h(n, h)
    _check_cap(p, n, cap, "subspaces (ambient matrix space)")
    for pivots in itertools.combinations(range(n), h):
        pivset = set(pivots)
        free_slots = [(r, c) for r, pc in enumerate(pivots)
                      for c in range(pc + 1, n) if c not in pivset]
        for values in itertools.product(range(p), repeat=len(free_slots)):
            rows = [[0] * n for _ in range(h)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), v in zip(free_slots, values):
                rows[r][c] = v
            yield Subspace(p, n, tuple(tuple(r) for r in rows))


def enumerate_matrices(n: int, p: int, cap: int | None = None) -> Iterator[FpMatrix]:
    """All p**(n*n) matrices in lexicographic order of their row-major entries."""
    _check_cap(p, n, cap)
    for entries in itertools.product(range(p), repeat=n * n):
        yield FpMatrix(p, n, tuple(entries[i * n:(i + 1) * n] for i in range(n)))


def _random_independent(rng, p, n, count, start=()):
    """Append ``count`` uniformly random vectors, rejecting dependent draws."""
    chosen = list(start)
    span = Subspace.span(chosen, p, n) if chosen else Subspace.zero(p, n)
    out = []
    while len(out) < count:
        v = tuple(int(x) for x in rng.integers(0, p, size=n))
        if not contains(span, v):
            out.append(v)
            span = Subspace.span(span.basis + (v,), p, n)
    return out


def sample_FD(n: int, h: int, p: int, seed=None) -> FpMatrix:
    """Uniform random element of F_D with D = p**h.

    The kernel comes from a uniformly random ordered basis, so it is a
    uniform h-dimensional subspace; a fixed complement basis is then mapped
    to a uniformly random independent tuple, which is uniform over the maps
    with exactly that kernel.
    """
    _check_h(n, h)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    kern_basis = _random_independent(rng, p, n, h)
    kern = Subspace.span(kern_basis, p, n)
    comp = complement_in(kern, Subspace.full(p, n)).basis
    images = _random_independent(rng, p, n, n - h)
    # columns of B: kernel basis then complement basis; M = Y B^{-1}
    cols = list(kern_basis) + list(comp)
    b = [[c[i] for c in cols] for i in range(n)]
    y_cols = [(0,) * n] * h + images
    y = [[c[i] for c in y_cols] for i in range(n)]
    m = mat_mul(y, mat_inverse(b, p), p)
    return FpMatrix(p, n, tuple(tuple(r) for r in m))


# ---------------------------------------------------------------------------
# vectorised catalogue of every matrix, used by the brute-force oracles

class MatrixCatalog:
    """Every n x n matrix over F_p with its full value table and kernel.

    ``images[i, x]`` is the index of M_i x, ``kernel_dim[i]`` the kernel
    dimension and ``kernel_mask[i, x]`` whether x lies in ker M_i.  Matrix i
    is the i-th matrix produced by :func:`enumerate_matrices`.
    """

    def __init__(self, p: int, n: int, cap: int | None = None):
        FieldSpec(p, n)
        _check_cap(p, n, cap)
        self.p, self.n = p, n
        size = p ** (n * n)
        place = p ** np.arange(n * n - 1, -1, -1, dtype=np.int64)
        entries = (np.arange(size, dtype=np.int64)[:, None] // place) % p
        mats = entries.reshape(size, n, n)
        vecs = np.array(list(all_vectors(p, n)), dtype=np.int64).reshape(-1, n)
        vplace = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
        self.vectors = vecs
        images = np.zeros((size, len(vecs)), dtype=np.int64)
        for i in range(n):
            images += ((mats[:, i, :] @ vecs.T) % p) * vplace[i]
        self.images = images
        self.kernel_mask = self.images == 0
        zeros = self.kernel_mask.sum(axis=1)
        self.kernel_dim = np.rint(np.log(zeros) / np.log(p)).astype(np.int64)
        assert np.all(p ** self.kernel_dim == zeros)
        self.matrices = mats

    def __len__(self):
        return len(self.images)

    def matrix(self, i) -> FpMatrix:
        return FpMatrix(self.p, self.n, tuple(tuple(int(x) for x in r) for r in self.matrices[i]))

    def indices_with_kernel_dim(self, h) -> np.ndarray:
        return np.flatnonzero(self.kernel_dim == h)

    def extension_mask(self, xs, ys) -> np.ndarray:
        """Boolean mask of matrices f with f(x) = y for every given pair."""
        mask = np.ones(len(self), dtype=bool)
        for x, y in zip(xs, ys):
            mask &= self.images[:, vec_to_index(x, self.p)] == vec_to_index(y, self.p)
        return mask

    def counts_by_kernel_dim(self, mask=None) -> list:
        kd = self.kernel_dim if mask is None else self.kernel_dim[mask]
        return [int(c) for c in np.bincount(kd, minlength=self.n + 1)]


@lru_cache(maxsize=8)
def _catalog(p, n):
    return MatrixCatalog(p, n, cap=p ** (n * n))


def matrix_catalog(p: int, n: int, cap: int | None = None) -> MatrixCatalog:
    """Cached :class:`MatrixCatalog`; the cap is checked on every call."""
    FieldSpec(p, n)
    _check_cap(p, n, cap)
    return _catalog(p, n)
