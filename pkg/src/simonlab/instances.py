"""Simon-problem instances: linear maps, partial functions and truth tables."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .fflinalg import (FieldSpec, FpMatrix, Subspace, _rref_rows, index_to_vec,
                       kernel, nullspace)


class Label(str, enum.Enum):
    ONE_TO_ONE = "ONE_TO_ONE"
    KERNEL_P = "KERNEL_P"
    UNRESTRICTED = "UNRESTRICTED"


class PromiseViolation(ValueError):
    pass


def label_for_kernel_dim(h: int) -> Label:
    if h == 0:
        return Label.ONE_TO_ONE
    if h == 1:
        return Label.KERNEL_P
    return Label.UNRESTRICTED


@dataclass(frozen=True)
class LinearInstance:
    matrix: FpMatrix
    kernel: Subspace = dc_field(repr=False)
    label: Label

    @property
    def field(self) -> FieldSpec:
        return self.matrix.field

    @property
    def p(self):
        return self.matrix.p

    @property
    def n(self):
        return self.matrix.n

    @property
    def kernel_dim(self) -> int:
        return self.kernel.dim

    def __call__(self, x):
        return self.matrix.apply(x)


def make_linear(matrix) -> LinearInstance:
    if not isinstance(matrix, FpMatrix):
        raise TypeError("make_linear expects an FpMatrix")
    ker = kernel(matrix)
    return LinearInstance(matrix, ker, label_for_kernel_dim(ker.dim))


@dataclass(frozen=True)
class PartialFn:
    """A partial function s: dom(s) -> F_p^n given by (x, y) pairs."""

    p: int
    n: int
    pairs: tuple = ()

    def __post_init__(self):
        FieldSpec(self.p, self.n)
        pairs = tuple((tuple(int(a) % self.p for a in x), tuple(int(b) % self.p for b in y))
                      for x, y in self.pairs)
        for x, y in pairs:
            if len(x) != self.n or len(y) != self.n:
                raise ValueError("pair vectors must have length n")
        xs = [x for x, _ in pairs]
        if len(set(xs)) != len(xs):
            raise ValueError("duplicate domain point in partial function")
        object.__setattr__(self, "pairs", pairs)

    @property
    def domain(self):
        return [x for x, _ in self.pairs]

    @property
    def values(self):
        return [y for _, y in self.pairs]

    def __len__(self):
        return len(self.pairs)

    def extended_by(self, f) -> bool:
        """s ⪯ f: f agrees with s on dom(s)."""
        return all(tuple(f(x)) == y for x, y in self.pairs)

    def span_dim(self) -> int:
        return Subspace.span(self.domain, self.p, self.n).dim

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n,
                "pairs": [{"x": list(x), "y": list(y)} for x, y in self.pairs]}

    @classmethod
    def from_json(cls, obj) -> "PartialFn":
        return cls(obj["p"], obj["n"], tuple((tuple(pr["x"]), tuple(pr["y"])) for pr in obj["pairs"]))


@dataclass(frozen=True)
class Consistency:
    """Outcome of :func:`linear_consistency`.

    When consistent, ``span`` is K = span(dom s) in RREF, ``images`` holds
    the forced values on the rows of ``span.basis`` and ``kernel`` is Z, the
    kernel of the induced map on K.
    """

    consistent: bool
    span: Optional[Subspace] = None
    images: tuple = ()
    kernel: Optional[Subspace] = None

    def __bool__(self):
        return self.consistent


def linear_consistency(s: PartialFn) -> Consistency:
    p, n = s.p, s.n
    if not s.pairs:
        return Consistency(True, Subspace.zero(p, n), (), Subspace.zero(p, n))
    rows, pivots = _rref_rows([x + y for x, y in s.pairs], p, 2 * n)
    # a pivot in the y block means 0 -> nonzero, which no linear map allows
    if any(pc >= n for pc in pivots):
        return Consistency(False)
    basis = tuple(r[:n] for r in rows)
    images = tuple(r[n:] for r in rows)
    k = len(basis)
    # Z = {sum c_i b_i : sum c_i v_i = 0}
    transposed = [tuple(images[i][j] for i in range(k)) for j in range(n)]
    coeffs = nullspace(transposed, p, k)
    zvecs = [tuple(sum(c * b[j] for c, b in zip(cs, basis)) % p for j in range(n))
             for cs in coeffs]
    return Consistency(True, Subspace(p, n, basis), images, Subspace.span(zvecs, p, n))


def restrict(f, queries) -> PartialFn:
    """The partial function obtained by querying f on the distinct points given."""
    seen = []
    for q in queries:
        q = tuple(q)
        if q not in seen:
            seen.append(q)
    return PartialFn(f.p, f.n, tuple((q, tuple(f(q))) for q in seen))


@dataclass(frozen=True)
class GeneralInstance:
    """A full truth table f: {0,1}^n -> {0,1}^n, stored as output indices."""

    n: int
    table: tuple
    hidden_shift: Optional[int] = None

    def __post_init__(self):
        size = 2 ** self.n
        if len(self.table) != size:
            raise ValueError(f"table must have {size} entries")
        if self.hidden_shift is None:
            if sorted(self.table) != list(range(size)):
                raise ValueError("instance without shift must be a bijection")
        else:
            s = self.hidden_shift
            if not 0 < s < size:
                raise ValueError("hidden shift must be a nonzero n-bit string")
            for x in range(size):
                if self.table[x] != self.table[x ^ s]:
                    raise ValueError("table is not invariant under the shift")
            if len(set(self.table)) != size // 2:
                raise ValueError("2-to-1 instance must have exactly 2^(n-1) images")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def to_json(self) -> dict:
        return {"n": self.n,
                "table": [list(index_to_vec(v, 2, self.n)) for v in self.table],
                "shift": None if self.hidden_shift is None
                else list(index_to_vec(self.hidden_shift, 2, self.n))}

    @classmethod
    def from_json(cls, obj) -> "GeneralInstance":
        def idx(bits):
            out = 0
            for b in bits:
                out = 2 * out + int(b)
            return out
        shift = obj.get("shift")
        return cls(obj["n"], tuple(idx(v) for v in obj["table"]),
                   None if shift is None else idx(shift))


def make_general(n: int, hidden_shift=None, seed=None) -> GeneralInstance:
    """Uniform random bijection, or uniform random 2-to-1 map with the given shift.

    ``hidden_shift`` may be an int or a bit sequence.
    """
    if not 1 <= n <= 12:
        raise ValueError("general instances support 1 <= n <= 12")
    if hidden_shift is not None and not isinstance(hidden_shift, (int, np.integer)):
        bits = list(hidden_shift)
        if len(bits) != n:
            raise ValueError("shift must have n bits")
        hidden_shift = int("".join(str(int(b)) for b in bits), 2)
    rng = np.random.default_rng(seed)
    size = 2 ** n
    if hidden_shift is None:
        return GeneralInstance(n, tuple(int(v) for v in rng.permutation(size)))
    if hidden_shift == 0 or not 0 < hidden_shift < size:
        raise ValueError("a 2-to-1 instance needs a nonzero shift")
    # each coset {x, x^s} gets a distinct image drawn without replacement
    reps = [x for x in range(size) if x < x ^ hidden_shift]
    outs = rng.choice(size, size=len(reps), replace=False)
    table = [0] * size
    for x, y in zip(reps, outs):
        table[x] = table[x ^ hidden_shift] = int(y)
    return GeneralInstance(n, tuple(table), int(hidden_shift))
