"""State-vector simulation of query algorithms over F_p^n.

The Hilbert space is query register (F_p^n) x output register (F_p^n) x
workspace ([m]); amplitudes are stored as an array of shape (p^n, p^n, m).
The oracle maps |x>|b>|w> to |x>|b + f(x)>|w> and is applied as an index
permutation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .fflinalg import (FieldSpec, Subspace, all_vectors, index_to_vec, vec_to_index)
from .instances import Label, LinearInstance, PromiseViolation

DEFAULT_STATE_CAP = 2 ** 20
NORM_TOL = 1e-9
UNITARY_TOL = 1e-9

REGISTERS = ("query", "output", "work")


class SimulatorCapExceeded(RuntimeError):
    def __init__(self, size, cap):
        super().__init__(f"state of {size} amplitudes exceeds simulator cap {cap}")
        self.size = size
        self.cap = cap


def _check_state_cap(p, n, m, cap):
    cap = DEFAULT_STATE_CAP if cap is None else cap
    size = p ** (2 * n) * m
    if size > cap:
        raise SimulatorCapExceeded(size, cap)


@lru_cache(maxsize=32)
def _vector_array(p, n):
    return np.array(list(all_vectors(p, n)), dtype=np.int64).reshape(-1, n)


@lru_cache(maxsize=32)
def addition_table(p, n) -> np.ndarray:
    """``table[b, c]`` is the index of b + c in F_p^n."""
    vecs = _vector_array(p, n)
    place = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    sums = (vecs[:, None, :] + vecs[None, :, :]) % p
    return sums @ place


@lru_cache(maxsize=32)
def qft_matrix(p, n, inverse=False) -> np.ndarray:
    """Fourier transform over F_p^n: entry [y, x] is p^(-n/2) omega^(x.y)."""
    vecs = _vector_array(p, n)
    phases = (vecs @ vecs.T) % p
    sign = -1.0 if inverse else 1.0
    mat = np.exp(sign * 2j * np.pi * phases / p) / np.sqrt(p ** n)
    mat.setflags(write=False)
    return mat


def image_indices(f) -> np.ndarray:
    """Index of f(x) for every x in index order."""
    mat = np.asarray(f.matrix.rows if isinstance(f, LinearInstance) else f.rows, dtype=np.int64)
    p, n = f.p, f.n
    place = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((_vector_array(p, n) @ mat.T) % p) @ place


class StateVector:
    """Amplitudes over (query, output, workspace); single-owner and mutable."""

    def __init__(self, p, n, workspace=1, amplitudes=None, cap=None):
        FieldSpec(p, n)
        if workspace < 1:
            raise ValueError("workspace dimension must be >= 1")
        _check_state_cap(p, n, workspace, cap)
        self.p, self.n, self.workspace = p, n, workspace
        shape = (p ** n, p ** n, workspace)
        if amplitudes is None:
            amplitudes = np.zeros(shape, dtype=complex)
            amplitudes[0, 0, 0] = 1.0
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(shape)
        self.amplitudes = amplitudes

    @classmethod
    def basis_state(cls, p, n, x=0, b=0, w=0, workspace=1, cap=None):
        st = cls(p, n, workspace, cap=cap)
        st.amplitudes[...] = 0
        x = vec_to_index(x, p) if not isinstance(x, (int, np.integer)) else x
        b = vec_to_index(b, p) if not isinstance(b, (int, np.integer)) else b
        st.amplitudes[x, b, w] = 1.0
        return st

    @property
    def dim(self):
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.p, self.n, self.workspace, self.amplitudes.copy(),
                           cap=self.amplitudes.size)

    def register_probabilities(self, register="query") -> np.ndarray:
        probs = np.abs(self.amplitudes) ** 2
        axes = {"query": (1, 2), "output": (0, 2), "work": (0, 1)}[register]
        return probs.sum(axis=axes)

    def __repr__(self):
        return f"StateVector(p={self.p}, n={self.n}, workspace={self.workspace})"


def _check_match(state, f):
    if (state.p, state.n) != (f.p, f.n):
        raise ValueError(f"oracle over F_{f.p}^{f.n} applied to state over F_{state.p}^{state.n}")


def apply_oracle(state: StateVector, f) -> StateVector:
    """|x>|b>|w> -> |x>|b + f(x)>|w>, returned as a new state."""
    _check_match(state, f)
    add = addition_table(state.p, state.n)
    fx = image_indices(f)
    new = np.empty_like(state.amplitudes)
    xs = np.arange(len(fx))[:, None]
    # new[x, b + f(x)] = old[x, b]
    new[xs, add[:, fx].T] = state.amplitudes
    return StateVector(state.p, state.n, state.workspace, new, cap=new.size)


def qft_query_register(state: StateVector, inverse=False) -> StateVector:
    mat = qft_matrix(state.p, state.n, inverse)
    new = np.tensordot(mat, state.amplitudes, axes=(1, 0))
    return StateVector(state.p, state.n, state.workspace, new, cap=new.size)


def iqft_query_register(state: StateVector) -> StateVector:
    return qft_query_register(state, inverse=True)


def apply_dense(state: StateVector, register: str, matrix) -> StateVector:
    matrix = np.asarray(matrix, dtype=complex)
    axis = REGISTERS.index(register)
    moved = np.tensordot(matrix, state.amplitudes, axes=(1, axis))
    new = np.moveaxis(moved, 0, axis)
    return StateVector(state.p, state.n, state.workspace, new, cap=new.size)


# ---------------------------------------------------------------------------
# circuits

@dataclass(frozen=True)
class Op:
    kind: str  # "qft_query", "iqft_query", "oracle" or "dense"
    register: str | None = None
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)


def is_unitary(matrix, tol=UNITARY_TOL) -> bool:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.allclose(matrix.conj().T @ matrix, np.eye(len(matrix)), atol=tol, rtol=0))


@dataclass(frozen=True)
class Circuit:
    """U_T O U_{T-1} ... O U_0 as an ordered op list plus an accepting set.

    ``accept`` holds indices of output-register values that count as
    acceptance when the output register is measured.
    """

    p: int
    n: int
    workspace: int = 1
    ops: tuple = ()
    accept: frozenset = frozenset()

    def __post_init__(self):
        FieldSpec(self.p, self.n)
        size = {"query": self.p ** self.n, "output": self.p ** self.n, "work": self.workspace}
        for op in self.ops:
            if op.kind == "dense":
                if op.register not in size:
                    raise ValueError(f"unknown register {op.register!r}")
                if np.shape(op.matrix) != (size[op.register],) * 2:
                    raise ValueError(f"dense op on {op.register} needs a "
                                     f"{size[op.register]}x{size[op.register]} matrix")
                if not is_unitary(op.matrix):
                    raise ValueError("dense op matrix is not unitary")
            elif op.kind not in ("qft_query", "iqft_query", "oracle"):
                raise ValueError(f"unknown op type {op.kind!r}")
        accept = frozenset(vec_to_index(a, self.p) if not isinstance(a, (int, np.integer)) else int(a)
                           for a in self.accept)
        if any(not 0 <= a < self.p ** self.n for a in accept):
            raise ValueError("accept value outside the output register")
        object.__setattr__(self, "accept", accept)
        object.__setattr__(self, "ops", tuple(self.ops))

    @property
    def query_count(self) -> int:
        return sum(op.kind == "oracle" for op in self.ops)

    def to_json(self) -> dict:
        ops = []
        for op in self.ops:
            if op.kind == "dense":
                m = np.asarray(op.matrix, dtype=complex)
                ops.append({"type": "dense", "register": op.register,
                            "matrix_re": m.real.tolist(), "matrix_im": m.imag.tolist()})
            else:
                ops.append({"type": op.kind})
        return {"p": self.p, "n": self.n, "workspace": self.workspace, "ops": ops,
                "accept": [list(index_to_vec(a, self.p, self.n)) for a in sorted(self.accept)]}

    @classmethod
    def from_json(cls, obj) -> "Circuit":
        ops = []
        for o in obj["ops"]:
            if o["type"] == "dense":
                re = np.asarray(o["matrix_re"], dtype=float)
                im = np.asarray(o.get("matrix_im", np.zeros_like(re)), dtype=float)
                ops.append(Op("dense", o["register"], re + 1j * im))
            else:
                ops.append(Op(o["type"]))
        return cls(obj["p"], obj["n"], obj.get("workspace", 1), tuple(ops),
                   frozenset(tuple(a) for a in obj["accept"]))

    @classmethod
    def load(cls, path) -> "Circuit":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def final_state(c: Circuit, f, cap=None) -> StateVector:
    state = StateVector(c.p, c.n, c.workspace, cap=cap)
    for op in c.ops:
        if op.kind == "oracle":
            state = apply_oracle(state, f)
        elif op.kind == "qft_query":
            state = qft_query_register(state)
        elif op.kind == "iqft_query":
            state = iqft_query_register(state)
        else:
            state = apply_dense(state, op.register, op.matrix)
    return state


def run_circuit(c: Circuit, f, cap=None) -> float:
    """Acceptance probability P(f): weight of accepting output-register values."""
    state = final_state(c, f, cap)
    if not c.accept:
        return 0.0
    idx = np.fromiter(sorted(c.accept), dtype=np.int64)
    prob = float(np.sum(np.abs(state.amplitudes[:, idx, :]) ** 2))
    return min(max(prob, 0.0), 1.0)


def simon_round_circuit(p, n) -> Circuit:
    """One Fourier-sampling round; acceptance is unused (query register is measured)."""
    return Circuit(p, n, 1, (Op("qft_query"), Op("oracle"), Op("qft_query")), frozenset())


# ---------------------------------------------------------------------------
# Simon's algorithm over F_p

def simon_round_distribution(f, cap=None) -> np.ndarray:
    """Distribution of the measured query register after one round.

    Entry y is the probability of observing the vector with index y.
    """
    state = final_state(simon_round_circuit(f.p, f.n), f, cap)
    return state.register_probabilities("query")


def spanning_probability(p: int, n: int, rounds: int) -> Fraction:
    """Probability that ``rounds`` uniform samples from F_p^n span F_p^n."""
    out = Fraction(1)
    for i in range(n):
        out *= 1 - Fraction(p) ** (i - rounds)
    return out


def span_dimension_dp(p: int, support_dim: int, n: int, rounds: int) -> list:
    """Exact distribution of the span dimension after ``rounds`` uniform
    samples from a ``support_dim``-dimensional subspace.  Entry r is
    Pr[dim = r] for r = 0..n.
    """
    dist = [Fraction(0)] * (n + 1)
    dist[0] = Fraction(1)
    for _ in range(rounds):
        nxt = [Fraction(0)] * (n + 1)
        for r, pr in enumerate(dist):
            if not pr:
                continue
            stay = Fraction(p) ** (r - support_dim) if r <= support_dim else Fraction(1)
            nxt[r] += pr * stay
            if r < support_dim:
                nxt[r + 1] += pr * (1 - stay)
        dist = nxt
    return dist


def default_rounds(n: int) -> int:
    return n + 3


@dataclass
class Transcript:
    rounds: int
    samples: list
    span_dim: int
    answer: Label
    predicted_success: Fraction

    def to_json(self) -> dict:
        return {"rounds": self.rounds, "samples": [list(s) for s in self.samples],
                "span_dim": self.span_dim, "answer": self.answer.value,
                "predicted_success": str(self.predicted_success)}


def _sample_rounds(dist, rounds, rng, p, n):
    probs = np.clip(dist, 0.0, None)
    probs = probs / probs.sum()
    idx = rng.choice(len(probs), size=rounds, p=probs)
    return [index_to_vec(int(i), p, n) for i in idx]


def simon_decide(f: LinearInstance, rounds=None, seed=None, distribution=None):
    """Run Simon's algorithm: answer ONE_TO_ONE iff the samples span F_p^n.

    ``distribution`` may carry a precomputed round distribution for f.
    Returns (answer, transcript).
    """
    if f.label is Label.UNRESTRICTED:
        raise PromiseViolation(f"kernel dimension {f.kernel_dim} violates the promise")
    p, n = f.p, f.n
    rounds = default_rounds(n) if rounds is None else rounds
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dist = simon_round_distribution(f) if distribution is None else distribution
    samples = _sample_rounds(dist, rounds, rng, p, n)
    span = Subspace.span(samples, p, n).dim if samples else 0
    answer = Label.ONE_TO_ONE if span == n else Label.KERNEL_P
    if f.label is Label.ONE_TO_ONE:
        predicted = spanning_probability(p, n, rounds)
    else:
        predicted = Fraction(1)
    return answer, Transcript(rounds, samples, span, answer, predicted)


# ---------------------------------------------------------------------------
# bundled circuits for the degree corroboration

def random_unitary(dim: int, seed) -> np.ndarray:
    """Haar-ish random unitary from the QR decomposition of a Gaussian matrix."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def bundled_circuits(p: int, n: int) -> dict:
    """Named test circuits keyed by name; query counts are 0, 1 or 2."""
    N = p ** n
    every = frozenset(range(N))
    u = [random_unitary(N, seed) for seed in range(4)]
    return {
        "always_accept": Circuit(p, n, 1, (), every),
        "zero_query": Circuit(p, n, 1, (Op("qft_query"), Op("dense", "output", u[0])),
                              frozenset({0})),
        "kernel_indicator": Circuit(p, n, 1, (Op("qft_query"), Op("oracle")), frozenset({0})),
        "random_one_query": Circuit(p, n, 1, (Op("dense", "query", u[1]), Op("dense", "output", u[2]),
                                              Op("oracle"), Op("dense", "output", u[3]),
                                              Op("iqft_query")), frozenset({0})),
        "random_two_query": Circuit(p, n, 1, (Op("dense", "query", u[1]), Op("oracle"),
                                              Op("dense", "query", u[2]), Op("dense", "output", u[3]),
                                              Op("oracle"), Op("dense", "output", u[0])),
                                    frozenset({0})),
    }
