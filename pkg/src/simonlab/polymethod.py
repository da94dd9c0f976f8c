"""Averaged acceptance polynomials Q(D) and extension probabilities Q_s(D).

Q_s(D) is the probability that a uniformly random linear map with a kernel
of size D extends the partial function s.  It is computed two ways: by
brute-force counting over every matrix, and as the product of three
factors (kernel contains Z, kernel avoids a complement Y of Z in K, and the
D-independent chance of matching s on Y).
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .estimators import DEGREE_TOL, MinimalDegreeRegressor
from .fflinalg import (Subspace, alpha, complement_in, matrix_catalog, vec_to_index)
from .instances import PartialFn, linear_consistency
from .qsim import Circuit, run_circuit


class RationalPoly:
    """Univariate polynomial with Fraction coefficients, lowest degree first.

    Trailing zeros are stripped, so the zero polynomial has no coefficients
    and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        other = other if isinstance(other, RationalPoly) else RationalPoly([other])
        a, b = self.coeffs, other.coeffs
        m = max(len(a), len(b))
        return RationalPoly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                             for i in range(m)])

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, RationalPoly) else -Fraction(other))

    def __mul__(self, other):
        if not isinstance(other, RationalPoly):
            return RationalPoly([c * Fraction(other) for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            other = RationalPoly([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RationalPoly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if i == 0 else f"({c})*D" + (f"^{i}" if i > 1 else ""))
        return " + ".join(terms)

    def to_json(self):
        return [str(c) for c in self.coeffs]


def interpolate(points) -> RationalPoly:
    """Lagrange interpolation through exact (D, value) points.

    ``points`` may be a :class:`QTable` or a sequence of pairs.
    """
    if isinstance(points, QTable):
        points = [(pt.D, pt.value) for pt in points.points]
    pts = [(Fraction(x), Fraction(y)) for x, y in points]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate abscissa in interpolation table")
    out = RationalPoly()
    for i, (xi, yi) in enumerate(pts):
        if yi == 0:
            continue
        term = RationalPoly([yi])
        for j, (xj, _) in enumerate(pts):
            if j != i:
                term = term * RationalPoly([-xj / (xi - xj), 1 / (xi - xj)])
        out = out + term
    return out


@dataclass(frozen=True)
class QPoint:
    k: int
    D: int
    value: object  # Fraction, or float for simulated tables


@dataclass(frozen=True)
class QTable:
    p: int
    n: int
    points: tuple

    def __post_init__(self):
        ks = [pt.k for pt in self.points]
        if ks and ks != list(range(ks[0], ks[0] + len(ks))):
            raise ValueError("k values must be contiguous and increasing")
        for pt in self.points:
            if pt.D != self.p ** pt.k:
                raise ValueError(f"D={pt.D} is not p^{pt.k}")
            if isinstance(pt.value, Fraction) and not 0 <= pt.value <= 1:
                raise ValueError(f"exact value {pt.value} outside [0, 1]")

    @classmethod
    def from_values(cls, p, n, values, k0=0):
        return cls(p, n, tuple(QPoint(k0 + i, p ** (k0 + i), v) for i, v in enumerate(values)))

    @property
    def values(self):
        return [pt.value for pt in self.points]

    def to_json(self) -> dict:
        pts = []
        for pt in self.points:
            if isinstance(pt.value, Fraction):
                pts.append({"k": pt.k, "D": str(pt.D), "num": str(pt.value.numerator),
                            "den": str(pt.value.denominator)})
            else:
                pts.append({"k": pt.k, "D": str(pt.D), "value": float(pt.value)})
        return {"p": self.p, "n": self.n, "points": pts}

    @classmethod
    def from_json(cls, obj) -> "QTable":
        pts = []
        for pt in obj["points"]:
            if "num" in pt:
                v = Fraction(int(pt["num"]), int(pt["den"]))
            else:
                v = float(pt["value"])
            pts.append(QPoint(int(pt["k"]), int(pt["D"]), v))
        return cls(obj["p"], obj["n"], tuple(pts))


# ---------------------------------------------------------------------------
# brute force

def q_s_bruteforce_table(s: PartialFn, cap=None) -> list:
    """[Q_s(p^h) for h = 0..n] by counting over every matrix."""
    cat = matrix_catalog(s.p, s.n, cap)
    totals = cat.counts_by_kernel_dim()
    hits = cat.counts_by_kernel_dim(cat.extension_mask(s.domain, s.values))
    return [Fraction(hit, tot) for hit, tot in zip(hits, totals)]


def q_s_bruteforce(s: PartialFn, h: int, cap=None) -> Fraction:
    if not 0 <= h <= s.n:
        raise ValueError(f"need 0 <= h <= n, got h={h}")
    return q_s_bruteforce_table(s, cap)[h]


# ---------------------------------------------------------------------------
# the three factors

def prob_kernel_contains(z: int, h: int, n: int, p: int) -> Fraction:
    """Pr[Z ⊆ H] for a fixed z-dimensional Z and uniform h-dimensional H."""
    if not 0 <= z <= n or not 0 <= h <= n:
        raise ValueError("need 0 <= z, h <= n")
    out = Fraction(1)
    for i in range(z):
        out *= Fraction(p ** h - p ** i, p ** n - p ** i)
    return out


def prob_avoids(k: int, z: int, h: int, n: int, p: int) -> Fraction:
    """Pr[Y ∩ H = {0} | Z ⊆ H] with dim Y = k - z and Y ∩ Z = {0}.

    Zero whenever the event is impossible (h < z or h + k - z > n).
    """
    if not 0 <= z <= k <= n:
        raise ValueError("need 0 <= z <= k <= n")
    if h < z or (h - z) + (k - z) > n - z:
        return Fraction(0)
    num = 1
    for i in range(k - z):
        num *= p ** (n - z) - p ** (h - z + i)
    return Fraction(num, alpha(n - z, k - z, p))


def match_probability(k: int, z: int, n: int, p: int) -> Fraction:
    """Chance a uniform map with kernel H, given Z ⊆ H and Y ∩ H = {0},
    sends a basis of Y to its prescribed (independent) images.
    """
    return Fraction(1, alpha(n, k - z, p))


@dataclass(frozen=True)
class Decomposition:
    k: int
    z: int
    span: Subspace
    zero: Subspace
    complement: Subspace


def decompose(s: PartialFn):
    """K = span(dom s), Z = kernel of s on K and a complement Y, or None if
    s has no linear extension."""
    cons = linear_consistency(s)
    if not cons:
        return None
    y = complement_in(cons.kernel, cons.span)
    return Decomposition(cons.span.dim, cons.kernel.dim, cons.span, cons.kernel, y)


@dataclass
class Part3Report:
    per_h: dict  # h -> (conditioning count, extension count, ratio or None)
    common: Fraction | None
    analytic: Fraction | None
    passed: bool

    def to_json(self) -> dict:
        return {"per_h": [{"h": h, "condition": c, "extend": e,
                           "value": None if r is None else str(r)}
                          for h, (c, e, r) in sorted(self.per_h.items())],
                "common": None if self.common is None else str(self.common),
                "analytic": None if self.analytic is None else str(self.analytic),
                "pass": self.passed}


def _conditioning_mask(cat, dec):
    p = cat.p
    mask = np.ones(len(cat), dtype=bool)
    for v in dec.zero.elements():
        mask &= cat.kernel_mask[:, vec_to_index(v, p)]
    for v in dec.complement.elements():
        if any(v):
            mask &= ~cat.kernel_mask[:, vec_to_index(v, p)]
    return mask


def verify_part3(s: PartialFn, cap=None) -> Part3Report:
    """Count Pr[s ⪯ f | Z ⊆ H, Y ∩ H = {0}] for every h and check it is constant."""
    dec = decompose(s)
    if dec is None:
        raise ValueError("verify_part3 needs a linearly consistent partial function")
    cat = matrix_catalog(s.p, s.n, cap)
    cond = _conditioning_mask(cat, dec)
    ext = cond & cat.extension_mask(s.domain, s.values)
    cond_counts = cat.counts_by_kernel_dim(cond)
    ext_counts = cat.counts_by_kernel_dim(ext)
    per_h = {}
    for h in range(s.n + 1):
        c, e = cond_counts[h], ext_counts[h]
        per_h[h] = (c, e, Fraction(e, c) if c else None)
    ratios = {r for _, _, r in per_h.values() if r is not None}
    common = next(iter(ratios)) if len(ratios) == 1 else None
    return Part3Report(per_h, common, match_probability(dec.k, dec.z, s.n, s.p),
                       len(ratios) == 1)


def _part3_by_counting(s, dec, cap):
    # smallest h with a nonempty conditioning event; h = z always qualifies
    cat = matrix_catalog(s.p, s.n, cap)
    cond = _conditioning_mask(cat, dec)
    ext = cond & cat.extension_mask(s.domain, s.values)
    cond_counts = cat.counts_by_kernel_dim(cond)
    ext_counts = cat.counts_by_kernel_dim(ext)
    h = next(h for h, c in enumerate(cond_counts) if c)
    return Fraction(ext_counts[h], cond_counts[h])


def q_s_closed_form_table(s: PartialFn, part3="count", cap=None) -> list:
    """[Q_s(p^h) for h = 0..n] as the product of the three factors.

    ``part3="count"`` takes the D-independent factor from counting at one
    h; ``part3="analytic"`` uses 1 / alpha(n, k - z) and needs no
    enumeration.
    """
    dec = decompose(s)
    if dec is None:
        return [Fraction(0)] * (s.n + 1)
    if part3 == "count":
        third = _part3_by_counting(s, dec, cap)
    elif part3 == "analytic":
        third = match_probability(dec.k, dec.z, s.n, s.p)
    else:
        raise ValueError(f"unknown part3 mode {part3!r}")
    return [prob_kernel_contains(dec.z, h, s.n, s.p) * prob_avoids(dec.k, dec.z, h, s.n, s.p)
            * third for h in range(s.n + 1)]


def q_s_closed_form(s: PartialFn, h: int, part3="count", cap=None) -> Fraction:
    if not 0 <= h <= s.n:
        raise ValueError(f"need 0 <= h <= n, got h={h}")
    return q_s_closed_form_table(s, part3, cap)[h]


def q_s_table(s: PartialFn, mode="closed", cap=None) -> QTable:
    values = q_s_bruteforce_table(s, cap) if mode == "brute" else q_s_closed_form_table(s, cap=cap)
    return QTable.from_values(s.p, s.n, values)


# ---------------------------------------------------------------------------
# averaged acceptance of a circuit

@dataclass
class QofD:
    table: QTable
    degree: int
    bound: int
    residuals: list
    coef: list

    @property
    def passed(self) -> bool:
        return self.degree <= self.bound and self.residuals[self.degree] < DEGREE_TOL

    def degree_report(self) -> dict:
        return {"degree": self.degree, "bound": self.bound, "pass": self.passed,
                "residuals": list(self.residuals)}


def _acceptances(circuit: Circuit, indices: Sequence[int], cap=None, sim_cap=None):
    cat = matrix_catalog(circuit.p, circuit.n, cap)
    return [run_circuit(circuit, cat.matrix(int(i)), sim_cap) for i in indices]


def q_of_D(circuit: Circuit, cap=None, jobs=1, tol=DEGREE_TOL, sim_cap=None) -> QofD:
    """Average P(f) over every f in F_D for D = p^0..p^n and fit its degree.

    ``cap`` bounds the matrix enumeration, ``sim_cap`` the state size.
    Values are summed with math.fsum in enumeration order, so the result
    does not depend on ``jobs``.
    """
    p, n = circuit.p, circuit.n
    cat = matrix_catalog(p, n, cap)
    values = []
    for k in range(n + 1):
        idx = cat.indices_with_kernel_dim(k)
        if jobs > 1 and len(idx) > 1:
            chunks = np.array_split(idx, jobs)
            with ProcessPoolExecutor(jobs) as pool:
                parts = pool.map(_acceptances, [circuit] * len(chunks), chunks,
                                 [cap] * len(chunks), [sim_cap] * len(chunks))
            accs = [a for part in parts for a in part]
        else:
            accs = _acceptances(circuit, idx, cap, sim_cap)
        values.append(math.fsum(accs) / len(accs))
    table = QTable.from_values(p, n, values)
    D = np.array([pt.D for pt in table.points], dtype=float)
    fit = MinimalDegreeRegressor(tol=tol).fit(D.reshape(-1, 1), np.array(values))
    return QofD(table, fit.degree_, 2 * circuit.query_count, fit.residuals_,
                [float(c) for c in fit.coef_])
