"""Degree lower bound for polynomials that separate D = 1 from D = p.

A polynomial Q satisfies the hypothesis when Q(1) >= 2/3, Q(p) <= 1/3 and
Q(p^k) lies in [0, 1] for k = 0..n.  For a fixed degree d this is a linear
feasibility problem in the d + 1 monomial coefficients, decided exactly:
either a rational witness polynomial or a Farkas certificate comes back.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .fflinalg import is_prime
from .lp import check_certificate, solve_inequalities
from .polymethod import RationalPoly


@dataclass(frozen=True)
class Lemma1Instance:
    p: int
    n: int
    accept_lo: Fraction = Fraction(2, 3)
    reject_hi: Fraction = Fraction(1, 3)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        object.__setattr__(self, "accept_lo", Fraction(self.accept_lo))
        object.__setattr__(self, "reject_hi", Fraction(self.reject_hi))
        if not 0 <= self.reject_hi < self.accept_lo <= 1:
            raise ValueError("need 0 <= reject_hi < accept_lo <= 1")

    @property
    def points(self):
        return [self.p ** k for k in range(self.n + 1)]


@dataclass
class ConstraintCheck:
    name: str
    D: int
    value: Fraction
    passed: bool


@dataclass
class HypothesisReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {"pass": self.passed,
                "constraints": [{"name": c.name, "D": str(c.D), "value": str(c.value),
                                 "pass": c.passed} for c in self.checks]}


def check_hypothesis(q: RationalPoly, inst: Lemma1Instance) -> HypothesisReport:
    """Evaluate the n + 3 constraints (two thresholds and n + 1 boxes) exactly."""
    checks = [ConstraintCheck("accept_lo", 1, q(1), q(1) >= inst.accept_lo),
              ConstraintCheck("reject_hi", inst.p, q(inst.p), q(inst.p) <= inst.reject_hi)]
    for k, D in enumerate(inst.points):
        v = q(D)
        checks.append(ConstraintCheck(f"box[{k}]", D, v, 0 <= v <= 1))
    return HypothesisReport(checks)


def constraint_system(inst: Lemma1Instance, d: int):
    """Rows of G c <= h over coefficients c_0..c_d, with a name per row."""
    G, h, names = [], [], []
    for k, D in enumerate(inst.points):
        powers = [D ** j for j in range(d + 1)]
        G.append([-x for x in powers]); h.append(Fraction(0)); names.append(f"lower[{k}]")
        G.append(powers); h.append(Fraction(1)); names.append(f"upper[{k}]")
    G.append([-1] * (d + 1)); h.append(-inst.accept_lo); names.append("accept_lo")
    G.append([inst.p ** j for j in range(d + 1)]); h.append(inst.reject_hi); names.append("reject_hi")
    return G, h, names


@dataclass
class FeasibilityResult:
    degree: int
    feasible: bool
    witness: RationalPoly | None = None
    certificate: list | None = None  # one multiplier per constraint row
    names: list = field(default_factory=list, repr=False)

    def verify(self, inst: Lemma1Instance) -> bool:
        """Re-check the witness or recombine the certificate, exactly."""
        if self.feasible:
            return self.witness.degree <= self.degree and check_hypothesis(self.witness, inst).passed
        G, h, _ = constraint_system(inst, self.degree)
        return check_certificate(G, h, self.certificate)

    def to_json(self) -> dict:
        out = {"d": self.degree, "status": "feasible" if self.feasible else "infeasible"}
        if self.feasible:
            out["witness"] = self.witness.to_json()
        else:
            out["certificate"] = [{"constraint": nm, "multiplier": str(y)}
                                  for nm, y in zip(self.names, self.certificate) if y]
        return out


def feasibility(inst: Lemma1Instance, d: int) -> FeasibilityResult:
    G, h, names = constraint_system(inst, d)
    res = solve_inequalities(G, h)
    if res.feasible:
        return FeasibilityResult(d, True, witness=RationalPoly(res.solution), names=names)
    return FeasibilityResult(d, False, certificate=res.certificate, names=names)


@dataclass
class Lemma1Result:
    inst: Lemma1Instance
    per_degree: list
    min_feasible: int | None

    @property
    def passed(self) -> bool:
        """Every degree below n/4 is certified infeasible and all results re-verify."""
        below = [r for r in self.per_degree if 4 * r.degree < self.inst.n]
        return (all(not r.feasible for r in below)
                and (self.min_feasible is None or 4 * self.min_feasible >= self.inst.n)
                and all(r.verify(self.inst) for r in self.per_degree))

    def to_json(self) -> dict:
        n = self.inst.n
        return {"p": self.inst.p, "n": n,
                "per_degree": [r.to_json() for r in self.per_degree],
                "min_feasible": self.min_feasible,
                "lemma_bound": "n/4",
                "bound_value": str(Fraction(n, 4)),
                "meets_n_plus_1_over_4": (None if self.min_feasible is None
                                          else 4 * self.min_feasible >= n + 1),
                "pass": self.passed}


def min_feasible_degree(inst: Lemma1Instance, max_degree: int | None = None) -> Lemma1Result:
    """Solve degrees 0, 1, ... until one is feasible or ``max_degree`` is passed."""
    max_degree = inst.n if max_degree is None else max_degree
    if max_degree > inst.n:
        raise ValueError("max_degree must not exceed n")
    results = []
    for d in range(max_degree + 1):
        r = feasibility(inst, d)
        results.append(r)
        if r.feasible:
            return Lemma1Result(inst, results, d)
    return Lemma1Result(inst, results, None)
