"""Property suites: every invariant checked against an independent oracle.

Each suite returns a list of :class:`Check` records.  The oracles here never
call the code path they check: subspace counts come from walking RREF
bases, kernel sizes from the matrix catalogue's zero images, consistency
from "does any matrix extend s", and so on.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import classical, fflinalg, instances, lemma1, polymethod, qsim
from .fflinalg import (Subspace, all_vectors, index_to_vec, matrix_catalog, vec_to_index)


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


# ---------------------------------------------------------------------------
# counting

def _brute_alpha(n, h, p, limit=2 ** 20):
    """Ordered independent h-tuples, counted by growing explicit spans."""
    if (p ** n) ** h > limit:
        return None
    vecs = list(all_vectors(p, n))
    count = 0

    def extend(depth, span):
        nonlocal count
        if depth == h:
            count += 1
            return
        for v in vecs:
            if v not in span:
                new = {fflinalg.vec_add(s, fflinalg.vec_scale(c, v, p), p)
                       for s in span for c in range(p)}
                extend(depth + 1, new)

    extend(0, {(0,) * n})
    return count


def counting_suite(p, n, cap=None):
    checks = []
    cat = matrix_catalog(p, n, cap)
    hist = cat.counts_by_kernel_dim()
    for h in range(n + 1):
        a = fflinalg.alpha(n, h, p)
        brute_a = _brute_alpha(n, h, p)
        if brute_a is not None:
            checks.append(Check(f"alpha(n={n},h={h})", a == brute_a, {"formula": a, "brute": brute_a}))
        b = fflinalg.beta(n, h, p)
        walked = sum(1 for _ in fflinalg.enumerate_subspaces(n, h, p, cap))
        checks.append(Check(f"beta(n={n},h={h})", b == walked, {"formula": b, "enumerated": walked}))
        c = fflinalg.count_FD(n, h, p)
        checks.append(Check(f"count_FD(h={h})", c == hist[h], {"formula": c, "enumerated": hist[h]}))
        checks.append(Check(f"duality(h={h})", b == fflinalg.beta(n, n - h, p), {}))
    total = sum(fflinalg.count_FD(n, h, p) for h in range(n + 1))
    checks.append(Check("sum count_FD = p^(n^2)", total == p ** (n * n), {"sum": total}))

    # canonical form and kernels against brute force, on every matrix
    if p ** (n * n) <= 4096:
        ok_kernel = ok_rref = True
        vecs = list(all_vectors(p, n))
        for i in range(len(cat)):
            m = cat.matrix(i)
            ker = fflinalg.kernel(m)
            brute = {v for v in vecs if not any(m.apply(v))}
            ok_kernel &= set(ker.elements()) == brute
            space, rank = fflinalg.rref(m)
            again, _ = fflinalg.rref(list(space.basis), p, n) if space.basis else (space, 0)
            ok_rref &= again == space and rank == space.dim
        checks.append(Check("kernel = brute-force zero set", ok_kernel, {}))
        checks.append(Check("rref idempotent", ok_rref, {}))

    if p ** (n * n) <= 4096:
        subspaces = [s for h in range(n + 1) for s in fflinalg.enumerate_subspaces(n, h, p, cap)]
        sets = [frozenset(s.elements()) for s in subspaces]
        canon = len(set(sets)) == len(sets) == len(set(subspaces))
        checks.append(Check("canonical equality <=> set equality", canon, {"subspaces": len(subspaces)}))
        ok = True
        for zi, z in enumerate(subspaces):
            for ki, k in enumerate(subspaces):
                if not sets[zi] <= sets[ki]:
                    continue
                y = fflinalg.complement_in(z, k)
                ys = set(y.elements())
                summed = {fflinalg.vec_add(a, b, p) for a in ys for b in sets[zi]}
                ok &= (ys & sets[zi] == {(0,) * n} and summed == sets[ki]
                       and y.dim == k.dim - z.dim)
        checks.append(Check("complement_in direct sum", ok, {}))
    return checks


# ---------------------------------------------------------------------------
# Q_s closed forms

def consistent_partial_functions(p, n, max_dom=3, cap=None):
    """Every linearly consistent s with |dom s| <= max_dom, as restrictions of
    actual matrices (so consistency here does not use linear_consistency)."""
    cat = matrix_catalog(p, n, cap)
    vecs = list(all_vectors(p, n))
    for size in range(max_dom + 1):
        for dom in itertools.combinations(range(len(vecs)), size):
            if not dom:
                yield instances.PartialFn(p, n)
                continue
            rows = np.unique(cat.images[:, list(dom)], axis=0)
            for row in rows:
                yield instances.PartialFn(p, n, tuple((vecs[x], index_to_vec(int(y), p, n))
                                                      for x, y in zip(dom, row)))


def lemma2_suite(p, n, max_dom=3, cap=None):
    n_checked = 0
    failures = {"closed_vs_brute": [], "part3": [], "degree": [], "range": []}
    for s in consistent_partial_functions(p, n, max_dom, cap):
        n_checked += 1
        brute = polymethod.q_s_bruteforce_table(s, cap)
        closed = polymethod.q_s_closed_form_table(s, cap=cap)
        if brute != closed:
            failures["closed_vs_brute"].append(s.to_json())
        if not polymethod.verify_part3(s, cap).passed:
            failures["part3"].append(s.to_json())
        poly = polymethod.interpolate([(p ** h, v) for h, v in enumerate(brute)])
        if poly.degree > s.span_dim():
            failures["degree"].append(s.to_json())
        if any(not 0 <= v <= 1 for v in brute):
            failures["range"].append(s.to_json())
    checks = [Check("q_s closed form = brute force", not failures["closed_vs_brute"],
                    {"partial_functions": n_checked, "failures": failures["closed_vs_brute"][:5]}),
              Check("part 3 independent of D", not failures["part3"],
                    {"failures": failures["part3"][:5]}),
              Check("deg Q_s <= dim span(dom s)", not failures["degree"],
                    {"failures": failures["degree"][:5]}),
              Check("Q_s in [0,1]", not failures["range"], {})]

    # singleton partitions: sum over y of Q_{x->y} = 1 for each D
    ok = True
    for x in all_vectors(p, n):
        tables = [polymethod.q_s_bruteforce_table(instances.PartialFn(p, n, ((x, y),)), cap)
                  for y in all_vectors(p, n)]
        ok &= all(sum(col) == 1 for col in zip(*tables))
    checks.append(Check("sum_y Q_{x->y}(D) = 1", ok, {}))

    # linear_consistency against brute force on every partial function (small cases)
    if p ** n <= 4:
        checks.append(_consistency_check(p, n, max_dom, cap))
    return checks


def _consistency_check(p, n, max_dom, cap):
    cat = matrix_catalog(p, n, cap)
    vecs = list(all_vectors(p, n))
    ok, total = True, 0
    for size in range(max_dom + 1):
        for dom in itertools.combinations(vecs, size):
            for ys in itertools.product(vecs, repeat=size):
                s = instances.PartialFn(p, n, tuple(zip(dom, ys)))
                brute = bool(cat.extension_mask(dom, ys).any())
                ok &= bool(instances.linear_consistency(s)) == brute
                total += 1
    return Check("linear_consistency = brute force", ok, {"partial_functions": total})


# ---------------------------------------------------------------------------
# simulator

def _annihilator_brute(ker_elems, p, n):
    return {y for y in all_vectors(p, n) if all(fflinalg.dot(y, x, p) == 0 for x in ker_elems)}


def qsim_suite(p, n, cap=None, mc_draws=10_000, seed=0):
    cat = matrix_catalog(p, n, cap)
    support_ok = uniform_ok = norm_ok = restore_ok = True
    worst_outside = 0.0
    rng = np.random.default_rng(seed)
    for i in range(len(cat)):
        f = instances.make_linear(cat.matrix(i))
        dist = qsim.simon_round_distribution(f)
        ker = [index_to_vec(int(x), p, n) for x in np.flatnonzero(cat.kernel_mask[i])]
        perp = _annihilator_brute(ker, p, n)
        inside = np.array([vec_to_index(y, p) for y in sorted(perp)])
        outside = np.setdiff1d(np.arange(p ** n), inside)
        if len(outside):
            worst_outside = max(worst_outside, float(dist[outside].max()))
        support_ok &= set(np.flatnonzero(dist > 1e-9).tolist()) == set(inside.tolist())
        uniform_ok &= bool(np.all(np.abs(dist[inside] - 1 / len(inside)) < 1e-9))

        state = qsim.StateVector(p, n, 1, rng.normal(size=(p ** n, p ** n)) + 0j)
        state.amplitudes /= state.norm()
        after = qsim.apply_oracle(state, f)
        # a permutation: identical multiset of amplitudes, hence identical norm
        norm_ok &= bool(np.array_equal(np.sort_complex(after.amplitudes.ravel()),
                                       np.sort_complex(state.amplitudes.ravel())))
        back = qsim.apply_oracle(after, f.matrix.negate())
        restore_ok &= bool(np.array_equal(back.amplitudes, state.amplitudes))
    checks = [Check("round support = H^perp", support_ok, {"max_outside": worst_outside}),
              Check("round distribution uniform on H^perp", uniform_ok, {}),
              Check("oracle preserves norm", norm_ok, {}),
              Check("oracle with f then -f restores state", restore_ok, {})]

    q = qsim.qft_matrix(p, n)
    qi = qsim.qft_matrix(p, n, inverse=True)
    eye = np.eye(p ** n)
    checks.append(Check("QFT unitary and inverted by IQFT",
                        bool(np.abs(q.conj().T @ q - eye).max() < 1e-12
                             and np.abs(qi @ q - eye).max() < 1e-12), {}))

    # Monte Carlo frequencies against the exact round distribution
    f = instances.make_linear(fflinalg.sample_FD(n, min(1, n), p, seed=seed))
    dist = qsim.simon_round_distribution(f)
    draws = np.random.default_rng(seed).choice(len(dist), size=mc_draws, p=dist / dist.sum())
    freq = np.bincount(draws, minlength=len(dist)) / mc_draws
    sigma = np.sqrt(dist * (1 - dist) / mc_draws)
    ok = bool(np.all(np.abs(freq - dist) <= 4 * sigma + 1e-12))
    checks.append(Check("Monte Carlo round frequencies within 4 sigma", ok,
                        {"draws": mc_draws, "max_dev": float(np.max(np.abs(freq - dist)))}))
    return checks


def simon_decision_suite(p, n, trials=10_000, seed=0, cap=None):
    rounds = qsim.default_rounds(n)
    exact = qsim.spanning_probability(p, n, rounds)
    dp = qsim.span_dimension_dp(p, n, n, rounds)[n]
    checks = [Check(f"n={n}: spanning product = span DP", exact == dp,
                    {"exact": str(exact), "dp": str(dp)}),
              Check(f"n={n}: one-to-one success >= 3/4", exact >= Fraction(3, 4),
                    {"exact": float(exact)})]

    # kernel-p inputs: support dimension n - 1, so the DP gives certainty
    cat = matrix_catalog(p, n, cap)
    worst = Fraction(1)
    for i in cat.indices_with_kernel_dim(1):
        f = instances.make_linear(cat.matrix(int(i)))
        dist = qsim.simon_round_distribution(f)
        support = int(np.count_nonzero(dist > 1e-9))
        r = round(math.log(support, p))
        wrong = qsim.span_dimension_dp(p, r, n, rounds)[n] if p ** r == support else Fraction(1)
        worst = min(worst, 1 - wrong)
    checks.append(Check(f"n={n}: kernel-p decided correctly with probability 1", worst == 1,
                        {"matrices": int(len(cat.indices_with_kernel_dim(1)))}))

    f = instances.make_linear(fflinalg.sample_FD(n, 0, p, seed=seed))
    dist = qsim.simon_round_distribution(f)
    rng = np.random.default_rng(seed)
    wins = sum(qsim.simon_decide(f, rounds, rng, dist)[0] is instances.Label.ONE_TO_ONE
               for _ in range(trials))
    rate = wins / trials
    sigma = math.sqrt(float(exact) * (1 - float(exact)) / trials)
    checks.append(Check(f"n={n}: Monte Carlo success within 4 sigma",
                        abs(rate - float(exact)) <= 4 * sigma,
                        {"rate": rate, "exact": float(exact), "sigma": sigma, "trials": trials}))
    return checks


# ---------------------------------------------------------------------------
# classical, degree pipeline, minimal feasible degree

def classical_suite(p, n, cap=None, collision_n=8, budget=40, trials=2000, seed=0):
    cat = matrix_catalog(p, n, cap)
    ok = True
    for i in range(len(cat)):
        m = cat.matrix(i)
        label, used = classical.basis_solve(m, p, n)
        expected = instances.label_for_kernel_dim(int(cat.kernel_dim[i]))
        ok &= label is expected and used == n
    checks = [Check("basis_solve labels = kernel labels, n queries", ok, {"matrices": len(cat)})]

    exact = float(classical.birthday_collision_probability(collision_n, budget))
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        shift = int(rng.integers(1, 2 ** collision_n))
        g = instances.make_general(collision_n, shift, seed=rng)
        hits += classical.collision_search(g, budget, seed=rng).found
    rate = hits / trials
    checks.append(Check("collision rate within 5 points of birthday DP", abs(rate - exact) <= 0.05,
                        {"rate": rate, "exact": exact, "trials": trials, "budget": budget}))
    return checks


def degree_suite(p, n, cap=None):
    checks = []
    for name, c in qsim.bundled_circuits(p, n).items():
        res = polymethod.q_of_D(c, cap)
        checks.append(Check(f"circuit {name}: deg Q <= 2T", res.passed, res.degree_report()))
    return checks


def lemma1_suite(p, ns=(4, 8, 12, 16)):
    checks = []
    for n in ns:
        res = lemma1.min_feasible_degree(lemma1.Lemma1Instance(p, n))
        checks.append(Check(f"lemma1 n={n}", res.passed,
                            {"min_feasible": res.min_feasible,
                             "certified_infeasible": [r.degree for r in res.per_degree if not r.feasible]}))
    return checks


SUITES = ("counting", "lemma2", "qsim", "all")


def run_suite(name, p, n, cap=None, seed=0):
    if name == "counting":
        return counting_suite(p, n, cap)
    if name == "lemma2":
        return lemma2_suite(p, n, cap=cap)
    if name == "qsim":
        out = qsim_suite(p, n, cap, seed=seed) + degree_suite(p, n, cap)
        if p == 2:
            out += simon_decision_suite(p, n, seed=seed, cap=cap)
        return out
    if name == "all":
        out = counting_suite(p, n, cap) + lemma2_suite(p, n, cap=cap)
        out += run_suite("qsim", p, n, cap, seed)
        out += classical_suite(p, n, cap, seed=seed)
        return out
    raise ValueError(f"unknown suite {name!r}")
