import itertools
from fractions import Fraction

import numpy as np
import pytest

from simonlab.fflinalg import FpMatrix, Subspace, all_vectors, dot, kernel, matrix_catalog
from simonlab.instances import Label, PromiseViolation, make_linear
from simonlab.qsim import (Circuit, Op, SimulatorCapExceeded, StateVector, apply_oracle,
                           bundled_circuits, default_rounds, is_unitary, qft_matrix,
                           qft_query_register, iqft_query_register, run_circuit,
                           simon_decide, simon_round_distribution, span_dimension_dp,
                           spanning_probability)


def perp_indices(m):
    ker = list(kernel(m).elements())
    return {i for i, y in enumerate(all_vectors(m.p, m.n))
            if all(dot(y, x, m.p) == 0 for x in ker)}


def test_oracle_on_basis_state():
    f = make_linear(FpMatrix.from_rows([[1, 1], [0, 0]], 2))
    # x = (1,0) has index 2, f(x) = (1,0) has index 2
    state = StateVector.basis_state(2, 2, x=2, b=0)
    out = apply_oracle(state, f)
    assert out.amplitudes[2, 2, 0] == 1 and out.norm() == pytest.approx(1.0)
    again = apply_oracle(out, f)
    assert again.amplitudes[2, 0, 0] == 1


def test_oracle_adds_mod_p():
    f = make_linear(FpMatrix.identity(3, 1))
    state = StateVector.basis_state(3, 1, x=2, b=2)
    assert apply_oracle(state, f).amplitudes[2, 1, 0] == 1  # 2 + 2 = 1 mod 3


def test_qft_single_qubit_is_hadamard():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert np.allclose(qft_matrix(2, 1), h, atol=1e-12)


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2), (5, 1)])
def test_qft_unitary_and_inverse(p, n):
    q = qft_matrix(p, n)
    assert is_unitary(q)
    state = StateVector.basis_state(p, n, x=1, b=0)
    back = iqft_query_register(qft_query_register(state))
    assert np.allclose(back.amplitudes, state.amplitudes, atol=1e-12)


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (2, 3)])
def test_round_distribution_is_uniform_on_annihilator(p, n):
    for m in _all(p, n):
        dist = simon_round_distribution(make_linear(m))
        perp = perp_indices(m)
        for y, pr in enumerate(dist):
            expected = 1 / len(perp) if y in perp else 0.0
            assert abs(pr - expected) < 1e-9


def _all(p, n):
    cat = matrix_catalog(p, n)
    return [cat.matrix(i) for i in range(len(cat))]


def test_f3_round_distribution_example():
    # kernel of [[1,2],[2,1]] over F_3 is span{(1,1)}; its annihilator is span{(1,2)}
    m = FpMatrix.from_rows([[1, 2], [2, 1]], 3)
    assert set(kernel(m).elements()) == {(0, 0), (1, 1), (2, 2)}
    dist = simon_round_distribution(make_linear(m))
    idx = {y: i for i, y in enumerate(all_vectors(3, 2))}
    for y in [(0, 0), (1, 2), (2, 1)]:
        assert dist[idx[y]] == pytest.approx(1 / 3, abs=1e-9)
    assert dist.sum() == pytest.approx(1.0, abs=1e-12)


def test_spanning_probability_against_enumeration():
    # every 5-tuple of vectors in F_2^2
    vecs = list(all_vectors(2, 2))
    spanning = sum(1 for tup in itertools.product(vecs, repeat=5)
                   if Subspace.span(tup, 2, 2).dim == 2)
    assert spanning == 930  # 1024 * (1 - 2**-5) * (1 - 2**-4)
    assert spanning_probability(2, 2, 5) == Fraction(spanning, 1024)


@pytest.mark.parametrize("p,n,T", [(2, 2, 5), (2, 4, 7), (3, 3, 4), (5, 2, 3)])
def test_span_dp_matches_product(p, n, T):
    dist = span_dimension_dp(p, n, n, T)
    assert sum(dist) == 1
    assert dist[n] == spanning_probability(p, n, T)


def test_span_dp_never_full_below_support():
    assert span_dimension_dp(2, 2, 3, 10)[3] == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_default_rounds_meet_three_quarters(n):
    assert default_rounds(n) == n + 3
    assert spanning_probability(2, n, n + 3) >= Fraction(3, 4)


def test_simon_decide_kernel_p_always_correct():
    f = make_linear(FpMatrix.from_rows([[1, 1], [0, 0]], 2))
    for seed in range(50):
        answer, tr = simon_decide(f, seed=seed)
        assert answer is Label.KERNEL_P and tr.span_dim <= 1
    assert tr.predicted_success == 1


def test_simon_decide_deterministic_and_promise():
    f = make_linear(FpMatrix.identity(2, 3))
    a = simon_decide(f, seed=9)[1].to_json()
    assert a == simon_decide(f, seed=9)[1].to_json()
    assert a["rounds"] == 6 and len(a["samples"]) == 6
    with pytest.raises(PromiseViolation):
        simon_decide(make_linear(FpMatrix.zero(2, 2)), seed=0)


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        Circuit(2, 1, 1, (Op("dense", "output", np.array([[1, 0], [0, 2]])),), frozenset({0}))


def test_state_cap():
    with pytest.raises(SimulatorCapExceeded):
        StateVector.basis_state(2, 6, cap=1000)


def test_kernel_indicator_circuit_accepts_with_one_over_image_size():
    c = bundled_circuits(2, 2)["kernel_indicator"]
    assert c.query_count == 1
    for m in _all(2, 2):
        # the output register ends in a uniform mix over the image of f
        image = {m.apply(x) for x in all_vectors(2, 2)}
        assert run_circuit(c, make_linear(m)) == pytest.approx(1 / len(image), abs=1e-9)


def test_bundled_circuit_probabilities_in_range_and_json():
    for name, c in bundled_circuits(2, 2).items():
        again = Circuit.from_json(c.to_json())
        for m in _all(2, 2)[:6]:
            pr = run_circuit(c, make_linear(m))
            assert 0 <= pr <= 1
            assert run_circuit(again, make_linear(m)) == pytest.approx(pr, abs=1e-12)
