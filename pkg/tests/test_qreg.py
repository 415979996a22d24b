# -*- coding: utf-8 -*-
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import hadamard
from scipy.stats import chisquare

from keyleasing.bits import Bits
from keyleasing.exceptions import (
    DenseLimitExceeded,
    HadamardCapExceeded,
    LayoutError,
    SimulationError,
    TermCapExceeded,
)
from keyleasing.qreg import (
    Basis,
    RegisterLayout,
    SparseState,
    add_register,
    apply_phase_flip,
    apply_xor_oracle,
    basis_state,
    dense_distribution,
    dense_oracle,
    drop_register,
    measure_computational,
    measure_function,
    measure_hadamard,
    prepare_bb84,
    reorder,
    state_from_json,
    state_to_json,
    states_equal,
    tensor,
    trace_out,
)
from keyleasing.rng import stream


def _bb84(x: str, theta: str) -> SparseState:
    return prepare_bb84(Bits.from_str(x), Bits.from_str(theta))


def test_bb84_amplitudes():
    state = _bb84("011", "011")
    assert len(state) == 4
    half = 0.5
    assert state.amplitude("000") == pytest.approx(half)
    assert state.amplitude("001") == pytest.approx(-half)
    assert state.amplitude("010") == pytest.approx(-half)
    assert state.amplitude("011") == pytest.approx(half)
    assert state.amplitude("100") == 0
    assert state.norm() == pytest.approx(1.0)


def test_bb84_hadamard_cap():
    with pytest.raises(HadamardCapExceeded):
        prepare_bb84(Bits.zeros(4), Bits.ones(4), hadamard_cap=3)


def test_term_cap():
    with pytest.raises(TermCapExceeded):
        prepare_bb84(Bits.zeros(4), Bits.ones(4), term_cap=8)
    small = _bb84("00", "11")
    with pytest.raises(TermCapExceeded):
        capped = SparseState(small.layout, dict(small.items()), term_cap=4)
        tensor(capped, _bb84("0", "1"))


def test_layout_rejects_duplicates():
    with pytest.raises(LayoutError):
        RegisterLayout.of(("A", 1), ("A", 2))
    with pytest.raises(LayoutError):
        RegisterLayout.of(("A", 0))


def test_measuring_each_basis_is_deterministic(rng):
    x, theta = Bits.from_str("10110"), Bits.from_str("01101")
    for _ in range(20):
        state = prepare_bb84(x, theta)
        for i, (bit, basis) in enumerate(zip(x, theta), start=1):
            if basis:
                outcome, state = measure_hadamard(state, f"Q_{i}", rng)
            else:
                outcome, state = measure_computational(state, f"Q_{i}", rng)
            assert outcome.bits.value == bit


def test_hadamard_measurement_matches_the_dense_oracle(rng):
    prepared = add_register(_bb84("01", "11"), "T", 1)
    state = apply_xor_oracle(
        prepared, ["Q_1", "Q_2"], "T", lambda u: Bits(u.weight % 2, 1)
    )
    exact = dense_distribution(state, ["Q_1", "T"], Basis.HADAMARD)
    trials = 4000
    counts = {}
    for _ in range(trials):
        outcome, _ = measure_hadamard(state, ["Q_1", "T"], rng)
        counts[str(outcome.bits)] = counts.get(str(outcome.bits), 0) + 1
    distance = 0.5 * sum(
        abs(counts.get(k, 0) / trials - exact.get(k, 0.0))
        for k in set(counts) | set(exact)
    )
    assert distance < 0.05
    assert math.isclose(sum(exact.values()), 1.0)


def test_computational_outcomes_of_a_uniform_superposition(rng):
    state = _bb84("000", "111")
    counts = [0] * 8
    for _ in range(4000):
        outcome, _ = measure_computational(state, state.layout.names, rng)
        counts[outcome.bits.value] += 1
    assert chisquare(counts).pvalue > 1e-3


def test_hadamard_measurement_removes_segments(rng):
    outcome, post = measure_hadamard(_bb84("10", "10"), "Q_1", rng)
    assert outcome.part("Q_1") == Bits.from_str("1")
    assert post.layout.names == ("Q_2",)
    _, empty = measure_hadamard(post, "Q_2", rng)
    assert len(empty.layout) == 0
    assert len(empty) == 1


def test_measurement_collapses(rng):
    state = _bb84("000", "111")
    outcome, post = measure_computational(state, ["Q_1", "Q_3"], rng)
    assert len(post) == 2
    assert post.segment_values("Q_1") == [outcome.part("Q_1")]
    assert post.segment_values("Q_3") == [outcome.part("Q_3")]


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=1, max_value=6).flatmap(
        lambda n: st.tuples(
            st.integers(min_value=0, max_value=2 ** n - 1),
            st.integers(min_value=0, max_value=2 ** n - 1),
            st.just(n),
        )
    ),
    st.integers(min_value=1, max_value=2 ** 6 - 1),
)
def test_xor_oracle_keeps_norm_and_is_an_involution(case, mask):
    x, theta, n = case
    state = add_register(prepare_bb84(Bits(x, n), Bits(theta, n)), "OUT", 6)

    def g(u: Bits) -> Bits:
        return Bits((u.value * mask) % 64, 6)

    once = apply_xor_oracle(state, [f"Q_{i}" for i in range(1, n + 1)], "OUT", g)
    assert once.norm() == pytest.approx(1.0)
    twice = apply_xor_oracle(once, [f"Q_{i}" for i in range(1, n + 1)], "OUT", g)
    assert states_equal(twice, state)


def test_xor_oracle_must_not_overlap():
    state = _bb84("00", "11")
    with pytest.raises(LayoutError):
        apply_xor_oracle(state, ["Q_1", "Q_2"], "Q_2", lambda u: u[0:1])


def test_phase_flip_and_global_phase():
    state = _bb84("0", "1")
    flipped = apply_phase_flip(state, "Q_1", lambda u: u.value)
    assert states_equal(flipped, _bb84("1", "1"))
    assert not states_equal(flipped, state)
    negated = apply_phase_flip(state, "Q_1", lambda u: 1)
    assert states_equal(negated, state)


def test_states_equal_needs_the_same_layout():
    with pytest.raises(LayoutError):
        states_equal(_bb84("0", "0"), _bb84("00", "00"))


def test_measure_function_on_a_constant_leaves_the_state(rng):
    state = _bb84("0101", "0110")
    value, post = measure_function(state, ["Q_1", "Q_4"], lambda u: u, 2, rng)
    assert value == Bits.from_str("01")
    assert states_equal(post, state)
    none, _ = measure_function(state, "Q_1", lambda u: None, 3, rng)
    assert none is None


def test_measure_function_collapses_a_superposition(rng):
    state = _bb84("00", "11")
    value, post = measure_function(state, "Q_1", lambda u: u, 1, rng)
    assert post.segment_values("Q_1") == [value]
    assert len(post) == 2


def test_drop_register_refuses_entangled_registers():
    prepared = add_register(_bb84("0", "1"), "C", 1)
    entangled = apply_xor_oracle(prepared, "Q_1", "C", lambda u: u)
    with pytest.raises(LayoutError):
        drop_register(entangled, "C")
    cleared = apply_xor_oracle(entangled, "Q_1", "C", lambda u: u)
    assert states_equal(drop_register(cleared, "C"), _bb84("0", "1"))


def test_trace_out_and_reorder(rng):
    state = tensor(_bb84("1", "0"), basis_state(RegisterLayout.of(("R", 2)), "10"))
    swapped = reorder(state, ["R", "Q_1"])
    assert swapped.amplitude("101") == pytest.approx(1.0)
    rest = trace_out(swapped, "Q_1", rng)
    assert rest.layout.names == ("R",)
    with pytest.raises(LayoutError):
        reorder(state, ["R"])


def test_json_dump_restores_the_state():
    state = apply_phase_flip(_bb84("010", "111"), "Q_2", lambda u: u.value)
    restored = state_from_json(state_to_json(state, indent=2))
    assert restored.layout == state.layout
    assert states_equal(restored, state)


def test_dense_oracle():
    vector = dense_oracle(_bb84("01", "01"))
    np.testing.assert_allclose(vector, [1 / math.sqrt(2), -1 / math.sqrt(2), 0, 0])
    with pytest.raises(DenseLimitExceeded):
        dense_oracle(basis_state(RegisterLayout.of(("BIG", 30)), Bits.zeros(30)))


def test_zero_state_is_rejected():
    with pytest.raises(SimulationError):
        SparseState(RegisterLayout.of(("A", 1)), {(0,): 0.0})


def _total_variation(counts, exact, samples):
    return 0.5 * sum(
        abs(counts.get(k, 0) / samples - exact.get(k, 0.0))
        for k in set(counts) | set(exact)
    )


def test_trace_out_of_an_entangled_register_matches_the_partial_trace(rng):
    prepared = add_register(_bb84("00", "11"), "T", 1)
    state = apply_xor_oracle(
        prepared, ["Q_1", "Q_2"], "T", lambda u: Bits(int(u.value == 3), 1)
    )
    block = dense_oracle(state).reshape(4, 2)
    rho = block @ block.conj().T
    h2 = hadamard(4) / 2
    probabilities = np.real(np.diag(h2 @ rho @ h2.T))
    exact = {format(i, "02b"): float(p) for i, p in enumerate(probabilities)}
    assert exact["00"] == pytest.approx(0.625)
    samples = 4000
    counts = Counter()
    for _ in range(samples):
        reduced = trace_out(state, "T", rng)
        assert reduced.layout.names == ("Q_1", "Q_2")
        outcome, _ = measure_hadamard(reduced, ["Q_1", "Q_2"], rng)
        counts[str(outcome.bits)] += 1
    assert _total_variation(counts, exact, samples) < 0.05


def _random_circuit(data):
    n = data.draw(st.integers(min_value=1, max_value=5))
    x = data.draw(st.integers(min_value=0, max_value=2 ** n - 1))
    theta = data.draw(st.integers(min_value=0, max_value=2 ** n - 1))
    state = prepare_bb84(Bits(x, n), Bits(theta, n))
    for j in range(1, data.draw(st.integers(min_value=0, max_value=3)) + 1):
        state = add_register(state, f"A_{j}", 1)
    names = list(state.layout.names)
    for _ in range(data.draw(st.integers(min_value=1, max_value=6))):
        src = data.draw(
            st.lists(st.sampled_from(names), min_size=1, max_size=3, unique=True)
        )
        size = 2 ** len(src)
        bit = st.integers(min_value=0, max_value=1)
        table = data.draw(st.lists(bit, min_size=size, max_size=size))
        targets = [name for name in names if name not in src]
        if targets and data.draw(st.booleans()):
            dst = data.draw(st.sampled_from(targets))
            state = apply_xor_oracle(
                state, src, dst, lambda u, t=table: Bits(t[u.value], 1)
            )
        else:
            state = apply_phase_flip(state, src, lambda u, t=table: t[u.value])
    measured = data.draw(
        st.lists(st.sampled_from(names), min_size=1, max_size=3, unique=True)
    )
    return state, measured, data.draw(st.sampled_from(list(Basis)))


def _sample_against_dense(data, samples, tolerance):
    state, measured, basis = _random_circuit(data)
    rng = stream(data.draw(st.integers(min_value=0, max_value=2 ** 32 - 1)), "fuzz")
    measure = measure_hadamard if basis is Basis.HADAMARD else measure_computational
    counts = Counter(
        str(measure(state, measured, rng)[0].bits) for _ in range(samples)
    )
    exact = dense_distribution(state, measured, basis)
    assert _total_variation(counts, exact, samples) < tolerance


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_random_circuits_measure_like_the_dense_oracle(data):
    _sample_against_dense(data, 4000, 0.05)


@pytest.mark.slow
@settings(max_examples=200, deadline=None)
@given(st.data())
def test_random_circuits_measure_like_the_dense_oracle_at_full_size(data):
    _sample_against_dense(data, 20000, 0.02)
