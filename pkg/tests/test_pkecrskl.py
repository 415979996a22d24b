# -*- coding: utf-8 -*-
from keyleasing import pkecrskl, skecrskl
from keyleasing.bits import Bits
from keyleasing.prims import (
    CcParams,
    IdealBackendRegistry,
    PredicatePolicy,
    abe_kg,
    abe_setup,
    cc_eval,
    cc_obfuscate,
    predicate_relation,
)
from keyleasing.qreg import (
    RegisterLayout,
    SparseState,
    apply_xor_oracle,
    measure_computational,
    prepare_bb84,
    states_equal,
)
from keyleasing.rng import random_bits, stream
from keyleasing.signed import ABE_SK


def test_roundtrip(params, rng, registry):
    ek, msk = pkecrskl.setup(params, rng, registry)
    m = random_bits(rng, params.message_bits)
    dk, vk = pkecrskl.kg(msk, rng)
    ct = pkecrskl.enc(ek, m, rng)
    got, post = pkecrskl.dec(dk, ct, rng)
    assert got == m
    assert states_equal(post.state, dk.state)
    assert pkecrskl.vrfy(vk, post, rng)


def test_key_layout(params, rng, registry):
    ek, msk = pkecrskl.setup(params, rng, registry)
    dk, _ = pkecrskl.kg(msk, rng)
    assert dk.state.layout.names == msk.ske_layout.names + (ABE_SK,)
    assert ek.dk_width == msk.ske_layout.total_bits
    assert len(dk.state) == 2 ** params.hadamard


def test_uncompute_clears_the_abe_register(params, rng, registry):
    _, msk = pkecrskl.setup(params, rng, registry)
    dk, vk = pkecrskl.kg(msk, rng)
    uncomputed = pkecrskl.uncompute_abe_register(vk, dk)
    assert uncomputed.segment_values(ABE_SK) == [Bits.zeros(msk.abe_msk.token_width)]


def test_wrong_randomness_leaves_a_residue(params, rng, registry):
    _, msk = pkecrskl.setup(params, rng, registry)
    dk, vk = pkecrskl.kg(msk, rng)
    wrong = pkecrskl.PkeVk(vk.abe_msk, vk.ske_vk, vk.ske_tk, vk.k.flip(0))
    uncomputed = pkecrskl.uncompute_abe_register(wrong, dk)
    assert Bits.zeros(msk.abe_msk.token_width) not in uncomputed.segment_values(ABE_SK)


def test_returned_register_without_abe_layer_is_refused(params, rng, registry):
    _, msk = pkecrskl.setup(params, rng, registry)
    dk, vk = pkecrskl.kg(msk, rng)
    bare = pkecrskl.PkeDk(prepare_bb84(Bits.zeros(2), Bits.ones(2)), dk.ske_layout)
    assert not pkecrskl.vrfy(vk, bare, rng)


def _query(*attributes: int) -> SparseState:
    layout = RegisterLayout.of((pkecrskl.ABE_Y, 3))
    return SparseState(layout, {(y,): 1.0 for y in attributes})


def test_quantum_key_oracle(registry, rng):
    _, msk = abe_setup(registry, predicate_relation, 3, 16, 8)
    target = PredicatePolicy.from_function(3, lambda y: int(y.value < 4))
    r = random_bits(rng, 16)
    answer = pkecrskl.quantum_kg_oracle(
        msk, predicate_relation, target, _query(1, 2), r, rng
    )
    assert answer.layout.names == (pkecrskl.ABE_Y, pkecrskl.ABE_B, ABE_SK)
    for key in answer.terms:
        y = answer.segment_bits(key, pkecrskl.ABE_Y)
        assert answer.segment_bits(key, ABE_SK) == abe_kg(msk, y, r)
    refused = pkecrskl.quantum_kg_oracle(
        msk, predicate_relation, target, _query(6), r, rng
    )
    assert refused is None


def test_proof_circuit_feeds_compute_and_compare(params):
    rng = stream(11, "proof-circuit")
    registry = IdealBackendRegistry(params.lam, stream(12, "proof-registry"))
    msk = skecrskl.setup(params, rng)
    m = random_bits(rng, params.message_bits)
    ct = skecrskl.enc(msk, m)
    dk, _, _ = skecrskl.kg(msk, rng)
    circuit_d = pkecrskl.proof_circuit_d(ct)
    outcome, _ = measure_computational(dk.state, dk.layout.names, rng)
    assert circuit_d(outcome.bits) == m
    assert circuit_d(Bits.zeros(7)) == Bits.zeros(params.message_bits)

    message = Bits.from_str("1")
    program = cc_obfuscate(
        registry,
        circuit_d,
        m,
        message,
        CcParams(outcome.bits.width, params.message_bits),
    )
    assert cc_eval(program, outcome.bits) == message
    assert cc_eval(program, Bits.zeros(outcome.bits.width)) is None


def _verify_rate(vk, tampered, rng, trials=300):
    return sum(pkecrskl.vrfy(vk, tampered, rng) for _ in range(trials)) / trials


def test_measured_abe_register_rarely_verifies(params, rng, registry):
    _, msk = pkecrskl.setup(params, rng, registry)
    dk, vk = pkecrskl.kg(msk, rng)
    _, collapsed = measure_computational(dk.state, ABE_SK, rng)
    assert len(collapsed) == 1
    tampered = pkecrskl.PkeDk(collapsed, dk.ske_layout)
    assert _verify_rate(vk, tampered, rng) <= 2 ** -params.hadamard + 0.07


def test_garbage_in_abe_register_rarely_verifies(params, rng, registry):
    _, msk = pkecrskl.setup(params, rng, registry)
    dk, vk = pkecrskl.kg(msk, rng)
    width = msk.abe_msk.token_width
    garbage = {}
    state = apply_xor_oracle(
        dk.state,
        dk.ske_names,
        ABE_SK,
        lambda u: garbage.setdefault(u.value, random_bits(rng, width)),
    )
    assert len(state) == len(dk.state)
    tampered = pkecrskl.PkeDk(state, dk.ske_layout)
    assert _verify_rate(vk, tampered, rng) <= 2 ** -params.hadamard + 0.07
