# -*- coding: utf-8 -*-
import pytest

from keyleasing.bits import Bits
from keyleasing.exceptions import (
    SlotArityError,
    SlotIndexError,
    UnknownHandle,
    WidthMismatch,
)
from keyleasing.prims import (
    CcParams,
    Owf,
    PredicatePolicy,
    abe_dec,
    abe_enc,
    abe_kg,
    abe_setup,
    cc_eval,
    cc_obfuscate,
    cc_sim,
    circuit_outputs_bot,
    hash_bits,
    keyed_hash,
    miabe_dec,
    miabe_enc,
    miabe_kg,
    miabe_setup,
    predicate_relation,
    skfe_dec,
    skfe_enc,
    skfe_kg,
    skfe_setup,
    ske_dec,
    ske_enc,
    ske_kg,
)
from keyleasing.rng import random_bits


def test_hashes_are_deterministic_and_domain_separated():
    s = Bits.from_str("1011")
    assert hash_bits("a", s, width=40) == hash_bits("a", s, width=40)
    assert hash_bits("a", s, width=40) != hash_bits("b", s, width=40)
    key = Bits.ones(16)
    assert keyed_hash(key, "d", s, width=300).width == 300
    other = Bits.zeros(16)
    assert keyed_hash(key, "d", s, width=8) != keyed_hash(other, "d", s, width=8)


def test_owf_checks_its_input_width():
    f = Owf(16, 32)
    assert f(Bits.zeros(16)).width == 32
    with pytest.raises(WidthMismatch):
        f(Bits.zeros(15))


def test_ske_roundtrip_and_tamper(rng):
    key = ske_kg(16, rng)
    m = random_bits(rng, 24)
    ct = ske_enc(key, m, rng)
    assert ske_dec(key, ct) == m
    tampered = type(ct)(ct.nonce, ct.body.flip(0), ct.tag)
    assert ske_dec(key, tampered) is None
    assert ske_dec(ske_kg(16, rng), ct) is None


def test_compute_and_compare(registry):
    lock = Bits(0xBEEF, 16)
    message = Bits.from_str("101")
    params = CcParams(input_width=4, output_width=16)

    def program(y: Bits) -> Bits:
        return lock if y.value == 5 else Bits.zeros(16)

    policy = cc_obfuscate(registry, program, lock, message, params)
    assert cc_eval(policy, Bits(5, 4)) == message
    assert cc_eval(policy, Bits(4, 4)) is None
    assert circuit_outputs_bot(policy, Bits(4, 4)) == 0
    assert circuit_outputs_bot(policy, Bits(5, 4)) == 1
    simulated = cc_sim(registry, params, 3)
    assert all(cc_eval(simulated, Bits(y, 4)) is None for y in range(16))
    with pytest.raises(WidthMismatch):
        cc_obfuscate(registry, program, Bits.zeros(8), message, params)


def test_predicate_policy():
    policy = PredicatePolicy.from_function(3, lambda y: int(y.value != 6))
    assert policy.attr_width == 3
    assert policy.table.width == 8
    assert predicate_relation(policy, Bits(6, 3)) == 0
    assert predicate_relation(policy, Bits(2, 3)) == 1
    with pytest.raises(WidthMismatch):
        policy.evaluate(Bits(1, 2))


def test_abe(registry, rng):
    pk, msk = abe_setup(registry, predicate_relation, 3, 16, 8)
    m = Bits(0xA5, 8)
    policy = PredicatePolicy.from_function(3, lambda y: int(y.value != 1))
    ct = abe_enc(pk, policy, m)
    r = random_bits(rng, 16)
    token = abe_kg(msk, Bits(1, 3), r)
    assert token.width == msk.token_width
    assert token == abe_kg(msk, Bits(1, 3), r)
    assert abe_dec(token, ct) == m
    assert abe_dec(abe_kg(msk, Bits(2, 3), r), ct) is None
    forged = token[: registry.lam] + Bits(2, 3) + token[registry.lam + 3 :]
    assert abe_dec(forged, ct) is None
    assert abe_dec(token[1:], ct) is None


def test_abe_keys_of_other_setups_fail(registry, rng):
    pk, _ = abe_setup(registry, predicate_relation, 3, 16, 8)
    _, other = abe_setup(registry, predicate_relation, 3, 16, 8)
    ct = abe_enc(pk, PredicatePolicy(Bits.zeros(8)), Bits.zeros(8))
    assert abe_dec(abe_kg(other, Bits(0, 3), random_bits(rng, 16)), ct) is None


def test_multi_input_abe(registry):
    def relation(x, attributes):
        return int(any(a.value != b for a, b in zip(attributes, x)))

    pk, msk = miabe_setup(registry, relation, [2, 2], 4)
    ct = miabe_enc(pk, (1, 3), Bits(9, 4))
    tokens = [miabe_kg(msk, 1, Bits(1, 2)), miabe_kg(msk, 2, Bits(3, 2))]
    assert miabe_dec(ct, tokens) == Bits(9, 4)
    assert miabe_dec(ct, [tokens[1], tokens[0]]) is None
    assert miabe_dec(ct, [tokens[0], miabe_kg(msk, 2, Bits(2, 2))]) is None
    with pytest.raises(SlotArityError):
        miabe_dec(ct, tokens[:1])
    with pytest.raises(SlotIndexError):
        miabe_kg(msk, 3, Bits(0, 2))
    with pytest.raises(SlotIndexError):
        miabe_kg(msk, 0, Bits(0, 2))


def test_skfe(registry):
    msk = skfe_setup(registry, lambda x, y: Bits(x ^ y.value, 4), 4, 4)
    ct = skfe_enc(msk, 0b1100)
    token = skfe_kg(msk, Bits(0b1010, 4))
    assert skfe_dec(token, ct) == Bits(0b0110, 4)
    assert skfe_dec(token.flip(0), ct) is None


def test_unknown_handle(registry):
    with pytest.raises(UnknownHandle):
        registry.lookup("abe", 999)
