# -*- coding: utf-8 -*-
from keyleasing import strawman
from keyleasing.bits import Bits
from keyleasing.qreg import measure_computational, prepare_bb84, states_equal
from keyleasing.rng import random_bits


def test_key_is_an_equal_superposition(params, rng, registry):
    _, msk = strawman.setup(params, rng, registry)
    key, vk = strawman.kg(msk, rng)
    assert key.state.layout.names == (strawman.BRANCH, strawman.SECRET)
    assert len(key.state) == 2
    assert states_equal(vk.expected, key.state)


def test_every_copy_is_the_same_state(params, rng, registry):
    _, msk = strawman.setup(params, rng, registry)
    first, _ = strawman.kg(msk, rng)
    second, _ = strawman.kg(msk, rng)
    assert states_equal(first.state, second.state)


def test_both_branches_decrypt(params, rng, registry):
    pk, msk = strawman.setup(params, rng, registry)
    m = random_bits(rng, params.message_bits)
    ct = strawman.enc(pk, m)
    assert strawman.cdec(0, msk.sk0, ct) == m
    assert strawman.cdec(1, msk.sk1, ct) == m
    assert strawman.cdec(0, msk.sk1, ct) is None
    key, vk = strawman.kg(msk, rng)
    got, post = strawman.dec(key, ct, rng)
    assert got == m
    assert strawman.vrfy(vk, post.state)


def test_measured_or_foreign_keys_fail_verification(params, rng, registry):
    _, msk = strawman.setup(params, rng, registry)
    key, vk = strawman.kg(msk, rng)
    _, collapsed = measure_computational(key.state, strawman.BRANCH, rng)
    assert not strawman.vrfy(vk, collapsed)
    assert not strawman.vrfy(vk, prepare_bb84(Bits.zeros(1), Bits.ones(1)))
