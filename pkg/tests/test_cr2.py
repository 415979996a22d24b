# -*- coding: utf-8 -*-
import pytest

from keyleasing import cr2
from keyleasing.bits import Bits
from keyleasing.config import SchemeParams
from keyleasing.exceptions import WidthMismatch
from keyleasing.prims import PredicatePolicy, miabe_dec
from keyleasing.qreg import measure_computational
from keyleasing.rng import random_bits, stream


@pytest.fixture
def cr2_params() -> SchemeParams:
    return SchemeParams(lam=16, hadamard=2, positions=4)


def _accepting(y: int) -> PredicatePolicy:
    return PredicatePolicy.from_function(3, lambda attr: int(attr.value != y))


def _tokens(key: cr2.Cr2Key, rng):
    names = [cr2.sk_segment(i) for i in range(1, key.slots + 1)]
    outcome, _ = measure_computational(key.state, names, rng)
    return [outcome.part(name) for name in names]


def test_setup_and_key_shape(cr2_params, rng, registry):
    ek, msk = cr2.setup(cr2_params, rng, registry)
    assert ek.slots == msk.slots == msk.skecd_sk.params.ct_width
    key, vk = cr2.kg(msk, Bits(3, 3), rng)
    assert key.slots == msk.slots
    assert key.layout == msk.layout
    assert len(key.state) == 2 ** cr2_params.hadamard
    assert sorted(vk.sk_xor) == [p + 1 for p in vk.theta.positions(1)]
    with pytest.raises(WidthMismatch):
        cr2.kg(msk, Bits(3, 2), rng)


def test_computational_slots_hold_one_token(cr2_params, rng, registry):
    _, msk = cr2.setup(cr2_params, rng, registry)
    key, vk = cr2.kg(msk, Bits(3, 3), rng)
    for position in range(key.slots):
        values = key.state.segment_values(cr2.sk_segment(position + 1))
        assert len(values) == (2 if vk.theta[position] else 1)


def test_policy_decides_decryption(cr2_params, rng, registry):
    ek, msk = cr2.setup(cr2_params, rng, registry)
    m = random_bits(rng, cr2_params.message_bits)
    key, _ = cr2.kg(msk, Bits(3, 3), rng)
    got, key = cr2.dec(key, cr2.enc(ek, _accepting(3), m), rng)
    assert got == m
    got, _ = cr2.dec(key, cr2.enc(ek, _accepting(4), m), rng)
    assert got is None


def test_tokens_of_different_keys_do_not_mix(cr2_params, rng, registry):
    ek, msk = cr2.setup(cr2_params, rng, registry)
    m = random_bits(rng, cr2_params.message_bits)
    ct = cr2.enc(ek, _accepting(3), m)
    first, _ = cr2.kg(msk, Bits(3, 3), rng)
    second, _ = cr2.kg(msk, Bits(3, 3), rng)
    a, b = _tokens(first, rng), _tokens(second, rng)
    assert miabe_dec(ct.miabe_ct, a) == m
    assert miabe_dec(ct.miabe_ct, [a[0]] + b[1:]) is None


def test_honest_deletion_verifies(cr2_params):
    for trial in range(10):
        rng = stream(trial, "cr2-delete")
        _, msk = cr2.setup(cr2_params, rng)
        key, vk = cr2.kg(msk, Bits(trial % 8, 3), rng)
        assert cr2.vrfy(vk, cr2.delete(key, rng))


def test_measured_key_rarely_verifies(cr2_params):
    trials = 400
    passes = 0
    for trial in range(trials):
        rng = stream(trial, "cr2-measure")
        _, msk = cr2.setup(cr2_params, rng)
        key, vk = cr2.kg(msk, Bits(0, 3), rng)
        _, collapsed = measure_computational(key.state, key.layout.names, rng)
        passes += cr2.vrfy(vk, cr2.delete(cr2.Cr2Key(collapsed, key.y, key.tag), rng))
    assert passes / trials < 2 ** -2 + 0.07


def test_certificate_json(cr2_params, rng, registry):
    _, msk = cr2.setup(cr2_params, rng, registry)
    key, vk = cr2.kg(msk, Bits(1, 3), rng)
    cert = cr2.delete(key, rng)
    restored = cr2.Cr2Cert.from_json(cert.to_json())
    assert restored == cert
    assert cr2.vrfy(vk, restored)
    assert not cr2.vrfy(vk, cr2.Cr2Cert(cert.slots[1:]))
