# -*- coding: utf-8 -*-
import pytest

from keyleasing import skecrskl
from keyleasing.bits import Bits
from keyleasing.config import SchemeParams
from keyleasing.exceptions import LayoutError, WidthMismatch
from keyleasing.qreg import (
    apply_phase_flip,
    basis_state,
    measure_computational,
    states_equal,
)
from keyleasing.rng import random_bits, stream
from keyleasing.signed import SignedKey, ct_segment


def test_every_key_decrypts(params, rng):
    msk = skecrskl.setup(params, rng)
    m = random_bits(rng, params.message_bits)
    ct = skecrskl.enc(msk, m)
    for _ in range(3):
        dk, _, _ = skecrskl.kg(msk, rng)
        got, post = skecrskl.dec(dk, ct, rng)
        assert got == m
        assert states_equal(post.state, dk.state)


def test_keys_are_independent_signed_ciphertexts(params, rng):
    msk = skecrskl.setup(params, rng)
    first, vk1, _ = skecrskl.kg(msk, rng)
    second, vk2, _ = skecrskl.kg(msk, rng)
    assert first.layout == second.layout
    assert len(first.state) == 2 ** params.hadamard
    assert vk1.x != vk2.x


def test_classical_decryption_of_measured_strings(params, rng):
    msk = skecrskl.setup(params, rng)
    m = random_bits(rng, params.message_bits)
    ct = skecrskl.enc(msk, m)
    dk, _, tk = skecrskl.kg(msk, rng)
    outcome, _ = measure_computational(dk.state, dk.layout.names, rng)
    assert skecrskl.cdec(outcome.bits, ct) == m
    assert skecrskl.keytest(tk, outcome.bits) == 1
    assert skecrskl.cdec(outcome.bits[3:], ct) is None
    assert skecrskl.cdec(Bits.zeros(outcome.bits.width), ct) is None


def test_message_width_is_checked(params, rng):
    msk = skecrskl.setup(params, rng)
    with pytest.raises(WidthMismatch):
        skecrskl.enc(msk, Bits.zeros(params.message_bits + 1))


def test_honest_return_verifies(params):
    for trial in range(10):
        rng = stream(trial, "skecrskl-verify")
        msk = skecrskl.setup(params, rng)
        dk, vk, tk = skecrskl.kg(msk, rng)
        bit, dk = skecrskl.keytest_coherent(tk, dk, rng)
        assert bit == 1
        assert skecrskl.vrfy(vk, dk, rng)


def test_key_from_another_setup_does_not_fit(params, rng):
    msk = skecrskl.setup(params, rng)
    other = skecrskl.setup(SchemeParams(lam=16, hadamard=2, positions=4), rng)
    dk, _, _ = skecrskl.kg(other, rng)
    with pytest.raises(LayoutError):
        skecrskl.dec(dk, skecrskl.enc(msk, Bits.zeros(params.message_bits)), rng)


def test_collapsed_key_rarely_verifies(params, rng):
    msk = skecrskl.setup(params, rng)
    dk, vk, _ = skecrskl.kg(msk, rng)
    trials = 400
    passed = 0
    for _ in range(trials):
        outcome, _ = measure_computational(dk.state, dk.layout.names, rng)
        collapsed = SignedKey(basis_state(dk.layout, outcome.bits), dk.sig_width)
        passed += skecrskl.vrfy(vk, collapsed, rng)
    # each Hadamard block of a basis state passes its parity check half the time
    assert passed / trials <= 2 ** -params.hadamard + 0.06


def test_phase_flipped_block_never_verifies(params, rng):
    msk = skecrskl.setup(params, rng)
    for _ in range(20):
        dk, vk, _ = skecrskl.kg(msk, rng)
        position = vk.theta.positions(1)[0]
        flipped = apply_phase_flip(
            dk.state, ct_segment(position + 1), lambda u: u.value
        )
        assert not skecrskl.vrfy(vk, SignedKey(flipped, dk.sig_width), rng)
