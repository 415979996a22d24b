# -*- coding: utf-8 -*-
import pytest

from keyleasing.adversaries import (
    ADVERSARIES,
    Adversary,
    AdversaryView,
    BitFlipForger,
    HonestAdversary,
    MeasureAndCopyAdversary,
    rebuild_block,
)
from keyleasing.bits import Bits
from keyleasing.config import AdversaryName, SchemeName, SchemeParams
from keyleasing.exceptions import GameError
from keyleasing.qreg import (
    RegisterLayout,
    add_register,
    apply_xor_oracle,
    basis_state,
    prepare_bb84,
    states_equal,
)
from keyleasing.rng import stream
from keyleasing.schemes import IssuedKey, make_scheme
from keyleasing.signed import ct_substring
from keyleasing import skecrskl, strawman


def test_every_adversary_name_has_a_class():
    assert set(ADVERSARIES) == set(AdversaryName)


def test_unbound_adversary_has_no_scheme():
    adversary = HonestAdversary(stream(1, "adversary"))
    with pytest.raises(GameError):
        adversary.scheme
    with pytest.raises(GameError):
        adversary.forge([])


def test_view_without_oracle_refuses_encryption():
    view = AdversaryView(8)
    with pytest.raises(GameError):
        view.encrypt(Bits.zeros(8))
    assert AdversaryView(8, encryptor=lambda m, t: m ^ Bits.ones(8)).encrypt(
        Bits.zeros(8)
    ) == Bits.ones(8)


def test_key_requests_use_distinct_attributes(params, rng):
    adversary = Adversary(stream(2, "adversary"))
    adversary.bind(AdversaryView(16, make_scheme(SchemeName.ABECR2SKL, params, rng)))
    requests = adversary.key_requests(8, None)
    assert len(set(requests)) == 8
    adversary.bind(AdversaryView(16, make_scheme(SchemeName.SKECRSKL, params, rng)))
    assert adversary.key_requests(3, None) == [None, None, None]


def test_rebuild_block_restores_the_superposition():
    sk0, sk1 = Bits(0b0110, 4), Bits(0b1001, 4)
    layout = RegisterLayout.of(("A", 2), (strawman.BRANCH, 1), (strawman.SECRET, 4))
    collapsed = basis_state(layout, Bits.from_str("10") + Bits.ones(1) + sk1)
    rebuilt = rebuild_block(collapsed, (strawman.BRANCH, strawman.SECRET), (sk0, sk1))
    assert rebuilt.layout == layout
    assert len(rebuilt) == 2
    assert rebuilt.amplitude(Bits.from_str("100") + sk0) == pytest.approx(2 ** -0.5)
    assert rebuilt.amplitude(Bits.from_str("101") + sk1) == pytest.approx(2 ** -0.5)


def test_rebuild_on_a_bare_block():
    pair = (Bits(2, 2), Bits(3, 2))
    layout = RegisterLayout.of((strawman.BRANCH, 1), (strawman.SECRET, 2))
    rebuilt = rebuild_block(
        basis_state(layout, "011"), (strawman.BRANCH, strawman.SECRET), pair
    )
    expected = prepare_bb84(Bits.zeros(1), Bits.ones(1), [strawman.BRANCH])
    expected = add_register(expected, strawman.SECRET, 2)
    expected = apply_xor_oracle(
        expected, strawman.BRANCH, strawman.SECRET, lambda b: pair[b.value]
    )
    assert states_equal(rebuilt, expected)


def test_colluder_rebuilds_the_strawman_key(params):
    for trial in range(10):
        rng = stream(trial, "colluder")
        scheme = make_scheme(SchemeName.STRAWMAN, params, rng)
        issued = []
        for index in range(6):
            key, vk, public = scheme.issue(rng)
            issued.append(IssuedKey(index, key, None, public))
        adversary = MeasureAndCopyAdversary(stream(trial, "adversary"))
        adversary.bind(AdversaryView(scheme.message_width, scheme))
        returned = adversary.on_keys(issued)
        seen = {bits[0] for _, _, bits in adversary.records}
        accepted = [scheme.check_return(vk, state, rng) for _, state in returned]
        assert all(accepted) == (seen == {0, 1})


def test_bit_flip_forgery_fails_the_key_test(params, rng):
    scheme = make_scheme(SchemeName.SKECRSKL, params, rng)
    dk, vk, public = scheme.issue(rng)
    forger = BitFlipForger(stream(3, "adversary"))
    forger.bind(AdversaryView(scheme.message_width, scheme, extras={"positions": 8}))
    with pytest.raises(GameError):
        forger.forge([IssuedKey(0, dk, None, public)])
    index, bits, m = forger.forge([IssuedKey(0, dk, None, {**public, "vk": vk})])
    assert index == 0
    assert bits.width == dk.layout.total_bits
    assert m.width == scheme.message_width
    assert skecrskl.keytest(public["tk"], bits) == 0
    ct = ct_substring(bits, dk.sig_width)
    flipped = [p for p in vk.theta.positions(0) if ct[p] != vk.x[p]]
    assert len(flipped) == 1
    assert flipped[0] < 8


def test_bit_flip_forgery_on_an_all_hadamard_key():
    rng = stream(4, "all-hadamard")
    params = SchemeParams(lam=16, hadamard=2, positions=2)
    scheme = make_scheme(SchemeName.SKECRSKL, params, rng)
    dk, vk, public = scheme.issue(rng)
    assert vk.theta[:2] == Bits.ones(2)
    forger = BitFlipForger(stream(5, "adversary"))
    forger.bind(AdversaryView(scheme.message_width, scheme, extras={"positions": 2}))
    _, bits, _ = forger.forge([IssuedKey(0, dk, None, {**public, "vk": vk})])
    assert skecrskl.keytest(public["tk"], bits) == 0
    ct = ct_substring(bits, dk.sig_width)
    flipped = [p for p in vk.theta.positions(0) if ct[p] != vk.x[p]]
    assert len(flipped) == 1
    assert flipped[0] >= 2
