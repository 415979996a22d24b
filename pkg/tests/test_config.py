# -*- coding: utf-8 -*-
import pytest

from keyleasing.config import (
    DEFAULT_ADVERSARY,
    SUPPORTED_ADVERSARIES,
    SUPPORTED_GAMES,
    AdversaryName,
    GameName,
    RunConfig,
    SchemeName,
    SchemeParams,
)
from keyleasing.exceptions import ConfigurationError


def test_derived_widths():
    params = SchemeParams(lam=16, hadamard=3)
    assert params.n == 6
    assert params.message_bits == 16
    assert params.owf_bits == 16
    assert params.owf().input_bits == 16
    assert params.skecd(msg_width=4).msg_width == 4
    assert params.describe() == {
        "lambda": 16,
        "h": 3,
        "n": 6,
        "msg_width": 16,
        "owf_width": 16,
        "attr_width": 3,
    }


@pytest.mark.parametrize(
    "params",
    [
        SchemeParams(lam=0),
        SchemeParams(hadamard=-1),
        SchemeParams(hadamard=21),
        SchemeParams(hadamard=5, positions=4),
        SchemeParams(hadamard=4, term_cap=16),
        SchemeParams(lam=16, hadamard=2, attr_width=0),
    ],
)
def test_invalid_params(params):
    with pytest.raises(ConfigurationError):
        params.validate(keys=2)


def test_term_cap_counts_every_key():
    params = SchemeParams(lam=16, hadamard=3, term_cap=16)
    assert params.validate(keys=2) is params
    with pytest.raises(ConfigurationError):
        params.validate(keys=3)


def test_every_game_has_a_default_adversary():
    for game in GameName:
        assert DEFAULT_ADVERSARY[game] in SUPPORTED_ADVERSARIES[game]
        assert SUPPORTED_GAMES[game]


def test_key_test_game_only_for_the_secret_key_scheme():
    assert SUPPORTED_GAMES[GameName.KEY_TEST] == {SchemeName.SKECRSKL}


@pytest.mark.parametrize(
    "config",
    [
        RunConfig(SchemeName.SKECD, GameName.COLLUSION_DEMO),
        RunConfig(SchemeName.SKECRSKL, GameName.IND_CD),
        RunConfig(
            SchemeName.SKECRSKL, GameName.OT_IND_KLA, adversary=AdversaryName.KEEP_COPY
        ),
        RunConfig(SchemeName.SKECRSKL, keys=0),
        RunConfig(SchemeName.SKECRSKL, trials=0),
        RunConfig(SchemeName.SKECRSKL, threads=0),
        RunConfig(SchemeName.ABECR2SKL, slots=4),
    ],
)
def test_invalid_runs(config):
    with pytest.raises(ConfigurationError):
        config.validate()


def test_certificate_scheme_takes_positions_from_slots():
    config = RunConfig(SchemeName.ABECR2SKL, params=SchemeParams(lam=16), slots=10)
    assert config.scheme_params().n == 10
    assert RunConfig(SchemeName.PKECRSKL).scheme_params().n == 16
    assert config.effective_adversary is AdversaryName.HONEST
    assert config.validate() is config
