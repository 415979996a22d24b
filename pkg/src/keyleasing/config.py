"""
Scheme and run parameters
"""
from dataclasses import asdict, dataclass, field
from enum import Enum
from logging import getLogger
from pathlib import Path
from typing import Dict, Optional

from .exceptions import ConfigurationError
from .prims import Owf
from .qreg import DEFAULT_HADAMARD_CAP, DEFAULT_RANK_LIMIT, DEFAULT_TERM_CAP
from .skecd import SkecdParams

logger = getLogger(f"{__package__}.{__name__}")


@dataclass(frozen=True)
class SchemeParams:
    lam: int = 128
    hadamard: int = 8
    positions: Optional[int] = None
    msg_width: Optional[int] = None
    owf_width: Optional[int] = None
    attr_width: int = 3
    term_cap: int = DEFAULT_TERM_CAP
    rank_limit: int = DEFAULT_RANK_LIMIT

    @property
    def n(self) -> int:
        """Quantum positions of an SKECD ciphertext"""
        if self.positions is not None:
            return self.positions
        return max(2 * self.hadamard, 1)

    @property
    def message_bits(self) -> int:
        return self.msg_width if self.msg_width is not None else self.lam

    @property
    def owf_bits(self) -> int:
        return self.owf_width if self.owf_width is not None else self.lam

    def owf(self) -> Owf:
        return Owf(self.lam, self.owf_bits)

    def skecd(self, msg_width: Optional[int] = None) -> SkecdParams:
        return SkecdParams(
            lam=self.lam,
            positions=self.n,
            hadamard=self.hadamard,
            msg_width=msg_width if msg_width is not None else self.message_bits,
            term_cap=self.term_cap,
        )

    def validate(self, keys: int = 1) -> "SchemeParams":
        """
        Raises:
            ConfigurationError: on parameters the simulator cannot honour
        """
        if self.lam < 1:
            raise ConfigurationError(f"λ must be positive, got {self.lam}")
        if self.hadamard < 0:
            raise ConfigurationError(f"Negative Hadamard weight {self.hadamard}")
        if self.hadamard > min(self.rank_limit, DEFAULT_HADAMARD_CAP):
            raise ConfigurationError(
                f"Hadamard weight {self.hadamard} exceeds the rank limit "
                f"{min(self.rank_limit, DEFAULT_HADAMARD_CAP)}"
            )
        if self.hadamard > self.n:
            raise ConfigurationError(
                f"Hadamard weight {self.hadamard} exceeds the {self.n} positions"
            )
        if (2 ** self.hadamard) * max(keys, 1) > self.term_cap:
            raise ConfigurationError(
                f"2^{self.hadamard} terms for {keys} keys exceed the term cap "
                f"{self.term_cap}"
            )
        if min(self.message_bits, self.owf_bits, self.attr_width) < 1:
            raise ConfigurationError("Message, OWF and attribute widths must be ≥ 1")
        return self

    def describe(self) -> Dict[str, int]:
        return {
            "lambda": self.lam,
            "h": self.hadamard,
            "n": self.n,
            "msg_width": self.message_bits,
            "owf_width": self.owf_bits,
            "attr_width": self.attr_width,
        }


class _ValueEnum(str, Enum):
    def __str__(self) -> str:
        return self.value


class SchemeName(_ValueEnum):
    SKECD = "skecd"
    SKECRSKL = "skecrskl"
    PKECRSKL = "pkecrskl"
    SKFECRSKL = "skfecrskl"
    ABECRSKL = "abecrskl"
    ABECR2SKL = "abecr2skl"
    STRAWMAN = "strawman"


class GameName(_ValueEnum):
    ROUNDTRIP = "roundtrip"
    OT_IND_KLA = "ot-ind-kla"
    IND_KLA = "ind-kla"
    KEY_TEST = "key-test"
    IND_CVA_CD = "ind-cva-cd"
    IND_CD = "ind-cd"
    COLLUSION_DEMO = "collusion-demo"


class AdversaryName(_ValueEnum):
    HONEST = "honest"
    COLLUDER = "colluder"
    NEVER = "never"
    BITFLIP = "bitflip"
    RANDOM = "random"
    KEEP_COPY = "keep-copy"
    NO_DELETE = "no-delete"


SUPPORTED_GAMES = {
    GameName.ROUNDTRIP: set(SchemeName),
    GameName.OT_IND_KLA: {SchemeName.SKECRSKL},
    GameName.IND_KLA: {
        SchemeName.PKECRSKL,
        SchemeName.ABECRSKL,
        SchemeName.ABECR2SKL,
        SchemeName.STRAWMAN,
    },
    GameName.KEY_TEST: {SchemeName.SKECRSKL},
    GameName.IND_CVA_CD: {SchemeName.SKECD},
    GameName.IND_CD: {SchemeName.SKECD},
    GameName.COLLUSION_DEMO: {
        SchemeName.STRAWMAN,
        SchemeName.SKECRSKL,
        SchemeName.PKECRSKL,
        SchemeName.ABECRSKL,
        SchemeName.ABECR2SKL,
    },
}

SUPPORTED_ADVERSARIES = {
    GameName.ROUNDTRIP: {AdversaryName.HONEST},
    GameName.OT_IND_KLA: {
        AdversaryName.HONEST,
        AdversaryName.COLLUDER,
        AdversaryName.NEVER,
    },
    GameName.IND_KLA: {
        AdversaryName.HONEST,
        AdversaryName.COLLUDER,
        AdversaryName.NEVER,
    },
    GameName.KEY_TEST: {
        AdversaryName.HONEST,
        AdversaryName.BITFLIP,
        AdversaryName.RANDOM,
    },
    GameName.IND_CVA_CD: {
        AdversaryName.HONEST,
        AdversaryName.KEEP_COPY,
        AdversaryName.NO_DELETE,
    },
    GameName.IND_CD: {
        AdversaryName.HONEST,
        AdversaryName.KEEP_COPY,
        AdversaryName.NO_DELETE,
    },
    GameName.COLLUSION_DEMO: {AdversaryName.COLLUDER},
}

DEFAULT_ADVERSARY = {
    GameName.ROUNDTRIP: AdversaryName.HONEST,
    GameName.OT_IND_KLA: AdversaryName.HONEST,
    GameName.IND_KLA: AdversaryName.HONEST,
    GameName.KEY_TEST: AdversaryName.BITFLIP,
    GameName.IND_CVA_CD: AdversaryName.HONEST,
    GameName.IND_CD: AdversaryName.HONEST,
    GameName.COLLUSION_DEMO: AdversaryName.COLLUDER,
}


@dataclass(frozen=True)
class RunConfig:
    scheme: SchemeName
    game: GameName = GameName.ROUNDTRIP
    adversary: Optional[AdversaryName] = None
    params: SchemeParams = field(default_factory=SchemeParams)
    keys: int = 2
    slots: int = 16
    trials: int = 1000
    seed: int = 0
    threads: int = 1
    json_out: Optional[Path] = None

    @property
    def effective_adversary(self) -> AdversaryName:
        return self.adversary or DEFAULT_ADVERSARY[self.game]

    def validate(self) -> "RunConfig":
        """
        Raises:
            ConfigurationError: unsupported combination or out of range value
        """
        self.params.validate(self.keys)
        if self.scheme not in SUPPORTED_GAMES[self.game]:
            raise ConfigurationError(
                f"Game '{self.game.value}' is not defined for scheme "
                f"'{self.scheme.value}'"
            )
        if self.effective_adversary not in SUPPORTED_ADVERSARIES[self.game]:
            raise ConfigurationError(
                f"Adversary '{self.effective_adversary.value}' does not play "
                f"'{self.game.value}'"
            )
        if self.keys < 1:
            raise ConfigurationError(f"At least one key is needed, got {self.keys}")
        if self.trials < 1:
            raise ConfigurationError(f"Need at least one trial, got {self.trials}")
        if self.threads < 1:
            raise ConfigurationError(f"Need at least one thread, got {self.threads}")
        if self.slots < max(self.params.hadamard, 1):
            raise ConfigurationError(
                f"{self.slots} slots cannot hold {self.params.hadamard} Hadamard "
                f"positions"
            )
        return self

    def scheme_params(self) -> SchemeParams:
        """The parameters the selected scheme runs with; cr2 takes n from slots"""
        if self.scheme is SchemeName.ABECR2SKL:
            return SchemeParams(**{**asdict(self.params), "positions": self.slots})
        return self.params
