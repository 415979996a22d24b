"""
Single-key leasing strawman

Two PKE key pairs; the leased key is ``(|0⟩|sk_0⟩ + |1⟩|sk_1⟩)/√2`` and a
message is encrypted under both public keys. Verification compares the returned
state with the expected one. Every copy of the key is the same state, so measuring
copies until both branches were seen lets an attacker rebuild it exactly.
"""
from dataclasses import dataclass
from logging import getLogger
from typing import Any, Optional, Tuple

from .bits import Bits
from .config import SchemeParams
from .exceptions import LayoutError
from .functions import warn_once
from .prims import (
    AbeCiphertext,
    AbePublicKey,
    IdealBackendRegistry,
    abe_dec,
    abe_enc,
    abe_kg,
    abe_setup,
)
from .qreg import (
    NORM_TOLERANCE,
    SparseState,
    add_register,
    apply_xor_oracle,
    measure_function,
    prepare_bb84,
    states_equal,
)
from .rng import RandomStream, random_bits, substream

logger = getLogger(f"{__package__}.{__name__}")

BRANCH = "B"
SECRET = "SK"
# every key attribute decrypts, so the ideal ABE backend acts as plain PKE
NO_ATTRIBUTE = Bits.zeros(1)


def _always_decryptable(x: Any, y: Bits) -> int:
    return 0


@dataclass(frozen=True)
class StrawmanPk:
    pk0: AbePublicKey
    pk1: AbePublicKey
    msg_width: int

    def branch(self, b: int) -> AbePublicKey:
        return self.pk1 if b else self.pk0


@dataclass(frozen=True)
class StrawmanMsk:
    sk0: Bits
    sk1: Bits


@dataclass(frozen=True)
class StrawmanKey:
    state: SparseState


@dataclass(frozen=True)
class StrawmanVk:
    expected: SparseState


@dataclass(frozen=True)
class StrawmanCt:
    ct0: AbeCiphertext
    ct1: AbeCiphertext
    msg_width: int

    def branch(self, b: int) -> AbeCiphertext:
        return self.ct1 if b else self.ct0


def setup(
    params: SchemeParams,
    rng: RandomStream,
    registry: Optional[IdealBackendRegistry] = None,
) -> Tuple[StrawmanPk, StrawmanMsk]:
    registry = registry or IdealBackendRegistry(params.lam, substream(rng, "registry"))
    keys = []
    for _ in range(2):
        pk, msk = abe_setup(
            registry,
            _always_decryptable,
            attr_width=NO_ATTRIBUTE.width,
            rand_width=params.lam,
            msg_width=params.message_bits,
        )
        keys.append((pk, abe_kg(msk, NO_ATTRIBUTE, random_bits(rng, params.lam))))
    (pk0, sk0), (pk1, sk1) = keys
    return StrawmanPk(pk0, pk1, params.message_bits), StrawmanMsk(sk0, sk1)


def kg(msk: StrawmanMsk, rng: RandomStream) -> Tuple[StrawmanKey, StrawmanVk]:
    """Every call hands out another copy of the same state"""
    state = prepare_bb84(Bits.zeros(1), Bits.ones(1), [BRANCH])
    state = add_register(state, SECRET, msk.sk0.width)
    state = apply_xor_oracle(
        state, BRANCH, SECRET, lambda b: msk.sk1 if b.value else msk.sk0
    )
    return StrawmanKey(state), StrawmanVk(state)


def enc(pk: StrawmanPk, m: Bits) -> StrawmanCt:
    return StrawmanCt(
        abe_enc(pk.pk0, NO_ATTRIBUTE, m), abe_enc(pk.pk1, NO_ATTRIBUTE, m), pk.msg_width
    )


def cdec(b: int, sk: Bits, ct: StrawmanCt) -> Optional[Bits]:
    return abe_dec(sk, ct.branch(b))


def dec(
    key: StrawmanKey, ct: StrawmanCt, rng: RandomStream
) -> Tuple[Optional[Bits], StrawmanKey]:
    token_width = key.state.layout.width(SECRET)

    def branch_decrypt(bits: Bits) -> Optional[Bits]:
        b, sk = bits.split([1, token_width])
        return cdec(b.value, sk, ct)

    m, post = measure_function(
        key.state, [BRANCH, SECRET], branch_decrypt, ct.msg_width, rng
    )
    return m, StrawmanKey(post)


def vrfy(vk: StrawmanVk, state: SparseState) -> bool:
    """Is the returned state the leased one, up to global phase"""
    try:
        return states_equal(vk.expected, state, NORM_TOLERANCE)
    except LayoutError as e:
        warn_once(logger, f"Rejected returned strawman key: {e}")
        return False
