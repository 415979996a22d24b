"""
Functional and attribute-based encryption with collusion-resistant key leasing

SKFE-CR-SKL signs an SKECD ciphertext of an SKFE key token exactly like SKE-CR-SKL
signs its mask. ABE-CR-SKL layers an ABE key for ``y ∥ u`` over every string u of an
SKFE-CR-SKL key register, under the relation

    R'((x, C), y ∥ u) = 0  iff  R(x, y) = 0 and C(u) = ⊥

and encrypts under a simulated compute-and-compare program C, so exactly the keys
whose attribute satisfies the policy decrypt.
"""
from dataclasses import dataclass
from logging import getLogger
from typing import Any, Callable, Optional, Tuple

from .bits import Bits
from .config import SchemeParams
from .exceptions import LayoutError
from .functions import warn_once
from .prims import (
    AbeCiphertext,
    AbeMasterKey,
    AbePublicKey,
    CcObfuscation,
    CcParams,
    IdealBackendRegistry,
    Owf,
    PredicatePolicy,
    SkfeCiphertext,
    SkfeMasterKey,
    abe_dec,
    abe_enc,
    abe_kg,
    abe_setup,
    cc_eval,
    cc_sim,
    predicate_relation,
    skfe_dec,
    skfe_enc,
    skfe_kg,
    skfe_setup,
)
from .qreg import RegisterLayout, SparseState, apply_xor_oracle, measure_function
from .rng import RandomStream, random_bits, substream
from .signed import (
    ABE_SK,
    SignedKey,
    SignedTk,
    SignedVk,
    attach_abe_layer,
    ct_substring,
    decrypt_signed,
    issue_signed_key,
    key_test,
    key_test_coherent,
    signed_layout,
    strip_abe_layer,
    verify_signed,
)
from . import skecd

logger = getLogger(f"{__package__}.{__name__}")

Functionality = Callable[[Any, Bits], Optional[Bits]]

SkfeSklKey = SignedKey
SkfeSklVk = SignedVk
SkfeSklTk = SignedTk


@dataclass(frozen=True)
class SkfeSklMsk:
    skecd_sk: skecd.SkecdSecretKey
    skfe_msk: SkfeMasterKey
    owf: Owf

    @property
    def layout(self) -> RegisterLayout:
        return signed_layout(self.skecd_sk.params.ct_width, self.owf.input_bits)


@dataclass(frozen=True)
class SkfeSklCt:
    skecd_sk: skecd.SkecdSecretKey
    skfe_ct: SkfeCiphertext
    out_width: int


def skfe_skl_setup(
    params: SchemeParams,
    functionality: Functionality,
    attr_width: int,
    out_width: int,
    rng: RandomStream,
    registry: Optional[IdealBackendRegistry] = None,
) -> SkfeSklMsk:
    registry = registry or IdealBackendRegistry(params.lam, substream(rng, "registry"))
    skfe_msk = skfe_setup(registry, functionality, attr_width, out_width)
    # the BB84 payload is the SKFE key token
    skecd_sk = skecd.kg(params.skecd(msg_width=skfe_msk.token_width), rng)
    logger.debug(f"SKFE-CR-SKL setup, token width {skfe_msk.token_width}")
    return SkfeSklMsk(skecd_sk, skfe_msk, params.owf())


def skfe_skl_kg(
    msk: SkfeSklMsk, y: Bits, rng: RandomStream
) -> Tuple[SkfeSklKey, SkfeSklVk, SkfeSklTk]:
    token = skfe_kg(msk.skfe_msk, y)
    return issue_signed_key(msk.skecd_sk, token, msk.owf, rng)


def skfe_skl_enc(msk: SkfeSklMsk, x: Any) -> SkfeSklCt:
    return SkfeSklCt(msk.skecd_sk, skfe_enc(msk.skfe_msk, x), msk.skfe_msk.out_width)


def _skfe_cdec_ct(u: Bits, ct: SkfeSklCt) -> Optional[Bits]:
    token = skecd.cdec(ct.skecd_sk, u)
    if token is None:
        return None
    return skfe_dec(token, ct.skfe_ct)


def skfe_skl_cdec(dk_bits: Bits, ct: SkfeSklCt) -> Optional[Bits]:
    try:
        u = ct_substring(dk_bits, ct.skecd_sk.params.lam)
    except LayoutError:
        return None
    if u.width != ct.skecd_sk.params.ct_width:
        return None
    return _skfe_cdec_ct(u, ct)


def skfe_skl_dec(
    key: SkfeSklKey, ct: SkfeSklCt, rng: RandomStream
) -> Tuple[Optional[Bits], SkfeSklKey]:
    """Outputs F(x, y), ⊥ when the functionality does"""
    return decrypt_signed(key, lambda u: _skfe_cdec_ct(u, ct), ct.out_width, rng)


def skfe_skl_vrfy(vk: SkfeSklVk, key: SkfeSklKey, rng: RandomStream) -> bool:
    return verify_signed(vk, key.state, rng)


def skfe_skl_keytest(tk: SkfeSklTk, dk_bits: Bits) -> int:
    return key_test(tk, dk_bits)


def skfe_skl_keytest_coherent(
    tk: SkfeSklTk, key: SkfeSklKey, rng: RandomStream
) -> Tuple[int, SkfeSklKey]:
    return key_test_coherent(tk, key, rng)


# ABE-CR-SKL


def abe_skl_functionality(
    attribute: Tuple[PredicatePolicy, Bits], y: Bits
) -> Optional[Bits]:
    """F((x, z), y) = z if R(x, y) = 0, else ⊥"""
    policy, z = attribute
    return z if predicate_relation(policy, y) == 0 else None


@dataclass(frozen=True)
class AbeSklPk:
    abe_pk: AbePublicKey
    key_bits: int
    msg_width: int

    @property
    def registry(self) -> IdealBackendRegistry:
        return self.abe_pk.registry


@dataclass(frozen=True)
class AbeSklMsk:
    abe_msk: AbeMasterKey
    skfe: SkfeSklMsk
    attr_width: int


@dataclass(frozen=True)
class AbeSklKey:
    """Registers ``SKFE.SK`` (signed key segments) and ``ABE.SK``"""

    state: SparseState
    skfe_layout: RegisterLayout
    y: Bits


@dataclass(frozen=True)
class AbeSklVk:
    y: Bits
    abe_msk: AbeMasterKey
    skfe_vk: SkfeSklVk
    skfe_tk: SkfeSklTk
    k: Bits


@dataclass(frozen=True)
class AbeSklCt:
    abe_ct: AbeCiphertext
    policy: PredicatePolicy
    circuit: CcObfuscation
    msg_width: int


def _layered_relation(attr_width: int) -> Callable[[Any, Bits], int]:
    def relation(attribute: Tuple[PredicatePolicy, CcObfuscation], key: Bits) -> int:
        policy, circuit = attribute
        y, u = key[:attr_width], key[attr_width:]
        if predicate_relation(policy, y) == 0 and cc_eval(circuit, u) is None:
            return 0
        return 1

    return relation


def abe_skl_setup(
    params: SchemeParams,
    rng: RandomStream,
    registry: Optional[IdealBackendRegistry] = None,
) -> Tuple[AbeSklPk, AbeSklMsk]:
    registry = registry or IdealBackendRegistry(params.lam, substream(rng, "registry"))
    skfe = skfe_skl_setup(
        params,
        abe_skl_functionality,
        params.attr_width,
        params.message_bits,
        rng,
        registry,
    )
    key_bits = skfe.layout.total_bits
    abe_pk, abe_msk = abe_setup(
        registry,
        _layered_relation(params.attr_width),
        attr_width=params.attr_width + key_bits,
        rand_width=params.lam,
        msg_width=params.message_bits,
    )
    logger.debug(f"ABE-CR-SKL setup, SKFE.SK has {key_bits} bits")
    return (
        AbeSklPk(abe_pk, key_bits, params.message_bits),
        AbeSklMsk(abe_msk, skfe, params.attr_width),
    )


def _token_oracle(abe_msk: AbeMasterKey, y: Bits, k: Bits) -> Callable[[Bits], Bits]:
    return lambda u: abe_kg(abe_msk, y + u, k)


def abe_skl_kg(
    msk: AbeSklMsk, y: Bits, rng: RandomStream
) -> Tuple[AbeSklKey, AbeSklVk]:
    skfe_key, skfe_vk, skfe_tk = skfe_skl_kg(msk.skfe, y, rng)
    k = random_bits(rng, msk.skfe.skecd_sk.params.lam)
    state = attach_abe_layer(
        skfe_key, msk.abe_msk.token_width, _token_oracle(msk.abe_msk, y, k)
    )
    return (
        AbeSklKey(state, skfe_key.layout, y),
        AbeSklVk(y, msk.abe_msk, skfe_vk, skfe_tk, k),
    )


def abe_skl_enc(pk: AbeSklPk, x: PredicatePolicy, m: Bits) -> AbeSklCt:
    circuit = cc_sim(pk.registry, CcParams(pk.key_bits, pk.registry.lam), 1)
    return AbeSklCt(abe_enc(pk.abe_pk, (x, circuit), m), x, circuit, pk.msg_width)


def abe_skl_dec(
    key: AbeSklKey, ct: AbeSklCt, rng: RandomStream
) -> Tuple[Optional[Bits], AbeSklKey]:
    m, post = measure_function(
        key.state, ABE_SK, lambda v: abe_dec(v, ct.abe_ct), ct.msg_width, rng
    )
    return m, AbeSklKey(post, key.skfe_layout, key.y)


def abe_skl_vrfy(vk: AbeSklVk, key: AbeSklKey, rng: RandomStream) -> bool:
    layout = signed_layout(vk.skfe_tk.ct_width, vk.skfe_vk.sig_width)
    try:
        residual = strip_abe_layer(
            key.state, layout, vk.skfe_tk, _token_oracle(vk.abe_msk, vk.y, vk.k), rng
        )
    except LayoutError as e:
        warn_once(logger, f"Rejected returned ABE key: {e}")
        return False
    if residual is None:
        return False
    return skfe_skl_vrfy(vk.skfe_vk, residual, rng)


def abe_skl_uncompute(vk: AbeSklVk, key: AbeSklKey) -> SparseState:
    return apply_xor_oracle(
        key.state, key.skfe_layout.names, ABE_SK, _token_oracle(vk.abe_msk, vk.y, vk.k)
    )
