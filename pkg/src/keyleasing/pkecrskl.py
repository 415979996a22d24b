"""
Public-key encryption with collusion-resistant secure key leasing

A leased key is an SKE-CR-SKL key register ``SKE.DK`` with an ABE key computed in
superposition next to it, ``|u⟩|0⟩ -> |u⟩|ABE.KG(msk, u, k)⟩``. Ciphertexts are
ABE ciphertexts under a simulated compute-and-compare program, whose relation lets every
attribute decrypt. Verification tests the key, uncomputes ``ABE.SK`` with the
explicit randomness ``k`` and hands the residual register to SKE-CR-SKL.
"""
from dataclasses import dataclass
from logging import getLogger
from typing import Callable, Optional, Tuple

from .bits import Bits
from .config import SchemeParams
from .custom_types import Relation
from .exceptions import LayoutError
from .functions import warn_once
from .prims import (
    AbeCiphertext,
    AbeMasterKey,
    AbePublicKey,
    CcObfuscation,
    CcParams,
    IdealBackendRegistry,
    abe_dec,
    abe_enc,
    abe_kg,
    abe_setup,
    cc_sim,
    circuit_outputs_bot,
)
from .qreg import (
    RegisterLayout,
    SparseState,
    add_register,
    apply_xor_oracle,
    measure_computational,
    measure_function,
)
from .rng import RandomStream, random_bits, substream
from .signed import (
    ABE_SK,
    attach_abe_layer,
    signed_layout,
    strip_abe_layer,
)
from . import skecrskl

logger = getLogger(f"{__package__}.{__name__}")

ABE_Y = "ABE.Y"
ABE_B = "B"


@dataclass(frozen=True)
class PkeEk:
    abe_pk: AbePublicKey
    dk_width: int
    msg_width: int

    @property
    def registry(self) -> IdealBackendRegistry:
        return self.abe_pk.registry


@dataclass(frozen=True)
class PkeMsk:
    abe_msk: AbeMasterKey
    ske_msk: skecrskl.CrSklMsk

    @property
    def ske_layout(self) -> RegisterLayout:
        return signed_layout(self.ske_msk.ct_width, self.ske_msk.owf.input_bits)


@dataclass(frozen=True)
class PkeDk:
    """Registers ``SKE.DK`` (the signed key segments) and ``ABE.SK``"""

    state: SparseState
    ske_layout: RegisterLayout

    @property
    def ske_names(self) -> Tuple[str, ...]:
        return self.ske_layout.names


@dataclass(frozen=True)
class PkeVk:
    abe_msk: AbeMasterKey
    ske_vk: skecrskl.CrSklVk
    ske_tk: skecrskl.CrSklTk
    k: Bits


@dataclass(frozen=True)
class PkeCt:
    abe_ct: AbeCiphertext
    policy: CcObfuscation
    msg_width: int


def setup(
    params: SchemeParams,
    rng: RandomStream,
    registry: Optional[IdealBackendRegistry] = None,
) -> Tuple[PkeEk, PkeMsk]:
    registry = registry or IdealBackendRegistry(params.lam, substream(rng, "registry"))
    ske_msk = skecrskl.setup(params, rng)
    layout = signed_layout(ske_msk.ct_width, ske_msk.owf.input_bits)
    abe_pk, abe_msk = abe_setup(
        registry,
        circuit_outputs_bot,
        attr_width=layout.total_bits,
        rand_width=params.lam,
        msg_width=params.message_bits,
    )
    logger.debug(f"PKE-CR-SKL setup, SKE.DK has {layout.total_bits} bits")
    return (
        PkeEk(abe_pk, layout.total_bits, params.message_bits),
        PkeMsk(abe_msk, ske_msk),
    )


def _token_oracle(abe_msk: AbeMasterKey, k: Bits) -> Callable[[Bits], Bits]:
    return lambda u: abe_kg(abe_msk, u, k)


def kg(msk: PkeMsk, rng: RandomStream) -> Tuple[PkeDk, PkeVk]:
    ske_dk, ske_vk, ske_tk = skecrskl.kg(msk.ske_msk, rng)
    k = random_bits(rng, msk.ske_msk.skecd_sk.params.lam)
    state = attach_abe_layer(
        ske_dk, msk.abe_msk.token_width, _token_oracle(msk.abe_msk, k)
    )
    return PkeDk(state, ske_dk.layout), PkeVk(msk.abe_msk, ske_vk, ske_tk, k)


def enc(ek: PkeEk, m: Bits, rng: RandomStream) -> PkeCt:
    policy = cc_sim(ek.registry, CcParams(ek.dk_width, ek.registry.lam), 1)
    return PkeCt(abe_enc(ek.abe_pk, policy, m), policy, ek.msg_width)


def dec(dk: PkeDk, ct: PkeCt, rng: RandomStream) -> Tuple[Optional[Bits], PkeDk]:
    m, post = measure_function(
        dk.state, ABE_SK, lambda v: abe_dec(v, ct.abe_ct), ct.msg_width, rng
    )
    return m, PkeDk(post, dk.ske_layout)


def uncompute_abe_register(vk: PkeVk, dk: PkeDk) -> SparseState:
    """Apply the key-generation map again; honest keys end with ABE.SK = 0"""
    return apply_xor_oracle(
        dk.state, dk.ske_names, ABE_SK, _token_oracle(vk.abe_msk, vk.k)
    )


def vrfy(vk: PkeVk, dk: PkeDk, rng: RandomStream) -> bool:
    """
    Key test, uncompute ABE.SK, trace it out, verify the residual SKE key

    A returned key with the wrong layout is answered with ⊥.
    """
    layout = signed_layout(vk.ske_tk.ct_width, vk.ske_vk.sig_width)
    try:
        residual = strip_abe_layer(
            dk.state, layout, vk.ske_tk, _token_oracle(vk.abe_msk, vk.k), rng
        )
    except LayoutError as e:
        warn_once(logger, f"Rejected returned PKE key: {e}")
        return False
    if residual is None:
        return False
    return skecrskl.vrfy(vk.ske_vk, residual, rng)


def quantum_kg_oracle(
    msk: AbeMasterKey,
    relation: Relation,
    target: object,
    query: SparseState,
    r: Bits,
    rng: RandomStream,
) -> Optional[SparseState]:
    """
    ABE key generation on a superposition of attributes in register ``ABE.Y``

    Computes R(x*, y) into ``B`` and measures it. On 0 the query is refused with ⊥,
    otherwise ``ABE.KG(msk, y, r)`` is XOR-ed into a fresh ``ABE.SK``.
    """
    state = add_register(query, ABE_B, 1)
    state = apply_xor_oracle(
        state, ABE_Y, ABE_B, lambda y: Bits(relation(target, y) & 1, 1)
    )
    outcome, state = measure_computational(state, ABE_B, rng)
    if outcome.bits.value == 0:
        logger.warning("Quantum key query includes attributes that decrypt the target")
        return None
    state = add_register(state, ABE_SK, msk.token_width)
    return apply_xor_oracle(state, ABE_Y, ABE_SK, lambda y: abe_kg(msk, y, r))


def proof_circuit_d(ct: skecrskl.CrSklCt) -> Callable[[Bits], Bits]:
    """
    D(x) = SKE-CR-SKL.CDec(x, ct), the compute-and-compare program input

    ⊥ is mapped to the all-zero string of the message width.
    """

    def circuit_d(x: Bits) -> Bits:
        m = skecrskl.cdec(x, ct)
        return m if m is not None else Bits.zeros(ct.z.width)

    return circuit_d

