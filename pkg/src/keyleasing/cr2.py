"""
Attribute-based encryption with collusion-resistant key leasing and classical
deletion certificates

A key holds one MI-ABE slot key per position i of an SKECD ciphertext of 0^λ. Slot i
has tokens for the attributes ``t ∥ 0`` and ``t ∥ 1`` (slot 1 also carries the key
attribute y), chosen coherently by the ciphertext bit at position i. Decryption runs
MI-ABE over all k slot registers; the relation rejects mixed tags t and otherwise
asks that the simulated program outputs ⊥ on the position bits and that the policy
accepts y. Deletion Hadamard-measures every block into a classical certificate.
"""
import json
from dataclasses import dataclass
from logging import getLogger
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .bits import Bits
from .config import SchemeParams
from .exceptions import WidthMismatch
from .prims import (
    CcObfuscation,
    CcParams,
    IdealBackendRegistry,
    MiAbeCiphertext,
    MiAbeMasterKey,
    MiAbePublicKey,
    PredicatePolicy,
    cc_eval,
    cc_sim,
    miabe_dec,
    miabe_enc,
    miabe_kg,
    miabe_setup,
    predicate_relation,
)
from .qreg import (
    RegisterLayout,
    SparseState,
    apply_xor_oracles,
    basis_state,
    measure_function,
    measure_hadamard,
    reorder,
    tensor,
)
from .rng import RandomStream, random_bits, substream
from . import skecd

logger = getLogger(f"{__package__}.{__name__}")

CT_PREFIX = "SKECD.CT"
SK_PREFIX = "ABE.SK"


def ct_segment(i: int) -> str:
    return f"{CT_PREFIX}_{i}"


def sk_segment(i: int) -> str:
    return f"{SK_PREFIX}_{i}"


@dataclass(frozen=True)
class Cr2Ek:
    miabe_pk: MiAbePublicKey
    slots: int
    msg_width: int

    @property
    def registry(self) -> IdealBackendRegistry:
        return self.miabe_pk.registry


@dataclass(frozen=True)
class Cr2Msk:
    miabe_msk: MiAbeMasterKey
    skecd_sk: skecd.SkecdSecretKey
    attr_width: int

    @property
    def slots(self) -> int:
        return self.skecd_sk.params.ct_width

    @property
    def token_widths(self) -> Tuple[int, ...]:
        return tuple(
            self.miabe_msk.token_width(i) for i in range(1, self.slots + 1)
        )

    @property
    def layout(self) -> RegisterLayout:
        return key_layout(self.token_widths)


def key_layout(token_widths: Sequence[int]) -> RegisterLayout:
    segments = []
    for i, width in enumerate(token_widths, start=1):
        segments += [(ct_segment(i), 1), (sk_segment(i), width)]
    return RegisterLayout(tuple(segments))


@dataclass(frozen=True)
class Cr2Key:
    state: SparseState
    y: Bits
    tag: Bits

    @property
    def slots(self) -> int:
        return len(self.state.layout) // 2

    @property
    def layout(self) -> RegisterLayout:
        return self.state.layout


@dataclass(frozen=True)
class Cr2Vk:
    """skecd.vk and sk_{i,0} ⊕ sk_{i,1} at θ=1 slots, keyed by 1-based i"""

    x: Bits
    theta: Bits
    sk_xor: Mapping[int, Bits]


@dataclass(frozen=True)
class Cr2Cert:
    slots: Tuple[Tuple[int, Bits], ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slots": [
                {"c": c, "d": d.hex(), "width": d.width} for c, d in self.slots
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Cr2Cert":
        data = json.loads(text)
        return cls(
            tuple(
                (int(slot["c"]), Bits.from_hex(slot["d"], int(slot["width"])))
                for slot in data["slots"]
            )
        )


@dataclass(frozen=True)
class Cr2Ct:
    miabe_ct: MiAbeCiphertext
    policy: PredicatePolicy
    circuit: CcObfuscation
    msg_width: int


def _relation(lam: int, attr_width: int) -> Callable[[Any, Sequence[Bits]], int]:
    def relation(
        attribute: Tuple[PredicatePolicy, CcObfuscation], ys: Sequence[Bits]
    ) -> int:
        policy, circuit = attribute
        tags = {y[:lam] for y in ys}
        if len(tags) != 1:
            return 1
        u = Bits.concat(y[lam : lam + 1] for y in ys)
        y_attr = ys[0][lam + 1 :]
        if y_attr.width != attr_width:
            return 1
        if cc_eval(circuit, u) is None and predicate_relation(policy, y_attr) == 0:
            return 0
        return 1

    return relation


def setup(
    params: SchemeParams,
    rng: RandomStream,
    registry: Optional[IdealBackendRegistry] = None,
) -> Tuple[Cr2Ek, Cr2Msk]:
    """The number of slots k is ℓ_ct of an SKECD ciphertext of 0^λ"""
    lam = params.lam
    registry = registry or IdealBackendRegistry(lam, substream(rng, "registry"))
    skecd_sk = skecd.kg(params.skecd(msg_width=lam), rng)
    slots = skecd_sk.params.ct_width
    widths = [lam + 1 + params.attr_width] + [lam + 1] * (slots - 1)
    miabe_pk, miabe_msk = miabe_setup(
        registry, _relation(lam, params.attr_width), widths, params.message_bits
    )
    logger.debug(f"ABE-CR²-SKL setup with {slots} slots")
    return (
        Cr2Ek(miabe_pk, slots, params.message_bits),
        Cr2Msk(miabe_msk, skecd_sk, params.attr_width),
    )


def kg(msk: Cr2Msk, y: Bits, rng: RandomStream) -> Tuple[Cr2Key, Cr2Vk]:
    lam = msk.skecd_sk.params.lam
    if y.width != msk.attr_width:
        raise WidthMismatch(f"Key attribute of {y.width} bits, need {msk.attr_width}")
    tag = random_bits(rng, lam)
    ct, skecd_vk = skecd.enc(msk.skecd_sk, Bits.zeros(lam), rng)
    tokens = [
        tuple(
            miabe_kg(
                msk.miabe_msk, i, tag + Bits(b, 1) + (y if i == 1 else Bits(0, 0))
            )
            for b in (0, 1)
        )
        for i in range(1, msk.slots + 1)
    ]

    layout = msk.layout
    sk_registers = RegisterLayout(
        tuple((sk_segment(i), w) for i, w in enumerate(msk.token_widths, start=1))
    )
    state = reorder(
        tensor(
            ct.as_state(CT_PREFIX),
            basis_state(sk_registers, Bits.zeros(sk_registers.total_bits)),
        ),
        layout.names,
    )
    state = apply_xor_oracles(
        state,
        [
            (ct_segment(i), sk_segment(i), lambda u, pair=pair: pair[u.value])
            for i, pair in enumerate(tokens, start=1)
        ],
    )
    sk_xor = {
        p + 1: tokens[p][0] ^ tokens[p][1] for p in skecd_vk.theta.positions(1)
    }
    return Cr2Key(state, y, tag), Cr2Vk(skecd_vk.x, skecd_vk.theta, sk_xor)


def enc(ek: Cr2Ek, policy: PredicatePolicy, m: Bits) -> Cr2Ct:
    circuit = cc_sim(ek.registry, CcParams(ek.slots, ek.registry.lam), 1)
    sealed = miabe_enc(ek.miabe_pk, (policy, circuit), m)
    return Cr2Ct(sealed, policy, circuit, ek.msg_width)


def _token_widths(layout: RegisterLayout) -> List[int]:
    return [layout.width(name) for name in layout.names if name.startswith(SK_PREFIX)]


def dec(key: Cr2Key, ct: Cr2Ct, rng: RandomStream) -> Tuple[Optional[Bits], Cr2Key]:
    """k-token MI-ABE decryption over the ABE.SK registers into MSG"""
    widths = _token_widths(key.layout)
    names = [sk_segment(i) for i in range(1, len(widths) + 1)]
    m, post = measure_function(
        key.state,
        names,
        lambda v: miabe_dec(ct.miabe_ct, v.split(widths)),
        ct.msg_width,
        rng,
    )
    return m, Cr2Key(post, key.y, key.tag)


def delete(key: Cr2Key, rng: RandomStream) -> Cr2Cert:
    """Hadamard-measure every (SKECD.CT_i, ABE.SK_i) block; the key is consumed"""
    outcome, _ = measure_hadamard(key.state, key.layout.names, rng)
    return Cr2Cert(
        tuple(
            (outcome.part(ct_segment(i)).value, outcome.part(sk_segment(i)))
            for i in range(1, key.slots + 1)
        )
    )


def vrfy(vk: Cr2Vk, cert: Cr2Cert) -> bool:
    """x[i] = c_i ⊕ d_i·(sk_{i,0} ⊕ sk_{i,1}) at every θ[i]=1 slot"""
    if len(cert.slots) != vk.x.width:
        return False
    for position in vk.theta.positions(1):
        c, d = cert.slots[position]
        expected = vk.sk_xor[position + 1]
        if d.width != expected.width or c not in (0, 1):
            return False
        if vk.x[position] != c ^ d.dot(expected):
            return False
    return True

