"""
BB84-signed payload core

A payload (the SKE-CR-SKL mask ``r`` or an SKFE key token) is encrypted with SKECD,
and every ciphertext position i gets a signature register S_i holding
``s_{i,u_i}`` for the value u_i of position i. Positions in the Hadamard basis turn
into blocks ``|0⟩|s_{i,0}⟩ + (-1)^{x[i]}|1⟩|s_{i,1}⟩``. The OWF images
``t_{i,b} = f(s_{i,b})`` form the test key, the XORs ``s_{i,0} ⊕ s_{i,1}`` at Hadamard
positions go into the verification key.

The same module also holds the ABE layer used by the public-key and attribute-based
schemes: an ``ABE.SK`` register computed coherently from the signed key register.
"""
from dataclasses import dataclass, field
from logging import getLogger
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from .bits import Bits
from .exceptions import LayoutError
from .prims import Owf
from .qreg import (
    RegisterLayout,
    SparseState,
    add_register,
    apply_xor_oracle,
    apply_xor_oracles,
    basis_state,
    measure_function,
    measure_hadamard,
    reorder,
    tensor,
    trace_out,
)
from .rng import RandomStream, random_bits
from . import skecd

logger = getLogger(f"{__package__}.{__name__}")

CT_PREFIX = "SKECD.CT"
SIG_PREFIX = "S"
ABE_SK = "ABE.SK"
KEY_TEST = "SKE.KT"


def ct_segment(i: int) -> str:
    return f"{CT_PREFIX}_{i}"


def sig_segment(i: int) -> str:
    return f"{SIG_PREFIX}_{i}"


def signed_layout(ct_width: int, sig_width: int) -> RegisterLayout:
    segments = []
    for i in range(1, ct_width + 1):
        segments += [(ct_segment(i), 1), (sig_segment(i), sig_width)]
    return RegisterLayout(tuple(segments))


def signed_blocks(ct_width: int) -> List[Tuple[str, str]]:
    return [(ct_segment(i), sig_segment(i)) for i in range(1, ct_width + 1)]


@dataclass(frozen=True)
class SignedKey:
    state: SparseState
    sig_width: int

    @property
    def ct_width(self) -> int:
        return len(self.state.layout) // 2

    @property
    def layout(self) -> RegisterLayout:
        return self.state.layout


@dataclass(frozen=True)
class SignedVk:
    """(x, θ, S); S only holds s_{i,0} ⊕ s_{i,1} for θ[i]=1, keyed by 1-based i"""

    x: Bits
    theta: Bits
    s_xor: Mapping[int, Bits] = field(repr=False)
    sig_width: int


@dataclass(frozen=True)
class SignedTk:
    owf: Owf
    images: Tuple[Tuple[Bits, Bits], ...] = field(repr=False)

    @property
    def bits(self) -> Bits:
        """T = t_{1,0} ∥ t_{1,1} ∥ ⋯ ∥ t_{ℓ,0} ∥ t_{ℓ,1}"""
        return Bits.concat(image for pair in self.images for image in pair)

    @property
    def ct_width(self) -> int:
        return len(self.images)


def issue_signed_key(
    skecd_sk: skecd.SkecdSecretKey, payload: Bits, owf: Owf, rng: RandomStream
) -> Tuple[SignedKey, SignedVk, SignedTk]:
    ct, skecd_vk = skecd.enc(skecd_sk, payload, rng)
    width = skecd_sk.params.ct_width
    sig_width = owf.input_bits
    preimages = [
        (random_bits(rng, sig_width), random_bits(rng, sig_width)) for _ in range(width)
    ]
    images = tuple((owf(s0), owf(s1)) for s0, s1 in preimages)

    sig_registers = RegisterLayout(
        tuple((sig_segment(i), sig_width) for i in range(1, width + 1))
    )
    layout = signed_layout(width, sig_width)
    state = reorder(
        tensor(
            ct.as_state(CT_PREFIX),
            basis_state(sig_registers, Bits.zeros(sig_registers.total_bits)),
        ),
        layout.names,
    )
    state = apply_xor_oracles(
        state,
        [
            (ct_segment(i), sig_segment(i), lambda u, pair=pair: pair[u.value])
            for i, pair in enumerate(preimages, start=1)
        ],
    )
    s_xor = {
        i + 1: preimages[i][0] ^ preimages[i][1] for i in skecd_vk.theta.positions(1)
    }
    logger.debug(f"Signed key with {len(state)} terms over {width} positions")
    return (
        SignedKey(state, sig_width),
        SignedVk(skecd_vk.x, skecd_vk.theta, s_xor, sig_width),
        SignedTk(owf, images),
    )


def ct_names(ct_width: int) -> List[str]:
    return [ct_segment(i) for i in range(1, ct_width + 1)]


def ct_substring(dk_bits: Bits, sig_width: int) -> Bits:
    """Sub-string of a signed key string on the SKECD.CT registers"""
    block = 1 + sig_width
    if dk_bits.width % block:
        raise LayoutError(f"{dk_bits.width} bits are not whole signed blocks")
    text = str(dk_bits)
    return Bits.from_str(text[::block])


def key_test(tk: SignedTk, dk_bits: Bits) -> int:
    """1 iff f(v_i) = t_{i,u_i} for every block (u_i, v_i) of the key string"""
    sig_width = tk.owf.input_bits
    if dk_bits.width != tk.ct_width * (1 + sig_width):
        return 0
    parts = dk_bits.split([1, sig_width] * tk.ct_width)
    for i, images in enumerate(tk.images):
        u, v = parts[2 * i], parts[2 * i + 1]
        if tk.owf(v) != images[u.value]:
            return 0
    return 1


def key_test_coherent(
    tk: SignedTk, key: SignedKey, rng: RandomStream
) -> Tuple[int, SignedKey]:
    bit, post = measure_function(
        key.state,
        key.layout.names,
        lambda u: Bits(key_test(tk, u), 1),
        1,
        rng,
        ancilla=KEY_TEST,
    )
    return (bit.value if bit is not None else 0), SignedKey(post, key.sig_width)


def decrypt_signed(
    key: SignedKey,
    classical_decrypt: Callable[[Bits], Optional[Bits]],
    width: int,
    rng: RandomStream,
) -> Tuple[Optional[Bits], SignedKey]:
    """Evaluate ``classical_decrypt`` on the SKECD.CT registers into MSG and measure"""
    m, post = measure_function(
        key.state, ct_names(key.ct_width), classical_decrypt, width, rng
    )
    return m, SignedKey(post, key.sig_width)


def verify_signed(vk: SignedVk, state: SparseState, rng: RandomStream) -> bool:
    """
    Hadamard-measure every block and check x[i] = c_i ⊕ d_i·(s_{i,0} ⊕ s_{i,1})
    at every θ[i]=1 position

    Raises:
        LayoutError: the returned state does not have the key layout
    """
    expected = signed_layout(vk.x.width, vk.sig_width)
    if state.layout.segments != expected.segments:
        raise LayoutError(f"Returned key has layout {state.layout.names[:4]}...")
    outcome, _ = measure_hadamard(state, expected.names, rng)
    for position in vk.theta.positions(1):
        i = position + 1
        c = outcome.part(ct_segment(i)).value
        d = outcome.part(sig_segment(i))
        if vk.x[position] != c ^ d.dot(vk.s_xor[i]):
            logger.debug(f"Parity check failed at position {i}")
            return False
    return True


# ABE layer over a signed key register


def attach_abe_layer(
    key: SignedKey, token_width: int, token_of: Callable[[Bits], Bits]
) -> SparseState:
    """Add ABE.SK and XOR ``token_of(u)`` into it for every key string u"""
    state = add_register(key.state, ABE_SK, token_width)
    return apply_xor_oracle(state, key.layout.names, ABE_SK, token_of)


def strip_abe_layer(
    state: SparseState,
    key_layout: RegisterLayout,
    tk: SignedTk,
    token_of: Callable[[Bits], Bits],
    rng: RandomStream,
) -> Optional[SignedKey]:
    """
    Coherent key test, uncompute ABE.SK, trace it out

    Returns:
        the residual signed key, or ⊥ (None) if the key test measured 0

    Raises:
        LayoutError: the state is not a signed key register plus ABE.SK
    """
    names = key_layout.names
    if state.layout.names != names + (ABE_SK,) or any(
        state.layout.width(name) != key_layout.width(name) for name in names
    ):
        raise LayoutError("Returned key is not a signed key register with ABE.SK")
    bit, state = measure_function(
        state, names, lambda u: Bits(key_test(tk, u), 1), 1, rng, ancilla=KEY_TEST
    )
    if bit is None or bit.value == 0:
        logger.debug("Key test of the returned key failed")
        return None
    state = apply_xor_oracle(state, names, ABE_SK, token_of)
    state = trace_out(state, ABE_SK, rng)
    return SignedKey(state, key_layout.width(names[1]))


def uncomputed_abe_register(
    state: SparseState, key_layout: RegisterLayout, token_of: Callable[[Bits], Bits]
) -> Dict[Tuple[int, ...], Bits]:
    """ABE.SK content per key string after the uncompute step"""
    uncomputed = apply_xor_oracle(state, key_layout.names, ABE_SK, token_of)
    position = uncomputed.layout.index(ABE_SK)
    width = uncomputed.layout.width(ABE_SK)
    return {key[:position]: Bits(key[position], width) for key in uncomputed.terms}
