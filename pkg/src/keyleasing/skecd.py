"""
BB84-based secret-key encryption with certified deletion

A ciphertext has ``n`` quantum positions holding a BB84 state |x⟩_θ and a classical
part. The plaintext is masked with a hash of the computational-basis (θ=0) bits of x,
and the classical part is an authenticated SKE encryption of θ and the masked
plaintext. Anyone holding the key and any computational-basis string u of the
ciphertext can decrypt classically (:func:`cdec`); measuring the quantum part in the
Hadamard basis (:func:`delete`) destroys the θ=0 bits and yields a certificate that
is checked at the θ=1 positions.
"""
from dataclasses import dataclass
from logging import getLogger
from typing import Optional, Tuple

from .bits import Bits
from .decorators import make_bot_safe
from .exceptions import ConfigurationError, LayoutError
from .functions import raise_exception_if_width_differs
from .prims import (
    SkeCiphertext,
    SkeKey,
    mask_hash,
    ske_ciphertext_width,
    ske_dec,
    ske_enc,
    ske_kg,
)
from .qreg import (
    DEFAULT_TERM_CAP,
    RegisterLayout,
    SparseState,
    basis_state,
    measure_function,
    measure_hadamard,
    prepare_bb84,
    qubit_names,
    tensor,
)
from .rng import RandomStream, fixed_weight, random_bits

logger = getLogger(f"{__package__}.{__name__}")


@dataclass(frozen=True)
class SkecdParams:
    lam: int
    positions: int
    hadamard: int
    msg_width: int
    term_cap: int = DEFAULT_TERM_CAP

    def __post_init__(self) -> None:
        if self.hadamard > self.positions:
            raise ConfigurationError(
                f"Hadamard weight {self.hadamard} exceeds the {self.positions} "
                f"quantum positions"
            )
        if min(self.lam, self.positions, self.msg_width) < 1:
            raise ConfigurationError("λ, positions and message width must be positive")

    @property
    def classical_width(self) -> int:
        return ske_ciphertext_width(self.lam, self.positions + self.msg_width)

    @property
    def ct_width(self) -> int:
        """ℓ_ct"""
        return self.positions + self.classical_width


@dataclass(frozen=True)
class SkecdSecretKey:
    ske_key: SkeKey
    params: SkecdParams


@dataclass(frozen=True)
class SkecdVerificationKey:
    x: Bits
    theta: Bits

    def __post_init__(self) -> None:
        raise_exception_if_width_differs(self.theta, self.x.width, "θ")


@dataclass(frozen=True)
class DeletionCertificate:
    bits: Bits


@dataclass(frozen=True)
class SkecdCiphertext:
    """
    Quantum part over ``Q_1..Q_n`` plus the classical part

    The quantum part is a simulation artifact and is not transmittable.
    """

    quantum: SparseState
    classical_part: Bits

    @property
    def positions(self) -> int:
        return len(self.quantum.layout)

    @property
    def ct_width(self) -> int:
        return self.positions + self.classical_part.width

    def as_state(self, prefix: str = "CT") -> SparseState:
        """The whole ciphertext as one state, one qubit segment per position"""
        names = qubit_names(self.ct_width, prefix)
        quantum = self.quantum.replace(
            RegisterLayout(tuple((name, 1) for name in names[: self.positions])),
            dict(self.quantum.items()),
        )
        classical = basis_state(
            RegisterLayout(tuple((name, 1) for name in names[self.positions :])),
            self.classical_part,
        )
        return tensor(quantum, classical)

    def to_dict(self) -> dict:
        return {
            "classical_part": self.classical_part.hex(),
            "classical_width": self.classical_part.width,
            "quantum_simulation_only": self.quantum.to_dict(),
        }


def kg(params: SkecdParams, rng: RandomStream) -> SkecdSecretKey:
    key = SkecdSecretKey(ske_kg(params.lam, rng), params)
    logger.debug(f"SKECD key generated, ℓ_ct={params.ct_width}")
    return key


def _mask(x_quantum: Bits, theta_quantum: Bits, width: int) -> Bits:
    return mask_hash(x_quantum.select(theta_quantum.positions(0)), width)


def enc(
    sk: SkecdSecretKey, m: Bits, rng: RandomStream
) -> Tuple[SkecdCiphertext, SkecdVerificationKey]:
    params = sk.params
    raise_exception_if_width_differs(m, params.msg_width, "message")
    theta_q = fixed_weight(rng, params.positions, params.hadamard)
    x_q = random_bits(rng, params.positions)
    quantum = prepare_bb84(x_q, theta_q, term_cap=params.term_cap)
    masked = m ^ _mask(x_q, theta_q, params.msg_width)
    classical = ske_enc(sk.ske_key, theta_q + masked, rng).bits
    vk = SkecdVerificationKey(
        x_q + classical, theta_q + Bits.zeros(classical.width)
    )
    return SkecdCiphertext(quantum, classical), vk


@make_bot_safe
def _unmask(payload: Bits, u: Bits, params: SkecdParams) -> Bits:
    theta_q, masked = payload[: params.positions], payload[params.positions :]
    return masked ^ _mask(u[: params.positions], theta_q, params.msg_width)


def cdec(sk: SkecdSecretKey, u: Bits) -> Optional[Bits]:
    """Classical decryption of any ℓ_ct-bit string in the ciphertext's support"""
    params = sk.params
    raise_exception_if_width_differs(u, params.ct_width, "ciphertext string")
    classical = SkeCiphertext.from_bits(u[params.positions :], params.lam)
    return _unmask(ske_dec(sk.ske_key, classical), u, params)


def dec(
    sk: SkecdSecretKey, ct: SkecdCiphertext, rng: RandomStream
) -> Tuple[Optional[Bits], SkecdCiphertext]:
    """
    Coherent decryption: cdec into ``MSG``, measure it, discard it

    Returns:
        the plaintext (⊥ as None) and the ciphertext after decryption
    """
    params = sk.params
    if ct.positions != params.positions:
        raise LayoutError(
            f"Ciphertext has {ct.positions} positions, not {params.positions}"
        )
    names = ct.quantum.layout.names
    m, post = measure_function(
        ct.quantum,
        names,
        lambda u: cdec(sk, u + ct.classical_part),
        params.msg_width,
        rng,
    )
    return m, SkecdCiphertext(post, ct.classical_part)


def delete(ct: SkecdCiphertext, rng: RandomStream) -> DeletionCertificate:
    """Hadamard-measure every position; the ciphertext is consumed"""
    outcome, _ = measure_hadamard(ct.quantum, ct.quantum.layout.names, rng)
    # classical positions are basis states, flat in the Hadamard basis
    padding = random_bits(rng, ct.classical_part.width)
    return DeletionCertificate(outcome.bits + padding)


def vrfy(vk: SkecdVerificationKey, cert: DeletionCertificate) -> bool:
    if cert.bits.width != vk.x.width:
        return False
    return all(cert.bits[i] == vk.x[i] for i in vk.theta.positions(1))


def alt_vk(theta: Bits, cert: DeletionCertificate) -> SkecdVerificationKey:
    """Alternative verification key (cert, θ), equivalent to vk on accepted certs"""
    return SkecdVerificationKey(cert.bits, theta)
