"""
Adversaries for the security games

An adversary is a classical program that manipulates :class:`SparseState` values
through :mod:`keyleasing.qreg`. Each one is driven by the challenger through the
hooks of :class:`Adversary` and draws randomness only from its own stream.
"""
from abc import ABC
from collections import defaultdict
from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Callable, Dict, List, Optional, Sequence, Set, Tuple, Type

from .bits import Bits
from .config import AdversaryName
from .exceptions import GameError, KeyLeasingError
from .prims import PredicatePolicy
from .qreg import (
    RegisterLayout,
    SparseState,
    add_register,
    apply_xor_oracle,
    basis_state,
    drop_register,
    measure_computational,
    prepare_bb84,
    reorder,
    tensor,
)
from .rng import RandomStream, random_bit, random_bits
from .schemes import IssuedKey, LeasingScheme
from . import skecd

logger = getLogger(f"{__package__}.{__name__}")

Returned = Tuple[int, Any]


@dataclass
class AdversaryView:
    """What the challenger exposes: the public scheme and optional oracles"""

    message_width: int
    scheme: Optional[LeasingScheme] = None
    encryptor: Optional[Callable[[Bits, Any], Any]] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    def encrypt(self, m: Bits, target: Any = None) -> Any:
        if self.encryptor is None:
            raise GameError("No encryption oracle in this game")
        return self.encryptor(m, target)


class Adversary(ABC):
    """
    Abstract Base Class of all adversaries; every hook has a passive default
    """

    def __init__(self, rng: RandomStream) -> None:
        self.rng = rng
        self.view: Optional[AdversaryView] = None
        self.results: Dict[int, bool] = {}

    def bind(self, view: AdversaryView) -> None:
        self.view = view

    @property
    def scheme(self) -> LeasingScheme:
        if self.view is None or self.view.scheme is None:
            raise GameError(f"{type(self).__name__} is not bound to a scheme")
        return self.view.scheme

    # key leasing games

    def choose_target(self) -> Any:
        return self.scheme.random_target(self.rng)

    def key_requests(self, count: int, target: Any) -> List[Optional[Bits]]:
        scheme = self.scheme
        if not scheme.attribute_based:
            return [None] * count
        width = scheme.params.attr_width
        start = int(self.rng.integers(2 ** width))
        return [Bits((start + i) % 2 ** width, width) for i in range(count)]

    def on_keys(self, keys: Sequence[IssuedKey]) -> List[Returned]:
        return []

    def on_verify_result(self, index: int, accepted: bool) -> None:
        self.results[index] = accepted

    def choose_challenge(self) -> Tuple[Bits, Bits]:
        assert self.view is not None
        width = self.view.message_width
        return Bits.zeros(width), Bits.ones(width)

    def post_challenge_requests(self, target: Any) -> List[Bits]:
        return []

    def on_post_challenge_key(self, key: IssuedKey) -> None:
        pass

    def guess(self, ct: Any) -> int:
        return random_bit(self.rng)

    # key testability

    def forge(self, keys: Sequence[IssuedKey]) -> Tuple[int, Bits, Bits]:
        raise GameError(f"{type(self).__name__} does not forge keys")

    # certified deletion

    def on_challenge_ciphertext(
        self, ct: skecd.SkecdCiphertext
    ) -> List[skecd.DeletionCertificate]:
        return []

    def on_secret_key(self, sk: skecd.SkecdSecretKey) -> None:
        pass


def _measure_key(state: SparseState, rng: RandomStream) -> Bits:
    outcome, _ = measure_computational(state, state.layout.names, rng)
    return outcome.bits


class HonestAdversary(Adversary):
    """Returns or deletes everything untouched and guesses uniformly"""

    def on_keys(self, keys: Sequence[IssuedKey]) -> List[Returned]:
        scheme = self.scheme
        returned = []
        for issued in keys:
            if scheme.certificates:
                returned.append((issued.index, scheme.delete(issued.key, self.rng)))
            else:
                returned.append((issued.index, scheme.key_state(issued.key)))
        return returned

    def forge(self, keys: Sequence[IssuedKey]) -> Tuple[int, Bits, Bits]:
        """A measured honest key string with an arbitrary message"""
        assert self.view is not None
        bits = _measure_key(keys[0].key.state, self.rng)
        return 0, bits, random_bits(self.rng, self.view.message_width)

    def on_challenge_ciphertext(self, ct):
        return [skecd.delete(ct, self.rng)]


class NeverReturningAdversary(Adversary):
    """Keeps every key; the challenge is never released"""

    def on_keys(self, keys: Sequence[IssuedKey]) -> List[Returned]:
        self.keys = list(keys)
        return []


class MeasureAndCopyAdversary(Adversary):
    """
    Collusion attacker

    Measures every received key in the computational basis and keeps the strings.
    Wherever both branch values of a block were observed across the keys and pass the
    scheme's public block check, the block superposition is rebuilt; all other blocks
    stay collapsed. The rebuilt keys are returned (or deleted) and the kept strings
    decrypt the challenge.
    """

    def on_keys(self, keys: Sequence[IssuedKey]) -> List[Returned]:
        scheme = self.scheme
        self.records: List[Tuple[IssuedKey, RegisterLayout, Bits]] = []
        seen: Dict[Tuple[str, str], Set[Tuple[int, Bits]]] = defaultdict(set)
        for issued in keys:
            state = scheme.key_state(issued.key)
            bits = _measure_key(state, self.rng)
            self.records.append((issued, state.layout, bits))
            values = state.layout.split(bits)
            for branch, payload in scheme.blocks(state.layout):
                seen[(branch, payload)].add((values[branch].value, values[payload]))

        returned = []
        for issued, layout, bits in self.records:
            state = basis_state(layout, bits)
            for number, block in enumerate(scheme.blocks(layout), start=1):
                pair = self._pair(issued, number, seen[block])
                if pair is not None:
                    state = rebuild_block(state, block, pair)
            if scheme.certificates:
                key = scheme.wrap(state, issued.key)
                returned.append((issued.index, scheme.delete(key, self.rng)))
            else:
                returned.append((issued.index, state))
        return returned

    def _pair(
        self, issued: IssuedKey, number: int, observed: Set[Tuple[int, Bits]]
    ) -> Optional[Tuple[Bits, Bits]]:
        found: Dict[int, Bits] = {}
        for branch, payload in sorted(observed, key=lambda o: (o[0], o[1].value)):
            if branch in found:
                continue
            if self.scheme.block_check(issued, number, branch, payload):
                found[branch] = payload
        if 0 in found and 1 in found:
            return found[0], found[1]
        return None

    def guess(self, ct: Any) -> int:
        assert self.view is not None
        m0, m1 = self.challenge
        for issued, layout, bits in self.records:
            key = self.scheme.wrap(basis_state(layout, bits), issued.key)
            try:
                m, _ = self.scheme.decrypt(key, ct, self.rng)
            except KeyLeasingError:
                continue
            if m == m0:
                return 0
            if m == m1:
                return 1
        return random_bit(self.rng)

    def choose_target(self) -> Any:
        """A policy every key attribute satisfies, so all keys can decrypt"""
        scheme = self.scheme
        if not scheme.attribute_based:
            return None
        return PredicatePolicy(Bits.zeros(2 ** scheme.params.attr_width))

    def choose_challenge(self) -> Tuple[Bits, Bits]:
        self.challenge = super().choose_challenge()
        return self.challenge


def rebuild_block(
    state: SparseState, block: Tuple[str, str], pair: Tuple[Bits, Bits]
) -> SparseState:
    """Replace a collapsed (branch, payload) block by |0⟩|p_0⟩ + |1⟩|p_1⟩"""
    branch, payload = block
    names = state.layout.names
    width = state.layout.width(payload)
    rest = drop_register(drop_register(state, branch), payload)
    fresh = prepare_bb84(Bits.zeros(1), Bits.ones(1), [branch])
    fresh = add_register(fresh, payload, width)
    fresh = apply_xor_oracle(fresh, branch, payload, lambda b: pair[b.value])
    return reorder(tensor(rest, fresh), names)


class BitFlipForger(Adversary):
    """
    Flips the ciphertext bit of a computational-basis position of a measured key and
    fabricates the paired signature
    """

    def forge(self, keys: Sequence[IssuedKey]) -> Tuple[int, Bits, Bits]:
        assert self.view is not None
        issued = keys[0]
        key = issued.key
        vk = issued.public.get("vk")
        if vk is None:
            raise GameError("Forging needs the verification key of the target")
        positions = self.view.extras["positions"]
        bits = _measure_key(key.state, self.rng)
        computational = vk.theta.positions(0)
        # all quantum positions in the Hadamard basis: flip in the classical part
        candidates = [p for p in computational if p < positions] or computational
        if not candidates:
            raise GameError("The key has no computational-basis position to flip")
        position = candidates[int(self.rng.integers(len(candidates)))]
        block = 1 + key.sig_width
        parts = bits.split([block] * (bits.width // block))
        parts[position] = Bits(1 - parts[position][0], 1) + random_bits(
            self.rng, key.sig_width
        )
        return 0, Bits.concat(parts), random_bits(self.rng, self.view.message_width)


class RandomForger(Adversary):
    def forge(self, keys: Sequence[IssuedKey]) -> Tuple[int, Bits, Bits]:
        assert self.view is not None
        width = keys[0].key.state.layout.total_bits
        return (
            0,
            random_bits(self.rng, width),
            random_bits(self.rng, self.view.message_width),
        )


class KeepCopyAdversary(Adversary):
    """
    Measures the challenge ciphertext computationally, deletes the collapsed copy
    and decrypts the kept string once the secret key arrives
    """

    def __init__(self, rng: RandomStream) -> None:
        super().__init__(rng)
        self.kept: Optional[Bits] = None
        self.sk: Optional[skecd.SkecdSecretKey] = None

    def on_challenge_ciphertext(self, ct):
        outcome, collapsed = measure_computational(
            ct.quantum, ct.quantum.layout.names, self.rng
        )
        self.kept = outcome.bits + ct.classical_part
        remaining = skecd.SkecdCiphertext(collapsed, ct.classical_part)
        return [skecd.delete(remaining, self.rng)]

    def on_secret_key(self, sk):
        self.sk = sk

    def choose_challenge(self) -> Tuple[Bits, Bits]:
        self.challenge = super().choose_challenge()
        return self.challenge

    def guess(self, ct: Any) -> int:
        if self.sk is None or self.kept is None:
            return random_bit(self.rng)
        m = skecd.cdec(self.sk, self.kept)
        if m == self.challenge[0]:
            return 0
        if m == self.challenge[1]:
            return 1
        return random_bit(self.rng)


class NoDeleteAdversary(Adversary):
    """Never submits a certificate"""


ADVERSARIES: Dict[AdversaryName, Type[Adversary]] = {
    AdversaryName.HONEST: HonestAdversary,
    AdversaryName.COLLUDER: MeasureAndCopyAdversary,
    AdversaryName.NEVER: NeverReturningAdversary,
    AdversaryName.BITFLIP: BitFlipForger,
    AdversaryName.RANDOM: RandomForger,
    AdversaryName.KEEP_COPY: KeepCopyAdversary,
    AdversaryName.NO_DELETE: NoDeleteAdversary,
}
