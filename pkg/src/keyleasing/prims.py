"""
Classical primitives and ideal functionalities

Hash based primitives (OWF, keyed hash PRF, SKE) are real code. Compute-and-compare
obfuscation, ABE, MI-ABE and SKFE are ideal backends: a per-trial
:class:`IdealBackendRegistry` seals programs, attributes and plaintexts, while the
objects handed out are handles or fixed-width bit strings. Key tokens are
``MAC(y, r) ∥ y ∥ r`` so they can be XOR-ed into quantum registers and are pure
functions of their inputs.
"""
import hashlib
import hmac
import itertools
import threading
from dataclasses import dataclass
from logging import getLogger
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

from .bits import Bits
from .custom_types import HandleId, Relation
from .exceptions import (
    SlotArityError,
    SlotIndexError,
    UnknownHandle,
    WidthMismatch,
)
from .functions import raise_exception_if_width_differs
from .rng import RandomStream, random_bits

logger = getLogger(f"{__package__}.{__name__}")

HANDLE_BITS = 64

Part = Union[Bits, bytes, str, int]


def _encode(parts: Sequence[Part]) -> bytes:
    """Unambiguous, length prefixed encoding of hash inputs"""
    chunks = []
    for part in parts:
        if isinstance(part, Bits):
            data = b"B" + part.width.to_bytes(4, "big") + part.to_bytes()
        elif isinstance(part, bytes):
            data = b"Y" + part
        elif isinstance(part, int):
            data = b"I" + str(part).encode()
        else:
            data = b"S" + part.encode("utf-8")
        chunks.append(len(data).to_bytes(4, "big") + data)
    return b"".join(chunks)


def hash_bits(domain: str, *parts: Part, width: int) -> Bits:
    """SHAKE-256 of the encoded parts, truncated to ``width`` bits"""
    digest = hashlib.shake_256(_encode((domain,) + parts)).digest((width + 7) // 8)
    return Bits.from_bytes(digest, width)


def keyed_hash(key: Bits, domain: str, *parts: Part, width: int) -> Bits:
    """HMAC-SHA256 in counter mode, truncated to ``width`` bits"""
    message = _encode((domain,) + parts)
    blocks = []
    for counter in range((width + 255) // 256 or 1):
        blocks.append(
            hmac.new(
                key.to_bytes(), message + counter.to_bytes(4, "big"), hashlib.sha256
            ).digest()
        )
    return Bits.from_bytes(b"".join(blocks), width)


@dataclass(frozen=True)
class Owf:
    input_bits: int
    output_bits: int

    def __call__(self, s: Bits) -> Bits:
        return owf_eval(self, s)


def owf_eval(f: Owf, s: Bits) -> Bits:
    raise_exception_if_width_differs(s, f.input_bits, "OWF input")
    return hash_bits("owf", s, width=f.output_bits)


def mask_hash(bits: Bits, width: int) -> Bits:
    """The hash that masks SKECD plaintexts; same primitive as the OWF"""
    return hash_bits("mask", bits, width=width)


@dataclass(frozen=True)
class SkeKey:
    key: Bits


@dataclass(frozen=True)
class SkeCiphertext:
    nonce: Bits
    body: Bits
    tag: Bits

    @property
    def bits(self) -> Bits:
        return self.nonce + self.body + self.tag

    @classmethod
    def from_bits(cls, bits: Bits, lam: int) -> "SkeCiphertext":
        body_width = bits.width - 2 * lam
        if body_width < 0:
            raise WidthMismatch(f"{bits.width} bits cannot hold an SKE ciphertext")
        nonce, body, tag = bits.split([lam, body_width, lam])
        return cls(nonce, body, tag)


def ske_ciphertext_width(lam: int, payload_width: int) -> int:
    return 2 * lam + payload_width


def ske_kg(lam: int, rng: RandomStream) -> SkeKey:
    return SkeKey(random_bits(rng, lam))


def ske_enc(key: SkeKey, message: Bits, rng: RandomStream) -> SkeCiphertext:
    lam = key.key.width
    nonce = random_bits(rng, lam)
    stream = keyed_hash(key.key, "ske-stream", nonce, width=message.width)
    body = message ^ stream
    tag = keyed_hash(key.key, "ske-tag", nonce, body, width=lam)
    return SkeCiphertext(nonce, body, tag)


def ske_dec(key: SkeKey, ciphertext: SkeCiphertext) -> Optional[Bits]:
    """Returns ⊥ (None) if authentication fails"""
    lam = key.key.width
    expected = keyed_hash(
        key.key, "ske-tag", ciphertext.nonce, ciphertext.body, width=lam
    )
    if not hmac.compare_digest(expected.to_bytes(), ciphertext.tag.to_bytes()):
        return None
    stream = keyed_hash(
        key.key, "ske-stream", ciphertext.nonce, width=ciphertext.body.width
    )
    return ciphertext.body ^ stream


class IdealBackendRegistry:
    """
    Sealed, append-only state of the ideal functionalities of one trial

    Records are only ever added; lookups are read-only. A lock guards mutation so a
    registry may be shared by threads.
    """

    def __init__(self, lam: int, rng: RandomStream) -> None:
        self.lam = lam
        self._rng = rng
        self._lock = threading.Lock()
        self._counter = itertools.count(1)
        self._records: Dict[str, Dict[HandleId, Any]] = {
            "cc": {},
            "abe": {},
            "abe-ct": {},
            "miabe": {},
            "miabe-ct": {},
            "skfe": {},
            "skfe-ct": {},
        }

    def __repr__(self) -> str:
        sizes = ", ".join(f"{k}={len(v)}" for k, v in self._records.items())
        return f"<IdealBackendRegistry {sizes}>"

    def register(self, table: str, record: Any) -> HandleId:
        with self._lock:
            handle = HandleId(next(self._counter))
            self._records[table][handle] = record
        logger.debug(f"Registered {table} handle {handle}")
        return handle

    def lookup(self, table: str, handle: HandleId) -> Any:
        try:
            return self._records[table][handle]
        except KeyError:
            raise UnknownHandle(f"No {table} record for handle {handle}")

    def fresh_key(self) -> Bits:
        with self._lock:
            return random_bits(self._rng, self.lam)


@dataclass(frozen=True)
class Handle:
    registry: IdealBackendRegistry
    handle: HandleId

    @property
    def bits(self) -> Bits:
        return Bits(self.handle, HANDLE_BITS)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.handle})"


# Compute-and-compare obfuscation


@dataclass(frozen=True)
class CcParams:
    """Circuit parameters pp_P handed to the simulator"""

    input_width: int
    output_width: int
    size_bound: int = 0


@dataclass(frozen=True)
class _CcRecord:
    params: CcParams
    program: Optional[Callable[[Bits], Bits]]
    lock: Optional[Bits]
    message: Optional[Bits]


class CcObfuscation(Handle):
    pass


def cc_obfuscate(
    registry: IdealBackendRegistry,
    program: Callable[[Bits], Bits],
    lock: Bits,
    message: Bits,
    params: CcParams,
) -> CcObfuscation:
    raise_exception_if_width_differs(lock, registry.lam, "lock")
    raise_exception_if_width_differs(lock, params.output_width, "lock")
    record = _CcRecord(params, program, lock, message)
    return CcObfuscation(registry, registry.register("cc", record))


def cc_sim(
    registry: IdealBackendRegistry, params: CcParams, msg_len: int
) -> CcObfuscation:
    record = _CcRecord(params, None, None, None)
    handle = CcObfuscation(registry, registry.register("cc", record))
    logger.debug(f"Simulated CC program {handle} for {msg_len} bit messages")
    return handle


def cc_eval(handle: CcObfuscation, x: Bits) -> Optional[Bits]:
    record: _CcRecord = handle.registry.lookup("cc", handle.handle)
    if record.program is None:
        return None
    if record.program(x) == record.lock:
        return record.message
    return None


def circuit_outputs_bot(policy: CcObfuscation, y: Bits) -> int:
    """R(x, y) = 0 (decryptable) iff the policy program outputs ⊥ on y"""
    return 0 if cc_eval(policy, y) is None else 1


@dataclass(frozen=True)
class PredicatePolicy:
    """
    Ciphertext attribute given as a truth table over the key-attribute space

    ``evaluate(y)`` is the table entry at index y; 0 means decryptable.
    """

    table: Bits

    @classmethod
    def from_function(
        cls, attr_width: int, predicate: Callable[[Bits], int]
    ) -> "PredicatePolicy":
        entries = "".join(
            str(predicate(Bits(y, attr_width)) & 1) for y in range(2 ** attr_width)
        )
        return cls(Bits.from_str(entries))

    @property
    def attr_width(self) -> int:
        return self.table.width.bit_length() - 1

    def evaluate(self, y: Bits) -> int:
        raise_exception_if_width_differs(y, self.attr_width, "key attribute")
        return self.table[y.value]


def predicate_relation(policy: PredicatePolicy, y: Bits) -> int:
    return policy.evaluate(y)


# Attribute-based encryption


@dataclass(frozen=True)
class _AbeRecord:
    mac_key: Bits
    relation: Relation
    attr_width: int
    rand_width: int
    msg_width: int

    @property
    def token_width(self) -> int:
        return self.mac_key.width + self.attr_width + self.rand_width


@dataclass(frozen=True)
class _SealedCiphertext:
    setup: HandleId
    attribute: Any
    payload: Any


class AbePublicKey(Handle):
    pass


class AbeMasterKey(Handle):
    @property
    def token_width(self) -> int:
        return self.registry.lookup("abe", self.handle).token_width

    @property
    def attr_width(self) -> int:
        return self.registry.lookup("abe", self.handle).attr_width


class AbeCiphertext(Handle):
    pass


def abe_setup(
    registry: IdealBackendRegistry,
    relation: Relation,
    attr_width: int,
    rand_width: int,
    msg_width: int,
) -> Tuple[AbePublicKey, AbeMasterKey]:
    record = _AbeRecord(
        registry.fresh_key(), relation, attr_width, rand_width, msg_width
    )
    handle = registry.register("abe", record)
    logger.debug(f"ABE setup {handle}: token width {record.token_width}")
    return AbePublicKey(registry, handle), AbeMasterKey(registry, handle)


def abe_kg(msk: AbeMasterKey, y: Bits, r: Bits) -> Bits:
    """Deterministic in (msk, y, r)"""
    record: _AbeRecord = msk.registry.lookup("abe", msk.handle)
    raise_exception_if_width_differs(y, record.attr_width, "key attribute")
    raise_exception_if_width_differs(r, record.rand_width, "key randomness")
    mac = keyed_hash(record.mac_key, "abe-kg", y, r, width=record.mac_key.width)
    return mac + y + r


def abe_enc(pk: AbePublicKey, x: Any, m: Bits) -> AbeCiphertext:
    record: _AbeRecord = pk.registry.lookup("abe", pk.handle)
    raise_exception_if_width_differs(m, record.msg_width, "ABE message")
    sealed = _SealedCiphertext(pk.handle, x, m)
    return AbeCiphertext(pk.registry, pk.registry.register("abe-ct", sealed))


def abe_dec(token: Bits, ct: AbeCiphertext) -> Optional[Bits]:
    sealed: _SealedCiphertext = ct.registry.lookup("abe-ct", ct.handle)
    record: _AbeRecord = ct.registry.lookup("abe", sealed.setup)
    if token.width != record.token_width:
        return None
    mac, y, r = token.split(
        [record.mac_key.width, record.attr_width, record.rand_width]
    )
    if keyed_hash(record.mac_key, "abe-kg", y, r, width=mac.width) != mac:
        return None
    if record.relation(sealed.attribute, y) != 0:
        return None
    return sealed.payload


# Multi-input ABE


@dataclass(frozen=True)
class _MiAbeRecord:
    mac_key: Bits
    relation: Callable[[Any, Sequence[Bits]], int]
    slot_widths: Tuple[int, ...]
    msg_width: int

    def token_width(self, slot: int) -> int:
        return self.mac_key.width + self.slot_widths[slot - 1]


class MiAbePublicKey(Handle):
    pass


class MiAbeMasterKey(Handle):
    def token_width(self, slot: int) -> int:
        return self.registry.lookup("miabe", self.handle).token_width(slot)


class MiAbeCiphertext(Handle):
    pass


def miabe_setup(
    registry: IdealBackendRegistry,
    relation: Callable[[Any, Sequence[Bits]], int],
    slot_widths: Sequence[int],
    msg_width: int,
) -> Tuple[MiAbePublicKey, MiAbeMasterKey]:
    record = _MiAbeRecord(registry.fresh_key(), relation, tuple(slot_widths), msg_width)
    handle = registry.register("miabe", record)
    logger.debug(f"MI-ABE setup {handle} with {len(slot_widths)} slots")
    return MiAbePublicKey(registry, handle), MiAbeMasterKey(registry, handle)


def miabe_kg(msk: MiAbeMasterKey, slot: int, y: Bits) -> Bits:
    """Token for slot ``slot`` (1-based)"""
    record: _MiAbeRecord = msk.registry.lookup("miabe", msk.handle)
    if not 1 <= slot <= len(record.slot_widths):
        raise SlotIndexError(f"Slot {slot} outside 1..{len(record.slot_widths)}")
    raise_exception_if_width_differs(y, record.slot_widths[slot - 1], "slot attribute")
    mac = keyed_hash(record.mac_key, "miabe-kg", slot, y, width=record.mac_key.width)
    return mac + y


def miabe_enc(pk: MiAbePublicKey, x: Any, m: Bits) -> MiAbeCiphertext:
    record: _MiAbeRecord = pk.registry.lookup("miabe", pk.handle)
    raise_exception_if_width_differs(m, record.msg_width, "MI-ABE message")
    sealed = _SealedCiphertext(pk.handle, x, m)
    return MiAbeCiphertext(pk.registry, pk.registry.register("miabe-ct", sealed))


def miabe_dec(ct: MiAbeCiphertext, tokens: Sequence[Bits]) -> Optional[Bits]:
    sealed: _SealedCiphertext = ct.registry.lookup("miabe-ct", ct.handle)
    record: _MiAbeRecord = ct.registry.lookup("miabe", sealed.setup)
    if len(tokens) != len(record.slot_widths):
        raise SlotArityError(
            f"{len(tokens)} tokens for {len(record.slot_widths)} slots"
        )
    attributes = []
    lam = record.mac_key.width
    for slot, token in enumerate(tokens, start=1):
        if token.width != record.token_width(slot):
            return None
        mac, y = token[:lam], token[lam:]
        if keyed_hash(record.mac_key, "miabe-kg", slot, y, width=lam) != mac:
            return None
        attributes.append(y)
    if record.relation(sealed.attribute, attributes) != 0:
        return None
    return sealed.payload


# Secret-key functional encryption


@dataclass(frozen=True)
class _SkfeRecord:
    mac_key: Bits
    functionality: Callable[[Any, Bits], Optional[Bits]]
    attr_width: int
    out_width: int

    @property
    def token_width(self) -> int:
        return self.mac_key.width + self.attr_width


class SkfeMasterKey(Handle):
    @property
    def token_width(self) -> int:
        return self.registry.lookup("skfe", self.handle).token_width

    @property
    def out_width(self) -> int:
        return self.registry.lookup("skfe", self.handle).out_width


class SkfeCiphertext(Handle):
    pass


def skfe_setup(
    registry: IdealBackendRegistry,
    functionality: Callable[[Any, Bits], Optional[Bits]],
    attr_width: int,
    out_width: int,
) -> SkfeMasterKey:
    record = _SkfeRecord(registry.fresh_key(), functionality, attr_width, out_width)
    return SkfeMasterKey(registry, registry.register("skfe", record))


def skfe_kg(msk: SkfeMasterKey, y: Bits) -> Bits:
    record: _SkfeRecord = msk.registry.lookup("skfe", msk.handle)
    raise_exception_if_width_differs(y, record.attr_width, "function attribute")
    return keyed_hash(record.mac_key, "skfe-kg", y, width=record.mac_key.width) + y


def skfe_enc(msk: SkfeMasterKey, x: Any) -> SkfeCiphertext:
    sealed = _SealedCiphertext(msk.handle, x, None)
    return SkfeCiphertext(msk.registry, msk.registry.register("skfe-ct", sealed))


def skfe_dec(token: Bits, ct: SkfeCiphertext) -> Optional[Bits]:
    sealed: _SealedCiphertext = ct.registry.lookup("skfe-ct", ct.handle)
    record: _SkfeRecord = ct.registry.lookup("skfe", sealed.setup)
    if token.width != record.token_width:
        return None
    lam = record.mac_key.width
    mac, y = token[:lam], token[lam:]
    if keyed_hash(record.mac_key, "skfe-kg", y, width=lam) != mac:
        return None
    return record.functionality(sealed.attribute, y)
