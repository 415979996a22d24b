"""
Uniform view of the leasing schemes for challengers and adversaries

Each adapter runs its scheme's setup on construction and exposes issuing keys,
checking returned keys or certificates, encryption and the public decryption
algorithm. Adversaries see keys through :class:`IssuedKey` and may use the public
parts of an adapter (``decrypt``, ``blocks``, ``block_check``, ``wrap``).
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Dict, List, Optional, Tuple, Type

from .bits import Bits
from .config import SchemeName, SchemeParams
from .exceptions import GameError, KeyLeasingError, LayoutError
from .functions import warn_once
from .prims import (
    IdealBackendRegistry,
    PredicatePolicy,
    abe_dec,
    abe_enc,
    predicate_relation,
)
from .qreg import (
    RegisterLayout,
    SparseState,
    measure_computational,
    states_equal,
)
from .rng import RandomStream, random_bits, substream
from .signed import SignedKey, signed_blocks
from . import cr2, feskl, pkecrskl, skecd, skecrskl, strawman

logger = getLogger(f"{__package__}.{__name__}")

Block = Tuple[str, str]


@dataclass
class IssuedKey:
    """A leased key as handed to the adversary"""

    index: int
    key: Any
    attribute: Optional[Bits] = None
    public: Dict[str, Any] = field(default_factory=dict)


def accepting_policy(rng: RandomStream, attr_width: int, y: Bits) -> PredicatePolicy:
    """Random truth table with R(x, y) = 0"""
    table = random_bits(rng, 2 ** attr_width)
    if table[y.value]:
        table = table.flip(y.value)
    return PredicatePolicy(table)


class LeasingScheme(ABC):
    name: SchemeName
    certificates = False
    attribute_based = False
    public_encryption = False

    def __init__(self, params: SchemeParams, rng: RandomStream) -> None:
        self.params = params
        self.registry = IdealBackendRegistry(params.lam, substream(rng, "registry"))

    @property
    def message_width(self) -> int:
        return self.params.message_bits

    @abstractmethod
    def issue(
        self, rng: RandomStream, attribute: Optional[Bits] = None
    ) -> Tuple[Any, Any, Dict[str, Any]]:
        """(key, verification key, public material for the key holder)"""

    @abstractmethod
    def key_state(self, key: Any) -> SparseState:
        pass

    @abstractmethod
    def wrap(self, state: SparseState, like: Any) -> Any:
        """A key object around ``state`` with the metadata of ``like``"""

    @abstractmethod
    def check_return(self, vk: Any, returned: Any, rng: RandomStream) -> bool:
        pass

    @abstractmethod
    def encrypt(self, m: Bits, rng: RandomStream, target: Any = None) -> Any:
        pass

    @abstractmethod
    def decrypt(
        self, key: Any, ct: Any, rng: RandomStream
    ) -> Tuple[Optional[Bits], Any]:
        pass

    def delete(self, key: Any, rng: RandomStream) -> Any:
        raise GameError(f"{self.name.value} keys are returned, not deleted")

    def blocks(self, layout: RegisterLayout) -> List[Block]:
        """(branch, payload) segment pairs of a key register"""
        return []

    def block_check(
        self, issued: IssuedKey, block: int, branch: int, payload: Bits
    ) -> bool:
        """Public consistency check of one observed block value (1-based block)"""
        return False

    def relation(self, target: Any, y: Bits) -> int:
        return 0

    def random_target(self, rng: RandomStream) -> Any:
        return None

    def random_attribute(self, rng: RandomStream) -> Optional[Bits]:
        return None

    def accepting_target(self, rng: RandomStream, y: Optional[Bits]) -> Any:
        return None

    def key_test(self, vk: Any, key_bits: Bits) -> Optional[int]:
        """KeyTest on a measured key string, None for schemes without one"""
        return None

    def roundtrip(self, rng: RandomStream) -> Dict[str, bool]:
        """Issue, encrypt, decrypt, test and return one honest key"""
        attribute = self.random_attribute(rng)
        target = self.accepting_target(rng, attribute)
        key, vk, _ = self.issue(rng, attribute)
        m = random_bits(rng, self.message_width)
        ct = self.encrypt(m, rng, target)
        got, post = self.decrypt(key, ct, rng)
        checks = {
            "decryption": got == m,
            "non_destructive": states_equal(self.key_state(key), self.key_state(post)),
        }
        state = self.key_state(post)
        outcome, _ = measure_computational(state, state.layout.names, rng)
        tested = self.key_test(vk, outcome.bits)
        if tested is not None:
            checks["keytest"] = bool(tested)
        returned = self.delete(post, rng) if self.certificates else state
        checks["verification"] = self.check_return(vk, returned, rng)
        return checks


class SkeCrSklScheme(LeasingScheme):
    name = SchemeName.SKECRSKL

    def __init__(self, params: SchemeParams, rng: RandomStream) -> None:
        super().__init__(params, rng)
        self.msk = skecrskl.setup(params, rng)

    def issue(self, rng, attribute=None):
        dk, vk, tk = skecrskl.kg(self.msk, rng)
        return dk, vk, {"tk": tk}

    def key_state(self, key: SignedKey) -> SparseState:
        return key.state

    def wrap(self, state: SparseState, like: SignedKey) -> SignedKey:
        return SignedKey(state, like.sig_width)

    def check_return(self, vk, returned, rng) -> bool:
        if not isinstance(returned, SparseState):
            return False
        try:
            return skecrskl.vrfy(vk, SignedKey(returned, vk.sig_width), rng)
        except LayoutError as e:
            warn_once(logger, f"Rejected returned key: {e}")
            return False

    def encrypt(self, m, rng, target=None):
        return skecrskl.enc(self.msk, m)

    def decrypt(self, key, ct, rng):
        return skecrskl.dec(key, ct, rng)

    def blocks(self, layout: RegisterLayout) -> List[Block]:
        return signed_blocks(len(layout) // 2)

    def block_check(self, issued, block, branch, payload) -> bool:
        tk = issued.public.get("tk")
        if tk is None or payload.width != tk.owf.input_bits:
            return False
        return tk.owf(payload) == tk.images[block - 1][branch]

    def roundtrip(self, rng: RandomStream) -> Dict[str, bool]:
        dk, vk, tk = skecrskl.kg(self.msk, rng)
        m = random_bits(rng, self.message_width)
        ct = self.encrypt(m, rng)
        got, post = skecrskl.dec(dk, ct, rng)
        outcome, _ = measure_computational(post.state, post.layout.names, rng)
        bit, tested = skecrskl.keytest_coherent(tk, post, rng)
        return {
            "decryption": got == m,
            "non_destructive": states_equal(dk.state, post.state),
            "keytest": skecrskl.keytest(tk, outcome.bits) == 1,
            "keytest_coherent": bit == 1 and states_equal(dk.state, tested.state),
            "cdec": skecrskl.cdec(outcome.bits, ct) == m,
            "verification": skecrskl.vrfy(vk, post, rng),
        }


class PkeCrSklScheme(LeasingScheme):
    name = SchemeName.PKECRSKL
    public_encryption = True

    def __init__(self, params: SchemeParams, rng: RandomStream) -> None:
        super().__init__(params, rng)
        self.ek, self.msk = pkecrskl.setup(params, rng, self.registry)

    def issue(self, rng, attribute=None):
        dk, vk = pkecrskl.kg(self.msk, rng)
        return dk, vk, {"ek": self.ek}

    def key_state(self, key: pkecrskl.PkeDk) -> SparseState:
        return key.state

    def wrap(self, state, like: pkecrskl.PkeDk) -> pkecrskl.PkeDk:
        return pkecrskl.PkeDk(state, like.ske_layout)

    def check_return(self, vk, returned, rng) -> bool:
        if not isinstance(returned, SparseState):
            return False
        return pkecrskl.vrfy(vk, pkecrskl.PkeDk(returned, self.msk.ske_layout), rng)

    def encrypt(self, m, rng, target=None):
        return pkecrskl.enc(self.ek, m, rng)

    def decrypt(self, key, ct, rng):
        return pkecrskl.dec(key, ct, rng)

    def key_test(self, vk: pkecrskl.PkeVk, key_bits: Bits) -> int:
        return skecrskl.keytest(
            vk.ske_tk, key_bits[: self.msk.ske_layout.total_bits]
        )


class AbeCrSklScheme(LeasingScheme):
    name = SchemeName.ABECRSKL
    attribute_based = True
    public_encryption = True

    def __init__(self, params: SchemeParams, rng: RandomStream) -> None:
        super().__init__(params, rng)
        self.pk, self.msk = feskl.abe_skl_setup(params, rng, self.registry)

    def issue(self, rng, attribute=None):
        if attribute is None:
            raise GameError("ABE keys need an attribute")
        key, vk = feskl.abe_skl_kg(self.msk, attribute, rng)
        return key, vk, {"pk": self.pk}

    def key_state(self, key: feskl.AbeSklKey) -> SparseState:
        return key.state

    def wrap(self, state, like: feskl.AbeSklKey) -> feskl.AbeSklKey:
        return feskl.AbeSklKey(state, like.skfe_layout, like.y)

    def check_return(self, vk: feskl.AbeSklVk, returned, rng) -> bool:
        if not isinstance(returned, SparseState):
            return False
        key = feskl.AbeSklKey(returned, self.msk.skfe.layout, vk.y)
        return feskl.abe_skl_vrfy(vk, key, rng)

    def encrypt(self, m, rng, target=None):
        if target is None:
            raise GameError("ABE encryption needs a policy")
        return feskl.abe_skl_enc(self.pk, target, m)

    def decrypt(self, key, ct, rng):
        return feskl.abe_skl_dec(key, ct, rng)

    def relation(self, target: PredicatePolicy, y: Bits) -> int:
        return predicate_relation(target, y)

    def random_target(self, rng: RandomStream) -> PredicatePolicy:
        return PredicatePolicy(random_bits(rng, 2 ** self.params.attr_width))

    def random_attribute(self, rng: RandomStream) -> Bits:
        return random_bits(rng, self.params.attr_width)

    def accepting_target(self, rng, y):
        return accepting_policy(rng, self.params.attr_width, y)

    def key_test(self, vk: feskl.AbeSklVk, key_bits: Bits) -> int:
        width = self.msk.skfe.layout.total_bits
        return feskl.skfe_skl_keytest(vk.skfe_tk, key_bits[:width])


class SkfeCrSklScheme(LeasingScheme):
    """SKFE-CR-SKL with the ABE-CR-SKL functionality F((x, z), y)"""

    name = SchemeName.SKFECRSKL
    attribute_based = True

    def __init__(self, params: SchemeParams, rng: RandomStream) -> None:
        super().__init__(params, rng)
        self.msk = feskl.skfe_skl_setup(
            params,
            feskl.abe_skl_functionality,
            params.attr_width,
            params.message_bits,
            rng,
            self.registry,
        )

    def issue(self, rng, attribute=None):
        if attribute is None:
            raise GameError("SKFE keys need an attribute")
        key, vk, tk = feskl.skfe_skl_kg(self.msk, attribute, rng)
        return key, vk, {"tk": tk}

    def key_state(self, key: SignedKey) -> SparseState:
        return key.state

    def wrap(self, state, like: SignedKey) -> SignedKey:
        return SignedKey(state, like.sig_width)

    def check_return(self, vk, returned, rng) -> bool:
        if not isinstance(returned, SparseState):
            return False
        try:
            return feskl.skfe_skl_vrfy(vk, SignedKey(returned, vk.sig_width), rng)
        except LayoutError as e:
            warn_once(logger, f"Rejected returned key: {e}")
            return False

    def encrypt(self, m, rng, target=None):
        return feskl.skfe_skl_enc(self.msk, (target, m))

    def decrypt(self, key, ct, rng):
        return feskl.skfe_skl_dec(key, ct, rng)

    def relation(self, target: PredicatePolicy, y: Bits) -> int:
        return predicate_relation(target, y)

    def random_attribute(self, rng: RandomStream) -> Bits:
        return random_bits(rng, self.params.attr_width)

    def accepting_target(self, rng, y):
        return accepting_policy(rng, self.params.attr_width, y)

    def roundtrip(self, rng: RandomStream) -> Dict[str, bool]:
        y = self.random_attribute(rng)
        key, vk, tk = feskl.skfe_skl_kg(self.msk, y, rng)
        m = random_bits(rng, self.message_width)
        ct = self.encrypt(m, rng, self.accepting_target(rng, y))
        got, post = feskl.skfe_skl_dec(key, ct, rng)
        outcome, _ = measure_computational(post.state, post.layout.names, rng)
        return {
            "decryption": got == m,
            "non_destructive": states_equal(key.state, post.state),
            "keytest": feskl.skfe_skl_keytest(tk, outcome.bits) == 1,
            "cdec": feskl.skfe_skl_cdec(outcome.bits, ct) == m,
            "verification": feskl.skfe_skl_vrfy(vk, post, rng),
        }


class Cr2Scheme(LeasingScheme):
    name = SchemeName.ABECR2SKL
    certificates = True
    attribute_based = True
    public_encryption = True

    def __init__(self, params: SchemeParams, rng: RandomStream) -> None:
        super().__init__(params, rng)
        self.ek, self.msk = cr2.setup(params, rng, self.registry)

    def issue(self, rng, attribute=None):
        if attribute is None:
            raise GameError("ABE keys need an attribute")
        key, vk = cr2.kg(self.msk, attribute, rng)
        return key, vk, {"ek": self.ek}

    def key_state(self, key: cr2.Cr2Key) -> SparseState:
        return key.state

    def wrap(self, state, like: cr2.Cr2Key) -> cr2.Cr2Key:
        return cr2.Cr2Key(state, like.y, like.tag)

    def check_return(self, vk, returned, rng) -> bool:
        if not isinstance(returned, cr2.Cr2Cert):
            return False
        try:
            return cr2.vrfy(vk, returned)
        except KeyLeasingError as e:
            warn_once(logger, f"Rejected certificate: {e}")
            return False

    def encrypt(self, m, rng, target=None):
        if target is None:
            raise GameError("ABE encryption needs a policy")
        return cr2.enc(self.ek, target, m)

    def decrypt(self, key, ct, rng):
        return cr2.dec(key, ct, rng)

    def delete(self, key, rng) -> cr2.Cr2Cert:
        return cr2.delete(key, rng)

    def blocks(self, layout: RegisterLayout) -> List[Block]:
        return [
            (cr2.ct_segment(i), cr2.sk_segment(i))
            for i in range(1, len(layout) // 2 + 1)
        ]

    def relation(self, target: PredicatePolicy, y: Bits) -> int:
        return predicate_relation(target, y)

    def random_target(self, rng: RandomStream) -> PredicatePolicy:
        return PredicatePolicy(random_bits(rng, 2 ** self.params.attr_width))

    def random_attribute(self, rng: RandomStream) -> Bits:
        return random_bits(rng, self.params.attr_width)

    def accepting_target(self, rng, y):
        return accepting_policy(rng, self.params.attr_width, y)


class StrawmanScheme(LeasingScheme):
    name = SchemeName.STRAWMAN
    public_encryption = True

    def __init__(self, params: SchemeParams, rng: RandomStream) -> None:
        super().__init__(params, rng)
        self.pk, self.msk = strawman.setup(params, rng, self.registry)
        self._check_message = Bits.zeros(params.message_bits)
        self._check_cts: Dict[int, Any] = {}

    def issue(self, rng, attribute=None):
        key, vk = strawman.kg(self.msk, rng)
        return key, vk, {"pk": self.pk}

    def key_state(self, key: strawman.StrawmanKey) -> SparseState:
        return key.state

    def wrap(self, state, like=None) -> strawman.StrawmanKey:
        return strawman.StrawmanKey(state)

    def check_return(self, vk, returned, rng) -> bool:
        if not isinstance(returned, SparseState):
            return False
        return strawman.vrfy(vk, returned)

    def encrypt(self, m, rng, target=None):
        return strawman.enc(self.pk, m)

    def decrypt(self, key, ct, rng):
        return strawman.dec(key, ct, rng)

    def blocks(self, layout: RegisterLayout) -> List[Block]:
        return [(strawman.BRANCH, strawman.SECRET)]

    def block_check(self, issued, block, branch, payload) -> bool:
        """Test-decrypt with the public key of the branch"""
        if branch not in self._check_cts:
            pk = issued.public["pk"].branch(branch)
            self._check_cts[branch] = abe_enc(
                pk, strawman.NO_ATTRIBUTE, self._check_message
            )
        return abe_dec(payload, self._check_cts[branch]) == self._check_message


SCHEMES: Dict[SchemeName, Type[LeasingScheme]] = {
    scheme.name: scheme
    for scheme in (
        SkeCrSklScheme,
        PkeCrSklScheme,
        AbeCrSklScheme,
        SkfeCrSklScheme,
        Cr2Scheme,
        StrawmanScheme,
    )
}


def skecd_roundtrip(params: SchemeParams, rng: RandomStream) -> Dict[str, bool]:
    sk = skecd.kg(params.skecd(), rng)
    m = random_bits(rng, params.message_bits)
    ct, vk = skecd.enc(sk, m, rng)
    got, post = skecd.dec(sk, ct, rng)
    outcome, _ = measure_computational(post.quantum, post.quantum.layout.names, rng)
    cert = skecd.delete(post, rng)
    return {
        "decryption": got == m,
        "non_destructive": states_equal(ct.quantum, post.quantum),
        "cdec": skecd.cdec(sk, outcome.bits + ct.classical_part) == m,
        "verification": skecd.vrfy(vk, cert),
    }


def make_scheme(
    name: SchemeName, params: SchemeParams, rng: RandomStream
) -> LeasingScheme:
    if name not in SCHEMES:
        raise GameError(f"No leasing scheme '{name}'")
    return SCHEMES[name](params, rng)
