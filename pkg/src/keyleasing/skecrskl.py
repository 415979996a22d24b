"""
Secret-key encryption with collusion-resistant secure key leasing

The master key holds an SKECD key and a random mask ``r``. Every leased key is a
fresh signed SKECD ciphertext of ``r``; a ciphertext of ``m`` is simply ``r ⊕ m``
together with the SKECD key, so anyone with a classical string of a leased key can
decrypt while the key's Hadamard positions certify its return.
"""
from dataclasses import dataclass
from logging import getLogger
from typing import Optional, Tuple

from .bits import Bits
from .config import SchemeParams
from .decorators import make_bot_safe
from .exceptions import LayoutError
from .functions import raise_exception_if_width_differs
from .prims import Owf
from .rng import RandomStream, random_bits
from .signed import (
    SignedKey,
    SignedTk,
    SignedVk,
    ct_substring,
    decrypt_signed,
    issue_signed_key,
    key_test,
    key_test_coherent,
    verify_signed,
)
from . import skecd

logger = getLogger(f"{__package__}.{__name__}")

CrSklDk = SignedKey
CrSklVk = SignedVk
CrSklTk = SignedTk


@dataclass(frozen=True)
class CrSklMsk:
    skecd_sk: skecd.SkecdSecretKey
    r: Bits
    owf: Owf

    @property
    def ct_width(self) -> int:
        return self.skecd_sk.params.ct_width


@dataclass(frozen=True)
class CrSklCt:
    skecd_sk: skecd.SkecdSecretKey
    z: Bits


def setup(params: SchemeParams, rng: RandomStream) -> CrSklMsk:
    skecd_params = params.skecd()
    msk = CrSklMsk(
        skecd.kg(skecd_params, rng), random_bits(rng, params.message_bits), params.owf()
    )
    logger.debug(f"SKE-CR-SKL setup, ℓ_ct={msk.ct_width}")
    return msk


def kg(msk: CrSklMsk, rng: RandomStream) -> Tuple[CrSklDk, CrSklVk, CrSklTk]:
    return issue_signed_key(msk.skecd_sk, msk.r, msk.owf, rng)


def enc(msk: CrSklMsk, m: Bits) -> CrSklCt:
    raise_exception_if_width_differs(m, msk.r.width, "message")
    return CrSklCt(msk.skecd_sk, msk.r ^ m)


@make_bot_safe
def _unmask(inner: Bits, ct: CrSklCt) -> Bits:
    return ct.z ^ inner


def _cdec_ct(u: Bits, ct: CrSklCt) -> Optional[Bits]:
    return _unmask(skecd.cdec(ct.skecd_sk, u), ct)


def cdec(dk_bits: Bits, ct: CrSklCt) -> Optional[Bits]:
    """Decrypt with a classical string over every key segment; S bits are ignored"""
    sig_width = ct.skecd_sk.params.lam
    try:
        u = ct_substring(dk_bits, sig_width)
    except LayoutError:
        return None
    if u.width != ct.skecd_sk.params.ct_width:
        return None
    return _cdec_ct(u, ct)


def dec(dk: CrSklDk, ct: CrSklCt, rng: RandomStream) -> Tuple[Optional[Bits], CrSklDk]:
    if dk.ct_width != ct.skecd_sk.params.ct_width:
        raise LayoutError(
            f"Key over {dk.ct_width} positions, ciphertext needs "
            f"{ct.skecd_sk.params.ct_width}"
        )
    return decrypt_signed(dk, lambda u: _cdec_ct(u, ct), ct.z.width, rng)


def vrfy(vk: CrSklVk, dk: CrSklDk, rng: RandomStream) -> bool:
    """Destructive: the returned key is consumed"""
    return verify_signed(vk, dk.state, rng)


def keytest(tk: CrSklTk, dk_bits: Bits) -> int:
    return key_test(tk, dk_bits)


def keytest_coherent(
    tk: CrSklTk, dk: CrSklDk, rng: RandomStream
) -> Tuple[int, CrSklDk]:
    return key_test_coherent(tk, dk, rng)
