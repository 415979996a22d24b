"""
Fixed-width bit strings

Every classical value of the schemes (keys, tokens, certificates, register contents)
is a :class:`Bits`. Position 0 is the leftmost, most significant bit, so
``Bits.from_str("100")[0] == 1``.
"""
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Union, overload

from .exceptions import WidthMismatch


@dataclass(frozen=True)
class Bits:
    value: int
    width: int

    def __post_init__(self) -> None:
        if self.width < 0:
            raise WidthMismatch(f"Negative width {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise WidthMismatch(
                f"Value {self.value} does not fit into {self.width} bits"
            )

    @classmethod
    def zeros(cls, width: int) -> "Bits":
        return cls(0, width)

    @classmethod
    def ones(cls, width: int) -> "Bits":
        return cls((1 << width) - 1, width)

    @classmethod
    def from_str(cls, text: str) -> "Bits":
        text = text.strip()
        if text and set(text) - {"0", "1"}:
            raise WidthMismatch(f"'{text}' is not a bit string")
        return cls(int(text, 2) if text else 0, len(text))

    @classmethod
    def from_bytes(cls, data: bytes, width: int) -> "Bits":
        """Take the leading ``width`` bits of ``data``"""
        available = 8 * len(data)
        if width > available:
            raise WidthMismatch(f"{len(data)} bytes cannot provide {width} bits")
        return cls(int.from_bytes(data, "big") >> (available - width), width)

    @classmethod
    def from_hex(cls, text: str, width: int) -> "Bits":
        return cls(int(text, 16) if text else 0, width)

    @classmethod
    def concat(cls, parts: Iterable["Bits"]) -> "Bits":
        parts = list(parts)
        if len(parts) == 1:
            return parts[0]
        text = "".join(str(part) for part in parts)
        return cls.from_str(text)

    def __str__(self) -> str:
        if self.width == 0:
            return ""
        return format(self.value, f"0{self.width}b")

    def __repr__(self) -> str:
        return f"Bits('{self}')"

    def __len__(self) -> int:
        return self.width

    def __iter__(self):
        for char in str(self):
            yield int(char)

    @overload
    def __getitem__(self, item: int) -> int:
        ...

    @overload
    def __getitem__(self, item: slice) -> "Bits":
        ...

    def __getitem__(self, item: Union[int, slice]) -> Union[int, "Bits"]:
        if isinstance(item, slice):
            start, stop, step = item.indices(self.width)
            if step != 1:
                return Bits.from_str(str(self)[item])
            stop = max(stop, start)
            length = stop - start
            mask = (1 << length) - 1
            return Bits((self.value >> (self.width - stop)) & mask, length)
        if item < 0:
            item += self.width
        if not 0 <= item < self.width:
            raise IndexError(f"Bit {item} outside width {self.width}")
        return (self.value >> (self.width - 1 - item)) & 1

    def _check_width(self, other: "Bits") -> None:
        if not isinstance(other, Bits):
            raise WidthMismatch(f"Expected Bits, got {type(other)}")
        if other.width != self.width:
            raise WidthMismatch(f"Width {self.width} and {other.width} do not match")

    def __xor__(self, other: "Bits") -> "Bits":
        self._check_width(other)
        return Bits(self.value ^ other.value, self.width)

    def __and__(self, other: "Bits") -> "Bits":
        self._check_width(other)
        return Bits(self.value & other.value, self.width)

    def __add__(self, other: "Bits") -> "Bits":
        """Concatenation"""
        if not isinstance(other, Bits):
            return NotImplemented
        return Bits((self.value << other.width) | other.value, self.width + other.width)

    @property
    def weight(self) -> int:
        return bin(self.value).count("1")

    def dot(self, other: "Bits") -> int:
        """Inner product over GF(2)"""
        self._check_width(other)
        return bin(self.value & other.value).count("1") & 1

    def flip(self, position: int) -> "Bits":
        if not 0 <= position < self.width:
            raise IndexError(f"Bit {position} outside width {self.width}")
        return Bits(self.value ^ (1 << (self.width - 1 - position)), self.width)

    def positions(self, bit: int = 1) -> List[int]:
        """Indices holding ``bit``"""
        text = str(self)
        wanted = "1" if bit else "0"
        return [i for i, char in enumerate(text) if char == wanted]

    def select(self, positions: Sequence[int]) -> "Bits":
        text = str(self)
        return Bits.from_str("".join(text[i] for i in positions))

    def split(self, widths: Sequence[int]) -> List["Bits"]:
        if sum(widths) != self.width:
            raise WidthMismatch(
                f"Cannot split {self.width} bits into parts of widths {list(widths)}"
            )
        text = str(self)
        parts = []
        offset = 0
        for width in widths:
            parts.append(Bits.from_str(text[offset : offset + width]))
            offset += width
        return parts

    def to_bytes(self) -> bytes:
        """Left aligned, zero padded to full bytes"""
        size = (self.width + 7) // 8
        return (self.value << (8 * size - self.width)).to_bytes(size, "big")

    def hex(self) -> str:
        digits = (self.width + 3) // 4
        return format(self.value, f"0{digits}x") if digits else ""


def encode_plaintext(message: Optional[Bits], width: int) -> Bits:
    """
    Encode a plaintext or ⊥ for a ``MSG`` register

    The leading bit is the ⊥ flag, followed by ``width`` message bits.
    """
    if message is None:
        return Bits(1 << width, width + 1)
    if message.width != width:
        raise WidthMismatch(
            f"Message of width {message.width} does not fit a {width} bit register"
        )
    return Bits(message.value, width + 1)


def decode_plaintext(register: Bits) -> Optional[Bits]:
    if register[0]:
        return None
    return register[1:]
