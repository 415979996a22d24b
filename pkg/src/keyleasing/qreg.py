"""
Sparse statevector engine

Quantum keys and ciphertexts are superpositions over a handful of basis strings, and
every scheme circuit is a basis permutation (XOR oracle) followed by measurements.
A :class:`SparseState` therefore keeps an explicit map basis key -> amplitude, where
the basis key holds one integer per register segment.

Hadamard-basis measurement never enumerates 2^w outcomes: the differences of the
measured strings span a GF(2) space of rank r and the outcome distribution only
depends on the r parities against its basis, so the 2^r parity classes are
computed with a Walsh-Hadamard transform, a class is drawn, and the outcome is drawn
uniformly among the strings with those parities.
"""
import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from logging import getLogger
from types import MappingProxyType
from typing import (
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from .bits import Bits, decode_plaintext, encode_plaintext
from .custom_types import BasisKey
from .exceptions import (
    DenseLimitExceeded,
    HadamardCapExceeded,
    LayoutError,
    SimulationError,
    TermCapExceeded,
    WidthMismatch,
)
from .gf2 import XorBasis, parity, walsh_hadamard
from .rng import RandomStream

logger = getLogger(f"{__package__}.{__name__}")

DEFAULT_TERM_CAP = 2 ** 20
DEFAULT_RANK_LIMIT = 20
DEFAULT_HADAMARD_CAP = 20
DENSE_LIMIT = 24
NORM_TOLERANCE = 1e-9
PRUNE_THRESHOLD = 1e-12

Segments = Union[str, Sequence[str]]
Oracle = Callable[[Bits], Bits]


def _names(segments: Segments) -> Tuple[str, ...]:
    if isinstance(segments, str):
        return (segments,)
    return tuple(segments)


@dataclass(frozen=True)
class RegisterLayout:
    segments: Tuple[Tuple[str, int], ...]
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        segments = tuple((str(name), int(width)) for name, width in self.segments)
        object.__setattr__(self, "segments", segments)
        index: Dict[str, int] = {}
        for position, (name, width) in enumerate(segments):
            if name in index:
                raise LayoutError(f"Segment name '{name}' used twice")
            if width < 1:
                raise LayoutError(f"Segment '{name}' has width {width} < 1")
            index[name] = position
        object.__setattr__(self, "_index", index)

    @classmethod
    def of(cls, *segments: Tuple[str, int]) -> "RegisterLayout":
        return cls(tuple(segments))

    def __len__(self) -> int:
        return len(self.segments)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.segments)

    @property
    def widths(self) -> Tuple[int, ...]:
        return tuple(width for _, width in self.segments)

    @property
    def total_bits(self) -> int:
        return sum(self.widths)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise LayoutError(f"No segment '{name}' in layout {self.names}")

    def width(self, name: str) -> int:
        return self.segments[self.index(name)][1]

    def split(self, bits: Bits) -> Dict[str, Bits]:
        """Cut a basis string over the whole layout into its segments"""
        if bits.width != self.total_bits:
            raise LayoutError(
                f"Basis string of {bits.width} bits for a {self.total_bits} bit layout"
            )
        return dict(zip(self.names, bits.split(self.widths)))

    def join(self, values: Mapping[str, Bits]) -> Bits:
        return Bits.concat(values[name] for name in self.names)

    def key_of(self, bits: Bits) -> BasisKey:
        return tuple(part.value for part in self.split(bits).values())

    def bits_of(self, key: BasisKey) -> Bits:
        return Bits.from_str(
            "".join(format(v, f"0{w}b") for v, w in zip(key, self.widths))
        )

    def extend(self, other: "RegisterLayout") -> "RegisterLayout":
        return RegisterLayout(self.segments + other.segments)

    def without(self, names: Segments) -> "RegisterLayout":
        dropped = set(_names(names))
        for name in dropped:
            self.index(name)
        return RegisterLayout(
            tuple(segment for segment in self.segments if segment[0] not in dropped)
        )


class Basis(str, Enum):
    COMPUTATIONAL = "computational"
    HADAMARD = "hadamard"


@dataclass(frozen=True)
class MeasurementOutcome:
    bits: Bits
    basis: Basis
    segments: Tuple[Tuple[str, int], ...]

    def __post_init__(self) -> None:
        if self.bits.width != sum(width for _, width in self.segments):
            raise WidthMismatch("Outcome width does not match the measured segments")

    def part(self, name: str) -> Bits:
        """Outcome bits belonging to one of the measured segments"""
        offset = 0
        for segment, width in self.segments:
            if segment == name:
                return self.bits[offset : offset + width]
            offset += width
        raise LayoutError(f"Segment '{name}' was not measured")


class SparseState:
    """
    Normalized superposition ``Σ α_k |k⟩`` over the basis keys of a layout

    States are values: every operation returns a new state.
    """

    __slots__ = ("layout", "_terms", "term_cap")

    def __init__(
        self,
        layout: RegisterLayout,
        terms: Mapping[BasisKey, complex],
        *,
        term_cap: int = DEFAULT_TERM_CAP,
    ) -> None:
        self.layout = layout
        self.term_cap = term_cap
        kept: Dict[BasisKey, complex] = {}
        norm_squared = 0.0
        segment_count = len(layout)
        for key, amplitude in terms.items():
            amplitude = complex(amplitude)
            if abs(amplitude) < PRUNE_THRESHOLD:
                continue
            if len(key) != segment_count:
                raise LayoutError(
                    f"Basis key with {len(key)} parts for {segment_count} segments"
                )
            kept[key] = amplitude
            norm_squared += abs(amplitude) ** 2
        if len(kept) > term_cap:
            raise TermCapExceeded(
                f"State with {len(kept)} terms exceeds the term cap {term_cap}"
            )
        if norm_squared == 0.0:
            raise SimulationError("State has no amplitude left")
        norm = math.sqrt(norm_squared)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            kept = {key: amplitude / norm for key, amplitude in kept.items()}
        self._terms = kept

    def __repr__(self) -> str:
        return f"<SparseState {self.layout.names} terms={len(self)}>"

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def terms(self) -> Mapping[BasisKey, complex]:
        return MappingProxyType(self._terms)

    def items(self) -> Iterator[Tuple[BasisKey, complex]]:
        return iter(self._terms.items())

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._terms.values()))

    def amplitude(self, bits: Union[str, Bits]) -> complex:
        if isinstance(bits, str):
            bits = Bits.from_str(bits)
        return self._terms.get(self.layout.key_of(bits), 0j)

    def basis_strings(self) -> Iterator[Bits]:
        """Every basis string in the support, as one string over the whole layout"""
        for key in self._terms:
            yield self.layout.bits_of(key)

    def segment_values(self, name: str) -> List[Bits]:
        position = self.layout.index(name)
        width = self.layout.width(name)
        return [Bits(v, width) for v in sorted({k[position] for k in self._terms})]

    def segment_bits(self, key: BasisKey, name: str) -> Bits:
        return Bits(key[self.layout.index(name)], self.layout.width(name))

    def replace(self, layout: RegisterLayout, terms: Mapping[BasisKey, complex]):
        return SparseState(layout, terms, term_cap=self.term_cap)

    def to_dict(self) -> dict:
        terms = sorted(
            (str(self.layout.bits_of(key)), amplitude)
            for key, amplitude in self._terms.items()
        )
        return {
            "layout": [
                {"name": name, "width": width} for name, width in self.layout.segments
            ],
            "terms": [
                {"bits": bits, "re": amplitude.real, "im": amplitude.imag}
                for bits, amplitude in terms
            ],
        }


def state_to_json(state: SparseState, indent: Optional[int] = None) -> str:
    """Debug dump; a simulation artifact, not a transmittable encoding"""
    return json.dumps(state.to_dict(), indent=indent)


def state_from_json(text: str) -> SparseState:
    data = json.loads(text)
    layout = RegisterLayout(
        tuple((segment["name"], segment["width"]) for segment in data["layout"])
    )
    terms = {
        layout.key_of(Bits.from_str(term["bits"])): complex(term["re"], term["im"])
        for term in data["terms"]
    }
    return SparseState(layout, terms)


def basis_state(
    layout: RegisterLayout, bits: Union[str, Bits], *, term_cap: int = DEFAULT_TERM_CAP
) -> SparseState:
    if isinstance(bits, str):
        bits = Bits.from_str(bits)
    return SparseState(layout, {layout.key_of(bits): 1.0}, term_cap=term_cap)


def qubit_names(count: int, prefix: str = "Q") -> List[str]:
    return [f"{prefix}_{i}" for i in range(1, count + 1)]


def prepare_bb84(
    x: Bits,
    theta: Bits,
    names: Optional[Sequence[str]] = None,
    *,
    hadamard_cap: int = DEFAULT_HADAMARD_CAP,
    term_cap: int = DEFAULT_TERM_CAP,
) -> SparseState:
    """
    BB84 state: qubit i is |x[i]⟩ if θ[i]=0, else (|0⟩+(-1)^{x[i]}|1⟩)/√2
    """
    if x.width != theta.width:
        raise WidthMismatch(f"|x|={x.width} but |θ|={theta.width}")
    if theta.weight > hadamard_cap:
        raise HadamardCapExceeded(
            f"{theta.weight} Hadamard positions exceed the cap {hadamard_cap}"
        )
    names = list(names) if names is not None else qubit_names(x.width)
    if len(names) != x.width:
        raise LayoutError(f"{len(names)} segment names for {x.width} qubits")
    layout = RegisterLayout(tuple((name, 1) for name in names))
    options = []
    for bit, basis in zip(x, theta):
        if basis:
            options.append(((0, 1), (1, -1 if bit else 1)))
        else:
            options.append(((bit, 1),))
    scale = 2 ** (-theta.weight / 2)
    terms = {}
    for choice in itertools.product(*options):
        sign = 1
        for _, factor in choice:
            sign *= factor
        terms[tuple(value for value, _ in choice)] = sign * scale
    return SparseState(layout, terms, term_cap=term_cap)


def tensor(*states: SparseState) -> SparseState:
    """Product state; segment names must be disjoint"""
    layout = states[0].layout
    for state in states[1:]:
        layout = layout.extend(state.layout)
    cap = min(state.term_cap for state in states)
    count = math.prod(len(state) for state in states)
    if count > cap:
        raise TermCapExceeded(f"Product with {count} terms exceeds the term cap {cap}")
    terms = {}
    for parts in itertools.product(*(state.items() for state in states)):
        key: BasisKey = ()
        amplitude = 1 + 0j
        for part_key, part_amplitude in parts:
            key += part_key
            amplitude *= part_amplitude
        terms[key] = amplitude
    return SparseState(layout, terms, term_cap=cap)


def reorder(state: SparseState, names: Sequence[str]) -> SparseState:
    """Permute the segments into the given order"""
    if sorted(names) != sorted(state.layout.names):
        raise LayoutError(f"{list(names)} is not a permutation of {state.layout.names}")
    order = [state.layout.index(name) for name in names]
    layout = RegisterLayout(tuple(state.layout.segments[i] for i in order))
    return state.replace(
        layout, {tuple(key[i] for i in order): a for key, a in state.items()}
    )


def add_register(
    state: SparseState, name: str, width: int, value: Optional[Bits] = None
) -> SparseState:
    """Append a fresh register holding ``value`` (default all zero)"""
    value = value if value is not None else Bits.zeros(width)
    if value.width != width:
        raise WidthMismatch(f"Initial value of width {value.width} for {width} bits")
    layout = state.layout.extend(RegisterLayout.of((name, width)))
    return state.replace(layout, {key + (value.value,): a for key, a in state.items()})


def drop_register(state: SparseState, name: str) -> SparseState:
    """Remove a register that holds the same value in every term"""
    position = state.layout.index(name)
    if len({key[position] for key in state.terms}) != 1:
        raise LayoutError(f"Register '{name}' is entangled and cannot be dropped")
    return state.replace(
        state.layout.without(name),
        {key[:position] + key[position + 1 :]: a for key, a in state.items()},
    )


def _packer(
    layout: RegisterLayout, names: Sequence[str]
) -> Callable[[Sequence[int]], int]:
    positions = [layout.index(name) for name in names]
    widths = [layout.width(name) for name in names]
    if len(positions) == 1:
        only = positions[0]
        return lambda key: key[only]

    def pack(key: Sequence[int]) -> int:
        return int(
            "".join(format(key[p], f"0{w}b") for p, w in zip(positions, widths)), 2
        )

    return pack


def apply_xor_oracles(
    state: SparseState, oracles: Sequence[Tuple[Segments, str, Oracle]]
) -> SparseState:
    """
    Apply ``|src⟩|dst⟩ -> |src⟩|dst ⊕ g(src)⟩`` for every (src, dst, g)

    All oracles are applied in a single pass over the terms.
    """
    layout = state.layout
    prepared = []
    for src, dst, g in oracles:
        src_names = _names(src)
        if dst in src_names:
            raise LayoutError(f"Oracle source {src_names} overlaps destination '{dst}'")
        src_width = sum(layout.width(name) for name in src_names)
        prepared.append(
            (
                _packer(layout, src_names),
                src_width,
                layout.index(dst),
                layout.width(dst),
                g,
            )
        )
    terms: Dict[BasisKey, complex] = {}
    for key, amplitude in state.items():
        values = list(key)
        for pack, src_width, dst_position, dst_width, g in prepared:
            output = g(Bits(pack(values), src_width))
            if output.width != dst_width:
                raise WidthMismatch(
                    f"Oracle returned {output.width} bits "
                    f"for a {dst_width} bit register"
                )
            values[dst_position] ^= output.value
        terms[tuple(values)] = amplitude
    if len(terms) != len(state):
        raise SimulationError("XOR oracle did not act as a permutation")
    return state.replace(layout, terms)


def apply_xor_oracle(
    state: SparseState, src: Segments, dst: str, g: Oracle
) -> SparseState:
    return apply_xor_oracles(state, [(src, dst, g)])


def apply_phase_flip(
    state: SparseState, src: Segments, predicate: Callable[[Bits], int]
) -> SparseState:
    """Multiply each term by (-1)^{predicate(src)}"""
    src_names = _names(src)
    pack = _packer(state.layout, src_names)
    width = sum(state.layout.width(name) for name in src_names)
    return state.replace(
        state.layout,
        {
            key: (-a if predicate(Bits(pack(key), width)) & 1 else a)
            for key, a in state.items()
        },
    )


def _choose(rng: RandomStream, probabilities: Sequence[float]) -> int:
    weights = np.asarray(probabilities, dtype=float)
    weights[weights < PRUNE_THRESHOLD ** 2] = 0.0
    return int(rng.choice(len(weights), p=weights / weights.sum()))


def measure_computational(
    state: SparseState, segments: Segments, rng: RandomStream
) -> Tuple[MeasurementOutcome, SparseState]:
    names = _names(segments)
    positions = [state.layout.index(name) for name in names]
    weights: Dict[Tuple[int, ...], float] = defaultdict(float)
    for key, amplitude in state.items():
        weights[tuple(key[p] for p in positions)] += abs(amplitude) ** 2
    outcomes = sorted(weights)
    picked = outcomes[_choose(rng, [weights[o] for o in outcomes])]
    post = state.replace(
        state.layout,
        {
            key: a
            for key, a in state.items()
            if tuple(key[p] for p in positions) == picked
        },
    )
    segment_widths = tuple((name, state.layout.width(name)) for name in names)
    bits = Bits.concat(Bits(v, w) for v, (_, w) in zip(picked, segment_widths))
    logger.debug(f"Computational measurement of {names} gave {bits}")
    return MeasurementOutcome(bits, Basis.COMPUTATIONAL, segment_widths), post


def _rest_key(key: BasisKey, dropped: Iterable[int]) -> BasisKey:
    dropped = set(dropped)
    return tuple(v for i, v in enumerate(key) if i not in dropped)


def measure_hadamard(
    state: SparseState,
    segments: Segments,
    rng: RandomStream,
    *,
    rank_limit: int = DEFAULT_RANK_LIMIT,
) -> Tuple[MeasurementOutcome, SparseState]:
    """
    Measure one or more segments jointly in the Hadamard basis

    The measured segments are removed from the post-measurement state. If every
    segment is measured, the post-state lives on the empty layout.

    Raises:
        RankLimitExceeded: more than ``rank_limit`` independent differences
    """
    names = _names(segments)
    layout = state.layout
    positions = [layout.index(name) for name in names]
    segment_widths = tuple((name, layout.width(name)) for name in names)
    width = sum(w for _, w in segment_widths)
    pack = _packer(layout, names)

    items = list(state.items())
    strings = [pack(key) for key, _ in items]
    reference = strings[0]
    basis = XorBasis(limit=rank_limit)
    for string in strings:
        basis.add(string ^ reference)
    rank = basis.rank
    classes = [basis.coordinates(string ^ reference) for string in strings]

    groups: Dict[BasisKey, np.ndarray] = {}
    for (key, amplitude), coordinate in zip(items, classes):
        rest = _rest_key(key, positions)
        if rest not in groups:
            groups[rest] = np.zeros(2 ** rank, dtype=complex)
        groups[rest][coordinate] += amplitude
    probabilities = np.zeros(2 ** rank)
    for vector in groups.values():
        probabilities += np.abs(walsh_hadamard(vector)) ** 2
    parities = _choose(rng, probabilities)
    outcome = basis.sample_solution(parities, rng, width)

    reference_sign = parity(outcome & reference)
    post_terms: Dict[BasisKey, complex] = defaultdict(complex)
    for (key, amplitude), coordinate in zip(items, classes):
        sign = reference_sign ^ parity(coordinate & parities)
        post_terms[_rest_key(key, positions)] += -amplitude if sign else amplitude
    post = state.replace(layout.without(names), post_terms)
    logger.debug(f"Hadamard measurement of {len(names)} segments, rank {rank}")
    result = MeasurementOutcome(Bits(outcome, width), Basis.HADAMARD, segment_widths)
    return result, post


def trace_out(state: SparseState, segments: Segments, rng: RandomStream) -> SparseState:
    """Discard segments; modelled as an unrecorded computational measurement"""
    names = _names(segments)
    _, measured = measure_computational(state, names, rng)
    positions = [state.layout.index(name) for name in names]
    return measured.replace(
        state.layout.without(names),
        {_rest_key(key, positions): a for key, a in measured.items()},
    )


def measure_function(
    state: SparseState,
    src: Segments,
    g: Callable[[Bits], Optional[Bits]],
    width: int,
    rng: RandomStream,
    *,
    ancilla: str = "MSG",
) -> Tuple[Optional[Bits], SparseState]:
    """
    Compute ``g(src)`` into a fresh ancilla, measure it and discard the ancilla

    ``g`` may return ⊥ (None); the ancilla carries a ⊥ flag bit in front of
    ``width`` value bits. When ``g`` is constant on the support the state comes back
    unchanged.
    """
    with_ancilla = add_register(state, ancilla, width + 1)
    computed = apply_xor_oracle(
        with_ancilla, src, ancilla, lambda u: encode_plaintext(g(u), width)
    )
    outcome, measured = measure_computational(computed, ancilla, rng)
    return decode_plaintext(outcome.bits), drop_register(measured, ancilla)


def states_equal(a: SparseState, b: SparseState, tol: float = NORM_TOLERANCE) -> bool:
    """|⟨a|b⟩| ≥ 1 - tol, global phase ignored"""
    if a.layout.segments != b.layout.segments:
        raise LayoutError(
            f"Cannot compare states over {a.layout.names} and {b.layout.names}"
        )
    overlap = sum(
        amplitude.conjugate() * b.terms.get(key, 0j) for key, amplitude in a.items()
    )
    return abs(overlap) >= 1 - tol


def dense_oracle(state: SparseState, limit: int = DENSE_LIMIT) -> np.ndarray:
    """Exact dense amplitude vector, big-endian over the layout's basis strings"""
    total = state.layout.total_bits
    if total > limit:
        raise DenseLimitExceeded(f"{total} bits exceed the dense limit {limit}")
    vector = np.zeros(2 ** total, dtype=complex)
    pack = _packer(state.layout, state.layout.names) if len(state.layout) else None
    for key, amplitude in state.items():
        vector[pack(key) if pack else 0] = amplitude
    return vector


_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def dense_distribution(
    state: SparseState, segments: Segments, basis: Basis = Basis.COMPUTATIONAL
) -> Dict[str, float]:
    """Distribution of measuring ``segments`` in ``basis``, from the dense vector"""
    names = _names(segments)
    layout = state.layout
    total = layout.total_bits
    tensor_state = dense_oracle(state).reshape([2] * total)
    offsets = {}
    offset = 0
    for name, width in layout.segments:
        offsets[name] = offset
        offset += width
    axes = [offsets[name] + i for name in names for i in range(layout.width(name))]
    if basis is Basis.HADAMARD:
        for axis in axes:
            tensor_state = np.moveaxis(
                np.tensordot(_HADAMARD, tensor_state, axes=([1], [axis])), 0, axis
            )
    probabilities = np.abs(tensor_state) ** 2
    others = tuple(axis for axis in range(total) if axis not in axes)
    marginal = probabilities.sum(axis=others) if others else probabilities
    kept_order = [axis for axis in range(total) if axis in axes]
    marginal = np.transpose(marginal, [kept_order.index(axis) for axis in axes])
    distribution = {}
    for index, probability in enumerate(marginal.reshape(-1)):
        if probability > PRUNE_THRESHOLD:
            distribution[format(index, f"0{len(axes)}b")] = float(probability)
    return distribution
