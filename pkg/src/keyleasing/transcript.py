"""
Game transcripts and reports

A transcript records, per trial, who did what with a SHA-256 digest of the payload.
Digests are computed from canonical encodings (bit strings, sorted state terms), so
the same seed gives byte-identical JSON.
"""
import hashlib
import json
from dataclasses import dataclass, field, is_dataclass, fields
from enum import Enum
from logging import getLogger
from typing import Any, Dict, List, Optional, Tuple

from scipy.stats import binomtest

from .bits import Bits
from .prims import Handle
from .qreg import SparseState

logger = getLogger(f"{__package__}.{__name__}")


class Verdict(str, Enum):
    WIN = "win"
    LOSE = "lose"
    ABORT = "abort"


def _feed(digest: Any, payload: Any) -> None:
    if payload is None:
        digest.update(b"N")
    elif isinstance(payload, Bits):
        digest.update(f"B{payload.width}:{payload.hex()};".encode())
    elif isinstance(payload, SparseState):
        digest.update(f"S{payload.layout.segments!r}".encode())
        for key, amplitude in sorted(payload.items()):
            parts = ",".join(format(v, "x") for v in key)
            digest.update(
                f"{parts}={amplitude.real:.12e},{amplitude.imag:.12e};".encode()
            )
    elif isinstance(payload, Handle):
        digest.update(f"H{type(payload).__name__}:{payload.handle};".encode())
    elif isinstance(payload, (bool, int, float, str, Enum)):
        digest.update(f"V{payload!r};".encode())
    elif isinstance(payload, (list, tuple)):
        digest.update(b"[")
        for item in payload:
            _feed(digest, item)
        digest.update(b"]")
    elif isinstance(payload, dict):
        digest.update(b"{")
        for key in sorted(payload, key=str):
            _feed(digest, str(key))
            _feed(digest, payload[key])
        digest.update(b"}")
    elif is_dataclass(payload):
        digest.update(f"D{type(payload).__name__}(".encode())
        for item in fields(payload):
            _feed(digest, item.name)
            _feed(digest, getattr(payload, item.name))
        digest.update(b")")
    else:
        digest.update(f"O{type(payload).__name__};".encode())


def payload_digest(payload: Any) -> str:
    digest = hashlib.sha256()
    _feed(digest, payload)
    return digest.hexdigest()


@dataclass(frozen=True)
class TranscriptEvent:
    actor: str
    action: str
    digest: str


@dataclass
class TrialRecord:
    index: int
    seed: int
    events: List[TranscriptEvent] = field(default_factory=list)
    verdict: Optional[Verdict] = None
    flags: List[bool] = field(default_factory=list)
    checks: Dict[str, bool] = field(default_factory=dict)

    def log(self, actor: str, action: str, payload: Any = None) -> None:
        self.events.append(TranscriptEvent(actor, action, payload_digest(payload)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "verdict": self.verdict.value if self.verdict else None,
            "flags": self.flags,
            "checks": self.checks,
            "events": [[e.actor, e.action, e.digest] for e in self.events],
        }


@dataclass
class GameTranscript:
    game: str
    scheme: str
    params: Dict[str, Any]
    seed: int
    trials: List[TrialRecord] = field(default_factory=list)

    def digest(self) -> str:
        digest = hashlib.sha256()
        for trial in self.trials:
            verdict = trial.verdict.value if trial.verdict else "-"
            digest.update(f"{trial.index}:{verdict};".encode())
            for event in trial.events:
                digest.update(f"{event.actor}|{event.action}|{event.digest};".encode())
        return digest.hexdigest()


def wilson_interval(successes: int, trials: int) -> Tuple[float, float]:
    """Wilson score 95% interval"""
    if trials == 0:
        return 0.0, 1.0
    interval = binomtest(successes, trials).proportion_ci(
        confidence_level=0.95, method="wilson"
    )
    return float(interval.low), float(interval.high)


@dataclass
class GameReport:
    transcript: GameTranscript

    @property
    def trials(self) -> int:
        return len(self.transcript.trials)

    @property
    def wins(self) -> int:
        return sum(t.verdict is Verdict.WIN for t in self.transcript.trials)

    @property
    def aborts(self) -> int:
        return sum(t.verdict is Verdict.ABORT for t in self.transcript.trials)

    @property
    def win_rate(self) -> float:
        return self.wins / self.trials if self.trials else 0.0

    def pass_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for trial in self.transcript.trials:
            for name, passed in trial.checks.items():
                counts[name] = counts.get(name, 0) + int(passed)
        return counts

    def pass_rates(self) -> Dict[str, float]:
        return {
            name: count / self.trials for name, count in self.pass_counts().items()
        }

    def pass_rate(self, check: str) -> float:
        return self.pass_rates().get(check, 0.0)

    @property
    def ci95(self) -> Tuple[float, float]:
        return wilson_interval(self.wins, self.trials)

    def to_dict(self, with_events: bool = False) -> Dict[str, Any]:
        data = {
            "game": self.transcript.game,
            "scheme": self.transcript.scheme,
            "params": self.transcript.params,
            "seed": self.transcript.seed,
            "trials": self.trials,
            "wins": self.wins,
            "aborts": self.aborts,
            "win_rate": self.win_rate,
            "pass_counts": self.pass_counts(),
            "pass_rates": self.pass_rates(),
            "ci95": list(self.ci95),
            "verdicts": "".join(
                t.verdict.value[0].upper() if t.verdict else "-"
                for t in self.transcript.trials
            ),
            "transcript_sha256": self.transcript.digest(),
        }
        if with_events:
            data["events"] = [t.to_dict() for t in self.transcript.trials]
        return data

    def to_json(self, with_events: bool = False) -> str:
        return json.dumps(self.to_dict(with_events), sort_keys=True, indent=2)
