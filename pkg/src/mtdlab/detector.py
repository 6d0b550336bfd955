"""Bag-of-syscalls behavior learning and anomaly detection.

A container's runtime behavior is summarized by the multiset of system
call names inside a 10-call sliding window (a bag).  Training records
every bag seen in a clean trace into a normal-behavior database; at
detection time a window whose bag never occurred during training is a
mismatch, and an epoch with more mismatches than the threshold is
flagged anomalous.

Traces are processed epoch by epoch and windows never straddle an epoch
boundary, so per-epoch mismatch counts are self-contained.  Detection is
read-only: syscall names never seen in training map to a reserved
UNKNOWN index instead of growing the learned vocabulary.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Union

__all__ = [
    "WINDOW_SIZE",
    "TraceParseError",
    "DatabaseFormatError",
    "EmptyDatabaseError",
    "SyscallEvent",
    "SyscallIndexMap",
    "NormalBehaviorDb",
    "EpochConfig",
    "EpochRecord",
    "DetectionReport",
    "parse_trace",
    "train",
    "detect",
    "save_db",
    "load_db",
    "emit_anomaly_signal",
]

WINDOW_SIZE = 10
UNKNOWN_INDEX = 0

DB_MAGIC = "BOSCDB v1"
DB_SEPARATOR = "---"

# Canonical bag form: call-count vector indexed by the syscall index map
# (slot 0 = UNKNOWN) with trailing zeros dropped, so the same bag hashes
# identically before and after the vocabulary grows.
BagKey = tuple[int, ...]


class TraceParseError(ValueError):
    """Malformed trace line; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DatabaseFormatError(ValueError):
    """Corrupt, truncated, or wrong-version behavior database file."""


class EmptyDatabaseError(ValueError):
    """Detection requested against a database with no trained bags."""


# ───────────────────────────────────────────────────────────────────────
# Traces
# ───────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SyscallEvent:
    sequence_number: int
    name: str


def parse_trace(
    source: Union[IO[str], Iterable[str]],
    container_id: str | None = None,
) -> list[SyscallEvent]:
    """Parse a syscall trace: one call name per line.

    Blank lines and lines starting with '#' are skipped.  A line may also
    carry a container id as "container_id<TAB>syscall_name"; when
    container_id is given, only matching lines are kept.  Events are
    renumbered 0..n-1 in file order after filtering.

    Raises TraceParseError (with the line number) for lines that leave an
    empty token after trimming or have more than two TAB-separated fields.
    """
    events: list[SyscallEvent] = []
    for line_no, raw in enumerate(source, start=1):
        text = raw.rstrip("\r\n")
        stripped = text.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "\t" in text:
            fields = text.split("\t")
            if len(fields) != 2:
                raise TraceParseError(line_no, f"expected 2 tab-separated fields, got {len(fields)}")
            cid, name = (f.strip() for f in fields)
            if not cid:
                raise TraceParseError(line_no, "empty container id")
            if not name:
                raise TraceParseError(line_no, "empty syscall name")
            if container_id is not None and cid != container_id:
                continue
        else:
            name = stripped
            if container_id is not None:
                # single-column traces carry no id to filter on
                continue
        events.append(SyscallEvent(sequence_number=len(events), name=name))
    return events


# ───────────────────────────────────────────────────────────────────────
# Database
# ───────────────────────────────────────────────────────────────────────

class SyscallIndexMap:
    """Insertion-ordered map from syscall name to dense index.

    Index 0 is reserved for UNKNOWN (names never seen in training);
    known names get indices 1..n in first-seen order.
    """

    def __init__(self, tokens: Iterable[str] = ()):
        self._tokens: list[str] = []
        self._index: dict[str, int] = {}
        for token in tokens:
            self.add(token)

    def add(self, token: str) -> int:
        """Register a token if new; return its index either way."""
        idx = self._index.get(token)
        if idx is None:
            self._tokens.append(token)
            idx = len(self._tokens)
            self._index[token] = idx
        return idx

    def index_of(self, token: str) -> int:
        """Index of a token, UNKNOWN_INDEX (0) if never trained."""
        return self._index.get(token, UNKNOWN_INDEX)

    @property
    def tokens(self) -> tuple[str, ...]:
        return tuple(self._tokens)

    def __len__(self) -> int:
        return len(self._tokens)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SyscallIndexMap) and self._tokens == other._tokens


@dataclass
class NormalBehaviorDb:
    """Learned normal profile: bag -> observed frequency."""

    entries: dict[BagKey, int] = field(default_factory=dict)
    index_map: SyscallIndexMap = field(default_factory=SyscallIndexMap)
    window_size: int = WINDOW_SIZE
    traces_trained: int = 0

    @classmethod
    def empty(cls, window_size: int = WINDOW_SIZE) -> "NormalBehaviorDb":
        return cls(window_size=window_size)

    @property
    def total_frequency(self) -> int:
        """Total windows recorded across all training runs."""
        return sum(self.entries.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NormalBehaviorDb):
            return NotImplemented
        return (
            self.entries == other.entries
            and self.index_map == other.index_map
            and self.window_size == other.window_size
            and self.traces_trained == other.traces_trained
        )


@dataclass(frozen=True)
class EpochConfig:
    """Trace segmentation and flagging parameters."""

    epoch_size: int = 1000
    window_size: int = WINDOW_SIZE
    threshold: int = 10

    def __post_init__(self) -> None:
        if self.window_size < 1:
            raise ValueError(f"window_size must be >= 1, got {self.window_size}")
        if self.epoch_size < self.window_size:
            raise ValueError(
                f"epoch_size {self.epoch_size} must be >= window_size {self.window_size}"
            )
        if self.threshold < 1:
            raise ValueError(f"threshold must be >= 1, got {self.threshold}")


@dataclass(frozen=True)
class EpochRecord:
    epoch_index: int
    windows_evaluated: int
    mismatch_count: int
    anomalous: bool


@dataclass(frozen=True)
class DetectionReport:
    epochs: tuple[EpochRecord, ...]
    threshold: int

    @property
    def total_mismatches(self) -> int:
        return sum(e.mismatch_count for e in self.epochs)


def _bag_keys(indices: list[int], window_size: int):
    """Yield the canonical bag key of every full window, stride one.

    Maintains the count vector incrementally; the key is the vector
    truncated after its highest nonzero slot.
    """
    n = len(indices)
    if n < window_size:
        return
    width = max(indices) + 1
    counts = [0] * width
    for idx in indices[:window_size]:
        counts[idx] += 1
    top = width - 1
    while counts[top] == 0:
        top -= 1
    yield tuple(counts[: top + 1])
    for start in range(1, n - window_size + 1):
        out_idx = indices[start - 1]
        in_idx = indices[start + window_size - 1]
        counts[out_idx] -= 1
        counts[in_idx] += 1
        if in_idx > top:
            top = in_idx
        else:
            while counts[top] == 0:
                top -= 1
        yield tuple(counts[: top + 1])


def _epoch_slices(total: int, epoch_size: int) -> Iterable[tuple[int, int, int]]:
    """(epoch_index, start, end) for each epoch; the last may be short."""
    epoch = 0
    for start in range(0, total, epoch_size):
        yield epoch, start, min(start + epoch_size, total)
        epoch += 1


def train(
    events: Iterable[SyscallEvent],
    db: NormalBehaviorDb,
    config: EpochConfig = EpochConfig(),
) -> NormalBehaviorDb:
    """Fold one trace into the normal-behavior database.

    Every distinct-looking window bag either bumps an existing entry's
    frequency or lands as a new entry with frequency 1.  Names never seen
    before are appended to the index map.  Returns the same db, updated.
    """
    names = [e.name for e in events]
    indices = [db.index_map.add(name) for name in names]
    for _, start, end in _epoch_slices(len(indices), config.epoch_size):
        for key in _bag_keys(indices[start:end], config.window_size):
            db.entries[key] = db.entries.get(key, 0) + 1
    db.traces_trained += 1
    return db


def detect(
    events: Iterable[SyscallEvent],
    db: NormalBehaviorDb,
    config: EpochConfig = EpochConfig(),
) -> DetectionReport:
    """Score a trace against a trained database, epoch by epoch.

    A window whose bag is absent from the database is a mismatch; an
    epoch is anomalous when its mismatch count exceeds the threshold.
    The database is never modified: unknown names map to the reserved
    UNKNOWN index, which no trained bag contains.
    """
    if not db.entries:
        raise EmptyDatabaseError("cannot detect against an empty behavior database")
    names = [e.name for e in events]
    indices = [db.index_map.index_of(name) for name in names]
    records: list[EpochRecord] = []
    for epoch, start, end in _epoch_slices(len(indices), config.epoch_size):
        windows = 0
        mismatches = 0
        for key in _bag_keys(indices[start:end], config.window_size):
            windows += 1
            if key not in db.entries:
                mismatches += 1
        records.append(
            EpochRecord(
                epoch_index=epoch,
                windows_evaluated=windows,
                mismatch_count=mismatches,
                anomalous=mismatches > config.threshold,
            )
        )
    return DetectionReport(epochs=tuple(records), threshold=config.threshold)


def emit_anomaly_signal(report: DetectionReport) -> list[int]:
    """Ascending indices of the epochs flagged anomalous."""
    return [e.epoch_index for e in report.epochs if e.anomalous]


# ───────────────────────────────────────────────────────────────────────
# Persistence
# ───────────────────────────────────────────────────────────────────────

def _render_db(db: NormalBehaviorDb) -> str:
    lines = [DB_MAGIC]
    lines.append(
        f"# window_size={db.window_size} traces_trained={db.traces_trained}"
        f" entries={len(db.entries)}"
    )
    lines.extend(db.index_map.tokens)
    lines.append(DB_SEPARATOR)
    for key, freq in db.entries.items():
        lines.append(",".join(str(c) for c in key) + f":{freq}")
    return "\n".join(lines) + "\n"


def save_db(db: NormalBehaviorDb, destination: str | os.PathLike) -> None:
    """Write the database as a versioned single-file text format.

    Layout: magic line, one '#' metadata line, the known tokens one per
    line in index order, a "---" separator, then "counts:frequency"
    entries with the counts comma-separated in canonical (trimmed) form.
    """
    text = _render_db(db)
    tmp = f"{os.fspath(destination)}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, destination)


def load_db(source: str | os.PathLike) -> NormalBehaviorDb:
    """Load a database written by save_db; exact structural inverse.

    Raises DatabaseFormatError for a wrong magic line, missing metadata
    or separator, or any malformed entry; never returns a partial db.
    """
    with open(source, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != DB_MAGIC:
        raise DatabaseFormatError(f"bad magic line, expected {DB_MAGIC!r}")
    if len(lines) < 2 or not lines[1].startswith("#"):
        raise DatabaseFormatError("missing metadata line")
    meta = dict(
        item.split("=", 1) for item in lines[1].lstrip("#").split() if "=" in item
    )
    try:
        window_size = int(meta["window_size"])
        traces_trained = int(meta["traces_trained"])
        entry_count = int(meta["entries"])
    except (KeyError, ValueError) as exc:
        raise DatabaseFormatError(f"bad metadata line: {lines[1]!r}") from exc

    try:
        sep = lines.index(DB_SEPARATOR, 2)
    except ValueError:
        raise DatabaseFormatError("missing section separator") from None

    index_map = SyscallIndexMap(lines[2:sep])
    entries: dict[BagKey, int] = {}
    for line_no, line in enumerate(lines[sep + 1 :], start=sep + 2):
        try:
            counts_text, freq_text = line.rsplit(":", 1)
            key = tuple(int(c) for c in counts_text.split(","))
            freq = int(freq_text)
        except ValueError as exc:
            raise DatabaseFormatError(f"line {line_no}: malformed entry {line!r}") from exc
        if freq < 1 or any(c < 0 for c in key):
            raise DatabaseFormatError(f"line {line_no}: negative count or frequency")
        if sum(key) != window_size:
            raise DatabaseFormatError(
                f"line {line_no}: bag mass {sum(key)} != window size {window_size}"
            )
        if key[-1] == 0 or len(key) > len(index_map) + 1:
            raise DatabaseFormatError(f"line {line_no}: non-canonical bag {line!r}")
        entries[key] = freq
    if len(entries) != entry_count:
        raise DatabaseFormatError(
            f"entry count mismatch: header says {entry_count}, file has {len(entries)}"
        )
    return NormalBehaviorDb(
        entries=entries,
        index_map=index_map,
        window_size=window_size,
        traces_trained=traces_trained,
    )
