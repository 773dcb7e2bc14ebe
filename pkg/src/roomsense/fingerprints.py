"""The radio map: labeled RSSI vectors, CSV persistence and train/test split."""

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import EmptyClass, ParseError, ShapeError
from .macaddr import MacAddress


@dataclass(frozen=True)
class LabeledSample:
    rssi: tuple
    room: int

    def __post_init__(self):
        object.__setattr__(self, "rssi", tuple(int(v) for v in self.rssi))
        if self.room < 1:
            raise ValueError(f"room id must be >= 1, got {self.room}")


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie in (0, 1)")


class FingerprintDatabase:
    """Ordered AP list plus samples whose vectors all have one reading per AP.

    Treat instances as immutable; operations return new databases.
    """

    def __init__(self, ap_macs, samples=()):
        self.ap_macs = tuple(ap_macs)
        self.samples = tuple(samples)
        width = len(self.ap_macs)
        for s in self.samples:
            if len(s.rssi) != width:
                raise ShapeError(f"sample has {len(s.rssi)} readings, database has {width} APs")

    def __len__(self):
        return len(self.samples)

    def __eq__(self, other):
        if not isinstance(other, FingerprintDatabase):
            return NotImplemented
        return self.ap_macs == other.ap_macs and self.samples == other.samples

    def __repr__(self):
        return f"FingerprintDatabase(aps={len(self.ap_macs)}, samples={len(self.samples)})"

    @property
    def rooms(self) -> list:
        return sorted({s.room for s in self.samples})

    def matrix(self):
        """Readings as an (n, n_aps) int array and labels as an (n,) int array."""
        X = np.array([s.rssi for s in self.samples], dtype=np.int64).reshape(-1, len(self.ap_macs))
        y = np.array([s.room for s in self.samples], dtype=np.int64)
        return X, y

    def subset(self, indices) -> "FingerprintDatabase":
        return FingerprintDatabase(self.ap_macs, [self.samples[i] for i in indices])


def class_counts(db: FingerprintDatabase) -> dict:
    return dict(sorted(Counter(s.room for s in db.samples).items()))


def _round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def stratified_train_counts(counts: dict, train_fraction: float) -> dict:
    """Per-class train sizes by the largest-remainder rule.

    The total is ``round_half_up(f * n)``; each class gets ``floor(f * n_k)``
    and the leftover slots go to the classes with the largest fractional
    parts (ties to the lowest room id). Each class is therefore within one
    sample of its exact share and the total is within one of ``f * n``.
    """
    f = Fraction(train_fraction).limit_denominator(10**9)
    exact = {room: f * n for room, n in counts.items()}
    alloc = {room: math.floor(v) for room, v in exact.items()}
    target = _round_half_up(f * sum(counts.values()))
    leftover = target - sum(alloc.values())
    order = sorted(exact, key=lambda room: (-(exact[room] - alloc[room]), room))
    for room in order[:leftover]:
        alloc[room] += 1
    return alloc


def split(db: FingerprintDatabase, spec: SplitSpec = SplitSpec()):
    """Shuffle-then-partition into ``(train, test)``; both keep the input order."""
    from .rng import stream

    rng = stream(spec.seed, "split")
    n = len(db)
    if spec.stratified:
        counts = class_counts(db)
        small = [room for room, c in counts.items() if c < 2]
        if small:
            raise EmptyClass(f"rooms {small} have fewer than 2 samples; cannot stratify")
        train_counts = stratified_train_counts(counts, spec.train_fraction)
        train_idx = []
        for room in counts:
            members = [i for i, s in enumerate(db.samples) if s.room == room]
            perm = rng.permutation(len(members))
            train_idx.extend(members[j] for j in perm[:train_counts[room]])
    else:
        f = Fraction(spec.train_fraction).limit_denominator(10**9)
        perm = rng.permutation(n)
        train_idx = list(perm[:_round_half_up(f * n)])
    chosen = set(int(i) for i in train_idx)
    train = db.subset(sorted(chosen))
    test = db.subset([i for i in range(n) if i not in chosen])
    return train, test


def save_csv(db: FingerprintDatabase, path) -> None:
    lines = [",".join([*(str(m) for m in db.ap_macs), "room"])]
    for s in db.samples:
        lines.append(",".join([*(str(v) for v in s.rssi), str(s.room)]))
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def load_csv(path) -> FingerprintDatabase:
    text = Path(path).read_bytes().decode("utf-8")
    rows = text.split("\n")
    if rows and rows[-1] == "":
        rows.pop()
    if not rows:
        raise ParseError("missing header", line=1)
    header = rows[0].split(",")
    if header[-1] != "room":
        raise ParseError("last header column must be 'room'", line=1)
    try:
        macs = [MacAddress.parse(h) for h in header[:-1]]
    except ValueError as exc:
        raise ParseError(str(exc), line=1) from None
    width = len(macs) + 1
    samples = []
    for lineno, row in enumerate(rows[1:], start=2):
        cells = row.split(",")
        if len(cells) != width:
            raise ShapeError(f"line {lineno}: expected {width} cells, got {len(cells)}")
        try:
            values = [int(c) for c in cells]
        except ValueError:
            raise ParseError(f"non-integer cell in {row!r}", line=lineno) from None
        try:
            samples.append(LabeledSample(values[:-1], values[-1]))
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
    return FingerprintDatabase(macs, samples)
