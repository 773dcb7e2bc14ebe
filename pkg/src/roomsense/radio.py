"""Floorplan geometry and log-distance RSSI synthesis."""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .macaddr import MacAddress


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def distance(self, other: "Point2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Room:
    id: int
    min: Point2D
    max: Point2D

    def __post_init__(self):
        if self.id < 1:
            raise ValueError(f"room id must be >= 1, got {self.id}")
        if not (self.min.x < self.max.x and self.min.y < self.max.y):
            raise ValueError(f"room {self.id} has an empty rectangle")

    def contains(self, p: Point2D) -> bool:
        # closed on min edges, open on max edges
        return self.min.x <= p.x < self.max.x and self.min.y <= p.y < self.max.y

    @property
    def center(self) -> Point2D:
        return Point2D((self.min.x + self.max.x) / 2, (self.min.y + self.max.y) / 2)

    def overlaps(self, other: "Room") -> bool:
        return (self.min.x < other.max.x and other.min.x < self.max.x
                and self.min.y < other.max.y and other.min.y < self.max.y)


@dataclass(frozen=True)
class AccessPoint:
    index: int
    mac: MacAddress
    position: Point2D
    tx_power: float


@dataclass(frozen=True)
class PathLossParams:
    pl0: float = 40.0
    exponent: float = 3.0
    shadow_sigma: float = 2.0
    floor: int = -100
    ceiling: int = -30

    def __post_init__(self):
        if self.exponent < 1:
            raise ValueError("path-loss exponent must be >= 1")
        if self.shadow_sigma < 0:
            raise ValueError("shadow_sigma must be >= 0")
        if not self.floor < self.ceiling:
            raise ValueError("floor must be below ceiling")


@dataclass(frozen=True)
class RadioEnvironment:
    floorplan: tuple
    aps: tuple
    params: PathLossParams = field(default_factory=PathLossParams)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "floorplan", tuple(self.floorplan))
        object.__setattr__(self, "aps", tuple(self.aps))
        if not self.floorplan or not self.aps:
            raise ValueError("environment needs at least one room and one access point")
        ids = [r.id for r in self.floorplan]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate room ids")
        for i, a in enumerate(self.floorplan):
            for b in self.floorplan[i + 1:]:
                if a.overlaps(b):
                    raise ValueError(f"rooms {a.id} and {b.id} overlap")
        if [ap.index for ap in self.aps] != list(range(len(self.aps))):
            raise ValueError("access point indices must be 0..N-1 in order")
        macs = [ap.mac for ap in self.aps]
        if len(set(macs)) != len(macs):
            raise ValueError("duplicate access point MACs")

    @property
    def ap_macs(self) -> list:
        return [ap.mac for ap in self.aps]

    @property
    def room_ids(self) -> list:
        return [r.id for r in self.floorplan]


def mean_rssi(params: PathLossParams, ap: AccessPoint, p: Point2D) -> float:
    """Noise-free received power in dBm before quantization and clamping."""
    d = max(ap.position.distance(p), 1.0)
    return ap.tx_power - params.pl0 - 10.0 * params.exponent * math.log10(d)


def rssi_at(env: RadioEnvironment, ap: AccessPoint, p: Point2D, rng: np.random.Generator) -> int:
    """One integer-dBm reading of ``ap`` at ``p`` with Gaussian shadowing.

    Rounds half up and clamps to ``[floor, ceiling]``. No randomness is drawn
    when ``shadow_sigma`` is zero.
    """
    params = env.params
    value = mean_rssi(params, ap, p)
    if params.shadow_sigma > 0:
        value += rng.normal(0.0, params.shadow_sigma)
    reading = math.floor(value + 0.5)
    return int(min(max(reading, params.floor), params.ceiling))


def sample_vector(env: RadioEnvironment, p: Point2D, rng: np.random.Generator) -> tuple:
    return tuple(rssi_at(env, ap, p, rng) for ap in env.aps)


def room_of(floorplan, p: Point2D):
    for room in floorplan:
        if room.contains(p):
            return room.id
    return None


def collect_fingerprints(env: RadioEnvironment, samples_per_room: int, rng: np.random.Generator):
    """Offline survey: uniform points per room, room-major order.

    Returns a list of ``LabeledSample``.
    """
    from .fingerprints import LabeledSample

    if samples_per_room < 1:
        raise ValueError("samples_per_room must be >= 1")
    out = []
    for room in env.floorplan:
        for _ in range(samples_per_room):
            x = rng.uniform(room.min.x, room.max.x)
            y = rng.uniform(room.min.y, room.max.y)
            p = Point2D(float(x), float(y))
            out.append(LabeledSample(sample_vector(env, p, rng), room.id))
    return out


def _point(value, what):
    try:
        x, y = value
        return Point2D(float(x), float(y))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what}: expected [x, y], got {value!r}") from exc


def environment_from_dict(doc: dict) -> RadioEnvironment:
    try:
        rooms = [Room(int(r["id"]), _point(r["min"], "room min"), _point(r["max"], "room max"))
                 for r in doc["rooms"]]
        aps = [AccessPoint(i, MacAddress.parse(a["mac"]), Point2D(float(a["x"]), float(a["y"])),
                           float(a["tx_power"]))
               for i, a in enumerate(doc["aps"])]
        params = PathLossParams(**doc.get("path_loss", {}))
        return RadioEnvironment(rooms, aps, params, int(doc.get("seed", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid environment: {exc}") from exc


def environment_to_dict(env: RadioEnvironment) -> dict:
    p = env.params
    return {
        "rooms": [{"id": r.id, "min": [r.min.x, r.min.y], "max": [r.max.x, r.max.y]}
                  for r in env.floorplan],
        "aps": [{"mac": str(ap.mac), "x": ap.position.x, "y": ap.position.y, "tx_power": ap.tx_power}
                for ap in env.aps],
        "path_loss": {"pl0": p.pl0, "exponent": p.exponent, "shadow_sigma": p.shadow_sigma,
                      "floor": p.floor, "ceiling": p.ceiling},
        "seed": env.seed,
    }


def load_environment(path) -> RadioEnvironment:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return environment_from_dict(doc)
