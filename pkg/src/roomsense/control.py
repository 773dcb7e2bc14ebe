"""Wearable sense/classify/signal loop and the relay controller."""

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import RoomsenseError, ShapeError
from .link.channel import Channel, ChannelConfig, DeliveryFailed, send_reliable
from .link.frame import Endpoint, PeerKey
from .macaddr import MacAddress
from .radio import Point2D, RadioEnvironment, room_of, sample_vector

AWAY = 0


class InvalidCode(RoomsenseError, ValueError):
    pass


@dataclass(frozen=True)
class ControlSignal:
    code: int

    def __post_init__(self):
        if not 0 <= self.code <= 255:
            raise InvalidCode(f"control code {self.code} does not fit in one octet")

    def to_bytes(self) -> bytes:
        return bytes([self.code])

    @classmethod
    def from_bytes(cls, payload: bytes) -> "ControlSignal":
        if len(payload) != 1:
            raise InvalidCode(f"control payload must be 1 octet, got {len(payload)}")
        return cls(payload[0])


@dataclass(frozen=True)
class ActuatorBank:
    lights: tuple = (False, False, False)
    fans: tuple = (False, False, False)

    @classmethod
    def all_off(cls, rooms: int = 3) -> "ActuatorBank":
        return cls((False,) * rooms, (False,) * rooms)

    @property
    def rooms(self) -> int:
        return len(self.lights)

    @property
    def active_room(self) -> Optional[int]:
        """1-based room whose light is on, or None when everything is off."""
        on = [i + 1 for i, v in enumerate(self.lights) if v]
        return on[0] if on else None


def apply_signal(bank: ActuatorBank, sig: ControlSignal) -> ActuatorBank:
    """Room k on (light and fan), every other room off; code 0 turns all off.

    The result depends only on the code and the bank size.
    """
    n = bank.rooms
    if sig.code > n:
        raise InvalidCode(f"code {sig.code} exceeds the {n} configured rooms")
    pattern = tuple(i + 1 == sig.code for i in range(n))
    return ActuatorBank(pattern, pattern)


class OracleClassifier:
    """Ground-truth locator used to test the control path in isolation."""

    uses_position = True

    def __init__(self, floorplan):
        self.floorplan = tuple(floorplan)

    def locate(self, p: Point2D) -> Optional[int]:
        return room_of(self.floorplan, p)


@dataclass
class WearableNode:
    position: Point2D
    model: object
    endpoint: Optional[Endpoint] = None
    sample_period: float = 1.0

    def __post_init__(self):
        if not self.sample_period > 0:
            raise ValueError("sample_period must be positive")


def classify_and_signal(node: WearableNode, env: RadioEnvironment, rng: np.random.Generator,
                        abstain_below: float = None) -> ControlSignal:
    """Sense one RSSI vector at the node, classify it, and map to a code.

    With ``abstain_below`` set, a top class probability under that value
    yields the away code instead of a room.
    """
    model = node.model
    if getattr(model, "uses_position", False):
        room = model.locate(node.position)
        return ControlSignal(AWAY if room is None else room)
    if model.ap_count != len(env.aps):
        raise ShapeError(f"model expects {model.ap_count} APs, environment has {len(env.aps)}")
    rssi = sample_vector(env, node.position, rng)
    proba = model.predict_proba(rssi)
    room = model.predict(rssi)
    if abstain_below is not None and proba[room] < abstain_below:
        return ControlSignal(AWAY)
    return ControlSignal(room)


@dataclass(frozen=True)
class Trajectory:
    waypoints: tuple  # ((t, Point2D), ...)

    def __post_init__(self):
        wp = tuple((float(t), p) for t, p in self.waypoints)
        if not wp:
            raise ValueError("trajectory needs at least one waypoint")
        times = [t for t, _ in wp]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("waypoint times must be strictly increasing")
        object.__setattr__(self, "waypoints", wp)

    @classmethod
    def stationary(cls, p: Point2D) -> "Trajectory":
        return cls(((0.0, p),))

    def position(self, t: float) -> Point2D:
        wp = self.waypoints
        times = [w[0] for w in wp]
        i = bisect_right(times, t)
        if i == 0:
            return wp[0][1]
        if i == len(wp):
            return wp[-1][1]
        (t0, a), (t1, b) = wp[i - 1], wp[i]
        u = (t - t0) / (t1 - t0)
        return Point2D(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y))


WEARABLE_MAC = MacAddress.parse("02:00:00:00:00:A1")
CONTROLLER_MAC = MacAddress.parse("02:00:00:00:00:C1")
DEFAULT_KEY = PeerKey(bytes(range(16)))


@dataclass
class ScenarioLog:
    ticks: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    events: list = field(default_factory=list)

    def write(self, log_path, summary_path=None, events_path=None) -> None:
        with open(log_path, "w", encoding="utf-8", newline="\n") as fh:
            for rec in self.ticks:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
        if summary_path is not None:
            with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(self.summary, indent=2, sort_keys=True) + "\n")
        if events_path is not None:
            with open(events_path, "w", encoding="utf-8", newline="\n") as fh:
                for rec in self.events:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")


def run_scenario(env: RadioEnvironment, model, trajectory: Trajectory, channel: ChannelConfig,
                 duration: float, rng: np.random.Generator, sample_period: float = 1.0,
                 reliable: bool = False, retries: int = 3, ack_timeout: float = 0.01,
                 abstain_below: float = None, key: PeerKey = DEFAULT_KEY) -> ScenarioLog:
    """Step wearable and controller over virtual time.

    Each tick the wearable senses at ``trajectory.position(t)``, classifies,
    and sends the one-octet code; the controller applies every authentic,
    fresh frame it receives. The tick record shows the actuators just before
    the next tick. Warm-up is every tick before the first applied frame;
    tracking accuracy counts post-warm-up ticks whose active room equals the
    ground-truth room (outside all rooms must mean all off).
    """
    rooms = len(env.floorplan)
    link = Channel(channel)
    wearable_ep = Endpoint(WEARABLE_MAC, "initiator", key)
    controller_ep = Endpoint(CONTROLLER_MAC, "responder", key, auto_ack=reliable)
    node = WearableNode(trajectory.position(0.0), model, wearable_ep, sample_period)

    state = {"bank": ActuatorBank.all_off(rooms), "applied": 0}
    sent_at = {}
    latencies = []
    outcomes = {}

    def on_control_frame(decoded, t):
        try:
            bank = apply_signal(state["bank"], ControlSignal.from_bytes(decoded.payload))
        except InvalidCode as exc:
            outcomes[decoded.counter] = f"InvalidCode: {exc}"
            return
        state["bank"] = bank
        state["applied"] += 1
        outcomes[decoded.counter] = "delivered"
        latencies.append(t - sent_at[decoded.counter])

    link.attach(wearable_ep)
    link.attach(controller_ep, on_control_frame)

    ticks = []
    n_ticks = int(np.ceil(duration / sample_period - 1e-9))
    frames_sent = 0
    for i in range(n_ticks):
        t = i * sample_period
        link.run_until(t)
        node.position = trajectory.position(t)
        truth = room_of(env.floorplan, node.position)
        record = {"tick": i, "t": t, "x": node.position.x, "y": node.position.y, "truth": truth}
        try:
            sig = classify_and_signal(node, env, rng, abstain_below)
        except RoomsenseError as exc:
            sig = None
            record["error"] = f"{type(exc).__name__}: {exc}"
        record["predicted"] = None if sig is None else sig.code
        frame_outcome = "not sent"
        if sig is not None:
            counter = wearable_ep.send_counter + 1
            sent_at[counter] = t
            frames_sent += 1
            if reliable:
                try:
                    done = send_reliable(wearable_ep, link, CONTROLLER_MAC, sig.to_bytes(),
                                         retries, ack_timeout)
                    record["attempts"] = done.attempts
                except DeliveryFailed as exc:
                    record["attempts"] = exc.attempts
                    outcomes.setdefault(counter, "failed")
            else:
                report = link.send(wearable_ep.seal(CONTROLLER_MAC, sig.to_bytes()), t)
                if report.deliveries[0].dropped:
                    outcomes[counter] = "lost"
            # settle everything belonging to this tick before recording
            link.run_until(t + sample_period - 1e-9)
            frame_outcome = outcomes.get(counter, "in flight" if link.pending() else "rejected")
        bank = state["bank"]
        record.update(frame=frame_outcome, lights=list(bank.lights), fans=list(bank.fans),
                      active_room=bank.active_room, warm=state["applied"] > 0)
        record["match"] = bank.active_room == truth
        ticks.append(record)

    post = [r for r in ticks if r["warm"]]
    summary = {
        "ticks": len(ticks),
        "post_warmup_ticks": len(post),
        "tracking_accuracy": (sum(r["match"] for r in post) / len(post)) if post else None,
        "frames_sent": frames_sent,
        "frames_delivered": state["applied"],
        "frames_lost": frames_sent - state["applied"],
        "mean_actuation_latency": (sum(latencies) / len(latencies)) if latencies else None,
    }
    return ScenarioLog(ticks, summary, list(link.log))
