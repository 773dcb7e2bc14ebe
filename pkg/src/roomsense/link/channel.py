"""Discrete-event broadcast medium over virtual time."""

import heapq
import json
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..errors import RoomsenseError
from ..macaddr import MacAddress
from ..rng import stream
from .frame import Endpoint, FrameError, ReplayRejected, peek_addresses


class UnknownDestination(RoomsenseError, LookupError):
    pass


class DeliveryFailed(RoomsenseError):
    def __init__(self, attempts: int):
        self.attempts = attempts
        super().__init__(f"no acknowledgment after {attempts} attempts")


@dataclass(frozen=True)
class ChannelConfig:
    bit_rate: float = 1_000_000.0
    loss_prob: float = 0.0
    latency: float = 0.001
    seed: int = 0

    def __post_init__(self):
        if not self.bit_rate > 0:
            raise ValueError("bit_rate must be positive")
        if not 0.0 <= self.loss_prob <= 1.0:
            raise ValueError("loss_prob must lie in [0, 1]")
        if self.latency < 0:
            raise ValueError("latency must be >= 0")

    def airtime(self, octets: int) -> float:
        return octets * 8 / self.bit_rate


@dataclass(frozen=True)
class Delivery:
    dst: MacAddress
    at: float
    dropped: bool


@dataclass(frozen=True)
class DeliveryReport:
    sent_at: float
    airtime: float
    size: int
    deliveries: tuple

    @property
    def delivered(self) -> int:
        return sum(not d.dropped for d in self.deliveries)


@dataclass(frozen=True)
class Delivered:
    attempts: int
    acked_at: float


@dataclass
class _Attached:
    endpoint: Endpoint
    on_receive: Optional[Callable] = None


@dataclass(order=True)
class _Event:
    at: float
    seq: int
    dst: MacAddress = field(compare=False)
    wire: bytes = field(compare=False)


class Channel:
    """Single-threaded event loop; endpoints are owned by the channel.

    ``send`` schedules deliveries, ``run_until`` executes them in timestamp
    order (ties in submission order). Every send, drop and delivery is
    appended to ``log`` as a dict with keys t, event, src, dst, size, outcome.
    """

    def __init__(self, config: ChannelConfig = ChannelConfig()):
        self.config = config
        self.now = 0.0
        self.log = []
        self._rng = stream(config.seed, "channel")
        self._nodes = {}
        self._queue = []
        self._seq = 0

    def attach(self, endpoint: Endpoint, on_receive: Callable = None) -> None:
        if endpoint.mac in self._nodes:
            raise ValueError(f"{endpoint.mac} already attached")
        self._nodes[endpoint.mac] = _Attached(endpoint, on_receive)

    def endpoint(self, mac: MacAddress) -> Endpoint:
        return self._nodes[mac].endpoint

    def _record(self, t, event, src, dst, size, outcome):
        self.log.append({"t": t, "event": event, "src": str(src), "dst": str(dst),
                         "size": size, "outcome": outcome})

    def send(self, wire: bytes, now: float = None) -> DeliveryReport:
        now = self.now if now is None else now
        src, dst = peek_addresses(wire)
        if dst.is_broadcast:
            targets = [mac for mac in self._nodes if mac != src]
        elif dst in self._nodes:
            targets = [dst]
        else:
            raise UnknownDestination(f"{dst} is not attached to this channel")
        airtime = self.config.airtime(len(wire))
        at = now + self.config.latency + airtime
        self._record(now, "send", src, dst, len(wire), "queued")
        deliveries = []
        for target in targets:
            # one draw per destination, even when loss is 0 or 1
            dropped = bool(self._rng.random() < self.config.loss_prob)
            deliveries.append(Delivery(target, at, dropped))
            if dropped:
                self._record(now, "drop", src, target, len(wire), "lost")
            else:
                heapq.heappush(self._queue, _Event(at, self._seq, target, bytes(wire)))
                self._seq += 1
        return DeliveryReport(now, airtime, len(wire), tuple(deliveries))

    def pending(self) -> int:
        return len(self._queue)

    def step(self) -> bool:
        if not self._queue:
            return False
        ev = heapq.heappop(self._queue)
        self.now = max(self.now, ev.at)
        self._deliver(ev)
        return True

    def run_until(self, t: float, stop: Callable[[], bool] = None) -> bool:
        """Process events with timestamp <= t. Returns True if ``stop`` fired."""
        while self._queue and self._queue[0].at <= t:
            self.step()
            if stop is not None and stop():
                return True
        self.now = max(self.now, t)
        return False

    def _deliver(self, ev: _Event) -> None:
        node = self._nodes[ev.dst]
        ep = node.endpoint
        src, _ = peek_addresses(ev.wire)
        try:
            decoded = ep.open(ev.wire)
        except ReplayRejected as exc:
            self._record(ev.at, "deliver", src, ev.dst, len(ev.wire), "ReplayRejected")
            # duplicate of an authentic frame: re-acknowledge, do not re-deliver
            if ep.auto_ack and not exc.src.is_broadcast and exc.src in self._nodes:
                self._ack(ep, exc.src, ev.at)
            return
        except FrameError as exc:
            self._record(ev.at, "deliver", src, ev.dst, len(ev.wire), type(exc).__name__)
            return
        self._record(ev.at, "deliver", src, ev.dst, len(ev.wire), "accepted")
        if not decoded.payload:
            ep.acks_received += 1
            return
        if ep.auto_ack and not decoded.dst.is_broadcast:
            self._ack(ep, decoded.src, ev.at)
        if node.on_receive is not None:
            node.on_receive(decoded, ev.at)

    def _ack(self, ep: Endpoint, to: MacAddress, now: float) -> None:
        self.send(ep.seal(to, b""), now)

    def dump_log(self, fh) -> None:
        for rec in self.log:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def round_trip(config: ChannelConfig, payload_len: int) -> float:
    from .frame import wire_size
    return 2 * config.latency + config.airtime(wire_size(payload_len)) + config.airtime(wire_size(0))


def send_reliable(endpoint: Endpoint, channel: Channel, dst: MacAddress, payload: bytes,
                  retries: int = 3, ack_timeout: float = 0.01) -> Delivered:
    """Stop-and-wait unicast: retransmit the same frame until acknowledged.

    Retransmissions reuse the wire image, so the receiver's replay rule keeps
    delivery idempotent. ``ack_timeout`` must exceed the round trip so an
    acknowledgment can never arrive after its window closes.
    """
    if retries < 0:
        raise ValueError("retries must be >= 0")
    if dst.is_broadcast:
        raise ValueError("reliable delivery needs a unicast destination")
    if ack_timeout <= round_trip(channel.config, len(payload)):
        raise ValueError("ack_timeout must exceed the round-trip time")
    wire = endpoint.seal(dst, payload)
    baseline = endpoint.acks_received
    got_ack = lambda: endpoint.acks_received > baseline  # noqa: E731
    for attempt in range(1, retries + 2):
        start = channel.now
        channel.send(wire, start)
        if channel.run_until(start + ack_timeout, stop=got_ack):
            return Delivered(attempt, channel.now)
    raise DeliveryFailed(retries + 1)
