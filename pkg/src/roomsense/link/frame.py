"""Authenticated connectionless frames.

Wire layout (big-endian, no padding)::

    off  len  field
      0    2  magic 0x45 0x4E
      2    1  version 0x01
      3    1  ftype: 0 unicast, 1 broadcast
      4    6  src MAC
     10    6  dst MAC
     16   12  nonce: 4 zero octets + 8-octet send counter
     28    1  payload length L (0..250)
     29    L  ciphertext
   29+L   16  tag

The 29-octet header is the associated data of AES-CCM (128-bit key, 96-bit
nonce, 128-bit tag). Each sender encrypts under a subkey derived from the
shared peer key and its own MAC with HKDF-SHA256, so two peers that share a
key and both start counting at 1 never reuse a (key, nonce) pair.
"""

import struct
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import AESCCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from ..errors import RoomsenseError
from ..macaddr import BROADCAST, MacAddress

MAGIC = b"\x45\x4e"
VERSION = 1
FTYPE_UNICAST = 0
FTYPE_BROADCAST = 1
HEADER_LEN = 29
TAG_LEN = 16
OVERHEAD = HEADER_LEN + TAG_LEN
MAX_PAYLOAD = 250
KEY_LEN = 16
MAX_COUNTER = (1 << 64) - 1

_HEADER = struct.Struct(">2sBB6s6s4sQB")


class FrameError(RoomsenseError):
    """A received frame was rejected."""


class Truncated(FrameError):
    pass


class BadMagic(FrameError):
    pass


class BadVersion(FrameError):
    pass


class AuthFailure(FrameError):
    pass


class MalformedFrame(FrameError):
    """Authenticated but internally inconsistent (sender bug, not tampering)."""


class ReplayRejected(FrameError):
    def __init__(self, src: MacAddress, counter: int, last: int):
        self.src = src
        self.counter = counter
        super().__init__(f"counter {counter} from {src} not above {last}")


class PayloadTooLarge(RoomsenseError, ValueError):
    pass


@dataclass(frozen=True)
class PeerKey:
    octets: bytes

    def __post_init__(self):
        if len(self.octets) != KEY_LEN:
            raise ValueError(f"peer key must be {KEY_LEN} octets")


@dataclass(frozen=True)
class Decoded:
    src: MacAddress
    dst: MacAddress
    payload: bytes
    counter: int

    def __iter__(self):
        return iter((self.src, self.dst, self.payload))


def _sender_cipher(key: PeerKey, src: bytes) -> AESCCM:
    subkey = HKDF(algorithm=hashes.SHA256(), length=KEY_LEN, salt=None,
                  info=b"roomsense-link-v1" + src).derive(key.octets)
    return AESCCM(subkey, tag_length=TAG_LEN)


def wire_size(payload_len: int) -> int:
    return OVERHEAD + payload_len


def encode_frame(src: MacAddress, dst: MacAddress, payload: bytes, key: PeerKey, counter: int) -> bytes:
    if len(payload) > MAX_PAYLOAD:
        raise PayloadTooLarge(f"payload of {len(payload)} octets exceeds {MAX_PAYLOAD}")
    if src.is_broadcast:
        raise ValueError("source address cannot be broadcast")
    if not 0 <= counter <= MAX_COUNTER:
        raise ValueError("counter out of 64-bit range")
    ftype = FTYPE_BROADCAST if dst.is_broadcast else FTYPE_UNICAST
    header = _HEADER.pack(MAGIC, VERSION, ftype, src.octets, dst.octets, bytes(4), counter, len(payload))
    sealed = _sender_cipher(key, src.octets).encrypt(header[16:28], bytes(payload), header)
    return header + sealed


def decode_frame(wire: bytes, key: PeerKey, last_seen: dict = None) -> Decoded:
    """Authenticate, decrypt and replay-check one frame.

    The tag is checked before any header field is trusted, so every bit flip
    in a valid frame surfaces as ``AuthFailure``. ``BadMagic``/``BadVersion``
    are reported only for authentic frames, i.e. a keyholder speaking another
    protocol revision. ``last_seen`` maps source MAC to the highest accepted
    counter and is updated in place on success; pass ``None`` to skip replay
    checking.
    """
    wire = bytes(wire)
    if len(wire) < OVERHEAD:
        raise Truncated(f"{len(wire)} octets is shorter than the {OVERHEAD}-octet minimum")
    if len(wire) > OVERHEAD + MAX_PAYLOAD:
        raise Truncated(f"{len(wire)} octets exceeds the maximum frame size")
    header = wire[:HEADER_LEN]
    magic, version, ftype, src, dst, zeros, counter, length = _HEADER.unpack(header)
    try:
        payload = _sender_cipher(key, src).decrypt(header[16:28], wire[HEADER_LEN:], header)
    except InvalidTag:
        raise AuthFailure("tag verification failed") from None
    if magic != MAGIC:
        raise BadMagic(f"magic {magic.hex()}")
    if version != VERSION:
        raise BadVersion(f"version {version}")
    if length != len(payload):
        raise Truncated(f"length field {length} but {len(payload)} payload octets")
    src_mac, dst_mac = MacAddress(src), MacAddress(dst)
    if ftype not in (FTYPE_UNICAST, FTYPE_BROADCAST) or (ftype == FTYPE_BROADCAST) != dst_mac.is_broadcast:
        raise MalformedFrame(f"ftype {ftype} inconsistent with dst {dst_mac}")
    if zeros != bytes(4) or src_mac.is_broadcast:
        raise MalformedFrame("bad nonce prefix or broadcast source")
    if last_seen is not None:
        last = last_seen.get(src_mac, 0)
        if counter <= last:
            raise ReplayRejected(src_mac, counter, last)
        last_seen[src_mac] = counter
    return Decoded(src_mac, dst_mac, payload, counter)


def peek_addresses(wire: bytes):
    """Unauthenticated (src, dst) as a radio would read them for routing."""
    if len(wire) < 16:
        raise Truncated("too short to carry addresses")
    return MacAddress(bytes(wire[4:10])), MacAddress(bytes(wire[10:16]))


@dataclass
class Endpoint:
    mac: MacAddress
    role: str = "initiator"
    key: PeerKey = None
    send_counter: int = 0
    last_seen: dict = field(default_factory=dict)
    auto_ack: bool = False
    acks_received: int = 0

    def __post_init__(self):
        if self.role not in ("initiator", "responder"):
            raise ValueError(f"role must be initiator or responder, got {self.role!r}")
        if self.key is None:
            raise ValueError("endpoint needs a peer key")

    def seal(self, dst: MacAddress, payload: bytes) -> bytes:
        if self.send_counter >= MAX_COUNTER:
            raise OverflowError("send counter exhausted")
        wire = encode_frame(self.mac, dst, payload, self.key, self.send_counter + 1)
        self.send_counter += 1
        return wire

    def open(self, wire: bytes) -> Decoded:
        return decode_frame(wire, self.key, self.last_seen)


__all__ = [
    "AuthFailure", "BROADCAST", "BadMagic", "BadVersion", "Decoded", "Endpoint", "FrameError",
    "MAX_PAYLOAD", "MalformedFrame", "OVERHEAD", "PayloadTooLarge", "PeerKey", "ReplayRejected",
    "Truncated", "decode_frame", "encode_frame", "peek_addresses", "wire_size",
]
