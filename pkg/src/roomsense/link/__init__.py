from .channel import (Channel, ChannelConfig, Delivered, DeliveryFailed, DeliveryReport,
                      UnknownDestination, send_reliable)
from .frame import (BROADCAST, AuthFailure, BadMagic, BadVersion, Decoded, Endpoint, FrameError,
                    MalformedFrame, PayloadTooLarge, PeerKey, ReplayRejected, Truncated,
                    decode_frame, encode_frame, wire_size)

__all__ = [
    "AuthFailure", "BROADCAST", "BadMagic", "BadVersion", "Channel", "ChannelConfig", "Decoded",
    "Delivered", "DeliveryFailed", "DeliveryReport", "Endpoint", "FrameError", "MalformedFrame",
    "PayloadTooLarge", "PeerKey", "ReplayRejected", "Truncated", "UnknownDestination",
    "decode_frame", "encode_frame", "send_reliable", "wire_size",
]
