"""Room-level localization from Wi-Fi RSSI driving per-room appliance relays."""

__version__ = "0.1.0"
