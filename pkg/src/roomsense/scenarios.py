"""Built-in environment and walk used by the CLI defaults and acceptance tests.

Three 4 x 4 m rooms in a row, separated by 1 m corridors, one access point
at each room's center. Room k spans x in [5(k-1), 5(k-1)+4), y in [0, 4).
"""

from .control import Trajectory
from .macaddr import MacAddress
from .radio import AccessPoint, PathLossParams, Point2D, RadioEnvironment, Room

ROOM_SIZE = 4.0
CORRIDOR = 1.0
AP_TX_POWER = 0.0


def default_environment(seed: int = 42, shadow_sigma: float = 2.0) -> RadioEnvironment:
    pitch = ROOM_SIZE + CORRIDOR
    rooms = [Room(k + 1, Point2D(k * pitch, 0.0), Point2D(k * pitch + ROOM_SIZE, ROOM_SIZE))
             for k in range(3)]
    aps = [AccessPoint(k, MacAddress(bytes([0x02, 0, 0, 0, 0xA0, k + 1])), room.center, AP_TX_POWER)
           for k, room in enumerate(rooms)]
    return RadioEnvironment(rooms, aps, PathLossParams(shadow_sigma=shadow_sigma), seed)


def default_walk() -> Trajectory:
    """Dwell in room 1, walk to room 2, dwell, walk to room 3, dwell (180 s)."""
    c1, c2, c3 = (Point2D(2.0 + k * (ROOM_SIZE + CORRIDOR), 2.0) for k in range(3))
    return Trajectory(((0.0, c1), (55.0, c1), (60.0, c2), (115.0, c2), (120.0, c3), (180.0, c3)))


DEFAULT_DURATION = 180.0
