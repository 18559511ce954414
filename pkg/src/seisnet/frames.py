"""Frame geometry and the time/size arithmetic of duty-cycled transmission.

Lengths are integral bytes here because the simulator builds real frames.
The analytical design equations in :mod:`seisnet.crosslayer` stay real-valued.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidFrameError, InvalidRateError, UnsatisfiableSplitError


@dataclass(frozen=True)
class FrameSpec:
    """A frame split into header, continuous part ``d1`` and intermittent part ``d2``."""

    total_len: int
    header_len: int
    d1_len: int
    d2_len: int

    def __post_init__(self) -> None:
        for name in ("total_len", "header_len", "d1_len", "d2_len"):
            if getattr(self, name) < 0:
                raise InvalidFrameError(f"{name} must be >= 0")
        if self.header_len + self.d1_len + self.d2_len != self.total_len:
            raise InvalidFrameError(
                f"header ({self.header_len}) + d1 ({self.d1_len}) + d2 ({self.d2_len}) "
                f"!= total ({self.total_len})"
            )

    @classmethod
    def from_payload(cls, total_len: int, header_len: int, payload_len: int) -> "FrameSpec":
        # Convenience for frames where the d1/d2 split is irrelevant.
        return cls(total_len, header_len, payload_len, 0)

    @property
    def payload_len(self) -> int:
        return self.d1_len + self.d2_len

    @property
    def split_ratio(self) -> float:
        """Achieved d1/d2 ratio; ``inf`` when the frame has no d2 room."""
        return self.d1_len / self.d2_len if self.d2_len else math.inf


@dataclass(frozen=True)
class DutyCycle:
    t_on: float
    t_off: float

    def __post_init__(self) -> None:
        if not self.t_on > 0:
            raise ValueError("t_on must be > 0")
        if self.t_off < 0:
            raise ValueError("t_off must be >= 0")

    @classmethod
    def from_frame_time(cls, t_f: float, duty: float) -> "DutyCycle":
        """Build the on/off schedule for a frame of airtime ``t_f`` at ``duty`` ratio."""
        if not 0 < duty <= 1:
            raise ValueError(f"duty cycle must lie in (0, 1], got {duty}")
        return cls(t_on=t_f, t_off=t_f / duty - t_f)

    @property
    def ratio(self) -> float:
        return self.t_on / (self.t_on + self.t_off)

    @property
    def period(self) -> float:
        return self.t_on + self.t_off


def frame_efficiency(spec: FrameSpec) -> float:
    if spec.total_len <= 0:
        raise InvalidFrameError("frame has zero total length")
    if spec.payload_len <= 0:
        raise InvalidFrameError("frame carries no payload")
    return spec.payload_len / spec.total_len


def split_payload(total_len: int, efficiency: float, split_ratio: float) -> FrameSpec:
    """Lay out a frame of ``total_len`` bytes for a target efficiency and d1/d2 ratio.

    The payload is ``round(efficiency * total_len)`` (half rounds up), d2 gets
    ``floor(payload / (1 + split_ratio))`` and d1 absorbs the remainder, so any
    rounding favours the continuous stream. The header takes what is left.
    """
    if total_len < 2:
        raise InvalidFrameError(f"frame length must be >= 2 bytes, got {total_len}")
    if not 0 < efficiency <= 1:
        raise ValueError(f"efficiency must lie in (0, 1], got {efficiency}")
    if not split_ratio > 0:
        raise ValueError(f"split ratio must be > 0, got {split_ratio}")

    payload = math.floor(efficiency * total_len + 0.5)
    d2 = math.floor(payload / (1 + split_ratio))
    if d2 < 1:
        raise UnsatisfiableSplitError(
            f"L_f={total_len}, eta={efficiency}, rho={split_ratio} leaves no room for d2"
        )
    return FrameSpec(total_len=total_len, header_len=total_len - payload,
                     d1_len=payload - d2, d2_len=d2)


def frame_airtime(length: float, bitrate: float) -> float:
    """Seconds needed to put ``length`` bytes on the air at ``bitrate`` bit/s."""
    if not bitrate > 0:
        raise InvalidRateError(f"bit rate must be > 0, got {bitrate}")
    return 8 * length / bitrate
