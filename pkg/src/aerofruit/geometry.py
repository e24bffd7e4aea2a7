"""Closed-form UAV shooting geometry for orchard canopy capture.

Two capture modes are supported:

* Oblique: given the measured canopy radius R, canopy height H, trunk
  length L and the camera's longitudinal field-of-view angle phi, compute
  the lens tilt angle, the vision radius and the flight height that place
  the whole canopy inside the frame.
* Vertical: fly straight over the canopy with a rotor-wash safety
  clearance of 3..5 m above the canopy top.

All angles are radians internally; callers working in degrees convert at
the boundary (the CLI does).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "GeometryDomainError",
    "CanopyMeasurement",
    "FlightPlan",
    "plan_oblique",
    "plan_vertical",
    "SAFE_CLEARANCE_M",
]

# Rotor downwash is harmless at 3 m and above; 5 m is the upper bound of
# the validated band.
SAFE_CLEARANCE_M = (3.0, 5.0)


class GeometryDomainError(ValueError):
    """Raised when a geometric input is outside its valid domain."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def _require_finite(field: str, value: float) -> float:
    if not math.isfinite(value):
        raise GeometryDomainError(field, f"must be finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class CanopyMeasurement:
    """Field measurements of one fruit tree plus the camera FOV.

    canopy_radius_m  R >= 0 (0 collapses the oblique plan to nadir)
    canopy_height_m  H > 0
    trunk_length_m   L >= 0
    fov_rad          longitudinal shooting angle phi, strictly in (0, pi)
    """

    canopy_radius_m: float
    canopy_height_m: float
    trunk_length_m: float
    fov_rad: float

    def __post_init__(self):
        _require_finite("canopy_radius_m", self.canopy_radius_m)
        _require_finite("canopy_height_m", self.canopy_height_m)
        _require_finite("trunk_length_m", self.trunk_length_m)
        _require_finite("fov_rad", self.fov_rad)
        if self.canopy_radius_m < 0:
            raise GeometryDomainError("canopy_radius_m", "must be >= 0")
        if self.canopy_height_m <= 0:
            raise GeometryDomainError("canopy_height_m", "must be > 0")
        if self.trunk_length_m < 0:
            raise GeometryDomainError("trunk_length_m", "must be >= 0")
        if not (0.0 < self.fov_rad < math.pi):
            raise GeometryDomainError("fov_rad", "must lie strictly in (0, pi)")


@dataclass(frozen=True)
class FlightPlan:
    """Oblique-capture solution: lens tilt, vision radius, flight height."""

    tilt_rad: float
    vision_radius_m: float
    flight_height_m: float

    @property
    def tilt_deg(self) -> float:
        return math.degrees(self.tilt_rad)


def plan_oblique(m: CanopyMeasurement) -> FlightPlan:
    """Solve the oblique-capture geometry for one canopy measurement.

    tilt  = atan(R / H)
    d     = sqrt(R^2 + H^2) / (2 sin(phi/2))     # canopy half-diagonal to lens
    r     = d * cos(phi/2 - tilt)
    h     = d * sin(phi/2 + tilt) + L
    """
    tilt = math.atan2(m.canopy_radius_m, m.canopy_height_m)
    half_fov = m.fov_rad / 2.0
    diag = math.hypot(m.canopy_radius_m, m.canopy_height_m) / (2.0 * math.sin(half_fov))
    vision_radius = diag * math.cos(half_fov - tilt)
    flight_height = diag * math.sin(half_fov + tilt) + m.trunk_length_m
    return FlightPlan(
        tilt_rad=tilt,
        vision_radius_m=vision_radius,
        flight_height_m=flight_height,
    )


def plan_vertical(canopy_height_m: float, clearance_m: float = 3.0) -> float:
    """Flight height for nadir capture: canopy top plus a safe clearance.

    clearance_m must stay inside the validated 3..5 m band; below it the
    rotor wash can strip fruit, above it the ground sampling suffers.
    """
    _require_finite("canopy_height_m", canopy_height_m)
    _require_finite("clearance_m", clearance_m)
    if canopy_height_m <= 0:
        raise GeometryDomainError("canopy_height_m", "must be > 0")
    lo, hi = SAFE_CLEARANCE_M
    if not (lo <= clearance_m <= hi):
        raise GeometryDomainError(
            "clearance_m", f"must lie in the safety band [{lo}, {hi}], got {clearance_m}"
        )
    return canopy_height_m + clearance_m
