import math

import pytest

from aerofruit.geometry import (
    CanopyMeasurement,
    FlightPlan,
    GeometryDomainError,
    plan_oblique,
    plan_vertical,
)

# Golden triple for R=2, H=8, L=1.5, phi=pi/3, evaluated at 50 decimal
# digits with mpmath before the module was written.
GOLDEN = {
    "tilt": 0.24497866312686415417,
    "vision_radius": 7.9282032302755091741,
    "flight_height": 7.2320508075688772935,
}


def test_45_degree_tilt():
    plan = plan_oblique(CanopyMeasurement(3, 3, 0, math.pi / 2))
    assert plan.tilt_rad == pytest.approx(math.pi / 4, abs=1e-15)
    assert plan.tilt_deg == pytest.approx(45.0, abs=1e-12)


def test_nadir_cancellation_case():
    # R=0 makes tilt 0 and sin/cos of phi/2 cancel: r = 10/(2 sin 45) cos 45 = 5
    plan = plan_oblique(CanopyMeasurement(0, 10, 1, math.pi / 2))
    assert plan.tilt_rad == 0.0
    assert plan.vision_radius_m == pytest.approx(5.0, rel=1e-14)
    assert plan.flight_height_m == pytest.approx(6.0, rel=1e-14)


def test_golden_triple():
    plan = plan_oblique(CanopyMeasurement(2, 8, 1.5, math.pi / 3))
    assert plan.tilt_rad == pytest.approx(GOLDEN["tilt"], rel=1e-14)
    assert plan.vision_radius_m == pytest.approx(GOLDEN["vision_radius"], rel=1e-14)
    assert plan.flight_height_m == pytest.approx(GOLDEN["flight_height"], rel=1e-14)


def test_matches_arbitrary_precision_reference():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 50
    import random

    rng = random.Random(20240514)
    for _ in range(1000):
        R = rng.uniform(0.01, 20.0)
        H = rng.uniform(0.1, 30.0)
        L = rng.uniform(0.0, 5.0)
        phi = rng.uniform(0.05, math.pi - 0.05)
        plan = plan_oblique(CanopyMeasurement(R, H, L, phi))

        mR, mH, mL, mphi = map(mp.mpf, (repr(R), repr(H), repr(L), repr(phi)))
        alpha = mp.atan(mR / mH)
        diag = mp.sqrt(mR**2 + mH**2) / (2 * mp.sin(mphi / 2))
        r_ref = diag * mp.cos(mphi / 2 - alpha)
        h_ref = diag * mp.sin(mphi / 2 + alpha) + mL

        assert abs(plan.tilt_rad - float(alpha)) <= 1e-12 * max(1.0, abs(float(alpha)))
        assert abs(plan.vision_radius_m - float(r_ref)) <= 1e-12 * abs(float(r_ref))
        assert abs(plan.flight_height_m - float(h_ref)) <= 1e-12 * abs(float(h_ref))


def test_tilt_monotone_in_radius_and_height():
    import random

    rng = random.Random(7)
    for _ in range(200):
        H = rng.uniform(0.5, 20)
        r1, r2 = sorted(rng.uniform(0.01, 15) for _ in range(2))
        if r1 == r2:
            continue
        t1 = plan_oblique(CanopyMeasurement(r1, H, 0, 1.0)).tilt_rad
        t2 = plan_oblique(CanopyMeasurement(r2, H, 0, 1.0)).tilt_rad
        assert t1 < t2
    for _ in range(200):
        R = rng.uniform(0.5, 20)
        h1, h2 = sorted(rng.uniform(0.1, 25) for _ in range(2))
        if h1 == h2:
            continue
        t1 = plan_oblique(CanopyMeasurement(R, h1, 0, 1.0)).tilt_rad
        t2 = plan_oblique(CanopyMeasurement(R, h2, 0, 1.0)).tilt_rad
        assert t1 > t2


def test_scale_covariance():
    import random

    rng = random.Random(99)
    for _ in range(100):
        R, H, L = rng.uniform(0.1, 10), rng.uniform(0.1, 10), rng.uniform(0, 5)
        phi = rng.uniform(0.2, 3.0)
        s = rng.uniform(0.1, 30)
        base = plan_oblique(CanopyMeasurement(R, H, L, phi))
        scaled = plan_oblique(CanopyMeasurement(R * s, H * s, L * s, phi))
        assert scaled.tilt_rad == pytest.approx(base.tilt_rad, rel=1e-12)
        assert scaled.vision_radius_m == pytest.approx(s * base.vision_radius_m, rel=1e-9)
        assert scaled.flight_height_m == pytest.approx(s * base.flight_height_m, rel=1e-9)


def test_flight_plan_invariants_hold():
    import random

    rng = random.Random(3)
    for _ in range(300):
        m = CanopyMeasurement(
            rng.uniform(0.01, 10),
            rng.uniform(0.1, 10),
            rng.uniform(0, 4),
            rng.uniform(0.1, math.pi - 0.1),
        )
        plan = plan_oblique(m)
        assert 0 < plan.tilt_rad < math.pi / 2
        assert plan.flight_height_m >= m.trunk_length_m


@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(canopy_radius_m=-1, canopy_height_m=3, trunk_length_m=0, fov_rad=1.0), "canopy_radius_m"),
        (dict(canopy_radius_m=1, canopy_height_m=0, trunk_length_m=0, fov_rad=1.0), "canopy_height_m"),
        (dict(canopy_radius_m=1, canopy_height_m=-2, trunk_length_m=0, fov_rad=1.0), "canopy_height_m"),
        (dict(canopy_radius_m=1, canopy_height_m=3, trunk_length_m=-0.1, fov_rad=1.0), "trunk_length_m"),
        (dict(canopy_radius_m=1, canopy_height_m=3, trunk_length_m=0, fov_rad=0.0), "fov_rad"),
        (dict(canopy_radius_m=1, canopy_height_m=3, trunk_length_m=0, fov_rad=math.pi), "fov_rad"),
        (dict(canopy_radius_m=float("nan"), canopy_height_m=3, trunk_length_m=0, fov_rad=1.0), "canopy_radius_m"),
        (dict(canopy_radius_m=1, canopy_height_m=float("inf"), trunk_length_m=0, fov_rad=1.0), "canopy_height_m"),
    ],
)
def test_measurement_rejects_bad_fields(kwargs, field):
    with pytest.raises(GeometryDomainError) as err:
        CanopyMeasurement(**kwargs)
    assert err.value.field == field


def test_vertical_plan():
    assert plan_vertical(6.0, 3.0) == 9.0
    assert plan_vertical(6.0, 5.0) == 11.0


def test_vertical_rejects_unsafe_clearance():
    with pytest.raises(GeometryDomainError) as err:
        plan_vertical(6.0, 2.0)
    assert err.value.field == "clearance_m"
    with pytest.raises(GeometryDomainError):
        plan_vertical(6.0, 5.5)
    with pytest.raises(GeometryDomainError):
        plan_vertical(-1.0, 3.0)


def test_flight_plan_is_plain_value():
    plan = FlightPlan(tilt_rad=0.5, vision_radius_m=4.0, flight_height_m=7.0)
    assert plan.tilt_deg == pytest.approx(math.degrees(0.5))
