import math
import random

import pytest

from dronestick.fleet import (
    Box,
    FleetParams,
    Follower,
    FollowerKind,
    apply_command,
    fleet_step,
    safe_land,
)
from dronestick.model import CommandVector, ConfigError, Mode

DT = 0.01


@pytest.fixture
def params():
    return FleetParams(v_land=0.5, yaw_rate_max=1.5, v_max=2.0)


def quad(pos=(0.0, 0.0, 0.0), yaw=0.0, landed=False):
    return Follower(id=0, kind=FollowerKind.QUAD, position=pos, yaw=yaw,
                    offset=pos, workspace=None, landed=landed)


def ground(pos=(0.0, 0.0, 0.0)):
    return Follower(id=1, kind=FollowerKind.GROUND, position=pos, yaw=0.0,
                    offset=pos, workspace=None, landed=False)


def arm(pos=(0.5, 0.0, 0.5)):
    box = Box(lo=(0.0, -0.5, 0.0), hi=(1.0, 0.5, 1.0))
    return Follower(id=2, kind=FollowerKind.ARM, position=pos, yaw=0.0,
                    offset=pos, workspace=box, landed=False)


class TestInvariantsAtConstruction:
    def test_ground_z_must_be_zero(self):
        with pytest.raises(ConfigError, match="ground"):
            Follower(id=0, kind=FollowerKind.GROUND, position=(0, 0, 0.5),
                     yaw=0.0, offset=(0, 0, 0.5), workspace=None, landed=False)

    def test_arm_requires_workspace(self):
        with pytest.raises(ConfigError, match="workspace"):
            Follower(id=0, kind=FollowerKind.ARM, position=(0, 0, 0),
                     yaw=0.0, offset=(0, 0, 0), workspace=None, landed=False)

    def test_arm_inside_workspace(self):
        box = Box(lo=(0, 0, 0), hi=(1, 1, 1))
        with pytest.raises(ConfigError, match="outside workspace"):
            Follower(id=0, kind=FollowerKind.ARM, position=(2, 0, 0),
                     yaw=0.0, offset=(2, 0, 0), workspace=box, landed=False)

    def test_box_ordering(self):
        with pytest.raises(ConfigError, match="workspace"):
            Box(lo=(1, 0, 0), hi=(0, 1, 1))

    def test_round_trip(self, params):
        f = arm()
        assert Follower.from_dict(f.to_dict()) == f
        q = quad(pos=(1.0, 2.0, 3.0), yaw=0.5)
        assert Follower.from_dict(q.to_dict()) == q
        assert FleetParams.from_dict(params.to_dict()) == params


class TestApplyCommand:
    def test_quad_euler_step(self, params):
        f = apply_command(quad(), CommandVector(0.4, 0.0, 0.0, 0.0), params, DT)
        assert f.position == pytest.approx((0.004, 0.0, 0.0), abs=1e-15)

    def test_ground_z_pinned(self, params):
        f = apply_command(ground(), CommandVector(0.0, 0.0, 0.2, 0.0), params, DT)
        assert f.position == (0.0, 0.0, 0.0)

    def test_arm_clamped_at_face(self, params):
        f = arm(pos=(1.0, 0.0, 0.5))  # at the +x face
        out = apply_command(f, CommandVector(1.0, 0.0, 0.0, 0.0), params, DT)
        assert out.position == (1.0, 0.0, 0.5)

    def test_velocity_clamp(self, params):
        f = apply_command(quad(), CommandVector(10.0, -10.0, 0.0, 0.0), params, DT)
        assert f.position[0] == pytest.approx(params.v_max * DT, abs=1e-15)
        assert f.position[1] == pytest.approx(-params.v_max * DT, abs=1e-15)

    def test_yaw_slew_limited(self, params):
        f = apply_command(quad(), CommandVector(0.0, 0.0, 0.0, 1.0), params, DT)
        assert f.yaw == pytest.approx(params.yaw_rate_max * DT, abs=1e-15)
        # already at the setpoint: no slew
        g = apply_command(quad(yaw=1.0), CommandVector(0.0, 0.0, 0.0, 1.0), params, DT)
        assert g.yaw == 1.0

    def test_arm_ignores_alpha(self, params):
        out = apply_command(arm(), CommandVector(0.0, 0.0, 0.0, 1.0), params, DT)
        assert out.yaw == 0.0

    def test_ground_slews_yaw(self, params):
        out = apply_command(ground(), CommandVector(0.0, 0.0, 0.0, -1.0), params, DT)
        assert out.yaw == pytest.approx(-params.yaw_rate_max * DT, abs=1e-15)

    def test_landed_never_moves(self, params):
        f = quad(pos=(1.0, 1.0, 0.0), landed=True)
        out = apply_command(f, CommandVector(1.0, 1.0, 1.0, 1.0), params, DT)
        assert out == f


class TestSafeLand:
    def test_quad_descends(self, params):
        f = safe_land(quad(pos=(0.0, 0.0, 1.0)), params, DT)
        assert f.position[2] == pytest.approx(0.995, abs=1e-15)
        assert not f.landed

    def test_no_undershoot(self, params):
        f = safe_land(quad(pos=(0.0, 0.0, 0.003)), params, DT)
        assert f.position[2] == 0.0
        assert f.landed

    def test_ground_freezes_in_place(self, params):
        g = ground(pos=(2.0, -1.0, 0.0))
        out = safe_land(g, params, DT)
        assert out.landed and out.position == g.position

    def test_arm_holds_position(self, params):
        a = arm()
        out = safe_land(a, params, DT)
        assert out.landed and out.position == a.position

    def test_exact_tick_count(self, params):
        f = quad(pos=(0.0, 0.0, 1.0))
        expected = math.ceil(1.0 / (params.v_land * DT))
        ticks = 0
        while f.position[2] > 0.0:
            f = safe_land(f, params, DT)
            ticks += 1
        assert ticks == expected
        assert f.landed

    def test_monotone_descent(self, params):
        f = quad(pos=(0.0, 0.0, 0.7))
        prev = f.position[2]
        for _ in range(300):
            f = safe_land(f, params, DT)
            assert f.position[2] <= prev
            prev = f.position[2]
        assert f.position[2] == 0.0


class TestFleetStep:
    def make_fleet(self):
        return (quad(pos=(0.0, 0.0, 1.0)), ground(pos=(1.0, 0.0, 0.0)),
                arm(pos=(0.5, 0.0, 0.5)))

    def test_emergency_ignores_command(self, params):
        fleet = self.make_fleet()
        out = fleet_step(fleet, CommandVector(1.0, 1.0, 1.0, 1.0), Mode.EMERGENCY, params, DT)
        assert out[0].position[2] < fleet[0].position[2]
        assert out[1].position == fleet[1].position and out[1].landed
        assert out[2].position == fleet[2].position and out[2].landed

    def test_docked_is_identity(self, params):
        fleet = self.make_fleet()
        assert fleet_step(fleet, CommandVector(1, 0, 0, 0), Mode.DOCKED, params, DT) is fleet

    def test_active_moves_everyone(self, params):
        fleet = (quad(), quad(), quad())
        out = fleet_step(fleet, CommandVector(0.4, 0.0, 0.0, 0.0), Mode.ACTIVE, params, DT)
        for f in out:
            assert f.position[0] == pytest.approx(0.004, abs=1e-15)

    def test_uniform_displacement_preserves_offsets(self, params):
        rng = random.Random(3)
        fleet = tuple(
            Follower(id=i, kind=FollowerKind.QUAD,
                     position=(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.5, 2)),
                     yaw=0.0, offset=(0, 0, 0), workspace=None, landed=False)
            for i in range(4)
        )
        base = fleet
        for _ in range(500):
            cmd = CommandVector(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                rng.uniform(-0.2, 0.2), 0.0)
            fleet = fleet_step(fleet, cmd, Mode.ACTIVE, params, DT)
        # per-tick displacements are identical floats, so offsets drift
        # only by accumulated representation error
        for i in range(1, 4):
            for axis in range(3):
                want = base[i].position[axis] - base[0].position[axis]
                got = fleet[i].position[axis] - fleet[0].position[axis]
                assert got == pytest.approx(want, abs=1e-9)

    def test_ground_invariance_fuzz(self, params):
        rng = random.Random(4)
        f = ground()
        for _ in range(1000):
            cmd = CommandVector(rng.uniform(-3, 3), rng.uniform(-3, 3),
                                rng.uniform(-3, 3), rng.uniform(-3, 3))
            mode = rng.choice([Mode.ACTIVE, Mode.EMERGENCY, Mode.DEPLOYING])
            f = fleet_step((f,), cmd, mode, params, DT)[0]
            assert f.position[2] == 0.0

    def test_workspace_containment_fuzz(self, params):
        rng = random.Random(5)
        f = arm()
        for _ in range(2000):
            cmd = CommandVector(rng.uniform(-5, 5), rng.uniform(-5, 5),
                                rng.uniform(-5, 5), rng.uniform(-3, 3))
            f = fleet_step((f,), cmd, Mode.ACTIVE, params, DT)[0]
            assert f.workspace.contains(f.position)

    def test_clamp_correctness(self, params):
        rng = random.Random(6)
        for _ in range(1000):
            cmd = CommandVector(rng.uniform(-8, 8), rng.uniform(-8, 8),
                                rng.uniform(-8, 8), 0.0)
            out = apply_command(quad(), cmd, params, DT)
            for axis in range(3):
                assert abs(out.position[axis]) <= params.v_max * DT
