"""Every tunable default in one place so experiments can override freely.

None of these numbers comes from measurement; they are plausible
small-quadrotor magnitudes chosen to make the default scenario behave
well. Scenario files override any subset.
"""

from __future__ import annotations

JOYSTICK = {
    "k_v": [4.0, 4.0, 1.0, 1.0],
    "z_d": 1.5,
    "yaw_d": 0.0,
    "angle_lim": 0.03,
    "z_lim": 0.05,
    "yaw_lim": 0.05,
}

SAFETY = {
    "pitch_max": 0.5,
    "roll_max": 0.5,
    "z_floor": 0.2,
    "z_ceiling": 3.0,
}

TETHER = {
    "rest_length": 0.5,
    "stiffness": 20.0,
    "damping": 1.0,
    "attach_offset": 0.05,
    "twist_max": 0.02,
}

LEADER = {
    "mass": 0.5,
    "gravity": 9.81,
    "kp_pos": 8.0,
    "kd_pos": 4.0,
    "tilt_tau": 0.15,
    "tilt_cap": 0.45,
    "kp_yaw": 6.0,
    "kd_yaw": 3.0,
}

FEEDBACK = {
    "d_warn": 1.0,
    "b_warn": 0.2,
    "impulse_len": 0.1,
    "impulse_gap": 0.4,
    "amplitude": 1.0,
}

FLEET_PARAMS = {
    "v_land": 0.5,
    "yaw_rate_max": 1.5,
    "v_max": 2.0,
}

SIM = {
    "dt": 0.01,
    "duration": 10.0,
    "seed": 0,
    "deploy_speed": 1.0,
    "battery": {"initial": 1.0, "drain": 0.0},
}


def default_fleet() -> list:
    return [
        {"kind": "quad", "offset": [3.0, 0.0, 1.0]},
        {"kind": "quad", "offset": [3.0, 1.0, 1.0]},
        {"kind": "ground", "offset": [4.0, -1.0, 0.0]},
        {
            "kind": "arm",
            "offset": [5.0, 0.0, 0.5],
            "workspace": {"min": [4.5, -0.5, 0.0], "max": [5.5, 0.5, 1.0]},
        },
    ]


def default_scenario_doc(**sim_overrides) -> dict:
    """Assemble a complete scenario document from the defaults."""
    sim = {
        "dt": SIM["dt"],
        "duration": SIM["duration"],
        "seed": SIM["seed"],
        "deploy_target": [0.0, 0.0, JOYSTICK["z_d"]],
        "deploy_speed": SIM["deploy_speed"],
        "grip_timeline": [],
        "obstacles": [],
        "battery": dict(SIM["battery"]),
        "fleet_params": dict(FLEET_PARAMS),
    }
    sim.update(sim_overrides)
    return {
        "joystick": dict(JOYSTICK),
        "safety": dict(SAFETY),
        "tether": dict(TETHER),
        "leader": dict(LEADER),
        "fleet": default_fleet(),
        "feedback": dict(FEEDBACK),
        "sim": sim,
    }
