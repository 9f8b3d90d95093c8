import os

import pytest

from dronestick import defaults
from dronestick.model import JoystickConfig, SafetyConfig
from dronestick.scenario import scenario_from_doc

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), "..", "scenarios")


def scenario_path(name):
    return os.path.abspath(os.path.join(SCENARIO_DIR, name))


def load_doc(name):
    import json

    with open(scenario_path(name)) as fh:
        return json.load(fh)


@pytest.fixture
def joystick():
    return JoystickConfig.from_dict(defaults.JOYSTICK)


@pytest.fixture
def safety():
    return SafetyConfig.from_dict(defaults.SAFETY)


@pytest.fixture
def pull_east():
    return scenario_from_doc(load_doc("pull_east.json"))


@pytest.fixture
def estop_demo():
    return scenario_from_doc(load_doc("estop_demo.json"))


@pytest.fixture
def default_sc():
    return scenario_from_doc(load_doc("default.json"))
