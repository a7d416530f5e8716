import pytest

from spheremax.sphere import (
    build_ball_rule,
    build_circle_rule,
    build_interval_rule,
    build_sphere_rule,
)


@pytest.fixture(scope="session")
def circle8():
    return build_circle_rule(8)


@pytest.fixture(scope="session")
def circle11():
    return build_circle_rule(11)


@pytest.fixture(scope="session")
def sphere3():
    return build_sphere_rule(3, 6)


@pytest.fixture(scope="session")
def sphere4():
    return build_sphere_rule(4, 4)


@pytest.fixture(scope="session")
def sphere5():
    return build_sphere_rule(5, 2)


@pytest.fixture(scope="session")
def interval10():
    return build_interval_rule(10)


@pytest.fixture(scope="session")
def ball2():
    return build_ball_rule(2, 7)
