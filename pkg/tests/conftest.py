"""Shared builders: the two-program demo game, published-table channels,
and random generators for the property suites."""

import numpy as np
import pytest

from leakgames.channels import Channel
from leakgames.games import LeakageGame
from leakgames.matrix import LabeledMatrix
from leakgames.vuln import GainFunction, Prior, VulnMeasure


def channel(rows, cols, data) -> Channel:
    return Channel(LabeledMatrix(tuple(rows), tuple(cols), data))


# binary demo: two programs (multiply / noisy copy) against a binary low input
DEMO_CHANNELS = {
    ("0", "0"): [[1, 0], [1, 0]],
    ("0", "1"): [[1, 0], [0, 1]],
    ("1", "0"): [[0, 1], [1, 0]],
    ("1", "1"): [[1 / 3, 2 / 3], [2 / 3, 1 / 3]],
}


def demo_game() -> LeakageGame:
    chans = {k: channel(("0", "1"), ("0", "1"), v) for k, v in DEMO_CHANNELS.items()}
    return LeakageGame(("0", "1"), ("0", "1"), chans,
                       Prior.uniform(("0", "1")), VulnMeasure.bayes())


@pytest.fixture
def game2x2() -> LeakageGame:
    return demo_game()


def mix_example_channels():
    """The 2x2 channels used throughout the composition examples."""
    c1 = channel(("x1", "x2"), ("y1", "y2"), [[1 / 2, 1 / 2], [1 / 3, 2 / 3]])
    c2 = channel(("x1", "x2"), ("y1", "y2"), [[1 / 3, 2 / 3], [1 / 2, 1 / 2]])
    c3 = channel(("x1", "x2"), ("y1", "y3"), [[1 / 3, 2 / 3], [1 / 2, 1 / 2]])
    return c1, c2, c3


def random_channel(rng, secrets, cols) -> Channel:
    data = rng.dirichlet(np.ones(len(cols)), size=len(secrets))
    return channel(secrets, cols, data)


def random_deterministic_channel(rng, secrets, cols) -> Channel:
    data = np.zeros((len(secrets), len(cols)))
    hits = rng.integers(0, len(cols), size=len(secrets))
    data[np.arange(len(secrets)), hits] = 1.0
    return channel(secrets, cols, data)


def random_prior(rng, secrets) -> Prior:
    w = rng.dirichlet(np.ones(len(secrets)))
    return Prior(dict(zip(secrets, w)))


def random_measure(rng, secrets) -> VulnMeasure:
    if rng.random() < 0.5:
        return VulnMeasure.bayes()
    gain = rng.uniform(0.0, 2.0, size=(3, len(secrets)))
    return VulnMeasure.from_gain(
        GainFunction.build(("w1", "w2", "w3"), tuple(secrets), gain))


def random_game(rng) -> LeakageGame:
    n_d = int(rng.integers(2, 4))
    n_a = int(rng.integers(2, 4))
    n_x = int(rng.integers(2, 5))
    secrets = tuple(f"x{i}" for i in range(n_x))
    defenders = tuple(str(d) for d in range(n_d))
    attackers = tuple(str(a) for a in range(n_a))
    chans = {}
    for a in attackers:
        n_y = int(rng.integers(2, 5))
        cols = tuple(f"y{a}_{k}" for k in range(n_y))
        deterministic = rng.random() < 0.3
        for d in defenders:
            if deterministic:
                chans[d, a] = random_deterministic_channel(rng, secrets, cols)
            else:
                chans[d, a] = random_channel(rng, secrets, cols)
    return LeakageGame(defenders, attackers, chans,
                       random_prior(rng, secrets), random_measure(rng, secrets))
