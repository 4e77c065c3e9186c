import math

import numpy as np
import pytest

import chiralqed as cq

CESIUM_RATIO = 1.0 / math.sqrt(45.0)


@pytest.fixture
def equal_params():
    return cq.SystemParams(g_q=0.05, g_a=0.05, g_b=0.05)


@pytest.fixture
def cesium_params():
    """Bad-cavity cesium-like configuration: g_a = 0.05, r = 0.2, r_a = 1/sqrt(45)."""
    return cq.SystemParams(g_q=0.01, g_a=0.05, g_b=0.05 * CESIUM_RATIO)


def draw_couplings(rng, low=-3.0, high=-0.5):
    """One log-uniform coupling triple in the bad-cavity range."""
    g_q, g_a, g_b = 10.0 ** rng.uniform(low, high, 3)
    return cq.SystemParams(g_q=float(g_q), g_a=float(g_a), g_b=float(g_b))


def draw_hierarchical(rng):
    """Couplings with g_a > g_b (positive directionality), as in the protocol."""
    g_a = float(10.0 ** rng.uniform(-3.0, -0.7))
    r_a = float(rng.uniform(0.05, 0.95))
    r = float(10.0 ** rng.uniform(math.log10(0.05), math.log10(5.0)))
    return cq.SystemParams(g_q=r * g_a, g_a=g_a, g_b=r_a * g_a)
