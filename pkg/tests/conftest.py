"""Shared solved fields; session-scoped since each solve costs seconds."""

import pytest

from m2morph import GridSpec, MetricParams, solve_exact_distance


@pytest.fixture(scope="session")
def field_iso_41():
    """Exact distance, w = (1, 1, 1), 41^3 grid."""
    return solve_exact_distance(GridSpec(41, 41, 41), MetricParams(1, 1, 1))


@pytest.fixture(scope="session")
def field_aniso_41():
    """Exact distance, w = (1, 2, 1), 41^3 grid."""
    return solve_exact_distance(GridSpec(41, 41, 41), MetricParams(1, 2, 1))


@pytest.fixture(scope="session")
def field_iso_61():
    """Exact distance, w = (1, 1, 1), 61^3 grid (x = 1 is a node)."""
    return solve_exact_distance(GridSpec(61, 61, 61), MetricParams(1, 1, 1))


@pytest.fixture(scope="session")
def field_aniso_101():
    """Exact distance, w = (1, 2, 1), default 101^3 grid."""
    return solve_exact_distance(GridSpec(101, 101, 101), MetricParams(1, 2, 1))
