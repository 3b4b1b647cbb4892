from __future__ import annotations

import functools
import math
import time

import numpy as np
import pytest

from knotapoly.apoly import apoly
from knotapoly.knot_input import parse_knot_spec
from knotapoly.pillowcase import TWO_PI, compute_pillowcase, riley_pillowcase, wrap_angle


@functools.lru_cache(maxsize=None)
def apoly_of(spec):
    return apoly(parse_knot_spec(spec))


def abelian_line(n=360):
    return [(TWO_PI * k / n, 0.0) for k in range(n)]


def synthetic_set(rng, n_points=None):
    """Random symmetric finite set away from (k pi, +-pi), together with the abelian line."""
    n_points = n_points or int(rng.integers(1, 6))
    pts = []
    while len(pts) < n_points:
        th, et = rng.uniform(0, TWO_PI, 2)
        corner = min(max(abs(wrap_angle(th - a + math.pi) - math.pi), abs(wrap_angle(et) - math.pi))
                     for a in (0.0, math.pi, TWO_PI))
        if corner > 0.2:
            pts.append((th, et))
    pts += [tuple(wrap_angle(-np.array(p))) for p in pts]
    return np.array(pts + abelian_line())


# wall-clock seconds spent computing each cached pillowcase, keyed like the caches
COMPUTE_SECONDS = {}


@functools.lru_cache(maxsize=None)
def pillowcase_of(spec, n=360):
    start = time.perf_counter()
    s = compute_pillowcase(parse_knot_spec(spec), n)
    COMPUTE_SECONDS[("slice", spec, n)] = time.perf_counter() - start
    return s


@functools.lru_cache(maxsize=None)
def riley_set_of(spec, n=360):
    start = time.perf_counter()
    s = riley_pillowcase(parse_knot_spec(spec), n)
    COMPUTE_SECONDS[("riley", spec, n)] = time.perf_counter() - start
    return s


@pytest.fixture(scope="session")
def trefoil_set():
    return pillowcase_of("3/1")


@pytest.fixture(scope="session")
def figure_eight_set():
    return pillowcase_of("5/3")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
