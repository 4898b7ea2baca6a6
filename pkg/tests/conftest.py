"""Shared fixtures.

The session-scoped field fixture matters for runtime: tree operators and
aroma values are cached per FrameVectorField instance, so reusing one
field across test modules avoids recomputing the grade-5 tree tables.
"""

from __future__ import annotations

import pytest

from postlie.geomint import FrameVectorField, GroupFrame, divergence_free_field, so3


@pytest.fixture(scope="session")
def frame() -> GroupFrame:
    return so3()


@pytest.fixture(scope="session")
def field() -> FrameVectorField:
    return divergence_free_field()
