"""
FrameCraft Test Suite: Shared Fixtures

Provides the standard small frames (orthonormal bases, Mercedes-Benz,
repeated vectors), a seeded generator, and quiet logging for all test
categories.
"""

import os
import sys

import numpy as np
import pytest

# Ensure project root is in path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))


# ── Standard frames ──────────────────────────────────────────────────
@pytest.fixture
def onb2():
    """Canonical orthonormal basis of ℂ²."""
    from schemas.models import Frame
    return Frame.from_vectors(np.eye(2))


@pytest.fixture
def onb3():
    from schemas.models import Frame
    return Frame.from_vectors(np.eye(3))


@pytest.fixture
def mercedes_benz():
    """Three unit vectors of ℝ² at 120°, tight with S = (3/2)·I."""
    from schemas.models import Frame
    angles = np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])
    return Frame.from_vectors(np.column_stack([np.cos(angles), np.sin(angles)]))


@pytest.fixture
def e1e1():
    """{e1, e1} in ℂ², not a frame."""
    from schemas.models import Frame
    return Frame.from_vectors([[1.0, 0.0], [1.0, 0.0]])


@pytest.fixture
def e1e1e2():
    """{e1, e1, e2} in ℂ²: unit norms, S = diag(2, 1), reducible."""
    from schemas.models import Frame
    return Frame.from_vectors([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# ── Files ────────────────────────────────────────────────────────────
@pytest.fixture
def write_frame(tmp_path):
    """Write a Frame to <tmp>/<name>.json and return the path as a string."""
    from utils.serialization import write_json

    def _write(frame, name: str = "frame") -> str:
        path = tmp_path / f"{name}.json"
        write_json(path, frame.to_payload())
        return str(path)
    return _write


@pytest.fixture
def write_matrix(tmp_path):
    from utils.serialization import matrix_to_payload, write_json

    def _write(M, name: str = "matrix") -> str:
        path = tmp_path / f"{name}.json"
        write_json(path, matrix_to_payload(M))
        return str(path)
    return _write


# ── Pytest Configuration ─────────────────────────────────────────────
@pytest.fixture(autouse=True)
def _quiet_logging():
    """WARNING-level JSON logs on stderr, as in production."""
    from utils.logging_utils import configure_logging
    configure_logging(debug=False, level="WARNING")
