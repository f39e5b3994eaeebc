"""Shared builders for test ensembles and measurements."""

from __future__ import annotations

import numpy as np
import pytest

from qsd import Ensemble, State, make_povm


def ket(*amplitudes) -> np.ndarray:
    v = np.array(amplitudes, dtype=np.complex128)
    return v / np.linalg.norm(v)


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    return np.outer(v, v.conj())


def pure_ensemble(priors, vectors) -> Ensemble:
    dim = len(vectors[0])
    states = tuple(State(p, projector(v)) for p, v in zip(priors, vectors))
    return Ensemble(dim=dim, states=states)


@pytest.fixture
def orthonormal_pair() -> Ensemble:
    return pure_ensemble((0.5, 0.5), (ket(1, 0), ket(0, 1)))


@pytest.fixture
def orthonormal_pair_povm():
    return make_povm([projector(ket(1, 0)), projector(ket(0, 1))])


@pytest.fixture
def zero_plus() -> Ensemble:
    """|0> and |+> with equal priors; the classic symmetric pure pair."""
    return pure_ensemble((0.5, 0.5), (ket(1, 0), ket(1, 1)))


@pytest.fixture
def trine() -> Ensemble:
    """Three equiprobable real qubit states at 120 degrees."""
    vectors = [
        np.array([np.cos(2 * np.pi * k / 3), np.sin(2 * np.pi * k / 3)])
        for k in range(3)
    ]
    return pure_ensemble((1 / 3, 1 / 3, 1 / 3), vectors)


def trine_vectors():
    return [
        np.array([np.cos(2 * np.pi * k / 3), np.sin(2 * np.pi * k / 3)])
        for k in range(3)
    ]
