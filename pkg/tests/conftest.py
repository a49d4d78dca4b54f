"""Shared fixtures and independent numeric oracles.

The oracle helpers here rebuild everything from scratch with plain numpy
(letter tables, kron products, projector sandwiches) so that engine
results are checked against a second, independent route.
"""

import numpy as np
import pytest

from bellsquare import four_qubit_state

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
LETTER = {"I": I2, "X": X, "Y": Y, "Z": Z}

# Letter forms of the fifteen observables, qubit 1 leftmost.
LETTER_DEFS = {
    "A": "ZIII", "B": "IZII", "C": "ZZII",
    "a": "IXII", "b": "XIII", "c": "XXII",
    "α": "ZXII", "β": "XZII", "γ": "YYII",
    "B'": "IIIZ", "C'": "IIZZ", "a'": "IIIX",
    "c'": "IIXX", "α'": "IIZX", "β'": "IIXZ",
}


def kron_letters(letters: str) -> np.ndarray:
    m = np.array([[1]], dtype=complex)
    for ch in letters:
        m = np.kron(m, LETTER[ch])
    return m


def oracle_matrix(label: str) -> np.ndarray:
    return kron_letters(LETTER_DEFS[label])


def oracle_sequential_distribution(rho: np.ndarray, labels) -> dict[tuple[int, ...], float]:
    """Joint outcome probabilities via explicit projector sandwiches."""
    dim = rho.shape[0]
    eye = np.eye(dim, dtype=complex)
    entries: dict[tuple[int, ...], float] = {}
    stack = [(rho, ())]
    for label in labels:
        matrix = oracle_matrix(label)
        grown = []
        for state, outcomes in stack:
            for outcome in (1, -1):
                proj = (eye + outcome * matrix) / 2
                branch = proj @ state @ proj
                prob = float(np.real(np.trace(branch)))
                if prob > 1e-12:
                    grown.append((branch, outcomes + (outcome,)))
        stack = grown
    for state, outcomes in stack:
        entries[outcomes] = float(np.real(np.trace(state)))
    return entries


def random_density_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


@pytest.fixture(scope="session")
def ideal_state():
    return four_qubit_state(1.0)


@pytest.fixture(scope="session")
def mixed_state():
    return four_qubit_state(0.0)
