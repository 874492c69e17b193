import numpy as np
import pytest


def random_unitary(rng, dim):
    """Haar-ish unitary from the QR decomposition of a complex Gaussian."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_density(rng, num_qubits):
    dim = 2**num_qubits
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    mat = z @ z.conj().T
    return mat / np.trace(mat).real


def reference_tau(bits, theta, rotated):
    """Normalized trace of the rotate-then-flip block, built qubit by qubit.

    Deliberately avoids the package's circuit builders: per-qubit 2x2
    factors are assembled with raw numpy and multiplied into a full
    kron product before tracing.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.size
    c, s = np.cos(theta / 2.0), 1j * np.sin(theta / 2.0)
    rot = np.array([[c, s], [s, c]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    total = np.array([[1.0 + 0j]])
    for k in range(1, n + 1):
        factor = rot if k in rotated else eye
        if bits[k - 1]:
            factor = factor @ flip
        total = np.kron(total, factor)
    return complex(np.trace(total)) / 2**n


def all_bitstrings(n):
    for value in range(2**n):
        yield np.array([(value >> (n - 1 - k)) & 1 for k in range(n)], dtype=np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
