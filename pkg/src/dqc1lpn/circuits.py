"""Gate and circuit-block constructors for the parity-learning protocol.

Layout: qubit 0 is the probe (control) qubit, data qubits are numbered
1..n and double as absolute qubit indices in the (n+1)-qubit register.
Bit j of a hidden string addresses data qubit j.

The x rotation follows the positive-phase convention
``R_x(t) = exp(+i t sx / 2)``, so ``tr(R_x(t) sx) = 2 i sin(t/2)`` and the
uniform-rotation trace over a parity pattern with m ones is
``2^n (i sin(t/2))^m (cos(t/2))^(n-m)``.  A tilted rotation axis replaces
sx by ``cos(phi) sx + sin(phi) sy``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qstate import OperatorMatrix

ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
PROJ_0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
PROJ_1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


def as_bits(s, n: int | None = None) -> np.ndarray:
    """Normalize a bit pattern ("0110", [0,1,1,0], ...) to a uint8 array."""
    if isinstance(s, str):
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"bit string {s!r} must be nonempty over {{0,1}}")
        bits = np.array([int(c) for c in s], dtype=np.uint8)
    else:
        bits = np.array(list(s), dtype=np.int64)
        if bits.ndim != 1 or bits.size == 0 or not np.isin(bits, (0, 1)).all():
            raise ValueError("bits must be a nonempty sequence over {0,1}")
        bits = bits.astype(np.uint8)
    if n is not None and bits.size != n:
        raise ValueError(f"expected {n} bits, got {bits.size}")
    return bits


def bits_to_str(bits) -> str:
    return "".join(str(int(b)) for b in np.asarray(bits).ravel())


def weight(bits) -> int:
    """Hamming weight."""
    return int(as_bits(bits).sum())


def rx(theta: float, phi: float = 0.0) -> np.ndarray:
    """2x2 rotation exp(+i theta/2 (cos phi sx + sin phi sy))."""
    c = np.cos(theta / 2.0)
    s = 1j * np.sin(theta / 2.0)
    return np.array(
        [[c, s * np.exp(-1j * phi)], [s * np.exp(1j * phi), c]], dtype=complex
    )


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for f in factors:
        out = np.kron(out, f)
    return out


def embed(gate: np.ndarray, qubit: int, total: int) -> np.ndarray:
    """Single-qubit `gate` on `qubit` (0-based), identity elsewhere."""
    if not 0 <= qubit < total:
        raise ValueError(f"qubit {qubit} outside 0..{total - 1}")
    return kron_all([gate if k == qubit else ID2 for k in range(total)])


def cnot(control: int, target: int, total: int) -> np.ndarray:
    """Dense CNOT on a `total`-qubit register."""
    if control == target:
        raise ValueError("control and target coincide")
    return embed(PROJ_0, control, total) + embed(PROJ_1, control, total) @ embed(
        PAULI_X, target, total
    )


@dataclass(frozen=True)
class RotationSpec:
    """Shape of a data-register x rotation.

    Exactly one shape applies: uniform (both selectors None), `excluded`
    (identity on that one data qubit, rotation on the rest), or
    `tail_from` (identity on data qubits 1..j, rotation on j+1..n).
    """

    theta: float
    phi: float = 0.0
    excluded: int | None = None
    tail_from: int | None = None

    def __post_init__(self):
        if self.excluded is not None and self.tail_from is not None:
            raise ValueError("excluded and tail_from are mutually exclusive")
        for name in ("excluded", "tail_from"):
            val = getattr(self, name)
            if val is not None and val < 1:
                raise ValueError(f"{name} must be a 1-based data-qubit index")

    def rotated(self, n: int) -> list[int]:
        """Data-qubit indices the rotation actually touches."""
        if self.excluded is not None:
            if self.excluded > n:
                raise ValueError(f"excluded qubit {self.excluded} exceeds n={n}")
            return [k for k in range(1, n + 1) if k != self.excluded]
        if self.tail_from is not None:
            if self.tail_from > n:
                raise ValueError(f"tail_from qubit {self.tail_from} exceeds n={n}")
            return list(range(self.tail_from + 1, n + 1))
        return list(range(1, n + 1))


def build_parity_unitary(s) -> OperatorMatrix:
    """Tensor product of sx on every data qubit with s_k = 1.

    Self-inverse, and traceless unless s is all zeros.
    """
    bits = as_bits(s)
    mat = kron_all([PAULI_X if b else ID2 for b in bits])
    return OperatorMatrix(mat, unitary=True, validate=False)


def build_rotation(spec: RotationSpec, n: int) -> OperatorMatrix:
    """Data-register rotation for the given shape over n data qubits.

    The excluded-j shape is the composition of the uniform rotation with
    the inverse rotation on qubit j, which nets to the identity there.
    """
    if n < 1:
        raise ValueError("need at least one data qubit")
    gate = rx(spec.theta, spec.phi)
    rotated = set(spec.rotated(n))
    mat = kron_all([gate if k in rotated else ID2 for k in range(1, n + 1)])
    return OperatorMatrix(mat, unitary=True, validate=False)


def controlled(u: OperatorMatrix) -> OperatorMatrix:
    """Block-diagonal [1, u]: apply `u` to the data register when the probe
    (most significant qubit) is set."""
    if not u.unitary:
        res = np.abs(u.entries.conj().T @ u.entries - np.eye(u.dim)).max()
        if res > 1e-12:
            raise ValueError(f"controlled block is not unitary (residue {res:.3e})")
    dim = u.dim
    out = np.zeros((2 * dim, 2 * dim), dtype=complex)
    out[:dim, :dim] = np.eye(dim)
    out[dim:, dim:] = u.entries
    return OperatorMatrix(out, unitary=True, validate=False)


def lpn_pure_output(x, s, sign: int = 1) -> np.ndarray:
    """State vector (|0>|x> + sign |1>|x xor s>)/sqrt(2) over n+1 qubits.

    These are the two branches a pure-state parity query can end in; the
    plus branch at x = 0..0 reveals s exactly when the probe reads 1.
    """
    xb = as_bits(x)
    sb = as_bits(s, n=xb.size)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    n = xb.size
    vec = np.zeros(2 ** (n + 1), dtype=complex)
    ix = int("".join(str(int(b)) for b in xb), 2)
    ixs = int("".join(str(int(b)) for b in xb ^ sb), 2)
    vec[ix] = 1.0 / np.sqrt(2.0)
    vec[2**n + ixs] += sign / np.sqrt(2.0)
    return vec


def parity_step_block(s, theta: float, *, j: int | None = None, phi: float = 0.0) -> OperatorMatrix:
    """Data-register block rotation . parity pattern for one probe step.

    With `j` given the rotation skips data qubit j (the discrimination
    step); with ``j=None`` the rotation is uniform.
    """
    bits = as_bits(s)
    n = bits.size
    spec = RotationSpec(theta=theta, phi=phi, excluded=j)
    rot = build_rotation(spec, n)
    par = build_parity_unitary(bits)
    return OperatorMatrix(rot.entries @ par.entries, unitary=True, validate=False)


def error_identity_check() -> float:
    """Check the phase-error propagation identity on two qubits.

    A sz after the controlled-x block (probe controls, data qubit is the
    target) equals the same circuit preceded by sx on the probe and sz on
    the data qubit, once the probe Hadamard is accounted for:

        (1 x sz) . CNOT . (H x 1) = CNOT . (H x 1) . (sx x sz)

    Returns the largest entrywise deviation between the two sides.
    """
    cx = cnot(0, 1, 2)
    lhs = embed(PAULI_Z, 1, 2) @ cx @ embed(HADAMARD, 0, 2)
    rhs = cx @ embed(HADAMARD, 0, 2) @ np.kron(PAULI_X, PAULI_Z)
    return float(np.abs(lhs - rhs).max())
