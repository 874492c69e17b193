"""Dense linear-algebra substrate for small multi-qubit density-matrix work.

Conventions used across the package:

* qubit 0 is the leftmost (most significant) Kronecker factor;
* everything is dense ``complex128`` and dimensions are powers of two;
* wrapped arrays are frozen after construction, so values can be shared
  between concurrent workers without copying.

Sizes are deliberately desk-scale; :data:`MAX_QUBITS` caps tensor growth
before a dense matrix stops fitting in memory.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
UNITARITY_TOL = 1e-12
KRAUS_TOL = 1e-12
MIN_EIGENVALUE = -1e-10
IMAG_RESIDUE_TOL = 1e-10

#: Largest total qubit count ``tensor`` will produce.
MAX_QUBITS = 12


def _num_qubits(dim: int) -> int:
    k = int(dim).bit_length() - 1
    if dim <= 0 or 2**k != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return k


def _square_complex(entries) -> np.ndarray:
    mat = np.array(entries, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    return mat


def _freeze(mat: np.ndarray) -> np.ndarray:
    mat.flags.writeable = False
    return mat


class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix over k qubits.

    Construction validates Hermiticity and trace to 1e-12 and the spectrum
    down to ``MIN_EIGENVALUE``.  Internal code that produces states through
    trace-preserving maps passes ``validate=False`` to skip the (eigenvalue)
    recheck; anything built from raw user input keeps the default.
    """

    __slots__ = ("entries", "dim", "num_qubits")

    def __init__(self, entries, *, validate: bool = True):
        mat = _square_complex(entries)
        dim = mat.shape[0]
        k = _num_qubits(dim)
        if validate:
            herm = np.abs(mat - mat.conj().T).max()
            if herm > HERMITICITY_TOL:
                raise ValueError(f"matrix is not Hermitian (residue {herm:.3e})")
            tr = mat.trace()
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"trace {tr} differs from one")
            low = np.linalg.eigvalsh(mat).min()
            if low < MIN_EIGENVALUE:
                raise ValueError(f"negative eigenvalue {low:.3e}")
        self.entries = _freeze(mat)
        self.dim = dim
        self.num_qubits = k

    @classmethod
    def from_pure(cls, vector) -> "DensityMatrix":
        vec = np.asarray(vector, dtype=complex).ravel()
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("zero vector has no state")
        vec = vec / norm
        return cls(np.outer(vec, vec.conj()), validate=False)

    @classmethod
    def maximally_mixed(cls, num_qubits: int) -> "DensityMatrix":
        dim = 2**num_qubits
        return cls(np.eye(dim, dtype=complex) / dim, validate=False)

    def __repr__(self) -> str:  # pragma: no cover
        return f"DensityMatrix(dim={self.dim})"


class OperatorMatrix:
    """Square complex matrix over k qubits, optionally flagged unitary."""

    __slots__ = ("entries", "dim", "num_qubits", "unitary")

    def __init__(self, entries, *, unitary: bool = False, validate: bool = True):
        mat = _square_complex(entries)
        dim = mat.shape[0]
        k = _num_qubits(dim)
        if validate and unitary:
            res = np.abs(mat.conj().T @ mat - np.eye(dim)).max()
            if res > UNITARITY_TOL:
                raise ValueError(f"matrix flagged unitary fails U^dag U = 1 ({res:.3e})")
        self.entries = _freeze(mat)
        self.dim = dim
        self.num_qubits = k
        self.unitary = bool(unitary)

    def __repr__(self) -> str:  # pragma: no cover
        tag = ", unitary" if self.unitary else ""
        return f"OperatorMatrix(dim={self.dim}{tag})"


class KrausSet:
    """Complete set of Kraus operators: sum_i K_i^dag K_i = 1 within 1e-12."""

    __slots__ = ("operators", "dim")

    def __init__(self, operators: Sequence, *, validate: bool = True):
        ops = [np.array(op, dtype=complex) for op in operators]
        if not ops:
            raise ValueError("empty Kraus set")
        dim = ops[0].shape[0]
        for op in ops:
            if op.ndim != 2 or op.shape != (dim, dim):
                raise ValueError("Kraus operators must share one square shape")
        if validate:
            acc = sum(op.conj().T @ op for op in ops)
            res = np.abs(acc - np.eye(dim)).max()
            if res > KRAUS_TOL:
                raise ValueError(f"Kraus completeness violated (residue {res:.3e})")
        self.operators = tuple(_freeze(op) for op in ops)
        self.dim = dim


def tensor(a, b):
    """Kronecker product of two states or two operators, `a` leftmost.

    Qubit 0 of the result is qubit 0 of `a`; tensoring past ``MAX_QUBITS``
    total qubits is refused.
    """
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        if a.num_qubits + b.num_qubits > MAX_QUBITS:
            raise ValueError(
                f"tensor would span {a.num_qubits + b.num_qubits} qubits "
                f"(limit {MAX_QUBITS})"
            )
        return DensityMatrix(np.kron(a.entries, b.entries), validate=False)
    if isinstance(a, OperatorMatrix) and isinstance(b, OperatorMatrix):
        if a.num_qubits + b.num_qubits > MAX_QUBITS:
            raise ValueError(
                f"tensor would span {a.num_qubits + b.num_qubits} qubits "
                f"(limit {MAX_QUBITS})"
            )
        return OperatorMatrix(
            np.kron(a.entries, b.entries),
            unitary=a.unitary and b.unitary,
            validate=False,
        )
    raise TypeError("tensor expects two DensityMatrix or two OperatorMatrix arguments")


def apply_unitary(rho: DensityMatrix, u: OperatorMatrix) -> DensityMatrix:
    """Conjugate `rho` by the unitary `u`; spectrum and trace are preserved."""
    if rho.dim != u.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, operator {u.dim}")
    if not u.unitary:
        res = np.abs(u.entries.conj().T @ u.entries - np.eye(u.dim)).max()
        if res > UNITARITY_TOL:
            raise ValueError(f"operator is not unitary (residue {res:.3e})")
    out = u.entries @ rho.entries @ u.entries.conj().T
    return DensityMatrix(out, validate=False)


def apply_channel(rho: DensityMatrix, kraus: KrausSet) -> DensityMatrix:
    """Apply the channel rho -> sum_i K_i rho K_i^dag."""
    if rho.dim != kraus.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, Kraus {kraus.dim}")
    out = np.zeros_like(rho.entries)
    for op in kraus.operators:
        out = out + op @ rho.entries @ op.conj().T
    return DensityMatrix(out, validate=False)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every qubit not listed in `keep`.

    Kept qubits retain their relative order.  `keep` must be a non-empty
    subset of ``range(rho.num_qubits)``.
    """
    kept = sorted(set(int(q) for q in keep))
    k = rho.num_qubits
    if not kept:
        raise ValueError("keep set is empty")
    if kept[0] < 0 or kept[-1] >= k:
        raise ValueError(f"keep set {kept} outside qubits 0..{k - 1}")
    traced = [q for q in range(k) if q not in kept]
    tens = rho.entries.reshape([2] * (2 * k))
    for count, q in enumerate(traced):
        # axes shift down as earlier qubits are contracted away
        live = k - count
        tens = np.trace(tens, axis1=q - count, axis2=live + q - count)
    dim = 2 ** len(kept)
    return DensityMatrix(tens.reshape(dim, dim), validate=False)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy -sum_i lam_i log2 lam_i with eigenvalues clipped to [0, 1]."""
    lam = np.clip(np.linalg.eigvalsh(rho.entries), 0.0, 1.0)
    pos = lam[lam > 0]
    return float(-(pos * np.log2(pos)).sum())


def expectation(rho: DensityMatrix, obs: OperatorMatrix) -> float:
    """Real expectation value tr(obs rho) of a Hermitian observable."""
    if rho.dim != obs.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, observable {obs.dim}")
    herm = np.abs(obs.entries - obs.entries.conj().T).max()
    if herm > HERMITICITY_TOL:
        raise ValueError(f"observable is not Hermitian (residue {herm:.3e})")
    val = complex(np.einsum("ij,ji->", obs.entries, rho.entries))
    if abs(val.imag) > IMAG_RESIDUE_TOL:
        raise RuntimeError(f"expectation carries imaginary residue {val.imag:.3e}")
    return float(val.real)
