"""Error models and diagnostic experiments for the probe-readout protocol.

The protocol tolerates any unital noise on the data register before the
parity couplings (the register is maximally mixed) and after the
rotation (the readout only touches the probe).  Errors in between do
matter: a phase flip on a coupled data qubit propagates to a bit flip on
the probe input, and depolarization at rate q on each data qubit damps
the probe signal by (1-q) per coupled qubit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import circuits, dqc1, lpn, qstate
from .circuits import HADAMARD, PAULI_X, PAULI_Y, PAULI_Z, as_bits, embed, weight
from .dqc1 import Dqc1Config, EstimateRecord
from .qstate import DensityMatrix, KrausSet, OperatorMatrix


@dataclass(frozen=True)
class NoiseSpec:
    """Bundle of error rates for the sweep commands.

    p_readout: probe readout depolarization, q_mid: mid-circuit data
    depolarization, phi: rotation-axis tilt (radians), theta_error:
    additive rotation-angle offset (radians).
    """

    p_readout: float = 0.0
    q_mid: float = 0.0
    phi: float = 0.0
    theta_error: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p_readout < 1.0:
            raise ValueError("p_readout outside [0, 1)")
        if not 0.0 <= self.q_mid <= 1.0:
            raise ValueError("q_mid outside [0, 1]")


def depolarizing_kraus(rate: float) -> KrausSet:
    """Single-qubit depolarizing channel of strength `rate` in Kraus form."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("depolarizing rate outside [0, 1]")
    return KrausSet(
        [
            np.sqrt(1.0 - 3.0 * rate / 4.0) * np.eye(2),
            np.sqrt(rate / 4.0) * PAULI_X,
            np.sqrt(rate / 4.0) * PAULI_Y,
            np.sqrt(rate / 4.0) * PAULI_Z,
        ]
    )


def depolarize(rho: DensityMatrix, rate: float, targets: Iterable[int]) -> DensityMatrix:
    """Depolarize each target qubit independently at the given rate."""
    targets = sorted(set(int(t) for t in targets))
    total = rho.num_qubits
    if targets and (targets[0] < 0 or targets[-1] >= total):
        raise ValueError(f"targets {targets} outside qubits 0..{total - 1}")
    kraus = depolarizing_kraus(rate)
    for t in targets:
        full = KrausSet(
            [embed(op, t, total) for op in kraus.operators], validate=False
        )
        rho = qstate.apply_channel(rho, full)
    return rho


def default_probe_bit(s) -> int | None:
    """Data qubit probed by the diagnostic circuits: the first 0 bit of s,
    or None (uniform rotation) when s is all ones."""
    bits = as_bits(s)
    zeros = np.flatnonzero(bits == 0)
    return int(zeros[0]) + 1 if zeros.size else None


def _final_state(
    s, cfg: Dqc1Config, *, j: int | None, phi: float = 0.0,
    between: "callable | None" = None,
) -> DensityMatrix:
    """Dense run of one probe step, with an optional corruption applied
    between the parity couplings and the controlled rotation."""
    bits = as_bits(s, n=cfg.n)
    total = cfg.n + 1
    rho = dqc1.initial_state(cfg)
    had = OperatorMatrix(embed(HADAMARD, 0, total), unitary=True, validate=False)
    rho = qstate.apply_unitary(rho, had)
    rho = qstate.apply_unitary(
        rho, circuits.controlled(circuits.build_parity_unitary(bits))
    )
    if between is not None:
        rho = between(rho)
    rot = circuits.build_rotation(
        circuits.RotationSpec(theta=cfg.theta, phi=phi, excluded=j), cfg.n
    )
    return qstate.apply_unitary(rho, circuits.controlled(rot))


def midcircuit_noise_experiment(
    s, cfg: Dqc1Config, q: float, *, j: int | None = None
) -> float:
    """Signal ratio under data depolarization between couplings and rotation.

    Runs the probe-step circuit densely with every data qubit depolarized
    at rate q in the middle, and returns |<sx> + i <sy>| divided by the
    noiseless value.  For a string of weight m the exact ratio is
    (1-q)^m.
    """
    bits = as_bits(s, n=cfg.n)
    if not 0.0 <= q <= 0.2:
        raise ValueError("mid-circuit rate q outside [0, 0.2]")
    if weight(bits) == 0:
        raise ValueError("all-zero string carries no coupling to damp")
    if j is None:
        j = default_probe_bit(bits)
    data = range(1, cfg.n + 1)
    noisy = _final_state(
        bits, cfg, j=j, between=lambda r: depolarize(r, q, data)
    )
    clean = _final_state(bits, cfg, j=j)
    num = complex(*dqc1.probe_expectations(noisy, cfg.p))
    den = complex(*dqc1.probe_expectations(clean, cfg.p))
    if abs(den) < 1e-15:
        raise ValueError("noiseless signal vanishes; pick a probe bit with s_j = 0")
    return abs(num) / abs(den)


def phase_flip_parity_experiment(
    s, cfg: Dqc1Config, flip_set: Iterable[int], *, j: int | None = None
) -> EstimateRecord:
    """Deterministic sz insertions on data qubits between couplings and
    rotation; returns the analytic expectations of the corrupted circuit.

    Flips on coupled (s_k = 1) qubits each propagate a bit flip to the
    probe input: an even number cancels, an odd number flips the sign of
    the probe polarization.  Flips on uncoupled qubits do nothing and are
    flagged with a warning.
    """
    bits = as_bits(s, n=cfg.n)
    flips = sorted(set(int(k) for k in flip_set))
    if flips and (flips[0] < 1 or flips[-1] > cfg.n):
        raise ValueError(f"flip set {flips} outside data qubits 1..{cfg.n}")
    idle = [k for k in flips if not bits[k - 1]]
    if idle:
        warnings.warn(
            f"phase flips on uncoupled qubits {idle} cannot reach the probe",
            stacklevel=2,
        )
    if j is None:
        j = default_probe_bit(bits)
    total = cfg.n + 1

    def insert(rho):
        for k in flips:
            zk = OperatorMatrix(embed(PAULI_Z, k, total), unitary=True, validate=False)
            rho = qstate.apply_unitary(rho, zk)
        return rho

    final = _final_state(bits, cfg, j=j, between=insert)
    ex, ey = dqc1.probe_expectations(final, cfg.p)
    return EstimateRecord(ex=ex, ey=ey, se_x=0.0, se_y=0.0, ensemble_L=1, queries_Q=1)


@dataclass(frozen=True)
class SystematicErrorRow:
    phi: float
    theta: float
    tau_dense: complex
    tau_predicted: complex
    deviation: float


def systematic_error_sweep(
    s,
    cfg: Dqc1Config,
    phi_grid: Sequence[float],
    theta_grid: Sequence[float],
    *,
    j: int | None = None,
) -> list[SystematicErrorRow]:
    """Normalized trace under a tilted rotation axis, across a (phi, theta)
    grid, against the prediction untilted_tau x cos(phi)^m.

    Each coupled qubit rotated about the tilted axis picks up one factor
    of cos(phi), so the signal dies at phi = pi/2 whenever m >= 1.
    Amplitude (theta) miscalibration is covered by the theta axis of the
    grid: the trace formula holds at whatever angle was actually applied.
    """
    bits = as_bits(s, n=cfg.n)
    if j is None:
        j = default_probe_bit(bits)
    m = weight(bits)
    rows = []
    for phi in phi_grid:
        for theta in theta_grid:
            block = circuits.parity_step_block(bits, theta, j=j, phi=phi)
            tau_dense = complex(block.entries.trace() / block.dim)
            untilted = lpn._tau_factors(
                bits, theta, j, frozenset(), frozenset()
            )
            predicted = untilted * np.cos(phi) ** m
            rows.append(
                SystematicErrorRow(
                    phi=float(phi),
                    theta=float(theta),
                    tau_dense=tau_dense,
                    tau_predicted=complex(predicted),
                    deviation=abs(tau_dense - predicted),
                )
            )
    return rows
