"""One-clean-qubit protocol: state preparation, readout, shot sampling.

The register holds one probe qubit with polarization alpha (qubit 0) and
n maximally mixed data qubits.  After a probe Hadamard and a controlled
data-register block ``w`` the probe carries the normalized trace of ``w``:

    <sx> + i <sy> = (1 - p) alpha tr(w) / 2^n

where p is the probe readout depolarization rate.  Shot sampling models
each query as the mean of L two-outcome (+-1) measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import circuits, qstate
from .circuits import HADAMARD, PAULI_X, PAULI_Y, embed
from .qstate import DensityMatrix, OperatorMatrix

_BACKENDS = ("dense", "closed", "sampled")


@dataclass(frozen=True)
class Dqc1Config:
    """Protocol parameters.

    backend selects how expectation values are produced: "dense" builds
    the full matrices, "closed" uses the factorized trace formulas, and
    "sampled" adds binomial shot noise on top of the closed-form values.
    """

    n: int
    alpha: float
    p: float
    theta: float
    backend: str = "dense"
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha {self.alpha} outside [0, 1]")
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"readout depolarization p {self.p} outside [0, 1)")
        if self.backend not in _BACKENDS:
            raise ValueError(f"backend {self.backend!r} not one of {_BACKENDS}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class EstimateRecord:
    """One estimate of the probe expectations.

    ensemble_L is the per-query shot count, queries_Q the number of
    queries averaged.  Analytic backends report se 0.
    """

    ex: float
    ey: float
    se_x: float
    se_y: float
    ensemble_L: int
    queries_Q: int

    def __post_init__(self):
        if abs(self.ex) > 1.0 + 1e-12 or abs(self.ey) > 1.0 + 1e-12:
            raise ValueError("expectation estimates must lie in [-1, 1]")
        if self.se_x < 0.0 or self.se_y < 0.0:
            raise ValueError("standard errors must be nonnegative")
        if self.ensemble_L < 1 or self.queries_Q < 1:
            raise ValueError("ensemble_L and queries_Q must be positive")


def initial_state(cfg: Dqc1Config) -> DensityMatrix:
    """Probe with polarization alpha tensored with n maximally mixed qubits."""
    probe = DensityMatrix(
        np.diag([(1.0 + cfg.alpha) / 2.0, (1.0 - cfg.alpha) / 2.0]).astype(complex),
        validate=False,
    )
    if cfg.n == 0:
        return probe
    return qstate.tensor(probe, DensityMatrix.maximally_mixed(cfg.n))


def run_protocol(cfg: Dqc1Config, w: OperatorMatrix) -> DensityMatrix:
    """Apply H on the probe, then the controlled block, to the initial state.

    The output is exactly

        (1 + alpha (|0><1| x w^dag + |1><0| x w)) / 2^(n+1).
    """
    if w.num_qubits != cfg.n:
        raise ValueError(f"block spans {w.num_qubits} qubits, config says {cfg.n}")
    rho = initial_state(cfg)
    total = cfg.n + 1
    had = OperatorMatrix(embed(HADAMARD, 0, total), unitary=True, validate=False)
    rho = qstate.apply_unitary(rho, had)
    return qstate.apply_unitary(rho, circuits.controlled(w))


def expectations_from_tau(alpha: float, p: float, tau: complex) -> tuple[float, float]:
    """Probe readout (<sx>, <sy>) for a block with normalized trace tau."""
    z = (1.0 - p) * alpha * complex(tau)
    return float(z.real), float(z.imag)


def analytic_expectations(cfg: Dqc1Config, w: OperatorMatrix) -> tuple[float, float]:
    """Exact probe expectations from the dense trace of the block."""
    if w.num_qubits != cfg.n:
        raise ValueError(f"block spans {w.num_qubits} qubits, config says {cfg.n}")
    tau = w.entries.trace() / w.dim
    return expectations_from_tau(cfg.alpha, cfg.p, tau)


def probe_expectations(rho: DensityMatrix, p: float = 0.0) -> tuple[float, float]:
    """Measured (<sx>, <sy>) on qubit 0 of a register state, after readout
    depolarization at rate p."""
    total = rho.num_qubits
    sx = OperatorMatrix(embed(PAULI_X, 0, total), validate=False)
    sy = OperatorMatrix(embed(PAULI_Y, 0, total), validate=False)
    return (
        (1.0 - p) * qstate.expectation(rho, sx),
        (1.0 - p) * qstate.expectation(rho, sy),
    )


def _sample_one_observable(
    truth: float, L: int, Q: int, stream: np.random.SeedSequence
) -> tuple[float, float]:
    """Mean of Q queries, each the average of L two-outcome shots.

    Every query draws from its own child stream, so shot generation can
    be parallelized without changing the result.
    """
    prob_up = (1.0 + truth) / 2.0
    means = np.empty(Q)
    for i, child in enumerate(stream.spawn(Q)):
        rng = np.random.Generator(np.random.PCG64(child))
        ups = rng.binomial(L, prob_up)
        means[i] = (2.0 * ups - L) / L
    est = float(means.mean())
    # plug-in standard error of the pooled mean of L*Q shots
    se = math.sqrt(max(0.0, 1.0 - est * est) / (L * Q))
    return est, se


def sample_expectations(
    cfg: Dqc1Config,
    true_ex: float,
    true_ey: float,
    L: int,
    Q: int,
    *,
    stream: np.random.SeedSequence | None = None,
    observables: tuple[str, ...] = ("x", "y"),
) -> EstimateRecord:
    """Simulate shot-noise estimation of the probe expectations.

    Seeding is hierarchical: one child stream per observable, one
    grandchild per query, derived from ``stream`` (default: the config
    seed).  Identical inputs therefore reproduce the record bit for bit.
    Observables left out of `observables` are reported as 0 with se 0.
    """
    if abs(true_ex) > 1.0 or abs(true_ey) > 1.0:
        raise ValueError("true expectations must lie in [-1, 1]")
    if L < 1 or Q < 1:
        raise ValueError("L and Q must be positive")
    unknown = set(observables) - {"x", "y"}
    if unknown:
        raise ValueError(f"unknown observables {sorted(unknown)}")
    root = stream if stream is not None else np.random.SeedSequence(cfg.seed)
    x_stream, y_stream = root.spawn(2)
    ex = ey = 0.0
    se_x = se_y = 0.0
    if "x" in observables:
        ex, se_x = _sample_one_observable(true_ex, L, Q, x_stream)
    if "y" in observables:
        ey, se_y = _sample_one_observable(true_ey, L, Q, y_stream)
    return EstimateRecord(
        ex=ex, ey=ey, se_x=se_x, se_y=se_y, ensemble_L=L, queries_Q=Q
    )
