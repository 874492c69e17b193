"""Bitwise learner for a hidden parity string read out through one probe qubit.

The hidden string s enters the register as a pattern of controlled-x
couplings.  Probing bit j applies a controlled rotation to the data
qubits after j and reads the probe: the normalized trace factorizes per
qubit, so the reading is zero exactly when s_j = 1 and has magnitude
|Delta tau_j| otherwise.  Bits already processed are decoupled (a
controlled-x correction cancels the coupling of every learned 1), which
grows the discrimination gap by sqrt(2) per step at theta = pi/2:

    |Delta tau_j| = (1/sqrt(2))^(n-j).

Oracles close over s; the learner only ever sees the query callable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import circuits, dqc1
from .circuits import ID2, PAULI_X, as_bits, kron_all, rx
from .dqc1 import Dqc1Config, EstimateRecord

#: Hoeffding-style constant in the query budget.
HOEFFDING_C = 2.0

#: Type of a protocol query: (j, decoupled, corrections, ensemble, queries,
#: observables) -> EstimateRecord.
Oracle = Callable[..., EstimateRecord]


class BudgetExhaustedError(RuntimeError):
    """Raised when one bit would need more queries than the caller allows."""

    def __init__(self, j: int, required: int, allowed: int):
        super().__init__(
            f"bit {j} needs {required} queries, budget allows {allowed}"
        )
        self.j = j
        self.required = required
        self.allowed = allowed


@dataclass(frozen=True)
class BudgetParams:
    """Shot-budget planning parameters.

    delta is the failure probability; by default it is split globally
    (delta/n per bit), set per_bit_delta to spend delta on every bit.
    epsilon is the generic additive-accuracy knob for standalone trace
    estimation; the per-bit budget derives its own accuracy from the
    discrimination gap instead.
    """

    delta: float
    epsilon: float
    alpha: float
    p: float
    L: int
    per_bit_delta: bool = False

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0.0 <= self.p < 1.0:
            raise ValueError("p must lie in [0, 1)")
        if self.L < 1:
            raise ValueError("L must be positive")


@dataclass
class LearnerState:
    """Mutable bookkeeping carried across the bit-by-bit loop."""

    j: int = 1
    decided: dict[int, int] = field(default_factory=dict)
    decoupled: set[int] = field(default_factory=set)
    phase_known: bool = False
    quadrature: str | None = None


@dataclass(frozen=True)
class LearnStep:
    """One probed bit: the estimate it saw and the decision it produced."""

    j: int
    record: EstimateRecord
    queries: int
    threshold: float
    bit: int


@dataclass(frozen=True)
class LearnResult:
    s_hat: np.ndarray
    steps: tuple[LearnStep, ...]


def classical_oracle(s, p: float, rng) -> tuple[np.ndarray, int]:
    """One noisy parity query: uniform x and y = <s, x> xor e, P(e=1) = p/2."""
    if not 0.0 <= p < 1.0:
        raise ValueError("noise rate p must lie in [0, 1)")
    bits = as_bits(s)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    x = gen.integers(0, 2, size=bits.size, dtype=np.uint8)
    e = int(gen.random() < p / 2.0)
    y = (int(np.bitwise_and(x, bits).sum()) & 1) ^ e
    return x, y


def draw_classical_samples(
    s, p: float, count: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized batch of classical_oracle draws."""
    bits = as_bits(s)
    gen = np.random.default_rng(seed)
    xs = gen.integers(0, 2, size=(count, bits.size), dtype=np.uint8)
    clean = (xs @ bits.astype(np.int64)) & 1
    flips = gen.random(count) < p / 2.0
    return xs, (clean ^ flips).astype(np.uint8)


def _tau_factors(
    bits: np.ndarray,
    theta: float,
    j: int | None,
    decoupled: frozenset[int] | set[int],
    corrections: frozenset[int] | set[int],
) -> complex:
    """Per-qubit product for the normalized trace of one probe step.

    Decoupled qubits contribute 1 only while their recorded correction
    matches the true bit; a stale coupling or stray correction leaves a
    bare sx whose trace kills the whole product.
    """
    c = complex(np.cos(theta / 2.0))
    s = 1j * complex(np.sin(theta / 2.0))
    tau = 1.0 + 0.0j
    for k in range(1, bits.size + 1):
        bit = int(bits[k - 1])
        if k in decoupled:
            residual = bit ^ (1 if k in corrections else 0)
            if residual:
                return 0.0j
            continue
        if j is not None and k == j:
            if bit:
                return 0.0j
            continue
        tau *= s if bit else c
    return tau


def closed_form_tau(s, theta: float, j: int, decoupled: Iterable[int] = ()) -> complex:
    """Normalized trace for probing bit j with the given qubits decoupled.

    Factors: decoupled qubits give 1, qubit j gives 1 if s_j = 0 and 0
    otherwise, every remaining qubit gives cos(theta/2) for a 0 bit and
    i sin(theta/2) for a 1 bit.
    """
    bits = as_bits(s)
    n = bits.size
    if not 1 <= j <= n:
        raise ValueError(f"probe index {j} outside 1..{n}")
    dec = frozenset(int(k) for k in decoupled)
    if dec - set(range(1, n + 1)):
        raise ValueError("decoupled set outside data register")
    if j in dec:
        raise ValueError(f"probe index {j} cannot be decoupled")
    corr = frozenset(k for k in dec if bits[k - 1])
    return _tau_factors(bits, theta, j, dec, corr)


def delta_tau(
    n: int, m: int, theta: float, j: int, decoupled_count: int = 0
) -> complex:
    """Discrimination gap for probing bit j.

    The s_j = 1 reading is exactly zero, so the gap equals the s_j = 0
    trace: (i sin(theta/2))^m (cos(theta/2))^(n - 1 - d - m) for m ones
    among the rotated qubits and d decoupled qubits.  At theta = pi/2 the
    magnitude is (1/sqrt(2))^(n - 1 - d) regardless of m.
    """
    if not 1 <= j <= n:
        raise ValueError(f"probe index {j} outside 1..{n}")
    if not 0 <= decoupled_count <= n - 1:
        raise ValueError("decoupled_count outside 0..n-1")
    rotated = n - 1 - decoupled_count
    if not 0 <= m <= rotated:
        raise ValueError(f"m={m} impossible with {rotated} rotated qubits")
    c = complex(np.cos(theta / 2.0))
    s = 1j * complex(np.sin(theta / 2.0))
    return s**m * c ** (rotated - m)


def decide_bit(est: EstimateRecord, threshold: float) -> int:
    """Midpoint rule: report 1 when |ex| + |ey| falls below the threshold."""
    if threshold <= 0.0:
        raise ValueError("threshold must be positive")
    return 1 if abs(est.ex) + abs(est.ey) < threshold else 0


def query_budget(budget: BudgetParams, n: int, j: int) -> int:
    """Queries required to decide bit j at the canonical angle theta = pi/2.

    ceil(C ln(1/delta') / (L (alpha eps_j (1-p))^2)) with
    eps_j = |Delta tau_j| / 2 = (1/sqrt(2))^(n-j) / 2 and delta' the
    per-bit share of the failure budget.  Grows by 2x per extra data
    qubit ahead of j, and diverges as p -> 1.
    """
    if not 1 <= j <= n:
        raise ValueError(f"probe index {j} outside 1..{n}")
    delta_eff = budget.delta if budget.per_bit_delta else budget.delta / n
    log_term = HOEFFDING_C * math.log(1.0 / delta_eff)
    scale = budget.L * (budget.alpha * (1.0 - budget.p)) ** 2
    # eps_j^2 = 2^-(n-j) / 4; keep the exponential as an exact integer so
    # deep strings do not underflow to a zero denominator
    try:
        raw = log_term * 4.0 * float(2 ** (n - j)) / scale
    except OverflowError:
        exponent = (
            math.log2(log_term) + 2.0 - math.log2(scale) + (n - j)
        )
        return 1 << math.ceil(exponent)
    if not math.isfinite(raw):
        exponent = math.log2(log_term) + 2.0 - math.log2(scale) + (n - j)
        return 1 << math.ceil(exponent)
    return max(1, math.ceil(raw))


def make_oracle(s, cfg: Dqc1Config, kind: str | None = None) -> Oracle:
    """Build a protocol query function that closes over the hidden string.

    kind "dense" runs the full matrices, "closed" evaluates the factorized
    trace, "sampled" adds shot noise to the closed-form values with one
    RNG stream per probed bit (derived from cfg.seed).
    """
    bits = as_bits(s, n=cfg.n)
    kind = kind or cfg.backend
    if kind not in ("dense", "closed", "sampled"):
        raise ValueError(f"unknown oracle kind {kind!r}")

    def true_tau(j, decoupled, corrections):
        dec = frozenset(decoupled)
        corr = frozenset(corrections)
        if not corr <= dec:
            raise ValueError("corrections must target decoupled qubits")
        if kind == "dense":
            gate = rx(cfg.theta)
            skip = dec | ({j} if j is not None else set())
            rot = kron_all(
                [ID2 if k in skip else gate for k in range(1, cfg.n + 1)]
            )
            fix = kron_all(
                [PAULI_X if k in corr else ID2 for k in range(1, cfg.n + 1)]
            )
            par = circuits.build_parity_unitary(bits).entries
            return (rot @ fix @ par).trace() / 2**cfg.n
        return _tau_factors(bits, cfg.theta, j, dec, corr)

    def oracle(
        j: int,
        decoupled: Iterable[int] = (),
        corrections: Iterable[int] = (),
        ensemble: int = 1,
        queries: int = 1,
        observables: tuple[str, ...] = ("x", "y"),
    ) -> EstimateRecord:
        tau = true_tau(j, decoupled, corrections)
        ex, ey = dqc1.expectations_from_tau(cfg.alpha, cfg.p, tau)
        if kind == "sampled":
            stream = np.random.SeedSequence(cfg.seed, spawn_key=(int(j),))
            return dqc1.sample_expectations(
                cfg, ex, ey, ensemble, queries,
                stream=stream, observables=observables,
            )
        ex = ex if "x" in observables else 0.0
        ey = ey if "y" in observables else 0.0
        return EstimateRecord(
            ex=ex, ey=ey, se_x=0.0, se_y=0.0,
            ensemble_L=ensemble, queries_Q=queries,
        )

    return oracle


def _worst_case_gap(theta: float, trailing: int) -> float:
    """Smallest |Delta tau_j| over the unknown trailing ones count."""
    s = abs(math.sin(theta / 2.0))
    c = abs(math.cos(theta / 2.0))
    return min(s, c) ** trailing if trailing else 1.0


def learn(
    oracle: Oracle,
    cfg: Dqc1Config,
    budget: BudgetParams,
    *,
    fixed_queries: int | None = None,
    max_queries: int = 10**7,
) -> LearnResult:
    """Recover the hidden string bit by bit.

    Per bit j: query the oracle with data qubits 1..j-1 decoupled and the
    tail rotated, compare |ex| + |ey| to half the worst-case reading of
    the s_j = 0 branch, record the bit, and on a 1 add the correction
    that decouples qubit j from then on.  Both quadratures are sampled
    until the first nonzero reading fixes which one carries the signal;
    every 1 recorded afterwards toggles it, since each removed coupling
    drops one factor of i from the trace.
    """
    n = cfg.n
    if n < 1:
        raise ValueError("nothing to learn for n = 0")
    if min(abs(math.sin(cfg.theta / 2.0)), abs(math.cos(cfg.theta / 2.0))) < 1e-9:
        raise ValueError("rotation angle must avoid integer multiples of pi")
    state = LearnerState()
    corrections: set[int] = set()
    steps: list[LearnStep] = []
    for j in range(1, n + 1):
        gap = _worst_case_gap(cfg.theta, n - j)
        threshold = cfg.alpha * (1.0 - cfg.p) * gap / 2.0
        queries = fixed_queries if fixed_queries is not None else query_budget(
            budget, n, j
        )
        if queries > max_queries:
            raise BudgetExhaustedError(j, queries, max_queries)
        observables = (
            (state.quadrature,) if state.phase_known else ("x", "y")
        )
        record = oracle(
            j,
            frozenset(range(1, j)),
            frozenset(corrections),
            budget.L,
            queries,
            observables,
        )
        bit = decide_bit(record, threshold)
        if bit:
            corrections.add(j)
            if state.phase_known:
                state.quadrature = "y" if state.quadrature == "x" else "x"
        elif not state.phase_known:
            state.phase_known = True
            state.quadrature = "x" if abs(record.ex) >= abs(record.ey) else "y"
        state.decided[j] = bit
        state.decoupled.add(j)
        state.j = j + 1
        steps.append(
            LearnStep(j=j, record=record, queries=queries, threshold=threshold, bit=bit)
        )
    s_hat = np.array([state.decided[j] for j in range(1, n + 1)], dtype=np.uint8)
    return LearnResult(s_hat=s_hat, steps=tuple(steps))


def brute_force_baseline(samples: Sequence[tuple], n: int) -> np.ndarray:
    """Classical reference: scan all 2^n candidates, keep the one with the
    fewest disagreements (ties go to the lowest lexicographic string)."""
    if n < 1 or n > 20:
        raise ValueError("n outside 1..20")
    total = 2**n
    if not samples:
        return np.zeros(n, dtype=np.uint8)
    xs = np.array([as_bits(x, n=n) for x, _ in samples], dtype=np.int64)
    ys = np.array([int(y) for _, y in samples], dtype=np.int64)
    if np.isin(ys, (0, 1)).sum() != ys.size:
        raise ValueError("labels must be bits")
    best_idx = 0
    best_count = None
    shifts = np.arange(n - 1, -1, -1)
    for start in range(0, total, 4096):
        idx = np.arange(start, min(start + 4096, total))
        cands = (idx[:, None] >> shifts[None, :]) & 1
        parities = (xs @ cands.T) & 1
        counts = (parities != ys[:, None]).sum(axis=0)
        pos = int(counts.argmin())
        if best_count is None or counts[pos] < best_count:
            best_count = int(counts[pos])
            best_idx = int(idx[pos])
    return ((best_idx >> shifts) & 1).astype(np.uint8)
