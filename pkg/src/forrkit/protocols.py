"""End-to-end procedures built on the Forrelation circuits.

Walsh-sampling strategy comparison, resiliency checking, cross-correlation
point probes, point estimation, spectrum sampling and the flat / Dicke
uncorrelatedness checks. Amplitude amplification and phase-estimation-based
amplitude estimation are implemented here on top of the simulator.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .boolfn import TruthTable, _same_n, index_to_bits, indicator_negated, popcount, weight_threshold
from .circuits import Dicke, UniformH, a33, algorithm1, deutsch_jozsa, point_probe_circuits
from .errors import SimulationInconsistency
from .qsim import (
    Circuit,
    ControlledBlock,
    H,
    MeasurementDistribution,
    StateVector,
    Unitary,
    apply_gates,
    circuit_unitary,
    measure_distribution,
    new_state,
    run,
)
from .spectra import cross_correlation, walsh_mass, walsh_transform

log = logging.getLogger(__name__)

# probabilities below this are treated as exact zeros (the smallest nonzero
# outcome probability reachable at n <= 6 is 2^-18 ~ 4e-6)
ZERO_TOL = 1e-12
SCHEDULE_RATIO = 6 / 5
DJ_PREFILTER_SHOTS = 10
QPE_SUCCESS = 8 / math.pi**2
# calls <= ESTIMATION_CALL_CONSTANT * ceil(pi/eps) * ceil(ln(1/delta))
ESTIMATION_CALL_CONSTANT = 32

Predicate = Callable[[str], bool]


# --- amplification ---------------------------------------------------------

def _outcome_index(circuit: Circuit) -> np.ndarray:
    """Measured-outcome index of every basis state of ``circuit``."""
    idx = np.arange(2**circuit.q)
    out = np.zeros_like(idx)
    for q in circuit.measure:
        out = (out << 1) | ((idx >> (circuit.q - 1 - q)) & 1)
    return out


def good_basis_mask(circuit: Circuit, good: Predicate) -> np.ndarray:
    k = len(circuit.measure)
    outcome_good = np.array([good(index_to_bits(i, k)) for i in range(2**k)], dtype=bool)
    return outcome_good[_outcome_index(circuit)]


class GroverIterate:
    """Q = -A S_0 A^dag S_good for a measurement-free base circuit A."""

    def __init__(self, base: Circuit, good: Predicate):
        self.base = base
        self.inverse = base.inverse()
        self.mask = good_basis_mask(base, good)

    def initial(self) -> StateVector:
        return run(self.base)

    def __call__(self, state: StateVector) -> StateVector:
        amps = state.amplitudes.copy()
        amps[self.mask] *= -1
        s = apply_gates(StateVector(state.q, amps), self.inverse.gates)
        s.amplitudes[0] *= -1
        s = apply_gates(s, self.base.gates)
        s.amplitudes *= -1
        return s

    def good_mass(self, state: StateVector) -> float:
        return float(np.sum(np.abs(state.amplitudes[self.mask]) ** 2))

    def matrix(self) -> np.ndarray:
        a = circuit_unitary(self.base)
        s_good = np.where(self.mask, -1.0, 1.0)
        s_zero = np.ones(2**self.base.q)
        s_zero[0] = -1.0
        return -(a * s_zero) @ (a.conj().T * s_good)


def amplitude_amplify(base: Circuit, good: Predicate, k: int) -> MeasurementDistribution:
    """Exact outcome distribution of A followed by k Grover iterations."""
    if k < 0:
        raise ValueError("k must be >= 0")
    it = GroverIterate(base, good)
    state = it.initial()
    if k and it.good_mass(state) < ZERO_TOL:
        log.debug("amplify: no good support in %s, output unchanged", base.name)
    for _ in range(k):
        state = it(state)
    return measure_distribution(state, base.measure)


def amplified_success(p: float, k: int) -> float:
    """sin^2((2k+1) theta) with sin(theta) = sqrt(p)."""
    theta = math.asin(math.sqrt(min(max(p, 0.0), 1.0)))
    return math.sin((2 * k + 1) * theta) ** 2


# --- estimation ------------------------------------------------------------

@dataclass
class EstimationResult:
    alpha: float
    epsilon: float | None
    delta: float | None
    calls: int
    precision_qubits: int
    reps: int
    samples: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "epsilon": self.epsilon, "delta": self.delta,
                "calls": self.calls, "precision_qubits": self.precision_qubits,
                "reps": self.reps, "samples": self.samples}


def qpe_error_bound(t: int) -> float:
    m = 2**t
    return math.pi / m + math.pi**2 / m**2


def precision_qubits_for(eps: float) -> int:
    """Smallest t with pi/2^t + pi^2/2^(2t) <= eps."""
    t = 1
    while qpe_error_bound(t) > eps:
        t += 1
    return t


def median_reps_for(delta: float) -> int:
    """Smallest odd r so that a median of r runs fails with probability <= delta.

    Each run is within the error bound with probability >= 8/pi^2; the median
    is off only if at least (r+1)/2 runs are, a binomial tail computed exactly.
    """
    q = 1 - QPE_SUCCESS
    r = 1
    while True:
        tail = sum(math.comb(r, j) * q**j * (1 - q) ** (r - j) for j in range((r + 1) // 2, r + 1))
        if tail <= delta:
            return r
        r += 2


def estimation_call_bound(eps: float, delta: float) -> int:
    return ESTIMATION_CALL_CONSTANT * math.ceil(math.pi / eps) * max(1, math.ceil(math.log(1 / delta)))


def _inverse_qft(t: int) -> np.ndarray:
    m = 2**t
    j = np.arange(m)
    return np.exp(-2j * np.pi * np.outer(j, j) / m) / math.sqrt(m)


def qpe_distribution(base: Circuit, good: Predicate, t: int) -> MeasurementDistribution:
    """Phase estimation of the Grover iterate, simulated with t precision qubits.

    Ancilla 0 is the most significant bit of the readout y and controls
    Q^(2^(t-1)); the base register starts in A|0>.
    """
    it = GroverIterate(base, good)
    qmat = it.matrix()
    work = tuple(range(t, t + base.q))
    gates = [Unitary(circuit_unitary(base), work, "A")]
    gates += [H(a) for a in range(t)]
    power = qmat
    for a in reversed(range(t)):
        gates.append(ControlledBlock(a, 1, (Unitary(power, work, f"Q^{2 ** (t - 1 - a)}"),)))
        power = power @ power
    gates.append(Unitary(_inverse_qft(t), tuple(range(t)), "QFT^dag"))
    state = apply_gates(new_state(t + base.q), gates)
    return measure_distribution(state, tuple(range(t)))


def amplitude_estimate(base: Circuit, good: Predicate, t: int, reps: int = 1,
                       seed: int | np.random.Generator | None = 0) -> EstimationResult:
    """Median of ``reps`` phase-estimation runs, each giving sin^2(pi y / 2^t)."""
    if t < 1 or reps < 1 or reps % 2 == 0:
        raise ValueError("need t >= 1 and an odd number of reps")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dist = qpe_distribution(base, good, t)
    p = np.where(dist.probs > 1e-14, dist.probs, 0.0)
    ys = rng.choice(2**t, size=reps, p=p / p.sum())
    samples = [math.sin(math.pi * int(y) / 2**t) ** 2 for y in ys]
    calls = reps * (2 ** (t + 1) - 1)
    return EstimationResult(float(np.median(samples)), None, None, calls, t, reps, samples)


def estimate_cross_correlation_point(f: TruthTable, g: TruthTable, y: str | int, eps: float,
                                     delta: float, seed: int | np.random.Generator | None = 0) -> EstimationResult:
    """Signed estimate of C_{f,g}(y) / 2^n from amplitude estimation on A2.

    A2 outputs 0 with probability (1 + C/2^n)/2, so an eps/2-accurate
    estimate of that probability gives an eps-accurate alpha = 2p - 1.
    """
    if not 0 < eps <= 0.25 or not 0 < delta < 1:
        raise ValueError("need 0 < eps <= 1/4 and 0 < delta < 1")
    _, probe = point_probe_circuits(f, g, y)
    t = precision_qubits_for(eps / 2)
    reps = median_reps_for(delta)
    res = amplitude_estimate(probe, lambda s: s == "0", t, reps, seed)
    alpha = 2 * res.alpha - 1
    return EstimationResult(alpha, eps, delta, res.calls, t, reps, [2 * s - 1 for s in res.samples])


# --- strategy comparison ---------------------------------------------------

@dataclass(frozen=True)
class StrategyCurve:
    p: float
    dj_once: float
    dj_twice: float
    dj_aa1: float
    a33: float

    @classmethod
    def closed_form(cls, p: float) -> StrategyCurve:
        return cls(p, p, 2 * p - p * p, amplified_success(p, 1), 4 * p - 4 * p * p)

    def row(self) -> list[float]:
        return [self.p, self.dj_once, self.dj_twice, self.dj_aa1, self.a33]


STRATEGY_COLUMNS = ("p", "dj_once", "dj_twice", "dj_aa1", "a33")


def strategy_curve(f: TruthTable, points, check: bool = True) -> tuple[StrategyCurve, StrategyCurve]:
    """(closed-form curve, curve measured from simulated circuits) for set S."""
    points = list(points)
    if not points:
        raise ValueError("S must be nonempty")
    p = walsh_mass(f, points)
    closed = StrategyCurve.closed_form(p)
    s_idx = {int(x, 2) if isinstance(x, str) else int(x) for x in points}
    in_s = lambda s: int(s, 2) in s_idx  # noqa: E731
    dj = deutsch_jozsa(f)
    p_dj = dj.measured_distribution().mass(in_s)
    p_aa = amplitude_amplify(dj, in_s, 1).mass(in_s)
    d33 = a33(f, indicator_negated(f.n, points), f).measured_distribution()
    empirical = StrategyCurve(p, p_dj, 1 - (1 - p_dj) ** 2, p_aa, 1 - d33["0" * f.n])
    if check and not np.allclose(closed.row(), empirical.row(), atol=1e-10):
        raise SimulationInconsistency(f"strategy curve mismatch: {closed} vs {empirical}")
    return closed, empirical


# --- point probes and sampling ---------------------------------------------

def point_probe(f: TruthTable, g: TruthTable, y: str | int) -> tuple[float, float]:
    """(P_A1(0^n), P_A2(driving = 0)) from exact simulation."""
    a1, a2 = point_probe_circuits(f, g, y)
    return a1.measured_distribution()["0" * f.n], a2.measured_distribution()["0"]


def point_probe_expected(f: TruthTable, g: TruthTable, y: str | int) -> tuple[float, float]:
    c = cross_correlation(f, g)[y] / 2**f.n
    return c * c, (1 + c) / 2


@dataclass
class CorrelationSample:
    n: int
    exact: MeasurementDistribution
    counts: dict[str, int]
    shots: int
    seed: int | None

    def correlation_outcomes(self) -> dict[str, dict]:
        """Entries for the u||0^n outcomes, keyed by u."""
        out = {}
        for u in range(2**self.n):
            ub = index_to_bits(u, self.n)
            key = ub + "0" * self.n
            out[ub] = {"outcome": key, "exact": self.exact[key], "count": self.counts.get(key, 0)}
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "shots": self.shots, "seed": self.seed,
                "correlation_outcomes": self.correlation_outcomes(),
                "counts": dict(sorted(self.counts.items()))}


def sample_cross_correlation(f: TruthTable, g: TruthTable, shots: int, seed: int | None = 0) -> CorrelationSample:
    from .qsim import sample

    exact = algorithm1(UniformH(), f, g).measured_distribution()
    return CorrelationSample(f.n, exact, sample(exact, shots, seed), shots, seed)


# --- property checks -------------------------------------------------------

@dataclass
class CheckVerdict:
    verdict: str
    witness: str | None
    oracle_calls: int
    shots_used: int
    good_mass: float
    seed: int | None
    method: str
    per_weight: list[dict] = field(default_factory=list)

    @property
    def refuted(self) -> bool:
        return self.verdict == "REFUTED"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "witness": self.witness, "good_mass": self.good_mass,
                "oracle_calls": self.oracle_calls, "shots_used": self.shots_used,
                "seed": self.seed, "method": self.method, "per_weight": self.per_weight}


def _most_likely_good(dist: MeasurementDistribution, good: Predicate) -> str | None:
    best, best_p = None, ZERO_TOL
    for s, p in dist.items():
        if good(s) and p > best_p:
            best, best_p = s, p
    return best


def _search(base: Circuit, good: Predicate, rng: np.random.Generator, budget: int):
    """Amplification with unknown good mass: random iteration counts below a
    limit growing by SCHEDULE_RATIO each round, until a good outcome is seen
    or the oracle-call budget runs out. Returns (witness, calls, shots)."""
    it = GroverIterate(base, good)
    per_run = base.oracle_calls()
    ceiling = math.sqrt(2 ** len(base.measure))
    states = [it.initial()]
    dists: dict[int, MeasurementDistribution] = {}
    limit = 1.0
    calls = shots = 0
    k_outcomes = 2 ** len(base.measure)
    while True:
        k = int(rng.integers(0, math.ceil(limit)))
        cost = (2 * k + 1) * per_run
        if calls + cost > budget:
            return None, calls, shots
        while len(states) <= k:
            states.append(it(states[-1]))
        if k not in dists:
            dists[k] = measure_distribution(states[k], base.measure)
        p = np.where(dists[k].probs > 1e-14, dists[k].probs, 0.0)
        outcome = index_to_bits(int(rng.choice(k_outcomes, p=p / p.sum())), len(base.measure))
        calls += cost
        shots += 1
        if good(outcome):
            return outcome, calls, shots
        limit = min(SCHEDULE_RATIO * limit, ceiling)


def check_resilient(f: TruthTable, m: int, budget: int = 2000, seed: int | None = 0,
                    prefilter_shots: int = DJ_PREFILTER_SHOTS, exact: bool = False) -> CheckVerdict:
    """Try to refute m-resiliency of f.

    A few Deutsch-Jozsa shots catch a large low-weight Walsh mass; then
    a33(f, g, f), with g = -1 on weights <= m, is amplified on its nonzero
    outcomes (probability 4p - 4p^2). In ``exact`` mode every outcome with
    nonzero probability counts as observed.
    """
    n = f.n
    if not 0 <= m < n:
        raise ValueError(f"need 0 <= m < n, got {m}")
    low = lambda s: s.count("1") <= m  # noqa: E731
    nonzero = lambda s: "1" in s  # noqa: E731
    dj = deutsch_jozsa(f)
    dj_dist = dj.measured_distribution()
    forr = a33(f, weight_threshold(n, m), f)
    forr_dist = forr.measured_distribution()
    good_mass = forr_dist.mass(nonzero)
    w = walsh_transform(f)

    def confirm_dj(x: str) -> None:
        if not (low(x) and w[x] != 0):
            raise SimulationInconsistency(f"DJ witness {x} has W_f = 0")

    def confirm_forr(x: str) -> None:
        if walsh_mass(f, [i for i in range(2**n) if popcount(i) <= m]) == 0:
            raise SimulationInconsistency(f"a33 witness {x} but the low-weight Walsh mass is 0")

    if exact:
        x = _most_likely_good(dj_dist, low)
        if x is not None:
            confirm_dj(x)
            return CheckVerdict("REFUTED", x, dj.oracle_calls(), 0, good_mass, seed, "exact")
        x = _most_likely_good(forr_dist, nonzero)
        calls = dj.oracle_calls() + forr.oracle_calls()
        if x is not None:
            confirm_forr(x)
            return CheckVerdict("REFUTED", x, calls, 0, good_mass, seed, "exact")
        return CheckVerdict("NOT_REFUTED", None, calls, 0, good_mass, seed, "exact")

    from .qsim import sample

    rng = np.random.default_rng(seed)
    calls = shots = 0
    for _ in range(prefilter_shots):
        if calls + dj.oracle_calls() > budget:
            break
        (x,) = sample(dj_dist, 1, rng).keys()
        calls += dj.oracle_calls()
        shots += 1
        if low(x):
            confirm_dj(x)
            return CheckVerdict("REFUTED", x, calls, shots, good_mass, seed, "dj-prefilter")
    x, c, s = _search(forr, nonzero, rng, budget - calls)
    calls += c
    shots += s
    if x is not None:
        confirm_forr(x)
        return CheckVerdict("REFUTED", x, calls, shots, good_mass, seed, "a33-amplified")
    return CheckVerdict("NOT_REFUTED", None, calls, shots, good_mass, seed, "a33-amplified")


def _corr_good(n: int, m: int | None):
    def good(s: str) -> bool:
        u, x = s[:n], s[n:]
        return "1" not in x and (m is None or u.count("1") <= m)
    return good


def check_uncorrelated(f: TruthTable, g: TruthTable, m: int, method: str = "flat", budget: int = 4000,
                       seed: int | None = 0, exact: bool = False) -> CheckVerdict:
    """Try to refute that f and g are uncorrelated of degree m.

    ``flat`` amplifies u||0^n outcomes with wt(u) <= m of algorithm1 with
    C_n = H^n; ``dicke`` runs algorithm1 with a weight-i Dicke C_n for each
    i = 0..m, splitting the budget evenly and stopping at the first witness.
    """
    _same_n(f, g)
    n = f.n
    if not 0 <= m < n:
        raise ValueError(f"need 0 <= m < n, got {m}")
    c = cross_correlation(f, g)

    def confirm(outcome: str) -> None:
        u = outcome[:n]
        if u.count("1") > m or c[u] == 0 or "1" in outcome[n:]:
            raise SimulationInconsistency(f"witness {outcome} but C_fg({u}) = {c[u]}")

    if method == "flat":
        stages = [(None, algorithm1(UniformH(), f, g), _corr_good(n, m))]
    elif method == "dicke":
        stages = [(i, algorithm1(Dicke(i), f, g), _corr_good(n, None)) for i in range(m + 1)]
    else:
        raise ValueError(f"unknown method {method!r}")

    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(len(stages))]
    share = budget // len(stages)
    calls = shots = 0
    per_weight = []
    witness = None
    total_mass = 0.0
    for (weight, base, good), rng in zip(stages, rngs):
        mass = base.measured_distribution().mass(good)
        total_mass += mass
        entry = {"weight": weight, "good_mass": mass, "oracle_calls": 0, "refuted": False}
        if weight is not None:
            per_weight.append(entry)
        if witness is not None:
            continue
        if exact:
            x = _most_likely_good(base.measured_distribution(), good)
            cost, s = base.oracle_calls(), 0
        else:
            x, cost, s = _search(base, good, rng, share)
        calls += cost
        shots += s
        entry["oracle_calls"] = cost
        if x is not None:
            confirm(x)
            entry["refuted"] = True
            witness = x
    mode = "exact" if exact else "sampled"
    if method == "flat":
        good_mass = total_mass
    else:
        good_mass = max((e["good_mass"] for e in per_weight), default=0.0)
    verdict = "REFUTED" if witness is not None else "NOT_REFUTED"
    return CheckVerdict(verdict, witness, calls, shots, good_mass, seed, f"{method}-{mode}", per_weight)


def query_cost_comparison(f: TruthTable, g: TruthTable, m: int) -> dict:
    """Amplification cost of the Dicke and flat schedules for degree-m checks.

    ``dicke`` is sum_i 1/a_i; ``flat_per_weight`` is 2^(3n/2) sum_i 1/sqrt(M_i),
    the flat cost of resolving each weight class; ``flat`` is (m+1)/a.
    Infinite when some M_i = 0.
    """
    n = f.n
    c2 = cross_correlation(f, g).values.astype(float) ** 2
    w = popcount(np.arange(2**n))
    masses = [float(c2[w == i].sum()) for i in range(m + 1)]
    if any(mi == 0 for mi in masses):
        return {"masses": masses, "dicke": math.inf, "flat_per_weight": math.inf, "flat": math.inf}
    a_i = [math.sqrt(mi / (math.comb(n, i) * 2 ** (2 * n))) for i, mi in enumerate(masses)]
    a = math.sqrt(sum(masses) / 2 ** (3 * n))
    return {
        "masses": masses,
        "dicke": sum(1 / x for x in a_i),
        "flat_per_weight": 2 ** (1.5 * n) * sum(1 / math.sqrt(mi) for mi in masses),
        "flat": (m + 1) / a,
    }

