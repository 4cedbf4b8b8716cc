"""Dense statevector simulator.

Qubit 0 is the most significant position of a basis label, so the basis
state ``|b0 b1 ... b(q-1)>`` has index ``int("b0b1...", 2)``. Internally the
amplitudes are handled as a ``(2,) * q`` tensor whose axis ``k`` is qubit ``k``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from .boolfn import TruthTable, index_to_bits
from .errors import BadWeight, IndexOutOfRange, TooManyQubits

MAX_QUBITS = 22
NORM_TOL = 1e-10
_INV_SQRT2 = 1 / math.sqrt(2)


# --- gates -----------------------------------------------------------------

@dataclass(frozen=True)
class H:
    q: int

    def qubits(self):
        return (self.q,)


@dataclass(frozen=True)
class X:
    q: int

    def qubits(self):
        return (self.q,)


@dataclass(frozen=True)
class RY:
    """exp(-i theta Y / 2)."""
    q: int
    theta: float

    def qubits(self):
        return (self.q,)


@dataclass(frozen=True)
class CNOT:
    c: int
    t: int

    def qubits(self):
        return (self.c, self.t)


@dataclass(frozen=True)
class MCX:
    controls: tuple[int, ...]
    t: int

    def qubits(self):
        return (*self.controls, self.t)


@dataclass(frozen=True)
class BitOracle:
    """|x>|a> -> |x>|a xor [f(x) = -1]>; one query to ``f``."""
    f: TruthTable
    inputs: tuple[int, ...]
    target: int
    label: str = "f"

    def __post_init__(self):
        if len(self.inputs) != self.f.n:
            raise IndexOutOfRange(f"oracle for n={self.f.n} given {len(self.inputs)} input qubits")

    def qubits(self):
        return (*self.inputs, self.target)


@dataclass(frozen=True)
class Unitary:
    """Arbitrary matrix on ``qubits`` (first listed qubit is most significant)."""
    matrix: np.ndarray = field(repr=False, compare=False)
    qubits_: tuple[int, ...]
    label: str = "U"

    def qubits(self):
        return self.qubits_


@dataclass(frozen=True)
class ControlledBlock:
    """Runs ``body`` on the branch where ``control`` equals ``polarity``."""
    control: int
    polarity: int
    body: tuple

    def qubits(self):
        inner = {q for g in self.body for q in g.qubits()}
        return (self.control, *sorted(inner))


Gate = Union[H, X, RY, CNOT, MCX, BitOracle, Unitary, ControlledBlock]


def inverse_gate(g: Gate) -> Gate:
    if isinstance(g, RY):
        return RY(g.q, -g.theta)
    if isinstance(g, Unitary):
        return Unitary(g.matrix.conj().T, g.qubits_, g.label + "^dag")
    if isinstance(g, ControlledBlock):
        return ControlledBlock(g.control, g.polarity, tuple(inverse_gate(b) for b in reversed(g.body)))
    return g


def count_oracle_calls(gates: Sequence[Gate]) -> int:
    """Query count, with the two branches of a driving qubit running in parallel.

    Consecutive controlled blocks on the same control form one parallel
    section costing the larger of its two branches.
    """
    total = 0
    i = 0
    gates = list(gates)
    while i < len(gates):
        g = gates[i]
        if isinstance(g, BitOracle):
            total += 1
            i += 1
        elif isinstance(g, ControlledBlock):
            branch = [0, 0]
            j = i
            while j < len(gates) and isinstance(gates[j], ControlledBlock) and gates[j].control == g.control:
                branch[gates[j].polarity] += count_oracle_calls(gates[j].body)
                j += 1
            total += max(branch)
            i = j
        else:
            i += 1
    return total


@dataclass(frozen=True)
class Circuit:
    q: int
    gates: tuple
    roles: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    measure: tuple[int, ...] = ()
    name: str = ""
    contract: str = ""

    def __post_init__(self):
        if not 1 <= self.q <= MAX_QUBITS:
            raise TooManyQubits(f"q={self.q} outside 1..{MAX_QUBITS}")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "roles", {k: tuple(v) for k, v in self.roles.items()})
        seen: set[int] = set()
        for name, qs in self.roles.items():
            if seen & set(qs):
                raise ValueError(f"role {name!r} overlaps another role")
            seen |= set(qs)
        for g in self.gates:
            _check_gate(g, self.q)
            if self.roles and not set(g.qubits()) <= seen:
                raise ValueError(f"{g} touches qubits outside declared roles")
        for m in self.measure:
            if not 0 <= m < self.q:
                raise IndexOutOfRange(f"measured qubit {m} out of range")

    def inverse(self) -> Circuit:
        return Circuit(self.q, tuple(inverse_gate(g) for g in reversed(self.gates)),
                       self.roles, self.measure, self.name + "^dag")

    def measured_distribution(self) -> MeasurementDistribution:
        return measure_distribution(run(self), self.measure)

    def oracle_calls(self) -> int:
        return count_oracle_calls(self.gates)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "q": self.q,
            "contract": self.contract,
            "roles": {k: list(v) for k, v in self.roles.items()},
            "measure": list(self.measure),
            "oracle_calls": self.oracle_calls(),
            "gates": [_gate_json(g) for g in self.gates],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _gate_json(g: Gate) -> dict:
    if isinstance(g, ControlledBlock):
        return {"gate": "controlled", "control": g.control, "polarity": g.polarity,
                "body": [_gate_json(b) for b in g.body]}
    if isinstance(g, BitOracle):
        return {"gate": "oracle", "label": g.label, "inputs": list(g.inputs),
                "target": g.target, "table": g.f.to_bits()}
    if isinstance(g, Unitary):
        return {"gate": "unitary", "label": g.label, "qubits": list(g.qubits_)}
    out = {"gate": type(g).__name__}
    for k, v in vars(g).items():
        out[k] = list(v) if isinstance(v, tuple) else v
    return out


def _check_gate(g: Gate, q: int) -> None:
    qs = g.qubits()
    if any(not 0 <= x < q for x in qs):
        raise IndexOutOfRange(f"{type(g).__name__} uses qubit outside 0..{q - 1}")
    if len(set(qs)) != len(qs):
        raise IndexOutOfRange(f"{type(g).__name__} repeats a qubit")
    if isinstance(g, ControlledBlock):
        if g.polarity not in (0, 1):
            raise ValueError("polarity must be 0 or 1")
        for b in g.body:
            _check_gate(b, q)
            if g.control in b.qubits():
                raise IndexOutOfRange("controlled block body touches its control")
    if isinstance(g, Unitary) and g.matrix.shape != (2 ** len(qs),) * 2:
        raise ValueError("unitary matrix has the wrong shape")


# --- states ----------------------------------------------------------------

class StateVector:
    """Unit-norm amplitude vector over ``q`` qubits."""

    __slots__ = ("q", "amplitudes")

    def __init__(self, q: int, amplitudes: np.ndarray):
        if not 1 <= q <= MAX_QUBITS:
            raise TooManyQubits(f"q={q} outside 1..{MAX_QUBITS}")
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 2**q:
            raise ValueError("amplitude count does not match qubit count")
        self.q = q
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def copy(self) -> StateVector:
        return StateVector(self.q, self.amplitudes.copy())

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[int(bits, 2)])

    def __repr__(self):
        return f"StateVector(q={self.q})"


def new_state(q: int) -> StateVector:
    if not 1 <= q <= MAX_QUBITS:
        raise TooManyQubits(f"q={q} outside 1..{MAX_QUBITS}")
    amps = np.zeros(2**q, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(q, amps)


def basis_state(q: int, index: int) -> StateVector:
    amps = np.zeros(2**q, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(q, amps)


def _sl(ndim: int, fixed: Mapping[int, int]):
    idx = [slice(None)] * ndim
    for axis, v in fixed.items():
        idx[axis] = v
    return tuple(idx)


def _apply_inplace(t: np.ndarray, g: Gate, axis: dict[int, int]) -> None:
    """Apply ``g`` to tensor view ``t``; ``axis`` maps qubit -> axis of ``t``."""
    d = t.ndim
    if isinstance(g, H):
        a = axis[g.q]
        s0, s1 = t[_sl(d, {a: 0})].copy(), t[_sl(d, {a: 1})].copy()
        t[_sl(d, {a: 0})] = (s0 + s1) * _INV_SQRT2
        t[_sl(d, {a: 1})] = (s0 - s1) * _INV_SQRT2
    elif isinstance(g, X):
        a = axis[g.q]
        s0 = t[_sl(d, {a: 0})].copy()
        t[_sl(d, {a: 0})] = t[_sl(d, {a: 1})]
        t[_sl(d, {a: 1})] = s0
    elif isinstance(g, RY):
        a = axis[g.q]
        c, s = math.cos(g.theta / 2), math.sin(g.theta / 2)
        s0, s1 = t[_sl(d, {a: 0})].copy(), t[_sl(d, {a: 1})].copy()
        t[_sl(d, {a: 0})] = c * s0 - s * s1
        t[_sl(d, {a: 1})] = s * s0 + c * s1
    elif isinstance(g, (CNOT, MCX)):
        controls = (g.c,) if isinstance(g, CNOT) else g.controls
        _controlled(t, controls, [X(g.t)], axis)
    elif isinstance(g, ControlledBlock):
        _controlled(t, (g.control,), g.body, axis, polarity=g.polarity)
    elif isinstance(g, BitOracle):
        axes = [axis[q] for q in g.inputs] + [axis[g.target]]
        moved = np.moveaxis(t, axes, range(len(axes)))
        flat = moved.reshape(2**g.f.n, 2, -1)
        flip = g.f.values == -1
        flat[flip] = flat[flip][:, ::-1, :]
        moved[...] = flat.reshape(moved.shape)
    elif isinstance(g, Unitary):
        axes = [axis[q] for q in g.qubits_]
        moved = np.moveaxis(t, axes, range(len(axes)))
        flat = moved.reshape(2 ** len(axes), -1)
        moved[...] = (g.matrix @ flat).reshape(moved.shape)
    else:
        raise TypeError(f"unknown gate {g!r}")


def _controlled(t, controls, body, axis, polarity=1):
    fixed = {axis[c]: polarity for c in controls}
    view = t[_sl(t.ndim, fixed)]
    sub_axis = {}
    for q, a in axis.items():
        if a in fixed:
            continue
        sub_axis[q] = a - sum(1 for f in fixed if f < a)
    for b in body:
        _apply_inplace(view, b, sub_axis)


def apply(state: StateVector, gate: Gate) -> StateVector:
    _check_gate(gate, state.q)
    out = state.copy()
    t = out.amplitudes.reshape((2,) * state.q)
    _apply_inplace(t, gate, {k: k for k in range(state.q)})
    return out


def apply_gates(state: StateVector, gates: Iterable[Gate]) -> StateVector:
    out = state.copy()
    t = out.amplitudes.reshape((2,) * state.q)
    axis = {k: k for k in range(state.q)}
    for g in gates:
        _check_gate(g, state.q)
        _apply_inplace(t, g, axis)
    return out


def run(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    state = new_state(circuit.q) if initial is None else initial
    if state.q != circuit.q:
        raise ValueError("initial state qubit count does not match circuit")
    return apply_gates(state, circuit.gates)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense matrix of a circuit, column j = run on basis state j."""
    dim = 2**circuit.q
    cols = [run(circuit, basis_state(circuit.q, j)).amplitudes for j in range(dim)]
    return np.stack(cols, axis=1)


# --- circuit fragments -----------------------------------------------------

def hadamards(qubits: Iterable[int]) -> list[Gate]:
    return [H(q) for q in qubits]


def minus_prep(q: int) -> list[Gate]:
    """X then H: |0> -> |->."""
    return [X(q), H(q)]


def dc_operator(r: Sequence[int], qreg: Sequence[int], anc: int) -> list[Gate]:
    """Doubly-controlled NOTs r_i, q_i -> anc; acts as the linear oracle L_u when R holds u."""
    if len(r) != len(qreg):
        raise ValueError("R and Q registers must have equal length")
    return [MCX((ri, qi), anc) for ri, qi in zip(r, qreg)]


def _scs(qubits: Sequence[int], k: int) -> list[Gate]:
    """Split-and-cyclic-shift block on the last k+1 of ``qubits``."""
    n = len(qubits)
    last = qubits[n - 1]
    gates: list[Gate] = []
    for m in range(1, k + 1):
        theta = 2 * math.acos(math.sqrt(m / n))
        split = qubits[n - 1 - m]
        gates.append(CNOT(split, last))
        if m == 1:
            gates.append(ControlledBlock(last, 1, (RY(split, theta),)))
        else:
            shift = qubits[n - m]
            gates.append(ControlledBlock(last, 1, (ControlledBlock(shift, 1, (RY(split, theta),)),)))
        gates.append(CNOT(split, last))
    return gates


def _dicke_unitary(qubits: Sequence[int], k: int) -> list[Gate]:
    n = len(qubits)
    gates: list[Gate] = []
    while n > 1 and k > 0:
        kk = min(k, n - 1)
        gates += _scs(qubits[:n], kk)
        n -= 1
        k = min(k, n)
    return gates


def dicke_prep(qubits: Sequence[int] | int, k: int) -> list[Gate]:
    """Gates taking |0...0> on ``qubits`` to the weight-k Dicke state.

    Loads |0^(n-k) 1^k> and then applies the split-and-cyclic-shift cascade
    with rotation angles 2*arccos(sqrt(l/m)); O(n^2) gates in total.
    """
    if isinstance(qubits, int):
        qubits = list(range(qubits))
    qubits = list(qubits)
    n = len(qubits)
    if not 0 <= k <= n:
        raise BadWeight(f"weight {k} outside 0..{n}")
    gates: list[Gate] = [X(q) for q in qubits[n - k:]]
    return gates + _dicke_unitary(qubits, k)


# --- measurement -----------------------------------------------------------

@dataclass(frozen=True)
class MeasurementDistribution:
    """Exact outcome probabilities on ``subset``; outcome bit j is qubit subset[j]."""
    subset: tuple[int, ...]
    probs: np.ndarray = field(repr=False)

    def __getitem__(self, outcome: str) -> float:
        if len(outcome) != len(self.subset):
            raise KeyError(outcome)
        return float(self.probs[int(outcome, 2)])

    def as_dict(self, threshold: float = 1e-15) -> dict[str, float]:
        k = len(self.subset)
        return {index_to_bits(i, k): float(p) for i, p in enumerate(self.probs) if p > threshold}

    def mass(self, predicate: Callable[[str], bool]) -> float:
        return float(sum(p for s, p in self.items() if predicate(s)))

    def items(self):
        k = len(self.subset)
        return ((index_to_bits(i, k), float(p)) for i, p in enumerate(self.probs))

    def total(self) -> float:
        return float(self.probs.sum())


def measure_distribution(state: StateVector, subset: Sequence[int]) -> MeasurementDistribution:
    subset = tuple(subset)
    if any(not 0 <= s < state.q for s in subset) or len(set(subset)) != len(subset):
        raise IndexOutOfRange(f"bad measured subset {subset}")
    p = (np.abs(state.amplitudes) ** 2).reshape((2,) * state.q)
    others = tuple(a for a in range(state.q) if a not in subset)
    marg = p.sum(axis=others) if others else p
    kept = [a for a in range(state.q) if a in subset]
    order = [kept.index(s) for s in subset]
    marg = np.transpose(marg, order).reshape(-1) if subset else np.array([marg.sum()])
    return MeasurementDistribution(subset, marg)


def sample(dist: MeasurementDistribution, shots: int, seed: int | np.random.Generator | None) -> dict[str, int]:
    """Seeded multinomial draw; returns nonzero counts keyed by outcome string."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p = np.where(dist.probs > 1e-14, dist.probs, 0.0)
    p = p / p.sum()
    counts = rng.multinomial(shots, p)
    k = len(dist.subset)
    return {index_to_bits(i, k): int(c) for i, c in enumerate(counts) if c}

