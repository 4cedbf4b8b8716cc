"""Builders for the Deutsch-Jozsa, Forrelation and correlation-sampling circuits.

Register layout (qubit 0 is the leftmost bit of every outcome string):

* ``dj``, ``forr2``, ``a33``: query q_1..q_n = qubits 0..n-1, kickback ancilla n.
* ``a32``: driving qubit 0, query 1..n, ancilla n+1.
* ``algorithm1``: R register 0..n-1, query n..2n-1, ancilla 2n. Outcomes read
  ``u || x`` with the R register first.
"""
from __future__ import annotations

from dataclasses import dataclass

from .boolfn import TruthTable, _as_index, _same_n, index_to_bits, linear
from .errors import BadWeight
from .qsim import (
    BitOracle,
    Circuit,
    ControlledBlock,
    H,
    X,
    dc_operator,
    dicke_prep,
    hadamards,
    minus_prep,
)


def _query_layout(n: int, offset: int = 0):
    query = tuple(range(offset, offset + n))
    return query, offset + n


def _chain(fs, query, anc, labels):
    """H^n, U_f1, H^n, ..., U_fk, H^n on the query register."""
    gates = hadamards(query)
    for f, label in zip(fs, labels):
        gates.append(BitOracle(f, query, anc, label))
        gates += hadamards(query)
    return gates


def deutsch_jozsa(f: TruthTable) -> Circuit:
    n = f.n
    query, anc = _query_layout(n)
    gates = minus_prep(anc) + _chain([f], query, anc, ["f"])
    return Circuit(n + 1, gates, {"query": query, "kickback": (anc,)}, query,
                   name="dj", contract="P(x) = W_f(x)^2 / 2^(2n)")


def forrelation2_circuit(f1: TruthTable, f2: TruthTable) -> Circuit:
    _same_n(f1, f2)
    n = f1.n
    query, anc = _query_layout(n)
    gates = minus_prep(anc) + _chain([f1, f2], query, anc, ["f1", "f2"])
    return Circuit(n + 1, gates, {"query": query, "kickback": (anc,)}, query,
                   name="forr2", contract="P(0^n) = Phi(f1,f2)^2")


def a33(f1: TruthTable, f2: TruthTable, f3: TruthTable) -> Circuit:
    """Three-query 3-fold Forrelation circuit; amplitude of |0^n> is Phi(f1,f2,f3)."""
    _same_n(f1, f2, f3)
    n = f1.n
    query, anc = _query_layout(n)
    gates = minus_prep(anc) + _chain([f1, f2, f3], query, anc, ["f1", "f2", "f3"])
    return Circuit(n + 1, gates, {"query": query, "kickback": (anc,)}, query,
                   name="a33", contract="P(0^n) = Phi(f1,f2,f3)^2")


def a32(f1: TruthTable, f2: TruthTable, f3: TruthTable) -> Circuit:
    """Two-query 3-fold Forrelation circuit with a driving qubit.

    Branch 0 runs H, U_f1, H, U_f2, H; branch 1 runs H, U_f3. The driving
    qubit is then measured in the Hadamard basis, so P(0) = (1 + Phi) / 2.
    """
    _same_n(f1, f2, f3)
    n = f1.n
    drive = 0
    query, anc = _query_layout(n, offset=1)
    branch0 = _chain([f1, f2], query, anc, ["f1", "f2"])
    branch1 = hadamards(query) + [BitOracle(f3, query, anc, "f3")]
    gates = [H(drive)] + minus_prep(anc) + [
        ControlledBlock(drive, 0, tuple(branch0)),
        ControlledBlock(drive, 1, tuple(branch1)),
        H(drive),
    ]
    roles = {"driving": (drive,), "query": query, "kickback": (anc,)}
    return Circuit(n + 2, gates, roles, (drive,),
                   name="a32", contract="P(driving=0) = (1 + Phi(f1,f2,f3)) / 2")


@dataclass(frozen=True)
class PointPrep:
    """C_n loading a fixed basis string u into R."""
    u: str


@dataclass(frozen=True)
class UniformH:
    """C_n = H^n on R."""


@dataclass(frozen=True)
class Dicke:
    """C_n preparing the weight-i Dicke state on R."""
    weight: int


CnSpec = PointPrep | UniformH | Dicke


def parse_cn(text: str) -> CnSpec:
    """``uniform``, ``point:<bits>`` or ``dicke:<i>``."""
    kind, _, arg = text.partition(":")
    if kind in ("uniform", "h", "H"):
        return UniformH()
    if kind == "point":
        return PointPrep(arg)
    if kind == "dicke":
        return Dicke(int(arg))
    raise ValueError(f"unknown C_n variant {text!r}")


def cn_gates(cn: CnSpec, r) -> list:
    n = len(r)
    if isinstance(cn, PointPrep):
        u = index_to_bits(_as_index(cn.u, n), n)
        return [X(q) for q, b in zip(r, u) if b == "1"]
    if isinstance(cn, UniformH):
        return hadamards(r)
    if isinstance(cn, Dicke):
        if not 0 <= cn.weight <= n:
            raise BadWeight(f"Dicke weight {cn.weight} outside 0..{n}")
        return dicke_prep(r, cn.weight)
    raise TypeError(f"unknown C_n spec {cn!r}")


def algorithm1(cn: CnSpec, f: TruthTable, g: TruthTable) -> Circuit:
    """Forrelation circuit with the middle oracle replaced by the DC operator.

    With R in |u>, the DC cascade acts as the linear oracle L_u on the query
    register, so the |u>|0^n> amplitude is alpha_u * C_{f,g}(u) / 2^n.
    """
    _same_n(f, g)
    n = f.n
    r = tuple(range(n))
    query = tuple(range(n, 2 * n))
    anc = 2 * n
    gates = cn_gates(cn, r)
    gates += [X(anc), H(anc)]
    gates += hadamards(query)
    gates.append(BitOracle(f, query, anc, "f"))
    gates += hadamards(query)
    gates += dc_operator(r, query, anc)
    gates += hadamards(query)
    gates.append(BitOracle(g, query, anc, "g"))
    gates += hadamards(query)
    roles = {"R": r, "query": query, "kickback": (anc,)}
    return Circuit(2 * n + 1, gates, roles, r + query, name="alg1",
                   contract="P(u||0^n) = |alpha_u|^2 C_{f,g}(u)^2 / 2^(2n)")


def point_probe_circuits(f: TruthTable, g: TruthTable, y: str | int) -> tuple[Circuit, Circuit]:
    """(A1, A2) = (a33, a32) with the linear function L_y in the middle slot."""
    ly = linear(f.n, y)
    return a33(f, ly, g), a32(f, ly, g)
