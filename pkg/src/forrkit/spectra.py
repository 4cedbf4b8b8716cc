"""Classical spectra: Walsh transform, correlation spectra, Forrelation values.

These are the exact reference values every simulated circuit is checked
against. Spectra are kept as exact integers; Forrelation values are floats.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .boolfn import TruthTable, _as_index, _same_n, popcount
from .errors import SizeMismatch, TooLarge

FORRELATION_K_WORK_CAP = 24


def fwht(values: Sequence[int] | np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform of a length-2^n integer vector."""
    a = np.array(values, dtype=np.int64)
    size = a.size
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        a = a.reshape(-1, 2, h)
        lo = a[:, 0, :].copy()
        hi = a[:, 1, :]
        a[:, 0, :] += hi
        a[:, 1, :] = lo - hi
        a = a.reshape(size)
        h *= 2
    return a


def sign_matrix(n: int) -> np.ndarray:
    """Explicit (-1)^(x.y) matrix, built entry by entry (no butterfly)."""
    x = np.arange(2**n)
    return (1 - 2 * (popcount(x[:, None] & x[None, :]) & 1)).astype(np.int64)


@dataclass(frozen=True)
class WalshSpectrum:
    n: int
    values: np.ndarray = field(repr=False)

    def __getitem__(self, point):
        return int(self.values[_as_index(point, self.n)])

    def to_json(self) -> dict:
        return {"n": self.n, "kind": "walsh", "values": [int(v) for v in self.values]}


@dataclass(frozen=True)
class CorrelationSpectrum:
    n: int
    values: np.ndarray = field(repr=False)
    is_auto: bool = False

    def __getitem__(self, point):
        return int(self.values[_as_index(point, self.n)])

    def to_json(self) -> dict:
        kind = "autocorrelation" if self.is_auto else "cross_correlation"
        return {"n": self.n, "kind": kind, "values": [int(v) for v in self.values]}


@dataclass(frozen=True)
class ForrelationValue:
    value: float
    k: int
    n: int

    def __float__(self) -> float:
        return self.value


def spectrum_from_json(text: str) -> WalshSpectrum | CorrelationSpectrum:
    data = json.loads(text)
    vals = np.array(data["values"], dtype=np.int64)
    if vals.size != 2 ** data["n"]:
        raise SizeMismatch("spectrum length does not match n")
    if data["kind"] == "walsh":
        return WalshSpectrum(data["n"], vals)
    return CorrelationSpectrum(data["n"], vals, is_auto=data["kind"] == "autocorrelation")


def walsh_transform(f: TruthTable) -> WalshSpectrum:
    return WalshSpectrum(f.n, fwht(f.values))


def walsh_bruteforce(f: TruthTable) -> np.ndarray:
    """Defining sum of the Walsh transform, one row of signs per frequency."""
    return sign_matrix(f.n) @ f.values.astype(np.int64)


def cross_correlation(f: TruthTable, g: TruthTable) -> CorrelationSpectrum:
    """C_{f,g}(y) = sum_x f(x) g(x ^ y), via C = H (W_f W_g) / 2^n."""
    _same_n(f, g)
    prod = fwht(f.values) * fwht(g.values)
    return CorrelationSpectrum(f.n, fwht(prod) >> f.n, is_auto=f is g or f == g)


def cross_correlation_bruteforce(f: TruthTable, g: TruthTable) -> np.ndarray:
    _same_n(f, g)
    x = np.arange(2**f.n)
    fv = f.values.astype(np.int64)
    gv = g.values.astype(np.int64)
    return np.array([int(np.dot(fv, gv[x ^ y])) for y in x], dtype=np.int64)


def auto_correlation(f: TruthTable) -> CorrelationSpectrum:
    c = cross_correlation(f, f)
    return CorrelationSpectrum(c.n, c.values, is_auto=True)


def forrelation2(f: TruthTable, g: TruthTable) -> ForrelationValue:
    _same_n(f, g)
    total = int(np.dot(f.values.astype(np.int64), fwht(g.values)))
    return ForrelationValue(total / 2 ** (1.5 * f.n), 2, f.n)


def forrelation3(f1: TruthTable, f2: TruthTable, f3: TruthTable) -> ForrelationValue:
    """Product form: 2^(-2n) sum_x f2(x) W_f1(x) W_f3(x)."""
    _same_n(f1, f2, f3)
    total = int(np.sum(f2.values * fwht(f1.values) * fwht(f3.values)))
    return ForrelationValue(total / 2 ** (2 * f1.n), 3, f1.n)


def forrelation_k(fs: Sequence[TruthTable]) -> ForrelationValue:
    """Nested-sum definition of k-fold Forrelation for 2 <= k <= 4.

    Indices are summed out one at a time against the explicit sign matrix,
    so no Walsh transform is involved.
    """
    fs = list(fs)
    k = len(fs)
    if not 2 <= k <= 4:
        raise TooLarge(f"k={k} outside 2..4")
    _same_n(*fs)
    n = fs[0].n
    if k * n > FORRELATION_K_WORK_CAP:
        raise TooLarge(f"k*n = {k * n} exceeds cap {FORRELATION_K_WORK_CAP}")
    signs = sign_matrix(n)
    acc = fs[0].values.astype(np.int64)
    for f in fs[1:]:
        acc = (acc @ signs) * f.values
    return ForrelationValue(int(acc.sum()) / 2 ** ((k + 1) * n / 2), k, n)


def walsh_mass(f: TruthTable, points: Iterable[str | int]) -> float:
    """Fraction 2^(-2n) sum_{x in S} W_f(x)^2 of the squared spectrum on S."""
    idx = sorted({_as_index(p, f.n) for p in points})
    w = fwht(f.values)
    return float(np.sum(w[idx] ** 2)) / 2 ** (2 * f.n) if idx else 0.0


def _low_weight_order(values: np.ndarray, n: int, cap: int) -> int:
    w = popcount(np.arange(2**n))
    order = -1
    for m in range(cap + 1):
        if np.any(values[w == m] != 0):
            break
        order = m
    return order


def is_m_resilient(f: TruthTable, m: int) -> bool:
    if not 0 <= m < f.n:
        raise ValueError(f"need 0 <= m < n, got m={m}")
    w = popcount(np.arange(2**f.n))
    return bool(np.all(fwht(f.values)[w <= m] == 0))


def resiliency_order(f: TruthTable) -> int:
    """Largest m with f m-resilient, -1 when W_f(0) != 0."""
    return _low_weight_order(fwht(f.values), f.n, f.n - 1)


def uncorrelated_degree(f: TruthTable, g: TruthTable) -> int:
    """Largest m with C_{f,g}(y) = 0 for all wt(y) <= m; n if the spectrum vanishes."""
    c = cross_correlation(f, g).values
    return _low_weight_order(c, f.n, f.n)


def parseval_ok(spec: WalshSpectrum) -> bool:
    return int(np.sum(spec.values**2)) == 2 ** (2 * spec.n)

