"""Truth tables of n-variable Boolean functions in the {+1, -1} convention.

Index ``i`` of a table encodes the input ``x1 x2 ... xn`` with ``x1`` as the
most significant bit. The same ordering is used for qubit registers, so
entry ``i`` of a table always lines up with basis state ``|i>`` of the query
register.
"""
from __future__ import annotations

import random
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadCharacter,
    LengthMismatch,
    MissingHeader,
    NotBent,
    SizeMismatch,
    UnsupportedN,
)

MAX_N = 12


def popcount(a: np.ndarray | int):
    """Hamming weight, elementwise for integer arrays."""
    if isinstance(a, (int, np.integer)):
        return int(a).bit_count()
    a = np.asarray(a, dtype=np.int64)
    out = np.zeros_like(a)
    while np.any(a):
        out += a & 1
        a = a >> 1
    return out


def bits_to_index(bits: str) -> int:
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"not a bit string: {bits!r}")
    return int(bits, 2)


def index_to_bits(i: int, n: int) -> str:
    return format(i, f"0{n}b") if n > 0 else ""


def _as_index(point: str | int, n: int) -> int:
    if isinstance(point, str):
        if len(point) != n:
            raise SizeMismatch(f"point {point!r} has length {len(point)}, expected {n}")
        return bits_to_index(point)
    i = int(point)
    if not 0 <= i < 2**n:
        raise SizeMismatch(f"point {i} outside [0, 2^{n})")
    return i


class TruthTable:
    """Immutable {+1, -1}-valued truth table over ``n`` variables."""

    __slots__ = ("n", "values")

    def __init__(self, n: int, values: Iterable[int]):
        if not 1 <= n <= MAX_N:
            raise UnsupportedN(f"n={n} outside 1..{MAX_N}")
        arr = np.array(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.int8)
        if arr.shape != (2**n,):
            raise LengthMismatch(f"expected {2**n} values for n={n}, got {arr.size}")
        if not np.all((arr == 1) | (arr == -1)):
            raise ValueError("truth table entries must be +1 or -1")
        arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("TruthTable is immutable")

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, point: str | int) -> int:
        return int(self.values[_as_index(point, self.n)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.n, self.values.tobytes()))

    def __neg__(self) -> TruthTable:
        return TruthTable(self.n, -self.values)

    def __repr__(self) -> str:
        return f"TruthTable(n={self.n}, bits={self.to_bits()!r})"

    def to_bits(self) -> str:
        """0/1 string with 0 for +1 and 1 for -1."""
        return "".join("0" if v == 1 else "1" for v in self.values)

    @classmethod
    def from_bits(cls, bits: str) -> TruthTable:
        size = len(bits)
        n = size.bit_length() - 1
        if size < 2 or 2**n != size:
            raise LengthMismatch(f"bit string length {size} is not a power of two >= 2")
        for c in bits:
            if c not in "01":
                raise BadCharacter(f"unexpected character {c!r}")
        return cls(n, [1 if c == "0" else -1 for c in bits])

    def to_bool(self) -> np.ndarray:
        """0/1 view of the table (1 where the value is -1)."""
        return (self.values == -1).astype(np.uint8)


def parse_truth_table(text: str) -> TruthTable:
    """Parse the ``n=<int>`` + bit-line file format."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].replace(" ", "").startswith("n="):
        raise MissingHeader("first non-comment line must be 'n=<int>'")
    try:
        n = int(lines[0].replace(" ", "")[2:])
    except ValueError:
        raise MissingHeader(f"bad header {lines[0]!r}") from None
    if not 1 <= n <= MAX_N:
        raise UnsupportedN(f"n={n} outside 1..{MAX_N}")
    bits = "".join(lines[1:])
    for c in bits:
        if c not in "01":
            raise BadCharacter(f"unexpected character {c!r} in truth table body")
    if len(bits) != 2**n:
        raise LengthMismatch(f"expected {2**n} bits for n={n}, got {len(bits)}")
    return TruthTable(n, [1 if c == "0" else -1 for c in bits])


def serialize_truth_table(f: TruthTable) -> str:
    return f"n={f.n}\n{f.to_bits()}\n"


def load_truth_table(path) -> TruthTable:
    with open(path, encoding="utf-8") as fh:
        return parse_truth_table(fh.read())


def constant(n: int, sign: int = 1) -> TruthTable:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return TruthTable(n, np.full(2**n, sign, dtype=np.int8))


def linear(n: int, y: str | int) -> TruthTable:
    """The character (-1)^(x.y); equals row ``y`` of the unnormalized Hadamard matrix."""
    yi = _as_index(y, n)
    x = np.arange(2**n)
    return TruthTable(n, 1 - 2 * (popcount(x & yi) & 1))


def indicator_negated(n: int, points: Iterable[str | int]) -> TruthTable:
    """-1 exactly on ``points`` and +1 elsewhere."""
    vals = np.ones(2**n, dtype=np.int8)
    for p in points:
        vals[_as_index(p, n)] = -1
    return TruthTable(n, vals)


def weight_threshold(n: int, m: int) -> TruthTable:
    """-1 on every input of Hamming weight <= m."""
    if not 0 <= m < n:
        raise ValueError(f"need 0 <= m < n, got m={m}, n={n}")
    w = popcount(np.arange(2**n))
    return TruthTable(n, np.where(w <= m, -1, 1))


def xor(f: TruthTable, g: TruthTable) -> TruthTable:
    _same_n(f, g)
    return TruthTable(f.n, f.values * g.values)


def is_balanced(f: TruthTable) -> bool:
    return int(f.values.astype(np.int64).sum()) == 0


def is_bent(f: TruthTable) -> bool:
    if f.n % 2:
        return False
    from .spectra import walsh_transform

    return bool(np.all(np.abs(walsh_transform(f).values) == 2 ** (f.n // 2)))


def dual(f: TruthTable) -> TruthTable:
    if not is_bent(f):
        raise NotBent(f"{f!r} is not bent")
    from .spectra import walsh_transform

    return TruthTable(f.n, walsh_transform(f).values // 2 ** (f.n // 2))


def quadratic_form(n: int, pairs: Sequence[tuple[int, int]]) -> TruthTable:
    """(-1)^(sum of x_i x_j over ``pairs``), variables numbered 0..n-1 from the MSB."""
    x = np.arange(2**n)
    acc = np.zeros(2**n, dtype=np.int64)
    for i, j in pairs:
        acc ^= ((x >> (n - 1 - i)) & 1) & ((x >> (n - 1 - j)) & 1)
    return TruthTable(n, 1 - 2 * acc)


def _gf2_rank(rows: list[int]) -> int:
    rank = 0
    rows = list(rows)
    while rows:
        pivot = rows.pop()
        if pivot:
            rank += 1
            low = pivot & -pivot
            rows = [r ^ pivot if r & low else r for r in rows]
    return rank


def _symplectic_rows(n: int, pairs: Sequence[tuple[int, int]]) -> list[int]:
    rows = [0] * n
    for i, j in pairs:
        rows[i] ^= 1 << j
        rows[j] ^= 1 << i
    return rows


def bent_family(n: int, size: int | None = None, seed: int = 0, max_restarts: int = 200) -> list[TruthTable]:
    """Pure quadratic bent functions whose pairwise xors are all bent.

    Candidates are quadratic forms with a nondegenerate symplectic matrix,
    drawn from a fixed-seed generator and greedily grown into a family;
    every member and every pairwise xor is re-checked with ``is_bent``.
    ``size`` defaults to ``2**(n-1) - 1`` (the nonzero part of a Kerdock
    set) for n=4 and 7 for larger n.
    """
    if n % 2 or n < 4 or n > MAX_N:
        raise UnsupportedN(f"bent_family needs even 4 <= n <= {MAX_N}, got {n}")
    if size is None:
        size = 2 ** (n - 1) - 1 if n == 4 else 7
    all_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng = random.Random(seed)

    def draw():
        while True:
            pairs = [p for p in all_pairs if rng.random() < 0.5]
            if _gf2_rank(_symplectic_rows(n, pairs)) == n:
                return frozenset(pairs)

    for _ in range(max_restarts):
        chosen: list[frozenset] = []
        for _ in range(64 * size):
            cand = draw()
            if cand in chosen:
                continue
            if all(_gf2_rank(_symplectic_rows(n, cand ^ other)) == n for other in chosen):
                chosen.append(cand)
                if len(chosen) == size:
                    break
        if len(chosen) == size:
            family = [quadratic_form(n, sorted(c)) for c in chosen]
            for a, f in enumerate(family):
                if not is_bent(f):
                    raise AssertionError("bent_family produced a non-bent member")
                for g in family[a + 1:]:
                    if not is_bent(xor(f, g)):
                        raise AssertionError("bent_family produced a non-bent pairwise xor")
            return family
    raise UnsupportedN(f"could not assemble a family of {size} at n={n}")


def random_table(n: int, rng: np.random.Generator) -> TruthTable:
    return TruthTable(n, rng.choice(np.array([1, -1], dtype=np.int8), size=2**n))


def all_tables(n: int) -> Iterable[TruthTable]:
    """Every function on n variables (2^(2^n) of them; n <= 4 is practical)."""
    size = 2**n
    shifts = np.arange(size - 1, -1, -1)
    for code in range(2**size):
        bits = (code >> shifts) & 1
        yield TruthTable(n, 1 - 2 * bits)


def _same_n(*tables: TruthTable) -> None:
    ns = {t.n for t in tables}
    if len(ns) != 1:
        raise SizeMismatch(f"functions defined on different n: {sorted(ns)}")
