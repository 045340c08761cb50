"""Exact banded matrices and centred difference operators.

Entries are kept as :class:`fractions.Fraction` while structural identities
are checked; :meth:`BandedMatrix.to_float` produces the floating copy used by
the runtime operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

Rational = Fraction

# weights of the centred operators, listed from the leftmost point of the window
_WEIGHTS = {
    "mu_delta": (Fraction(-1, 2), 0, Fraction(1, 2)),
    "delta2": (1, -2, 1),
    "mu_delta3": (Fraction(-1, 2), 1, 0, -1, Fraction(1, 2)),
    "delta4": (1, -4, 6, -4, 1),
    "delta6": (1, -6, 15, -20, 15, -6, 1),
}


def centred_difference(kind: str, u: Sequence, j: int):
    """Apply a centred difference operator to ``u`` at index ``j``.

    ``kind`` is one of ``mu_delta``, ``delta2``, ``mu_delta3``, ``delta4``
    or ``delta6``.  The window ``u[j - r : j + r + 1]`` must exist, where
    ``r`` is the operator half-width.  Works on floats and Fractions alike.
    """
    try:
        weights = _WEIGHTS[kind]
    except KeyError:
        raise ValueError(f"unknown difference operator {kind!r}") from None
    r = len(weights) // 2
    if j - r < 0 or j + r >= len(u):
        raise ValueError(
            f"{kind} needs {2 * r + 1} points centred at index {j}, "
            f"window has {len(u)}"
        )
    total = 0
    for w, v in zip(weights, u[j - r : j + r + 1]):
        if w:
            total = total + w * v
    return total


@dataclass(frozen=True)
class GridField:
    """Grid values ``u_1..u_m`` with spacing ``h``; ``x_origin`` is ``x_1``."""

    values: np.ndarray
    h: float
    x_origin: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("GridField needs a non-empty 1-d array of values")
        if not self.h > 0:
            raise ValueError(f"grid spacing must be positive, got {self.h}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def m(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.x_origin + self.h * np.arange(self.m)

    def with_values(self, values) -> GridField:
        return GridField(values, self.h, self.x_origin)


def _diag_range(rows: int, cols: int, k: int) -> range:
    return range(max(0, -k), min(rows, cols - k))


@dataclass(frozen=True, eq=False)
class BandedMatrix:
    """Rectangular matrix stored by diagonals.

    ``diagonals`` maps an offset ``k`` (column minus row) to the tuple of
    entries ``A[i, i + k]`` in increasing ``i``.  Offsets outside
    ``[-lower, upper]`` are not representable, so entries outside the
    declared band are identically zero.
    """

    rows: int
    cols: int
    lower: int
    upper: int
    diagonals: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0 or self.lower < 0 or self.upper < 0:
            raise ValueError("dimensions and bandwidths must be non-negative")
        diags = {}
        for k, entries in self.diagonals.items():
            if not -self.lower <= k <= self.upper:
                raise ValueError(f"offset {k} outside band [-{self.lower}, {self.upper}]")
            expected = len(_diag_range(self.rows, self.cols, k))
            entries = tuple(entries)
            if len(entries) != expected:
                raise ValueError(f"diagonal {k} needs {expected} entries, got {len(entries)}")
            if any(e != 0 for e in entries):
                diags[k] = entries
        object.__setattr__(self, "diagonals", diags)

    # construction -------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None, lower=0, upper=0) -> BandedMatrix:
        return cls(rows, rows if cols is None else cols, lower, upper, {})

    @classmethod
    def identity(cls, n: int) -> BandedMatrix:
        return cls(n, n, 0, 0, {0: (Fraction(1),) * n})

    @classmethod
    def from_dense(cls, dense, lower: int | None = None, upper: int | None = None) -> BandedMatrix:
        dense = [list(r) for r in dense]
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        entries = {}
        for i, r in enumerate(dense):
            if len(r) != cols:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(r):
                if v != 0:
                    entries[(i, j)] = v
        lo = max([i - j for i, j in entries] + [0])
        up = max([j - i for i, j in entries] + [0])
        lower = lo if lower is None else lower
        upper = up if upper is None else upper
        if lo > lower or up > upper:
            raise ValueError("dense matrix has entries outside the requested band")
        return cls._from_entries(rows, cols, lower, upper, entries)

    @classmethod
    def _from_entries(cls, rows, cols, lower, upper, entries: dict) -> BandedMatrix:
        diags = {}
        for (i, j), v in entries.items():
            k = j - i
            if k not in diags:
                diags[k] = [0] * len(_diag_range(rows, cols, k))
            diags[k][i - max(0, -k)] = v
        return cls(rows, cols, lower, upper, {k: tuple(v) for k, v in diags.items()})

    # access ---------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, index):
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(index)
        k = j - i
        diag = self.diagonals.get(k)
        if diag is None:
            return 0
        return diag[i - max(0, -k)]

    def entries(self) -> Iterable[tuple[int, int, object]]:
        """Yield ``(i, j, value)`` for every stored nonzero entry."""
        for k, diag in self.diagonals.items():
            start = max(0, -k)
            for n, v in enumerate(diag):
                if v != 0:
                    yield start + n, start + n + k, v

    def row(self, i: int) -> tuple:
        out = [0] * self.cols
        for k, diag in self.diagonals.items():
            j = i + k
            if 0 <= j < self.cols and i - max(0, -k) in range(len(diag)):
                out[j] = diag[i - max(0, -k)]
        return tuple(out)

    def to_dense(self) -> list[list]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_numpy(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for i, j, v in self.entries():
            out[i, j] = float(v)
        return out

    def to_float(self) -> BandedMatrix:
        return BandedMatrix(
            self.rows, self.cols, self.lower, self.upper,
            {k: tuple(float(v) for v in d) for k, d in self.diagonals.items()},
        )

    def bandwidth(self) -> int:
        """Smallest half-bandwidth containing every nonzero entry."""
        return max((abs(k) for k in self.diagonals), default=0)

    def row_bandwidth(self, i: int) -> int:
        return max((abs(j - i) for j, v in enumerate(self.row(i)) if v != 0), default=0)

    # arithmetic -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, BandedMatrix):
            return NotImplemented
        return self.shape == other.shape and self.diagonals == other.diagonals

    def __hash__(self):
        return hash((self.shape, tuple(sorted(self.diagonals.items()))))

    def __add__(self, other: BandedMatrix) -> BandedMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        entries = {}
        for i, j, v in list(self.entries()) + list(other.entries()):
            entries[(i, j)] = entries.get((i, j), 0) + v
        return BandedMatrix._from_entries(
            self.rows, self.cols, max(self.lower, other.lower),
            max(self.upper, other.upper), entries,
        )

    def __neg__(self) -> BandedMatrix:
        return self.scale(-1)

    def __sub__(self, other: BandedMatrix) -> BandedMatrix:
        return self + (-other)

    def scale(self, c) -> BandedMatrix:
        return BandedMatrix(
            self.rows, self.cols, self.lower, self.upper,
            {k: tuple(c * v for v in d) for k, d in self.diagonals.items()},
        )

    def __rmul__(self, c):
        if isinstance(c, Number):
            return self.scale(c)
        return NotImplemented

    def __matmul__(self, other):
        if isinstance(other, BandedMatrix):
            return band_multiply(self, other)
        return self.matvec(other)

    def transpose(self) -> BandedMatrix:
        return BandedMatrix._from_entries(
            self.cols, self.rows, self.upper, self.lower,
            {(j, i): v for i, j, v in self.entries()},
        )

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and self == self.transpose()

    def matvec(self, x) -> np.ndarray:
        """Floating-point product with a vector, one diagonal at a time."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.cols,):
            raise ValueError(f"vector of length {x.shape} for matrix {self.shape}")
        y = np.zeros(self.rows)
        for k, diag in self.diagonals.items():
            rng = _diag_range(self.rows, self.cols, k)
            y[rng.start : rng.stop] += np.asarray(diag, dtype=float) * x[rng.start + k : rng.stop + k]
        return y


def band_from_rows(
    rows: Sequence[tuple[int, Sequence[tuple[int, object]]]],
    m: int,
    interior: Sequence[tuple[int, object]] = (),
) -> BandedMatrix:
    """Build an ``m x m`` banded matrix from a repeated row pattern.

    ``interior`` lists ``(offset, coefficient)`` pairs applied to every row
    not given explicitly; entries whose column falls outside the matrix are
    dropped, which reproduces a homogeneous Dirichlet truncation at both
    ends.  ``rows`` overrides individual rows (0-based index) with their own
    offset pairs; those must stay inside the matrix.
    """
    explicit = {}
    for i, pairs in rows:
        if not 0 <= i < m:
            raise IndexError(f"row {i} outside matrix of size {m}")
        explicit[i] = list(pairs)
    offsets = [k for k, _ in interior] + [k for pairs in explicit.values() for k, _ in pairs]
    lower = max([-k for k in offsets] + [0])
    upper = max(offsets + [0])
    entries = {}
    for i in range(m):
        if i in explicit:
            for k, c in explicit[i]:
                if not 0 <= i + k < m:
                    raise ValueError(f"row {i} offset {k} falls outside the matrix")
                entries[(i, i + k)] = entries.get((i, i + k), 0) + Fraction(c)
        else:
            for k, c in interior:
                if 0 <= i + k < m:
                    entries[(i, i + k)] = entries.get((i, i + k), 0) + Fraction(c)
    return BandedMatrix._from_entries(m, m, lower, upper, entries)


def band_multiply(A: BandedMatrix, B: BandedMatrix) -> BandedMatrix:
    """Exact product ``A @ B``; the result's band is the sum of the operands' bands."""
    if A.cols != B.rows:
        raise ValueError(f"cannot multiply {A.shape} by {B.shape}")
    by_row = {}
    for k, l, v in B.entries():
        by_row.setdefault(k, []).append((l, v))
    entries = {}
    for i, k, a in A.entries():
        for l, b in by_row.get(k, ()):
            entries[(i, l)] = entries.get((i, l), 0) + a * b
    return BandedMatrix._from_entries(
        A.rows, B.cols, A.lower + B.lower, A.upper + B.upper, entries
    )


def exchange_flip(A: BandedMatrix) -> BandedMatrix:
    """Return ``J A J`` with ``J`` the index-reversal permutation."""
    if A.rows != A.cols:
        raise ValueError("exchange_flip needs a square matrix")
    n = A.rows
    return BandedMatrix._from_entries(
        n, n, A.upper, A.lower,
        {(n - 1 - i, n - 1 - j): v for i, j, v in A.entries()},
    )


def power(A: BandedMatrix, n: int) -> BandedMatrix:
    out = A
    for _ in range(n - 1):
        out = band_multiply(out, A)
    return out
