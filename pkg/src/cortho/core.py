"""Recurrence tables, polynomials in the P_n basis, and the Hessenberg operator.

A sequence of polynomials ``P_0 = 1, P_1, P_2, ...`` with ``deg P_n = n`` is
fully described by the coefficients ``d[i, n]`` of

.. math:: z P_n(z) = \\sum_{i=r_n}^{n+1} d_{in} P_i(z), \\qquad d_{n+1,n} \\ne 0.

Row ``n`` of a :class:`RecurrenceTable` holds ``d[r_n..n+1, n]``, i.e. column
``n`` of the (lower Hessenberg) matrix of multiplication by ``z``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class TableError(ValueError):
    """A recurrence table violates its structural invariants."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class InsufficientTableError(IndexError):
    """The requested operation needs more rows than the table stores."""


@dataclass(frozen=True)
class RecurrenceTable:
    """Banded coefficient table of a polynomial recurrence.

    ``firsts[n]`` is ``r_n`` and ``coeffs[n]`` the tuple
    ``(d[r_n, n], ..., d[n+1, n])``. Leading zeros are stripped on
    construction. With ``strict=False`` a vanishing ``d[n+1, n]`` is
    tolerated so that degenerate candidates can still be diagnosed.
    """

    firsts: tuple[int, ...]
    coeffs: tuple[tuple[complex, ...], ...]
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        if len(self.firsts) != len(self.coeffs):
            raise TableError("firsts and coeffs differ in length")
        firsts, coeffs = [], []
        for n, (r, row) in enumerate(zip(self.firsts, self.coeffs)):
            r = int(r)
            row = tuple(complex(c) for c in row)
            if not 0 <= r <= n + 1:
                raise TableError(f"first index {r} outside 0..{n + 1}", n)
            if len(row) != n + 2 - r:
                raise TableError(
                    f"expected {n + 2 - r} coefficients for first index {r}, "
                    f"got {len(row)}", n)
            if not all(np.isfinite(c.real) and np.isfinite(c.imag) for c in row):
                raise TableError("non-finite coefficient", n)
            if self.strict and row[-1] == 0:
                raise TableError("d[n+1, n] vanishes", n)
            while len(row) > 1 and row[0] == 0:
                row = row[1:]
                r += 1
            firsts.append(r)
            coeffs.append(row)
        object.__setattr__(self, "firsts", tuple(firsts))
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[int, Sequence[complex]]],
                  strict: bool = True) -> "RecurrenceTable":
        rows = list(rows)
        return cls(tuple(r for r, _ in rows), tuple(tuple(c) for _, c in rows),
                   strict=strict)

    @classmethod
    def from_dense(cls, matrix, strict: bool = True) -> "RecurrenceTable":
        """Build from an ``(N+1, N)`` array whose column ``n`` is ``d[:, n]``."""
        matrix = np.asarray(matrix, dtype=complex)
        nrows, ncols = matrix.shape
        if nrows != ncols + 1:
            raise TableError(f"dense matrix must have shape (N+1, N), got {matrix.shape}")
        if np.any(np.tril(matrix, -2) != 0):
            raise TableError("entries below the subdiagonal; matrix is not Hessenberg")
        rows = [(0, matrix[: n + 2, n]) for n in range(ncols)]
        return cls.from_rows(rows, strict=strict)

    @property
    def num_rows(self) -> int:
        return len(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def row(self, n: int) -> tuple[int, tuple[complex, ...]]:
        if not 0 <= n < self.num_rows:
            raise InsufficientTableError(f"row {n} not stored (table has {self.num_rows} rows)")
        return self.firsts[n], self.coeffs[n]

    def coefficient(self, i: int, n: int) -> complex:
        """``d[i, n]``; zero outside the stored band of column ``n``."""
        r, row = self.row(n)
        if r <= i <= n + 1:
            return row[i - r]
        return 0j

    def subdiagonal(self) -> np.ndarray:
        """The entries ``d[n+1, n]`` for all stored ``n``."""
        return np.array([row[-1] for row in self.coeffs], dtype=complex)

    def row_lengths(self) -> np.ndarray:
        return np.array([len(row) for row in self.coeffs], dtype=int)

    def to_dense(self, num_rows: int | None = None) -> np.ndarray:
        """Section ``D[:N+1, :N]`` of the Hessenberg matrix, ``D[i, n] = d[i, n]``."""
        N = self.num_rows if num_rows is None else num_rows
        if N > self.num_rows:
            raise InsufficientTableError(f"{N} rows requested, table has {self.num_rows}")
        D = np.zeros((N + 1, N), dtype=complex)
        for n in range(N):
            r, row = self.firsts[n], self.coeffs[n]
            D[r:n + 2, n] = row
        return D

    def truncated(self, num_rows: int) -> "RecurrenceTable":
        if not 0 < num_rows <= self.num_rows:
            raise InsufficientTableError(f"cannot truncate {self.num_rows} rows to {num_rows}")
        return RecurrenceTable(self.firsts[:num_rows], self.coeffs[:num_rows], strict=self.strict)


@dataclass(frozen=True)
class BasisVector:
    """Finite expansion ``p = sum_n coeffs[n] P_n``; trailing zeros are trimmed."""

    coeffs: tuple[complex, ...] = ()

    def __post_init__(self):
        c = [complex(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def unit(cls, k: int) -> "BasisVector":
        return cls((0,) * k + (1,))

    @classmethod
    def from_array(cls, values) -> "BasisVector":
        return cls(tuple(np.asarray(values, dtype=complex).ravel()))

    @property
    def degree(self) -> int:
        """Degree of the represented polynomial, ``-1`` for the zero vector."""
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def to_array(self, length: int | None = None) -> np.ndarray:
        n = len(self.coeffs) if length is None else length
        out = np.zeros(n, dtype=complex)
        m = min(n, len(self.coeffs))
        out[:m] = self.coeffs[:m]
        return out

    def isclose(self, other: "BasisVector", tol: float = 1e-10) -> bool:
        n = max(len(self), len(other))
        return bool(np.max(np.abs(self.to_array(n) - other.to_array(n)), initial=0.0) <= tol)


def inner(u: BasisVector, v: BasisVector) -> complex:
    """``<u, v>``, conjugate-linear in the first slot; the ``P_n`` are orthonormal."""
    n = min(len(u), len(v))
    return complex(np.vdot(u.to_array()[:n], v.to_array()[:n]))


def eval_sequence(table: RecurrenceTable, z, count: int) -> np.ndarray:
    """Evaluate ``P_0(z), ..., P_{count-1}(z)`` by forward recurrence.

    ``z`` may be a scalar or an array; the result has shape
    ``(count,) + np.shape(z)``.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if count > table.num_rows + 1:
        raise InsufficientTableError(
            f"{count} values need {count - 1} rows, table has {table.num_rows}")
    z = np.asarray(z, dtype=complex)
    P = np.empty((count,) + z.shape, dtype=complex)
    if count == 0:
        return P
    P[0] = 1.0
    for n in range(count - 1):
        r, row = table.firsts[n], table.coeffs[n]
        lead = row[-1]
        if lead == 0:
            raise TableError("d[n+1, n] vanishes; recurrence cannot be solved", n)
        acc = z * P[n]
        for i, d in enumerate(row[:-1], start=r):
            if d != 0:
                acc = acc - d * P[i]
        P[n + 1] = acc / lead
    return P


def monomial_coeffs(table: RecurrenceTable, n: int) -> np.ndarray:
    """Monomial coefficients ``(c_0, ..., c_n)`` of ``P_n``, lowest degree first."""
    if not 0 <= n <= table.num_rows:
        raise InsufficientTableError(f"P_{n} needs {n} rows, table has {table.num_rows}")
    polys = [np.ones(1, dtype=complex)]
    for m in range(n):
        r, row = table.firsts[m], table.coeffs[m]
        nxt = np.zeros(m + 2, dtype=complex)
        nxt[1:] = polys[m]
        for i, d in enumerate(row[:-1], start=r):
            nxt[: i + 1] -= d * polys[i]
        polys.append(nxt / row[-1])
    return polys[n]


def horner(coeffs, z):
    """Evaluate a polynomial given lowest-degree-first coefficients."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def evaluate(table: RecurrenceTable, v: BasisVector, z):
    """Value of ``sum_n v_n P_n(z)``."""
    if v.degree < 0:
        return np.zeros(np.shape(z), dtype=complex)
    P = eval_sequence(table, z, len(v))
    return np.tensordot(v.to_array(), P, axes=1)


def apply_D(table: RecurrenceTable, v: BasisVector) -> BasisVector:
    """Multiplication by ``z`` in the ``P_n`` basis."""
    if v.degree < 0:
        return BasisVector()
    if v.degree + 1 > table.num_rows:
        raise InsufficientTableError(
            f"degree {v.degree} needs {v.degree + 1} rows, table has {table.num_rows}")
    out = np.zeros(len(v) + 1, dtype=complex)
    for n, vn in enumerate(v.coeffs):
        if vn == 0:
            continue
        r, row = table.firsts[n], table.coeffs[n]
        out[r:n + 2] += np.asarray(row) * vn
    return BasisVector.from_array(out)


def band_width(table: RecurrenceTable) -> int:
    """Largest stored row length ``max(n + 2 - r_n)``."""
    return int(table.row_lengths().max())


def apply_Dstar(table: RecurrenceTable, v: BasisVector,
                safe_limit: int | None = None) -> BasisVector:
    """Adjoint action, ``(D* v)_n = sum_k conj(d[k, n]) v_k``.

    Row ``k`` of ``D`` may reach up to column ``k + w - 2`` for band width
    ``w``; ``safe_limit`` is the largest column that can contribute and
    defaults to ``deg(v) + w - 2`` with the observed width. The table must
    store every column up to ``safe_limit``.
    """
    if v.degree < 0:
        return BasisVector()
    if safe_limit is None:
        safe_limit = v.degree + band_width(table) - 2
    safe_limit = max(safe_limit, v.degree - 1)
    if safe_limit >= table.num_rows:
        raise InsufficientTableError(
            f"rows up to {v.degree} may reach column {safe_limit}, "
            f"table stores columns 0..{table.num_rows - 1}")
    out = np.zeros(safe_limit + 1, dtype=complex)
    vv = v.to_array()
    for n in range(safe_limit + 1):
        r, row = table.firsts[n], table.coeffs[n]
        hi = min(n + 1, v.degree)
        if hi < r:
            continue
        out[n] = np.dot(np.conj(np.asarray(row[: hi - r + 1])), vv[r:hi + 1])
    return BasisVector.from_array(out)


def regauge(table: RecurrenceTable, phases) -> RecurrenceTable:
    """Table of the rescaled sequence ``omega_n P_n`` with ``|omega_n| = 1``.

    ``phases[0]`` must be 1 so that the new ``P_0`` is still the constant 1.
    """
    omega = np.asarray(phases, dtype=complex)
    if len(omega) < table.num_rows + 1:
        raise ValueError(f"need {table.num_rows + 1} phases, got {len(omega)}")
    if omega[0] != 1:
        raise ValueError("phases[0] must equal 1")
    if np.any(np.abs(np.abs(omega) - 1) > 1e-12):
        raise ValueError("phases must be unimodular")
    rows = []
    for n in range(table.num_rows):
        r, row = table.firsts[n], table.coeffs[n]
        idx = np.arange(r, n + 2)
        rows.append((r, np.asarray(row) * omega[n] / omega[idx]))
    return RecurrenceTable.from_rows(rows, strict=table.strict)
