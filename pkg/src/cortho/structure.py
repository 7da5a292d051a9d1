"""Structural analysis of recurrence tables.

Band shape, irreducibility, formal normality (``D*D = DD*`` on polynomials)
and the reduction of a formally normal banded operator to ``b + a J`` with
``|a| = 1`` and ``J`` a symmetric Jacobi matrix.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .core import InsufficientTableError, RecurrenceTable, TableError

DEFAULT_TOL = 1e-10

RR_CAVEAT = ("band-limited within the stored rows; growth of r_n beyond the "
             "table cannot be certified from finite data")


class AnalysisError(ValueError):
    """Precondition of an analysis step does not hold."""


class DecompositionError(ValueError):
    """The table does not reduce to ``b + a J``.

    ``relation`` names the first violated condition, ``index`` the first
    offending row (or ``None``), ``residual`` its size when numeric.
    """

    def __init__(self, relation: str, message: str, index: int | None = None,
                 residual: float | None = None):
        super().__init__(message)
        self.relation = relation
        self.index = index
        self.residual = residual

    def to_dict(self) -> dict:
        return {"relation": self.relation, "index": self.index,
                "residual": self.residual, "message": str(self)}


@dataclass(frozen=True)
class BandProfile:
    """Band shape of the Hessenberg matrix.

    ``r[n]`` is the first nonzero row of column ``n``; ``s[k]`` the last
    nonzero column of row ``k`` within the table (``None`` if row ``k`` has
    none). Rows ``k < complete_rows`` are guaranteed complete under the band
    width ``width``.
    """

    r: tuple[int, ...]
    s: tuple[int | None, ...]
    max_length: int
    width: int
    is_rr: bool
    complete_rows: int

    def to_dict(self) -> dict:
        return {"r": list(self.r), "s": list(self.s), "max_length": self.max_length,
                "width": self.width, "is_rr": self.is_rr,
                "complete_rows": self.complete_rows, "caveat": RR_CAVEAT}


def _infer_width(lengths: np.ndarray) -> int:
    head = max(math.ceil(len(lengths) / 2), min(len(lengths), 4))
    return int(lengths[:head].max())


def band_profile(table: RecurrenceTable, width: int | None = None) -> BandProfile:
    """Compute ``r_n``, ``s_k`` and the band-limited verdict.

    Without a declared ``width`` the width is read off the first half of the
    table; the table counts as band-limited when no later row is longer.
    """
    if table.num_rows == 0:
        raise AnalysisError("empty table")
    lengths = table.row_lengths()
    w = _infer_width(lengths) if width is None else int(width)
    if w < 1:
        raise ValueError("width must be positive")
    N = table.num_rows
    s: list[int | None] = [None] * (N + 1)
    for n in range(N):
        r, row = table.firsts[n], table.coeffs[n]
        for i, d in enumerate(row, start=r):
            if d != 0:
                s[i] = n
    max_length = int(lengths.max())
    return BandProfile(r=table.firsts, s=tuple(s), max_length=max_length, width=w,
                       is_rr=max_length <= w,
                       complete_rows=max(0, min(N + 1, N + 2 - w)))


class IrreducibilityResult(NamedTuple):
    irreducible: bool
    first_failure: int | None


def check_irreducible(table: RecurrenceTable, tol: float = DEFAULT_TOL) -> IrreducibilityResult:
    """All subdiagonal entries ``d[n+1, n]`` exceed ``tol`` in modulus."""
    bad = np.flatnonzero(np.abs(table.subdiagonal()) <= tol)
    if bad.size:
        return IrreducibilityResult(False, int(bad[0]))
    return IrreducibilityResult(True, None)


@dataclass(frozen=True)
class NormalityResult:
    """Commutator ``D*D - DD*`` on the truncation-safe index block ``[0, region)``."""

    formally_normal: bool
    max_residual: float
    worst_entry: tuple[int, int]
    first_violation: tuple[int, int] | None
    first_violation_residual: float | None
    region: int
    tol: float
    scale: float
    commutator: np.ndarray = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {"formally_normal": self.formally_normal,
                "max_residual": self.max_residual,
                "worst_entry": list(self.worst_entry),
                "first_violation": None if self.first_violation is None
                else list(self.first_violation),
                "first_violation_residual": self.first_violation_residual,
                "region": self.region, "tol": self.tol, "scale": self.scale}


def commutator(table: RecurrenceTable, width: int | None = None) -> tuple[np.ndarray, int]:
    """``(D*D - DD*)`` restricted to indices where both sums are complete."""
    prof = band_profile(table, width)
    if not prof.is_rr:
        raise AnalysisError(
            f"table is not band-limited (max row length {prof.max_length} "
            f"exceeds width {prof.width}); adjoint rows are not finite")
    N = table.num_rows
    K = min(N, prof.complete_rows)
    if K <= 0:
        raise AnalysisError(f"no truncation-safe region: {N} rows for band width {prof.width}")
    D = table.to_dense()
    DhD = D[:, :K].conj().T @ D[:, :K]
    DDh = D[:K, :] @ D[:K, :].conj().T
    return DhD - DDh, K


def _entry_scale(table: RecurrenceTable, num_rows: int | None = None) -> float:
    rows = table.coeffs if num_rows is None else table.coeffs[:num_rows + 1]
    return max(1.0, max(max(abs(c) for c in row) for row in rows))


def check_formal_normality(table: RecurrenceTable, tol: float = DEFAULT_TOL,
                           width: int | None = None) -> NormalityResult:
    """Test ``D*D = DD*`` entrywise on the truncation-safe block.

    Entries are compared against ``tol * scale`` where ``scale`` is the
    squared largest modulus of a table entry, floored at 1, so ``tol`` is
    absolute for tables with entries of modulus at most 1.
    ``worst_entry`` is the location of the largest residual; ``first_violation``
    the first entry in row-major order above the threshold.
    """
    C, K = commutator(table, width)
    A = np.abs(C)
    scale = _entry_scale(table, K) ** 2
    worst = np.unravel_index(int(np.argmax(A)), A.shape)
    max_res = float(A[worst])
    over = np.argwhere(A > tol * scale)
    if over.size:
        fv = (int(over[0][0]), int(over[0][1]))
        fv_res = float(A[fv])
    else:
        fv, fv_res = None, None
    return NormalityResult(formally_normal=max_res <= tol * scale, max_residual=max_res,
                           worst_entry=(int(worst[0]), int(worst[1])),
                           first_violation=fv, first_violation_residual=fv_res,
                           region=K, tol=tol, scale=scale, commutator=C)


@dataclass(frozen=True)
class ThreeTermForm:
    """``z P_n = a conj(c[n-1]) P_{n-1} + (b + a d[n]) P_n + a c[n] P_{n+1}``.

    ``a`` is unimodular, ``d`` real, every ``c[n]`` nonzero, ``delta = a**2``.
    """

    b: complex
    a: complex
    c: tuple[complex, ...]
    d: tuple[float, ...]
    delta: complex | None = None

    def __post_init__(self):
        a = complex(self.a)
        if abs(abs(a) - 1) > 1e-12:
            raise ValueError(f"|a| = {abs(a)!r} is not 1")
        c = tuple(complex(x) for x in self.c)
        d = tuple(float(np.real(x)) for x in self.d)
        if len(c) != len(d):
            raise ValueError(f"c and d differ in length ({len(c)} vs {len(d)})")
        if not c:
            raise ValueError("empty three-term form")
        for n, cn in enumerate(c):
            if cn == 0:
                raise ValueError(f"c[{n}] vanishes")
        delta = a * a if self.delta is None else complex(self.delta)
        if abs(delta - a * a) > 1e-12:
            raise ValueError("delta must equal a**2")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "delta", delta)

    def __len__(self) -> int:
        return len(self.c)

    def phase_stripped(self) -> "ThreeTermForm":
        return ThreeTermForm(self.b, self.a, tuple(abs(x) for x in self.c), self.d)

    def point(self, t):
        """Map line parameters ``t`` to ``b + a t``."""
        return self.b + self.a * np.asarray(t)

    def line_parameter(self, z):
        """Signed coordinates ``conj(a) (z - b)``; real exactly on the carrier line."""
        return np.conj(self.a) * (np.asarray(z, dtype=complex) - self.b)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "delta": self.delta,
                "c": list(self.c), "d": list(self.d)}


def _principal_sqrt(delta: complex) -> complex:
    """Unimodular root of ``delta / |delta|`` with argument in ``(-pi/2, pi/2]``."""
    phi = cmath.phase(delta)
    if phi <= -math.pi:
        phi = math.pi
    return cmath.exp(0.5j * phi)


def symmetric_table(form: ThreeTermForm, num_rows: int | None = None) -> RecurrenceTable:
    """Rows ``(conj(c[n-1]), d[n], c[n])`` of the transformed sequence ``P_n(b + a z)``."""
    N = len(form) if num_rows is None else num_rows
    if N > len(form):
        raise InsufficientTableError(f"{N} rows requested, form has {len(form)} coefficients")
    rows = [(0, (form.d[0], form.c[0]))]
    for n in range(1, N):
        rows.append((n - 1, (np.conj(form.c[n - 1]), form.d[n], form.c[n])))
    return RecurrenceTable.from_rows(rows)


def form_table(form: ThreeTermForm, num_rows: int | None = None) -> RecurrenceTable:
    """Rows ``(a conj(c[n-1]), b + a d[n], a c[n])`` of the sequence itself."""
    return rotate_table(symmetric_table(form, num_rows), form.a, form.b)


def symmetric_coefficients(table: RecurrenceTable, tol: float = DEFAULT_TOL):
    """Read ``(c, d)`` from a symmetric three-term table, validating its shape."""
    c, d = [], []
    for n in range(table.num_rows):
        r, row = table.row(n)
        dense = np.zeros(3, dtype=complex)
        lo = n - 1
        if r < lo:
            raise TableError("not a three-term row", n)
        dense[r - lo:] = row
        f, g, h = dense
        if abs(g.imag) > tol:
            raise TableError(f"diagonal entry not real (imag {g.imag:.3g})", n)
        if n > 0 and abs(f - np.conj(c[n - 1])) > tol:
            raise TableError("upper entry is not conj of the previous lower entry", n)
        c.append(h)
        d.append(g.real)
    return tuple(c), tuple(d)


def rotate_table(table: RecurrenceTable, a: complex, b: complex,
                 tol: float = DEFAULT_TOL) -> RecurrenceTable:
    """From a symmetric table build the table of ``P_n((z - b) / a)``."""
    a = complex(a)
    if abs(abs(a) - 1) > 1e-12:
        raise ValueError(f"|a| = {abs(a)!r} is not 1")
    c, d = symmetric_coefficients(table, tol)
    rows = [(0, (b + a * d[0], a * c[0]))]
    for n in range(1, len(c)):
        rows.append((n - 1, (a * np.conj(c[n - 1]), b + a * d[n], a * c[n])))
    return RecurrenceTable.from_rows(rows)


def form_from_symmetric(table: RecurrenceTable, a: complex = 1, b: complex = 0,
                        tol: float = DEFAULT_TOL) -> ThreeTermForm:
    c, d = symmetric_coefficients(table, tol)
    return ThreeTermForm(b=b, a=a, c=c, d=d)


class ThreeTermView(NamedTuple):
    f: np.ndarray  # f[n] = d[n-1, n], f[0] unused
    g: np.ndarray  # d[n, n]
    h: np.ndarray  # d[n+1, n]


def three_term_view(table: RecurrenceTable) -> ThreeTermView:
    """Split a three-term table into upper, diagonal and lower entries."""
    N = table.num_rows
    f = np.zeros(N, dtype=complex)
    g = np.zeros(N, dtype=complex)
    h = np.zeros(N, dtype=complex)
    for n in range(N):
        r, _ = table.row(n)
        if r < n - 1:
            raise DecompositionError(
                "not-3-term", f"column {n} reaches row {r} < {n - 1}; "
                f"row {r} extends to column s_{r} = {n} > {r + 1}", index=r)
        if n >= 1:
            f[n] = table.coefficient(n - 1, n)
        g[n] = table.coefficient(n, n)
        h[n] = table.coefficient(n + 1, n)
    return ThreeTermView(f, g, h)


def decompose(table: RecurrenceTable, tol: float = DEFAULT_TOL,
              width: int | None = None) -> ThreeTermForm:
    """Reduce a formally normal banded table to ``b + a J``.

    Uses the gauge ``b = g_0`` (so ``d[0] = 0``) and the principal root
    ``a = sqrt(delta)``. Raises :class:`DecompositionError` naming the first
    violated relation.
    """
    irr = check_irreducible(table, tol)
    if not irr.irreducible:
        raise DecompositionError("irreducible", f"d[n+1, n] vanishes at n = {irr.first_failure}",
                                 index=irr.first_failure)
    prof = band_profile(table, width)
    if not prof.is_rr:
        raise DecompositionError("band-limited", f"max row length {prof.max_length} "
                                 f"exceeds width {prof.width}")
    try:
        normal = check_formal_normality(table, tol, width)
    except AnalysisError as exc:
        raise DecompositionError("formally-normal", str(exc)) from exc
    if not normal.formally_normal:
        m, n = normal.worst_entry
        raise DecompositionError(
            "formally-normal",
            f"not formally normal: |(D*D - DD*)[{m}, {n}]| = {normal.max_residual:.6g}",
            index=normal.first_violation[0] if normal.first_violation else None,
            residual=normal.max_residual)
    N = table.num_rows
    for k in range(N - 1):
        sk = prof.s[k]
        if sk != k + 1:
            raise DecompositionError("not-3-term", f"not 3-term: s_{k} = {sk}, expected {k + 1}",
                                     index=k)
    f, g, h = three_term_view(table)
    if N == 1:
        a = 1 + 0j
        delta = a
    else:
        delta = f[1] / np.conj(h[0])
        if abs(abs(delta) - 1) > tol:
            raise DecompositionError("unimodular-delta", f"|delta| = {abs(delta):.12g} is not 1",
                                     index=1, residual=float(abs(abs(delta) - 1)))
        for n in range(1, N):
            res = abs(f[n] - delta * np.conj(h[n - 1]))
            if res > tol * max(1.0, abs(h[n - 1])):
                raise DecompositionError(
                    "f-relation", f"f_{n} != delta * conj(h_{n - 1}) (residual {res:.3g})",
                    index=n, residual=float(res))
        a = _principal_sqrt(delta)
    b = complex(g[0])
    rotated = np.conj(a) * (g - b)
    bad = np.flatnonzero(np.abs(rotated.imag) > tol * np.maximum(1.0, np.abs(rotated)))
    if bad.size:
        n = int(bad[0])
        raise DecompositionError(
            "g-reality", f"conj(a) (g_{n} - g_0) is not real (imag {rotated[n].imag:.3g})",
            index=n, residual=float(abs(rotated[n].imag)))
    return ThreeTermForm(b=b, a=a, c=tuple(np.conj(a) * h), d=tuple(rotated.real),
                         delta=a * a)


@dataclass(frozen=True)
class RelationResiduals:
    """Maximal residuals of the three families of commutator equations."""

    diagonal: float
    first_offdiagonal: float
    second_offdiagonal: float

    def max(self) -> float:
        return max(self.diagonal, self.first_offdiagonal, self.second_offdiagonal)

    def to_dict(self) -> dict:
        return {"diagonal": self.diagonal, "first_offdiagonal": self.first_offdiagonal,
                "second_offdiagonal": self.second_offdiagonal}


def verify_normality_relations(table: RecurrenceTable) -> RelationResiduals:
    """Residuals of the equations that ``DD* P_n = D*D P_n`` imposes on a 3-term table.

    With ``DP_n = f_n P_{n-1} + g_n P_n + h_n P_{n+1}``:

    * ``|f_1|^2 = |h_0|^2`` and ``|h_{n-1}|^2 + |f_{n+1}|^2 = |f_n|^2 + |h_n|^2``
    * ``g_{n-1} conj(h_{n-1}) + f_n conj(g_n) = conj(g_{n-1}) f_n + conj(h_{n-1}) g_n``
    * ``f_n conj(h_n) = conj(h_{n-1}) f_{n+1}``
    """
    f, g, h = three_term_view(table)
    N = table.num_rows
    fam1 = [0.0]
    if N >= 2:
        fam1 = [abs(abs(f[1]) ** 2 - abs(h[0]) ** 2)]
    for n in range(1, N - 1):
        fam1.append(abs(abs(h[n - 1]) ** 2 + abs(f[n + 1]) ** 2 - abs(f[n]) ** 2 - abs(h[n]) ** 2))
    fam2 = [0.0]
    for n in range(1, N):
        lhs = g[n - 1] * np.conj(h[n - 1]) + f[n] * np.conj(g[n])
        rhs = np.conj(g[n - 1]) * f[n] + np.conj(h[n - 1]) * g[n]
        fam2.append(abs(lhs - rhs))
    fam3 = [0.0]
    for n in range(1, N - 1):
        fam3.append(abs(f[n] * np.conj(h[n]) - np.conj(h[n - 1]) * f[n + 1]))
    return RelationResiduals(float(max(fam1)), float(max(fam2)), float(max(fam3)))


@dataclass(frozen=True)
class AnalysisReport:
    irreducible: bool
    first_reducible_index: int | None
    band: BandProfile
    normality: NormalityResult | None
    three_term: ThreeTermForm | None = None
    relations: RelationResiduals | None = None
    rejection_reason: dict | None = None

    @property
    def is_rr(self) -> bool:
        return self.band.is_rr

    @property
    def formally_normal(self) -> bool:
        return self.normality is not None and self.normality.formally_normal

    @property
    def decomposable(self) -> bool:
        return self.three_term is not None


def analyze(table: RecurrenceTable, tol: float = DEFAULT_TOL,
            width: int | None = None) -> AnalysisReport:
    """Run every structural check and collect verdicts, residuals and the decomposition."""
    irr = check_irreducible(table, tol)
    band = band_profile(table, width)
    normality = None
    reason = None
    if band.is_rr:
        try:
            normality = check_formal_normality(table, tol, width)
        except AnalysisError as exc:
            reason = {"relation": "truncation-region", "index": None,
                      "residual": None, "message": str(exc)}
    else:
        reason = {"relation": "band-limited", "index": None, "residual": None,
                  "message": f"max row length {band.max_length} exceeds width {band.width}"}
    form = relations = None
    if reason is None:
        try:
            form = decompose(table, tol, width)
        except DecompositionError as exc:
            reason = exc.to_dict()
        else:
            relations = verify_normality_relations(table)
    return AnalysisReport(irreducible=irr.irreducible, first_reducible_index=irr.first_failure,
                          band=band, normality=normality, three_term=form,
                          relations=relations, rejection_reason=reason)
