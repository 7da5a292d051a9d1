"""Partial-sum diagnostics for uniqueness of the orthonormalizing measure.

The measure of a decomposable sequence is unique exactly when
``sum_n |P_n(z)|**2`` diverges at a point ``z`` off the carrier line. Only
partial sums ``S_N`` are computable, so the verdict here is a heuristic with
an explicit ``inconclusive`` outcome.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import InsufficientTableError, RecurrenceTable, TableError
from .structure import DEFAULT_TOL, ThreeTermForm, decompose, form_table

UNIQUE = "unique-likely"
NON_UNIQUE = "non-unique-likely"
INCONCLUSIVE = "inconclusive"

DEFAULT_SCHEDULE = (25, 50, 100, 200)
ON_LINE_DISTANCE = 1e-8
CAVEAT = ("divergence of an infinite series is not decidable from finitely many "
          "terms; the verdict extrapolates the observed partial sums")

_RESCALE_AT = 1e150


def log_partial_mass(table: RecurrenceTable, z: complex, n: int) -> float:
    """Natural log of ``S_N(z) = sum_{k<N} |P_k(z)|**2``.

    Values are rescaled by a common factor whenever they exceed ``1e150``,
    which the linear recurrence permits; the scale is tracked in log form.
    """
    if n < 1:
        raise ValueError("N must be at least 1")
    if n > table.num_rows + 1:
        raise InsufficientTableError(f"S_{n} needs {n - 1} rows, table has {table.num_rows}")
    z = complex(z)
    P = np.zeros(n, dtype=complex)
    P[0] = 1.0
    log_scale = 0.0  # true P_k = P[k] * exp(log_scale)
    acc = 1.0
    for k in range(n - 1):
        r, row = table.firsts[k], table.coeffs[k]
        if row[-1] == 0:
            raise TableError("d[n+1, n] vanishes", k)
        val = z * P[k] - np.dot(row[:-1], P[r:k + 1])
        val /= row[-1]
        mag = abs(val)
        if mag > _RESCALE_AT:
            P[: k + 1] /= mag
            acc /= mag * mag
            log_scale += math.log(mag)
            val /= mag
        P[k + 1] = val
        acc += abs(val) ** 2
    return math.log(acc) + 2.0 * log_scale


def partial_mass(table: RecurrenceTable, z: complex, n: int) -> float:
    """``S_N(z)``; ``inf`` when it exceeds the float range (use :func:`log_partial_mass`)."""
    lg = log_partial_mass(table, z, n)
    return math.exp(lg) if lg < 709.0 else math.inf


@dataclass(frozen=True)
class DeterminacyReport:
    test_point: complex
    schedule: tuple[int, ...]
    log_partial_sums: tuple[float, ...]
    ratios: tuple[float, ...]
    growth_rate: float
    verdict: str
    off_line_distance: float
    reason: str
    line: tuple[complex, complex]

    @property
    def partial_sums(self) -> tuple[float, ...]:
        return tuple(math.exp(x) if x < 709.0 else math.inf for x in self.log_partial_sums)

    def to_dict(self) -> dict:
        return {"test_point": self.test_point, "line": {"a": self.line[0], "b": self.line[1]},
                "off_line_distance": self.off_line_distance,
                "schedule": list(self.schedule), "partial_sums": list(self.partial_sums),
                "log_partial_sums": list(self.log_partial_sums), "ratios": list(self.ratios),
                "growth_rate": self.growth_rate, "verdict": self.verdict,
                "reason": self.reason, "caveat": CAVEAT}


def auto_test_point(form: ThreeTermForm) -> complex:
    """Point at unit distance from the line above the median diagonal entry."""
    return complex(form.b + form.a * (float(np.median(form.d)) + 1j))


def classify_determinacy(source: RecurrenceTable | ThreeTermForm, z: complex | None = None,
                         schedule: Sequence[int] = DEFAULT_SCHEDULE,
                         ratio_threshold: float = 4.0, stabilization_tol: float = 1e-6,
                         tol: float = DEFAULT_TOL) -> DeterminacyReport:
    """Classify uniqueness of the orthonormalizing measure from partial sums.

    ``unique-likely`` if every consecutive ratio ``S_{N'}/S_N`` along the
    schedule is at least ``ratio_threshold``; ``non-unique-likely`` if the last
    relative increment is at most ``stabilization_tol``; otherwise, or when
    ``z`` lies on the carrier line, ``inconclusive``.
    """
    schedule = tuple(int(n) for n in schedule)
    if len(schedule) < 2 or any(b <= a for a, b in zip(schedule, schedule[1:])) or schedule[0] < 1:
        raise ValueError("schedule must be a strictly increasing sequence of at least two sizes")
    if isinstance(source, ThreeTermForm):
        form = source
        if len(form) < schedule[-1] - 1:
            raise InsufficientTableError(
                f"schedule needs {schedule[-1] - 1} coefficients, form has {len(form)}")
        table = form_table(form)
    else:
        table = source
        if table.num_rows + 1 < schedule[-1]:
            raise InsufficientTableError(
                f"schedule needs {schedule[-1] - 1} rows, table has {table.num_rows}")
        form = decompose(table, tol)
    if z is None:
        z = auto_test_point(form)
    z = complex(z)
    dist = float(abs(form.line_parameter(z).imag))
    line = (form.a, form.b)
    if dist <= ON_LINE_DISTANCE:
        return DeterminacyReport(test_point=z, schedule=schedule, log_partial_sums=(),
                                 ratios=(), growth_rate=math.nan, verdict=INCONCLUSIVE,
                                 off_line_distance=dist, line=line,
                                 reason=f"test point lies on the carrier line "
                                        f"(distance {dist:.3g} <= {ON_LINE_DISTANCE:g})")
    logs = tuple(log_partial_mass(table, z, n) for n in schedule)
    log_ratios = np.diff(logs)
    ratios = tuple(float(math.exp(x)) if x < 709.0 else math.inf for x in log_ratios)
    growth = float(np.polyfit(schedule, logs, 1)[0])
    last_increment = math.expm1(log_ratios[-1])
    if all(x >= math.log(ratio_threshold) for x in log_ratios):
        verdict = UNIQUE
        reason = f"S_N grows by a factor >= {ratio_threshold:g} at every step of the schedule"
    elif last_increment <= stabilization_tol:
        verdict = NON_UNIQUE
        reason = f"S_N stabilized: relative increment {last_increment:.3g} <= {stabilization_tol:g}"
    else:
        verdict = INCONCLUSIVE
        reason = "S_N neither grows geometrically along the schedule nor stabilizes"
    return DeterminacyReport(test_point=z, schedule=schedule, log_partial_sums=logs,
                             ratios=ratios, growth_rate=growth, verdict=verdict,
                             off_line_distance=dist, reason=reason, line=line)
