"""Built-in recurrence families."""
from __future__ import annotations

import cmath
import math
from typing import Callable

import numpy as np

from .core import RecurrenceTable
from .structure import ThreeTermForm, form_table, symmetric_table


def monomial(rows: int) -> RecurrenceTable:
    """``P_n = z**n``: ``d[i, n] = delta(i, n+1)``."""
    return RecurrenceTable.from_rows((n + 1, (1.0,)) for n in range(rows))


def scaled_monomial(rows: int) -> RecurrenceTable:
    """The sequence ``1, 2z, z**2, 2z**3, ...``: ``d[n+1, n] = 2**((-1)**(n+1))``."""
    return RecurrenceTable.from_rows((n + 1, (2.0 ** ((-1) ** (n + 1)),)) for n in range(rows))


def chebyshev_form(rows: int) -> ThreeTermForm:
    """Orthonormal Chebyshev polynomials of the first kind on ``[-1, 1]``."""
    c = [1 / math.sqrt(2)] + [0.5] * (rows - 1)
    return ThreeTermForm(b=0, a=1, c=c[:rows], d=[0.0] * rows)


def hermite_form(rows: int) -> ThreeTermForm:
    """Orthonormal Hermite polynomials for the weight ``exp(-x**2) / sqrt(pi)``."""
    return ThreeTermForm(b=0, a=1, c=[math.sqrt((n + 1) / 2) for n in range(rows)],
                         d=[0.0] * rows)


def fast_growth_form(rows: int, power: float = 4.0) -> ThreeTermForm:
    """Jacobi coefficients ``c_n = (n+1)**power``.

    For ``power > 1`` the partial sums of ``|P_n(z)|**2`` off the real line
    settle numerically; a heuristic exhibit, not a certified indeterminate case.
    """
    return ThreeTermForm(b=0, a=1, c=[(n + 1.0) ** power for n in range(rows)],
                         d=[0.0] * rows)


def chebyshev(rows: int) -> RecurrenceTable:
    return symmetric_table(chebyshev_form(rows))


def hermite(rows: int) -> RecurrenceTable:
    return symmetric_table(hermite_form(rows))


def fast_growth(rows: int, power: float = 4.0) -> RecurrenceTable:
    return symmetric_table(fast_growth_form(rows, power))


def rotated(form: ThreeTermForm, a: complex, b: complex) -> ThreeTermForm:
    return ThreeTermForm(b=b, a=a, c=form.c, d=form.d)


def _unimodular(a=None, a_arg=None) -> complex:
    if a_arg is not None:
        return cmath.exp(1j * float(a_arg))
    if a is None:
        return 1 + 0j
    a = complex(a)
    return a / abs(a)


def rotated_chebyshev(rows: int, a=None, b=0, a_arg=None) -> RecurrenceTable:
    return form_table(rotated(chebyshev_form(rows), _unimodular(a, a_arg), complex(b)))


def rotated_hermite(rows: int, a=None, b=0, a_arg=None) -> RecurrenceTable:
    return form_table(rotated(hermite_form(rows), _unimodular(a, a_arg), complex(b)))


FAMILIES: dict[str, Callable[..., RecurrenceTable]] = {
    "monomial": monomial,
    "scaled-monomial": scaled_monomial,
    "chebyshev": chebyshev,
    "hermite": hermite,
    "rotated-chebyshev": rotated_chebyshev,
    "rotated-hermite": rotated_hermite,
    "fast-growth": fast_growth,
}

# Families whose sequences admit an orthonormalizing measure.
DECOMPOSABLE = ("chebyshev", "hermite", "rotated-chebyshev", "rotated-hermite", "fast-growth")
# Sequences with no orthonormalizing measure on the plane.
COUNTEREXAMPLES = ("monomial", "scaled-monomial")


def make(name: str, rows: int, **params) -> RecurrenceTable:
    """Build a named family; unknown names raise :class:`KeyError`."""
    try:
        factory = FAMILIES[name]
    except KeyError:
        raise KeyError(f"unknown family {name!r}; known: {', '.join(FAMILIES)}") from None
    if rows < 1:
        raise ValueError("rows must be positive")
    return factory(rows, **params)


def random_symmetric_form(rng: np.random.Generator, rows: int) -> ThreeTermForm:
    """Random real Jacobi data with ``|c_n|`` in ``[0.2, 2]`` and ``d_n`` in ``[-1, 1]``."""
    mags = rng.uniform(0.2, 2.0, rows)
    phases = np.exp(1j * rng.uniform(-np.pi, np.pi, rows))
    return ThreeTermForm(b=0, a=1, c=mags * phases, d=rng.uniform(-1, 1, rows))
