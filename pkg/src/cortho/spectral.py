"""Discrete measures from finite sections of the Jacobi part.

For ``D = b + a J`` the ``N``-point Gauss measure has nodes ``b + a lambda_k``,
where ``lambda_k`` are the eigenvalues of the leading ``N x N`` block ``J_N``,
and weights ``v_k[0]**2`` from the unit eigenvectors. Since ``P_0`` is the
first basis vector, ``sum_k v_k[0]**2 delta(lambda_k)`` is the spectral
measure of ``J_N`` seen from ``P_0``, the finite-section counterpart of
``<P_0, E(.) P_0>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RecurrenceTable, eval_sequence
from .structure import ThreeTermForm

EPS = np.finfo(float).eps


class ConvergenceError(RuntimeError):
    def __init__(self, index: int, sweeps: int):
        super().__init__(f"eigenvalue {index} did not converge in {sweeps} sweeps")
        self.index = index


@dataclass(frozen=True)
class Tridiagonal:
    """Real symmetric tridiagonal matrix with positive off-diagonal."""

    diag: tuple[float, ...]
    offdiag: tuple[float, ...]

    def __post_init__(self):
        diag = tuple(float(x) for x in self.diag)
        off = tuple(float(x) for x in self.offdiag)
        if not diag:
            raise ValueError("empty matrix")
        if len(off) != len(diag) - 1:
            raise ValueError(f"offdiag needs {len(diag) - 1} entries, got {len(off)}")
        if any(not x > 0 for x in off):
            raise ValueError("off-diagonal entries must be strictly positive")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)

    @property
    def size(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        return (np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1))

    def norm_inf(self) -> float:
        d = np.abs(self.diag)
        e = np.abs(np.r_[self.offdiag, 0.0]) + np.abs(np.r_[0.0, self.offdiag])
        return float(np.max(d + e))


def truncate_jacobi(form: ThreeTermForm, n: int) -> Tridiagonal:
    """Leading ``n x n`` section of ``J`` with off-diagonal phases removed."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > len(form):
        raise ValueError(f"form has {len(form)} coefficients, {n} requested")
    return Tridiagonal(form.d[:n], tuple(abs(c) for c in form.c[: n - 1]))


def _tql(d: np.ndarray, e: np.ndarray, z: np.ndarray, max_sweeps: int) -> None:
    # Implicit QL with Wilkinson-type shift; d, e, z modified in place.
    # e[i] couples i and i+1, e[-1] is scratch.
    n = len(d)
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            if sweeps == max_sweeps:
                raise ConvergenceError(l, max_sweeps)
            sweeps += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                z[:, i] = c * zi - s * z[:, i + 1]
                z[:, i + 1] = s * zi + c * z[:, i + 1]
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0


def eig_tridiagonal(T: Tridiagonal, tol: float = 1e-12, max_sweeps: int = 40,
                    return_vectors: bool = False):
    """Eigenvalues (ascending) and first eigenvector components of ``T``.

    First components are returned non-negative. Each eigenpair is checked
    against ``||T v - lambda v|| <= tol * ||T||_inf``.
    """
    n = T.size
    d = np.array(T.diag, dtype=float)
    e = np.r_[np.array(T.offdiag, dtype=float), 0.0]
    Z = np.eye(n)
    _tql(d, e, Z, max_sweeps)
    order = np.argsort(d, kind="stable")
    lam = d[order]
    Z = Z[:, order]
    Z *= np.where(Z[0] < 0, -1.0, 1.0)
    A = T.to_dense()
    scale = max(T.norm_inf(), np.finfo(float).tiny)
    res = np.linalg.norm(A @ Z - Z * lam, axis=0)
    bad = np.flatnonzero(res > tol * scale)
    if bad.size:
        raise ConvergenceError(int(bad[0]), max_sweeps)
    if return_vectors:
        return lam, Z[0].copy(), Z
    return lam, Z[0].copy()


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many weighted atoms on the line ``b + a R``."""

    nodes: tuple[complex, ...]
    weights: tuple[float, ...]
    a: complex = 1
    b: complex = 0

    def __post_init__(self):
        nodes = tuple(complex(x) for x in self.nodes)
        weights = tuple(float(w) for w in self.weights)
        if len(nodes) != len(weights) or not nodes:
            raise ValueError("nodes and weights must be non-empty and of equal length")
        if any(not w > 0 for w in weights):
            raise ValueError("weights must be positive")
        if abs(math.fsum(weights) - 1) > 1e-12:
            raise ValueError(f"weights sum to {math.fsum(weights)!r}, not 1")
        a, b = complex(self.a), complex(self.b)
        if abs(abs(a) - 1) > 1e-12:
            raise ValueError("line direction must be unimodular")
        t = np.conj(a) * (np.array(nodes) - b)
        if np.max(np.abs(t.imag)) > 1e-10:
            raise ValueError("nodes are not on the line b + a R")
        if np.any(np.diff(t.real) <= 0):
            raise ValueError("nodes must be strictly increasing along the line")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def line_parameters(self) -> np.ndarray:
        return (np.conj(self.a) * (np.array(self.nodes) - self.b)).real

    def line_residual(self) -> float:
        """Largest distance of a node from the carrier line."""
        return float(np.max(np.abs((np.conj(self.a) * (np.array(self.nodes) - self.b)).imag)))

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "nodes": list(self.nodes),
                "weights": list(self.weights)}


def gauss_measure(form: ThreeTermForm, n: int, tol: float = 1e-12) -> DiscreteMeasure:
    """``n``-point Gauss measure of a decomposed sequence."""
    lam, v0 = eig_tridiagonal(truncate_jacobi(form, n), tol)
    return DiscreteMeasure(nodes=tuple(form.point(lam)), weights=tuple(v0 ** 2),
                           a=form.a, b=form.b)


def gram_matrix(table: RecurrenceTable, mu: DiscreteMeasure, m: int) -> np.ndarray:
    """``G[j, k] = sum_i w_i conj(P_j(x_i)) P_k(x_i)`` for ``j, k < m``."""
    P = eval_sequence(table, np.array(mu.nodes), m)
    return (P.conj() * np.array(mu.weights)) @ P.T


def verify_orthonormality(table: RecurrenceTable, mu: DiscreteMeasure, m: int) -> float:
    """Largest deviation of the ``m x m`` Gram matrix under ``mu`` from the identity.

    An ``N``-point Gauss measure integrates degree ``<= 2N - 1`` exactly, so for
    ``m <= N`` the residual is rounding error only.
    """
    if m > len(mu):
        raise ValueError(f"m = {m} exceeds the {len(mu)} nodes of the measure")
    G = gram_matrix(table, mu, m)
    return float(np.max(np.abs(G - np.eye(m))))


def moments(mu: DiscreteMeasure, k_max: int) -> np.ndarray:
    """``m_k = sum_j w_j x_j**k`` for ``k = 0..k_max``."""
    x = np.array(mu.nodes)
    w = np.array(mu.weights)
    return np.array([np.sum(w * x ** k) for k in range(k_max + 1)], dtype=complex)
