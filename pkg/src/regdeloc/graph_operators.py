"""T_d, sphere operators and Chebyshev polynomials of T_d on a finite graph.

The sphere operator S_n is realised through non-backtracking walk counts:
A_0 = I, A_1 = A, A_2 = A^2 - (d+1) I, A_{m+1} = A A_m - d A_{m-1}, and
S_m = d^{-m/2} A_m.  On the tree this is the distance-sphere sum; on a
graph it is its projection.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _accel
from .errors import NOddError, UnsupportedExponent
from .graph_core import RegularGraph

__all__ = [
    "build_t_operator",
    "SphereOperatorFamily",
    "build_sphere_family",
    "apply_chebyshev_of_t",
    "chebyshev_series_of_t",
    "chebyshev_matrix_of_t",
    "corollary1_rhs",
    "corollary1_decomposition_check",
    "corollary1_constant",
    "NormEstimate",
    "matrix_norm",
    "sphere_norm",
    "ConditionFit",
    "fit_condition",
    "certify",
]


def build_t_operator(g: RegularGraph, sparse: bool = False):
    """Normalised adjacency T_d = A / sqrt(d)."""
    A = g.adjacency(sparse=True) / math.sqrt(g.d)
    return A if sparse else A.toarray()


@dataclass(frozen=True, eq=False)
class SphereOperatorFamily:
    graph: RegularGraph
    max_n: int
    walk_counts: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def d(self) -> int:
        return self.graph.d

    def __getitem__(self, n: int) -> np.ndarray:
        """S_n as a dense matrix."""
        return self.walk_counts[n] * self.d ** (-n / 2.0)

    @property
    def matrices(self) -> list[np.ndarray]:
        return [self[n] for n in range(self.max_n + 1)]

    def norms(self, p: float = 1.0) -> list[float]:
        return [sphere_norm(self, n, p).value for n in range(self.max_n + 1)]


def build_sphere_family(g: RegularGraph, max_n: int) -> SphereOperatorFamily:
    """Non-backtracking walk-count matrices A_0..A_max_n (held dense)."""
    g.require_simple()
    n, d = g.vertex_count, g.d
    A = g.adjacency(sparse=True)
    counts = [np.eye(n)]
    if max_n >= 1:
        counts.append(A.toarray())
    if max_n >= 2:
        counts.append(A @ counts[1] - (d + 1) * counts[0])
    for m in range(2, max_n):
        counts.append(A @ counts[m] - d * counts[m - 1])
    for c in counts:
        c.setflags(write=False)
    return SphereOperatorFamily(g, max_n, tuple(counts))


def chebyshev_series_of_t(g: RegularGraph, coeffs, v) -> np.ndarray:
    """sum_m coeffs[m] P_m(T_d / 2) v, matrix-free."""
    return _accel.chebyshev_sweep(g.neighbors, 1.0 / math.sqrt(g.d), v, coeffs)


def apply_chebyshev_of_t(g: RegularGraph, n: int, v) -> np.ndarray:
    """P_n(T_d / 2) v via w_{m+1} = T_d w_m - w_{m-1}."""
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    return chebyshev_series_of_t(g, coeffs, v)


def chebyshev_matrix_of_t(g: RegularGraph, n: int) -> np.ndarray:
    return apply_chebyshev_of_t(g, n, np.eye(g.vertex_count))


def corollary1_rhs(fam: SphereOperatorFamily, n: int) -> np.ndarray:
    """sum_{j<n/2} (1-d)/(2 d^{n/2}) d^j S_{2j} + S_n / 2."""
    if n < 2 or n % 2:
        raise NOddError(f"n must be a positive even integer, got {n}")
    d = fam.d
    coef = (1 - d) / (2.0 * d ** (n // 2))
    out = 0.5 * fam[n]
    for j in range(n // 2):
        out = out + coef * d**j * fam[2 * j]
    return out


def corollary1_decomposition_check(g: RegularGraph, n: int,
                                   fam: SphereOperatorFamily | None = None) -> float:
    """Max entrywise gap between P_n(T_d/2) and its sphere-operator expansion."""
    if fam is None or fam.max_n < n:
        fam = build_sphere_family(g, n)
    lhs = chebyshev_matrix_of_t(g, n)
    return float(np.max(np.abs(lhs - corollary1_rhs(fam, n))))


def corollary1_constant(d: int, alpha: float, n: int) -> float:
    """Explicit c with ||P_n(T_d/2)|| <= c C d^{-alpha n} under condition (2).

    From ||P_n|| <= d^{1-n/2} sum_{j=0}^{n/2} d^j ||S_2j||, bounding each
    ||S_2j|| by C d^{-2 alpha j} and reindexing i = n/2 - j.
    """
    return d * sum(d ** (-(1.0 - 2.0 * alpha) * i) for i in range(n // 2 + 1))


class NormEstimate(NamedTuple):
    value: float
    p: float
    q: float
    exact: bool


def _conjugate(p: float) -> float:
    return math.inf if p == 1 else p / (p - 1.0)


def matrix_norm(M: np.ndarray, p: float = 1.0) -> NormEstimate:
    """L^p -> L^q norm of a symmetric matrix, q the conjugate exponent.

    Exact for p = 1 (max |entry|) and p = 2 (spectral norm).  For 1 < p < 2
    the Riesz-Thorin bound ||M||_{1->inf}^{2/p-1} ||M||_{2->2}^{2-2/p} is
    returned with ``exact=False``.
    """
    if not 1.0 <= p <= 2.0:
        raise UnsupportedExponent(f"p = {p} outside [1, 2]")
    q = _conjugate(p)
    one = float(np.max(np.abs(M)))
    if p == 1.0:
        return NormEstimate(one, p, q, True)
    two = float(np.max(np.abs(np.linalg.eigvalsh(M))))
    if p == 2.0:
        return NormEstimate(two, p, q, True)
    return NormEstimate(one ** (2.0 / p - 1.0) * two ** (2.0 - 2.0 / p), p, q, False)


def sphere_norm(fam: SphereOperatorFamily, n: int, p: float = 1.0) -> NormEstimate:
    """||S_n||_{p -> q}; for p = 1 this is sup_x ||S_n delta_x||_inf."""
    return matrix_norm(fam[n], p)


@dataclass(frozen=True)
class ConditionFit:
    """Measured sphere-operator norms and the (C, alpha, N) they certify."""

    p: float
    per_n_norms: tuple[float, ...]
    C: float
    alpha: float
    N: int
    d: int
    exact: bool = True
    flags: tuple[str, ...] = ()

    @property
    def q(self) -> float:
        return _conjugate(self.p)

    def bound(self, n: int) -> float:
        return self.C * self.d ** (-self.alpha * n)

    def to_dict(self):
        return {
            "p": self.p,
            "per_n_norms": list(self.per_n_norms),
            "C": self.C,
            "alpha": self.alpha,
            "N": self.N,
            "exact": self.exact,
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _admissible(norms, d, C, alpha, rtol=1e-12) -> int:
    N = 0
    for m in range(1, len(norms)):
        if norms[m] > C * d ** (-alpha * m) * (1.0 + rtol):
            break
        N = m
    return N


def fit_condition(fam: SphereOperatorFamily, p: float = 1.0, C: float | None = None,
                  alpha: float | None = None) -> ConditionFit:
    """Largest N with ||S_m||_{p->q} <= C d^{-alpha m} for all 1 <= m <= N.

    With ``C`` and ``alpha`` omitted, alpha is fitted by least squares to
    the log-norms for 1 <= m <= argmin of the norms, capped at 1/2, and C
    is the largest multiplier needed on that range.
    """
    d = fam.d
    ests = [sphere_norm(fam, m, p) for m in range(fam.max_n + 1)]
    norms = tuple(e.value for e in ests)
    exact = all(e.exact for e in ests)
    flags = []
    if C is not None or alpha is not None:
        C = 1.0 if C is None else float(C)
        alpha = 0.5 if alpha is None else float(alpha)
        N = _admissible(norms, d, C, alpha)
    else:
        # decaying range: up to the smallest measured norm
        stop = 1 + int(np.argmin(norms[1:])) if fam.max_n >= 1 else 0
        run = np.arange(1, stop + 1)
        if stop < 2:
            flags.append("no_decay")
            return ConditionFit(p, norms, 1.0, 0.0, 0, d, exact, tuple(flags))
        slope, _ = np.polyfit(run * math.log(d), np.log([norms[m] for m in run]), 1)
        alpha = float(-slope)
        if alpha > 0.5:
            alpha = 0.5
            flags.append("alpha_capped")
        C = max(1.0, max(norms[m] * d ** (alpha * m) for m in run))
        N = _admissible(norms, d, C, alpha)
    if N == fam.max_n:
        flags.append("N_capped_by_max_n")
    if N == 0:
        flags.append("no_decay")
    return ConditionFit(p, norms, float(C), float(alpha), N, d, exact, tuple(flags))


def certify(fam: SphereOperatorFamily, alpha: float, upto: int | None = None,
            p: float = 1.0) -> ConditionFit:
    """Smallest C making (C, alpha, N = upto) hold; always succeeds."""
    upto = fam.max_n if upto is None else upto
    d = fam.d
    norms = tuple(sphere_norm(fam, m, p).value for m in range(upto + 1))
    C = max(1.0, max(norms[m] * d ** (alpha * m) for m in range(1, upto + 1)))
    return ConditionFit(p, norms, C, float(alpha), upto, d, p in (1.0, 2.0), ("certified",))
