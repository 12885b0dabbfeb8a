"""Radial harmonic analysis on the (d+1)-regular tree.

Spectral parameter conventions: an eigenvalue ``lam`` of the normalised
adjacency operator T_d is tempered when ``|lam| <= 2`` and then
``lam = 2 cos(theta)`` with theta in [0, pi].  Untempered values carry
``r = arccosh(|lam| / 2)`` and the sign of ``lam``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .errors import DepthTooSmall, NOddError, OracleInconsistency

__all__ = [
    "SpectralPoint",
    "RadialKernel",
    "chebyshev_first",
    "chebyshev_second",
    "chebyshev_first_coefficients",
    "spherical_function",
    "plancherel_moment",
    "plancherel_density",
    "plancherel_integral",
    "spherical_transform",
    "lemma1_kernel_value",
    "lemma1_kernel",
    "lemma1_oracle",
    "truncated_tree",
]

CLAMP = 1e-12


@dataclass(frozen=True)
class SpectralPoint:
    """An eigenvalue of T_d together with its angular parametrisation.

    ``theta`` is the real angle for tempered points and the hyperbolic
    parameter r (> 0) for untempered points; ``sign`` is the sign of
    ``lam`` (only meaningful when untempered).
    """

    lam: float
    theta: float
    tempered: bool
    sign: int = 1

    @classmethod
    def from_lambda(cls, lam: float, d: int | None = None, tol: float = 1e-9):
        lam = float(lam)
        if d is not None:
            top = (d + 1) / math.sqrt(d)
            if abs(lam) > top + tol:
                raise ValueError(f"lambda = {lam} outside [-{top}, {top}]")
        half = lam / 2.0
        if abs(half) <= 1.0:
            return cls(lam, math.acos(half), True, 1 if lam >= 0 else -1)
        if abs(half) <= 1.0 + CLAMP:
            half = math.copysign(1.0, half)
            return cls(lam, math.acos(half), True, int(half))
        return cls(lam, math.acosh(abs(half)), False, 1 if lam > 0 else -1)

    @classmethod
    def from_theta(cls, theta: float):
        return cls(2.0 * math.cos(theta), float(theta), True, 1 if theta <= math.pi / 2 else -1)

    @property
    def x(self) -> float:
        """Argument of the Chebyshev polynomials, ``lam / 2``."""
        return self.lam / 2.0


def _as_x(p):
    if isinstance(p, SpectralPoint):
        return p.x
    x = np.asarray(p, dtype=float) / 2.0
    return x if x.ndim else float(x)


def chebyshev_first(n: int, x):
    """P_n(x) by the three-term recurrence (valid for any real x)."""
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), x.copy()
    if n == 0:
        return prev if prev.ndim else float(prev)
    for _ in range(n - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur if cur.ndim else float(cur)


def chebyshev_second(n: int, x):
    """Q_n(x) by recurrence; Q_n(+-1) = (n+1)(+-1)^n falls out exactly."""
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), 2.0 * x
    if n == 0:
        return prev if prev.ndim else float(prev)
    for _ in range(n - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur if cur.ndim else float(cur)


def chebyshev_first_coefficients(n: int) -> list[int]:
    """Integer monomial coefficients of P_n, lowest degree first."""
    prev, cur = [1], [0, 1]
    if n == 0:
        return prev
    for _ in range(n - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


def spherical_function(d: int, p, dist):
    """phi_lambda at tree distance ``dist`` (``p`` is a SpectralPoint or lambda).

    Vectorised over ``dist`` or over an array of lambda values, not both.

    phi(n) = d^{-n/2} (2/(d+1) P_n(lam/2) + (d-1)/(d+1) Q_n(lam/2))
    """
    x = _as_x(p)
    dist = np.asarray(dist)
    if dist.ndim:
        return np.array([spherical_function(d, p, int(k)) for k in dist])
    n = int(dist)
    return d ** (-n / 2.0) * (
        2.0 / (d + 1) * chebyshev_first(n, x) + (d - 1) / (d + 1) * chebyshev_second(n, x)
    )


def plancherel_moment(d: int, n: int, exact: bool = False):
    """Integral of cos(2 n theta) against the Plancherel measure."""
    if n == 0:
        return Fraction(1) if exact else 1.0
    val = Fraction(1 - d, 2 * d**n)
    return val if exact else float(val)


def plancherel_density(d: int, theta):
    """Density of the Plancherel measure in the angle variable.

    Summing the cosine series (1/pi)[1 + sum_n (1-d) d^{-n} cos 2n theta]
    in closed form gives 2d(d+1) sin^2 / (pi ((d+1)^2 - 4d cos^2)).
    """
    theta = np.asarray(theta, dtype=float)
    s, c = np.sin(theta), np.cos(theta)
    return 2.0 * d * (d + 1) * s * s / (math.pi * ((d + 1) ** 2 - 4.0 * d * c * c))


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def plancherel_integral(d: int, f, nodes: int = 1024) -> float:
    """Gauss-Legendre quadrature of ``f(theta)`` against dm over [0, pi]."""
    if nodes not in _GL_CACHE:
        t, w = np.polynomial.legendre.leggauss(nodes)
        _GL_CACHE[nodes] = ((t + 1.0) * math.pi / 2.0, w * math.pi / 2.0)
    theta, weights = _GL_CACHE[nodes]
    return float(np.sum(weights * plancherel_density(d, theta) * f(theta)))


@dataclass(frozen=True)
class RadialKernel:
    """Finitely supported radial function on the tree.

    ``radial_values[n]`` is the value at distance n.  When present,
    ``chebyshev_coefficients[j]`` is the coefficient of cos(j theta) in the
    spherical transform h(2 cos theta).
    """

    d: int
    radial_values: tuple[float, ...]
    chebyshev_coefficients: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "radial_values", tuple(float(v) for v in self.radial_values))
        if self.chebyshev_coefficients is not None:
            object.__setattr__(
                self,
                "chebyshev_coefficients",
                tuple(float(c) for c in self.chebyshev_coefficients),
            )

    @property
    def support_radius(self) -> int:
        nz = [i for i, v in enumerate(self.radial_values) if v != 0.0]
        return nz[-1] if nz else 0

    def transform(self, p):
        return spherical_transform(self, p)

    def series_transform(self, theta):
        """Evaluate the cosine series at angle(s) ``theta``."""
        if self.chebyshev_coefficients is None:
            raise ValueError("kernel has no cosine-series representation")
        theta = np.asarray(theta, dtype=float)
        j = np.arange(len(self.chebyshev_coefficients))
        return np.cos(np.multiply.outer(theta, j)) @ np.array(self.chebyshev_coefficients)

    def consistency_error(self, thetas) -> float:
        """Max gap between the radial-sum and cosine-series transforms."""
        thetas = np.asarray(thetas, dtype=float)
        radial = np.array([spherical_transform(self, 2.0 * math.cos(t)) for t in thetas])
        return float(np.max(np.abs(radial - self.series_transform(thetas))))

    def to_dict(self):
        out = {"d": self.d, "radial_values": list(self.radial_values)}
        if self.chebyshev_coefficients is not None:
            out["chebyshev_coefficients"] = list(self.chebyshev_coefficients)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        coeffs = data.get("chebyshev_coefficients")
        return cls(int(data["d"]), tuple(data["radial_values"]),
                   None if coeffs is None else tuple(coeffs))

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))


def spherical_transform(kern: RadialKernel, p) -> float:
    """h_k(lam) = k(0) + (d+1) sum_{n>=1} d^{n-1} k(n) phi_lam(n)."""
    d = kern.d
    vals = kern.radial_values
    total = vals[0] if vals else 0.0
    for n in range(1, len(vals)):
        if vals[n] != 0.0:
            total += (d + 1) * d ** (n - 1) * vals[n] * spherical_function(d, p, n)
    return float(total)


def _check_even(n: int):
    if n < 2 or n % 2:
        raise NOddError(f"n must be a positive even integer, got {n}")


def lemma1_kernel_value(d: int, n: int, dist: int, exact: bool = False):
    """Value of P_n(T_d/2) delta_0 at tree distance ``dist`` (closed form)."""
    _check_even(n)
    half = d ** (n // 2)
    if dist % 2 or dist > n:
        val = Fraction(0)
    elif dist < n:
        val = Fraction(1 - d, 2 * half)
    else:
        val = Fraction(1, 2 * half)
    return val if exact else float(val)


def lemma1_kernel(d: int, n: int) -> RadialKernel:
    """Radial kernel of P_n(T_d/2); its transform is cos(n theta)."""
    coeffs = [0.0] * (n + 1)
    coeffs[n] = 1.0
    return RadialKernel(d, tuple(lemma1_kernel_value(d, n, k) for k in range(n + 1)), tuple(coeffs))


def truncated_tree(d: int, depth: int):
    """Rooted (d+1)-regular tree cut at ``depth``.

    Returns ``(adjacency, levels)`` where vertex 0 is the root and
    ``levels[x]`` is the distance of x from the root.
    """
    parents = [-1]
    levels = [0]
    frontier = [0]
    for level in range(1, depth + 1):
        nxt = []
        for x in frontier:
            for _ in range(d + 1 if x == 0 else d):
                parents.append(x)
                levels.append(level)
                nxt.append(len(parents) - 1)
        frontier = nxt
    size = len(parents)
    child = np.arange(1, size)
    par = np.array(parents[1:], dtype=np.int64)
    rows = np.concatenate([child, par])
    cols = np.concatenate([par, child])
    A = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(size, size))
    return A, np.array(levels, dtype=np.int64)


def _tree_size(d: int, depth: int) -> int:
    return 1 + (d + 1) * (d**depth - 1) // (d - 1)


def _oracle_tree(d: int, n: int, depth: int) -> dict[int, float]:
    A, levels = truncated_tree(d, depth)
    T = A / math.sqrt(d)
    prev = np.zeros(A.shape[0])
    prev[0] = 1.0
    cur = 0.5 * (T @ prev)
    for _ in range(n - 1):
        prev, cur = cur, T @ cur - prev
    out = {}
    for k in range(depth + 1):
        vals = cur[levels == k]
        if vals.max() - vals.min() > 1e-12 * max(1.0, np.abs(vals).max()):
            raise OracleInconsistency(f"values at distance {k} are not constant")
        out[k] = float(vals[0])
    return out


def _oracle_quotient(d: int, n: int, depth: int) -> dict[int, Fraction]:
    # Walk counts per vertex, one entry per level; the root has d+1 children,
    # other vertices d, and the last level none.
    coeffs = chebyshev_first_coefficients(n)
    counts = [0] * (depth + 1)
    counts[0] = 1
    result = [Fraction(0)] * (depth + 1)
    for k, c in enumerate(coeffs):
        if k:
            new = [0] * (depth + 1)
            new[0] = (d + 1) * counts[1]
            for lvl in range(1, depth + 1):
                new[lvl] = counts[lvl - 1] + (d * counts[lvl + 1] if lvl < depth else 0)
            counts = new
        if c:
            # (A / (2 sqrt d))^k with k even for even n
            scale = Fraction(c, 2**k * d ** (k // 2))
            for lvl in range(depth + 1):
                result[lvl] += scale * counts[lvl]
    return dict(enumerate(result))


def lemma1_oracle(d: int, n: int, depth: int, method: str = "auto",
                  max_vertices: int = 500_000) -> dict:
    """P_n(T_d/2) delta_root computed on an explicitly truncated tree.

    ``method="tree"`` builds the sparse adjacency matrix of the depth-cut
    tree and runs the Chebyshev recurrence on it.  ``method="quotient"``
    pushes exact integer walk counts through the distance-level quotient
    and returns Fractions.  ``"auto"`` uses the explicit tree when it has
    at most ``max_vertices`` vertices.
    """
    _check_even(n)
    if depth <= n:
        raise DepthTooSmall(f"depth {depth} must exceed n = {n}")
    if method == "auto":
        method = "tree" if _tree_size(d, depth) <= max_vertices else "quotient"
    if method == "tree":
        return _oracle_tree(d, n, depth)
    if method == "quotient":
        return _oracle_quotient(d, n, depth)
    raise ValueError(f"unknown method {method!r}")

