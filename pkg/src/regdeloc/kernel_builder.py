"""Fejér-amplified convolution kernels targeted at a spectral angle.

Recipe for a target angle theta0, mass threshold eps and radius N:

* M = floor(1/eps), R = ceil(N eps / 8)
* r <= R with |r theta0| < 2 pi / R (distances on the circle), by Dirichlet
* an even multiple r' = 2 l r in [R eps / 16, 2 R]
* spherical transform h(theta) = F_2M(r' theta) - 1
  = sum_{j=1}^{2M-1} (2M - j)/M cos(j r' theta)

The j = 2M coefficient of the order-2M Fejér kernel is zero, so the series
stops at 2M - 1.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from numpy.polynomial import chebyshev as npcheb

from .errors import DegenerateRange, SupportExceedsN
from .graph_core import RegularGraph
from .graph_operators import chebyshev_series_of_t, corollary1_constant, matrix_norm
from .tree_harmonics import RadialKernel, lemma1_kernel_value

__all__ = [
    "circle_distance",
    "dirichlet_approx",
    "continued_fraction_denominators",
    "select_even_multiple",
    "KernelRecipe",
    "build_recipe",
    "amplifying_recipe",
    "fejer_kernel",
    "fejer_transform",
    "kernel_eigenvalue",
    "radial_kernel",
    "KernelOperator",
    "build_kernel_operator",
    "lemma2_norm_bound",
    "log_top_eigenvalue",
]

TWO_PI = 2.0 * math.pi


def circle_distance(x):
    """Distance from ``x`` to the nearest integer multiple of 2 pi."""
    y = np.remainder(np.asarray(x, dtype=float), TWO_PI)
    out = np.minimum(y, TWO_PI - y)
    return out if out.ndim else float(out)


def continued_fraction_denominators(alpha: float, limit: int) -> list[int]:
    """Convergent denominators q_k <= limit of the exact binary value of alpha."""
    frac = Fraction(alpha) % 1
    qs = [1]
    q_prev, q = 0, 1
    while frac:
        frac = 1 / frac
        a = math.floor(frac)
        frac -= a
        q_prev, q = q, a * q + q_prev
        if q > limit:
            break
        qs.append(q)
    return sorted(set(qs))


def dirichlet_approx(theta0: float, R: int, method: str = "auto") -> int:
    """Smallest r in [1, R] with circle_distance(r theta0) < 2 pi / R.

    ``method="scan"`` checks every r; ``"cf"`` only checks convergent
    denominators of theta0 / (2 pi), which contain the smallest solution.
    ``"auto"`` scans up to R = 10**6 and uses continued fractions beyond.
    """
    if R < 1:
        raise DegenerateRange(f"R = {R} must be at least 1")
    tol = TWO_PI / R
    if method == "auto":
        method = "scan" if R <= 10**6 else "cf"
    if method == "cf":
        for q in continued_fraction_denominators(theta0 / TWO_PI, R):
            if circle_distance(q * theta0) < tol:
                return q
        method = "scan"
    if method != "scan":
        raise ValueError(f"unknown method {method!r}")
    r = np.arange(1, R + 1)
    hits = np.flatnonzero(circle_distance(r * theta0) < tol)
    # pigeonhole guarantees a hit; R itself is the fallback for rounding ties
    return int(r[hits[0]]) if hits.size else R


def select_even_multiple(r: int, R: int, epsilon: float) -> tuple[int, int]:
    """Pick l so that r' = 2 l r lies in [R eps / 16, 2 R].

    l = 1 when r >= R eps / 32; otherwise the smallest multiple of r that
    reaches R eps / 32 (it stays below R eps / 16 because r < R eps / 32).
    """
    if not 1 <= r <= R:
        raise DegenerateRange(f"need 1 <= r <= R, got r = {r}, R = {R}")
    lo = R * epsilon / 32.0
    l = 1 if r >= lo else math.ceil(lo / r)
    return l, 2 * l * r


@dataclass(frozen=True)
class KernelRecipe:
    theta0: float
    epsilon: float
    N: int
    M: int
    R: int
    r: int
    l: int
    r_prime: int
    flags: tuple[str, ...] = ()

    @property
    def support_radius(self) -> int:
        return (2 * self.M - 1) * self.r_prime

    @property
    def cosine_terms(self) -> list[tuple[int, float]]:
        """(frequency, coefficient) pairs j r', (2M - j)/M for j = 1..2M-1."""
        M = self.M
        return [(j * self.r_prime, (2 * M - j) / M) for j in range(1, 2 * M)]

    @property
    def chebyshev_coefficients(self) -> np.ndarray:
        """Dense coefficients c_m of sum_m c_m P_m, m = 0..support_radius."""
        c = np.zeros(self.support_radius + 1)
        for freq, coef in self.cosine_terms:
            c[freq] = coef
        return c

    @property
    def key(self) -> tuple[int, int]:
        """Recipes with equal keys define the same operator."""
        return (self.M, self.r_prime)

    def to_dict(self):
        return {
            "theta0": self.theta0,
            "epsilon": self.epsilon,
            "N": self.N,
            "M": self.M,
            "R": self.R,
            "r": self.r,
            "l": self.l,
            "r_prime": self.r_prime,
            "support_radius": self.support_radius,
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        return cls(float(data["theta0"]), float(data["epsilon"]), int(data["N"]),
                   int(data["M"]), int(data["R"]), int(data["r"]), int(data["l"]),
                   int(data["r_prime"]), tuple(data.get("flags", ())))


def build_recipe(theta0: float, epsilon: float, N: int, method: str = "auto") -> KernelRecipe:
    """Run the Dirichlet / even-multiple construction for ``theta0``.

    Flags record where the guarantees of the construction are not met:
    ``support_exceeds_N``, ``angle_bound_unmet`` (|r' theta0| > pi/(8M)),
    ``M_below_4`` and ``not_amplifying`` (h(theta0) <= 1/eps).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon = {epsilon} must lie in (0, 1)")
    if not -1e-12 <= theta0 <= math.pi + 1e-12:
        raise ValueError(f"theta0 = {theta0} outside [0, pi]")
    if N < 1:
        raise DegenerateRange(f"N = {N} must be positive")
    M = math.floor(1.0 / epsilon + 1e-12)
    R = max(1, math.ceil(N * epsilon / 8.0 - 1e-12))
    r = dirichlet_approx(theta0, R, method)
    l, r_prime = select_even_multiple(r, R, epsilon)
    recipe = KernelRecipe(float(theta0), float(epsilon), int(N), M, R, r, l, r_prime)
    flags = []
    if recipe.support_radius > N:
        flags.append("support_exceeds_N")
    if circle_distance(r_prime * theta0) > math.pi / (8 * M):
        flags.append("angle_bound_unmet")
    if M < 4:
        flags.append("M_below_4")
    if not fejer_transform(recipe, theta0) > 1.0 / epsilon:
        flags.append("not_amplifying")
    return replace(recipe, flags=tuple(flags))


def amplifying_recipe(theta0: float, epsilon: float, N_start: int,
                      N_max: int | None = None) -> KernelRecipe:
    """Smallest recipe (doubling N from ``N_start``) with h(theta0) > 1/eps.

    Stops at ``N_max`` (default ceil(256 / eps^2), where the construction's
    guarantees all hold) and returns the last recipe tried.
    """
    if N_max is None:
        N_max = math.ceil(256.0 / epsilon**2)
    N = max(1, int(N_start))
    while True:
        recipe = build_recipe(theta0, epsilon, min(N, N_max))
        if "not_amplifying" not in recipe.flags or N >= N_max:
            return recipe
        N *= 2


def fejer_kernel(n: int, x):
    """F_n(x) = (1/n) sin^2(n x / 2) / sin^2(x / 2), equal to n at x = 0 mod 2 pi."""
    # F_n is even and 2 pi periodic
    y = np.asarray(circle_distance(x))
    s = np.sin(y / 2.0)
    small = s < 1e-7
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.sin(n * y / 2.0) ** 2 / (n * s * s)
    val = np.where(small, n - n * (n * n - 1) * y * y / 12.0, val)
    return val if val.ndim else float(val)


def fejer_transform(recipe: KernelRecipe, theta, form: str = "series"):
    """h(theta) = F_2M(r' theta) - 1, by cosine series or closed form."""
    # reduce r' theta first; cos(j r' theta) at raw arguments ~1e4 loses ~1e-12
    x = np.remainder(recipe.r_prime * np.asarray(theta, dtype=float), TWO_PI)
    if form == "closed":
        out = np.asarray(fejer_kernel(2 * recipe.M, x)) - 1.0
    elif form == "series":
        M = recipe.M
        out = np.zeros_like(x)
        for j in range(1, 2 * M):
            out = out + (2 * M - j) / M * np.cos(j * x)
    else:
        raise ValueError(f"unknown form {form!r}")
    return out if out.ndim else float(out)


def kernel_eigenvalue(recipe: KernelRecipe, lam):
    """Eigenvalue of the kernel operator on a T_d-eigenfunction with eigenvalue lam.

    Evaluated as sum_j c_j P_{j r'}(lam / 2) by Clenshaw's recurrence, which
    covers the hyperbolic regime |lam| > 2 without complex angles.
    """
    x = np.asarray(lam, dtype=float) / 2.0
    out = npcheb.chebval(x, recipe.chebyshev_coefficients)
    return out if np.ndim(out) else float(out)


def log_top_eigenvalue(recipe: KernelRecipe, d: int) -> float:
    """Natural log of the kernel eigenvalue at the top of the spectrum (approx.)."""
    r_top = math.acosh((d + 1) / (2.0 * math.sqrt(d)))
    return recipe.support_radius * r_top


def radial_kernel(recipe: KernelRecipe, d: int) -> RadialKernel:
    """Tree kernel k_0 as radial values plus its cosine series."""
    values = [0.0] * (recipe.support_radius + 1)
    for freq, coef in recipe.cosine_terms:
        for dist in range(0, freq + 1, 2):
            values[dist] += coef * lemma1_kernel_value(d, freq, dist)
    return RadialKernel(d, tuple(values), tuple(recipe.chebyshev_coefficients))


def lemma2_norm_bound(recipe: KernelRecipe, d: int, C: float, alpha: float) -> float:
    """Explicit bound on ||K||_{p->q} given (C, alpha) valid up to the support.

    sum_j (2M - j)/M * c(d, alpha, j r') * C d^{-alpha j r'}, a constant
    multiple of C d^{-alpha r'}.
    """
    total = 0.0
    for freq, coef in recipe.cosine_terms:
        total += coef * corollary1_constant(d, alpha, freq) * C * d ** (-alpha * freq)
    return total


@dataclass(frozen=True, eq=False)
class KernelOperator:
    """v -> sum_j (2M - j)/M P_{j r'}(T_d / 2) v on a graph."""

    recipe: KernelRecipe
    graph: RegularGraph
    certified_N: int | None = None
    flags: tuple[str, ...] = ()
    _cache: dict = field(default_factory=dict, repr=False)

    def apply(self, v) -> np.ndarray:
        return chebyshev_series_of_t(self.graph, self.recipe.chebyshev_coefficients, v)

    __call__ = apply

    def __matmul__(self, v):
        return self.apply(v)

    def matrix(self, method: str = "chebyshev", eigenvalues=None, eigenvectors=None):
        """Dense matrix, by a Chebyshev sweep on the identity or spectrally."""
        if method == "chebyshev":
            if "chebyshev" not in self._cache:
                self._cache["chebyshev"] = self.apply(np.eye(self.graph.vertex_count))
            return self._cache["chebyshev"]
        if method == "spectral":
            if eigenvalues is None or eigenvectors is None:
                raise ValueError("spectral synthesis needs eigenvalues and eigenvectors")
            h = kernel_eigenvalue(self.recipe, eigenvalues)
            return (eigenvectors * h) @ eigenvectors.T
        raise ValueError(f"unknown method {method!r}")

    def norm(self, p: float = 1.0, **kw) -> float:
        return matrix_norm(self.matrix(**kw), p).value


def build_kernel_operator(recipe: KernelRecipe, g: RegularGraph,
                          certified_N: int | None = None) -> KernelOperator:
    """Wrap ``recipe`` as an operator on ``g``.

    Warns with :class:`SupportExceedsN` when the support radius is larger
    than the certified radius; the operator is still built.
    """
    g.require_simple()
    flags = []
    if certified_N is not None and recipe.support_radius > certified_N:
        warnings.warn(
            f"support radius {recipe.support_radius} exceeds certified N = {certified_N}",
            SupportExceedsN,
            stacklevel=2,
        )
        flags.append("support_exceeds_certified_N")
    if log_top_eigenvalue(recipe, g.d) > 700.0:
        flags.append("overflow_risk")
    return KernelOperator(recipe, g, certified_N, tuple(flags))
