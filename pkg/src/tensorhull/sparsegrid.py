"""Hyperbolic-cross (sparse grid) tensor spaces built from a nested ladder.

The space indexed by ``K`` is spanned by the tensor atoms whose per-axis
levels satisfy ``k_1 + ... + k_d <= K``. Per-axis level ``k`` contributes
``c_0 = q`` atoms at level 0 and ``c_k = q 2**(k-1)`` atoms at level ``k >= 1``.

Tensor inner products factor as products of univariate ones, so nothing here
is ever formed on the product domain.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .approx import truncated_power
from .errors import CapacityError, DomainError
from .exactpoly import ONE, ZERO, as_fraction
from .mrabasis import OrthonormalDictionary, analyze


def block_size(q: int, k: int) -> int:
    return q if k == 0 else q << (k - 1)


def level_multi_indices(d: int, K: int):
    """All ``(k_1, ..., k_d)`` in ``N_0**d`` with ``sum <= K``, in lexicographic order."""
    if d == 1:
        return [(k,) for k in range(K + 1)]
    out = []
    for k in range(K + 1):
        for rest in level_multi_indices(d - 1, K - k):
            out.append((k,) + rest)
    return out


@dataclass(frozen=True)
class SparseGridSpace:
    d: int
    q: int
    K: int

    @cached_property
    def index_set(self):
        return tuple(level_multi_indices(self.d, self.K))

    @property
    def block_sizes(self):
        return tuple(block_size(self.q, k) for k in range(self.K + 1))

    @cached_property
    def dimension(self) -> int:
        c = self.block_sizes
        return sum(math.prod(c[k] for k in idx) for idx in self.index_set)

    @property
    def dimension_bound(self) -> int:
        """``q**d (K+1)**(d-1) 2**K``; equals ``q**2 (K+1) 2**K`` for ``d = 2``."""
        return self.q**self.d * (self.K + 1) ** (self.d - 1) * (1 << self.K)

    def atom_indices(self):
        """Zero-based per-axis atom index tuples spanning the space."""
        ranges = [range(0, self.q)] + [range(self.q << (k - 1), self.q << k) for k in range(1, self.K + 1)]
        for idx in self.index_set:
            yield from itertools.product(*(ranges[k] for k in idx))

    def contains(self, other: "SparseGridSpace") -> bool:
        return (self.d, self.q) == (other.d, other.q) and set(other.index_set) <= set(self.index_set)


def hyperbolic_cross(d: int, q: int, K: int) -> SparseGridSpace:
    """Hyperbolic-cross index set and its exact dimension."""
    if d < 2 or q < 1 or K < 0:
        raise DomainError("need d >= 2, q >= 1, K >= 0")
    space = SparseGridSpace(d, q, K)
    if d == 2 and space.dimension > q * q * (K + 1) * (1 << K):
        raise AssertionError("dimension exceeds q^2 (K+1) 2^K")
    return space


def tail_bound(gamma, W, K, d=2) -> float:
    """Bound on the squared tensor tail ``sum_{k_1+...+k_d > K} prod b_{k_i}**2``.

    For ``d = 2``: ``2 gamma**2 2**(-2K/W) + gamma**4 K 2**(-2(K-1)/W)``.
    For ``d > 2`` the envelope ``C K**(d-1) 2**(-2K/W)`` with
    ``C = 2 gamma**2 + gamma**4 2**(2/W)`` is used; only its order in ``K`` is
    meaningful.
    """
    if gamma <= 0 or W <= 0:
        raise DomainError("gamma and W must be positive")
    if d < 2:
        raise DomainError("d must be >= 2")
    if K < 1:
        raise DomainError("tail bound is stated for K >= 1")
    g2 = gamma * gamma
    if d == 2:
        return 2 * g2 * 2.0 ** (-2 * K / W) + g2 * g2 * K * 2.0 ** (-2 * (K - 1) / W)
    C = 2 * g2 + g2 * g2 * 2.0 ** (2 / W)
    return C * K ** (d - 1) * 2.0 ** (-2 * K / W)


@dataclass(frozen=True)
class KChoice:
    K: int
    tail: float
    dimension: int
    dimension_bound: int
    note: str = ""


def choose_K(epsilon, gamma, W, d=2, q=1, K_max=200) -> KChoice:
    """Smallest ``K >= 1`` with ``tail_bound(gamma, W, K, d) <= epsilon**2``."""
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    note = ""
    if epsilon >= gamma:
        note = "epsilon >= gamma: the coarsest admissible level is returned"
    e2 = float(epsilon) ** 2
    for K in range(1, K_max + 1):
        t = tail_bound(gamma, W, K, d)
        if t <= e2:
            space = SparseGridSpace(d, q, K)
            return KChoice(K, t, space.dimension, space.dimension_bound, note)
    raise CapacityError(f"no K <= {K_max} reaches epsilon={epsilon}", parameter="epsilon", required=K_max)


@dataclass(frozen=True)
class TensorPoint:
    """``psi_{v_1} ⊗ ... ⊗ psi_{v_d}`` for the order-``q`` truncated powers."""

    params: tuple
    q: int

    def __post_init__(self):
        ps = tuple(as_fraction(v) for v in self.params)
        for v in ps:
            if not 0 <= v <= 1:
                raise DomainError(f"parameter {v} outside [0, 1]")
        object.__setattr__(self, "params", ps)

    @property
    def d(self):
        return len(self.params)


@dataclass(frozen=True)
class TensorResidual:
    value: float
    value2: Fraction
    bound: float
    level_energies: tuple


def _tail_sum(energies: Sequence[Sequence[Fraction]], norms2, K):
    # prod ||psi_i||^2 - sum_{sum k_i <= K} prod b_{k_i}^2
    d = len(energies)
    head = ZERO
    for idx in level_multi_indices(d, K):
        term = ONE
        for axis, k in enumerate(idx):
            term *= energies[axis][k]
            if not term:
                break
        head += term
    total = ONE
    for n2 in norms2:
        total *= n2
    return total - head


def tensor_residual(point: TensorPoint, dictionary: OrthonormalDictionary, K: int, check=True) -> TensorResidual:
    """Distance from a tensor point to the hyperbolic-cross space of budget ``K``.

    Per-axis level energies come from exact analysis; because the per-axis
    bases are complete the total energy is ``prod ||psi_{v_i}||**2``, so the
    squared residual is that product minus the energy inside the index set,
    exactly. Requires ``dictionary.max_level >= K``.
    """
    if point.q != dictionary.q:
        raise DomainError("point and dictionary have different q")
    if K > dictionary.max_level:
        raise CapacityError(
            f"K={K} needs a dictionary with max_level >= {K}", parameter="max_level", required=K
        )
    energies, norms2 = [], []
    for v in point.params:
        a = analyze(dictionary, truncated_power(point.q, v))
        energies.append(a.level_energies[: K + 1])
        norms2.append(a.norm2)
    r2 = _tail_sum(energies, norms2, K)
    gamma, W = 1 / math.sqrt(2 * point.q - 1), 2 / (2 * point.q - 1)
    bound = math.sqrt(tail_bound(gamma, W, K, point.d)) if K >= 1 else float("inf")
    value = math.sqrt(r2)
    if check and value > bound * (1 + 1e-12):
        raise AssertionError(f"residual {value} exceeds tail bound {bound}")
    return TensorResidual(value, r2, bound, tuple(tuple(e) for e in energies))


@dataclass(frozen=True)
class DimensionRate:
    exponent: float
    log_power: float
    method: str
    epsilons: tuple
    Ks: tuple
    dimensions: tuple


def dimension_rate(epsilons, q, d=2, exact=False, method="joint") -> DimensionRate:
    """Leading exponent of the dimension chosen by :func:`choose_K`.

    Theory gives ``dim ~ eps**-W log**((d-1)(2+W)/2)(1/eps)``. With
    ``method="joint"`` ``log dim`` is regressed on ``log(1/eps)``,
    ``log log(1/eps)`` and a constant, and ``log_power`` is the fitted
    coefficient of the log term. ``method="fixed"`` subtracts the theoretical
    log correction first. ``exact=True`` uses the exact index-set dimension
    instead of ``q**2 (K+1) 2**K``.
    """
    gamma, W = 1 / math.sqrt(2 * q - 1), 2 / (2 * q - 1)
    Ks, dims = [], []
    for e in epsilons:
        c = choose_K(e, gamma, W, d, q)
        Ks.append(c.K)
        dims.append(c.dimension if exact else c.dimension_bound)
    x = np.log(1 / np.asarray(epsilons, dtype=float))
    y = np.log(np.asarray(dims, dtype=float))
    if method == "joint":
        A = np.vstack([x, np.log(x), np.ones_like(x)]).T
        coef = np.linalg.lstsq(A, y, rcond=None)[0]
        slope, log_power = float(coef[0]), float(coef[1])
    elif method == "fixed":
        log_power = (d - 1) * (2 + W) / 2
        slope = float(np.polyfit(x, y - log_power * np.log(x), 1)[0])
    else:
        raise DomainError(f"unknown method {method!r}")
    return DimensionRate(slope, log_power, method, tuple(epsilons), tuple(Ks), tuple(dims))
