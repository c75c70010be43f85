"""Greedy (farthest-point) epsilon-nets.

The farthest-point traversal does not depend on epsilon: it orders the points
so that the first ``n`` of them form a net with covering radius ``radii[n-1]``
and the radii are nonincreasing. A greedy epsilon-net is the shortest prefix
whose radius is ``<= epsilon``, so counts for a whole epsilon grid come from a
single traversal and are automatically monotone in epsilon.

Greedy counts are upper bounds on the covering number of the given point set,
and at most ``N(epsilon/2, points)`` by the usual packing argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .exactpoly import DyadicPiecewisePoly, inner_product


@dataclass
class CoveringReport:
    """Result of a greedy covering run.

    ``n_centers`` is a greedy upper bound on the covering number of the
    queried point set at radius ``epsilon``; it says nothing about points that
    were not sampled.
    """

    epsilon: float
    n_centers: int
    centers: list
    radius: float
    center_params: Optional[list] = None
    local_table: list = field(default_factory=list)
    slope: Optional[float] = None
    slope_band: Optional[tuple] = None

    @property
    def entropy(self) -> float:
        return float(np.log(self.n_centers))

    def to_json(self) -> dict:
        out = {"epsilon": self.epsilon, "n_centers": self.n_centers, "radius": self.radius}
        if self.center_params is not None:
            out["center_params"] = [str(p) for p in self.center_params]
        if self.local_table:
            out["local_table"] = self.local_table
        if self.slope is not None:
            out["slope"] = self.slope
            out["slope_band"] = list(self.slope_band) if self.slope_band else None
        return out


def function_gram(functions: Sequence[DyadicPiecewisePoly]) -> np.ndarray:
    """Float Gram matrix from exact pairwise inner products."""
    n = len(functions)
    G = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            G[i, j] = G[j, i] = float(inner_product(functions[i], functions[j]))
    return G


class FarthestPointTraversal:
    """Farthest-point ordering of a finite point set.

    Parameters
    ----------
    points : array of shape (n, dim), or a list of :class:`DyadicPiecewisePoly`
        Euclidean vectors, or functions compared in ``L2([0, 1])``.
    gram : array, optional
        Precomputed Gram matrix; used instead of ``points`` when given.
    start : int
        Index of the first center.
    """

    def __init__(self, points=None, gram=None, start=0):
        if gram is None:
            if points is None:
                raise DomainError("need points or a Gram matrix")
            if len(points) and isinstance(points[0], DyadicPiecewisePoly):
                gram = function_gram(points)
        if gram is not None:
            self._gram = np.asarray(gram, dtype=float)
            self._X = None
            self.n = self._gram.shape[0]
            self._sq = np.diag(self._gram).copy()
        else:
            self._X = np.atleast_2d(np.asarray(points, dtype=float))
            self._gram = None
            self.n = self._X.shape[0]
            self._sq = np.einsum("ij,ij->i", self._X, self._X)
        if self.n == 0:
            raise DomainError("empty point set")
        self.order = [int(start)]
        self.radii = []
        self._d2 = self._dist2_from(int(start))
        self._owner = np.full(self.n, int(start))

    def _dist2_from(self, i):
        if self._gram is not None:
            row = self._gram[i]
        else:
            row = self._X @ self._X[i]
        return np.maximum(self._sq + self._sq[i] - 2.0 * row, 0.0)

    def current_radius(self) -> float:
        return float(np.sqrt(self._d2.max()))

    def extend_to(self, epsilon: float) -> int:
        """Add centers until the covering radius is ``<= epsilon``."""
        e2 = float(epsilon) ** 2
        while True:
            j = int(np.argmax(self._d2))
            r2 = float(self._d2[j])
            if len(self.radii) < len(self.order):
                self.radii.append(float(np.sqrt(r2)))
            if r2 <= e2:
                return len(self.order)
            self.order.append(j)
            nd = self._dist2_from(j)
            closer = nd < self._d2
            self._owner[closer] = j
            self._d2 = np.minimum(self._d2, nd)

    def count(self, epsilon: float) -> int:
        """Greedy net size at radius ``epsilon``."""
        if epsilon <= 0:
            raise DomainError("epsilon must be positive")
        self.extend_to(epsilon)
        # radii[n-1] is the covering radius of the first n centers
        for n, r in enumerate(self.radii, start=1):
            if r <= epsilon:
                return n
        return len(self.order)

    def assignment(self, epsilon):
        """Centers of the ``epsilon``-net and, for each point, its nearest center."""
        n = self.count(epsilon)
        centers = self.order[:n]
        if self._gram is not None:
            G = self._gram[:, centers]
        else:
            G = self._X @ self._X[centers].T
        d2 = self._sq[:, None] + self._sq[centers][None, :] - 2.0 * G
        k = np.argmin(d2, axis=1)
        return centers, np.asarray(centers)[k], np.sqrt(np.maximum(d2[np.arange(self.n), k], 0.0))


def greedy_cover(points, epsilon, params=None, gram=None) -> CoveringReport:
    """Greedy epsilon-net of a finite set of vectors or functions.

    Every point ends up within ``epsilon`` of some center; the center count is
    an upper bound on the covering number of the point set.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    fpt = FarthestPointTraversal(points, gram=gram)
    centers, _, dist = fpt.assignment(epsilon)
    return CoveringReport(
        epsilon=float(epsilon),
        n_centers=len(centers),
        centers=list(centers),
        radius=float(dist.max()),
        center_params=[params[c] for c in centers] if params is not None else None,
    )


def fit_slope(epsilons, values, drop_largest=True, log_values=True):
    """OLS slope of ``log(values)`` against ``log(1/epsilon)``.

    Returns ``(slope, intercept, (lo, hi))`` where the band is slope +- 2
    standard errors (``(nan, nan)`` with fewer than three points).
    """
    eps = np.asarray(epsilons, dtype=float)
    y = np.asarray(values, dtype=float)
    order = np.argsort(-eps)
    eps, y = eps[order], y[order]
    if drop_largest and len(eps) > 2:
        eps, y = eps[1:], y[1:]
    x = np.log(1.0 / eps)
    if log_values:
        y = np.log(y)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    if len(x) > 2:
        resid = y - A @ coef
        s2 = float(resid @ resid) / (len(x) - 2)
        se = np.sqrt(s2 / float(((x - x.mean()) ** 2).sum()))
        band = (slope - 2 * se, slope + 2 * se)
    else:
        band = (float("nan"), float("nan"))
    return slope, intercept, band
