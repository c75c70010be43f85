"""Desk-scale experiments on absolute convex hulls ``{X beta : ||beta||_1 <= 1}``.

Vectors live in ``R^n`` with the Euclidean norm. Discrete designs are stored
so that this norm equals the ``L2(Q_m)`` norm ``sum v_i**2 / m`` of the raw
columns, i.e. ``columns = values / sqrt(m)``.

All covering counts here are greedy counts on finite point sets or explicit
constructive covers; they are upper bounds for the sets they were computed
on, never claims about exact covering numbers.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .covering import CoveringReport, FarthestPointTraversal, fit_slope
from .errors import CapacityError, DomainError
from .rng import substream
from .sparsegrid import level_multi_indices

DEFAULT_MAX_ENTRIES = 1 << 26


def max_entries() -> int:
    """Capacity budget (number of float entries); ``TENSORHULL_MAX_ENTRIES`` overrides."""
    return int(os.environ.get("TENSORHULL_MAX_ENTRIES", DEFAULT_MAX_ENTRIES))


# --- design matrices ------------------------------------------------------------


@dataclass
class DesignMatrix:
    """Columns ``x_1..x_p`` of a design, as an ``(n, p)`` array.

    ``values`` holds the raw column entries (e.g. ``psi_{i,j}``); ``columns``
    the rescaled vectors whose Euclidean norm is the ``Q_m`` norm, further
    divided by ``scale`` when needed so that ``max_j ||x_j|| <= 1``.
    """

    values: np.ndarray
    columns: np.ndarray
    q: int
    m: int
    d: int = 1
    variant: str = "shifted"
    params: Optional[list] = None
    scale: float = 1.0

    @property
    def n(self):
        return self.columns.shape[0]

    @property
    def p(self):
        return self.columns.shape[1]

    @property
    def norms(self):
        return np.linalg.norm(np.asarray(self.columns, dtype=float), axis=0)


def _psi_column(m, j, q, variant, exact):
    one = Fraction(1) if exact else 1.0
    col = []
    for i in range(1, m + 1):
        if i < j:
            col.append(0 * one)
        elif q == 1:
            col.append(one)
        elif variant == "shifted":
            col.append((i - (j + 1)) * one / m)
        else:
            col.append((i - j + 1) * one / m)
    return col


def discrete_design(m: int, q: int, variant: str = "shifted", exact: bool = False) -> DesignMatrix:
    """Discrete truncated-power design on ``[1:m]``.

    ``q = 1``: step columns ``1{i >= j}``, ``j in [1:m]``.
    ``q = 2``: ``psi_{i,j} = (i - (j+1)) 1{i >= j} / m`` for ``j in [3:m]``
    (``variant="shifted"``); ``variant="aligned"`` uses
    ``(i - j + 1) 1{i >= j} / m``, the columns for which ``f = Psi beta`` has
    second differences ``beta_j / m`` (one-hot ``beta`` has unit TV). The
    shifted columns equal ``-1/m`` at ``i = j`` and have discrete TV 3.
    """
    if m < 4:
        raise DomainError("m must be >= 4")
    if q not in (1, 2):
        raise DomainError(f"unsupported q={q}; discrete designs exist for q in {{1, 2}}")
    if variant not in ("shifted", "aligned"):
        raise DomainError(f"unknown variant {variant!r}")
    js = list(range(1, m + 1)) if q == 1 else list(range(3, m + 1))
    cols = [_psi_column(m, j, q, variant, exact) for j in js]
    dtype = object if exact else float
    values = np.array(cols, dtype=dtype).T
    columns = np.asarray(values, dtype=float) / math.sqrt(m)
    top = float(np.linalg.norm(columns, axis=0).max())
    scale = max(1.0, top)
    return DesignMatrix(values, columns / scale, q, m, 1, variant, js, scale)


def tensor_design(design: DesignMatrix, d: int) -> DesignMatrix:
    """``d``-fold Kronecker product of a design (columns renormalized to max norm 1)."""
    if d < 1:
        raise DomainError("d must be >= 1")
    n, p = design.n**d, design.p**d
    if n * p > max_entries():
        raise CapacityError(
            f"tensor design needs {n}x{p} entries > budget {max_entries()}",
            parameter="m",
            required=n * p,
        )
    cols = design.columns
    vals = np.asarray(design.values, dtype=float)
    for _ in range(d - 1):
        cols = np.kron(cols, design.columns)
        vals = np.kron(vals, np.asarray(design.values, dtype=float))
    top = float(np.linalg.norm(cols, axis=0).max())
    scale = max(1.0, top)
    params = None
    if design.params is not None:
        params = [tuple(int(x) for x in t) for t in np.array(np.meshgrid(*[design.params] * d, indexing="ij")).reshape(d, -1).T]
    return DesignMatrix(vals, cols / scale, design.q, design.m, d * design.d, design.variant, params, scale)


def as_columns(X) -> np.ndarray:
    """Column array of a :class:`DesignMatrix` or a plain ``(n, p)`` array."""
    return X.columns if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)


def qm_norm2(v) -> float:
    v = np.asarray(v)
    return (v * v).sum() / len(v)


# --- discrete total variation -------------------------------------------------------


def second_differences(f):
    f = np.asarray(f)
    return f[2:] - 2 * f[1:-1] + f[:-2]


def discrete_tv(f):
    """``m * sum_{j=3}^m |f_j - 2 f_{j-1} + f_{j-2}|`` (exact for Fraction input)."""
    f = np.asarray(f)
    m = len(f)
    if m < 3:
        raise DomainError("need at least 3 values")
    return m * np.abs(second_differences(f)).sum()


def beta_from_f(f):
    """``beta_j = m (f_j - 2 f_{j-1} + f_{j-2})`` for ``j in [3:m]``."""
    f = np.asarray(f)
    return len(f) * second_differences(f)


def f_from_beta(beta, m: int):
    """Inverse of :func:`beta_from_f` with ``f_1 = f_2 = 0``:
    ``f_j = ((j-2) beta_3 + ... + beta_j) / m``."""
    beta = list(beta)
    if len(beta) != m - 2:
        raise DomainError("beta must have length m - 2")
    zero = beta[0] * 0 if beta else 0
    f = [zero, zero]
    for j in range(3, m + 1):
        f.append(sum((j - l + 1) * beta[l - 3] for l in range(3, j + 1)) / m)
    return np.array(f, dtype=object if isinstance(zero, Fraction) else float)


def cell_split_error(m: int, j: int, k: int, variant: str = "shifted"):
    """``e_j``: the part of column ``j`` missed by the level-``k`` ladder pair.

    With ``j_k = m l 2**-k`` the right end of the level-``k`` cell holding
    ``j / m``, ``psi_j - psi_{j_k} - (j_k - j)/m 1{i >= j_k} = psi_j 1{j <= i < j_k}``.
    Returns ``(e, bound)`` where ``bound = n (n+1) (2n+1) / (6 m**3)``,
    ``n = m 2**-k``, bounds ``||e||_{Q_m}**2``.
    """
    n = m >> k
    if n << k != m:
        raise DomainError("m must be a multiple of 2**k")
    l = (j - 1) // n + 1 if j % n else j // n + 1
    jk = l * n
    psi = np.array(_psi_column(m, j, 2, variant, exact=True), dtype=object)
    idx = np.arange(1, m + 1)
    e = np.where((idx >= j) & (idx < jk), psi, Fraction(0))
    bound = Fraction(n * (n + 1) * (2 * n + 1), 6 * m**3)
    return e, bound, jk


# --- hull points and Maurey sparsification -------------------------------------------


@dataclass
class HullPoint:
    beta: np.ndarray
    f: np.ndarray

    @classmethod
    def from_beta(cls, X, beta):
        beta = np.asarray(beta, dtype=float)
        if np.abs(beta).sum() > 1 + 1e-12:
            raise DomainError("||beta||_1 must be <= 1")
        return cls(beta, as_columns(X) @ beta)


def sample_hull_betas(p: int, n: int, seed=0, include_vertices=True, tag="hull-sample"):
    """Signed Dirichlet(1,...,1) coefficients, plus the ``2p`` vertices ``±e_j``."""
    rng = substream(seed, tag, 0)
    B = rng.dirichlet(np.ones(p), size=n) * rng.choice([-1.0, 1.0], size=(n, p))
    if include_vertices:
        B = np.vstack([B, np.eye(p), -np.eye(p)])
    return B


def sample_local_betas(beta0, p, n, radius_fn, seed=0, tag="hull-local"):
    """Hull coefficients on segments from ``beta0`` towards random hull points.

    ``radius_fn(beta)`` gives the largest admissible step fraction; every
    returned point stays inside the l1 ball by convexity.
    """
    rng = substream(seed, tag, 0)
    ends = sample_hull_betas(p, n, seed, include_vertices=False, tag=tag + "-ends")
    out = []
    for b in ends:
        lam = rng.uniform(0.0, min(1.0, radius_fn(b)))
        out.append(beta0 + lam * (b - beta0))
    return np.array(out)


def maurey_sparsify(X, beta, s: int, seed=0, task=0, normalized=False) -> HullPoint:
    """Maurey's empirical approximation of ``X beta`` by an ``s``-term average.

    Draws ``J_1..J_s`` i.i.d. with ``P(J = j) = |beta_j|`` and the remaining
    mass ``1 - ||beta||_1`` on the zero vector, and returns
    ``(1/s) sum_t sign(beta_{J_t}) x_{J_t}``. With ``normalized=True`` the draw
    uses ``|beta_j| / ||beta||_1`` and the average is scaled by ``||beta||_1``.
    Either way ``E ||f_hat - X beta||**2 <= max_j ||x_j||**2 / s``.
    """
    if s < 1:
        raise DomainError("s must be >= 1")
    if isinstance(beta, HullPoint):
        beta = beta.beta
    beta = np.asarray(beta, dtype=float)
    l1 = float(np.abs(beta).sum())
    if l1 > 1 + 1e-12:
        raise DomainError("||beta||_1 must be <= 1")
    rng = substream(seed, "maurey", task)
    counts = _maurey_counts(beta, s, rng, normalized)
    mult = (l1 if normalized else 1.0) / s
    beta_hat = counts * np.sign(beta) * mult
    return HullPoint(beta_hat, as_columns(X) @ beta_hat)


def _maurey_counts(beta, s, rng, normalized, size=None):
    a = np.abs(beta)
    l1 = a.sum()
    if l1 == 0:
        return np.zeros(len(beta) if size is None else (size, len(beta)))
    if normalized:
        probs = a / l1
    else:
        probs = np.append(a, max(0.0, 1.0 - l1))
        probs = probs / probs.sum()
    c = rng.multinomial(s, probs, size=size)
    return c[..., : len(beta)].astype(float)


def maurey_mse(X, beta, s: int, n_rep: int, seed=0):
    """Monte-Carlo mean of ``||f_hat - X beta||**2`` over ``n_rep`` draws.

    Returns ``(mean, standard_error)``; the repetitions for a given ``s`` come
    from one stream tagged ``("maurey-mc", s)``.
    """
    if s < 1:
        raise DomainError("s must be >= 1")
    beta = np.asarray(beta, dtype=float)
    rng = substream(seed, "maurey-mc", s)
    counts = _maurey_counts(beta, s, rng, False, size=n_rep)
    B = counts * np.sign(beta) / s
    err = (B - beta) @ as_columns(X).T
    sq = (err * err).sum(axis=1)
    return float(sq.mean()), float(sq.std(ddof=1) / math.sqrt(n_rep))


# --- discrete ladders --------------------------------------------------------------


class DiscreteLadder:
    """Piecewise polynomials of degree ``< q`` on dyadic blocks of ``[1:m]``.

    Level ``k`` splits ``[1:m]`` into ``2**k`` blocks of ``m 2**-k`` points;
    ``blocks[k]`` is an orthonormal basis of the new directions at level ``k``
    (``q 2**(k-1)`` of them for ``k >= 1``). For ``d >= 2`` the space with
    budget ``K`` is the hyperbolic cross of these blocks.
    """

    def __init__(self, m: int, q: int, d: int = 1):
        if m & (m - 1):
            raise DomainError("m must be a power of two")
        self.m, self.q, self.d = m, q, d
        self.max_level = 0
        while (m >> (self.max_level + 1)) >= q and self.max_level + 1 <= int(math.log2(m)):
            self.max_level += 1
        self.blocks = self._build_blocks()

    def _build_blocks(self):
        m, q = self.m, self.q
        prev = np.zeros((m, 0))
        out = []
        for k in range(self.max_level + 1):
            n = m >> k
            A = np.zeros((m, q << k))
            for c in range(1 << k):
                t = np.arange(n) / n
                for j in range(q):
                    A[c * n: (c + 1) * n, c * q + j] = t**j
            A = A - prev @ (prev.T @ A)
            U, S, _ = np.linalg.svd(A, full_matrices=False)
            B = U[:, : (q if k == 0 else q << (k - 1))]
            out.append(B)
            prev = np.hstack([prev, B])
        return out

    @property
    def top_level(self) -> int:
        """Largest useful budget: 1D max level, or ``d * max_level`` for tensors."""
        return self.max_level * self.d

    def basis(self, K: int) -> np.ndarray:
        if self.d == 1:
            return np.hstack(self.blocks[: min(K, self.max_level) + 1])
        cols = []
        for idx in level_multi_indices(self.d, K):
            if max(idx) > self.max_level:
                continue
            B = self.blocks[idx[0]]
            for k in idx[1:]:
                B = np.kron(B, self.blocks[k])
            cols.append(B)
        return np.hstack(cols)

    def delta(self, X: np.ndarray, K: int) -> float:
        Q = self.basis(K)
        R = X - Q @ (Q.T @ X)
        return float(np.linalg.norm(R, axis=0).max())

    def smallest_level(self, X: np.ndarray, u: float):
        """Smallest budget ``K`` with ``delta(V_K, X) <= u``: ``(K, basis, delta)``."""
        for K in range(self.top_level + 1):
            Q = self.basis(K)
            dl = float(np.linalg.norm(X - Q @ (Q.T @ X), axis=0).max())
            if dl <= u:
                return K, Q, dl
        raise CapacityError(f"ladder exhausted before delta <= {u}", parameter="u", required=u)


# --- two-scale cover --------------------------------------------------------------------


def _log_unit_ball_volume(r):
    return (r / 2) * math.log(math.pi) - math.lgamma(r / 2 + 1)


@dataclass
class TwoScaleCover:
    """Explicit cover of ``{f in absconv(X) : ||f - f0|| <= 16 eps}`` at radius ``4 eps``.

    Centers are ``Q z + (1/s) sum_t y_t`` with ``z`` on a cubic grid of spacing
    ``2 eps / sqrt(r)`` around ``Q^T f0`` (``r = dim W_u``) and each ``y_t`` in
    ``{0} ∪ {± x_j^perp : j a representative column}``. The set is never
    enumerated; :meth:`center` builds the center used for a given hull point.
    """

    epsilon: float
    u: float
    s: int
    f0: np.ndarray
    Q: np.ndarray
    X_perp: np.ndarray
    reps: list
    rep_of: np.ndarray
    delta: float
    columns: np.ndarray = field(repr=False, default=None)
    rep_pos: np.ndarray = field(repr=False, default=None)
    seed: int = 0
    tries: int = 64

    @property
    def r(self) -> int:
        return self.Q.shape[1]

    @property
    def N(self) -> int:
        return len(self.reps)

    @property
    def grid_spacing(self) -> float:
        return 2 * self.epsilon / math.sqrt(self.r)

    @property
    def log_grid_count(self) -> float:
        """Log of a volumetric upper bound on grid points within ``16 eps`` of ``f0``."""
        h = self.grid_spacing
        R = 16 * self.epsilon + h * math.sqrt(self.r) / 2
        return _log_unit_ball_volume(self.r) + self.r * math.log(R / h)

    @property
    def log_residual_count(self) -> float:
        """Log of the number of size-``s`` multisets from ``2N + 1`` symbols."""
        n = 2 * self.N + 1
        return math.lgamma(n + self.s) - math.lgamma(self.s + 1) - math.lgamma(n)

    @property
    def log_count(self) -> float:
        return self.log_grid_count + self.log_residual_count

    @property
    def budget(self) -> float:
        """``(M + 1) log 48 + ceil(u**2/eps**2) (1 + log(2N + 1))``, ``M + 1 >= r``."""
        return self.r * math.log(48) + self.s * (1 + math.log(2 * self.N + 1))

    def center(self, beta, task=0):
        """Center assigned to ``X beta`` and its distance to ``X beta``."""
        beta = np.asarray(beta, dtype=float)
        f = self.columns @ beta
        c0 = self.Q.T @ self.f0
        c = self.Q.T @ f
        h = self.grid_spacing
        z = c0 + h * np.round((c - c0) / h)
        grid_err2 = float(((c - z) ** 2).sum())

        target = self.X_perp @ beta
        beta_rep = np.zeros(self.N)
        np.add.at(beta_rep, self.rep_pos, beta)
        Y = self.X_perp[:, self.reps]
        best, best_err = None, np.inf
        rng = substream(self.seed, "two-scale", task)
        counts = _maurey_counts(beta_rep, self.s, rng, False, size=self.tries)
        cand = (counts * np.sign(beta_rep)) / self.s
        errs = ((cand @ Y.T - target) ** 2).sum(axis=1)
        i = int(np.argmin(errs))
        best, best_err = cand[i], float(errs[i])
        best, best_err = self._polish(best, best_err, Y, target)
        dist = math.sqrt(grid_err2 + best_err)
        center = self.Q @ z + Y @ best
        return center, dist

    def _polish(self, w, err, Y, target):
        # single-slot moves inside the multiset family: shift 1/s of mass
        # from one symbol (or zero) to another while the error decreases
        s = self.s
        step = 1.0 / s
        for _ in range(4 * s):
            resid = Y @ w - target
            g = Y.T @ resid
            # candidate: add ±step to the coordinate with the largest |gradient|
            j = int(np.argmax(np.abs(g)))
            sign = -np.sign(g[j])
            nz = np.flatnonzero(w)
            options = []
            if np.abs(w).sum() + step <= 1 + 1e-12:
                options.append((None, j, sign))
            for i in nz:
                options.append((i, j, sign))
            improved = False
            for i, jj, sg in options:
                w2 = w.copy()
                if i is not None:
                    w2[i] -= np.sign(w[i]) * step
                w2[jj] += sg * step
                if np.abs(w2).sum() > 1 + 1e-12:
                    continue
                e2 = float(((Y @ w2 - target) ** 2).sum())
                if e2 < err - 1e-15:
                    w, err, improved = w2, e2, True
                    break
            if not improved:
                break
        return w, err


def two_scale_cover(X: DesignMatrix, V: np.ndarray, epsilon: float, u: float, f0=None, seed=0) -> TwoScaleCover:
    """Explicit two-scale cover of the ``16 eps`` ball around ``f0`` in ``absconv(X)``.

    ``V`` is an orthonormal ``(n, M)`` basis with ``delta(V, X) <= u``. The hull
    splits as ``X beta = P_W X beta + X_perp beta`` with ``W = span(V, f0)``:
    the first part is gridded in ``dim W`` dimensions, the second is replaced
    by an ``s = ceil(u**2/eps**2)``-term Maurey average over a greedy
    ``eps``-net of the projected columns.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if epsilon > u:
        raise DomainError(f"epsilon={epsilon} > u={u}")
    cols = as_columns(X)
    V = np.asarray(V, dtype=float).reshape(cols.shape[0], -1)
    delta = float(np.linalg.norm(cols - V @ (V.T @ cols), axis=0).max()) if V.shape[1] else float(np.linalg.norm(cols, axis=0).max())
    if delta > u * (1 + 1e-9):
        raise DomainError(f"delta(V, X) = {delta} exceeds u = {u}")
    f0 = np.zeros(cols.shape[0]) if f0 is None else np.asarray(f0, dtype=float)
    r0 = f0 - V @ (V.T @ f0)
    Q = V
    if np.linalg.norm(r0) > 1e-12 * max(1.0, np.linalg.norm(f0)):
        Q = np.hstack([V, (r0 / np.linalg.norm(r0))[:, None]])
    if Q.shape[1] == 0:
        Q = np.zeros((cols.shape[0], 0))
    X_perp = cols - Q @ (Q.T @ cols)
    fpt = FarthestPointTraversal(X_perp.T)
    reps, rep_vec, _ = fpt.assignment(epsilon)
    pos = {c: i for i, c in enumerate(reps)}
    s = math.ceil(u * u / (epsilon * epsilon) - 1e-12)
    cover = TwoScaleCover(
        epsilon=float(epsilon), u=float(u), s=int(s), f0=f0, Q=Q, X_perp=X_perp,
        reps=list(reps), rep_of=rep_vec, delta=delta, columns=cols,
        rep_pos=np.array([pos[c] for c in rep_vec]), seed=seed,
    )
    return cover


def choose_u(epsilon, W, w=0.0):
    """``u = eps**(2/(2+W)) log**(w/(2+W))(1/eps) log**(-1/(2+W))(1/eps)``."""
    L = math.log(1.0 / epsilon)
    return epsilon ** (2 / (2 + W)) * L ** (w / (2 + W)) * L ** (-1 / (2 + W))


# --- covering estimates ---------------------------------------------------------------------


def covering_estimate(points, epsilon, mode="global", f0=None) -> CoveringReport:
    """Greedy covering count of a sample of hull points.

    ``mode="global"`` covers all points at radius ``epsilon``. ``mode="local"``
    keeps the points within ``epsilon`` of ``f0`` (a vector or a row index)
    and covers them at radius ``epsilon / 4``.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if mode == "global":
        fpt = FarthestPointTraversal(P)
        centers, _, dist = fpt.assignment(epsilon)
        return CoveringReport(float(epsilon), len(centers), list(centers), float(dist.max()))
    if mode != "local":
        raise DomainError(f"unknown mode {mode!r}")
    if f0 is None:
        raise DomainError("local mode needs f0")
    c = P[int(f0)] if np.isscalar(f0) else np.asarray(f0, dtype=float)
    near = np.flatnonzero(np.linalg.norm(P - c, axis=1) <= epsilon)
    if len(near) == 0:
        return CoveringReport(float(epsilon), 0, [], 0.0)
    fpt = FarthestPointTraversal(P[near])
    centers, _, dist = fpt.assignment(epsilon / 4)
    rep = CoveringReport(float(epsilon), len(centers), [int(near[i]) for i in centers], float(dist.max()))
    rep.local_table = [{"f0": int(f0) if np.isscalar(f0) else None, "epsilon": float(epsilon),
                        "n_local": len(centers), "n_ball": int(len(near))}]
    return rep


def local_entropy(points, epsilon, anchors: Sequence[int]):
    """``max`` over anchor rows of the log local covering count (greedy)."""
    best, table = 0.0, []
    for a in anchors:
        rep = covering_estimate(points, epsilon, "local", int(a))
        table.extend(rep.local_table)
        best = max(best, math.log(max(rep.n_centers, 1)))
    return best, table


def yang_barron_table(points, epsilons, n_anchors=32, seed=0):
    """Rows ``(eps, H(eps/4), H(eps), H_loc(eps))`` of greedy estimates on a sample.

    ``holds`` records whether ``H(eps/4) - H(eps) <= H_loc(eps)``; greedy
    noise can break this on individual rows.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    fpt = FarthestPointTraversal(P)
    rng = substream(seed, "yang-barron", 0)
    anchors = rng.choice(len(P), size=min(n_anchors, len(P)), replace=False)
    rows = []
    for e in epsilons:
        h_fine = math.log(fpt.count(e / 4))
        h_coarse = math.log(fpt.count(e))
        h_loc, _ = local_entropy(P, e, anchors)
        rows.append({"epsilon": float(e), "H_fine": h_fine, "H": h_coarse, "H_loc": h_loc,
                     "holds": h_fine - h_coarse <= h_loc + 1e-12})
    return rows


# --- local to global ----------------------------------------------------------------------


def local_to_global_bound(B, A, alpha, K) -> float:
    """``B (2**(2(K+1)A) - 1) log**alpha(2**(2K)) / (2**(2A) - 1)`` (natural log)."""
    if B <= 0 or alpha < 0 or K < 1:
        raise DomainError("need B > 0, alpha >= 0, K >= 1")
    if A <= 0:
        raise DomainError("A must be positive")
    return B * (2.0 ** (2 * (K + 1) * A) - 1) * math.log(2.0 ** (2 * K)) ** alpha / (2.0 ** (2 * A) - 1)


def simulate_local_recursion(B, A, alpha, K_max, h1=1.0):
    """Run ``h(2**-k / 4) = h(2**-k) + B 2**(kA) log**alpha(2**k)`` at equality.

    Starts from ``h(1) = h1`` (with ``0**0 = 1``) and returns the list of
    ``h(2**(-2K) / 4)`` for ``K = 1..K_max``.
    """
    h = {0: float(h1)}
    out = []
    for K in range(1, K_max + 1):
        # h(2^-(2K+2)) via the even chain
        for k in range(0, 2 * K + 1, 2):
            if k + 2 not in h:
                h[k + 2] = h[k] + B * 2.0 ** (k * A) * math.log(2.0**k) ** alpha
        out.append(h[2 * K + 2])
    return out


# --- scaling experiment --------------------------------------------------------------------


@dataclass
class ScalingConfig:
    q: int = 1
    d: int = 1
    m: int = 256
    epsilons: Optional[list] = None
    samples: int = 2000
    seed: int = 0
    variant: str = "shifted"
    W: Optional[float] = None
    w: Optional[float] = None


@dataclass
class ScalingReport:
    config: ScalingConfig
    W: float
    w: float
    target: float
    log_power: float
    rows: list = field(default_factory=list)
    slope: float = float("nan")
    slope_band: tuple = (float("nan"), float("nan"))
    log_corrected_slope: float = float("nan")
    log_residual_trend: float = float("nan")
    sample_slope: float = float("nan")
    sample_loglog_slope: float = float("nan")
    fit_epsilons: list = field(default_factory=list)

    def to_json(self):
        return {
            "config": self.config.__dict__,
            "W": self.W, "w": self.w, "target_exponent": self.target, "log_power": self.log_power,
            "slope": self.slope, "slope_band": list(self.slope_band),
            "log_corrected_slope": self.log_corrected_slope,
            "log_residual_trend": self.log_residual_trend,
            "sample_slope": self.sample_slope,
            "sample_loglog_slope": self.sample_loglog_slope,
            "fit_epsilons": self.fit_epsilons,
            "rows": self.rows,
        }


def default_epsilons():
    return [2.0 ** (-j / 2) for j in range(2, 25)]


def scaling_experiment(config: ScalingConfig) -> ScalingReport:
    """Entropy-exponent experiment for ``absconv`` of a (tensorized) discrete design.

    Per epsilon it records

    * ``n_sample``: greedy count of sampled hull points (signed Dirichlet
      combinations plus all vertices); its log is bounded by ``log(samples)``;
    * ``H_cover``: log center count of an explicit two-scale cover built from
      the measured ladder dimension ``M(u)`` and greedy column count ``N`` (an
      upper bound on the local entropy at radius ``4 eps``);
    * ``H_bound``: ``(M + 1) log 48 + s (1 + log(2N + 1))`` at the same
      measured ``M``, ``N``, which dominates ``H_cover`` and is the quantity
      whose growth the theory controls (``H_cover`` flattens once
      ``s > 2N``, a finite-``p`` effect).

    ``slope`` is the OLS slope of ``log H_bound`` on ``log(1/eps)`` over the
    asymptotic window: points whose ladder level is at least 1 and strictly
    below the top level and whose column net has fewer than ``p`` centers,
    with the largest remaining epsilon dropped. Theory predicts
    ``2W/(2+W)`` up to the log factor ``log**log_power(1/eps)``.
    """
    cfg = config
    design = discrete_design(cfg.m, cfg.q, cfg.variant)
    X = tensor_design(design, cfg.d) if cfg.d > 1 else design
    W = cfg.W if cfg.W is not None else 2.0 / (2 * cfg.q - 1)
    w = cfg.w if cfg.w is not None else (cfg.d - 1) * (2 + W) / 2
    target = 2 * W / (2 + W)
    log_power = 2 * w / (2 + W) + W / (2 + W)
    ladder = DiscreteLadder(cfg.m, cfg.q, cfg.d)
    eps_grid = sorted(cfg.epsilons or default_epsilons(), reverse=True)

    betas = sample_hull_betas(X.p, cfg.samples, cfg.seed)
    F = betas @ X.columns.T
    fpt = FarthestPointTraversal(F)
    f0 = F[0]

    report = ScalingReport(cfg, W, w, target, log_power)
    for e in eps_grid:
        u = max(choose_u(e, W, w), e)
        K, V, dl = ladder.smallest_level(X.columns, u)
        cover = two_scale_cover(X, V, e, u, f0, seed=cfg.seed)
        saturated = K >= ladder.top_level or cover.N >= X.p
        report.rows.append({
            "epsilon": e, "u": u, "level": K, "M": V.shape[1], "delta": dl, "s": cover.s,
            "N": cover.N, "H_bound": cover.budget, "H_cover": cover.log_count,
            "n_sample": fpt.count(e), "window": bool(K >= 1 and not saturated),
        })
        if saturated:
            break

    win = [r for r in report.rows if r["window"]]
    if len(win) > 2:
        eps = [r["epsilon"] for r in win]
        H = [r["H_bound"] for r in win]
        report.slope, _, report.slope_band = fit_slope(eps, H, drop_largest=True)
        report.fit_epsilons = sorted(eps, reverse=True)[1:]
        # window rows are in decreasing epsilon order; drop the largest
        x = np.log(1 / np.array(eps[1:]))
        y = np.log(np.array(H[1:]))
        ll = np.log(x)
        report.log_corrected_slope = float(np.polyfit(x, y - log_power * ll, 1)[0])
        report.log_residual_trend = float(np.polyfit(ll, y - target * x, 1)[0])
    all_eps = [r["epsilon"] for r in report.rows]
    counts = [r["n_sample"] for r in report.rows]
    if len(all_eps) > 2:
        report.sample_slope = fit_slope(all_eps, counts, drop_largest=True)[0]
        H_s = np.log(np.maximum(counts, 2))
        report.sample_loglog_slope = fit_slope(all_eps, H_s, drop_largest=True)[0]
    return report
