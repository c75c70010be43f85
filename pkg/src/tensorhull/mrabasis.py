"""Nested orthonormal piecewise-polynomial dictionaries on [0, 1].

The dictionary for a starting value ``q`` is built from

* the coarse block ``B_0``: monomials ``u**j``, ``j < q``;
* the detail block ``B_1``: the truncated powers ``(u - 1/2)_+**j``, ``j < q``,
  with their projections onto ``span(B_0)`` removed;
* scaled copies ``B_{k,l}(u) = B_1(2**(k-1) * (u - (l-1) 2**-(k-1)))``
  restricted to the cell ``[(l-1) 2**-(k-1), l 2**-(k-1))``.

Each block is Gram-Schmidt orthogonalized in ascending generator degree. The
resulting atoms are kept unnormalized with exact rational ``norm2``; the
orthonormal function is ``atom / sqrt(norm2)``. With ``q = 1`` this is the Haar
system, with the mother wavelet carrying sign ``-1`` on the left half.

Sign convention: every unnormalized atom is the Gram-Schmidt residual of its
generator, so its inner product with that generator is positive.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DomainError
from .exactpoly import (
    ONE,
    ZERO,
    DyadicPiecewisePoly,
    affine_pullback,
    dyadic,
    inner_product,
    poly_shifted_power,
)


@dataclass(frozen=True)
class BasisBlock:
    level: int
    location: int
    functions: tuple
    norms2: tuple

    @property
    def support(self):
        if self.level == 0:
            return (ZERO, ONE)
        width = dyadic(1, self.level - 1)
        return ((self.location - 1) * width, self.location * width)


@dataclass(frozen=True)
class OrthonormalDictionary:
    """Atoms ``p_1, ..., p_{q 2^K}`` in level order.

    ``atoms[i]`` is the unnormalized function of ``p_{i+1}`` and ``norms2[i]``
    its exact squared norm. ``block_index[i]`` is the ``(level, location)`` of
    the block the atom belongs to (location 1 for level 0).
    """

    q: int
    max_level: int
    blocks: tuple

    @cached_property
    def atoms(self):
        return tuple(f for b in self.blocks for f in b.functions)

    @cached_property
    def norms2(self):
        return tuple(n for b in self.blocks for n in b.norms2)

    @cached_property
    def block_index(self):
        return tuple((b.level, b.location) for b in self.blocks for _ in b.functions)

    def __len__(self):
        return len(self.atoms)

    def dimension(self, k: int) -> int:
        """``dim V_k = q 2**k``."""
        return self.q << k

    def level_slice(self, k: int) -> slice:
        """Zero-based atom positions making up resolution level ``k``."""
        if k == 0:
            return slice(0, self.q)
        return slice(self.q << (k - 1), self.q << k)

    def level_blocks(self, k: int):
        if k == 0:
            return self.blocks[:1]
        return self.blocks[1 << (k - 1): 1 << k]

    def normalized_value(self, i: int, u) -> float:
        """Value of the orthonormal atom ``p_{i+1}`` at ``u``, as a float."""
        return float(self.atoms[i](u)) / math.sqrt(self.norms2[i])

    def gram(self):
        """Exact Gram matrix of the unnormalized atoms."""
        n = len(self.atoms)
        G = [[ZERO] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                G[i][j] = G[j][i] = inner_product(self.atoms[i], self.atoms[j])
        return G

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "max_level": self.max_level,
            "atoms": [
                {
                    "index": i + 1,
                    "level": lvl,
                    "location": loc,
                    "norm2": str(n2),
                    "function": f.to_json(),
                }
                for i, (f, n2, (lvl, loc)) in enumerate(zip(self.atoms, self.norms2, self.block_index))
            ],
        }

    def sample_matrix(self, n: int):
        """Orthonormal atoms on the grid ``u = i/(n-1)`` as an ``(n, len)`` array."""
        grid = [Fraction(i, n - 1) for i in range(n)]
        out = np.empty((n, len(self.atoms)))
        for j, (f, n2) in enumerate(zip(self.atoms, self.norms2)):
            s = math.sqrt(n2)
            out[:, j] = [float(f(u)) / s for u in grid]
        return np.array([float(u) for u in grid]), out


def _gram_schmidt(generators, basis, basis_norms2):
    """Orthogonalize ``generators`` against ``basis`` and each other."""
    out, norms = [], []
    ref = list(zip(basis, basis_norms2))
    for g in generators:
        r = g
        for b, n2 in ref:
            c = inner_product(g, b)
            if c:
                r = r - b * (c / n2)
        n2 = inner_product(r, r)
        if n2 == 0:
            raise ArithmeticError("dependent generator in block")
        r = r.simplify()
        out.append(r)
        norms.append(n2)
        ref.append((r, n2))
    return out, norms


def coarse_block(q: int) -> BasisBlock:
    gens = [DyadicPiecewisePoly.polynomial([0] * j + [1]) for j in range(q)]
    fs, ns = _gram_schmidt(gens, [], [])
    return BasisBlock(0, 1, tuple(fs), tuple(ns))


def detail_block(q: int, b0: BasisBlock) -> BasisBlock:
    half = Fraction(1, 2)
    gens = [DyadicPiecewisePoly((0, half, 1), ((), poly_shifted_power(half, j))) for j in range(q)]
    fs, ns = _gram_schmidt(gens, b0.functions, b0.norms2)
    return BasisBlock(1, 1, tuple(fs), tuple(ns))


def build_dictionary(q: int, max_level: int) -> OrthonormalDictionary:
    """Build the nested dictionary with starting value ``q`` up to level ``max_level``."""
    if int(q) != q or q < 1:
        raise DomainError("q must be a positive integer")
    if int(max_level) != max_level or max_level < 0:
        raise DomainError("max_level must be a nonnegative integer")
    q, max_level = int(q), int(max_level)
    b0 = coarse_block(q)
    blocks = [b0]
    if max_level >= 1:
        b1 = detail_block(q, b0)
        blocks.append(b1)
        for k in range(2, max_level + 1):
            scale = 1 << (k - 1)
            width = dyadic(1, k - 1)
            for loc in range(1, scale + 1):
                lo = (loc - 1) * width
                fs = tuple(affine_pullback(f, scale, lo, (lo, lo + width)) for f in b1.functions)
                ns = tuple(n / scale for n in b1.norms2)
                blocks.append(BasisBlock(k, loc, fs, ns))
    return OrthonormalDictionary(q, max_level, tuple(blocks))


@dataclass(frozen=True)
class Analysis:
    """Exact coefficients of a function in a dictionary.

    ``raw[i] = <atom_i, f>`` (rational). The orthonormal coefficient is
    ``a_i = raw[i] / sqrt(norms2[i])`` and ``a_i**2`` is rational.
    """

    q: int
    max_level: int
    raw: tuple
    norms2: tuple
    norm2: Fraction

    @cached_property
    def squared(self):
        return tuple(r * r / n for r, n in zip(self.raw, self.norms2))

    @property
    def coefficients(self):
        return np.array([float(r) / math.sqrt(n) for r, n in zip(self.raw, self.norms2)])

    @cached_property
    def level_energies(self):
        """``b_k**2``: sum of squared coefficients over level ``k``, ``k = 0..K``."""
        sq = self.squared
        out = [sum(sq[: self.q], ZERO)]
        for k in range(1, self.max_level + 1):
            out.append(sum(sq[self.q << (k - 1): self.q << k], ZERO))
        return tuple(out)

    @property
    def parseval_residual(self) -> Fraction:
        """``||f||**2 - sum a_i**2`` (nonnegative)."""
        return self.norm2 - sum(self.squared, ZERO)

    def residuals2(self):
        """Squared distance from ``f`` to ``V_k`` for ``k = 0..max_level``."""
        out, acc = [], ZERO
        for e in self.level_energies:
            acc += e
            out.append(self.norm2 - acc)
        return tuple(out)


def _locally_polynomial(f: DyadicPiecewisePoly, lo, hi, q) -> bool:
    # f is a single polynomial of degree < q on [lo, hi)
    bps = f.breakpoints
    i = bisect.bisect_right(bps, lo) - 1
    return bps[i + 1] >= hi and len(f.pieces[i]) <= q


def analyze(dictionary: OrthonormalDictionary, f: DyadicPiecewisePoly) -> Analysis:
    """Exact coefficients of ``f`` against every atom, plus ``||f||**2``.

    Detail atoms are orthogonal to polynomials of degree < q on their
    support, so blocks on which ``f`` is such a polynomial get a zero
    coefficient without integration.
    """
    raw = []
    for block in dictionary.blocks:
        lo, hi = block.support
        if block.level >= 1 and _locally_polynomial(f, lo, hi, dictionary.q):
            raw.extend([ZERO] * len(block.functions))
        else:
            raw.extend(inner_product(g, f) for g in block.functions)
    return Analysis(dictionary.q, dictionary.max_level, tuple(raw), dictionary.norms2, inner_product(f, f))


def synthesize(dictionary: OrthonormalDictionary, raw) -> DyadicPiecewisePoly:
    """``sum_i raw[i] / norms2[i] * atom_i`` (inverse of :func:`analyze` on ``V_K``)."""
    out = DyadicPiecewisePoly.zero()
    for r, g, n in zip(raw, dictionary.atoms, dictionary.norms2):
        if r:
            out = out + g * (r / n)
    return out.simplify()
