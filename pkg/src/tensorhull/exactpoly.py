"""Exact piecewise polynomials on dyadic partitions of [0, 1].

Coefficients are :class:`fractions.Fraction` throughout, so integrals, Gram
matrices and orthogonality relations are exact rational identities rather
than floating point approximations.

A :class:`DyadicPiecewisePoly` stores breakpoints ``0 = b_0 < ... < b_n = 1``
and one polynomial per half-open piece ``[b_i, b_{i+1})``, written in the
global variable ``u`` with ascending coefficients. The point ``u = 1`` is
assigned to the last piece.
"""

from __future__ import annotations

import bisect
import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .errors import DomainError

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions, floats and ``"p/q"`` strings exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def is_dyadic(x: Fraction) -> bool:
    d = x.denominator
    return d & (d - 1) == 0


def dyadic(j: int, k: int) -> Fraction:
    """The dyadic rational ``j * 2**-k``."""
    return Fraction(j, 1 << k) if k >= 0 else Fraction(j * (1 << -k))


# --- dense polynomial helpers (tuples of Fractions, ascending degree) --------


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def poly_scale(a, s):
    if s == 0:
        return ()
    return tuple(x * s for x in a)


def poly_sub(a, b):
    return poly_add(a, poly_scale(b, -1))


def poly_mul(a, b):
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_eval(a, u):
    acc = ZERO
    for c in reversed(a):
        acc = acc * u + c
    return acc


def poly_integrate(a, lo, hi):
    """Exact ``int_lo^hi a(u) du``."""
    acc_hi = ZERO
    acc_lo = ZERO
    for i in range(len(a) - 1, -1, -1):
        c = a[i] / (i + 1)
        acc_hi = (acc_hi + c) * hi
        acc_lo = (acc_lo + c) * lo
    return acc_hi - acc_lo


def poly_affine(a, scale, shift):
    """Coefficients of ``u -> a(scale * (u - shift))``."""
    # a(s u - s c) = sum_i a_i sum_j C(i, j) s^j u^j (-s c)^(i-j)
    if not a:
        return ()
    out = [ZERO] * len(a)
    offset = -scale * shift
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j in range(i + 1):
            out[j] += ai * comb(i, j) * scale**j * offset ** (i - j)
    return _trim(out)


def poly_shifted_power(v, n):
    """Coefficients of ``(u - v)**n``."""
    return _trim(comb(n, j) * (-v) ** (n - j) for j in range(n + 1))


# --- piecewise polynomials -----------------------------------------------------


@dataclass(frozen=True)
class DyadicPiecewisePoly:
    """A piecewise polynomial on a dyadic partition of [0, 1].

    Parameters
    ----------
    breakpoints : sequence
        Strictly increasing dyadic rationals starting at 0 and ending at 1.
    pieces : sequence of sequences
        One coefficient list per piece, ascending degree in ``u``.
    """

    breakpoints: tuple
    pieces: tuple

    def __post_init__(self):
        bps = tuple(as_fraction(b) for b in self.breakpoints)
        pcs = tuple(_trim(as_fraction(c) for c in p) for p in self.pieces)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise DomainError("breakpoints must start at 0 and end at 1")
        for a, b in zip(bps, bps[1:]):
            if not a < b:
                raise DomainError("breakpoints must be strictly increasing")
        for b in bps:
            if not is_dyadic(b):
                raise DomainError(f"breakpoint {b} is not dyadic")
        if len(pcs) != len(bps) - 1:
            raise DomainError("need exactly one piece per interval")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pcs)

    @classmethod
    def _raw(cls, bps, pcs):
        # trusted constructor for internal use; inputs already validated
        obj = object.__new__(cls)
        object.__setattr__(obj, "breakpoints", bps)
        object.__setattr__(obj, "pieces", pcs)
        return obj

    @classmethod
    def constant(cls, c=1):
        return cls((0, 1), ((c,),))

    @classmethod
    def polynomial(cls, coeffs):
        return cls((0, 1), (tuple(coeffs),))

    @classmethod
    def zero(cls):
        return cls((0, 1), ((),))

    @classmethod
    def indicator(cls, lo, hi, coeffs=(1,)):
        """``coeffs``-polynomial on ``[lo, hi)`` and zero elsewhere."""
        lo, hi = as_fraction(lo), as_fraction(hi)
        if not 0 <= lo < hi <= 1:
            raise DomainError("need 0 <= lo < hi <= 1")
        bps, pcs = [ZERO], []
        if lo > 0:
            bps.append(lo)
            pcs.append(())
        bps.append(hi)
        pcs.append(tuple(coeffs))
        if hi < 1:
            bps.append(ONE)
            pcs.append(())
        return cls(tuple(bps), tuple(pcs))

    # -- basic queries --

    @property
    def n_pieces(self):
        return len(self.pieces)

    @property
    def degree(self):
        return max((len(p) - 1 for p in self.pieces), default=-1)

    def is_zero(self):
        return all(not p for p in self.pieces)

    def piece_index(self, u) -> int:
        u = as_fraction(u)
        if u < 0 or u > 1:
            raise DomainError(f"u = {u} outside [0, 1]")
        i = bisect.bisect_right(self.breakpoints, u) - 1
        return min(i, len(self.pieces) - 1)

    def __call__(self, u):
        return evaluate(self, u)

    # -- algebra --

    def refine(self, breakpoints) -> "DyadicPiecewisePoly":
        """Same function on the common refinement with ``breakpoints``."""
        extra = sorted(set(as_fraction(b) for b in breakpoints) - set(self.breakpoints))
        if not extra:
            return self
        bps = tuple(sorted(set(self.breakpoints).union(extra)))
        return DyadicPiecewisePoly(bps, tuple(self.pieces[self.piece_index(b)] for b in bps[:-1]))

    def simplify(self) -> "DyadicPiecewisePoly":
        """Merge adjacent pieces carrying the same polynomial."""
        bps, pcs = [self.breakpoints[0]], []
        for b, p in zip(self.breakpoints[1:], self.pieces):
            if pcs and pcs[-1] == p:
                bps[-1] = b
            else:
                pcs.append(p)
                bps.append(b)
        return DyadicPiecewisePoly._raw(tuple(bps), tuple(pcs))

    def _combine(self, other, op):
        bps = _merge(self.breakpoints, other.breakpoints)
        pcs = []
        i = j = 0
        for lo in bps[:-1]:
            while self.breakpoints[i + 1] <= lo:
                i += 1
            while other.breakpoints[j + 1] <= lo:
                j += 1
            pcs.append(op(self.pieces[i], other.pieces[j]))
        return DyadicPiecewisePoly._raw(bps, tuple(pcs))

    def __add__(self, other):
        return self._combine(other, poly_add)

    def __sub__(self, other):
        return self._combine(other, poly_sub)

    def __mul__(self, other):
        if isinstance(other, DyadicPiecewisePoly):
            return self._combine(other, poly_mul)
        s = as_fraction(other)
        return DyadicPiecewisePoly._raw(self.breakpoints, tuple(poly_scale(p, s) for p in self.pieces))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def equals(self, other) -> bool:
        """Pointwise equality as functions (ignores redundant breakpoints)."""
        return (self - other).is_zero()

    # -- serialization --

    def to_json(self) -> dict:
        return {
            "breakpoints": [str(b) for b in self.breakpoints],
            "pieces": [[str(c) for c in p] for p in self.pieces],
        }

    @classmethod
    def from_json(cls, data) -> "DyadicPiecewisePoly":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(data["breakpoints"]), tuple(tuple(p) for p in data["pieces"]))

    def sample(self, n: int):
        """Values on the uniform grid ``u = i / (n - 1)``, ``i = 0..n-1``, as floats."""
        if n < 2:
            raise DomainError("need at least two grid points")
        us = [Fraction(i, n - 1) for i in range(n)]
        return [float(u) for u in us], [float(evaluate(self, u)) for u in us]

    def to_csv(self, n: int, scale: float = 1.0) -> str:
        us, fs = self.sample(n)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "f(u)"])
        for u, f in zip(us, fs):
            w.writerow([f"{u:.17g}", f"{f * scale:.17g}"])
        return buf.getvalue()


def _is_power_of_two(x: Fraction) -> bool:
    n, d = x.numerator, x.denominator
    if n <= 0:
        return False
    return (n == 1 and d & (d - 1) == 0) or (d == 1 and n & (n - 1) == 0)


def _merge(a, b):
    if a is b or a == b:
        return a
    return tuple(sorted(set(a).union(b)))


def evaluate(f: DyadicPiecewisePoly, u) -> Fraction:
    """Value of ``f`` at ``u`` in [0, 1]; ``u = 1`` uses the last piece."""
    u = as_fraction(u)
    return poly_eval(f.pieces[f.piece_index(u)], u)


def inner_product(f: DyadicPiecewisePoly, g: DyadicPiecewisePoly) -> Fraction:
    """Exact ``int_0^1 f g du`` over the common refinement of both partitions."""
    fb, gb = f.breakpoints, g.breakpoints
    fp, gp = f.pieces, g.pieces
    i = j = 0
    lo = ZERO
    total = ZERO
    nf, ng = len(fp), len(gp)
    while i < nf and j < ng:
        hi_f, hi_g = fb[i + 1], gb[j + 1]
        hi = hi_f if hi_f < hi_g else hi_g
        a, b = fp[i], gp[j]
        if a and b:
            total += poly_integrate(poly_mul(a, b), lo, hi)
        lo = hi
        if hi_f == hi:
            i += 1
        if hi_g == hi:
            j += 1
    return total


def norm2(f: DyadicPiecewisePoly) -> Fraction:
    return inner_product(f, f)


def affine_pullback(f: DyadicPiecewisePoly, scale, shift, support) -> DyadicPiecewisePoly:
    """``u -> f(scale * (u - shift))`` on ``support = (lo, hi)``, zero elsewhere.

    ``scale`` must be an integer power of two and ``shift`` dyadic, which keeps
    every breakpoint of the result dyadic.
    """
    scale, shift = as_fraction(scale), as_fraction(shift)
    lo, hi = (as_fraction(s) for s in support)
    if not _is_power_of_two(scale):
        raise DomainError(f"scale {scale} is not a power of two")
    if not is_dyadic(shift):
        raise DomainError(f"shift {shift} is not dyadic")
    if not 0 <= lo < hi <= 1:
        raise DomainError("support must be a nonempty subinterval of [0, 1]")
    a, b = scale * (lo - shift), scale * (hi - shift)
    if a < 0 or b > 1:
        raise DomainError("support is not mapped into [0, 1]")

    inner = [x for x in f.breakpoints if a < x < b]
    cuts = [lo] + [shift + x / scale for x in inner] + [hi]
    bps, pcs = [ZERO], []
    if lo > 0:
        bps.append(lo)
        pcs.append(())
    for c0, c1 in zip(cuts, cuts[1:]):
        src = f.pieces[f.piece_index(scale * (c0 - shift))]
        pcs.append(poly_affine(src, scale, shift))
        bps.append(c1)
    if hi < 1:
        bps.append(ONE)
        pcs.append(())
    return DyadicPiecewisePoly(tuple(bps), tuple(pcs))


def restrict(f: DyadicPiecewisePoly, lo, hi) -> DyadicPiecewisePoly:
    """``f`` on ``[lo, hi)`` and zero elsewhere."""
    return affine_pullback(f, 1, 0, (lo, hi))


def integrate(f: DyadicPiecewisePoly, lo=0, hi=1) -> Fraction:
    return inner_product(f, DyadicPiecewisePoly.indicator(lo, hi))


def gram_matrix(fs: Sequence[DyadicPiecewisePoly]):
    """Exact Gram matrix as a list of lists of Fractions."""
    n = len(fs)
    G = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            G[i][j] = G[j][i] = inner_product(fs[i], fs[j])
    return G
