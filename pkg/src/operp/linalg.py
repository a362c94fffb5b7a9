"""Exact sparse linear algebra over the rationals (fraction-free elimination)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

SparseVec = dict  # row index -> int


def integer_column(col: dict) -> tuple[dict, int]:
    """Scale a rational column to coprime integers; returns ``(ints, scale)`` with ``ints = scale * col``."""
    den = 1
    for c in col.values():
        den = lcm(den, Fraction(c).denominator)
    ints = {r: int(Fraction(c) * den) for r, c in col.items() if c != 0}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    if g > 1:
        ints = {r: v // g for r, v in ints.items()}
    return ints, Fraction(den, g or 1)


def _content(*vecs: dict) -> int:
    g = 0
    for v in vecs:
        for x in v.values():
            g = gcd(g, x)
            if g == 1:
                return 1
    return g


def _combine(a: int, x: dict, b: int, y: dict) -> dict:
    """``a*x - b*y`` with zero entries dropped."""
    out = {r: a * v for r, v in x.items()}
    for r, v in y.items():
        w = out.get(r, 0) - b * v
        if w:
            out[r] = w
        else:
            out.pop(r, None)
    return out


class IncrementalKernel:
    """Adds columns one at a time and records every linear dependency exactly.

    Each stored basis vector keeps its integer combination of the original
    (integer-scaled) columns.  Elimination steps are ``v <- p*v - v_r*b`` with
    the pivot ``p = b_r``, followed by division by the common content, so all
    intermediate values stay integers.
    """

    def __init__(self):
        self.pivots: dict = {}  # pivot row -> (vector, combination)
        self.kernel: list[dict] = []  # combinations over integer-scaled columns
        self.scales: list[Fraction] = []
        self.ncols = 0

    def add(self, col: dict) -> dict | None:
        j = self.ncols
        self.ncols += 1
        vec, scale = integer_column(col)
        self.scales.append(scale)
        combo = {j: 1}
        while vec:
            r = min(vec)
            hit = self.pivots.get(r)
            if hit is None:
                g = _content(vec, combo)
                if g > 1:
                    vec = {k: v // g for k, v in vec.items()}
                    combo = {k: v // g for k, v in combo.items()}
                self.pivots[r] = (vec, combo)
                return None
            b, bc = hit
            p, vr = b[r], vec[r]
            vec = _combine(p, vec, vr, b)
            combo = _combine(p, combo, vr, bc)
            g = _content(vec, combo)
            if g > 1:
                vec = {k: v // g for k, v in vec.items()}
                combo = {k: v // g for k, v in combo.items()}
        if combo.get(j, 0) < 0:
            combo = {k: -v for k, v in combo.items()}
        self.kernel.append(combo)
        return combo

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def nullity(self) -> int:
        return len(self.kernel)

    def kernel_vectors(self) -> list[dict]:
        """Kernel basis in original column coordinates (rational, sparse)."""
        out = []
        for combo in self.kernel:
            v = {k: c * self.scales[k] for k, c in combo.items()}
            den = 1
            for x in v.values():
                den = lcm(den, Fraction(x).denominator)
            v = {k: int(x * den) for k, x in v.items()}
            g = _content(v)
            out.append({k: x // g for k, x in sorted(v.items()) if x})
        return out


def nullspace(columns: Sequence[dict]) -> list[dict]:
    """Exact kernel basis of the matrix whose sparse columns are given."""
    ik = IncrementalKernel()
    for col in columns:
        ik.add(col)
    return ik.kernel_vectors()


def rank(columns: Sequence[dict]) -> int:
    ik = IncrementalKernel()
    for col in columns:
        ik.add(col)
    return ik.rank
