"""Angle-parametrized representations, spectral norms and norm estimation.

Every leg is represented on C^2 with ``p -> [[1,0],[0,0]]`` and
``q -> [[c², cs],[cs, s²]]`` for an angle θ in [0, π/2] (c = cos θ, s = sin θ).
At the endpoints the leg representation splits into two characters
(θ = 0: χ11 ⊕ χ00, θ = π/2: χ10 ⊕ χ01).  :func:`point_norm` uses that
splitting exactly, which is what makes nested estimates comparable without
rounding noise.  All images are real matrices.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import product as _iproduct
from typing import Sequence

import numpy as np

from .algebra import (
    CHI00,
    CHI01,
    CHI10,
    CHI11,
    ContractError,
    TensorElement,
    char_eval_legs,
)

HALF_PI = math.pi / 2
DIMENSION_CAP = 12
DENSE_DIM = 256
MIN_STEP = 1e-8


class DimensionCapError(ContractError):
    pass


@dataclass(frozen=True)
class RepPoint:
    """One angle per leg, clamped to the closed cube [0, π/2]^k."""
    theta: tuple

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(min(max(float(t), 0.0), HALF_PI) for t in self.theta))

    def __len__(self):
        return len(self.theta)

    def lift(self, extra_legs: int) -> "RepPoint":
        """Append legs at θ = 0 (their χ11 summand is ν)."""
        return RepPoint(self.theta + (0.0,) * extra_legs)


def _cs(theta: float):
    if theta == 0.0:
        return 1.0, 0.0
    if theta == HALF_PI:
        return 0.0, 1.0
    return math.cos(theta), math.sin(theta)


_P2 = np.array([[1.0, 0.0], [0.0, 0.0]])


def letter_matrices(theta: float):
    c, s = _cs(theta)
    return _P2, np.array([[c * c, c * s], [c * s, s * s]])


def word_matrix(w: str, theta: float) -> np.ndarray:
    p, q = letter_matrices(theta)
    out = np.eye(2)
    for ch in w:
        out = out @ (p if ch == "P" else q)
    return out


def _word_batch(w: str, thetas: np.ndarray) -> np.ndarray:
    """``(B, 2, 2)`` images of one word at many angles (endpoints exact)."""
    B = thetas.shape[0]
    c = np.cos(thetas)
    s = np.sin(thetas)
    c[thetas == 0.0] = 1.0
    s[thetas == 0.0] = 0.0
    c[thetas == HALF_PI] = 0.0
    s[thetas == HALF_PI] = 1.0
    p = np.broadcast_to(_P2, (B, 2, 2))
    q = np.empty((B, 2, 2))
    q[:, 0, 0] = c * c
    q[:, 0, 1] = c * s
    q[:, 1, 0] = c * s
    q[:, 1, 1] = s * s
    out = np.broadcast_to(np.eye(2), (B, 2, 2)).copy()
    for ch in w:
        out = out @ (p if ch == "P" else q)
    return out


class KronSum:
    """Linear operator ``Σ c · A_1 ⊗ ... ⊗ A_k`` with 2×2 leg factors, applied without forming it."""

    def __init__(self, legs: int, terms: list):
        self.legs = legs
        self.terms = terms
        self.dim = 2 ** legs
        self.shape = (self.dim, self.dim)

    def _apply(self, v: np.ndarray, transpose: bool) -> np.ndarray:
        k = self.legs
        x = v.reshape((2,) * k)
        out = np.zeros_like(x)
        for c, mats in self.terms:
            y = x
            for j, A in enumerate(mats):
                A = A.T if transpose else A
                y = np.moveaxis(np.tensordot(A, y, axes=([1], [j])), 0, j)
            out += c * y
        return out.reshape(-1)

    def matvec(self, v):
        return self._apply(np.asarray(v, dtype=float), False)

    def rmatvec(self, v):
        return self._apply(np.asarray(v, dtype=float), True)

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for c, mats in self.terms:
            m = np.ones((1, 1))
            for A in mats:
                m = np.kron(m, A)
            out += c * m
        return out


def rep_eval(x: TensorElement, point, cap: int = DIMENSION_CAP, dense_dim: int = DENSE_DIM):
    """Image of ``x`` in the product representation at ``point``.

    Returns a dense ``ndarray`` below dimension ``dense_dim`` and a
    :class:`KronSum` operator from there on.
    """
    theta = point.theta if isinstance(point, RepPoint) else RepPoint(tuple(point)).theta
    if len(theta) != x.legs:
        raise ContractError(f"{len(theta)} angles for {x.legs} legs")
    if x.legs > cap:
        raise DimensionCapError(f"{x.legs} legs exceed the dimension cap {cap}")
    if 2 ** x.legs >= dense_dim:
        cache: dict = {}

        def leg(w, t):
            key = (w, t)
            if key not in cache:
                cache[key] = word_matrix(w, t)
            return cache[key]
        return KronSum(x.legs, [(float(c), [leg(w, t) for w, t in zip(tw, theta)]) for tw, c in x.terms])
    return _Compiled(x).at_point(theta)


class _Compiled:
    """Dense coefficient tensor over the distinct words of each leg."""

    def __init__(self, x: TensorElement):
        self.legs = x.legs
        self.zero = not x.terms
        self.words = [sorted({tw[j] for tw, _ in x.terms}, key=lambda w: (len(w), w)) for j in range(x.legs)]
        index = [{w: a for a, w in enumerate(ws)} for ws in self.words]
        shape = tuple(max(len(ws), 1) for ws in self.words)
        C = np.zeros(shape)
        for tw, c in x.terms:
            C[tuple(index[j][w] for j, w in enumerate(tw))] += float(c)
        self.C = C

    def _contract(self, leg_mats: list) -> np.ndarray:
        """``leg_mats[j]`` has shape ``(W_j, B, 2, 2)``; returns ``(B, D, D)``."""
        k = self.legs
        if k == 0:
            return self.C.reshape(1, 1, 1)
        B = leg_mats[0].shape[1]
        # T: (B, D, D, W_j, ..., W_k)
        T = np.broadcast_to(self.C, (B, 1, 1) + self.C.shape)
        D = 1
        for j in range(k):
            V = leg_mats[j]
            rest = T.shape[4:]
            T = np.einsum("bxyw...,wbac->bxayc...", T, V, optimize=True)
            D *= 2
            T = T.reshape((B, D, D) + rest)
        return T

    def at_point(self, theta) -> np.ndarray:
        if self.zero:
            return np.zeros((2 ** self.legs, 2 ** self.legs))
        mats = [np.stack([word_matrix(w, t) for w in ws])[:, None] for ws, t in zip(self.words, theta)]
        return self._contract(mats)[0]

    def at_points(self, thetas: np.ndarray) -> np.ndarray:
        if self.zero:
            return np.zeros((thetas.shape[0], 2 ** self.legs, 2 ** self.legs))
        mats = [np.stack([_word_batch(w, thetas[:, j]) for w in ws]) for j, ws in enumerate(self.words)]
        return self._contract(mats)


def spectral_norm(op, tol: float = 1e-10, max_iter: int = 20000) -> float:
    """Largest singular value.  Dense below :data:`DENSE_DIM`, power iteration on ``op* op`` above."""
    if isinstance(op, KronSum):
        if op.dim < DENSE_DIM:
            return spectral_norm(op.toarray())
        return _power_norm(op, tol, max_iter)
    A = np.asarray(op)
    if A.size == 0:
        return 0.0
    if A.shape == (1, 1):
        return float(abs(A[0, 0]))
    if A.shape[0] == A.shape[1] and np.array_equal(A, A.conj().T):
        return float(np.max(np.abs(np.linalg.eigvalsh(A))))
    return float(np.linalg.norm(A, 2))


def _power_norm(op: KronSum, tol: float, max_iter: int) -> float:
    rng = np.random.default_rng(0)
    v = np.ones(op.dim) + 0.01 * rng.standard_normal(op.dim)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = op.rmatvec(op.matvec(v))
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(nw - lam) <= tol * nw:
            lam = nw
            break
        lam = nw
    return math.sqrt(lam)


def _batch_norms(mats: np.ndarray) -> np.ndarray:
    if mats.shape[1] == 1:
        return np.abs(mats[:, 0, 0])
    G = np.matmul(np.swapaxes(mats, 1, 2), mats)
    ev = np.linalg.eigvalsh(G)[:, -1]
    return np.sqrt(np.clip(ev, 0.0, None))


# -- point values with exact endpoint splitting ---------------------------------

_SPLIT = {0.0: (CHI11, CHI00), HALF_PI: (CHI10, CHI01)}


class PointEvaluator:
    """Deterministic norm of the image of one element at single points.

    Legs sitting at an endpoint are replaced by their two character summands
    (exact), the remaining legs are represented numerically, and the value is
    the maximum over the summands.
    """

    def __init__(self, x: TensorElement, cap: int = DIMENSION_CAP):
        if x.legs > cap:
            raise DimensionCapError(f"{x.legs} legs exceed the dimension cap {cap}")
        self.x = x
        self.evaluations = 0
        self._reduced: dict = {}

    def _component(self, assignment: tuple) -> _Compiled:
        hit = self._reduced.get(assignment)
        if hit is None:
            hit = _Compiled(char_eval_legs(self.x, dict(assignment)))
            self._reduced[assignment] = hit
        return hit

    def __call__(self, theta) -> float:
        theta = RepPoint(tuple(theta)).theta
        self.evaluations += 1
        ends = [j for j, t in enumerate(theta) if t in _SPLIT]
        inner = tuple(t for t in theta if t not in _SPLIT)
        best = 0.0
        for chars in _iproduct(*(_SPLIT[theta[j]] for j in ends)):
            comp = self._component(tuple(zip(ends, chars)))
            v = spectral_norm(comp.at_point(inner))
            if v > best:
                best = v
        return best


def point_norm(x: TensorElement, theta) -> float:
    return PointEvaluator(x)(theta)


# -- estimation --------------------------------------------------------------------

def default_grid(legs: int) -> int:
    if legs <= 2:
        return 33
    if legs <= 4:
        return 17
    if legs <= 6:
        return 9
    if legs <= 8:
        return 5
    return 3


def default_refine(legs: int) -> int:
    return 400 if legs <= 4 else 100


@dataclass
class NormEstimate:
    """Certified lower bound on the C*-norm, achieved at ``argmax``."""
    value: float
    argmax: RepPoint
    grid_size: int
    refinement_steps: int
    tolerance: float
    evaluations: int = 0
    grid_value: float = 0.0
    wall_ms: float = 0.0

    def to_json(self, element_id: str = "") -> dict:
        return {"element_id": element_id, "k": len(self.argmax), "grid": self.grid_size,
                "refine": self.refinement_steps, "value": self.value,
                "argmax_theta": list(self.argmax.theta), "wall_ms": self.wall_ms}


def grid_axis(G: int) -> np.ndarray:
    if G < 2:
        raise ContractError("grid needs at least the two endpoints")
    ax = np.linspace(0.0, HALF_PI, G)
    ax[-1] = HALF_PI
    return ax


def grid_scan(x: TensorElement, G: int, chunk: int = 1 << 16):
    """Batch-evaluate the full product grid; returns ``(best_value, best_theta, values)``."""
    k = x.legs
    if k == 0:
        v = abs(float(x.coefficient(()))) if x.terms else 0.0
        return v, (), np.array([v])
    ax = grid_axis(G)
    comp = _Compiled(x)
    n = G ** k
    values = np.empty(n)
    for start in range(0, n, chunk):
        idx = np.arange(start, min(n, start + chunk))
        pts = np.stack(np.unravel_index(idx, (G,) * k), axis=1)
        values[start:start + len(idx)] = _batch_norms(comp.at_points(ax[pts]))
    best = int(np.argmax(values))
    theta = tuple(float(ax[i]) for i in np.unravel_index(best, (G,) * k))
    return float(values[best]), theta, values


def coordinate_search(f, start, value: float, step: float, budget: int, min_step: float = MIN_STEP):
    """Derivative-free ascent: try ±step on each coordinate, halve the step when stuck."""
    x = list(start)
    fx = value
    evals = 0
    while step >= min_step and evals < budget:
        improved = False
        for j in range(len(x)):
            for sgn in (1.0, -1.0):
                y = list(x)
                y[j] = min(max(x[j] + sgn * step, 0.0), HALF_PI)
                if y[j] == x[j]:
                    continue
                fy = f(y)
                evals += 1
                if fy > fx:
                    x, fx = y, fy
                    improved = True
                    break
                if evals >= budget:
                    break
            if evals >= budget:
                break
        if not improved:
            step /= 2.0
    return tuple(x), fx, evals


def norm_estimate(x: TensorElement, grid: int | None = None, refine: int | None = None,
                  seeds: Sequence = (), tol: float = MIN_STEP, candidates: int = 8) -> NormEstimate:
    """Grid scan over [0, π/2]^k followed by coordinate-search refinement.

    ``seeds`` are extra points that are always evaluated exactly and compete
    with the grid maximum as starting points.  The returned value is attained
    at ``argmax`` by :class:`PointEvaluator`; exact ties go to the
    lexicographically smallest angle vector.
    """
    t0 = time.perf_counter()
    k = x.legs
    if k > DIMENSION_CAP:
        raise DimensionCapError(f"{k} legs exceed the dimension cap {DIMENSION_CAP}")
    G = default_grid(k) if grid is None else grid
    budget = default_refine(k) if refine is None else refine
    f = PointEvaluator(x)
    if k == 0:
        v = f(())
        return NormEstimate(v, RepPoint(()), G, budget, tol, f.evaluations, v,
                            (time.perf_counter() - t0) * 1e3)
    gbest, _, values = grid_scan(x, G)
    ax = grid_axis(G)
    # the batch path can differ from point values in the last bits: re-evaluate near-maximal points
    order = np.argsort(-values, kind="stable")[:candidates]
    near = [i for i in order if values[i] >= gbest - 1e-9] or [int(order[0])]
    pts = [tuple(float(ax[a]) for a in np.unravel_index(int(i), (G,) * k)) for i in sorted(near)]
    pts += [RepPoint(tuple(s)).theta for s in seeds]
    best_theta, best_val = None, -1.0
    for th in pts:
        v = f(th)
        if v > best_val or (v == best_val and th < best_theta):
            best_theta, best_val = th, v
    step = (ax[1] - ax[0]) / 2.0
    theta, val, evals = coordinate_search(f, best_theta, best_val, step, budget, tol)
    return NormEstimate(val, RepPoint(theta), G, budget, tol, f.evaluations, gbest,
                        (time.perf_counter() - t0) * 1e3)


# -- finite-level probes ---------------------------------------------------------------

def _rr_levels(n_max: int):
    from .models import build_M1_rr, tower
    M1 = build_M1_rr()
    return M1, [tower(M1, n) for n in range(1, n_max + 1)]


def seminorm_sequence(P, n_max: int, grid: int | None = None, refine: int | None = None,
                      track: str = "rr") -> list[NormEstimate]:
    """Estimates ``e_n`` of ``‖P(M_n)‖`` on the R-track for ``n = 1..n_max``.

    The argmax at level n, extended by θ = 0 on the new legs, is a seed at
    level n+1; the χ11 summand there is exactly ``P(M_n)``, so
    ``e_n <= e_{n+1}`` holds in floating point, not just approximately.
    """
    from .polynomials import poly_eval
    if track != "rr":
        raise ContractError("seminorm sequences are available on the rr track only")
    M1, levels = _rr_levels(n_max)
    if M1.legs * n_max > DIMENSION_CAP:
        raise DimensionCapError(f"{M1.legs * n_max} legs exceed the dimension cap {DIMENSION_CAP}")
    out: list[NormEstimate] = []
    for M in levels:
        x = poly_eval(P, M)
        seeds = [out[-1].argmax.lift(M1.legs).theta] if out else []
        out.append(norm_estimate(x, grid=grid, refine=refine, seeds=seeds))
    return out


def coassoc_check(P, n: int = 1) -> bool:
    """Exact check of ``P(M_{2n}) == P`` evaluated through ``M_n ⊤ M_n`` split into halves."""
    from .models import tower
    from .polynomials import poly_eval, poly_eval_operp
    M1, levels = _rr_levels(n)
    Mn = levels[-1]
    return poly_eval(P, tower(M1, 2 * n)) == poly_eval_operp(P, Mn, Mn)


@dataclass
class ComultProbe:
    lhs: NormEstimate
    rhs: NormEstimate

    @property
    def increasing(self) -> bool:
        return self.rhs.value >= self.lhs.value

    def to_json(self) -> dict:
        return {"lhs": self.lhs.to_json("P(M_n)"), "rhs": self.rhs.to_json("P(M_n operp M_n)"),
                "rhs_ge_lhs": self.increasing}


def comult_inequality_probe(P, n: int = 1, grid: int | None = None, refine: int | None = None) -> ComultProbe:
    """Compare ``e(P, M_n)`` with ``e(P, M_n ⊤ M_n)``.

    The right side equals the estimate at level 2n, so at finite level the
    meaningful direction is ``rhs >= lhs``, which the lifted seed guarantees.
    """
    from .polynomials import poly_eval, poly_eval_operp
    M1, levels = _rr_levels(n)
    Mn = levels[-1]
    lhs = norm_estimate(poly_eval(P, Mn), grid=grid, refine=refine)
    x = poly_eval_operp(P, Mn, Mn)
    rhs = norm_estimate(x, grid=grid, refine=refine, seeds=[lhs.argmax.lift(x.legs - Mn.legs).theta])
    return ComultProbe(lhs, rhs)


CSV_FIELDS = ("element_id", "k", "grid", "refine", "value", "argmax_theta", "wall_ms")


def reports_to_csv(reports: Sequence[dict], path=None) -> str:
    """CSV table of norm reports; angles joined by spaces."""
    import csv
    import io
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        row = {k: r.get(k) for k in CSV_FIELDS}
        row["argmax_theta"] = " ".join(repr(t) for t in r.get("argmax_theta", []))
        w.writerow(row)
    text = buf.getvalue()
    if path is not None:
        from pathlib import Path
        Path(path).write_text(text)
    return text


def norm_oracles(grid: int | None = None, refine: int | None = None) -> list[dict]:
    """Estimates for elements whose norms are known in closed form."""
    from .algebra import P, Q, tensor
    comm = P * Q - Q * P
    cases = [("commutator", TensorElement.from_algebra(comm), 0.5, 1e-6),
             ("pqp", TensorElement.from_algebra(P * Q * P), 1.0, 1e-3),
             ("p_tensor_commutator", tensor(P, comm), 0.5, 1e-3)]
    out = []
    for name, x, expected, tol in cases:
        e = norm_estimate(x, grid=grid, refine=refine)
        rep = e.to_json(name)
        rep.update(expected=expected, tolerance=tol, ok=abs(e.value - expected) <= tol)
        out.append(rep)
    return out
