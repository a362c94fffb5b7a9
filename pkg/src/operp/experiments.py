"""Kernel search for polynomials separating consecutive levels, and sweep bundles."""

from __future__ import annotations

import json
import time
import traceback
from dataclasses import dataclass, field
from itertools import product as _iproduct
from pathlib import Path

from . import __version__
from .algebra import DEFAULT_TERM_BUDGET, ContractError, ExpansionBudgetError, TensorElement
from .linalg import IncrementalKernel
from .models import build_M1, tower
from .polynomials import MonomialEvaluator, StarPolynomial, Var, poly_eval

BASIS_CAP = 10 ** 5
DEGREE_CAP = 3
KERNEL_LEG_CAP = 8


def monomial_basis(N: int, d: int, include_adjoints: bool = False, cap: int = BASIS_CAP) -> list[tuple]:
    """All monomials of length ≤ d, by length and then lexicographically."""
    if d < 0:
        raise ContractError("degree bound must be non-negative")
    letters = [Var(i, j, s) for i in range(N) for j in range(N)
               for s in ((False, True) if include_adjoints else (False,))]
    size = sum(len(letters) ** k for k in range(d + 1))
    if size > cap:
        raise ExpansionBudgetError("monomial basis", size, cap)
    out = []
    for k in range(d + 1):
        out.extend(_iproduct(letters, repeat=k))
    return out


@dataclass
class EvaluationMatrix:
    """Sparse exact matrix: column j holds the coordinates of ``basis[j](M)``."""
    rows: list
    columns: list
    basis: list
    legs: int

    @property
    def shape(self) -> tuple:
        return len(self.rows), len(self.columns)

    def column_element(self, j: int) -> TensorElement:
        return TensorElement(self.legs, [(self.rows[r], c) for r, c in self.columns[j].items()])

    def to_dense(self) -> list[list]:
        out = [[0] * len(self.columns) for _ in self.rows]
        for j, col in enumerate(self.columns):
            for r, c in col.items():
                out[r][j] = c
        return out


def evaluation_matrix(M, basis, budget: int | None = DEFAULT_TERM_BUDGET) -> EvaluationMatrix:
    ev = MonomialEvaluator(M)
    row_index: dict = {}
    rows: list = []
    cols = []
    for mono in basis:
        x = ev(mono, budget)
        col = {}
        for tw, c in x.terms:
            r = row_index.get(tw)
            if r is None:
                r = row_index[tw] = len(rows)
                rows.append(tw)
            col[r] = c
        cols.append(col)
    return EvaluationMatrix(rows, cols, list(basis), ev.M.legs)


def _combination(basis, vec: dict) -> StarPolynomial:
    return StarPolynomial([(basis[j], c) for j, c in vec.items()])


@dataclass
class KernelCertificate:
    """``P(M_n) = 0`` but ``P(M_{n+1}) != 0``, witnessed by a tensor word."""
    N: int
    track: str
    n: int
    d: int
    polynomial: StarPolynomial
    witness_word: tuple
    witness_coef: object
    L: int | None = None

    def verify(self, Mn, Mn1) -> bool:
        """Re-evaluate from scratch on the given levels."""
        if not poly_eval(self.polynomial, Mn).is_zero():
            return False
        y = poly_eval(self.polynomial, Mn1)
        return y.coefficient(self.witness_word) == self.witness_coef != 0

    def verify_from_caches(self, directory) -> bool:
        from .formats import cache_name, load_matrix
        d = Path(directory)
        Mn = load_matrix(d / cache_name(self.track, self.N, self.n, self.L))
        Mn1 = load_matrix(d / cache_name(self.track, self.N, self.n + 1, self.L))
        return self.verify(Mn, Mn1)

    def to_json(self) -> dict:
        from .formats import polynomial_to_json, rational_to_json, tensor_word_to_json
        return {"N": self.N, "track": self.track, "L": self.L, "n": self.n, "d": self.d,
                "polynomial": polynomial_to_json(self.polynomial),
                "witness": {"word": tensor_word_to_json(self.witness_word),
                            "coef": rational_to_json(self.witness_coef)}}

    @classmethod
    def from_json(cls, doc: dict) -> "KernelCertificate":
        from .algebra import parse_word
        from .formats import polynomial_from_json, rational_from_json
        w = doc["witness"]
        return cls(doc["N"], doc["track"], doc["n"], doc["d"], polynomial_from_json(doc["polynomial"]),
                   tuple(parse_word(s) for s in w["word"]), rational_from_json(w["coef"]), doc.get("L"))


@dataclass
class KernelSearchResult:
    N: int
    track: str
    n: int
    d: int
    basis_size: int
    nullity_n: int
    nullity_n1: int
    certificates: list = field(default_factory=list)
    L: int | None = None

    @property
    def shrinks(self) -> bool:
        return self.nullity_n1 <= self.nullity_n

    def to_json(self) -> dict:
        return {"N": self.N, "track": self.track, "L": self.L, "n": self.n, "d": self.d,
                "basis_size": self.basis_size, "nullity_n": self.nullity_n, "nullity_n1": self.nullity_n1,
                "certificates": [c.to_json() for c in self.certificates]}


def _levels(track: str, N: int, n: int, L: int | None, budget):
    M1 = build_M1(track, N, L)
    legs = M1.legs * (n + 1)
    if legs > KERNEL_LEG_CAP:
        raise ExpansionBudgetError(f"level {n + 1} legs", legs, KERNEL_LEG_CAP)
    return tower(M1, n, budget), tower(M1, n + 1, budget)


def kernel_search(N: int = 4, track: str = "rr", n: int = 1, d: int = 1, L: int | None = None,
                  include_adjoints: bool = False, budget: int | None = DEFAULT_TERM_BUDGET,
                  cache_dir=None) -> KernelSearchResult:
    """Exact kernel of the level-n evaluation map in degree ≤ d, replayed at level n+1.

    Kernel vectors with nonzero image at level n+1 become certificates.  An
    empty certificate list is a finding about this (n, d) only.
    """
    if d > DEGREE_CAP:
        raise ExpansionBudgetError("degree", d, DEGREE_CAP)
    Mn, Mn1 = _levels(track, N, n, L, budget)
    if cache_dir is not None:
        from .formats import cache_name, save_matrix
        for k, M in ((n, Mn), (n + 1, Mn1)):
            save_matrix(Path(cache_dir) / cache_name(track, N, k, L), M, track=track, n=k, L=L)
    basis = monomial_basis(N, d, include_adjoints)
    E = evaluation_matrix(Mn, basis, budget)
    E1 = evaluation_matrix(Mn1, basis, budget)
    kn, kn1 = IncrementalKernel(), IncrementalKernel()
    for j in range(len(basis)):
        kn.add(E.columns[j])
        kn1.add(E1.columns[j])
    certs = []
    for vec in kn.kernel_vectors():
        P = _combination(basis, vec)
        y = TensorElement(E1.legs, [])
        y = sum((E1.column_element(j) * c for j, c in vec.items()), y)
        if not y.is_zero():
            tw, c = y.terms[0]
            certs.append(KernelCertificate(N, track, n, d, P, tw, c, L))
    return KernelSearchResult(N, track, n, d, len(basis), kn.nullity, kn1.nullity, certs, L)


# -- sweeps -------------------------------------------------------------------

SWEEP_TASKS = ("magic", "separation", "nonvanishing", "coassoc", "relations", "norms", "monotone", "kernel")


@dataclass
class TaskResult:
    name: str
    ok: bool
    report: dict
    wall_ms: float
    error: str | None = None


def _task_magic(cfg, inject):
    from .models import is_magic
    M = inject["magic"] if "magic" in inject else tower(build_M1(cfg.track, cfg.N, cfg.L), cfg.n)
    rep = is_magic(M)
    return rep.ok, {"ok": rep.ok, "violation": rep.violation, "location": rep.location}


def _task_separation(cfg, inject):
    from .morphisms import separation_report
    rep = separation_report(cfg.N, cfg.L)
    return rep.is_identity, rep.to_json()


def _task_nonvanishing(cfg, inject):
    from .models import build_R, sigma_product
    from .morphisms import all_perms
    M = inject["nonvanishing"] if "nonvanishing" in inject else tower(build_R(), 3)
    zero = [list(s) for s in all_perms(M.N) if sigma_product(M, s).is_zero()]
    return not zero, {"count": len(all_perms(M.N)), "zero_products": [[i + 1 for i in s] for s in zero]}


def _random_polys(cfg, count, degree):
    import random
    from .polynomials import random_polynomial
    rng = random.Random(cfg.seed)
    return [random_polynomial(rng, 4, rng.randint(0, degree)) for _ in range(count)]


def _task_coassoc(cfg, inject):
    from .numerics import coassoc_check
    polys = _random_polys(cfg, cfg.samples, 3)
    bad = [str(P) for P in polys if not coassoc_check(P, 1)]
    return not bad, {"checked": len(polys), "failures": bad}


def _task_relations(cfg, inject):
    from .partitions import check_relations, preset_SNplus
    M = inject["relations"] if "relations" in inject else tower(build_M1(cfg.track, cfg.N, cfg.L), cfg.n)
    reps = check_relations(preset_SNplus(M.N), M)
    return all(r.holds for r in reps), {"reports": [r.to_json() for r in reps]}


def _task_norms(cfg, inject):
    from .numerics import norm_oracles
    reps = norm_oracles(grid=cfg.grid, refine=cfg.refine)
    return all(r["ok"] for r in reps), {"reports": reps}


def _task_monotone(cfg, inject):
    from .numerics import seminorm_sequence
    polys = _random_polys(cfg, cfg.samples, 2)
    rows = []
    for P in polys:
        es = seminorm_sequence(P, cfg.n_max, grid=cfg.grid, refine=cfg.refine)
        rows.append({"polynomial": str(P), "values": [e.value for e in es],
                     "monotone": all(a.value <= b.value for a, b in zip(es, es[1:]))})
    return all(r["monotone"] for r in rows), {"sequences": rows}


def _task_kernel(cfg, inject):
    res = kernel_search(cfg.N, cfg.track, cfg.n, cfg.degree, cfg.L, cache_dir=cfg.cache_dir)
    return res.shrinks, res.to_json()


_RUNNERS = {"magic": _task_magic, "separation": _task_separation, "nonvanishing": _task_nonvanishing,
            "coassoc": _task_coassoc, "relations": _task_relations, "norms": _task_norms,
            "monotone": _task_monotone, "kernel": _task_kernel}


def run_task(name: str, config, inject: dict | None = None) -> tuple[bool, dict]:
    if name not in _RUNNERS:
        raise ContractError(f"unknown sweep task {name!r}")
    return _RUNNERS[name](config, inject or {})


@dataclass
class Bundle:
    results: list
    index: dict
    directory: Path | None = None

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)


def sweep(config, inject: dict | None = None) -> Bundle:
    """Run the configured tasks; a crashing task is recorded as red and the rest still run.

    ``inject`` replaces the matrix used by a task (keyed by task name), which
    is how fault injection is exercised.
    """
    inject = inject or {}
    results = []
    for name in config.tasks:
        if name not in _RUNNERS:
            raise ContractError(f"unknown sweep task {name!r}")
        t0 = time.perf_counter()
        try:
            ok, rep = _RUNNERS[name](config, inject)
            err = None
        except Exception as e:  # captured per task by design
            ok, rep, err = False, {}, f"{type(e).__name__}: {e}"
            rep["traceback"] = traceback.format_exc(limit=3)
        results.append(TaskResult(name, bool(ok), rep, (time.perf_counter() - t0) * 1e3, err))
    index = {"version": __version__, "config": config.to_json(), "seed": config.seed,
             "ok": all(r.ok for r in results),
             "tasks": [{"name": r.name, "ok": r.ok, "file": f"{r.name}.json", "wall_ms": round(r.wall_ms, 3),
                        **({"error": r.error} if r.error else {})} for r in results]}
    out = None
    if config.out is not None:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        for r in results:
            (out / f"{r.name}.json").write_text(json.dumps({"task": r.name, "ok": r.ok, "report": r.report,
                                                            "error": r.error}, sort_keys=True, indent=1) + "\n")
        (out / "index.json").write_text(json.dumps(index, sort_keys=True, indent=1) + "\n")
    return Bundle(results, index, out)
