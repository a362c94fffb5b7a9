"""Command-line entry point: ``operp <command> [options]``.

Exit status is 0 when every check passes, 1 when any check fails and 2 for
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from .algebra import ContractError, ExpansionBudgetError
from .config import ConfigError, RunConfig, read_config_file
from .formats import CACHE_ENV, CacheVersionError, cache_dir, cache_name, load_matrix, save_matrix, write_json

COMMANDS = ("build", "verify-magic", "verify-separation", "verify-nonvanishing", "verify-coassoc",
            "relations", "norm", "monotone", "kernel-search", "sweep")

_FLAGS = ("N", "track", "L", "n", "n_max", "degree", "grid", "refine", "cache_dir", "seed", "out",
          "threads", "samples", "tasks")


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="key = value file with run settings")
    parser.add_argument("--N", type=int)
    parser.add_argument("--track", choices=("rr", "general"))
    parser.add_argument("--L", type=int)
    parser.add_argument("--n", type=int, help="tower level")
    parser.add_argument("--n-max", dest="n_max", type=int)
    parser.add_argument("--degree", type=int)
    parser.add_argument("--grid", type=int, help="grid points per leg")
    parser.add_argument("--refine", type=int, help="refinement evaluation budget")
    parser.add_argument("--cache-dir", dest="cache_dir")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="directory for JSON reports")
    parser.add_argument("--threads", type=int)
    parser.add_argument("--samples", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="operp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _common(p)
        if name == "norm":
            g = p.add_mutually_exclusive_group(required=True)
            g.add_argument("--elem", choices=sorted(ELEMENTS))
            g.add_argument("--poly", help="polynomial in X_ij, evaluated at M_n of the rr track")
        if name == "relations":
            p.add_argument("--partition", action="append", help="partition text; default is the S_N^+ preset")
            p.add_argument("--white-adjoint", action="store_true", help="swap the colour convention")
        if name == "sweep":
            p.add_argument("--tasks", nargs="*")
    return parser


def resolve_config(args) -> RunConfig:
    """Defaults, then the config file, then the cache environment variable, then flags."""
    values: dict = {}
    if args.config:
        values.update(read_config_file(args.config))
    if os.environ.get(CACHE_ENV):
        values["cache_dir"] = os.environ[CACHE_ENV]
    for name in _FLAGS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    return RunConfig.from_mapping(values)


class Session:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.ok = True

    def check(self, label: str, ok: bool, detail: str = ""):
        self.ok &= bool(ok)
        print(f"{label}: {'OK' if ok else 'FAIL'}{(' ' + detail) if detail else ''}")

    def report(self, name: str, doc: dict):
        if self.cfg.out:
            doc = dict(doc, config=self.cfg.to_json())
            write_json(Path(self.cfg.out) / f"{name}.json", doc)

    def level(self, n: int | None = None):
        """M_n, read from the cache when present."""
        from .models import build_M1, tower
        cfg = self.cfg
        n = cfg.n if n is None else n
        L = cfg.L if cfg.track == "general" else None
        path = cache_dir(cfg.cache_dir) / cache_name(cfg.track, cfg.N, n, L)
        if path.exists():
            return load_matrix(path)
        return tower(build_M1(cfg.track, cfg.N, L), n, cfg.budget)


def _elements():
    from .algebra import P, Q, TensorElement, tensor
    comm = P * Q - Q * P
    return {"commutator": lambda: TensorElement.from_algebra(comm),
            "pqp": lambda: TensorElement.from_algebra(P * Q * P),
            "p-q": lambda: TensorElement.from_algebra(P - Q),
            "p_tensor_commutator": lambda: tensor(P, comm)}


ELEMENTS = ("commutator", "pqp", "p-q", "p_tensor_commutator")


def cmd_build(s: Session, args):
    cfg = s.cfg
    from .models import build_M1, tower
    L = cfg.L if cfg.track == "general" else None
    M = tower(build_M1(cfg.track, cfg.N, L), cfg.n, cfg.budget)
    path = cache_dir(cfg.cache_dir) / cache_name(cfg.track, cfg.N, cfg.n, L)
    save_matrix(path, M, track=cfg.track, n=cfg.n, L=L)
    print(f"wrote {path} ({M.legs} legs)")


def cmd_verify_magic(s: Session, args):
    from .models import is_magic
    rep = is_magic(s.level())
    s.check(f"M_{s.cfg.n} ({s.cfg.track}, N={s.cfg.N}) magic", rep.ok, rep.violation or "")
    s.report("magic", {"ok": rep.ok, "violation": rep.violation, "location": rep.location})


def cmd_verify_separation(s: Session, args):
    from .morphisms import separation_report
    rep = separation_report(s.cfg.N, s.cfg.L)
    k = math.factorial(s.cfg.N)
    s.check(f"{k}×{k} identity", rep.is_identity)
    s.report("separation", rep.to_json())


def cmd_verify_nonvanishing(s: Session, args):
    from .experiments import run_task
    ok, rep = run_task("nonvanishing", s.cfg)
    s.check(f"{rep['count']} products m_sigma over R^3 nonzero", ok)
    s.report("nonvanishing", rep)


def cmd_verify_coassoc(s: Session, args):
    from .experiments import run_task
    ok, rep = run_task("coassoc", s.cfg)
    s.check(f"coassociativity on {rep['checked']} random polynomials", ok)
    s.report("coassoc", rep)


def cmd_relations(s: Session, args):
    from .partitions import RelationSet, check_relations, preset_SNplus
    M = s.level()
    rel = (RelationSet("custom", M.N, args.partition, easy=False) if args.partition
           else preset_SNplus(M.N))
    reps = check_relations(rel, M, black_is_adjoint=not args.white_adjoint)
    for r in reps:
        s.check(f"[{r.partition}]", r.holds, "" if r.status == "checked" else f"({r.status})")
    s.report("relations", {"reports": [r.to_json() for r in reps]})


def cmd_norm(s: Session, args):
    from .numerics import norm_estimate
    if args.elem:
        x, name = _elements()[args.elem](), args.elem
    else:
        from .polynomials import parse_polynomial, poly_eval
        if s.cfg.track != "rr":
            raise ConfigError("--poly is evaluated on the rr track")
        x, name = poly_eval(parse_polynomial(args.poly), s.level()), args.poly
    e = norm_estimate(x, grid=s.cfg.grid, refine=s.cfg.refine)
    theta = ", ".join(f"{t:.10g}" for t in e.argmax.theta)
    print(f"{name}: {e.value!r} at theta = ({theta}), grid {e.grid_size}, {e.evaluations} evaluations")
    s.report("norm", e.to_json(name))


def cmd_monotone(s: Session, args):
    from .experiments import run_task
    ok, rep = run_task("monotone", s.cfg)
    for row in rep["sequences"]:
        print("  " + ", ".join(f"{v:.12g}" for v in row["values"]) + f"  {row['polynomial']}")
    s.check(f"e_1 <= e_2 for {len(rep['sequences'])} random polynomials", ok)
    s.report("monotone", rep)


def cmd_kernel_search(s: Session, args):
    from .experiments import kernel_search
    cfg = s.cfg
    cdir = cache_dir(cfg.cache_dir)
    res = kernel_search(cfg.N, cfg.track, cfg.n, cfg.degree, cfg.L if cfg.track == "general" else None,
                        budget=cfg.budget, cache_dir=cdir)
    print(f"basis {res.basis_size}, nullity {res.nullity_n} at n={res.n}, {res.nullity_n1} at n={res.n + 1}")
    s.check("kernel shrinkage", res.shrinks)
    bad = [c for c in res.certificates if not c.verify_from_caches(cdir)]
    s.check(f"{len(res.certificates)} certificates re-verified from caches", not bad)
    for c in res.certificates[:5]:
        print(f"  {c.polynomial}")
    s.report("kernel_search", res.to_json())


def cmd_sweep(s: Session, args):
    from .experiments import sweep
    b = sweep(s.cfg)
    for r in b.results:
        s.check(r.name, r.ok, r.error or "")
    if b.directory is not None:
        print(f"bundle in {b.directory}")


_HANDLERS = {"build": cmd_build, "verify-magic": cmd_verify_magic, "verify-separation": cmd_verify_separation,
             "verify-nonvanishing": cmd_verify_nonvanishing, "verify-coassoc": cmd_verify_coassoc,
             "relations": cmd_relations, "norm": cmd_norm, "monotone": cmd_monotone,
             "kernel-search": cmd_kernel_search, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = resolve_config(args)
    except (ConfigError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    s = Session(cfg)
    try:
        _HANDLERS[args.command](s, args)
    except (ConfigError, CacheVersionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ContractError, ExpansionBudgetError) as e:
        print(f"FAIL: {type(e).__name__}: {e}")
        return 1
    return 0 if s.ok else 1


if __name__ == "__main__":
    sys.exit(main())
