"""JSON forms for exact values and the versioned matrix cache file."""

from __future__ import annotations

import json
import os
from fractions import Fraction
from pathlib import Path

from .algebra import (
    Coef,
    ContractError,
    TensorElement,
    format_word,
    normalize_coef,
    parse_word,
)
from .models import FactorInfo, MagicMatrix, OperpChain, build_R_abcd
from .polynomials import StarPolynomial, Var

CACHE_VERSION = 1
CACHE_ENV = "OPERP_CACHE_DIR"


class CacheVersionError(ValueError):
    pass


def rational_to_json(c: Coef) -> dict:
    c = Fraction(c)
    return {"num": str(c.numerator), "den": str(c.denominator)}


def rational_from_json(d: dict) -> Coef:
    num, den = int(d["num"]), int(d["den"])
    if den <= 0:
        raise ContractError("denominator must be positive")
    f = Fraction(num, den)
    if f.numerator != num or f.denominator != den:
        raise ContractError(f"rational {num}/{den} is not in lowest terms")
    return normalize_coef(f)


def tensor_word_to_json(tw) -> list[str]:
    return [format_word(w) for w in tw]


def tensor_to_json(x: TensorElement) -> dict:
    return {"legs": x.legs,
            "terms": [{"word": tensor_word_to_json(tw), "coef": rational_to_json(c)} for tw, c in x.terms]}


def tensor_from_json(d: dict) -> TensorElement:
    legs = int(d["legs"])
    return TensorElement(legs, [(tuple(parse_word(w) for w in t["word"]), rational_from_json(t["coef"]))
                                for t in d["terms"]])


def perm_to_json(sigma) -> list[int]:
    return [s + 1 for s in sigma]


def perm_from_json(arr) -> tuple[int, ...]:
    sigma = tuple(int(s) - 1 for s in arr)
    if sorted(sigma) != list(range(len(sigma))):
        raise ContractError(f"not a permutation: {arr}")
    return sigma


def polynomial_to_json(P: StarPolynomial) -> list:
    return [{"monomial": [[v.i + 1, v.j + 1, bool(v.star)] for v in m], "coef": rational_to_json(c)}
            for m, c in P.terms]


def polynomial_from_json(arr) -> StarPolynomial:
    return StarPolynomial([(tuple(Var(i - 1, j - 1, bool(s)) for i, j, s in t["monomial"]),
                            rational_from_json(t["coef"])) for t in arr])


def factor_info_to_json(info: FactorInfo) -> dict:
    return {"round": info.round, "pair": list(info.pair), "star": list(info.star)}


def factor_info_from_json(d: dict) -> FactorInfo:
    return FactorInfo(int(d["round"]), tuple(d["pair"]), tuple(d["star"]))


def matrix_to_cache(M, *, track: str, n: int, L: int | None = None) -> dict:
    """Cache document for M_n.  Chains are stored by factor metadata, entries ``"lazy"``."""
    doc = {"version": CACHE_VERSION, "N": M.N, "track": track, "L": L, "n": n, "leg_count": M.legs}
    if isinstance(M, OperpChain):
        if any(info is None for info in M.metadata):
            raise ContractError("only chains with factor metadata can be cached")
        doc["factor_metadata"] = [factor_info_to_json(i) for i in M.metadata]
        doc["entries"] = ["lazy"] * (M.N * M.N)
    else:
        doc["factor_metadata"] = None
        doc["entries"] = [tensor_to_json(M.entry(i, j)) for i in range(M.N) for j in range(M.N)]
    return doc


def matrix_from_cache(doc: dict):
    if doc.get("version") != CACHE_VERSION:
        raise CacheVersionError(f"cache version {doc.get('version')!r} is not {CACHE_VERSION}")
    N = int(doc["N"])
    entries = doc["entries"]
    if len(entries) != N * N:
        raise ContractError("entry count does not match N")
    if all(e == "lazy" for e in entries):
        meta = [factor_info_from_json(d) for d in doc["factor_metadata"]]
        factors = [build_R_abcd(N, *info.pair, *info.star) for info in meta]
        return OperpChain(factors, meta)
    rows = [[tensor_from_json(entries[i * N + j]) for j in range(N)] for i in range(N)]
    M = MagicMatrix(rows, legs=int(doc["leg_count"]))
    return M


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def write_json(path, doc) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def save_matrix(path, M, *, track: str, n: int, L: int | None = None) -> Path:
    return write_json(path, matrix_to_cache(M, track=track, n=n, L=L))


def load_matrix(path):
    return matrix_from_cache(read_json(path))


def cache_dir(explicit=None) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(CACHE_ENV, ".operp-cache"))


def cache_name(track: str, N: int, n: int, L: int | None = None) -> str:
    if track == "general":
        return f"M_{track}_N{N}_L{L}_n{n}.json"
    return f"M_{track}_N{N}_n{n}.json"
