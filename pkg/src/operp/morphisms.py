"""Quotient maps of the tower: ν, π_{n+1,n}, the σ-characters and the map to C(S_N).

Permutations are tuples of 0-based images.  The permutation matrix of σ has
entries ``δ_{i,σ(j)}``, so the matrix of a composition is the product of the
matrices and the matrix product of transpositions ``τ_1 τ_2 ··· τ_l`` is the
matrix of ``τ_1 ∘ τ_2 ∘ ··· ∘ τ_l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from .algebra import (
    CHI01,
    CHI11,
    ContractError,
    FactoredTensor,
    char_eval_partial,
)
from .models import MagicMatrix, OperpChain, scalar_identity
from .polynomials import StarPolynomial

Perm = tuple


class MorphismError(ContractError):
    """A proposed character fails its validation on M1."""


# -- permutations ----------------------------------------------------------------

def compose(s: Perm, t: Perm) -> Perm:
    """``s ∘ t`` (apply t first)."""
    return tuple(s[t[i]] for i in range(len(t)))


def inverse(s: Perm) -> Perm:
    out = [0] * len(s)
    for i, si in enumerate(s):
        out[si] = i
    return tuple(out)


def identity_perm(N: int) -> Perm:
    return tuple(range(N))


def transposition(N: int, a: int, b: int) -> Perm:
    s = list(range(N))
    s[a], s[b] = s[b], s[a]
    return tuple(s)


def perm_matrix(s: Perm) -> list[list[int]]:
    N = len(s)
    return [[1 if i == s[j] else 0 for j in range(N)] for i in range(N)]


def cycles(s: Perm) -> list[list[int]]:
    seen, out = set(), []
    for start in range(len(s)):
        if start in seen:
            continue
        cyc, x = [], start
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = s[x]
        out.append(cyc)
    return out


def all_perms(N: int) -> list[Perm]:
    return list(permutations(range(N)))


@dataclass(frozen=True)
class TranspositionDecomposition:
    """``target^{-1} = τ_1 ∘ ··· ∘ τ_l`` with each pair (α, β), α < β, 0-based."""
    target: Perm
    transpositions: tuple

    @property
    def length(self) -> int:
        return len(self.transpositions)

    def product(self) -> Perm:
        N = len(self.target)
        out = identity_perm(N)
        for a, b in self.transpositions:
            out = compose(out, transposition(N, a, b))
        return out


def decompose(sigma: Perm) -> TranspositionDecomposition:
    """Minimal decomposition of ``sigma^{-1}``, one cycle at a time.

    A cycle ``c1 -> c2 -> ... -> cm`` equals ``(c1 c2)(c2 c3)···(c_{m-1} c_m)``,
    giving ``l = N - #cycles``.
    """
    inv = inverse(sigma)
    pairs = []
    for cyc in cycles(inv):
        for x, y in zip(cyc, cyc[1:]):
            pairs.append((min(x, y), max(x, y)))
    dec = TranspositionDecomposition(tuple(sigma), tuple(pairs))
    assert dec.product() == inv
    return dec


# -- characters on M1 --------------------------------------------------------------

def _scalar_image(M1, chars) -> list[list]:
    return M1.evaluate(chars)


def nu_character(M1) -> tuple:
    """All-χ11 tuple over the legs of one M1 block, validated to send M1 to 𝟙."""
    chars = (CHI11,) * M1.legs
    img = _scalar_image(M1, chars)
    if img != scalar_identity(M1.N):
        raise MorphismError("all-χ11 evaluation of M1 is not the identity matrix; "
                            "no arrow ν of this form exists")
    return chars


def mu_sigma(sigma: Perm, chain: OperpChain) -> tuple:
    """Character tuple sending the general-track M1 to the matrix of ``sigma^{-1}``.

    The i-th transposition of the decomposition of ``sigma^{-1}`` is placed on
    the round-i factor for its pair (χ01 there, χ11 on every other leg).
    """
    if not isinstance(chain, OperpChain):
        raise ContractError("mu_sigma needs the general-track chain")
    dec = decompose(sigma)
    rounds = max((info.round for info in chain.metadata if info is not None), default=0)
    if dec.length > rounds:
        raise ContractError(f"decomposition length {dec.length} exceeds L = {rounds}")
    chars = [CHI11] * chain.legs
    for r, (a, b) in enumerate(dec.transpositions, start=1):
        chars[chain.leg_index(r, (a + 1, b + 1))] = CHI01
    return tuple(chars)


def separation_matrix(N: int, chain: OperpChain | None = None, L: int | None = None) -> list[list]:
    """Entry (τ, σ) is ``μ_τ(m_σ)``, computed from scalar images only (no expansion).

    Rows and columns follow :func:`all_perms` order.
    """
    from .models import build_M1_general
    if chain is None:
        chain = build_M1_general(N, L)
    perms = all_perms(N)
    out = []
    for tau in perms:
        img = chain.evaluate(mu_sigma(tau, chain))
        row = []
        for sigma in perms:
            v = 1
            for i in range(N):
                v *= img[i][sigma[i]]
                if not v:
                    break
            row.append(v)
        out.append(row)
    return out


@dataclass
class SeparationReport:
    N: int
    track: str
    L: int
    is_identity: bool
    first_violation: dict | None = None

    def to_json(self) -> dict:
        d = {"N": self.N, "track": self.track, "L": self.L, "is_identity": self.is_identity}
        if self.first_violation is not None:
            d["first_violation"] = self.first_violation
        return d


def separation_report(N: int, L: int | None = None) -> SeparationReport:
    from .formats import perm_to_json
    L = N - 1 if L is None else L
    S = separation_matrix(N, L=L)
    perms = all_perms(N)
    for a, row in enumerate(S):
        for b, v in enumerate(row):
            if v != (1 if a == b else 0):
                return SeparationReport(N, "general", L, False,
                                        {"tau": perm_to_json(perms[a]), "sigma": perm_to_json(perms[b]),
                                         "value": str(v)})
    return SeparationReport(N, "general", L, True)


# -- π maps ------------------------------------------------------------------

def pi_map(x, block_legs: int):
    """π_{n+1,n}: apply ν (all χ11) on the last ``block_legs`` legs.

    Accepts a :class:`TensorElement`, a :class:`FactoredTensor` or a
    :class:`MagicMatrix` (entrywise).
    """
    if isinstance(x, MagicMatrix):
        if x.legs < block_legs:
            raise ContractError("leg-count mismatch")
        rows = [[pi_map(x.factored(i, j), block_legs) for j in range(x.N)] for i in range(x.N)]
        return MagicMatrix(rows, legs=x.legs - block_legs)
    if x.legs < block_legs:
        raise ContractError(f"element has {x.legs} legs, cannot remove a block of {block_legs}")
    if isinstance(x, FactoredTensor):
        return x.char_eval_legs({j: CHI11 for j in range(x.legs - block_legs, x.legs)})
    return char_eval_partial(x, (x.legs - block_legs, x.legs), (CHI11,) * block_legs)


def pi_map_levels(x, block_legs: int, n_from: int, n_to: int):
    """π_{n_from, n_to} as a composite of single-block maps."""
    if x.legs != n_from * block_legs:
        raise ContractError("leg-count mismatch")
    for _ in range(n_from - n_to):
        x = pi_map(x, block_legs)
    return x


# -- the map to C(S_N) ---------------------------------------------------------

@dataclass
class PermutationTable:
    """A function on S_N with exact values, stored as a table over all permutations."""
    N: int
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = [s for s in all_perms(self.N) if s not in self.values]
        if missing:
            raise ContractError(f"table misses {len(missing)} permutations")

    def __call__(self, sigma: Perm):
        return self.values[tuple(sigma)]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values.values())

    def __eq__(self, other):
        if not isinstance(other, PermutationTable):
            return NotImplemented
        return self.N == other.N and self.values == other.values


def eval_at_permutation(x, sigma: Perm, chain: OperpChain, blocks: int = 1):
    """``μ_{σ^{-1}}`` applied to ``x`` (so that the entry m_ij evaluates to δ_{i,σ(j)}).

    ``x`` may be a :class:`StarPolynomial` (evaluated by scalar substitution,
    never expanded), or a tensor element on ``blocks`` copies of M1's legs.
    Upper blocks of a tower element carry ν, i.e. the map factors through π.
    """
    chars = mu_sigma(inverse(sigma), chain)
    if isinstance(x, StarPolynomial):
        img = chain.evaluate(chars)
        return _poly_at_scalar(x, img)
    full = tuple(chars) + (CHI11,) * (chain.legs * (blocks - 1))
    if isinstance(x, FactoredTensor):
        return x.char_eval(full)
    from .algebra import char_eval
    return char_eval(x, full)


def _poly_at_scalar(P: StarPolynomial, img) -> object:
    from .algebra import normalize_coef
    total = 0
    for mono, c in P.terms:
        v = c
        for var in mono:
            v *= img[var.i][var.j]  # real entries: adjoint is the same scalar
            if not v:
                break
        total += v
    return normalize_coef(total)


def to_CSN(x, chain: OperpChain, blocks: int = 1) -> PermutationTable:
    return PermutationTable(chain.N, {s: eval_at_permutation(x, s, chain, blocks) for s in all_perms(chain.N)})
