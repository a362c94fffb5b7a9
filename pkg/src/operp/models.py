"""Matrices over tensor powers of the two-projection algebra and the ⊤-product.

Two concrete tracks are provided:

* the ``"rr"`` track (N = 4) with ``M1 = R ⊤ R``, small enough to expand;
* the ``"general"`` track, where ``M1`` is an iterated ⊤-product of the
  ``R_(a,b),(c,d)`` matrices kept as a lazy :class:`OperpChain`.

Matrix indices are 0-based in the Python API.  Point labels passed to
:func:`build_R_abcd` are the 1-based points of ``[N]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import (
    CHI11,
    DEFAULT_TERM_BUDGET,
    ONE,
    P,
    Q,
    Character,
    ContractError,
    ExpansionBudgetError,
    FactoredTensor,
    TensorElement,
    as_factored,
)

TRACKS = ("rr", "general")


def _scalar_factored(c, legs: int) -> FactoredTensor:
    return FactoredTensor(legs, [((ONE,) * legs, c)])


class MagicMatrix:
    """Square N×N matrix whose entries live in the ``legs``-fold tensor power.

    The name follows the intended use; being magic is a property checked by
    :func:`is_magic`, not enforced at construction (counterexamples are
    legitimate values).  Entries are stored factored and expanded on demand.
    """

    def __init__(self, entries: Sequence[Sequence], legs: int | None = None):
        rows = [list(r) for r in entries]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ContractError("matrix must be square")
        if legs is None:
            legs = 0
            for r in rows:
                for e in r:
                    if not isinstance(e, (int, Fraction)):
                        legs = as_factored(e).legs
                        break
                else:
                    continue
                break
        fact = []
        for r in rows:
            out = []
            for e in r:
                f = _scalar_factored(e, legs) if isinstance(e, (int, Fraction)) else as_factored(e)
                if f.legs != legs:
                    raise ContractError(f"entry with {f.legs} legs in a {legs}-leg matrix")
                out.append(f)
            fact.append(tuple(out))
        self.N = n
        self.legs = legs
        self._factored = tuple(fact)
        self._expanded: dict = {}

    @property
    def size(self) -> int:
        return self.N

    @property
    def leg_count(self) -> int:
        return self.legs

    @classmethod
    def identity(cls, N: int, legs: int = 0) -> "MagicMatrix":
        return cls([[1 if i == j else 0 for j in range(N)] for i in range(N)], legs=legs)

    @classmethod
    def from_tensors(cls, rows: Sequence[Sequence[TensorElement]]) -> "MagicMatrix":
        return cls(rows)

    def factored(self, i: int, j: int) -> FactoredTensor:
        return self._factored[i][j]

    def entry(self, i: int, j: int, budget: int | None = DEFAULT_TERM_BUDGET) -> TensorElement:
        key = (i, j)
        if key not in self._expanded:
            self._expanded[key] = self._factored[i][j].expand(budget)
        return self._expanded[key]

    def entries(self) -> list[list[TensorElement]]:
        return [[self.entry(i, j) for j in range(self.N)] for i in range(self.N)]

    def __getitem__(self, ij) -> TensorElement:
        i, j = ij
        return self.entry(i, j)

    def with_entry(self, i: int, j: int, value) -> "MagicMatrix":
        rows = [list(r) for r in self._factored]
        rows[i][j] = value
        return MagicMatrix(rows, legs=self.legs)

    def factored_size(self) -> int:
        return sum(len(f) for r in self._factored for f in r)

    def evaluate(self, chars: Sequence[Character]) -> list[list]:
        """Scalar matrix obtained by applying one character per leg."""
        return [[f.char_eval(chars) for f in r] for r in self._factored]

    def __eq__(self, other):
        if not isinstance(other, MagicMatrix):
            return NotImplemented
        if (self.N, self.legs) != (other.N, other.legs):
            return False
        return all(self.entry(i, j) == other.entry(i, j)
                   for i in range(self.N) for j in range(self.N))

    __hash__ = None

    def __repr__(self):
        return f"MagicMatrix(N={self.N}, legs={self.legs})"

    def pretty(self) -> str:
        return "\n".join(" ; ".join(str(self.entry(i, j)) for j in range(self.N))
                         for i in range(self.N))


@dataclass(frozen=True)
class FactorInfo:
    """Provenance of one general-track factor: round, pair (a,b), partner pair (c,d).

    Rounds and points are 1-based.
    """
    round: int
    pair: tuple
    star: tuple


class OperpChain:
    """Lazy left-to-right ⊤-product of one-leg factors."""

    def __init__(self, factors: Sequence[MagicMatrix], metadata: Sequence[FactorInfo | None] | None = None):
        factors = tuple(factors)
        if not factors:
            raise ContractError("a chain needs at least one factor")
        N = factors[0].N
        for f in factors:
            if f.N != N:
                raise ContractError("all chain factors must have the same size")
            if f.legs != 1:
                raise ContractError("chain factors must be one-leg matrices")
        if metadata is None:
            metadata = (None,) * len(factors)
        metadata = tuple(metadata)
        if len(metadata) != len(factors):
            raise ContractError("metadata length must match the number of factors")
        self.N = N
        self.factors = factors
        self.metadata = metadata

    @property
    def legs(self) -> int:
        return len(self.factors)

    leg_count = legs

    def __len__(self):
        return len(self.factors)

    def leg_index(self, round_: int, pair: tuple) -> int:
        for k, info in enumerate(self.metadata):
            if info is not None and info.round == round_ and info.pair == tuple(pair):
                return k
        raise KeyError((round_, pair))

    def evaluate(self, chars: Sequence[Character]) -> list[list]:
        """Character image of the chain, computed as a product of scalar matrices."""
        if len(chars) != self.legs:
            raise ContractError(f"{len(chars)} characters supplied for {self.legs} legs")
        acc = None
        for f, chi in zip(self.factors, chars):
            m = f.evaluate((chi,))
            acc = m if acc is None else _scalar_matmul(acc, m)
        return acc

    def expand(self, budget: int | None = DEFAULT_TERM_BUDGET) -> MagicMatrix:
        out = self.factors[0]
        for f in self.factors[1:]:
            out = operp(out, f, budget=budget)
        return out

    def __repr__(self):
        return f"OperpChain(N={self.N}, legs={self.legs})"


def _scalar_matmul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def operp(M, M2, budget: int | None = DEFAULT_TERM_BUDGET):
    """⊤-product: ``(M ⊤ M2)_ij = Σ_k M_ik ⊗ M2_kj``; chains concatenate lazily."""
    if M.N != M2.N:
        raise ContractError(f"size mismatch: {M.N} vs {M2.N}")
    if isinstance(M, OperpChain) and isinstance(M2, OperpChain):
        return OperpChain(M.factors + M2.factors, M.metadata + M2.metadata)
    if isinstance(M, OperpChain):
        M = M.expand(budget)
    if isinstance(M2, OperpChain):
        M2 = M2.expand(budget)
    N = M.N
    if budget is not None:
        bound = sum(len(M.factored(i, k)) * len(M2.factored(k, j))
                    for i in range(N) for j in range(N) for k in range(N))
        if bound > budget:
            raise ExpansionBudgetError("operp", bound, budget)
    rows = []
    for i in range(N):
        row = []
        for j in range(N):
            terms = []
            for k in range(N):
                a, b = M.factored(i, k), M2.factored(k, j)
                terms.extend((f + g, c * d) for f, c in a.terms for g, d in b.terms)
            row.append(FactoredTensor(M.legs + M2.legs, terms))
        rows.append(row)
    return MagicMatrix(rows, legs=M.legs + M2.legs)


def operp_all(mats: Iterable, budget: int | None = DEFAULT_TERM_BUDGET):
    mats = list(mats)
    out = mats[0]
    for m in mats[1:]:
        out = operp(out, m, budget=budget)
    return out


# -- constructors -------------------------------------------------------------

def build_R() -> MagicMatrix:
    return MagicMatrix([
        [P, 0, 1 - P, 0],
        [1 - P, 0, P, 0],
        [0, Q, 0, 1 - Q],
        [0, 1 - Q, 0, Q],
    ], legs=1)


def build_Rhat() -> MagicMatrix:
    return MagicMatrix([
        [P, 1 - P, 0, 0],
        [1 - P, P, 0, 0],
        [0, 0, Q, 1 - Q],
        [0, 0, 1 - Q, Q],
    ], legs=1)


def build_R_abcd(N: int, a: int, b: int, c: int, d: int) -> MagicMatrix:
    """The matrix with p at (a,a),(b,b), q at (c,c),(d,d), 1-p/1-q linking the pairs.

    ``a, b, c, d`` are pairwise distinct 1-based points of ``[N]``.
    """
    if N < 4:
        raise ContractError("N must be at least 4")
    pts = (a, b, c, d)
    if len(set(pts)) != 4 or not all(1 <= x <= N for x in pts):
        raise ContractError(f"points must be pairwise distinct in [1, {N}]: {pts}")
    a, b, c, d = (x - 1 for x in pts)
    rows: list[list] = [[0] * N for _ in range(N)]
    for i in range(N):
        rows[i][i] = ONE
    rows[a][a] = rows[b][b] = P
    rows[c][c] = rows[d][d] = Q
    rows[a][b] = rows[b][a] = 1 - P
    rows[c][d] = rows[d][c] = 1 - Q
    return MagicMatrix(rows, legs=1)


def star_partner(N: int, a: int, b: int) -> tuple[int, int]:
    """Deterministic partner pair: the two smallest points of [N] other than a, b."""
    rest = [x for x in range(1, N + 1) if x not in (a, b)]
    return rest[0], rest[1]


def build_M1_general(N: int, L: int | None = None) -> OperpChain:
    """General-track M1: L rounds of ⊤ over the pairs a<b in lexicographic order."""
    if N < 4:
        raise ContractError("N must be at least 4")
    if L is None:
        L = N - 1
    if L < N - 1:
        raise ContractError(f"L must be at least N-1 = {N - 1}")
    factors, meta = [], []
    cache = {}
    for r in range(1, L + 1):
        for a in range(1, N + 1):
            for b in range(a + 1, N + 1):
                c, d = star_partner(N, a, b)
                if (a, b) not in cache:
                    cache[(a, b)] = build_R_abcd(N, a, b, c, d)
                factors.append(cache[(a, b)])
                meta.append(FactorInfo(r, (a, b), (c, d)))
    return OperpChain(factors, meta)


def build_M1_rr() -> MagicMatrix:
    R = build_R()
    return operp(R, R)


def build_M1(track: str, N: int = 4, L: int | None = None):
    if track == "rr":
        if N != 4:
            raise ContractError("the rr track is defined for N = 4 only")
        return build_M1_rr()
    if track == "general":
        return build_M1_general(N, L)
    raise ContractError(f"unknown track {track!r}")


def tower(M1, n: int, budget: int | None = DEFAULT_TERM_BUDGET):
    """``M_n = M1^{⊤n}`` built as ``M_{k+1} = M_k ⊤ M1``."""
    if n < 1:
        raise ContractError("n must be at least 1")
    out = M1
    for _ in range(n - 1):
        out = operp(out, M1, budget=budget)
    return out


# -- checks -------------------------------------------------------------------

@dataclass
class MagicReport:
    ok: bool
    violation: str | None = None
    location: tuple | None = None

    def __bool__(self):
        return self.ok


def is_magic(M, budget: int | None = DEFAULT_TERM_BUDGET) -> MagicReport:
    """Exact magic-unitary check reporting the first violated constraint.

    Order: projection property of every entry (row-major), then row sums,
    then column sums.  A chain is checked factor by factor.
    """
    if isinstance(M, OperpChain):
        for k, f in enumerate(M.factors):
            rep = is_magic(f, budget)
            if not rep.ok:
                return MagicReport(False, f"factor {k}: {rep.violation}", (k,) + (rep.location or ()))
        return MagicReport(True)
    N = M.N
    for i in range(N):
        for j in range(N):
            f = M.factored(i, j)
            e = f.expand(budget)
            if f.adjoint().expand(budget) != e:
                return MagicReport(False, f"entry ({i + 1},{j + 1}) is not self-adjoint", ("entry", i, j))
            if (f * f).expand(budget) != e:
                return MagicReport(False, f"entry ({i + 1},{j + 1}) is not idempotent", ("entry", i, j))
    unit = TensorElement.unit(M.legs)
    for i in range(N):
        s = FactoredTensor(M.legs, [t for j in range(N) for t in M.factored(i, j).terms])
        if s.expand(budget) != unit:
            return MagicReport(False, f"row {i + 1} does not sum to 1", ("row", i))
    for j in range(N):
        s = FactoredTensor(M.legs, [t for i in range(N) for t in M.factored(i, j).terms])
        if s.expand(budget) != unit:
            return MagicReport(False, f"column {j + 1} does not sum to 1", ("column", j))
    return MagicReport(True)


def sigma_product(M: MagicMatrix, sigma: Sequence[int],
                  budget: int | None = DEFAULT_TERM_BUDGET) -> TensorElement:
    """``m_σ = m_{1σ(1)} ··· m_{Nσ(N)}`` with ``sigma`` given by 0-based images."""
    if isinstance(M, OperpChain):
        M = M.expand(budget)
    if sorted(sigma) != list(range(M.N)):
        raise ContractError(f"not a permutation of range({M.N}): {sigma}")
    acc = FactoredTensor.unit(M.legs)
    for i, s in enumerate(sigma):
        acc = acc * M.factored(i, s)
        if not acc.terms:
            break
    return acc.expand(budget)


def scalar_identity(N: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(N)] for i in range(N)]


def all_chi11(legs: int) -> tuple:
    return (CHI11,) * legs
