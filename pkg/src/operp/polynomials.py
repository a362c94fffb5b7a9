"""Noncommutative *-polynomials in the matrix variables X_ij and their evaluation.

A variable is ``(i, j, star)`` with 0-based indices.  The text form uses
1-based indices: ``X12`` or ``X_{1,2}``, adjoints as ``X12*``.
"""

from __future__ import annotations

import random
import re
from fractions import Fraction
from itertools import product as _iproduct
from typing import Iterable, Mapping, NamedTuple

from .algebra import (
    DEFAULT_TERM_BUDGET,
    Coef,
    ContractError,
    FactoredTensor,
    TensorElement,
    normalize_coef,
)
from .models import MagicMatrix, OperpChain


class Var(NamedTuple):
    i: int
    j: int
    star: bool = False

    def __str__(self):
        if self.i < 9 and self.j < 9:
            s = f"X{self.i + 1}{self.j + 1}"
        else:
            s = f"X_{{{self.i + 1},{self.j + 1}}}"
        return s + ("*" if self.star else "")


def monomial_key(m: tuple):
    return (len(m), m)


class StarPolynomial:
    """Exact linear combination of words over the variables ``X_ij`` and ``X_ij*``."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, c in items:
            mono = tuple(Var(*v) for v in mono)
            acc[mono] = acc.get(mono, 0) + normalize_coef(c)
        self._terms = tuple(sorted(((m, normalize_coef(c)) for m, c in acc.items() if c != 0),
                                   key=lambda t: monomial_key(t[0])))

    @classmethod
    def const(cls, c: Coef) -> "StarPolynomial":
        return cls({(): c})

    @classmethod
    def var(cls, i: int, j: int, star: bool = False) -> "StarPolynomial":
        return cls({(Var(i, j, star),): 1})

    @classmethod
    def monomial(cls, mono, c: Coef = 1) -> "StarPolynomial":
        return cls({tuple(mono): c})

    @property
    def terms(self) -> tuple:
        return self._terms

    def degree(self) -> int:
        return max((len(m) for m, _ in self._terms), default=0)

    def max_index(self) -> int:
        return max((max(v.i, v.j) for m, _ in self._terms for v in m), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def _coerce(self, other):
        if isinstance(other, StarPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return StarPolynomial.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return StarPolynomial(self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self):
        return StarPolynomial([(m, -c) for m, c in self._terms])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return StarPolynomial([(m, c * other) for m, c in self._terms])
        if not isinstance(other, StarPolynomial):
            return NotImplemented
        return StarPolynomial([(m + n, c * d) for m, c in self._terms for n, d in other._terms])

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def adjoint(self) -> "StarPolynomial":
        return StarPolynomial([(tuple(Var(v.i, v.j, not v.star) for v in reversed(m)), c)
                               for m, c in self._terms])

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __repr__(self):
        return f"StarPolynomial({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for k, (m, c) in enumerate(self._terms):
            body = "*".join(str(v) for v in m)
            mag = -c if c < 0 else c
            if not body:
                s = str(mag)
            elif mag == 1:
                s = body
            else:
                s = f"{mag}*{body}"
            if k == 0:
                out.append("-" + s if c < 0 else s)
            else:
                out.append((" - " if c < 0 else " + ") + s)
        return "".join(out)

    @classmethod
    def parse(cls, text: str) -> "StarPolynomial":
        return parse_polynomial(text)


def parse_polynomial(text: str) -> StarPolynomial:
    """Parse sums of products such as ``X11*X22 - X22*X11`` or ``2/3*X_{1,2}* + 1``.

    Grammar: ``expr := term (('+'|'-') term)*``, ``term := factor ('*' factor)*``,
    ``factor := number | variable | '(' expr ')'``.  A variable followed by a
    ``*`` that does not start another factor is its adjoint.
    """
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take():
        nonlocal pos
        tok = toks[pos]
        pos += 1
        return tok

    def expr():
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if take() == "-" else 1
        out = term() * sign
        while peek() in ("+", "-"):
            op = take()
            t = term()
            out = out + t if op == "+" else out - t
        return out

    def term():
        out = factor()
        while peek() == "*":
            take()
            out = out * factor()
        return out

    def factor():
        tok = peek()
        if tok is None:
            raise ContractError(f"unexpected end of polynomial {text!r}")
        take()
        if tok == "(":
            out = expr()
            if peek() != ")":
                raise ContractError(f"missing ')' in {text!r}")
            take()
            return out
        if tok == "-":
            return -factor()
        if isinstance(tok, StarPolynomial):
            return tok
        raise ContractError(f"unexpected token {tok!r} in {text!r}")

    out = expr()
    if pos != len(toks):
        raise ContractError(f"trailing input in {text!r}")
    return out


def _tokenize(text: str) -> list:
    toks: list = []
    s = text.replace(" ", "")
    k = 0
    while k < len(s):
        ch = s[k]
        if ch == "X":
            m = re.match(r"X(?:_\{(\d+),(\d+)\}|_?(\d)(\d))", s[k:])
            if not m:
                raise ContractError(f"bad variable at position {k} in {text!r}")
            if m.group(1):
                i, j = int(m.group(1)), int(m.group(2))
            else:
                i, j = int(m.group(3)), int(m.group(4))
            if i < 1 or j < 1:
                raise ContractError(f"indices are 1-based in {text!r}")
            k += m.end()
            star = False
            # a '*' directly after a variable is an adjoint unless it multiplies a following factor
            if k < len(s) and s[k] == "*":
                nxt = s[k + 1] if k + 1 < len(s) else ""
                if nxt in ("", "+", "-", ")", "*"):
                    star = True
                    k += 1
            toks.append(StarPolynomial.var(i - 1, j - 1, star))
            continue
        m = re.match(r"\d+(?:/\d+)?", s[k:])
        if m:
            toks.append(StarPolynomial.const(Fraction(m.group(0))))
            k += m.end()
            continue
        if ch in "+-*()":
            toks.append(ch)
            k += 1
            continue
        raise ContractError(f"unexpected character {ch!r} at position {k} in {text!r}")
    return toks


# -- evaluation ----------------------------------------------------------------

def _check_vars(P: StarPolynomial, N: int):
    if P.max_index() >= N:
        raise ContractError(f"variable index {P.max_index() + 1} out of range for N = {N}")


def _entry(M: MagicMatrix, v: Var) -> FactoredTensor:
    f = M.factored(v.i, v.j)
    return f.adjoint() if v.star else f


class MonomialEvaluator:
    """Caches products of entries along monomial prefixes (factored form)."""

    def __init__(self, M: MagicMatrix):
        if isinstance(M, OperpChain):
            M = M.expand()
        self.M = M
        self._cache: dict = {(): FactoredTensor.unit(M.legs)}

    def factored(self, mono: tuple) -> FactoredTensor:
        hit = self._cache.get(mono)
        if hit is not None:
            return hit
        prefix = self.factored(mono[:-1])
        out = prefix * _entry(self.M, mono[-1]) if prefix.terms else prefix
        self._cache[mono] = out
        return out

    def __call__(self, mono: tuple, budget: int | None = DEFAULT_TERM_BUDGET) -> TensorElement:
        return self.factored(tuple(mono)).expand(budget)


def poly_eval(P: StarPolynomial, M, budget: int | None = DEFAULT_TERM_BUDGET) -> TensorElement:
    """Substitute the entries of ``M`` for the variables of ``P`` (exact)."""
    if isinstance(M, OperpChain):
        M = M.expand(budget)
    _check_vars(P, M.N)
    ev = MonomialEvaluator(M)
    terms = []
    for mono, c in P.terms:
        terms.extend((f, c * d) for f, d in ev.factored(mono).terms)
    return FactoredTensor(M.legs, terms).expand(budget)


def poly_eval_operp(P: StarPolynomial, M, M2, budget: int | None = DEFAULT_TERM_BUDGET) -> TensorElement:
    """Evaluate ``P`` with ``X_ij -> Σ_k m_ik ⊗ m2_kj``.

    Each monomial is expanded as ``Σ_k (m_{i1k1}···m_{idkd}) ⊗ (m2_{k1j1}···m2_{kdjd})``,
    i.e. the two halves are multiplied separately and tensored afterwards;
    no ⊤-product matrix is formed.
    """
    if isinstance(M, OperpChain):
        M = M.expand(budget)
    if isinstance(M2, OperpChain):
        M2 = M2.expand(budget)
    if M.N != M2.N:
        raise ContractError("size mismatch")
    N = M.N
    _check_vars(P, N)
    left, right = MonomialEvaluator(M), MonomialEvaluator(M2)
    terms = []
    for mono, c in P.terms:
        for ks in _iproduct(range(N), repeat=len(mono)):
            lm = tuple(Var(v.i, k, v.star) for v, k in zip(mono, ks))
            rm = tuple(Var(k, v.j, v.star) for v, k in zip(mono, ks))
            a = left.factored(lm)
            if not a.terms:
                continue
            b = right.factored(rm)
            if not b.terms:
                continue
            terms.extend((f + g, c * d * e) for f, d in a.terms for g, e in b.terms)
    return FactoredTensor(M.legs + M2.legs, terms).expand(budget)


def random_polynomial(rng: random.Random, N: int, degree: int, n_terms: int = 4,
                      coef_range: int = 3, star_prob: float = 0.0) -> StarPolynomial:
    """Random polynomial with integer coefficients; always has a term of the given degree."""
    terms = []
    for t in range(n_terms):
        d = degree if t == 0 else rng.randint(0, degree)
        mono = tuple(Var(rng.randrange(N), rng.randrange(N), rng.random() < star_prob) for _ in range(d))
        c = 0
        while c == 0:
            c = rng.randint(-coef_range, coef_range)
        terms.append((mono, c))
    return StarPolynomial(terms)
