"""Exact arithmetic in the *-algebra generated by two projections and its tensor powers.

Alternating words in the letters ``P`` and ``Q`` (plus the empty word for the
unit) form a linear basis of the *-algebra generated by two universal
projections.  Elements are finite maps from words to exact rationals.

Coefficients are kept as ``int`` whenever possible and as
:class:`fractions.Fraction` otherwise; no float ever enters this module.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product as _iproduct
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

Coef = Union[int, Fraction]
Word = str
TensorWord = tuple

LETTERS = "PQ"


class ContractError(ValueError):
    """Raised when an operation is called outside its precondition."""


class ExpansionBudgetError(RuntimeError):
    """Raised instead of silently truncating an expansion that is too large."""

    def __init__(self, what: str, needed: int, budget: int):
        super().__init__(f"{what}: expansion needs at least {needed} terms, budget is {budget}")
        self.needed = needed
        self.budget = budget


DEFAULT_TERM_BUDGET = 2 ** 22


def normalize_coef(c) -> Coef:
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, str):
        return normalize_coef(Fraction(c))
    if isinstance(c, float):
        raise TypeError("float coefficients are not allowed in exact arithmetic")
    return normalize_coef(Fraction(c))


# -- words -----------------------------------------------------------------

def is_alternating(w: str) -> bool:
    if any(ch not in LETTERS for ch in w):
        return False
    return all(a != b for a, b in zip(w, w[1:]))


@lru_cache(maxsize=1 << 16)
def word_mul(w: Word, v: Word) -> Word:
    """Reduced concatenation: a repeated letter at the seam collapses (p*p = p)."""
    if w and v and w[-1] == v[0]:
        return w + v[1:]
    return w + v


def word_adjoint(w: Word) -> Word:
    return w[::-1]


def word_key(w: Word):
    return (len(w), w)


def format_word(w: Word) -> str:
    return w if w else "1"


def parse_word(s: str) -> Word:
    s = s.strip()
    w = "" if s == "1" else s
    if not is_alternating(w):
        raise ContractError(f"not an alternating word over P, Q: {s!r}")
    return w


def _fmt_coef(c: Coef) -> str:
    return str(c)


def _format_terms(items, fmt_word) -> str:
    if not items:
        return "0"
    out = []
    for i, (w, c) in enumerate(items):
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        body = fmt_word(w)
        if mag == 1 and body != "1":
            s = body
        elif body == "1":
            s = _fmt_coef(mag)
        else:
            s = f"{_fmt_coef(mag)}*{body}"
        if i == 0:
            out.append(s if sign == "+" else "-" + s)
        else:
            out.append(f" {sign} {s}")
    return "".join(out)


# -- one leg -----------------------------------------------------------------

class AlgebraElement:
    """Immutable exact linear combination of alternating words."""

    __slots__ = ("_terms", "_map", "_hash")

    def __init__(self, terms: Mapping[Word, Coef] | Iterable = ()):
        acc: dict[Word, Coef] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for w, c in items:
            if not is_alternating(w):
                raise ContractError(f"not an alternating word: {w!r}")
            acc[w] = acc.get(w, 0) + normalize_coef(c)
        self._set(acc)

    def _set(self, acc: dict):
        terms = tuple(sorted(((w, normalize_coef(c)) for w, c in acc.items() if c != 0),
                             key=lambda t: word_key(t[0])))
        self._terms = terms
        self._map = dict(terms)
        self._hash = None

    @classmethod
    def _raw(cls, acc: dict) -> "AlgebraElement":
        obj = cls.__new__(cls)
        obj._set(acc)
        return obj

    @classmethod
    def scalar(cls, c: Coef) -> "AlgebraElement":
        return cls._raw({"": c})

    @classmethod
    def word(cls, w: Word, c: Coef = 1) -> "AlgebraElement":
        if not is_alternating(w):
            raise ContractError(f"not an alternating word: {w!r}")
        return cls._raw({w: c})

    @property
    def terms(self) -> tuple:
        return self._terms

    def coefficient(self, w: Word) -> Coef:
        return self._map.get(w, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _coerce(self, other):
        if isinstance(other, AlgebraElement):
            return other
        if isinstance(other, (int, Fraction)):
            return AlgebraElement.scalar(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        acc = dict(self._map)
        for w, c in other._terms:
            acc[w] = acc.get(w, 0) + c
        return AlgebraElement._raw(acc)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement._raw({w: -c for w, c in self._terms})

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
            return AlgebraElement._raw({w: c * other for w, c in self._terms})
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return _alg_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement._raw({word_adjoint(w): c for w, c in self._terms})

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __repr__(self):
        return f"AlgebraElement({self})"

    def __str__(self):
        return _format_terms(self._terms, format_word)


@lru_cache(maxsize=1 << 15)
def _alg_mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    acc: dict[Word, Coef] = {}
    for w, c in x._terms:
        for v, d in y._terms:
            u = word_mul(w, v)
            acc[u] = acc.get(u, 0) + c * d
    return AlgebraElement._raw(acc)


ONE = AlgebraElement.scalar(1)
ZERO = AlgebraElement()
P = AlgebraElement.word("P")
Q = AlgebraElement.word("Q")


# -- k legs ------------------------------------------------------------------

def tensor_word_key(tw: TensorWord):
    return tuple(word_key(w) for w in tw)


class TensorElement:
    """Immutable exact element of the k-fold algebraic tensor power, expanded in words.

    Terms are kept in canonical order, so equality is equality of normal forms
    and ``is_zero`` is exact.
    """

    __slots__ = ("legs", "_terms", "_map", "_hash")

    def __init__(self, legs: int, terms: Mapping[TensorWord, Coef] | Iterable = ()):
        if legs < 0:
            raise ContractError("leg count must be nonnegative")
        acc: dict[TensorWord, Coef] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for tw, c in items:
            tw = tuple(tw)
            if len(tw) != legs:
                raise ContractError(f"tensor word {tw!r} does not have {legs} legs")
            for w in tw:
                if not is_alternating(w):
                    raise ContractError(f"not an alternating word: {w!r}")
            acc[tw] = acc.get(tw, 0) + normalize_coef(c)
        self._set(legs, acc)

    def _set(self, legs, acc):
        self.legs = legs
        terms = tuple(sorted(((tw, normalize_coef(c)) for tw, c in acc.items() if c != 0),
                             key=lambda t: tensor_word_key(t[0])))
        self._terms = terms
        self._map = dict(terms)
        self._hash = None

    @classmethod
    def _raw(cls, legs: int, acc: dict) -> "TensorElement":
        obj = cls.__new__(cls)
        obj._set(legs, acc)
        return obj

    @classmethod
    def unit(cls, legs: int) -> "TensorElement":
        return cls._raw(legs, {("",) * legs: 1})

    @classmethod
    def scalar(cls, legs: int, c: Coef) -> "TensorElement":
        return cls._raw(legs, {("",) * legs: c})

    @classmethod
    def zero(cls, legs: int) -> "TensorElement":
        return cls._raw(legs, {})

    @classmethod
    def from_algebra(cls, x: AlgebraElement) -> "TensorElement":
        return cls._raw(1, {(w,): c for w, c in x.terms})

    @property
    def leg_count(self) -> int:
        return self.legs

    @property
    def terms(self) -> tuple:
        return self._terms

    def __len__(self):
        return len(self._terms)

    def coefficient(self, tw: TensorWord) -> Coef:
        return self._map.get(tuple(tw), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return TensorElement.scalar(self.legs, other)
        if not isinstance(other, TensorElement):
            return None
        if other.legs != self.legs:
            raise ContractError(f"leg counts differ: {self.legs} vs {other.legs}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        acc = dict(self._map)
        for tw, c in other._terms:
            acc[tw] = acc.get(tw, 0) + c
        return TensorElement._raw(self.legs, acc)

    __radd__ = __add__

    def __neg__(self):
        return TensorElement._raw(self.legs, {tw: -c for tw, c in self._terms})

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TensorElement._raw(self.legs, {tw: c * other for tw, c in self._terms})
        other = self._check(other)
        if other is None:
            return NotImplemented
        acc: dict[TensorWord, Coef] = {}
        for tw, c in self._terms:
            for tv, d in other._terms:
                tu = tuple(map(word_mul, tw, tv))
                acc[tu] = acc.get(tu, 0) + c * d
        return TensorElement._raw(self.legs, acc)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def adjoint(self) -> "TensorElement":
        return TensorElement._raw(self.legs, {tuple(w[::-1] for w in tw): c for tw, c in self._terms})

    def tensor(self, other: "TensorElement") -> "TensorElement":
        return tensor_concat(self, other)

    def __matmul__(self, other):
        if isinstance(other, AlgebraElement):
            other = TensorElement.from_algebra(other)
        if not isinstance(other, TensorElement):
            return NotImplemented
        return tensor_concat(self, other)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TensorElement.scalar(self.legs, other)
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.legs == other.legs and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.legs, self._terms))
        return self._hash

    def __repr__(self):
        return f"TensorElement[{self.legs}]({self})"

    def __str__(self):
        return _format_terms(self._terms, lambda tw: "|".join(format_word(w) for w in tw) if tw else "1")


def tensor_concat(x: TensorElement, y: TensorElement) -> TensorElement:
    acc = {}
    for tw, c in x.terms:
        for tv, d in y.terms:
            acc[tw + tv] = c * d
    return TensorElement._raw(x.legs + y.legs, acc)


def tensor(*legs: AlgebraElement) -> TensorElement:
    """Expanded elementary tensor ``legs[0] ⊗ legs[1] ⊗ ...``."""
    out = TensorElement.unit(0)
    for x in legs:
        out = tensor_concat(out, TensorElement.from_algebra(x))
    return out


# -- characters ----------------------------------------------------------------

class Character(NamedTuple):
    """One-dimensional representation sending p to ``p`` and q to ``q`` (each 0 or 1)."""
    p: int
    q: int

    @property
    def name(self) -> str:
        return f"chi{self.p}{self.q}"

    def on_word(self, w: Word) -> int:
        if not self.p and "P" in w:
            return 0
        if not self.q and "Q" in w:
            return 0
        return 1

    def __call__(self, x: AlgebraElement) -> Coef:
        return normalize_coef(sum(c for w, c in x.terms if self.on_word(w)))


CHI00 = Character(0, 0)
CHI01 = Character(0, 1)
CHI10 = Character(1, 0)
CHI11 = Character(1, 1)
CHARACTERS = (CHI00, CHI01, CHI10, CHI11)


def character_from_name(name: str) -> Character:
    for chi in CHARACTERS:
        if chi.name == name:
            return chi
    raise ContractError(f"unknown character {name!r}")


def char_eval(x: TensorElement, chars: Sequence[Character]) -> Coef:
    """Apply a character on every leg; the result is an exact rational."""
    if len(chars) != x.legs:
        raise ContractError(f"{len(chars)} characters supplied for {x.legs} legs")
    total = 0
    for tw, c in x.terms:
        for chi, w in zip(chars, tw):
            if not chi.on_word(w):
                break
        else:
            total += c
    return normalize_coef(total)


def char_eval_legs(x: TensorElement, assignment: Mapping[int, Character]) -> TensorElement:
    """Apply characters on the legs named in ``assignment``; the other legs survive in order."""
    for leg in assignment:
        if not 0 <= leg < x.legs:
            raise ContractError(f"leg {leg} out of range for {x.legs} legs")
    keep = [j for j in range(x.legs) if j not in assignment]
    fixed = sorted(assignment.items())
    acc: dict[TensorWord, Coef] = {}
    for tw, c in x.terms:
        if all(chi.on_word(tw[j]) for j, chi in fixed):
            key = tuple(tw[j] for j in keep)
            acc[key] = acc.get(key, 0) + c
    return TensorElement._raw(len(keep), acc)


def char_eval_partial(x: TensorElement, leg_range: tuple[int, int],
                      chars: Sequence[Character]) -> TensorElement:
    """Apply ``chars`` to the legs ``leg_range[0] <= j < leg_range[1]``."""
    start, stop = leg_range
    if not 0 <= start <= stop <= x.legs:
        raise ContractError(f"invalid leg range {leg_range} for {x.legs} legs")
    if len(chars) != stop - start:
        raise ContractError(f"{len(chars)} characters supplied for {stop - start} legs")
    return char_eval_legs(x, {start + i: chi for i, chi in enumerate(chars)})


# -- factored form -------------------------------------------------------------

class FactoredTensor:
    """Sum of elementary tensors whose legs are :class:`AlgebraElement` values.

    This is the working form for products of matrix entries: multiplying two
    elementary tensors multiplies leg by leg, and a vanishing leg drops the
    whole term before anything is expanded.  Two factored tensors are equal
    iff their expansions are.
    """

    __slots__ = ("legs", "terms")

    def __init__(self, legs: int, terms: Iterable = ()):
        self.legs = legs
        acc: dict = {}
        for factors, c in terms:
            factors = tuple(factors)
            if len(factors) != legs:
                raise ContractError(f"elementary tensor with {len(factors)} legs, expected {legs}")
            if c == 0 or any(f.is_zero() for f in factors):
                continue
            acc[factors] = acc.get(factors, 0) + normalize_coef(c)
        self.terms = tuple((f, normalize_coef(c)) for f, c in acc.items() if c != 0)

    @classmethod
    def unit(cls, legs: int) -> "FactoredTensor":
        return cls(legs, [((ONE,) * legs, 1)])

    @classmethod
    def zero(cls, legs: int) -> "FactoredTensor":
        return cls(legs, [])

    @classmethod
    def from_algebra(cls, x: AlgebraElement) -> "FactoredTensor":
        return cls(1, [((x,), 1)])

    @classmethod
    def from_tensor(cls, x: TensorElement) -> "FactoredTensor":
        return cls(x.legs, [(tuple(AlgebraElement.word(w) for w in tw), c) for tw, c in x.terms])

    def __len__(self):
        return len(self.terms)

    def _check(self, other):
        if other.legs != self.legs:
            raise ContractError(f"leg counts differ: {self.legs} vs {other.legs}")

    def __add__(self, other: "FactoredTensor") -> "FactoredTensor":
        self._check(other)
        return FactoredTensor(self.legs, self.terms + other.terms)

    def __neg__(self):
        return FactoredTensor(self.legs, [(f, -c) for f, c in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Coef) -> "FactoredTensor":
        return FactoredTensor(self.legs, [(f, c * d) for f, d in self.terms])

    def __mul__(self, other: "FactoredTensor") -> "FactoredTensor":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        out = []
        for f, c in self.terms:
            for g, d in other.terms:
                legs = []
                for a, b in zip(f, g):
                    ab = _alg_mul(a, b)
                    if not ab._terms:
                        break
                    legs.append(ab)
                else:
                    out.append((tuple(legs), c * d))
        return FactoredTensor(self.legs, out)

    def tensor(self, other: "FactoredTensor") -> "FactoredTensor":
        return FactoredTensor(self.legs + other.legs,
                              [(f + g, c * d) for f, c in self.terms for g, d in other.terms])

    def adjoint(self) -> "FactoredTensor":
        return FactoredTensor(self.legs, [(tuple(a.adjoint() for a in f), c) for f, c in self.terms])

    def expanded_size(self) -> int:
        """Upper bound on the number of word terms of the expansion."""
        total = 0
        for f, _ in self.terms:
            size = 1
            for a in f:
                size *= len(a.terms)
            total += size
        return total

    def expand(self, budget: int | None = DEFAULT_TERM_BUDGET) -> TensorElement:
        if budget is not None:
            need = self.expanded_size()
            if need > budget:
                raise ExpansionBudgetError("factored tensor", need, budget)
        acc: dict[TensorWord, Coef] = {}
        for f, c in self.terms:
            for combo in _iproduct(*(a.terms for a in f)):
                tw = tuple(w for w, _ in combo)
                coef = c
                for _, d in combo:
                    coef *= d
                acc[tw] = acc.get(tw, 0) + coef
        return TensorElement._raw(self.legs, acc)

    def char_eval(self, chars: Sequence[Character]) -> Coef:
        if len(chars) != self.legs:
            raise ContractError(f"{len(chars)} characters supplied for {self.legs} legs")
        total = 0
        for f, c in self.terms:
            v = c
            for chi, a in zip(chars, f):
                v *= chi(a)
                if not v:
                    break
            total += v
        return normalize_coef(total)

    def char_eval_legs(self, assignment: Mapping[int, Character]) -> "FactoredTensor":
        keep = [j for j in range(self.legs) if j not in assignment]
        out = []
        for f, c in self.terms:
            v = c
            for j, chi in assignment.items():
                v *= chi(f[j])
                if not v:
                    break
            if v:
                out.append((tuple(f[j] for j in keep), v))
        return FactoredTensor(len(keep), out)

    def __eq__(self, other):
        if not isinstance(other, FactoredTensor):
            return NotImplemented
        return self.legs == other.legs and self.expand(None) == other.expand(None)

    __hash__ = None

    def __repr__(self):
        parts = []
        for f, c in self.terms:
            legs = " ⊗ ".join(f"({a})" for a in f) if f else "1"
            parts.append(f"{c}*{legs}" if c != 1 else legs)
        return "FactoredTensor[%d](%s)" % (self.legs, " + ".join(parts) or "0")


def as_factored(x) -> FactoredTensor:
    if isinstance(x, FactoredTensor):
        return x
    if isinstance(x, TensorElement):
        return FactoredTensor.from_tensor(x)
    if isinstance(x, AlgebraElement):
        return FactoredTensor.from_algebra(x)
    if isinstance(x, (int, Fraction)):
        return FactoredTensor(0, [((), x)])
    raise TypeError(f"cannot convert {type(x).__name__} to a tensor")


def all_words(max_len: int) -> list[Word]:
    """Every alternating word of length at most ``max_len`` in canonical order."""
    out = [""]
    for n in range(1, max_len + 1):
        for first in LETTERS:
            other = "Q" if first == "P" else "P"
            out.append("".join(first if i % 2 == 0 else other for i in range(n)))
    return sorted(out, key=word_key)


def character_tuples(legs: int, choices: Sequence[Character] = CHARACTERS):
    return _iproduct(choices, repeat=legs)
