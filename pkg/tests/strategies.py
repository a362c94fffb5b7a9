"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from operp.algebra import AlgebraElement, TensorElement

letters = st.sampled_from("PQ")


@st.composite
def words(draw, max_len=12):
    n = draw(st.integers(0, max_len))
    if n == 0:
        return ""
    first = draw(letters)
    other = "Q" if first == "P" else "P"
    return "".join(first if i % 2 == 0 else other for i in range(n))


coefs = st.one_of(st.integers(-3, 3), st.fractions(min_value=-2, max_value=2, max_denominator=5))


@st.composite
def elements(draw, max_terms=4, max_len=5):
    terms = draw(st.lists(st.tuples(words(max_len), coefs), max_size=max_terms))
    return AlgebraElement(terms)


@st.composite
def tensors(draw, legs, max_terms=4, max_len=4):
    terms = draw(st.lists(st.tuples(st.tuples(*[words(max_len)] * legs), coefs), max_size=max_terms))
    return TensorElement(legs, terms)


def as_fraction(c):
    return Fraction(c)
