import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from operp.algebra import CHARACTERS, CHI01, CHI11, TensorElement, char_eval
from operp.models import build_R, scalar_identity, tower
from operp.morphisms import (
    MorphismError,
    all_perms,
    compose,
    decompose,
    eval_at_permutation,
    inverse,
    mu_sigma,
    nu_character,
    perm_matrix,
    pi_map,
    pi_map_levels,
    separation_matrix,
    separation_report,
    to_CSN,
    transposition,
)
from operp.polynomials import StarPolynomial, parse_polynomial, poly_eval, random_polynomial

perms4 = st.permutations(range(4)).map(tuple)


def _matmul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


@given(perms4, perms4)
def test_perm_matrix_is_a_homomorphism(s, t):
    assert perm_matrix(compose(s, t)) == _matmul(perm_matrix(s), perm_matrix(t))


@given(st.permutations(range(6)).map(tuple))
def test_decomposition_is_minimal(s):
    from operp.morphisms import cycles
    dec = decompose(s)
    assert dec.product() == inverse(s)
    assert dec.length == 6 - len(cycles(s))
    assert all(a < b for a, b in dec.transpositions)


def test_nu_on_both_tracks(M1, chain4):
    assert nu_character(M1) == (CHI11, CHI11)
    assert len(nu_character(chain4)) == 18


def test_nu_does_not_exist_for_bare_R():
    with pytest.raises(MorphismError):
        nu_character(build_R())


def test_mu_of_a_transposition(chain4):
    s = transposition(4, 0, 1)
    chars = mu_sigma(s, chain4)
    assert chars[chain4.leg_index(1, (1, 2))] == CHI01
    assert sum(c == CHI01 for c in chars) == 1
    assert chain4.evaluate(chars) == perm_matrix(s)


def test_mu_sends_M1_to_inverse_permutation(chain4):
    for s in all_perms(4):
        assert chain4.evaluate(mu_sigma(s, chain4)) == perm_matrix(inverse(s))


def test_mu_sigma_on_products(chain4):
    for s in all_perms(4):
        img = chain4.evaluate(mu_sigma(s, chain4))
        v = 1
        for i in range(4):
            v *= img[i][s[i]]
        assert v == 1


def test_separation_identity_N4():
    S = separation_matrix(4)
    assert S == scalar_identity(24)
    assert sum(S[0]) == 1
    assert separation_report(4).to_json() == {"N": 4, "track": "general", "L": 3, "is_identity": True}


def test_separation_identity_N5():
    assert separation_report(5).is_identity


def test_pi_maps_generators(M1, M2):
    assert pi_map(M2, 2) == M1
    assert pi_map(TensorElement.unit(4), 2) == TensorElement.unit(2)
    M3 = tower(M1, 3)
    assert pi_map_levels(M3.entry(1, 2), 2, 3, 1) == M1.entry(1, 2)


@given(st.integers(0, 10 ** 6))
def test_pi_is_a_homomorphism(M1, M2, seed):
    Pn = random_polynomial(random.Random(seed), 4, 3)
    assert pi_map(poly_eval(Pn, M2), 2) == poly_eval(Pn, M1)


def test_pi_on_general_track_via_characters(chain4):
    from operp.models import operp
    M2 = operp(chain4, chain4)
    rng = random.Random(5)
    for _ in range(20):
        chars = tuple(rng.choice(CHARACTERS) for _ in range(18))
        assert M2.evaluate(chars + (CHI11,) * 18) == chain4.evaluate(chars)


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=3),
       st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=3))
def test_nu_is_multiplicative(M2, a, b):
    x = TensorElement.unit(4)
    for i, j in a:
        x = x * M2.entry(i, j)
    y = TensorElement.unit(4)
    for i, j in b:
        y = y * M2.entry(i, j)
    nu = (CHI11,) * 4
    assert char_eval(x * y, nu) == char_eval(x, nu) * char_eval(y, nu)


def test_to_CSN_of_generators(chain4):
    for i in range(4):
        for j in range(4):
            tab = to_CSN(StarPolynomial.var(i, j), chain4)
            assert all(tab(s) == int(i == s[j]) for s in all_perms(4))
    row = to_CSN(parse_polynomial("X11 + X12 + X13 + X14"), chain4)
    assert set(row.values.values()) == {1}


def test_to_CSN_orthogonality(chain4):
    def m(s):
        return StarPolynomial.monomial([(i, s[i], False) for i in range(4)])
    s, t = (1, 0, 2, 3), (0, 1, 3, 2)
    assert to_CSN(m(s) * m(t), chain4).is_zero()
    assert to_CSN(m(s), chain4)(inverse(s)) == 1


def test_eval_on_tensor_elements(chain4):
    # the generators of a one-leg factor carry the characters of the matching leg
    x = chain4.factors[0].entry(0, 0)
    s = transposition(4, 0, 1)
    chars = mu_sigma(inverse(s), chain4)
    assert char_eval(x, chars[:1]) == eval_at_permutation(
        TensorElement(18, [((w,) + ("",) * 17, c) for (w,), c in x.terms]), s, chain4)
