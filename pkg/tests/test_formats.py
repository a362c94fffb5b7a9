import json
from fractions import Fraction

import pytest
from hypothesis import given

from operp.algebra import ContractError
from operp.formats import (
    CacheVersionError,
    cache_name,
    load_matrix,
    matrix_from_cache,
    matrix_to_cache,
    perm_from_json,
    perm_to_json,
    polynomial_from_json,
    polynomial_to_json,
    rational_from_json,
    rational_to_json,
    save_matrix,
    tensor_from_json,
    tensor_to_json,
)
from operp.models import is_magic
from operp.polynomials import parse_polynomial
from strategies import tensors


def test_rationals():
    assert rational_to_json(Fraction(-2, 6)) == {"num": "-1", "den": "3"}
    assert rational_from_json({"num": "4", "den": "1"}) == 4
    with pytest.raises(ContractError):
        rational_from_json({"num": "2", "den": "4"})
    with pytest.raises(ContractError):
        rational_from_json({"num": "1", "den": "-3"})


@given(tensors(3))
def test_tensor_round_trip(x):
    assert tensor_from_json(json.loads(json.dumps(tensor_to_json(x)))) == x


def test_permutations_are_one_based():
    assert perm_to_json((1, 0, 2)) == [2, 1, 3]
    assert perm_from_json([2, 1, 3]) == (1, 0, 2)
    with pytest.raises(ContractError):
        perm_from_json([1, 1, 2])


def test_polynomial_round_trip():
    P = parse_polynomial("X12*X21* - 1/2*X33 + 4")
    assert polynomial_from_json(polynomial_to_json(P)) == P


def test_matrix_cache_round_trip(tmp_path, M2):
    path = save_matrix(tmp_path / cache_name("rr", 4, 2), M2, track="rr", n=2)
    text = path.read_text()
    back = load_matrix(path)
    assert back == M2 and is_magic(back).ok
    save_matrix(tmp_path / "again.json", back, track="rr", n=2)
    assert (tmp_path / "again.json").read_text() == text


def test_lazy_chain_cache(chain4):
    doc = matrix_to_cache(chain4, track="general", n=1, L=3)
    assert doc["entries"] == ["lazy"] * 16 and len(doc["factor_metadata"]) == 18
    back = matrix_from_cache(json.loads(json.dumps(doc)))
    assert back.metadata == chain4.metadata
    assert all(a == b for a, b in zip(back.factors, chain4.factors))


def test_cache_version_mismatch(M1):
    doc = matrix_to_cache(M1, track="rr", n=1)
    doc["version"] = 99
    with pytest.raises(CacheVersionError):
        matrix_from_cache(doc)
