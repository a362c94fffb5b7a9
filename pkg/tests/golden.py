"""Reference matrices for the R-family, written out entry by entry."""

from operp.algebra import P, Q, TensorElement, tensor
from operp.models import MagicMatrix

p, q = P, Q
np_, nq = 1 - P, 1 - Q


def T(*legs):
    return tensor(*legs)


def Z(legs):
    return TensorElement.zero(legs)


R_ROWS = [[p, 0, np_, 0], [np_, 0, p, 0], [0, q, 0, nq], [0, nq, 0, q]]
RHAT_ROWS = [[p, np_, 0, 0], [np_, p, 0, 0], [0, 0, q, nq], [0, 0, nq, q]]

RR = [
    [T(p, p), T(np_, q), T(p, np_), T(np_, nq)],
    [T(np_, p), T(p, q), T(np_, np_), T(p, nq)],
    [T(q, np_), T(nq, nq), T(q, p), T(nq, q)],
    [T(nq, np_), T(q, nq), T(nq, p), T(q, q)],
]

R3 = [
    [T(p, p, p) + T(np_, q, np_), T(p, np_, q) + T(np_, nq, nq),
     T(p, p, np_) + T(np_, q, p), T(p, np_, nq) + T(np_, nq, q)],
    [T(np_, p, p) + T(p, q, np_), T(np_, np_, q) + T(p, nq, nq),
     T(np_, p, np_) + T(p, q, p), T(np_, np_, nq) + T(p, nq, q)],
    [T(q, np_, p) + T(nq, nq, np_), T(q, p, q) + T(nq, q, nq),
     T(q, np_, np_) + T(nq, nq, p), T(q, p, nq) + T(nq, q, q)],
    [T(nq, np_, p) + T(q, nq, np_), T(nq, p, q) + T(q, q, nq),
     T(nq, np_, np_) + T(q, nq, p), T(nq, p, nq) + T(q, q, q)],
]


def _lift(rows):
    return [[T(e) if not isinstance(e, int) else TensorElement.scalar(1, e) for e in r] for r in rows]



R5_ROWS = [[p, 0, 0, np_, 0], [0, 1, 0, 0, 0], [0, 0, q, 0, nq], [np_, 0, 0, p, 0], [0, 0, nq, 0, q]]


def golden_matrix(rows) -> MagicMatrix:
    return MagicMatrix(_lift(rows), legs=1)


def rhat_square():
    pp, pn = T(p, p) + T(np_, np_), T(p, np_) + T(np_, p)
    qq, qn = T(q, q) + T(nq, nq), T(q, nq) + T(nq, q)
    z = Z(2)
    return [[pp, pn, z, z], [pn, pp, z, z], [z, z, qq, qn], [z, z, qn, qq]]
