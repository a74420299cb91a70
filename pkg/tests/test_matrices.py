import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regrep import matrices as mx
from regrep.errors import ParseError, ShapeMismatch
from regrep.localring import RingElem

from conftest import ring

RINGS = ["Zp:p=2,r=3", "Zp:p=3,r=2", "Fqt:p=2,f=1,r=3", "Fqt:p=2,f=2,r=1"]


def mat_strategy(R, n):
    return st.lists(st.integers(0, R.size - 1), min_size=n * n, max_size=n * n).map(
        lambda v: mx.Mat(R, np.array(v).reshape(n, n)))


def test_trace_and_det_examples(z8):
    assert mx.Mat.identity(z8, 2).trace() == RingElem(z8, 2)
    d = mx.Mat.diag(z8, [1, 4])
    assert d.det() == RingElem(z8, 4)
    assert not d.is_invertible()


def test_shape_mismatch(z8):
    with pytest.raises(ShapeMismatch):
        mx.mat_arith("add", mx.Mat.identity(z8, 2), mx.Mat.identity(z8, 3))


def test_parse_matrix(z8, f2t3):
    assert mx.parse_matrix(z8, "[0,1;1,1]") == mx.Mat(z8, [[0, 1], [1, 1]])
    assert mx.parse_matrix(f2t3, "[1+t,t^2;0,1]").a.tolist() == [[3, 4], [0, 1]]
    with pytest.raises(ParseError):
        mx.parse_matrix(z8, "[0,1;1]")
    with pytest.raises(ParseError):
        mx.parse_matrix(z8, "0,1;1,0")


def test_howell_examples(z4, z8):
    b = mx.howell_basis(z4, [(2, 0), (0, 2)])
    assert b.elementary_type == (1, 1) and b.free_rank == 0
    assert mx.howell_basis(z8, [(1, 1)]).free_rank == 1
    a1 = mx.howell_basis(z8, [(2, 4), (4, 0)])
    a2 = mx.howell_basis(z8, [(4, 0), (2, 4)])
    assert a1 == a2
    # against the exhaustive span of 64 coefficient pairs
    span = {((2 * s + 4 * t) % 8, (4 * s) % 8) for s in range(8) for t in range(8)}
    assert {tuple(v) for v in a1.elements().tolist()} == span
    assert a1.size == len(span)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(*[st.integers(0, 7)] * 3), min_size=1, max_size=4), st.randoms())
def test_howell_canonical_under_reordering(vectors, rnd):
    R = ring("Zp:p=2,r=3")
    shuffled = list(vectors)
    rnd.shuffle(shuffled)
    a = mx.howell_basis(R, vectors)
    b = mx.howell_basis(R, shuffled + [tuple((2 * x) % 8 for x in vectors[0])])
    assert a == b
    for v in vectors:
        assert a.contains(v)


def test_char_poly_examples():
    F2 = ring("Zp:p=2,r=1")
    f = mx.parse_poly(F2, "x^2+x+1")
    assert mx.Mat(F2, mx.companion(F2, f)).char_poly() == f
    z8 = ring("Zp:p=2,r=3")
    assert mx.poly_format(z8, mx.Mat.identity(z8, 2).char_poly()) == "x^2+6*x+1"


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(RINGS), st.integers(1, 3), st.data())
def test_cayley_hamilton_and_reduction(text, n, data):
    R = ring(text)
    a = data.draw(mat_strategy(R, n))
    f = a.char_poly()
    assert len(f) == n + 1 and f[-1] == R.one
    assert not mx.poly_eval_matrix(R, f, a.a).any()
    for i in range(1, R.r + 1):
        assert a.reduce(i).char_poly() == mx.poly_reduce(R, f, i)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(RINGS), st.integers(1, 3), st.data())
def test_trace_symmetric_and_det_multiplicative(text, n, data):
    R = ring(text)
    a, b = data.draw(mat_strategy(R, n)), data.draw(mat_strategy(R, n))
    assert (a @ b).trace() == (b @ a).trace()
    assert (a @ b).det() == a.det() * b.det()
    if a.is_invertible():
        assert a @ a.inv() == mx.Mat.identity(R, n)


def test_centralizer_of_regular_residue():
    F2 = ring("Zp:p=2,r=1")
    beta = mx.Mat(F2, mx.companion(F2, mx.parse_poly(F2, "x^2+x+1")))
    assert mx.centralizer_module(beta).log_size == 2


def test_centralizer_of_scalar(z8):
    c = mx.centralizer_module(mx.Mat.diag(z8, [3, 3]))
    assert c.free_rank == 4


def test_centralizer_companion_x2_exhaustive(z8):
    beta = mx.Mat(z8, mx.companion(z8, mx.parse_poly(z8, "x^2")))
    c = mx.centralizer_module(beta, 3)
    assert c.free_rank == 2
    brute = set()
    for v in itertools.product(range(8), repeat=4):
        x = np.array(v).reshape(2, 2)
        if np.array_equal(mx.matmul(z8, x, beta.a), mx.matmul(z8, beta.a, x)):
            brute.add(v)
    assert {tuple(v) for v in c.elements().tolist()} == brute
    span = {tuple(((a * np.eye(2, dtype=int) + b * beta.a) % 8).reshape(-1).tolist())
            for a in range(8) for b in range(8)}
    assert span == brute


def test_is_regular_examples():
    F2 = ring("Zp:p=2,r=1")
    assert not mx.is_regular(mx.Mat.identity(F2, 2))
    assert mx.is_regular(mx.Mat(F2, mx.companion(F2, (0, 0, 1))))


def test_regular_count_in_m2_f2():
    F2 = ring("Zp:p=2,r=1")
    mats = mx.all_matrices(F2, 2)
    regular = [mx.Mat(F2, a) for a in mats if mx.is_regular(mx.Mat(F2, a))]
    by_char_eq_min = [mx.Mat(F2, a) for a in mats
                      if mx.Mat(F2, a).char_poly() == mx.min_poly(mx.Mat(F2, a))]
    # only the two scalar matrices have a 4-dimensional centralizer
    assert len(regular) == len(by_char_eq_min) == 14


@pytest.mark.parametrize("text,n,order", [("Zp:p=2,r=2", 2, 96), ("Zp:p=2,r=3", 2, 1536),
                                          ("Zp:p=2,r=3", 1, 4)])
def test_unit_group_order(text, n, order):
    R = ring(text)
    assert mx.unit_group_order(R, n) == order
    units = [a for a in mx.all_matrices(R, n) if R.is_unit(int(mx.det(R, a)))]
    assert len(units) == order
    assert len(mx.enumerate_gl(R, n)) == order


@pytest.mark.parametrize("text", ["Zp:p=2,r=2", "Zp:p=3,r=1", "Fqt:p=2,f=1,r=2"])
def test_trace_form_nondegenerate_n2(text):
    R = ring(text)
    mats = mx.all_matrices(R, 2).reshape(-1, 4)
    gram = mx.trace_form_pairing(R, mats, mx.identity(R, 4))
    nonzero = mats.any(axis=1)
    assert gram[nonzero].any(axis=1).all()


@pytest.mark.parametrize("text,n", [("Zp:p=2,r=2", 2), ("Zp:p=3,r=1", 2), ("Zp:p=2,r=1", 3),
                                    ("Zp:p=2,r=3", 2)])
def test_regular_centralizer_is_polynomial_span(text, n):
    R = ring(text)
    rng = np.random.default_rng(1)
    for a in mx.all_matrices(R, n, cap=1 << 20)[rng.permutation(R.size ** (n * n))[:60]]:
        beta = mx.Mat(R, a)
        if not mx.is_regular(beta):
            continue
        c = mx.centralizer_module(beta)
        assert c.free_rank == n
        powers = [mx.identity(R, n)]
        for _ in range(n - 1):
            powers.append(mx.matmul(R, powers[-1], beta.a))
        assert c == mx.howell_basis(R, [p.reshape(-1) for p in powers], n * n)


def test_centralizer_reduction_surjective(z8, z4):
    beta = mx.Mat(z8, mx.companion(z8, mx.parse_poly(z8, "x^2+x+1")))
    g8 = mx.enumerate_gl(z8, 2)
    comm = g8[(mx.matmul(z8, g8, beta.a) == mx.matmul(z8, beta.a, g8)).all(axis=(1, 2))]
    b4 = beta.reduce(2).a
    g4 = mx.enumerate_gl(z4, 2)
    target = g4[(mx.matmul(z4, g4, b4) == mx.matmul(z4, b4, g4)).all(axis=(1, 2))]
    image = np.unique(mx.pack(z4, comm % 4))
    assert np.array_equal(image, np.sort(mx.pack(z4, target)))
