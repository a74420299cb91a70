import functools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regrep import matrices as mx
from regrep import orbits as ob
from regrep import parahoric as ph
from regrep.errors import NotRegular, ParseError

from conftest import ring

FIELDS = ["Zp:p=2,r=1", "Zp:p=3,r=1", "Fqt:p=2,f=2,r=1", "Zp:p=5,r=1"]


def product_of(F, factors):
    out = (F.one,)
    for f, m in factors:
        for _ in range(m):
            out = mx.poly_mul(F, out, f)
    return out


def conjugation_orbit(R, G, beta):
    conj = mx.matmul(R, mx.matmul(R, G, beta), mx.inverse(R, G))
    return np.unique(mx.pack(R, conj))


def test_factor_examples():
    F2 = ring("Zp:p=2,r=1")
    f = mx.parse_poly(F2, "x^2+x+1")
    assert ob.factor_over_Fq(F2, f) == [(f, 1)]
    assert sorted(ob.factor_over_Fq(F2, mx.parse_poly(F2, "x^2+x"))) == [((0, 1), 1), ((1, 1), 1)]
    quartic = mx.parse_poly(F2, "x^4+x^2+1")
    assert ob.factor_over_Fq(F2, quartic) == [(f, 2)]
    # trial multiplication over all monic polynomials of degree <= 2
    irreducible = [g for d in (1, 2) for g in ob.monic_polys(F2, d) if ob.is_irreducible(F2, g)]
    hits = [g for g in irreducible if not ob.pmod(F2, quartic, g)]
    assert hits == [f]


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(FIELDS), st.integers(1, 6), st.data())
def test_factorization_reproduces(text, degree, data):
    F = ring(text)
    coeffs = data.draw(st.lists(st.integers(0, F.size - 1), min_size=degree, max_size=degree))
    f = tuple(coeffs) + (F.one,)
    factors = ob.factor_over_Fq(F, f)
    assert product_of(F, factors) == f
    assert all(ob.is_irreducible(F, g) and g[-1] == F.one for g, _ in factors)
    assert len({g for g, _ in factors}) == len(factors)


@pytest.mark.parametrize("text,n,count", [("Zp:p=2,r=1", 2, 4), ("Zp:p=3,r=1", 2, 9)])
def test_regular_class_list_against_brute_force(text, n, count):
    F = ring(text)
    reps = ob.regular_class_list(F, n, 1)
    G = mx.enumerate_gl(F, n)
    mats = mx.all_matrices(F, n)
    regular = [a for a in mats if mx.is_regular(mx.Mat(F, a))]
    orbits = {tuple(conjugation_orbit(F, G, a)) for a in regular}
    assert len(orbits) == len(reps) == count
    assert all(mx.is_regular(rep.rep) for rep in reps)


def test_regular_class_list_n1():
    F = ring("Fqt:p=2,f=2,r=1")
    reps = ob.regular_class_list(F, 1, 1)
    assert len(reps) == 4


def test_regular_char_polys_n2_f2():
    F2 = ring("Zp:p=2,r=1")
    labels = sorted(rep.label() for rep in ob.regular_class_list(F2, 2, 1))
    assert labels == sorted(["x^2", "x^2+1", "x^2+x", "x^2+x+1"])


def test_parse_orbit(z8):
    o = ob.parse_orbit(z8, "orbit:charpoly=x^2+x+1,level=1")
    assert o.level == 1 and o.n == 2 and str(o) == "orbit:charpoly=x^2+x+1,level=1"
    assert ob.parse_orbit(z8, "charpoly=x^2", default_level=1).level == 1
    for bad in ["orbit:x^2", "orbit:charpoly=x^2,level=9", "orbit:charpoly=2*x^2"]:
        with pytest.raises(ParseError):
            ob.parse_orbit(z8, bad)


def test_choose_beta_elliptic(z8):
    orbit = ob.parse_orbit(z8, "charpoly=x^2+x+1,level=1")
    bf = ob.choose_beta(orbit, z8)
    assert bf.partition.block_sizes() == (2,)
    assert mx.poly_reduce(z8, bf.beta.char_poly(), 1) == orbit.charpoly


def test_choose_beta_split(z8):
    orbit = ob.parse_orbit(z8, "charpoly=x^2+x,level=1")
    bf = ob.choose_beta(orbit, z8)
    b = bf.beta.a
    assert b[0, 1] == b[1, 0] == 0
    assert {b[0, 0] % 2, b[1, 1] % 2} == {0, 1}
    F2 = ring("Zp:p=2,r=1")
    G = mx.enumerate_gl(F2, 2)
    assert mx.pack(F2, b % 2) in conjugation_orbit(F2, G, orbit.rep.a)


def test_choose_beta_nilpotent_in_iwahori(z8):
    orbit = ob.parse_orbit(z8, "charpoly=x^2,level=1")
    bf = ob.choose_beta(orbit, z8)
    res = bf.beta.reduce(1)
    assert res.char_poly() == (0, 0, 1) and mx.is_regular(res)
    P = ph.ParahoricData(z8, ph.Flag(bf.partition.block_sizes()))
    assert P.contains(0, bf.beta.a)
    assert bf.residue_blocks() == [np.zeros((1, 1)), np.zeros((1, 1))]


def test_orbit_key_rejects_non_regular(z8):
    with pytest.raises(NotRegular):
        ob.orbit_key(mx.Mat.identity(z8, 2), 1)


def test_orbit_key_examples(z4):
    G = mx.enumerate_gl(z4, 2)
    a = mx.Mat(z4, mx.companion(z4, mx.parse_poly(z4, "x^2+2*x+1")))
    b = mx.Mat(z4, mx.companion(z4, mx.parse_poly(z4, "x^2+1")))
    assert ob.orbit_key(a, 2) != ob.orbit_key(b, 2)
    assert mx.pack(z4, b.a) not in conjugation_orbit(z4, G, a.a)
    g = mx.Mat(z4, G[17])
    assert ob.orbit_key(g @ a @ g.inv(), 2) == ob.orbit_key(a, 2)


@functools.lru_cache(maxsize=None)
def regular_orbit_census(text, n):
    R = ring(text)
    G = mx.enumerate_gl(R, n)
    mats = mx.all_matrices(R, n)
    res = R.residue_field
    regular = np.array([mx.is_regular(mx.Mat(res, a % R.q)) for a in mats])
    keys = mx.pack(R, mats[regular])
    seen, orbits = set(), []
    for k, a in zip(keys, mats[regular]):
        if int(k) in seen:
            continue
        orb = conjugation_orbit(R, G, a)
        seen.update(int(x) for x in orb)
        orbits.append(mx.Mat(R, a))
    return R, orbits


@pytest.mark.parametrize("text,n", [("Zp:p=2,r=2", 2), ("Zp:p=3,r=1", 2), ("Zp:p=2,r=1", 3),
                                    ("Fqt:p=2,f=1,r=2", 2), ("Zp:p=3,r=2", 2), ("Zp:p=3,r=1", 3)])
def test_char_poly_is_complete_invariant(text, n):
    R, orbits = regular_orbit_census(text, n)
    keys = [ob.orbit_key(b, R.r) for b in orbits]
    assert len(set(keys)) == len(keys) == R.size ** n


def test_sixteen_regular_classes_mod_4():
    R, orbits = regular_orbit_census("Zp:p=2,r=2", 2)
    assert len(orbits) == 16


@pytest.mark.parametrize("text", ["Zp:p=2,r=3", "Fqt:p=2,f=1,r=3"])
def test_centralizer_is_polynomial_units(text):
    R = ring(text)
    G = mx.enumerate_gl(R, 2)
    for orbit in ob.regular_class_list(R, 2, 1):
        beta = ob.choose_beta(orbit, R).beta.a
        comm = G[(mx.matmul(R, G, beta) == mx.matmul(R, beta, G)).all(axis=(1, 2))]
        span = R.add_arr(R.mul_arr(np.arange(R.size)[:, None, None, None], mx.identity(R, 2)),
                         R.mul_arr(np.arange(R.size)[None, :, None, None], beta)).reshape(-1, 2, 2)
        units = span[R.inv_table[mx.det(R, span)] >= 0]
        assert np.array_equal(np.sort(mx.pack(R, comm)), np.unique(mx.pack(R, units)))


@pytest.mark.parametrize("text,n", [("Zp:p=2,r=3", 2), ("Fqt:p=2,f=1,r=3", 2), ("Zp:p=3,r=2", 2),
                                    ("Zp:p=2,r=2", 3)])
def test_centralizer_inside_amin_and_residue_count(text, n):
    R = ring(text)
    for orbit in ob.regular_class_list(R, n, 1):
        bf = ob.choose_beta(orbit, R)
        flag = ph.Flag(bf.partition.block_sizes())
        P = ph.ParahoricData(R, flag)
        assert P.contains(0, bf.beta.a)
        # centralizer in A_min/P_min of the residue, counted directly
        res = R.residue_field
        blocks = P.flag.block_of
        upper = (blocks[:, None] <= blocks[None, :])
        mats = mx.all_matrices(res, n)
        mats = mats[(mats[:, ~upper] == 0).all(axis=1)]
        diag = blocks[:, None] == blocks[None, :]
        b = bf.beta.a % R.q * diag
        comm = (mx.matmul(res, mats, b) - mx.matmul(res, b, mats)) % R.q
        # [x, beta] lands in the radical iff its block-diagonal part vanishes
        in_radical = (comm[:, diag] == 0).all(axis=1)
        blockdiag = np.unique(mx.pack(res, mats[in_radical] * diag))
        assert len(blockdiag) == R.q ** n
        # every centralizer element lies in A_min^x
        C = mx.enumerate_gl(R, n, cap=1 << 20) if mx.unit_group_order(R, n) <= 1 << 20 else None
        if C is not None:
            comm_g = C[(mx.matmul(R, C, bf.beta.a) == mx.matmul(R, bf.beta.a, C)).all(axis=(1, 2))]
            assert P.contains_batch(0, comm_g).all()
