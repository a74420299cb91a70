import functools

import numpy as np
import pytest

from regrep import construction as cn
from regrep import grouptheory as gt
from regrep import matrices as mx
from regrep.errors import NotRegular
from regrep.orbits import OrbitRep, parse_orbit

from conftest import ring


@functools.lru_cache(maxsize=None)
def full_group(text, n):
    R = ring(text)
    return gt.Group(R, n, mx.enumerate_gl(R, n), "G")


@functools.lru_cache(maxsize=None)
def built(text, n, poly):
    R = ring(text)
    d = cn.make_datum(R, n, parse_orbit(R, f"charpoly={poly},level={R.r // 2}"))
    d.groups["G"] = full_group(text, n)
    cn.build_subgroups(d)
    return d


@functools.lru_cache(maxsize=None)
def report(text, n, poly):
    R = ring(text)
    return cn.construct(R, n, parse_orbit(R, f"charpoly={poly},level={R.r // 2}"),
                        G=full_group(text, n))


def statuses(ledger, lemma):
    return [e["status"] for e in ledger if e["lemma"] == lemma]


def test_levels():
    d = built("Zp:p=2,r=3", 2, "x^2+x+1")
    assert (d.l, d.lp) == (2, 1) and d.l + d.lp == d.r


def test_psi_beta_zero_is_trivial(z8):
    K = cn._kl(built("Zp:p=2,r=3", 2, "x^2+x+1"))
    assert not cn.psi_beta_exps(z8, np.zeros((2, 2), dtype=np.int64), K.mats).any()


def test_psi_beta_duality_count(z8):
    d = built("Zp:p=2,r=3", 2, "x^2+x+1")
    K = d["K^l"]
    table = gt.character_table(K)
    assert len(table) == 2 ** 4
    exps = {tuple(cn.psi_beta_exps(z8, b, K.mats)) for b in cn._digits_to_matrices(z8, 1, 2)}
    assert len(exps) == 16


def test_psi_beta_equivariance_and_homomorphism():
    d = built("Zp:p=2,r=3", 2, "x^2")
    cn.psi_beta_checks(d)
    for lemma in ("psi-beta-homomorphism", "psi-beta-duality", "psi-beta-equivariance"):
        assert statuses(d.ledger, lemma)[-1] == "pass"


def test_elliptic_groups_coincide():
    d = built("Zp:p=2,r=3", 2, "x^2+x+1")
    assert np.array_equal(d["H_m"].keys, d["H_M"].keys)
    assert np.array_equal(d["J_m"].keys, d["J_M"].keys)
    assert np.array_equal(d["J_M"].keys, d["J_mM"].keys)


@pytest.mark.parametrize("poly", ["x^2", "x^2+x", "x^2+1"])
def test_split_bridge_index(poly):
    d = built("Zp:p=2,r=3", 2, poly)
    assert gt.index(d["J_mM"], d["J_m"]) == 2
    assert d["H_M"].is_subgroup_of(d["H_m"])
    assert d["J_M"].is_subgroup_of(d["J_mM"]) and d["J_m"].is_subgroup_of(d["J_mM"])
    assert d["K^l"].is_subgroup_of(d["U_m^(el'+1)"])
    assert d["J_M"].is_normal_in(d["CK^l'"]) and d["H_M"].is_normal_in(d["CK^l'"])


@pytest.mark.parametrize("text,poly,index", [("Zp:p=2,r=3", "x^2+x", 1),
                                             ("Zp:p=2,r=3", "x^2+x+1", 3),
                                             ("Zp:p=3,r=3", "x^2+x", 4)])
def test_sylow_index(text, poly, index):
    R = ring(text)
    d = cn.make_datum(R, 2, parse_orbit(R, f"charpoly={poly},level=1"))
    res = cn.sylow_check(d)
    assert res["ok"] and res["index"] == index


def test_theta_count_and_restriction():
    d = built("Zp:p=2,r=3", 2, "x^2+x+1")
    thetas = cn.extend_theta(d)
    assert len(thetas) == d["C∩K^1"].order // d["C∩K^l"].order
    psi = cn.psi_beta_character(d, d["K^l"])
    for th in thetas:
        assert th.restrict(d["K^l"]) == psi.lift(th.m)
    assert statuses(d.ledger, "theta-decomposition")[-1] == "pass"
    assert statuses(d.ledger, "psi-beta-stable-under-C∩U^1")[-1] == "pass"


@pytest.mark.parametrize("poly,deg_m", [("x^2+x", 1), ("x^2", 1), ("x^2+x+1", 2)])
def test_heisenberg_degrees(poly, deg_m):
    d = built("Zp:p=2,r=3", 2, poly)
    theta = cn.extend_theta(d)[0]
    lift_max = cn.radical_and_lift(d, "M", theta)
    assert lift_max.eta.degree == 2
    d2, theta_min = cn.min_side(d, theta)
    lift_min = cn.radical_and_lift(d2, "m", theta_min)
    assert lift_min.eta.degree == deg_m
    eta = cn.eta_bridge(d2, lift_min.eta, gt.transport(lift_max.eta, d2["J_M"]))
    assert eta.degree == lift_max.eta.degree


def test_report_degrees_and_counts():
    G = full_group("Zp:p=2,r=3", 2)
    for poly in ["x^2", "x^2+x", "x^2+1", "x^2+x+1"]:
        rep = report("Zp:p=2,r=3", 2, poly)
        assert rep.ok
        d = built("Zp:p=2,r=3", 2, poly)
        ck = d["CK^l'"].order
        for pi in rep.reps:
            assert pi.degree % (G.order // ck) == 0
            assert gt.inner(pi.chi, pi.chi) == 1
        values = {pi.chi.values.tobytes() for pi in rep.reps}
        assert len(values) == len(rep.reps)
        assert len({(pi.theta_id, pi.etahat_id) for pi in rep.reps}) == len(rep.reps)


def test_elliptic_degrees_equal():
    rep = report("Zp:p=2,r=3", 2, "x^2+x+1")
    d = built("Zp:p=2,r=3", 2, "x^2+x+1")
    want = full_group("Zp:p=2,r=3", 2).order // d["CK^l'"].order * 2
    assert {pi.degree for pi in rep.reps} == {want}


def test_eta_hat_restricts_to_eta_max():
    d = built("Zp:p=2,r=3", 2, "x^2+x")
    theta = cn.extend_theta(d)[0]
    lift = cn.radical_and_lift(d, "M", theta)
    hats = cn.extend_eta_hat(d, lift.eta)
    assert hats and all(gt.restrict(chi, d["J_M"]) == lift.eta.lift(chi.m) for _, chi in hats)
    assert len(hats) == gt.extension_count(d["J_M"], d["CK^l'"])


def test_surjectivity_recorded_not_asserted():
    rep = report("Zp:p=2,r=3", 2, "x^2")
    assert statuses(rep.ledger, "centralizer-surjective-M") == ["pass"]
    assert len(statuses(rep.ledger, "centralizer-surjective-m")) == 1
    assert rep.ok


def test_takase_gl2_z8():
    d = built("Zp:p=2,r=3", 2, "x^2+x+1")
    res = cn.takase_check(d)
    assert res["ok"] and res["degrees"] == [2] and res["radical_order"] == 4
    assert res["extended"] == res["sigmas"]


@pytest.mark.parametrize("poly", ["x^2", "x^2+x", "x^2+1", "x^2+x+1"])
def test_even_pipeline_gl2_z4(poly):
    rep = report("Zp:p=2,r=2", 2, poly)
    assert rep.ok
    d = cn.make_datum(ring("Zp:p=2,r=2"), 2, parse_orbit(ring("Zp:p=2,r=2"), f"charpoly={poly},level=1"))
    cn.build_subgroups(d)
    G = full_group("Zp:p=2,r=2", 2)
    assert {pi.degree for pi in rep.reps} == {G.order // d["CK^l'"].order}


def test_rejects_bad_inputs(z8):
    orbit = parse_orbit(z8, "charpoly=x^2,level=1")
    with pytest.raises(ValueError):
        cn.make_datum(z8, 3, orbit)
    with pytest.raises(ValueError):
        cn.construct(ring("Zp:p=2,r=1"), 2, OrbitRep(1, ring("Zp:p=2,r=1"), (0, 0, 1)))
    with pytest.raises(NotRegular):
        raise NotRegular("sentinel")


def test_report_json_schema():
    payload = report("Zp:p=2,r=3", 2, "x^2+x+1").to_json()
    assert {"ring", "N", "r", "orbit", "sylow_ok", "lemma_ledger", "reps", "oracle_match"} <= set(payload)
    assert {"theta_id", "etahat_id", "degree"} <= set(payload["reps"][0])
