"""Regular irreducible characters of GL_N(o_r) built from a regular orbit.

For odd r the chain is: psi_beta on K^l, its extensions theta_M to H_M^1,
Heisenberg lifts eta_M on J_M^1, extensions eta_hat of eta_M to C K^l', and
finally induction to G_r.  The minimal-parahoric side (theta_m, eta_m and
the bridge eta on J_{m,M}) is built alongside and checked against eta_M.
For even r, psi_beta on K^l' extends linearly to C K^l' and is induced.

Every intermediate identity is recorded in a ledger of ``report`` entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

import numpy as np

from . import cyclotomic as cy
from . import grouptheory as gt
from . import matrices as mx
from .errors import (DimensionMismatch, NoExtensionFound, NotRegular,
                     ObstructionNonzero)
from .localring import Ring
from .orbits import BlockForm, OrbitRep, choose_beta, regular_class_list
from .parahoric import Flag, ParahoricData, report

DEFAULT_CAP = 1 << 22


# ---------------------------------------------------------------------------
# element-level helpers


def psi_beta_exps(ring: Ring, beta: np.ndarray, mats: np.ndarray) -> np.ndarray:
    """Exponents of psi(pi^-r tr(beta (g - 1))) for a stack of matrices g."""
    n = beta.shape[0]
    x = ring.sub_arr(mats, mx.identity(ring, n))
    return ring.psi_table[mx.trace(ring, mx.matmul(ring, beta, x))]


def centralizer_units(ring: Ring, beta: np.ndarray) -> np.ndarray:
    """All units of o_r[beta], sorted by key (the centralizer of a regular beta)."""
    n = beta.shape[0]
    powers = [mx.identity(ring, n)]
    for _ in range(n - 1):
        powers.append(mx.matmul(ring, powers[-1], beta))
    grid = np.stack(np.meshgrid(*[np.arange(ring.size)] * n, indexing="ij"), axis=-1).reshape(-1, n)
    acc = np.zeros((len(grid), n, n), dtype=np.int64)
    for k, pw in enumerate(powers):
        acc = ring.add_arr(acc, ring.mul_arr(grid[:, k, None, None], pw[None]))
    acc = np.unique(acc, axis=0)
    units = acc[ring.inv_table[mx.det(ring, acc)] >= 0]
    return units[np.argsort(mx.pack(ring, units))]


def divide_by_pi(ring: Ring, x: np.ndarray, k: int) -> np.ndarray:
    """Entrywise representative of x / pi^k (entries must have valuation >= k)."""
    return np.asarray(x, dtype=np.int64) // ring.q ** k


def block_residue(ring: Ring, flag: Flag, x: np.ndarray) -> np.ndarray:
    """Image of x in A/P: residues of the diagonal blocks, zero elsewhere."""
    b = flag.block_of
    mask = b[:, None] == b[None, :]
    return np.where(mask, np.asarray(x) % ring.q, 0)


def quotient_reps(ring: Ring, flag: Flag) -> np.ndarray:
    """Residue representatives of A/P (block-diagonal matrices over F_q)."""
    n = flag.n
    b = flag.block_of
    slots = [(i, j) for i in range(n) for j in range(n) if b[i] == b[j]]
    grid = np.stack(np.meshgrid(*[np.arange(ring.q)] * len(slots), indexing="ij"), axis=-1)
    grid = grid.reshape(-1, len(slots))
    out = np.zeros((len(grid), n, n), dtype=np.int64)
    for k, (i, j) in enumerate(slots):
        out[:, i, j] = grid[:, k]
    return out


def commutator_with(ring: Ring, beta: np.ndarray, xs: np.ndarray) -> np.ndarray:
    return ring.sub_arr(mx.matmul(ring, beta, xs), mx.matmul(ring, xs, beta))


def combine_on_product(a: gt.LinearChar, b: gt.LinearChar, prod: gt.Group) -> gt.LinearChar:
    """The character x y -> a(x) b(y) on prod = A B (consistency checked)."""
    m = cy.lcm(a.m, b.m)
    ea, eb = a.lift(m).exps, b.lift(m).exps
    ring = prod.ring
    exps = np.full(prod.order, -1, dtype=np.int64)
    step = max(1, gt.CHUNK // max(b.group.order, 1))
    for start in range(0, a.group.order, step):
        block = a.group.mats[start:start + step]
        idx = prod.index_of_mats(mx.matmul(ring, block[:, None], b.group.mats[None]).reshape(-1, prod.n, prod.n))
        vals = (ea[start:start + step, None] + eb[None, :]).reshape(-1) % m
        exps[idx] = vals
        if not np.array_equal(exps[idx], vals):
            raise ObstructionNonzero("characters disagree on the intersection")
    if (exps < 0).any():
        raise ObstructionNonzero("product set does not cover the group")
    return gt.LinearChar(prod, m, exps)


def conjugate_class_function(chi: gt.ClassFunction, g: np.ndarray) -> gt.ClassFunction:
    """x -> chi(g^-1 x g) on the same (normal) subgroup."""
    grp = chi.group
    ring = grp.ring
    ginv = mx.inverse(ring, g)
    reps = grp.mats[grp.classes.reps]
    moved = mx.matmul(ring, mx.matmul(ring, ginv, reps), g)
    cls = grp.classes.class_of[grp.index_of_mats(moved)]
    return gt.ClassFunction(grp, chi.m, chi.values[cls])


# ---------------------------------------------------------------------------
# the datum


@dataclass
class RegularDatum:
    ring: Ring
    n: int
    orbit: OrbitRep
    block: BlockForm
    cap: int = DEFAULT_CAP
    groups: dict = field(default_factory=dict)
    ledger: list = field(default_factory=list)

    @property
    def r(self) -> int:
        return self.ring.r

    @property
    def l(self) -> int:
        return -(-self.r // 2)

    @property
    def lp(self) -> int:
        return self.r // 2

    @property
    def beta(self) -> np.ndarray:
        return self.block.beta.a

    @property
    def q(self) -> int:
        return self.ring.q

    @property
    def instance(self) -> str:
        return f"{self.ring.spec} N={self.n} {self.orbit}"

    def record(self, lemma: str, ok: bool, counterexample=None, fatal=None):
        self.ledger.append(report(lemma, self.instance, bool(ok), counterexample))
        if fatal is not None and not ok:
            raise fatal

    def parahorics(self) -> tuple[ParahoricData, ParahoricData]:
        amax = ParahoricData(self.ring, Flag((self.n,)), cap=self.cap)
        amin = ParahoricData(self.ring, Flag(self.block.partition.block_sizes()), cap=self.cap)
        return amax, amin

    @property
    def amax(self) -> ParahoricData:
        if "_amax" not in self.groups:
            self.groups["_amax"], self.groups["_amin"] = self.parahorics()
        return self.groups["_amax"]

    @property
    def amin(self) -> ParahoricData:
        self.amax
        return self.groups["_amin"]

    def group(self, name: str, mats) -> gt.Group:
        g = gt.Group(self.ring, self.n, mats, name)
        self.groups[name] = g
        return g

    def __getitem__(self, name: str) -> gt.Group:
        return self.groups[name]


def make_datum(ring: Ring, n: int, orbit: OrbitRep, cap: int = DEFAULT_CAP) -> RegularDatum:
    if orbit.n != n:
        raise ValueError(f"orbit is for N={orbit.n}, not {n}")
    if not mx.is_regular(orbit.rep):
        raise NotRegular(f"{orbit} is not regular")
    block = choose_beta(orbit, ring)
    d = RegularDatum(ring, n, orbit, block, cap)
    d.record("level-split", d.l + d.lp == d.r)
    return d


# ---------------------------------------------------------------------------
# psi_beta


def psi_beta_character(d: RegularDatum, group: gt.Group | None = None) -> gt.LinearChar:
    """psi_beta on K^l (or on any group inside 1 + p^l' M when r is even)."""
    if group is None:
        group = _kl(d)
    exps = psi_beta_exps(d.ring, d.beta, group.mats)
    return gt.LinearChar(group, d.ring.psi_modulus, exps)


def _kl(d: RegularDatum) -> gt.Group:
    if "K^l" not in d.groups:
        d.group("K^l", d.amax.enumerate_group(d.l))
    return d["K^l"]


def psi_beta_checks(d: RegularDatum, samples: int = 100, seed: int = 0) -> None:
    ring, n = d.ring, d.n
    kl = _kl(d)
    psi = psi_beta_character(d, kl)
    d.record("psi-beta-homomorphism", psi.is_homomorphism())
    # beta -> psi_beta is injective on gl_N(o_r) / p^l' gl_N(o_r)
    reps = _digits_to_matrices(ring, d.lp, n)
    table = np.array([psi_beta_exps(ring, b, kl.mats) for b in reps])
    distinct = len(np.unique(table, axis=0))
    d.record("psi-beta-duality", distinct == kl.order == ring.q ** (n * n * d.lp),
             {"distinct": int(distinct), "order": kl.order})
    # equivariance psi_{g beta g^-1}(1 + x) = psi_beta(1 + g^-1 x g)
    rng = np.random.default_rng(seed)
    gl = d.groups.get("G")
    gs = gl.mats[rng.integers(0, gl.order, samples)] if gl is not None else _random_units(ring, n, samples, rng)
    ks = kl.mats[rng.integers(0, kl.order, samples)]
    gi = mx.inverse(ring, gs)
    moved_beta = mx.matmul(ring, mx.matmul(ring, gs, d.beta), gi)
    lhs = np.array([psi_beta_exps(ring, b, k[None])[0] for b, k in zip(moved_beta, ks)])
    rhs = psi_beta_exps(ring, d.beta, mx.matmul(ring, mx.matmul(ring, gi, ks), gs))
    d.record("psi-beta-equivariance", np.array_equal(lhs, rhs))


def _digits_to_matrices(ring: Ring, level: int, n: int) -> np.ndarray:
    """All matrices whose entries are canonical representatives of o_level."""
    base = ring.q ** level
    codes = np.arange(base ** (n * n), dtype=np.int64)
    flat = (codes[:, None] // base ** np.arange(n * n)) % base
    return flat.reshape(-1, n, n)


def _random_units(ring: Ring, n: int, count: int, rng) -> np.ndarray:
    out = []
    while len(out) < count:
        a = rng.integers(0, ring.size, (n, n))
        if ring.inv_table[mx.det(ring, a)] >= 0:
            out.append(a)
    return np.array(out, dtype=np.int64)


# ---------------------------------------------------------------------------
# subgroups


def build_subgroups(d: RegularDatum) -> RegularDatum:
    ring, n = d.ring, d.n
    amax, amin = d.amax, d.amin
    ident = mx.identity(ring, n)
    cmats = centralizer_units(ring, d.beta)
    d.record("centralizer-commutes",
             np.array_equal(mx.matmul(ring, cmats, d.beta), mx.matmul(ring, d.beta, cmats)))
    c = d.group("C", cmats)
    x = ring.sub_arr(cmats, ident)
    d.group("C∩K^1", cmats[amax.contains_batch(1, x)])
    d.group("C∩K^l", cmats[amax.contains_batch(d.l, x)])
    d.group("C∩K^l'", cmats[amax.contains_batch(d.lp, x)])
    d.group("C∩U_m^1", cmats[amin.contains_batch(1, x)])
    d.group("K^l", amax.enumerate_group(d.l))
    klp = d.group("K^l'", amax.enumerate_group(d.lp))
    d.groups["CK^l'"] = gt.product_group(c, klp, "CK^l'", cap=d.cap)
    if d.r % 2 == 0:
        return d
    e = amin.e
    d.group("U_m^(el')", amin.enumerate_group(e * d.lp))
    d.group("U_m^(el'+1)", amin.enumerate_group(e * d.lp + 1))
    d.groups["H_M"] = gt.product_group(d["C∩K^1"], d["K^l"], "H_M", cap=d.cap)
    d.groups["J_M"] = gt.product_group(d["C∩K^1"], klp, "J_M", cap=d.cap)
    d.groups["H_m"] = gt.product_group(d["C∩U_m^1"], d["U_m^(el'+1)"], "H_m", cap=d.cap)
    d.groups["J_m"] = gt.product_group(d["C∩U_m^1"], d["U_m^(el')"], "J_m", cap=d.cap)
    d.groups["J_mM"] = gt.product_group(d["C∩U_m^1"], klp, "J_mM", cap=d.cap)
    inc = [("H_M", "H_m"), ("J_m", "J_mM"), ("J_M", "J_mM"), ("K^l", "U_m^(el'+1)"),
           ("U_m^(el')", "K^l'"), ("H_M", "J_M"), ("H_m", "J_m"), ("J_mM", "CK^l'")]
    bad = [f"{a}⊄{b}" for a, b in inc if not d[a].is_subgroup_of(d[b])]
    d.record("subgroup-inclusions", not bad, bad or None)
    normal = [name for name in ("H_M", "J_M") if not d[name].is_normal_in(d["CK^l'"])]
    d.record("normal-in-CK", not normal, normal or None)
    # [J_mM : J_m] = |g_1 / A_m-bar|
    flag = amin.flag
    abar = sum(b * b for b in flag.blocks) + sum(
        flag.blocks[i] * flag.blocks[j] for i in range(flag.e) for j in range(i + 1, flag.e))
    want = ring.q ** (n * n - abar)
    got = d["J_mM"].order // d["J_m"].order
    d.record("bridge-index", got == want, {"index": got, "expected": want})
    return d


def sylow_check(d: RegularDatum) -> dict:
    """[CK^l' : J_mM] = |C| / |C ∩ U_m^1| is prime to p."""
    ring = d.ring
    p = ring.p
    if "C" in d.groups and "C∩U_m^1" in d.groups:
        c, cu = d["C"].order, d["C∩U_m^1"].order
    else:
        cmats = centralizer_units(ring, d.beta)
        x = ring.sub_arr(cmats, mx.identity(ring, d.n))
        c, cu = len(cmats), int(d.amin.contains_batch(1, x).sum())
    index = c // cu
    ok = c % cu == 0 and index % p != 0
    detail = {"index": index, "C": c, "C∩U_m^1": cu}
    if "CK^l'" in d.groups:
        ck = d["CK^l'"].order
        jmm = c * d["K^l'"].order // d["C∩K^l'"].order // index
        if "J_mM" in d.groups:
            jmm = d["J_mM"].order
            ok = ok and ck % jmm == 0 and ck // jmm == index
        p_part = ck
        while p_part % p == 0:
            p_part //= p
        ok = ok and ck // p_part == jmm
        detail.update({"CK": ck, "J_mM": jmm})
    d.record("sylow", ok, detail)
    return {"ok": bool(ok), **detail}


# ---------------------------------------------------------------------------
# theta_M and theta_m


def extend_theta(d: RegularDatum) -> list[gt.LinearChar]:
    psi = psi_beta_character(d, d["K^l"])
    d.record("psi-beta-stable-under-C∩U^1", gt._stable(psi.lift(psi.m), d["H_M"]))
    thetas = gt.extend_linear_through_abelianization(psi, d["H_M"])
    want = d["C∩K^1"].order // d["C∩K^l"].order
    d.record("theta-count", len(thetas) == want, {"count": len(thetas), "expected": want},
             fatal=ObstructionNonzero("wrong number of extensions of psi_beta"))
    # theta = theta_0 psi_beta with theta_0 on C ∩ K^1 agreeing with psi_beta on C ∩ K^l
    ok = True
    ck1, kl = d["C∩K^1"], d["K^l"]
    psi_full = psi.lift(thetas[0].m).exps
    for th in thetas:
        t0 = th.restrict(ck1)
        agree = np.array_equal(t0.restrict(d["C∩K^l"]).exps,
                               psi_beta_exps(d.ring, d.beta, d["C∩K^l"].mats) * (th.m // psi.m) % th.m)
        prods = mx.matmul(d.ring, ck1.mats[:, None], kl.mats[None]).reshape(-1, d.n, d.n)
        lhs = th.at_keys(mx.pack(d.ring, prods))
        rhs = (t0.exps[:, None] + psi_full[None, :]).reshape(-1) % th.m
        ok = ok and agree and np.array_equal(lhs, rhs)
        if not np.array_equal(th.restrict(kl).exps, psi_full):
            ok = False
    d.record("theta-decomposition", ok)
    return thetas


def psi_beta_min(d: RegularDatum) -> gt.LinearChar:
    """psi_beta on U_m^(el'+1) by the same trace formula."""
    u = d["U_m^(el'+1)"]
    return gt.LinearChar(u, d.ring.psi_modulus, psi_beta_exps(d.ring, d.beta, u.mats))


def extend_theta_min(d: RegularDatum, theta_big: gt.LinearChar) -> gt.LinearChar | None:
    """An extension of theta_M to H_m^1 restricting to psi_beta on U_m^(el'+1).

    Returns None when theta_M and the trace formula disagree on the overlap.
    """
    hm, jm = d["H_m"], d["J_m"]
    psi_min = psi_beta_min(d)
    s = gt.product_group(d["H_M"], psi_min.group, "H_M U_m^(el'+1)", cap=d.cap)
    try:
        joint = combine_on_product(theta_big, psi_min, s)
    except ObstructionNonzero:
        return None
    out = gt.extend_linear_through_abelianization(joint, hm, limit=1)[0]
    d.record("theta-min-stable", gt._stable(out, jm))
    d.record("theta-min-restricts", out.restrict(d["H_M"]) == theta_big.lift(out.m))
    return out


def shifted_datum(d: RegularDatum, y: np.ndarray) -> RegularDatum:
    """The datum for beta + pi^l' y, sharing K-groups and the ledger with d."""
    ring = d.ring
    beta2 = ring.add_arr(d.beta, ring.mul_arr(y, ring.pi_power(d.lp)))
    block = BlockForm(mx.Mat(ring, beta2), d.block.partition, d.block.primaries)
    shared = {k: d.groups[k] for k in ("_amax", "_amin", "K^l", "K^l'", "G") if k in d.groups}
    d2 = RegularDatum(ring, d.n, d.orbit, block, d.cap, shared, d.ledger)
    build_subgroups(d2)
    return d2


def min_side(d: RegularDatum, theta_big: gt.LinearChar):
    """(datum, theta_m) for the first lift beta' = beta + pi^l' y admitting theta_m.

    H_M^1, J_M^1 and CK^l' only depend on beta modulo p^l', so theta_M is
    also an extension of psi_beta' and the maximal side is unchanged.
    """
    ys = _digits_to_matrices(d.ring, 1, d.n)
    for k, y in enumerate(ys):
        d2 = d if k == 0 else shifted_datum(d, y)
        if not np.array_equal(d2["H_M"].keys, d["H_M"].keys) or \
                not np.array_equal(d2["J_M"].keys, d["J_M"].keys):
            d.record("lift-keeps-H_M", False, {"shift": y.tolist()})
            continue
        theta = gt.LinearChar(d2["H_M"], theta_big.m, theta_big.exps)
        out = extend_theta_min(d2, theta)
        if out is not None:
            d.record("theta-min-exists", True, {"shift": y.tolist()} if k else None)
            return d2, out
    d.record("theta-min-exists", False, fatal=ObstructionNonzero("no lift admits theta_m"))


# ---------------------------------------------------------------------------
# Heisenberg lifts


def _algebra_quotient_data(d: RegularDatum, P: ParahoricData) -> tuple[int, int]:
    """(|A/P|, |C_{A/P}(beta + P)|)."""
    reps = quotient_reps(d.ring, P.flag)
    comm = commutator_with(d.ring, d.beta, reps)
    cent = int(P.contains_batch(1, comm).sum())
    return len(reps), cent


def commutator_formula_check(d: RegularDatum, theta: gt.LinearChar, P: ParahoricData,
                             cu: gt.Group) -> bool:
    """theta([z1(1+s), z2(1+t)]) = psi_beta(1 + st - ts) on quotient representatives."""
    ring, n = d.ring, d.n
    reps = quotient_reps(ring, P.flag)
    s = ring.mul_arr(reps, ring.pi_power(d.lp))
    ident = mx.identity(ring, n)
    ones = ring.add_arr(s, ident)
    zs = np.concatenate([ident[None], cu.mats[cu.generators]])
    xs = np.repeat(ones, len(ones), axis=0)
    ys = np.tile(ones, (len(ones), 1, 1))
    ss = np.repeat(s, len(s), axis=0)
    ts = np.tile(s, (len(s), 1, 1))
    closed = psi_beta_exps(ring, d.beta, ring.add_arr(ident, commutator_with(ring, ss, ts)))
    closed = closed * (theta.m // ring.psi_modulus) % theta.m
    for z1 in zs[:3]:
        for z2 in zs[:3]:
            got = gt.commutator_exponents(theta, mx.matmul(ring, z1, xs), mx.matmul(ring, z2, ys))
            if not np.array_equal(got, closed):
                return False
    return True


def radical_and_lift(d: RegularDatum, star: str, theta: gt.LinearChar) -> gt.HeisenbergLift:
    ring, n = d.ring, d.n
    P = d.amax if star == "M" else d.amin
    e = P.e
    J, H = d[f"J_{star}"], d[f"H_{star}"]
    cu = d["C∩K^1"] if star == "M" else d["C∩U_m^1"]
    space = gt.symplectic_space(J, H, theta)
    d.record(f"commutator-formula-{star}", commutator_formula_check(d, theta, P, cu))
    # radical = (C ∩ U^1) rho^-1(C_{A/P}(beta + P))
    u = d[f"U_m^(el')"] if star == "m" else d["K^l'"]
    s = ring.sub_arr(u.mats, mx.identity(ring, n))
    in_cent = P.contains_batch(e * d.lp + 1, commutator_with(ring, d.beta, s))
    rho_inv = gt.Group(ring, n, u.mats[in_cent], "rho^-1", _sorted=True)
    expected = gt.product_group(cu, rho_inv, "R_expected", cap=d.cap)
    rad = space.preimage(space.radical, f"R_{star}") if space.dim else H
    d.record(f"radical-{star}", np.array_equal(rad.keys, expected.keys),
             {"computed": rad.order, "expected": expected.order})
    size_ap, size_cent = _algebra_quotient_data(d, P)
    d.record(f"radical-index-{star}", J.order // rad.order == size_ap // size_cent,
             {"index": J.order // rad.order, "formula": size_ap // size_cent})
    if star == "M":
        d.record("form-nondegenerate-M", space.radical_dim == 0,
                 fatal=gt.DegenerateForm("form on J_M/H_M is degenerate"))
        lift = gt.heisenberg_lift(J, H, theta, space=space)
        want = d.q ** (n * (n - 1) // 2)
    else:
        tilde = gt.extend_linear_through_abelianization(theta, rad, limit=1)[0]
        lift = gt.heisenberg_lift(J, H, theta, theta_tilde=tilde, space=space)
        want = 1
        for _, dd, mm in d.block.partition.parts:
            want *= d.q ** (dd * mm * (dd - 1) // 2)
    root = isqrt(J.order // rad.order)
    d.record(f"dimension-{star}", lift.eta.degree == want == root and all(lift.checks.values()),
             {"degree": lift.eta.degree, "formula": want, "index_root": root,
              **{k: bool(v) for k, v in lift.checks.items()}})
    return lift


def surjectivity_status(d: RegularDatum, star: str) -> bool:
    """Does C ∩ U^(el') map onto C_{A/P}(beta + P)?  Recorded, not asserted for m."""
    ring = d.ring
    P = d.amax if star == "M" else d.amin
    cm = d["C"].mats
    x = ring.sub_arr(cm, mx.identity(ring, d.n))
    inside = cm[P.contains_batch(P.e * d.lp, x)]
    s0 = divide_by_pi(ring, ring.sub_arr(inside, mx.identity(ring, d.n)), d.lp)
    image = np.unique(mx.pack(ring, block_residue(ring, P.flag, s0)))
    _, cent = _algebra_quotient_data(d, P)
    ok = len(image) == cent
    d.ledger.append(report(f"centralizer-surjective-{star}", d.instance, ok,
                           {"image": int(len(image)), "target": cent}))
    return ok


def eta_bridge(d: RegularDatum, eta_min: gt.ClassFunction, eta_max: gt.ClassFunction) -> gt.ClassFunction:
    eta = gt.induce(eta_min, d["J_mM"])
    d.record("bridge-degree", eta.degree == eta_max.degree,
             {"degree": eta.degree, "eta_M": eta_max.degree},
             fatal=DimensionMismatch("bridge degree differs from eta_M"))
    res = gt.restrict(eta, d["J_M"])
    d.record("bridge-restriction", res == eta_max)
    return eta


def stabilizer_check(d: RegularDatum, eta_max: gt.ClassFunction) -> bool:
    ck = d["CK^l'"]
    ok = all(conjugate_class_function(eta_max, g) == eta_max for g in ck.mats[ck.generators])
    d.record("eta-M-stable", ok)
    return ok


def extend_eta_hat(d: RegularDatum, eta_max: gt.ClassFunction) -> list[tuple[int, gt.ClassFunction]]:
    """All extensions of eta_M to CK^l', as (table index, character)."""
    ck = d["CK^l'"]
    table = gt.character_table(ck, m=d.ring.psi_modulus, cap=d.cap)
    ind = gt.induce(eta_max, ck)
    deg = eta_max.degree
    out = []
    for idx, mult in table.constituents(ind):
        chi = table[idx]
        if chi.degree == deg:
            if mult != 1 or gt.restrict(chi, d["J_M"]) != eta_max:
                d.record("eta-hat-extension", False, {"index": idx})
                continue
            out.append((idx, chi))
    if not out:
        raise NoExtensionFound("eta_M has no extension to CK^l'")
    linear = gt.extension_count(d["J_M"], ck)
    d.record("eta-hat-count", len(out) == linear, {"count": len(out), "linear": linear})
    return out


# ---------------------------------------------------------------------------
# census


@dataclass
class ConstructedRep:
    theta_id: int
    etahat_id: int
    chi: gt.ClassFunction

    @property
    def degree(self) -> int:
        return self.chi.degree


@dataclass
class RepReport:
    ring: Ring
    n: int
    orbit: OrbitRep
    sylow_ok: bool
    ledger: list
    reps: list[ConstructedRep]
    oracle_match: bool | None = None

    @property
    def ok(self) -> bool:
        return self.sylow_ok and all(e["status"] == "pass" for e in self.ledger
                                     if not e["lemma"].startswith("centralizer-surjective-m"))

    def to_json(self) -> dict:
        g = self.reps[0].chi.group if self.reps else None
        m = cy.lcm(*[r.chi.m for r in self.reps]) if self.reps else 1
        return {
            "ring": str(self.ring.spec),
            "N": self.n,
            "r": self.ring.r,
            "orbit": str(self.orbit),
            "sylow_ok": self.sylow_ok,
            "lemma_ledger": self.ledger,
            "reps": [{"theta_id": r.theta_id, "etahat_id": r.etahat_id, "degree": r.degree,
                      "values": r.chi.lift(m).values.tolist()} for r in self.reps],
            "modulus": m,
            "class_keys": [] if g is None else [int(k) for k in g.keys[g.classes.reps]],
            "oracle_match": self.oracle_match,
        }


def build_pi_census(d: RegularDatum, G: gt.Group) -> RepReport:
    """The odd-r pipeline for one orbit."""
    build_subgroups(d)
    psi_beta_checks(d)
    sylow = sylow_check(d)
    surjectivity_status(d, "M")
    surjectivity_status(d, "m")
    thetas = extend_theta(d)
    reps: list[ConstructedRep] = []
    for t_id, theta_max in enumerate(thetas):
        lift_max = radical_and_lift(d, "M", theta_max)
        d2, theta_min = min_side(d, theta_max)
        lift_min = radical_and_lift(d2, "m", theta_min)
        eta_max = gt.transport(lift_max.eta, d2["J_M"]) if d2 is not d else lift_max.eta
        eta_bridge(d2, lift_min.eta, eta_max)
        stabilizer_check(d, lift_max.eta)
        for idx, hat in extend_eta_hat(d, lift_max.eta):
            reps.append(ConstructedRep(t_id, idx, gt.induce(hat, G)))
    _census_checks(d, reps, G)
    return RepReport(d.ring, d.n, d.orbit, sylow["ok"], d.ledger, reps)


def _census_checks(d: RegularDatum, reps: list[ConstructedRep], G: gt.Group) -> None:
    irreducible = all(gt.inner(r.chi, r.chi) == 1 for r in reps)
    d.record("pi-irreducible", irreducible)
    m = cy.lcm(*[r.chi.m for r in reps]) if reps else 1
    keys = {r.chi.lift(m).values.tobytes() for r in reps}
    d.record("pi-distinct", len(keys) == len(reps), {"distinct": len(keys), "count": len(reps)})
    index = G.order // d["CK^l'"].order
    degrees = all(r.degree % index == 0 for r in reps)
    d.record("pi-degree", degrees)
    # pi contains psi_beta on K^l
    kl = d["K^l"]
    psi = psi_beta_character(d, kl).to_class_function()
    contains = all(gt.inner(gt.restrict(r.chi, kl), psi) > 0 for r in reps)
    d.record("pi-over-psi-beta", contains)


def even_r_pipeline(d: RegularDatum, G: gt.Group) -> RepReport:
    if d.r % 2:
        raise ValueError("even_r_pipeline needs even r")
    build_subgroups(d)
    psi_beta_checks(d)
    sylow = sylow_check(d)
    klp, ck = d["K^l'"], d["CK^l'"]
    psi = psi_beta_character(d, klp)
    d.record("psi-beta-homomorphism-K^l'", psi.is_homomorphism())
    exts = gt.extend_linear_through_abelianization(psi, ck)
    want = gt.extension_count(klp, ck)
    d.record("extension-count", len(exts) == want, {"count": len(exts), "expected": want},
             fatal=ObstructionNonzero("psi_beta does not extend to CK^l'"))
    reps = [ConstructedRep(0, i, gt.induce(lam.to_class_function(), G)) for i, lam in enumerate(exts)]
    _census_checks(d, reps, G)
    return RepReport(d.ring, d.n, d.orbit, sylow["ok"], d.ledger, reps)


def construct(ring: Ring, n: int, orbit: OrbitRep, G: gt.Group | None = None,
              cap: int = DEFAULT_CAP) -> RepReport:
    """Census of Irr(G_r | psi_beta) for the regular orbit (taken at level l')."""
    if G is None:
        G = gt.Group(ring, n, mx.enumerate_gl(ring, n, cap=cap), "G")
    d = make_datum(ring, n, orbit, cap)
    d.groups["G"] = G
    if ring.r == 1:
        raise ValueError("r = 1 has no congruence layer to work with")
    return even_r_pipeline(d, G) if ring.r % 2 == 0 else build_pi_census(d, G)


def regular_orbits(ring: Ring, n: int) -> list[OrbitRep]:
    """Regular orbits at level l' = floor(r/2)."""
    return regular_class_list(ring, n, level=ring.r // 2)


def takase_check(d: RegularDatum) -> dict:
    """Every sigma in Irr(K^l' | psi_beta) has degree q^(N(N-1)/2) and extends to CK^l'."""
    if d.r % 2 == 0:
        raise ValueError("takase_check needs odd r")
    if "CK^l'" not in d.groups:
        build_subgroups(d)
    klp, kl, ck = d["K^l'"], d["K^l"], d["CK^l'"]
    psi = psi_beta_character(d, kl)
    space = gt.symplectic_space(klp, kl, psi)
    rad_order = d.q ** d.n
    d.record("takase-radical", d.ring.p ** space.radical_dim == rad_order,
             {"radical": d.ring.p ** space.radical_dim, "expected": rad_order})
    tk = gt.character_table(klp, m=d.ring.psi_modulus, cap=d.cap)
    tc = gt.character_table(ck, m=d.ring.psi_modulus, cap=d.cap)
    psi_cf = psi.to_class_function()
    sigmas = [s for s in tk if gt.inner(gt.restrict(s, kl), psi_cf) > 0]
    want = d.q ** (d.n * (d.n - 1) // 2)
    degrees_ok = all(s.degree == want for s in sigmas)
    restricted = [gt.restrict(c, klp) for c in tc if c.degree == want]
    extended = []
    for s in sigmas:
        hit = any(res.lift(cy.lcm(res.m, s.m)) == s.lift(cy.lcm(res.m, s.m)) for res in restricted)
        extended.append(hit)
    ok = bool(sigmas) and degrees_ok and all(extended)
    d.record("takase", ok, {"sigmas": len(sigmas), "degree": want, "extended": int(sum(extended))})
    return {"ok": ok, "sigmas": len(sigmas), "degrees": sorted({s.degree for s in sigmas}),
            "extended": int(sum(extended)), "radical_order": d.ring.p ** space.radical_dim}
