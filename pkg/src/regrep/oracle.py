"""Brute-force ground truth: the full character table of GL_N(o_r).

Each irreducible character is classified by restricting it to the abelian
congruence subgroup K^l and reading off which characters psi_beta occur.
By Clifford theory these form one adjoint orbit of beta in gl_N(o_l'),
which is labelled by its characteristic polynomial and marked regular or
not.  Nothing here depends on the construction pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cyclotomic as cy
from . import grouptheory as gt
from . import matrices as mx
from .errors import CapExceeded
from .localring import Ring

ORACLE_CAP = 10 ** 6


@dataclass
class OracleIrrep:
    index: int
    chi: gt.ClassFunction
    support: int  # number of beta in gl_N(o_l') with psi_beta in the restriction
    multiplicity: int
    orbit: str
    regular: bool
    clifford_ok: bool

    @property
    def degree(self) -> int:
        return self.chi.degree


@dataclass
class IrrepCensus:
    ring: Ring
    n: int
    group: gt.Group
    table: gt.CharacterTable
    irreps: list[OracleIrrep] = field(default_factory=list)

    @property
    def l(self) -> int:
        return -(-self.ring.r // 2)

    @property
    def lp(self) -> int:
        return self.ring.r // 2

    def by_orbit(self) -> dict[str, list[OracleIrrep]]:
        out: dict[str, list[OracleIrrep]] = {}
        for irr in self.irreps:
            if irr.regular:
                out.setdefault(irr.orbit, []).append(irr)
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        g = self.group
        m = self.table.m
        return {
            "ring": str(self.ring.spec),
            "N": self.n,
            "r": self.ring.r,
            "order": g.order,
            "modulus": m,
            "class_keys": [int(k) for k in g.keys[g.classes.reps]],
            "class_sizes": [int(s) for s in g.classes.sizes],
            "sum_degree_squares": sum(i.degree ** 2 for i in self.irreps),
            "irreps": [{"index": i.index, "degree": i.degree, "regular": i.regular,
                        "orbit": i.orbit, "support": i.support, "multiplicity": i.multiplicity,
                        "clifford_ok": i.clifford_ok,
                        "values": i.chi.lift(m).values.tolist()} for i in self.irreps],
        }


def congruence_subgroup_elements(ring: Ring, n: int, i: int) -> tuple[np.ndarray, np.ndarray]:
    """(x, 1 + pi^i x) for x over canonical representatives of gl_N(o_(r-i))."""
    depth = ring.r - i
    base = ring.q ** depth
    codes = np.arange(base ** (n * n), dtype=np.int64)
    xs = ((codes[:, None] // base ** np.arange(n * n)) % base).reshape(-1, n, n)
    mats = ring.add_arr(mx.identity(ring, n), ring.mul_arr(xs, ring.pi_power(i)))
    return xs, mats


def _orbit_codes(ring: Ring, group: gt.Group, beta: np.ndarray, level: int) -> np.ndarray:
    """Codes of the adjoint orbit of beta in gl_N(o_level)."""
    conj = mx.matmul(ring, mx.matmul(ring, group.mats, beta), mx.inverse(ring, group.mats))
    return np.unique(_codes(conj % ring.q ** level, ring.q ** level))


def _codes(xs: np.ndarray, base: int) -> np.ndarray:
    n2 = xs.shape[-1] * xs.shape[-2]
    return xs.reshape(xs.shape[:-2] + (n2,)) @ (base ** np.arange(n2, dtype=np.int64))


def full_census(ring: Ring, n: int, cap: int = ORACLE_CAP) -> IrrepCensus:
    order = mx.unit_group_order(ring, n)
    if order > cap:
        raise CapExceeded(f"|GL_{n}| = {order} exceeds the oracle cap {cap}")
    G = gt.Group(ring, n, mx.enumerate_gl(ring, n, cap=cap), "G")
    table = gt.character_table(G, m=ring.psi_modulus, cap=cap)
    census = IrrepCensus(ring, n, G, table)
    l, lp = census.l, census.lp
    if lp == 0:
        for i, chi in enumerate(table):
            census.irreps.append(OracleIrrep(i, chi, 1, chi.degree, "", False, True))
        return census
    # psi_beta(1 + pi^l x) = psi(pi^-r tr(beta pi^l x)), beta and x over gl_N(o_l')
    xs, kmats = congruence_subgroup_elements(ring, n, l)
    betas = xs  # the same canonical set indexes gl_N(o_l')
    shifted = ring.mul_arr(xs, ring.pi_power(l))
    pairing = ring.psi_table[mx.trace(ring, mx.matmul(ring, betas[:, None], shifted[None]))]
    m = table.m
    img = cy.ModularImage(m, G.order)
    dual = img.root_image(-pairing * (m // ring.psi_modulus))
    k_classes = G.classes.class_of[G.index_of_mats(kmats)]
    inv_k = pow(len(kmats), -1, img.ell)
    lr = ring.truncate(lp)
    base = ring.q ** lp
    for i, chi in enumerate(table):
        vals = img.image(chi.values[k_classes])
        mult = img.lift_int((dual @ vals) % img.ell * inv_k % img.ell)
        support = np.flatnonzero(mult)
        beta0 = betas[support[0]]
        orbit = _orbit_codes(ring, G, beta0, lp)
        clifford = bool(np.array_equal(np.sort(_codes(betas[support], base)), orbit)
                        and (mult[support] == mult[support[0]]).all())
        b = mx.Mat(lr, beta0 % base)
        regular = mx.is_regular(b)
        census.irreps.append(OracleIrrep(i, chi, len(support), int(mult[support[0]]),
                                         mx.poly_format(lr, b.char_poly()), bool(regular), clifford))
    return census


# ---------------------------------------------------------------------------
# comparison


def _aligned_values(values, modulus: int, keys, target_keys, target_m: int) -> np.ndarray:
    vals = cy.lift_modulus(np.asarray(values, dtype=np.int64), modulus, target_m)
    pos = {int(k): i for i, k in enumerate(keys)}
    return vals[[pos[int(k)] for k in target_keys]]


def _json(obj) -> dict:
    return obj if isinstance(obj, dict) else obj.to_json()


def compare(census, reports) -> dict:
    """Verdict on constructed regular characters against the oracle."""
    c = _json(census)
    reps = [_json(r) for r in reports]
    keys = c["class_keys"]
    m = cy.lcm(c["modulus"], *[r["modulus"] for r in reps]) if reps else c["modulus"]
    oracle: dict[str, set] = {}
    for irr in c["irreps"]:
        if irr["regular"]:
            v = _aligned_values(irr["values"], c["modulus"], keys, keys, m)
            oracle.setdefault(irr["orbit"], set()).add(v.tobytes())
    built: dict[str, list] = {}
    for rep in reps:
        label = rep["orbit"].split("charpoly=")[1].split(",")[0]
        for pi in rep["reps"]:
            v = _aligned_values(pi["values"], rep["modulus"], rep["class_keys"], keys, m)
            built.setdefault(label, []).append(v.tobytes())
    orbits = []
    for label in sorted(set(oracle) | set(built)):
        mine = built.get(label, [])
        theirs = oracle.get(label, set())
        orbits.append({
            "orbit": label,
            "constructed": len(mine),
            "oracle": len(theirs),
            "injective": len(set(mine)) == len(mine),
            "match": set(mine) == theirs and len(set(mine)) == len(mine),
        })
    ok = bool(orbits) and all(o["match"] for o in orbits) and set(built) == set(oracle)
    return {"ring": c["ring"], "N": c["N"], "match": ok, "orbits": orbits}


def kernel_check(census: IrrepCensus) -> dict:
    """Does every non-regular irreducible character contain K^(r-1) in its kernel?

    Also reports whether each failure becomes a pull-back after twisting by
    a linear character of G.
    """
    ring, n, G = census.ring, census.n, census.group
    _, kmats = congruence_subgroup_elements(ring, n, ring.r - 1)
    k_classes = np.unique(G.classes.class_of[G.index_of_mats(kmats)])
    linear = [chi for chi in census.table if chi.degree == 1]
    failures, twisted = [], []
    for irr in census.irreps:
        if irr.regular:
            continue
        if _trivial_on(irr.chi, k_classes):
            continue
        failures.append(irr.index)
        if any(_trivial_on(irr.chi * lam, k_classes) for lam in linear):
            twisted.append(irr.index)
    nonregular = sum(1 for i in census.irreps if not i.regular)
    return {"nonregular": nonregular, "pullbacks": nonregular - len(failures),
            "failures": failures, "pullbacks_after_twist": nonregular - len(failures) + len(twisted),
            "ok": not failures}


def _trivial_on(chi: gt.ClassFunction, classes: np.ndarray) -> bool:
    deg = chi.values[0]
    return bool((chi.values[classes] == deg).all())


def pullback_remark(census: dict) -> dict:
    """Kernel check on a dumped census: which non-regular irreps contain K^(r-1)."""
    from .localring import make_ring, parse_ring_spec

    ring = make_ring(parse_ring_spec(census["ring"]))
    n = census["N"]
    mats = mx.unpack(ring, np.array(census["class_keys"], dtype=np.int64), n)
    diff = ring.sub_arr(mats, mx.identity(ring, n))
    in_k = np.flatnonzero((ring.val_table[diff] >= ring.r - 1).all(axis=(-1, -2)))
    nonregular = [i for i in census["irreps"] if not i["regular"]]
    failures = []
    for irr in nonregular:
        vals = np.array(irr["values"], dtype=np.int64)
        if not (vals[in_k] == vals[0]).all():
            failures.append(irr["index"])
    return {"nonregular": len(nonregular), "pullbacks": len(nonregular) - len(failures),
            "failures": failures, "ok": not failures}
