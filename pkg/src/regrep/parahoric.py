"""Flags, lattice chains, parahoric algebras and their filtration groups.

Everything is realized in the standard basis x_1, ..., x_N of o_r^N.  A flag
is given by its block sizes, top-left block first; the k-th subspace V_k of
the flag is spanned by the first N_k basis vectors where N_k sums all but the
last k block sizes.  Matrices act on column vectors.

Lemma-style checks return report dictionaries
``{"lemma", "instance", "status", "counterexample"?}`` rather than raising,
so that callers can collect a ledger.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import matrices as mx
from .errors import BadExponent, CapExceeded, ParseError
from .localring import Ring

DEFAULT_CAP = 1 << 22


def report(lemma: str, instance: str, ok: bool, counterexample=None) -> dict:
    out = {"lemma": lemma, "instance": instance, "status": "pass" if ok else "fail"}
    if not ok and counterexample is not None:
        out["counterexample"] = counterexample
    return out


@dataclass(frozen=True)
class Flag:
    """Block sizes N'_1, ..., N'_e (top-left block first)."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        if not self.blocks or any(b <= 0 for b in self.blocks):
            raise ValueError(f"flag blocks must be positive, got {self.blocks}")

    @property
    def n(self) -> int:
        return sum(self.blocks)

    @property
    def e(self) -> int:
        return len(self.blocks)

    def rank(self, k: int) -> int:
        """N_k = rank of V_k (N_0 = N, N_e = 0)."""
        return sum(self.blocks[: self.e - k])

    @cached_property
    def block_of(self) -> np.ndarray:
        """Block index (0 = top-left) of each basis vector."""
        return np.repeat(np.arange(self.e), self.blocks)

    def __str__(self):
        return "flag:" + ",".join(map(str, self.blocks))


def parse_flag(text: str) -> Flag:
    m = re.fullmatch(r"\s*flag:\s*(\d+(?:\s*,\s*\d+)*)\s*", text)
    if not m:
        raise ParseError(f"bad flag spec {text!r}")
    try:
        return Flag(tuple(int(x) for x in m.group(1).split(",")))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def all_flags(n: int):
    """Every composition of n, i.e. every standard flag."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in all_flags(n - first):
            yield (first,) + rest


@dataclass(frozen=True)
class LatticeChain:
    ring: Ring
    flag: Flag
    lattices: tuple[mx.ModuleBasis, ...]  # L_0, ..., L_{er}

    def __getitem__(self, i: int) -> mx.ModuleBasis:
        if i >= len(self.lattices):
            return self.lattices[-1]
        return self.lattices[i]


def lattice_basis(ring: Ring, flag: Flag, i: int) -> np.ndarray:
    """The basis of L_i read off from the flag (rows are vectors)."""
    e, n = flag.e, flag.n
    j, k = divmod(i, e)
    nk = flag.rank(k)
    rows = []
    for col in range(n):
        shift = j if col < nk else j + 1
        if shift < ring.r:
            v = np.zeros(n, dtype=np.int64)
            v[col] = ring.pi_power(shift)
            rows.append(v)
    return np.array(rows, dtype=np.int64).reshape(-1, n)


def chain_from_flag(ring: Ring, flag: Flag) -> LatticeChain:
    """L_{k+ej} = p^j (V_k + pV), built from the subspace definition."""
    n, e = flag.n, flag.e
    pv = mx.scale(mx.full_module(ring, n), 1)
    out = []
    for i in range(e * ring.r + 1):
        j, k = divmod(i, e)
        vk = mx.howell_basis(ring, list(mx.identity(ring, n)[: flag.rank(k)]), n)
        out.append(mx.scale(vk + pv, j))
    return LatticeChain(ring, flag, tuple(out))


def check_chain(chain: LatticeChain) -> list[dict]:
    ring, flag = chain.ring, chain.flag
    e, er = flag.e, flag.e * ring.r
    inst = f"{ring.spec} {flag}"
    out = []
    strict = all(chain[i].contains_module(chain[i + 1]) and chain[i].size > chain[i + 1].size
                 for i in range(er))
    out.append(report("lattice-chain", inst + " strict inclusions", strict))
    period = all(chain[i + e] == mx.scale(chain[i], 1) for i in range(er - e + 1))
    out.append(report("lattice-chain", inst + " periodicity", period))
    basis_ok = all(mx.howell_basis(ring, list(lattice_basis(ring, flag, i)), flag.n) == chain[i]
                   for i in range(er + 1))
    out.append(report("lattice-chain", inst + " explicit basis", basis_ok))
    tail = chain[er].size == 1
    out.append(report("lattice-chain", inst + " L_er = 0", tail))
    return out


class ParahoricData:
    """The parahoric algebra of a flag with its radical powers and groups U^m."""

    def __init__(self, ring: Ring, flag: Flag, cap: int = DEFAULT_CAP):
        self.ring = ring
        self.flag = flag
        self.n = flag.n
        self.e = flag.e
        self.cap = cap
        self._powers: dict[int, mx.ModuleBasis] = {}
        self._groups: dict[int, np.ndarray] = {}

    @cached_property
    def chain(self) -> LatticeChain:
        return chain_from_flag(self.ring, self.flag)

    @property
    def top(self) -> int:
        """e*r, the first exponent with P^m = 0."""
        return self.e * self.ring.r

    def pattern(self, m: int) -> np.ndarray:
        """Minimal entry valuations of P^m, clipped to [0, r]."""
        if m < 0:
            raise BadExponent(f"negative exponent {m}")
        b = self.flag.block_of
        diff = m + b[:, None] - b[None, :]
        vals = -(-diff // self.e)
        return np.clip(vals, 0, self.ring.r)

    def radical_power(self, m: int) -> mx.ModuleBasis:
        """P^m as a module of flattened matrices (from the valuation pattern)."""
        if m < 0:
            raise BadExponent(f"negative exponent {m}")
        m = min(m, self.top)
        if m not in self._powers:
            pat = self.pattern(m)
            n = self.n
            gens = []
            for a in range(n):
                for b in range(n):
                    if pat[a, b] < self.ring.r:
                        v = np.zeros(n * n, dtype=np.int64)
                        v[a * n + b] = self.ring.pi_power(int(pat[a, b]))
                        gens.append(v)
            self._powers[m] = mx.howell_basis(self.ring, gens, n * n)
        return self._powers[m]

    @property
    def algebra(self) -> mx.ModuleBasis:
        return self.radical_power(0)

    @property
    def radical(self) -> mx.ModuleBasis:
        return self.radical_power(1)

    def radical_power_by_products(self, m: int) -> mx.ModuleBasis:
        """P^m as the span of m-fold products of P (P^0 = A)."""
        if m == 0:
            return self.algebra
        acc = self.radical
        for _ in range(m - 1):
            acc = mx.product_module(self.ring, acc, self.radical, self.n)
        return acc

    def contains(self, m: int, x) -> bool:
        x = np.asarray(x.a if isinstance(x, mx.Mat) else x, dtype=np.int64).reshape(self.n, self.n)
        vals = self.ring.val_table[x]
        return bool((vals >= self.pattern(min(m, self.top))).all())

    def contains_batch(self, m: int, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        vals = self.ring.val_table[xs]
        return (vals >= self.pattern(min(m, self.top))).all(axis=(-1, -2))

    # -- groups -----------------------------------------------------------
    def group_order(self, m: int) -> int:
        if m >= 1:
            return self.radical_power(m).size
        q = self.ring.q
        order = self.radical.size
        for d in self.flag.blocks:
            for i in range(d):
                order *= q ** d - q ** i
        return order

    def enumerate_group(self, m: int) -> np.ndarray:
        """All elements of U^m as an (|U^m|, N, N) array sorted by packed key."""
        if m in self._groups:
            return self._groups[m]
        size = self.group_order(m)
        if size > self.cap:
            raise CapExceeded(f"|U^{m}| = {size} exceeds cap {self.cap}")
        ring, n = self.ring, self.n
        if m >= 1:
            elems = self.radical_power(m).elements(cap=self.cap).reshape(-1, n, n)
            elems = ring.add_arr(elems, mx.identity(ring, n))
        else:
            # units of A: residue block-triangular invertibles plus P
            alg = self.algebra.elements(cap=max(self.cap, self.algebra.size))
            alg = alg.reshape(-1, n, n)
            elems = alg[ring.inv_table[mx.det(ring, alg)] >= 0]
        keys = mx.pack(ring, elems)
        elems = elems[np.argsort(keys)]
        self._groups[m] = elems
        return elems

    def __repr__(self):
        return f"ParahoricData({self.ring.spec}, {self.flag})"


def parahoric_from_chain(chain: LatticeChain, cap: int = DEFAULT_CAP) -> ParahoricData:
    return ParahoricData(chain.ring, chain.flag, cap=cap)


def radical_power_membership(P: ParahoricData, m: int, x) -> bool:
    if not 0 <= m <= P.top:
        raise BadExponent(f"exponent {m} outside [0, {P.top}]")
    return P.contains(m, x)


# ---------------------------------------------------------------------------
# module-theoretic characterizations


def lattice_map(ring: Ring, lattice: mx.ModuleBasis, n: int) -> np.ndarray:
    """Matrix of x -> (x b_1, ..., x b_s) for the basis vectors b of a lattice."""
    basis = identity_mats(ring, n)
    vs = lattice.array()
    imgs = mx.matmul(ring, basis[:, None], vs[None, :, :, None])[..., 0]
    return imgs.reshape(n * n, -1)


def identity_mats(ring: Ring, n: int) -> np.ndarray:
    return mx.identity(ring, n * n).reshape(n * n, n, n)


def direct_sum(module: mx.ModuleBasis, copies: int) -> mx.ModuleBasis:
    ring, n = module.ring, module.n
    rows = []
    base = module.array()
    for c in range(copies):
        for row in base:
            v = np.zeros(n * copies, dtype=np.int64)
            v[c * n:(c + 1) * n] = row
            rows.append(v)
    return mx.howell_basis(ring, rows, n * copies)


def lattice_transporter(ring: Ring, pairs, n: int) -> mx.ModuleBasis:
    """{x in E : x L ⊆ L' for every (L, L') in pairs}."""
    acc = mx.full_module(ring, n * n)
    for src, dst in pairs:
        if not src.rows:
            continue
        a = lattice_map(ring, src, n)
        acc = mx.intersect(acc, mx.preimage(ring, a, direct_sum(dst, len(src.rows))))
    return acc


def algebra_transporter(ring: Ring, src: mx.ModuleBasis, dst: mx.ModuleBasis, n: int) -> mx.ModuleBasis:
    """{x in E : x src ⊆ dst} for modules of flattened matrices."""
    if not src.rows:
        return mx.full_module(ring, n * n)
    basis = identity_mats(ring, n)
    ys = src.array().reshape(-1, n, n)
    imgs = mx.matmul(ring, basis[:, None], ys[None, :]).reshape(n * n, -1)
    return mx.preimage(ring, imgs, direct_sum(dst, len(ys)))


def stabilizer_checks(P: ParahoricData) -> list[dict]:
    """A and P from the lattice-chain definition versus the residue description."""
    ring, n, e = P.ring, P.n, P.e
    chain = P.chain
    inst = f"{ring.spec} {P.flag}"
    a_def = lattice_transporter(ring, [(chain[i], chain[i]) for i in range(e)], n)
    p_def = lattice_transporter(ring, [(chain[i], chain[i + 1]) for i in range(e)], n)
    # preimage of block upper-triangular (resp. strictly) matrices mod p
    b = P.flag.block_of
    pe = mx.scale(mx.full_module(ring, n * n), 1)
    upper = [_unit(ring, n, i, j) for i in range(n) for j in range(n) if b[i] <= b[j]]
    strict = [_unit(ring, n, i, j) for i in range(n) for j in range(n) if b[i] < b[j]]
    a_res = mx.howell_basis(ring, upper, n * n) + pe
    p_res = mx.howell_basis(ring, strict, n * n) + pe
    out = [
        report("parahoric-algebra", inst + " A = stabilizer = P + pE",
               a_def == P.algebra == a_res),
        report("parahoric-algebra", inst + " radical = I + pE",
               p_def == P.radical == p_res),
    ]
    q = ring.q
    expect = 1
    for d in P.flag.blocks:
        expect *= q ** (d * d)
    quot = P.algebra.size // P.radical.size
    out.append(report("parahoric-algebra", inst + " |A/P| = prod q^(d^2)", quot == expect,
                      None if quot == expect else {"got": quot, "expected": expect}))
    return out


def _unit(ring: Ring, n: int, i: int, j: int) -> np.ndarray:
    v = np.zeros(n * n, dtype=np.int64)
    v[i * n + j] = ring.one
    return v


def radical_power_checks(P: ParahoricData) -> list[dict]:
    """P^m by pattern versus by products, for every m up to er."""
    inst = f"{P.ring.spec} {P.flag}"
    bad = [m for m in range(P.top + 1) if P.radical_power(m) != P.radical_power_by_products(m)]
    return [report("radical-powers", inst + " pattern = products", not bad,
                   {"m": bad[0]} if bad else None)]


def verify_shift(P: ParahoricData, m: int, k: int) -> list[dict]:
    """The three module identities for P^m at offset k."""
    ring, n, e = P.ring, P.n, P.e
    bound = e * (ring.r - 1) + 1 - m
    if m < 0 or not 0 <= k <= bound:
        raise BadExponent(f"need m >= 0 and 0 <= k <= {bound}, got m={m}, k={k}")
    chain = P.chain
    inst = f"{ring.spec} {P.flag} m={m} k={k}"
    pm = P.radical_power(m)
    bad_i = [i for i in range(P.top + 1)
             if mx.act_module(ring, pm, chain[i], n) != chain[i + m]]
    out = [report("shift-lattices", inst, not bad_i, {"i": bad_i[0]} if bad_i else None)]
    trans = lattice_transporter(ring, [(chain[i], chain[i + m]) for i in range(k, k + e)], n)
    out.append(report("shift-transporter", inst, trans == pm))
    alg = algebra_transporter(ring, P.radical_power(k), P.radical_power(k + m), n)
    out.append(report("shift-algebra", inst, alg == pm))
    return out


def corollary_checks(P: ParahoricData) -> list[dict]:
    ring, n, e = P.ring, P.n, P.e
    inst = f"{ring.spec} {P.flag}"
    pi_id = mx.howell_basis(ring, [ring.pi * mx.identity(ring, n).reshape(-1)], n * n)
    left = mx.product_module(ring, pi_id, P.algebra, n)
    right = mx.product_module(ring, P.algebra, pi_id, n)
    out = [report("pA = P^e", inst, left == right == P.radical_power(e))]
    stable = [m for m in range(P.top + 1)
              if (P.radical_power(m) == P.radical_power(m + 1)) != (m >= P.top)]
    out.append(report("filtration-strict", inst, not stable, {"m": stable[0]} if stable else None))
    # P^{e(r-1)} = p^{r-1} P_par and P^{e(r-1)+1} = p^{r-1} I
    b = P.flag.block_of
    upper = [_unit(ring, n, i, j) for i in range(n) for j in range(n) if b[i] <= b[j]]
    strict = [_unit(ring, n, i, j) for i in range(n) for j in range(n) if b[i] < b[j]]
    low = ring.r - 1
    up_mod = mx.scale(mx.howell_basis(ring, upper, n * n), low)
    st_mod = mx.scale(mx.howell_basis(ring, strict, n * n), low)
    out.append(report("bottom-layers", inst,
                      P.radical_power(e * low) == up_mod and P.radical_power(e * low + 1) == st_mod))
    return out


def trace_annihilator(P: ParahoricData, m: int) -> mx.ModuleBasis:
    """{x : tr(y x) = 0 for all y in P^m}, solved as a linear system."""
    ring, n = P.ring, P.n
    bound = P.e * (ring.r - 1) + 1
    if not 0 <= m <= bound:
        raise BadExponent(f"exponent {m} outside [0, {bound}]")
    ys = P.radical_power(m).array().reshape(-1, n, n)
    if not len(ys):
        return mx.full_module(ring, n * n)
    # tr(y E_ab) = y[b, a]
    cols = np.transpose(ys, (0, 2, 1)).reshape(len(ys), n * n).T
    return mx.kernel(ring, cols)


def trace_duality_check(P: ParahoricData, m: int) -> dict:
    ann = trace_annihilator(P, m)
    expected = P.radical_power(P.e * (P.ring.r - 1) + 1 - m)
    return report("trace-duality", f"{P.ring.spec} {P.flag} m={m}", ann == expected)


def trace_form_nondegenerate(ring: Ring, n: int) -> dict:
    basis = identity_mats(ring, n).reshape(n * n, n * n)
    ker = mx.kernel(ring, mx.trace_form_pairing(ring, basis, basis))
    return report("trace-form", f"{ring.spec} N={n}", not ker.rows)


def commutator_check(P: ParahoricData, m: int, k: int, samples: int | None = None,
                     seed: int = 0) -> dict:
    """[U^m, U^k] ⊆ U^{m+k}, exhaustively or on random pairs."""
    ring = P.ring
    xs = P.enumerate_group(m)
    ys = P.enumerate_group(k)
    if samples is None:
        a = np.repeat(xs, len(ys), axis=0)
        b = np.tile(ys, (len(xs), 1, 1))
    else:
        rng = np.random.default_rng(seed)
        a = xs[rng.integers(len(xs), size=samples)]
        b = ys[rng.integers(len(ys), size=samples)]
    comm = mx.matmul(ring, mx.matmul(ring, a, b), mx.matmul(ring, mx.inverse(ring, a), mx.inverse(ring, b)))
    target = min(m + k, P.top)
    if target >= 1:
        ok = P.contains_batch(target, ring.sub_arr(comm, mx.identity(ring, P.n)))
    else:
        ok = np.ones(len(comm), dtype=bool)
    bad = np.flatnonzero(~ok)
    return report("commutators", f"{ring.spec} {P.flag} m={m} k={k}", not len(bad),
                  {"x": a[bad[0]].tolist(), "y": b[bad[0]].tolist()} if len(bad) else None)


def abelian_check(P: ParahoricData, m: int) -> dict:
    ring = P.ring
    g = P.enumerate_group(m)
    ab = mx.matmul(ring, g[:, None], g[None, :])
    ba = mx.matmul(ring, g[None, :], g[:, None])
    return report("abelian-layer", f"{ring.spec} {P.flag} m={m}", bool(np.array_equal(ab, ba)))


def quotient_order_check(P: ParahoricData, m: int) -> dict:
    g0, g1 = len(P.enumerate_group(m)), len(P.enumerate_group(m + 1))
    expect = P.radical_power(m).size // P.radical_power(m + 1).size
    return report("layer-orders", f"{P.ring.spec} {P.flag} m={m}",
                  g0 % g1 == 0 and g0 // g1 == expect)


def amin_from_residue(beta_bar: mx.Mat, ring: Ring, cap: int = DEFAULT_CAP):
    """Partition of N from the residue char poly and the parahoric A_min over ``ring``."""
    from .orbits import partition_of

    part = partition_of(beta_bar)
    return part, ParahoricData(ring, Flag(part.block_sizes()), cap=cap)


def trace_duality_suite(P: ParahoricData) -> list[dict]:
    return [trace_duality_check(P, m) for m in range(P.e * (P.ring.r - 1) + 2)]


def filtration_suite(P: ParahoricData) -> list[dict]:
    """Lattice-chain, shift and corollary identities for every admissible m, k."""
    out = check_chain(P.chain) + stabilizer_checks(P) + radical_power_checks(P)
    bound = P.e * (P.ring.r - 1) + 1
    for m in range(bound + 1):
        for k in range(bound - m + 1):
            out += verify_shift(P, m, k)
    return out + corollary_checks(P)


def group_suite(P: ParahoricData, samples: int = 10000) -> list[dict]:
    """Commutator, abelian-layer and layer-order checks on the groups U^m."""
    out = []
    top = P.top
    for m in range(1, top):
        out.append(quotient_order_check(P, m))
        if 2 * m >= top:
            out.append(abelian_check(P, m))
        for k in range(m, top - m + 1):
            small = P.group_order(m) * P.group_order(k) <= 1 << 16
            out.append(commutator_check(P, m, k, None if small else samples))
    return out


SUITES = {
    "trace-duality": lambda P: trace_duality_suite(P),
    "filtration": filtration_suite,
    "groups": group_suite,
}


def lemma_suite(ring: Ring, n: int, checks=None, cap: int = DEFAULT_CAP) -> list[dict]:
    """Every parahoric-level check for every flag of N (optionally filtered by suite)."""
    names = list(SUITES) if not checks else [c for c in SUITES if c in checks]
    out = []
    if not checks or "trace-duality" in checks:
        out.append(trace_form_nondegenerate(ring, n))
    for blocks in all_flags(n):
        P = ParahoricData(ring, Flag(blocks), cap=cap)
        for name in names:
            out += SUITES[name](P)
    return out
