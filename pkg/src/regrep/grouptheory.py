"""Exact character theory of explicitly enumerated matrix groups.

A :class:`Group` is a sorted array of packed matrix keys together with the
matrices themselves.  Class functions carry one cyclotomic value per
conjugacy class; linear characters carry an exponent mod m per element.
Character tables come from the Dixon-Schneider method run modulo a prime
l = 1 (mod m) and lifted back to Z[zeta_m] through eigenvalue multiplicities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import cyclotomic as cy
from . import matrices as mx
from .errors import (CapExceeded, DegenerateForm, NoLagrangian, NotASubgroup,
                     NotElementaryAbelian, NotStable, ObstructionNonzero)
from .localring import Ring

DEFAULT_CAP = 1 << 22
CHUNK = 1 << 18


# ---------------------------------------------------------------------------
# groups


class Group:
    """A finite subgroup of GL_N(o_r) given by its full element list."""

    def __init__(self, ring: Ring, n: int, mats, name: str = "G", _sorted: bool = False):
        mats = np.asarray(mats, dtype=np.int64).reshape(-1, n, n)
        keys = mx.pack(ring, mats)
        if not _sorted:
            keys, first = np.unique(keys, return_index=True)
            mats = mats[first]
        self.ring = ring
        self.n = n
        self.mats = mats
        self.keys = keys
        self.name = name

    @property
    def order(self) -> int:
        return len(self.keys)

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"Group({self.name}, order={self.order})"

    # -- lookup -----------------------------------------------------------
    def locate(self, keys) -> tuple[np.ndarray, np.ndarray]:
        keys = np.asarray(keys, dtype=np.int64)
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, self.order - 1)
        return pos, self.keys[pos] == keys

    def index(self, keys) -> np.ndarray:
        pos, found = self.locate(keys)
        if not found.all():
            raise NotASubgroup(f"elements outside {self.name}")
        return pos

    def index_of_mats(self, mats) -> np.ndarray:
        return self.index(mx.pack(self.ring, mats))

    def contains_keys(self, keys) -> np.ndarray:
        return self.locate(keys)[1]

    def contains_mats(self, mats) -> np.ndarray:
        return self.contains_keys(mx.pack(self.ring, mats))

    def is_subgroup_of(self, other: "Group") -> bool:
        return bool(other.contains_keys(self.keys).all())

    @cached_property
    def identity(self) -> int:
        return int(self.index(mx.pack(self.ring, mx.identity(self.ring, self.n)[None]))[0])

    @cached_property
    def inverse_index(self) -> np.ndarray:
        return self.index_of_mats(mx.inverse(self.ring, self.mats))

    def mul(self, a, b) -> np.ndarray:
        """Indices of products mats[a] @ mats[b]."""
        return self.index_of_mats(mx.matmul(self.ring, self.mats[a], self.mats[b]))

    # -- structure --------------------------------------------------------
    @cached_property
    def generators(self) -> np.ndarray:
        """A small generating set, chosen greedily from a seeded shuffle."""
        rng = np.random.default_rng(12345)
        order = rng.permutation(self.order)
        gens: list[int] = []
        covered = np.zeros(self.order, dtype=bool)
        covered[self.identity] = True
        for idx in order:
            if covered[idx]:
                continue
            gens.append(int(idx))
            covered = self._closure_mask(gens)
            if covered.all():
                break
        return np.array(gens, dtype=np.int64)

    def _closure_mask(self, gens) -> np.ndarray:
        mask = np.zeros(self.order, dtype=bool)
        mask[self.identity] = True
        frontier = np.array([self.identity], dtype=np.int64)
        gmats = self.mats[np.asarray(gens)]
        while len(frontier):
            prods = mx.matmul(self.ring, self.mats[frontier][:, None], gmats[None, :])
            idx = self.index_of_mats(prods.reshape(-1, self.n, self.n))
            idx = np.unique(idx)
            idx = idx[~mask[idx]]
            mask[idx] = True
            frontier = idx
        return mask

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.zeros(self.order, dtype=np.int64)
        cur = self.mats.copy()
        live = np.arange(self.order)
        ident = mx.identity(self.ring, self.n)
        k = 1
        while len(live):
            done = (cur == ident).all(axis=(-1, -2))
            orders[live[done]] = k
            live, cur = live[~done], cur[~done]
            if len(live):
                cur = mx.matmul(self.ring, cur, self.mats[live])
            k += 1
        return orders

    @cached_property
    def exponent(self) -> int:
        return cy.lcm(*{int(o) for o in np.unique(self.element_orders)})

    def conjugate_by(self, g: np.ndarray, idx=None) -> np.ndarray:
        """Indices of g x g^-1 for x = mats[idx] (all elements by default)."""
        xs = self.mats if idx is None else self.mats[idx]
        ginv = mx.inverse(self.ring, g)
        return self.index_of_mats(mx.matmul(self.ring, mx.matmul(self.ring, g, xs), ginv))

    @cached_property
    def classes(self) -> "ClassData":
        return conjugacy_classes(self)

    def is_normal_in(self, big: "Group") -> bool:
        for g in big.mats[big.generators]:
            conj = mx.matmul(self.ring, mx.matmul(self.ring, g, self.mats), mx.inverse(self.ring, g))
            if not self.contains_mats(conj).all():
                return False
        return True

    def is_abelian(self) -> bool:
        gens = self.mats[self.generators]
        ab = mx.matmul(self.ring, gens[:, None], gens[None, :])
        ba = mx.matmul(self.ring, gens[None, :], gens[:, None])
        return bool(np.array_equal(ab, ba))


def group_from_elements(ring: Ring, n: int, mats, name: str = "G", check: bool = True) -> Group:
    g = Group(ring, n, mats, name)
    if check:
        gens = g.mats[g.generators] if g.order < 4096 else g.mats
        prods = mx.matmul(ring, gens[:, None], g.mats[g.generators][None, :])
        if not g.contains_mats(prods.reshape(-1, n, n)).all():
            raise NotASubgroup(f"{name} is not closed under multiplication")
    return g


def subgroup_closure(ring: Ring, n: int, gens, cap: int = DEFAULT_CAP, name: str = "G") -> Group:
    """The subgroup generated by ``gens`` (breadth-first closure)."""
    gens = np.asarray(gens, dtype=np.int64).reshape(-1, n, n)
    ident = mx.identity(ring, n)[None]
    seen = np.unique(mx.pack(ring, ident))
    frontier = ident
    while len(frontier):
        prods = mx.matmul(ring, frontier[:, None], gens[None, :]).reshape(-1, n, n)
        keys, first = np.unique(mx.pack(ring, prods), return_index=True)
        fresh = ~np.isin(keys, seen)
        frontier = prods[first[fresh]]
        seen = np.union1d(seen, keys[fresh])
        if len(seen) > cap:
            raise CapExceeded(f"closure exceeds cap {cap}")
    return Group(ring, n, mx.unpack(ring, seen, n), name, _sorted=True)


def index(big: Group, small: Group) -> int:
    if not small.is_subgroup_of(big):
        raise NotASubgroup(f"{small.name} is not inside {big.name}")
    if big.order % small.order:
        raise NotASubgroup("Lagrange violated")
    return big.order // small.order


def product_group(a: Group, b: Group, name: str = "AB", cap: int = DEFAULT_CAP) -> Group:
    """The set A B, checked to be a subgroup."""
    if a.order * b.order > cap * 8:
        raise CapExceeded(f"product of {a.order} and {b.order} elements exceeds cap")
    ring, n = a.ring, a.n
    keys = []
    for start in range(0, a.order, max(1, CHUNK // max(b.order, 1))):
        block = a.mats[start:start + max(1, CHUNK // max(b.order, 1))]
        keys.append(np.unique(mx.pack(ring, mx.matmul(ring, block[:, None], b.mats[None, :]))))
    keys = np.unique(np.concatenate(keys))
    if len(keys) > cap:
        raise CapExceeded(f"|{name}| exceeds cap {cap}")
    out = Group(ring, n, mx.unpack(ring, keys, n), name, _sorted=True)
    gens = np.concatenate([a.mats[a.generators], b.mats[b.generators]])
    closed = out.contains_mats(mx.matmul(ring, out.mats[:, None], gens[None, :]).reshape(-1, n, n))
    if not closed.all():
        raise NotASubgroup(f"{name} = {a.name}{b.name} is not a subgroup")
    return out


def intersection(a: Group, b: Group, name: str = "A∩B") -> Group:
    keys = a.keys[b.contains_keys(a.keys)]
    return Group(a.ring, a.n, a.mats[np.isin(a.keys, keys)], name, _sorted=True)


def derived_subgroup(g: Group) -> Group:
    """Normal closure of the commutators of the generators."""
    ring, n = g.ring, g.n
    gens = g.mats[g.generators]
    inv = mx.inverse(ring, gens)
    comm = mx.matmul(ring, mx.matmul(ring, gens[:, None], gens[None, :]),
                     mx.matmul(ring, inv[:, None], inv[None, :])).reshape(-1, n, n)
    d = subgroup_closure(ring, n, comm, name=f"[{g.name},{g.name}]")
    while not d.is_normal_in(g):
        conj = mx.matmul(ring, mx.matmul(ring, gens[:, None], d.mats[d.generators][None, :]),
                         inv[:, None]).reshape(-1, n, n)
        d = subgroup_closure(ring, n, np.concatenate([d.mats[d.generators], conj]), name=d.name)
    return d


def coset_labels(big: Group, sub: Group) -> np.ndarray:
    """Label each element x of ``big`` by its left coset x*sub (labels 0..index-1)."""
    ring, n = big.ring, big.n
    rows, cols = [], []
    for h in sub.mats[sub.generators]:
        prod = big.index_of_mats(mx.matmul(ring, big.mats, h))
        rows.append(np.arange(big.order))
        cols.append(prod)
    if not rows:
        return np.arange(big.order)
    graph = coo_matrix((np.ones(sum(len(r) for r in rows)),
                        (np.concatenate(rows), np.concatenate(cols))),
                       shape=(big.order, big.order))
    ncomp, labels = connected_components(graph, directed=True, connection="weak")
    _, labels = np.unique(labels, return_inverse=True)
    return labels


# ---------------------------------------------------------------------------
# conjugacy classes


@dataclass
class ClassData:
    group: Group
    class_of: np.ndarray  # element index -> class id
    reps: np.ndarray  # class id -> element index (smallest key; identity first)
    sizes: np.ndarray

    @property
    def count(self) -> int:
        return len(self.reps)

    @cached_property
    def inverse_class(self) -> np.ndarray:
        return self.class_of[self.group.inverse_index[self.reps]]

    @cached_property
    def rep_orders(self) -> np.ndarray:
        return self.group.element_orders[self.reps]

    def power_classes(self, c: int) -> np.ndarray:
        """Class ids of rep^0, rep^1, ..., rep^(o-1)."""
        g = self.group
        o = int(self.rep_orders[c])
        x = g.mats[self.reps[c]]
        cur = mx.identity(g.ring, g.n)
        out = []
        for _ in range(o):
            out.append(cur)
            cur = mx.matmul(g.ring, cur, x)
        return self.class_of[g.index_of_mats(np.array(out))]

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.class_of == c)

    def classes_of_keys(self, keys) -> np.ndarray:
        return self.class_of[self.group.index(keys)]


def conjugacy_classes(g: Group) -> ClassData:
    """Orbits of conjugation by the generators, via connected components."""
    rows, cols = [], []
    for x in g.mats[g.generators]:
        rows.append(np.arange(g.order))
        cols.append(g.conjugate_by(x))
    if rows:
        graph = coo_matrix((np.ones(g.order * len(rows)), (np.concatenate(rows), np.concatenate(cols))),
                           shape=(g.order, g.order))
        _, labels = connected_components(graph, directed=True, connection="weak")
    else:
        labels = np.zeros(g.order, dtype=np.int64)
    # rep = smallest element index per component; identity class goes first
    ncomp = labels.max() + 1
    reps = np.full(ncomp, g.order, dtype=np.int64)
    np.minimum.at(reps, labels, np.arange(g.order))
    ident_comp = labels[g.identity]
    reps[ident_comp] = g.identity
    order = sorted(range(ncomp), key=lambda c: (c != ident_comp, reps[c]))
    relabel = np.empty(ncomp, dtype=np.int64)
    relabel[order] = np.arange(ncomp)
    class_of = relabel[labels]
    sizes = np.bincount(class_of, minlength=ncomp)
    return ClassData(g, class_of, reps[order], sizes)


# ---------------------------------------------------------------------------
# class functions and linear characters


class ClassFunction:
    """Cyclotomic values, one per conjugacy class of ``group``."""

    def __init__(self, group: Group, m: int, values):
        values = np.asarray(values, dtype=np.int64)
        self.group = group
        self.m = m
        self.values = cy.reduce_coeffs(values, m) if values.shape[-1] != cy.totient(m) else values
        if self.values.shape[0] != group.classes.count:
            raise ValueError("one value per class required")

    @classmethod
    def from_element_values(cls, group: Group, m: int, values) -> "ClassFunction":
        return cls(group, m, np.asarray(values)[group.classes.reps])

    def lift(self, m: int) -> "ClassFunction":
        if m == self.m:
            return self
        return ClassFunction(self.group, m, cy.lift_modulus(self.values, self.m, m))

    def _align(self, other: "ClassFunction"):
        if other.group is not self.group:
            raise ValueError("class functions on different groups")
        m = cy.lcm(self.m, other.m)
        return m, self.lift(m).values, other.lift(m).values

    def __add__(self, other):
        m, a, b = self._align(other)
        return ClassFunction(self.group, m, a + b)

    def __sub__(self, other):
        m, a, b = self._align(other)
        return ClassFunction(self.group, m, a - b)

    def __mul__(self, other):
        if isinstance(other, int):
            return ClassFunction(self.group, self.m, self.values * other)
        m, a, b = self._align(other)
        return ClassFunction(self.group, m, cy.multiply(a, b, m))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ClassFunction) or other.group is not self.group:
            return NotImplemented
        _, a, b = self._align(other)
        return bool(np.array_equal(a, b))

    __hash__ = None

    def conj(self) -> "ClassFunction":
        return ClassFunction(self.group, self.m, cy.conjugate(self.values, self.m))

    @property
    def degree(self) -> int:
        v = self.values[0]
        if v[1:].any():
            raise ValueError("value at the identity is not an integer")
        return int(v[0])

    def value(self, c: int) -> cy.CyclotomicValue:
        return cy.CyclotomicValue(self.m, tuple(int(x) for x in self.values[c]))

    def element_values(self) -> np.ndarray:
        return self.values[self.group.classes.class_of]

    def to_complex(self) -> np.ndarray:
        z = np.exp(2j * np.pi * np.arange(self.values.shape[-1]) / self.m)
        return self.values @ z

    def inner(self, other: "ClassFunction") -> Fraction:
        return inner(self, other)

    def is_zero(self) -> bool:
        return not self.values.any()

    def __repr__(self):
        vals = ", ".join(repr(self.value(c)) for c in range(min(6, len(self.values))))
        more = ", ..." if len(self.values) > 6 else ""
        return f"ClassFunction({self.group.name}: {vals}{more})"


def inner(a: ClassFunction, b: ClassFunction) -> Fraction:
    """<a, b> = (1/|G|) sum_g a(g) conj(b(g)), exactly."""
    m, x, y = a._align(b)
    total = cy.weighted_hermitian_sum(x, y, a.group.classes.sizes, m)
    if total[1:].any():
        raise ValueError("inner product is not rational")
    return Fraction(int(total[0]), a.group.order)


class LinearChar:
    """A linear character given by exponents e(g) with chi(g) = zeta_m^e(g)."""

    def __init__(self, group: Group, m: int, exps):
        self.group = group
        self.m = m
        self.exps = np.asarray(exps, dtype=np.int64) % m

    def lift(self, m: int) -> "LinearChar":
        if m % self.m:
            raise ValueError(f"{self.m} does not divide {m}")
        return LinearChar(self.group, m, self.exps * (m // self.m))

    def __mul__(self, other: "LinearChar") -> "LinearChar":
        m = cy.lcm(self.m, other.m)
        return LinearChar(self.group, m, self.lift(m).exps + other.lift(m).exps)

    def __eq__(self, other):
        if not isinstance(other, LinearChar) or other.group is not self.group:
            return NotImplemented
        m = cy.lcm(self.m, other.m)
        return bool(np.array_equal(self.lift(m).exps, other.lift(m).exps))

    __hash__ = None

    def restrict(self, sub: Group) -> "LinearChar":
        return LinearChar(sub, self.m, self.exps[self.group.index(sub.keys)])

    def at_keys(self, keys) -> np.ndarray:
        return self.exps[self.group.index(keys)]

    def to_class_function(self) -> ClassFunction:
        return ClassFunction(self.group, self.m, cy.roots_of_unity(self.exps[self.group.classes.reps], self.m))

    def is_homomorphism(self) -> bool:
        g = self.group
        gens = g.generators
        prods = g.mul(np.repeat(np.arange(g.order), len(gens)), np.tile(gens, g.order))
        lhs = self.exps[prods]
        rhs = np.repeat(self.exps, len(gens)) + np.tile(self.exps[gens], g.order)
        return bool(((lhs - rhs) % self.m == 0).all())


def trivial_linear(group: Group, m: int = 1) -> LinearChar:
    return LinearChar(group, m, np.zeros(group.order, dtype=np.int64))


def restrict(chi: ClassFunction, sub: Group) -> ClassFunction:
    big = chi.group
    cls = big.classes.class_of[big.index(sub.keys[sub.classes.reps])]
    return ClassFunction(sub, chi.m, chi.values[cls])


def induce(chi: ClassFunction, big: Group) -> ClassFunction:
    """Ind_H^G chi at each class c: |G| / (|H| |c|) times the sum over H ∩ c."""
    sub = chi.group
    if sub.order and not sub.is_subgroup_of(big):
        raise NotASubgroup(f"{sub.name} is not inside {big.name}")
    big_cls = big.classes.class_of[big.index(sub.keys)]
    elem_vals = chi.values[sub.classes.class_of]
    sums = np.zeros((big.classes.count, chi.values.shape[-1]), dtype=np.int64)
    np.add.at(sums, big_cls, elem_vals)
    num = sums * big.order
    den = (sub.order * big.classes.sizes)[:, None]
    if (num % den).any():
        raise ArithmeticError("induced values are not algebraic integers")
    return ClassFunction(big, chi.m, num // den)


def transport(chi: ClassFunction, target: Group) -> ClassFunction:
    """Re-read a class function on an equal group built separately."""
    if not np.array_equal(chi.group.keys, target.keys):
        raise ValueError("groups differ")
    src = chi.group.classes.class_of[chi.group.index(target.keys[target.classes.reps])]
    return ClassFunction(target, chi.m, chi.values[src])


# ---------------------------------------------------------------------------
# linear algebra mod a prime


def rref_mod(a: np.ndarray, ell: int):
    a = np.asarray(a, dtype=np.int64) % ell
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if not len(nz):
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, ell) % ell
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        if len(others):
            a[others] = (a[others] - a[others, c][:, None] * a[r]) % ell
        pivots.append(c)
        r += 1
    return a[:r], pivots


def nullspace_mod(a: np.ndarray, ell: int) -> np.ndarray:
    """Basis (rows) of {x : a x = 0} mod ell."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[1]
    red, piv = rref_mod(a, ell)
    free = [c for c in range(n) if c not in piv]
    out = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, p in enumerate(piv):
            out[k, p] = (-red[i, f]) % ell
    return out


def charpoly_mod(a: np.ndarray, ell: int) -> np.ndarray:
    """Characteristic polynomial mod ell via Hessenberg reduction (low degree first)."""
    h = np.asarray(a, dtype=np.int64) % ell
    n = h.shape[0]
    for c in range(n - 2):
        nz = np.flatnonzero(h[c + 1:, c])
        if not len(nz):
            continue
        p = c + 1 + nz[0]
        if p != c + 1:
            h[[c + 1, p]] = h[[p, c + 1]]
            h[:, [c + 1, p]] = h[:, [p, c + 1]]
        inv = pow(int(h[c + 1, c]), -1, ell)
        below = np.arange(c + 2, n)
        u = h[below, c] * inv % ell
        if not u.any():
            continue
        h[below] = (h[below] - u[:, None] * h[c + 1]) % ell
        h[:, c + 1] = (h[:, c + 1] + (h[:, below] * u % ell).sum(axis=1)) % ell
    polys = [np.array([1], dtype=np.int64)]
    for k in range(1, n + 1):
        # p_k = (x - h_kk) p_{k-1} - sum_{i<k} h_{ik} prod_{j=i+1}^{k} h_{j,j-1} p_{i-1}
        prev = polys[k - 1]
        cur = np.zeros(k + 1, dtype=np.int64)
        cur[1:] = prev
        cur[:k] = (cur[:k] - h[k - 1, k - 1] * prev) % ell
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = prod * h[i, i - 1] % ell
            if not prod:
                break
            coef = h[i - 1, k - 1] * prod % ell
            if coef:
                pi = polys[i - 1]
                cur[:len(pi)] = (cur[:len(pi)] - coef * pi) % ell
        polys.append(cur % ell)
    return polys[n]


def roots_mod(poly: np.ndarray, ell: int) -> list[int]:
    xs = np.arange(ell, dtype=np.int64)
    acc = np.zeros(ell, dtype=np.int64)
    for c in poly[::-1]:
        acc = (acc * xs + c) % ell
    return [int(x) for x in np.flatnonzero(acc == 0)]


# ---------------------------------------------------------------------------
# character tables


class CharacterTable:
    def __init__(self, group: Group, m: int, chars: list[ClassFunction]):
        self.group = group
        self.m = m
        self.chars = chars

    def __len__(self):
        return len(self.chars)

    def __iter__(self):
        return iter(self.chars)

    def __getitem__(self, i):
        return self.chars[i]

    @property
    def degrees(self) -> list[int]:
        return [c.degree for c in self.chars]

    @cached_property
    def _modular(self):
        g = self.group
        img = cy.ModularImage(self.m, 4 * g.order * max(self.degrees) + 1)
        vals = np.array([c.lift(self.m).values for c in self.chars])
        return img, img.image(vals), img.conj_image(vals)

    def multiplicities(self, chi: ClassFunction) -> np.ndarray:
        """<chi, X> for every irreducible X (chi must be a virtual character)."""
        if chi.group is not self.group:
            raise ValueError("class function lives on another group")
        m = cy.lcm(self.m, chi.m)
        if m != self.m:
            return CharacterTable(self.group, m, [c.lift(m) for c in self.chars]).multiplicities(chi)
        img, _, conj = self._modular
        a = img.image(chi.lift(m).values)
        sizes = self.group.classes.sizes % img.ell
        tot = (conj * (a * sizes % img.ell)[None, :] % img.ell).sum(axis=1) % img.ell
        tot = tot * pow(self.group.order, -1, img.ell) % img.ell
        return img.lift_int(tot)

    def constituents(self, chi: ClassFunction) -> list[tuple[int, int]]:
        mult = self.multiplicities(chi)
        return [(i, int(k)) for i, k in enumerate(mult) if k]

    def find(self, chi: ClassFunction) -> int:
        for i, c in enumerate(self.chars):
            if c == chi:
                return i
        return -1

    def gram_check(self) -> bool:
        """Row orthonormality checked modulo an independent prime."""
        img, vals, conj = self._modular
        sizes = self.group.classes.sizes % img.ell
        gram = (vals * sizes % img.ell) @ conj.T % img.ell
        gram = gram * pow(self.group.order, -1, img.ell) % img.ell
        return bool(np.array_equal(gram, np.eye(len(self.chars), dtype=np.int64)))

    def to_json(self) -> dict:
        g = self.group
        cls = g.classes
        return {
            "modulus": self.m,
            "classes": [{"rep": repr(mx.Mat(g.ring, g.mats[r])), "size": int(s)}
                        for r, s in zip(cls.reps, cls.sizes)],
            "chars": [[repr(c.value(i)) for i in range(cls.count)] for c in self.chars],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _class_matrix(g: Group, cls: ClassData, j: int) -> np.ndarray:
    """M[l, i] = #{x in C_j : x^-1 g_i in C_l}."""
    k = cls.count
    members = cls.members(j)
    inv = g.mats[g.inverse_index[members]]
    reps = g.mats[cls.reps]
    out = np.zeros((k, k), dtype=np.int64)
    step = max(1, CHUNK // max(k, 1))
    for start in range(0, len(inv), step):
        block = inv[start:start + step]
        prods = mx.matmul(g.ring, block[:, None], reps[None, :])
        ls = cls.class_of[g.index_of_mats(prods.reshape(-1, g.n, g.n))].reshape(len(block), k)
        for i in range(k):
            out[:, i] += np.bincount(ls[:, i], minlength=k)
    return out


def character_table(g: Group, m: int | None = None, cap: int = DEFAULT_CAP) -> CharacterTable:
    """All irreducible characters of g (Dixon-Schneider, exact)."""
    if g.order > cap:
        raise CapExceeded(f"|G| = {g.order} exceeds cap {cap}")
    cache = getattr(g, "_table_cache", None)
    m = cy.lcm(g.exponent, m or 1)
    if cache is not None and cache.m == m:
        return cache
    cls = g.classes
    k = cls.count
    img = cy.ModularImage(m, isqrt(g.order) + 1)
    ell = img.ell
    spaces = [np.eye(k, dtype=np.int64)]
    done: list[np.ndarray] = []
    order = sorted(range(1, k), key=lambda c: (cls.sizes[c], c))
    for j in order:
        if not spaces:
            break
        mt = _class_matrix(g, cls, j).T % ell
        nxt = []
        for basis in spaces:
            red, piv = rref_mod(basis, ell)
            restricted = (red @ mt % ell)[:, piv]
            poly = charpoly_mod(restricted, ell)
            roots = roots_mod(poly, ell)
            if len(roots) == 1:
                nxt.append(red)
                continue
            for lam in roots:
                shifted = (restricted - lam * np.eye(len(red), dtype=np.int64)) % ell
                null = nullspace_mod(shifted.T, ell)
                sub = null @ red % ell
                (done if len(sub) == 1 else nxt).append(sub)
        spaces = nxt
    if spaces and any(len(s) > 1 for s in spaces):
        raise ArithmeticError("class matrices failed to split the table")
    done.extend(spaces)
    omegas = []
    for v in done:
        v = v[0] * pow(int(v[0][0]), -1, ell) % ell
        omegas.append(v)
    chars = [_lift_character(g, cls, img, w) for w in omegas]
    chars.sort(key=lambda c: (c.degree, [tuple(v) for v in c.values]))
    table = CharacterTable(g, m, chars)
    if sum(d * d for d in table.degrees) != g.order:
        raise ArithmeticError("sum of squared degrees differs from the group order")
    if any(g.order % d for d in table.degrees):
        raise ArithmeticError("a degree does not divide the group order")
    if not table.gram_check():
        raise ArithmeticError("character table failed the orthogonality check")
    g._table_cache = table
    return table


def _lift_character(g: Group, cls: ClassData, img: cy.ModularImage, w: np.ndarray) -> ClassFunction:
    ell, m = img.ell, img.m
    sizes = cls.sizes % ell
    inv_sizes = np.array([pow(int(s), -1, ell) for s in sizes], dtype=np.int64)
    s = (w * w[cls.inverse_class] % ell * inv_sizes % ell).sum() % ell
    d2 = g.order * pow(int(s), -1, ell) % ell
    deg = next(d for d in range(1, isqrt(g.order) + 1) if d * d % ell == d2)
    chi_mod = deg * w % ell * inv_sizes % ell
    full = np.zeros((cls.count, m), dtype=np.int64)
    for c in range(cls.count):
        o = int(cls.rep_orders[c])
        powers = cls.power_classes(c)
        zo = pow(img.zeta, m // o, ell)
        # mu_t = (1/o) sum_s chi(g^s) zo^(-s t)
        st = np.outer(np.arange(o), np.arange(o)) % o
        table = np.array([pow(zo, -e, ell) for e in range(o)], dtype=np.int64)
        mu = (chi_mod[powers][:, None] * table[st] % ell).sum(axis=0) % ell
        mu = mu * pow(o, -1, ell) % ell
        if (mu > deg).any():
            raise ArithmeticError("eigenvalue multiplicities failed to lift")
        full[c, (np.arange(o) * (m // o)) % m] += mu
    return ClassFunction(g, m, cy.reduce_coeffs(full, m))


# ---------------------------------------------------------------------------
# extending linear characters


def _stable(chi: LinearChar, big: Group) -> bool:
    sub = chi.group
    ring = sub.ring
    for x in big.mats[big.generators]:
        conj = mx.matmul(ring, mx.matmul(ring, x, sub.mats), mx.inverse(ring, x))
        if not sub.contains_mats(conj).all():
            raise NotStable(f"{sub.name} is not normalized by {big.name}")
        if not np.array_equal(chi.exps[sub.index_of_mats(conj)], chi.exps):
            return False
    return True


def _character_on_product(chi: LinearChar, d: Group, s: Group) -> np.ndarray:
    """Exponents on S = N D of the character n d -> chi(n) (breadth-first)."""
    n_grp = chi.group
    ring, n = s.ring, s.n
    exps = np.full(s.order, -1, dtype=np.int64)
    exps[s.identity] = 0
    gens = [(x, int(chi.exps[n_grp.index_of_mats(x[None])[0]])) for x in n_grp.mats[n_grp.generators]]
    gens += [(x, 0) for x in d.mats[d.generators]]
    gmats = np.array([x for x, _ in gens]).reshape(-1, n, n)
    gvals = np.array([v for _, v in gens], dtype=np.int64)
    frontier = np.array([s.identity])
    while len(frontier):
        prods = s.index_of_mats(mx.matmul(ring, s.mats[frontier][:, None], gmats[None, :]).reshape(-1, n, n))
        vals = (np.repeat(exps[frontier], len(gens)) + np.tile(gvals, len(frontier))) % chi.m
        fresh = exps[prods] < 0
        idx, first = np.unique(prods[fresh], return_index=True)
        exps[idx] = vals[fresh][first]
        bad = (exps[prods] != vals) & ~fresh
        if bad.any():
            raise ObstructionNonzero("character is nontrivial on N ∩ [G, G]")
        frontier = idx
    # consistency on all generator edges
    prods = s.index_of_mats(mx.matmul(ring, s.mats[:, None], gmats[None, :]).reshape(-1, n, n))
    want = (np.repeat(exps, len(gens)) + np.tile(gvals, s.order)) % chi.m
    if not np.array_equal(exps[prods], want):
        raise ObstructionNonzero("character is nontrivial on N ∩ [G, G]")
    return exps


def extend_linear_through_abelianization(chi: LinearChar, big: Group, m: int | None = None,
                                         limit: int | None = None) -> list[LinearChar]:
    """All linear characters of ``big`` restricting to ``chi`` on its normal subgroup."""
    sub = chi.group
    m = cy.lcm(chi.m, big.exponent, m or 1)
    chi = chi.lift(m)
    if not _stable(chi, big):
        raise NotStable("character is not stable under the overgroup")
    if sub.order == big.order:
        return [LinearChar(big, m, chi.exps[sub.index(big.keys)])]
    ring, n = big.ring, big.n
    d = derived_subgroup(big)
    nd = intersection(d, sub)
    if chi.exps[sub.index(nd.keys)].any():
        raise ObstructionNonzero("character is nontrivial on N ∩ [G, G]")
    s = product_group(sub, d, name="ND") if not d.is_subgroup_of(sub) else sub
    base = _character_on_product(chi, d, s) if s is not sub else chi.exps.copy()
    # cyclic steps: S -> <S, g> for generators g of big outside S
    partial = [(s, base)]
    for g_idx in big.generators:
        cur_grp = partial[0][0]
        x = big.mats[g_idx]
        if cur_grp.contains_mats(x[None])[0]:
            continue
        powers = [mx.identity(ring, n), x]
        while not cur_grp.contains_mats(powers[-1][None])[0]:
            powers.append(mx.matmul(ring, powers[-1], x))
        o = len(powers) - 1
        layers = [mx.matmul(ring, powers[k], cur_grp.mats) for k in range(o)]
        new_grp = Group(ring, n, np.concatenate(layers), name=cur_grp.name)
        layer_idx = [new_grp.index_of_mats(layer) for layer in layers]
        x_o = cur_grp.index_of_mats(powers[o][None])[0]
        out = []
        for _, exps in partial:
            b = int(exps[x_o])
            if b % gcd(o, m):
                raise ObstructionNonzero("no root of the required order")
            step = m // gcd(o, m)
            a0 = next(a for a in range(m) if (o * a - b) % m == 0)
            for t in range(gcd(o, m)):
                a = a0 + t * step
                new = np.empty(new_grp.order, dtype=np.int64)
                for k in range(o):
                    new[layer_idx[k]] = (exps + k * a) % m
                out.append((new_grp, new))
        partial = out
        if limit is not None and len(partial) > limit:
            partial = partial[:limit]
    final_grp = partial[0][0]
    perm = final_grp.index(big.keys)
    result = [LinearChar(big, m, exps[perm]) for _, exps in partial]
    for lam in result[:1]:
        if not lam.is_homomorphism():
            raise ArithmeticError("extension is not a homomorphism")
    return result


def extension_count(sub: Group, big: Group) -> int:
    """[G : N [G, G]], the number of extensions of a liftable linear character."""
    d = derived_subgroup(big)
    nd = product_group(sub, d) if not d.is_subgroup_of(sub) else sub
    return big.order // nd.order


# ---------------------------------------------------------------------------
# symplectic spaces and Heisenberg lifts


@dataclass
class SymplecticSpace:
    """J/H as an F_p-space with the commutator form b(x, y) valued in F_p."""

    big: Group
    sub: Group
    p: int
    coset_of: np.ndarray  # element of big -> coset label
    coords: np.ndarray  # coset label -> coordinate vector in F_p^dim
    basis: np.ndarray  # element indices of big representing the basis
    gram: np.ndarray
    radical: np.ndarray  # rows: basis of the radical in coordinates

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def radical_dim(self) -> int:
        return len(self.radical)

    def preimage(self, rows: np.ndarray, name: str) -> Group:
        """Elements of J whose coset lies in the F_p-span of ``rows``."""
        span = _fp_span(np.asarray(rows, dtype=np.int64).reshape(-1, self.dim), self.p)
        codes = _encode(span, self.p)
        mine = _encode(self.coords[self.coset_of], self.p)
        mask = np.isin(mine, codes)
        return Group(self.big.ring, self.big.n, self.big.mats[mask], name, _sorted=True)


def _encode(rows: np.ndarray, p: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    if rows.shape[-1] == 0:
        return np.zeros(rows.shape[:-1], dtype=np.int64)
    return rows @ (p ** np.arange(rows.shape[-1], dtype=np.int64))


def _fp_span(rows: np.ndarray, p: int) -> np.ndarray:
    dim = rows.shape[1] if rows.ndim == 2 else 0
    span = np.zeros((1, dim), dtype=np.int64)
    for r in rows:
        span = np.unique(((span[:, None, :] + np.arange(p)[None, :, None] * r) % p).reshape(-1, dim), axis=0)
    return span


def commutator_exponents(theta: LinearChar, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """theta([x, y]) as exponents mod theta.m for matching stacks of matrices."""
    ring = theta.group.ring
    xi, yi = mx.inverse(ring, xs), mx.inverse(ring, ys)
    comm = mx.matmul(ring, mx.matmul(ring, xs, ys), mx.matmul(ring, xi, yi))
    return theta.at_keys(mx.pack(ring, comm))


def symplectic_space(big: Group, sub: Group, theta: LinearChar) -> SymplecticSpace:
    ring, n = big.ring, big.n
    p = ring.p
    if big.order % sub.order:
        raise NotElementaryAbelian("not a subgroup")
    quotient = big.order // sub.order
    coset_of = coset_labels(big, sub)
    reps = np.full(quotient, big.order, dtype=np.int64)
    np.minimum.at(reps, coset_of, np.arange(big.order))
    gens = big.generators
    # elementary abelian: generators commute and have p-th powers in H
    gm = big.mats[gens]
    pw = gm
    for _ in range(p - 1):
        pw = mx.matmul(ring, pw, gm)
    gi = mx.inverse(ring, gm)
    comm = mx.matmul(ring, mx.matmul(ring, gm[:, None], gm[None, :]), mx.matmul(ring, gi[:, None], gi[None, :]))
    if not (sub.contains_mats(pw).all() and sub.contains_mats(comm.reshape(-1, n, n)).all()):
        raise NotElementaryAbelian(f"{big.name}/{sub.name} is not elementary abelian")
    # greedy F_p basis of J/H, recording coordinates of every coset
    coords = -np.ones((quotient, 0), dtype=np.int64)
    covered = {int(coset_of[big.identity]): ()}
    basis: list[int] = []
    for cand in np.argsort(reps):
        if len(covered) == quotient:
            break
        if int(cand) in covered:
            continue
        x = big.mats[reps[cand]]
        basis.append(int(reps[cand]))
        new = {}
        cur_labels = np.array(list(covered.keys()))
        cur_coords = [covered[c] for c in cur_labels]
        acc = big.mats[reps[cur_labels]]
        for a in range(1, p):
            acc = mx.matmul(ring, acc, x)
            labs = coset_of[big.index_of_mats(acc)]
            for lab, cc in zip(labs, cur_coords):
                new[int(lab)] = cc + (a,)
        covered = {c: v + (0,) for c, v in covered.items()}
        covered.update(new)
    dim = len(basis)
    coords = np.zeros((quotient, dim), dtype=np.int64)
    for lab, cc in covered.items():
        coords[lab] = cc
    if len(covered) != quotient or p ** dim != quotient:
        raise NotElementaryAbelian("quotient is not an F_p-space")
    bm = big.mats[np.array(basis, dtype=np.int64)] if basis else np.zeros((0, n, n), dtype=np.int64)
    theta = theta.lift(cy.lcm(theta.m, p))
    unit = theta.m // p
    if dim:
        ex = commutator_exponents(theta, np.repeat(bm, dim, axis=0), np.tile(bm, (dim, 1, 1)))
        if (ex % unit).any():
            raise NotElementaryAbelian("commutator values are not p-th roots of unity")
        gram = (ex // unit % p).reshape(dim, dim)
        # well-definedness: shifting representatives by H leaves the form unchanged
        for h in sub.mats[sub.generators][:4]:
            shifted = mx.matmul(ring, bm, h)
            ex2 = commutator_exponents(theta, np.repeat(shifted, dim, axis=0), np.tile(bm, (dim, 1, 1)))
            if not np.array_equal(ex2 // unit % p, gram.reshape(-1)):
                raise NotStable("commutator form depends on coset representatives")
        radical = nullspace_mod(gram, p)
    else:
        gram = np.zeros((0, 0), dtype=np.int64)
        radical = np.zeros((0, 0), dtype=np.int64)
    return SymplecticSpace(big, sub, p, coset_of, coords, np.array(basis, dtype=np.int64), gram, radical)


def lagrangian(space: SymplecticSpace) -> np.ndarray:
    """Rows spanning a maximal isotropic subspace containing the radical."""
    p, gram, dim = space.p, space.gram, space.dim
    if not dim:
        return np.zeros((0, 0), dtype=np.int64)
    iso = rref_mod(space.radical, p)[0] if space.radical_dim else np.zeros((0, dim), dtype=np.int64)
    # the form is alternating, so any vector orthogonal to iso keeps it isotropic
    while True:
        perp = nullspace_mod(iso @ gram % p, p) if len(iso) else np.eye(dim, dtype=np.int64)
        grown = next((v for v in perp
                      if len(rref_mod(np.vstack([iso, v]), p)[0]) > len(iso)), None)
        if grown is None:
            break
        iso = rref_mod(np.vstack([iso, grown]), p)[0]
    if (iso @ gram @ iso.T % p).any():
        raise NoLagrangian("isotropy check failed")
    if 2 * len(iso) != dim + space.radical_dim:
        raise NoLagrangian("isotropic subspace is not maximal")
    return iso


@dataclass
class HeisenbergLift:
    eta: ClassFunction
    space: SymplecticSpace
    radical: Group
    lagrangian: Group
    theta_tilde: LinearChar
    checks: dict


def heisenberg_lift(big: Group, sub: Group, theta: LinearChar,
                    theta_tilde: LinearChar | None = None,
                    space: SymplecticSpace | None = None) -> HeisenbergLift:
    """The irreducible character of J above theta_tilde on the radical R."""
    space = space or symplectic_space(big, sub, theta)
    rad_grp = space.preimage(space.radical, f"R({big.name})") if space.dim else sub
    if theta_tilde is None:
        if rad_grp.order != sub.order:
            raise DegenerateForm("form on J/H is degenerate and no radical character was given")
        theta_tilde = theta
    if theta_tilde.group.order != rad_grp.order:
        raise DegenerateForm("theta_tilde must live on the radical")
    theta_tilde = LinearChar(rad_grp, theta_tilde.m, theta_tilde.exps[theta_tilde.group.index(rad_grp.keys)])
    iso = lagrangian(space)
    lag = space.preimage(iso, f"L({big.name})") if space.dim else sub
    if lag.order == rad_grp.order:
        lam = theta_tilde
    else:
        lam = extend_linear_through_abelianization(theta_tilde, lag, limit=1)[0]
    eta = induce(lam.to_class_function(), big)
    deg2 = big.order // rad_grp.order
    root = isqrt(deg2)
    checks = {
        "norm": inner(eta, eta) == 1,
        "degree": root * root == deg2 and eta.degree == root,
        "restriction": restrict(eta, sub) == theta.to_class_function().lift(eta.m) * eta.degree
        if sub.order else True,
    }
    if rad_grp.order != big.order:
        ind = induce(theta_tilde.to_class_function(), big)
        m = cy.lcm(ind.m, eta.m)
        checks["uniqueness"] = ind.lift(m) == eta.lift(m) * eta.degree
    else:
        checks["uniqueness"] = True
    return HeisenbergLift(eta, space, rad_grp, lag, theta_tilde, checks)
