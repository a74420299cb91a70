"""Regular adjoint orbits, polynomial factorization over F_q and block-form lifts."""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import matrices as mx
from .errors import NotRegular, ParseError
from .localring import Ring
from .matrices import Mat, poly_trim

# ---------------------------------------------------------------------------
# polynomial arithmetic over a field o_1 = F_q


def pdivmod(F: Ring, a, b):
    a = list(poly_trim(a))
    b = poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = F.inv(b[-1])
    quo = [0] * max(len(a) - len(b) + 1, 0)
    for i in range(len(a) - len(b), -1, -1):
        c = F.mul(a[i + len(b) - 1], inv_lead)
        quo[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] = F.sub(a[i + j], F.mul(c, bj))
    return poly_trim(quo), poly_trim(a[: len(b) - 1])


def pmod(F: Ring, a, b):
    return pdivmod(F, a, b)[1]


def monic(F: Ring, a):
    a = poly_trim(a)
    if not a:
        return a
    c = F.inv(a[-1])
    return tuple(F.mul(c, x) for x in a)


def pgcd(F: Ring, a, b):
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, pmod(F, a, b)
    return monic(F, a)


def pxgcd(F: Ring, a, b):
    """(g, s, t) with s a + t b = g monic."""
    r0, r1 = poly_trim(a), poly_trim(b)
    s0, s1, t0, t1 = (F.one,), (), (), (F.one,)
    while r1:
        q, r = pdivmod(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, mx.poly_sub(F, s0, mx.poly_mul(F, q, s1))
        t0, t1 = t1, mx.poly_sub(F, t0, mx.poly_mul(F, q, t1))
    c = F.inv(r0[-1])
    scale = lambda f: tuple(F.mul(c, x) for x in f)  # noqa: E731
    return scale(r0), scale(s0), scale(t0)


def ppowmod(F: Ring, a, e: int, mod):
    result = (F.one,)
    base = pmod(F, a, mod)
    while e:
        if e & 1:
            result = pmod(F, mx.poly_mul(F, result, base), mod)
        base = pmod(F, mx.poly_mul(F, base, base), mod)
        e >>= 1
    return result


def pderiv(F: Ring, a):
    out = []
    for k in range(1, len(a)):
        c = 0
        for _ in range(k % F.p):
            c = F.add(c, a[k])
        out.append(c)
    return poly_trim(out)


def _pth_root(F: Ring, a):
    """a(x) = b(x^p); return b with coefficients replaced by their p-th roots."""
    root_exp = F.q // F.p
    out = []
    for k in range(0, len(a), F.p):
        c = a[k]
        r = F.one
        for _ in range(root_exp):
            r = F.mul(r, c)
        out.append(r if c else 0)
    return poly_trim(out)


def squarefree_factorization(F: Ring, f) -> list[tuple[tuple[int, ...], int]]:
    """Monic f = prod g_i^i with g_i squarefree and pairwise coprime."""
    f = monic(F, f)
    out: list[tuple[tuple[int, ...], int]] = []
    if len(f) <= 1:
        return out
    d = pderiv(F, f)
    if not d:
        return [(g, e * F.p) for g, e in squarefree_factorization(F, _pth_root(F, f))]
    c = pgcd(F, f, d)
    w = pdivmod(F, f, c)[0]
    i = 1
    while len(w) > 1:
        y = pgcd(F, w, c)
        z = pdivmod(F, w, y)[0]
        if len(z) > 1:
            out.append((z, i))
        i += 1
        w, c = y, pdivmod(F, c, y)[0]
    if len(c) > 1:
        out.extend((g, e * F.p) for g, e in squarefree_factorization(F, _pth_root(F, c)))
    return out


def distinct_degree(F: Ring, f) -> list[tuple[tuple[int, ...], int]]:
    """Split squarefree monic f into products of irreducibles of equal degree d."""
    out = []
    x = (0, F.one)
    h = x
    d = 0
    rest = f
    while len(rest) - 1 >= 2 * (d + 1):
        d += 1
        h = ppowmod(F, h, F.q, rest)
        g = pgcd(F, mx.poly_sub(F, h, x), rest)
        if len(g) > 1:
            out.append((g, d))
            rest = pdivmod(F, rest, g)[0]
            h = pmod(F, h, rest)
    if len(rest) > 1:
        out.append((rest, len(rest) - 1))
    return out


def equal_degree(F: Ring, f, d: int, rng: np.random.Generator) -> list[tuple[int, ...]]:
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = poly_trim(int(c) for c in rng.integers(F.q, size=n))
        if len(a) < 2:
            continue
        if F.p == 2:
            # absolute trace map F_{q^d} -> F_2
            b, t = a, a
            for _ in range(F.f * d - 1):
                t = pmod(F, mx.poly_mul(F, t, t), f)
                b = mx.poly_add(F, b, t)
        else:
            b = mx.poly_sub(F, ppowmod(F, a, (F.q ** d - 1) // 2, f), (F.one,))
        g = pgcd(F, b, f)
        if 1 < len(g) < len(f):
            h = pdivmod(F, f, g)[0]
            return equal_degree(F, g, d, rng) + equal_degree(F, h, d, rng)


def factor_over_Fq(F: Ring, f, seed: int = 0) -> list[tuple[tuple[int, ...], int]]:
    """Complete factorization of a monic polynomial over the field F (r = 1)."""
    if F.r != 1:
        raise ValueError("factorization needs the residue field")
    rng = np.random.default_rng(seed)
    out: dict[tuple[int, ...], int] = {}
    for g, e in squarefree_factorization(F, f):
        for part, d in distinct_degree(F, g):
            for irr in equal_degree(F, part, d, rng):
                out[irr] = out.get(irr, 0) + e
    return sorted(out.items(), key=lambda item: (len(item[0]), item[0][::-1]))


def monic_polys(ring: Ring, degree: int):
    for tail in product(range(ring.size), repeat=degree):
        yield tuple(tail) + (ring.one,)


def is_irreducible(F: Ring, f) -> bool:
    fac = factor_over_Fq(F, f)
    return len(fac) == 1 and fac[0][1] == 1


# ---------------------------------------------------------------------------
# partitions and orbit representatives


@dataclass(frozen=True)
class Partition:
    """Factor data of a residue char poly: entries (f_i, d_i, m_i)."""

    parts: tuple[tuple[tuple[int, ...], int, int], ...]

    @property
    def h(self) -> int:
        return len(self.parts)

    @property
    def n(self) -> int:
        return sum(d * m for _, d, m in self.parts)

    @property
    def e(self) -> int:
        return sum(m for _, _, m in self.parts)

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(d for _, d, m in self.parts for _ in range(m))

    def shape(self) -> tuple[tuple[int, int], ...]:
        return tuple((d, m) for _, d, m in self.parts)


def partition_of(beta_bar: Mat) -> Partition:
    res = beta_bar.reduce(1)
    fac = factor_over_Fq(res.ring, res.char_poly())
    return Partition(tuple((f, len(f) - 1, m) for f, m in fac))


@dataclass(frozen=True)
class OrbitRep:
    """A regular orbit at level i, represented by the companion of its char poly."""

    level: int
    ring: Ring
    charpoly: tuple[int, ...]

    @property
    def rep(self) -> Mat:
        return Mat(self.ring, mx.companion(self.ring, self.charpoly))

    @property
    def n(self) -> int:
        return len(self.charpoly) - 1

    def label(self) -> str:
        return mx.poly_format(self.ring, self.charpoly)

    def __str__(self):
        return f"orbit:charpoly={self.label()},level={self.level}"


def regular_class_list(ring: Ring, n: int, level: int = 1) -> list[OrbitRep]:
    """One representative per regular orbit of gl_N(o_level), keyed by char poly."""
    lr = ring.truncate(level)
    out = []
    for f in monic_polys(lr, n):
        rep = OrbitRep(level, lr, f)
        if not mx.is_regular(rep.rep):
            raise NotRegular(f"companion of {rep.label()} is not regular")
        out.append(rep)
    return out


def orbit_key(beta: Mat, i: int) -> tuple[int, ...]:
    if not mx.is_regular(beta):
        raise NotRegular(f"{beta} is not regular")
    return beta.reduce(i).char_poly()


def parse_orbit(ring: Ring, text: str, default_level: int | None = None) -> OrbitRep:
    """Parse ``orbit:charpoly=x^2+x+1,level=1`` (prefix and level optional)."""
    body = text.strip()
    if body.startswith("orbit:"):
        body = body[len("orbit:"):]
    m = re.fullmatch(r"charpoly=([^,]+)(?:,level=(\d+))?", body)
    if not m:
        raise ParseError(f"bad orbit spec {text!r}")
    level = int(m.group(2)) if m.group(2) else (default_level or ring.r)
    if not 1 <= level <= ring.r:
        raise ParseError(f"orbit level {level} outside [1, {ring.r}]")
    lr = ring.truncate(level)
    f = mx.parse_poly(lr, m.group(1))
    if not f or f[-1] != lr.one:
        raise ParseError(f"characteristic polynomial must be monic: {m.group(1)!r}")
    return OrbitRep(level, lr, f)


# ---------------------------------------------------------------------------
# Hensel lifting and the block form of beta


def _residue_poly(ring: Ring, f):
    return poly_trim(ring.digit(c, 0) for c in f)


def hensel_split(ring: Ring, F, g_bar, h_bar):
    """Monic G, H over o_r with F = G H and G, H reducing to coprime g_bar, h_bar.

    The lift proceeds one power of p at a time.
    """
    res = ring.residue_field
    one, s, t = pxgcd(res, g_bar, h_bar)
    if len(one) != 1:
        raise ValueError("factors are not coprime mod p")
    G, H = tuple(g_bar), tuple(h_bar)
    for k in range(1, ring.r):
        err = mx.poly_sub(ring, F, mx.poly_mul(ring, G, H))
        if any(ring.valuation(c) < k for c in err):
            raise ArithmeticError("Hensel lift lost precision")
        e_bar = poly_trim(ring.digit(c, k) for c in err)
        if not e_bar:
            continue
        dG = pmod(res, mx.poly_mul(res, t, e_bar), g_bar)
        dH = pmod(res, mx.poly_mul(res, s, e_bar), h_bar)
        G = mx.poly_add(ring, G, tuple(ring.shift(c, k) for c in dG))
        H = mx.poly_add(ring, H, tuple(ring.shift(c, k) for c in dH))
    if mx.poly_mul(ring, G, H) != poly_trim(F):
        raise ArithmeticError("Hensel lift failed")
    return G, H


def primary_lift(ring: Ring, F, factors) -> list[tuple[int, ...]]:
    """Lift the coprime residue factorization prod f_i^{m_i} of F to o_r."""
    res = ring.residue_field
    primaries = []
    for f, m in factors:
        acc = (res.one,)
        for _ in range(m):
            acc = mx.poly_mul(res, acc, f)
        primaries.append(acc)
    out = []
    rest = poly_trim(F)
    for i, g in enumerate(primaries[:-1]):
        h = (res.one,)
        for other in primaries[i + 1:]:
            h = mx.poly_mul(res, h, other)
        G, rest = hensel_split(ring, rest, g, h)
        out.append(G)
    out.append(rest)
    return out


def _krylov(F: Ring, x: np.ndarray):
    """An invertible [v, Xv, ..., X^{n-1} v] over F, or None."""
    n = x.shape[0]
    for idx in range(1, F.size ** n):
        v = np.array([(idx // F.size ** k) % F.size for k in range(n)], dtype=np.int64)
        cols = [v]
        for _ in range(n - 1):
            cols.append(mx.matmul(F, x, cols[-1][:, None])[:, 0])
        k = np.stack(cols, axis=1)
        if F.inv_table[int(mx.det(F, k))] >= 0:
            return k
    return None


def bidiagonal_block(F: Ring, f, m: int) -> np.ndarray:
    """Block upper-bidiagonal matrix with m diagonal copies of companion(f)."""
    d = len(f) - 1
    x = np.zeros((d * m, d * m), dtype=np.int64)
    c = mx.companion(F, f)
    for i in range(m):
        x[i * d:(i + 1) * d, i * d:(i + 1) * d] = c
        if i + 1 < m:
            x[i * d:(i + 1) * d, (i + 1) * d:(i + 2) * d] = mx.identity(F, d)
    return x


@dataclass(frozen=True)
class BlockForm:
    """beta over o_r whose residue is block upper-triangular in the A_min shape."""

    beta: Mat
    partition: Partition
    primaries: tuple[tuple[int, ...], ...]

    @property
    def beta_bar(self) -> Mat:
        return self.beta.reduce(1)

    def residue_blocks(self) -> list[np.ndarray]:
        """The diagonal d_i x d_i blocks of the residue of beta."""
        a = self.beta_bar.a
        out, pos = [], 0
        for d in self.partition.block_sizes():
            out.append(a[pos:pos + d, pos:pos + d])
            pos += d
        return out


def choose_beta(orbit: OrbitRep, ring: Ring) -> BlockForm:
    """A lift of the orbit to o_r lying in A_min with the ordered block residue."""
    if orbit.ring.spec.family != ring.spec.family or orbit.ring.p != ring.p or orbit.ring.f != ring.f:
        raise ValueError("orbit and target ring differ")
    if not mx.is_regular(orbit.rep):
        raise NotRegular(f"{orbit} is not regular")
    F = tuple(orbit.charpoly)  # indices read in o_r give a monic lift
    res = ring.residue_field
    factors = factor_over_Fq(res, _residue_poly(ring, F))
    partition = Partition(tuple((f, len(f) - 1, m) for f, m in factors))
    primaries = primary_lift(ring, F, factors)
    n = len(F) - 1
    beta = np.zeros((n, n), dtype=np.int64)
    pos = 0
    for (f, d, m), G in zip(partition.parts, primaries):
        size = d * m
        target = bidiagonal_block(res, f, m)
        k = _krylov(res, target)
        kinv = mx.inverse(ring, k)
        block = mx.matmul(ring, mx.matmul(ring, k, mx.companion(ring, G)), kinv)
        beta[pos:pos + size, pos:pos + size] = block
        pos += size
    out = BlockForm(Mat(ring, beta), partition, tuple(primaries))
    if mx.poly_reduce(ring, out.beta.char_poly(), orbit.level) != \
            mx.poly_reduce(ring, F, orbit.level):
        raise ArithmeticError("lifted beta has the wrong characteristic polynomial")
    return out
