"""Matrices, polynomials and submodules over o_r.

Matrices are numpy arrays of ring indices with the two trailing axes being
rows and columns, so every routine here also works on stacks of matrices.
Submodules of o_r^n are kept in Howell form, which is canonical over a chain
ring and therefore makes module equality a tuple comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations

import numpy as np

from .errors import CapExceeded, ParseError, ShapeMismatch
from .localring import Family, Ring, RingElem


# ---------------------------------------------------------------------------
# batch matrix arithmetic


def matmul(ring: Ring, a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[-1] != b.shape[-2]:
        raise ShapeMismatch(f"cannot multiply {a.shape} by {b.shape}")
    if ring.family is Family.IntegersModPrimePower:
        return (a @ b) % ring.size
    prods = ring.mul_table[a[..., :, :, None], b[..., None, :, :]]
    return ring.sum_arr(prods, axis=-2)


def identity(ring: Ring, n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64) * ring.one


def _sign(perm) -> int:
    s, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def det(ring: Ring, a) -> np.ndarray:
    """Determinant by the Leibniz expansion (division free, fine for N <= 4)."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[-1]
    if a.shape[-2] != n:
        raise ShapeMismatch("determinant of a non-square matrix")
    total = np.zeros(a.shape[:-2], dtype=np.int64)
    for perm in permutations(range(n)):
        term = a[..., 0, perm[0]]
        for i in range(1, n):
            term = ring.mul_arr(term, a[..., i, perm[i]])
        if _sign(perm) < 0:
            term = ring.neg_arr(term)
        total = ring.add_arr(total, term)
    return total


def adjugate(ring: Ring, a) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[-1]
    if n == 1:
        return np.ones_like(a) * ring.one
    out = np.zeros_like(a)
    idx = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = a[..., idx != i, :][..., :, idx != j]
            d = det(ring, minor)
            out[..., j, i] = d if (i + j) % 2 == 0 else ring.neg_arr(d)
    return out


def inverse(ring: Ring, a) -> np.ndarray:
    """Inverse of each matrix in a stack; non-invertible input raises NotAUnit."""
    a = np.asarray(a, dtype=np.int64)
    d = det(ring, a)
    dinv = ring.inv_table[d]
    if (dinv < 0).any():
        from .errors import NotAUnit
        raise NotAUnit("matrix is not invertible")
    return ring.mul_arr(adjugate(ring, a), dinv[..., None, None])


def trace(ring: Ring, a) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    return ring.sum_arr(np.diagonal(a, axis1=-2, axis2=-1), axis=-1)


def reduce_entries(ring: Ring, a, i: int) -> np.ndarray:
    return ring.reduce(np.asarray(a, dtype=np.int64), i)


def pack(ring: Ring, a) -> np.ndarray:
    """Integer keys for a stack of matrices (row-major, base |o_r|)."""
    a = np.asarray(a, dtype=np.int64)
    n2 = a.shape[-1] * a.shape[-2]
    if ring.size ** n2 >= 2 ** 62:
        raise CapExceeded("matrices too large to pack into 64-bit keys")
    flat = a.reshape(a.shape[:-2] + (n2,))
    weights = ring.size ** np.arange(n2 - 1, -1, -1, dtype=np.int64)
    return flat @ weights


def unpack(ring: Ring, keys, n: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    n2 = n * n
    weights = ring.size ** np.arange(n2 - 1, -1, -1, dtype=np.int64)
    flat = (keys[..., None] // weights) % ring.size
    return flat.reshape(keys.shape + (n, n))


# ---------------------------------------------------------------------------
# polynomials: tuples of ring indices, lowest degree first


def poly_trim(f) -> tuple[int, ...]:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return tuple(f)


def poly_add(ring: Ring, f, g) -> tuple[int, ...]:
    n = max(len(f), len(g))
    f = list(f) + [0] * (n - len(f))
    g = list(g) + [0] * (n - len(g))
    return poly_trim(ring.add(x, y) for x, y in zip(f, g))


def poly_neg(ring: Ring, f) -> tuple[int, ...]:
    return tuple(ring.neg(x) for x in f)


def poly_sub(ring: Ring, f, g) -> tuple[int, ...]:
    return poly_add(ring, f, poly_neg(ring, g))


def poly_mul(ring: Ring, f, g) -> tuple[int, ...]:
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if not x:
            continue
        for j, y in enumerate(g):
            out[i + j] = ring.add(out[i + j], ring.mul(x, y))
    return poly_trim(out)


def poly_reduce(ring: Ring, f, i: int) -> tuple[int, ...]:
    return poly_trim(ring.reduce(x, i) for x in f)


def poly_eval_matrix(ring: Ring, f, a) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[-1]
    acc = np.zeros_like(a)
    for c in reversed(list(f) or [0]):
        acc = ring.add_arr(matmul(ring, acc, a), identity(ring, n) * c)
    return acc


def poly_format(ring: Ring, f, var: str = "x") -> str:
    f = poly_trim(f)
    if not f:
        return "0"
    terms = []
    for k in range(len(f) - 1, -1, -1):
        c = f[k]
        if not c:
            continue
        cs = ring.format(c)
        if "+" in cs and k:
            cs = f"({cs})"
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if not mono:
            terms.append(cs)
        elif c == ring.one:
            terms.append(mono)
        else:
            terms.append(f"{cs}*{mono}")
    return "+".join(terms)


def parse_scalar(ring: Ring, text: str) -> int:
    """An integer, or for F_q[t]/t^r a polynomial in t such as ``1+t^2``."""
    text = text.replace(" ", "")
    if re.fullmatch(r"-?\d+", text):
        n = int(text)
        if ring.family is Family.IntegersModPrimePower:
            return n % ring.size
        return ring.neg(ring.from_int(-n)) if n < 0 else n % ring.size
    if ring.family is Family.IntegersModPrimePower:
        raise ParseError(f"bad scalar {text!r}")
    acc = 0
    for term in re.split(r"\+", text):
        m = re.fullmatch(r"(?:(\d+)\*?)?(t(?:\^(\d+))?)?", term)
        if not term or not m or not (m.group(1) or m.group(2)):
            raise ParseError(f"bad scalar term {term!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        k = (int(m.group(3)) if m.group(3) else 1) if m.group(2) else 0
        acc = ring.add(acc, ring.shift(coeff % ring.q, k))
    return acc


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        depth += (ch == "(") - (ch == ")")
        if ch == "+" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


def parse_poly(ring: Ring, text: str, var: str = "x") -> tuple[int, ...]:
    """Parse e.g. ``x^2+x+1`` or ``x^2+2*x+3`` with scalar coefficients."""
    text = text.replace(" ", "").replace("-", "+-")
    coeffs: dict[int, int] = {}
    for term in filter(None, _split_top_level(text)):
        m = re.fullmatch(rf"(?:(.*?)\*?)?{var}(?:\^(\d+))?", term)
        if m:
            cs = m.group(1)
            k = int(m.group(2)) if m.group(2) else 1
        else:
            cs, k = term, 0
        if cs in (None, ""):
            c = ring.one
        elif cs == "-":
            c = ring.neg(ring.one)
        else:
            c = parse_scalar(ring, cs.strip("()"))
        coeffs[k] = ring.add(coeffs.get(k, 0), c)
    if not coeffs:
        raise ParseError(f"bad polynomial {text!r}")
    return poly_trim(coeffs.get(k, 0) for k in range(max(coeffs) + 1))


def char_poly(ring: Ring, a) -> tuple[int, ...]:
    """det(x*1 - a) computed with polynomial entries (division free)."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[-1]
    entry = [[((ring.neg(int(a[i, j])),) + ((ring.one,) if i == j else ()))
              for j in range(n)] for i in range(n)]
    total: tuple[int, ...] = ()
    for perm in permutations(range(n)):
        term: tuple[int, ...] = (ring.one,)
        for i in range(n):
            term = poly_mul(ring, term, entry[i][perm[i]])
        total = poly_add(ring, total, term if _sign(perm) > 0 else poly_neg(ring, term))
    return total


def companion(ring: Ring, f) -> np.ndarray:
    """Companion matrix with char poly f (monic, lowest coefficient first)."""
    f = list(f)
    n = len(f) - 1
    c = np.zeros((n, n), dtype=np.int64)
    for i in range(1, n):
        c[i, i - 1] = ring.one
    for i in range(n):
        c[i, n - 1] = ring.neg(f[i])
    return c


# ---------------------------------------------------------------------------
# submodules of o_r^n in Howell form


def _row_combine(ring: Ring, row, c, other):
    """row - c * other."""
    return ring.sub_arr(row, ring.mul_arr(c, other))


def _howell_rows(ring: Ring, rows, n: int):
    q = ring.q
    work = [np.asarray(r, dtype=np.int64) for r in rows]
    work = [r for r in work if r.any()]
    out: list[tuple[int, int, np.ndarray]] = []
    for col in range(n):
        live = [r for r in work if r[col]]
        if not live:
            continue
        vals = [ring.valuation(int(r[col])) for r in live]
        k = int(np.argmin(vals))
        v = vals[k]
        piv = live[k]
        u = int(piv[col]) // q ** v
        piv = ring.mul_arr(ring.inv(u), piv)
        rest = []
        for r in work:
            if r is live[k]:
                continue
            if r[col]:
                r = _row_combine(ring, r, int(r[col]) // q ** v, piv)
            if r.any():
                rest.append(r)
        if v:
            ann = ring.mul_arr(ring.pi_power(ring.r - v), piv)
            if ann.any():
                rest.append(ann)
        work = rest
        out.append((col, v, piv))
    # reduce entries above each pivot to canonical representatives
    for i, (col, v, piv) in enumerate(out):
        for j in range(i):
            cj, vj, rj = out[j]
            c = int(rj[col]) // q ** v
            if c:
                out[j] = (cj, vj, _row_combine(ring, rj, c, piv))
    return out


@dataclass(frozen=True)
class ModuleBasis:
    """A submodule of o_r^n stored as its Howell basis."""

    ring: Ring = field(compare=False, repr=False)
    n: int
    rows: tuple[tuple[int, ...], ...]
    pivots: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return int(np.prod([self.ring.q ** (self.ring.r - v) for _, v in self.pivots], dtype=object)) \
            if self.pivots else 1

    @property
    def log_size(self) -> int:
        """log_q of the cardinality."""
        return sum(self.ring.r - v for _, v in self.pivots)

    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(len(self.rows), self.n)

    @cached_property
    def elementary_type(self) -> tuple[int, ...]:
        """Exponents a_1 >= a_2 >= ... with the module isomorphic to sum o/p^{a_i}."""
        ring = self.ring
        logs = [scale(self, k).log_size for k in range(ring.r + 1)]
        counts = [logs[k] - logs[k + 1] for k in range(ring.r)]  # #{a_i > k}
        out = []
        for k in range(ring.r - 1, -1, -1):
            exceed = counts[k] - (counts[k + 1] if k + 1 < ring.r else 0)
            out.extend([k + 1] * exceed)
        return tuple(out)

    @property
    def free_rank(self) -> int:
        return sum(1 for a in self.elementary_type if a == self.ring.r)

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64).copy()
        q = self.ring.q
        for (col, piv_v), row in zip(self.pivots, self.rows):
            x = int(v[col])
            if piv_v and x % q ** piv_v:
                return False
            if x:
                v = _row_combine(self.ring, v, x // q ** piv_v, np.array(row))
            if v[:col + 1].any():
                return False
        return not v.any()

    def contains_module(self, other: "ModuleBasis") -> bool:
        return all(self.contains(r) for r in other.rows)

    def elements(self, cap: int = 1 << 22) -> np.ndarray:
        """All members as an (size, n) array."""
        if self.size > cap:
            raise CapExceeded(f"module of size {self.size} exceeds cap {cap}")
        ring = self.ring
        acc = np.zeros((1, self.n), dtype=np.int64)
        for (col, v), row in zip(self.pivots, self.rows):
            coeffs = np.arange(ring.q ** (ring.r - v), dtype=np.int64)
            multiples = ring.mul_arr(coeffs[:, None], np.array(row)[None, :])
            acc = ring.add_arr(acc[:, None, :], multiples[None, :, :]).reshape(-1, self.n)
        return acc

    def __add__(self, other: "ModuleBasis") -> "ModuleBasis":
        return howell_basis(self.ring, list(self.rows) + list(other.rows), self.n)


def howell_basis(ring: Ring, vectors, n: int | None = None) -> ModuleBasis:
    vectors = [np.asarray(v, dtype=np.int64) for v in vectors]
    if n is None:
        if not vectors:
            raise ShapeMismatch("need n for an empty generating set")
        n = len(vectors[0])
    if any(len(v) != n for v in vectors):
        raise ShapeMismatch("vectors of different lengths")
    out = _howell_rows(ring, vectors, n)
    return ModuleBasis(ring, n, tuple(tuple(int(x) for x in row) for _, _, row in out),
                       tuple((c, v) for c, v, _ in out))


def scale(m: ModuleBasis, k: int) -> ModuleBasis:
    """pi^k M."""
    ring = m.ring
    c = ring.pi_power(k)
    return howell_basis(ring, [ring.mul_arr(c, np.array(r)) for r in m.rows], m.n)


def full_module(ring: Ring, n: int) -> ModuleBasis:
    return howell_basis(ring, list(identity(ring, n)), n)


def kernel(ring: Ring, a) -> ModuleBasis:
    """{x in o_r^m : x a = 0} for an m x n matrix a (row-vector convention)."""
    a = np.asarray(a, dtype=np.int64)
    m, n = a.shape
    aug = np.concatenate([a, identity(ring, m)], axis=1)
    rows = _howell_rows(ring, list(aug), n + m)
    return howell_basis(ring, [row[n:] for col, _, row in rows if col >= n], m)


def preimage(ring: Ring, a, target: ModuleBasis) -> ModuleBasis:
    """{x : x a in target}."""
    a = np.asarray(a, dtype=np.int64)
    m, n = a.shape
    tgt = target.array()
    top = np.concatenate([a, identity(ring, m)], axis=1)
    bottom = np.concatenate([tgt, np.zeros((len(tgt), m), dtype=np.int64)], axis=1)
    rows = _howell_rows(ring, list(top) + list(bottom), n + m)
    return howell_basis(ring, [row[n:] for col, _, row in rows if col >= n], m)


def intersect(a: ModuleBasis, b: ModuleBasis) -> ModuleBasis:
    """a ∩ b via the preimage of b under the inclusion of a's generators."""
    ring = a.ring
    if not a.rows:
        return a
    coeffs = preimage(ring, a.array(), b)
    return howell_basis(ring, [matmul(ring, np.array(c)[None, :], a.array())[0]
                               for c in coeffs.rows], a.n)


def product_module(ring: Ring, a: ModuleBasis, b: ModuleBasis, n: int) -> ModuleBasis:
    """Span of all products x y of flattened n x n matrices x in a, y in b."""
    if not a.rows or not b.rows:
        return howell_basis(ring, [], n * n)
    xs = a.array().reshape(-1, n, n)
    ys = b.array().reshape(-1, n, n)
    prods = matmul(ring, xs[:, None], ys[None, :]).reshape(-1, n * n)
    return howell_basis(ring, list(prods), n * n)


def act_module(ring: Ring, a: ModuleBasis, lattice: ModuleBasis, n: int) -> ModuleBasis:
    """Span of x v for x in a (flattened n x n matrices) and v in a lattice of o_r^n."""
    if not a.rows or not lattice.rows:
        return howell_basis(ring, [], n)
    xs = a.array().reshape(-1, n, n)
    vs = lattice.array()
    prods = matmul(ring, xs[:, None], vs[None, :, :, None])[..., 0].reshape(-1, n)
    return howell_basis(ring, list(prods), n)


# ---------------------------------------------------------------------------
# the Mat wrapper


class Mat:
    """An N x N matrix over o_r with operator overloading."""

    __slots__ = ("ring", "a")

    def __init__(self, ring: Ring, entries):
        if isinstance(entries, Mat):
            entries = entries.a
        a = np.array([[ring.coerce(x) for x in row] for row in entries], dtype=np.int64) \
            if not isinstance(entries, np.ndarray) else entries.astype(np.int64) % ring.size
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
        self.ring = ring
        self.a = a

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Mat":
        return cls(ring, identity(ring, n))

    @classmethod
    def zero(cls, ring: Ring, n: int) -> "Mat":
        return cls(ring, np.zeros((n, n), dtype=np.int64))

    @classmethod
    def diag(cls, ring: Ring, values) -> "Mat":
        return cls(ring, np.diag([ring.coerce(v) for v in values]))

    def _check(self, other: "Mat"):
        if not isinstance(other, Mat):
            raise TypeError(f"expected Mat, got {type(other).__name__}")
        if other.ring.spec != self.ring.spec or other.n != self.n:
            raise ShapeMismatch("matrices over different rings or sizes")

    def __add__(self, other):
        self._check(other)
        return Mat(self.ring, self.ring.add_arr(self.a, other.a))

    def __sub__(self, other):
        self._check(other)
        return Mat(self.ring, self.ring.sub_arr(self.a, other.a))

    def __neg__(self):
        return Mat(self.ring, self.ring.neg_arr(self.a))

    def __matmul__(self, other):
        self._check(other)
        return Mat(self.ring, matmul(self.ring, self.a, other.a))

    __mul__ = __matmul__

    def scalar(self, c) -> "Mat":
        return Mat(self.ring, self.ring.mul_arr(self.ring.coerce(c), self.a))

    def trace(self) -> RingElem:
        return RingElem(self.ring, int(trace(self.ring, self.a)))

    def det(self) -> RingElem:
        return RingElem(self.ring, int(det(self.ring, self.a)))

    def is_invertible(self) -> bool:
        return self.det().is_unit()

    def inv(self) -> "Mat":
        return Mat(self.ring, inverse(self.ring, self.a))

    def char_poly(self) -> tuple[int, ...]:
        return char_poly(self.ring, self.a)

    def reduce(self, i: int) -> "Mat":
        return Mat(self.ring.truncate(i), self.ring.reduce(self.a, i))

    def lift(self, ring: Ring) -> "Mat":
        """The same index matrix read in a longer ring of the same family."""
        return Mat(ring, self.a)

    def key(self) -> int:
        return int(pack(self.ring, self.a))

    def __eq__(self, other):
        return isinstance(other, Mat) and self.ring.spec == other.ring.spec \
            and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash((self.ring.spec, self.a.tobytes()))

    def __repr__(self):
        rows = ";".join(",".join(self.ring.format(int(x)) for x in row) for row in self.a)
        return f"[{rows}]"


def mat_arith(op: str, a: Mat, b: Mat | None = None) -> Mat:
    if op == "neg":
        return -a
    if b is None:
        raise ValueError(f"{op} needs two operands")
    return {"add": a.__add__, "sub": a.__sub__, "mul": a.__matmul__}[op](b)


def parse_matrix(ring: Ring, text: str) -> Mat:
    """Parse the literal ``[a,b;c,d]`` (row-major, rows separated by ';')."""
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ParseError(f"matrix literal must be bracketed: {text!r}")
    rows = [r.split(",") for r in body[1:-1].split(";")]
    if any(len(r) != len(rows) for r in rows):
        raise ParseError(f"matrix literal is not square: {text!r}")
    return Mat(ring, [[parse_scalar(ring, x.strip()) for x in r] for r in rows])


# ---------------------------------------------------------------------------
# centralizers, regularity, group orders


def commutator_map(ring: Ring, beta) -> np.ndarray:
    """Matrix of X -> X beta - beta X on flattened N x N matrices (row vectors)."""
    beta = np.asarray(beta, dtype=np.int64)
    n = beta.shape[0]
    basis = identity(ring, n * n).reshape(n * n, n, n)
    images = ring.sub_arr(matmul(ring, basis, beta), matmul(ring, beta, basis))
    return images.reshape(n * n, n * n)


def centralizer_module(beta: Mat, i: int | None = None) -> ModuleBasis:
    """The solution module of X beta_i = beta_i X over o_i."""
    ring = beta.ring
    if i is not None and i != ring.r:
        beta = beta.reduce(i)
        ring = beta.ring
    return kernel(ring, commutator_map(ring, beta.a))


def is_regular(beta: Mat, i: int | None = None) -> bool:
    """True iff the residue of beta has an N-dimensional centralizer over F_q."""
    res = beta.reduce(1)
    return centralizer_module(res).log_size == beta.n


def min_poly(beta: Mat) -> tuple[int, ...]:
    """Minimal polynomial over the residue field, by growing the power list."""
    res = beta.reduce(1)
    ring, n = res.ring, res.n
    powers = [identity(ring, n)]
    while True:
        powers.append(matmul(ring, powers[-1], res.a))
        ker = kernel(ring, np.array([p.reshape(-1) for p in powers]))
        if ker.rows:
            # the first dependency is unique up to scaling; make it monic
            vec = poly_trim(ker.rows[0])
            c = ring.inv(vec[-1])
            return tuple(ring.mul(c, x) for x in vec)


def unit_group_order(ring: Ring, n: int) -> int:
    q, r = ring.q, ring.r
    order = q ** (n * n * (r - 1))
    for i in range(n):
        order *= q ** n - q ** i
    return order


def all_matrices(ring: Ring, n: int, cap: int = 1 << 22) -> np.ndarray:
    total = ring.size ** (n * n)
    if total > cap:
        raise CapExceeded(f"{total} matrices exceed cap {cap}")
    return unpack(ring, np.arange(total, dtype=np.int64), n)


def enumerate_gl(ring: Ring, n: int, cap: int = 1 << 22) -> np.ndarray:
    """All of GL_N(o_r), sorted by packed key.

    Built as lifts of GL_N(F_q) times the congruence kernel, so the cost is
    proportional to the group order rather than to |M_N(o_r)|.
    """
    order = unit_group_order(ring, n)
    if order > cap:
        raise CapExceeded(f"|GL_{n}| = {order} exceeds cap {cap}")
    res = ring.residue_field
    base = all_matrices(res, n, cap=max(cap, res.size ** (n * n)))
    base = base[res.inv_table[det(res, base)] >= 0]
    if ring.r == 1:
        out = base
    else:
        # every matrix with unit residue determinant is invertible; add
        # pi * (arbitrary matrix over o_{r-1}) to each residue lift
        small = ring.truncate(ring.r - 1)
        tails = ring.mul_arr(ring.pi, all_matrices(small, n, cap=cap))
        out = ring.add_arr(base[:, None], tails[None, :]).reshape(-1, n, n)
    keys = pack(ring, out)
    order_idx = np.argsort(keys)
    return out[order_idx]


def trace_form_pairing(ring: Ring, xs, ys) -> np.ndarray:
    """tr(x y) for all pairs of flattened matrices (used for duality checks)."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    n = int(round(np.sqrt(xs.shape[-1])))
    return trace(ring, matmul(ring, xs.reshape(-1, 1, n, n), ys.reshape(1, -1, n, n)))


def matrix_from_flat(ring: Ring, v, n: int) -> Mat:
    return Mat(ring, np.asarray(v, dtype=np.int64).reshape(n, n))
