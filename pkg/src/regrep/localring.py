"""Finite local principal ideal rings o_r = Z/p^r and F_q[t]/t^r.

Every element is identified with an integer index in [0, q^r).  For Z/p^r the
index is the residue itself; for F_q[t]/t^r it is sum_k c_k q^k where c_k is
the index of the t^k coefficient in F_q = F_p[u]/(h), itself written in base
p.  With this encoding, in both families

* reduction o_r -> o_i is ``x % q**i``,
* the valuation is the largest k with q^k | x,
* multiplication by the uniformizer is ``x * q % q**r``.

Vectorised arithmetic on numpy index arrays is used by the matrix code.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product

import numpy as np

from .cyclotomic import CyclotomicValue, is_prime
from .errors import BadDegree, BadLevel, NonPrimeP, NotAUnit, ParseError, SpecMismatch

TABLE_LIMIT = 4096


class Family(enum.Enum):
    IntegersModPrimePower = "Zp"
    TruncatedPolynomial = "Fqt"


@dataclass(frozen=True)
class RingSpec:
    family: Family
    p: int
    f: int = 1
    r: int = 1

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def size(self) -> int:
        return self.q ** self.r

    def __str__(self):
        if self.family is Family.IntegersModPrimePower:
            return f"Zp:p={self.p},r={self.r}"
        return f"Fqt:p={self.p},f={self.f},r={self.r}"


def parse_ring_spec(text: str) -> RingSpec:
    """Parse ``Zp:p=2,r=3`` or ``Fqt:p=2,f=1,r=3``."""
    m = re.fullmatch(r"\s*(Zp|Fqt)\s*:\s*(.*)", text)
    if not m:
        raise ParseError(f"bad ring spec {text!r}")
    fields = {}
    for part in m.group(2).split(","):
        key, _, val = part.partition("=")
        if not val.strip().lstrip("-").isdigit():
            raise ParseError(f"bad ring spec field {part!r}")
        fields[key.strip()] = int(val)
    family = Family(m.group(1))
    allowed = {"p", "r"} if family is Family.IntegersModPrimePower else {"p", "f", "r"}
    if set(fields) - allowed or not {"p", "r"} <= set(fields):
        raise ParseError(f"bad ring spec fields in {text!r}")
    return RingSpec(family, fields["p"], fields.get("f", 1), fields["r"])


def _poly_mulmod(a, b, h, p):
    """Product of F_p polynomials a*b mod monic h (coefficient lists, low first)."""
    f = len(h) - 1
    prod_ = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod_[i + j] = (prod_[i + j] + x * y) % p
    for d in range(len(prod_) - 1, f - 1, -1):
        c = prod_[d]
        if c:
            for k in range(f + 1):
                prod_[d - f + k] = (prod_[d - f + k] - c * h[k]) % p
    return (prod_ + [0] * f)[:f]


def _is_irreducible_fp(h, p):
    f = len(h) - 1
    for d in range(1, f // 2 + 1):
        for tail in product(range(p), repeat=d):
            g = list(tail) + [1]
            rem = list(h)
            for i in range(len(rem) - len(g), -1, -1):
                c = rem[i + d]
                if c:
                    for k in range(d + 1):
                        rem[i + k] = (rem[i + k] - c * g[k]) % p
            if not any(rem[:d]):
                return False
    return True


@lru_cache(maxsize=None)
def residue_modulus(p: int, f: int) -> tuple[int, ...]:
    """Least monic irreducible of degree f over F_p, ordered by sum c_i p^i."""
    if f == 1:
        return (0, 1)
    for n in range(p ** f):
        h = [(n // p ** i) % p for i in range(f)] + [1]
        if h[0] and _is_irreducible_fp(h, p):
            return tuple(h)
    raise BadDegree(f"no irreducible of degree {f} over F_{p}")


class Ring:
    """Arithmetic context for o_r; use :func:`make_ring` to obtain one."""

    def __init__(self, spec: RingSpec):
        if spec.p < 2 or not is_prime(spec.p):
            raise NonPrimeP(f"p={spec.p} is not prime")
        if spec.f < 1 or (spec.family is Family.IntegersModPrimePower and spec.f != 1):
            raise BadDegree(f"bad extension degree f={spec.f} for {spec.family.value}")
        if spec.r < 1:
            raise BadLevel(f"length r={spec.r} must be >= 1")
        self.spec = spec
        self.family = spec.family
        self.p, self.f, self.r = spec.p, spec.f, spec.r
        self.q = spec.q
        self.size = spec.size
        self.modulus = residue_modulus(self.p, self.f)
        if self.family is Family.TruncatedPolynomial:
            if self.size > TABLE_LIMIT:
                raise BadDegree(f"F_q[t]/t^r of size {self.size} exceeds table limit")
            self._build_tables()

    # -- construction -----------------------------------------------------
    def _build_tables(self):
        p, f, q, r, n = self.p, self.f, self.q, self.r, self.size
        fdig = np.array([[(c // p ** i) % p for i in range(f)] for c in range(q)])
        weights = p ** np.arange(f)
        fadd = ((fdig[:, None, :] + fdig[None, :, :]) % p) @ weights
        fmul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                fmul[a, b] = sum(c * p ** i for i, c in
                                 enumerate(_poly_mulmod(list(fdig[a]), list(fdig[b]), self.modulus, p)))
        self.fadd, self.fmul = fadd.astype(np.int64), fmul
        digits = np.array([[(x // q ** k) % q for k in range(r)] for x in range(n)])
        self.digits = digits
        qw = q ** np.arange(r)
        add_dig = fadd[digits[:, None, :], digits[None, :, :]]
        self.add_table = (add_dig @ qw).astype(np.int64)
        neg_f = np.array([int(((-fdig[c]) % p) @ weights) for c in range(q)])
        self.neg_table = (neg_f[digits] @ qw).astype(np.int64)
        mul = np.zeros((n, n, r), dtype=np.int64)
        for i in range(r):
            for j in range(r - i):
                term = fmul[digits[:, None, i], digits[None, :, j]]
                mul[:, :, i + j] = fadd[mul[:, :, i + j], term]
        self.mul_table = (mul @ qw).astype(np.int64)
        # Frobenius trace F_q -> F_p
        tr = np.zeros(q, dtype=np.int64)
        for c in range(q):
            acc, x = 0, c
            for _ in range(f):
                acc = fadd[acc, x]
                y = 1
                for _ in range(p):
                    y = fmul[y, x]
                x = y
            tr[c] = acc
        assert (tr < p).all()
        self.field_trace = tr

    # -- tables -----------------------------------------------------------
    @cached_property
    def inv_table(self) -> np.ndarray:
        """inv_table[x] is the inverse of a unit x and -1 for non-units."""
        n = self.size
        out = -np.ones(n, dtype=np.int64)
        if self.family is Family.IntegersModPrimePower:
            for x in range(n):
                if x % self.p:
                    out[x] = pow(x, -1, n)
        else:
            hits = self.mul_table == 1
            units = hits.any(axis=1)
            out[units] = hits[units].argmax(axis=1)
        return out

    @cached_property
    def val_table(self) -> np.ndarray:
        x = np.arange(self.size)
        v = np.zeros(self.size, dtype=np.int64)
        for k in range(1, self.r + 1):
            v[x % self.q ** k == 0] = k
        return v

    @cached_property
    def psi_table(self) -> np.ndarray:
        """Exponent e with psi(pi^-r a) = zeta_{psi_modulus}^e."""
        x = np.arange(self.size)
        if self.family is Family.IntegersModPrimePower:
            return x.astype(np.int64)
        top = x // self.q ** (self.r - 1)
        return self.field_trace[top]

    @property
    def psi_modulus(self) -> int:
        return self.size if self.family is Family.IntegersModPrimePower else self.p

    # -- scalar arithmetic ------------------------------------------------
    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1 % self.size

    @property
    def pi(self) -> int:
        return self.q % self.size

    def add(self, a: int, b: int) -> int:
        if self.family is Family.IntegersModPrimePower:
            return (a + b) % self.size
        return int(self.add_table[a, b])

    def neg(self, a: int) -> int:
        if self.family is Family.IntegersModPrimePower:
            return (-a) % self.size
        return int(self.neg_table[a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.family is Family.IntegersModPrimePower:
            return (a * b) % self.size
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        y = int(self.inv_table[a])
        if y < 0:
            raise NotAUnit(f"{self.format(a)} has valuation {self.valuation(a)}")
        return y

    def is_unit(self, a: int) -> bool:
        return self.valuation(a) == 0

    def valuation(self, a: int) -> int:
        return int(self.val_table[a])

    def pi_power(self, k: int) -> int:
        """Index of pi^k (0 when k >= r)."""
        return self.q ** k if k < self.r else 0

    def shift(self, a: int, k: int) -> int:
        """pi^k * a."""
        return (a * self.q ** k) % self.size if k < self.r else 0

    def unshift(self, a: int, k: int) -> int:
        """A representative of a / pi^k (requires valuation(a) >= k)."""
        return a // self.q ** k

    def digit(self, a: int, k: int) -> int:
        """The residue-field coefficient of pi^k in the canonical expansion."""
        return (a // self.q ** k) % self.q

    def reduce(self, a, i: int):
        if not 1 <= i <= self.r:
            raise BadLevel(f"level {i} outside [1, {self.r}]")
        return a % self.q ** i

    def truncate(self, i: int) -> "Ring":
        if not 1 <= i <= self.r:
            raise BadLevel(f"level {i} outside [1, {self.r}]")
        return make_ring(RingSpec(self.family, self.p, self.f, i))

    @property
    def residue_field(self) -> "Ring":
        return self.truncate(1)

    def psi_exponent(self, a: int) -> int:
        return int(self.psi_table[a])

    def psi_fractional(self, a: int) -> CyclotomicValue:
        """psi(pi^-r a) as an exact root of unity."""
        return CyclotomicValue.root_of_unity(self.psi_exponent(a), self.psi_modulus)

    def from_int(self, n: int) -> int:
        """Image of the integer n (the prime field element n for F_q[t]/t^r)."""
        if self.family is Family.IntegersModPrimePower:
            return n % self.size
        return n % self.p

    # -- vectorised arithmetic --------------------------------------------
    def add_arr(self, a, b):
        if self.family is Family.IntegersModPrimePower:
            return (np.asarray(a) + np.asarray(b)) % self.size
        return self.add_table[a, b]

    def neg_arr(self, a):
        if self.family is Family.IntegersModPrimePower:
            return (-np.asarray(a)) % self.size
        return self.neg_table[a]

    def sub_arr(self, a, b):
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a, b):
        if self.family is Family.IntegersModPrimePower:
            return (np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)) % self.size
        return self.mul_table[a, b]

    def sum_arr(self, a, axis):
        """Ring sum along an axis."""
        a = np.asarray(a)
        if self.family is Family.IntegersModPrimePower:
            return a.sum(axis=axis) % self.size
        a = np.moveaxis(a, axis, 0)
        acc = a[0]
        for x in a[1:]:
            acc = self.add_table[acc, x]
        return acc

    # -- display ----------------------------------------------------------
    def format(self, a: int) -> str:
        if self.family is Family.IntegersModPrimePower:
            return str(a)
        terms = []
        for k in range(self.r):
            c = self.digit(a, k)
            if not c:
                continue
            cs = self._format_field(c)
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if not mono:
                terms.append(cs)
            elif cs == "1":
                terms.append(mono)
            else:
                terms.append(f"{cs}*{mono}" if self.f == 1 else f"({cs})*{mono}")
        return "+".join(terms) if terms else "0"

    def _format_field(self, c: int) -> str:
        if self.f == 1:
            return str(c)
        parts = []
        for i in range(self.f):
            d = (c // self.p ** i) % self.p
            if d:
                mono = "" if i == 0 else ("u" if i == 1 else f"u^{i}")
                parts.append(str(d) if not mono else (mono if d == 1 else f"{d}{mono}"))
        return "+".join(parts)

    def elem(self, value) -> "RingElem":
        return RingElem(self, self.coerce(value))

    def coerce(self, value) -> int:
        """Accept an index, or for F_q[t]/t^r a list of t-coefficients."""
        if isinstance(value, RingElem):
            if value.ring is not self:
                raise SpecMismatch("element belongs to another ring")
            return value.value
        if isinstance(value, (list, tuple)):
            if len(value) > self.r:
                value = value[: self.r]
            return sum(int(c) % self.q * self.q ** k for k, c in enumerate(value))
        return int(value) % self.size

    def __repr__(self):
        return f"Ring({self.spec})"


@lru_cache(maxsize=None)
def make_ring(spec: RingSpec) -> Ring:
    return Ring(spec)


@dataclass(frozen=True)
class RingElem:
    """An element of o_r with operator overloading (scalar convenience API)."""

    ring: Ring
    value: int

    def _check(self, other) -> "RingElem":
        if isinstance(other, int):
            return RingElem(self.ring, self.ring.from_int(other))
        if not isinstance(other, RingElem) or other.ring.spec != self.ring.spec:
            raise SpecMismatch("operands live in different rings")
        return other

    def __add__(self, other):
        o = self._check(other)
        return RingElem(self.ring, self.ring.add(self.value, o.value))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._check(other)
        return RingElem(self.ring, self.ring.sub(self.value, o.value))

    def __neg__(self):
        return RingElem(self.ring, self.ring.neg(self.value))

    def __mul__(self, other):
        o = self._check(other)
        return RingElem(self.ring, self.ring.mul(self.value, o.value))

    __rmul__ = __mul__

    def inv(self) -> "RingElem":
        return RingElem(self.ring, self.ring.inv(self.value))

    def valuation(self) -> int:
        return self.ring.valuation(self.value)

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def reduce(self, i: int) -> "RingElem":
        return RingElem(self.ring.truncate(i), self.ring.reduce(self.value, i))

    def psi(self) -> CyclotomicValue:
        return self.ring.psi_fractional(self.value)

    def __eq__(self, other):
        if isinstance(other, int):
            other = RingElem(self.ring, self.ring.from_int(other))
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.ring.spec == other.ring.spec and self.value == other.value

    def __hash__(self):
        return hash((self.ring.spec, self.value))

    def __repr__(self):
        return self.ring.format(self.value)


def ring_arith(op: str, x: RingElem, y: RingElem | None = None) -> RingElem:
    """Dispatch ``add``/``mul``/``neg``/``sub`` on ring elements."""
    if op == "neg":
        return -x
    if y is None:
        raise ValueError(f"{op} needs two operands")
    if x.ring.spec != y.ring.spec:
        raise SpecMismatch("operands live in different rings")
    return {"add": x.__add__, "mul": x.__mul__, "sub": x.__sub__}[op](y)
