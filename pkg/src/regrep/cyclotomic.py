"""Exact arithmetic in the cyclotomic integers Z[zeta_m].

Values are stored as integer coefficient vectors in the power basis
1, zeta, ..., zeta^(phi(m)-1).  Vectorised helpers operate on arrays whose
last axis holds those coefficients, which is how class functions keep their
values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def lcm(*args: int) -> int:
    out = 1
    for a in args:
        out = out * a // gcd(out, a)
    return out


def primitive_root(p: int) -> int:
    fs = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in fs):
            return g
    return 1


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the m-th cyclotomic polynomial."""
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        q[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    assert not any(a), "non-exact division"
    return q


def totient(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


def reduce_coeffs(vals: np.ndarray, m: int) -> np.ndarray:
    """Reduce coefficient vectors of any length modulo Phi_m.

    ``vals`` has the exponent on its last axis; returns an int64 array of
    last-axis length phi(m).
    """
    phi_poly = np.array(cyclotomic_poly(m), dtype=np.int64)
    phi = len(phi_poly) - 1
    v = np.array(vals, dtype=np.int64, copy=True)
    if v.shape[-1] < phi:
        pad = [(0, 0)] * (v.ndim - 1) + [(0, phi - v.shape[-1])]
        return np.pad(v, pad)
    for deg in range(v.shape[-1] - 1, phi - 1, -1):
        c = v[..., deg].copy()
        if not c.any():
            continue
        v[..., deg - phi:deg + 1] -= c[..., None] * phi_poly
    return np.ascontiguousarray(v[..., :phi])


def roots_of_unity(exps: np.ndarray, m: int) -> np.ndarray:
    """Coefficient arrays of zeta_m^e for an integer array of exponents."""
    exps = np.asarray(exps, dtype=np.int64) % m
    full = np.zeros(exps.shape + (m,), dtype=np.int64)
    np.put_along_axis(full, exps[..., None], 1, axis=-1)
    return reduce_coeffs(full, m)


def pad_full(vals: np.ndarray, m: int) -> np.ndarray:
    phi = vals.shape[-1]
    pad = [(0, 0)] * (vals.ndim - 1) + [(0, m - phi)]
    return np.pad(vals, pad)


def multiply(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Elementwise product of two coefficient arrays (broadcasting)."""
    fa = pad_full(np.asarray(a, dtype=np.int64), m)
    fb = pad_full(np.asarray(b, dtype=np.int64), m)
    out = np.zeros(np.broadcast_shapes(fa.shape, fb.shape), dtype=np.int64)
    for s in range(m):
        cs = fa[..., s:s + 1]
        if not cs.any():
            continue
        out = out + cs * np.roll(fb, s, axis=-1)
    return reduce_coeffs(out, m)


def conjugate(a: np.ndarray, m: int) -> np.ndarray:
    """Complex conjugation zeta -> zeta^-1."""
    full = pad_full(np.asarray(a, dtype=np.int64), m)
    idx = (-np.arange(m)) % m
    return reduce_coeffs(full[..., idx], m)


def weighted_hermitian_sum(a: np.ndarray, b: np.ndarray, weights: np.ndarray,
                           m: int) -> np.ndarray:
    """sum_i w_i a_i conj(b_i) over the leading axis, as reduced coefficients."""
    fa = pad_full(np.asarray(a, dtype=np.int64), m)
    fb = pad_full(np.asarray(b, dtype=np.int64), m)
    w = np.asarray(weights, dtype=np.int64)[:, None]
    # gram[s, u] = sum_i w_i a_i[s] b_i[u]; zeta^s * zeta^-u lands on s - u
    gram = (w * fa).T @ fb
    s_idx, u_idx = np.indices((m, m))
    out = np.zeros(m, dtype=np.int64)
    np.add.at(out, ((s_idx - u_idx) % m).ravel(), gram.ravel())
    return reduce_coeffs(out, m)


def lift_modulus(vals: np.ndarray, m: int, new_m: int) -> np.ndarray:
    """Re-express values of Z[zeta_m] inside Z[zeta_new_m] (m | new_m)."""
    if new_m == m:
        return np.asarray(vals, dtype=np.int64)
    if new_m % m:
        raise ValueError(f"{m} does not divide {new_m}")
    step = new_m // m
    vals = np.asarray(vals, dtype=np.int64)
    full = np.zeros(vals.shape[:-1] + (new_m,), dtype=np.int64)
    full[..., : vals.shape[-1] * step: step] = vals
    return reduce_coeffs(full, new_m)


@dataclass(frozen=True)
class CyclotomicValue:
    """An element of Z[zeta_m] in canonical power-basis form."""

    m: int
    coeffs: tuple[int, ...]

    @classmethod
    def from_array(cls, m: int, arr) -> "CyclotomicValue":
        red = reduce_coeffs(np.asarray(arr, dtype=np.int64), m)
        return cls(m, tuple(int(c) for c in red))

    @classmethod
    def integer(cls, n: int, m: int = 1) -> "CyclotomicValue":
        return cls.from_array(m, [n])

    @classmethod
    def root_of_unity(cls, e: int, m: int) -> "CyclotomicValue":
        return cls(m, tuple(int(c) for c in roots_of_unity(np.array(e), m)))

    def _common(self, other):
        if isinstance(other, int):
            other = CyclotomicValue.integer(other, self.m)
        n = lcm(self.m, other.m)
        return n, lift_modulus(np.array(self.coeffs), self.m, n), \
            lift_modulus(np.array(other.coeffs), other.m, n)

    def __add__(self, other):
        n, a, b = self._common(other)
        return CyclotomicValue(n, tuple(int(c) for c in a + b))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicValue(self.m, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other if not isinstance(other, int) else -other)

    def __mul__(self, other):
        n, a, b = self._common(other)
        return CyclotomicValue(n, tuple(int(c) for c in multiply(a, b, n)))

    __rmul__ = __mul__

    def conj(self) -> "CyclotomicValue":
        return CyclotomicValue(self.m, tuple(int(c) for c in conjugate(np.array(self.coeffs), self.m)))

    def __eq__(self, other):
        if isinstance(other, int):
            other = CyclotomicValue.integer(other, self.m)
        if not isinstance(other, CyclotomicValue):
            return NotImplemented
        _, a, b = self._common(other)
        return bool(np.array_equal(a, b))

    def __hash__(self):
        # equal values may carry different moduli; hash a rounded embedding
        z = self.to_complex()
        return hash((round(z.real, 6), round(z.imag, 6)))

    def is_integer(self) -> bool:
        return not any(self.coeffs[1:])

    def __int__(self):
        if not self.is_integer():
            raise ValueError(f"{self} is not a rational integer")
        return self.coeffs[0] if self.coeffs else 0

    def to_complex(self) -> complex:
        z = np.exp(2j * np.pi / self.m)
        return complex(sum(c * z ** k for k, c in enumerate(self.coeffs)))

    def __repr__(self):
        terms = [f"{c}*z{self.m}^{k}" if k else str(c)
                 for k, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"


class ModularImage:
    """Ring map Z[zeta_m] -> F_ell sending zeta_m to a fixed element of order m.

    Integers of absolute value below ``bound`` are recovered exactly from
    their image, which is how bulk multiplicities are computed.
    """

    def __init__(self, m: int, bound: int):
        ell = (2 * bound // m + 1) * m + 1
        while not is_prime(ell):
            ell += m
        self.m = m
        self.ell = ell
        g = primitive_root(ell)
        self.zeta = pow(g, (ell - 1) // m, ell)
        self.powers = np.array([pow(self.zeta, s, ell) for s in range(m)], dtype=np.int64)

    def image(self, vals: np.ndarray) -> np.ndarray:
        vals = np.asarray(vals, dtype=np.int64) % self.ell
        phi = vals.shape[-1]
        return (vals * self.powers[:phi] % self.ell).sum(axis=-1) % self.ell

    def conj_image(self, vals: np.ndarray) -> np.ndarray:
        """Image of the complex conjugate (zeta -> zeta^-1)."""
        vals = np.asarray(vals, dtype=np.int64) % self.ell
        phi = vals.shape[-1]
        inv_powers = self.powers[(-np.arange(phi)) % self.m]
        return (vals * inv_powers % self.ell).sum(axis=-1) % self.ell

    def root_image(self, exps: np.ndarray) -> np.ndarray:
        return self.powers[np.asarray(exps, dtype=np.int64) % self.m]

    def lift_int(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64) % self.ell
        return np.where(x > self.ell // 2, x - self.ell, x)
