"""Arithmetic in F_q (q prime) and its extension F_{q^m}.

Elements of F_{q^m} are handled as coordinate vectors on the polynomial
basis 1, alpha, ..., alpha^(m-1), where alpha is the class of the
indeterminate modulo a fixed monic irreducible polynomial.  Array-level
methods on :class:`FieldContext` accept numpy arrays whose last axis has
length m and broadcast over the leading axes; :class:`FieldElement` is a
thin scalar wrapper with operator overloads.
"""

from __future__ import annotations

import functools
import string
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from bdlrpc.exceptions import ParameterError

__all__ = [
    "FieldContext",
    "FieldElement",
    "field_make",
    "is_prime",
    "is_irreducible",
    "is_irreducible_trial_division",
]

# q*q*m must stay well inside int64 during a single accumulation.
MAX_Q = 1 << 16
MAX_M = 1024

_DIGITS = string.digits + string.ascii_lowercase


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    i = 3
    while i * i <= q:
        if q % i == 0:
            return False
        i += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# Dense polynomials over F_q as lists, lowest degree first.


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_sub(a: list[int], b: list[int], q: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % q for i in range(n)]
    return _trim(out)


def _poly_mul(a: list[int], b: list[int], q: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % q for c in out])


def _poly_divmod(a: list[int], f: list[int], q: int) -> tuple[list[int], list[int]]:
    a = _trim(list(a))
    f = _trim(list(f))
    if not f:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = pow(f[-1], q - 2, q)
    quot = [0] * max(len(a) - len(f) + 1, 0)
    while len(a) >= len(f):
        c = a[-1] * lead_inv % q
        shift = len(a) - len(f)
        quot[shift] = c
        for i, y in enumerate(f):
            a[shift + i] = (a[shift + i] - c * y) % q
        _trim(a)
    return _trim(quot), a


def _poly_mod(a: list[int], f: list[int], q: int) -> list[int]:
    return _poly_divmod(a, f, q)[1]


def _poly_gcd(a: list[int], b: list[int], q: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, q)
    return a


def _x_pow_mod(e: int, f: list[int], q: int) -> list[int]:
    result, base = [1], _poly_mod([0, 1], f, q)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, q), f, q)
        base = _poly_mod(_poly_mul(base, base, q), f, q)
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], q: int) -> bool:
    """Rabin's irreducibility test for a polynomial over F_q (lowest degree first)."""
    f = _trim([c % q for c in f])
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    if _poly_sub(_x_pow_mod(q**m, f, q), x, q):
        return False
    for p in _prime_factors(m):
        h = _poly_sub(_x_pow_mod(q ** (m // p), f, q), x, q)
        if len(_poly_gcd(f, h, q)) != 1:
            return False
    return True


def is_irreducible_trial_division(f: Sequence[int], q: int) -> bool:
    """Irreducibility by dividing out every monic polynomial of degree <= deg(f)/2.

    Exponential in deg(f); meant as an independent oracle for small fields.
    """
    f = _trim([c % q for c in f])
    m = len(f) - 1
    if m < 1:
        return False
    for deg in range(1, m // 2 + 1):
        for low in range(q**deg):
            g = [(low // q**i) % q for i in range(deg)] + [1]
            if not _poly_mod(f, g, q):
                return False
    return True


def _smallest_irreducible(q: int, m: int) -> tuple[int, ...]:
    # Candidates ordered by the integer sum(c_i q^i) over the non-leading
    # coefficients, i.e. compared from the highest degree down. The constant
    # term is kept nonzero so that alpha is invertible (matters only for m=1).
    for low in range(q**m):
        coeffs = [(low // q**i) % q for i in range(m)]
        if coeffs[0] == 0:
            continue
        f = coeffs + [1]
        if is_irreducible(f, q):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class FieldContext:
    """The tower F_q < F_{q^m} with alpha a root of ``modulus``.

    ``modulus`` holds the m+1 coefficients of a monic irreducible polynomial,
    lowest degree first.
    """

    q: int
    m: int
    modulus: tuple[int, ...]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if not isinstance(self.q, (int, np.integer)) or not is_prime(int(self.q)):
            raise ParameterError(f"q must be prime, got {self.q!r}")
        if self.q >= MAX_Q:
            raise ParameterError(f"q must be < {MAX_Q}")
        if not isinstance(self.m, (int, np.integer)) or self.m < 1 or self.m > MAX_M:
            raise ParameterError(f"m must be an integer in [1, {MAX_M}], got {self.m!r}")
        mod = tuple(int(c) % self.q for c in self.modulus)
        object.__setattr__(self, "modulus", mod)
        if len(mod) != self.m + 1 or mod[-1] != 1:
            raise ParameterError("modulus must be monic of degree m")
        if mod[0] == 0:
            raise ParameterError("modulus must have a nonzero constant term")
        if not is_irreducible(mod, self.q):
            raise ParameterError(f"modulus {mod} is reducible over F_{self.q}")

    def __getstate__(self):
        return {"q": self.q, "m": self.m, "modulus": self.modulus}

    def __setstate__(self, state):
        object.__setattr__(self, "q", state["q"])
        object.__setattr__(self, "m", state["m"])
        object.__setattr__(self, "modulus", state["modulus"])
        object.__setattr__(self, "_cache", {})

    # -- basic vectors ------------------------------------------------------

    @property
    def order(self) -> int:
        return self.q**self.m

    def zero(self) -> np.ndarray:
        return np.zeros(self.m, dtype=np.int64)

    def one(self) -> np.ndarray:
        v = self.zero()
        v[0] = 1
        return v

    @property
    def alpha(self) -> np.ndarray:
        """Coordinates of alpha (for m = 1, alpha = -modulus[0])."""
        if self.m == 1:
            return np.array([(-self.modulus[0]) % self.q], dtype=np.int64)
        v = self.zero()
        v[1] = 1
        return v

    @property
    def _reduction(self) -> np.ndarray:
        # alpha^m = -(f_0 + f_1 alpha + ... + f_{m-1} alpha^{m-1})
        if "red" not in self._cache:
            self._cache["red"] = np.array([(-c) % self.q for c in self.modulus[:-1]], dtype=np.int64)
        return self._cache["red"]

    def asarray(self, a) -> np.ndarray:
        if isinstance(a, FieldElement):
            self._check(a)
            return np.array(a.coords, dtype=np.int64)
        arr = np.asarray(a, dtype=np.int64)
        if arr.shape[-1:] != (self.m,):
            raise ParameterError(f"expected trailing axis of length {self.m}, got shape {arr.shape}")
        return arr % self.q

    def _check(self, a: FieldElement) -> None:
        if a.ctx != self:
            raise ParameterError("element belongs to a different field context")

    # -- array arithmetic ---------------------------------------------------

    def add(self, a, b) -> np.ndarray:
        return (self.asarray(a) + self.asarray(b)) % self.q

    def sub(self, a, b) -> np.ndarray:
        return (self.asarray(a) - self.asarray(b)) % self.q

    def times_alpha(self, x) -> np.ndarray:
        x = self.asarray(x)
        if self.m == 1:
            return x * self.alpha[0] % self.q
        top = x[..., -1:]
        out = np.concatenate([np.zeros_like(top), x[..., :-1]], axis=-1)
        return (out + top * self._reduction) % self.q

    def mul_matrix(self, c) -> np.ndarray:
        """Matrix of x -> c*x acting on row vectors: coords(x*c) = coords(x) @ M.

        Row i of M is coords(alpha^i * c). Broadcasts over leading axes of c.
        """
        c = self.asarray(c)
        rows = [c]
        for _ in range(self.m - 1):
            rows.append(self.times_alpha(rows[-1]))
        return np.stack(rows, axis=-2)

    def mul(self, a, b) -> np.ndarray:
        a = self.asarray(a)
        mb = self.mul_matrix(b)
        return np.einsum("...i,...ij->...j", a, mb) % self.q

    def inv(self, a) -> np.ndarray:
        """Inverse of a single element via the extended Euclidean algorithm."""
        a = self.asarray(a)
        if a.ndim != 1:
            return np.stack([self.inv(x) for x in a.reshape(-1, self.m)]).reshape(a.shape)
        q = self.q
        r0, r1 = list(self.modulus), _trim([int(c) for c in a])
        if not r1:
            raise ZeroDivisionError("inverse of zero in F_{q^m}")
        s0, s1 = [], [1]
        while r1:
            quot, rem = _poly_divmod(r0, r1, q)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quot, s1, q), q)
        # r0 is a nonzero constant
        c = pow(r0[0], q - 2, q)
        out = self.zero()
        s0 = _poly_mod(s0, list(self.modulus), q)
        for i, v in enumerate(s0):
            out[i] = v * c % q
        return out

    def pow(self, a, e: int) -> np.ndarray:
        a = self.asarray(a)
        if e < 0:
            a, e = self.inv(a), -e
        result = np.broadcast_to(self.one(), a.shape).copy()
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def alpha_power(self, i: int) -> np.ndarray:
        key = ("apow", i)
        if key not in self._cache:
            self._cache[key] = self.pow(self.alpha, i)
        return self._cache[key].copy()

    def random(self, rng: np.random.Generator, shape: tuple[int, ...] = ()) -> np.ndarray:
        return rng.integers(0, self.q, size=(*shape, self.m), dtype=np.int64)

    # -- element helpers ----------------------------------------------------

    def element(self, coords) -> FieldElement:
        return FieldElement.from_coords(self, coords)

    def format(self, a) -> str:
        """Little-endian digit string, e.g. "101" = 1 + alpha^2 for q=2, m=3."""
        if self.q > len(_DIGITS):
            raise ParameterError("textual format supports q <= 36")
        return "".join(_DIGITS[int(c)] for c in self.asarray(a))

    def parse(self, text: str) -> np.ndarray:
        if len(text) != self.m:
            raise ParameterError(f"expected {self.m} digits, got {len(text)}")
        try:
            vals = [_DIGITS.index(ch) for ch in text.lower()]
        except ValueError as exc:
            raise ParameterError(f"bad digit in {text!r}") from exc
        if any(v >= self.q for v in vals):
            raise ParameterError(f"digit out of range for q={self.q} in {text!r}")
        return np.array(vals, dtype=np.int64)


@functools.lru_cache(maxsize=None)
def field_make(q: int, m: int) -> FieldContext:
    """Build F_{q^m} over the smallest monic irreducible polynomial of degree m.

    Polynomials are ordered by the integer sum(c_i q^i) of their non-leading
    coefficients, so for q=2, m=3 the modulus is x^3 + x + 1.
    """
    if not isinstance(q, (int, np.integer)) or not is_prime(int(q)):
        raise ParameterError(f"q must be prime, got {q!r}")
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ParameterError(f"m must be a positive integer, got {m!r}")
    return FieldContext(int(q), int(m), _smallest_irreducible(int(q), int(m)))


@dataclass(frozen=True)
class FieldElement:
    """A single element of F_{q^m}; supports + - * / ** and comparison."""

    ctx: FieldContext
    coords: tuple[int, ...]

    @classmethod
    def from_coords(cls, ctx: FieldContext, coords) -> FieldElement:
        arr = ctx.asarray(coords)
        if arr.shape != (ctx.m,):
            raise ParameterError("expected a single element")
        return cls(ctx, tuple(int(c) for c in arr))

    @classmethod
    def parse(cls, ctx: FieldContext, text: str) -> FieldElement:
        return cls.from_coords(ctx, ctx.parse(text))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def _wrap(self, arr) -> FieldElement:
        return FieldElement(self.ctx, tuple(int(c) for c in arr))

    def _other(self, other) -> np.ndarray:
        if isinstance(other, FieldElement):
            self.ctx._check(other)
            return other.array
        if isinstance(other, (int, np.integer)):
            return self.ctx.one() * (int(other) % self.ctx.q)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return self._wrap(self.ctx.add(self.array, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return self._wrap(self.ctx.sub(self.array, o))

    def __rsub__(self, other):
        o = self._other(other)
        return self._wrap(self.ctx.sub(o, self.array))

    def __neg__(self):
        return self._wrap((-self.array) % self.ctx.q)

    def __mul__(self, other):
        o = self._other(other)
        return self._wrap(self.ctx.mul(self.array, o))

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        return self._wrap(self.ctx.inv(self.array))

    def __truediv__(self, other):
        o = self._other(other)
        return self._wrap(self.ctx.mul(self.array, self.ctx.inv(o)))

    def __pow__(self, e: int):
        return self._wrap(self.ctx.pow(self.array, int(e)))

    def __str__(self) -> str:
        return self.ctx.format(self.array)

    def __repr__(self) -> str:
        return f"FieldElement({self})"
