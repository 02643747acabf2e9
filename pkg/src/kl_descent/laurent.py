"""
Exact arithmetic in the group ring Z[Gamma], Gamma = Z^r ordered
lexicographically.

Exponents are stored as plain Python integers.  A vector (c_0, ..., c_{r-1})
is packed as ``sum(c_i * B**(r-1-i))`` with ``B = 2**40``; this packing is a
group homomorphism and, as long as every coordinate stays below ``B/2`` in
absolute value, it preserves the lexicographic order.  For ``r == 1`` the
packing is the identity, so integer weights are just integers everywhere.

>>> x = LaurentPoly({1: 1, -1: 1}) * LaurentPoly({1: 1, -1: -1})
>>> print(x)
e[2] - e[-2]
>>> print(LaurentPoly({2: 1, 0: 5, -1: 3}).sym_plus())
e[2] + 5 + e[-2]
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

__all__ = [
    "Gamma", "LaurentPoly", "ModPPoly",
    "multiply", "degree_valuation", "bar", "sym_plus", "reduce_mod_p",
    "is_prime", "ZERO", "ONE",
]

_BITS = 40
_BASE = 1 << _BITS
_HALF = _BASE >> 1


class Gamma:
    """The ordered group Z^r (lexicographic) and its packing into integers."""

    __slots__ = ("rank",)

    def __init__(self, rank: int = 1):
        if rank < 1:
            raise ValueError(f"rank must be >= 1, got {rank}")
        self.rank = rank

    def __repr__(self):
        return f"Gamma(rank={self.rank})"

    def __eq__(self, other):
        return isinstance(other, Gamma) and other.rank == self.rank

    def __hash__(self):
        return hash(("Gamma", self.rank))

    def encode(self, coords) -> int:
        if isinstance(coords, int):
            coords = (coords,)
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {coords}")
        e = 0
        for c in coords:
            if abs(c) >= _HALF:
                raise OverflowError(f"coordinate {c} out of range")
            e = e * _BASE + c
        return e

    def decode(self, e: int) -> tuple[int, ...]:
        coords = []
        for _ in range(self.rank - 1):
            c = e % _BASE
            if c >= _HALF:
                c -= _BASE
            coords.append(c)
            e = (e - c) >> _BITS
        coords.append(e)
        return tuple(reversed(coords))

    def format(self, e) -> str:
        if e == -math.inf:
            return "-inf"
        if e == math.inf:
            return "+inf"
        if self.rank == 1:
            return str(e)
        return "(" + ",".join(str(c) for c in self.decode(e)) + ")"

    def to_json(self, e):
        return e if self.rank == 1 else list(self.decode(e))

    def from_json(self, v) -> int:
        return self.encode(v)


def _clean(terms: dict) -> dict:
    return {k: v for k, v in terms.items() if v}


class LaurentPoly:
    """Element of Z[Gamma]; a sparse, immutable exponent -> coefficient map."""

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping[int, int] | None = None):
        self._t = _clean(dict(terms)) if terms else {}

    @classmethod
    def _raw(cls, terms: dict) -> "LaurentPoly":
        # caller guarantees no zero coefficients
        p = cls.__new__(cls)
        p._t = terms
        return p

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls._raw({exp: coeff} if coeff else {})

    @classmethod
    def constant(cls, c: int) -> "LaurentPoly":
        return cls.monomial(0, c)

    @property
    def terms(self) -> dict:
        """The underlying map; must not be mutated."""
        return self._t

    def items(self) -> list[tuple[int, int]]:
        """Terms sorted by decreasing exponent."""
        return sorted(self._t.items(), reverse=True)

    def coefficient(self, exp: int) -> int:
        return self._t.get(exp, 0)

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def __neg__(self):
        return LaurentPoly._raw({k: -v for k, v in self._t.items()})

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        t = dict(self._t)
        for k, v in other._t.items():
            c = t.get(k, 0) + v
            if c:
                t[k] = c
            else:
                del t[k]
        return LaurentPoly._raw(t)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        t = dict(self._t)
        for k, v in other._t.items():
            c = t.get(k, 0) - v
            if c:
                t[k] = c
            else:
                del t[k]
        return LaurentPoly._raw(t)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return ZERO
            return LaurentPoly._raw({k: v * other for k, v in self._t.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return LaurentPoly._raw(_mul_terms(self._t, other._t))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = ONE
        for _ in range(n):
            result = result * self
        return result

    def shift(self, exp: int) -> "LaurentPoly":
        """Multiply by the monomial e^exp."""
        return LaurentPoly._raw({k + exp: v for k, v in self._t.items()})

    @property
    def degree(self):
        return max(self._t) if self._t else -math.inf

    @property
    def valuation(self):
        return min(self._t) if self._t else math.inf

    def leading_coefficient(self) -> int:
        return self._t[max(self._t)] if self._t else 0

    def bar(self) -> "LaurentPoly":
        return LaurentPoly._raw({-k: v for k, v in self._t.items()})

    def is_bar_invariant(self) -> bool:
        t = self._t
        return all(t.get(-k) == v for k, v in t.items())

    def sym_plus(self) -> "LaurentPoly":
        """The unique bar-invariant q with self - q supported in exponents < 0."""
        t = {}
        for k, v in self._t.items():
            if k > 0:
                t[k] = v
                t[-k] = v
            elif k == 0:
                t[0] = v
        return LaurentPoly._raw(t)

    def negative_part_only(self) -> bool:
        """True when every exponent is < 0 (membership in A_{<0})."""
        return all(k < 0 for k in self._t)

    def format(self, gamma: Gamma | None = None) -> str:
        gamma = gamma or _RANK1
        if not self._t:
            return "0"
        out = []
        for k, v in self.items():
            sign = "-" if v < 0 else "+"
            a = abs(v)
            if k == 0:
                body = str(a)
            else:
                mono = "e[" + gamma.format(k) + "]"
                body = mono if a == 1 else f"{a}{mono}"
            out.append((sign, body))
        first_sign, first = out[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"LaurentPoly({dict(self.items())!r})"

    def to_json(self, gamma: Gamma | None = None) -> list:
        gamma = gamma or _RANK1
        return [[gamma.to_json(k), v] for k, v in self.items()]

    @classmethod
    def from_json(cls, data: Iterable, gamma: Gamma | None = None) -> "LaurentPoly":
        gamma = gamma or _RANK1
        return cls({gamma.from_json(k): v for k, v in data})


def _mul_terms(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    t: dict = {}
    get = t.get
    for kb, vb in b.items():
        for ka, va in a.items():
            k = ka + kb
            t[k] = get(k, 0) + va * vb
    return {k: v for k, v in t.items() if v}


ZERO = LaurentPoly()
ONE = LaurentPoly.constant(1)
_RANK1 = Gamma(1)


def multiply(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def degree_valuation(a: LaurentPoly):
    """(deg a, val a), with deg 0 = -inf and val 0 = +inf."""
    return a.degree, a.valuation


def bar(a: LaurentPoly) -> LaurentPoly:
    return a.bar()


def sym_plus(a: LaurentPoly) -> LaurentPoly:
    return a.sym_plus()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class ModPPoly:
    """Element of F_p[Gamma]; coefficients kept in 1..p-1."""

    __slots__ = ("p", "_t")

    def __init__(self, p: int, terms: Mapping[int, int] | None = None):
        self.p = p
        self._t = {k: v % p for k, v in (terms or {}).items() if v % p}

    @property
    def terms(self) -> dict:
        return self._t

    def items(self):
        return sorted(self._t.items(), reverse=True)

    def __bool__(self):
        return bool(self._t)

    def __eq__(self, other):
        if not isinstance(other, ModPPoly):
            return NotImplemented
        return self.p == other.p and self._t == other._t

    def __hash__(self):
        return hash((self.p, frozenset(self._t.items())))

    def _check(self, other):
        if other.p != self.p:
            raise ValueError(f"mixed characteristics {self.p} and {other.p}")

    def __add__(self, other):
        self._check(other)
        t = dict(self._t)
        for k, v in other._t.items():
            t[k] = t.get(k, 0) + v
        return ModPPoly(self.p, t)

    def __sub__(self, other):
        self._check(other)
        t = dict(self._t)
        for k, v in other._t.items():
            t[k] = t.get(k, 0) - v
        return ModPPoly(self.p, t)

    def __mul__(self, other):
        self._check(other)
        return ModPPoly(self.p, _mul_terms(self._t, other._t))

    def format(self, gamma: Gamma | None = None) -> str:
        return LaurentPoly(self._t).format(gamma)

    def __str__(self):
        return self.format() + f" (mod {self.p})"

    def __repr__(self):
        return f"ModPPoly({self.p}, {dict(self.items())!r})"

    def to_json(self, gamma: Gamma | None = None) -> list:
        return LaurentPoly(self._t).to_json(gamma)


def reduce_mod_p(a: LaurentPoly, p: int) -> ModPPoly:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return ModPPoly(p, a.terms)

