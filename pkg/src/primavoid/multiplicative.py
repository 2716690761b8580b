"""Multiplicative structure of F_{q^r}^*.

Integer factorization and the arithmetic functions phi, mu and W (number of
squarefree divisors), element orders and primitivity, discrete-log tables,
and multiplicative characters chi_j(g^k) = exp(2 pi i j k / (q^r - 1)).
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
import os
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from .errors import (
    CtxMismatch,
    DomainError,
    FieldTooLarge,
    InputTooLarge,
    NotADivisor,
    NotPrimitive,
    ZeroElement,
)
from .ff_core import ENUMERATION_CAP, FieldCtx, FieldElem, elem_pow
from .reports import BoundReport

_TRIAL_LIMIT = 10**6
_U64 = 2**64
# Deterministic Miller-Rabin witnesses for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

_SMALL_PRIMES: List[int] = []


def _small_primes() -> List[int]:
    if not _SMALL_PRIMES:
        sieve = bytearray([1]) * (_TRIAL_LIMIT + 1)
        sieve[0] = sieve[1] = 0
        for i in range(2, int(_TRIAL_LIMIT**0.5) + 1):
            if sieve[i]:
                sieve[i * i::i] = bytes(len(range(i * i, _TRIAL_LIMIT + 1, i)))
        _SMALL_PRIMES.extend(i for i, flag in enumerate(sieve) if flag)
    return _SMALL_PRIMES


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        for p, e in self.factors:
            prod *= p**e
        if prod != self.n:
            raise ValueError(f"factors multiply to {prod}, not {self.n}")

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]

    def divisors(self) -> List[int]:
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)

    def to_dict(self) -> dict:
        return {"n": self.n, "factors": [list(f) for f in self.factors]}


def factorize(n: int) -> Factorization:
    """Complete factorization: trial division below 10^6, Pollard-Brent above."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    if n >= _U64:
        raise InputTooLarge(f"{n} exceeds 2^64")
    counts: Dict[int, int] = {}
    m = n
    for p in _small_primes():
        if p * p > m:
            break
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    rng = random.Random(n)
    while stack:
        x = stack.pop()
        if is_prime(x):
            counts[x] = counts.get(x, 0) + 1
            continue
        d = _pollard_brent(x, rng)
        stack += [d, x // d]
    return Factorization(n, tuple(sorted(counts.items())))


def _as_fact(f: Union[Factorization, int]) -> Factorization:
    return f if isinstance(f, Factorization) else factorize(f)


def euler_phi(f: Union[Factorization, int]) -> int:
    f = _as_fact(f)
    out = 1
    for p, e in f.factors:
        out *= p ** (e - 1) * (p - 1)
    return out


def moebius(f: Union[Factorization, int]) -> int:
    f = _as_fact(f)
    if any(e >= 2 for _, e in f.factors):
        return 0
    return (-1) ** len(f.factors)


def squarefree_divisor_count(f: Union[Factorization, int]) -> int:
    """W(n) = 2^omega(n)."""
    return 2 ** len(_as_fact(f).factors)


def robin_bound_value(t: int) -> float:
    """t^(0.96 / ln ln t), natural logs."""
    if t < 3:
        raise DomainError(f"bound defined for t >= 3, got {t}")
    lt = math.log(t)
    return math.exp(0.96 * lt / math.log(lt))


def robin_bound_holds(t: int, f: Optional[Factorization] = None) -> BoundReport:
    """Check W(t) < t^(0.96/ln ln t)."""
    bound = robin_bound_value(t)
    w = squarefree_divisor_count(f if f is not None else t)
    return BoundReport("squarefree_divisors", w, bound, holds=w < bound, metadata={"t": t})


# -- orders and primitivity --------------------------------------------------

def _group_order(a: FieldElem, f: Optional[Factorization]) -> Factorization:
    n = a.ctx.order - 1
    if f is None:
        return factorize(n)
    if f.n != n:
        raise ValueError(f"factorization of {f.n} given, group order is {n}")
    return f


def multiplicative_order(a: FieldElem, f: Optional[Factorization] = None) -> int:
    if a.is_zero():
        raise ZeroElement("zero has no multiplicative order")
    f = _group_order(a, f)
    order = f.n
    one = a.ctx.one
    for p, e in f.factors:
        for _ in range(e):
            if elem_pow(a, order // p) == one:
                order //= p
            else:
                break
    return order


def is_primitive(a: FieldElem, f: Optional[Factorization] = None) -> bool:
    if a.is_zero():
        raise ZeroElement("zero is never primitive")
    f = _group_order(a, f)
    one = a.ctx.one
    return all(elem_pow(a, f.n // p) != one for p in f.primes)


def find_generator(ctx: FieldCtx, f: Optional[Factorization] = None) -> FieldElem:
    """First primitive element in index order (power-basis coordinates, vec[0] fastest)."""
    f = f if f is not None else factorize(ctx.order - 1)
    for idx in range(1, ctx.order):
        a = ctx.from_index(idx)
        if is_primitive(a, f):
            return a
    raise AssertionError("cyclic group without generator")


# -- discrete logarithms -----------------------------------------------------

_DLOG_MAGIC = b"DLOG1"


class DLogTable:
    """Discrete logarithms to base ``generator`` for every nonzero element.

    ``log[idx]`` is the exponent of the element with index ``idx`` (``-1`` for
    zero); ``exp[k]`` is the index of ``generator**k``.
    """

    def __init__(self, ctx: FieldCtx, generator: FieldElem, log: np.ndarray):
        self.ctx = ctx
        self.generator = generator
        self.log = log
        self.exp = np.empty(ctx.order - 1, dtype=np.int64)
        self.exp[log[1:]] = np.arange(1, ctx.order)
        self.n = ctx.order - 1

    def __len__(self):
        return self.n

    def __getitem__(self, a: FieldElem) -> int:
        return self.dlog(a)

    def dlog(self, a: FieldElem) -> int:
        if a.ctx.field_key != self.ctx.field_key:
            raise CtxMismatch("element from another field")
        if a.is_zero():
            raise ZeroElement("log of zero")
        return int(self.log[a.index])

    def element(self, k: int) -> FieldElem:
        return self.ctx.from_index(int(self.exp[k % self.n]))

    def logs_of(self, elems: Iterable[FieldElem]) -> np.ndarray:
        """Logs of the nonzero members of ``elems``; zeros are dropped."""
        idx = np.fromiter((e.index for e in elems), dtype=np.int64)
        return self.log[idx[idx != 0]]

    def cache_key(self) -> str:
        return dlog_cache_key(self.ctx, self.generator)

    def save(self, path) -> None:
        """Little-endian layout: b"DLOG1" then q^r-1 uint32 records, record i = log of index i+1."""
        with open(path, "wb") as fh:
            fh.write(_DLOG_MAGIC)
            fh.write(self.log[1:].astype("<u4").tobytes())

    @classmethod
    def load(cls, path, ctx: FieldCtx, generator: FieldElem) -> "DLogTable":
        raw = Path(path).read_bytes()
        if raw[:5] != _DLOG_MAGIC or len(raw) != 5 + 4 * (ctx.order - 1):
            raise ValueError(f"{path} is not a dlog table for this field")
        log = np.empty(ctx.order, dtype=np.int64)
        log[0] = -1
        log[1:] = np.frombuffer(raw[5:], dtype="<u4")
        return cls(ctx, generator, log)


def dlog_cache_key(ctx: FieldCtx, g: FieldElem) -> str:
    """Hash of (p, s, r, moduli, generator); the basis does not affect logs."""
    spec = {"p": ctx.p, "s": ctx.s, "r": ctx.r, "base_modulus": ctx.base_modulus,
            "top_modulus": ctx.top_modulus, "generator": g.vec}
    return hashlib.sha256(json.dumps(spec, sort_keys=True).encode()).hexdigest()[:24]


def build_dlog_table(ctx: FieldCtx, g: Optional[FieldElem] = None, f: Optional[Factorization] = None,
                     cap: int = ENUMERATION_CAP, cache_dir=None) -> DLogTable:
    """Tabulate g^k for k < q^r - 1.

    With ``cache_dir`` (or ``$PRIMAVOID_CACHE_DIR``) the table is read from
    or written to ``<dir>/<hash>.dlog``.
    """
    if ctx.order > min(cap, ENUMERATION_CAP):
        raise FieldTooLarge(f"field of order {ctx.order} exceeds cap {min(cap, ENUMERATION_CAP)}")
    f = f if f is not None else factorize(ctx.order - 1)
    if g is None:
        g = find_generator(ctx, f)
    elif g.is_zero() or not is_primitive(g, f):
        raise NotPrimitive(f"{g!r} is not a generator")
    cache_dir = cache_dir or os.environ.get("PRIMAVOID_CACHE_DIR")
    path = None
    if cache_dir:
        path = Path(cache_dir) / (dlog_cache_key(ctx, g) + ".dlog")
        if path.exists():
            return DLogTable.load(path, ctx, g)
    log = np.full(ctx.order, -1, dtype=np.int64)
    x = ctx.one.vec
    for k in range(ctx.order - 1):
        log[ctx.index_of(x)] = k
        x = ctx._mul(x, g.vec)
    table = DLogTable(ctx, g, log)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        table.save(path)
    return table


# -- characters --------------------------------------------------------------

@dataclass(frozen=True)
class CharacterSpec:
    """chi(g^k) = exp(2 pi i j k / (q^r - 1)), of order d."""

    ctx: FieldCtx = field(repr=False, compare=False)
    generator: FieldElem = field(repr=False)
    j: int
    d: int

    @property
    def n(self) -> int:
        return self.ctx.order - 1

    @property
    def is_trivial(self) -> bool:
        return self.j == 0

    def conjugate(self) -> "CharacterSpec":
        return character(self.ctx, self.generator, -self.j % self.n)

    def to_dict(self) -> dict:
        return {"j": self.j, "d": self.d, "generator": self.generator.to_json()}


def character(ctx: FieldCtx, g: FieldElem, j: int) -> CharacterSpec:
    n = ctx.order - 1
    j %= n
    return CharacterSpec(ctx, g, j, n // math.gcd(j, n))


def characters_of_order(ctx: FieldCtx, g: FieldElem, d: int) -> List[CharacterSpec]:
    n = ctx.order - 1
    if d < 1 or n % d:
        raise NotADivisor(f"{d} does not divide {n}")
    if d == 1:
        return [CharacterSpec(ctx, g, 0, 1)]
    step = n // d
    return [CharacterSpec(ctx, g, m * step, d) for m in range(1, d) if math.gcd(m, d) == 1]


def all_characters(ctx: FieldCtx, g: FieldElem) -> List[CharacterSpec]:
    return [character(ctx, g, j) for j in range(ctx.order - 1)]


def char_eval(chi: CharacterSpec, a: FieldElem, t: DLogTable) -> complex:
    """chi(a), with chi(0) = 0 for every character including the trivial one."""
    if a.ctx.field_key != chi.ctx.field_key or t.ctx.field_key != chi.ctx.field_key:
        raise CtxMismatch("character, element and table must share a field")
    if t.generator != chi.generator:
        raise ValueError("dlog table generator differs from the character's")
    if a.is_zero():
        return 0j
    if chi.j == 0:
        return 1 + 0j
    k = t.dlog(a)
    return cmath.exp(2j * math.pi * ((chi.j * k) % chi.n) / chi.n)
