"""Finite fields as a tower F_p ⊂ F_q ⊂ F_{q^r}.

Elements of the base field F_q = F_p[x]/(base_modulus) are encoded as
integers in ``range(q)``: the integer ``sum(d_i * p**i)`` stands for the
polynomial ``sum(d_i * x**i)``.  Elements of the top field
F_{q^r} = F_q[y]/(top_modulus) are tuples of ``r`` such integers, the
coefficients of 1, y, ..., y^(r-1) (the power basis).  A :class:`FieldCtx`
additionally carries a working basis beta_1..beta_r over F_q, used by
:func:`from_coords` and :func:`to_coords`.

Polynomials are coefficient lists, lowest degree first.
"""

from __future__ import annotations

import itertools
import json
from typing import Iterator, List, Optional, Sequence, Tuple

from . import linalg
from .errors import (
    BasisNotIndependent,
    CtxMismatch,
    DegreeMismatch,
    DivisionByZero,
    FieldTooLarge,
    NotPrime,
    SuppliedPolynomialReducible,
)

#: Hard ceiling on the field order for any operation that enumerates elements.
ENUMERATION_CAP = 2**24

# below this many candidate divisors the irreducibility test may use trial division
TRIAL_DIVISION_CUTOFF = 2000


def _is_prime(n: int) -> bool:
    from .multiplicative import is_prime

    return is_prime(n)


class BaseField:
    """The field F_q = F_p[x]/(modulus) with integer-encoded elements.

    For ``modulus=None`` this is the prime field F_p.
    """

    def __init__(self, p: int, modulus: Optional[Sequence[int]] = None):
        self.p = p
        self.modulus = tuple(modulus) if modulus is not None else None
        self.s = 1 if modulus is None else len(modulus) - 1
        self.q = p**self.s
        if self.s > 1:
            self._build_tables()

    def __repr__(self):
        if self.s == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.s}; {list(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, BaseField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    # -- integer encoding -------------------------------------------------
    def digits(self, a: int) -> List[int]:
        out = []
        for _ in range(self.s):
            a, d = divmod(a, self.p)
            out.append(d)
        return out

    def from_digits(self, ds: Sequence[int]) -> int:
        a = 0
        for d in reversed(list(ds)):
            a = a * self.p + d % self.p
        return a

    def _build_tables(self) -> None:
        p, q = self.p, self.q
        prime = BaseField(p)
        mod = list(self.modulus)

        def mulmod(a, b):
            return poly_mod(prime, poly_mul(prime, a, b), mod)

        self._add = [[self.from_digits([(x + y) % p for x, y in zip(self.digits(a), self.digits(b))])
                      for b in range(q)] for a in range(q)] if q <= 256 else None
        # exp/log tables from the first multiplicative generator of F_q
        for cand in range(2, q):
            g = self.digits(cand)
            exp = [1]
            x = [1]
            for _ in range(q - 2):
                x = mulmod(x, g)
                e = self.from_digits(x)
                if e == 1:
                    break
                exp.append(e)
            if len(exp) == q - 1:
                break
        else:  # q == 2**1 never reaches here; q >= 4 always has a generator among 2..q-1
            raise AssertionError("no generator found")
        self._exp = exp + exp
        self._log = [0] * q
        for k, e in enumerate(exp):
            self._log[e] = k

    # -- arithmetic -------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.s == 1:
            return (a + b) % self.p
        if self._add is not None:
            return self._add[a][b]
        return self.from_digits([x + y for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        if self.s == 1:
            return -a % self.p
        return self.from_digits([-x for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.s == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero in " + repr(self))
        if self.s == 1:
            return pow(a, -1, self.p)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out


# -- polynomials over a BaseField -------------------------------------------

def _trim(a: List[int]) -> List[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(F: BaseField, a: Sequence[int], b: Sequence[int]) -> List[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _trim(out)


def poly_sub(F: BaseField, a: Sequence[int], b: Sequence[int]) -> List[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([F.sub(x, y) for x, y in zip(a, b)])


def poly_divmod(F: BaseField, a: Sequence[int], b: Sequence[int]) -> Tuple[List[int], List[int]]:
    b = _trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    rem = _trim(list(a))
    quo = [0] * max(len(rem) - len(b) + 1, 0)
    inv_lead = F.inv(b[-1])
    while len(rem) >= len(b):
        shift = len(rem) - len(b)
        f = F.mul(rem[-1], inv_lead)
        quo[shift] = f
        for i, y in enumerate(b):
            rem[shift + i] = F.sub(rem[shift + i], F.mul(f, y))
        _trim(rem)
    return _trim(quo), rem


def poly_mod(F: BaseField, a: Sequence[int], b: Sequence[int]) -> List[int]:
    return poly_divmod(F, a, b)[1]


def poly_gcd(F: BaseField, a: Sequence[int], b: Sequence[int]) -> List[int]:
    """Monic gcd (the zero polynomial is ``[]``)."""
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, poly_mod(F, a, b)
    if a:
        inv = F.inv(a[-1])
        a = [F.mul(inv, x) for x in a]
    return a


def poly_powmod(F: BaseField, a: Sequence[int], e: int, m: Sequence[int]) -> List[int]:
    out = [1]
    a = poly_mod(F, a, m)
    while e:
        if e & 1:
            out = poly_mod(F, poly_mul(F, out, a), m)
        a = poly_mod(F, poly_mul(F, a, a), m)
        e >>= 1
    return out


def _monic_polys(F: BaseField, n: int) -> Iterator[List[int]]:
    """Monic degree-n polynomials in base-q counting order (low coefficient fastest)."""
    for k in range(F.q**n):
        coeffs = []
        for _ in range(n):
            k, d = divmod(k, F.q)
            coeffs.append(d)
        yield coeffs + [1]


def is_irreducible(F: BaseField, f: Sequence[int]) -> bool:
    """Ben-Or test: f has no factor of degree i for any i <= deg(f)/2."""
    f = _trim(list(f))
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    h = [0, 1]
    for _ in range(1, n // 2 + 1):
        h = poly_powmod(F, h, F.q, f)
        if len(poly_gcd(F, poly_sub(F, h, [0, 1]), f)) > 1:
            return False
    return True


def is_irreducible_trial(F: BaseField, f: Sequence[int]) -> bool:
    """Exhaustive trial division by every monic polynomial of degree <= deg(f)/2."""
    f = _trim(list(f))
    n = len(f) - 1
    if n < 1:
        return False
    for d in range(1, n // 2 + 1):
        for g in _monic_polys(F, d):
            if not poly_mod(F, f, g):
                return False
    return True


def _irreducible(F: BaseField, f: Sequence[int]) -> bool:
    n = len(f) - 1
    if sum(F.q**d for d in range(1, n // 2 + 1)) <= TRIAL_DIVISION_CUTOFF:
        return is_irreducible_trial(F, f)
    return is_irreducible(F, f)


def find_irreducible(base, n: int) -> Tuple[int, ...]:
    """Lexicographically first monic irreducible polynomial of degree n.

    ``base`` is a :class:`BaseField` or a prime p.  Candidates are scanned with
    coefficients ordered low-to-high in base-q counting order, so over F_3 the
    first quadratic tried is x^2, then x^2+1, then x^2+2, then x^2+x, ...
    """
    F = base if isinstance(base, BaseField) else BaseField(base)
    if n < 1:
        raise DegreeMismatch(f"degree must be >= 1, got {n}")
    for f in _monic_polys(F, n):
        if _irreducible(F, f):
            return tuple(f)
    raise AssertionError("irreducible polynomials exist in every degree")


# -- top field ---------------------------------------------------------------

class FieldElem:
    """Element of F_{q^r}; ``vec`` holds power-basis coordinates over F_q."""

    __slots__ = ("ctx", "vec")

    def __init__(self, ctx: "FieldCtx", vec: Sequence[int]):
        self.ctx = ctx
        self.vec = tuple(vec)

    @property
    def ctx_id(self):
        return self.ctx.field_key

    @property
    def index(self) -> int:
        """Base-q integer with vec[0] as the least significant digit."""
        return self.ctx.index_of(self.vec)

    @property
    def coords(self) -> Tuple[int, ...]:
        """Coordinates with respect to the owning context's working basis."""
        return to_coords(self.ctx, self)

    def is_zero(self) -> bool:
        return not any(self.vec)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.ctx.field_key == other.ctx.field_key and self.vec == other.vec
        if isinstance(other, int):
            return self == self.ctx.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx.field_key, self.vec))

    def __repr__(self):
        return f"FieldElem({list(self.vec)})"

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, int):
            return self.ctx.scalar(other)
        return other

    def __add__(self, other):
        return arith(self, self._coerce(other), "add")

    __radd__ = __add__

    def __sub__(self, other):
        return arith(self, self._coerce(other), "sub")

    def __rsub__(self, other):
        return arith(self._coerce(other), self, "sub")

    def __mul__(self, other):
        return arith(self, self._coerce(other), "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        return arith(self, self._coerce(other), "div")

    def __neg__(self):
        return FieldElem(self.ctx, [self.ctx.base.neg(x) for x in self.vec])

    def __pow__(self, e: int):
        return elem_pow(self, e)

    def inverse(self) -> "FieldElem":
        return arith(self.ctx.one, self, "div")

    def to_json(self):
        return self.ctx.encode_vector(self.vec)


class FieldCtx:
    """A constructed field F_{q^r} with its moduli and a working basis over F_q.

    Immutable after construction.  Two contexts with equal moduli share
    ``field_key`` and their elements interoperate even if the bases differ.
    """

    def __init__(self, base: BaseField, top_modulus: Sequence[int], basis: Optional[Sequence] = None):
        self.base = base
        self.p, self.s, self.q = base.p, base.s, base.q
        self.base_modulus = base.modulus
        self.top_modulus = tuple(top_modulus)
        self.r = len(self.top_modulus) - 1
        self.order = self.q**self.r
        self.field_key = (self.p, self.base_modulus, self.top_modulus)
        self._neg_tail = [base.neg(c) for c in self.top_modulus[:-1]]
        if basis is None:
            basis = [FieldElem(self, [1 if i == j else 0 for i in range(self.r)]) for j in range(self.r)]
            self._default_basis = True
        else:
            basis = [FieldElem(self, b.vec if isinstance(b, FieldElem) else b) for b in basis]
            self._default_basis = all(b.vec == tuple(1 if i == j else 0 for i in range(self.r))
                                      for j, b in enumerate(basis))
        if len(basis) != self.r:
            raise DegreeMismatch(f"basis needs {self.r} elements, got {len(basis)}")
        self.basis: Tuple[FieldElem, ...] = tuple(basis)
        # columns are the power-basis coordinates of beta_j
        self._basis_matrix = linalg.transpose([b.vec for b in self.basis])
        inv = linalg.inverse(base, self._basis_matrix)
        if inv is None:
            raise BasisNotIndependent("basis is not F_q-linearly independent")
        self._basis_inverse = inv
        self.key = (self.field_key, tuple(b.vec for b in self.basis))

    def __repr__(self):
        return f"FieldCtx(p={self.p}, s={self.s}, r={self.r}, top_modulus={list(self.top_modulus)})"

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def has_default_basis(self) -> bool:
        return self._default_basis

    def with_basis(self, basis: Sequence) -> "FieldCtx":
        return FieldCtx(self.base, self.top_modulus, basis)

    # -- element constructors --------------------------------------------
    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, [0] * self.r)

    @property
    def one(self) -> FieldElem:
        return self.scalar(1)

    @property
    def gen(self) -> FieldElem:
        """The class of y, a root of the top modulus (x itself when r = 1)."""
        if self.r == 1:
            return FieldElem(self, [self.base.neg(self.top_modulus[0])])
        return FieldElem(self, [0, 1] + [0] * (self.r - 2))

    def scalar(self, a: int) -> FieldElem:
        """Embed an F_q element (integer encoding; plain ints are reduced mod p when s = 1)."""
        if self.s == 1:
            a %= self.p
        return FieldElem(self, [a] + [0] * (self.r - 1))

    def element(self, vec: Sequence[int]) -> FieldElem:
        if len(vec) != self.r:
            raise DegreeMismatch(f"expected {self.r} coordinates, got {len(vec)}")
        return FieldElem(self, [v % self.q if self.s == 1 else v for v in vec])

    def index_of(self, vec: Sequence[int]) -> int:
        idx = 0
        for v in reversed(vec):
            idx = idx * self.q + v
        return idx

    def from_index(self, idx: int) -> FieldElem:
        vec = []
        for _ in range(self.r):
            idx, d = divmod(idx, self.q)
            vec.append(d)
        return FieldElem(self, vec)

    def elements(self, cap: int = ENUMERATION_CAP) -> Iterator[FieldElem]:
        """All elements in index order (0 first)."""
        check_enumerable(self, cap)
        for idx in range(self.order):
            yield self.from_index(idx)

    # -- raw vector arithmetic (power basis) ------------------------------
    def _mul(self, a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
        r = self.r
        F = self.base
        if self.s == 1:
            p = self.p
            prod = [0] * (2 * r - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        prod[i + j] += x * y
            tail = self._neg_tail
            for k in range(2 * r - 2, r - 1, -1):
                c = prod[k] % p
                if c:
                    for i in range(r):
                        prod[k - r + i] += c * tail[i]
            return tuple(x % p for x in prod[:r])
        prod = [0] * (2 * r - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] = F.add(prod[i + j], F.mul(x, y))
        tail = self._neg_tail
        for k in range(2 * r - 2, r - 1, -1):
            c = prod[k]
            if c:
                for i in range(r):
                    prod[k - r + i] = F.add(prod[k - r + i], F.mul(c, tail[i]))
        return tuple(prod[:r])

    # -- serialization ----------------------------------------------------
    def encode_scalar(self, a: int):
        return a if self.s == 1 else self.base.digits(a)

    def decode_scalar(self, a) -> int:
        return _decode_scalar(self.base, a)

    def encode_vector(self, vec: Sequence[int]) -> list:
        return [self.encode_scalar(a) for a in vec]

    def decode_vector(self, data: Sequence) -> Tuple[int, ...]:
        return tuple(self.decode_scalar(a) for a in data)

    def to_spec(self) -> dict:
        spec = {"p": self.p, "s": self.s, "r": self.r}
        if self.s > 1:
            spec["base_modulus"] = list(self.base_modulus)
        spec["top_modulus"] = self.encode_vector(self.top_modulus)
        if not self._default_basis:
            spec["basis"] = [b.to_json() for b in self.basis]
        return spec

    def to_json(self) -> str:
        return json.dumps(self.to_spec(), sort_keys=True)


def _decode_scalar(F: BaseField, a) -> int:
    if isinstance(a, (list, tuple)):
        if len(a) != F.s:
            raise DegreeMismatch(f"F_q element needs {F.s} digits, got {len(a)}")
        return F.from_digits(a)
    a = int(a)
    if F.s == 1:
        return a % F.p
    if not 0 <= a < F.q:
        raise DegreeMismatch(f"F_q element {a} out of range(q={F.q})")
    return a


def check_enumerable(ctx: FieldCtx, cap: int = ENUMERATION_CAP) -> None:
    if ctx.order > min(cap, ENUMERATION_CAP):
        raise FieldTooLarge(f"field of order {ctx.order} exceeds enumeration cap {min(cap, ENUMERATION_CAP)}")


def build_field(p: int, s: int = 1, r: int = 2,
                base_modulus: Optional[Sequence[int]] = None,
                top_modulus: Optional[Sequence] = None,
                basis: Optional[Sequence] = None) -> FieldCtx:
    """Construct F_{q^r} with q = p^s as a tower.

    Omitted moduli are replaced by the lexicographically first monic
    irreducible polynomial of the required degree.  ``top_modulus``
    coefficients may be integer-encoded F_q elements or digit lists.
    Prime fields (s = r = 1) are allowed for convenience.
    """
    if not isinstance(p, int) or not _is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if s < 1 or r < 1:
        raise DegreeMismatch(f"degrees must be positive, got s={s}, r={r}")
    prime = BaseField(p)
    if s == 1:
        if base_modulus is not None:
            raise DegreeMismatch("base_modulus only applies when s > 1")
        base = prime
    else:
        if base_modulus is None:
            base_modulus = find_irreducible(prime, s)
        base_modulus = tuple(int(c) % p for c in base_modulus)
        if len(base_modulus) - 1 != s or base_modulus[-1] != 1:
            raise DegreeMismatch(f"base_modulus must be monic of degree {s}")
        if not _irreducible(prime, base_modulus):
            raise SuppliedPolynomialReducible(f"base modulus {list(base_modulus)} is reducible over F_{p}")
        base = BaseField(p, base_modulus)
    if top_modulus is None:
        top = find_irreducible(base, r)
    else:
        top = tuple(_decode_scalar(base, c) for c in top_modulus)
        if len(top) - 1 != r or top[-1] != 1:
            raise DegreeMismatch(f"top_modulus must be monic of degree {r}")
        if not _irreducible(base, top):
            raise SuppliedPolynomialReducible(f"top modulus {list(top)} is reducible over F_{base.q}")
    ctx = FieldCtx(base, top)
    if basis is not None:
        basis = [b if isinstance(b, FieldElem) else ctx.decode_vector(b) for b in basis]
        ctx = ctx.with_basis(basis)
    return ctx


def field_from_spec(spec) -> FieldCtx:
    """Build a field from a dict or JSON string like ``{"p":3,"s":1,"r":4}``."""
    if isinstance(spec, str):
        spec = json.loads(spec)
    return build_field(int(spec["p"]), int(spec.get("s", 1)), int(spec.get("r", 2)),
                       spec.get("base_modulus"), spec.get("top_modulus"), spec.get("basis"))


def _check_same(a: FieldElem, b: FieldElem) -> None:
    if a.ctx.field_key != b.ctx.field_key:
        raise CtxMismatch(f"elements of different fields: {a.ctx!r} vs {b.ctx!r}")


def arith(a: FieldElem, b: FieldElem, op: str) -> FieldElem:
    """Field arithmetic; ``op`` is one of add, sub, mul, div."""
    _check_same(a, b)
    ctx, F = a.ctx, a.ctx.base
    if op == "add":
        return FieldElem(ctx, [F.add(x, y) for x, y in zip(a.vec, b.vec)])
    if op == "sub":
        return FieldElem(ctx, [F.sub(x, y) for x, y in zip(a.vec, b.vec)])
    if op == "mul":
        return FieldElem(ctx, ctx._mul(a.vec, b.vec))
    if op == "div":
        if b.is_zero():
            raise DivisionByZero("division by zero field element")
        return FieldElem(ctx, ctx._mul(a.vec, elem_pow(b, ctx.order - 2).vec))
    raise ValueError(f"unknown op {op!r}")


def elem_pow(a: FieldElem, e: int) -> FieldElem:
    """a**e by square-and-multiply; 0**0 is 1."""
    if e < 0:
        raise ValueError("negative exponent")
    ctx = a.ctx
    out = ctx.one.vec
    base = a.vec
    while e:
        if e & 1:
            out = ctx._mul(out, base)
        e >>= 1
        if e:
            base = ctx._mul(base, base)
    return FieldElem(ctx, out)


def from_coords(ctx: FieldCtx, a: Sequence[int]) -> FieldElem:
    """sum(a_i * beta_i) for the context's working basis."""
    if len(a) != ctx.r:
        raise DegreeMismatch(f"expected {ctx.r} coordinates, got {len(a)}")
    a = [ctx.decode_scalar(x) for x in a]
    return FieldElem(ctx, linalg.mat_vec(ctx.base, ctx._basis_matrix, a))


def to_coords(ctx: FieldCtx, x: FieldElem) -> Tuple[int, ...]:
    _check_same(FieldElem(ctx, ctx.zero.vec), x)
    return tuple(linalg.mat_vec(ctx.base, ctx._basis_inverse, x.vec))


def coordinate_vectors(q: int, r: int) -> Iterator[Tuple[int, ...]]:
    """All vectors of F_q^r, last coordinate fastest."""
    return itertools.product(range(q), repeat=r)
