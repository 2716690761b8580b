"""Affine hyperplanes of F_{q^r} over F_q in general position.

A configuration is a basis beta_1..beta_r together with c in F_q^r; it
describes the hyperplanes A_j = {sum a_i beta_i : a_j = c_j} and the
avoidance set of elements whose every coordinate a_i differs from c_i.

The avoidance set contains 0 exactly when every c_i is nonzero.  Configs
carry an ``exclude_zero`` policy (default True) used wherever the set is
taken inside the multiplicative group; the enumeration itself is the pure
coordinate set and reports 0 through :attr:`HyperplaneConfig.zero_in_coordinate_set`.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .errors import (
    BasisNotIndependent,
    CtxMismatch,
    LengthMismatch,
    NotGeneralPosition,
    SetTooLarge,
    WrongCharacteristic,
    WrongCount,
)
from .ff_core import ENUMERATION_CAP, FieldCtx, FieldElem, from_coords, to_coords

#: Largest avoidance set enumerated by default.
AVOIDANCE_CAP = 10**6


@dataclass(frozen=True)
class AffineHyperplane:
    """{x : normal . coords(x) = constant}, coordinates in the field's working basis."""

    normal: Tuple[int, ...]
    constant: int

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(self.normal))
        if not any(self.normal):
            raise ValueError("hyperplane normal must be nonzero")

    def contains(self, ctx: FieldCtx, x: FieldElem) -> bool:
        return linalg.mat_vec(ctx.base, [self.normal], to_coords(ctx, x))[0] == self.constant

    def to_dict(self, ctx: FieldCtx) -> dict:
        return {"normal": ctx.encode_vector(self.normal), "constant": ctx.encode_scalar(self.constant)}


class HyperplaneConfig:
    """Basis beta_1..beta_r and offsets c_1..c_r; immutable."""

    def __init__(self, ctx: FieldCtx, basis: Sequence[FieldElem], c: Sequence[int], exclude_zero: bool = True):
        self.ctx = ctx
        self.frame = ctx.with_basis(basis)
        self.basis: Tuple[FieldElem, ...] = self.frame.basis
        self.c: Tuple[int, ...] = tuple(c)
        self.exclude_zero = exclude_zero

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def r(self) -> int:
        return self.ctx.r

    @property
    def zero_in_coordinate_set(self) -> bool:
        return all(self.c)

    @property
    def point(self) -> FieldElem:
        """gamma = sum c_i beta_i, the common point of all r hyperplanes."""
        return from_coords(self.frame, self.c)

    def coords(self, x: FieldElem) -> Tuple[int, ...]:
        return to_coords(self.frame, x)

    def element(self, a: Sequence[int]) -> FieldElem:
        return from_coords(self.frame, a)

    def hyperplanes(self) -> List[AffineHyperplane]:
        """Functional form relative to ``ctx``'s working basis."""
        F = self.ctx.base
        # columns: beta_j in ctx coordinates
        M = linalg.transpose([to_coords(self.ctx, b) for b in self.basis])
        Minv = linalg.inverse(F, M)
        return [AffineHyperplane(Minv[j], self.c[j]) for j in range(self.r)]

    def avoidance_size(self) -> int:
        return (self.q - 1) ** self.r

    def to_dict(self) -> dict:
        return {
            "field": self.ctx.to_spec(),
            "basis": [b.to_json() for b in self.basis],
            "c": self.ctx.encode_vector(self.c),
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def __repr__(self):
        return f"HyperplaneConfig(q={self.q}, r={self.r}, c={list(self.c)}, basis={[list(b.vec) for b in self.basis]})"


def standard_config(ctx: FieldCtx, basis: Optional[Sequence[FieldElem]] = None,
                    c: Optional[Sequence[int]] = None, exclude_zero: bool = True) -> HyperplaneConfig:
    """Config in the standard form A_j = {sum a_i beta_i : a_j = c_j}.

    ``basis`` defaults to the context's working basis and ``c`` to zeros.
    """
    basis = list(ctx.basis if basis is None else basis)
    c = [0] * ctx.r if c is None else [ctx.decode_scalar(x) for x in c]
    if len(basis) != ctx.r or len(c) != ctx.r:
        raise LengthMismatch(f"need {ctx.r} basis elements and offsets, got {len(basis)} and {len(c)}")
    for b in basis:
        if b.ctx.field_key != ctx.field_key:
            raise CtxMismatch("basis element from another field")
    if linalg.rank(ctx.base, [b.vec for b in basis]) < ctx.r:
        raise BasisNotIndependent("basis has rank < r over F_q")
    return HyperplaneConfig(ctx, basis, c, exclude_zero)


def config_from_dict(data, ctx: Optional[FieldCtx] = None) -> HyperplaneConfig:
    """Parse ``{"field":..., "basis":..., "c":...}`` or ``{"field":..., "hyperplanes":[...]}``."""
    from .ff_core import field_from_spec

    if isinstance(data, str):
        data = json.loads(data)
    if ctx is None:
        ctx = field_from_spec(data["field"])
    if "hyperplanes" in data:
        hs = [AffineHyperplane(ctx.decode_vector(h["normal"]), ctx.decode_scalar(h["constant"]))
              for h in data["hyperplanes"]]
        return canonicalize(hs, ctx)
    basis = [ctx.element(ctx.decode_vector(b)) for b in data["basis"]] if "basis" in data else None
    return standard_config(ctx, basis, data.get("c"))


def verify_general_position(hs: Sequence[AffineHyperplane], ctx: FieldCtx) -> bool:
    """r hyperplanes are in general position iff their normals have rank r."""
    if len(hs) != ctx.r:
        raise WrongCount(f"expected {ctx.r} hyperplanes, got {len(hs)}")
    return linalg.rank(ctx.base, [h.normal for h in hs]) == ctx.r


def _normalize(F, v: List[int]) -> List[int]:
    lead = next(x for x in v if x)
    inv = F.inv(lead)
    return [F.mul(inv, x) for x in v]


def canonicalize(hs: Sequence[AffineHyperplane], ctx: FieldCtx, check: Optional[bool] = None) -> HyperplaneConfig:
    """Rewrite r hyperplanes in general position as (basis, c).

    gamma is the common point; beta_j spans the line cut out by all
    hyperplanes but the j-th, scaled so its first nonzero coordinate is 1;
    c holds the coordinates of gamma in that basis.  With ``check`` (default:
    fields up to 2^16 elements) each induced hyperplane is compared with the
    input pointwise.
    """
    if not verify_general_position(hs, ctx):
        raise NotGeneralPosition("normals do not have full rank")
    F = ctx.base
    N = [list(h.normal) for h in hs]
    gamma = linalg.solve(F, N, [h.constant for h in hs])
    directions = []
    for j in range(ctx.r):
        ker = linalg.kernel(F, N[:j] + N[j + 1:], n_cols=ctx.r)
        assert len(ker) == 1
        directions.append(_normalize(F, ker[0]))
    basis = [from_coords(ctx, d) for d in directions]
    cfg = standard_config(ctx, basis, [0] * ctx.r)
    c = cfg.coords(from_coords(ctx, gamma))
    cfg = HyperplaneConfig(ctx, cfg.basis, c)
    if check is None:
        check = ctx.order <= 2**16
    if check:
        for j, h in enumerate(hs):
            if not _same_hyperplane(ctx, cfg, j, h):
                raise AssertionError(f"canonical hyperplane {j} differs from input")
    return cfg


def _same_hyperplane(ctx: FieldCtx, cfg: HyperplaneConfig, j: int, h: AffineHyperplane) -> bool:
    induced = {x for x in ctx.elements() if cfg.coords(x)[j] == cfg.c[j]}
    given = {x for x in ctx.elements() if h.contains(ctx, x)}
    return induced == given


# -- enumeration -------------------------------------------------------------

def _check_size(cfg: HyperplaneConfig, cap: int) -> None:
    if cfg.avoidance_size() > min(cap, ENUMERATION_CAP):
        raise SetTooLarge(f"avoidance set has {cfg.avoidance_size()} elements, cap is {cap}")


def allowed_values(cfg: HyperplaneConfig) -> List[List[int]]:
    return [[a for a in range(cfg.q) if a != ci] for ci in cfg.c]


def avoidance_coordinates(cfg: HyperplaneConfig, start: int = 0, stop: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Coordinate vectors of the avoidance set, odometer order (last coordinate fastest).

    ``start``/``stop`` select a slice of the index space ``[0, (q-1)^r)``;
    disjoint slices partition the set deterministically.
    """
    return itertools.islice(itertools.product(*allowed_values(cfg)), start, stop)


def enumerate_avoidance_set(cfg: HyperplaneConfig, start: int = 0, stop: Optional[int] = None,
                            cap: int = AVOIDANCE_CAP) -> Iterator[FieldElem]:
    """Every element with all coordinates a_i != c_i, in odometer order.

    0 is yielded when it belongs to the coordinate set; see
    ``cfg.zero_in_coordinate_set``.
    """
    _check_size(cfg, cap)
    for a in avoidance_coordinates(cfg, start, stop):
        yield cfg.element(a)


def avoidance_indices(cfg: HyperplaneConfig, cap: int = AVOIDANCE_CAP) -> np.ndarray:
    """Element indices of the avoidance set in odometer order, vectorized."""
    _check_size(cfg, cap)
    ctx = cfg.ctx
    p, s, r = ctx.p, ctx.s, ctx.r
    # flat F_p digits of a * beta_i; the element index is that digit string in base p
    flat = np.zeros((r, ctx.q, s * r), dtype=np.int64)
    for i, b in enumerate(cfg.basis):
        for a in range(ctx.q):
            vec = (ctx.scalar(a) * b).vec
            flat[i, a] = [d for v in vec for d in ctx.base.digits(v)]
    acc = np.zeros((1, s * r), dtype=np.int64)
    for i, allowed in enumerate(allowed_values(cfg)):
        acc = ((acc[:, None, :] + flat[i, allowed][None, :, :]) % p).reshape(-1, s * r)
    weights = p ** np.arange(s * r, dtype=np.int64)
    return acc @ weights


def avoidance_set(cfg: HyperplaneConfig, cap: int = AVOIDANCE_CAP) -> List[FieldElem]:
    """The avoidance set under the config's zero policy."""
    out = list(enumerate_avoidance_set(cfg, cap=cap))
    if cfg.exclude_zero:
        out = [x for x in out if not x.is_zero()]
    return out


def membership(cfg: HyperplaneConfig, x: FieldElem) -> bool:
    """True iff every coordinate of x differs from the matching c_i (coordinate definition)."""
    if x.ctx.field_key != cfg.ctx.field_key:
        raise CtxMismatch("element from another field")
    return all(a != ci for a, ci in zip(cfg.coords(x), cfg.c))


def sparse_shift_image(cfg: HyperplaneConfig) -> FrozenSet[FieldElem]:
    """Over F_3: {nu + sum (c_i - 1) beta_i : nu with coordinates in {0, 2}}.

    The result is checked against the avoidance set before it is returned.
    """
    if cfg.q != 3:
        raise WrongCharacteristic(f"shift identity needs q = 3, got q = {cfg.q}")
    shift = cfg.element([(ci - 1) % 3 for ci in cfg.c])
    image = frozenset(cfg.element(nu) + shift for nu in itertools.product((0, 2), repeat=cfg.r))
    expected = frozenset(enumerate_avoidance_set(cfg))
    if image != expected:
        raise AssertionError("shifted sparse set differs from the avoidance set")
    return image


# -- random generation -------------------------------------------------------

def random_invertible_matrix(ctx: FieldCtx, rng: random.Random) -> List[List[int]]:
    """Uniform element of GL_r(F_q) by rejection sampling."""
    while True:
        M = [[rng.randrange(ctx.q) for _ in range(ctx.r)] for _ in range(ctx.r)]
        if linalg.rank(ctx.base, M) == ctx.r:
            return M


def random_config(ctx: FieldCtx, rng: random.Random) -> HyperplaneConfig:
    M = random_invertible_matrix(ctx, rng)
    basis = [from_coords(ctx, row) for row in M]
    c = [rng.randrange(ctx.q) for _ in range(ctx.r)]
    return standard_config(ctx, basis, c)


def random_hyperplanes(ctx: FieldCtx, rng: random.Random) -> List[AffineHyperplane]:
    M = random_invertible_matrix(ctx, rng)
    return [AffineHyperplane(row, rng.randrange(ctx.q)) for row in M]
