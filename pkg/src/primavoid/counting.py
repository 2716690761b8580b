"""Character sums over avoidance sets, primitive-element counts and existence conditions.

Exact quantities (character sums, counts) are computed by enumeration at
desk scale.  The asymptotic conditions are evaluated in the log domain with
mpmath so that r may be an arbitrarily large integer; ``log`` is the natural
logarithm throughout.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .errors import CtxMismatch, DomainError, NoThresholdBelowCap, NumericalDrift
from .ff_core import FieldCtx, FieldElem
from .hyperplanes import (
    AVOIDANCE_CAP,
    HyperplaneConfig,
    avoidance_indices,
    enumerate_avoidance_set,
)
from .multiplicative import (
    CharacterSpec,
    DLogTable,
    Factorization,
    build_dlog_table,
    characters_of_order,
    euler_phi,
    factorize,
    is_primitive,
    moebius,
    squarefree_divisor_count,
)
from .reports import BoundReport, ThresholdResult

SQRT3 = math.sqrt(3.0)
#: Exponent in the squarefree-divisor bound W(t) < t^(0.96 / log log t).
ROBIN_EXPONENT = 0.96
#: Saving exponent for character sums over {0,2}-digit sets in F_{3^r}.
GAMMA_Q3 = 0.99128

ANALYTIC = "analytic_log_domain"
EXACT_SCAN = "exact_scan"


def ceil_3r_4(r: int) -> int:
    return (3 * r + 3) // 4


class CharSum(NamedTuple):
    value: complex
    magnitude: float


def _table_for(cfg: HyperplaneConfig, t: Optional[DLogTable]) -> DLogTable:
    if t is None:
        return build_dlog_table(cfg.ctx)
    if t.ctx.field_key != cfg.ctx.field_key:
        raise CtxMismatch("dlog table belongs to another field")
    return t


def avoidance_logs(cfg: HyperplaneConfig, t: DLogTable, cap: int = AVOIDANCE_CAP) -> np.ndarray:
    """Discrete logs of the nonzero avoidance-set elements."""
    idx = avoidance_indices(cfg, cap)
    return t.log[idx[idx != 0]]


def sums_from_logs(logs: np.ndarray, n: int) -> np.ndarray:
    """All n character sums sum_x chi_j(x) at once; entry j belongs to chi_j."""
    hist = np.bincount(logs, minlength=n).astype(float)
    return np.fft.ifft(hist) * n


def char_sum(cfg: HyperplaneConfig, chi: CharacterSpec, t: DLogTable, cap: int = AVOIDANCE_CAP) -> CharSum:
    """sum of chi over the avoidance set, term by term (chi(0) = 0)."""
    if chi.ctx.field_key != cfg.ctx.field_key:
        raise CtxMismatch("character belongs to another field")
    t = _table_for(cfg, t)
    logs = avoidance_logs(cfg, t, cap)
    n = t.n
    phases = 2 * np.pi * ((chi.j * logs) % n) / n
    value = complex(np.exp(1j * phases).sum())
    return CharSum(value, abs(value))


def character_sums(cfg: HyperplaneConfig, t: Optional[DLogTable] = None, cap: int = AVOIDANCE_CAP) -> np.ndarray:
    t = _table_for(cfg, t)
    return sums_from_logs(avoidance_logs(cfg, t, cap), t.n)


# -- character-sum bound -----------------------------------------------------

def theorem22_bound(q: int, r: int) -> float:
    """sqrt(3) (q-1)^(r/2) q^(ceil(3r/4)/2)."""
    return SQRT3 * (q - 1) ** (r / 2) * q ** (ceil_3r_4(r) / 2)


def log_theorem22_bound(q: int, r: int) -> float:
    return 0.5 * math.log(3) + r / 2 * math.log(q - 1) + ceil_3r_4(r) / 2 * math.log(q)


def verify_theorem22(cfg: HyperplaneConfig, t: Optional[DLogTable] = None, scale: float = 1.0,
                     cap: int = AVOIDANCE_CAP) -> List[BoundReport]:
    """|s(S, chi)| against the bound for every nontrivial character.

    ``scale`` multiplies the exact sums before comparison; it exists for
    fault-injection tests and is 1 otherwise.
    """
    t = _table_for(cfg, t)
    sums = character_sums(cfg, t, cap)
    bound = theorem22_bound(cfg.q, cfg.r)
    n = t.n
    reports = []
    for j in range(1, n):
        reports.append(BoundReport(
            "char_sum_magnitude", scale * abs(sums[j]), bound,
            metadata={"q": cfg.q, "r": cfg.r, "j": j, "d": n // math.gcd(j, n), "config": cfg.config_hash()}))
    return reports


def chain_bound(q: int, r: int, k: int) -> float:
    """(q-1)^(r/2) (2 q^(3r/2 - k) + q^k)^(1/2), the bound before fixing k."""
    return (q - 1) ** (r / 2) * math.sqrt(2 * q ** (1.5 * r - k) + q**k)


def best_split(q: int, r: int) -> int:
    """Integer k in [1, r] minimizing :func:`chain_bound`."""
    return min(range(1, r + 1), key=lambda k: chain_bound(q, r, k))


def _digit_rows(cfg: HyperplaneConfig, allowed: Sequence[Sequence[int]]) -> np.ndarray:
    """Flat F_p digit vectors of sum a_i beta_i over the product of ``allowed``."""
    ctx = cfg.ctx
    p, s, r = ctx.p, ctx.s, ctx.r
    acc = np.zeros((1, s * r), dtype=np.int64)
    for i, vals in enumerate(allowed):
        rows = []
        for a in vals:
            vec = (ctx.scalar(a) * cfg.basis[i]).vec
            rows.append([d for v in vec for d in ctx.base.digits(v)])
        rows = np.array(rows, dtype=np.int64)
        acc = ((acc[:, None, :] + rows[None, :, :]) % p).reshape(-1, s * r)
    return acc


def split_sum_probe(cfg: HyperplaneConfig, chi: CharacterSpec, t: DLogTable, k: int,
                    all_pairs: bool = False) -> Tuple[BoundReport, BoundReport]:
    """Check the two estimates behind the character-sum bound for a split at k.

    The avoidance set is V + W with V on coordinates 1..k and W on k+1..r;
    V' is the full span of beta_1..beta_k.  Returns

    * the largest |sum_{v in V'} chi(v + w1) conj(chi(v + w2))| over w1 != w2
      in W (in the whole field with ``all_pairs``) against 2 q^(r/2), with the
      diagonal values in the metadata;
    * |s(S, chi)| against (q-1)^(r/2) (2 q^(3r/2-k) + q^k)^(1/2), with the
      intermediate Cauchy-Schwarz quantities in the metadata.
    """
    q, r, p = cfg.q, cfg.r, cfg.ctx.p
    if not 1 <= k <= r:
        raise ValueError(f"split k={k} outside [1, {r}]")
    t = _table_for(cfg, t)
    n = t.n
    allowed = [[a for a in range(q) if a != ci] for ci in cfg.c]
    zero = [0]
    V_full = _digit_rows(cfg, [list(range(q))] * k + [zero] * (r - k))
    V = _digit_rows(cfg, allowed[:k] + [zero] * (r - k))
    W = _digit_rows(cfg, [zero] * k + allowed[k:])
    weights = p ** np.arange(V.shape[1], dtype=np.int64)

    def chi_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
        idx = ((A[:, None, :] + B[None, :, :]) % p) @ weights
        logs = t.log[idx]
        vals = np.exp(2j * np.pi * ((chi.j * np.where(logs < 0, 0, logs)) % n) / n)
        return np.where(logs < 0, 0, vals)

    shifts = _digit_rows(cfg, [list(range(q))] * r) if all_pairs else W
    X_full = chi_matrix(V_full, shifts)
    gram = X_full.T @ X_full.conj()  # gram[w1, w2] = sum_v chi(v+w1) conj chi(v+w2)
    off = ~np.eye(len(shifts), dtype=bool)
    inner_max = float(np.abs(gram[off]).max()) if off.any() else 0.0
    diag = sorted({int(round(x)) for x in np.real(np.diag(gram))})
    inner = BoundReport(
        "split_inner_sum", inner_max, 2 * q ** (r / 2),
        metadata={"q": q, "r": r, "k": k, "j": chi.j, "pairs": int(off.sum()), "diagonal_values": diag,
                  "all_pairs": all_pairs, "config": cfg.config_hash()})

    if all_pairs:
        X_full = chi_matrix(V_full, W)
        gram = X_full.T @ X_full.conj()
    mags = np.abs(gram)
    X = chi_matrix(V, W)
    s = float(abs(X.sum()))
    cs_step = math.sqrt(len(V)) * math.sqrt(float((np.abs(X.sum(axis=1)) ** 2).sum()))
    extended = (q - 1) ** (k / 2) * math.sqrt(float(mags.sum()))
    pre_simplified = (q - 1) ** (k / 2) * math.sqrt(2 * (q - 1) ** (2 * (r - k)) * q ** (r / 2) + (q - 1) ** (r - k) * q**k)
    chain = BoundReport(
        "split_chain", s, chain_bound(q, r, k),
        metadata={"q": q, "r": r, "k": k, "j": chi.j, "cauchy_schwarz": cs_step, "extended_to_span": extended,
                  "before_simplification": pre_simplified, "config": cfg.config_hash()})
    return inner, chain


# -- counting primitive elements ---------------------------------------------

def _drift_tol(size: int) -> float:
    return 1e-6 * size + 1e-6


def vinogradov_count(U: Iterable[FieldElem], t: DLogTable, f: Optional[Factorization] = None,
                     method: str = "fft") -> int:
    """Number of primitive elements of U from the Mobius/character-sum formula.

    ``method="fft"`` obtains every character sum from one transform of the
    histogram of logs; ``method="direct"`` sums each character of
    squarefree order separately.  The result is rounded only after checking
    that the imaginary part and the distance to the nearest integer are
    within 1e-6 |U| + 1e-6.
    """
    elems = list(U)
    if any(x.is_zero() for x in elems):
        raise ValueError("U must lie in the multiplicative group")
    return vinogradov_count_logs(t.logs_of(elems), t, f, method)


def vinogradov_count_logs(logs: np.ndarray, t: DLogTable, f: Optional[Factorization] = None,
                          method: str = "fft") -> int:
    n = t.n
    f = f if f is not None else factorize(n)
    total = 0j
    if method == "fft":
        sums = sums_from_logs(logs, n)
        orders = n // np.gcd(np.arange(n), n)
        for d in f.divisors():
            mu = moebius(factorize(d))
            if mu:
                total += mu / euler_phi(factorize(d)) * sums[orders == d].sum()
    elif method == "direct":
        for d in f.divisors():
            fd = factorize(d)
            mu = moebius(fd)
            if not mu:
                continue
            inner = 0j
            for chi in characters_of_order(t.ctx, t.generator, d):
                inner += np.exp(2j * np.pi * ((chi.j * logs) % n) / n).sum()
            total += mu / euler_phi(fd) * inner
    else:
        raise ValueError(f"unknown method {method!r}")
    value = euler_phi(f) / n * total
    nearest = round(value.real)
    tol = _drift_tol(len(logs))
    if abs(value.imag) >= tol or abs(value.real - nearest) >= tol:
        raise NumericalDrift(f"count {value} not within {tol} of an integer")
    return int(nearest)


def primitive_witnesses(cfg: HyperplaneConfig, f: Optional[Factorization] = None,
                        cap: int = AVOIDANCE_CAP) -> Iterable[FieldElem]:
    f = f if f is not None else factorize(cfg.ctx.order - 1)
    for x in enumerate_avoidance_set(cfg, cap=cap):
        if not x.is_zero() and is_primitive(x, f):
            yield x


def brute_force_count(cfg: HyperplaneConfig, f: Optional[Factorization] = None, cap: int = AVOIDANCE_CAP) -> int:
    """Count primitive elements of the avoidance set by testing each one."""
    return sum(1 for _ in primitive_witnesses(cfg, f, cap))


def theorem31_lower_bound(q: int, r: int, f: Optional[Factorization] = None) -> float:
    """(q-1)^r - sqrt(3)(q-1)^(r/2) q^(ceil(3r/4)/2) W(q^r - 1); often negative."""
    f = f if f is not None else factorize(q**r - 1)
    return (q - 1) ** r - theorem22_bound(q, r) * squarefree_divisor_count(f)


def theorem31_report(q: int, r: int, count: int, f: Optional[Factorization] = None,
                     config: str = "") -> BoundReport:
    """Compare ((q^r-1)/phi(q^r-1)) * count with the lower bound (holds when strictly above)."""
    f = f if f is not None else factorize(q**r - 1)
    n = q**r - 1
    scaled = n / euler_phi(f) * count
    lower = theorem31_lower_bound(q, r, f)
    # the proof's intermediate line keeps the -1 and counts only d != 1
    sharper = (q - 1) ** r - 1 - theorem22_bound(q, r) * (squarefree_divisor_count(f) - 1)
    return BoundReport("scaled_primitive_count", scaled, lower, holds=scaled > lower, slack=scaled - lower,
                       metadata={"q": q, "r": r, "direction": "lower", "count": count, "W": squarefree_divisor_count(f),
                                 "proof_intermediate_bound": sharper, "vacuous": lower <= 0, "config": config})


# -- asymptotic conditions ---------------------------------------------------

def _workdps(r: int) -> int:
    return 40 + len(str(abs(int(r))))


def _ln_lhs1(q: int, r: int):
    lq = mpmath.log(q)
    return mpmath.log(3) / (2 * r) + ROBIN_EXPONENT * lq / mpmath.log(r * lq)


def _ln_rhs1(q: int, r: int):
    return mpmath.log(q - 1) / 2 - mpmath.mpf(ceil_3r_4(r)) * mpmath.log(q) / (2 * r)


def _ln_lhs_q3(r: int, q: int = 3):
    lq = mpmath.log(q)
    return ROBIN_EXPONENT * lq / mpmath.log(r * lq)


def _ln_rhs_q3(q: int = 3):
    return mpmath.log(q - 1) - mpmath.mpf(GAMMA_Q3) * mpmath.log(2)


def _check_domain(q: int, r: int) -> None:
    if q < 2 or r < 1:
        raise DomainError(f"need q >= 2 and r >= 1, got q={q}, r={r}")
    if r * math.log(q) <= 1:
        raise DomainError(f"log log q^r <= 0 for q={q}, r={r}")


def _report(name: str, ln_lhs, ln_rhs, meta: Dict) -> BoundReport:
    lhs, rhs = mpmath.exp(ln_lhs), mpmath.exp(ln_rhs)
    return BoundReport(name, float(lhs), float(rhs), holds=bool(ln_lhs <= ln_rhs), slack=float(rhs - lhs),
                       metadata={**meta, "log_lhs": float(ln_lhs), "log_rhs": float(ln_rhs),
                                 "log_margin": float(ln_rhs - ln_lhs)})


def inequality1(q: int, r: int) -> BoundReport:
    """(sqrt(3) q^(0.96 r / log log q^r))^(1/r) <= (q-1)^(1/2) / q^(ceil(3r/4)/(2r))."""
    _check_domain(q, r)
    with mpmath.workdps(_workdps(r)):
        return _report("inequality1", _ln_lhs1(q, r), _ln_rhs1(q, r), {"q": q, "r": str(r)})


def inequality1_lhs(q: int, r: int) -> float:
    _check_domain(q, r)
    with mpmath.workdps(_workdps(r)):
        return float(mpmath.exp(_ln_lhs1(q, r)))


def rhs_limit(q: int) -> float:
    """Limit of the right-hand side of the existence inequality: (q-1)^(1/2) / q^(3/8)."""
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    return math.sqrt(q - 1) / q**0.375


def lhs_limit_check(q: int, r_grid: Sequence[int]) -> Dict:
    """LHS of the existence inequality along an increasing grid: decreasing, above 1, gap to 1 shrinking."""
    values = [inequality1_lhs(q, r) for r in r_grid]
    gaps = [v - 1 for v in values]
    return {
        "q": q,
        "r_grid": [str(r) for r in r_grid],
        "lhs": values,
        "decreasing": all(a > b for a, b in zip(values, values[1:])),
        "above_one": all(v > 1 for v in values),
        "gap_shrinking": all(a > b for a, b in zip(gaps, gaps[1:])),
    }


def q3_rhs_constant() -> float:
    """(q - 1) / 2^gamma at q = 3."""
    return 2.0 / 2**GAMMA_Q3


def q3_condition(r: int) -> BoundReport:
    """(3^(0.96 r / log log 3^r))^(1/r) <= 2 / 2^gamma."""
    _check_domain(3, r)
    with mpmath.workdps(_workdps(r)):
        return _report("q3_condition", _ln_lhs_q3(r), _ln_rhs_q3(), {"q": 3, "r": str(r), "gamma": GAMMA_Q3})


def compare_with_prior_bound(q: int, r: int) -> BoundReport:
    """log of sqrt(3)(q-1)^(r/2) q^(ceil(3r/4)/2) against log of (2^r - 1) q^(r/2); holds if strictly smaller."""
    new = log_theorem22_bound(q, r)
    prior = math.log(2**r - 1) + r / 2 * math.log(q)
    return BoundReport("log_char_sum_bound_vs_prior", new, prior, holds=new < prior,
                       metadata={"q": q, "r": r, "prior_exceeds_trivial": prior > r * math.log(q - 1)})


def sharper_than_prior_from(q: int, horizon: int = 400) -> int:
    """Least r0 such that the new bound beats the prior one for all r0 <= r <= horizon."""
    last_fail = 1
    for r in range(2, horizon + 1):
        if not compare_with_prior_bound(q, r).holds:
            last_fail = r
    return last_fail + 1


def _condition(q: int, which: str) -> Tuple[Callable, Callable, int]:
    """(log margin function, report function, residue modulus)."""
    if which == "inequality1":
        def margin(r):
            with mpmath.workdps(_workdps(r)):
                return _ln_rhs1(q, r) - _ln_lhs1(q, r)
        return margin, (lambda r: inequality1(q, r)), 4
    if which == "q3_condition":
        if q != 3:
            raise ValueError("q3_condition only applies to q = 3")

        def margin(r):
            with mpmath.workdps(_workdps(r)):
                return _ln_rhs_q3() - _ln_lhs_q3(r)
        return margin, q3_condition, 1
    raise ValueError(f"unknown condition {which!r}")


def _first_hold(margin: Callable, start: int, step: int, r_cap: int) -> int:
    """Smallest r = start + step*m with margin(r) >= 0, assuming monotone in m."""
    if margin(start) >= 0:
        return start
    lo, width = 0, 1
    while margin(start + step * (lo + width)) < 0:
        lo += width
        width *= 2
        if start + step * (lo + width) > r_cap:
            raise NoThresholdBelowCap(f"condition still fails at r > {r_cap}")
    hi = lo + width  # fails at lo, holds at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if margin(start + step * mid) >= 0:
            hi = mid
        else:
            lo = mid
    return start + step * hi


def threshold_search(q: int, mode: str = ANALYTIC, condition: str = "auto",
                     r_cap: int = 10**1000, scan_prefix: int = 10_000) -> ThresholdResult:
    """Least r_min with the sufficient condition failing at r_min - 1 and holding from r_min on.

    ``condition="auto"`` uses the existence inequality, except for q = 3 where that
    inequality can never hold and the q = 3 condition is used instead.  The
    right-hand side of the existence inequality depends on r mod 4 through
    ceil(3r/4); within each residue class the margin is increasing in r, so
    each class is bisected separately and the latest crossing wins.
    """
    if q < 3:
        raise DomainError("threshold search needs q >= 3")
    note = ""
    if condition == "auto":
        if q == 3:
            condition = "q3_condition"
            note = ("the existence inequality yields no result for q = 3: its right-hand side tends to "
                    f"{rhs_limit(3):.6f} < 1 while the left-hand side exceeds 1; using the q = 3 condition")
        else:
            condition = "inequality1"
    if condition == "inequality1" and rhs_limit(q) <= 1:
        raise NoThresholdBelowCap(
            f"right-hand side of the existence inequality tends to {rhs_limit(q):.6f} <= 1 for q = {q}; "
            "the left-hand side stays above 1, so the inequality never holds")
    margin, report, modulus = _condition(q, condition)
    r0 = 2
    while r0 * math.log(q) <= 1:
        r0 += 1

    if mode == EXACT_SCAN:
        last_fail = None
        for r in range(r0, scan_prefix + 1):
            if not report(r).holds:
                last_fail = r
        r_min = None if last_fail == scan_prefix else (last_fail + 1 if last_fail else r0)
        trace = [report(r).to_dict() for r in (r0, scan_prefix)]
        return ThresholdResult(q, mode, condition, r_min, trace,
                               note or f"scanned r in [{r0}, {scan_prefix}]")
    if mode != ANALYTIC:
        raise ValueError(f"unknown mode {mode!r}")

    last_fail = r0 - 1
    per_class = {}
    for rho in range(modulus):
        start = r0 + (rho - r0) % modulus
        first = _first_hold(margin, start, modulus, r_cap)
        per_class[rho] = first
        last_fail = max(last_fail, first - modulus)
    r_min = last_fail + 1
    if not report(r_min).holds or (r_min - 1 >= r0 and report(r_min - 1).holds):
        raise AssertionError("threshold bracket failed verification")
    window = range(max(r0, r_min - 2 * modulus), r_min + 4 * modulus)
    trace = [report(r).to_dict() for r in window]
    for rho in range(modulus):
        ms = [margin(r) for r in window if r % modulus == rho]
        if any(a >= b for a, b in zip(ms, ms[1:])):
            raise AssertionError("margin not increasing within a residue class")
    if not all(report(r).holds for r in range(r_min, r_min + 4 * modulus)):
        raise AssertionError("condition fails just above r_min")
    result = ThresholdResult(q, mode, condition, r_min, trace, note)
    result.lhs_rhs_trace.insert(0, {"bracket": [str(r_min - 1), str(r_min)],
                                    "first_hold_by_residue": {str(k): str(v) for k, v in per_class.items()}})
    return result
