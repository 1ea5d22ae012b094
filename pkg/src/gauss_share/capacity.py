"""Secret-sharing capacity of Gaussian sources over a rate-limited public channel.

Everything here reduces to two scalar functions of the conditional variance
s = sigma2_{X|V} of the dealer's variable given the Gaussian auxiliary:

    public_rate(s, o_a)      -- public bits/symbol consumed by the auxiliary
    secret_rate(s, o_a, o_u) -- secret bits/symbol it separates

with o_a, o_u the effective SNR coefficients of the weakest authorized and
strongest unauthorized coalitions.  The capacity at public rate rp is the
closed form obtained by substituting the optimal s (optimal_conditional_variance);
minimax_oracle re-derives it by brute force over a s-grid, in both min-min-max
and max-min-min order, to verify the saddle-point structure numerically.
All rates are bits per source symbol, all logs base 2.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .access_structure import (
    AccessStructure,
    ExtremalSets,
    extremal_sets,
    threshold_extremal_chain,
)
from .errors import (
    DomainError,
    EmptyGrid,
    IndexOutOfRange,
    NegativeRate,
    NumericError,
)
from .source_model import SourceSpec, derive_gain_vector

__all__ = [
    "UNLIMITED",
    "UnlimitedRate",
    "CapacityPoint",
    "RateRegion",
    "SaddleCheck",
    "ThresholdComparison",
    "is_unlimited",
    "minimax_oracle",
    "optimal_conditional_variance",
    "public_rate",
    "rate_region",
    "saddle_check",
    "secret_capacity",
    "secret_rate",
    "thread_cap",
    "threshold_compare",
    "verify_rate_formulas",
]


class UnlimitedRate:
    """Tagged singleton for an unconstrained public channel (never a float)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNLIMITED"


UNLIMITED = UnlimitedRate()


def is_unlimited(rp) -> bool:
    return isinstance(rp, UnlimitedRate)


def _check_finite_rate(rp) -> float:
    if is_unlimited(rp):
        raise DomainError("this operation needs a finite public rate")
    rp = float(rp)
    if math.isnan(rp) or math.isinf(rp):
        raise DomainError("non-finite public rate; use UNLIMITED for an unbounded channel")
    if rp < 0:
        raise NegativeRate("public rate must be nonnegative")
    return rp


def _check_rate(rp):
    if is_unlimited(rp):
        return UNLIMITED
    return _check_finite_rate(rp)


def _check_sigma(sigma2_cond: float, spec: SourceSpec) -> float:
    s = float(sigma2_cond)
    if not (0.0 < s <= spec.sigma2_x):
        raise DomainError(
            f"conditional variance must lie in (0, {spec.sigma2_x}], got {s}"
        )
    return s


def _rate_gap(sigma2_cond: float, snr: float, spec: SourceSpec) -> float:
    """(1/2) log2((sigma2_x*snr + 1) / (sigma2_cond*snr + 1)); 0 at snr=0."""
    sx = spec.sigma2_x
    return 0.5 * math.log2((sx * snr + 1.0) / (sigma2_cond * snr + 1.0))


def public_rate(sigma2_cond: float, snr_authorized: float, spec: SourceSpec) -> float:
    """Public communication rate consumed by an auxiliary of conditional variance s.

    Equals (1/2) log2(sigma2_x / s) minus the part of the auxiliary already
    visible to the authorized coalition.  Nonnegative and nonincreasing in s.
    """
    s = _check_sigma(sigma2_cond, spec)
    return 0.5 * math.log2(spec.sigma2_x / s) - _rate_gap(s, snr_authorized, spec)


def secret_rate(
    sigma2_cond: float, snr_authorized: float, snr_unauthorized: float, spec: SourceSpec
) -> float:
    """Secret rate separated by an auxiliary of conditional variance s.

    Difference of the authorized and unauthorized coalitions' information
    advantage about the auxiliary; may be negative for degraded pairs
    (snr_authorized < snr_unauthorized).
    """
    s = _check_sigma(sigma2_cond, spec)
    return _rate_gap(s, snr_authorized, spec) - _rate_gap(s, snr_unauthorized, spec)


def optimal_conditional_variance(spec: SourceSpec, snr_authorized: float, rp) -> float:
    """The conditional variance at which public_rate exactly spends rp.

    Closed form: sigma2_x / (sigma2_x * snr_a * (2^(2 rp) - 1) + 2^(2 rp)).
    rp = 0 returns sigma2_x exactly.
    """
    rp = _check_finite_rate(rp)
    sx = spec.sigma2_x
    growth = 2.0 ** (2.0 * rp)
    return sx / (sx * float(snr_authorized) * (growth - 1.0) + growth)


@dataclass(frozen=True)
class CapacityPoint:
    """One point of the secret-capacity curve.

    sigma2_star is the maximizing conditional variance; None when rp is
    UNLIMITED (the supremum is approached as s -> 0+, never attained).
    """

    rp: "float | UnlimitedRate"
    cs: float
    sigma2_star: float | None
    extremal: ExtremalSets


@dataclass(frozen=True)
class RateRegion:
    points: tuple[CapacityPoint, ...]
    cs_infinity: float


def _capacity_value(spec: SourceSpec, ext: ExtremalSets, rp) -> float:
    """Closed-form capacity given precomputed extremal SNRs (clamped at 0)."""
    sx = spec.sigma2_x
    o_a, o_u = ext.snr_authorized, ext.snr_unauthorized
    if o_a <= o_u:
        return 0.0  # degraded: the clamp is active for every rp
    den = sx * o_u + 1.0
    if is_unlimited(rp):
        num = sx * o_a + 1.0
    else:
        if rp == 0.0:
            return 0.0
        # num = (sx*o_a + 1) - sx*(o_a - o_u)*2^(-2 rp): monotone in rp even
        # under rounding, which keeps swept regions exactly nondecreasing.
        shrink = 2.0 ** (-2.0 * rp)
        num = (sx * o_a + 1.0) - sx * (o_a - o_u) * shrink
    return max(0.0, 0.5 * math.log2(num / den))


def secret_capacity(spec: SourceSpec, structure: AccessStructure, rp) -> CapacityPoint:
    """Secret capacity at public rate rp (float >= 0 or UNLIMITED)."""
    rp = _check_rate(rp)
    ext = extremal_sets(structure, spec)
    cs = _capacity_value(spec, ext, rp)
    sigma2_star = (
        None
        if is_unlimited(rp)
        else optimal_conditional_variance(spec, ext.snr_authorized, rp)
    )
    return CapacityPoint(rp=rp, cs=cs, sigma2_star=sigma2_star, extremal=ext)


def thread_cap() -> int:
    """Worker cap from GAUSS_SHARE_THREADS (0 or unset = auto)."""
    raw = os.environ.get("GAUSS_SHARE_THREADS", "0").strip()
    try:
        n = int(raw)
    except ValueError as exc:
        raise DomainError(f"GAUSS_SHARE_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise DomainError("GAUSS_SHARE_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def rate_region(
    spec: SourceSpec, structure: AccessStructure, rp_grid: Sequence[float]
) -> RateRegion:
    """Capacity sweep over a strictly increasing nonnegative rp grid."""
    grid = [float(r) for r in rp_grid]
    if not grid:
        raise EmptyGrid("rp grid must contain at least one point")
    if any(r < 0 or math.isnan(r) or math.isinf(r) for r in grid):
        raise DomainError("rp grid values must be finite and nonnegative")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("rp grid must be strictly increasing")

    ext = extremal_sets(structure, spec)

    def at(rp: float) -> CapacityPoint:
        return CapacityPoint(
            rp=rp,
            cs=_capacity_value(spec, ext, rp),
            sigma2_star=optimal_conditional_variance(spec, ext.snr_authorized, rp),
            extremal=ext,
        )

    workers = min(thread_cap(), len(grid))
    if workers > 1 and len(grid) >= 256:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = tuple(pool.map(at, grid))
    else:
        points = tuple(at(rp) for rp in grid)
    return RateRegion(points=points, cs_infinity=_capacity_value(spec, ext, UNLIMITED))


class Dominance:
    """Verdict tokens for threshold comparisons."""

    AT_LEAST = "at_least"  # cs(t) >= cs(t+i) for every rp
    AT_MOST = "at_most"  # cs(t) <= cs(t+i) for every rp


@dataclass(frozen=True)
class ThresholdComparison:
    t: int
    i: int
    rp: "float | UnlimitedRate"
    lhs: float | None  # ratio-test left side; None when the fallback was used
    rhs: float
    verdict: str  # Dominance token
    cs_t: float
    cs_t_plus_i: float
    used_fallback: bool


def threshold_compare(
    spec: SourceSpec, l: int, t: int, i: int, rp
) -> ThresholdComparison:
    """Compare threshold-t capacity against threshold-(t+i) via the ratio test.

    The verdict holds for every public rate; the supplied rp is used for the
    internal cross-check against direct capacity evaluation.  When raising
    the threshold leaves the weakest authorized SNR unchanged (zero ratio
    denominator) the verdict falls back to that direct comparison.
    """
    rp = _check_rate(rp)
    t, i = int(t), int(i)
    if t < 1 or i < 1 or t + i > int(l):
        raise IndexOutOfRange(f"need 1 <= t, 1 <= i, t+i <= l; got t={t}, i={i}, l={l}")
    chain = threshold_extremal_chain(spec, l)
    lo, hi = chain[t - 1], chain[t + i - 1]
    sx = spec.sigma2_x

    cs_t = _capacity_value(spec, lo, rp)
    cs_ti = _capacity_value(spec, hi, rp)

    rhs = (1.0 + sx * lo.snr_unauthorized) / (1.0 + sx * lo.snr_authorized)
    lhs_den = hi.snr_authorized - lo.snr_authorized
    if lhs_den == 0.0:
        lhs = None
        used_fallback = True
        verdict = Dominance.AT_LEAST if cs_t >= cs_ti else Dominance.AT_MOST
    else:
        lhs = (hi.snr_unauthorized - lo.snr_unauthorized) / lhs_den
        used_fallback = False
        verdict = Dominance.AT_LEAST if lhs >= rhs else Dominance.AT_MOST

    # The ratio test and direct evaluation must never disagree beyond noise.
    if verdict == Dominance.AT_LEAST and cs_t < cs_ti - 1e-9:
        raise NumericError("ratio test says at_least but capacities disagree")
    if verdict == Dominance.AT_MOST and cs_t > cs_ti + 1e-9:
        raise NumericError("ratio test says at_most but capacities disagree")

    return ThresholdComparison(
        t=t,
        i=i,
        rp=rp,
        lhs=lhs,
        rhs=rhs,
        verdict=verdict,
        cs_t=cs_t,
        cs_t_plus_i=cs_ti,
        used_fallback=used_fallback,
    )


@dataclass(frozen=True)
class SaddleCheck:
    """Brute-force minimax evaluation next to the closed form."""

    rp: "float | UnlimitedRate"
    grid_size: int
    min_min_max: float
    max_min_min: float
    closed_form: float
    extremal: ExtremalSets

    @property
    def saddle_gap(self) -> float:
        return abs(self.min_min_max - self.max_min_min)

    @property
    def oracle_gap(self) -> float:
        return abs(self.min_min_max - self.closed_form)


def saddle_check(
    spec: SourceSpec, structure: AccessStructure, rp, grid_size: int = 10_000
) -> SaddleCheck:
    """Grid evaluation of both optimization orders of the converse.

    min-min-max: for each authorized/unauthorized pair, maximize the secret
    rate over the conditional variances feasible at rp, then minimize over
    pairs.  max-min-min: swap the order, with feasibility anchored at the
    weakest authorized coalition.  The grid is log-spaced on
    [sigma2_x * 1e-8, sigma2_x] and always contains sigma2_x (feasible at
    every rp, where the objective is exactly zero) plus the analytic
    feasibility boundary; the boundary point dominates, so the grid verifies
    rather than finds the optimum.
    """
    rp = _check_rate(rp)
    grid_size = int(grid_size)
    if grid_size < 100:
        raise DomainError("grid_size must be at least 100")

    ext = extremal_sets(structure, spec)
    sx = spec.sigma2_x
    snr_a = np.array(
        [derive_gain_vector(spec, s).snr for s in structure.authorized], dtype=float
    )
    snr_u = np.array(
        [derive_gain_vector(spec, s).snr for s in structure.unauthorized], dtype=float
    )
    grid = np.geomspace(sx * 1e-8, sx, grid_size)

    def gap_matrix(svec: np.ndarray, snr: np.ndarray) -> np.ndarray:
        # (len(snr), len(svec)) array of _rate_gap values
        num = sx * snr[:, None] + 1.0
        den = svec[None, :] * snr[:, None] + 1.0
        return 0.5 * np.log2(num / den)

    def boundary(snr: float) -> float:
        if is_unlimited(rp):
            return float(grid[0])
        return optimal_conditional_variance(spec, snr, rp)

    # min over pairs of (max over feasible s of secret rate)
    gap_u_grid = gap_matrix(grid, snr_u)  # reused across all A
    per_a_max = np.empty(snr_a.shape, dtype=float)
    for j, oa in enumerate(snr_a):
        s_edge = boundary(float(oa))
        feasible = grid >= s_edge
        svals = np.concatenate([grid[feasible], [s_edge]])
        gap_a = 0.5 * np.log2((sx * oa + 1.0) / (svals * oa + 1.0))
        gap_u = np.concatenate(
            [gap_u_grid[:, feasible], gap_matrix(np.array([s_edge]), snr_u)], axis=1
        )
        per_a_max[j] = np.max(gap_a - np.max(gap_u, axis=0))
    min_min_max = float(np.min(per_a_max))

    # max over s feasible at the weakest authorized coalition of
    # (min over pairs of secret rate); separable into min_A - max_U.
    s_edge = boundary(float(ext.snr_authorized))
    feasible = grid >= s_edge
    svals = np.concatenate([grid[feasible], [s_edge]])
    inner = np.min(gap_matrix(svals, snr_a), axis=0) - np.max(
        gap_matrix(svals, snr_u), axis=0
    )
    max_min_min = float(np.max(inner))

    return SaddleCheck(
        rp=rp,
        grid_size=grid_size,
        min_min_max=min_min_max,
        max_min_min=max_min_min,
        closed_form=_capacity_value(spec, ext, rp),
        extremal=ext,
    )


def minimax_oracle(
    spec: SourceSpec, structure: AccessStructure, rp, grid_size: int = 10_000
) -> float:
    """Brute-force capacity value; raises if the saddle orders disagree."""
    check = saddle_check(spec, structure, rp, grid_size)
    if check.saddle_gap > 1e-9 * max(1.0, abs(check.min_min_max)):
        raise NumericError(
            f"saddle orders disagree: {check.min_min_max!r} vs {check.max_min_min!r}"
        )
    return check.min_min_max


@dataclass(frozen=True)
class PairRates:
    authorized: tuple[int, ...]
    unauthorized: tuple[int, ...]
    logdet: float
    scalar: float


@dataclass(frozen=True)
class RateFormulaReport:
    sigma2_cond: float
    rp_logdet: float
    rp_scalar: float
    rs_logdet: float
    rs_scalar: float
    per_authorized: tuple[tuple[tuple[int, ...], float, float], ...]
    per_pair: tuple[PairRates, ...]
    max_rel_err: float


def _logdet2(matrix: np.ndarray) -> float:
    """log2 det of a (possibly 0x0) positive definite matrix."""
    if matrix.size == 0:
        return 0.0
    sign, logdet = np.linalg.slogdet(matrix)
    if sign <= 0:
        raise NumericError("expected a positive determinant")
    return float(logdet / math.log(2.0))


def verify_rate_formulas(
    spec: SourceSpec, structure: AccessStructure, sigma2_cond: float
) -> RateFormulaReport:
    """Compute the public and secret rates along two independent routes.

    Route one works with matrix log-determinants of the whitened observation
    covariances H S H^T + I (differential-entropy bookkeeping); route two uses
    the scalar effective-SNR forms.  They are equal by the rank-one
    determinant identity; disagreement beyond 1e-9 relative raises
    NumericError.  The public rate is the maximum over authorized sets, the
    secret rate the minimum over authorized/unauthorized pairs.
    """
    s = _check_sigma(sigma2_cond, spec)
    sx = spec.sigma2_x

    def logdet_form(subset: tuple[int, ...], var: float) -> float:
        h = derive_gain_vector(spec, subset).gains
        mat = var * np.outer(h, h) + np.eye(h.size)
        return _logdet2(mat)

    def visible_gap(subset: tuple[int, ...]) -> tuple[float, float]:
        """(logdet, scalar) forms of the auxiliary information visible to subset."""
        snr = derive_gain_vector(spec, subset).snr
        logdet = 0.5 * (logdet_form(subset, sx) - logdet_form(subset, s))
        scalar = _rate_gap(s, snr, spec)
        return logdet, scalar

    rel_errs = [0.0]

    def record(a: float, b: float) -> None:
        rel_errs.append(abs(a - b) / max(1.0, abs(a), abs(b)))

    base = 0.5 * math.log2(sx / s)
    per_authorized = []
    a_gaps: dict[tuple[int, ...], tuple[float, float]] = {}
    for subset in structure.authorized:
        gap_ld, gap_sc = visible_gap(subset)
        a_gaps[subset] = (gap_ld, gap_sc)
        rp_ld, rp_sc = base - gap_ld, base - gap_sc
        record(rp_ld, rp_sc)
        per_authorized.append((subset, rp_ld, rp_sc))

    u_gaps = {subset: visible_gap(subset) for subset in structure.unauthorized}
    per_pair = []
    for a_subset, (a_ld, a_sc) in a_gaps.items():
        for u_subset, (u_ld, u_sc) in u_gaps.items():
            rs_ld, rs_sc = a_ld - u_ld, a_sc - u_sc
            record(rs_ld, rs_sc)
            per_pair.append(
                PairRates(
                    authorized=a_subset,
                    unauthorized=u_subset,
                    logdet=rs_ld,
                    scalar=rs_sc,
                )
            )

    max_rel_err = max(rel_errs)
    if max_rel_err > 1e-9:
        raise NumericError(
            f"log-det and scalar rate formulas disagree (rel err {max_rel_err:.3e})"
        )
    return RateFormulaReport(
        sigma2_cond=s,
        rp_logdet=max(rp for _, rp, _ in per_authorized),
        rp_scalar=max(rp for _, _, rp in per_authorized),
        rs_logdet=min(p.logdet for p in per_pair),
        rs_scalar=min(p.scalar for p in per_pair),
        per_authorized=tuple(per_authorized),
        per_pair=tuple(per_pair),
        max_rel_err=max_rel_err,
    )
