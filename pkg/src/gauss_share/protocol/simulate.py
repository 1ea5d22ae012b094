"""Monte Carlo driver for the quantize / reconcile / hash pipeline.

One trial: sample N = n*q continuous source symbols, quantize, run the
codebook encoder per block (the dealer keeps the selected codewords as its
secret material), let every authorized coalition decode its blocks, then
hash both sides' symbol strings down to k bits with a fresh public Toeplitz
seed.  Reported per coalition: how often the hashed secrets disagree and how
often individual blocks fail reconciliation.

Security accounting is exact or absent, never sampled: for small instances
the full joint distribution of (secret, public messages, unauthorized
observations) is enumerated in closed form, seed marginalized through the
column-space structure of the hash; larger instances report leakage as
unavailable rather than estimate it optimistically.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..access_structure import AccessStructure
from ..errors import (
    BudgetExceeded,
    InvalidConfig,
    KTooLarge,
    NumericError,
)
from ..source_model import SourceSpec
from . import info
from .bounds import (
    AchievableRateBound,
    ReconciliationErrorBound,
    achievable_rate_bound,
    bound_inputs,
    error_bound,
)
from .codebook import Codebook, build_codebook, wz_decode, wz_encode
from .hashing import (
    hash_matrix_for_input,
    privacy_amplify,
    seed_length,
    symbols_to_bits,
)
from .model import (
    DiscreteSourceModel,
    build_quantized_source,
    discretize_source,
    sample_source,
)

__all__ = [
    "ErrorStats",
    "MetricsReport",
    "ProtocolConfig",
    "run_protocol",
    "wilson_interval",
]

_EXACT_SWEEP_BUDGET = 10_000_000
_EXACT_TABLE_BUDGET = 20_000_000


@dataclass(frozen=True)
class ProtocolConfig:
    """Knobs of one protocol run; validated on construction."""

    l_quant: int
    n: int
    q: int
    epsilon: float
    rv: float
    rv_prime: float
    k: int
    seed: int
    trials: int
    rp_target: float | None = None
    exact_leakage: bool | None = None

    def __post_init__(self):
        checks = [
            (self.l_quant >= 2, "l_quant must be at least 2"),
            (self.n >= 1, "n must be at least 1"),
            (self.q >= 1, "q must be at least 1"),
            (0.0 < self.epsilon < 1.0, "epsilon must lie in (0, 1)"),
            (self.rv >= 0.0, "rv must be nonnegative"),
            (self.rv_prime >= 0.0, "rv_prime must be nonnegative"),
            (self.k >= 0, "k must be nonnegative"),
            (0 <= self.seed < 2**64, "seed must fit in 64 bits"),
            (self.trials >= 1, "trials must be at least 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise InvalidConfig(msg)
        if self.rp_target is not None:
            if not (self.rp_target > 0.0) or math.isinf(self.rp_target):
                raise InvalidConfig("rp_target must be a positive finite rate or None")

    @property
    def total_symbols(self) -> int:
        return self.n * self.q


def wilson_interval(successes: int, total: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if total == 0:
        return 0.0, 1.0
    p = successes / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (p + z2 / (2.0 * total)) / denom
    half = z * math.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / denom
    # the analytic endpoints at the extremes are exactly 0 and 1; rounding in
    # center - half would otherwise leave a stray ulp there
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == total else min(1.0, center + half)
    return lo, hi


def _fmt_subset(subset: tuple[int, ...]) -> str:
    return "{" + ",".join(str(p) for p in subset) + "}"


@dataclass(frozen=True)
class ErrorStats:
    """Per-coalition reconciliation and secret agreement counts."""

    subset: tuple[int, ...]
    trials: int
    blocks: int
    secret_errors: int
    block_errors: int
    trial_block_errors: int  # trials where at least one block failed

    @property
    def secret_error_rate(self) -> float:
        return self.secret_errors / self.trials

    @property
    def block_error_rate(self) -> float:
        return self.block_errors / self.blocks

    @property
    def trial_block_error_rate(self) -> float:
        return self.trial_block_errors / self.trials

    @property
    def secret_ci(self) -> tuple[float, float]:
        return wilson_interval(self.secret_errors, self.trials)

    @property
    def block_ci(self) -> tuple[float, float]:
        return wilson_interval(self.block_errors, self.blocks)


@dataclass(frozen=True)
class MetricsReport:
    config: ProtocolConfig
    m_omega: int
    m_nu: int
    per_authorized: tuple[ErrorStats, ...]
    leakage_mode: str  # "exact" or "unavailable"
    leakage: tuple[tuple[tuple[int, ...], float], ...] | None
    message_leakage: float | None  # I(S; M), bits
    secret_entropy: float | None  # H(S), bits
    uniformity_gap: float | None  # k - H(S), bits
    message_bits_per_symbol: float
    seed_bits_per_symbol: float
    public_rate_used: float
    reconciliation_bound: ReconciliationErrorBound
    rate_bound: AchievableRateBound

    @property
    def max_leakage(self) -> float | None:
        if self.leakage is None:
            return None
        return max(v for _, v in self.leakage)

    def to_text(self) -> str:
        cfg = self.config
        lines = [
            "protocol metrics",
            (
                f"  blocks: n={cfg.n} q={cfg.q} (N={cfg.total_symbols}), "
                f"bins={cfg.l_quant}, epsilon={cfg.epsilon}, seed={cfg.seed}, "
                f"trials={cfg.trials}"
            ),
            (
                f"  codebook: {self.m_omega} x {self.m_nu} labels "
                f"(rv={cfg.rv}, rv_prime={cfg.rv_prime})"
            ),
            (
                f"  public rate: message {self.message_bits_per_symbol:.6f} "
                f"+ hash seed {self.seed_bits_per_symbol:.6f} "
                f"= {self.public_rate_used:.6f} bits/symbol"
            ),
        ]
        for st in self.per_authorized:
            lo, hi = st.secret_ci
            blo, bhi = st.block_ci
            lines.append(
                f"  authorized {_fmt_subset(st.subset)}: "
                f"secret errors {st.secret_errors}/{st.trials} "
                f"({st.secret_error_rate:.4f}, 95% CI {lo:.4f}..{hi:.4f}); "
                f"block errors {st.block_errors}/{st.blocks} "
                f"({st.block_error_rate:.4f}, 95% CI {blo:.4f}..{bhi:.4f})"
            )
        lines.append(f"  leakage mode: {self.leakage_mode}")
        if self.leakage is not None:
            for subset, value in self.leakage:
                lines.append(
                    f"  unauthorized {_fmt_subset(subset)}: leakage {value:.12f} bits"
                )
            lines.append(f"  message leakage I(S;M): {self.message_leakage:.12f} bits")
            lines.append(f"  secret entropy: {self.secret_entropy:.12f} bits")
            lines.append(f"  uniformity gap: {self.uniformity_gap:.12f} bits")
        bound = self.reconciliation_bound
        lines.append(
            f"  reconciliation bound: {bound.total:.6g}"
            + (" (vacuous)" if bound.vacuous else "")
        )
        lines.append(
            f"  rate bound: rs_lower={self.rate_bound.rs_lower:.6g}, "
            f"rp_upper={self.rate_bound.rp_upper:.6g}"
            + (" (vacuous)" if self.rate_bound.vacuous else "")
        )
        return "\n".join(lines)


def _flatten_observation(y_bins: np.ndarray, subset: tuple[int, ...], l_quant: int) -> np.ndarray:
    """Composite observation index per symbol; member order most significant first."""
    flat = np.zeros(y_bins.shape[0], dtype=np.int64)
    for member in subset:
        flat = flat * l_quant + y_bins[:, member - 1]
    return flat


def run_protocol(
    spec: SourceSpec,
    structure: AccessStructure,
    config: ProtocolConfig,
    trial_log: str | None = None,
) -> MetricsReport:
    """Execute the protocol and collect the metrics report.

    Reproducible: the report is a pure function of (spec, structure, config).
    Raises BudgetExceeded when exact_leakage=True on an instance too large to
    enumerate, and InvalidConfig for inconsistent knobs.
    """
    model = build_quantized_source(spec, structure, config.l_quant, config.rp_target)
    n, q, k = config.n, config.q, config.k
    big_n = config.total_symbols
    n_v = model.n_v

    if k > 0 and (n_v & (n_v - 1)) != 0:
        raise InvalidConfig(
            f"hashing a {n_v}-letter auxiliary needs a power-of-two alphabet"
        )
    bits_per_symbol = n_v.bit_length() - 1 if k > 0 else 0
    if k > 0 and k > big_n * bits_per_symbol:
        raise KTooLarge(
            f"cannot extract {k} bits from {big_n * bits_per_symbol} input bits"
        )
    d = seed_length(big_n, n_v, k) if k > 0 else 0

    root = np.random.SeedSequence(config.seed)
    children = root.spawn(config.trials + 1)
    codebook = build_codebook(
        model.joint_xv(), n, config.rv, config.rv_prime, children[0]
    )
    joint_vy = {a: model.joint_vy(a) for a in structure.authorized}

    counts = {
        a: {"secret": 0, "block": 0, "trial_block": 0}
        for a in structure.authorized
    }
    log_rows: list[tuple[int, str, int]] = []

    for t in range(config.trials):
        rng = np.random.default_rng(children[1 + t])
        x, y = sample_source(spec, rng, big_n)
        x_bins, y_bins = discretize_source(
            model.x_quantizer, model.y_quantizers, x, y
        )
        v_blocks = []
        omegas = []
        for j in range(q):
            sl = slice(j * n, (j + 1) * n)
            omega, nu = wz_encode(codebook, x_bins[sl], config.epsilon)
            omegas.append(omega)
            v_blocks.append(codebook.word(omega, nu))
        v_dealer = np.concatenate(v_blocks)
        seed_bits = (
            rng.integers(0, 2, size=d, dtype=np.uint8) if d else np.zeros(0, np.uint8)
        )
        secret = privacy_amplify(v_dealer, seed_bits, k, n_v) if k else np.zeros(0, np.uint8)

        for a in structure.authorized:
            y_flat = _flatten_observation(y_bins, a, config.l_quant)
            mismatches = 0
            v_hat_blocks = []
            for j in range(q):
                sl = slice(j * n, (j + 1) * n)
                nu_hat = wz_decode(
                    codebook, y_flat[sl], omegas[j], config.epsilon, joint_vy[a]
                )
                v_hat = codebook.word(omegas[j], nu_hat)
                v_hat_blocks.append(v_hat)
                if not np.array_equal(v_hat, v_blocks[j]):
                    mismatches += 1
            v_hat_all = np.concatenate(v_hat_blocks)
            secret_hat = (
                privacy_amplify(v_hat_all, seed_bits, k, n_v)
                if k
                else np.zeros(0, np.uint8)
            )
            secret_ok = np.array_equal(secret_hat, secret)
            counts[a]["secret"] += 0 if secret_ok else 1
            counts[a]["block"] += mismatches
            counts[a]["trial_block"] += 1 if mismatches else 0
            log_rows.append((t, _fmt_subset(a), int(secret_ok)))

    per_authorized = tuple(
        ErrorStats(
            subset=a,
            trials=config.trials,
            blocks=config.trials * q,
            secret_errors=counts[a]["secret"],
            block_errors=counts[a]["block"],
            trial_block_errors=counts[a]["trial_block"],
        )
        for a in structure.authorized
    )

    leakage_mode, leakage, msg_leak, h_s, gap = _leakage_section(
        model, structure, codebook, config
    )

    m_bits = q * math.log2(codebook.m_omega) / big_n
    seed_rate = d / big_n
    report = MetricsReport(
        config=config,
        m_omega=codebook.m_omega,
        m_nu=codebook.m_nu,
        per_authorized=per_authorized,
        leakage_mode=leakage_mode,
        leakage=leakage,
        message_leakage=msg_leak,
        secret_entropy=h_s,
        uniformity_gap=gap,
        message_bits_per_symbol=m_bits,
        seed_bits_per_symbol=seed_rate,
        public_rate_used=m_bits + seed_rate,
        reconciliation_bound=error_bound(n, config.epsilon, bound_inputs(model, structure)),
        rate_bound=achievable_rate_bound(model, structure, n, q, config.epsilon),
    )
    if trial_log is not None:
        with open(trial_log, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["trial", "set", "success", "leakage_mode"])
            for row in log_rows:
                writer.writerow([row[0], row[1], row[2], leakage_mode])
    return report


# ---------------------------------------------------------------------------
# exact leakage enumeration
# ---------------------------------------------------------------------------


def _exact_budget_ok(model: DiscreteSourceModel, structure: AccessStructure, config: ProtocolConfig, codebook_cells: int) -> bool:
    u_max = max((len(u) for u in structure.unauthorized), default=0)
    l = config.l_quant
    sweep = (l ** (config.n * (1 + u_max))) * codebook_cells
    table = (2 ** min(config.k, 60)) * (l ** (config.total_symbols * (1 + u_max)))
    return sweep <= _EXACT_SWEEP_BUDGET and table <= _EXACT_TABLE_BUDGET


def _leakage_section(
    model: DiscreteSourceModel,
    structure: AccessStructure,
    codebook: Codebook,
    config: ProtocolConfig,
):
    """Decide the leakage mode and, when exact, enumerate the joint law."""
    if config.k == 0:
        zero = tuple((u, 0.0) for u in structure.unauthorized)
        return "exact", zero, 0.0, 0.0, 0.0

    binary = config.l_quant == 2 and model.n_v == 2
    budget_ok = _exact_budget_ok(
        model, structure, config, codebook.m_omega * codebook.m_nu
    )
    if config.exact_leakage is False:
        return "unavailable", None, None, None, None
    if config.exact_leakage is None:
        if not (config.total_symbols <= 8 and binary and budget_ok):
            return "unavailable", None, None, None, None
    elif not budget_ok:
        raise BudgetExceeded(
            "exact leakage enumeration exceeds the state budget for this instance"
        )

    leak, msg_leak, h_s = _exact_leakage(model, structure, codebook, config)
    gap = config.k - h_s
    if gap < -1e-9:
        raise NumericError(f"uniformity gap {gap} fell below zero")
    return "exact", leak, msg_leak, h_s, max(0.0, gap)


def _exact_leakage(
    model: DiscreteSourceModel,
    structure: AccessStructure,
    codebook: Codebook,
    config: ProtocolConfig,
):
    """Exact I(S; M, Y_U^N) per unauthorized set, seed marginalized.

    Enumerates every x block, maps it through the deterministic encoder, and
    propagates the block joint p(x^n, y^n) through q independent repetitions.
    The secret's conditional law given the dealer's codeword string is
    uniform on the column space of the input-dependent hash matrix, so the
    seed average is exact linear algebra over GF(2), not a seed sweep.
    """
    n, q, k = config.n, config.q, config.k
    n_v = model.n_v

    x_blocks = list(itertools.product(range(model.n_x), repeat=n))
    outcomes = []
    for xb in x_blocks:
        omega, nu = wz_encode(codebook, np.array(xb, dtype=np.int64), config.epsilon)
        word = tuple(int(s) for s in codebook.word(omega, nu))
        outcomes.append((omega, word))
    distinct = sorted(set(outcomes))
    out_id = {o: i for i, o in enumerate(distinct)}
    xb_out = np.array([out_id[o] for o in outcomes])
    n_out = len(distinct)

    # hash image per composite outcome combo, cached by dealer string
    image_cache: dict[tuple[int, ...], tuple[np.ndarray, float]] = {}

    def image_of(v_concat: tuple[int, ...]) -> tuple[np.ndarray, float]:
        if v_concat not in image_cache:
            bits = symbols_to_bits(np.array(v_concat, dtype=np.int64), n_v)
            outs, mass = hash_matrix_for_input(bits, k).image_distribution()
            shifts = 1 << np.arange(k - 1, -1, -1)
            ids = (outs * shifts).sum(axis=1)
            image_cache[v_concat] = (ids.astype(np.int64), mass)
        return image_cache[v_concat]

    combos = list(itertools.product(range(n_out), repeat=q))
    m_ids: dict[tuple[int, ...], int] = {}
    combo_m = []
    combo_images = []
    for combo in combos:
        blocks = [distinct[c] for c in combo]
        m_vec = tuple(b[0] for b in blocks)
        v_concat = tuple(itertools.chain.from_iterable(b[1] for b in blocks))
        combo_m.append(m_ids.setdefault(m_vec, len(m_ids)))
        combo_images.append(image_of(v_concat))

    per_u = []
    msg_leak = None
    h_s = None
    for u in structure.unauthorized:
        p_xy = model.joint_xy(u)
        p_block = p_xy
        for _ in range(n - 1):
            p_block = np.kron(p_block, p_xy)
        p_block_oy = np.zeros((n_out, p_block.shape[1]))
        np.add.at(p_block_oy, xb_out, p_block)
        p_full = p_block_oy
        for _ in range(q - 1):
            p_full = np.kron(p_full, p_block_oy)

        table = np.zeros((2**k, len(m_ids), p_full.shape[1]))
        for row, (m_id, (s_ids, mass)) in enumerate(zip(combo_m, combo_images)):
            # combo index in the kron product is the base-n_out number whose
            # most significant digit is block 0, matching combos ordering
            table[s_ids, m_id, :] += mass * p_full[row, :]

        h_smy = info.entropy(table)
        h_my = info.entropy(table.sum(axis=0))
        p_s = table.sum(axis=(1, 2))
        h_s_here = info.entropy(p_s)
        leak_u = h_s_here + h_my - h_smy

        if msg_leak is None:
            joint_sm = table.sum(axis=2)
            h_m = info.entropy(joint_sm.sum(axis=0))
            msg_leak = h_s_here + h_m - info.entropy(joint_sm)
            h_s = h_s_here

        if leak_u < msg_leak - 1e-9 or msg_leak < -1e-9:
            raise NumericError("leakage chain rule violated in exact enumeration")
        per_u.append((u, max(0.0, leak_u)))

    return tuple(per_u), max(0.0, msg_leak), h_s
