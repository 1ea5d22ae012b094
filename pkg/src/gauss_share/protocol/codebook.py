"""Random codebooks and joint-typicality reconciliation.

Typicality is letter typicality with a relative tolerance: a sequence is
epsilon-typical for pmf p when every letter count satisfies
|N(a)/n - p(a)| <= epsilon * p(a), which forces N(a) = 0 whenever p(a) = 0.
Joint typicality applies the same test to the pair alphabet.  A consequence
worth knowing when choosing instances: any pair letter with positive
probability below (1 - epsilon)/n can never be matched at blocklength n, so
typical sets of heavily skewed distributions are empty at small n and the
encoder's (1, 1) fallback dominates.

The encoder returns the row-major first jointly typical codeword label
(omega, nu), both 1-based; the decoder searches one omega row and returns the
smallest typical nu, falling back to 1.  Both directions are exact set
computations, not approximations, so tests can enumerate them independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import BudgetExceeded, DomainError, IndexOutOfRange

__all__ = [
    "Codebook",
    "build_codebook",
    "is_jointly_typical",
    "is_letter_typical",
    "wz_encode",
    "wz_decode",
]

_MAX_TABLE_CELLS = 100_000_000


def _letter_counts(seq: np.ndarray, n_letters: int) -> np.ndarray:
    return np.bincount(np.asarray(seq, dtype=np.int64), minlength=n_letters)


def _typical_from_counts(counts: np.ndarray, pmf: np.ndarray, n: int, epsilon: float) -> np.ndarray:
    """Vectorized relative-tolerance test; counts has the alphabet last."""
    target = n * pmf
    return np.all(np.abs(counts - target) <= epsilon * target, axis=-1)


def is_letter_typical(seq: np.ndarray, pmf: np.ndarray, epsilon: float) -> bool:
    """Relative letter typicality of one sequence against a 1-D pmf."""
    pmf = np.asarray(pmf, dtype=float)
    seq = np.asarray(seq, dtype=np.int64)
    counts = _letter_counts(seq, pmf.size)
    return bool(_typical_from_counts(counts, pmf, seq.size, float(epsilon)))


def is_jointly_typical(
    seq_a: np.ndarray, seq_b: np.ndarray, joint: np.ndarray, epsilon: float
) -> bool:
    """Pair typicality of aligned sequences against joint[a, b]."""
    joint = np.asarray(joint, dtype=float)
    a = np.asarray(seq_a, dtype=np.int64)
    b = np.asarray(seq_b, dtype=np.int64)
    if a.shape != b.shape:
        raise DomainError("paired sequences must share a length")
    pair = a * joint.shape[1] + b
    return is_letter_typical(pair, joint.ravel(), epsilon)


@dataclass
class Codebook:
    """Immutable table of i.i.d. codewords over the auxiliary alphabet.

    words[i, j] is the blocklength-n codeword labeled (omega=i+1, nu=j+1).
    joint_xv is the source/auxiliary joint p(x, v) the encoder tests against;
    its V marginal is the generating distribution.
    """

    words: np.ndarray  # (m_omega, m_nu, n) integer symbols
    joint_xv: np.ndarray  # (n_x, n_v)
    rv: float
    rv_prime: float
    _onehot: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def m_omega(self) -> int:
        return self.words.shape[0]

    @property
    def m_nu(self) -> int:
        return self.words.shape[1]

    @property
    def n(self) -> int:
        return self.words.shape[2]

    @property
    def n_v(self) -> int:
        return self.joint_xv.shape[1]

    @property
    def p_v(self) -> np.ndarray:
        return self.joint_xv.sum(axis=0)

    def word(self, omega: int, nu: int) -> np.ndarray:
        """Codeword for 1-based labels."""
        if not (1 <= omega <= self.m_omega and 1 <= nu <= self.m_nu):
            raise IndexOutOfRange(f"label ({omega}, {nu}) outside the codebook")
        return self.words[omega - 1, nu - 1]

    def _words_onehot(self) -> np.ndarray:
        """(m_omega * m_nu, n, n_v) indicator tensor, cached."""
        if self._onehot is None:
            flat = self.words.reshape(-1, self.n)
            eye = np.eye(self.n_v)
            self._onehot = eye[flat]
        return self._onehot


def _label_count(n: int, rate: float) -> int:
    if rate < 0:
        raise DomainError("codebook rates must be nonnegative")
    exponent = n * rate
    if exponent > 62.0:
        raise BudgetExceeded(f"2^{exponent:.4g} codebook labels cannot be enumerated")
    return max(1, math.ceil(2.0 ** exponent - 1e-12))


def build_codebook(
    joint_xv: np.ndarray,
    n: int,
    rv: float,
    rv_prime: float,
    seed_seq: np.random.SeedSequence,
) -> Codebook:
    """Draw ceil(2^(n rv)) x ceil(2^(n rv')) codewords i.i.d. from p_V."""
    joint_xv = np.asarray(joint_xv, dtype=float)
    n = int(n)
    if n < 1:
        raise DomainError("blocklength must be at least 1")
    m_omega = _label_count(n, float(rv))
    m_nu = _label_count(n, float(rv_prime))
    if m_omega * m_nu * n > _MAX_TABLE_CELLS:
        raise BudgetExceeded(
            f"codebook table would hold {m_omega * m_nu * n} cells"
        )
    p_v = joint_xv.sum(axis=0)
    rng = np.random.default_rng(seed_seq)
    words = rng.choice(p_v.size, size=(m_omega, m_nu, n), p=p_v / p_v.sum())
    return Codebook(words=words, joint_xv=joint_xv, rv=float(rv), rv_prime=float(rv_prime))


def wz_encode(codebook: Codebook, x_seq: np.ndarray, epsilon: float) -> tuple[int, int]:
    """First (row-major) codeword label jointly typical with x, else (1, 1)."""
    x = np.asarray(x_seq, dtype=np.int64)
    if x.shape != (codebook.n,):
        raise DomainError(f"x block must have length {codebook.n}")
    n_x, n_v = codebook.joint_xv.shape
    x_onehot = np.eye(n_x)[x]  # (n, n_x)
    counts = np.einsum(
        "ia,wib->wab", x_onehot, codebook._words_onehot()
    ).reshape(-1, n_x * n_v)
    mask = _typical_from_counts(
        counts, codebook.joint_xv.ravel(), codebook.n, float(epsilon)
    )
    hits = np.flatnonzero(mask)
    if hits.size == 0:
        return 1, 1
    first = int(hits[0])
    return first // codebook.m_nu + 1, first % codebook.m_nu + 1


def wz_decode(
    codebook: Codebook,
    y_seq: np.ndarray,
    omega: int,
    epsilon: float,
    joint_vy: np.ndarray,
) -> int:
    """Smallest nu whose codeword in bin omega is jointly typical with y, else 1.

    joint_vy is the single-letter pmf p(v, y) for the decoding coalition's
    flattened observation alphabet; y_seq holds flattened composite symbols.
    """
    if not 1 <= int(omega) <= codebook.m_omega:
        raise IndexOutOfRange(f"omega {omega} outside 1..{codebook.m_omega}")
    joint_vy = np.asarray(joint_vy, dtype=float)
    y = np.asarray(y_seq, dtype=np.int64)
    if y.shape != (codebook.n,):
        raise DomainError(f"y block must have length {codebook.n}")
    n_v, n_y = joint_vy.shape
    row = codebook.words[int(omega) - 1]  # (m_nu, n)
    v_onehot = np.eye(n_v)[row]  # (m_nu, n, n_v)
    y_onehot = np.eye(n_y)[y]  # (n, n_y)
    counts = np.einsum("wia,ib->wab", v_onehot, y_onehot).reshape(-1, n_v * n_y)
    mask = _typical_from_counts(counts, joint_vy.ravel(), codebook.n, float(epsilon))
    hits = np.flatnonzero(mask)
    return int(hits[0]) + 1 if hits.size else 1
