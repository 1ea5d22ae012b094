"""Monotone access structures over participant sets.

An access structure is an upward-closed family of subsets of {1..l} (whoever
contains an authorized set is authorized).  The complement family (everything
else, including the empty set) is the collusion family that must learn
nothing.  Subsets are bitmasks internally (participant p <-> bit p-1) and
sorted tuples of 1-based indices in the public API.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    DomainError,
    EmptyGenerator,
    IndexOutOfRange,
    ThresholdOutOfRange,
    TooManyParticipants,
)
from .source_model import SourceSpec, subset_snr

__all__ = [
    "AccessStructure",
    "ExtremalSets",
    "extremal_sets",
    "monotone_closure",
    "threshold_extremal_chain",
    "threshold_structure",
]

MAX_PARTICIPANTS = 20


def _mask_of(subset: Iterable[int]) -> int:
    mask = 0
    for p in subset:
        mask |= 1 << (p - 1)
    return mask


def _subset_of(mask: int) -> tuple[int, ...]:
    out = []
    p = 1
    while mask:
        if mask & 1:
            out.append(p)
        mask >>= 1
        p += 1
    return tuple(out)


def _popcounts(masks: np.ndarray, l: int) -> np.ndarray:
    counts = np.zeros(masks.shape, dtype=np.int64)
    for b in range(l):
        counts += (masks >> np.uint32(b)) & np.uint32(1)
    return counts


@dataclass(frozen=True)
class AccessStructure:
    """Monotone family of authorized subsets plus its complement.

    `minimal_sets` is the antichain of generators; `authorized_masks` and
    `unauthorized_masks` partition all 2^l bitmasks.  The tuple-of-tuples
    views are computed on demand (they can be large for l near the cap).
    """

    l: int
    minimal_sets: tuple[tuple[int, ...], ...]
    authorized_masks: np.ndarray
    unauthorized_masks: np.ndarray

    @property
    def authorized(self) -> tuple[tuple[int, ...], ...]:
        return tuple(_subset_of(int(m)) for m in self.authorized_masks)

    @property
    def unauthorized(self) -> tuple[tuple[int, ...], ...]:
        return tuple(_subset_of(int(m)) for m in self.unauthorized_masks)

    def is_authorized(self, subset: Iterable[int]) -> bool:
        mask = _mask_of(self._check_subset(subset))
        return any((mask & g) == g for g in map(_mask_of, self.minimal_sets))

    def _check_subset(self, subset: Iterable[int]) -> tuple[int, ...]:
        members = tuple(sorted(set(int(p) for p in subset)))
        if any(p < 1 or p > self.l for p in members):
            raise IndexOutOfRange(f"participants must lie in 1..{self.l}")
        return members


def _validate_l(l: int) -> int:
    l = int(l)
    if l < 1:
        raise DomainError("need at least one participant")
    if l > MAX_PARTICIPANTS:
        raise TooManyParticipants(
            f"l={l} exceeds the enumeration cap of {MAX_PARTICIPANTS}"
        )
    return l


def _build(l: int, minimal: tuple[tuple[int, ...], ...]) -> AccessStructure:
    all_masks = np.arange(2**l, dtype=np.uint32)
    member = np.zeros(all_masks.shape, dtype=bool)
    for gen in minimal:
        g = np.uint32(_mask_of(gen))
        member |= (all_masks & g) == g
    authorized = all_masks[member]
    unauthorized = all_masks[~member]
    authorized.flags.writeable = False
    unauthorized.flags.writeable = False
    return AccessStructure(
        l=l,
        minimal_sets=minimal,
        authorized_masks=authorized,
        unauthorized_masks=unauthorized,
    )


def monotone_closure(l: int, generator_sets: Iterable[Iterable[int]]) -> AccessStructure:
    """Upward closure of the given generator subsets.

    Generators must be nonempty subsets of 1..l; they are reduced to an
    antichain (supersets of other generators dropped) before storage.
    """
    l = _validate_l(l)
    gen_masks: list[int] = []
    for gen in generator_sets:
        members = tuple(sorted(set(int(p) for p in gen)))
        if not members:
            raise EmptyGenerator("generator sets must be nonempty")
        if any(p < 1 or p > l for p in members):
            raise IndexOutOfRange(f"generator members must lie in 1..{l}")
        gen_masks.append(_mask_of(members))
    if not gen_masks:
        raise EmptyGenerator("at least one generator set is required")

    # Antichain reduction: keep a generator only if no other is a subset of it.
    unique = sorted(set(gen_masks), key=lambda m: (bin(m).count("1"), _subset_of(m)))
    kept: list[int] = []
    for m in unique:
        if not any((m & k) == k for k in kept):
            kept.append(m)
    minimal = tuple(sorted((_subset_of(m) for m in kept), key=lambda s: (len(s), s)))
    return _build(l, minimal)


def threshold_structure(l: int, t: int) -> AccessStructure:
    """All subsets of size >= t are authorized."""
    l = _validate_l(l)
    t = int(t)
    if t < 1 or t > l:
        raise ThresholdOutOfRange(f"t={t} outside 1..{l}")
    all_masks = np.arange(2**l, dtype=np.uint32)
    sizes = _popcounts(all_masks, l)
    authorized = all_masks[sizes >= t]
    unauthorized = all_masks[sizes < t]
    authorized.flags.writeable = False
    unauthorized.flags.writeable = False
    minimal = tuple(
        sorted((_subset_of(int(m)) for m in all_masks[sizes == t]), key=lambda s: (len(s), s))
    )
    return AccessStructure(
        l=l,
        minimal_sets=minimal,
        authorized_masks=authorized,
        unauthorized_masks=unauthorized,
    )


@dataclass(frozen=True)
class ExtremalSets:
    """The two subsets that determine capacity.

    min_authorized: authorized set with the least effective SNR (weakest
    coalition that must still reconstruct).  max_unauthorized: unauthorized
    set with the greatest effective SNR (strongest coalition that must stay
    ignorant).  Ties are broken by smaller cardinality, then lexicographic
    order, so results are deterministic.
    """

    min_authorized: tuple[int, ...]
    max_unauthorized: tuple[int, ...]
    snr_authorized: float
    snr_unauthorized: float


def extremal_sets(structure: AccessStructure, spec: SourceSpec) -> ExtremalSets:
    """Exhaustive argmin/argmax of the effective SNR over both families."""
    if spec.l != structure.l:
        raise IndexOutOfRange(
            f"source has {spec.l} participants, structure has {structure.l}"
        )

    best_a: tuple | None = None
    for mask in structure.authorized_masks:
        subset = _subset_of(int(mask))
        key = (subset_snr(spec, subset), len(subset), subset)
        if best_a is None or key < best_a:
            best_a = key
    best_u: tuple | None = None
    for mask in structure.unauthorized_masks:
        subset = _subset_of(int(mask))
        key = (-subset_snr(spec, subset), len(subset), subset)
        if best_u is None or key < best_u:
            best_u = key

    assert best_a is not None and best_u is not None  # both families are nonempty
    return ExtremalSets(
        min_authorized=best_a[2],
        max_unauthorized=best_u[2],
        snr_authorized=best_a[0],
        snr_unauthorized=-best_u[0],
    )


def threshold_extremal_chain(spec: SourceSpec, l: int) -> list[ExtremalSets]:
    """Extremal sets of every threshold structure t = 1..l, as nested chains.

    Sorting participants by absolute gain makes the extremal sets explicit:
    for threshold t the weakest authorized coalition is the t participants of
    smallest absolute gain, and the strongest excluded coalition is the t-1
    participants of largest absolute gain.  Consecutive entries are nested,
    which is what makes threshold capacities comparable by a single ratio
    test.  Requires gains mode (per-participant observations).
    """
    if spec.mode != "gains":
        raise DomainError("threshold chains require a gains-mode source")
    l = _validate_l(l)
    if spec.l != l:
        raise IndexOutOfRange(f"source has {spec.l} participants, expected {l}")

    order = sorted(range(1, l + 1), key=lambda p: (abs(float(spec.gains[p - 1])), p))
    chain = []
    for t in range(1, l + 1):
        a_members = tuple(sorted(order[:t]))
        u_members = tuple(sorted(order[l - (t - 1):])) if t > 1 else ()
        chain.append(
            ExtremalSets(
                min_authorized=a_members,
                max_unauthorized=u_members,
                snr_authorized=subset_snr(spec, a_members),
                snr_unauthorized=subset_snr(spec, u_members),
            )
        )
    return chain
