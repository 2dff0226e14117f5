"""Transmit strategies: per-slot deterministic and Gaussian beams.

A strategy assigns each slot a deterministic beam (direction + power) and a
rank-1 Gaussian beam (direction + power).  Beams are built from a named
choice of candidate directions and a simplex power allocation: within each
slot component the sqrt-weighted direction combination is renormalized and
the component receives that lambda-mass times T * p_max, so every allocation
spends exactly the average power budget.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .directions import DirectionCatalog
from .scenario import ScenarioConfig
from .ula import UlaSpec

__all__ = [
    "TransmitStrategy",
    "ChoiceSpec",
    "SimplexAllocation",
    "get_choice",
    "CHOICE_IDS",
    "build_strategy",
    "enumerate_allocations",
    "allocations_for_choice",
]

# per-slot direction labels for each family
_G_DET = ("rs1", "rs2", "v1_t1", "v1_t2")
_G_GAUSS = ("rc1",)
_S_DET = ("rs1", "rs2", "v1_t1", "v2_t1", "v1_t2", "v2_t2")
_S_GAUSS = ()
_GAUSS_DET = ()
_GAUSS_GAUSS = ("rs1", "rs2", "v1_t1", "v2_t1", "rc1")

CHOICE_IDS = ("G1", "G2", "G3", "G4", "S1", "S2", "S3", "S4", "S5", "S6", "GAUSS")


@dataclass(frozen=True)
class TransmitStrategy:
    """Per-slot beams; directions are rows, one per slot."""

    tx_spec: UlaSpec
    det_directions: np.ndarray  # (T, M) complex
    det_powers: np.ndarray  # (T,)
    gauss_directions: np.ndarray  # (T, M) complex
    gauss_powers: np.ndarray  # (T,)

    @property
    def num_slots(self) -> int:
        return len(self.det_powers)

    @property
    def average_power(self) -> float:
        return float((self.det_powers.sum() + self.gauss_powers.sum()) / self.num_slots)

    def mean_covariance(self) -> np.ndarray:
        """E[R_X]: deterministic outer products plus Gaussian beam covariances."""
        m = self.tx_spec.num_elements
        k = np.zeros((m, m), dtype=complex)
        for t in range(self.num_slots):
            s = self.det_directions[t]
            c = self.gauss_directions[t]
            k += self.det_powers[t] * np.outer(s, s.conj())
            k += self.gauss_powers[t] * np.outer(c, c.conj())
        return k / self.num_slots


@dataclass(frozen=True)
class ChoiceSpec:
    """A named strategy family: slot layouts, nullified entries, ties."""

    choice_id: str
    det_layout: tuple  # per slot: ((lambda_index, label), ...)
    gauss_layout: tuple
    active_lambda_mask: tuple  # True where the allocation may be non-zero
    tie_groups: tuple = ()  # each group: lambda indices forced equal

    @property
    def num_lambdas(self) -> int:
        return len(self.active_lambda_mask)


@dataclass(frozen=True)
class SimplexAllocation:
    """Non-negative power fractions over candidate directions, summing to 1."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        object.__setattr__(self, "lam", lam)
        if np.any(lam < 0):
            raise ValueError("allocation entries must be >= 0")
        if abs(lam.sum() - 1.0) > 1e-12:
            raise ValueError("allocation must sum to 1")


def _slot_layouts(det_labels, gauss_labels, num_slots):
    det_layout, gauss_layout = [], []
    idx = 0
    for _ in range(num_slots):
        det_layout.append(tuple((idx + k, label) for k, label in enumerate(det_labels)))
        idx += len(det_labels)
        gauss_layout.append(tuple((idx + k, label) for k, label in enumerate(gauss_labels)))
        idx += len(gauss_labels)
    return tuple(det_layout), tuple(gauss_layout), idx


def get_choice(choice_id: str, num_slots: int = 2) -> ChoiceSpec:
    """Construct a named choice for the given number of slots.

    The per-slot direction lists replicate across slots; masked labels are
    nullified in every slot.  S5 is inherently two-slot (it nulls different
    labels in each half) and S6 ties each slot to the first.
    """
    choice_id = choice_id.upper()
    if choice_id not in CHOICE_IDS:
        raise ValueError(f"unknown choice id '{choice_id}'")
    if num_slots < 1:
        raise ValueError("num_slots must be >= 1")

    if choice_id.startswith("G"):
        det_labels, gauss_labels = _G_DET, _G_GAUSS
        masked = {
            "G1": (),
            "G2": ("rc1",),
            "G3": ("v1_t1", "v1_t2"),
            "G4": ("rs1", "rs2"),
        }[choice_id]
    elif choice_id == "GAUSS":
        det_labels, gauss_labels = _GAUSS_DET, _GAUSS_GAUSS
        masked = ()
    else:
        det_labels, gauss_labels = _S_DET, _S_GAUSS
        masked = {
            "S1": (),
            "S2": ("rs1", "rs2"),
            "S3": ("v1_t1", "v2_t1", "v1_t2", "v2_t2"),
            "S4": ("v2_t1", "v2_t2"),
            "S5": (),
            "S6": (),
        }[choice_id]

    det_layout, gauss_layout, total = _slot_layouts(det_labels, gauss_labels, num_slots)
    mask = [True] * total
    for slot_entries in det_layout + gauss_layout:
        for idx, label in slot_entries:
            if label in masked:
                mask[idx] = False

    tie_groups = ()
    if choice_id == "S5":
        if num_slots != 2:
            raise ValueError("S5 is defined for two slots only")
        # first half avoids target-1 beams, second half avoids target-2 beams
        for idx, label in det_layout[0]:
            if label in ("v1_t1", "v2_t1"):
                mask[idx] = False
        for idx, label in det_layout[1]:
            if label in ("v1_t2", "v2_t2"):
                mask[idx] = False
    if choice_id == "S6":
        per_slot = len(det_labels)
        tie_groups = tuple(
            tuple(slot * per_slot + k for slot in range(num_slots)) for k in range(per_slot)
        )

    return ChoiceSpec(
        choice_id=choice_id,
        det_layout=det_layout,
        gauss_layout=gauss_layout,
        active_lambda_mask=tuple(mask),
        tie_groups=tie_groups,
    )


def _combine(entries, lam, catalog: DirectionCatalog, dim: int):
    """sqrt-weighted sum of the active directions, plus its lambda-mass."""
    combo = np.zeros(dim, dtype=complex)
    mass = 0.0
    for idx, label in entries:
        if lam[idx] > 0:
            combo += np.sqrt(lam[idx]) * catalog[label]
            mass += lam[idx]
    return combo, mass


def build_strategy(
    choice: ChoiceSpec,
    alloc: SimplexAllocation,
    catalog: DirectionCatalog,
    scenario: ScenarioConfig,
) -> TransmitStrategy:
    """Realize a choice + allocation as per-slot beams.

    Raises ValueError when the allocation puts mass on masked entries,
    violates tie constraints, or combines directions into a (near-)zero
    vector while carrying power.
    """
    lam = alloc.lam
    if lam.shape != (choice.num_lambdas,):
        raise ValueError(
            f"allocation length {lam.shape[0]} != choice dimension {choice.num_lambdas}"
        )
    for idx, active in enumerate(choice.active_lambda_mask):
        if not active and lam[idx] != 0.0:
            raise ValueError(f"allocation entry {idx + 1} is masked by choice {choice.choice_id}")
    for group in choice.tie_groups:
        vals = lam[list(group)]
        if np.max(vals) - np.min(vals) > 1e-12:
            raise ValueError(f"tie constraint violated on entries {tuple(i + 1 for i in group)}")

    num_slots = len(choice.det_layout)
    m = scenario.tx.num_elements
    slot_budget = num_slots * scenario.p_max
    det_dirs = np.zeros((num_slots, m), dtype=complex)
    det_pow = np.zeros(num_slots)
    gauss_dirs = np.zeros((num_slots, m), dtype=complex)
    gauss_pow = np.zeros(num_slots)

    for t in range(num_slots):
        for entries, dirs, pows in (
            (choice.det_layout[t], det_dirs, det_pow),
            (choice.gauss_layout[t], gauss_dirs, gauss_pow),
        ):
            combo, mass = _combine(entries, lam, catalog, m)
            if mass > 0:
                norm = np.linalg.norm(combo)
                if norm < 1e-12:
                    raise ValueError(
                        f"slot {t + 1} combination cancels to zero but carries power"
                    )
                dirs[t] = combo / norm
                pows[t] = mass * slot_budget
            else:
                dirs[t] = np.eye(m, dtype=complex)[0]  # unit placeholder, zero power

    return TransmitStrategy(
        tx_spec=scenario.tx,
        det_directions=det_dirs,
        det_powers=det_pow,
        gauss_directions=gauss_dirs,
        gauss_powers=gauss_pow,
    )


def _compositions(total: int, parts: int):
    """All ways to split `total` units over `parts` non-negative slots."""
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield out


def enumerate_allocations(
    length: int,
    scheme: str,
    *,
    step: int | None = None,
    count: int | None = None,
    rng: np.random.Generator | None = None,
) -> list[SimplexAllocation]:
    """Allocation sets over the simplex of the given dimension.

    vertices: the unit allocations; grid: all compositions of `step` into
    `length` parts scaled by 1/step; dirichlet: `count` uniform samples from
    the provided generator.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if scheme == "vertices":
        return [SimplexAllocation(np.eye(length)[i]) for i in range(length)]
    if scheme == "grid":
        if step is None or step < 1:
            raise ValueError("grid scheme needs step >= 1")
        return [
            SimplexAllocation(np.asarray(c, dtype=float) / step)
            for c in _compositions(step, length)
        ]
    if scheme == "dirichlet":
        if count is None or count < 1:
            raise ValueError("dirichlet scheme needs count >= 1")
        if rng is None:
            raise ValueError("dirichlet scheme needs a random generator")
        draws = rng.dirichlet(np.ones(length), size=count)
        draws /= draws.sum(axis=1, keepdims=True)
        return [SimplexAllocation(row) for row in draws]
    raise ValueError(f"unknown scheme '{scheme}'")


def _embed_free(choice: ChoiceSpec, free: np.ndarray, free_slots: list) -> SimplexAllocation:
    lam = np.zeros(choice.num_lambdas)
    for value, slot in zip(free, free_slots):
        if isinstance(slot, tuple):
            share = value / len(slot)
            for idx in slot:
                lam[idx] = share
        else:
            lam[slot] = value
    return SimplexAllocation(lam)


def allocations_for_choice(
    choice: ChoiceSpec,
    scheme: str,
    *,
    step: int | None = None,
    count: int | None = None,
    rng: np.random.Generator | None = None,
) -> list[SimplexAllocation]:
    """Enumerate allocations restricted to a choice's free dimensions.

    Masked entries stay zero and tie groups share their mass equally, so
    every returned allocation is valid for `build_strategy`.
    """
    tied = {idx for group in choice.tie_groups for idx in group}
    free_slots: list = []
    for group in choice.tie_groups:
        if all(choice.active_lambda_mask[idx] for idx in group):
            free_slots.append(tuple(group))
    for idx, active in enumerate(choice.active_lambda_mask):
        if active and idx not in tied:
            free_slots.append(idx)
    free_slots.sort(key=lambda s: s[0] if isinstance(s, tuple) else s)
    base = enumerate_allocations(len(free_slots), scheme, step=step, count=count, rng=rng)
    return [_embed_free(choice, alloc.lam, free_slots) for alloc in base]
