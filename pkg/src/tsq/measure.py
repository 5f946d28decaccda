"""Projective measurements of GF(2) parity observables on one register.

A partial measurement is modeled as a set of parity masks over the bits of
register B or A.  Rank-n mask sets are equivalent to measuring the full
register content; single masks give the one-bit measurements (left bit,
right bit, XOR of the two, ...).  All projectors are diagonal in the
computational basis, so any two such observables commute.

Projected states are deliberately left unrenormalized; renormalization is
the caller's choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import gf2
from .qcore import (
    STATE_TOL,
    InvariantError,
    RegisterLayout,
    StateVector,
)


class ImpossibleOutcomeError(ValueError):
    """Forced measurement outcome has zero amplitude mass."""


@dataclass(frozen=True)
class ParityObservable:
    """Parity masks (bitstrings) over one register; rank 0 = trivial observable."""

    register: str
    masks: tuple[str, ...]

    def __post_init__(self):
        if self.register not in ("B", "A"):
            raise ValueError("register must be 'B' or 'A'")
        object.__setattr__(self, "masks", tuple(self.masks))
        ints = [gf2.bits_to_mask(m) for m in self.masks]
        if any(v == 0 for v in ints):
            raise ValueError("parity masks must be nonzero")
        if len({len(m) for m in self.masks}) > 1:
            raise ValueError("parity masks must all have the same length")
        if not gf2.is_independent(ints):
            raise ValueError("parity masks must be GF(2)-linearly independent")

    @property
    def rank(self) -> int:
        return len(self.masks)

    @property
    def n_bits(self) -> int:
        return len(self.masks[0]) if self.masks else 0

    def outcome_bits(self, register_bits: str) -> tuple[int, ...]:
        value = int(register_bits, 2)
        return tuple(gf2.parity(gf2.bits_to_mask(m), value) for m in self.masks)

    def outcome_for(self, register_bits: str) -> "ParityOutcome":
        return ParityOutcome(self, self.outcome_bits(register_bits))

    def name(self) -> str:
        """Short display name: B, B_l, B_r, or B[masks] in the general case."""
        if self.rank == 0:
            return f"{self.register}(trivial)"
        if self.rank == self.n_bits and self.masks == _full_masks(self.n_bits):
            return self.register
        if self.n_bits == 2 and self.masks == ("10",):
            return f"{self.register}_l"
        if self.n_bits == 2 and self.masks == ("01",):
            return f"{self.register}_r"
        return f"{self.register}[{','.join(self.masks)}]"


def _full_masks(n: int) -> tuple[str, ...]:
    return tuple(gf2.mask_to_bits(1 << (n - 1 - i), n) for i in range(n))


def full_observable(layout: RegisterLayout, register: str) -> ParityObservable:
    """Rank-n observable whose outcome bits spell the register content."""
    return ParityObservable(register, _full_masks(layout.bits(register)))


def trivial_observable(register: str) -> ParityObservable:
    return ParityObservable(register, ())


@dataclass(frozen=True)
class ParityOutcome:
    observable: ParityObservable
    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if len(self.bits) != self.observable.rank:
            raise ValueError("one outcome bit per mask required")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("outcome bits must be 0 or 1")


def _register_values(layout: RegisterLayout, register: str) -> np.ndarray:
    """Register content for every joint basis index, as an int array."""
    idx = np.arange(layout.dim)
    return idx // layout.dim_a if register == "B" else idx % layout.dim_a


def _parity_vector(values: np.ndarray, mask: int) -> np.ndarray:
    """Vectorized mask . value parity over an int array."""
    x = values & mask
    for shift in (16, 8, 4, 2, 1):
        x = x ^ (x >> shift)
    return x & 1


def projector_diagonal(outcome: ParityOutcome, layout: RegisterLayout) -> np.ndarray:
    """0/1 diagonal of the projector keeping labels that satisfy all parities."""
    obs = outcome.observable
    if obs.masks and obs.n_bits != layout.bits(obs.register):
        raise ValueError("observable does not fit the layout")
    values = _register_values(layout, obs.register)
    keep = np.ones(layout.dim, dtype=bool)
    for mask, bit in zip(obs.masks, outcome.bits):
        keep &= _parity_vector(values, gf2.bits_to_mask(mask)) == bit
    return keep.astype(np.float64)


def project(outcome: ParityOutcome, s: StateVector) -> StateVector:
    return StateVector(s.layout, s.amps * projector_diagonal(outcome, s.layout))


def sector_masses(s: StateVector, obs: ParityObservable) -> dict[tuple[int, ...], float]:
    """Born weight (squared-amplitude mass) of every parity sector."""
    values = _register_values(s.layout, obs.register)
    probs = np.abs(s.amps) ** 2
    key_codes = np.zeros(s.layout.dim, dtype=np.int64)
    for mask in obs.masks:
        key_codes = (key_codes << 1) | _parity_vector(values, gf2.bits_to_mask(mask))
    masses: dict[tuple[int, ...], float] = {}
    for code in np.unique(key_codes):
        bits = tuple((int(code) >> (obs.rank - 1 - i)) & 1 for i in range(obs.rank))
        masses[bits] = float(probs[key_codes == code].sum())
    return masses


@dataclass(frozen=True)
class MeasurementRecord:
    time_tag: str
    outcome: ParityOutcome
    pre_state: StateVector
    post_state: StateVector


def measure(
    s: StateVector,
    obs: ParityObservable,
    *,
    forced: Optional[tuple[int, ...]] = None,
    seed: Optional[int] = None,
    time_tag: str = "t1",
) -> MeasurementRecord:
    """Measure ``obs`` on ``s`` with a forced outcome or a seeded random one.

    Random selection follows the Born rule over parity sectors; a seed is
    mandatory for the random path so runs are reproducible.
    """
    if s.is_zero():
        raise ValueError("cannot measure the zero state")
    if (forced is None) == (seed is None):
        raise ValueError("pass exactly one of forced= or seed=")
    masses = sector_masses(s, obs)
    total = sum(masses.values())
    if forced is not None:
        forced = tuple(int(b) for b in forced)
        if masses.get(forced, 0.0) <= STATE_TOL**2 * total:
            raise ImpossibleOutcomeError(f"impossible outcome {forced} for {obs.name()}")
        bits = forced
    else:
        rng = np.random.default_rng(seed)
        keys = sorted(masses)
        weights = np.array([masses[k] for k in keys])
        bits = keys[rng.choice(len(keys), p=weights / weights.sum())]
    outcome = ParityOutcome(obs, bits)
    return MeasurementRecord(time_tag, outcome, s, project(outcome, s))


def commutes(o1: ParityObservable, o2: ParityObservable, layout: RegisterLayout) -> bool:
    """True iff the induced projector families commute as matrices.

    Parity projectors are all diagonal in the computational basis, so this
    always holds; the check is still done numerically on the diagonals.
    """
    for k1 in range(1 << o1.rank):
        b1 = tuple((k1 >> i) & 1 for i in range(o1.rank))
        d1 = projector_diagonal(ParityOutcome(o1, b1), layout)
        for k2 in range(1 << o2.rank):
            b2 = tuple((k2 >> i) & 1 for i in range(o2.rank))
            d2 = projector_diagonal(ParityOutcome(o2, b2), layout)
            if np.any(d1 * d2 != d2 * d1):
                return False
    return True


@dataclass(frozen=True)
class PostponementReport:
    max_deviation: float
    project_first: StateVector
    project_last: StateVector


def postpone_projection(process, record: MeasurementRecord, tol: float = 1e-10) -> PostponementReport:
    """Verify that the projection of ``record`` can be deferred past the unitary.

    Checks U P psi = P U psi, where P is the record's parity projector; this
    is what makes hiding the initial outcome from the solver legitimate.
    """
    from .qcore import apply  # local import to keep module deps one-way

    if not commutes(record.outcome.observable, process.final_obs, process.layout):
        raise InvariantError("record observable does not commute with the final observable")
    psi0 = record.pre_state
    first = apply(process.u12, project(record.outcome, psi0))
    last = project(record.outcome, apply(process.u12, psi0))
    dev = float(np.max(np.abs(first.amps - last.amps)))
    if dev > tol * max(psi0.norm(), 1.0):
        raise InvariantError(f"postponement not valid for this unitary (deviation {dev:.3e})")
    return PostponementReport(dev, first, last)
