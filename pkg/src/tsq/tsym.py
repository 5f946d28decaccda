"""Time-symmetrization engine: selection splits and zigzag instances.

A process runs between two one-to-one correlated measurement outcomes: the
initial measurement of the setting register B and the final measurement of
the solution register A.  Time-symmetrizing the process means sharing the
selection of the outcome pair between the two measurements.  A selection
split assigns a parity observable on B to the initial measurement and a
complementary parity observable on A to the final one; for each split and
each setting value there is one zigzag instance with a forward leg, the
final partial projection, and a backward leg whose ends form the instance's
bottom line.

Two perspectives are generated.  The external one also applies the initial
partial projection, and its bottom line always collapses back to the sharp
process.  The solver one postpones the initial projection entirely, so the
bottom-line input is a superposition of the setting branches compatible
with the final partial outcome: the solver's advance knowledge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import gf2
from .measure import (
    ParityObservable,
    full_observable,
    project,
    trivial_observable,
)
from .qcore import (
    InvariantError,
    RegisterLayout,
    StateVector,
    UnitaryOp,
    apply,
    apply_adjoint,
    basis_state,
    proportionality,
    uniform_setting_state,
    xor_copy_unitary,
)

# mass fraction below which a setting branch counts as absent (tolerates the
# <=1e-9 failure probability of the lifted search networks)
BRANCH_MASS_TOL = 1e-6

CORRELATION_TOL = 1e-9


@dataclass(frozen=True)
class ProcessDescription:
    """Initial state, the solving unitary, and the correlated measurement pair."""

    layout: RegisterLayout
    initial_state: StateVector
    u12: UnitaryOp
    initial_obs: ParityObservable
    final_obs: ParityObservable
    solution_map: Mapping[str, str]
    blank_a: str

    def __post_init__(self):
        n = self.layout.n_b
        settings = [format(b, f"0{n}b") for b in range(self.layout.dim_b)]
        sol = dict(self.solution_map)
        if sorted(sol) != settings:
            raise ValueError("solution map must be total on the setting space")
        if len(set(sol.values())) != len(sol):
            raise ValueError("solution map must be invertible")
        object.__setattr__(self, "solution_map", sol)
        for b in settings:
            out = apply(self.u12, basis_state(self.layout, b, self.blank_a))
            good = abs(out.amplitude(b, sol[b])) ** 2
            total = out.norm() ** 2
            if total - good > CORRELATION_TOL * total:
                raise InvariantError(
                    f"unitary does not correlate setting {b} sharply with solution {sol[b]}"
                )

    @property
    def n(self) -> int:
        return self.layout.n_b

    def solution(self, b: str) -> str:
        return self.solution_map[b]


def xor_process(n: int) -> ProcessDescription:
    """Canonical process: XOR-copy unitary, solution = setting."""
    layout = RegisterLayout(n, n)
    blank = "0" * n
    settings = [format(b, f"0{n}b") for b in range(1 << n)]
    return ProcessDescription(
        layout=layout,
        initial_state=uniform_setting_state(layout, blank),
        u12=xor_copy_unitary(layout),
        initial_obs=full_observable(layout, "B"),
        final_obs=full_observable(layout, "A"),
        solution_map={b: b for b in settings},
        blank_a=blank,
    )


@dataclass(frozen=True)
class SelectionSplit:
    """Complementary partial measurements sharing the selection of the pair."""

    initial_part: ParityObservable
    final_part: ParityObservable

    def __post_init__(self):
        if self.initial_part.register != "B" or self.final_part.register != "A":
            raise ValueError("initial part must act on B, final part on A")

    def name(self) -> str:
        b = ",".join(self.initial_part.masks) or "-"
        a = ",".join(self.final_part.masks) or "-"
        return f"B:[{b}]/A:[{a}]"


def selection_is_injective(process: ProcessDescription, split: SelectionSplit) -> bool:
    """Non-redundancy: the combined partial outcomes pin down the setting."""
    seen = set()
    for b in process.solution_map:
        key = (
            split.initial_part.outcome_bits(b),
            split.final_part.outcome_bits(process.solution(b)),
        )
        if key in seen:
            return False
        seen.add(key)
    return True


def _observable(register: str, basis: tuple[int, ...], n: int) -> ParityObservable:
    return ParityObservable(register, tuple(gf2.mask_to_bits(m, n) for m in basis))


def enumerate_splits(process: ProcessDescription, even_rank: int) -> list[SelectionSplit]:
    """All splits with initial-part rank ``even_rank``, canonically ordered.

    One split per distinct final-part subspace: the final part determines the
    instance structure, and each is paired with the first complementary
    initial part (numeric mask order) that makes the combined selection
    injective.  Final parts admitting no such complement are dropped.
    """
    n = process.n
    if not 0 <= even_rank <= n:
        raise ValueError(f"rank {even_rank} out of range for n={n}")
    splits = []
    for final_basis in gf2.subspaces(n, n - even_rank):
        final_part = _observable("A", final_basis, n)
        for init_basis in gf2.subspaces(n, even_rank):
            if gf2.rank(final_basis + init_basis) != n:
                continue
            split = SelectionSplit(_observable("B", init_basis, n), final_part)
            if selection_is_injective(process, split):
                splits.append(split)
                break
    return splits


@dataclass(frozen=True)
class ZigzagInstance:
    split: SelectionSplit
    outcome_pair: tuple[str, str]
    perspective: str  # "external" | "solver"
    trajectory: tuple[tuple[str, StateVector], ...]
    bottom_line: tuple[StateVector, StateVector]

    def name(self) -> str:
        return f"{self.split.name()}@{self.outcome_pair[0]}"

    def branch_settings(self) -> tuple[str, ...]:
        """Setting values surviving in the bottom-line input state."""
        s = self.bottom_line[0]
        psi = np.abs(s.amps.reshape(s.layout.dim_b, s.layout.dim_a)) ** 2
        mass = psi.sum(axis=1)
        keep = mass > BRANCH_MASS_TOL * mass.sum()
        n = s.layout.n_b
        return tuple(format(b, f"0{n}b") for b in np.nonzero(keep)[0])


def _project_step(part: ParityObservable, value_bits: str, state: StateVector, what: str) -> StateVector:
    outcome = part.outcome_for(value_bits)
    out = project(outcome, state)
    if out.is_zero():
        raise InvariantError(f"{what} projection annihilated the state (inconsistent split/outcome)")
    return out


def external_instance(process: ProcessDescription, b: str, split: SelectionSplit) -> ZigzagInstance:
    """Zigzag with both partial projections applied (external observer view)."""
    s_b = process.solution(b)
    s0 = process.initial_state
    s1 = _project_step(split.initial_part, b, s0, "initial")
    s2 = apply(process.u12, s1)
    s3 = _project_step(split.final_part, s_b, s2, "final")
    s4 = apply_adjoint(process.u12, s3)
    inst = ZigzagInstance(
        split=split,
        outcome_pair=(b, s_b),
        perspective="external",
        trajectory=(
            ("t1 initial", s0),
            (f"t1 after meas. of {split.initial_part.name()}", s1),
            ("t2 forward", s2),
            (f"t2 after meas. of {split.final_part.name()}", s3),
            ("t1 backward", s4),
        ),
        bottom_line=(s4, s3),
    )
    if inst.branch_settings() != (b,):
        raise InvariantError("external bottom line is not the sharp setting branch")
    return inst


def solver_instance(process: ProcessDescription, b: str, split: SelectionSplit) -> ZigzagInstance:
    """Zigzag with the initial projection postponed (problem-solver view)."""
    s_b = process.solution(b)
    s0 = process.initial_state
    s1 = apply(process.u12, s0)
    s2 = _project_step(split.final_part, s_b, s1, "final")
    s3 = apply_adjoint(process.u12, s2)
    return ZigzagInstance(
        split=split,
        outcome_pair=(b, s_b),
        perspective="solver",
        trajectory=(
            ("t1 initial", s0),
            ("t2 forward", s1),
            (f"t2 after meas. of {split.final_part.name()}", s2),
            ("t1 backward", s3),
        ),
        bottom_line=(s3, s2),
    )


def uneven_instance(process: ProcessDescription, b: str, final_rank: int) -> ZigzagInstance:
    """Solver instance with an arbitrary final-part rank (the k-fraction dial).

    Uses the canonical low-bit masks for the final part; rank n means full
    advance knowledge of the solution, rank 0 none at all.
    """
    n = process.n
    if not 0 <= final_rank <= n:
        raise ValueError(f"final rank {final_rank} out of range for n={n}")
    if final_rank == 0:
        final_part = trivial_observable("A")
    else:
        final_part = _observable("A", tuple(1 << i for i in range(final_rank)), n)
    initial_part = (
        trivial_observable("B")
        if final_rank == n
        else _observable("B", tuple(1 << i for i in range(final_rank, n)), n)
    )
    return solver_instance(process, b, SelectionSplit(initial_part, final_part))


@dataclass(frozen=True)
class RecoveryReport:
    summed: StateVector
    reference: StateVector
    factor: complex
    max_deviation: float
    proportional: bool


def recover_superposition(instances, tol: float = 1e-10) -> RecoveryReport:
    """Sum the bottom-line inputs and compare against the process input state.

    The superposition of all instances must give back the unitary part of the
    original description; the proportionality constant is reported rather
    than assumed.
    """
    instances = list(instances)
    if not instances:
        raise ValueError("no instances to superpose")
    if len({i.perspective for i in instances}) > 1:
        raise ValueError("instances mix perspectives")
    reference = instances[0].trajectory[0][1]
    total = np.zeros_like(reference.amps)
    for inst in instances:
        total = total + inst.bottom_line[0].amps
    summed = StateVector(reference.layout, total)
    factor, resid = proportionality(summed, reference)
    return RecoveryReport(
        summed=summed,
        reference=reference,
        factor=factor,
        max_deviation=resid,
        proportional=resid <= tol * max(summed.norm(), 1.0),
    )
