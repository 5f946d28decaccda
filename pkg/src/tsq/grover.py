"""Quantum search networks: standard Grover iterations and the zero-failure
phase-matched variant.

The generalized iteration applies a selective phase alpha to the marked item
(the oracle call) followed by a phase-beta generalized inversion about the
uniform state; alpha = beta = pi is the textbook algorithm.  The certainty
variant picks the iteration count J = ceil of the standard optimal count and
matches both phases so the success probability reaches 1 - eps with
eps <= 1e-9 (closed-form angle, then a short numerical polish).

``as_process_unitary`` lifts the family of single-target networks to a
block-controlled unitary on the joint B (x) A space, giving the
time-symmetrization engine a physically realized solving unitary to consume
in place of the canonical XOR copy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .qcore import (
    InvariantError,
    RegisterLayout,
    StateVector,
    UnitaryOp,
)

CERTAINTY_EPS = 1e-9


@dataclass(frozen=True)
class SearchOracle:
    """Single marked item: n bits, target bitstring (the drawer with the ball)."""

    n: int
    target: str

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one bit")
        if len(self.target) != self.n or set(self.target) - {"0", "1"}:
            raise ValueError(f"target {self.target!r} is not an {self.n}-bit string")

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def target_index(self) -> int:
        return int(self.target, 2)


@dataclass(frozen=True)
class SearchRun:
    oracle: SearchOracle
    variant: str  # "grover" | "long"
    iterations: int
    phase: float  # radians; pi for the standard variant
    final_state: np.ndarray
    success_probability: float

    @property
    def query_count(self) -> int:
        return self.iterations


def uniform_search_state(n: int) -> np.ndarray:
    d = 1 << n
    return np.full(d, 1 / math.sqrt(d), dtype=np.complex128)


def grover_iterate(state: np.ndarray, oracle: SearchOracle, phase_pair: tuple[float, float]) -> np.ndarray:
    """One generalized iteration: oracle phase alpha, then diffusion phase beta."""
    alpha, beta = phase_pair
    state = np.asarray(state, dtype=np.complex128)
    if state.shape != (oracle.dim,):
        raise ValueError(f"state must have {oracle.dim} amplitudes")
    out = state.copy()
    out[oracle.target_index] *= np.exp(1j * alpha)
    # D(beta) = (1 - e^{i beta}) |u><u| - I ; beta = pi gives 2|u><u| - I
    mean = out.mean()
    return (1 - np.exp(1j * beta)) * mean - out


def _theta(n: int) -> float:
    return math.asin(1 / math.sqrt(1 << n))


def _success(oracle: SearchOracle, iterations: int, phase: float) -> tuple[np.ndarray, float]:
    state = uniform_search_state(oracle.n)
    for _ in range(iterations):
        state = grover_iterate(state, oracle, (phase, phase))
    p = float(abs(state[oracle.target_index]) ** 2 / np.vdot(state, state).real)
    return state, p


def optimal_iterations(n: int) -> int:
    """Ceiling of the standard optimal iteration count (pi/2 - theta)/(2 theta)."""
    theta = _theta(n)
    return max(1, math.ceil((math.pi / 2 - theta) / (2 * theta) - 1e-12))


def matched_phase(n: int, iterations: int) -> float:
    """Phase-matching angle making ``iterations`` steps reach certainty."""
    theta = _theta(n)
    arg = math.sin(math.pi / (4 * iterations + 2)) / math.sin(theta)
    if arg > 1:
        raise ValueError(f"{iterations} iterations cannot reach certainty for n={n}")
    return 2 * math.asin(arg)


def run_grover(oracle: SearchOracle) -> SearchRun:
    """Standard pi-phase Grover at the optimal iteration count."""
    theta = _theta(oracle.n)
    j = max(1, round((math.pi / 2 - theta) / (2 * theta)))
    state, p = _success(oracle, j, math.pi)
    return SearchRun(oracle, "grover", j, math.pi, state, p)


def run_long(oracle: SearchOracle) -> SearchRun:
    """Zero-failure search: matched phase, polished until eps <= 1e-9."""
    j = optimal_iterations(oracle.n)
    phi = matched_phase(oracle.n, j)
    _, p = _success(oracle, j, phi)
    if 1 - p > CERTAINTY_EPS:
        # robustness against transcription drift in the closed form
        width = 0.05
        res = minimize_scalar(
            lambda x: 1 - _success(oracle, j, x)[1],
            bounds=(max(phi - width, 1e-6), min(phi + width, math.pi)),
            method="bounded",
            options={"xatol": 1e-14},
        )
        phi = float(res.x)
        _, p = _success(oracle, j, phi)
    if 1 - p > CERTAINTY_EPS:
        raise InvariantError(f"certainty not reached for n={oracle.n}: success {p!r}")
    state, p = _success(oracle, j, phi)
    return SearchRun(oracle, "long", j, phi, state, p)


def search_network(oracle: SearchOracle) -> np.ndarray:
    """Matrix of the full certainty network on register A: Hadamards then
    the phase-matched iterations.  Maps |0..0> to ~|target|."""
    run = run_long(oracle)
    d = oracle.dim
    h = np.ones((d, d), dtype=np.complex128) / math.sqrt(d)
    signs = np.array(
        [[(-1) ** ((i & j).bit_count() & 1) for j in range(d)] for i in range(d)]
    )
    hadamard = h * signs
    g = _iteration_matrix(oracle, run.phase)
    m = hadamard
    for _ in range(run.iterations):
        m = g @ m
    return m


def _iteration_matrix(oracle: SearchOracle, phase: float) -> np.ndarray:
    d = oracle.dim
    o = np.eye(d, dtype=np.complex128)
    o[oracle.target_index, oracle.target_index] = np.exp(1j * phase)
    u = np.full((d, d), 1 / d, dtype=np.complex128)
    diff = (1 - np.exp(1j * phase)) * u - np.eye(d)
    return diff @ o


def as_process_unitary(n: int) -> UnitaryOp:
    """Block-controlled lift: for each setting b, run the b-targeted network
    on register A.  Per-branch global phases are tolerated downstream."""
    layout = RegisterLayout(n, n)
    d = layout.dim_a
    m = np.zeros((layout.dim, layout.dim), dtype=np.complex128)
    for b in range(layout.dim_b):
        oracle = SearchOracle(n, format(b, f"0{n}b"))
        block = search_network(oracle)
        leak = 1 - abs(block[oracle.target_index, 0]) ** 2
        if leak > CERTAINTY_EPS:
            raise InvariantError(
                f"lifted network violates the correlation invariant at b={oracle.target}"
            )
        m[b * d : (b + 1) * d, b * d : (b + 1) * d] = block
    return UnitaryOp(layout, m)


def branch_phases(n: int) -> dict[str, complex]:
    """Global phase picked up by each setting branch of the lifted network."""
    phases = {}
    for b in range(1 << n):
        oracle = SearchOracle(n, format(b, f"0{n}b"))
        amp = search_network(oracle)[oracle.target_index, 0]
        phases[oracle.target] = complex(amp / abs(amp))
    return phases


def grover_process(n: int):
    """ProcessDescription backed by the lifted certainty network."""
    from .measure import full_observable
    from .tsym import ProcessDescription
    from .qcore import uniform_setting_state

    layout = RegisterLayout(n, n)
    blank = "0" * n
    settings = [format(b, f"0{n}b") for b in range(1 << n)]
    return ProcessDescription(
        layout=layout,
        initial_state=uniform_setting_state(layout, blank),
        u12=as_process_unitary(n),
        initial_obs=full_observable(layout, "B"),
        final_obs=full_observable(layout, "A"),
        solution_map={b: b for b in settings},
        blank_a=blank,
    )
