"""Ready-made systems: the two worked examples and a generic builder.

Both examples live in the action-angle chart of a diagonal Hamiltonian.

Two-qubit product system (n = 4): a pair of spin-1/2 particles constrained
to the product submanifold psi^1 psi^4 = psi^2 psi^3, imposed through the
separable pair

    Phi^1 = q_1 - q_2 - q_3,
    Phi^2 = p_1 (1 - p_1 - p_2 - p_3) - p_2 p_3.

On the surface the constrained equations of motion close in the simple form
(with D = Omega_1 - Omega_2 - Omega_3)

    qdot_1 = Omega_1 - (1 - 2 p_1 - p_2 - p_3) D,
    qdot_2 = Omega_2 + (p_1 + p_3) D,
    qdot_3 = Omega_3 + (p_1 + p_2) D,       pdot = 0,

which the system's closed-form oracle implements.

Single spin with conserved sigma_x (n = 2): H(q, p) = 1 - 2p on the Bloch
sphere with the observable constraint Phi = 2 sqrt(p(1-p)) cos q.  Writing
M = (1-2p)^2 cos^2 q + sin^2 q, the constrained motion is

    qdot = -2 (1-2p)^2 cos^2 q / M,
    pdot = 4 (1-2p)(p-1) p sin q cos q / M,

with fixed-point circles at cos q = 0 and p = 1/2 and genuinely singular
points where both M and the constraint gradient vanish, (q, p) = (0, 1/2)
and (pi, 1/2).  In spherical angles (p = sin^2(theta/2), q = -phi) the same
field reads

    thetadot = sin(2 theta) sin(2 phi) / (2 (1 - sin^2 theta cos^2 phi)),
    phidot   = 2 cos^2 theta cos^2 phi / (1 - sin^2 theta cos^2 phi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .constraints import Constraint, algebraic_constraint, observable_constraint
from .dynamics import HamiltonianFunction, SpectrumData
from .errors import ChartDomainError, OffSurfaceError, SingularGramError
from .geometry import ChartPoint, StateVector, embed

SURFACE_TOL = 1e-10
SINGULAR_FLOOR = 1e-12


@dataclass(frozen=True)
class SystemDefinition:
    """A chart system: dimension, spectrum, constraints and (optionally) a
    closed-form field oracle valid on the constraint surface."""

    name: str
    n: int
    spectrum: SpectrumData
    hamiltonian: HamiltonianFunction
    constraints: Tuple[Constraint, ...]
    embedding: Callable[[ChartPoint], StateVector]
    oracle: Optional[Callable[[ChartPoint], np.ndarray]] = None

    @property
    def chart_dim(self) -> int:
        return 2 * (self.n - 1)

    def embed(self, point: ChartPoint) -> StateVector:
        return self.embedding(point)


def _chart_embedding(n: int):
    def embedding(point: ChartPoint) -> StateVector:
        return embed(point, n)

    return embedding


def diagonal_system(n: int, energies, constraints=()) -> SystemDefinition:
    """Generic action-angle system for a diagonal Hamiltonian,
    H = E_n + sum Omega_nu p_nu.  No closed-form oracle."""
    if n < 2:
        raise ValueError("a chart system needs dimension n >= 2")
    energies = np.asarray(energies, dtype=float)
    if energies.size != n:
        raise ValueError("expected %d energies, got %d" % (n, energies.size))
    spectrum = SpectrumData(energies)
    return SystemDefinition(
        name="diagonal",
        n=n,
        spectrum=spectrum,
        hamiltonian=HamiltonianFunction(spectrum),
        constraints=tuple(constraints),
        embedding=_chart_embedding(n),
    )


# ---------------------------------------------------------------------------
# Example: two spin-1/2 particles constrained to product states
# ---------------------------------------------------------------------------

def _phase_sum(point: ChartPoint) -> float:
    return float(point.q[0] - point.q[1] - point.q[2])


def _phase_sum_grad(point: ChartPoint) -> np.ndarray:
    return np.array([1.0, -1.0, -1.0, 0.0, 0.0, 0.0])


def _population_product(point: ChartPoint) -> float:
    p1, p2, p3 = point.p
    p4 = 1.0 - p1 - p2 - p3
    return float(p1 * p4 - p2 * p3)


def _population_product_grad(point: ChartPoint) -> np.ndarray:
    p1, p2, p3 = point.p
    p4 = 1.0 - p1 - p2 - p3
    return np.array([0.0, 0.0, 0.0, p4 - p1, -(p1 + p3), -(p1 + p2)])


def two_qubit_product_system(energies=(1.0, 2.0, 3.0, 0.0)) -> SystemDefinition:
    """Pair of spins constrained to the product submanifold.

    The default energies give gaps Omega = (1, 2, 3).  The oracle evaluates
    the on-surface closed form and refuses points with
    |p_1 p_4 - p_2 p_3| > SURFACE_TOL, where its simplification is invalid.
    """
    spectrum = SpectrumData(np.asarray(energies, dtype=float))
    if spectrum.n != 4:
        raise ValueError("the two-qubit system needs exactly four energies")
    gaps = spectrum.gaps

    def oracle(point: ChartPoint) -> np.ndarray:
        if abs(_population_product(point)) > SURFACE_TOL:
            raise OffSurfaceError(
                "closed-form field is only valid on the surface p1 p4 = p2 p3"
            )
        p1, p2, p3 = point.p
        drive = gaps[0] - gaps[1] - gaps[2]
        qdot = np.array(
            [
                gaps[0] - (1.0 - 2.0 * p1 - p2 - p3) * drive,
                gaps[1] + (p1 + p3) * drive,
                gaps[2] + (p1 + p2) * drive,
            ]
        )
        return np.concatenate([qdot, np.zeros(3)])

    constraints = (
        algebraic_constraint("phase-sum", _phase_sum, _phase_sum_grad),
        algebraic_constraint("population-product", _population_product, _population_product_grad),
    )
    return SystemDefinition(
        name="two-qubit-product",
        n=4,
        spectrum=spectrum,
        hamiltonian=HamiltonianFunction(spectrum),
        constraints=constraints,
        embedding=_chart_embedding(4),
        oracle=oracle,
    )


def two_qubit_field_presimplified(point: ChartPoint, spectrum: SpectrumData) -> np.ndarray:
    """The constrained field before the on-surface simplification.

    Shares denominators that may vanish away from the constraint surface;
    meaningful as a cross-check against the simplified oracle on-surface.
    """
    p1, p2, p3 = point.p
    gaps = spectrum.gaps
    drive = gaps[0] - gaps[1] - gaps[2]
    denom = (
        p2 * p3 * (1.0 - p2 - p3)
        - p1**2 * (p2 + p3)
        + p1 * (1.0 - p2 - p3) * (p2 + p3)
    )
    qdot = np.array(
        [
            gaps[0] - p2 * p3 * (1.0 - 2.0 * p1 - p2 - p3) * drive / denom,
            gaps[1] + p1 * p3 * (1.0 - p1 - p3) * drive / denom,
            gaps[2] + p1 * p2 * (1.0 - p1 - p2) * drive / denom,
        ]
    )
    return np.concatenate([qdot, np.zeros(3)])


def two_qubit_trig_constraints() -> Tuple[Constraint, Constraint]:
    """The product condition in its trigonometric form,

        sqrt(p1 p4) cos q1 - sqrt(p2 p3) cos(q2 + q3),
        sqrt(p1 p4) sin q1 - sqrt(p2 p3) sin(q2 + q3),

    kept as a cross-check fixture; gradients fall back to finite
    differences."""

    def cos_part(point: ChartPoint) -> float:
        p1, p2, p3 = point.p
        p4 = 1.0 - p1 - p2 - p3
        return float(
            math.sqrt(p1 * p4) * math.cos(point.q[0])
            - math.sqrt(p2 * p3) * math.cos(point.q[1] + point.q[2])
        )

    def sin_part(point: ChartPoint) -> float:
        p1, p2, p3 = point.p
        p4 = 1.0 - p1 - p2 - p3
        return float(
            math.sqrt(p1 * p4) * math.sin(point.q[0])
            - math.sqrt(p2 * p3) * math.sin(point.q[1] + point.q[2])
        )

    return (
        algebraic_constraint("product-cos", cos_part),
        algebraic_constraint("product-sin", sin_part),
    )


def product_surface_sample(seed: int) -> ChartPoint:
    """Reproducible interior point on the product surface.

    Draws p_2, p_3, solves the quadratic p_1 (1 - p_1 - p_2 - p_3) = p_2 p_3
    for the smaller root (the larger is then p_4), and sets q_1 = q_2 + q_3,
    so both constraints vanish to machine precision.
    """
    rng = np.random.default_rng(seed)
    while True:
        p2, p3 = rng.uniform(0.02, 0.35, size=2)
        rest = 1.0 - p2 - p3
        disc = rest * rest - 4.0 * p2 * p3
        if disc < 1e-2:
            continue
        p1 = 0.5 * (rest - math.sqrt(disc))
        p4 = rest - p1
        if min(p1, p2, p3, p4) > 0.02:
            break
    q2, q3 = rng.uniform(0.0, 2.0 * np.pi, size=2)
    return ChartPoint(np.array([q2 + q3, q2, q3]), np.array([p1, p2, p3]))


# ---------------------------------------------------------------------------
# Example: single spin-1/2 in a z-field with sigma_x conserved
# ---------------------------------------------------------------------------

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def spin_gram_scalar(q: float, p: float) -> float:
    """Scalar Gram value M = (1-2p)^2 cos^2 q + sin^2 q of the sigma_x
    constraint on the Bloch chart."""
    return (1.0 - 2.0 * p) ** 2 * math.cos(q) ** 2 + math.sin(q) ** 2


def single_spin_conserved_sx() -> SystemDefinition:
    """Bloch-sphere system with H(q, p) = 1 - 2p and conserved sigma_x.

    Energies are (-1, 1) in the chart ordering (the residual amplitude on
    the last level carries energy +1), so the expectation of the
    Hamiltonian is 1 - 2p.
    """
    spectrum = SpectrumData(np.array([-1.0, 1.0]))

    def oracle(point: ChartPoint) -> np.ndarray:
        q = float(point.q[0])
        p = float(point.p[0])
        m = spin_gram_scalar(q, p)
        if m < SINGULAR_FLOOR:
            raise SingularGramError(["sigma-x"], np.inf)
        qdot = -2.0 * (1.0 - 2.0 * p) ** 2 * math.cos(q) ** 2 / m
        pdot = 4.0 * (1.0 - 2.0 * p) * (p - 1.0) * p * math.sin(q) * math.cos(q) / m
        return np.array([qdot, pdot])

    return SystemDefinition(
        name="spin-half-sx",
        n=2,
        spectrum=spectrum,
        hamiltonian=HamiltonianFunction(spectrum),
        constraints=(observable_constraint(SIGMA_X, "sigma-x"),),
        embedding=_chart_embedding(2),
        oracle=oracle,
    )


@dataclass(frozen=True)
class AngularPoint:
    """Spherical angles on the Bloch sphere; theta in (0, pi) excludes the
    poles, phi is taken modulo 2*pi."""

    theta: float
    phi: float

    def __post_init__(self):
        theta = float(self.theta)
        if not 0.0 < theta < math.pi:
            raise ChartDomainError("polar angle must lie strictly between 0 and pi")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", float(np.mod(self.phi, 2.0 * math.pi)))


def to_angular(point: ChartPoint) -> AngularPoint:
    """Chart to sphere: p = sin^2(theta/2), q = -phi."""
    if point.m != 1:
        raise ValueError("angular coordinates exist only for two-level systems")
    p = float(point.p[0])
    if not 0.0 < p < 1.0:
        raise ChartDomainError("action out of range for the sphere interior")
    theta = 2.0 * math.asin(math.sqrt(p))
    return AngularPoint(theta, -float(point.q[0]))


def from_angular(angular: AngularPoint) -> ChartPoint:
    """Sphere to chart, mutual inverse of to_angular (angles mod 2*pi)."""
    p = math.sin(0.5 * angular.theta) ** 2
    q = float(np.mod(-angular.phi, 2.0 * math.pi))
    return ChartPoint(np.array([q]), np.array([p]))


def pushforward_to_angular(point: ChartPoint, velocity) -> Tuple[float, float]:
    """Push a chart velocity (qdot, pdot) to (thetadot, phidot):
    thetadot = pdot / sqrt(p (1-p)), phidot = -qdot."""
    p = float(point.p[0])
    qdot, pdot = float(velocity[0]), float(velocity[1])
    return pdot / math.sqrt(p * (1.0 - p)), -qdot


def angular_oracle_field(angular: AngularPoint) -> Tuple[float, float]:
    """Closed-form constrained field of the conserved-sigma_x spin system in
    spherical angles.  Undefined at the two singular fixed points, where the
    denominator 1 - sin^2 theta cos^2 phi vanishes."""
    denom = 1.0 - math.sin(angular.theta) ** 2 * math.cos(angular.phi) ** 2
    if denom < SINGULAR_FLOOR:
        raise SingularGramError(["sigma-x"], np.inf)
    thetadot = 0.5 * math.sin(2.0 * angular.theta) * math.sin(2.0 * angular.phi) / denom
    phidot = 2.0 * math.cos(angular.theta) ** 2 * math.cos(angular.phi) ** 2 / denom
    return thetadot, phidot


# ---------------------------------------------------------------------------
# Samplers and registry
# ---------------------------------------------------------------------------

def sample_interior_point(rng: np.random.Generator, pairs: int) -> ChartPoint:
    """Random chart point bounded away from the boundary: weights drawn in
    [0.2, 1] and normalised keep every p_nu and the residual above
    0.2 / (pairs + 1)."""
    weights = rng.uniform(0.2, 1.0, size=pairs + 1)
    p = weights[:pairs] / weights.sum()
    q = rng.uniform(0.0, 2.0 * np.pi, size=pairs)
    return ChartPoint(q, p)


def system_from_name(name: str, *, energies=None, n=None, constraints=()) -> SystemDefinition:
    """Instantiate a named system: "two-qubit-product", "spin-half-sx" or
    "diagonal" (which needs n and energies)."""
    if name == "two-qubit-product":
        if energies is None:
            return two_qubit_product_system()
        return two_qubit_product_system(energies)
    if name == "spin-half-sx":
        return single_spin_conserved_sx()
    if name == "diagonal":
        if n is None or energies is None:
            raise ValueError("the diagonal system needs both n and energies")
        return diagonal_system(int(n), energies, constraints)
    raise KeyError("unknown system %r" % name)
