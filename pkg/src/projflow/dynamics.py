"""Schrödinger flow, metric-projected constrained flow, and integration.

The free flow on the chart is the Hamiltonian vector field

    xdot^a = omega^{ab} grad_b H,

with H(x) the normalised expectation of the (diagonal) Hamiltonian
operator.  Constraints are enforced by removing the metric-normal
components of the field:

    xdot^a = omega^{ab} grad_b H - lambda_i g^{ab} grad_b Phi^i,
    lambda_i = M_ij omega^{ab} grad_a Phi^j grad_b H,

which makes the flow exactly tangent to every constraint level set.
Trajectories are produced by a fixed-step classical Runge-Kutta (RK4)
integrator with an optional post-step Newton projection that pulls the
constraint values back to their initial ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .constraints import Constraint, gradient_rows, gram_matrix
from .errors import ChartDomainError, SingularGramError
from .geometry import BOUNDARY_MARGIN, ChartPoint, StateVector, chart_from_state, embed, geometry_at

PROJECTION_TOL = 1e-10


@dataclass(frozen=True)
class SpectrumData:
    """Energies E_alpha of a diagonal Hamiltonian and the gaps
    Omega_nu = E_nu - E_n relative to the last level."""

    energies: np.ndarray
    gaps: np.ndarray = None

    def __post_init__(self):
        energies = np.atleast_1d(np.asarray(self.energies, dtype=float))
        if energies.size < 2:
            raise ValueError("a spectrum needs at least two levels")
        if not np.isfinite(energies).all():
            raise ValueError("energies must be finite")
        gaps = energies[:-1] - energies[-1]
        if self.gaps is not None and np.abs(np.asarray(self.gaps) - gaps).max() > 1e-15:
            raise ValueError("supplied gaps are inconsistent with the energies")
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "gaps", gaps)

    @property
    def n(self) -> int:
        return self.energies.size


@dataclass(frozen=True)
class HamiltonianFunction:
    """Expectation of a diagonal Hamiltonian as a chart function.

    In action-angle coordinates H(q, p) = E_n + sum_nu Omega_nu p_nu, so the
    gradient is constant: zero along the angles, the gaps along the actions.
    """

    spectrum: SpectrumData

    def value(self, point: ChartPoint) -> float:
        return float(self.spectrum.energies[-1] + self.spectrum.gaps @ point.p)

    def gradient(self, point: ChartPoint) -> np.ndarray:
        m = point.m
        grad = np.zeros(2 * m)
        grad[m:] = self.spectrum.gaps
        return grad

    def operator_matrix(self) -> np.ndarray:
        return np.diag(self.spectrum.energies)

    def expectation(self, state: StateVector) -> float:
        amp = state.normalized()
        return float(np.real(np.vdot(amp, self.spectrum.energies * amp)))


@dataclass(frozen=True)
class Trajectory:
    """Time-sampled flow data.

    qs are stored unwrapped to keep drift monitoring free of 2*pi jumps;
    wrap on output when a principal value is wanted.  exit_flag is
    "completed", or "boundary" / "singular" for a truncated run.
    """

    times: np.ndarray
    qs: np.ndarray
    ps: np.ndarray
    constraint_values: np.ndarray
    energies: np.ndarray
    exit_flag: str

    def __len__(self) -> int:
        return self.times.size

    def point(self, i: int) -> ChartPoint:
        return ChartPoint(self.qs[i], self.ps[i])

    def final_point(self) -> ChartPoint:
        return self.point(len(self) - 1)


def _resolve_constraints(system, constraints) -> tuple:
    return tuple(system.constraints if constraints is None else constraints)


def schrodinger_field(point: ChartPoint, system, geom=None) -> np.ndarray:
    """Unconstrained flow omega^{ab} grad_b H; in these coordinates the
    conventional Hamilton equations qdot = Omega, pdot = 0."""
    if geom is None:
        geom = geometry_at(point)
    return geom.omega_inv @ system.hamiltonian.gradient(point)


def multipliers(point: ChartPoint, system, constraints=None, geom=None) -> np.ndarray:
    """Lagrange multipliers lambda_i = M_ij omega^{ab} grad_a Phi^j grad_b H.

    Solving with these multipliers makes the projected field tangent to
    every constraint surface.  Raises SingularGramError when M is not
    invertible at the point.
    """
    cons = _resolve_constraints(system, constraints)
    if not cons:
        return np.zeros(0)
    if geom is None:
        geom = geometry_at(point)
    rows = gradient_rows(cons, point)
    gram = gram_matrix(cons, point, geom)
    free = geom.omega_inv @ system.hamiltonian.gradient(point)
    lam = gram.m_inv @ (rows @ free)
    if not np.isfinite(lam).all():
        raise SingularGramError([c.name for c in cons], gram.condition_number)
    return lam


def constrained_field(point: ChartPoint, system, constraints=None, geom=None) -> np.ndarray:
    """Metric-projected flow: the free field minus its g-normal components
    relative to the constraint surface.

    With no constraints this is exactly the free Schrödinger field (the
    same code path with a vanishing correction).
    """
    cons = _resolve_constraints(system, constraints)
    if geom is None:
        geom = geometry_at(point)
    free = geom.omega_inv @ system.hamiltonian.gradient(point)
    if not cons:
        return free
    rows = gradient_rows(cons, point)
    gram = gram_matrix(cons, point, geom)
    lam = gram.m_inv @ (rows @ free)
    return free - geom.g_inv @ (rows.T @ lam)


def _interior(x: np.ndarray) -> bool:
    m = x.size // 2
    p = x[m:]
    return float(p.min()) > BOUNDARY_MARGIN and 1.0 - float(p.sum()) > BOUNDARY_MARGIN


def integrate(
    system,
    x0: ChartPoint,
    t_end: float,
    dt: float,
    *,
    constraints: Optional[Sequence[Constraint]] = None,
    projection: Optional[bool] = None,
    newton_max: int = 5,
    projection_tol: float = PROJECTION_TOL,
) -> Trajectory:
    """Fixed-step RK4 integration of the (constrained) flow.

    Samples are recorded at every accepted step (multiples of dt, with a
    final shorter step landing exactly on t_end); each sample carries the
    raw constraint values and the energy.  Constrained runs preserve the
    constraint values of the start point: with projection enabled (the
    default when constraints are present) up to newton_max Newton
    corrections along the metric normals g^{-1} grad Phi pull the values
    back to the initial ones after every step.

    If a stage point leaves the guarded chart interior the trajectory is
    truncated with exit_flag "boundary"; a singular constraint Gram matrix
    en route truncates with "singular".
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if t_end < 0.0:
        raise ValueError("t_end must be nonnegative")
    cons = _resolve_constraints(system, constraints)
    if projection is None:
        projection = bool(cons)
    ham = system.hamiltonian

    def field(x: np.ndarray) -> np.ndarray:
        return constrained_field(ChartPoint.from_coords(x), system, cons)

    x = x0.coords().copy()
    if not _interior(x):
        raise ChartDomainError("start point is not inside the guarded chart interior")
    targets = np.array([c.value(x0) for c in cons])

    def project(x: np.ndarray) -> np.ndarray:
        for _ in range(newton_max):
            pt = ChartPoint.from_coords(x)
            values = np.array([c.value(pt) for c in cons]) - targets
            if np.abs(values).max() < projection_tol:
                break
            geom = geometry_at(pt)
            rows = gradient_rows(cons, pt)
            gram = gram_matrix(cons, pt, geom)
            x = x - geom.g_inv @ (rows.T @ (gram.m_inv @ values))
        return x

    times = [0.0]
    states = [x.copy()]
    values = [targets.copy()]
    energies = [ham.value(x0)]
    flag = "completed"
    t = 0.0
    while t < t_end - 1e-12 * max(1.0, abs(t_end)):
        h = min(dt, t_end - t)
        try:
            k1 = field(x)
            k2 = field(x + 0.5 * h * k1)
            k3 = field(x + 0.5 * h * k2)
            k4 = field(x + h * k3)
            x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not _interior(x_new):
                flag = "boundary"
                break
            if projection and cons:
                x_new = project(x_new)
                if not _interior(x_new):
                    flag = "boundary"
                    break
        except SingularGramError:
            flag = "singular"
            break
        except ChartDomainError:
            flag = "boundary"
            break
        t += h
        x = x_new
        pt = ChartPoint.from_coords(x)
        times.append(t)
        states.append(x.copy())
        values.append(np.array([c.value(pt) for c in cons]))
        energies.append(ham.value(pt))

    states = np.array(states)
    m = x0.m
    return Trajectory(
        times=np.array(times),
        qs=states[:, :m],
        ps=states[:, m:],
        constraint_values=np.array(values).reshape(len(times), len(cons)),
        energies=np.array(energies),
        exit_flag=flag,
    )


def exact_unitary_oracle(system, x0: ChartPoint, t: float) -> ChartPoint:
    """Independent oracle for the free flow of a diagonal Hamiltonian.

    Evolves the amplitudes by the exact phases e^{-i E_alpha t} and
    re-extracts the chart point, so p is invariant and
    q_nu(t) = q_nu(0) + Omega_nu t modulo 2*pi.
    """
    amp = embed(x0, system.n).amplitudes
    evolved = amp * np.exp(-1j * system.spectrum.energies * t)
    return chart_from_state(StateVector(evolved))
