"""Constraint functions on state space and their Gram matrix.

A constraint is a real function Phi(x) on the chart whose zero (or level)
set defines a hypersurface.  Two kinds are supported: "observable"
constraints, the expectation value of a fixed Hermitian matrix through the
chart embedding, and "algebraic" constraints, arbitrary real functions of
the chart point.  For N constraints the Gram matrix

    M^{ij} = g^{ab} grad_a Phi^i grad_b Phi^j

collects the metric inner products of the gradients; for observable
constraints it coincides with the (symmetrised) covariance matrix of the
observables in the current state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EigenstateDegenerateError, SingularGramError
from .geometry import ChartPoint, PointGeometry, StateVector, embed, embed_jacobian, geometry_at

FD_STEP = 1e-6
# Gram matrices with a worse condition estimate than this, or with a
# smallest singular value below the floor, are treated as singular.
GRAM_CONDITION_LIMIT = 1e12
GRAM_SINGULAR_FLOOR = 1e-12


def finite_difference_gradient(fn, point: ChartPoint, step: float = FD_STEP) -> np.ndarray:
    """Centred-difference gradient of a scalar chart function.

    The step along coordinate a is step * max(1, |x_a|).
    """
    x0 = point.coords()
    grad = np.empty_like(x0)
    for a in range(x0.size):
        h = step * max(1.0, abs(x0[a]))
        xp = x0.copy()
        xm = x0.copy()
        xp[a] += h
        xm[a] -= h
        grad[a] = (fn(ChartPoint.from_coords(xp)) - fn(ChartPoint.from_coords(xm))) / (2.0 * h)
    return grad


def _check_hermitian(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("observable must be a square matrix")
    scale = max(1.0, float(np.abs(matrix).max()))
    if np.abs(matrix - matrix.conj().T).max() > 1e-12 * scale:
        raise ValueError("observable matrix is not Hermitian")
    return matrix


@dataclass(frozen=True)
class Constraint:
    """A single real constraint with its gradient.

    kind is "observable" or "algebraic".  When no analytic gradient is
    supplied the centred finite-difference fallback is used.
    """

    name: str
    kind: str
    fn: Callable[[ChartPoint], float]
    grad: Optional[Callable[[ChartPoint], np.ndarray]] = None
    matrix: Optional[np.ndarray] = None

    def value(self, point: ChartPoint) -> float:
        return float(self.fn(point))

    def gradient(self, point: ChartPoint) -> np.ndarray:
        if self.grad is not None:
            return np.asarray(self.grad(point), dtype=float)
        return finite_difference_gradient(self.fn, point)


def algebraic_constraint(name, fn, grad=None) -> Constraint:
    """Wrap an arbitrary real chart function as a constraint."""
    return Constraint(name=name, kind="algebraic", fn=fn, grad=grad)


def observable_constraint(matrix, name="observable") -> Constraint:
    """Conservation constraint for a Hermitian observable.

    The value is the normalised expectation <psi|A|psi>/<psi|psi> through
    the chart embedding; the gradient is analytic,

        grad_a Phi = 2 Re <d_a psi|(A - Phi)|psi> / <psi|psi>.
    """
    mat = _check_hermitian(matrix)
    n = mat.shape[0]

    def value(point: ChartPoint) -> float:
        amp = embed(point, n).amplitudes
        nrm = float(np.real(np.vdot(amp, amp)))
        return float(np.real(np.vdot(amp, mat @ amp))) / nrm

    def gradient(point: ChartPoint) -> np.ndarray:
        amp = embed(point, n).amplitudes
        dpsi = embed_jacobian(point)
        nrm = float(np.real(np.vdot(amp, amp)))
        expectation = float(np.real(np.vdot(amp, mat @ amp))) / nrm
        residual = mat @ amp - expectation * amp
        return (2.0 / nrm) * np.real(dpsi.conj() @ residual)

    return Constraint(name=name, kind="observable", fn=value, grad=gradient, matrix=mat)


@dataclass(frozen=True)
class GramMatrix:
    """Gram matrix M^{ij} of constraint gradients under g^{-1}.

    m_inv holds the inverse M_ij when the matrix is judged invertible and
    None otherwise; condition_number is the sigma_max/sigma_min estimate.
    """

    m: np.ndarray
    m_inv: Optional[np.ndarray]
    condition_number: float

    @property
    def size(self) -> int:
        return self.m.shape[0]


def gradient_rows(constraints: Sequence[Constraint], point: ChartPoint) -> np.ndarray:
    """Stack constraint gradients as rows of an (N, 2n-2) array."""
    return np.array([c.gradient(point) for c in constraints], dtype=float)


def gram_matrix(
    constraints: Sequence[Constraint],
    point: ChartPoint,
    geom: Optional[PointGeometry] = None,
    *,
    strict: bool = True,
) -> GramMatrix:
    """Build M^{ij} = g^{ab} grad_a Phi^i grad_b Phi^j and invert it.

    The result is exactly symmetric.  A matrix whose condition estimate
    exceeds GRAM_CONDITION_LIMIT (redundant constraints) or whose smallest
    singular value falls under the floor (a vanishing gradient) is
    singular: with strict=True this raises SingularGramError naming the
    constraints, otherwise the GramMatrix is returned with m_inv = None.
    """
    if len(constraints) == 0:
        raise ValueError("at least one constraint is required")
    if geom is None:
        geom = geometry_at(point)
    rows = gradient_rows(constraints, point)
    m = rows @ geom.g_inv @ rows.T
    m = 0.5 * (m + m.T)
    sv = np.linalg.svd(m, compute_uv=False)
    smax = float(sv[0])
    smin = float(sv[-1])
    cond = np.inf if smin == 0.0 else smax / smin
    singular = smin < GRAM_SINGULAR_FLOOR * max(1.0, smax) or cond > GRAM_CONDITION_LIMIT
    if singular:
        if strict:
            raise SingularGramError([c.name for c in constraints], cond)
        return GramMatrix(m, None, float(cond))
    m_inv = np.linalg.inv(m)
    return GramMatrix(m, 0.5 * (m_inv + m_inv.T), float(cond))


def covariance_matrix(observables: Sequence[np.ndarray], state: StateVector) -> np.ndarray:
    """Symmetrised covariance matrix of Hermitian observables in a state.

    Entry (i, j) is <A_i A_j>_sym - <A_i><A_j> in the normalised state,
    with the symmetrised product (A_i A_j + A_j A_i)/2 keeping the result
    real for non-commuting pairs.  A single observable yields its variance,
    which vanishes exactly at its eigenstates.
    """
    mats = [_check_hermitian(a) for a in observables]
    amp = state.normalized()
    acted = np.array([mat @ amp for mat in mats])
    means = np.real(acted @ amp.conj())
    # Re(<A_i psi, A_j psi>) is the symmetrised second moment for Hermitian A.
    second = np.real(acted.conj() @ acted.T)
    cov = second - np.outer(means, means)
    return 0.5 * (cov + cov.T)


def gram_covariance_check(constraints: Sequence[Constraint], point: ChartPoint) -> float:
    """Max-norm gap between the metric Gram matrix and the Hilbert-space
    covariance matrix of the same observables; analytically zero.

    Only observable-kind constraints qualify.
    """
    for c in constraints:
        if c.kind != "observable":
            raise ValueError("constraint %r is not observable-kind" % c.name)
    geom = geometry_at(point)
    rows = gradient_rows(constraints, point)
    metric_side = rows @ geom.g_inv @ rows.T
    hilbert_side = covariance_matrix([c.matrix for c in constraints], embed(point))
    return float(np.abs(metric_side - hilbert_side).max())


def two_constraint_determinant(gram: GramMatrix):
    """Determinant decomposition det M = (1 - rho^2) var(A) var(B).

    Returns (delta, rho) with rho the correlation of the two constrained
    quantities; |rho| = 1 flags a perfectly (anti)correlated, hence
    redundant, pair.  Raises EigenstateDegenerateError when a variance
    vanishes.
    """
    if gram.size != 2:
        raise ValueError("exactly two constraints are required")
    m = gram.m
    var_a = float(m[0, 0])
    var_b = float(m[1, 1])
    floor = 1e-14 * max(1.0, float(np.abs(m).max()))
    if var_a <= floor or var_b <= floor:
        raise EigenstateDegenerateError("a constraint has zero variance at this point")
    rho = float(np.clip(m[0, 1] / np.sqrt(var_a * var_b), -1.0, 1.0))
    delta = (1.0 - rho**2) * var_a * var_b
    return delta, rho
