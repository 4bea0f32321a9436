"""Kähler geometry of the manifold of pure states in an action-angle chart.

An n-level pure state with nonvanishing amplitude on the last basis vector
is parametrised by coordinates x = (q_1..q_{n-1}, p_1..p_{n-1}) through

    psi(x) = (sqrt(p_1) e^{-i q_1}, ..., sqrt(p_{n-1}) e^{-i q_{n-1}},
              sqrt(1 - p_1 - ... - p_{n-1})),

so the squared amplitudes are the actions p_nu and the relative phases are
the angles q_nu.  Pulling the Fubini-Study line element back through this
embedding yields the Hermitian form

    K_ab = 4 [ <d_a psi|d_b psi> / <psi|psi>
               - <d_a psi|psi><psi|d_b psi> / <psi|psi>^2 ],

whose real part is the Riemannian metric g_ab and whose imaginary part is
the fundamental two-form Omega_ab.  The quantum symplectic structure is
omega = Omega/2 (the canonical block matrix [[0, I], [-I, 0]] in these
coordinates, so Schrödinger flow is literally Hamilton's equations), and
the complex structure is J = g^{-1} Omega, normalised so that

    J.J = -I,     J^T g J = g,     Omega = g J,     J^T Omega J = Omega.

All functions here are pure; evaluating them concurrently over batches of
points is safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartDomainError, DegenerateGeometryError

# Points closer than this to the chart boundary are rejected by
# geometry_at: g and g^{-1} carry 1/p_nu and 1/(1 - sum p) entries.
BOUNDARY_MARGIN = 1e-9


@dataclass(frozen=True)
class ChartPoint:
    """Action-angle coordinates of a pure state.

    q: relative phases in radians, length n-1 (unwrapped values allowed).
    p: squared amplitudes, length n-1; inside the chart each p_nu lies in
       (0, 1) and sum(p) < 1, leaving a positive residual amplitude.
    """

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.ndim != 1 or p.ndim != 1 or q.shape != p.shape:
            raise ValueError("q and p must be 1-d arrays of equal length")
        if not (np.isfinite(q).all() and np.isfinite(p).all()):
            raise ValueError("coordinates must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_coords(cls, x) -> "ChartPoint":
        """Build from a flat coordinate vector (q-block, then p-block)."""
        x = np.asarray(x, dtype=float)
        m = x.size // 2
        return cls(x[:m], x[m:])

    def coords(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @property
    def m(self) -> int:
        """Number of coordinate pairs, n - 1."""
        return self.q.size

    @property
    def margin(self) -> float:
        """Signed distance from the open-chart boundary in the p variables."""
        return float(min(self.p.min(), 1.0 - self.p.sum()))


@dataclass(frozen=True)
class StateVector:
    """Hilbert-space amplitudes psi^alpha of a ray.

    Overall scale and phase are gauge: two vectors differing by a nonzero
    complex factor represent the same state.  The zero vector is rejected.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex))
        if amp.ndim != 1:
            raise ValueError("amplitudes must form a vector")
        if not np.isfinite(amp.view(float)).all():
            raise ValueError("amplitudes must be finite")
        if not np.any(amp):
            raise ChartDomainError("the zero vector does not represent a state")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def n(self) -> int:
        return self.amplitudes.size

    def norm_squared(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))

    def normalized(self) -> np.ndarray:
        return self.amplitudes / np.sqrt(self.norm_squared())


@dataclass(frozen=True)
class PointGeometry:
    """Metric, symplectic and complex structures at a single chart point.

    g / g_inv:          Fubini-Study metric g_ab and inverse g^ab.
    omega / omega_inv:  symplectic form omega_ab and its inverse omega^ab,
                        normalised so omega^{ac} omega_{bc} = delta^a_b.
    big_omega:          fundamental two-form Omega_ab = 2 omega_ab.
    j:                  complex structure J^a_b (rows carry the upper index).
    g_condition:        1-norm condition estimate of g from the direct solve.
    """

    g: np.ndarray
    g_inv: np.ndarray
    omega: np.ndarray
    omega_inv: np.ndarray
    big_omega: np.ndarray
    j: np.ndarray
    g_condition: float

    @property
    def big_omega_inv(self) -> np.ndarray:
        """Omega^{ab} = g^{ac} g^{db} Omega_cd, inverse to Omega_ab."""
        return 0.5 * self.omega_inv

    @property
    def dim(self) -> int:
        return self.g.shape[0]


def embed(point: ChartPoint, n: int | None = None) -> StateVector:
    """Map a chart point to its state vector.

    The component psi^nu carries modulus sqrt(p_nu) and phase -q_nu; the
    residual amplitude sqrt(1 - sum p) sits on the last basis vector and is
    real positive, which fixes the overall phase of the representative.
    """
    m = point.m
    if n is not None and n != m + 1:
        raise ValueError("chart has %d pairs but the system dimension is %d" % (m, n))
    p_last = 1.0 - point.p.sum()
    if np.any(point.p <= 0.0) or p_last <= 0.0:
        raise ChartDomainError(
            "point outside the open chart: need every p_nu > 0 and sum(p) < 1"
        )
    amp = np.empty(m + 1, dtype=complex)
    amp[:m] = np.sqrt(point.p) * np.exp(-1j * point.q)
    amp[m] = np.sqrt(p_last)
    return StateVector(amp)


def chart_from_state(state: StateVector) -> ChartPoint:
    """Invert the embedding.  Requires every amplitude to be nonzero; the
    returned angles lie in [0, 2*pi)."""
    amp = state.amplitudes
    weights = np.abs(amp) ** 2
    if np.any(weights <= 0.0):
        raise ChartDomainError("state has a vanishing amplitude; outside the chart")
    p = weights[:-1] / weights.sum()
    q = np.mod(-(np.angle(amp[:-1]) - np.angle(amp[-1])), 2.0 * np.pi)
    return ChartPoint(q, p)


def embed_jacobian(point: ChartPoint) -> np.ndarray:
    """Analytic chart derivatives d_a psi.

    Returns a complex array of shape (2(n-1), n); row a holds the
    derivative of psi along coordinate a in (q-block, p-block) order:

        d psi^nu / d q_nu = -i sqrt(p_nu) e^{-i q_nu}
        d psi^nu / d p_nu = e^{-i q_nu} / (2 sqrt(p_nu))
        d psi^n  / d p_nu = -1 / (2 sqrt(1 - sum p))
    """
    m = point.m
    p_last = 1.0 - point.p.sum()
    if np.any(point.p <= 0.0) or p_last <= 0.0:
        raise ChartDomainError("cannot differentiate the embedding outside the chart")
    phase = np.exp(-1j * point.q)
    sqrt_p = np.sqrt(point.p)
    dpsi = np.zeros((2 * m, m + 1), dtype=complex)
    idx = np.arange(m)
    dpsi[idx, idx] = -1j * sqrt_p * phase
    dpsi[m + idx, idx] = 0.5 * phase / sqrt_p
    dpsi[m + idx, m] = -0.5 / np.sqrt(p_last)
    return dpsi


def embed_jacobian_fd(point: ChartPoint, step: float = 1e-6) -> np.ndarray:
    """Centred finite-difference cross-check for embed_jacobian.

    Agrees with the analytic derivatives to about the square of the step.
    The stencil must stay inside the open chart.
    """
    x0 = point.coords()
    m = point.m
    dpsi = np.empty((2 * m, m + 1), dtype=complex)
    for a in range(2 * m):
        xp = x0.copy()
        xm = x0.copy()
        xp[a] += step
        xm[a] -= step
        fp = embed(ChartPoint.from_coords(xp)).amplitudes
        fm = embed(ChartPoint.from_coords(xm)).amplitudes
        dpsi[a] = (fp - fm) / (2.0 * step)
    return dpsi


def pullback_tensors(psi: np.ndarray, dpsi: np.ndarray):
    """Metric and fundamental two-form pulled back through an embedding.

    Works for any local embedding given the vector psi and the row-wise
    derivatives d_a psi.  Returns (g, Omega) with g_ab = Re K_ab and
    Omega_ab = Im K_ab for the Hermitian form K defined in the module
    docstring; the outputs are exactly symmetrised / antisymmetrised.
    """
    nrm = float(np.real(np.vdot(psi, psi)))
    dconj = dpsi.conj()
    overlap = dconj @ dpsi.T
    v = dconj @ psi
    k = 4.0 * (overlap / nrm - np.outer(v, v.conj()) / nrm**2)
    g = k.real
    om = k.imag
    return 0.5 * (g + g.T), 0.5 * (om - om.T)


def geometry_at(point: ChartPoint) -> PointGeometry:
    """Evaluate every point tensor of the chart geometry.

    Raises DegenerateGeometryError within BOUNDARY_MARGIN of the chart
    boundary, where the metric (and its inverse) blow up.  Inversion is a
    dense direct solve; the 1-norm condition estimate of g is reported on
    the result.
    """
    if point.margin < BOUNDARY_MARGIN:
        raise DegenerateGeometryError(
            "chart-boundary guard: margin %.3e below %.0e" % (point.margin, BOUNDARY_MARGIN)
        )
    psi = embed(point)
    dpsi = embed_jacobian(point)
    g, big_omega = pullback_tensors(psi.amplitudes, dpsi)
    g_inv = np.linalg.inv(g)
    g_inv = 0.5 * (g_inv + g_inv.T)
    cond = float(np.linalg.norm(g, 1) * np.linalg.norm(g_inv, 1))
    omega = 0.5 * big_omega
    omega_inv = 2.0 * (g_inv @ big_omega @ g_inv)
    j = g_inv @ big_omega
    return PointGeometry(g, g_inv, omega, omega_inv, big_omega, j, cond)


def fubini_study_distance(a: StateVector, b: StateVector) -> float:
    """Geodesic angle theta in [0, pi] between two rays.

    Defined through the transition probability:
        (1 + cos theta) / 2 = |<a|b>|^2 / (<a|a> <b|b>).
    Invariant under independent rescaling of either argument; identical
    rays give 0 and orthogonal rays give pi.
    """
    na = a.norm_squared()
    nb = b.norm_squared()
    fidelity = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2 / (na * nb)
    return float(np.arccos(np.clip(2.0 * fidelity - 1.0, -1.0, 1.0)))


def nijenhuis_tensor(point: ChartPoint, step: float = 1e-5) -> np.ndarray:
    """Discretised integrability obstruction of the complex structure,

        N^c_ab = J^c_d d_[a J^d_b] - J^d_[a d_|d| J^c_b],

    with coordinate partials in place of covariant derivatives (the
    combination is independent of the choice of symmetric connection).
    Returned with index layout N[c, a, b]; it is antisymmetric in (a, b)
    by construction.  The finite-difference stencil point +- step along
    every coordinate must stay inside the chart.
    """
    dim = 2 * point.m
    x0 = point.coords()
    dj = np.empty((dim, dim, dim))
    for a in range(dim):
        xp = x0.copy()
        xm = x0.copy()
        xp[a] += step
        xm[a] -= step
        jp = geometry_at(ChartPoint.from_coords(xp)).j
        jm = geometry_at(ChartPoint.from_coords(xm)).j
        dj[a] = (jp - jm) / (2.0 * step)
    j = geometry_at(point).j
    t1 = np.einsum("cd,adb->cab", j, dj)
    t2 = np.einsum("da,dcb->cab", j, dj)
    return 0.5 * (t1 - t1.transpose(0, 2, 1)) - 0.5 * (t2 - t2.transpose(0, 2, 1))


def nijenhuis_residual(point: ChartPoint, step: float = 1e-5) -> float:
    """Max-norm of the discretised Nijenhuis tensor; approximately zero
    (up to O(step^2) finite-difference error) on an integrable structure."""
    return float(np.abs(nijenhuis_tensor(point, step)).max())


def type_decompose(v, geom: PointGeometry):
    """Split a covector into complex positive and negative parts.

    Returns (v_plus, v_minus) with v_plus + v_minus = v,

        v_plus  = (v - i J^T v) / 2,      v_minus = (v + i J^T v) / 2,

    so that the covector action of J scales the parts by +i and -i:
    J^T v_plus = +i v_plus and J^T v_minus = -i v_minus.
    """
    v = np.asarray(v, dtype=complex)
    if v.shape != (geom.dim,):
        raise ValueError("covector length %d does not match chart dimension %d" % (v.size, geom.dim))
    jv = geom.j.T @ v
    return 0.5 * (v - 1j * jv), 0.5 * (v + 1j * jv)
