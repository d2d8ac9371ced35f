"""Numerical radial eigensolver and quadrature checks.

Nothing here touches the transform machinery: energies come from a
finite-volume discretisation of the radial equation, so they are an
independent check on the closed forms in :mod:`elzaki_qm.potentials`.

The operator ``-(hbar^2/2M) r^(1-N) d/dr(r^(N-1) dR/dr) + V_eff R`` is
discretised on cells of width h centred at ``r_i = (i + 1/2) h``. Flux
through a face carries the weight ``r^(N-1)`` of that face, so the face at
r = 0 carries nothing and no boundary value at the origin is needed. With
``m_i = r_i^(N-1) h`` the symmetric form ``v_i = sqrt(m_i) R_i`` is a
tridiagonal eigenproblem; ``v_i / sqrt(h)`` samples ``u = r^((N-1)/2) R``
with unit discrete norm. Eigenvalues on steps h and 2h are combined by
Richardson extrapolation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import integrate, linalg

from .errors import DomainError, GridTooCoarseWarning, InsufficientBoundStatesError
from .potentials import (
    Coulomb,
    Harmonic,
    Mie,
    PotentialSpec,
    QuantumNumbers,
    UnitSystem,
    _cutoff,
    _qn,
    inverse_square_strength,
)

DEFAULT_TOLERANCE = 1e-6


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid on [r_min, r_max]; the solver uses its step and outer edge."""

    r_min: float
    r_max: float
    points: int

    def __post_init__(self):
        if not self.r_min > 0.0:
            raise DomainError("r_min must be positive")
        if not self.r_min < self.r_max:
            raise DomainError("r_min must be below r_max")
        if int(self.points) != self.points or self.points < 500:
            raise DomainError("a radial grid needs at least 500 points")

    @property
    def h(self) -> float:
        return (self.r_max - self.r_min) / (self.points - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.points)


@dataclass(frozen=True)
class EigenResult:
    """Lowest eigenvalues (extrapolated) and fine-grid eigenvectors.

    ``eigenvectors[j]`` samples ``u = r^((N-1)/2) R`` at ``r`` with
    ``sum(u**2) * h == 1``. ``convergence_estimate[j]`` is the difference
    between the Richardson values from steps (h, 2h) and (2h, 4h), a
    conservative bound on the error of the returned eigenvalue.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    convergence_estimate: np.ndarray
    r: np.ndarray
    h: float


@njit(cache=True)
def _sturm_count(d, e2, x):
    """Number of eigenvalues of the tridiagonal (d, e) below x."""
    count = 0
    q = 1.0
    for i in range(d.shape[0]):
        if i == 0:
            q = d[0] - x
        else:
            q = d[i] - x - e2[i - 1] / q
        if q == 0.0:
            q = -1e-300
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def _bisect_lowest(d, e2, count, lo, hi, rtol):
    out = np.empty(count)
    for j in range(count):
        a, b = lo, hi
        # eigenvalue j is the smallest x with at least j + 1 eigenvalues below it
        for _ in range(200):
            mid = 0.5 * (a + b)
            if _sturm_count(d, e2, mid) > j:
                b = mid
            else:
                a = mid
            if b - a <= rtol * max(abs(a), abs(b)) + 1e-300:
                break
        out[j] = 0.5 * (a + b)
        lo = a
    return out


def _gershgorin(d: np.ndarray, e: np.ndarray) -> tuple[float, float]:
    off = np.zeros_like(d)
    off[:-1] += np.abs(e)
    off[1:] += np.abs(e)
    return float(np.min(d - off)), float(np.max(d + off))


def tridiagonal_eigenvalues(d: np.ndarray, e: np.ndarray, count: int, rtol: float = 1e-15) -> np.ndarray:
    """Lowest ``count`` eigenvalues of a symmetric tridiagonal matrix by Sturm bisection."""
    d = np.ascontiguousarray(d, dtype=float)
    e = np.ascontiguousarray(e, dtype=float)
    if not 0 < count <= len(d):
        raise DomainError("count must lie between 1 and the matrix size")
    lo, hi = _gershgorin(d, e)
    return _bisect_lowest(d, e * e, int(count), lo, hi, rtol)


def tridiagonal_count_below(d: np.ndarray, e: np.ndarray, x: float) -> int:
    d = np.ascontiguousarray(d, dtype=float)
    e = np.ascontiguousarray(e, dtype=float)
    return int(_sturm_count(d, e * e, float(x)))


def _inverse_iteration(d: np.ndarray, e: np.ndarray, lam: float) -> np.ndarray:
    n = len(d)
    shift = lam - 1e-10 * max(1.0, abs(lam))
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[1] = d - shift
    ab[2, :-1] = e
    v = np.ones(n) / math.sqrt(n)
    for _ in range(3):
        v = linalg.solve_banded((1, 1), ab, v)
        v /= np.linalg.norm(v)
    i = int(np.argmax(np.abs(v)))
    return v if v[i] > 0.0 else -v


def _inverse_square_coefficient(pot: PotentialSpec) -> float:
    if isinstance(pot, Mie):
        return pot.a
    if isinstance(pot, (Coulomb, Harmonic)):
        return 0.0
    return pot.a2


def frobenius_exponent(pot: PotentialSpec, l: int, N: int, units: UnitSystem) -> float:
    """Regular root s of ``s(s + N - 2) = l(l+N-2) + 2M c/hbar^2``; R ~ r^s at the origin."""
    lam = l * (l + N - 2) + units.k2 * _inverse_square_coefficient(pot)
    disc = (N - 2) ** 2 + 4.0 * lam
    if disc < 0.0:
        raise DomainError("inverse-square attraction is too strong for a regular solution")
    return 0.5 * (math.sqrt(disc) - (N - 2))


def _assemble(pot: PotentialSpec, l: int, N: int, units: UnitSystem, h: float, cells: int):
    # R = r^s g removes every 1/r^2 term; g then solves
    # -(hbar^2/2M) r^-w (r^w g')' + V_reg g = E g  with  w = N - 1 + 2s
    s = frobenius_exponent(pot, l, N, units)
    w = N - 1 + 2.0 * s
    r = (np.arange(cells) + 0.5) * h
    t = units.hbar**2 / (2.0 * units.mass)
    lo = np.maximum(r - 0.5 * h, 0.0)
    hi = r + 0.5 * h
    mass = r**w * h
    V = np.asarray(pot.potential(r, units), dtype=float) - _inverse_square_coefficient(pot) / r**2
    d = t * (lo**w + hi**w) / (h * mass) + V
    e = -t * hi[:-1] ** w / (h * np.sqrt(mass[:-1] * mass[1:]))
    return r, d, e, mass, s


def default_grid(pot: PotentialSpec, l: int, N: int, units: UnitSystem = UnitSystem(), n_max: int = 2) -> RadialGrid:
    """Box and step suited to the tail and length scale of the potential family."""
    hb, M = units.hbar, units.mass
    if isinstance(pot, (Coulomb, Mie)):
        strength = pot.Z * pot.e2 if isinstance(pot, Coulomb) else -pot.b
        if not strength > 0.0:
            raise InsufficientBoundStatesError("the potential has no attractive 1/r tail")
        bohr = hb * hb / (M * strength)
        lam = inverse_square_strength(pot, l, N, units)
        k = 0.5 * ((N - 2) + math.sqrt((N - 2) ** 2 + 4.0 * lam))
        nu = n_max + k + 0.5 * (3 - N) if isinstance(pot, Mie) else n_max + l + 0.5 * (N - 1)
        r_max = 40.0 * max(nu, 1.0) ** 2 * bohr
        # a low weight r^(N-1+2s) at the origin converges less cleanly
        h = (0.01 if N - 1 + 2.0 * frobenius_exponent(pot, l, N, units) >= 2.0 else 0.004) * bohr
    else:
        alpha0 = M * pot.omega / hb if isinstance(pot, Harmonic) else math.sqrt(2.0 * M * pot.a1) / hb
        length = 1.0 / math.sqrt(alpha0)
        lam = inverse_square_strength(pot, l, N, units)
        reach = 2.0 * math.sqrt(2.0 * n_max + N + math.sqrt((N - 2) ** 2 + 4.0 * lam)) + 6.0
        r_max = max(10.0, reach) * length
        h = 0.005 * length
    points = max(500, int(math.ceil(r_max / h)) + 1)
    r_min = min(1e-4 * (r_max / 60.0), 0.5 * h)
    return RadialGrid(r_min, r_max, points)


def _solve_once(pot, l, N, units, h, cells, count):
    r, d, e, mass, _ = _assemble(pot, l, N, units, h, cells)
    threshold = pot.threshold(units)
    if math.isfinite(threshold):
        available = tridiagonal_count_below(d, e, threshold)
        if available < count:
            raise InsufficientBoundStatesError(
                f"only {available} states lie below the threshold {threshold:g} on this grid; {count} requested"
            )
    return r, d, e, tridiagonal_eigenvalues(d, e, count)


def eigensolve_radial(
    pot: PotentialSpec,
    l: int,
    N: int,
    units: UnitSystem = UnitSystem(),
    grid: RadialGrid | None = None,
    count: int = 1,
    tolerance: float = DEFAULT_TOLERANCE,
) -> EigenResult:
    """Lowest ``count`` radial eigenvalues for the channel (l, N).

    Without an explicit ``grid`` the default grid is used, and its step is
    halved up to twice if the convergence estimate misses ``tolerance``.

    Raises:
        InsufficientBoundStatesError: fewer than ``count`` levels lie below the
            continuum threshold.

    Warns:
        GridTooCoarseWarning: a convergence estimate exceeds ``tolerance``.
    """
    QuantumNumbers(0, l, N)
    if count < 1:
        raise DomainError("count must be at least 1")
    # a default grid may halve its step twice before the estimate is reported
    refinements = 2 if grid is None else 0
    grid = default_grid(pot, l, N, units, n_max=count - 1) if grid is None else grid
    h = grid.h
    cells = int(round(grid.r_max / h))
    cells += (-cells) % 4
    while True:
        r, d, e, fine = _solve_once(pot, l, N, units, h, cells, count)
        _, _, _, mid = _solve_once(pot, l, N, units, 2.0 * h, cells // 2, count)
        _, _, _, coarse = _solve_once(pot, l, N, units, 4.0 * h, cells // 4, count)
        extrapolated = (4.0 * fine - mid) / 3.0
        # the same extrapolation one level coarser bounds the error of the result
        estimate = np.abs(extrapolated - (4.0 * mid - coarse) / 3.0)
        if refinements == 0 or np.all(estimate <= tolerance):
            break
        refinements -= 1
        h, cells = 0.5 * h, 2 * cells
    if np.any(estimate > tolerance):
        warnings.warn(
            f"grid too coarse: convergence estimate {float(np.max(estimate)):.3g} exceeds {tolerance:.3g}",
            GridTooCoarseWarning,
            stacklevel=2,
        )
    vectors = np.array([_inverse_iteration(d, e, lam) / math.sqrt(h) for lam in fine])
    return EigenResult(extrapolated, vectors, estimate, r, h)


def eigenvalue_sequence(pot: PotentialSpec, l: int, N: int, units: UnitSystem, grid: RadialGrid, count: int = 1) -> np.ndarray:
    """Unextrapolated eigenvalues on the grid step alone (for convergence studies)."""
    cells = int(round(grid.r_max / grid.h))
    return _solve_once(pot, l, N, units, grid.h, cells, count)[3]


def ode_residual_radial(R, pot: PotentialSpec, qn: QuantumNumbers | tuple, units: UnitSystem, r: float) -> float:
    """``|R'' + (N-1)/r R' - [l(l+N-2)/r^2 + 2M(V-E)/hbar^2] R|`` with exact derivatives."""
    qn = _qn(qn)
    if not r > 0.0:
        raise DomainError("r must be positive")
    ep = R.exppoly()
    v, d1, d2 = ep(r), ep.derivative()(r), ep.nth_derivative(2)(r)
    V = float(pot.potential(r, units))
    k2 = units.k2
    bracket = qn.l * (qn.l + qn.N - 2) / r**2 + k2 * (V - R.energy)
    return abs(d2 + (qn.N - 1) / r * d1 - bracket * v)


def overlap(Ra, Rb, N: int) -> float:
    """``int_0^inf Ra Rb r^(N-1) dr`` by adaptive quadrature, rel 1e-12 per panel.

    Raises:
        DivergentNormError: the integrand does not decay.
    """
    scale = min(Ra.length_scale(), Rb.length_scale())
    weight = lambda r: np.abs(Ra(r) * Ra(r)) * r ** (N - 1) + np.abs(Rb(r) * Rb(r)) * r ** (N - 1)
    r_cut = _cutoff(weight, scale)
    g = lambda r: float(Ra(r) * Rb(r) * r ** (N - 1))
    edges = np.linspace(0.0, r_cut, 17)
    return sum(integrate.quad(g, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)[0] for lo, hi in zip(edges, edges[1:]))


def sampled_reduced(R, r: np.ndarray, N: int) -> np.ndarray:
    """``r^((N-1)/2) R(r)`` on the given nodes."""
    return r ** (0.5 * (N - 1)) * R(r)


def l2_distance_up_to_sign(u: np.ndarray, w: np.ndarray, h: float) -> float:
    """Discrete L2 distance after normalising both and aligning their sign."""
    u = u / math.sqrt(np.sum(u * u) * h)
    w = w / math.sqrt(np.sum(w * w) * h)
    return min(math.sqrt(np.sum((u - w) ** 2) * h), math.sqrt(np.sum((u + w) ** 2) * h))


__all__ = [
    "RadialGrid",
    "EigenResult",
    "eigensolve_radial",
    "eigenvalue_sequence",
    "default_grid",
    "tridiagonal_eigenvalues",
    "tridiagonal_count_below",
    "ode_residual_radial",
    "overlap",
    "sampled_reduced",
    "l2_distance_up_to_sign",
]
