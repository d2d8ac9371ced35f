"""Central potentials mapped onto the model equation in N dimensions.

The radial equation is::

    R'' + (N-1)/r R' - [l(l+N-2)/r^2 + 2M (V - E)/hbar^2] R = 0.

Writing ``R = r^(-k) f`` with k the positive root of
``k(k+1) - k(N-1) - lambda = 0`` removes the inverse-square term. After the
substitution y = r (Coulomb, Mie) or y = r^2 (oscillators) the equation for f
is the model equation, whose quantisation p = -n gives the spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np
from scipy import integrate, optimize

from .errors import ComplexRootError, DivergentNormError, DomainError, NoBoundStateError
from .exppoly import ExpPoly, kummer_exppoly
from .mde import MdeParams, quantization_condition
from .special_functions import kummer_1f1

EXPONENTIAL, GAUSSIAN = "exponential", "gaussian"


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0.0 and self.mass > 0.0):
            raise DomainError("hbar and mass must be positive")

    @property
    def k2(self) -> float:
        """2M/hbar^2, the factor between energies and inverse squared lengths."""
        return 2.0 * self.mass / self.hbar**2


@dataclass(frozen=True)
class Coulomb:
    """V = -Z e2 / r."""

    Z: float
    e2: float = 1.0
    kind = "coulomb"

    def __post_init__(self):
        if not self.e2 > 0.0:
            raise DomainError("the charge-squared factor e2 must be positive")

    def potential(self, r, units: UnitSystem):
        return -self.Z * self.e2 / np.asarray(r, dtype=float)

    def threshold(self, units: UnitSystem) -> float:
        return 0.0


@dataclass(frozen=True)
class Mie:
    """V = a/r^2 + b/r + c."""

    a: float
    b: float
    c: float = 0.0
    kind = "mie"

    @classmethod
    def modified_kratzer(cls, D0: float, r0: float) -> "Mie":
        return cls(-D0 * r0 * r0, 2.0 * D0 * r0, -D0)

    @classmethod
    def kratzer_fues(cls, D0: float, r0: float) -> "Mie":
        return cls(D0 * r0 * r0, -2.0 * D0 * r0, 0.0)

    def potential(self, r, units: UnitSystem):
        r = np.asarray(r, dtype=float)
        return self.a / r**2 + self.b / r + self.c

    def threshold(self, units: UnitSystem) -> float:
        return self.c


@dataclass(frozen=True)
class Harmonic:
    """V = M omega^2 r^2 / 2."""

    omega: float
    kind = "harmonic"

    def __post_init__(self):
        if not self.omega > 0.0:
            raise DomainError("omega must be positive")

    def potential(self, r, units: UnitSystem):
        r = np.asarray(r, dtype=float)
        return 0.5 * units.mass * self.omega**2 * r**2

    def threshold(self, units: UnitSystem) -> float:
        return math.inf


@dataclass(frozen=True)
class Pseudoharmonic:
    """V = a1 r^2 + a2/r^2 + a3."""

    a1: float
    a2: float = 0.0
    a3: float = 0.0
    kind = "pseudoharmonic"

    def __post_init__(self):
        if not self.a1 > 0.0:
            raise DomainError("a1 must be positive")
        if self.a2 < 0.0:
            raise DomainError("a2 must be non-negative")

    @classmethod
    def from_diatomic(cls, De: float, re: float) -> "Pseudoharmonic":
        """``De (r/re - re/r)^2`` expanded into (a1, a2, a3)."""
        return cls(De / re**2, De * re**2, -2.0 * De)

    def potential(self, r, units: UnitSystem):
        r = np.asarray(r, dtype=float)
        return self.a1 * r**2 + self.a2 / r**2 + self.a3

    def threshold(self, units: UnitSystem) -> float:
        return math.inf


PotentialSpec = Union[Coulomb, Mie, Harmonic, Pseudoharmonic]


@dataclass(frozen=True)
class QuantumNumbers:
    n: int
    l: int
    N: int

    def __post_init__(self):
        for name in ("n", "l", "N"):
            if int(getattr(self, name)) != getattr(self, name):
                raise DomainError(f"{name} must be an integer")
        if self.n < 0 or self.l < 0:
            raise DomainError("n and l must be non-negative")
        if self.N < 2:
            raise DomainError("the dimension N must be at least 2")


def _check_channel(l: int, N: int) -> None:
    QuantumNumbers(0, l, N)


def inverse_square_strength(pot: PotentialSpec, l: int, N: int, units: UnitSystem) -> float:
    """lambda: the total coefficient of 1/r^2 in the reduced radial equation."""
    base = l * (l + N - 2)
    if isinstance(pot, Mie):
        return base + units.k2 * pot.a
    if isinstance(pot, Pseudoharmonic):
        return base + units.k2 * pot.a2
    return float(base)


def singularity_exponent(pot: PotentialSpec, l: int, N: int, units: UnitSystem = UnitSystem()) -> float:
    """Positive root k of ``k(k+1) - k(N-1) - lambda = 0``.

    Raises:
        ComplexRootError: the inverse-square attraction is too strong.
    """
    _check_channel(l, N)
    if isinstance(pot, (Coulomb, Harmonic)):
        return float(l + N - 2)
    lam = inverse_square_strength(pot, l, N, units)
    disc = (N - 2) ** 2 + 4.0 * lam
    if disc < 0.0:
        raise ComplexRootError(f"discriminant {disc:.6g} < 0: inverse-square term is over-attractive")
    return 0.5 * ((N - 2) + math.sqrt(disc))


@dataclass(frozen=True)
class MdeMap:
    """Model-equation parameters plus the change of variable y = r or y = r^2."""

    params: MdeParams
    variable: str
    k: float


def mde_map(pot: PotentialSpec, l: int, N: int, units: UnitSystem, E: float) -> MdeMap:
    """(A, B, C) of the model equation for energy E.

    Raises:
        DomainError: E lies outside the bound-state range, so B is not real.
    """
    k = singularity_exponent(pot, l, N, units)
    k2 = units.k2
    if isinstance(pot, Coulomb):
        if not E < 0.0:
            raise DomainError("Coulomb bound states need E < 0")
        beta = math.sqrt(-k2 * E)
        return MdeMap(MdeParams(-(2 * l + N - 3.0), beta, k2 * pot.Z * pot.e2), "r", k)
    if isinstance(pot, Mie):
        if not E < pot.c:
            raise DomainError("Mie bound states need E < c")
        eps = math.sqrt(-k2 * (E - pot.c))
        return MdeMap(MdeParams(-(2.0 * k - N + 1.0), eps, -k2 * pot.b), "r", k)
    if isinstance(pot, Harmonic):
        if not E > 0.0:
            raise DomainError("oscillator levels need E > 0")
        alpha0 = units.mass * pot.omega / units.hbar
        return MdeMap(MdeParams(N / 2.0 - k, alpha0 / 2.0, k2 * E / 4.0), "r^2", k)
    if not E > pot.a3:
        raise DomainError("pseudoharmonic levels need E > a3")
    mu = math.sqrt(k2 * pot.a1)
    return MdeMap(MdeParams(N / 2.0 - k, mu / 2.0, k2 * (E - pot.a3) / 4.0), "r^2", k)


def _qn(qn: QuantumNumbers | tuple) -> QuantumNumbers:
    return qn if isinstance(qn, QuantumNumbers) else QuantumNumbers(*qn)


def _mie_denominator(pot: Mie, qn: QuantumNumbers, units: UnitSystem) -> float:
    if pot.b >= 0.0:
        raise NoBoundStateError("Mie potential with b >= 0 has no bound states of this form (needs b < 0)")
    k = singularity_exponent(pot, qn.l, qn.N, units)
    if not 2.0 * k - qn.N + 3.0 > 0.0:
        raise NoBoundStateError(f"2k - N + 3 = {2.0 * k - qn.N + 3.0:.6g} <= 0: state is not normalisable")
    return qn.n + k + (3.0 - qn.N) / 2.0


def energy(pot: PotentialSpec, qn: QuantumNumbers | tuple, units: UnitSystem = UnitSystem()) -> float:
    """Closed-form bound-state energy.

    Raises:
        NoBoundStateError: the potential has no bound state with these numbers.
    """
    qn = _qn(qn)
    n, l, N = qn.n, qn.l, qn.N
    hb, M = units.hbar, units.mass
    if isinstance(pot, Coulomb):
        if not pot.Z > 0.0:
            raise NoBoundStateError("Coulomb potential needs Z > 0 for bound states")
        return -M * pot.Z**2 * pot.e2**2 / (2.0 * hb**2) / (n + l + (N - 1) / 2.0) ** 2
    if isinstance(pot, Mie):
        d = _mie_denominator(pot, qn, units)
        return pot.c - M * pot.b**2 / (2.0 * hb**2) / d**2
    if isinstance(pot, Harmonic):
        return hb * pot.omega * (2 * n + l + N / 2.0)
    root = math.sqrt((N + 2 * l - 2) ** 2 + 8.0 * M * pot.a2 / hb**2)
    return pot.a3 + math.sqrt(8.0 * hb**2 * pot.a1 / M) * (n + 0.5 + 0.25 * root)


def energy_by_quantization(pot: PotentialSpec, qn: QuantumNumbers | tuple, units: UnitSystem = UnitSystem()) -> float:
    """Solve ``quantization_condition(mde_map(E), n) = 0`` for E numerically.

    An independent route to the spectrum that uses only the map and p = -n.
    """
    qn = _qn(qn)
    energy(pot, qn, units)  # raises for states without a bound solution
    f = lambda E: quantization_condition(mde_map(pot, qn.l, qn.N, units, E).params, qn.n)
    if isinstance(pot, (Coulomb, Mie)):
        top = pot.threshold(units)
        span = 1.0
        while f(top - span) < 0.0:
            span *= 4.0
            if span > 1e30:
                raise NoBoundStateError("no sign change found in the bound-state range")
        return optimize.brentq(f, top - span, top - 1e-12 * span, xtol=1e-15, rtol=1e-15, maxiter=500)
    floor = 0.0 if isinstance(pot, Harmonic) else pot.a3
    span = 1.0
    while f(floor + span) > 0.0:
        span *= 4.0
    return optimize.brentq(f, floor + 1e-14 * span, floor + span, xtol=1e-15, rtol=1e-15, maxiter=500)


@dataclass(frozen=True)
class ClosedFormRadial:
    """``norm * r^power * decay(r) * 1F1(-n; f11_b; f11_scale * r^d)``.

    ``decay`` is ``exp(-kappa r)`` (d = 1) or ``exp(-kappa r^2 / 2)`` (d = 2).
    ``normalization`` is None until :func:`normalized` fixes it; the function
    then evaluates with multiplier 1.
    """

    power: float
    decay_kind: str
    decay: float
    f11_a: float
    f11_b: float
    f11_scale: float
    n: int
    l: int
    N: int
    energy: float
    normalization: float | None = None

    @property
    def degree(self) -> int:
        return 1 if self.decay_kind == EXPONENTIAL else 2

    @property
    def multiplier(self) -> float:
        return 1.0 if self.normalization is None else self.normalization

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        d = self.degree
        damp = np.exp(-self.decay * r) if d == 1 else np.exp(-0.5 * self.decay * r * r)
        val = self.multiplier * r**self.power * damp * kummer_1f1(self.f11_a, self.f11_b, self.f11_scale * r**d)
        return float(val) if val.ndim == 0 else val

    def exppoly(self) -> ExpPoly:
        kappa = self.decay if self.degree == 1 else 0.5 * self.decay
        return kummer_exppoly(self.multiplier, self.power, kappa, self.degree, self.n, self.f11_b, self.f11_scale)

    def scaled(self, s: float) -> "ClosedFormRadial":
        return replace(self, normalization=self.multiplier * s)

    def length_scale(self) -> float:
        return 1.0 / self.decay if self.degree == 1 else 1.0 / math.sqrt(self.decay)


def radial_wavefunction(pot: PotentialSpec, qn: QuantumNumbers | tuple, units: UnitSystem = UnitSystem()) -> ClosedFormRadial:
    """Unnormalised closed-form R for the quantised state."""
    qn = _qn(qn)
    n, l, N = qn.n, qn.l, qn.N
    E = energy(pot, qn, units)
    k2 = units.k2
    if isinstance(pot, Coulomb):
        beta = math.sqrt(-k2 * E)
        return ClosedFormRadial(float(l), EXPONENTIAL, beta, -n, 2.0 * l + N - 1.0, 2.0 * beta, n, l, N, E)
    k = singularity_exponent(pot, l, N, units)
    if isinstance(pot, Mie):
        eps = math.sqrt(-k2 * (E - pot.c))
        return ClosedFormRadial(k - N + 2.0, EXPONENTIAL, eps, -n, 2.0 * k - N + 3.0, 2.0 * eps, n, l, N, E)
    if isinstance(pot, Harmonic):
        alpha0 = units.mass * pot.omega / units.hbar
        return ClosedFormRadial(float(l), GAUSSIAN, alpha0, -n, N / 2.0 + l, alpha0, n, l, N, E)
    mu = math.sqrt(k2 * pot.a1)
    return ClosedFormRadial(k - N + 2.0, GAUSSIAN, mu, -n, k - N / 2.0 + 2.0, mu, n, l, N, E)


def _cutoff(f, scale: float) -> float:
    """Radius beyond which f has dropped below 1e-14 of its peak."""
    r_far = 10.0 * scale
    for _ in range(60):
        rs = np.linspace(0.0, r_far, 4001)[1:]
        vals = np.abs(f(rs))
        peak = float(np.max(vals))
        if not math.isfinite(peak):
            raise DivergentNormError("wavefunction is not finite on the sampling grid")
        if peak > 0.0:
            tail = np.nonzero(vals >= 1e-14 * peak)[0][-1]
            if tail < len(rs) - 1 and vals[-1] < 1e-14 * peak:
                return float(rs[min(tail + 1, len(rs) - 1)])
        r_far *= 2.0
    raise DivergentNormError("integrand does not decay")


def overlap_integral(Ra, Rb, N: int, scale: float) -> float:
    """``int_0^inf Ra Rb r^(N-1) dr`` by adaptive quadrature to rel 1e-12."""
    g = lambda r: Ra(r) * Rb(r) * r ** (N - 1)
    r_cut = _cutoff(lambda r: np.abs(Ra(r) * Ra(r) * r ** (N - 1)) + np.abs(Rb(r) * Rb(r) * r ** (N - 1)), scale)
    edges = np.linspace(0.0, r_cut, 9)
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        total += integrate.quad(g, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return total


def normalize(R: ClosedFormRadial, N: int | None = None) -> float:
    """C such that ``int |C R|^2 r^(N-1) dr = 1``.

    Raises:
        DivergentNormError: R does not decay.
    """
    N = R.N if N is None else N
    if not R.decay > 0.0:
        raise DivergentNormError("decay parameter must be positive for a normalisable state")
    norm2 = overlap_integral(R, R, N, R.length_scale())
    if not (norm2 > 0.0 and math.isfinite(norm2)):
        raise DivergentNormError("norm integral is not a positive finite number")
    return 1.0 / math.sqrt(norm2)


def normalized(R: ClosedFormRadial, N: int | None = None) -> ClosedFormRadial:
    return R.scaled(normalize(R, N))


def count_nodes(R, r_max: float, points: int = 20001) -> int:
    """Strictly positive zeros of R on (0, r_max], counted by sign changes."""
    rs = np.linspace(0.0, r_max, points)[1:]
    vals = R(rs)
    peak = np.max(np.abs(vals))
    vals = np.where(np.abs(vals) < 1e-12 * peak, 0.0, vals)
    s = np.sign(vals)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))
