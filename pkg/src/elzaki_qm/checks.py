"""Verification suites behind ``elzaki-qm verify``.

Every check records what was measured, the tolerance it was held to and the
outcome, so the report can be read by a machine. Checks run in a fixed order
and use a fixed random seed, so two runs give identical reports.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .elzaki import (
    Expr,
    appendix_table,
    convolve,
    elzaki_numeric,
    elzaki_quad,
    elzaki_transform,
    inverse_elzaki,
    laplace_dual,
    shifted_transform,
    solve_bessel_zeroth,
    solve_shm,
)
from .elzaki.appendix import value_and_slope_at_zero
from .elzaki.table import relative_gap, table_samples
from .errors import ElzakiError, GridTooCoarseWarning
from .mde import closed_form_chi, derived_image, mde_residual, quantised_params, residual_tolerance, transform_space_solution
from .oracle import eigensolve_radial
from .potentials import (
    Coulomb,
    Harmonic,
    Mie,
    Pseudoharmonic,
    UnitSystem,
    count_nodes,
    energy,
    normalized,
    radial_wavefunction,
)
from .potentials import overlap_integral

SUITES = ("transforms", "mde", "spectrum", "nodes", "orthogonality", "appendix")
SPECTRUM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""

    def as_row(self) -> dict:
        row = asdict(self)
        if not math.isfinite(row["measured"]):
            row["measured"] = None
        return row


def _check(suite: str, name: str, measured: float, tolerance: float, detail: str = "") -> Check:
    measured = float(measured)
    return Check(suite, name, measured, tolerance, bool(math.isfinite(measured) and measured <= tolerance), detail)


def _failed(suite: str, name: str, tolerance: float, err: Exception) -> Check:
    return Check(suite, name, math.nan, tolerance, False, f"{type(err).__name__}: {err}")


def default_potentials() -> dict[str, object]:
    """Named potentials with O(1) parameters used by the spectrum suite."""
    return {
        "coulomb": Coulomb(1.0),
        "harmonic": Harmonic(1.0),
        "kratzer-fues": Mie.kratzer_fues(1.0, 1.0),
        "pseudoharmonic": Pseudoharmonic.from_diatomic(1.0, 1.0),
    }


def convolution_pairs(count: int = 20, seed: int = 7) -> list[tuple[Expr, Expr]]:
    """Random pairs of grammar functions for the convolution theorem."""
    rng = np.random.default_rng(seed)
    pairs = []

    def pick() -> Expr:
        kind = rng.choice(["1", "sin", "cos", "sinh", "cosh"])
        rate = float(np.round(rng.uniform(-1.0, 1.0), 3))
        power = int(rng.integers(0, 3))
        coeff = float(np.round(rng.uniform(0.5, 2.0), 3))
        f = Expr.power(power, coeff) * Expr.exp(rate)
        if kind != "1":
            f = f * Expr.osc(str(kind), float(np.round(rng.uniform(0.3, 1.5), 3)))
        return f

    for _ in range(count):
        pairs.append((pick(), pick()))
    return pairs


def convolution_gap(G: Expr, H: Expr, us) -> float:
    """Largest relative gap between ``u E[G*H]`` and ``E[G] E[H]`` over ``us``.

    The left image is put over a common denominator first: the partial fractions
    of close complex rates cancel heavily when summed pointwise.
    """
    lhs = elzaki_transform(convolve(G, H)).combined()
    TG, TH = elzaki_transform(G), elzaki_transform(H)
    return max(relative_gap(u * lhs.evaluate(u), TG.evaluate(u) * TH.evaluate(u)) for u in us)


def transform_checks() -> list[Check]:
    out = []
    for row in appendix_table():
        us = [u for u in (0.1, 0.3) if u < row.radius]
        for s in table_samples(row, us):
            name = f"table {row.name} u={s['u']:g}"
            out.append(_check("transforms", name + " quadrature", relative_gap(s["symbolic"], s["quadrature"]), 1e-6))
            if "laplace_dual" in s:
                out.append(_check("transforms", name + " duality", relative_gap(s["symbolic"], s["laplace_dual"]), 1e-10))
        try:
            if not row.f.has_impulse:
                direct = elzaki_transform(row.f)
                gap = max(relative_gap(direct.evaluate(u), row.image.evaluate(u)) for u in us)
                out.append(_check("transforms", f"table {row.name} symbolic transform", gap, 1e-10))
            back = inverse_elzaki(row.image)
            out.append(_check("transforms", f"table {row.name} round trip", 0.0 if back.is_close(row.f) else 1.0, 0.0))
        except ElzakiError as err:
            out.append(_failed("transforms", f"table {row.name} round trip", 0.0, err))
    us = (0.11, 0.17, 0.23, 0.29, 0.35)
    for i, (G, H) in enumerate(convolution_pairs()):
        try:
            out.append(_check("transforms", f"convolution pair {i}", convolution_gap(G, H, us), 1e-8, f"G={G}; H={H}"))
        except ElzakiError as err:
            out.append(_failed("transforms", f"convolution pair {i}", 1e-8, err))
    for a, text in ((1.0, "t"), (0.5, "sin(2t)"), (2.0, "t^2*exp(t)")):
        f = elzaki_transform(text)
        shifted = shifted_transform(f, a)
        g = Expr.exp(-a) * inverse_elzaki(f)
        gap = max(relative_gap(shifted.evaluate(u), elzaki_numeric(g, u)) for u in (0.1, 0.3))
        out.append(_check("transforms", f"shift a={a:g} f={text}", gap, 1e-6))
    return out


def mde_checks(count: int = 10, seed: int = 11) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(0, 4))
        B = float(rng.uniform(0.3, 2.0))
        C = B * (2.0 * n + float(rng.uniform(0.2, 4.0)))
        params = quantised_params(B, C, n)
        chi = closed_form_chi(params, n)
        worst = max(mde_residual(chi, params, y) / residual_tolerance(chi, y) for y in (0.5, 1.0, 2.0, 5.0))
        out.append(_check("mde", f"residual n={n} A={params.A:.6g} B={B:.6g} C={C:.6g}", worst, 1.0, "residual / tolerance"))
        image = derived_image(params)
        factors = transform_space_solution(params).image()
        u = 0.2 / B
        out.append(_check("mde", f"derived image i={i}", relative_gap(image.evaluate(u), factors.evaluate(u)), 1e-10))
    return out


def spectrum_checks(potentials: dict, tolerance: float = SPECTRUM_TOLERANCE, units: UnitSystem = UnitSystem()) -> list[Check]:
    out = []
    for name, pot in potentials.items():
        for N in (2, 3, 4, 5):
            for l in (0, 1, 2):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", GridTooCoarseWarning)
                    try:
                        res = eigensolve_radial(pot, l, N, units, count=3)
                    except ElzakiError as err:
                        out.append(_failed("spectrum", f"{name} N={N} l={l}", tolerance, err))
                        continue
                for n in range(3):
                    E = energy(pot, (n, l, N), units)
                    gap = abs(res.eigenvalues[n] - E)
                    out.append(_check("spectrum", f"{name} n={n} l={l} N={N}", gap, tolerance, f"closed={E!r}"))
    return out


def _families() -> dict:
    return {"harmonic": Harmonic(1.0), "pseudoharmonic": Pseudoharmonic.from_diatomic(1.0, 1.0)}


def node_checks() -> list[Check]:
    out = []
    for name, pot in _families().items():
        for N, l in ((3, 0), (2, 1), (4, 2)):
            for n in range(5):
                R = radial_wavefunction(pot, (n, l, N))
                found = count_nodes(R, 40.0 * R.length_scale())
                out.append(_check("nodes", f"{name} n={n} l={l} N={N}", abs(found - n), 0.0, f"nodes={found}"))
    return out


def orthogonality_checks() -> list[Check]:
    out = []
    for name, pot in _families().items():
        for N, l in ((3, 0), (4, 1)):
            states = [normalized(radial_wavefunction(pot, (n, l, N))) for n in range(5)]
            for i in range(5):
                for j in range(i, 5):
                    s = overlap_integral(states[i], states[j], N, states[0].length_scale())
                    target = 1.0 if i == j else 0.0
                    label = "norm" if i == j else "overlap"
                    out.append(_check("orthogonality", f"{name} {label} ({i},{j}) l={l} N={N}", abs(s - target), 1e-8))
    return out


def bessel_residual(y, a: float, x: float, h: float = 1e-3) -> float:
    """``|x y'' + y' + a^2 x y|`` from 5-point differences."""
    xs = x + h * np.arange(-2, 3)
    v = np.asarray(y(xs), dtype=float)
    d1 = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h)
    d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h)
    return abs(x * d2 + d1 + a * a * x * v[2])


BESSEL_SAMPLES = (0.3, 0.7, 1.1, 1.9, 2.5)


def appendix_checks() -> list[Check]:
    out = []
    for a in (1.0, 2.0):
        y = solve_bessel_zeroth(a)
        for x in BESSEL_SAMPLES:
            out.append(_check("appendix", f"bessel a={a:g} x={x:g}", bessel_residual(y, a, x), 1e-8, f"y={y}"))
    for omega, y0, yp0 in ((2.0, 1.0, 0.0), (2.0, 0.0, 2.0), (3.0, 1.0, 3.0)):
        y = solve_shm(omega, y0, yp0)
        v, s = value_and_slope_at_zero(y)
        out.append(_check("appendix", f"shm omega={omega:g} initial values", max(abs(v - y0), abs(s - yp0)), 1e-12, f"y={y}"))
    shifted = shifted_transform(elzaki_transform("t"), 1.0)
    g = Expr.exp(-1.0) * Expr.power(1)
    gap = max(relative_gap(shifted.evaluate(u), elzaki_quad(g, u)) for u in (0.1, 0.3, 0.5))
    out.append(_check("appendix", "shift a=1 f=t", gap, 1e-6, f"image={shifted}"))
    return out


def run_checks(
    suites=SUITES,
    potentials: dict | None = None,
    tolerance: float = SPECTRUM_TOLERANCE,
    units: UnitSystem = UnitSystem(),
) -> list[Check]:
    """Run the selected suites in their canonical order."""
    unknown = set(suites) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(sorted(unknown))}")
    out: list[Check] = []
    for suite in SUITES:
        if suite not in suites:
            continue
        if suite == "transforms":
            out += transform_checks()
        elif suite == "mde":
            out += mde_checks()
        elif suite == "spectrum":
            out += spectrum_checks(default_potentials() if potentials is None else potentials, tolerance, units)
        elif suite == "nodes":
            out += node_checks()
        elif suite == "orthogonality":
            out += orthogonality_checks()
        else:
            out += appendix_checks()
    return out
