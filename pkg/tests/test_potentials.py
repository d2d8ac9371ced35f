import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from elzaki_qm.errors import ComplexRootError, DivergentNormError, DomainError, NoBoundStateError
from elzaki_qm.mde import quantization_condition
from elzaki_qm.potentials import (
    Coulomb,
    Harmonic,
    Mie,
    Pseudoharmonic,
    QuantumNumbers,
    UnitSystem,
    count_nodes,
    energy,
    energy_by_quantization,
    mde_map,
    normalize,
    normalized,
    overlap_integral,
    radial_wavefunction,
    singularity_exponent,
)

U = UnitSystem()
MODELS = {
    "coulomb": Coulomb(1.0),
    "harmonic": Harmonic(1.0),
    "kratzer-fues": Mie.kratzer_fues(1.0, 1.0),
    "pseudoharmonic": Pseudoharmonic.from_diatomic(1.0, 1.0),
}


def test_constructors():
    assert Mie.modified_kratzer(2.0, 3.0) == Mie(-18.0, 12.0, -2.0)
    assert Mie.kratzer_fues(2.0, 3.0) == Mie(18.0, -12.0, 0.0)
    assert Pseudoharmonic.from_diatomic(2.0, 4.0) == Pseudoharmonic(0.125, 32.0, -4.0)
    with pytest.raises(DomainError):
        Harmonic(0.0)
    with pytest.raises(DomainError):
        Pseudoharmonic(0.0, 1.0)
    with pytest.raises(DomainError):
        UnitSystem(hbar=0.0)


def test_quantum_numbers_validation():
    with pytest.raises(DomainError):
        QuantumNumbers(0, 0, 1)
    with pytest.raises(DomainError):
        QuantumNumbers(-1, 0, 3)
    with pytest.raises(DomainError):
        energy(Coulomb(1.0), (0, 0, 1))


def test_singularity_exponent_examples():
    assert singularity_exponent(Coulomb(1.0), 1, 3) == 2.0
    assert singularity_exponent(Mie(0.0, -1.0), 0, 3) == pytest.approx(1.0)
    assert singularity_exponent(Pseudoharmonic(1.0, 1.0), 0, 3) == pytest.approx(2.0)


def test_singularity_exponent_complex_root():
    with pytest.raises(ComplexRootError):
        singularity_exponent(Mie(-1.0, -1.0), 0, 3)


def test_mde_map_examples():
    m = mde_map(Coulomb(1.0), 0, 3, U, -0.5)
    assert (m.params.A, m.params.B, m.params.C, m.variable) == (0.0, 1.0, 2.0, "r")
    m = mde_map(Harmonic(1.0), 0, 3, U, 1.5)
    assert (m.params.A, m.params.B, m.params.C, m.variable) == (0.5, 0.5, 0.75, "r^2")
    # gamma = -2 M b / hbar^2 = 4 for b = -2
    m = mde_map(Mie.kratzer_fues(1.0, 1.0), 0, 3, U, -0.5)
    assert m.k == pytest.approx(2.0)
    assert m.params.A == pytest.approx(-2.0)
    assert m.params.C == pytest.approx(4.0)


def test_mde_map_bound_state_range():
    with pytest.raises(DomainError):
        mde_map(Coulomb(1.0), 0, 3, U, 0.1)
    with pytest.raises(DomainError):
        mde_map(Mie(1.0, -1.0, 0.5), 0, 3, U, 0.7)
    with pytest.raises(DomainError):
        mde_map(Harmonic(1.0), 0, 3, U, -1.0)
    with pytest.raises(DomainError):
        mde_map(Pseudoharmonic(1.0, 1.0, 2.0), 0, 3, U, 1.0)


def test_energy_examples():
    assert energy(Coulomb(1.0), (0, 0, 3)) == pytest.approx(-0.5)
    assert energy(Coulomb(1.0), (1, 0, 3)) == pytest.approx(-0.125)
    assert energy(Harmonic(1.0), (0, 0, 3)) == pytest.approx(1.5)
    assert energy(Harmonic(1.0), (2, 1, 3)) == pytest.approx(6.5)
    assert energy(Mie.kratzer_fues(1.0, 1.0), (0, 0, 3)) == pytest.approx(-0.5)
    assert energy(Pseudoharmonic.from_diatomic(1.0, 1.0), (0, 0, 3)) == pytest.approx(-2.0 + math.sqrt(8.0) * 1.25)


def test_pseudoharmonic_reduces_to_shifted_oscillator():
    for n in range(4):
        assert energy(Pseudoharmonic(0.5, 0.0, 0.7), (n, 0, 3)) == pytest.approx(0.7 + 2 * n + 1.5, rel=1e-14)


def test_units_scale_energies():
    units = UnitSystem(hbar=2.0, mass=3.0)
    assert energy(Coulomb(1.0), (0, 0, 3), units) == pytest.approx(-3.0 / 8.0 / 1.0)
    assert energy(Harmonic(1.0), (0, 0, 3), units) == pytest.approx(3.0)


def test_no_bound_states():
    with pytest.raises(NoBoundStateError):
        energy(Coulomb(-1.0), (0, 0, 3))
    # modified Kratzer has b > 0, so no level of this form
    with pytest.raises(NoBoundStateError):
        energy(Mie.modified_kratzer(1.0, 1.0), (0, 0, 3))
    with pytest.raises(NoBoundStateError):
        energy_by_quantization(Mie(0.0, 1.0), (0, 0, 3))


qn_grid = [(n, l, N) for N in range(2, 7) for n in range(7) for l in range(7) if n + l <= 6]


@pytest.mark.parametrize("Z, e2", [(1.0, 1.0), (2.0, 0.5), (0.7, 3.0)])
def test_mie_reduces_to_coulomb(Z, e2):
    mie, coul = Mie(0.0, -Z * e2, 0.0), Coulomb(Z, e2)
    for qn in qn_grid:
        assert energy(mie, qn) == pytest.approx(energy(coul, qn), rel=1e-12)


@pytest.mark.parametrize("omega", [1.0, 0.3, 2.5])
def test_pseudoharmonic_reduces_to_harmonic(omega):
    ps, ho = Pseudoharmonic(0.5 * omega**2, 0.0, 0.0), Harmonic(omega)
    for qn in qn_grid:
        assert energy(ps, qn) == pytest.approx(energy(ho, qn), rel=1e-12)


@given(st.integers(0, 5), st.integers(0, 5), st.integers(4, 8), st.floats(0.2, 3.0))
def test_dimension_shift_degeneracy(n, l, N, Z):
    assert energy(Coulomb(Z), (n, l, N)) == pytest.approx(energy(Coulomb(Z), (n, l + 1, N - 2)), rel=1e-14)


@pytest.mark.parametrize("name", list(MODELS))
def test_monotonic_in_n_and_l(name):
    pot = MODELS[name]
    for N in (2, 3, 4, 5):
        for l in range(3):
            es = [energy(pot, (n, l, N)) for n in range(5)]
            assert all(a < b for a, b in zip(es, es[1:]))
        for n in range(3):
            es = [energy(pot, (n, l, N)) for l in range(5)]
            assert all(a < b for a, b in zip(es, es[1:]))
    if name in ("coulomb", "kratzer-fues"):
        assert energy(pot, (40, 0, 3)) < pot.threshold(U) if hasattr(pot, "threshold") else True


@pytest.mark.parametrize("name", list(MODELS))
@pytest.mark.parametrize("qn", [(0, 0, 3), (1, 0, 3), (2, 1, 2), (1, 2, 5), (3, 1, 4)])
def test_quantization_route_matches_closed_form(name, qn):
    pot = MODELS[name]
    E = energy(pot, qn)
    assert energy_by_quantization(pot, qn) == pytest.approx(E, rel=1e-12, abs=1e-13)
    assert quantization_condition(mde_map(pot, qn[1], qn[2], U, E).params, qn[0]) == pytest.approx(0.0, abs=1e-12)


def test_wavefunction_examples():
    R = radial_wavefunction(Coulomb(1.0), (1, 0, 3))
    # e^{-r/2}(1 - r/2), node at r = 2
    for r in (0.5, 1.7, 4.0):
        assert R(r) == pytest.approx(math.exp(-r / 2) * (1 - r / 2), rel=1e-13)
    assert abs(R(2.0)) < 1e-15
    R0 = radial_wavefunction(Coulomb(1.0), (0, 2, 3))
    assert R0(1.3) == pytest.approx(1.3**2 * math.exp(-1.3 / 3), rel=1e-13)
    H = radial_wavefunction(Harmonic(2.0), (1, 0, 3))
    assert abs(H(math.sqrt(3.0 / 4.0))) < 1e-14
    assert R.normalization is None


def test_pseudoharmonic_wavefunction_shape():
    pot = Pseudoharmonic(1.0, 1.0)
    R = radial_wavefunction(pot, (0, 0, 3))
    k = singularity_exponent(pot, 0, 3)
    mu = math.sqrt(2.0)
    assert R(0.8) == pytest.approx(0.8 ** (k - 1) * math.exp(-mu * 0.64 / 2), rel=1e-13)


def _fd_residual(R, pot, qn, r, units=U):
    n, l, N = qn
    h = 1e-3 * r
    v = R(r + h * np.arange(-2, 3))
    d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
    d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h)
    E = energy(pot, qn, units)
    V = pot.potential(r, units)
    return abs(d2 + (N - 1) / r * d1 - (l * (l + N - 2) / r**2 + units.k2 * (V - E)) * v[2])


@pytest.mark.parametrize("name", list(MODELS))
@pytest.mark.parametrize("qn", [(0, 0, 3), (1, 1, 3), (2, 0, 2), (1, 2, 5)])
def test_closed_form_satisfies_radial_equation(name, qn):
    pot = MODELS[name]
    R = normalized(radial_wavefunction(pot, qn))
    scale = max(abs(R(r)) for r in np.linspace(0.1, 10, 200))
    for r in (0.5, 1.0, 2.0, 5.0):
        assert _fd_residual(R, pot, qn, r) <= 1e-6 * scale


def test_radial_equation_negative_control():
    pot = Coulomb(1.0)
    R = radial_wavefunction(pot, (0, 0, 3))
    wrong = Coulomb(1.1)
    assert _fd_residual(R, wrong, (0, 0, 3), 1.0) > 1e-3


def test_boundary_behaviour():
    for pot in MODELS.values():
        for qn in ((0, 0, 3), (1, 1, 3), (2, 0, 2)):
            R = radial_wavefunction(pot, qn)
            # reduced function r^((N-1)/2) R vanishes at both ends
            N = qn[2]
            assert abs(1e-6 ** ((N - 1) / 2) * R(1e-6)) < 1e-2
            assert abs(R(60.0 * R.length_scale())) < 1e-12


@pytest.mark.parametrize("name", ["harmonic", "pseudoharmonic", "coulomb", "kratzer-fues"])
@pytest.mark.parametrize("l, N", [(0, 3), (1, 2), (2, 4)])
def test_node_count(name, l, N):
    pot = MODELS[name]
    for n in range(5):
        R = normalized(radial_wavefunction(pot, (n, l, N)))
        assert count_nodes(R, 60.0 * R.length_scale() * (n + 1)) == n


def test_normalize_examples():
    R = radial_wavefunction(Coulomb(1.0), (0, 0, 3))
    assert normalize(R) == pytest.approx(2.0, rel=1e-10)
    assert normalize(R.scaled(3.0)) == pytest.approx(2.0 / 3.0, rel=1e-10)
    H = radial_wavefunction(Harmonic(1.0), (0, 0, 3))
    assert normalize(H) == pytest.approx(2.0 / math.pi**0.25, rel=1e-10)


def test_normalize_divergent():
    from dataclasses import replace

    R = replace(radial_wavefunction(Coulomb(1.0), (0, 0, 3)), decay=-1.0)
    with pytest.raises(DivergentNormError):
        normalize(R)


@pytest.mark.parametrize("name", ["harmonic", "pseudoharmonic"])
@pytest.mark.parametrize("l, N", [(0, 3), (1, 4), (2, 2)])
def test_orthonormality(name, l, N):
    pot = MODELS[name]
    states = [normalized(radial_wavefunction(pot, (n, l, N))) for n in range(5)]
    scale = states[0].length_scale()
    for i in range(5):
        for j in range(i, 5):
            s = overlap_integral(states[i], states[j], N, scale)
            assert abs(s - (1.0 if i == j else 0.0)) <= 1e-8


@pytest.mark.parametrize("name", ["coulomb", "kratzer-fues"])
def test_orthogonality_with_level_dependent_decay(name):
    # each state has its own decay rate, yet all solve one Hamiltonian
    pot = MODELS[name]
    for l, N in ((0, 3), (1, 2)):
        states = [normalized(radial_wavefunction(pot, (n, l, N))) for n in range(4)]
        scale = states[-1].length_scale()
        for i in range(4):
            for j in range(i + 1, 4):
                assert abs(overlap_integral(states[i], states[j], N, scale)) <= 1e-8
