import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from carleman1d.errors import DataError, DomainError
from carleman1d.kernels import KernelSpec, PotentialSpec
from carleman1d.particles import (
    ParticleConfiguration,
    compare_to_density,
    discrete_energy,
    discrete_gradient,
    initial_positions,
    minimize_particles,
    quantile_positions,
)
from carleman1d.reference import head_louat_halfline_case, head_louat_interval_case, hco_pileup

LOG = KernelSpec(0.0)
FREE = PotentialSpec.zero()


def test_two_particle_energies():
    assert discrete_energy([0.0, 1.0], LOG, FREE) == pytest.approx(0.0, abs=1e-16)
    assert discrete_energy([0.0, 0.25], KernelSpec(0.5), FREE) == pytest.approx(0.5, rel=1e-15)


def test_merging_particles_blow_up():
    gaps = np.geomspace(1.0, 1e-12, 25)
    e = [discrete_energy([0.0, g], LOG, FREE) for g in gaps]
    assert np.all(np.diff(e) > 0.0)
    assert discrete_energy([0.3, 0.3], LOG, FREE) == math.inf
    barrier = PotentialSpec.zero((0.0, 1.0))
    assert discrete_energy([-0.1, 0.5], LOG, barrier) == math.inf


def test_gradient_matches_finite_differences():
    kernel = KernelSpec(0.0, "dislocation")
    pot = PotentialSpec.quadratic((0.0, 0.3, 1.0))
    x = np.array([-0.7, -0.1, 0.2, 0.9, 1.3])
    g = discrete_gradient(x, kernel, pot)
    h = 1e-6
    fd = [(discrete_energy(x + h * e, kernel, pot) - discrete_energy(x - h * e, kernel, pot)) / (2 * h) for e in np.eye(5)]
    np.testing.assert_allclose(g, fd, rtol=1e-6, atol=1e-9)


def test_two_body_equilibrium():
    pot = PotentialSpec.quadratic((0.0, 0.0, 1.0))
    cfg = minimize_particles(2, LOG, pot, gtol=1e-13)
    # E(d) = -log(2d)/4 + d^2 is stationary where 2d = 1/(4d)
    d = brentq(lambda d: 2.0 * d - 1.0 / (4.0 * d), 1e-3, 10.0, xtol=1e-15)
    assert d == pytest.approx(1.0 / math.sqrt(8.0), rel=1e-14)
    np.testing.assert_allclose(cfg.positions, [-d, d], atol=1e-10)
    assert cfg.gradient_norm <= 1e-10
    assert cfg.converged


def test_head_louat_fifty_particles():
    case = head_louat_interval_case()
    cfg = minimize_particles(50, case.kernel, case.potential)
    assert cfg.converged
    assert cfg.positions[0] == 0.0 and cfg.positions[-1] == 1.0
    _, sup = compare_to_density(cfg, case)
    assert sup <= 0.03


def test_permuted_start_gives_the_same_minimiser():
    pot = PotentialSpec.quadratic((0.0, 0.5, 1.0))
    rng = np.random.default_rng(3)
    start = np.sort(rng.uniform(-1.0, 1.0, 30))
    a = minimize_particles(30, LOG, pot, initial=start)
    b = minimize_particles(30, LOG, pot, initial=rng.permutation(start))
    np.testing.assert_array_equal(a.positions, b.positions)


def test_deterministic_given_seed():
    pot = PotentialSpec.affine(1.0, (0.0, math.inf))
    a = minimize_particles(40, KernelSpec(0.5), pot, seed=5)
    b = minimize_particles(40, KernelSpec(0.5), pot, seed=5)
    np.testing.assert_array_equal(a.positions, b.positions)
    assert a.energy == b.energy


def test_energy_decreases_along_iterations():
    pot = PotentialSpec.quadratic((0.0, 0.0, 1.0))
    energies = [minimize_particles(25, LOG, pot, max_iter=k).energy for k in range(12)]
    assert np.all(np.diff(energies) <= 0.0)
    assert energies[-1] < energies[0]


def test_iteration_cap_reports_non_convergence():
    cfg = minimize_particles(25, LOG, PotentialSpec.quadratic((0.0, 0.0, 1.0)), max_iter=1)
    assert not cfg.converged and cfg.iterations == 1
    assert cfg.gradient_norm > 1e-8 * 25


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=100))
def test_minimiser_is_ordered_and_inside_barriers(n, seed):
    pot = PotentialSpec.affine(1.0, (0.0, 3.0))
    cfg = minimize_particles(n, KernelSpec(0.25), pot, seed=seed)
    assert np.all(np.diff(cfg.positions) > 0.0)
    assert cfg.positions[0] >= 0.0 and cfg.positions[-1] <= 3.0
    assert cfg.converged


def test_barrier_contact():
    case = head_louat_halfline_case()
    cfg = minimize_particles(60, case.kernel, case.potential)
    assert cfg.positions[0] == 0.0
    assert cfg.positions[-1] < 2.0


@pytest.mark.parametrize("case", [head_louat_interval_case(), head_louat_halfline_case(), hco_pileup(0.5)], ids=lambda c: c.name)
@pytest.mark.parametrize("n", [10, 100])
def test_quantile_configuration_bound(case, n):
    x = quantile_positions(case, n)
    np.testing.assert_allclose(case.cdf(x), (np.arange(n) + 0.5) / n, atol=1e-12)
    w1, sup = compare_to_density(x, case)
    assert w1 <= 2.0 * (case.t2 - case.t1) / n
    assert sup == pytest.approx(0.5 / n, abs=1e-9)


def test_identical_measures_have_zero_distance():
    cfg = ParticleConfiguration(np.linspace(0.0, 1.0, 11))
    w1, _ = compare_to_density(cfg, cfg)
    assert w1 == 0.0


def test_hco_two_hundred_particles():
    case = hco_pileup(0.5)
    cfg = minimize_particles(200, case.kernel, case.potential)
    w1, _ = compare_to_density(cfg, case)
    assert w1 <= 0.05 * case.t2


@pytest.mark.parametrize("case", [head_louat_interval_case(), hco_pileup(0.5)], ids=lambda c: c.name)
def test_distance_non_increasing_in_n(case):
    dists = [compare_to_density(minimize_particles(n, case.kernel, case.potential), case)[0] for n in (50, 100, 200, 400)]
    assert np.all(np.diff(dists) <= 0.0)


def test_initial_positions():
    np.testing.assert_array_equal(initial_positions(2, FREE), [-1.0, 1.0])
    x = initial_positions(9, PotentialSpec.zero((0.0, math.inf)), seed=1)
    assert x[0] == 0.0 and x[-1] == 2.0 and np.all(np.diff(x) > 0.0)


def test_bad_configurations():
    with pytest.raises(DataError):
        ParticleConfiguration([0.0, 0.0])
    with pytest.raises(DataError):
        ParticleConfiguration([0.0, math.nan])
    with pytest.raises(DomainError):
        minimize_particles(1, LOG, FREE)
    with pytest.raises(DataError):
        minimize_particles(3, LOG, FREE, initial=[0.0, 1.0])


def test_configuration_cdf():
    cfg = ParticleConfiguration([0.0, 1.0, 2.0, 3.0])
    np.testing.assert_array_equal(cfg.cdf([-1.0, 0.0, 1.5, 3.0]), [0.0, 0.25, 0.5, 1.0])
    assert cfg.n == 4 and cfg.support == (0.0, 3.0)
