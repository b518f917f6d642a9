# test_delta_model

import numpy as np
import pytest


from   delta_model    import *
from   schema         import *
from   spectrum_core  import even_energies, unperturbed_energies


def test_lambda_at_origin():
	assert lambda_of_energy(0.0, 0.0) == pytest.approx(0.7290111, abs=1e-6)
	assert lambda_of_energy(0.0, 0.0, KernelForm.EXACT) == pytest.approx(0.7290111, abs=1e-6)


def test_lambda_at_known_design():
	assert lambda_of_energy(0.3333, 1.2557) == pytest.approx(1.3602, abs=2e-3)


def test_lambda_curve_marks_poles():
	poles  = delta_poles(0.5, 4)
	energies = np.array([-1.0, float(poles[0]), 0.2])
	curve  = lambda_curve(energies, 0.5)
	assert np.isfinite(curve[0]) and np.isfinite(curve[2])
	assert np.isnan(curve[1])
	with pytest.raises(PoleError):
		lambda_of_energy(float(poles[0]), 0.5)


def test_spectrum_at_origin():
	result = delta_spectrum(DeltaParams(lam=2.0, x0=0.0), 5)
	assert len(result.levels) == 5
	assert result.levels[1].energy == pytest.approx(1.1690537053, abs=1e-9)
	assert result.levels[3].energy == pytest.approx(2.0439747221, abs=1e-9)
	assert result.levels[1].origin == LevelOrigin.INVARIANT
	assert result.levels[0].origin == LevelOrigin.BRANCH
	assert [level.parity for level in result.levels] == [
		Parity.SYMMETRIC, Parity.ANTISYMMETRIC, Parity.SYMMETRIC, Parity.ANTISYMMETRIC, Parity.SYMMETRIC,
	]
	energies = result.energies()
	assert energies == sorted(energies)
	assert max(level.residual for level in result.levels) < 1e-9


@pytest.mark.parametrize("kernel", [KernelForm.EXACT, KernelForm.CLOSED_FORM])
def test_levels_satisfy_bound_state_equation(kernel):
	result = delta_spectrum(DeltaParams(lam=1.3, x0=0.8, kernel=kernel), 6)
	for level in result.levels:
		if level.origin == LevelOrigin.BRANCH:
			assert lambda_of_energy(level.energy, 0.8, kernel) == pytest.approx(1.3, rel=1e-8)


def test_default_kernels():
	assert DeltaParams(lam=1.0, x0=0.5).kernel == KernelForm.EXACT
	exact  = lambda_of_energy(0.3, 0.5, KernelForm.EXACT)
	closed = lambda_of_energy(0.3, 0.5, KernelForm.CLOSED_FORM)
	assert lambda_of_energy(0.3, 0.5) == closed
	assert abs(exact - closed) > 1e-3


def test_exact_kernel_levels_are_resolvent_poles():
	params = DeltaParams(lam=2.0, x0=0.5, kernel=KernelForm.EXACT)
	level  = delta_spectrum(params, 1).levels[0].energy
	below  = delta_resolvent(0.2, 0.2, level - 1e-7, params)
	above  = delta_resolvent(0.2, 0.2, level + 1e-7, params)
	assert abs(below) > 1e3 and abs(above) > 1e3
	assert np.sign(below) != np.sign(above)


@pytest.mark.parametrize("kernel", [KernelForm.EXACT, KernelForm.CLOSED_FORM])
@pytest.mark.parametrize("lam", [1.5, -2.0])
def test_reflection_symmetry(kernel, lam):
	right = delta_spectrum(DeltaParams(lam=lam, x0=0.7, kernel=kernel), 6).energies()
	left  = delta_spectrum(DeltaParams(lam=lam, x0=-0.7, kernel=kernel), 6).energies()
	np.testing.assert_allclose(right, left, rtol=0, atol=1e-10)


def test_lambda_decreases_on_each_branch_at_origin():
	poles = delta_poles(0.0, 4)
	edges = [-3.0, *(float(p) for p in poles)]
	for lo, hi in zip(edges[:-1], edges[1:]):
		energies = np.linspace(lo + 1e-4, hi - 1e-4, 2000)
		curve    = lambda_curve(energies, 0.0)
		assert np.all(np.isfinite(curve))
		assert np.all(np.diff(curve) < 0.0)


def test_levels_decrease_with_coupling():
	lambdas = np.linspace(-3.0, 8.0, 23)
	table   = np.array([delta_spectrum(DeltaParams(lam=float(lam), x0=0.5), 5).energies() for lam in lambdas])
	assert np.all(np.diff(table, axis=0) <= 1e-12)
	assert np.all(np.diff(table[:, 0]) < 0.0)


def test_strong_coupling_pinches_onto_even_levels():
	even = even_energies(3)
	attractive = delta_spectrum(DeltaParams(lam=1.0e3, x0=0.0), 5).energies()
	repulsive  = delta_spectrum(DeltaParams(lam=-1.0e3, x0=0.0), 5).energies()
	assert attractive[2] == pytest.approx(even[0], abs=1e-2)
	assert attractive[4] == pytest.approx(even[1], abs=1e-2)
	assert repulsive[2] == pytest.approx(even[1], abs=1e-2)
	assert repulsive[4] == pytest.approx(even[2], abs=1e-2)
	assert attractive[0] < -1.0e5


def test_zero_coupling_is_unperturbed():
	result = delta_spectrum(DeltaParams(lam=0.0, x0=0.7), 5)
	np.testing.assert_allclose(result.energies(), unperturbed_energies(5), rtol=0, atol=0)
	assert all(level.origin == LevelOrigin.UNPERTURBED for level in result.levels)


def test_antisymmetric_levels_ignore_coupling():
	odd = even_energies(2)
	for lam in np.linspace(-5.0, 5.0, 50):
		result = delta_spectrum(DeltaParams(lam=float(lam), x0=0.0), 5)
		np.testing.assert_allclose(result.by_parity(Parity.ANTISYMMETRIC), odd, atol=1e-12)


def test_attractive_coupling_lowers_ground_state():
	weak   = delta_spectrum(DeltaParams(lam=0.5, x0=0.0), 1).energies()[0]
	strong = delta_spectrum(DeltaParams(lam=3.0, x0=0.0), 1).energies()[0]
	assert strong < weak < unperturbed_energies(1)[0]
	repulsive = delta_spectrum(DeltaParams(lam=-1.0, x0=0.0), 1).energies()[0]
	assert repulsive > unperturbed_energies(1)[0]


def test_branch_solve():
	params = DeltaParams(lam=2.0, x0=0.0)
	first  = delta_branch_solve(params, 0)
	assert first.pole_left == -np.inf
	assert first.energy == pytest.approx(delta_spectrum(params, 1).energies()[0], abs=1e-12)
	second = delta_branch_solve(params, 1)
	assert second.pole_left < second.energy < second.pole_right
	with pytest.raises(ValueError):
		delta_branch_solve(params, -1)


def test_invalid_parameters():
	with pytest.raises(ValueError):
		DeltaParams(lam=float("inf"), x0=0.0)
	with pytest.raises(ValueError):
		delta_spectrum(DeltaParams(lam=1.0), 0)


def test_inverse_recovers_known_design():
	solutions = inverse_design(0.3333, 0.7158)
	assert solutions
	match = [s for s in solutions if abs(s.x0 - 1.2557) < 2e-3]
	assert match
	assert match[0].lam == pytest.approx(1.3602, abs=2e-3)
	assert match[0].lambda_residual < 1e-5


@pytest.mark.parametrize("kernel", [KernelForm.EXACT, KernelForm.CLOSED_FORM])
def test_inverse_round_trip(kernel):
	params = DeltaParams(lam=1.1, x0=0.9, kernel=kernel)
	levels = delta_spectrum(params, 3).energies()
	solutions = inverse_design(levels[0], levels[1], (0.0, 3.0), kernel=kernel)
	match = [s for s in solutions if abs(s.x0 - 0.9) < 1e-6]
	assert match
	assert match[0].lam == pytest.approx(1.1, rel=1e-6)


def test_inverse_rejects_degenerate_input():
	with pytest.raises(ValueError):
		inverse_design(0.5, 0.5)


def test_compatible_pairs_at_known_design():
	found = compatible_pairs(1.2557, 0.3333, (0.4, 2.1))
	for expected in (0.7158, 1.5423, 1.9791):
		assert min(abs(E2 - expected) for E2 in found) < 2e-3
	assert all(abs(E2 - 0.3333) > 1e-6 for E2 in found)
