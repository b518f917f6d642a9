# test_fd_oracle

import numpy as np
import pytest


from   delta_deltaprime_local import local_spectrum
from   delta_model            import delta_spectrum
from   fd_oracle              import *
from   schema                 import *
from   spectrum_core          import even_energies, unperturbed_energies


GRID = OracleSpec(L=20.0, h=1.0e-3, M=5)


def test_unperturbed_levels():
	np.testing.assert_allclose(fd_unperturbed(GRID), unperturbed_energies(5), atol=1e-4)


@pytest.mark.parametrize("x0", [0.0, 0.5])
def test_delta_levels(x0):
	exact = delta_spectrum(DeltaParams(lam=2.0, x0=x0, kernel=KernelForm.EXACT), 5).energies()
	fd    = fd_delta(GRID, 2.0, x0)
	assert np.max(np.abs(np.array(fd) - exact)) < DEFAULT_VERIFY_THRESHOLD


def test_default_kernel_matches_grid():
	analytic = delta_spectrum(DeltaParams(lam=2.0, x0=0.5), 5).energies()
	fd       = fd_delta(GRID, 2.0, 0.5)
	assert np.max(np.abs(np.array(fd) - analytic)) < 1e-3
	assert analytic[0] == pytest.approx(-1.73826, abs=1e-4)


def test_strong_coupling_ground_state():
	analytic = delta_spectrum(DeltaParams(lam=10.0, x0=0.0), 1).energies()[0]
	fd       = fd_delta(GRID, 10.0, 0.0)[0]
	assert analytic < 0.0
	assert abs(fd - analytic) < 1e-2


def test_antisymmetric_levels_do_not_move_on_the_grid():
	reference = fd_unperturbed(GRID)
	for lam in (-5.0, 0.5, 5.0):
		fd = fd_delta(GRID, lam, 0.0)
		assert fd[1] == pytest.approx(reference[1], abs=1e-8)
		assert fd[3] == pytest.approx(reference[3], abs=1e-8)
		np.testing.assert_allclose([fd[1], fd[3]], even_energies(2), atol=2e-3)


def test_local_without_derivative_term_is_delta():
	np.testing.assert_allclose(fd_local_ddp(GRID, 1.0, 0.0), fd_delta(GRID, 1.0, 0.0), rtol=0, atol=1e-6)


def test_local_without_delta_term_is_unperturbed():
	local     = fd_local_ddp(GRID, 0.0, 3.0)
	reference = fd_unperturbed(GRID)
	np.testing.assert_allclose(local, reference, rtol=0, atol=1e-2)
	np.testing.assert_allclose([local[1], local[3]], [reference[1], reference[3]], rtol=0, atol=1e-6)


def test_halving_the_step_quarters_the_error():
	exact  = unperturbed_energies(3)
	coarse = np.abs(np.array(fd_unperturbed(OracleSpec(L=20.0, h=1.0e-2, M=3))) - exact)
	fine   = np.abs(np.array(fd_unperturbed(OracleSpec(L=20.0, h=5.0e-3, M=3))) - exact)
	ratio  = coarse / fine
	assert np.all((ratio > 3.0) & (ratio < 5.0))


def test_doubling_the_box_leaves_levels_unchanged():
	short = fd_unperturbed(OracleSpec(L=15.0, h=1.0e-2, M=3))
	long  = fd_unperturbed(OracleSpec(L=30.0, h=1.0e-2, M=3))
	np.testing.assert_allclose(short, long, rtol=0, atol=1e-8)


def test_local_levels():
	exact = local_spectrum(LocalDDPParams(a=1.0, b=2.0), 5).energies()
	fd    = fd_local_ddp(GRID, 1.0, 2.0)
	assert np.max(np.abs(np.array(fd) - exact)) < DEFAULT_VERIFY_THRESHOLD


def test_delta_convergence_order():
	exact  = delta_spectrum(DeltaParams(lam=2.0, x0=0.0), 1).energies()[0]
	steps  = [1.0e-2, 5.0e-3, 2.5e-3]
	errors = [fd_delta(OracleSpec(L=20.0, h=h, M=1), 2.0, 0.0)[0] - exact for h in steps]
	slope  = convergence_slope(steps, errors)
	assert 0.8 < slope < 2.5


def test_origin_must_be_a_node():
	with pytest.raises(OracleError):
		fd_unperturbed(OracleSpec(L=15.0005, h=1.0e-3, M=2))


def test_spec_validation():
	with pytest.raises(ValueError):
		OracleSpec(L=10.0)
	with pytest.raises(ValueError):
		OracleSpec(h=0.1)
	with pytest.raises(ValueError):
		OracleSpec(M=0)
	assert OracleSpec(L=20.0, h=1.0e-3).intervals == 40000


def test_nonlocal_has_no_grid_form():
	with pytest.raises(OracleError):
		build_matrix(GRID, NonlocalParams(beta=1.0))


def test_interaction_mismatch():
	spec = OracleSpec(L=20.0, h=1.0e-2, M=2, interaction=InteractionType.DELTA)
	with pytest.raises(OracleError):
		fd_local_ddp(spec, 1.0, 0.5)


def test_parities_at_origin_alternate():
	spec   = OracleSpec(L=20.0, h=5.0e-3, M=4)
	labels = fd_parities(spec, DeltaParams(lam=1.0, x0=0.0))
	assert labels == [Parity.SYMMETRIC, Parity.ANTISYMMETRIC, Parity.SYMMETRIC, Parity.ANTISYMMETRIC]


def test_eigenvectors_are_normalized():
	values, vectors, grid = fd_eigenpairs(OracleSpec(L=20.0, h=1.0e-2, M=3))
	assert vectors.shape == (grid.x.size, 3)
	np.testing.assert_allclose(np.sum(vectors ** 2, axis=0), 1.0, atol=1e-10)
	assert np.all(np.diff(values) > 0.0)


def test_convergence_slope_rejects_bad_input():
	with pytest.raises(ValueError):
		convergence_slope([1e-2], [1e-3])
	with pytest.raises(ValueError):
		convergence_slope([1e-2, 5e-3], [1e-3, 0.0])
