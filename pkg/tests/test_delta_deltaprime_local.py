# test_delta_deltaprime_local

import numpy as np
import pytest


from   airy                   import airy_scaled
from   delta_deltaprime_local import *
from   delta_model            import delta_spectrum
from   schema                 import *
from   spectrum_core          import even_energies, odd_energies, unperturbed_energies


def test_reduces_to_delta_at_origin():
	for a in np.linspace(-4.0, 5.0, 10):
		for b in np.linspace(-2.9, 3.1, 10):
			local = local_spectrum(LocalDDPParams(a=float(a), b=float(b)), 5)
			delta = delta_spectrum(DeltaParams(lam=float(a) / (1.0 + b * b), x0=0.0, kernel=KernelForm.CLOSED_FORM), 5)
			np.testing.assert_allclose(local.energies(), delta.energies(), atol=1e-10)
			assert [l.parity for l in local.levels] == [d.parity for d in delta.levels]


def test_effective_coupling_value():
	assert effective_coupling(1.0, 2.0) == pytest.approx(0.2, abs=1e-15)
	local = local_spectrum(LocalDDPParams(a=1.0, b=2.0), 4)
	delta = delta_spectrum(DeltaParams(lam=0.2, x0=0.0), 4)
	np.testing.assert_allclose(local.energies(), delta.energies(), atol=1e-10)


def test_zero_delta_strength_is_unperturbed():
	for b in (-0.5, 0.0, 2.0):
		result = local_spectrum(LocalDDPParams(a=0.0, b=b), 5)
		np.testing.assert_allclose(result.energies(), unperturbed_energies(5), rtol=0, atol=0)


def test_antisymmetric_levels_ignore_coupling():
	result = local_spectrum(LocalDDPParams(a=2.5, b=0.4), 6)
	antisymmetric = result.by_parity(Parity.ANTISYMMETRIC)
	np.testing.assert_allclose(antisymmetric, even_energies(len(antisymmetric)), atol=1e-12)
	assert all(l.origin == LevelOrigin.INVARIANT for l in result.levels if l.parity == Parity.ANTISYMMETRIC)


def test_levels_are_even_in_b():
	for b in (0.3, 2.5, 7.0):
		plus  = local_spectrum(LocalDDPParams(a=1.5, b=b), 5).energies()
		minus = local_spectrum(LocalDDPParams(a=1.5, b=-b), 5).energies()
		np.testing.assert_allclose(plus, minus, rtol=0, atol=1e-12)


def test_symmetric_levels_deepen_with_a():
	table = np.array([
		local_spectrum(LocalDDPParams(a=float(a), b=0.5), 6).by_parity(Parity.SYMMETRIC)
		for a in np.linspace(0.0, 5.0, 50)
	])
	assert np.all(np.diff(table, axis=0) < 0.0)


def test_large_b_flattens_the_interaction():
	unperturbed = odd_energies(3)
	previous    = None
	for b in (1.5, 10.0, 100.0):
		symmetric = np.array(local_spectrum(LocalDDPParams(a=1.0, b=b), 6).by_parity(Parity.SYMMETRIC))
		assert np.all(symmetric < unperturbed)
		if previous is not None:
			assert np.all(symmetric > previous)
		previous = symmetric
	np.testing.assert_allclose(previous, unperturbed, rtol=0, atol=1e-4)
	flipped = local_spectrum(LocalDDPParams(a=1.0, b=-100.0), 6).by_parity(Parity.SYMMETRIC)
	np.testing.assert_allclose(flipped, unperturbed, rtol=0, atol=1e-4)


def test_determinant_closed_form():
	E, a, b = 0.3, 1.5, 0.7
	ai, aip, _, _, _ = (float(v) for v in airy_scaled(-2.0 * E))
	A = ai / aip
	assert local_determinant(E, a, b) == pytest.approx(1.0 + a * A + b * b, rel=1e-12)


def test_determinant_vanishes_at_symmetric_levels():
	a, b   = 1.5, 0.7
	result = local_spectrum(LocalDDPParams(a=a, b=b), 5)
	for level in result.levels:
		if level.parity == Parity.SYMMETRIC:
			assert local_determinant(level.energy, a, b) == pytest.approx(0.0, abs=1e-8)
			assert local_eigen_equation(level.energy, a, b) == pytest.approx(0.0, abs=1e-8)


def test_transfer_matrix():
	for a, b in [(1.0, 2.0), (-3.0, 0.3), (0.0, -4.0)]:
		assert np.linalg.det(transfer_matrix(a, b)) == pytest.approx(1.0, abs=1e-12)
	np.testing.assert_allclose(transfer_matrix(0.0, 0.0), np.eye(2))


def test_singular_matching_rejected():
	with pytest.raises(ValueError):
		transfer_matrix(1.0, 1.0)
	with pytest.raises(ValueError):
		effective_coupling(1.0, -1.0)
	with pytest.raises(ValueError):
		LocalDDPParams(a=1.0, b=-1.0)
	with pytest.raises(ValueError):
		LocalDDPParams(a=float("nan"), b=0.0)
