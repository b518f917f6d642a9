# delta_deltaprime_local

import numpy as np


from   airy           import ai_zeros, airy_scaled
from   core           import get_settings
from   delta_model    import BranchStructure, _unperturbed_result, solve_spectrum, to_levels
from   schema         import *


def _check_b(b: float) -> None:
	if abs(abs(b) - 1.0) < 1.0e-12:
		raise ValueError(f"|b| = 1 makes the matching matrix singular (b = {b})")


def effective_coupling(a: float, b: float) -> float:
	"""Delta strength with the same symmetric levels: a / (1 + b^2)"""
	_check_b(b)
	return a / (1.0 + b * b)


def transfer_matrix(a: float, b: float) -> np.ndarray:
	"""Maps (psi(0-), psi'(0-)) to (psi(0+), psi'(0+))"""
	_check_b(b)
	res = np.array([
		[(1.0 + b) / (1.0 - b)       , 0.0                   ],
		[-2.0 * a / (1.0 - b * b)    , (1.0 - b) / (1.0 + b) ],
	])
	return res


def local_determinant(E: float, a: float, b: float) -> float:
	"""Determinant of the reduced matching system, equal to 1 + a A + b^2"""
	_check_b(b)
	t = -2.0 * E
	ai, aip, _, _, _ = (float(v) for v in airy_scaled(t))
	tol = get_settings().pole_tol
	if abs(ai) <= tol or abs(aip) <= tol:
		raise PoleError(f"A = Ai/Ai' is singular or zero at E = {E}", at=E)
	A = ai / aip
	matrix = np.array([
		[ 2.0     , -1.0 - b                       , 0.0         ],
		[-1.0     , 1.0 + 0.5 * a * A + 0.5 * b    , 0.5 * b * A ],
		[ 0.0     , -b / A                         , 1.0         ],
	])
	return float(np.linalg.det(matrix))


def local_equation_vector(a: float, b: float):
	shift = effective_coupling(a, b)

	def equation(E: np.ndarray) -> np.ndarray:
		ai, aip, _, _, _ = airy_scaled(-2.0 * np.asarray(E, dtype=float))
		return aip / ai + shift
	return equation


def local_eigen_equation(E: float, a: float, b: float) -> float:
	"""Ai'(-2E)/Ai(-2E) + a/(b^2 + 1); zeros are the symmetric levels"""
	ai, aip, _, _, _ = (float(v) for v in airy_scaled(-2.0 * float(E)))
	if abs(ai) <= get_settings().pole_tol:
		raise PoleError(f"Ai(-2E) vanishes at E = {E}", at=float(E))
	return aip / ai + effective_coupling(a, b)


def _local_structure(count: int) -> BranchStructure:
	poles = -0.5 * ai_zeros(count)
	return BranchStructure(poles, poles, poles[-1])


def local_spectrum(params: LocalDDPParams, k: int) -> EigenResult:
	if params.a == 0.0:
		return _unperturbed_result("local_ddp", params, k)

	found  = solve_spectrum(k, local_equation_vector(params.a, params.b), _local_structure)
	parity = lambda n, origin: Parity.ANTISYMMETRIC if origin == LevelOrigin.INVARIANT else Parity.SYMMETRIC
	levels = to_levels(found, parity)
	return EigenResult(model="local_ddp", params=params.model_dump(mode="json"), levels=levels)
