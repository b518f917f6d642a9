# deltaprime_nonlocal

import math


import numpy as np


from   scipy            import integrate
from   scipy.optimize   import brentq
from   typing           import Optional, Sequence


from   airy             import airy_scaled, airy_functions, ai_zeros, aip_zeros
from   core             import get_settings
from   delta_model      import BranchStructure, _unperturbed_result, branch_intervals, branch_roots, solve_spectrum, to_levels
from   schema           import *
from   spectrum_core    import eigenfunctions, even_energies, green_kernel, odd_energies, origin_slopes


# ========================================================================
# CROSSING CONSTANT
# ========================================================================

def crossing_constant() -> float:
	"""beta_0 = -Ai(0)/Ai'(0) = G_0(0, 0; 0)"""
	ai, aip, _, _ = airy_functions(0.0)
	return -ai / aip


def _inverse_beta_limit(beta: float) -> float:
	if math.isinf(beta):
		return 0.0
	return 1.0 / beta


# ========================================================================
# BOUND-STATE EQUATION
# ========================================================================

def inverse_beta_parts(E: np.ndarray) -> tuple:
	"""Scaled Ai(-2E) and Ai'(-2E); their ratio is scale-free"""
	a, ap, _, _, _ = airy_scaled(-2.0 * np.asarray(E, dtype=float))
	return a, ap


def inverse_beta_of_energy(E: float) -> float:
	"""1/beta(E) = Ai'(-2E)/Ai(-2E) - Ai'(0)/Ai(0), finite at E = 0"""
	a, ap = (float(v) for v in inverse_beta_parts(np.array(float(E))))
	if abs(a) <= get_settings().pole_tol:
		raise PoleError(f"1/beta(E) diverges at the antisymmetric level E = {E}", at=float(E))
	return ap / a + 1.0 / crossing_constant()


def beta_of_energy(E: float) -> float:
	"""Coupling beta for which E is an eigenvalue of the renormalized model"""
	ai_0, aip_0, _, _ = airy_functions(0.0)
	a, ap = (float(v) for v in inverse_beta_parts(np.array(float(E))))
	den   = ai_0 * ap - aip_0 * a
	if abs(den) <= get_settings().pole_tol:
		raise PoleError(f"beta(E) has a pole at E = {E}", at=float(E))
	return ai_0 * a / den


def _even_energy_asymptotic(n: float) -> float:
	return 0.5 * (3.0 * math.pi * (4.0 * n - 1.0) / 8.0) ** (2.0 / 3.0)


def inverse_beta_series(E: float, N: int, tail: Optional[bool] = None) -> SeriesSum:
	"""(E/2) sum_n 1/(E_2n (E_2n - E)) truncated at N with its integral tail"""
	if int(N) != N or N < 1:
		raise ValueError(f"truncation must be a positive integer, got {N}")
	tail     = get_settings().series_tail if tail is None else tail
	energies = even_energies(N)
	if np.any(np.abs(energies - E) <= get_settings().pole_tol):
		raise PoleError(f"E = {E} is an antisymmetric level", at=E)
	partial  = 0.5 * E * float(np.sum(1.0 / (energies * (energies - E))))

	rest = 0.0
	if tail:
		rest, _ = integrate.quad(
			lambda n: 1.0 / (_even_energy_asymptotic(n) * (_even_energy_asymptotic(n) - E)),
			N + 0.5, np.inf, limit=200,
		)
		rest *= 0.5 * E
	return SeriesSum(terms=N, partial=partial, tail=rest)


def nonlocal_equation(beta: float):
	target = _inverse_beta_limit(beta) - 1.0 / crossing_constant()

	def equation(E: np.ndarray) -> np.ndarray:
		a, ap = inverse_beta_parts(E)
		return ap / a - target
	return equation


def _nonlocal_structure(count: int) -> BranchStructure:
	poles = -0.5 * ai_zeros(count)
	odd   = -0.5 * aip_zeros(count)
	return BranchStructure(poles, odd, poles[-1])


# ========================================================================
# SPECTRUM
# ========================================================================

def nonlocal_spectrum(params: NonlocalParams, k: int) -> EigenResult:
	"""Odd-level invariants plus one beta-dependent level per antisymmetric branch"""
	if params.beta == 0.0:
		return _unperturbed_result("nonlocal_dp", params, k)

	found  = solve_spectrum(k, nonlocal_equation(params.beta), _nonlocal_structure)
	# branch n (1-based) connects to E_2n as beta -> 0
	found  = [(e, origin, None if branch is None else branch + 1, r) for e, origin, branch, r in found]
	parity = lambda n, origin: Parity.SYMMETRIC if origin == LevelOrigin.INVARIANT else Parity.ANTISYMMETRIC
	levels = to_levels(found, parity)
	return EigenResult(model="nonlocal_dp", params=params.model_dump(mode="json"), levels=levels)


def nonlocal_branch_energy(beta: float, n: int) -> float:
	"""E_2n(beta), the root on (E_{2n-2}, E_2n)"""
	if int(n) != n or n < 1:
		raise ValueError(f"branch index must be a positive integer, got {n}")
	if beta == 0.0:
		return float(even_energies(n)[-1])
	poles = even_energies(n)
	left, right = branch_intervals(poles)[n - 1]
	roots = branch_roots(nonlocal_equation(beta), left, right)
	if len(roots) != 1:
		raise BranchExhaustedError(f"branch {n} has {len(roots)} roots for beta = {beta}")
	return roots[0]


def crossing_coupling(n: int) -> float:
	"""beta at which E_2n(beta) meets the invariant level E_{2n-1}"""
	target = float(odd_energies(n)[-1])
	gap    = lambda beta: nonlocal_branch_energy(beta, n) - target
	lo, hi = 0.5, 5.0
	while gap(lo) < 0.0:
		lo *= 0.5
	while gap(hi) > 0.0:
		hi *= 2.0
	settings = get_settings()
	res = brentq(gap, lo, hi, xtol=1.0e-13, rtol=settings.root_rtol, maxiter=settings.root_maxiter)
	return res


# ========================================================================
# DEFECT FUNCTION
# ========================================================================

def defect_function(E: float, N: int, grid: Sequence[float]) -> DefectFunction:
	"""Psi_N(x; E) = 2^{-1/2} sum_{n <= N} psi_2n(x) / (E_2n - E)"""
	if int(N) != N or N < 1:
		raise ValueError(f"truncation must be a positive integer, got {N}")
	energies = even_energies(N)
	if np.any(np.abs(energies - E) <= get_settings().pole_tol):
		raise PoleError(f"E = {E} is an antisymmetric level", at=E)

	x       = np.asarray(grid, dtype=float)
	weights = 1.0 / (energies - E)
	psi     = eigenfunctions(2 * np.arange(1, N + 1), x)
	values  = (weights @ psi) / math.sqrt(2.0)
	norm_sq = 0.5 * float(np.sum(weights ** 2))
	res     = DefectFunction(E=E, trunc=N, x=x.tolist(), values=values.tolist(), norm_sq=norm_sq)
	return res


def defect_closed_form(x: np.ndarray, E: float) -> np.ndarray:
	"""sgn(x) Ai(|x| - 2E) / Ai(-2E), with the right-hand limit at x = 0"""
	x = np.asarray(x, dtype=float)
	t = -2.0 * E
	a, _, _, _, zt = airy_scaled(t)
	if abs(float(a)) <= get_settings().pole_tol:
		raise PoleError(f"E = {E} is an antisymmetric level", at=E)
	a_x, _, _, _, zx = airy_scaled(np.abs(x) + t)
	return np.where(x < 0.0, -1.0, 1.0) * a_x / a * np.exp(zt - zx)


def defect_norm_sq(E: float) -> float:
	"""||Psi||^2 = 2 [Ai'(-2E)^2 + 2E Ai(-2E)^2] / Ai(-2E)^2"""
	a, ap = (float(v) for v in inverse_beta_parts(np.array(float(E))))
	if abs(a) <= get_settings().pole_tol:
		raise PoleError(f"E = {E} is an antisymmetric level", at=E)
	return 2.0 * (ap ** 2 + 2.0 * E * a ** 2) / a ** 2


def defect_matching_ratio(E: float, N: int, tail: Optional[bool] = None) -> float:
	"""-(Psi(0+) - Psi(0-)) / Psi'_ren(0); tends to -2 beta at a level of H_beta"""
	tail       = get_settings().series_tail if tail is None else tail
	# Psi is odd, so the jump is twice the right-hand limit
	jump       = 2.0 * float(defect_closed_form(np.array(0.0), E))
	slopes     = origin_slopes(2 * np.arange(1, N + 1))
	energies   = even_energies(N)
	derivative = float(np.sum(slopes * (1.0 / (energies - E) - 1.0 / energies))) / math.sqrt(2.0)
	if tail:
		derivative += inverse_beta_series(E, N, tail=True).tail
	if derivative == 0.0:
		raise PoleError(f"renormalized derivative vanishes at E = {E}", at=E)
	return -jump / derivative


# ========================================================================
# COUPLING RENORMALIZATION
# ========================================================================

def cutoff_coupling(beta: float, N: int) -> float:
	"""mu_beta(N) = 1 / (1/beta + 1/2 sum_{n <= N} 1/E_2n)"""
	if beta == 0.0:
		return 0.0
	den = _inverse_beta_limit(beta) + 0.5 * float(np.sum(1.0 / even_energies(N)))
	if abs(den) <= get_settings().pole_tol:
		raise PoleError(f"cutoff coupling diverges at N = {N} for beta = {beta}")
	return 1.0 / den


def renormalized_coupling(beta: float, N: int) -> float:
	"""mu(beta) = 2 beta / (2 + beta sum_{n <= N} 1/E_2n)"""
	if math.isinf(beta):
		return cutoff_coupling(beta, N)
	den = 2.0 + beta * float(np.sum(1.0 / even_energies(N)))
	if abs(den) <= get_settings().pole_tol:
		raise PoleError(f"renormalized coupling diverges at N = {N} for beta = {beta}")
	return 2.0 * beta / den


def renormalized_denominator(beta: float, E: float, N: int, tail: Optional[bool] = None) -> SeriesSum:
	"""1/beta + 1/2 [sum 1/E_2n - sum 1/(E_2n - E)], summed to N"""
	series = inverse_beta_series(E, N, tail)
	res    = SeriesSum(terms=N, partial=_inverse_beta_limit(beta) - series.partial, tail=-series.tail)
	return res


def nonlocal_resolvent(x: float, y: float, E: float, beta: float) -> float:
	"""Rank-one renormalized resolvent kernel; its poles are the beta-dependent levels"""
	g_xy = float(green_kernel(x, y, E))
	if beta == 0.0:
		return g_xy
	den = _inverse_beta_limit(beta) - inverse_beta_of_energy(E)
	if abs(den) <= get_settings().pole_tol:
		raise PoleError(f"E = {E} is an eigenvalue of the renormalized model", at=E)
	psi = defect_closed_form(np.array([x, y]), E)
	return g_xy + float(psi[0] * psi[1]) / den
