# delta_model

import math


import numpy as np


from   scipy.optimize   import brentq
from   typing           import Callable, List, Optional, Sequence, Tuple


from   airy             import ai_zeros, airy_functions, airy_scaled
from   core             import get_settings
from   schema           import *
from   spectrum_core    import eigenfunctions, green_kernel, level_parity, unperturbed_energies
from   utils            import log_print


VectorFn = Callable[[np.ndarray], np.ndarray]

DEFAULT_MAX_LEVELS : int = 1 << 14


# ========================================================================
# BRANCH SOLVING
# ========================================================================

def _sample_points(left: float, right: float, count: int) -> np.ndarray:
	"""Sample points strictly inside (left, right), clustered at both ends"""
	if math.isinf(left):
		offsets = np.geomspace(1.0e-12, 1.0e12, 10 * count)
		return np.sort(right - offsets)
	width = right - left
	j     = np.arange(1, count + 1)
	inner = left + 0.5 * width * (1.0 - np.cos(np.pi * j / (count + 1)))
	edge  = width * np.geomspace(1.0e-13, 1.0e-2, 12)
	res   = np.unique(np.concatenate([left + edge, inner, right - edge]))
	return res[(res > left) & (res < right)]


def _find_root(fn: VectorFn, lo: float, hi: float) -> float:
	settings = get_settings()
	scalar   = lambda e: float(fn(np.array([e]))[0])
	try:
		root, info = brentq(
			scalar, lo, hi,
			xtol        = settings.root_xtol,
			rtol        = settings.root_rtol,
			maxiter     = settings.root_maxiter,
			full_output = True,
		)
	except (ValueError, RuntimeError) as e:
		raise ConvergenceError(f"root refinement failed on [{lo}, {hi}]: {e}", bracket=(lo, hi))
	if not info.converged:
		raise ConvergenceError(f"root refinement did not converge on [{lo}, {hi}]", bracket=(lo, hi))
	return root


def branch_roots(fn: VectorFn, left: float, right: float, samples: Optional[int] = None) -> List[float]:
	"""All sign changes of fn inside one pole-free interval, refined by brentq"""
	samples = samples or get_settings().branch_samples
	points  = _sample_points(left, right, samples)
	with np.errstate(all="ignore"):
		values = np.asarray(fn(points), dtype=float)

	valid  = np.isfinite(values)
	points = points[valid]
	values = values[valid]

	roots = [float(p) for p, v in zip(points, values) if v == 0.0]
	flips = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
	for i in flips:
		roots.append(_find_root(fn, float(points[i]), float(points[i + 1])))
	return sorted(roots)


def branch_intervals(poles: Sequence[float]) -> List[Tuple[float, float]]:
	edges = [-math.inf] + sorted(float(p) for p in poles)
	return list(zip(edges[:-1], edges[1:]))


class BranchStructure:
	"""Poles, pole-independent levels and the energy up to which both are complete"""

	def __init__(self, poles: np.ndarray, invariants: np.ndarray, cutoff: float):
		self.poles      : np.ndarray = np.unique(np.asarray(poles, dtype=float))
		self.invariants : np.ndarray = np.asarray(invariants, dtype=float)
		self.cutoff     : float      = float(cutoff)


def solve_spectrum(
	k         : int,
	equation  : VectorFn,
	structure : Callable[[int], BranchStructure],
) -> List[Tuple[float, LevelOrigin, Optional[int], float]]:
	"""The k lowest levels as (energy, origin, branch, residual)

	structure(count) describes the branches built from `count` Airy zeros;
	count is doubled until k levels lie below the last usable pole.
	"""
	if int(k) != k or k < 1:
		raise ValueError(f"level count must be a positive integer, got {k}")
	count = max(8, k + 4)

	while count <= DEFAULT_MAX_LEVELS:
		layout  = structure(count)
		poles   = layout.poles[layout.poles <= layout.cutoff]
		found   = []
		for branch, (left, right) in enumerate(branch_intervals(poles)):
			for root in branch_roots(equation, left, right):
				residual = float(np.abs(equation(np.array([root]))[0]))
				found.append((root, LevelOrigin.BRANCH, branch, residual))
		top = poles[-1] if len(poles) else -math.inf
		for energy in layout.invariants[layout.invariants <= top]:
			found.append((float(energy), LevelOrigin.INVARIANT, None, 0.0))

		if len(found) >= k:
			found.sort(key=lambda item: item[0])
			return found[:k]
		count *= 2
		log_print(f"branch solve: widening to {count} Airy zeros")

	raise BranchExhaustedError(f"fewer than {k} levels found below {DEFAULT_MAX_LEVELS} Airy zeros")


def to_levels(found: List[Tuple[float, LevelOrigin, Optional[int], float]], parity_of: Callable[[int, LevelOrigin], Parity]) -> List[EigenLevel]:
	tol    = get_settings().degeneracy_tol
	levels = []
	for i, (energy, origin, branch, residual) in enumerate(found):
		neighbours = [found[j][0] for j in (i - 1, i + 1) if 0 <= j < len(found)]
		degenerate = any(abs(energy - other) <= tol * max(1.0, abs(energy)) for other in neighbours)
		levels.append(EigenLevel(
			index      = i + 1,
			energy     = energy,
			parity     = parity_of(i + 1, origin),
			origin     = origin,
			branch     = branch,
			residual   = residual,
			degenerate = degenerate,
		))
	return levels


def _unperturbed_result(model: str, params: BaseType, k: int) -> EigenResult:
	energies = unperturbed_energies(k)
	levels   = [
		EigenLevel(index=n, energy=float(e), parity=level_parity(n), origin=LevelOrigin.UNPERTURBED, residual=0.0)
		for n, e in enumerate(energies, start=1)
	]
	return EigenResult(model=model, params=params.model_dump(mode="json"), levels=levels)


# ========================================================================
# BOUND-STATE EQUATION
# ========================================================================

def _resolve_kernel(kernel: Optional[KernelForm]) -> KernelForm:
	return KernelForm(kernel) if kernel is not None else get_settings().design_kernel


def _lambda_parts(E: np.ndarray, x0: float, kernel: KernelForm) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
	"""numerator, denominator and exponent of lambda(E) = num / den * exp(expo)"""
	t = -2.0 * np.asarray(E, dtype=float)
	a, ap, b, bp, zt = airy_scaled(t)
	num = -a * ap

	if kernel == KernelForm.CLOSED_FORM:
		a_plus , _, _, _, z_plus  = airy_scaled(x0 + t)
		a_minus, _, _, _, z_minus = airy_scaled(-x0 + t)
		return num, a_plus * a_minus, z_plus + z_minus - 2.0 * zt

	a_s, _, b_s, _, z_s = airy_scaled(abs(x0) + t)
	den = math.pi * a_s * ((a * bp + ap * b) * a_s * np.exp(2.0 * (zt - z_s)) - 2.0 * a * ap * b_s)
	return num, den, np.zeros_like(t)


def lambda_of_energy(E: float, x0: float, kernel: Optional[KernelForm] = None) -> float:
	"""Coupling lambda for which E is an eigenvalue of H_0 - lambda delta(x - x0)"""
	kernel          = _resolve_kernel(kernel)
	num, den, expo  = (float(v) for v in _lambda_parts(np.array(float(E)), float(x0), kernel))
	if abs(den) <= get_settings().pole_tol:
		raise PoleError(f"lambda(E) has a pole at E = {E}, x0 = {x0}", at=float(E))
	return num / den * math.exp(expo)


def lambda_curve(energies: np.ndarray, x0: float, kernel: Optional[KernelForm] = None) -> np.ndarray:
	"""lambda(E) on a grid, NaN at poles"""
	kernel         = _resolve_kernel(kernel)
	num, den, expo = _lambda_parts(np.asarray(energies, dtype=float), float(x0), kernel)
	with np.errstate(all="ignore"):
		res = np.where(np.abs(den) > get_settings().pole_tol, num / den * np.exp(expo), np.nan)
	return res


def delta_poles(x0: float, count: int, kernel: Optional[KernelForm] = None) -> np.ndarray:
	"""Energies where lambda(E) diverges, built from the first `count` Airy zeros"""
	kernel = _resolve_kernel(kernel)
	if kernel == KernelForm.CLOSED_FORM:
		zeros = ai_zeros(count)
		return np.unique(np.concatenate([(x0 - zeros) / 2.0, (-x0 - zeros) / 2.0]))
	return _exact_structure(x0, count).poles


def _node_mask(x0: float, count: int) -> Tuple[np.ndarray, np.ndarray]:
	energies = unperturbed_energies(count)
	psi      = eigenfunctions(np.arange(1, count + 1), np.array([x0]))[:, 0]
	return energies, np.abs(psi) <= 1.0e-10


def _closed_structure(x0: float, count: int) -> BranchStructure:
	zeros            = ai_zeros(count)
	energies, nodes  = _node_mask(x0, count)
	cutoff           = min((x0 - zeros[-1]) / 2.0, (-x0 - zeros[-1]) / 2.0, energies[-1])
	poles            = np.concatenate([(x0 - zeros) / 2.0, (-x0 - zeros) / 2.0])
	return BranchStructure(poles, energies[nodes], cutoff)


def _exact_structure(x0: float, count: int) -> BranchStructure:
	energies, nodes = _node_mask(x0, count)
	return BranchStructure(energies[~nodes], energies[nodes], energies[-1])


# ========================================================================
# SPECTRUM
# ========================================================================

def delta_equation(params: DeltaParams) -> VectorFn:
	"""Vectorized function whose zeros between consecutive poles are the levels"""
	x0, lam = params.x0, params.lam

	if params.kernel == KernelForm.CLOSED_FORM:
		def closed(E: np.ndarray) -> np.ndarray:
			num, den, expo = _lambda_parts(E, x0, KernelForm.CLOSED_FORM)
			return num / den * np.exp(expo) - lam
		return closed

	def exact(E: np.ndarray) -> np.ndarray:
		# G_0(x0, x0; E) - 1/lambda, poles at the unperturbed levels
		num, den, _ = _lambda_parts(E, x0, KernelForm.EXACT)
		return den / num - 1.0 / lam
	return exact


def delta_spectrum(params: DeltaParams, k: int) -> EigenResult:
	if params.lam == 0.0:
		return _unperturbed_result("delta", params, k)

	structure = (lambda c: _closed_structure(params.x0, c)) if params.kernel == KernelForm.CLOSED_FORM else (lambda c: _exact_structure(params.x0, c))
	found     = solve_spectrum(k, delta_equation(params), structure)
	levels    = to_levels(found, lambda n, origin: level_parity(n))
	result    = EigenResult(model="delta", params=params.model_dump(mode="json"), levels=levels)
	return result


def delta_branch_solve(params: DeltaParams, branch: int, count: Optional[int] = None) -> BranchSolveResult:
	"""Solve a single branch; branch 0 is the one unbounded below"""
	if branch < 0:
		raise ValueError(f"branch index must be non-negative, got {branch}")
	count     = count or max(8, branch + 4)
	layout    = _closed_structure(params.x0, count) if params.kernel == KernelForm.CLOSED_FORM else _exact_structure(params.x0, count)
	poles     = layout.poles[layout.poles <= layout.cutoff]
	intervals = branch_intervals(poles)
	if branch >= len(intervals):
		raise BranchExhaustedError(f"branch {branch} lies beyond the {len(intervals)} available branches")

	left, right = intervals[branch]
	equation    = delta_equation(params)
	roots       = branch_roots(equation, left, right)
	if not roots:
		raise BranchExhaustedError(f"branch {branch} on ({left}, {right}) has no level for lambda = {params.lam}")
	energy = roots[0]
	result = BranchSolveResult(
		branch     = branch,
		pole_left  = left,
		pole_right = right,
		energy     = energy,
		residual   = float(abs(equation(np.array([energy]))[0])),
	)
	return result


def delta_resolvent(x: float, y: float, E: float, params: DeltaParams) -> float:
	"""Resolvent kernel of H_0 - lambda delta(x - x0); the levels are its poles"""
	g_xy = green_kernel(x, y, E)
	if params.lam == 0.0:
		return float(g_xy)
	g_x  = green_kernel(x, params.x0, E)
	g_y  = green_kernel(params.x0, y, E)
	g_00 = green_kernel(params.x0, params.x0, E)
	den  = 1.0 / params.lam - g_00
	if abs(den) <= get_settings().pole_tol:
		raise PoleError(f"E = {E} is an eigenvalue of the perturbed operator", at=E)
	return float(g_xy + g_x * g_y / den)


# ========================================================================
# INVERSE PROBLEM
# ========================================================================

def _inverse_parts(E: np.ndarray, x0: np.ndarray, kernel: KernelForm) -> Tuple[np.ndarray, np.ndarray]:
	"""Unscaled N(E) and D(x0, E) with lambda = N / D"""
	t = -2.0 * np.asarray(E, dtype=float)
	a, ap, b, bp = airy_functions(t)
	num = -a * ap
	if kernel == KernelForm.CLOSED_FORM:
		den = airy_functions(x0 + t)[0] * airy_functions(-x0 + t)[0]
		return num, den
	s = np.abs(x0) + t
	a_s, _, b_s, _ = airy_functions(s)
	den = math.pi * a_s * ((a * bp + ap * b) * a_s - 2.0 * a * ap * b_s)
	return num, den


def _scan_roots(fn: VectorFn, lo: float, hi: float, step: float) -> List[float]:
	if not (hi > lo):
		return []
	count  = max(2, int(math.ceil((hi - lo) / step)) + 1)
	grid   = np.linspace(lo, hi, count)
	with np.errstate(all="ignore"):
		values = np.asarray(fn(grid), dtype=float)
	roots  = [float(g) for g, v in zip(grid, values) if v == 0.0]
	flips  = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
	for i in flips:
		if np.isfinite(values[i]) and np.isfinite(values[i + 1]):
			roots.append(_find_root(fn, float(grid[i]), float(grid[i + 1])))
	return sorted(roots)


def _consistent(E1: float, E2: float, x0: float, kernel: KernelForm) -> Optional[float]:
	"""The common lambda if both energies give the same finite coupling"""
	try:
		lam_1 = lambda_of_energy(E1, x0, kernel)
		lam_2 = lambda_of_energy(E2, x0, kernel)
	except PoleError:
		return None
	if abs(lam_1 - lam_2) > 1.0e-6 * max(1.0, abs(lam_1)):
		return None
	return lam_1


def inverse_design(
	E1            : float,
	E2            : float,
	x0_search     : Tuple[float, float]    = (0.0, DEFAULT_INVERSE_X0_MAX),
	max_solutions : int                    = DEFAULT_INVERSE_MAX_SOLUTIONS,
	kernel        : Optional[KernelForm]   = None,
) -> List[InverseSolution]:
	"""All (x0, lambda) in the search interval with E1 and E2 in the spectrum"""
	if not (math.isfinite(E1) and math.isfinite(E2)):
		raise ValueError("energies must be finite")
	if E1 == E2:
		raise ValueError(f"degenerate input E1 = E2 = {E1}")
	if max_solutions < 1:
		raise ValueError(f"max_solutions must be positive, got {max_solutions}")
	kernel = _resolve_kernel(kernel)

	n_1, _ = _inverse_parts(np.array(E1), np.array(0.0), kernel)
	n_2, _ = _inverse_parts(np.array(E2), np.array(0.0), kernel)

	def ratio(x0: np.ndarray) -> np.ndarray:
		_, d_1 = _inverse_parts(np.full_like(x0, E1), x0, kernel)
		_, d_2 = _inverse_parts(np.full_like(x0, E2), x0, kernel)
		return n_1 * d_2 - n_2 * d_1

	lo, hi    = float(min(x0_search)), float(max(x0_search))
	solutions = []
	for x0 in _scan_roots(ratio, lo, hi, get_settings().scan_step):
		lam = _consistent(E1, E2, x0, kernel)
		if lam is None:
			log_print(f"inverse: discarding x0 = {x0:.10g} (pole or inconsistent coupling)")
			continue
		solutions.append(InverseSolution(
			x0              = x0,
			lam             = lam,
			ratio_residual  = float(abs(ratio(np.array([x0]))[0])),
			lambda_residual = abs(lambda_of_energy(E2, x0, kernel) - lam),
		))
		if len(solutions) >= max_solutions:
			break
	return solutions


def compatible_pairs(
	x0        : float,
	E1        : float,
	E2_search : Tuple[float, float],
	kernel    : Optional[KernelForm] = None,
) -> List[float]:
	"""Energies E2 that share the coupling of E1 at fixed x0"""
	kernel = _resolve_kernel(kernel)
	lam_1  = lambda_of_energy(E1, x0, kernel)
	n_1, d_1 = (float(v) for v in _inverse_parts(np.array(E1), np.array(x0), kernel))

	def ratio(E2: np.ndarray) -> np.ndarray:
		n_2, d_2 = _inverse_parts(E2, np.full_like(E2, x0), kernel)
		return n_1 * d_2 - n_2 * d_1

	lo, hi = float(min(E2_search)), float(max(E2_search))
	found  = []
	for E2 in _scan_roots(ratio, lo, hi, get_settings().scan_step):
		if abs(E2 - E1) <= 1.0e-9 * max(1.0, abs(E1)):
			continue
		if _consistent(E1, E2, x0, kernel) is None:
			log_print(f"compatible pairs: discarding E2 = {E2:.10g} for lambda = {lam_1:.10g}")
			continue
		found.append(E2)
	return found
