# spectrum_core

import math


import numpy as np


from   scipy           import integrate, special
from   typing          import List, Optional, Tuple, Union


from   airy            import ai_zeros, airy_functions, airy_scaled, aip_zeros
from   core            import get_settings
from   schema          import GreenEval, KernelForm, Parity, PoleError, SeriesSum, UnperturbedLevel


ArrayLike = Union[float, np.ndarray]


# ========================================================================
# UNPERTURBED LEVELS
# ========================================================================

def _check_level(n: int) -> int:
	if int(n) != n or n < 1:
		raise ValueError(f"level index must be a positive integer, got {n}")
	return int(n)


def level_parity(n: int) -> Parity:
	n = _check_level(n)
	return Parity.SYMMETRIC if n % 2 == 1 else Parity.ANTISYMMETRIC


def level_airy_zero(n: int) -> float:
	"""a'_m for odd n = 2m-1, a_m for even n = 2m"""
	n = _check_level(n)
	m = (n + 1) // 2
	if n % 2 == 1:
		return float(aip_zeros(m)[-1])
	return float(ai_zeros(m)[-1])


def unperturbed_energy(n: int) -> float:
	return -0.5 * level_airy_zero(n)


def unperturbed_energies(count: int) -> np.ndarray:
	"""E_1 < E_2 < ... < E_count"""
	count  = _check_level(count)
	pairs  = (count + 1) // 2
	res    = np.empty(2 * pairs)
	res[0::2] = -0.5 * aip_zeros(pairs)
	res[1::2] = -0.5 * ai_zeros(pairs)
	return res[:count]


def odd_energies(count: int) -> np.ndarray:
	return -0.5 * aip_zeros(_check_level(count))


def even_energies(count: int) -> np.ndarray:
	return -0.5 * ai_zeros(_check_level(count))


def unperturbed_level(n: int) -> UnperturbedLevel:
	zero  = level_airy_zero(n)
	level = UnperturbedLevel(index=n, energy=-0.5 * zero, parity=level_parity(n), airy_zero=zero)
	return level


def unperturbed_spectrum(count: int) -> List[UnperturbedLevel]:
	return [unperturbed_level(n) for n in range(1, _check_level(count) + 1)]


# ========================================================================
# EIGENFUNCTIONS
# ========================================================================

def _eigen_factors(n: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
	"""Shift, signed inverse norm and odd-ness flag for every level in n"""
	top   = int(np.max(n))
	pairs = (top + 1) // 2
	m     = (n + 1) // 2
	odd   = (n % 2 == 1)
	ap    = aip_zeros(pairs)[m - 1]
	a     = ai_zeros(pairs)[m - 1]
	shift = np.where(odd, ap, a)

	ai, aip, _, _ = airy_functions(shift)
	# int_{s}^{inf} Ai^2 = Ai'(s)^2 - s Ai(s)^2
	half_norm_sq = aip ** 2 - shift * ai ** 2
	sign  = np.where(odd, np.sign(ai), np.sign(aip))
	scale = sign / np.sqrt(2.0 * half_norm_sq)
	return shift, scale, odd


def eigenfunctions(levels: np.ndarray, x: ArrayLike) -> np.ndarray:
	"""psi_n(x) as an array of shape (len(levels), len(x))"""
	levels = np.atleast_1d(np.asarray(levels, dtype=int))
	if np.any(levels < 1):
		raise ValueError("level indices must be positive")
	x = np.atleast_1d(np.asarray(x, dtype=float))

	shift, scale, odd = _eigen_factors(levels)
	arg   = np.abs(x)[np.newaxis, :] + shift[:, np.newaxis]
	ai_s, _, _, _, z = airy_scaled(arg)
	ai    = ai_s * np.exp(-z)
	sgn   = np.where(odd[:, np.newaxis], 1.0, np.sign(x)[np.newaxis, :])
	return scale[:, np.newaxis] * sgn * ai


def eigenfunction(n: int, x: ArrayLike) -> ArrayLike:
	n   = _check_level(n)
	res = eigenfunctions(np.array([n]), x)[0]
	return float(res[0]) if np.ndim(x) == 0 else res


def eigenfunction_prime(n: int, x: ArrayLike) -> ArrayLike:
	"""Derivative of psi_n; at x = 0 the right-hand limit is returned"""
	n     = _check_level(n)
	xs    = np.atleast_1d(np.asarray(x, dtype=float))
	shift, scale, odd = _eigen_factors(np.array([n]))
	_, aip, _, _ = airy_functions(np.abs(xs) + shift[0])
	if odd[0]:
		res = scale[0] * np.where(xs < 0.0, -1.0, 1.0) * aip
	else:
		res = scale[0] * aip
	return float(res[0]) if np.ndim(x) == 0 else res


# ========================================================================
# RESOLVENT KERNEL
# ========================================================================

def _pole_check(E: float, ai_t: float, aip_t: float) -> None:
	tol = get_settings().pole_tol
	if abs(ai_t) <= tol or abs(aip_t) <= tol:
		raise PoleError(f"E = {E} is at an unperturbed eigenvalue", at=E)


def green_kernel(x: ArrayLike, y: ArrayLike, E: float, kernel: KernelForm = KernelForm.EXACT) -> np.ndarray:
	"""Vectorized G_0(x, y; E), broadcasting x against y"""
	E     = float(E)
	if not math.isfinite(E):
		raise ValueError(f"energy must be finite, got {E}")
	t     = -2.0 * E
	x, y  = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

	a, ap, b, bp, zt = (float(v) for v in airy_scaled(t))
	_pole_check(E, a * math.exp(-zt), ap * math.exp(-zt))

	if kernel == KernelForm.CLOSED_FORM:
		xg, xl = np.maximum(x, y), np.minimum(x, y)
	else:
		# reflect so that the larger point is on the right half-line
		flip   = np.maximum(x, y) < 0.0
		xg     = np.where(flip, -np.minimum(x, y), np.maximum(x, y))
		xl     = np.where(flip, -np.maximum(x, y), np.minimum(x, y))

	ag, _, _, _, zg = airy_scaled(xg + t)
	aw, _, _, _, zw = airy_scaled(-xl + t)
	opposite = -(ag * aw / (a * ap)) * np.exp(2.0 * zt - zg - zw)

	if kernel == KernelForm.CLOSED_FORM:
		return opposite

	an, _, bn, _, zn = airy_scaled(xl + t)
	with np.errstate(over="ignore", invalid="ignore"):
		same = -(ag / (a * ap)) * math.pi * (
			(a * bp + ap * b) * an * np.exp(2.0 * zt - zg - zn)
			- 2.0 * a * ap * bn * np.exp(zn - zg)
		)
	res = np.where(xl <= 0.0, opposite, same)
	return res


def green_function(x: float, y: float, E: float, kernel: KernelForm = KernelForm.EXACT) -> float:
	return float(green_kernel(float(x), float(y), E, kernel))


def green_eval(x: float, y: float, E: float, kernel: KernelForm = KernelForm.EXACT) -> GreenEval:
	value = green_function(x, y, E, kernel)
	return GreenEval(x=x, y=y, E=E, kernel=kernel, value=value)


# ========================================================================
# SERIES ORACLES
# ========================================================================

def _pair_tail(x: np.ndarray, y: np.ndarray, E: float, N: int) -> np.ndarray:
	"""Semiclassical estimate of sum_{n > N} psi_n(x) psi_n(y) / (E_n - E)"""
	K3   = 0.75 * math.pi * N
	K    = K3 ** (1.0 / 3.0)
	K2   = K * K
	ax   = np.minimum(np.abs(x), 0.999 * K2)
	ay   = np.minimum(np.abs(y), 0.999 * K2)
	px   = np.sqrt(K2 - ax)
	py   = np.sqrt(K2 - ay)
	sx   = np.sign(x) * (2.0 / 3.0) * (K3 - (K2 - ax) ** 1.5)
	sy   = np.sign(y) * (2.0 / 3.0) * (K3 - (K2 - ay) ** 1.5)
	d    = (sx - sy) / K
	amp  = K / np.sqrt(px * py)
	si, _ = special.sici(K * np.abs(d))
	main = np.cos(K * d) / K - np.abs(d) * (0.5 * math.pi - si)
	res  = (2.0 / math.pi) * amp * main + (2.0 / math.pi) * 2.0 * E * np.cos(K * d) / (3.0 * K3)
	return res


def kernel_series(x: ArrayLike, y: ArrayLike, E: float, N: int, tail: Optional[bool] = None) -> SeriesSum:
	"""Truncated eigen-expansion of G_0(x, y; E) with its tail estimate

	x and y are scalars; see kernel_series_grid for arrays.
	"""
	partial, tails = kernel_series_grid(np.array([float(x)]), np.array([float(y)]), E, N, tail)
	res = SeriesSum(terms=N, partial=float(partial[0, 0]), tail=float(tails[0, 0]))
	return res


def kernel_series_grid(x: np.ndarray, y: np.ndarray, E: float, N: int, tail: Optional[bool] = None) -> Tuple[np.ndarray, np.ndarray]:
	"""Partial sums and tails on the outer grid x by y"""
	N     = _check_level(N)
	tail  = get_settings().series_tail if tail is None else tail
	x     = np.atleast_1d(np.asarray(x, dtype=float))
	y     = np.atleast_1d(np.asarray(y, dtype=float))

	energies = unperturbed_energies(N)
	if np.any(np.abs(energies - E) < get_settings().pole_tol):
		raise PoleError(f"E = {E} is at an unperturbed eigenvalue", at=E)

	levels  = np.arange(1, N + 1)
	psi_x   = eigenfunctions(levels, x)
	psi_y   = eigenfunctions(levels, y)
	weights = 1.0 / (energies - E)
	partial = (psi_x * weights[:, np.newaxis]).T @ psi_y

	if tail:
		tails = _pair_tail(x[:, np.newaxis], y[np.newaxis, :], E, N)
	else:
		tails = np.zeros_like(partial)
	return partial, tails


def diagonal_norm_identity_residual(x0: float, E: float, N: int, tail: Optional[bool] = None) -> float:
	"""|sum_{n<=N} psi_n(x0)^2 / (E_n - E) - G_0(x0, x0; E)|"""
	if E >= unperturbed_energy(1):
		raise ValueError(f"the diagonal identity is checked below E_1, got E = {E}")
	series = kernel_series(x0, x0, E, N, tail)
	exact  = green_function(x0, x0, E)
	return abs(series.total - exact)


def _asymptotic_energy(n: np.ndarray, parity: Optional[Parity]) -> np.ndarray:
	if parity == Parity.SYMMETRIC:
		return 0.5 * (3.0 * math.pi * (4.0 * n - 3.0) / 8.0) ** (2.0 / 3.0)
	if parity == Parity.ANTISYMMETRIC:
		return 0.5 * (3.0 * math.pi * (4.0 * n - 1.0) / 8.0) ** (2.0 / 3.0)
	return 0.5 * (3.0 * math.pi * (n - 0.5) / 4.0) ** (2.0 / 3.0)


def schatten_partial_sum(gamma: float, N: int, parity: Optional[Parity] = None, tail: bool = False) -> SeriesSum:
	"""sum of E_n^{-gamma} over the first N levels (of one parity if given)"""
	if not (gamma > 0.0):
		raise ValueError(f"gamma must be positive, got {gamma}")
	N = _check_level(N)

	if parity == Parity.SYMMETRIC:
		energies = odd_energies(N)
	elif parity == Parity.ANTISYMMETRIC:
		energies = even_energies(N)
	else:
		energies = unperturbed_energies(N)
	partial = float(np.sum(energies ** -gamma))

	rest = 0.0
	if tail:
		if gamma * 2.0 / 3.0 <= 1.0:
			rest = math.inf
		else:
			rest, _ = integrate.quad(lambda n: _asymptotic_energy(n, parity) ** -gamma, N + 0.5, np.inf, limit=200)
	res = SeriesSum(terms=N, partial=partial, tail=rest)
	return res


def origin_slopes(levels: np.ndarray) -> np.ndarray:
	"""psi_n'(0+) for every level in levels"""
	levels = np.atleast_1d(np.asarray(levels, dtype=int))
	shift, scale, _ = _eigen_factors(levels)
	_, aip, _, _ = airy_functions(shift)
	return scale * aip
