# airy

import math
import threading


import numpy as np


from   scipy            import special
from   scipy.optimize   import brentq, elementwise
from   typing           import Callable, Dict, List, Optional, Tuple, Union


from   core             import get_settings
from   schema           import DEFAULT_AIRY_TABLE_SIZE, AiryBackendType, AiryError, AiryValue, AiryZeroTable
from   utils            import log_print


AI_0          : float = 0.355028053887817239260063186004
AIP_0         : float = -0.258819403792806798405183560189
SQRT_3        : float = math.sqrt(3.0)
SQRT_PI       : float = math.sqrt(math.pi)

ArrayLike = Union[float, np.ndarray]


def _zeta(x: np.ndarray) -> np.ndarray:
	"""2/3 x^{3/2} on the positive axis, 0 elsewhere"""
	res = np.where(x > 0.0, (2.0 / 3.0) * np.abs(x) ** 1.5, 0.0)
	return res


# ========================================================================
# BACKENDS
# ========================================================================

class AiryBackend:
	"""Evaluates Ai, Ai', Bi, Bi' with exponential scaling on x > 0

	For x > 0 the returned Ai and Ai' are multiplied by exp(zeta) and Bi, Bi'
	by exp(-zeta), zeta = 2/3 x^{3/2}. For x <= 0 values are unscaled.
	"""

	name : AiryBackendType = None

	def scaled(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
		raise NotImplementedError


class ScipyAiryBackend(AiryBackend):
	name = AiryBackendType.SCIPY

	def scaled(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
		ai, aip, bi, bip = (np.empty_like(x) for _ in range(4))
		pos = x > 0.0
		neg = ~pos
		if np.any(neg):
			ai[neg], aip[neg], bi[neg], bip[neg] = special.airy(x[neg])
		if np.any(pos):
			ai[pos], aip[pos], bi[pos], bip[pos] = special.airye(x[pos])
		return ai, aip, bi, bip


class SeriesAiryBackend(AiryBackend):
	"""Maclaurin series near the origin, asymptotic expansions outside

	The series covers [-neg_limit, pos_limit]. Outside it the asymptotic
	expansions are truncated at their smallest term. Worst-case relative
	accuracy is about 1e-8 on the positive side close to pos_limit, where
	both representations lose digits; absolute errors stay below 1e-12.
	"""

	name = AiryBackendType.SERIES

	_MACLAURIN_MAX_TERMS  : int = 120
	_ASYMPTOTIC_MAX_TERMS : int = 48

	def __init__(self, pos_limit: Optional[float] = None, neg_limit: Optional[float] = None):
		settings       = get_settings()
		self.pos_limit : float = float(pos_limit if pos_limit is not None else settings.airy_series_pos)
		self.neg_limit : float = float(neg_limit if neg_limit is not None else settings.airy_series_neg)
		self.u_coeffs, self.v_coeffs = self._asymptotic_coefficients(self._ASYMPTOTIC_MAX_TERMS)

	@staticmethod
	def _asymptotic_coefficients(count: int) -> Tuple[np.ndarray, np.ndarray]:
		u = np.empty(count)
		v = np.empty(count)
		u[0] = 1.0
		v[0] = 1.0
		for k in range(1, count):
			u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
			v[k] = -u[k] * (6 * k + 1) / (6 * k - 1)
		return u, v

	def _maclaurin(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
		x3 = x ** 3
		t  = np.ones_like(x)
		s  = x.copy()
		p  = 0.5 * x ** 2
		q  = np.ones_like(x)
		f, g, fp, gp = t.copy(), s.copy(), p.copy(), q.copy()

		for k in range(1, self._MACLAURIN_MAX_TERMS):
			t  = t * x3 / ((3 * k - 1) * (3 * k))
			s  = s * x3 / ((3 * k) * (3 * k + 1))
			p  = p * x3 / ((3 * k) * (3 * k + 2))
			q  = q * x3 / ((3 * k) * (3 * k - 2))
			f  += t
			g  += s
			fp += p
			gp += q
			scale = np.maximum.reduce([np.abs(f), np.abs(g), np.abs(fp), np.abs(gp), np.ones_like(x)])
			if np.all(np.maximum.reduce([np.abs(t), np.abs(s), np.abs(p), np.abs(q)]) <= 1.0e-18 * scale):
				break

		ai  = AI_0 * f + AIP_0 * g
		aip = AI_0 * fp + AIP_0 * gp
		bi  = SQRT_3 * (AI_0 * f - AIP_0 * g)
		bip = SQRT_3 * (AI_0 * fp - AIP_0 * gp)

		z = _zeta(x)
		return ai * np.exp(z), aip * np.exp(z), bi * np.exp(-z), bip * np.exp(-z)

	def _terms(self, zeta: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
		"""coeffs[k] / zeta^k truncated before the smallest term, shape (terms, n)"""
		powers = zeta[np.newaxis, :] ** -np.arange(len(coeffs))[:, np.newaxis]
		terms  = coeffs[:, np.newaxis] * powers
		cut    = np.argmin(np.abs(terms), axis=0)
		keep   = np.arange(len(coeffs))[:, np.newaxis] < np.maximum(cut, 1)[np.newaxis, :]
		return np.where(keep, terms, 0.0)

	def _asymptotic_positive(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
		zeta  = _zeta(x)
		x4    = x ** 0.25
		u     = self._terms(zeta, self.u_coeffs)
		v     = self._terms(zeta, self.v_coeffs)
		sign  = (-1.0) ** np.arange(u.shape[0])[:, np.newaxis]
		ai    = np.sum(sign * u, axis=0) / (2.0 * SQRT_PI * x4)
		aip   = -x4 * np.sum(sign * v, axis=0) / (2.0 * SQRT_PI)
		bi    = np.sum(u, axis=0) / (SQRT_PI * x4)
		bip   = x4 * np.sum(v, axis=0) / SQRT_PI
		return ai, aip, bi, bip

	def _asymptotic_negative(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
		z     = -x
		zeta  = (2.0 / 3.0) * z ** 1.5
		z4    = z ** 0.25
		u     = self._terms(zeta, self.u_coeffs)
		v     = self._terms(zeta, self.v_coeffs)
		k     = np.arange(u.shape[0])[:, np.newaxis]
		even  = (k % 2 == 0)
		# (-1)^j on u_{2j} and u_{2j+1}
		sign  = np.where((k // 2) % 2 == 0, 1.0, -1.0)
		u_e   = np.sum(np.where(even, sign * u, 0.0), axis=0)
		u_o   = np.sum(np.where(even, 0.0, sign * u), axis=0)
		v_e   = np.sum(np.where(even, sign * v, 0.0), axis=0)
		v_o   = np.sum(np.where(even, 0.0, sign * v), axis=0)
		phase = zeta - 0.25 * math.pi
		c, s  = np.cos(phase), np.sin(phase)
		ai    = (c * u_e + s * u_o) / (SQRT_PI * z4)
		aip   = z4 * (s * v_e - c * v_o) / SQRT_PI
		bi    = (-s * u_e + c * u_o) / (SQRT_PI * z4)
		bip   = z4 * (c * v_e + s * v_o) / SQRT_PI
		return ai, aip, bi, bip

	def scaled(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
		out     = [np.empty_like(x) for _ in range(4)]
		inner   = (x >= -self.neg_limit) & (x <= self.pos_limit)
		regions = (
			(inner               , self._maclaurin           ),
			(x >  self.pos_limit , self._asymptotic_positive ),
			(x < -self.neg_limit , self._asymptotic_negative ),
		)
		for mask, evaluate in regions:
			if np.any(mask):
				values = evaluate(x[mask])
				for dst, src in zip(out, values):
					dst[mask] = src
		return tuple(out)


_AIRY_BACKENDS : Dict[AiryBackendType, type] = {
	AiryBackendType.SCIPY  : ScipyAiryBackend,
	AiryBackendType.SERIES : SeriesAiryBackend,
}

_backend_cache : Dict[AiryBackendType, AiryBackend] = {}
_backend_lock  : threading.Lock                      = threading.Lock()


def get_backend(backend: Optional[Union[str, AiryBackendType]] = None) -> AiryBackend:
	key = AiryBackendType(backend) if backend is not None else get_settings().airy_backend
	with _backend_lock:
		if key not in _backend_cache:
			_backend_cache[key] = _AIRY_BACKENDS[key]()
		return _backend_cache[key]


# ========================================================================
# EVALUATION
# ========================================================================

def _as_array(x: ArrayLike) -> Tuple[np.ndarray, bool]:
	arr = np.asarray(x, dtype=float)
	if not np.all(np.isfinite(arr)):
		raise ValueError("Airy arguments must be finite")
	return arr, arr.ndim == 0


def _unwrap(value: np.ndarray, scalar: bool) -> ArrayLike:
	return float(value) if scalar else value


def airy_scaled(x: ArrayLike, backend: Optional[Union[str, AiryBackendType]] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
	"""Scaled (Ai, Ai', Bi, Bi') together with the scaling exponent zeta"""
	arr, _ = _as_array(x)
	flat   = np.atleast_1d(arr).ravel()
	values = get_backend(backend).scaled(flat)
	res    = tuple(v.reshape(arr.shape) for v in values) + (_zeta(arr),)
	return res


def airy_functions(x: ArrayLike, backend: Optional[Union[str, AiryBackendType]] = None) -> Tuple[ArrayLike, ArrayLike, ArrayLike, ArrayLike]:
	arr, scalar          = _as_array(x)
	ai, aip, bi, bip, z  = airy_scaled(arr, backend)
	with np.errstate(over="ignore"):
		decay = np.exp(-z)
		grow  = np.exp(z)
		res   = (ai * decay, aip * decay, bi * grow, bip * grow)
	return tuple(_unwrap(v, scalar) for v in res)


def airy_ai(x: ArrayLike, backend: Optional[Union[str, AiryBackendType]] = None) -> ArrayLike:
	arr, scalar = _as_array(x)
	ai, _, _, _, z = airy_scaled(arr, backend)
	return _unwrap(ai * np.exp(-z), scalar)


def airy_ai_prime(x: ArrayLike, backend: Optional[Union[str, AiryBackendType]] = None) -> ArrayLike:
	arr, scalar = _as_array(x)
	_, aip, _, _, z = airy_scaled(arr, backend)
	return _unwrap(aip * np.exp(-z), scalar)


def airy_value(x: float, backend: Optional[Union[str, AiryBackendType]] = None) -> AiryValue:
	ai_s, aip_s, _, _, z = airy_scaled(float(x), backend)
	ai_s, aip_s, z = float(ai_s), float(aip_s), float(z)
	ai        = ai_s * math.exp(-z)
	aip       = aip_s * math.exp(-z)
	underflow = x > 0.0 and (ai == 0.0 or aip == 0.0) and ai_s != 0.0
	if underflow:
		log_print(f"Ai underflow at x = {x}")
	value = AiryValue(x=float(x), ai=ai, aip=aip, underflow=underflow)
	return value


# ========================================================================
# ZEROS
# ========================================================================

def _ai_zero_seed(k: np.ndarray) -> np.ndarray:
	t = 3.0 * np.pi * (4.0 * k - 1.0) / 8.0
	return -(t ** (2.0 / 3.0)) * (1.0 + 5.0 / 48.0 * t ** -2 - 5.0 / 36.0 * t ** -4)


def _aip_zero_seed(k: np.ndarray) -> np.ndarray:
	t = 3.0 * np.pi * (4.0 * k - 3.0) / 8.0
	return -(t ** (2.0 / 3.0)) * (1.0 - 7.0 / 48.0 * t ** -2 + 35.0 / 288.0 * t ** -4)


def _refine_zeros(fn: Callable[[np.ndarray], np.ndarray], seeds: np.ndarray, label: str) -> np.ndarray:
	settings = get_settings()
	half     = 0.3 * np.pi / np.sqrt(np.abs(seeds))
	lo, hi   = seeds - half, np.minimum(seeds + half, 0.0)

	f_lo, f_hi = fn(lo), fn(hi)
	bad = np.sign(f_lo) * np.sign(f_hi) > 0
	if np.any(bad):
		raise AiryError(f"{label} seeds failed to bracket a zero at indices {np.flatnonzero(bad)[:5].tolist()}")

	tol = min(settings.airy_zero_tol * 1.0e-2, 1.0e-12)
	res = elementwise.find_root(fn, (lo, hi), tolerances=dict(xatol=tol, xrtol=4.0 * np.finfo(float).eps))
	if not np.all(res.success):
		# scalar fallback for any element the vectorized solver gave up on
		roots = np.array(res.x, dtype=float)
		for i in np.flatnonzero(~np.asarray(res.success)):
			log_print(f"{label} zero {i + 1}: vectorized refinement failed, using brentq")
			roots[i] = brentq(lambda s: float(fn(np.array([s]))[0]), lo[i], hi[i], xtol=tol)
		return roots
	return np.asarray(res.x, dtype=float)


class _ZeroTableCache:
	"""Lazily grown zero tables, one per backend"""

	def __init__(self, backend: AiryBackendType):
		self.backend   : AiryBackendType    = backend
		self.ai_zeros  : Tuple[float, ...]  = ()
		self.aip_zeros : Tuple[float, ...]  = ()
		self.lock      : threading.Lock     = threading.Lock()

	def ensure(self, count: int) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
		with self.lock:
			size = len(self.ai_zeros)
			if size < count:
				target = max(count, 2 * size, DEFAULT_AIRY_TABLE_SIZE)
				k      = np.arange(size + 1, target + 1, dtype=float)
				ai     = _refine_zeros(lambda s: airy_ai(s, self.backend), _ai_zero_seed(k), "Ai")
				aip    = _refine_zeros(lambda s: airy_ai_prime(s, self.backend), _aip_zero_seed(k), "Ai'")
				self.ai_zeros  = self.ai_zeros + tuple(float(v) for v in ai)
				self.aip_zeros = self.aip_zeros + tuple(float(v) for v in aip)
				log_print(f"Airy zero table ({self.backend.value}) grown to {target} entries")
			return self.ai_zeros, self.aip_zeros


_zero_tables      : Dict[AiryBackendType, _ZeroTableCache] = {}
_zero_tables_lock : threading.Lock                          = threading.Lock()


def _zero_cache(backend: Optional[Union[str, AiryBackendType]]) -> _ZeroTableCache:
	key = AiryBackendType(backend) if backend is not None else get_settings().airy_backend
	with _zero_tables_lock:
		if key not in _zero_tables:
			_zero_tables[key] = _ZeroTableCache(key)
		return _zero_tables[key]


def clear_zero_tables() -> None:
	with _zero_tables_lock:
		_zero_tables.clear()


def _check_index(n: int) -> int:
	if int(n) != n or n < 1:
		raise ValueError(f"zero index must be a positive integer, got {n}")
	return int(n)


def ai_zeros(count: int, backend: Optional[Union[str, AiryBackendType]] = None) -> np.ndarray:
	count = _check_index(count)
	ai, _ = _zero_cache(backend).ensure(count)
	return np.array(ai[:count])


def aip_zeros(count: int, backend: Optional[Union[str, AiryBackendType]] = None) -> np.ndarray:
	count  = _check_index(count)
	_, aip = _zero_cache(backend).ensure(count)
	return np.array(aip[:count])


def ai_zero(n: int, backend: Optional[Union[str, AiryBackendType]] = None) -> float:
	n     = _check_index(n)
	ai, _ = _zero_cache(backend).ensure(n)
	return ai[n - 1]


def aip_zero(n: int, backend: Optional[Union[str, AiryBackendType]] = None) -> float:
	n      = _check_index(n)
	_, aip = _zero_cache(backend).ensure(n)
	return aip[n - 1]


def zero_table(count: int, backend: Optional[Union[str, AiryBackendType]] = None) -> AiryZeroTable:
	cache    = _zero_cache(backend)
	ai, aip  = cache.ensure(_check_index(count))
	table    = AiryZeroTable(backend=cache.backend, ai_zeros=ai[:count], aip_zeros=aip[:count])
	return table
