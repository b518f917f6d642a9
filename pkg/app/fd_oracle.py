# fd_oracle

import math


import numpy as np


from   scipy.linalg   import LinAlgError, eigh_tridiagonal
from   typing         import List, Optional, Sequence, Tuple, Union


from   schema         import *
from   utils          import log_print


OracleParams = Optional[Union[DeltaParams, LocalDDPParams]]


class OracleGrid:
	"""Interior nodes of [-L, L] with Dirichlet ends"""

	def __init__(self, spec: OracleSpec):
		intervals = spec.intervals
		if intervals % 2 != 0:
			raise OracleError(f"L / h must place a node at the origin (L = {spec.L}, h = {spec.h})")
		self.h      : float      = 2.0 * spec.L / intervals
		self.x      : np.ndarray = -spec.L + self.h * np.arange(1, intervals)
		self.center : int        = intervals // 2 - 1

	def nearest(self, x0: float) -> int:
		index = int(np.argmin(np.abs(self.x - x0)))
		return index


def _interaction_of(params: OracleParams) -> InteractionType:
	if params is None:
		return InteractionType.NONE
	if isinstance(params, DeltaParams):
		return InteractionType.DELTA
	if isinstance(params, LocalDDPParams):
		return InteractionType.LOCAL_DDP
	raise OracleError(f"interaction '{getattr(params, 'type', params)}' has no finite-difference realization")


def build_matrix(spec: OracleSpec, params: OracleParams = None) -> Tuple[OracleGrid, np.ndarray, np.ndarray]:
	"""Diagonal and off-diagonal of the symmetric tridiagonal Hamiltonian"""
	interaction = _interaction_of(params)
	if spec.interaction not in (InteractionType.NONE, interaction):
		raise OracleError(f"oracle spec expects '{spec.interaction.value}', got '{interaction.value}'")

	grid = OracleGrid(spec)
	h    = grid.h
	d    = np.full(grid.x.shape, 1.0 / h ** 2) + 0.5 * np.abs(grid.x)
	e    = np.full(grid.x.size - 1, -0.5 / h ** 2)

	if interaction == InteractionType.DELTA and params.lam != 0.0:
		d[grid.nearest(params.x0)] -= params.lam / h

	elif interaction == InteractionType.LOCAL_DDP:
		a, b  = params.a, params.b
		c     = grid.center
		# the origin node carries the mean of psi(0-) and psi(0+), with mass (1 + b^2) h
		norm  = math.sqrt(1.0 + b * b)
		d[c]  = 1.0 / h ** 2 - a / ((1.0 + b * b) * h)
		e[c - 1] = -(1.0 - b) / (2.0 * h ** 2 * norm)
		e[c]     = -(1.0 + b) / (2.0 * h ** 2 * norm)

	return grid, d, e


def fd_eigenpairs(spec: OracleSpec, params: OracleParams = None) -> Tuple[np.ndarray, np.ndarray, OracleGrid]:
	"""Lowest spec.M eigenvalues with eigenvectors (columns)"""
	grid, d, e = build_matrix(spec, params)
	try:
		values, vectors = eigh_tridiagonal(d, e, select="i", select_range=(0, spec.M - 1))
	except (LinAlgError, ValueError) as exc:
		raise OracleError(f"tridiagonal eigensolver failed: {exc}")
	log_print(f"oracle: {grid.x.size} nodes, lowest {spec.M} eigenvalues")
	return values, vectors, grid


def _eigenvalues(spec: OracleSpec, params: OracleParams) -> List[float]:
	grid, d, e = build_matrix(spec, params)
	try:
		values = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, spec.M - 1))
	except (LinAlgError, ValueError) as exc:
		raise OracleError(f"tridiagonal eigensolver failed: {exc}")
	return [float(v) for v in values]


def fd_unperturbed(spec: OracleSpec) -> List[float]:
	return _eigenvalues(spec, None)


def fd_delta(spec: OracleSpec, lam: float, x0: float) -> List[float]:
	return _eigenvalues(spec, DeltaParams(lam=lam, x0=x0))


def fd_local_ddp(spec: OracleSpec, a: float, b: float) -> List[float]:
	return _eigenvalues(spec, LocalDDPParams(a=a, b=b))


def fd_parities(spec: OracleSpec, params: OracleParams = None) -> List[Parity]:
	"""Parity read off each eigenvector by its overlap with its mirror image

	For the local model the right half-line is rescaled by the matching
	ratio (1 + b) / (1 - b), whose sign is folded into the label.
	"""
	values, vectors, grid = fd_eigenpairs(spec, params)
	sign   = 1.0
	if isinstance(params, LocalDDPParams):
		sign = math.copysign(1.0, (1.0 + params.b) / (1.0 - params.b))

	labels = []
	for j in range(vectors.shape[1]):
		v       = vectors[:, j]
		mirror  = v[::-1]
		overlap = float(np.dot(v, mirror)) * sign
		labels.append(Parity.SYMMETRIC if overlap > 0.0 else Parity.ANTISYMMETRIC)
	return labels


def convergence_slope(h_values: Sequence[float], errors: Sequence[float]) -> float:
	"""Least-squares slope of log(error) against log(h)"""
	h = np.asarray(h_values, dtype=float)
	err = np.abs(np.asarray(errors, dtype=float))
	if h.size < 2 or h.size != err.size:
		raise ValueError("need at least two (h, error) pairs of equal length")
	if np.any(h <= 0.0) or np.any(err <= 0.0):
		raise ValueError("steps and errors must be positive")
	slope, _ = np.polyfit(np.log(h), np.log(err), 1)
	return float(slope)
