# solvers

import asyncio


from   typing                 import Any, Dict, Optional


from   delta_deltaprime_local import local_spectrum
from   delta_model            import delta_spectrum
from   deltaprime_nonlocal    import nonlocal_spectrum
from   schema                 import DEFAULT_LEVEL_COUNT, BaseType, EigenResult, SpectralError


class SolverExecutionContext:
	def __init__(self, params: BaseType, k: int = DEFAULT_LEVEL_COUNT, point: Optional[int] = None):
		self.params : BaseType      = params
		self.k      : int           = k
		self.point  : Optional[int] = point


class SolverExecutionResult:
	def __init__(self):
		self.outputs : Dict[str, Any] = {}
		self.success : bool           = True
		self.error   : Optional[str]  = None

	@property
	def spectrum(self) -> Optional[EigenResult]:
		return self.outputs.get("spectrum")


class SpectralSolver:
	"""Wraps a spectrum routine; failures are reported, never raised"""

	model : str = "base"

	def __init__(self, params: BaseType):
		self.params = params

	def solve(self, k: int) -> EigenResult:
		raise NotImplementedError

	def run(self, context: SolverExecutionContext) -> SolverExecutionResult:
		result = SolverExecutionResult()
		try:
			result.outputs["spectrum"] = self.solve(context.k)
		except (SpectralError, ValueError, ArithmeticError) as e:
			result.success = False
			result.error   = f"{type(e).__name__}: {e}"
		return result

	async def execute(self, context: SolverExecutionContext) -> SolverExecutionResult:
		result = await asyncio.to_thread(self.run, context)
		return result


class DeltaSolver(SpectralSolver):
	model = "delta"

	def solve(self, k: int) -> EigenResult:
		return delta_spectrum(self.params, k)


class NonlocalSolver(SpectralSolver):
	model = "nonlocal_dp"

	def solve(self, k: int) -> EigenResult:
		return nonlocal_spectrum(self.params, k)


class LocalDDPSolver(SpectralSolver):
	model = "local_ddp"

	def solve(self, k: int) -> EigenResult:
		return local_spectrum(self.params, k)


_SOLVER_TYPES = {
	"delta"       : DeltaSolver,
	"nonlocal_dp" : NonlocalSolver,
	"local_ddp"   : LocalDDPSolver,
}


def create_solver(params: BaseType) -> SpectralSolver:
	solver_class = _SOLVER_TYPES.get(params.type)
	if solver_class is None:
		raise ValueError(f"no solver registered for '{params.type}'")
	return solver_class(params)
