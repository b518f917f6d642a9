# engine

import asyncio
import uuid


from   datetime    import datetime
from   enum        import Enum
from   pydantic    import BaseModel
from   typing      import Any, Callable, Dict, List, Optional, Sequence


from   event_bus   import EventType, EventBus
from   schema      import DEFAULT_MAX_WORKERS, SpectralError


class SweepPointStatus(str, Enum):
	"""Status of a sweep point during execution"""
	PENDING   = "pending"
	RUNNING   = "running"
	COMPLETED = "completed"
	FAILED    = "failed"


class SweepPointResult(BaseModel):
	index   : int
	status  : SweepPointStatus         = SweepPointStatus.PENDING
	outputs : List[Dict[str, Any]]     = []
	error   : Optional[str]            = None


class SweepExecutionState(BaseModel):
	"""State of a sweep execution"""
	run_id          : str
	status          : SweepPointStatus
	pending_points  : List[int] = []
	running_points  : List[int] = []
	completed_points: List[int] = []
	failed_points   : List[int] = []
	start_time      : Optional[str] = None
	end_time        : Optional[str] = None


PointFn = Callable[[Any], List[Dict[str, Any]]]


class SweepEngine:
	"""Frontier-based sweep engine: points run in worker threads, results come back in index order"""

	def __init__(self, event_bus: EventBus, max_workers: int = DEFAULT_MAX_WORKERS):
		if max_workers < 1:
			raise ValueError(f"max_workers must be positive, got {max_workers}")
		self.event_bus   : EventBus                       = event_bus
		self.max_workers : int                            = max_workers
		self.executions  : Dict[str, SweepExecutionState] = {}


	async def _execute_point(self, semaphore: asyncio.Semaphore, index: int, point: Any, fn: PointFn) -> SweepPointResult:
		async with semaphore:
			result = SweepPointResult(index=index, status=SweepPointStatus.RUNNING)
			try:
				result.outputs = await asyncio.to_thread(fn, point)
				result.status  = SweepPointStatus.COMPLETED
			except (SpectralError, ValueError, ArithmeticError) as e:
				result.status  = SweepPointStatus.FAILED
				result.error   = f"{type(e).__name__}: {e}"
			return result


	async def run(self, points: Sequence[Any], fn: PointFn, run_id: Optional[str] = None) -> List[SweepPointResult]:
		"""Evaluate fn on every point; a failing point does not abort the sweep"""
		run_id = run_id or str(uuid.uuid4())
		state  = SweepExecutionState(
			run_id         = run_id,
			status         = SweepPointStatus.RUNNING,
			pending_points = list(range(len(points))),
			start_time     = datetime.now().isoformat(),
		)
		self.executions[run_id] = state

		await self.event_bus.emit(
			event_type = EventType.SWEEP_STARTED,
			run_id     = run_id,
			data       = {"points": len(points), "max_workers": self.max_workers},
		)

		semaphore = asyncio.Semaphore(self.max_workers)
		results   : Dict[int, SweepPointResult] = {}
		tasks     = set()
		for index, point in enumerate(points):
			tasks.add(asyncio.create_task(self._execute_point(semaphore, index, point, fn)))
		state.running_points = list(range(len(points)))
		state.pending_points = []

		while len(tasks) > 0:
			done, _ = await asyncio.wait(tasks, return_when=asyncio.FIRST_COMPLETED)

			for task in done:
				tasks.remove(task)
				result = await task
				results[result.index] = result
				state.running_points.remove(result.index)

				if result.status == SweepPointStatus.COMPLETED:
					state.completed_points.append(result.index)
					await self.event_bus.emit(
						event_type = EventType.SWEEP_POINT_COMPLETED,
						run_id     = run_id,
						point      = result.index,
						data       = {"rows": len(result.outputs)},
					)
				else:
					state.failed_points.append(result.index)
					await self.event_bus.emit(
						event_type = EventType.SWEEP_POINT_FAILED,
						run_id     = run_id,
						point      = result.index,
						error      = result.error,
					)

		state.status   = SweepPointStatus.FAILED if state.failed_points and not state.completed_points else SweepPointStatus.COMPLETED
		state.end_time = datetime.now().isoformat()

		await self.event_bus.emit(
			event_type = EventType.SWEEP_COMPLETED,
			run_id     = run_id,
			data       = {"completed": len(state.completed_points), "failed": len(state.failed_points)},
		)

		ordered = [results[i] for i in range(len(points))]
		return ordered


	def run_sync(self, points: Sequence[Any], fn: PointFn, run_id: Optional[str] = None) -> List[SweepPointResult]:
		return asyncio.run(self.run(points, fn, run_id))
