# event_bus

import asyncio


from   collections import deque
from   datetime    import datetime
from   enum        import Enum
from   pydantic    import BaseModel
from   typing      import Any, Callable, Deque, Dict, List, Optional


from   utils       import error_print


class EventType(str, Enum):
	# System events
	ERROR                 = "error"
	WARNING               = "warning"
	INFO                  = "info"

	# Command events
	COMMAND_STARTED       = "command.started"
	COMMAND_COMPLETED     = "command.completed"
	COMMAND_FAILED        = "command.failed"

	# Sweep events
	SWEEP_STARTED         = "sweep.started"
	SWEEP_POINT_COMPLETED = "sweep.point_completed"
	SWEEP_POINT_FAILED    = "sweep.point_failed"
	SWEEP_COMPLETED       = "sweep.completed"

	# Solve events
	SOLVE_COMPLETED       = "solve.completed"
	SOLVE_FAILED          = "solve.failed"

	# Verification events
	VERIFY_PASSED         = "verify.passed"
	VERIFY_FAILED         = "verify.failed"


class SpectralEvent(BaseModel):
	event_id   : str
	event_type : EventType
	timestamp  : str
	run_id     : Optional[str]            = None
	point      : Optional[int]            = None
	solver     : Optional[str]            = None
	data       : Optional[Dict[str, Any]] = None
	error      : Optional[str]            = None


class EventBus:
	"""In-process event bus for command, sweep and solve events"""

	def __init__(self, max_history: int = 1000):
		self._subscribers : Dict[EventType, List[Callable]] = {}
		self._listeners   : List[Callable]                  = []
		self._history     : Deque[SpectralEvent]            = deque(maxlen=max_history)
		self._counter     : int                             = 0


	def subscribe(self, event_type: EventType, callback: Callable):
		self._subscribers.setdefault(event_type, []).append(callback)


	def unsubscribe(self, event_type: EventType, callback: Callable):
		callbacks = self._subscribers.get(event_type, [])
		if callback in callbacks:
			callbacks.remove(callback)


	def subscribe_all(self, callback: Callable):
		"""Listen to every event type (the CLI's --verbose logger)"""
		self._listeners.append(callback)


	async def publish(self, event: SpectralEvent):
		self._history.append(event)
		for callback in [*self._subscribers.get(event.event_type, []), *self._listeners]:
			# listener errors are reported, never propagated
			try:
				res = callback(event)
				if asyncio.iscoroutine(res):
					await res
			except Exception as e:
				error_print(f"event listener failed on {event.event_type.value}: {e}")


	def get_event_history(self,
		run_id     : Optional[str]       = None,
		event_type : Optional[EventType] = None,
		limit      : int                 = 100
	) -> List[SpectralEvent]:
		"""Most recent events, oldest first, optionally filtered by run and type"""
		res = [
			e for e in self._history
			if (run_id is None or e.run_id == run_id) and (event_type is None or e.event_type == event_type)
		]
		return res[-limit:]


	def clear_history(self):
		self._history.clear()


	def _next_event_id(self) -> str:
		self._counter += 1
		return f"evt_{datetime.now():%Y%m%d%H%M%S%f}_{self._counter}"


	async def emit(self,
		event_type : EventType,
		run_id     : Optional[str]            = None,
		point      : Optional[int]            = None,
		solver     : Optional[str]            = None,
		data       : Optional[Dict[str, Any]] = None,
		error      : Optional[str]            = None
	):
		event = SpectralEvent(
			event_id   = self._next_event_id(),
			event_type = event_type,
			timestamp  = datetime.now().isoformat(),
			run_id     = run_id,
			point      = point,
			solver     = solver,
			data       = data,
			error      = error,
		)
		await self.publish(event)


	def emit_sync(self, event_type: EventType, **kwargs):
		"""emit() for callers outside a running event loop"""
		try:
			asyncio.get_running_loop()
		except RuntimeError:
			asyncio.run(self.emit(event_type, **kwargs))
			return
		raise RuntimeError("emit_sync called inside a running event loop, use emit()")


_event_bus : Optional[EventBus] = None


def get_event_bus() -> EventBus:
	"""Process-wide bus shared by the CLI and the sweep engine"""
	global _event_bus
	if _event_bus is None:
		_event_bus = EventBus()
	return _event_bus


def reset_event_bus():
	global _event_bus
	_event_bus = None
