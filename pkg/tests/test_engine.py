# test_engine

import asyncio
import time


import pytest


from   engine      import *
from   event_bus   import EventBus, EventType
from   schema      import PoleError


def _slow_square(point):
	# later points finish first
	time.sleep(0.01 * (5 - point))
	return [{"point": point, "value": point * point}]


def _fails_on_two(point):
	if point == 2:
		raise PoleError("pole hit", at=float(point))
	return [{"point": point}]


def test_results_keep_point_order():
	engine  = SweepEngine(EventBus(), max_workers=3)
	results = engine.run_sync(list(range(5)), _slow_square, run_id="order")
	assert [r.index for r in results] == list(range(5))
	assert [r.outputs[0]["value"] for r in results] == [0, 1, 4, 9, 16]
	assert all(r.status == SweepPointStatus.COMPLETED for r in results)


def test_failed_point_does_not_abort():
	bus     = EventBus()
	engine  = SweepEngine(bus, max_workers=2)
	results = engine.run_sync(list(range(4)), _fails_on_two, run_id="fail")
	assert results[2].status == SweepPointStatus.FAILED
	assert "PoleError" in results[2].error
	assert results[2].outputs == []
	assert [r.status for r in results if r.index != 2] == [SweepPointStatus.COMPLETED] * 3

	failed = bus.get_event_history(run_id="fail", event_type=EventType.SWEEP_POINT_FAILED)
	assert [e.point for e in failed] == [2]
	state = engine.executions["fail"]
	assert sorted(state.completed_points) == [0, 1, 3]
	assert state.failed_points == [2]
	assert state.status == SweepPointStatus.COMPLETED


def test_events_bracket_the_sweep():
	bus    = EventBus()
	engine = SweepEngine(bus)
	asyncio.run(engine.run([0, 1], _slow_square, run_id="events"))
	history = [e.event_type for e in bus.get_event_history(run_id="events")]
	assert history[0] == EventType.SWEEP_STARTED
	assert history[-1] == EventType.SWEEP_COMPLETED
	assert history.count(EventType.SWEEP_POINT_COMPLETED) == 2


def test_all_points_failing_marks_run_failed():
	engine = SweepEngine(EventBus())
	engine.run_sync([2], _fails_on_two, run_id="all")
	assert engine.executions["all"].status == SweepPointStatus.FAILED


def test_empty_sweep():
	assert SweepEngine(EventBus()).run_sync([], _slow_square) == []


def test_worker_count_must_be_positive():
	with pytest.raises(ValueError):
		SweepEngine(EventBus(), max_workers=0)
