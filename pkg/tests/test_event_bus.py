# test_event_bus

import asyncio


import pytest


from   event_bus   import *


def test_subscribers_receive_their_events():
	bus      = EventBus()
	received = []
	bus.subscribe(EventType.SOLVE_COMPLETED, received.append)
	asyncio.run(bus.emit(EventType.SOLVE_COMPLETED, solver="delta", data={"levels": 3}))
	asyncio.run(bus.emit(EventType.SOLVE_FAILED, solver="delta", error="boom"))
	assert len(received) == 1
	assert received[0].solver == "delta"
	assert received[0].data == {"levels": 3}


def test_async_listener_and_unsubscribe():
	bus    = EventBus()
	seen   = []
	counts = []

	async def listener(event):
		seen.append(event.event_type)

	bus.subscribe_all(listener)
	bus.subscribe(EventType.INFO, counts.append)
	bus.unsubscribe(EventType.INFO, counts.append)
	asyncio.run(bus.emit(EventType.INFO))
	assert seen == [EventType.INFO]
	assert counts == []


def test_failing_subscriber_is_isolated(capsys):
	bus = EventBus()

	def broken(event):
		raise RuntimeError("subscriber bug")

	bus.subscribe(EventType.WARNING, broken)
	asyncio.run(bus.emit(EventType.WARNING))
	assert len(bus.get_event_history()) == 1
	assert "subscriber bug" in capsys.readouterr().err


def test_history_filters_and_limit():
	bus = EventBus()
	for i in range(5):
		bus.emit_sync(EventType.SWEEP_POINT_COMPLETED, run_id="a" if i % 2 == 0 else "b", point=i)
	assert [e.point for e in bus.get_event_history(run_id="a")] == [0, 2, 4]
	assert len(bus.get_event_history(limit=2)) == 2
	ids = [e.event_id for e in bus.get_event_history()]
	assert len(set(ids)) == 5
	bus.clear_history()
	assert bus.get_event_history() == []


def test_emit_sync_inside_loop_is_rejected():
	bus = EventBus()

	async def inside():
		bus.emit_sync(EventType.INFO)

	with pytest.raises(RuntimeError):
		asyncio.run(inside())


def test_global_bus_reset():
	first = get_event_bus()
	assert get_event_bus() is first
	reset_event_bus()
	assert get_event_bus() is not first
