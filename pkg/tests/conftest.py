# conftest

import os
import sys


import pytest


APP_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "app")
if APP_DIR not in sys.path:
	sys.path.insert(0, APP_DIR)


from   core        import reset_settings
from   event_bus   import reset_event_bus
from   utils       import set_verbose


@pytest.fixture(autouse=True)
def fresh_state(monkeypatch):
	"""Default settings, an empty event bus and quiet logging for every test"""
	for name in list(os.environ):
		if name.startswith("CONIC_"):
			monkeypatch.delenv(name, raising=False)
	reset_settings()
	reset_event_bus()
	set_verbose(False)
	yield
	reset_settings()
	reset_event_bus()
	set_verbose(False)
