# test_core

import json


import pytest


from   core     import *
from   schema   import *


def test_default_config_file_loads():
	config = load_config(DEFAULT_CONFIG_FILE)
	assert config is not None
	assert config.info.name == DEFAULT_APP_NAME
	assert config.settings["series_trunc"] == DEFAULT_SERIES_TRUNC


def test_kernel_defaults():
	settings = settings_from_config(load_config(DEFAULT_CONFIG_FILE))
	assert settings.kernel_form == KernelForm.EXACT
	assert settings.design_kernel == KernelForm.CLOSED_FORM
	assert settings.degeneracy_tol == pytest.approx(1e-6)
	assert SolverSettings().kernel_form == KernelForm(DEFAULT_KERNEL_FORM)


def test_bad_config_returns_none(tmp_path, capsys):
	path = tmp_path / "broken.json"
	path.write_text("{ not json")
	assert load_config(str(path)) is None
	assert load_config(str(tmp_path / "missing.json")) is None
	assert "Error loading config" in capsys.readouterr().err


def test_overrides_win_over_config(tmp_path):
	path = tmp_path / "config.json"
	path.write_text(json.dumps({"type": "conic_config", "settings": {"airy_backend": "series", "series_trunc": 50}}))
	config   = load_config(str(path))
	settings = settings_from_config(config, {"airy_backend": "scipy", "output_format": None})
	assert settings.airy_backend == AiryBackendType.SCIPY
	assert settings.series_trunc == 50
	assert settings.output_format == OutputFormat.CSV


def test_environment_fills_unset_keys(monkeypatch):
	monkeypatch.setenv("CONIC_SCAN_STEP", "0.002")
	monkeypatch.setenv("CONIC_DEGENERACY_TOL", "1e-7")
	settings = settings_from_config(None)
	assert settings.scan_step == pytest.approx(0.002)
	assert settings.degeneracy_tol == pytest.approx(1e-7)


@pytest.mark.parametrize("key, value", [
	("series_trunc", 0),
	("pole_tol"    , 0.0),
	("max_workers" , -1),
	("airy_backend", "mathematica"),
])
def test_invalid_settings(key, value):
	with pytest.raises(ValueError):
		SolverSettings(**{key: value})


def test_global_settings():
	assert get_settings() is get_settings()
	custom = set_settings(SolverSettings(series_trunc=10))
	assert get_settings() is custom
	reset_settings()
	assert get_settings().series_trunc == DEFAULT_SERIES_TRUNC
