# core

import json
import os
import threading


from   pydantic          import Field, field_validator
from   pydantic_settings import BaseSettings, SettingsConfigDict
from   typing            import Any, Dict, Optional


from   schema            import *
from   utils             import error_print, log_print


DEFAULT_CONFIG_FILE : str = os.path.join(os.path.dirname(os.path.abspath(__file__)), "config.json")


class SolverSettings(BaseSettings):
	model_config = SettingsConfigDict(env_prefix=DEFAULT_ENV_PREFIX, env_file=".env", extra="ignore")

	airy_backend      : AiryBackendType = AiryBackendType(DEFAULT_AIRY_BACKEND)
	airy_zero_tol     : float           = DEFAULT_AIRY_ZERO_TOL
	airy_series_pos   : float           = DEFAULT_AIRY_SERIES_POS
	airy_series_neg   : float           = DEFAULT_AIRY_SERIES_NEG

	pole_tol          : float           = DEFAULT_POLE_TOL
	root_xtol         : float           = DEFAULT_ROOT_XTOL
	root_rtol         : float           = DEFAULT_ROOT_RTOL
	root_maxiter      : int             = DEFAULT_ROOT_MAXITER
	branch_samples    : int             = DEFAULT_BRANCH_SAMPLES
	scan_step         : float           = DEFAULT_SCAN_STEP

	series_trunc      : int             = DEFAULT_SERIES_TRUNC
	series_tail       : bool            = DEFAULT_SERIES_TAIL
	kernel_form       : KernelForm      = KernelForm(DEFAULT_KERNEL_FORM)
	design_kernel     : KernelForm      = KernelForm(DEFAULT_DESIGN_KERNEL_FORM)
	degeneracy_tol    : float           = DEFAULT_DEGENERACY_TOL

	inverse_x0_max    : float           = DEFAULT_INVERSE_X0_MAX
	inverse_max_sol   : int             = DEFAULT_INVERSE_MAX_SOLUTIONS

	oracle_half_width : float           = DEFAULT_ORACLE_HALF_WIDTH
	oracle_step       : float           = DEFAULT_ORACLE_STEP
	oracle_levels     : int             = DEFAULT_ORACLE_LEVELS
	verify_threshold  : float           = DEFAULT_VERIFY_THRESHOLD

	float_digits      : int             = DEFAULT_FLOAT_DIGITS
	output_format     : OutputFormat    = OutputFormat(DEFAULT_OUTPUT_FORMAT)
	max_workers       : int             = DEFAULT_MAX_WORKERS

	@field_validator("branch_samples", "root_maxiter", "series_trunc", "oracle_levels", "max_workers", "float_digits")
	@classmethod
	def _positive_int(cls, value: int, info) -> int:
		if value < 1:
			raise ValueError(f"{info.field_name} must be positive, got {value}")
		return value

	@field_validator("airy_zero_tol", "pole_tol", "root_xtol", "root_rtol", "scan_step", "verify_threshold", "oracle_step")
	@classmethod
	def _positive_float(cls, value: float, info) -> float:
		if not (value > 0.0):
			raise ValueError(f"{info.field_name} must be positive, got {value}")
		return value


def load_config(file_path: str) -> Optional[AppConfig]:
	try:
		with open(file_path, "r") as f:
			data = json.load(f)
		config = AppConfig(**data)
		return config
	except Exception as e:
		error_print(f"Error loading config: {e}")
		return None


def settings_from_config(config: Optional[AppConfig], overrides: Optional[Dict[str, Any]] = None) -> SolverSettings:
	"""Environment < config file < explicit overrides"""
	values = {}
	if config is not None:
		values.update(config.settings)
	if overrides:
		values.update({key: value for key, value in overrides.items() if value is not None})
	settings = SolverSettings(**values)
	return settings


_settings      : Optional[SolverSettings] = None
_settings_lock : threading.Lock           = threading.Lock()


def get_settings() -> SolverSettings:
	global _settings
	with _settings_lock:
		if _settings is None:
			_settings = SolverSettings()
		return _settings


def set_settings(settings: SolverSettings) -> SolverSettings:
	global _settings
	with _settings_lock:
		previous  = _settings
		_settings = settings
	if previous is None or previous.airy_backend != settings.airy_backend:
		log_print(f"airy backend: {settings.airy_backend.value}")
	return settings


def reset_settings() -> None:
	global _settings
	with _settings_lock:
		_settings = None
