# schema

from __future__ import annotations


import math


from enum       import Enum
from pydantic   import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing     import Annotated, Any, Dict, List, Literal, Optional, Tuple


# ========================================================================
# DEFAULTS
# ========================================================================

DEFAULT_APP_NAME              : str   = "conic-spectra"
DEFAULT_APP_VERSION           : str   = "1.0.0"
DEFAULT_ENV_PREFIX            : str   = "CONIC_"

DEFAULT_AIRY_BACKEND          : str   = "scipy"
DEFAULT_AIRY_TABLE_SIZE       : int   = 64
DEFAULT_AIRY_ZERO_TOL         : float = 1.0e-10
DEFAULT_AIRY_SERIES_POS       : float = 6.0
DEFAULT_AIRY_SERIES_NEG       : float = 7.0

DEFAULT_POLE_TOL              : float = 1.0e-12
DEFAULT_ROOT_XTOL             : float = 1.0e-14
DEFAULT_ROOT_RTOL             : float = 1.0e-15
DEFAULT_ROOT_MAXITER          : int   = 200
DEFAULT_BRANCH_SAMPLES        : int   = 64
DEFAULT_SCAN_STEP             : float = 1.0e-3

DEFAULT_SERIES_TRUNC          : int   = 1000
DEFAULT_SERIES_TAIL           : bool  = True
DEFAULT_KERNEL_FORM           : str   = "exact"
DEFAULT_DESIGN_KERNEL_FORM    : str   = "closed_form"
DEFAULT_LEVEL_COUNT           : int   = 5
DEFAULT_DEGENERACY_TOL        : float = 1.0e-6

DEFAULT_INVERSE_X0_MAX        : float = 5.0
DEFAULT_INVERSE_MAX_SOLUTIONS : int   = 20

DEFAULT_ORACLE_HALF_WIDTH     : float = 20.0
DEFAULT_ORACLE_STEP           : float = 1.0e-3
DEFAULT_ORACLE_LEVELS         : int   = 5
DEFAULT_ORACLE_MIN_HALF_WIDTH : float = 15.0
DEFAULT_ORACLE_MAX_STEP       : float = 1.0e-2
DEFAULT_VERIFY_THRESHOLD      : float = 1.0e-2

DEFAULT_FLOAT_DIGITS          : int   = 12
DEFAULT_OUTPUT_FORMAT         : str   = "csv"
DEFAULT_MAX_WORKERS           : int   = 4


# ========================================================================
# ENUMS
# ========================================================================

class FieldRole(str, Enum):
	ANNOTATION = "annotation"
	CONSTANT   = "constant"
	INPUT      = "input"
	OUTPUT     = "output"


class Parity(str, Enum):
	SYMMETRIC     = "symmetric"
	ANTISYMMETRIC = "antisymmetric"


class LevelOrigin(str, Enum):
	"""Where a perturbed level comes from"""
	UNPERTURBED = "unperturbed"
	INVARIANT   = "invariant"
	BRANCH      = "branch"


class KernelForm(str, Enum):
	CLOSED_FORM = "closed_form"
	EXACT       = "exact"


class AiryBackendType(str, Enum):
	SCIPY  = "scipy"
	SERIES = "series"


class InteractionType(str, Enum):
	NONE      = "none"
	DELTA     = "delta"
	LOCAL_DDP = "local_ddp"


class OutputFormat(str, Enum):
	CSV  = "csv"
	JSON = "json"


class ExitCode(int, Enum):
	OK       = 0
	USAGE    = 1
	SOLVER   = 2
	VERIFY   = 3


# ========================================================================
# ERRORS
# ========================================================================

class SpectralError(ValueError):
	pass


class PoleError(SpectralError):
	def __init__(self, message: str, at: Optional[float] = None):
		super().__init__(message)
		self.at = at


class ConvergenceError(SpectralError):
	def __init__(self, message: str, bracket: Optional[Tuple[float, float]] = None):
		super().__init__(message)
		self.bracket = bracket


class BranchExhaustedError(SpectralError):
	pass


class AiryError(SpectralError):
	pass


class OracleError(SpectralError):
	pass


def _require_finite(value: float, name: str) -> float:
	if not math.isfinite(value):
		raise ValueError(f"{name} must be finite, got {value}")
	return value


# ========================================================================
# BASE TYPE
# ========================================================================

class BaseType(BaseModel):
	type : Annotated[Literal["base_type"], FieldRole.CONSTANT] = "base_type"


# ========================================================================
# AIRY
# ========================================================================

class AiryValue(BaseType):
	type      : Annotated[Literal["airy_value"], FieldRole.CONSTANT] = "airy_value"
	x         : Annotated[float                , FieldRole.INPUT   ] = 0.0
	ai        : Annotated[float                , FieldRole.OUTPUT  ] = 0.0
	aip       : Annotated[float                , FieldRole.OUTPUT  ] = 0.0
	underflow : Annotated[bool                 , FieldRole.OUTPUT  ] = False


class AiryZeroTable(BaseType):
	model_config = ConfigDict(frozen=True)

	type      : Annotated[Literal["airy_zero_table"], FieldRole.CONSTANT] = "airy_zero_table"
	backend   : Annotated[AiryBackendType           , FieldRole.INPUT   ] = AiryBackendType.SCIPY
	ai_zeros  : Annotated[Tuple[float, ...]         , FieldRole.OUTPUT  ] = ()
	aip_zeros : Annotated[Tuple[float, ...]         , FieldRole.OUTPUT  ] = ()

	@property
	def size(self) -> int:
		return min(len(self.ai_zeros), len(self.aip_zeros))


# ========================================================================
# UNPERTURBED OPERATOR
# ========================================================================

class UnperturbedLevel(BaseType):
	type      : Annotated[Literal["unperturbed_level"], FieldRole.CONSTANT] = "unperturbed_level"
	index     : Annotated[int                         , FieldRole.INPUT   ] = 1
	energy    : Annotated[float                       , FieldRole.OUTPUT  ] = 0.0
	parity    : Annotated[Parity                      , FieldRole.OUTPUT  ] = Parity.SYMMETRIC
	airy_zero : Annotated[float                       , FieldRole.OUTPUT  ] = 0.0


class SeriesSum(BaseType):
	type    : Annotated[Literal["series_sum"], FieldRole.CONSTANT] = "series_sum"
	terms   : Annotated[int                  , FieldRole.INPUT   ] = 0
	partial : Annotated[float                , FieldRole.OUTPUT  ] = 0.0
	tail    : Annotated[float                , FieldRole.OUTPUT  ] = 0.0

	@property
	def total(self) -> float:
		return self.partial + self.tail


class GreenEval(BaseType):
	type   : Annotated[Literal["green_eval"], FieldRole.CONSTANT  ] = "green_eval"
	x      : Annotated[float                , FieldRole.INPUT     ] = 0.0
	y      : Annotated[float                , FieldRole.INPUT     ] = 0.0
	E      : Annotated[float                , FieldRole.INPUT     ] = 0.0
	kernel : Annotated[KernelForm           , FieldRole.ANNOTATION] = KernelForm.EXACT
	value  : Annotated[float                , FieldRole.OUTPUT    ] = 0.0


# ========================================================================
# MODEL PARAMETERS
# ========================================================================

class DeltaParams(BaseType):
	type   : Annotated[Literal["delta"], FieldRole.CONSTANT  ] = "delta"
	lam    : Annotated[float           , FieldRole.INPUT     ] = 0.0
	x0     : Annotated[float           , FieldRole.INPUT     ] = 0.0
	kernel : Annotated[KernelForm      , FieldRole.ANNOTATION] = KernelForm(DEFAULT_KERNEL_FORM)

	@field_validator("lam", "x0")
	@classmethod
	def _finite(cls, value: float, info) -> float:
		return _require_finite(value, info.field_name)


class NonlocalParams(BaseType):
	type : Annotated[Literal["nonlocal_dp"], FieldRole.CONSTANT] = "nonlocal_dp"
	beta : Annotated[float                 , FieldRole.INPUT   ] = 0.0

	@field_validator("beta")
	@classmethod
	def _not_nan(cls, value: float) -> float:
		# infinite beta is the 1/beta = 0 limit
		if math.isnan(value):
			raise ValueError("beta must not be NaN")
		return value


class LocalDDPParams(BaseType):
	type : Annotated[Literal["local_ddp"], FieldRole.CONSTANT] = "local_ddp"
	a    : Annotated[float               , FieldRole.INPUT   ] = 0.0
	b    : Annotated[float               , FieldRole.INPUT   ] = 0.0

	@field_validator("a", "b")
	@classmethod
	def _finite(cls, value: float, info) -> float:
		return _require_finite(value, info.field_name)

	@model_validator(mode="after")
	def _regular_matching(self) -> "LocalDDPParams":
		if abs(abs(self.b) - 1.0) < 1.0e-12:
			raise ValueError(f"|b| = 1 makes the matching matrix singular (b = {self.b})")
		return self


# ========================================================================
# RESULTS
# ========================================================================

class EigenLevel(BaseType):
	type       : Annotated[Literal["eigen_level"], FieldRole.CONSTANT] = "eigen_level"
	index      : Annotated[int                   , FieldRole.OUTPUT  ] = 1
	energy     : Annotated[float                 , FieldRole.OUTPUT  ] = 0.0
	parity     : Annotated[Parity                , FieldRole.OUTPUT  ] = Parity.SYMMETRIC
	origin     : Annotated[LevelOrigin           , FieldRole.OUTPUT  ] = LevelOrigin.BRANCH
	branch     : Annotated[Optional[int]         , FieldRole.OUTPUT  ] = None
	residual   : Annotated[float                 , FieldRole.OUTPUT  ] = 0.0
	degenerate : Annotated[bool                  , FieldRole.OUTPUT  ] = False


class EigenResult(BaseType):
	type   : Annotated[Literal["eigen_result"], FieldRole.CONSTANT] = "eigen_result"
	model  : Annotated[str                    , FieldRole.INPUT   ] = ""
	params : Annotated[Dict[str, Any]         , FieldRole.INPUT   ] = Field(default_factory=dict)
	levels : Annotated[List[EigenLevel]       , FieldRole.OUTPUT  ] = Field(default_factory=list)

	def energies(self) -> List[float]:
		return [level.energy for level in self.levels]

	def by_parity(self, parity: Parity) -> List[float]:
		return [level.energy for level in self.levels if level.parity == parity]


class BranchSolveResult(BaseType):
	type       : Annotated[Literal["branch_solve"], FieldRole.CONSTANT] = "branch_solve"
	branch     : Annotated[int                    , FieldRole.OUTPUT  ] = 0
	pole_left  : Annotated[float                  , FieldRole.OUTPUT  ] = -math.inf
	pole_right : Annotated[float                  , FieldRole.OUTPUT  ] = math.inf
	energy     : Annotated[float                  , FieldRole.OUTPUT  ] = 0.0
	residual   : Annotated[float                  , FieldRole.OUTPUT  ] = 0.0


class InverseSolution(BaseType):
	type            : Annotated[Literal["inverse_solution"], FieldRole.CONSTANT] = "inverse_solution"
	x0              : Annotated[float                      , FieldRole.OUTPUT  ] = 0.0
	lam             : Annotated[float                      , FieldRole.OUTPUT  ] = 0.0
	ratio_residual  : Annotated[float                      , FieldRole.OUTPUT  ] = 0.0
	lambda_residual : Annotated[float                      , FieldRole.OUTPUT  ] = 0.0


class DefectFunction(BaseType):
	type    : Annotated[Literal["defect_function"], FieldRole.CONSTANT] = "defect_function"
	E       : Annotated[float                     , FieldRole.INPUT   ] = 0.0
	trunc   : Annotated[int                       , FieldRole.INPUT   ] = 1
	x       : Annotated[List[float]               , FieldRole.INPUT   ] = Field(default_factory=list)
	values  : Annotated[List[float]               , FieldRole.OUTPUT  ] = Field(default_factory=list)
	norm_sq : Annotated[float                     , FieldRole.OUTPUT  ] = 0.0


# ========================================================================
# ORACLE
# ========================================================================

class OracleSpec(BaseType):
	type        : Annotated[Literal["oracle_spec"], FieldRole.CONSTANT] = "oracle_spec"
	L           : Annotated[float                 , FieldRole.INPUT   ] = DEFAULT_ORACLE_HALF_WIDTH
	h           : Annotated[float                 , FieldRole.INPUT   ] = DEFAULT_ORACLE_STEP
	M           : Annotated[int                   , FieldRole.INPUT   ] = DEFAULT_ORACLE_LEVELS
	interaction : Annotated[InteractionType       , FieldRole.INPUT   ] = InteractionType.NONE

	@model_validator(mode="after")
	def _valid_grid(self) -> "OracleSpec":
		if self.L < DEFAULT_ORACLE_MIN_HALF_WIDTH:
			raise ValueError(f"half-width L = {self.L} is below {DEFAULT_ORACLE_MIN_HALF_WIDTH}")
		if not (0.0 < self.h <= DEFAULT_ORACLE_MAX_STEP):
			raise ValueError(f"step h = {self.h} must lie in (0, {DEFAULT_ORACLE_MAX_STEP}]")
		if self.M < 1:
			raise ValueError(f"at least one eigenvalue must be requested, got M = {self.M}")
		return self

	@property
	def intervals(self) -> int:
		return int(round(2.0 * self.L / self.h))


class VerifyRow(BaseType):
	type     : Annotated[Literal["verify_row"], FieldRole.CONSTANT] = "verify_row"
	level    : Annotated[int                  , FieldRole.OUTPUT  ] = 1
	analytic : Annotated[float                , FieldRole.OUTPUT  ] = 0.0
	oracle   : Annotated[float                , FieldRole.OUTPUT  ] = 0.0
	diff     : Annotated[float                , FieldRole.OUTPUT  ] = 0.0
	passed   : Annotated[bool                 , FieldRole.OUTPUT  ] = True


class VerifyReport(BaseType):
	type      : Annotated[Literal["verify_report"], FieldRole.CONSTANT] = "verify_report"
	model     : Annotated[str                     , FieldRole.INPUT   ] = ""
	mode      : Annotated[str                     , FieldRole.OUTPUT  ] = "finite_difference"
	threshold : Annotated[float                   , FieldRole.INPUT   ] = DEFAULT_VERIFY_THRESHOLD
	rows      : Annotated[List[VerifyRow]         , FieldRole.OUTPUT  ] = Field(default_factory=list)

	@property
	def passed(self) -> bool:
		return all(row.passed for row in self.rows)


# ========================================================================
# RUN CONFIGURATION
# ========================================================================

class RunConfig(BaseType):
	type    : Annotated[Literal["run_config"]    , FieldRole.CONSTANT  ] = "run_config"
	command : Annotated[str                      , FieldRole.INPUT     ] = ""
	target  : Annotated[Optional[str]            , FieldRole.INPUT     ] = None
	params  : Annotated[Dict[str, Any]           , FieldRole.INPUT     ] = Field(default_factory=dict)
	ranges  : Annotated[Dict[str, List[float]]   , FieldRole.INPUT     ] = Field(default_factory=dict)
	k       : Annotated[int                      , FieldRole.INPUT     ] = DEFAULT_LEVEL_COUNT
	tol     : Annotated[Optional[float]          , FieldRole.INPUT     ] = None
	trunc   : Annotated[Optional[int]            , FieldRole.INPUT     ] = None
	kernel  : Annotated[Optional[KernelForm]     , FieldRole.INPUT     ] = None
	oracle  : Annotated[Optional[OracleSpec]     , FieldRole.INPUT     ] = None
	out     : Annotated[Optional[str]            , FieldRole.ANNOTATION] = None
	format  : Annotated[OutputFormat             , FieldRole.ANNOTATION] = OutputFormat(DEFAULT_OUTPUT_FORMAT)

	@model_validator(mode="after")
	def _valid_run(self) -> "RunConfig":
		if self.k < 1:
			raise ValueError(f"level count must be positive, got {self.k}")
		if self.tol is not None and not (self.tol > 0.0):
			raise ValueError(f"tolerance must be positive, got {self.tol}")
		if self.trunc is not None and self.trunc < 1:
			raise ValueError(f"truncation must be positive, got {self.trunc}")
		for name, values in self.ranges.items():
			if len(values) == 0:
				raise ValueError(f"range '{name}' is empty")
		return self


# ========================================================================
# APPLICATION CONFIG
# ========================================================================

class AppInfo(BaseModel):
	name        : str           = DEFAULT_APP_NAME
	version     : str           = DEFAULT_APP_VERSION
	description : Optional[str] = None


class AppConfig(BaseModel):
	type     : Literal["conic_config"] = "conic_config"
	info     : AppInfo                 = Field(default_factory=AppInfo)
	settings : Dict[str, Any]          = Field(default_factory=dict)
