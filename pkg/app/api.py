# api

import asyncio
import math
import uuid


import numpy as np


from   scipy.optimize         import brentq
from   typing                 import Any, Awaitable, Callable, Dict, List, Optional, Sequence, Tuple


from   airy                   import airy_value, zero_table
from   core                   import SolverSettings, get_settings
from   delta_deltaprime_local import local_spectrum
from   delta_model            import compatible_pairs, delta_spectrum, inverse_design, lambda_curve, lambda_of_energy
from   deltaprime_nonlocal    import inverse_beta_series, nonlocal_branch_energy, nonlocal_spectrum
from   engine                 import SweepEngine
from   event_bus              import EventBus, EventType
from   fd_oracle              import fd_delta, fd_local_ddp
from   schema                 import *
from   solvers                import SolverExecutionContext, create_solver
from   spectrum_core          import even_energies, green_kernel, kernel_series_grid, odd_energies
from   utils                  import error_print, log_print, parse_range, write_table


TARGET_MODELS : Dict[str, str] = {
	"delta"       : "delta",
	"nonlocal-dp" : "nonlocal_dp",
	"nonlocal_dp" : "nonlocal_dp",
	"local-ddp"   : "local_ddp",
	"local_ddp"   : "local_ddp",
}


SWEEP_DEFAULT_RANGES : Dict[str, Dict[str, str]] = {
	"fig1" : {"E"     : "-3:3:0.005" , "x0" : "0"               },
	"fig2" : {"lam"   : "-3:8:0.02"                            },
	"fig3" : {"E"     : "-3:3:0.005" , "x0" : "0.5"             },
	"fig4" : {"lam"   : "-3:8:0.02"  , "x0" : "0.05,0.2,0.5"    },
	"fig6" : {"E1"    : "0.3333"     , "E2" : "0:3:3"           },
	"fig8" : {"beta"  : "-2:6:0.01"                            },
	"fig9" : {"b"     : "-3:3:0.05"                            },
}


class CommandContext:
	def __init__(self, event_bus: EventBus, engine: SweepEngine, settings: SolverSettings, run_id: Optional[str] = None):
		self.event_bus : EventBus       = event_bus
		self.engine    : SweepEngine    = engine
		self.settings  : SolverSettings = settings
		self.run_id    : str            = run_id or str(uuid.uuid4())


CommandHandler = Callable[[RunConfig, CommandContext], Awaitable[ExitCode]]


COMMANDS : Dict[str, CommandHandler] = {}


def command(name: str):
	def register(handler: CommandHandler) -> CommandHandler:
		COMMANDS[name] = handler
		return handler
	return register


# ========================================================================
# HELPERS
# ========================================================================

def _range_echo(ranges: Dict[str, List[float]]) -> Dict[str, Any]:
	res = {
		name: {"start": values[0], "stop": values[-1], "count": len(values)}
		for name, values in sorted(ranges.items())
	}
	return res


def make_header(config: RunConfig, settings: SolverSettings, **extra) -> Dict[str, Any]:
	"""Tool version, config echo and tolerances; no timestamps so reruns are byte-identical"""
	echo = config.model_dump(mode="json", exclude={"type", "ranges", "out", "format"})
	echo["ranges"] = _range_echo(config.ranges)
	header = {
		"tool"       : DEFAULT_APP_NAME,
		"version"    : DEFAULT_APP_VERSION,
		"config"     : echo,
		"tolerances" : {
			"airy_zero_tol"  : settings.airy_zero_tol,
			"pole_tol"       : settings.pole_tol,
			"root_xtol"      : settings.root_xtol,
			"root_rtol"      : settings.root_rtol,
			"degeneracy_tol" : settings.degeneracy_tol,
		},
		"airy_backend" : settings.airy_backend.value,
	}
	header.update(extra)
	return header


def _emit_table(config: RunConfig, ctx: CommandContext, records: List[Dict[str, Any]], columns: Sequence[str], **extra) -> str:
	header = make_header(config, ctx.settings, **extra)
	text   = write_table(records, header, config.format, config.out, columns, ctx.settings.float_digits)
	log_print(f"{config.command}: {len(records)} rows written to {config.out or 'stdout'}")
	return text


def _target_model(target: Optional[str]) -> str:
	model = TARGET_MODELS.get(str(target))
	if model is None:
		raise ValueError(f"unknown model '{target}', expected one of: delta, nonlocal-dp, local-ddp")
	return model


def _require(params: Dict[str, Any], name: str) -> float:
	if params.get(name) is None:
		raise ValueError(f"missing required parameter '{name}'")
	return float(params[name])


def model_params(config: RunConfig, settings: SolverSettings) -> BaseType:
	model  = _target_model(config.target)
	params = config.params
	if model == "delta":
		kernel = config.kernel or settings.kernel_form
		return DeltaParams(lam=params.get("lam", 0.0), x0=params.get("x0", 0.0), kernel=kernel)
	if model == "nonlocal_dp":
		return NonlocalParams(beta=params.get("beta", 0.0))
	return LocalDDPParams(a=params.get("a", 0.0), b=params.get("b", 0.0))


def _param_values(params: BaseType) -> Dict[str, Any]:
	values = params.model_dump(mode="json", exclude={"type", "kernel"})
	return values


def _sweep_range(config: RunConfig, mode: str, name: str) -> np.ndarray:
	if name in config.ranges:
		return np.asarray(config.ranges[name], dtype=float)
	return parse_range(SWEEP_DEFAULT_RANGES[mode][name])


def _level_columns(k: int) -> List[str]:
	return [f"E{n}" for n in range(1, k + 1)]


def _level_row(prefix: Dict[str, Any], energies: Sequence[float], k: int) -> Dict[str, Any]:
	row = dict(prefix)
	for n in range(1, k + 1):
		row[f"E{n}"] = float(energies[n - 1]) if n <= len(energies) else math.nan
	return row


# ========================================================================
# SPECTRUM
# ========================================================================

@command("spectrum")
async def cmd_spectrum(config: RunConfig, ctx: CommandContext) -> ExitCode:
	params  = model_params(config, ctx.settings)
	solver  = create_solver(params)
	context = SolverExecutionContext(params, config.k)
	result  = await solver.execute(context)

	if not result.success:
		error_print(f"spectrum: {result.error}")
		await ctx.event_bus.emit(EventType.SOLVE_FAILED, run_id=ctx.run_id, solver=solver.model, error=result.error)
		return ExitCode.SOLVER

	spectrum = result.spectrum
	await ctx.event_bus.emit(EventType.SOLVE_COMPLETED, run_id=ctx.run_id, solver=solver.model, data={"levels": len(spectrum.levels)})

	values  = _param_values(params)
	columns = ["model", *values.keys(), "level", "energy", "parity", "origin", "branch", "residual", "degenerate"]
	records = [
		{
			"model"      : spectrum.model,
			**values,
			"level"      : level.index,
			"energy"     : level.energy,
			"parity"     : level.parity.value,
			"origin"     : level.origin.value,
			"branch"     : level.branch,
			"residual"   : level.residual,
			"degenerate" : level.degenerate,
		}
		for level in spectrum.levels
	]
	_emit_table(config, ctx, records, columns)
	return ExitCode.OK


# ========================================================================
# SWEEPS
# ========================================================================

SweepPlan = Tuple[List[Any], Callable[[Any], List[Dict[str, Any]]], Callable[[Any], List[Dict[str, Any]]], List[str]]


def _plan_lambda_curve(config: RunConfig, settings: SolverSettings, mode: str) -> SweepPlan:
	energies = _sweep_range(config, mode, "E")
	points   = [float(x0) for x0 in _sweep_range(config, mode, "x0")]
	kernel   = config.kernel or settings.design_kernel
	target   = config.params.get("lam")
	columns  = ["x0", "E", "lambda"] + (["target"] if target is not None else [])

	def evaluate(x0: float) -> List[Dict[str, Any]]:
		curve = lambda_curve(energies, x0, kernel)
		rows  = [{"x0": x0, "E": float(E), "lambda": float(v)} for E, v in zip(energies, curve)]
		if target is not None:
			for row in rows:
				row["target"] = float(target)
		return rows

	def blank(x0: float) -> List[Dict[str, Any]]:
		return [{"x0": x0, "E": float(E), "lambda": math.nan} for E in energies]

	return points, evaluate, blank, columns


def _plan_delta_levels(config: RunConfig, settings: SolverSettings, mode: str) -> SweepPlan:
	lambdas = _sweep_range(config, mode, "lam")
	if mode == "fig2":
		x0_values = [float(config.params.get("x0", 0.0))]
	else:
		x0_values = [float(x0) for x0 in _sweep_range(config, mode, "x0")]
	kernel  = config.kernel or settings.kernel_form
	k       = config.k
	points  = [(x0, float(lam)) for x0 in x0_values for lam in lambdas]
	columns = ["x0", "lambda", *_level_columns(k)]

	def evaluate(point: Tuple[float, float]) -> List[Dict[str, Any]]:
		x0, lam = point
		result  = delta_spectrum(DeltaParams(lam=lam, x0=x0, kernel=kernel), k)
		return [_level_row({"x0": x0, "lambda": lam}, result.energies(), k)]

	def blank(point: Tuple[float, float]) -> List[Dict[str, Any]]:
		return [_level_row({"x0": point[0], "lambda": point[1]}, [], k)]

	return points, evaluate, blank, columns


def _plan_compatible_pairs(config: RunConfig, settings: SolverSettings, mode: str) -> SweepPlan:
	x0      = float(config.params.get("x0", 1.2557))
	window  = _sweep_range(config, mode, "E2")
	E2_lo   = float(np.min(window))
	E2_hi   = float(np.max(window))
	kernel  = config.kernel or settings.design_kernel
	points  = [float(E1) for E1 in _sweep_range(config, mode, "E1")]
	columns = ["x0", "E1", "E2", "lambda"]

	def evaluate(E1: float) -> List[Dict[str, Any]]:
		lam  = lambda_of_energy(E1, x0, kernel)
		rows = [{"x0": x0, "E1": E1, "E2": E2, "lambda": lam} for E2 in compatible_pairs(x0, E1, (E2_lo, E2_hi), kernel)]
		return rows

	def blank(E1: float) -> List[Dict[str, Any]]:
		return [{"x0": x0, "E1": E1, "E2": math.nan, "lambda": math.nan}]

	return points, evaluate, blank, columns


def _plan_nonlocal_levels(config: RunConfig, settings: SolverSettings, mode: str) -> SweepPlan:
	"""One column per curve: invariant{j} is E_{2j-1}, branch{j} follows E_2j(beta) through the crossings"""
	pairs      = (config.k + 1) // 2
	points     = [float(beta) for beta in _sweep_range(config, mode, "beta")]
	invariants = [float(E) for E in odd_energies(pairs)]
	columns    = ["beta"]
	for j in range(1, pairs + 1):
		columns += [f"invariant{j}", f"branch{j}"]

	def evaluate(beta: float) -> List[Dict[str, Any]]:
		row = {"beta": beta}
		for j in range(1, pairs + 1):
			row[f"invariant{j}"] = invariants[j - 1]
			row[f"branch{j}"]    = nonlocal_branch_energy(beta, j)
		return [row]

	def blank(beta: float) -> List[Dict[str, Any]]:
		return [{name: (beta if name == "beta" else math.nan) for name in columns}]

	return points, evaluate, blank, columns


def _plan_local_levels(config: RunConfig, settings: SolverSettings, mode: str) -> SweepPlan:
	a       = float(config.params.get("a", 1.0))
	k       = config.k
	points  = [float(b) for b in _sweep_range(config, mode, "b")]
	columns = ["a", "b", *_level_columns(k)]

	def evaluate(b: float) -> List[Dict[str, Any]]:
		result = local_spectrum(LocalDDPParams(a=a, b=b), k)
		return [_level_row({"a": a, "b": b}, result.energies(), k)]

	def blank(b: float) -> List[Dict[str, Any]]:
		return [_level_row({"a": a, "b": b}, [], k)]

	return points, evaluate, blank, columns


SWEEP_PLANS : Dict[str, Callable[[RunConfig, SolverSettings, str], SweepPlan]] = {
	"fig1" : _plan_lambda_curve,
	"fig2" : _plan_delta_levels,
	"fig3" : _plan_lambda_curve,
	"fig4" : _plan_delta_levels,
	"fig6" : _plan_compatible_pairs,
	"fig8" : _plan_nonlocal_levels,
	"fig9" : _plan_local_levels,
}


@command("sweep")
async def cmd_sweep(config: RunConfig, ctx: CommandContext) -> ExitCode:
	mode = str(config.target)
	plan = SWEEP_PLANS.get(mode)
	if plan is None:
		raise ValueError(f"unknown sweep mode '{mode}', expected one of: {', '.join(SWEEP_PLANS)}")

	points, evaluate, blank, columns = plan(config, ctx.settings, mode)
	results = await ctx.engine.run(points, evaluate, run_id=ctx.run_id)

	records = []
	failed  = 0
	for point, result in zip(points, results):
		if result.error is not None:
			failed += 1
			log_print(f"sweep {mode}: point {result.index} failed: {result.error}")
			records.extend(blank(point))
		else:
			records.extend(result.outputs)

	_emit_table(config, ctx, records, columns, mode=mode, failed_points=failed)
	if points and failed == len(points):
		error_print(f"sweep {mode}: every point failed")
		return ExitCode.SOLVER
	return ExitCode.OK


# ========================================================================
# INVERSE PROBLEM
# ========================================================================

@command("inverse")
async def cmd_inverse(config: RunConfig, ctx: CommandContext) -> ExitCode:
	E1 = _require(config.params, "E1")
	E2 = _require(config.params, "E2")
	if not (E1 < E2):
		raise ValueError(f"inverse problem needs E1 < E2, got E1 = {E1}, E2 = {E2}")

	if len(config.ranges.get("x0", [])) > 1:
		x0_search = (float(min(config.ranges["x0"])), float(max(config.ranges["x0"])))
	else:
		x0_search = (0.0, ctx.settings.inverse_x0_max)
	max_solutions = int(config.params.get("max_solutions") or ctx.settings.inverse_max_sol)
	kernel        = config.kernel or ctx.settings.design_kernel

	solutions = await asyncio.to_thread(inverse_design, E1, E2, x0_search, max_solutions, kernel)

	columns = ["E1", "E2", "x0", "lambda", "ratio_residual", "lambda_residual"]
	records = [
		{
			"E1"              : E1,
			"E2"              : E2,
			"x0"              : s.x0,
			"lambda"          : s.lam,
			"ratio_residual"  : s.ratio_residual,
			"lambda_residual" : s.lambda_residual,
		}
		for s in solutions
	]
	_emit_table(config, ctx, records, columns)

	if not solutions:
		log_print(f"inverse: no (x0, lambda) on {x0_search} places both {E1} and {E2} in the spectrum", force=True)
		await ctx.event_bus.emit(EventType.WARNING, run_id=ctx.run_id, data={"command": "inverse", "solutions": 0})
		return ExitCode.SOLVER
	return ExitCode.OK


# ========================================================================
# VERIFICATION
# ========================================================================

def _series_level(beta: float, level: EigenLevel, N: int) -> float:
	"""Level of the truncated renormalized equation nearest the analytic one"""
	if level.origin != LevelOrigin.BRANCH:
		return level.energy

	target = 0.0 if math.isinf(beta) else 1.0 / beta
	poles  = even_energies(level.branch)
	right  = float(poles[-1])
	left   = float(poles[-2]) if level.branch > 1 else -math.inf
	gap    = lambda E: inverse_beta_series(E, N).total - target

	E     = level.energy
	width = 1.0e-3
	for _ in range(12):
		lo = max(E - width, left + 1.0e-9)
		hi = min(E + width, right - 1.0e-9)
		if gap(lo) * gap(hi) < 0.0:
			return float(brentq(gap, lo, hi, xtol=get_settings().root_xtol))
		width *= 2.0
	return math.nan


def _oracle_spec(config: RunConfig, settings: SolverSettings, interaction: InteractionType) -> OracleSpec:
	if config.oracle is not None:
		return config.oracle.model_copy(update={"interaction": interaction})
	res = OracleSpec(L=settings.oracle_half_width, h=settings.oracle_step, M=settings.oracle_levels, interaction=interaction)
	return res


def verify_levels(config: RunConfig, settings: SolverSettings) -> Tuple[VerifyReport, Dict[str, Any]]:
	params    = model_params(config, settings)
	threshold = config.tol or settings.verify_threshold

	if isinstance(params, DeltaParams):
		spec     = _oracle_spec(config, settings, InteractionType.DELTA)
		analytic = delta_spectrum(params, spec.M).energies()
		oracle   = fd_delta(spec, params.lam, params.x0)
		mode     = "finite_difference"
		extra    = {"oracle": spec.model_dump(mode="json", exclude={"type"}), "kernel": params.kernel.value}
	elif isinstance(params, LocalDDPParams):
		spec     = _oracle_spec(config, settings, InteractionType.LOCAL_DDP)
		analytic = local_spectrum(params, spec.M).energies()
		oracle   = fd_local_ddp(spec, params.a, params.b)
		mode     = "finite_difference"
		extra    = {"oracle": spec.model_dump(mode="json", exclude={"type"})}
	else:
		# no local stencil exists for the renormalized interaction
		N        = config.trunc or settings.series_trunc
		count    = config.oracle.M if config.oracle is not None else config.k
		levels   = nonlocal_spectrum(params, count).levels
		analytic = [level.energy for level in levels]
		oracle   = [_series_level(params.beta, level, N) for level in levels]
		mode     = "series"
		extra    = {"oracle": {"trunc": N, "tail": settings.series_tail}}

	rows = []
	for n, (e_a, e_o) in enumerate(zip(analytic, oracle), start=1):
		diff = abs(e_a - e_o)
		rows.append(VerifyRow(level=n, analytic=e_a, oracle=e_o, diff=diff, passed=bool(diff <= threshold)))
	report = VerifyReport(model=params.type, mode=mode, threshold=threshold, rows=rows)
	return report, extra


@command("verify")
async def cmd_verify(config: RunConfig, ctx: CommandContext) -> ExitCode:
	report, extra = await asyncio.to_thread(verify_levels, config, ctx.settings)

	columns = ["level", "analytic", "oracle", "diff", "passed"]
	records = [row.model_dump(include=set(columns)) for row in report.rows]
	_emit_table(config, ctx, records, columns, mode=report.mode, threshold=report.threshold, **extra)

	if report.mode == "series":
		log_print("verify: nonlocal model checked against its truncated series (no finite-difference stencil)", force=True)

	if not report.passed:
		worst = max(row.diff for row in report.rows) if report.rows else math.nan
		log_print(f"verify: FAILED, worst difference {worst:.3e} above {report.threshold:g}", force=True)
		await ctx.event_bus.emit(EventType.VERIFY_FAILED, run_id=ctx.run_id, solver=report.model, data={"worst": worst})
		return ExitCode.VERIFY

	log_print(f"verify: passed ({len(report.rows)} levels within {report.threshold:g})")
	await ctx.event_bus.emit(EventType.VERIFY_PASSED, run_id=ctx.run_id, solver=report.model, data={"levels": len(report.rows)})
	return ExitCode.OK


# ========================================================================
# KERNEL AND AIRY TABLES
# ========================================================================

@command("green")
async def cmd_green(config: RunConfig, ctx: CommandContext) -> ExitCode:
	x      = np.asarray(config.ranges.get("x", [0.0]), dtype=float)
	y      = np.asarray(config.ranges.get("y", [0.0]), dtype=float)
	E      = float(config.params.get("E", 0.0))
	kernel = config.kernel or KernelForm.EXACT

	values  = green_kernel(x[:, np.newaxis], y[np.newaxis, :], E, kernel)
	columns = ["x", "y", "E", "G"]
	series  = None
	if config.trunc is not None:
		series  = kernel_series_grid(x, y, E, config.trunc)
		columns = columns + ["series", "tail", "series_diff"]

	records = []
	for i, xi in enumerate(x):
		for j, yj in enumerate(y):
			row = {"x": float(xi), "y": float(yj), "E": E, "G": float(values[i, j])}
			if series is not None:
				partial, tails = series
				row["series"]      = float(partial[i, j])
				row["tail"]        = float(tails[i, j])
				row["series_diff"] = abs(float(partial[i, j] + tails[i, j]) - row["G"])
			records.append(row)

	_emit_table(config, ctx, records, columns, kernel=kernel.value)
	return ExitCode.OK


@command("airy")
async def cmd_airy(config: RunConfig, ctx: CommandContext) -> ExitCode:
	count = config.params.get("zeros")
	if count is not None:
		table   = zero_table(int(count))
		columns = ["n", "ai_zero", "aip_zero"]
		records = [
			{"n": n, "ai_zero": a, "aip_zero": ap}
			for n, (a, ap) in enumerate(zip(table.ai_zeros, table.aip_zeros), start=1)
		][:int(count)]
	else:
		grid    = config.ranges.get("x") or parse_range("-10:10:0.5").tolist()
		columns = ["x", "ai", "aip", "underflow"]
		records = [airy_value(float(x)).model_dump(include=set(columns)) for x in grid]

	_emit_table(config, ctx, records, columns)
	return ExitCode.OK


# ========================================================================
# DISPATCH
# ========================================================================

async def run_command(config: RunConfig, event_bus: EventBus, settings: Optional[SolverSettings] = None) -> ExitCode:
	settings = settings or get_settings()
	engine   = SweepEngine(event_bus, settings.max_workers)
	ctx      = CommandContext(event_bus, engine, settings)
	handler  = COMMANDS.get(config.command)
	if handler is None:
		error_print(f"unknown command '{config.command}'")
		return ExitCode.USAGE

	await event_bus.emit(EventType.COMMAND_STARTED, run_id=ctx.run_id, data={"command": config.command, "target": config.target})
	try:
		code = await handler(config, ctx)
	except SpectralError as e:
		error_print(f"{config.command}: {type(e).__name__}: {e}")
		code = ExitCode.SOLVER
	except ValueError as e:
		error_print(f"{config.command}: {e}")
		code = ExitCode.USAGE

	event_type = EventType.COMMAND_COMPLETED if code == ExitCode.OK else EventType.COMMAND_FAILED
	await event_bus.emit(event_type, run_id=ctx.run_id, data={"command": config.command, "exit_code": int(code)})
	return code
