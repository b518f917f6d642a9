# app

import argparse
import asyncio
import sys


from   dotenv      import load_dotenv
from   typing      import Any, Dict, List, Optional, Sequence


from   api         import SWEEP_PLANS, run_command
from   core        import DEFAULT_CONFIG_FILE, load_config, set_settings, settings_from_config
from   event_bus   import SpectralEvent, get_event_bus
from   schema      import *
from   utils       import error_print, log_print, parse_range, set_verbose


MODEL_CHOICES : List[str] = ["delta", "nonlocal-dp", "local-ddp"]
VALUE_FLAGS   : List[str] = ["lam", "x0", "beta", "a", "b", "E", "E1", "E2", "x", "y"]


class UsageParser(argparse.ArgumentParser):
	"""Reports usage errors with exit code 1"""

	def error(self, message: str):
		self.print_usage(sys.stderr)
		error_print(f"{self.prog}: {message}")
		sys.exit(int(ExitCode.USAGE))


def join_negative_values(argv: Sequence[str]) -> List[str]:
	"""Attach values such as '-3:8:0.02' to their flag so they are not read as options"""
	res = []
	i   = 0
	while i < len(argv):
		token = argv[i]
		if token.startswith("--") and "=" not in token and i + 1 < len(argv):
			value = argv[i + 1]
			if len(value) > 1 and value[0] == "-" and (value[1].isdigit() or value[1] == "."):
				res.append(f"{token}={value}")
				i += 2
				continue
		res.append(token)
		i += 1
	return res


def build_parser() -> argparse.ArgumentParser:
	common = UsageParser(add_help=False)
	common .add_argument("--out"    , type=str  , default=None, help="Output file (default: stdout)"                     )
	common .add_argument("--format" , type=str  , default=None, choices=[f.value for f in OutputFormat], help="Output format")
	common .add_argument("--tol"    , type=float, default=None, help="Verification threshold"                            )
	common .add_argument("--trunc"  , type=int  , default=None, help="Eigen-series truncation N"                         )
	common .add_argument("--kernel" , type=str  , default=None, choices=[k.value for k in KernelForm], help="Kernel form")
	common .add_argument("--backend", type=str  , default=None, choices=[b.value for b in AiryBackendType], help="Airy backend")
	common .add_argument("--config" , type=str  , default=None, help="Configuration file"                                )
	common .add_argument("--verbose", action="store_true"     , help="Log progress and events to stderr"                 )
	common .add_argument("-k"       , type=int  , default=None, help="Number of levels"                                  )

	model = UsageParser(add_help=False)
	model .add_argument("--lambda", dest="lam", type=str, default=None, help="delta coupling (value, start:stop:step or comma list)")
	model .add_argument("--x0"    , type=str  , default=None, help="delta position"                   )
	model .add_argument("--beta"  , type=str  , default=None, help="nonlocal delta-prime coupling"    )
	model .add_argument("--a"     , type=str  , default=None, help="local delta strength"             )
	model .add_argument("--b"     , type=str  , default=None, help="local delta-prime strength"       )

	parser   = UsageParser(description="Spectra of the conic oscillator with point interactions")
	commands = parser.add_subparsers(dest="command", required=True)

	spectrum = commands.add_parser("spectrum", parents=[common, model], help="Lowest k levels of a model")
	spectrum .add_argument("target", choices=MODEL_CHOICES)

	sweep = commands.add_parser("sweep", parents=[common, model], help="Figure datasets")
	sweep .add_argument("target", choices=list(SWEEP_PLANS))
	sweep .add_argument("--E" , type=str, default=None, help="energy range")
	sweep .add_argument("--E1", type=str, default=None, help="reference energy (fig6)")
	sweep .add_argument("--E2", type=str, default=None, help="E2 search window (fig6)")

	inverse = commands.add_parser("inverse", parents=[common], help="Couplings and positions with two prescribed levels")
	inverse .add_argument("--E1"           , type=str, required=True)
	inverse .add_argument("--E2"           , type=str, required=True)
	inverse .add_argument("--x0"           , type=str, default=None, help="x0 search interval as start:stop:step")
	inverse .add_argument("--max-solutions", dest="max_solutions", type=int, default=None)

	verify = commands.add_parser("verify", parents=[common, model], help="Analytic levels against the oracle")
	verify .add_argument("target", choices=MODEL_CHOICES)
	verify .add_argument("--L", type=float, default=None, help="grid half-width")
	verify .add_argument("--h", type=float, default=None, help="grid step")

	green = commands.add_parser("green", parents=[common], help="Resolvent kernel G_0(x, y; E)")
	green .add_argument("--x", type=str, default=None)
	green .add_argument("--y", type=str, default=None)
	green .add_argument("--E", type=str, default=None)

	airy = commands.add_parser("airy", parents=[common], help="Airy values or zeros")
	airy .add_argument("--x"    , type=str, default=None)
	airy .add_argument("--zeros", type=int, default=None)

	return parser


def build_run_config(args: Any, settings: Any) -> RunConfig:
	params : Dict[str, Any]         = {}
	ranges : Dict[str, List[float]] = {}
	for name in VALUE_FLAGS:
		text = getattr(args, name, None)
		if text is None:
			continue
		values = parse_range(text)
		ranges[name] = values.tolist()
		if len(values) == 1:
			params[name] = float(values[0])

	for name in ("zeros", "max_solutions"):
		value = getattr(args, name, None)
		if value is not None:
			params[name] = value

	oracle = None
	if args.command == "verify" and args.target != "nonlocal-dp":
		oracle = OracleSpec(
			L = args.L if args.L is not None else settings.oracle_half_width,
			h = args.h if args.h is not None else settings.oracle_step,
			M = args.k if args.k is not None else settings.oracle_levels,
		)

	config = RunConfig(
		command = args.command,
		target  = getattr(args, "target", None),
		params  = params,
		ranges  = ranges,
		k       = args.k if args.k is not None else DEFAULT_LEVEL_COUNT,
		tol     = args.tol,
		trunc   = args.trunc,
		kernel  = args.kernel,
		oracle  = oracle,
		out     = args.out,
		format  = args.format or settings.output_format,
	)
	return config


def _log_event(event: SpectralEvent):
	detail = event.error or event.data or ""
	point  = f" point={event.point}" if event.point is not None else ""
	log_print(f"event {event.event_type.value}{point} {detail}")


def main(argv: Optional[Sequence[str]] = None) -> int:
	load_dotenv()

	parser = build_parser()
	args   = parser.parse_args(join_negative_values(list(sys.argv[1:] if argv is None else argv)))
	set_verbose(args.verbose)

	try:
		app_config = load_config(args.config or DEFAULT_CONFIG_FILE)
		if args.config and app_config is None:
			return int(ExitCode.USAGE)
		settings = settings_from_config(app_config, {"airy_backend": args.backend, "output_format": args.format})
		set_settings(settings)
		config = build_run_config(args, settings)
	except ValueError as e:
		error_print(f"invalid arguments: {e}")
		return int(ExitCode.USAGE)

	event_bus = get_event_bus()
	if args.verbose:
		event_bus.subscribe_all(_log_event)

	log_print(f"{config.command} {config.target or ''} starting")
	code = asyncio.run(run_command(config, event_bus, settings))
	return int(code)


if __name__ == "__main__":
	sys.exit(main())
