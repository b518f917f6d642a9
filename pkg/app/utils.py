# utils

import json
import math
import sys


import numpy  as np
import pandas as pd


from   datetime import datetime, timezone
from   typing   import Any, Dict, List, Optional, Sequence


from   schema   import DEFAULT_FLOAT_DIGITS, OutputFormat


_verbose : bool = False


def get_now() -> datetime:
	now = datetime.now(timezone.utc)
	return now


def get_now_str() -> str:
	now = get_now()
	res = now.strftime("%Y-%m-%d--%H:%M:%S")
	return res


def set_verbose(value: bool) -> None:
	global _verbose
	_verbose = bool(value)


def is_verbose() -> bool:
	return _verbose


def log_print(*args, **kwargs) -> None:
	# stdout carries the result table, diagnostics go to stderr
	force = kwargs.pop("force", False)
	if not (_verbose or force):
		return
	ts = get_now_str()
	print(f"[log {ts}]", *args, file=sys.stderr, **kwargs)


def error_print(*args) -> None:
	ts = get_now_str()
	print(f"[error {ts}]", *args, file=sys.stderr)


def parse_range(text: str) -> np.ndarray:
	"""Parse 'start:stop:step' (inclusive), a comma list of those, or a single number"""
	text  = str(text).strip()
	if "," in text:
		items = [item for item in text.split(",") if item.strip()]
		if not items:
			raise ValueError(f"empty value list '{text}'")
		return np.concatenate([parse_range(item) for item in items])
	parts = text.split(":")
	if len(parts) == 1:
		value = float(parts[0])
		if math.isnan(value):
			raise ValueError(f"invalid value '{text}'")
		return np.array([value])
	if len(parts) != 3:
		raise ValueError(f"range must be 'start:stop:step', got '{text}'")

	start, stop, step = (float(p) for p in parts)
	if not all(math.isfinite(v) for v in (start, stop, step)):
		raise ValueError(f"range bounds must be finite, got '{text}'")
	if step <= 0.0:
		raise ValueError(f"range step must be positive, got '{text}'")
	if stop < start:
		raise ValueError(f"range stop precedes start in '{text}'")

	count = int(math.floor((stop - start) / step + 1.0e-9)) + 1
	res   = np.linspace(start, start + (count - 1) * step, count)
	return res


def serialize_result(result: Any) -> Any:
	if result is None:
		return None
	if isinstance(result, (np.floating, np.integer)):
		result = result.item()
	if isinstance(result, float) and not math.isfinite(result):
		return None
	try:
		json.dumps(result, allow_nan=False)
		return result
	except (TypeError, ValueError):
		return str(result)


def format_header(header: Dict[str, Any]) -> str:
	parts = [f"{key}={json.dumps(value, sort_keys=True, default=str)}" for key, value in header.items()]
	res   = "# " + " ".join(parts)
	return res


def write_table(
	records : List[Dict[str, Any]],
	header  : Dict[str, Any],
	fmt     : OutputFormat            = OutputFormat.CSV,
	out     : Optional[str]           = None,
	columns : Optional[Sequence[str]] = None,
	digits  : int                     = DEFAULT_FLOAT_DIGITS,
) -> str:
	"""Render records as CSV or JSON and write them to `out` or stdout"""
	frame = pd.DataFrame.from_records(records, columns=list(columns) if columns else None)

	if OutputFormat(fmt) == OutputFormat.JSON:
		rows = [
			{key: serialize_result(value) for key, value in row.items()}
			for row in frame.to_dict(orient="records")
		]
		text = json.dumps({"header": header, "records": rows}, indent=2, sort_keys=False) + "\n"
	else:
		body = frame.to_csv(index=False, float_format=f"%.{digits}g", na_rep="NaN", lineterminator="\n")
		text = format_header(header) + "\n" + body

	if out:
		with open(out, "w") as f:
			f.write(text)
	else:
		sys.stdout.write(text)
		sys.stdout.flush()

	return text
