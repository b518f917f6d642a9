# test_utils

import io
import json
import math


import numpy  as np
import pandas as pd
import pytest


from   schema   import OutputFormat
from   utils    import *


def test_parse_range():
	np.testing.assert_allclose(parse_range("0.25:1:0.25"), [0.25, 0.5, 0.75, 1.0])
	assert len(parse_range("-3:8:0.02")) == 551
	assert parse_range("-3:8:0.02")[-1] == pytest.approx(8.0, abs=1e-12)
	np.testing.assert_allclose(parse_range("1.2557"), [1.2557])
	np.testing.assert_allclose(parse_range("0:3:3"), [0.0, 3.0])


def test_parse_value_list():
	np.testing.assert_allclose(parse_range("0.05,0.2,0.5"), [0.05, 0.2, 0.5])
	np.testing.assert_allclose(parse_range("-1, 0:1:0.5"), [-1.0, 0.0, 0.5, 1.0])


@pytest.mark.parametrize("text", ["1:2", "1:0:0.1", "0:1:0", "0:1:-1", "nan", "a:b:c", "0:inf:1", ",", "0.1,x"])
def test_parse_range_rejects(text):
	with pytest.raises(ValueError):
		parse_range(text)


def test_csv_table_has_header_and_nan_literal(tmp_path):
	out     = tmp_path / "table.csv"
	records = [{"E": 0.1, "lambda": 1.0 / 3.0}, {"E": 0.2, "lambda": float("nan")}]
	text    = write_table(records, {"tool": "conic-spectra"}, OutputFormat.CSV, str(out), digits=6)
	assert out.read_text() == text
	lines = text.splitlines()
	assert lines[0] == '# tool="conic-spectra"'
	assert lines[1] == "E,lambda"
	assert lines[2] == "0.1,0.333333"
	assert lines[3] == "0.2,NaN"
	frame = pd.read_csv(io.StringIO(text), comment="#")
	assert math.isnan(frame["lambda"][1])


def test_json_table_maps_nan_to_null(capsys):
	write_table([{"E": 0.5, "level": 1}, {"E": float("inf"), "level": 2}], {"command": "sweep"}, OutputFormat.JSON)
	data = json.loads(capsys.readouterr().out)
	assert data["header"] == {"command": "sweep"}
	assert data["records"][0] == {"E": 0.5, "level": 1}
	assert data["records"][1]["E"] is None


def test_column_order_is_respected():
	text = write_table([{"b": 1, "a": 2}], {}, columns=["a", "b"], out=None)
	assert text.splitlines()[1] == "a,b"


def test_serialize_result():
	assert serialize_result(np.float64(1.5)) == 1.5
	assert serialize_result(np.int64(3)) == 3
	assert serialize_result(float("nan")) is None
	assert serialize_result(object()).startswith("<object")


def test_log_print_respects_verbose(capsys):
	log_print("hidden")
	assert capsys.readouterr().err == ""
	log_print("forced", force=True)
	assert "forced" in capsys.readouterr().err
	set_verbose(True)
	assert is_verbose()
	log_print("shown")
	captured = capsys.readouterr()
	assert "shown" in captured.err and captured.out == ""
