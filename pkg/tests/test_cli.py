import csv
import io
import json
import subprocess
import sys

import gmpy2
import pytest

from toeplitz_spectra import Spectrum
from toeplitz_spectra.cli import main, parse_complex
from toeplitz_spectra.errors import ValidationError
from toeplitz_spectra.mplinalg import decimal_digits


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("text,expected", [
    ("1.5", 1.5), ("2i", 2j), ("1+2i", 1 + 2j), ("-0.5-1i", -0.5 - 1j), ("-i", -1j),
    ("i", 1j), ("3e-2+1e1i", 0.03 + 10j), (" 4 ", 4), ("+2.5j", 2.5j),
])
def test_parse_complex(text, expected):
    assert complex(parse_complex(text, 128)) == expected


@pytest.mark.parametrize("text", ["", "1+", "abc", "1i2", "2i+1", "1++2i", "--1"])
def test_parse_complex_rejects(text):
    with pytest.raises(ValidationError):
        parse_complex(text, 128)


def test_spectrum_permutation_json(capsys):
    code, out, _ = run(["spectrum", "--n", "3", "--r", "1", "--s", "2", "--precision", "256",
                        "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["precision_bits"] == 256 and doc["params"]["n"] == 3
    s = Spectrum.from_records(doc["eigenvalues"], 256)
    with gmpy2.context(precision=256):
        two_pi = 2 * gmpy2.const_pi()
        for k, z in enumerate(s):
            assert abs(z - gmpy2.mpc(gmpy2.cos(two_pi * k / 3), gmpy2.sin(two_pi * k / 3))) < 1e-75
    assert doc["eigenvalues"][0] == {"re": "1." + "0" * (decimal_digits(256) - 1) + "e+00", "im": "0"}


def test_spectrum_json_round_trip_and_csv_agree(capsys):
    argv = ["spectrum", "--n", "17", "--r", "2", "--s", "4", "--precision", "200"]
    _, out_json, _ = run(argv, capsys)
    _, out_csv, _ = run(argv + ["--format", "csv"], capsys)
    recs = json.loads(out_json)["eigenvalues"]
    again = Spectrum.from_records(recs, 200).to_records()
    assert again == recs
    rows = list(csv.reader(io.StringIO(out_csv)))
    assert rows[0] == ["re", "im"]
    assert [{"re": a, "im": b} for a, b in rows[1:]] == recs


def test_spectrum_symbol(capsys):
    code, out, _ = run(["spectrum", "--n", "3", "--r", "1", "--s", "1", "--f0", "1",
                        "--fr", "1", "--fms", "1", "--precision", "128"], capsys)
    assert code == 0
    vals = sorted(float(gmpy2.mpfr(e["re"])) for e in json.loads(out)["eigenvalues"])
    assert vals == pytest.approx([1 - 2 ** 0.5, 1, 1 + 2 ** 0.5])


def test_env_precision(capsys, monkeypatch):
    monkeypatch.setenv("TOEPLITZ_SPECTRA_PRECISION", "128")
    _, out, _ = run(["spectrum", "--n", "4", "--r", "1", "--s", "1"], capsys)
    doc = json.loads(out)
    assert doc["precision_bits"] == 128
    assert len(doc["eigenvalues"][0]["re"].split("e")[0].lstrip("-").replace(".", "")) == decimal_digits(128)
    monkeypatch.setenv("TOEPLITZ_SPECTRA_PRECISION", "many")
    assert run(["spectrum", "--n", "4", "--r", "1", "--s", "1"], capsys)[0] == 1


def test_params_json_and_csv(capsys):
    code, out, _ = run(["params", "--n", "17", "--r", "2", "--s", "4"], capsys)
    assert code == 0 and json.loads(out)["n_zero"] == 2
    _, out, _ = run(["params", "--n", "17", "--r", "2", "--s", "4", "--format", "csv"], capsys)
    header, row = list(csv.reader(io.StringIO(out)))
    assert dict(zip(header, row))["n_gamma"] == "8"


def test_bmatrix(capsys):
    code, out, _ = run(["bmatrix", "--n", "231", "--r", "38", "--s", "39"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["rows"] == doc["cols"] == 3
    assert doc["entries"][0] == "2937189730080557577"
    _, out, _ = run(["bmatrix", "--n", "6", "--r", "1", "--s", "2", "--format", "csv"], capsys)
    assert out.splitlines() == ["1,2", "1,3"]


def test_charpoly_bmatrix(capsys):
    code, out, _ = run(["charpoly", "--bmatrix", "--n", "15", "--r", "1", "--s", "2"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["matrix"] == "B"
    assert doc["coefficients"] == ["-1", "35", "-84", "55", "-13", "1"]


def test_charpoly_full(capsys):
    _, out, _ = run(["charpoly", "--n", "12", "--r", "2", "--s", "4", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["power", "coefficient"]
    assert {int(p): int(c) for p, c in rows[1:] if c != "0"} == {0: 1, 3: -8, 6: 18, 9: -8, 12: 1}


def test_verify(capsys):
    code, out, _ = run(["verify", "--n", "17", "--r", "2", "--s", "4", "--nonzero-only"], capsys)
    rec = json.loads(out)
    assert code == 0
    assert rec["exact_identity_holds"] is True and rec["params"]["n_zero"] == 2
    assert "timestamp" in rec and "build" in rec


def test_verify_range_and_jobs(capsys):
    code, out, _ = run(["verify", "--n", "12:14", "--r", "2", "--s", "4", "--jobs", "2",
                        "--precision", "128", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and [r[0] for r in rows[1:]] == ["12", "13", "14"]


def test_bench(capsys):
    code, out, _ = run(["bench", "--n", "20", "--r", "1", "--s", "2", "--precision", "64,128",
                        "--repetitions", "1"], capsys)
    recs = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and [r["precision"] for r in recs] == [64, 128]
    _, out, _ = run(["bench", "--n", "20", "--r", "1", "--s", "2", "--no-oracle", "--repetitions", "1"], capsys)
    assert json.loads(out)["oracle_runtime"] is None


def test_out_file(tmp_path, capsys):
    path = tmp_path / "b.json"
    code, out, _ = run(["bmatrix", "--n", "9", "--r", "1", "--s", "2", "--out", str(path)], capsys)
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["entries"] == ["1", "2", "1", "1", "3", "3", "0", "1", "3"]


def test_out_file_bad_directory(tmp_path, capsys):
    assert run(["params", "--n", "5", "--r", "1", "--s", "2", "--out",
                str(tmp_path / "no" / "such" / "x.json")], capsys)[0] == 1


def test_transpose(capsys):
    code, _, err = run(["params", "--n", "10", "--r", "2", "--s", "1"], capsys)
    assert code == 1 and "transpose" in err
    code, out, err = run(["params", "--n", "10", "--r", "2", "--s", "1", "--transpose-ok"], capsys)
    assert code == 0 and "notice" in err
    assert (json.loads(out)["r"], json.loads(out)["s"]) == (1, 2)


@pytest.mark.parametrize("argv", [
    ["spectrum", "--n", "5", "--r", "1", "--s", "2", "--precision", "32"],
    ["spectrum", "--n", "5", "--r", "1", "--s", "2", "--f0", "1+"],
    ["spectrum", "--n", "0", "--r", "1", "--s", "2"],
    ["bmatrix", "--n", "14", "--r", "3", "--s", "5"],
    ["verify", "--n", "14", "--r", "3", "--s", "5"],
    ["bmatrix", "--n", "12", "--r", "2", "--s", "4"],
    ["verify", "--n", "12", "--r", "2", "--s", "4", "--precision", "64,128"],
    ["bench", "--n", "12", "--r", "2", "--s", "4", "--repetitions", "0"],
])
def test_validation_exit_1(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 1 and out == ""
    assert err.startswith("error:") and len(err.strip().splitlines()) == 1


def test_computation_failure_exit_2(capsys, monkeypatch):
    from toeplitz_spectra import ConvergenceError
    import toeplitz_spectra.cli as cli

    def boom(*a, **k):
        raise ConvergenceError(3, 90)

    monkeypatch.setattr(cli, "full_spectrum_g", boom)
    code, _, err = run(["spectrum", "--n", "5", "--r", "1", "--s", "2"], capsys)
    assert code == 2 and "did not converge" in err


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "toeplitz_spectra", *args], capture_output=True, text=True)


@pytest.mark.parametrize("args", [[], ["nosuch"], ["params", "--n", "5"], ["params", "--n", "x", "--r", "1", "--s", "2"],
                                  ["spectrum", "--n", "5", "--r", "1", "--s", "2", "--bogus"],
                                  ["params", "--n", "5", "--r", "1", "--s", "2", "--format", "xml"]])
def test_usage_errors_exit_1(args):
    assert _cli(*args).returncode == 1


def test_module_entry_point():
    res = _cli("params", "--n", "15", "--r", "1", "--s", "2")
    assert res.returncode == 0 and json.loads(res.stdout)["n_sigma"] == 5
