import io
import json

import pytest

from binlcs.cli import main
from binlcs.core import BitString, exact_lcs, is_subsequence
from binlcs.covering import CSV_HEADER, cover, dumps_csv
from binlcs.params import Params


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


class TestScalarCommands:
    def test_exact(self, capsys):
        code, out, _ = run(capsys, "exact", "--x-str", "0011", "--y-str", "0101")
        assert code == 0 and out == "3\n"

    def test_trivial(self, capsys):
        code, out, _ = run(capsys, "trivial", "--x-str", "0011", "--y-str", "0101")
        assert code == 0 and out == "2\n"

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "exact", "--x-str", "0011", "--y-str", "0101",
                           "--format", "json")
        assert code == 0 and json.loads(out) == {"value": 3}


class TestApprox:
    def test_spec_example_bounds(self, capsys):
        code, out, _ = run(capsys, "approx", "--x-str", "0011", "--y-str", "0101")
        obj = json.loads(out)
        assert code == 0
        assert 2 <= obj["bound"] <= 3
        assert obj["params_profile"] == "desk"
        assert isinstance(obj["case_trace"], list)
        assert "exact" not in obj and "ratio" not in obj

    def test_check_exact_fills_ratio(self, capsys):
        code, out, _ = run(capsys, "approx", "--x-str", "0011", "--y-str", "0101",
                           "--check-exact")
        obj = json.loads(out)
        assert code == 0
        assert obj["exact"] == 3
        assert obj["ratio"] == obj["bound"] / 3

    def test_trace_emits_chain_and_witness(self, capsys):
        x, y = "0011" * 8, "0101" * 8
        code, out, _ = run(capsys, "approx", "--x-str", x, "--y-str", y, "--trace")
        assert code == 0
        lines = out.splitlines()
        bound = json.loads(lines[0])["bound"]
        assert lines[1] == CSV_HEADER
        wit_line = lines[-1]
        assert wit_line.startswith("reconstructed_subsequence=")
        wit = wit_line.split("=", 1)[1]
        assert len(wit) == bound
        assert is_subsequence(BitString.from_str(wit), BitString.from_str(x))
        assert is_subsequence(BitString.from_str(wit), BitString.from_str(y))

    def test_trace_witness_when_anchor_wins(self, capsys):
        # heavily imbalanced pair resolves through the count shortcut; the
        # witness is then a plain majority-bit run
        code, out, _ = run(capsys, "approx", "--x-str", "0" * 40,
                           "--y-str", "0" * 30 + "1" * 10, "--trace")
        lines = out.splitlines()
        assert code == 0
        wit = lines[-1].split("=", 1)[1]
        assert wit == "0" * json.loads(lines[0])["bound"]

    def test_plain_format(self, capsys):
        code, out, _ = run(capsys, "approx", "--x-str", "0011", "--y-str", "0101",
                           "--format", "plain")
        assert code == 0 and out.strip().isdigit()

    def test_set_override_shows_in_profile(self, capsys):
        code, out, _ = run(capsys, "approx", "--x-str", "0011", "--y-str", "0101",
                           "--set", "gamma=1/8")
        assert code == 0
        assert json.loads(out)["params_profile"] == "desk:gamma=1/8"


class TestErrorsAndExitCodes:
    def test_conflicting_input_flags_name_both(self, capsys):
        code, _, err = run(capsys, "approx", "--x-str", "01", "--x", "f",
                           "--y-str", "1")
        assert code == 2
        assert "--x" in err and "--x-str" in err

    def test_parse_error_names_byte_offset(self, capsys):
        code, _, err = run(capsys, "exact", "--x-str", "012", "--y-str", "1")
        assert code == 2 and "offset 2" in err

    def test_missing_input_is_usage_error(self, capsys):
        code, _, err = run(capsys, "exact", "--y-str", "1")
        assert code == 2 and "--x" in err

    def test_unknown_set_name(self, capsys):
        code, _, err = run(capsys, "approx", "--x-str", "0", "--y-str", "0",
                           "--set", "bogus=1")
        assert code == 2 and "bogus" in err

    def test_out_of_range_set_value(self, capsys):
        code, _, err = run(capsys, "approx", "--x-str", "0", "--y-str", "0",
                           "--set", "gamma=2")
        assert code == 2

    def test_contract_error_is_exit_one(self, capsys):
        # cover requires the equalized-count precondition on its inputs
        code, _, err = run(capsys, "cover", "--x-str", "0001", "--y-str", "1111")
        assert code == 1 and err.startswith("binlcs:")

    def test_missing_file_is_exit_one(self, capsys):
        code, _, _ = run(capsys, "exact", "--x", "/nonexistent/path", "--y-str", "1")
        assert code == 1

    def test_inline_cap_enforced(self, capsys):
        code, _, err = run(capsys, "exact", "--x-str", "0" * (10**6 + 1),
                           "--y-str", "1")
        assert code == 2 and "--x" in err

    def test_unsupported_format_combo(self, capsys):
        code, _, err = run(capsys, "approx", "--x-str", "0", "--y-str", "0",
                           "--format", "csv")
        assert code == 2 and "csv" in err

    def test_double_stdin_rejected(self, capsys):
        code, _, err = run(capsys, "exact", "--x", "-", "--y", "-")
        assert code == 2 and "stdin" in err

    def test_help_exits_zero(self, capsys):
        code, _, _ = run(capsys, "--help")
        assert code == 0


class TestFileInput:
    def test_whitespace_trimmed(self, tmp_path, capsys):
        f = tmp_path / "x.txt"
        f.write_bytes(b"0101\n0101\n")
        code, out, _ = run(capsys, "exact", "--x", str(f), "--y-str", "01010101")
        assert code == 0 and out == "8\n"

    def test_bad_byte_offset_counts_raw_bytes(self, tmp_path, capsys):
        f = tmp_path / "x.txt"
        f.write_bytes(b"0101\n2")
        code, _, err = run(capsys, "exact", "--x", str(f), "--y-str", "1")
        assert code == 2 and "offset 5" in err

    def test_empty_file(self, tmp_path, capsys):
        f = tmp_path / "x.txt"
        f.write_bytes(b"")
        code, out, _ = run(capsys, "exact", "--x", str(f), "--y-str", "1")
        assert code == 0 and out == "0\n"

    def test_stdin_dash(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.TextIOWrapper(io.BytesIO(b"0011\n")))
        code, out, _ = run(capsys, "exact", "--x", "-", "--y-str", "0101")
        assert code == 0 and out == "3\n"


class TestClassify:
    def test_all_zeros_is_coarse_bit_zero(self, capsys):
        code, out, _ = run(capsys, "classify", "--x-str", "0" * 1024)
        assert code == 0
        first = out.splitlines()[0].split("\t")
        assert first[0] == "0" and first[1] == "coarse" and first[3] == "0"

    def test_dashes_for_absent_fields(self, capsys):
        # eps=1/2 makes the oscillation thresholds unreachable at w=64
        code, out, _ = run(capsys, "classify", "--x-str", "01" * 32,
                           "--set", "eps=1/2", "--set", "w=64")
        assert code == 0
        assert out.splitlines()[0] == "0\tunclassified\t-\t-"

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "classify", "--x-str", "0" * 1024,
                           "--format", "json")
        rows = json.loads(out)
        assert code == 0 and rows[0]["kind"] == "coarse" and rows[0]["bit"] == 0


class TestCover:
    def test_dump_matches_library(self, capsys):
        x, y = "01" * 32, "01" * 32
        code, out, _ = run(capsys, "cover", "--x-str", x, "--y-str", y, "--dump")
        assert code == 0
        res = cover(BitString.from_str(x), BitString.from_str(y), Params.desk())
        assert out == dumps_csv(res.rects)

    def test_summary_diagnostics(self, capsys):
        code, out, _ = run(capsys, "cover", "--x-str", "01" * 32,
                           "--y-str", "01" * 32)
        obj = json.loads(out)
        assert code == 0 and obj["rects"] > 0 and "by_source" in obj

    def test_out_file(self, tmp_path, capsys):
        dest = tmp_path / "r.csv"
        code, out, _ = run(capsys, "cover", "--x-str", "01" * 32,
                           "--y-str", "01" * 32, "--dump", "--out", str(dest))
        assert code == 0 and out == ""
        assert dest.read_text().splitlines()[0] == CSV_HEADER


class TestGen:
    def test_inline_spec(self, capsys):
        code, out, _ = run(capsys, "gen", "--spec",
                           '{"family":"periodic","length":16,"seed":0,"ell":4}')
        assert code == 0 and out == "0000111100001111\n"

    def test_spec_from_file(self, tmp_path, capsys):
        f = tmp_path / "s.json"
        f.write_text('{"family":"uniform","length":8,"seed":1,"p":0.0}')
        code, out, _ = run(capsys, "gen", "--spec", str(f))
        assert code == 0 and out == "00000000\n"

    def test_round_trip_into_approx(self, capsys, monkeypatch):
        code, out, _ = run(capsys, "gen", "--spec",
                           '{"family":"uniform","length":64,"seed":5,"p":0.5}')
        assert code == 0
        monkeypatch.setattr("sys.stdin",
                            io.TextIOWrapper(io.BytesIO(out.encode())))
        code, out2, _ = run(capsys, "approx", "--x", "-", "--y-str", out.strip(),
                            "--check-exact")
        obj = json.loads(out2)
        assert code == 0 and obj["ratio"] == 1.0

    def test_invalid_spec(self, capsys):
        code, _, err = run(capsys, "gen", "--spec", '{"family":"nope","length":4}')
        assert code == 2


class TestBench:
    def _pairs_file(self, tmp_path):
        f = tmp_path / "pairs.json"
        f.write_text(json.dumps([
            [{"family": "uniform", "length": 64, "seed": 1, "p": 0.0},
             {"family": "uniform", "length": 64, "seed": 2, "p": 0.0}],
        ]))
        return str(f)

    def test_stdout_report(self, tmp_path, capsys):
        code, out, _ = run(capsys, "bench", "--pairs", self._pairs_file(tmp_path))
        lines = out.splitlines()
        assert code == 0
        assert lines[0].startswith("# schema=1")
        assert lines[2].startswith("uniform,64,64,1,64,64,64,1.000000")

    def test_append_only_out_file(self, tmp_path, capsys):
        dest = tmp_path / "report.csv"
        pf = self._pairs_file(tmp_path)
        assert run(capsys, "bench", "--pairs", pf, "--out", str(dest))[0] == 0
        assert run(capsys, "bench", "--pairs", pf, "--out", str(dest))[0] == 0
        lines = dest.read_text().splitlines()
        assert sum(1 for ln in lines if ln.startswith("# schema=")) == 1
        assert len(lines) == 4

    def test_malformed_pairs(self, tmp_path, capsys):
        f = tmp_path / "bad.json"
        f.write_text('{"not": "a list"}')
        code, _, _ = run(capsys, "bench", "--pairs", str(f))
        assert code == 2


class TestDev:
    def test_ordered_max_on_csv(self, tmp_path, capsys):
        f = tmp_path / "rects.csv"
        f.write_text(CSV_HEADER + "\n0,2,0,2,2,trivial\n2,4,2,4,3,trivial\n")
        code, out, _ = run(capsys, "dev", "--op", "ordered-max", "--rects", str(f))
        assert code == 0 and out == "5\n"


class TestWitnessSoundness:
    @pytest.mark.parametrize("seed", range(8))
    def test_trace_witness_random_pairs(self, capsys, seed):
        import numpy as np
        rng = np.random.default_rng(np.random.Philox(900 + seed))
        x = "".join(map(str, rng.integers(0, 2, 96).tolist()))
        y = "".join(map(str, rng.integers(0, 2, 128).tolist()))
        code, out, _ = run(capsys, "approx", "--x-str", x, "--y-str", y, "--trace")
        assert code == 0
        lines = out.splitlines()
        bound = json.loads(lines[0])["bound"]
        wit = lines[-1].split("=", 1)[1]
        assert len(wit) == bound
        assert is_subsequence(BitString.from_str(wit), BitString.from_str(x))
        assert is_subsequence(BitString.from_str(wit), BitString.from_str(y))
        assert bound <= exact_lcs(BitString.from_str(x), BitString.from_str(y))
