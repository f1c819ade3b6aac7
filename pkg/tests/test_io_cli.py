"""Tests for the file format, the generator, and the CLI."""

import json

import numpy as np
import pytest

from tprod import (
    DimensionError,
    IoError,
    ParseError,
    Tensor3,
    gen,
    is_t_symmetric,
    read_tensor,
    to_fourier,
    tprod,
    write_tensor,
)
from tprod.cli import cli_main

from conftest import max_abs


class TestTensorFile:
    def test_round_trip_bit_exact(self, tmp_path):
        path = tmp_path / "t.tns"
        for seed in range(10):
            t = gen(seed, 3, 4, 2)
            write_tensor(path, t)
            assert read_tensor(path) == t

    def test_challenging_values_round_trip(self, tmp_path):
        values = np.array(
            [[[1e-300, -1e300], [1.0 / 3.0, np.pi]],
             [[5e-324, -0.0], [1.2345678901234567, 2.0 ** 52 + 1]]]
        )
        path = tmp_path / "t.tns"
        t = Tensor3(values)
        write_tensor(path, t)
        assert read_tensor(path) == t

    def test_fixture_files_match_expected_slices(self, svd_example, jordan_example):
        np.testing.assert_array_equal(svd_example.slice(0), np.eye(2))
        np.testing.assert_array_equal(svd_example.slice(1), np.diag([-1.0, 0.0]))
        np.testing.assert_array_equal(jordan_example.slice(3), [[0, 1], [1, 0]])

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        path = tmp_path / "t.tns"
        path.write_text("# a comment\n1 1 2\n\n3.5\n# another\n\n-1\n")
        t = read_tensor(path)
        np.testing.assert_array_equal(t.array.ravel(), [3.5, -1.0])

    def test_zero_dimension_header_rejected(self, tmp_path):
        path = tmp_path / "t.tns"
        path.write_text("0 2 2\n")
        with pytest.raises(ParseError):
            read_tensor(path)

    def test_bad_token_reports_position(self, tmp_path):
        path = tmp_path / "t.tns"
        path.write_text("1 2 1\n1.0 oops\n")
        with pytest.raises(ParseError) as excinfo:
            read_tensor(path)
        assert excinfo.value.line == 2
        assert excinfo.value.column == 2

    def test_wrong_row_width(self, tmp_path):
        path = tmp_path / "t.tns"
        path.write_text("1 3 1\n1.0 2.0\n")
        with pytest.raises(ParseError):
            read_tensor(path)

    def test_missing_rows(self, tmp_path):
        path = tmp_path / "t.tns"
        path.write_text("2 2 2\n1 2\n3 4\n")
        with pytest.raises(DimensionError):
            read_tensor(path)

    def test_nan_rejected(self, tmp_path):
        path = tmp_path / "t.tns"
        path.write_text("1 1 1\nnan\n")
        with pytest.raises(ParseError):
            read_tensor(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            read_tensor(tmp_path / "nope.tns")

    def test_bad_header_width(self, tmp_path):
        path = tmp_path / "t.tns"
        path.write_text("2 2\n")
        with pytest.raises(ParseError):
            read_tensor(path)


class TestGen:
    def test_deterministic(self):
        assert gen(1, 3, 4, 2) == gen(1, 3, 4, 2)
        assert not (gen(1, 3, 4, 2) == gen(2, 3, 4, 2))

    def test_dense_range(self):
        t = gen(0, 5, 5, 5)
        assert t.max_abs <= 1.0

    def test_t_symmetric_exact(self):
        assert is_t_symmetric(gen(3, 4, 4, 3, "t_symmetric"), 0.0)

    def test_t_symmetric_needs_square(self):
        with pytest.raises(DimensionError):
            gen(0, 2, 3, 2, "t_symmetric")

    def test_rank_deficient_blocks(self):
        a = gen(4, 5, 5, 3, "rank_deficient")
        fb = to_fourier(a)
        for k in range(3):
            assert np.linalg.matrix_rank(fb.blocks[k]) < 5

    def test_f_diagonal(self):
        from tprod import is_f_diagonal

        assert is_f_diagonal(gen(5, 3, 4, 2, "f_diagonal"), 0.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            gen(0, 2, 2, 2, "sparse")


class TestCli:
    def _gen_file(self, tmp_path, name="A.tns", dims=(3, 3, 4), seed=7,
                  kind="dense"):
        path = tmp_path / name
        code = cli_main([
            "gen", "--seed", str(seed),
            "--dims", *map(str, dims), "--kind", kind,
            "-o", str(path), "--quiet",
        ])
        assert code == 0
        return path

    def test_gen_pinv_verify_pipeline(self, tmp_path):
        a = self._gen_file(tmp_path)
        x = tmp_path / "X.tns"
        report_path = tmp_path / "report.json"
        code = cli_main([
            "pinv", str(a), "-o", str(x),
            "--report", str(report_path), "--quiet",
        ])
        assert code == 0
        report = json.loads(report_path.read_text())
        assert report["pass"] is True
        assert report["operation"] == "pinv"
        assert {"name", "residual", "tolerance", "pass"} == set(
            report["checks"][0]
        )
        assert all(c["pass"] for c in report["checks"])
        assert report["seconds"] >= 0
        code = cli_main([
            "verify", "--kind", "pinv", str(x), "--input", str(a), "--quiet",
        ])
        assert code == 0

    def test_pinv_routes_agree(self, tmp_path):
        a = self._gen_file(tmp_path, dims=(2, 4, 3))
        x1 = tmp_path / "x1.tns"
        x2 = tmp_path / "x2.tns"
        assert cli_main(["pinv", str(a), "-o", str(x1), "--quiet"]) == 0
        assert cli_main(["pinv", str(a), "-o", str(x2), "--route", "svd",
                         "--quiet"]) == 0
        d = max_abs((read_tensor(x1) - read_tensor(x2)).array)
        assert d <= 1e-9

    def test_tprod_subcommand(self, tmp_path):
        a = self._gen_file(tmp_path, "A.tns", seed=1)
        b = self._gen_file(tmp_path, "B.tns", seed=2)
        c = tmp_path / "C.tns"
        assert cli_main(["tprod", str(a), str(b), "-o", str(c), "--quiet"]) == 0
        expected = tprod(read_tensor(a), read_tensor(b))
        assert max_abs((read_tensor(c) - expected).array) <= 1e-12

    def test_tsvd_writes_factors_and_verifies(self, tmp_path):
        a = self._gen_file(tmp_path, dims=(3, 5, 4))
        prefix = tmp_path / "out"
        assert cli_main(["tsvd", str(a), "--out-prefix", str(prefix),
                         "--quiet"]) == 0
        factors = [f"{prefix}_{name}.tns" for name in ("U", "S", "V")]
        code = cli_main([
            "verify", "--kind", "tsvd", *factors, "--input", str(a), "--quiet",
        ])
        assert code == 0

    def test_verify_detects_tampering(self, tmp_path):
        a = self._gen_file(tmp_path)
        x = tmp_path / "X.tns"
        assert cli_main(["pinv", str(a), "-o", str(x), "--quiet"]) == 0
        t = read_tensor(x)
        data = t.array.copy()
        data[0, 0, 0] += 0.5
        write_tensor(x, Tensor3(data))
        code = cli_main([
            "verify", "--kind", "pinv", str(x), "--input", str(a), "--quiet",
        ])
        assert code == 1

    def test_group_nilpotent_exits_3(self, tmp_path):
        nil = tmp_path / "nil.tns"
        write_tensor(nil, Tensor3(np.array([[[0.0, 1.0], [0.0, 0.0]]])))
        code = cli_main(["group", str(nil), "-o", str(tmp_path / "g.tns"),
                         "--quiet"])
        assert code == 3

    def test_tinv_singular_exits_3(self, tmp_path):
        a = self._gen_file(tmp_path, dims=(4, 4, 3), kind="rank_deficient")
        code = cli_main(["tinv", str(a), "-o", str(tmp_path / "x.tns"),
                         "--quiet"])
        assert code == 3

    def test_malformed_file_exits_2(self, tmp_path):
        bad = tmp_path / "bad.tns"
        bad.write_text("0 2 2\n")
        code = cli_main(["pinv", str(bad), "-o", str(tmp_path / "x.tns"),
                         "--quiet"])
        assert code == 2

    def test_usage_error_exits_2(self, capsys):
        assert cli_main(["pinv"]) == 2
        assert cli_main(["verify", "--kind", "tsvd", "one.tns",
                         "--input", "a.tns"]) == 2
        capsys.readouterr()

    def test_tol_override_can_fail_honest_results(self, tmp_path):
        a = self._gen_file(tmp_path)
        code = cli_main([
            "tinv", str(a), "-o", str(tmp_path / "x.tns"),
            "--tol", "1e-30", "--quiet",
        ])
        assert code == 1

    def test_all_factorization_subcommands(self, tmp_path):
        a = self._gen_file(tmp_path, dims=(3, 3, 3), seed=11)
        for command, names in [
            ("tschur", ("U", "T")),
            ("tjordan", ("P", "J")),
            ("idem", ("U", "E", "V")),
        ]:
            prefix = tmp_path / command
            assert cli_main([command, str(a), "--out-prefix", str(prefix),
                             "--quiet"]) == 0
            factors = [f"{prefix}_{n}.tns" for n in names]
            kind = command
            assert cli_main([
                "verify", "--kind", kind, *factors,
                "--input", str(a), "--quiet",
            ]) == 0

    def test_inverse_subcommands(self, tmp_path):
        a = self._gen_file(tmp_path, dims=(3, 3, 4), seed=19)
        for command in ("tinv", "drazin", "group", "witness"):
            out = tmp_path / f"{command}.tns"
            assert cli_main([command, str(a), "-o", str(out), "--quiet"]) == 0
        assert cli_main([
            "verify", "--kind", "drazin", str(tmp_path / "drazin.tns"),
            "--input", str(a), "--quiet",
        ]) == 0
        assert cli_main([
            "verify", "--kind", "group", str(tmp_path / "group.tns"),
            "--input", str(a), "--quiet",
        ]) == 0

    def test_report_written_even_on_failure(self, tmp_path):
        a = self._gen_file(tmp_path)
        report_path = tmp_path / "r.json"
        code = cli_main([
            "tinv", str(a), "-o", str(tmp_path / "x.tns"),
            "--tol", "1e-30", "--report", str(report_path), "--quiet",
        ])
        assert code == 1
        report = json.loads(report_path.read_text())
        assert report["pass"] is False
