"""Command-line interface: subcommands, exit codes, output shapes."""

from __future__ import annotations

import pytest

from pegkit.bench import CSV_HEADER
from pegkit.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main

DEMO_GRAMMAR = """
Sum  <- Prod ('+' Prod)* ;
Prod <- Atom ('*' Atom)* ;
Atom <- [0-9] / '(' Sum ')' ;
"""


class TestEval:
    def test_evaluates_catalog_grammar(self, capsys):
        assert main(["eval", "arith", "2*(3+4)"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "14"

    def test_parse_error_reports_column_and_expectations(self, capsys):
        assert main(["eval", "arith", "2*(3+4"]) == EXIT_FAILURE
        err = capsys.readouterr().err
        assert "parse error at column 7" in err
        assert "')'" in err

    def test_recognizer_grammars_print_accept(self, capsys):
        assert main(["eval", "lookahead_ab", "xxzyyyy"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "accept"

    def test_unknown_grammar_is_a_usage_error(self, capsys):
        assert main(["eval", "mystery", "x"]) == EXIT_USAGE
        assert "unknown grammar" in capsys.readouterr().err

    def test_left_recursion_is_reported_as_an_error(self, capsys):
        assert main(["eval", "left_recursive_arith", "1+2"]) == EXIT_FAILURE
        assert "left recursion" in capsys.readouterr().err

    def test_grammar_file_overrides_catalog(self, capsys, tmp_path):
        path = tmp_path / "demo.peg"
        path.write_text(DEMO_GRAMMAR, encoding="utf-8")
        code = main(["eval", "--grammar-file", str(path), "demo", "3*(1+2)"])
        assert code == EXIT_OK
        assert capsys.readouterr().out.strip() == "accept"

    def test_missing_grammar_file_is_a_usage_error(self, capsys):
        code = main(["eval", "--grammar-file", "/no/such.peg", "demo", "1"])
        assert code == EXIT_USAGE


class TestMatrix:
    def test_prints_rules_char_row_and_columns(self, capsys):
        assert main(["matrix", "arith", "2*2"]) == EXIT_OK
        out = capsys.readouterr().out
        lines = out.splitlines()
        assert lines[0].split() == ["C1", "C2", "C3", "C4"]
        assert [line.split()[0] for line in lines[1:]] == [
            "Additive", "Multitive", "Primary", "Decimal", "CHAR",
        ]
        assert "(4,C4)" in lines[1]
        assert out.rstrip().endswith("X")  # EOF cell on the CHAR row

    def test_lazy_matrix_is_untouched(self, capsys):
        assert main(["matrix", "arith", "2*2", "--lazy"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "X" not in out
        assert "(" not in out

    def test_failed_parse_still_prints_matrix(self, capsys):
        assert main(["matrix", "arith", "2*("]) == EXIT_FAILURE
        captured = capsys.readouterr()
        assert "parse error" in captured.err
        assert "CHAR" in captured.out


class TestBench:
    def test_writes_csv(self, capsys, tmp_path):
        out = tmp_path / "bench.csv"
        code = main(
            ["bench", "blowup", "aN_b", "4..8", "naive,packrat", str(out)]
        )
        assert code == EXIT_OK
        assert "wrote 10 records" in capsys.readouterr().out
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 11

    def test_bad_sizes_are_usage_errors(self, capsys, tmp_path):
        out = tmp_path / "bench.csv"
        code = main(["bench", "blowup", "aN_b", "9..4", "packrat", str(out)])
        assert code == EXIT_USAGE
        assert "descending" in capsys.readouterr().err

    def test_bad_engine_is_a_usage_error(self, capsys, tmp_path):
        out = tmp_path / "bench.csv"
        code = main(["bench", "blowup", "aN_b", "4..6", "warp", str(out)])
        assert code == EXIT_USAGE

    def test_bad_family_is_a_usage_error(self, capsys, tmp_path):
        out = tmp_path / "bench.csv"
        code = main(["bench", "blowup", "bogus", "4..6", "packrat", str(out)])
        assert code == EXIT_USAGE


class TestCheck:
    def test_exhaustive_single_grammar(self, capsys):
        assert main(["check", "peg_limitation", "5", "exhaustive"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "expected divergence" in out
        assert "RESULT: ok" in out

    def test_random_mode_with_trial_count(self, capsys):
        assert main(["check", "blowup", "6", "64"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "mode=random" in out
        assert "64 random" in out

    def test_nonsense_trials_is_a_usage_error(self, capsys):
        assert main(["check", "blowup", "6", "sometimes"]) == EXIT_USAGE
        assert main(["check", "blowup", "6", "-3"]) == EXIT_USAGE

    def test_fixed_seed_reports_are_identical(self, capsys):
        args = ["check", "blowup", "8", "100", "--seed", "5"]
        assert main(args) == EXIT_OK
        first = capsys.readouterr().out
        assert main(args) == EXIT_OK
        assert capsys.readouterr().out == first


class TestGrammarTools:
    def test_fmt_normalizes_layout(self, capsys, tmp_path):
        path = tmp_path / "g.peg"
        path.write_text("A<-'a'/'b';\nB <- A A ;", encoding="utf-8")
        assert main(["grammar", "fmt", str(path)]) == EXIT_OK
        out = capsys.readouterr().out
        assert out == "A <- 'a' / 'b' ;\nB <- A A ;\n"

    def test_fmt_is_idempotent(self, capsys, tmp_path):
        path = tmp_path / "g.peg"
        path.write_text(DEMO_GRAMMAR, encoding="utf-8")
        assert main(["grammar", "fmt", str(path)]) == EXIT_OK
        once = capsys.readouterr().out
        path.write_text(once, encoding="utf-8")
        assert main(["grammar", "fmt", str(path)]) == EXIT_OK
        assert capsys.readouterr().out == once

    def test_fmt_rejects_broken_files(self, capsys, tmp_path):
        path = tmp_path / "g.peg"
        path.write_text("A <- 'x'", encoding="utf-8")  # missing ';'
        assert main(["grammar", "fmt", str(path)]) == EXIT_FAILURE
        assert "error" in capsys.readouterr().err

    def test_validate_reports_warnings_but_exits_zero(self, capsys, tmp_path):
        path = tmp_path / "g.peg"
        path.write_text("A <- 'a' ;\nDead <- 'd' ;", encoding="utf-8")
        assert main(["grammar", "validate", str(path)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "warning: UnreachableRule" in out
        assert "0 errors, 1 warnings" in out

    def test_validate_reports_errors_and_exits_one(self, capsys, tmp_path):
        path = tmp_path / "g.peg"
        path.write_text("A <- ('x'?)* ;", encoding="utf-8")
        assert main(["grammar", "validate", str(path)]) == EXIT_FAILURE
        out = capsys.readouterr().out
        assert "error: NullableRepetition" in out
