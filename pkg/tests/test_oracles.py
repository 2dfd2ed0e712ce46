"""Reference oracles: naive backtracker, tabular filler, CFG end-sets."""

from __future__ import annotations

import pytest

from pegkit import (
    EMPTY,
    FAIL,
    LeftRecursion,
    char,
    charclass,
    choice,
    make_grammar,
    new_session,
    opt,
    ref,
    seq,
    star,
)
from pegkit.oracles import (
    CallBudgetExceeded,
    SamePositionCycle,
    UnsupportedConstruct,
    cfg_all_ends,
    cfg_end_table,
    check_cfg_compatible,
    naive_parse,
    tabular_parse,
)


@pytest.fixture
def arith(entries):
    return entries["arith"]


class TestNaiveParse:
    def test_agrees_with_engine_on_samples(self, arith):
        g = arith.grammar
        for text in ("2*2", "2*(3+4)", "1+", "(", "", "7"):
            session = new_session(g, text)
            for rid in range(len(g.rules)):
                for pos in range(len(text) + 1):
                    out = session.apply(rid, pos)
                    peg = None if out is FAIL else out.end
                    assert naive_parse(g, rid, pos, text).outcome == peg

    def test_redundant_reevaluation_is_visible(self, arith):
        # '2*2' makes the choice inside Additive parse Multitive at 0,
        # fail on '+', and re-parse the same Multitive from scratch
        g = arith.grammar
        report = naive_parse(g, g.rule_id("Additive"), 0, "2*2")
        assert report.calls_by_cell[(g.rule_id("Multitive"), 0)] == 2

    def test_calls_by_cell_totals_match_calls(self, arith):
        g = arith.grammar
        report = naive_parse(g, 0, 0, "2*(3+4)")
        assert sum(report.calls_by_cell.values()) == report.calls

    def test_call_budget_enforced(self, entries):
        entry = entries["blowup"]
        with pytest.raises(CallBudgetExceeded):
            naive_parse(
                entry.grammar, 0, 0, entry.input_generator(30), call_budget=1000
            )

    def test_left_recursion_cut_by_cycle_guard(self, entries):
        g = entries["left_recursive_arith"].grammar
        with pytest.raises(LeftRecursion):
            naive_parse(g, g.start, 0, "1+2")

    def test_max_depth_reflects_nesting(self, arith):
        shallow = naive_parse(arith.grammar, 0, 0, "2").max_depth
        deep = naive_parse(arith.grammar, 0, 0, "((((2))))").max_depth
        assert deep > shallow


class TestTabularParse:
    def test_fills_every_cell_exactly_once(self, arith):
        text = "2*(3+4)"
        tab = tabular_parse(arith.grammar, text)
        cells = len(arith.grammar.rules) * (len(text) + 1)
        assert tab.cells_filled == cells
        assert len(set(tab.fill_order)) == cells

    def test_fill_order_is_right_to_left(self, arith):
        tab = tabular_parse(arith.grammar, "1+2")
        positions = [pos for _, pos in tab.fill_order]
        assert positions == sorted(positions, reverse=True)

    def test_callees_fill_before_callers_within_a_column(self, arith):
        g = arith.grammar
        tab = tabular_parse(g, "1+2")
        order = {cell: i for i, cell in enumerate(tab.fill_order)}
        for pos in range(4):
            assert order[(g.rule_id("Decimal"), pos)] < order[(g.rule_id("Primary"), pos)]
            assert order[(g.rule_id("Primary"), pos)] < order[(g.rule_id("Multitive"), pos)]
            assert order[(g.rule_id("Multitive"), pos)] < order[(g.rule_id("Additive"), pos)]

    def test_verdicts_agree_with_engine(self, arith):
        g = arith.grammar
        for text in ("2*2", "2*(3+4", "", "5+5+5"):
            tab = tabular_parse(g, text)
            session = new_session(g, text)
            for rid in range(len(g.rules)):
                for pos in range(len(text) + 1):
                    out = session.apply(rid, pos)
                    peg = None if out is FAIL else out.end
                    assert tab.verdict(rid, pos) == peg

    def test_star_and_plus_are_rejected(self):
        g = make_grammar([("S", star(char("a")))])
        with pytest.raises(UnsupportedConstruct, match="repetition"):
            tabular_parse(g, "aa")

    def test_opt_and_predicates_are_supported(self):
        g = make_grammar([("S", seq(opt(char("a")), char("b")))])
        tab = tabular_parse(g, "ab")
        assert tab.verdict(0, 0) == 2
        assert tab.verdict(0, 1) == 2

    def test_same_position_cycle_detected(self, entries):
        g = entries["left_recursive_arith"].grammar
        with pytest.raises(SamePositionCycle):
            tabular_parse(g, "1")

    def test_nullable_prefix_cycles_are_cycles_too(self):
        g = make_grammar(
            [("A", choice(seq(opt(char("x")), ref("A"), char("y")), char("z")))]
        )
        with pytest.raises(SamePositionCycle):
            tabular_parse(g, "zy")


class TestCfgOracle:
    def test_collects_all_derivation_ends(self, entries):
        g = entries["peg_limitation"].grammar
        assert cfg_all_ends(g, 0, 0, "xxxxx") == frozenset({1, 3, 5})

    def test_peg_commits_where_cfg_branches(self, entries):
        entry = entries["peg_limitation"]
        out = new_session(entry.grammar, "xxxxx").apply(0, 0)
        assert out.end == 3  # greedy first alternative stops short

    def test_every_engine_success_is_a_cfg_derivation(self, arith):
        g = arith.grammar
        for text in ("2*2", "1+2*3", "(4)", "12"):
            table = cfg_end_table(g, text)
            session = new_session(g, text)
            for rid in range(len(g.rules)):
                for pos in range(len(text) + 1):
                    out = session.apply(rid, pos)
                    if out is not FAIL:
                        assert out.end in table[(rid, pos)]

    def test_left_recursive_grammars_converge(self, entries):
        g = entries["left_recursive_arith"].grammar
        ends = cfg_all_ends(g, g.rule_id("Additive"), 0, "1+2+3")
        assert ends == frozenset({1, 3, 5})

    def test_unsupported_constructs_rejected(self):
        for body in (star(char("a")), opt(char("a")), charclass("ab")):
            g = make_grammar([("S", seq(body, char("c")))])
            with pytest.raises(UnsupportedConstruct):
                check_cfg_compatible(g)

    def test_compatible_fragment_accepted(self, entries):
        check_cfg_compatible(entries["arith"].grammar)
        check_cfg_compatible(entries["blowup"].grammar)

    def test_empty_alternatives_contribute_zero_width_ends(self):
        g = make_grammar([("S", choice(seq(char("a"), ref("S")), EMPTY))])
        assert cfg_all_ends(g, 0, 0, "aaa") == frozenset({0, 1, 2, 3})
