import pytest

from tstrat.analysis import AnalysisError, Limits, run_command
from tstrat.model import load_model
from tstrat.parser import parse_command
from tstrat.timedomain import INF

CYCLE = """
model cycle
class Cell | static val : Sym
rule ab: < C : Cell | val : a > => < C : Cell | val : b >
rule bc: < C : Cell | val : b > => < C : Cell | val : c >
rule ca: < C : Cell | val : c > => < C : Cell | val : a >
init: { < x : Cell | val : a > } in time 0
"""


def run(model, text, **limits):
    return run_command(parse_command(text), model, Limits(**limits) if limits else None)


def clocks(solutions):
    return [s.clock for s in solutions]


def test_model_name_mismatch(rtt):
    with pytest.raises(AnalysisError):
        run(rtt, "tsearch in wrong : init => after 0"
                 " using action with sampling fixed-time 1")


def test_cycle_model_terminates_with_three_states():
    m = load_model(CYCLE)
    sols, stats, status = run(m, "tsearch in cycle : init => matches {STATE} in time T"
                                 " using action with sampling fixed-time 1")
    assert status == "ok"
    assert len(sols) == 3
    assert stats.states_explored == 3


def test_solution_limit_stops_early():
    m = load_model(CYCLE)
    _, full_stats, _ = run(m, "tsearch in cycle : init => matches {STATE} in time T"
                              " using action with sampling fixed-time 1")
    sols, limited_stats, _ = run(m, "tsearch [1] in cycle : init =>"
                                    " matches {STATE} in time T"
                                    " using action with sampling fixed-time 1")
    assert len(sols) == 1
    assert limited_stats.states_explored < full_stats.states_explored


def test_bfs_dfs_same_solution_set(rtt):
    base = (" in rtt : init => matches {< S : Sender | rtt : 50, ATTS > CONF}"
            " in time R using delay or action with sampling max-time with default 4"
            " in time [0, 6000]")
    bfs_sols, _, _ = run(rtt, "tsearch" + base)
    dfs_sols, _, _ = run(rtt, "dtsearch" + base)
    assert {s.state.clocked.canon for s in bfs_sols} \
        == {s.state.clocked.canon for s in dfs_sols}
    assert bfs_sols and dfs_sols


def test_depth_bound_zero_checks_only_init(rtt):
    sols, _, status = run(rtt, "tsearch [5,0] in rtt : init =>"
                               " matches {STATE} in time T"
                               " using delay or action with sampling fixed-time 1")
    assert status == "ok"
    assert len(sols) == 1 and sols[0].state == rtt.init


def test_depth_bounded_search_counts_rounds(rtt):
    # rounds: send, tick*5, deliver => the first ripe request needs 7 rounds
    base = (" in rtt : init => matches {rttReq(T1, S, R) CONF} in time T"
            " using delay or action with sampling fixed-time 1")
    sols6, _, status6 = run(rtt, "tsearch [1,6]" + base)
    assert status6 == "no-solutions" and not sols6
    sols7, _, status7 = run(rtt, "tsearch [1,7]" + base)
    assert status7 == "ok" and clocks(sols7) == [5]


def test_depth_bounded_dfs_matches_bfs(rtt):
    base = (" [,9] in rtt : init => matches {STATE} in time T"
            " using delay or action with sampling fixed-time 1")
    bfs_sols, _, _ = run(rtt, "tsearch" + base)
    dfs_sols, _, _ = run(rtt, "dtsearch" + base)
    assert {s.state.canon for s in bfs_sols} == {s.state.canon for s in dfs_sols}


def test_trew_exact_depth(rtt):
    sols, _, status = run(rtt, "trew [0] in rtt : init"
                               " using delay or action with sampling fixed-time 1")
    assert clocks(sols) == [0] and sols[0].state == rtt.init
    sols1, _, _ = run(rtt, "trew [1] in rtt : init"
                           " using delay or action with sampling fixed-time 1")
    assert len(sols1) == 1  # only send applies at init
    sols8, _, _ = run(rtt, "trew [8, 3] in rtt : init"
                           " using delay or action with sampling fixed-time 1")
    assert len(sols8) == 3
    assert all(s.rounds == 8 for s in sols8)


def test_trew_dead_end_yields_nothing(rtt):
    # apply send succeeds once and then fails: no state lies 3 rounds deep
    sols, _, status = run(rtt, "trew [3] in rtt : init"
                               " using apply send with sampling fixed-time 1")
    assert status == "no-solutions" and sols == []


def test_tsim_reports_stuck_branches(rtt):
    # a strategy that can only send once gets stuck below the bound
    sols, _, status = run(rtt, "tsim [1] in rtt : init"
                               " using apply send with sampling fixed-time 1"
                               " until 100")
    assert status == "ok"
    assert len(sols) == 1 and sols[0].stuck and sols[0].clock == 0
    assert "(stuck)" in sols[0].text()


def test_tsim_until_zero_returns_init(rtt):
    sols, _, _ = run(rtt, "tsim [1] in rtt : init"
                          " using delay or action with sampling fixed-time 1 until 0")
    assert clocks(sols) == [0] and not sols[0].stuck


def test_usearch_solutions_are_untimed(rtt):
    sols, _, status = run(rtt, "usearch [2] in rtt : init =>"
                               " matches {< S : Sender | rtt : 50, ATTS > CONF}"
                               " using delay or action with sampling"
                               " max-time with default 4")
    assert status == "ok" and len(sols) == 2
    assert all(not s.timed for s in sols)
    assert all("in time" not in s.text() for s in sols)


def test_max_states_budget(rtt):
    sols, stats, status = run(rtt, "tsearch [2] in rtt : init =>"
                                   " matches {< S : Sender | rtt : 20, ATTS > CONF}"
                                   " in time R using delay or action"
                                   " with sampling fixed-time 1",
                              max_states=50)
    assert status == "budget-exhausted"
    assert stats.budget_exhausted


def test_max_rounds_budget(rtt):
    _, stats, status = run(rtt, "tsearch in rtt : init =>"
                                " matches {STATE} in time T using delay or action"
                                " with sampling fixed-time 1",
                           max_rounds=5)
    assert status == "budget-exhausted" and stats.budget_exhausted


def test_find_latest_budget_reports_best_so_far(rtt):
    sols, stats, status = run(rtt, "find latest in rtt : init =>"
                                   " matches {< S : Sender | rtt : T3, ATTS > CONF}"
                                   " in time R s.t. T3 =/= INF"
                                   " using action or delay with sampling fixed-time 1",
                              max_states=300)
    assert status == "budget-exhausted"
    assert stats.incomplete
    assert sols and sols[0].clock >= 12


def test_find_earliest_branch_and_bound(rtt_scaled):
    sols, _, status = run(rtt_scaled,
                          "find earliest in rtt : init =>"
                          " matches {< S : Sender | rtt : T3, ATTS > CONF}"
                          " in time R s.t. T3 =/= INF"
                          " using action or delay with sampling fixed-time 1")
    assert status == "ok" and clocks(sols) == [12]


def test_find_latest_ties_return_all():
    m = load_model("""
model fork
class Cell | static val : Sym, timer fuse : TimeInf
rule go1: < C : Cell | val : a > => < C : Cell | val : b >
rule go2: < C : Cell | val : a > => < C : Cell | val : c >
init: { < x : Cell | val : a, fuse : INF > } in time 0
""")
    sols, _, status = run(m, "find latest in fork : init =>"
                             " matches {< X : Cell | val : V, ATTS > CONF} in time T"
                             " s.t. V =/= a using action with sampling fixed-time 1")
    assert status == "ok"
    assert sorted(str(s.state.config.entities[0].attrs["val"]) for s in sols) == ["b", "c"]


def test_deterministic_output_across_runs(rtt):
    text = ("tsearch [3] in rtt : init => matches {STATE} in time T"
            " using delay or action with sampling fixed-time 1 in time [0, 8]")
    first = [(s.state.canon, s.rounds) for s in run(rtt, text)[0]]
    for _ in range(3):
        again = [(s.state.canon, s.rounds) for s in run(rtt, text)[0]]
        assert again == first


def test_rule_priority_strategy(rtt):
    # send/respond before other rules before delays: messages move as fast
    # as possible, so the earliest recordable value appears at clock 12
    from tstrat.bundled import bundled_strategy_text

    sols, _, status = run(rtt, bundled_strategy_text("rtt-priority"))
    assert status == "ok" and clocks(sols) == [12]


def test_mixed_sampling_covers_all_rtt_values(rtt_scaled):
    # stepping by 1 only while a message is in flight covers exactly the
    # behaviors of always stepping by 1; maximal sampling covers strictly
    # fewer (only the slowest delivery)
    def recorded_values(tau):
        sols, _, status = run(rtt_scaled,
                              "tsearch in rtt : init => matches {STATE} in time T"
                              f" using delay or action with sampling {tau}"
                              " in time [0, 200]", timeout=60)
        assert status == "ok"
        out = set()
        for s in sols:
            for e in s.state.config:
                if getattr(e, "cls", None) == "Sender" and e.attrs["rtt"] is not INF:
                    out.add(e.attrs["rtt"])
        return out

    fixed = recorded_values("fixed-time 1")
    mixed = recorded_values(
        "switch when matches {CONF dly(M, T1, T2)} in time R do fixed-time 1"
        " otherwise max-time with default 1")
    maximal = recorded_values("max-time with default 1")
    assert mixed == fixed == set(range(12, 51))
    assert maximal == {50}
    assert maximal < fixed


def test_solutions_satisfy_condition_independent_recheck(rtt):
    from tstrat.matching import match_pattern
    from tstrat.parser import parse_pattern

    sols, _, _ = run(rtt, "tsearch [2] in rtt : init =>"
                          " matches {< S : Sender | rtt : 20, ATTS > CONF} in time R"
                          " using delay or action with sampling fixed-time 1")
    pat = parse_pattern("{< S : Sender | rtt : 20, ATTS > CONF} in time R")
    for s in sols:
        assert match_pattern(pat, s.state)
