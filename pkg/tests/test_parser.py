import random

import pytest

from tstrat.bundled import bundled_strategy_names, bundled_strategy_text
from tstrat.matching import (
    ConfigPattern,
    EBin,
    ELit,
    EVar,
    Lit,
    MsgPattern,
    ObjPattern,
    Var,
)
from tstrat.parser import (
    ParseError,
    parse_command,
    parse_cond,
    parse_expr,
    parse_pattern,
    parse_strategy,
    parse_strategy_pair,
    parse_tstrat,
)
from tstrat.strategies import (
    CAfter,
    CAfterEq,
    CAnd,
    CBefore,
    CBeforeEq,
    CIn,
    CMatches,
    CNot,
    COr,
    CmdFind,
    CmdSearch,
    CmdTrew,
    CmdTsim,
    SAction,
    SApply,
    SApplyFirst,
    SCheck,
    SDelay,
    SEager,
    SGetSet,
    SIf,
    SOr,
    SOrElse,
    SRepeat,
    SSeq,
    SSkip,
    SSteps,
    SStop,
    SUntil,
    TFixed,
    TMaxDefault,
    TSwitch,
    TUntime,
    command_text,
    cond_text,
    strat_text,
    tstrat_text,
)
from tstrat.timedomain import INF, Interval


def test_parse_tsearch_command():
    cmd = parse_command(
        "tsearch [2] in rtt : init => matches {< snd : Sender | rtt : 20, ATTS > CONF}"
        " in time R using delay or action with sampling fixed-time 1")
    assert isinstance(cmd, CmdSearch)
    assert cmd.model == "rtt" and cmd.limit == 2 and cmd.depth is None
    assert cmd.mu == SOr(SDelay(), SAction())
    assert cmd.tau == TFixed(1)
    assert isinstance(cmd.cond, CMatches)


def test_parse_find_earliest():
    cmd = parse_command(
        "find earliest in rtt : init => matches {STATE} in time T2"
        " using action or delay with sampling fixed-time 1")
    assert isinstance(cmd, CmdFind) and not cmd.latest
    assert cmd.mu == SOr(SAction(), SDelay())


def test_parse_depth_zero_bound():
    cmd = parse_command(
        "tsearch [2,0] in rtt : init => matches {STATE} in time T"
        " using action with sampling fixed-time 1")
    assert cmd.limit == 2 and cmd.depth == 0


def test_parse_strategy_pair_pairs():
    mu, tau = parse_strategy_pair("< delay or action , fixed-time 1 >")
    assert mu == SOr(SDelay(), SAction())
    assert tau == TFixed(1)
    mu, tau = parse_strategy_pair("< eager , max-time with default 4 >")
    assert mu == SEager(None) and tau == TMaxDefault(4)


def test_parse_switch_sampling():
    tau = parse_tstrat(
        "switch when matches {CONF dly(M, T1, T2)} in time R do fixed-time 1"
        " otherwise max-time with default 1")
    assert isinstance(tau, TSwitch) and len(tau.cases) == 1
    assert tau.cases[0][1] == TFixed(1)
    assert tau.otherwise == TMaxDefault(1)


def test_fixed_time_zero_rejected():
    with pytest.raises(ParseError):
        parse_tstrat("fixed-time 0")
    with pytest.raises(ParseError):
        parse_tstrat("max-time with default 0")


def test_usearch_rejects_interval():
    with pytest.raises(ParseError):
        parse_command("usearch [1] in rtt : init => matches {STATE}"
                      " using action with sampling fixed-time 1 in time [0, 5]")


def test_precedence_or_binds_loosest():
    s = parse_strategy("delay or action ; skip")
    assert s == SOr(SDelay(), SSeq(SAction(), SSkip()))
    s2 = parse_strategy("(delay or action) ; skip")
    assert s2 == SSeq(SOr(SDelay(), SAction()), SSkip())
    assert parse_strategy(strat_text(s)) == s
    assert parse_strategy(strat_text(s2)) == s2


def test_or_else_between_seq_and_or():
    s = parse_strategy("apply a or apply b or-else apply c ; apply d")
    assert s == SOr(SApply("a"), SOrElse(SApply("b"), SSeq(SApply("c"), SApply("d"))))


def test_qid_labels_accepted():
    assert parse_strategy("apply 'send") == SApply("send")
    assert parse_strategy("apply ['send 'respond]") == SApplyFirst(("send", "respond"))


def test_example_history_strategy_parses():
    mu = parse_strategy(
        "delay or (if matches {< S : Sender | timer : 0, ATTS > CONF} in time T"
        " then (if matches ('C |-> N) s.t. N <= 1"
        " then apply skipRound ; (get ('C |-> N) and set ('C |-> N + 1))"
        " else apply send ; (get ('C |-> N) and set ('C |-> 0)))"
        " else action)")
    assert isinstance(mu, SOr) and isinstance(mu.right, SIf)
    inner = mu.right.then
    assert isinstance(inner, SIf)
    assert isinstance(inner.then, SSeq) and isinstance(inner.then.right, SGetSet)


def test_pretty_prints_atoms():
    assert strat_text(SSkip()) == "skip"
    assert strat_text(SStop()) == "stop"
    assert tstrat_text(TMaxDefault(4)) == "max-time with default 4"
    assert cond_text(CAfterEq(7)) == "after= 7"


def test_bundled_corpus_round_trips():
    for name in bundled_strategy_names():
        cmd = parse_command(bundled_strategy_text(name))
        assert parse_command(command_text(cmd)) == cmd


def test_interval_forms():
    c = parse_cond("in [3, INF]")
    assert c == CIn(Interval(3, INF))
    with pytest.raises(ParseError):
        parse_cond("in [5, 3]")


def test_cond_connective_precedence():
    c = parse_cond("not after 3 /\\ before 9 \\/ in [0, 2]")
    assert c == COr(CAnd(CNot(CAfter(3)), CBefore(9)), CIn(Interval(0, 2)))


def test_expr_parses_guards():
    e = parse_expr("T2 monus T")
    assert e == EBin("monus", EVar("T2"), EVar("T"))
    e = parse_expr("T3 =/= INF /\\ T3 =/= 0")
    assert e == EBin("/\\", EBin("=/=", EVar("T3"), ELit(INF)),
                     EBin("=/=", EVar("T3"), ELit(0)))
    e = parse_expr("if M == INF then 4 else 9 fi")
    from tstrat.matching import eval_expr
    assert eval_expr(e, {"M": INF}) == 4


def test_parse_error_positions():
    with pytest.raises(ParseError) as err:
        parse_command("tsearch [2] in rtt : init => matches {oops")
    assert err.value.line == 1 and err.value.col > 0


# -- random AST round-trip ---------------------------------------------------------

def _gen_expr(rng, depth):
    if depth == 0 or rng.random() < 0.4:
        return rng.choice([ELit(rng.randrange(5)), ELit(INF), EVar("N")])
    op = rng.choice(["+", "monus"])
    return EBin(op, _gen_expr(rng, depth - 1), _gen_expr(rng, depth - 1))


def _gen_pattern(rng):
    choices = []
    n = rng.randrange(0, 3)
    for i in range(n):
        if rng.random() < 0.5:
            choices.append(ObjPattern(Var(f"O{i}"), "Sender",
                                      (("rtt", rng.choice([Lit(20), Var(f"X{i}")])),),
                                      f"A{i}" if rng.random() < 0.5 else None))
        else:
            choices.append(MsgPattern("ping", (Var(f"P{i}"),)))
    rest = rng.choice([None, "CONF"])
    clock = rng.choice([None, Var("R"), Lit(rng.randrange(9))])
    history = (("C", Var("N")),) if rng.random() < 0.3 else ()
    guard = EBin("<=", EVar("N"), ELit(1)) if history and rng.random() < 0.5 else None
    return ConfigPattern(tuple(choices), rest, clock, history, guard)


def _gen_cond(rng, depth):
    if depth == 0 or rng.random() < 0.45:
        return rng.choice([
            CAfter(rng.randrange(9)), CAfterEq(rng.randrange(9)),
            CBefore(rng.randrange(9)), CBeforeEq(rng.randrange(9)),
            CIn(Interval(1, rng.choice([7, INF]))),
            CMatches(_gen_pattern(rng)),
        ])
    k = rng.random()
    if k < 0.4:
        return CAnd(_gen_cond(rng, depth - 1), _gen_cond(rng, depth - 1))
    if k < 0.8:
        return COr(_gen_cond(rng, depth - 1), _gen_cond(rng, depth - 1))
    return CNot(_gen_cond(rng, depth - 1))


def _gen_tstrat(rng, depth):
    if depth == 0 or rng.random() < 0.5:
        return rng.choice([TFixed(1 + rng.randrange(4)),
                           TMaxDefault(1 + rng.randrange(4))])
    if rng.random() < 0.5:
        cases = tuple((_gen_cond(rng, 1), _gen_tstrat(rng, depth - 1))
                      for _ in range(1 + rng.randrange(2)))
        return TSwitch(cases, _gen_tstrat(rng, depth - 1))
    return TUntime(_gen_tstrat(rng, depth - 1))


def _gen_strat(rng, depth):
    if depth == 0 or rng.random() < 0.35:
        return rng.choice([
            SAction(), SDelay(), SStop(), SSkip(), SEager(None),
            SEager(("send", "respond")), SApply("send"),
            SApplyFirst(("send", "respond")),
            SGetSet((("C", Var("N")),), (("C", EBin("+", EVar("N"), ELit(1))),)),
            SCheck(_gen_cond(rng, 1)),
        ])
    k = rng.random()
    a = _gen_strat(rng, depth - 1)
    b = _gen_strat(rng, depth - 1)
    if k < 0.2:
        return SSeq(a, b)
    if k < 0.4:
        return SOr(a, b)
    if k < 0.55:
        return SOrElse(a, b)
    if k < 0.7:
        return SIf(_gen_cond(rng, 1), a, b)
    if k < 0.8:
        return SUntil(_gen_cond(rng, 1), a)
    if k < 0.9:
        return SRepeat(a)
    return SSteps(rng.randrange(4), a)


def test_round_trip_random_asts():
    rng = random.Random(2024)
    for _ in range(1000):
        mu = _gen_strat(rng, 3)
        tau = _gen_tstrat(rng, 2)
        text = f"< {strat_text(mu)} , {tstrat_text(tau)} >"
        mu2, tau2 = parse_strategy_pair(text)
        assert mu2 == mu, text
        assert tau2 == tau, text


def test_round_trip_random_commands():
    rng = random.Random(7)
    for _ in range(200):
        kind = rng.randrange(4)
        mu, tau = _gen_strat(rng, 2), _gen_tstrat(rng, 1)
        if kind == 0:
            cmd = CmdTsim("rtt", mu, tau, rng.randrange(100),
                          rng.choice([None, 1, 5]))
        elif kind == 1:
            cmd = CmdTrew("rtt", mu, tau, rng.randrange(5), rng.choice([None, 2]))
        elif kind == 2:
            untimed = rng.random() < 0.3
            cmd = CmdSearch("rtt", _gen_cond(rng, 1), mu, tau,
                            limit=rng.choice([None, 3]),
                            depth=rng.choice([None, 2]),
                            interval=None if untimed else rng.choice([None, Interval(0, 9)]),
                            depth_first=rng.random() < 0.5,
                            untimed=untimed)
        else:
            cmd = CmdFind("rtt", _gen_cond(rng, 1), mu, tau, rng.random() < 0.5)
        assert parse_command(command_text(cmd)) == cmd


def test_grammar_covers_every_constructor():
    # every condition / strategy / sampling constructor is reachable from
    # the concrete grammar
    samples = {
        CMatches: "matches {CONF}",
        CIn: "in [0, 4]",
        CAfter: "after 1", CAfterEq: "after= 1",
        CBefore: "before 1", CBeforeEq: "before= 1",
        CAnd: "after 1 /\\ before 2", COr: "after 1 \\/ before 2",
        CNot: "not after 1",
    }
    for cls, text in samples.items():
        assert isinstance(parse_cond(text), cls)
    strat_samples = {
        SApply: "apply send", SApplyFirst: "apply [a b]",
        SEager: "eager", SAction: "action", SDelay: "delay",
        SSeq: "skip ; skip", SOr: "skip or skip", SOrElse: "skip or-else skip",
        SIf: "if after 1 then skip else stop", SStop: "stop", SSkip: "skip",
        SGetSet: "get ('C |-> N) and set ('C |-> N)",
        SCheck: "check after 1", SUntil: "until after 1 do skip",
        SRepeat: "repeat skip", SSteps: "3 steps with skip",
    }
    for cls, text in strat_samples.items():
        assert isinstance(parse_strategy(text), cls)
    tstrat_samples = {
        TFixed: "fixed-time 1",
        TMaxDefault: "max-time with default 2",
        TSwitch: "switch when after 1 do fixed-time 1 otherwise fixed-time 2",
        TUntime: "untime fixed-time 1",
    }
    for cls, text in tstrat_samples.items():
        assert isinstance(parse_tstrat(text), cls)
    command_samples = {
        "tsim": "tsim [1] in m : init using skip with sampling fixed-time 1 until 9",
        "trew": "trew [3, 1] in m : init using skip with sampling fixed-time 1",
        "tsearch": "tsearch in m : init => after 1 using skip with sampling fixed-time 1",
        "dtsearch": "dtsearch [1] in m : init => after 1 using skip with sampling fixed-time 1",
        "usearch": "usearch in m : init => after 1 using skip with sampling fixed-time 1",
        "dusearch": "dusearch in m : init => after 1 using skip with sampling fixed-time 1",
        "find earliest": "find earliest in m : init => after 1 using skip with sampling fixed-time 1",
        "find latest": "find latest in m : init => after 1 using skip with sampling fixed-time 1",
    }
    for name, text in command_samples.items():
        cmd = parse_command(text)
        got = getattr(cmd, "name", None) or type(cmd).__name__[3:].lower()
        assert got == name


def test_pattern_round_trip_via_str():
    texts = [
        "{CONF dly(M, T1, T2)} in time R",
        "{< snd : Sender | rtt : 20, ATTS > CONF}",
        "{STATE} in time T2",
        "('C |-> N)",
        "{none}",
    ]
    for text in texts:
        pat = parse_pattern(text)
        again = parse_pattern(str(pat))
        assert again == pat
