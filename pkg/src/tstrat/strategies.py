"""ASTs for conditions, strategies and commands, with the pretty-printer.

Printing is precedence-aware so that ``parse(pretty(ast)) == ast`` holds
for every AST (property-tested).  Precedence, tightest first: prefix
forms, then ``;``, then ``or-else``, then ``or`` for strategies; ``not``,
``/\\``, ``\\/`` for conditions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .matching import ConfigPattern, EBin, EIf, ELit, EMin, ENot, EVar, Expr
from .timedomain import Interval


# ---------------------------------------------------------------------------
# Conditions.

@dataclass(frozen=True)
class CMatches:
    pattern: ConfigPattern


@dataclass(frozen=True)
class CIn:
    interval: Interval


@dataclass(frozen=True)
class CAfter:
    time: int


@dataclass(frozen=True)
class CAfterEq:
    time: int


@dataclass(frozen=True)
class CBefore:
    time: int


@dataclass(frozen=True)
class CBeforeEq:
    time: int


@dataclass(frozen=True)
class CAnd:
    left: "SCond"
    right: "SCond"


@dataclass(frozen=True)
class COr:
    left: "SCond"
    right: "SCond"


@dataclass(frozen=True)
class CNot:
    arg: "SCond"


SCond = Union[CMatches, CIn, CAfter, CAfterEq, CBefore, CBeforeEq, CAnd, COr, CNot]


# ---------------------------------------------------------------------------
# Discrete strategies (user-level plus the extended command forms).

@dataclass(frozen=True)
class SApply:
    label: str


@dataclass(frozen=True)
class SApplyFirst:
    labels: tuple


@dataclass(frozen=True)
class SEager:
    labels: Optional[tuple] = None  # None applies all rules


@dataclass(frozen=True)
class SAction:
    pass


@dataclass(frozen=True)
class SDelay:
    pass


@dataclass(frozen=True)
class SSeq:
    left: "DStrat"
    right: "DStrat"


@dataclass(frozen=True)
class SOr:
    left: "DStrat"
    right: "DStrat"


@dataclass(frozen=True)
class SOrElse:
    left: "DStrat"
    right: "DStrat"


@dataclass(frozen=True)
class SIf:
    cond: SCond
    then: "DStrat"
    other: "DStrat"


@dataclass(frozen=True)
class SStop:
    pass


@dataclass(frozen=True)
class SSkip:
    pass


@dataclass(frozen=True)
class SGetSet:
    gets: tuple  # of (key, PatTerm)
    sets: tuple  # of (key, Expr)


@dataclass(frozen=True)
class SCheck:
    cond: SCond


@dataclass(frozen=True)
class SUntil:
    cond: SCond
    body: "DStrat"


@dataclass(frozen=True)
class SRepeat:
    body: "DStrat"


@dataclass(frozen=True)
class SSteps:
    count: int
    body: "DStrat"


DStrat = Union[
    SApply, SApplyFirst, SEager, SAction, SDelay, SSeq, SOr, SOrElse,
    SIf, SStop, SSkip, SGetSet, SCheck, SUntil, SRepeat, SSteps,
]


# ---------------------------------------------------------------------------
# Timed (sampling) strategies.

@dataclass(frozen=True)
class TFixed:
    delta: int

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("fixed-time increment must be positive")


@dataclass(frozen=True)
class TMaxDefault:
    default: int

    def __post_init__(self):
        if self.default <= 0:
            raise ValueError("max-time default must be positive")


@dataclass(frozen=True)
class TSwitch:
    cases: tuple  # of (SCond, TStrat), nonempty
    otherwise: "TStrat"

    def __post_init__(self):
        if not self.cases:
            raise ValueError("switch needs at least one case")


@dataclass(frozen=True)
class TUntime:
    inner: "TStrat"


TStrat = Union[TFixed, TMaxDefault, TSwitch, TUntime]


# ---------------------------------------------------------------------------
# Commands.

@dataclass(frozen=True)
class CmdTsim:
    model: str
    mu: DStrat
    tau: TStrat
    bound: int
    limit: Optional[int] = None


@dataclass(frozen=True)
class CmdTrew:
    model: str
    mu: DStrat
    tau: TStrat
    depth: int
    limit: Optional[int] = None


@dataclass(frozen=True)
class CmdSearch:
    model: str
    cond: SCond
    mu: DStrat
    tau: TStrat
    limit: Optional[int] = None
    depth: Optional[int] = None
    interval: Optional[Interval] = None
    depth_first: bool = False
    untimed: bool = False

    @property
    def name(self) -> str:
        base = "usearch" if self.untimed else "tsearch"
        return ("d" + base) if self.depth_first else base


@dataclass(frozen=True)
class CmdFind:
    model: str
    cond: SCond
    mu: DStrat
    tau: TStrat
    latest: bool = False

    @property
    def name(self) -> str:
        return "find latest" if self.latest else "find earliest"


Command = Union[CmdTsim, CmdTrew, CmdSearch, CmdFind]


# ---------------------------------------------------------------------------
# Pretty-printer.

_EXPR_PREC = {"\\/": 1, "/\\": 2, "not": 3, "cmp": 4, "add": 5, "atom": 6}


def expr_text(e: Expr, min_prec: int = 0) -> str:
    if isinstance(e, ELit):
        from .configuration import format_value

        return format_value(e.value)
    if isinstance(e, EVar):
        return e.name
    if isinstance(e, EMin):
        return f"min({expr_text(e.left)}, {expr_text(e.right)})"
    if isinstance(e, EIf):
        return f"if {expr_text(e.cond)} then {expr_text(e.then)} else {expr_text(e.other)} fi"
    if isinstance(e, ENot):
        text = f"not {expr_text(e.arg, _EXPR_PREC['not'])}"
        prec = _EXPR_PREC["not"]
    elif isinstance(e, EBin):
        if e.op in ("+", "monus"):
            prec = _EXPR_PREC["add"]
            # left-assoc: right operand needs strictly tighter
            text = f"{expr_text(e.left, prec)} {e.op} {expr_text(e.right, prec + 1)}"
        elif e.op in ("==", "=/=", "<", "<=", ">", ">="):
            prec = _EXPR_PREC["cmp"]
            text = f"{expr_text(e.left, prec + 1)} {e.op} {expr_text(e.right, prec + 1)}"
        else:  # /\ \/
            prec = _EXPR_PREC[e.op]
            text = f"{expr_text(e.left, prec)} {e.op} {expr_text(e.right, prec + 1)}"
    else:
        raise TypeError(f"not an expression: {e!r}")
    if prec < min_prec:
        return f"({text})"
    return text


def _map_entries_text(entries, value_text) -> str:
    return ", ".join(f"'{k} |-> {value_text(v)}" for k, v in entries)


def cond_text(c: SCond, min_prec: int = 0) -> str:
    # precedence: atoms 3, not 2 (prefix), /\ 2, \/ 1
    if isinstance(c, CMatches):
        text = f"matches {c.pattern}"
        if c.pattern.guard is not None:
            base = ConfigPattern(c.pattern.entities, c.pattern.rest, c.pattern.clock,
                                 c.pattern.history, None)
            text = f"matches {base} s.t. {expr_text(c.pattern.guard)}"
        # a guard would swallow trailing connectives; parenthesize whenever
        # `matches` is a proper sub-condition
        if min_prec > 0:
            return f"({text})"
        return text
    if isinstance(c, CIn):
        return f"in {c.interval}"
    if isinstance(c, CAfter):
        return f"after {c.time}"
    if isinstance(c, CAfterEq):
        return f"after= {c.time}"
    if isinstance(c, CBefore):
        return f"before {c.time}"
    if isinstance(c, CBeforeEq):
        return f"before= {c.time}"
    if isinstance(c, CNot):
        text, prec = f"not {cond_text(c.arg, 3)}", 2
    elif isinstance(c, CAnd):
        text, prec = f"{cond_text(c.left, 2)} /\\ {cond_text(c.right, 3)}", 2
    elif isinstance(c, COr):
        text, prec = f"{cond_text(c.left, 1)} \\/ {cond_text(c.right, 2)}", 1
    else:
        raise TypeError(f"not a condition: {c!r}")
    if prec < min_prec:
        return f"({text})"
    return text


def strat_text(s: DStrat, min_prec: int = 0) -> str:
    # precedence: prefix/atoms 4, ; 3, or-else 2, or 1
    if isinstance(s, SApply):
        return f"apply {s.label}"
    if isinstance(s, SApplyFirst):
        return f"apply [{' '.join(s.labels)}]"
    if isinstance(s, SEager):
        return "eager" if s.labels is None else f"eager [{' '.join(s.labels)}]"
    if isinstance(s, SAction):
        return "action"
    if isinstance(s, SDelay):
        return "delay"
    if isinstance(s, SStop):
        return "stop"
    if isinstance(s, SSkip):
        return "skip"
    if isinstance(s, SGetSet):
        gets = _map_entries_text(s.gets, str)
        sets = _map_entries_text(s.sets, expr_text)
        return f"get ({gets}) and set ({sets})"
    if isinstance(s, SCheck):
        return f"check ({cond_text(s.cond)})"
    # the remaining prefix forms take a greedy body (it absorbs a following
    # `;`), so compound bodies are parenthesized and the whole form gets
    # parens anywhere material could follow it
    if isinstance(s, SIf):
        text = (f"if {cond_text(s.cond)} then {strat_text(s.then, 4)} "
                f"else {strat_text(s.other, 4)}")
        prec = 1
    elif isinstance(s, SUntil):
        text, prec = f"until ({cond_text(s.cond)}) do {strat_text(s.body, 4)}", 1
    elif isinstance(s, SRepeat):
        text, prec = f"repeat {strat_text(s.body, 4)}", 1
    elif isinstance(s, SSteps):
        text, prec = f"{s.count} steps with {strat_text(s.body, 4)}", 1
    elif isinstance(s, SSeq):
        text, prec = f"{strat_text(s.left, 3)} ; {strat_text(s.right, 4)}", 3
    elif isinstance(s, SOrElse):
        text, prec = f"{strat_text(s.left, 2)} or-else {strat_text(s.right, 3)}", 2
    elif isinstance(s, SOr):
        text, prec = f"{strat_text(s.left, 1)} or {strat_text(s.right, 2)}", 1
    else:
        raise TypeError(f"not a strategy: {s!r}")
    if prec < min_prec:
        return f"({text})"
    return text


def tstrat_text(t: TStrat, embedded: bool = False) -> str:
    if isinstance(t, TFixed):
        return f"fixed-time {t.delta}"
    if isinstance(t, TMaxDefault):
        return f"max-time with default {t.default}"
    if isinstance(t, TUntime):
        return f"untime ({tstrat_text(t.inner)})"
    if isinstance(t, TSwitch):
        cases = " ".join(f"when {cond_text(c)} do {tstrat_text(tau, embedded=True)}"
                         for c, tau in t.cases)
        text = f"switch {cases} otherwise {tstrat_text(t.otherwise, embedded=True)}"
        return f"({text})" if embedded else text
    raise TypeError(f"not a timed strategy: {t!r}")


def pair_text(mu: DStrat, tau: TStrat) -> str:
    return f"< {strat_text(mu)} , {tstrat_text(tau)} >"


def command_text(cmd: Command) -> str:
    if isinstance(cmd, CmdTsim):
        head = "tsim" if cmd.limit is None else f"tsim [{cmd.limit}]"
        return (f"{head} in {cmd.model} : init using {strat_text(cmd.mu)} "
                f"with sampling {tstrat_text(cmd.tau)} until {cmd.bound}")
    if isinstance(cmd, CmdTrew):
        head = f"trew [{cmd.depth}]" if cmd.limit is None else f"trew [{cmd.depth}, {cmd.limit}]"
        return (f"{head} in {cmd.model} : init using {strat_text(cmd.mu)} "
                f"with sampling {tstrat_text(cmd.tau)}")
    if isinstance(cmd, CmdSearch):
        head = cmd.name
        if cmd.limit is not None or cmd.depth is not None:
            inner = "" if cmd.limit is None else str(cmd.limit)
            if cmd.depth is not None:
                inner += f", {cmd.depth}"
            head += f" [{inner}]"
        text = (f"{head} in {cmd.model} : init => {cond_text(cmd.cond)} "
                f"using {strat_text(cmd.mu)} with sampling {tstrat_text(cmd.tau)}")
        if cmd.interval is not None:
            text += f" in time {cmd.interval}"
        return text
    if isinstance(cmd, CmdFind):
        return (f"{cmd.name} in {cmd.model} : init => {cond_text(cmd.cond)} "
                f"using {strat_text(cmd.mu)} with sampling {tstrat_text(cmd.tau)}")
    raise TypeError(f"not a command: {cmd!r}")
