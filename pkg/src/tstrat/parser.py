"""Lexer and recursive-descent parsers for the strategy language, analysis
commands, and model files.

One token stream serves every surface syntax.  Identifiers starting with
an uppercase letter (or ``_``) are variables; lowercase identifiers are
symbols, keywords, or rule labels; ``'name`` is accepted as a label/key
synonym.  Comments run from ``---`` to end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .configuration import Configuration, DlyMsg, Msg, Obj, ClockedState, StratState
from .matching import (
    ConfigPattern,
    DlyPattern,
    EBin,
    EIf,
    ELit,
    EMin,
    ENot,
    EVar,
    Lit,
    MsgPattern,
    ObjPattern,
    Var,
    expr_vars,
    validate_pattern,
)
from .model import (
    AttrKind,
    ClassDecl,
    DELIVER,
    DlyTemplate,
    EntityRef,
    Model,
    MsgDecl,
    MsgTemplate,
    ObjTemplate,
    Rule,
    TICK,
    deliver_rule,
)
from .strategies import (
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
)
from .timedomain import INF, Interval


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = "<input>"):
        super().__init__(f"{source}:{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.source = source


@dataclass
class Token:
    kind: str  # NAT, ID, VAR, QID, INF, PUNCT, EOF
    value: object
    line: int
    col: int


_PUNCTS = ["|->", "=/=", "==", "<=", ">=", "=>", "/\\", "\\/",
           "{", "}", "(", ")", "[", "]", "<", ">", "|", ",", ":", ";", "+", "/"]

_NAT_RE = re.compile(r"\d+")
_QID_RE = re.compile(r"'([A-Za-z][A-Za-z0-9_-]*)")
_ST_RE = re.compile(r"s\.t\.")
_ID_RE = re.compile(r"[a-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*")
_VAR_RE = re.compile(r"[A-Z_][A-Za-z0-9_]*")

RESERVED = {
    "model", "class", "msg", "rule", "init", "if", "then", "else", "fi",
    "not", "monus", "min", "true", "false", "none", "dly",
    "apply", "eager", "action", "delay", "stop", "skip", "get", "set", "and",
    "or", "or-else", "check", "until", "do", "repeat", "steps", "with",
    "matches", "in", "time", "after", "before", "after=", "before=",
    "using", "sampling", "switch", "when", "otherwise", "untime",
    "fixed-time", "max-time", "default",
    "tsim", "trew", "tsearch", "dtsearch", "usearch", "dusearch",
    "find", "earliest", "latest",
}


def tokenize(text: str, source: str = "<input>"):
    tokens = []
    pos, line, col = 0, 1, 1
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch == "\n":
            pos += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            pos += 1
            col += 1
            continue
        if text.startswith("---", pos):
            end = text.find("\n", pos)
            if end < 0:
                break
            col += end - pos
            pos = end
            continue
        m = _ST_RE.match(text, pos)
        if m:
            tokens.append(Token("PUNCT", "s.t.", line, col))
            pos, col = m.end(), col + 4
            continue
        m = _NAT_RE.match(text, pos)
        if m:
            tokens.append(Token("NAT", int(m.group()), line, col))
            col += m.end() - pos
            pos = m.end()
            continue
        m = _QID_RE.match(text, pos)
        if m:
            tokens.append(Token("QID", m.group(1), line, col))
            col += m.end() - pos
            pos = m.end()
            continue
        m = _VAR_RE.match(text, pos)
        if m:
            word = m.group()
            kind = "INF" if word == "INF" else "VAR"
            tokens.append(Token(kind, word, line, col))
            col += m.end() - pos
            pos = m.end()
            continue
        m = _ID_RE.match(text, pos)
        if m:
            word = m.group()
            end = m.end()
            # `after=` / `before=` are single keywords
            if word in ("after", "before") and end < n and text[end] == "=" \
                    and not text.startswith("==", end) and not text.startswith("=/=", end):
                word += "="
                end += 1
            tokens.append(Token("ID", word, line, col))
            col += end - pos
            pos = end
            continue
        for p in _PUNCTS:
            if text.startswith(p, pos):
                tokens.append(Token("PUNCT", p, line, col))
                pos += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col, source)
    tokens.append(Token("EOF", None, line, col))
    return tokens


class Parser:
    def __init__(self, text: str, source: str = "<input>"):
        self.source = source
        self.tokens = tokenize(text, source)
        self.pos = 0

    # -- token plumbing -------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Token = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col, self.source)

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.value == value

    def at_word(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind == "ID" and tok.value == value

    def accept_punct(self, value: str) -> bool:
        if self.at_punct(value):
            self.next()
            return True
        return False

    def accept_word(self, value: str) -> bool:
        if self.at_word(value):
            self.next()
            return True
        return False

    def expect_punct(self, value: str) -> Token:
        if not self.at_punct(value):
            self.error(f"expected {value!r}")
        return self.next()

    def expect_word(self, value: str) -> Token:
        if not self.at_word(value):
            self.error(f"expected keyword {value!r}")
        return self.next()

    def expect_nat(self) -> int:
        tok = self.peek()
        if tok.kind != "NAT":
            self.error("expected a number")
        return self.next().value

    def expect_id(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.kind != "ID" or tok.value in RESERVED:
            self.error(f"expected {what}")
        return self.next().value

    def expect_name(self, what: str = "name") -> str:
        """Identifier in a naming position; class/type names may be capitalized."""
        tok = self.peek()
        if tok.kind == "VAR" or (tok.kind == "ID" and tok.value not in RESERVED):
            return self.next().value
        self.error(f"expected {what}")

    def expect_label(self) -> str:
        tok = self.peek()
        if tok.kind == "QID":
            return self.next().value
        return self.expect_id("rule label")

    def expect_eof(self):
        if self.peek().kind != "EOF":
            self.error("trailing input")

    # -- expressions ----------------------------------------------------------

    def parse_expr(self):
        return self._expr_or()

    def _expr_or(self):
        e = self._expr_and()
        while self.at_punct("\\/"):
            self.next()
            e = EBin("\\/", e, self._expr_and())
        return e

    def _expr_and(self):
        e = self._expr_not()
        while self.at_punct("/\\"):
            self.next()
            e = EBin("/\\", e, self._expr_not())
        return e

    def _expr_not(self):
        if self.accept_word("not"):
            return ENot(self._expr_not())
        return self._expr_cmp()

    def _expr_cmp(self):
        e = self._expr_add()
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.value in ("==", "=/=", "<", "<=", ">", ">="):
            self.next()
            return EBin(tok.value, e, self._expr_add())
        return e

    def _expr_add(self):
        e = self._expr_primary()
        while True:
            if self.at_punct("+"):
                self.next()
                e = EBin("+", e, self._expr_primary())
            elif self.at_word("monus"):
                self.next()
                e = EBin("monus", e, self._expr_primary())
            else:
                return e

    def _expr_primary(self):
        tok = self.peek()
        if tok.kind == "NAT":
            return ELit(self.next().value)
        if tok.kind == "INF":
            self.next()
            return ELit(INF)
        if tok.kind == "VAR":
            return EVar(self.next().value)
        if tok.kind == "QID":
            return ELit(self.next().value)
        if self.accept_punct("("):
            e = self.parse_expr()
            self.expect_punct(")")
            return e
        if tok.kind == "ID":
            word = tok.value
            if word == "true":
                self.next()
                return ELit(True)
            if word == "false":
                self.next()
                return ELit(False)
            if word == "min":
                self.next()
                self.expect_punct("(")
                a = self.parse_expr()
                self.expect_punct(",")
                b = self.parse_expr()
                self.expect_punct(")")
                return EMin(a, b)
            if word == "if":
                self.next()
                c = self.parse_expr()
                self.expect_word("then")
                a = self.parse_expr()
                self.expect_word("else")
                b = self.parse_expr()
                self.expect_word("fi")
                return EIf(c, a, b)
            if word not in RESERVED:
                return ELit(self.next().value)
        self.error("expected an expression")

    # expression limited to +/monus so it can sit before `>` or `,`
    def _expr_arg(self):
        return self._expr_add()

    # -- pattern terms and values ---------------------------------------------

    def parse_pterm(self):
        tok = self.peek()
        if tok.kind == "NAT":
            return Lit(self.next().value)
        if tok.kind == "INF":
            self.next()
            return Lit(INF)
        if tok.kind == "VAR":
            return Var(self.next().value)
        if tok.kind == "QID":
            return Lit(self.next().value)
        if tok.kind == "ID":
            if tok.value == "true":
                self.next()
                return Lit(True)
            if tok.value == "false":
                self.next()
                return Lit(False)
            if tok.value not in RESERVED:
                return Lit(self.next().value)
        self.error("expected a literal or variable")

    def parse_ground_value(self):
        term = self.parse_pterm()
        if isinstance(term, Var):
            self.error(f"expected a ground value, found variable {term.name}")
        return term.value

    # -- patterns ---------------------------------------------------------------

    def parse_pattern(self) -> ConfigPattern:
        if self.accept_punct("("):
            pat = self.parse_pattern()
            self.expect_punct(")")
            return pat
        if self.peek().kind == "QID":
            entries = self._parse_hist_patterns()
            return ConfigPattern(entities=(), rest="_", history=entries)
        entities, rest = self._parse_config_body()
        clock = None
        history = ()
        if self.at_word("in") and self.peek(1).kind == "ID" and self.peek(1).value == "time":
            self.next()
            self.next()
            clock = self.parse_pterm()
        if self.accept_punct("|"):
            history = self._parse_hist_patterns()
        pat = ConfigPattern(entities=entities, rest=rest, clock=clock, history=history)
        return pat

    def _parse_hist_patterns(self):
        entries = []
        while True:
            tok = self.peek()
            if tok.kind != "QID":
                self.error("expected a 'key history entry")
            key = self.next().value
            self.expect_punct("|->")
            entries.append((key, self.parse_pterm()))
            if not self.accept_punct(","):
                return tuple(entries)

    def _parse_config_body(self):
        self.expect_punct("{")
        entities = []
        rest = None
        if self.accept_word("none"):
            self.expect_punct("}")
            return (), None
        while not self.accept_punct("}"):
            tok = self.peek()
            if tok.kind == "VAR":
                if rest is not None:
                    self.error("at most one rest variable per configuration pattern")
                rest = self.next().value
            else:
                entities.append(self.parse_entity_pattern())
        return tuple(entities), rest

    def parse_entity_pattern(self):
        tok = self.peek()
        if self.at_punct("<"):
            return self._parse_obj_pattern()
        if self.at_word("dly"):
            self.next()
            self.expect_punct("(")
            if self.peek().kind == "VAR":
                inner = Var(self.next().value)
            else:
                inner = self._parse_msg_pattern()
            self.expect_punct(",")
            lower = self.parse_pterm()
            self.expect_punct(",")
            upper = self.parse_pterm()
            self.expect_punct(")")
            return DlyPattern(inner, lower, upper)
        if tok.kind == "ID" and tok.value not in RESERVED:
            return self._parse_msg_pattern()
        self.error("expected an entity pattern")

    def _parse_msg_pattern(self) -> MsgPattern:
        name = self.expect_id("message name")
        self.expect_punct("(")
        args = []
        if not self.accept_punct(")"):
            while True:
                args.append(self.parse_pterm())
                if not self.accept_punct(","):
                    break
            self.expect_punct(")")
        return MsgPattern(name, tuple(args))

    def _parse_obj_pattern(self) -> ObjPattern:
        self.expect_punct("<")
        oid = self.parse_pterm()
        self.expect_punct(":")
        cls = self.expect_name("class name")
        self.expect_punct("|")
        attrs = []
        attr_rest = None
        if not self.at_punct(">"):
            while True:
                tok = self.peek()
                if tok.kind == "VAR":
                    if attr_rest is not None:
                        self.error("at most one rest variable per attribute set")
                    attr_rest = self.next().value
                else:
                    name = self.expect_id("attribute name")
                    self.expect_punct(":")
                    attrs.append((name, self.parse_pterm()))
                if not self.accept_punct(","):
                    break
        self.expect_punct(">")
        return ObjPattern(oid, cls, tuple(attrs), attr_rest)

    # -- ground configurations (model init) -------------------------------------

    def parse_ground_config(self) -> Configuration:
        self.expect_punct("{")
        entities = []
        if self.accept_word("none"):
            self.expect_punct("}")
            return Configuration(())
        while not self.accept_punct("}"):
            entities.append(self._parse_ground_entity())
        return Configuration(entities)

    def _parse_ground_entity(self):
        if self.at_punct("<"):
            self.expect_punct("<")
            oid = self.expect_id("object identifier")
            self.expect_punct(":")
            cls = self.expect_name("class name")
            self.expect_punct("|")
            attrs = {}
            if not self.at_punct(">"):
                while True:
                    name = self.expect_id("attribute name")
                    self.expect_punct(":")
                    attrs[name] = self.parse_ground_value()
                    if not self.accept_punct(","):
                        break
            self.expect_punct(">")
            return Obj(oid, cls, attrs)
        if self.at_word("dly"):
            self.next()
            self.expect_punct("(")
            msg = self._parse_ground_msg()
            self.expect_punct(",")
            lower = self.parse_ground_value()
            self.expect_punct(",")
            upper = self.parse_ground_value()
            self.expect_punct(")")
            return DlyMsg(msg, lower, upper)
        return self._parse_ground_msg()

    def _parse_ground_msg(self) -> Msg:
        name = self.expect_id("message name")
        self.expect_punct("(")
        args = []
        if not self.accept_punct(")"):
            while True:
                args.append(self.parse_ground_value())
                if not self.accept_punct(","):
                    break
            self.expect_punct(")")
        return Msg(name, tuple(args))

    # -- conditions ---------------------------------------------------------------

    def parse_cond(self):
        c = self._cond_and()
        while self.at_punct("\\/"):
            self.next()
            c = COr(c, self._cond_and())
        return c

    def _cond_and(self):
        c = self._cond_not()
        while self.at_punct("/\\"):
            self.next()
            c = CAnd(c, self._cond_not())
        return c

    def _cond_not(self):
        if self.accept_word("not"):
            return CNot(self._cond_not())
        return self._cond_atom()

    def _cond_atom(self):
        if self.accept_word("matches"):
            pat = self.parse_pattern()
            if self.accept_punct("s.t."):
                guard = self.parse_expr()
                pat = ConfigPattern(pat.entities, pat.rest, pat.clock, pat.history, guard)
            try:
                validate_pattern(pat)
            except Exception as exc:
                self.error(str(exc))
            return CMatches(pat)
        if self.accept_word("in"):
            return CIn(self.parse_interval())
        if self.accept_word("after"):
            return CAfter(self.expect_nat())
        if self.accept_word("after="):
            return CAfterEq(self.expect_nat())
        if self.accept_word("before"):
            return CBefore(self.expect_nat())
        if self.accept_word("before="):
            return CBeforeEq(self.expect_nat())
        if self.accept_punct("("):
            c = self.parse_cond()
            self.expect_punct(")")
            return c
        self.error("expected a condition")

    def parse_interval(self) -> Interval:
        self.expect_punct("[")
        lower = self.expect_nat()
        self.expect_punct(",")
        if self.peek().kind == "INF":
            self.next()
            upper = INF
        else:
            upper = self.expect_nat()
        self.expect_punct("]")
        tok = self.peek()
        try:
            return Interval(lower, upper)
        except ValueError as exc:
            self.error(str(exc), tok)

    # -- discrete strategies ---------------------------------------------------

    def parse_strategy(self):
        s = self._strat_orelse()
        while self.accept_word("or"):
            s = SOr(s, self._strat_orelse())
        return s

    def _strat_orelse(self):
        s = self._strat_seq()
        while self.accept_word("or-else"):
            s = SOrElse(s, self._strat_seq())
        return s

    def _strat_seq(self):
        s = self._strat_unit()
        while self.accept_punct(";"):
            s = SSeq(s, self._strat_unit())
        return s

    def _parse_label_list(self):
        self.expect_punct("[")
        labels = [self.expect_label()]
        while not self.accept_punct("]"):
            labels.append(self.expect_label())
        return tuple(labels)

    def _strat_unit(self):
        tok = self.peek()
        if tok.kind == "NAT" and self.peek(1).kind == "ID" and self.peek(1).value == "steps":
            count = self.next().value
            self.next()  # steps
            self.expect_word("with")
            return SSteps(count, self._strat_seq())
        if tok.kind != "ID" and not self.at_punct("("):
            self.error("expected a strategy")
        if self.accept_punct("("):
            s = self.parse_strategy()
            self.expect_punct(")")
            return s
        word = tok.value
        if word == "apply":
            self.next()
            if self.at_punct("["):
                return SApplyFirst(self._parse_label_list())
            return SApply(self.expect_label())
        if word == "eager":
            self.next()
            if self.at_punct("["):
                return SEager(self._parse_label_list())
            return SEager(None)
        if word == "action":
            self.next()
            return SAction()
        if word == "delay":
            self.next()
            return SDelay()
        if word == "stop":
            self.next()
            return SStop()
        if word == "skip":
            self.next()
            return SSkip()
        if word == "check":
            self.next()
            return SCheck(self.parse_cond())
        if word == "if":
            self.next()
            cond = self.parse_cond()
            self.expect_word("then")
            then = self._strat_seq()
            self.expect_word("else")
            other = self._strat_seq()
            return SIf(cond, then, other)
        if word == "until":
            self.next()
            cond = self.parse_cond()
            self.expect_word("do")
            return SUntil(cond, self._strat_seq())
        if word == "repeat":
            self.next()
            return SRepeat(self._strat_seq())
        if word == "get":
            self.next()
            self.expect_punct("(")
            gets = self._parse_hist_patterns()
            self.expect_punct(")")
            self.expect_word("and")
            self.expect_word("set")
            self.expect_punct("(")
            sets = []
            while True:
                if self.peek().kind != "QID":
                    self.error("expected a 'key update entry")
                key = self.next().value
                self.expect_punct("|->")
                sets.append((key, self.parse_expr()))
                if not self.accept_punct(","):
                    break
            self.expect_punct(")")
            get_vars = {t.name for _, t in gets if isinstance(t, Var)}
            for key, e in sets:
                free = expr_vars(e) - get_vars
                if free:
                    self.error(f"set entry '{key} uses variables not bound by get: "
                               f"{', '.join(sorted(free))}")
            return SGetSet(gets, tuple(sets))
        self.error("expected a strategy")

    # -- timed strategies --------------------------------------------------------

    def parse_tstrat(self):
        if self.accept_punct("("):
            t = self.parse_tstrat()
            self.expect_punct(")")
            return t
        tok = self.peek()
        if tok.kind != "ID":
            self.error("expected a time sampling strategy")
        word = tok.value
        if word == "fixed-time":
            self.next()
            tok = self.peek()
            delta = self.expect_nat()
            if delta == 0:
                self.error("fixed-time increment must be positive", tok)
            return TFixed(delta)
        if word == "max-time":
            self.next()
            self.expect_word("with")
            self.expect_word("default")
            tok = self.peek()
            default = self.expect_nat()
            if default == 0:
                self.error("max-time default must be positive", tok)
            return TMaxDefault(default)
        if word == "switch":
            self.next()
            cases = []
            while self.accept_word("when"):
                cond = self.parse_cond()
                self.expect_word("do")
                cases.append((cond, self.parse_tstrat()))
            if not cases:
                self.error("switch needs at least one when-case")
            self.expect_word("otherwise")
            return TSwitch(tuple(cases), self.parse_tstrat())
        if word == "untime":
            self.next()
            return TUntime(self.parse_tstrat())
        self.error("expected a time sampling strategy")

    def parse_strategy_pair(self):
        self.expect_punct("<")
        mu = self.parse_strategy()
        self.expect_punct(",")
        tau = self.parse_tstrat()
        self.expect_punct(">")
        return mu, tau

    # -- commands -----------------------------------------------------------------

    def _parse_bounds(self):
        """Optional [n] / [n, d] / [, d] solution/depth bounds."""
        limit = depth = None
        if self.accept_punct("["):
            if self.peek().kind == "NAT":
                limit = self.next().value
            if self.accept_punct(","):
                depth = self.expect_nat()
            self.expect_punct("]")
            if limit is None and depth is None:
                self.error("empty bounds")
        return limit, depth

    def _parse_command_heart(self, with_cond: bool):
        self.expect_word("in")
        tok = self.peek()
        if tok.kind == "QID":
            model = self.next().value
        else:
            model = self.expect_id("model name")
        self.expect_punct(":")
        self.expect_word("init")
        cond = None
        if with_cond:
            self.expect_punct("=>")
            cond = self.parse_cond()
        self.expect_word("using")
        mu = self.parse_strategy()
        self.expect_word("with")
        self.expect_word("sampling")
        tau = self.parse_tstrat()
        return model, cond, mu, tau

    def parse_command(self):
        tok = self.peek()
        if tok.kind != "ID":
            self.error("expected a command")
        word = tok.value
        if word == "tsim":
            self.next()
            limit, depth = self._parse_bounds()
            if depth is not None:
                self.error("tsim takes a single [n] bound")
            model, _, mu, tau = self._parse_command_heart(with_cond=False)
            self.expect_word("until")
            bound = self.expect_nat()
            self.expect_eof()
            return CmdTsim(model, mu, tau, bound, limit)
        if word == "trew":
            self.next()
            self.expect_punct("[")
            depth = self.expect_nat()
            limit = None
            if self.accept_punct(","):
                limit = self.expect_nat()
            self.expect_punct("]")
            model, _, mu, tau = self._parse_command_heart(with_cond=False)
            self.expect_eof()
            return CmdTrew(model, mu, tau, depth, limit)
        if word in ("tsearch", "dtsearch", "usearch", "dusearch"):
            self.next()
            limit, depth = self._parse_bounds()
            model, cond, mu, tau = self._parse_command_heart(with_cond=True)
            interval = None
            if self.accept_word("in"):
                self.expect_word("time")
                interval = self.parse_interval()
            self.expect_eof()
            untimed = word in ("usearch", "dusearch")
            if untimed and interval is not None:
                self.error(f"{word} takes no time interval")
            return CmdSearch(model, cond, mu, tau, limit, depth, interval,
                             depth_first=word.startswith("d"), untimed=untimed)
        if word == "find":
            self.next()
            if self.accept_word("earliest"):
                latest = False
            elif self.accept_word("latest"):
                latest = True
            else:
                self.error("expected 'earliest' or 'latest'")
            model, cond, mu, tau = self._parse_command_heart(with_cond=True)
            self.expect_eof()
            return CmdFind(model, cond, mu, tau, latest)
        self.error(f"unknown command {word!r}")

    # -- model files ----------------------------------------------------------------

    def parse_model_file(self, default_name: str = "model") -> Model:
        model = Model(name=default_name)
        init_line = None
        while self.peek().kind != "EOF":
            tok = self.peek()
            if tok.kind != "ID":
                self.error("expected a declaration (model/class/msg/rule/init)")
            word = tok.value
            if word == "model":
                self.next()
                model.name = self.expect_id("model name")
            elif word == "class":
                self.next()
                self._parse_class_decl(model)
            elif word == "msg":
                self.next()
                name = self.expect_id("message name")
                self.expect_punct("/")
                arity = self.expect_nat()
                if name in model.msgs:
                    self.error(f"message {name} declared twice", tok)
                model.msgs[name] = MsgDecl(name, arity)
            elif word == "rule":
                self.next()
                self._parse_rule_decl(model, tok)
            elif word == "init":
                self.next()
                if init_line is not None:
                    self.error("init declared twice", tok)
                init_line = tok.line
                self._parse_init_decl(model)
            else:
                self.error("expected a declaration (model/class/msg/rule/init)")
        if model.msgs:
            model.rules.insert(0, deliver_rule())
        return model

    def _parse_class_decl(self, model: Model):
        tok = self.peek()
        name = self.expect_name("class name")
        if name in model.classes:
            self.error(f"class {name} declared twice", tok)
        self.expect_punct("|")
        attrs = {}
        while True:
            kind_tok = self.peek()
            kind_word = self.expect_id("attribute kind (clock/timer/static)")
            try:
                kind = AttrKind(kind_word)
            except ValueError:
                self.error(f"unknown attribute kind {kind_word!r}", kind_tok)
            attr = self.expect_id("attribute name")
            self.expect_punct(":")
            type_name = self.expect_name("type name")
            if attr in attrs:
                self.error(f"attribute {attr} declared twice", kind_tok)
            attrs[attr] = (kind, type_name)
            if not self.accept_punct(","):
                break
        model.classes[name] = ClassDecl(name, attrs)

    def _at_entity_start(self) -> bool:
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.value == "<":
            return True
        if tok.kind == "ID" and (tok.value == "dly" or tok.value not in RESERVED):
            return True
        return False

    def _parse_rule_decl(self, model: Model, start: Token):
        label_tok = self.peek()
        label = self.expect_label()
        if label == TICK:
            self.error("the tick rule is built in; rules may not be labeled 'tick'", label_tok)
        if label == DELIVER:
            self.error("'deliver' is a built-in rule label", label_tok)
        if any(r.label == label for r in model.rules):
            self.error(f"rule {label} declared twice", label_tok)
        self.expect_punct(":")
        lhs = []
        while not self.at_punct("=>"):
            if not (self._at_entity_start() or self.peek().kind == "VAR"):
                self.error("expected an entity pattern or '=>'")
            if self.peek().kind == "VAR":
                self.error("rule left-hand sides take no rest variable "
                           "(unmatched entities are preserved)")
            lhs.append(self.parse_entity_pattern())
        self.expect_punct("=>")
        rhs = []
        if self.accept_word("none"):
            pass
        else:
            while self._at_entity_start() or self.peek().kind == "VAR":
                rhs.append(self._parse_template())
        guard = None
        if self.accept_word("if"):
            guard = self.parse_expr()
        model.rules.append(Rule(label, tuple(lhs), tuple(rhs), guard, line=start.line))

    def _parse_template(self):
        tok = self.peek()
        if tok.kind == "VAR":
            return EntityRef(self.next().value)
        if self.at_punct("<"):
            self.next()
            oid = self.parse_pterm()
            self.expect_punct(":")
            cls = self.expect_name("class name")
            self.expect_punct("|")
            updates = []
            if not self.at_punct(">"):
                while True:
                    name = self.expect_id("attribute name")
                    self.expect_punct(":")
                    updates.append((name, self._expr_arg()))
                    if not self.accept_punct(","):
                        break
            self.expect_punct(">")
            return ObjTemplate(oid, cls, tuple(updates))
        if self.at_word("dly"):
            self.next()
            self.expect_punct("(")
            if self.peek().kind == "VAR":
                inner = self.next().value
            else:
                inner = self._parse_msg_template()
            self.expect_punct(",")
            lower = self._expr_arg()
            self.expect_punct(",")
            upper = self._expr_arg()
            self.expect_punct(")")
            return DlyTemplate(inner, lower, upper)
        return self._parse_msg_template()

    def _parse_msg_template(self) -> MsgTemplate:
        name = self.expect_id("message name")
        self.expect_punct("(")
        args = []
        if not self.accept_punct(")"):
            while True:
                args.append(self._expr_arg())
                if not self.accept_punct(","):
                    break
            self.expect_punct(")")
        return MsgTemplate(name, tuple(args))

    def _parse_init_decl(self, model: Model):
        self.expect_punct(":")
        config = self.parse_ground_config()
        self.expect_word("in")
        self.expect_word("time")
        clock = self.expect_nat()
        history = {}
        if self.accept_punct("|"):
            while True:
                if self.peek().kind != "QID":
                    self.error("expected a 'key history entry")
                key = self.next().value
                self.expect_punct("|->")
                history[key] = self.parse_ground_value()
                if not self.accept_punct(","):
                    break
        model.init = StratState(ClockedState(config, clock), history)


# ---------------------------------------------------------------------------
# Entry points.

def parse_command(text: str, source: str = "<command>"):
    return Parser(text, source).parse_command()


def parse_strategy_pair(text: str, source: str = "<strategy>"):
    p = Parser(text, source)
    pair = p.parse_strategy_pair()
    p.expect_eof()
    return pair


def parse_strategy(text: str, source: str = "<strategy>"):
    p = Parser(text, source)
    s = p.parse_strategy()
    p.expect_eof()
    return s


def parse_tstrat(text: str, source: str = "<strategy>"):
    p = Parser(text, source)
    t = p.parse_tstrat()
    p.expect_eof()
    return t


def parse_cond(text: str, source: str = "<condition>"):
    p = Parser(text, source)
    c = p.parse_cond()
    p.expect_eof()
    return c


def parse_pattern(text: str, source: str = "<pattern>"):
    p = Parser(text, source)
    pat = p.parse_pattern()
    p.expect_eof()
    validate_pattern(pat)
    return pat


def parse_expr(text: str, source: str = "<expr>"):
    p = Parser(text, source)
    e = p.parse_expr()
    p.expect_eof()
    return e


def parse_model(text: str, source: str = "<model>") -> Model:
    p = Parser(text, source)
    return p.parse_model_file()
