"""Patterns over states, guard expressions, and multiset matching.

Patterns are linear: each variable is bound at most once, and equality
constraints go in the guard.  Matching enumerates every injective
assignment of entity patterns to distinct entities, extends each with
clock/history bindings, filters by the guard, and returns deduplicated
environments in a deterministic (lexicographic) order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .configuration import Configuration, DlyMsg, Msg, Obj, StratState, format_value
from .timedomain import INF, min_time, monus, plus


class EvalError(Exception):
    """Unbound variable or ill-typed operation during evaluation."""


class PatternError(Exception):
    """Ill-formed pattern (non-linear, unbound guard variable, ...)."""


# ---------------------------------------------------------------------------
# Pattern terms: a position in a pattern is either a variable or a literal.

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Lit:
    value: object

    def __str__(self):
        return format_value(self.value)


PatTerm = Union[Var, Lit]


@dataclass(frozen=True)
class ObjPattern:
    oid: PatTerm
    cls: str
    attrs: tuple  # of (name, PatTerm)
    attr_rest: Optional[str] = None

    def __str__(self):
        parts = [f"{k} : {t}" for k, t in self.attrs]
        if self.attr_rest:
            parts.append(self.attr_rest)
        return f"< {self.oid} : {self.cls} | {', '.join(parts)} >"


@dataclass(frozen=True)
class MsgPattern:
    name: str
    args: tuple  # of PatTerm

    def __str__(self):
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class DlyPattern:
    inner: Union[Var, MsgPattern]
    lower: PatTerm
    upper: PatTerm

    def __str__(self):
        return f"dly({self.inner}, {self.lower}, {self.upper})"


EntityPattern = Union[ObjPattern, MsgPattern, DlyPattern]


# ---------------------------------------------------------------------------
# Guard / update expressions.

@dataclass(frozen=True)
class ELit:
    value: object


@dataclass(frozen=True)
class EVar:
    name: str


@dataclass(frozen=True)
class EBin:
    op: str  # + monus == =/= < <= > >= /\ \/
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class EMin:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class ENot:
    arg: "Expr"


@dataclass(frozen=True)
class EIf:
    cond: "Expr"
    then: "Expr"
    other: "Expr"


Expr = Union[ELit, EVar, EBin, EMin, ENot, EIf]


def expr_vars(e: Expr) -> set:
    if isinstance(e, EVar):
        return {e.name}
    if isinstance(e, ELit):
        return set()
    if isinstance(e, EBin):
        return expr_vars(e.left) | expr_vars(e.right)
    if isinstance(e, EMin):
        return expr_vars(e.left) | expr_vars(e.right)
    if isinstance(e, ENot):
        return expr_vars(e.arg)
    if isinstance(e, EIf):
        return expr_vars(e.cond) | expr_vars(e.then) | expr_vars(e.other)
    raise TypeError(f"not an expression: {e!r}")


def _is_numeric(v) -> bool:
    return (type(v) is int) or v is INF


def _require_bool(v, what: str) -> bool:
    if type(v) is not bool:
        raise EvalError(f"{what} needs a boolean, got {format_value(v)}")
    return v


def eval_expr(e: Expr, env: dict):
    """Strict evaluation of an expression under a binding environment."""
    if isinstance(e, ELit):
        return e.value
    if isinstance(e, EVar):
        try:
            return env[e.name]
        except KeyError:
            raise EvalError(f"unbound variable {e.name}") from None
    if isinstance(e, EMin):
        a, b = eval_expr(e.left, env), eval_expr(e.right, env)
        if not (_is_numeric(a) and _is_numeric(b)):
            raise EvalError("min needs time values")
        return min_time(a, b)
    if isinstance(e, ENot):
        return not _require_bool(eval_expr(e.arg, env), "not")
    if isinstance(e, EIf):
        if _require_bool(eval_expr(e.cond, env), "if condition"):
            return eval_expr(e.then, env)
        return eval_expr(e.other, env)
    if isinstance(e, EBin):
        a, b = eval_expr(e.left, env), eval_expr(e.right, env)
        op = e.op
        if op == "+":
            if not (_is_numeric(a) and _is_numeric(b)):
                raise EvalError("+ needs time values")
            return plus(a, b)
        if op == "monus":
            if not _is_numeric(a) or type(b) is not int:
                raise EvalError("monus needs a time value and a finite subtrahend")
            return monus(a, b)
        if op in ("==", "=/="):
            same = _compare_equal(a, b)
            return same if op == "==" else not same
        if op in ("<", "<=", ">", ">="):
            if not (_is_numeric(a) and _is_numeric(b)):
                raise EvalError(f"{op} needs time values")
            if op == "<":
                return a < b
            if op == "<=":
                return a <= b
            if op == ">":
                return a > b
            return a >= b
        if op == "/\\":
            return _require_bool(a, "/\\") and _require_bool(b, "/\\")
        if op == "\\/":
            return _require_bool(a, "\\/") or _require_bool(b, "\\/")
        raise EvalError(f"unknown operator {op}")
    raise TypeError(f"not an expression: {e!r}")


def _compare_equal(a, b) -> bool:
    ka, kb = _value_kind(a), _value_kind(b)
    if ka != kb:
        raise EvalError(f"cannot compare {format_value(a)} and {format_value(b)}")
    if ka == "time":
        return (a is INF and b is INF) or (a is not INF and b is not INF and a == b)
    return a == b


def _value_kind(v) -> str:
    if type(v) is bool:
        return "bool"
    if type(v) is int or v is INF:
        return "time"
    if isinstance(v, str):
        return "sym"
    raise EvalError(f"not a comparable value: {v!r}")


# ---------------------------------------------------------------------------
# Configuration patterns.

@dataclass(frozen=True)
class ConfigPattern:
    """Pattern over a StratState.

    Without a rest variable the entity patterns must cover the entire
    configuration; with one, the leftovers bind to it.  History entry
    patterns match a sub-map: a listed key must be present, other keys
    are ignored.
    """

    entities: tuple = ()  # of EntityPattern
    rest: Optional[str] = None
    clock: Optional[PatTerm] = None
    history: tuple = ()  # of (key, PatTerm)
    guard: Optional[Expr] = None

    def __str__(self):
        parts = [str(p) for p in self.entities]
        if self.rest:
            parts.append(self.rest)
        text = "{" + (" ".join(parts) or "none") + "}"
        if self.clock is not None:
            text += f" in time {self.clock}"
        if self.history:
            text += " | " + ", ".join(f"'{k} |-> {t}" for k, t in self.history)
        return text


def pattern_vars(p: ConfigPattern):
    """All variables bound by the pattern, in binding order; rejects repeats."""
    seen = []

    def bind(name):
        if name == "_":
            return
        if name in seen:
            raise PatternError(f"variable {name} bound more than once (patterns are linear)")
        seen.append(name)

    def term(t):
        if isinstance(t, Var):
            bind(t.name)

    for ep in p.entities:
        if isinstance(ep, ObjPattern):
            term(ep.oid)
            for _, t in ep.attrs:
                term(t)
            if ep.attr_rest:
                bind(ep.attr_rest)
        elif isinstance(ep, MsgPattern):
            for t in ep.args:
                term(t)
        elif isinstance(ep, DlyPattern):
            if isinstance(ep.inner, Var):
                bind(ep.inner.name)
            else:
                for t in ep.inner.args:
                    term(t)
            term(ep.lower)
            term(ep.upper)
        else:
            raise PatternError(f"not an entity pattern: {ep!r}")
    if p.rest:
        bind(p.rest)
    if isinstance(p.clock, Var):
        bind(p.clock.name)
    for _, t in p.history:
        term(t)
    return seen


def validate_pattern(p: ConfigPattern):
    """Check linearity and that guard variables are bound by the pattern."""
    bound = set(pattern_vars(p))
    if p.guard is not None:
        free = expr_vars(p.guard) - bound
        if free:
            raise PatternError(f"guard uses unbound variables: {', '.join(sorted(free))}")


def _unify(term: PatTerm, value, env: dict) -> Optional[dict]:
    if isinstance(term, Lit):
        lit = term.value
        ok = _values_equal(lit, value)
        return env if ok else None
    if term.name == "_":  # wildcard: matches without binding
        return env
    env2 = dict(env)
    env2[term.name] = value
    return env2


def _values_equal(a, b) -> bool:
    if a is INF or b is INF:
        return a is b
    if type(a) is bool or type(b) is bool:
        return type(a) is type(b) and a == b
    return type(a) is type(b) and a == b


def _match_entity(pat: EntityPattern, ent, env: dict) -> Optional[dict]:
    if isinstance(pat, ObjPattern):
        if not isinstance(ent, Obj) or ent.cls != pat.cls:
            return None
        env = _unify(pat.oid, ent.oid, env)
        if env is None:
            return None
        for name, term in pat.attrs:
            if name not in ent.attrs:
                return None
            env = _unify(term, ent.attrs[name], env)
            if env is None:
                return None
        if pat.attr_rest and pat.attr_rest != "_":
            mentioned = {name for name, _ in pat.attrs}
            rest = tuple(sorted((k, v) for k, v in ent.attrs.items() if k not in mentioned))
            env = dict(env)
            env[pat.attr_rest] = rest
        return env
    if isinstance(pat, MsgPattern):
        if not isinstance(ent, Msg) or ent.name != pat.name or len(ent.args) != len(pat.args):
            return None
        for term, arg in zip(pat.args, ent.args):
            env = _unify(term, arg, env)
            if env is None:
                return None
        return env
    if isinstance(pat, DlyPattern):
        if not isinstance(ent, DlyMsg):
            return None
        if isinstance(pat.inner, Var):
            env = _unify(pat.inner, ent.msg, env)
        else:
            env = _match_entity(pat.inner, ent.msg, env)
            if env is None:
                return None
        env = _unify(pat.lower, ent.lower, env)
        if env is None:
            return None
        return _unify(pat.upper, ent.upper, env)
    raise PatternError(f"not an entity pattern: {pat!r}")


def canonical_binding(v) -> str:
    """Canonical text of a binding value (scalar, message, rest captures)."""
    if isinstance(v, Msg):
        return v.canon
    if isinstance(v, Configuration):
        return "{" + v.canon + "}"
    if isinstance(v, tuple):  # attribute rest: sorted (name, value) pairs
        return "(" + ", ".join(f"{k} : {format_value(x)}" for k, x in v) + ")"
    return format_value(v)


def canonical_env(env: dict) -> str:
    return ", ".join(f"{k} = {canonical_binding(v)}" for k, v in sorted(env.items()))


def _candidates(pat: EntityPattern, config: Configuration):
    by_class, by_msg, by_dly, dly_all = config.index()
    if isinstance(pat, ObjPattern):
        return by_class.get(pat.cls, ())
    if isinstance(pat, MsgPattern):
        return by_msg.get(pat.name, ())
    if isinstance(pat, Var):
        raise PatternError(f"stray variable {pat.name} among entity patterns")
    if isinstance(pat.inner, MsgPattern):
        return by_dly.get(pat.inner.name, ())
    return dly_all


def match_config(entity_pats, config: Configuration, exact: bool, rest: Optional[str] = None):
    """Enumerate injective matches of entity patterns against a configuration.

    Yields (env, used_indices) pairs; ``used_indices`` is aligned with the
    pattern tuple.  Without ``rest`` and with ``exact`` set, every entity
    must be matched.
    """
    entities = config.entities
    if exact and rest is None and len(entity_pats) != len(entities):
        return []
    candidate_lists = [_candidates(p, config) for p in entity_pats]
    if any(not c for c in candidate_lists):
        return []
    out = []

    def backtrack(i, env, used):
        if i == len(entity_pats):
            if rest is not None and rest != "_":
                leftover = Configuration(e for j, e in enumerate(entities) if j not in used)
                env = dict(env)
                env[rest] = leftover
            out.append((env, tuple(used)))
            return
        pat = entity_pats[i]
        for j in candidate_lists[i]:
            if j in used:
                continue
            env2 = _match_entity(pat, entities[j], env)
            if env2 is not None:
                backtrack(i + 1, env2, used + [j])

    backtrack(0, {}, [])
    return out


def match_pattern(pattern: ConfigPattern, state: StratState):
    """All guard-passing environments of a pattern against a state.

    The result is deduplicated and sorted lexicographically on the
    canonical binding text, so it is invariant under permutation of the
    configuration multiset.
    """
    exact = pattern.rest is None
    envs = []
    for env, _ in match_config(pattern.entities, state.config, exact, pattern.rest):
        if pattern.clock is not None:
            env = _unify(pattern.clock, state.clock, env)
            if env is None:
                continue
        ok = True
        for key, term in pattern.history:
            if key not in state.history:
                ok = False
                break
            env = _unify(term, state.history[key], env)
            if env is None:
                ok = False
                break
        if not ok:
            continue
        if pattern.guard is not None:
            if not _require_bool(eval_expr(pattern.guard, env), "pattern guard"):
                continue
        envs.append(env)
    keyed = {}
    for env in envs:
        keyed.setdefault(canonical_env(env), env)
    return [keyed[k] for k in sorted(keyed)]
