"""Timed models: class/message declarations, rules, and tick semantics.

A model declares classes whose attributes have a timed kind (clock attrs
grow with time, timer attrs shrink by truncated subtraction and bound the
maximal time elapse, static attrs are unaffected), messages with fixed
arity, labeled instantaneous rules, and an initial state.  ``mte`` and
``time_effect`` are derived structurally from the attribute kinds; the
``deliver`` rule (unwrap a delayed message whose lower bound reached 0)
is built in for every model that declares messages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .configuration import ClockedState, Configuration, DlyMsg, Msg, Obj, StratState
from .matching import (
    ConfigPattern,
    DlyPattern,
    Expr,
    Lit,
    MsgPattern,
    ObjPattern,
    PatternError,
    Var,
    eval_expr,
    expr_vars,
    match_config,
    pattern_vars,
)
from .timedomain import INF, is_time, is_time_inf, min_time, monus


class ModelError(Exception):
    """Invalid model file or ill-formed state for a model."""


class AttrKind(Enum):
    CLOCK = "clock"
    TIMER = "timer"
    STATIC = "static"


@dataclass
class ClassDecl:
    name: str
    attrs: dict  # attr name -> (AttrKind, type name), declaration order
    timer_attrs: tuple = ()
    timed_attrs: tuple = ()  # (name, kind) for clock and timer attributes

    def __post_init__(self):
        self.timer_attrs = tuple(n for n, (k, _) in self.attrs.items()
                                 if k is AttrKind.TIMER)
        self.timed_attrs = tuple((n, k) for n, (k, _) in self.attrs.items()
                                 if k is not AttrKind.STATIC)


@dataclass
class MsgDecl:
    name: str
    arity: int


# Right-hand-side templates.  Object templates update the mentioned
# attributes of the entity matched by the lhs pattern with the same oid
# term; unmentioned attributes carry over verbatim.

@dataclass(frozen=True)
class ObjTemplate:
    oid: Union[Var, Lit]
    cls: str
    updates: tuple  # of (attr, Expr)


@dataclass(frozen=True)
class MsgTemplate:
    name: str
    args: tuple  # of Expr


@dataclass(frozen=True)
class DlyTemplate:
    inner: Union[str, MsgTemplate]  # variable name or message template
    lower: Expr
    upper: Expr


@dataclass(frozen=True)
class EntityRef:
    var: str


Template = Union[ObjTemplate, MsgTemplate, DlyTemplate, EntityRef]

DELIVER = "deliver"
TICK = "tick"


@dataclass
class Rule:
    label: str
    lhs: tuple  # of EntityPattern
    rhs: tuple  # of Template
    guard: Optional[Expr] = None
    line: int = 0


_DELIVER_RULE = Rule(
    label=DELIVER,
    lhs=(DlyPattern(Var("M"), Lit(0), Var("U")),),
    rhs=(EntityRef("M"),),
)


@dataclass
class Model:
    name: str
    classes: dict = field(default_factory=dict)  # name -> ClassDecl
    msgs: dict = field(default_factory=dict)  # name -> MsgDecl
    rules: list = field(default_factory=list)  # Rule, deliver first when present
    init: Optional[StratState] = None

    # -- validation ---------------------------------------------------------

    def rule(self, label: str) -> Rule:
        for r in self.rules:
            if r.label == label:
                return r
        raise ModelError(f"model {self.name} has no rule {label}")

    def validate_entity(self, ent):
        if isinstance(ent, Obj):
            decl = self.classes.get(ent.cls)
            if decl is None:
                raise ModelError(f"undeclared class {ent.cls}")
            if set(ent.attrs) != set(decl.attrs):
                missing = set(decl.attrs) - set(ent.attrs)
                extra = set(ent.attrs) - set(decl.attrs)
                detail = []
                if missing:
                    detail.append(f"missing {', '.join(sorted(missing))}")
                if extra:
                    detail.append(f"undeclared {', '.join(sorted(extra))}")
                raise ModelError(f"object {ent.oid} of class {ent.cls}: {'; '.join(detail)}")
            for name, (kind, _) in decl.attrs.items():
                v = ent.attrs[name]
                if kind is AttrKind.CLOCK and not is_time(v):
                    raise ModelError(f"clock attribute {name} of {ent.oid} must be finite: {v!r}")
                if kind is AttrKind.TIMER and not is_time_inf(v):
                    raise ModelError(f"timer attribute {name} of {ent.oid} must be a time or INF")
        elif isinstance(ent, Msg):
            self._check_msg(ent)
        elif isinstance(ent, DlyMsg):
            self._check_msg(ent.msg)
        else:
            raise ModelError(f"not an entity: {ent!r}")

    def _check_msg(self, msg: Msg):
        decl = self.msgs.get(msg.name)
        if decl is None:
            raise ModelError(f"undeclared message {msg.name}")
        if decl.arity != len(msg.args):
            raise ModelError(f"message {msg.name} expects {decl.arity} arguments, got {len(msg.args)}")

    def validate_state(self, state: StratState):
        oids = set()
        for ent in state.config:
            self.validate_entity(ent)
            if isinstance(ent, Obj):
                if ent.oid in oids:
                    raise ModelError(f"duplicate object identifier {ent.oid}")
                oids.add(ent.oid)

    # -- tick semantics ------------------------------------------------------

    def mte(self, config: Configuration):
        """Maximal time elapse: 0 for an empty configuration or a ripe
        message, the upper delay bound for delayed messages, the minimum
        timer for objects (INF when a class has no timer attributes)."""
        if len(config) == 0:
            return 0
        best = INF
        for ent in config.entities:
            if isinstance(ent, Msg):
                return 0
            if isinstance(ent, DlyMsg):
                best = min_time(best, ent.upper)
            else:
                decl = self.classes.get(ent.cls)
                if decl is None:
                    raise ModelError(f"undeclared class {ent.cls}")
                for name in decl.timer_attrs:
                    best = min_time(best, ent.attrs[name])
            if best == 0:
                return 0
        return best

    def time_effect(self, config: Configuration, d: int) -> Configuration:
        """Advance every entity by d: clocks grow, timers and delay bounds
        shrink by monus, ripe messages and static attributes are untouched."""
        if d == 0:
            return config
        out = []
        for ent in config.entities:
            if isinstance(ent, Msg):
                out.append(ent)
            elif isinstance(ent, DlyMsg):
                out.append(DlyMsg(ent.msg, monus(ent.lower, d), monus(ent.upper, d)))
            else:
                decl = self.classes[ent.cls]
                if not decl.timed_attrs:
                    out.append(ent)
                    continue
                attrs = dict(ent.attrs)
                for name, kind in decl.timed_attrs:
                    if kind is AttrKind.CLOCK:
                        attrs[name] = attrs[name] + d
                    else:
                        attrs[name] = monus(attrs[name], d)
                out.append(Obj(ent.oid, ent.cls, attrs))
        return Configuration(out)

    def tick(self, state: StratState, d: int) -> Optional[StratState]:
        """Advance time by d if permitted (d <= mte); clock and timers move,
        history is untouched.  Zero advances are rejected outright."""
        if not is_time(d) or d == 0:
            raise ValueError(f"tick duration must be a positive time value: {d!r}")
        if not d <= self.mte(state.config):
            return None
        clocked = ClockedState(self.time_effect(state.config, d), state.clock + d)
        return state.with_clocked(clocked)

    # -- instantaneous rules --------------------------------------------------

    def successors(self, state: StratState, labels=None, stats=None):
        """All (label, state) pairs produced by one rule application.

        Rules are tried in declaration order (deliver first), restricted to
        ``labels`` when given; results are deduplicated by (label, canonical
        state) and ordered by (rule order, canonical state).
        """
        out = []
        seen = set()
        for rule in self.rules:
            if labels is not None and rule.label not in labels:
                continue
            produced = []
            for env, used in match_config(rule.lhs, state.config, exact=False):
                if rule.guard is not None:
                    g = eval_expr(rule.guard, env)
                    if type(g) is not bool:
                        raise ModelError(f"rule {rule.label}: guard is not boolean")
                    if not g:
                        continue
                new_entities = [self._instantiate(t, rule, env, used, state) for t in rule.rhs]
                config = state.config.replace(used, new_entities)
                clocked = ClockedState(config, state.clock)
                produced.append(state.with_clocked(clocked))
                if stats is not None:
                    stats.rule_applications += 1
            for st in sorted(produced, key=lambda s: s.canon):
                key = (rule.label, st.canon)
                if key not in seen:
                    seen.add(key)
                    out.append((rule.label, st))
        return out

    def _instantiate(self, template: Template, rule: Rule, env: dict, used, state: StratState):
        if isinstance(template, EntityRef):
            v = env[template.var]
            if not isinstance(v, Msg):
                raise ModelError(f"rule {rule.label}: {template.var} is not message-valued")
            return v
        if isinstance(template, MsgTemplate):
            msg = Msg(template.name, tuple(eval_expr(a, env) for a in template.args))
            self._check_msg(msg)
            return msg
        if isinstance(template, DlyTemplate):
            if isinstance(template.inner, str):
                inner = env[template.inner]
                if not isinstance(inner, Msg):
                    raise ModelError(f"rule {rule.label}: {template.inner} is not message-valued")
            else:
                inner = self._instantiate(template.inner, rule, env, used, state)
            lower = eval_expr(template.lower, env)
            upper = eval_expr(template.upper, env)
            return DlyMsg(inner, lower, upper)
        if isinstance(template, ObjTemplate):
            # find the lhs object pattern with the same oid term; its matched
            # entity supplies the attributes not mentioned in the template
            base = None
            for pat, idx in zip(rule.lhs, used):
                if isinstance(pat, ObjPattern) and pat.oid == template.oid:
                    base = state.config.entities[idx]
                    break
            if base is None:
                raise ModelError(f"rule {rule.label}: object template {template.oid} "
                                 f"has no matching lhs pattern")
            attrs = dict(base.attrs)
            for name, e in template.updates:
                attrs[name] = eval_expr(e, env)
            obj = Obj(base.oid, template.cls, attrs)
            self.validate_entity(obj)
            return obj
        raise ModelError(f"not a template: {template!r}")


# ---------------------------------------------------------------------------
# Static validation of a freshly parsed model.

def _template_vars(t: Template) -> set:
    if isinstance(t, EntityRef):
        return {t.var}
    if isinstance(t, MsgTemplate):
        out = set()
        for e in t.args:
            out |= expr_vars(e)
        return out
    if isinstance(t, DlyTemplate):
        out = {t.inner} if isinstance(t.inner, str) else _template_vars(t.inner)
        return out | expr_vars(t.lower) | expr_vars(t.upper)
    if isinstance(t, ObjTemplate):
        out = {t.oid.name} if isinstance(t.oid, Var) else set()
        for _, e in t.updates:
            out |= expr_vars(e)
        return out
    raise ModelError(f"not a template: {t!r}")


def validate_model(model: Model):
    """Cross-declaration checks after parsing; raises ModelError."""
    for rule in model.rules:
        if rule is _DELIVER_RULE:
            continue
        where = f"rule {rule.label} (line {rule.line})"
        if not rule.lhs:
            raise ModelError(f"{where}: left-hand side must match at least one entity")
        try:
            bound = set(pattern_vars(ConfigPattern(entities=rule.lhs)))
        except PatternError as exc:
            raise ModelError(f"{where}: {exc}") from None
        if rule.guard is not None:
            free = expr_vars(rule.guard) - bound
            if free:
                raise ModelError(f"{where}: guard uses unbound variables "
                                 f"{', '.join(sorted(free))}")
        for t in rule.rhs:
            free = _template_vars(t) - bound
            if free:
                raise ModelError(f"{where}: right-hand side uses unbound variables "
                                 f"{', '.join(sorted(free))}")
        _validate_patterns(model, rule.lhs, where)
        _validate_templates(model, rule, where)
    if model.init is None:
        raise ModelError(f"model {model.name} has no init declaration")
    model.validate_state(model.init)


def _validate_patterns(model: Model, pats, where: str):
    for pat in pats:
        if isinstance(pat, ObjPattern):
            decl = model.classes.get(pat.cls)
            if decl is None:
                raise ModelError(f"{where}: undeclared class {pat.cls}")
            for name, _ in pat.attrs:
                if name not in decl.attrs:
                    raise ModelError(f"{where}: class {pat.cls} has no attribute {name}")
        elif isinstance(pat, MsgPattern):
            decl = model.msgs.get(pat.name)
            if decl is None:
                raise ModelError(f"{where}: undeclared message {pat.name}")
            if decl.arity != len(pat.args):
                raise ModelError(f"{where}: message {pat.name} expects {decl.arity} arguments")
        elif isinstance(pat, DlyPattern):
            if isinstance(pat.inner, MsgPattern):
                _validate_patterns(model, [pat.inner], where)


def _validate_templates(model: Model, rule: Rule, where: str):
    for t in rule.rhs:
        if isinstance(t, ObjTemplate):
            decl = model.classes.get(t.cls)
            if decl is None:
                raise ModelError(f"{where}: undeclared class {t.cls}")
            for name, _ in t.updates:
                if name not in decl.attrs:
                    raise ModelError(f"{where}: class {t.cls} has no attribute {name}")
            if not any(isinstance(p, ObjPattern) and p.oid == t.oid and p.cls == t.cls
                       for p in rule.lhs):
                raise ModelError(f"{where}: object template {t.oid} has no lhs counterpart "
                                 f"(creating objects is not supported)")
        elif isinstance(t, MsgTemplate):
            decl = model.msgs.get(t.name)
            if decl is None:
                raise ModelError(f"{where}: undeclared message {t.name}")
            if decl.arity != len(t.args):
                raise ModelError(f"{where}: message {t.name} expects {decl.arity} arguments")
        elif isinstance(t, DlyTemplate) and isinstance(t.inner, MsgTemplate):
            _validate_templates(
                model, Rule(rule.label, rule.lhs, (t.inner,), line=rule.line), where)


def deliver_rule() -> Rule:
    return _DELIVER_RULE


def load_model(text: str, source: str = "<model>") -> Model:
    """Parse and validate a model file; raises ParseError or ModelError."""
    from .parser import parse_model

    model = parse_model(text, source)
    validate_model(model)
    return model
