"""One-round strategy evaluation: conditions, delay steps, discrete rounds.

``eval_round`` computes the result set of one round of a discrete strategy
paired with a time sampling strategy.  Result sets are ordered and
duplicate-free (dedup key: canonical clocked state plus history map);
closure combinators (eager normalization, until/repeat) run a
level-synchronous worklist with a visited set, so cyclic finite systems
terminate, and each new level is ordered by canonical state text.
"""

from __future__ import annotations

from typing import Callable, Iterable, List, Optional

from .configuration import ClockedState, StratState
from .matching import Var, eval_expr, match_pattern
from .model import Model
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
from .timedomain import INF


class RunStats:
    """Counters accumulated over an analysis run."""

    __slots__ = ("states_explored", "rule_applications", "wall_ms",
                 "budget_exhausted", "incomplete")

    def __init__(self):
        self.states_explored = 0
        self.rule_applications = 0
        self.wall_ms = 0.0
        self.budget_exhausted = False
        self.incomplete = False

    def as_dict(self):
        return {
            "states": self.states_explored,
            "rule_apps": self.rule_applications,
            "time_ms": round(self.wall_ms, 3),
            "budget_exhausted": self.budget_exhausted,
            "incomplete": self.incomplete,
        }

    def text_line(self) -> str:
        return (f"states: {self.states_explored}  rule-apps: {self.rule_applications}  "
                f"time: {round(self.wall_ms)}ms")


class _ResultSet:
    """Ordered, duplicate-free accumulator of strategy states."""

    __slots__ = ("states", "keys")

    def __init__(self, states: Iterable[StratState] = ()):
        self.states: List[StratState] = []
        self.keys = set()
        for s in states:
            self.add(s)

    def add(self, state: StratState) -> bool:
        if state.canon in self.keys:
            return False
        self.keys.add(state.canon)
        self.states.append(state)
        return True

    def extend(self, states: Iterable[StratState]):
        for s in states:
            self.add(s)

    def __iter__(self):
        return iter(self.states)

    def __len__(self):
        return len(self.states)


def _by_canon(state: StratState) -> str:
    return state.canon


class Interpreter:
    """Evaluates strategies against a model.

    Pure given (strategy, state); the optional ``budget_check`` hook is
    invoked once per state expansion inside closure loops so a caller can
    abort runaway iterations (unbounded repeat/until on an infinite space).
    """

    def __init__(self, model: Model, stats: Optional[RunStats] = None,
                 budget_check: Optional[Callable[[], None]] = None):
        self.model = model
        self.stats = stats if stats is not None else RunStats()
        self.budget_check = budget_check

    # -- conditions -----------------------------------------------------------

    def eval_cond(self, cond, state: StratState) -> bool:
        if isinstance(cond, CMatches):
            return bool(match_pattern(cond.pattern, state))
        if isinstance(cond, CIn):
            return cond.interval.contains(state.clock)
        if isinstance(cond, CAfter):
            return state.clock > cond.time
        if isinstance(cond, CAfterEq):
            return state.clock >= cond.time
        if isinstance(cond, CBefore):
            return state.clock < cond.time
        if isinstance(cond, CBeforeEq):
            return state.clock <= cond.time
        if isinstance(cond, CAnd):
            left = self.eval_cond(cond.left, state)
            right = self.eval_cond(cond.right, state)
            return left and right
        if isinstance(cond, COr):
            left = self.eval_cond(cond.left, state)
            right = self.eval_cond(cond.right, state)
            return left or right
        if isinstance(cond, CNot):
            return not self.eval_cond(cond.arg, state)
        raise TypeError(f"not a condition: {cond!r}")

    # -- delay steps ------------------------------------------------------------

    def delay_step(self, tau, state: StratState) -> List[StratState]:
        """At most one state: the input advanced per the sampling strategy."""
        if isinstance(tau, TFixed):
            nxt = self.model.tick(state, tau.delta)
            if nxt is None:
                return []
            self.stats.rule_applications += 1
            return [nxt]
        if isinstance(tau, TMaxDefault):
            e = self.model.mte(state.config)
            if e == 0:
                return []
            delta = tau.default if e is INF else e
            nxt = self.model.tick(state, delta)
            if nxt is None:
                return []
            self.stats.rule_applications += 1
            return [nxt]
        if isinstance(tau, TSwitch):
            for cond, branch in tau.cases:
                if self.eval_cond(cond, state):
                    return self.delay_step(branch, state)
            return self.delay_step(tau.otherwise, state)
        if isinstance(tau, TUntime):
            out = []
            for st in self.delay_step(tau.inner, state):
                out.append(st.with_clocked(ClockedState(st.config, 0)))
            return out
        raise TypeError(f"not a timed strategy: {tau!r}")

    # -- discrete rounds -----------------------------------------------------------

    def rule_successors(self, state: StratState, labels=None) -> List[StratState]:
        return [st for _, st in self.model.successors(state, labels, self.stats)]

    def eval_round(self, mu, tau, state: StratState) -> List[StratState]:
        if isinstance(mu, SStop):
            return []
        if isinstance(mu, SSkip):
            return [state]
        if isinstance(mu, SApply):
            return self.rule_successors(state, (mu.label,))
        if isinstance(mu, SApplyFirst):
            for label in mu.labels:
                out = self.rule_successors(state, (label,))
                if out:
                    return out
            return []
        if isinstance(mu, SAction):
            return self.rule_successors(state)
        if isinstance(mu, SDelay):
            return self.delay_step(tau, state)
        if isinstance(mu, SEager):
            # action phase and delay phase are separate rounds: normalize
            # when rules apply, delay only from an already-normal state, so
            # the state right after the last rule application is observable
            # by until/check conditions (the reported earliest/latest clocks
            # depend on this)
            if mu.labels is None:
                step = lambda st: self.rule_successors(st)
            else:
                step = lambda st: self.eval_round(SApplyFirst(mu.labels), tau, st)
            if step(state):
                return self.normal_forms(step, state)
            return self.delay_step(tau, state)
        if isinstance(mu, SSeq):
            out = _ResultSet()
            for left in self.eval_round(mu.left, tau, state):
                out.extend(self.eval_round(mu.right, tau, left))
            return out.states
        if isinstance(mu, SOr):
            out = _ResultSet(self.eval_round(mu.left, tau, state))
            out.extend(self.eval_round(mu.right, tau, state))
            return out.states
        if isinstance(mu, SOrElse):
            out = self.eval_round(mu.left, tau, state)
            return out if out else self.eval_round(mu.right, tau, state)
        if isinstance(mu, SIf):
            branch = mu.then if self.eval_cond(mu.cond, state) else mu.other
            return self.eval_round(branch, tau, state)
        if isinstance(mu, SGetSet):
            return self._get_set(mu, state)
        if isinstance(mu, SCheck):
            return [state] if self.eval_cond(mu.cond, state) else []
        if isinstance(mu, SUntil):
            step = lambda st: ([] if self.eval_cond(mu.cond, st)
                               else self.eval_round(mu.body, tau, st))
            return self.normal_forms(step, state)
        if isinstance(mu, SRepeat):
            return self.closure(lambda st: self.eval_round(mu.body, tau, st), state)
        if isinstance(mu, SSteps):
            current = [state]
            for _ in range(mu.count):
                out = _ResultSet()
                for st in current:
                    out.extend(self.eval_round(mu.body, tau, st))
                current = out.states
                if not current:
                    break
            return current
        raise TypeError(f"not a strategy: {mu!r}")

    def _get_set(self, mu: SGetSet, state: StratState) -> List[StratState]:
        env = {}
        for key, term in mu.gets:
            if key not in state.history:
                return []
            if isinstance(term, Var):
                if term.name != "_":
                    env[term.name] = state.history[key]
            elif not _history_equal(term.value, state.history[key]):
                return []
        history = {k: v for k, v in state.history.items()
                   if k not in {key for key, _ in mu.gets}}
        for key, expr in mu.sets:
            history[key] = eval_expr(expr, env)
        return [state.with_history(history)]

    # -- closures ---------------------------------------------------------------

    def normal_forms(self, step, state: StratState) -> List[StratState]:
        """States reachable by iterating ``step`` at which it yields nothing."""
        return self._worklist(step, state, collect_all=False)

    def closure(self, step, state: StratState) -> List[StratState]:
        """Reflexive-transitive closure of ``step`` (the input comes first)."""
        return self._worklist(step, state, collect_all=True)

    def _worklist(self, step, state: StratState, collect_all: bool) -> List[StratState]:
        seen = {state.canon}
        out = _ResultSet()
        level = [state]
        while level:
            fresh = []
            for st in level:
                if self.budget_check is not None:
                    self.budget_check()
                succ = step(st)
                if collect_all or not succ:
                    out.add(st)
                for nxt in succ:
                    if nxt.canon not in seen:
                        seen.add(nxt.canon)
                        fresh.append(nxt)
            level = sorted(fresh, key=_by_canon)
        return out.states


def _history_equal(a, b) -> bool:
    if a is INF or b is INF:
        return a is b
    return type(a) is type(b) and a == b
