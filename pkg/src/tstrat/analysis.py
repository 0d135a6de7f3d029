"""Analysis commands over a model: simulation, bounded/unbounded/untimed
reachability, and earliest/latest search.

Each command is an extended strategy explored incrementally: a step
strategy drives one round, an emit predicate picks solutions out of the
visited states, and an expand predicate implements until-style stopping.
Exploration is breadth-first (level-synchronous frontier, global visited
set keyed on the full strategy-state) or depth-first for the d-variants;
solutions are deduplicated on the returned clocked state, listed in
discovery order, and truncated to the requested count.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .configuration import StratState, format_history
from .model import Model
from .semantics import Interpreter, RunStats
from .strategies import (
    CAfter,
    CAnd,
    CBefore,
    CIn,
    CmdFind,
    CmdSearch,
    CmdTrew,
    CmdTsim,
    Command,
    SIf,
    SStop,
    TUntime,
)


class AnalysisError(Exception):
    pass


class BudgetExhausted(Exception):
    pass


@dataclass
class Limits:
    max_states: Optional[int] = None
    max_rounds: Optional[int] = None
    timeout: Optional[float] = None  # seconds


@dataclass
class Solution:
    state: StratState
    rounds: int
    stuck: bool = False
    timed: bool = True

    @property
    def clock(self):
        return self.state.clock

    def text(self) -> str:
        body = f"{{{self.state.config.canon}}}"
        if self.timed:
            body += f" in time {self.state.clock}"
        if self.state.history:
            body += f" | {format_history(self.state.history)}"
        if self.stuck:
            body += "  (stuck)"
        return body


class _Budget:
    """Shared work counter; searches and strategy closures spend from one pot."""

    __slots__ = ("max_states", "deadline", "used")

    def __init__(self, limits: Limits):
        self.max_states = limits.max_states
        self.deadline = None
        if limits.timeout is not None:
            self.deadline = time.monotonic() + limits.timeout
        self.used = 0

    def spend(self):
        self.used += 1
        if self.max_states is not None and self.used > self.max_states:
            raise BudgetExhausted("state budget exhausted")
        if self.deadline is not None and self.used % 256 == 0 \
                and time.monotonic() > self.deadline:
            raise BudgetExhausted("timeout")


class _Search:
    """One incremental exploration; solutions accumulate in discovery order."""

    def __init__(self, interp: Interpreter, step_mu, tau, emit, expand,
                 budget: _Budget, n=None, max_rounds=None, depth=None,
                 stuck_emit=False, timed=True):
        self.interp = interp
        self.step_mu = step_mu
        self.tau = tau
        self.emit = emit
        self.expand = expand
        self.budget = budget
        self.n = n
        self.max_rounds = max_rounds
        self.depth = depth
        self.stuck_emit = stuck_emit
        self.timed = timed
        self.solutions: List[Solution] = []
        self.solution_keys = set()

    def _add_solution(self, state: StratState, rounds: int, stuck: bool):
        key = state.clocked.canon
        if key in self.solution_keys:
            return
        self.solution_keys.add(key)
        self.solutions.append(Solution(state, rounds, stuck, self.timed))

    def _full(self) -> bool:
        return self.n is not None and len(self.solutions) >= self.n

    def _step(self, state: StratState) -> List[StratState]:
        return self.interp.eval_round(self.step_mu, self.tau, state)

    def _visit(self, state: StratState, rounds: int):
        """Emit/expand one state; returns successors (None when done)."""
        self.budget.spend()
        self.interp.stats.states_explored += 1
        solved = False
        if self.emit(state):
            self._add_solution(state, rounds, stuck=False)
            solved = True
            if self._full():
                return None
        if not self.expand(state) or (self.depth is not None and rounds >= self.depth):
            return []
        succ = self._step(state)
        if not succ and self.stuck_emit and not solved:
            self._add_solution(state, rounds, stuck=True)
            if self._full():
                return None
        return succ

    def bfs(self, init: StratState):
        visited = {init.canon}
        frontier = [init]
        rounds = 0
        while frontier:
            fresh = []
            for state in frontier:
                succ = self._visit(state, rounds)
                if succ is None:
                    return
                for nxt in succ:
                    if nxt.canon not in visited:
                        visited.add(nxt.canon)
                        fresh.append(nxt)
            rounds += 1
            if fresh and self.max_rounds is not None and rounds > self.max_rounds:
                raise BudgetExhausted("round budget exhausted")
            frontier = sorted(fresh, key=lambda s: s.canon)

    def dfs(self, init: StratState):
        # with a depth bound the visited set records the shallowest round a
        # state was reached at; deeper revisits are pruned, shallower ones
        # re-expanded so the bounded result set matches the BFS one
        best = {init.canon: 0}
        stack = [(init, 0)]
        while stack:
            state, rounds = stack.pop()
            succ = self._visit(state, rounds)
            if succ is None:
                return
            if succ and self.max_rounds is not None and rounds + 1 > self.max_rounds:
                raise BudgetExhausted("round budget exhausted")
            for nxt in reversed(succ):
                seen_at = best.get(nxt.canon)
                if seen_at is None or (self.depth is not None and rounds + 1 < seen_at):
                    best[nxt.canon] = rounds + 1
                    stack.append((nxt, rounds + 1))


def run_command(cmd: Command, model: Model, limits: Optional[Limits] = None):
    """Execute a parsed command; returns (solutions, stats, status).

    Status is "ok" when at least one solution was found, "no-solutions"
    otherwise, and "budget-exhausted" when a limit aborted the run; any
    solutions found before the abort are still returned (find latest
    reports its best-so-far, marked incomplete in the stats).
    """
    if cmd.model != model.name:
        raise AnalysisError(f"command addresses model {cmd.model!r}, "
                            f"but {model.name!r} is loaded")
    limits = limits or Limits()
    stats = RunStats()
    budget = _Budget(limits)
    interp = Interpreter(model, stats, budget.spend)
    start = time.perf_counter()
    solutions, exhausted = _dispatch(cmd, interp, budget, limits)
    stats.wall_ms = (time.perf_counter() - start) * 1000.0
    if exhausted:
        stats.budget_exhausted = True
        status = "budget-exhausted"
    elif solutions:
        status = "ok"
    else:
        status = "no-solutions"
    return solutions, stats, status


def _dispatch(cmd, interp, budget, limits) -> Tuple[List[Solution], bool]:
    init = interp.model.init
    if isinstance(cmd, CmdTsim):
        reached = lambda st: st.clock >= cmd.bound
        search = _Search(interp, cmd.mu, cmd.tau,
                         emit=reached, expand=lambda st: not reached(st),
                         budget=budget, n=cmd.limit, max_rounds=limits.max_rounds,
                         stuck_emit=True)
        exhausted = _run(search, init, bfs=True)
        return search.solutions, exhausted
    if isinstance(cmd, CmdTrew):
        return _run_trew(cmd, interp, budget)
    if isinstance(cmd, CmdSearch):
        tau = TUntime(cmd.tau) if cmd.untimed else cmd.tau
        cond = cmd.cond
        step_mu = cmd.mu
        if cmd.interval is not None:
            cond = CAnd(cond, CIn(cmd.interval))
            if type(cmd.interval.upper) is int:
                step_mu = SIf(CAfter(cmd.interval.upper), SStop(), cmd.mu)
        search = _Search(interp, step_mu, tau,
                         emit=lambda st: interp.eval_cond(cond, st),
                         expand=lambda st: True,
                         budget=budget, n=cmd.limit, max_rounds=limits.max_rounds,
                         depth=cmd.depth, timed=not cmd.untimed)
        exhausted = _run(search, init, bfs=not cmd.depth_first)
        return search.solutions, exhausted
    if isinstance(cmd, CmdFind):
        if cmd.latest:
            return _find_latest(cmd, interp, budget, limits, init)
        return _find_earliest(cmd, interp, budget, limits, init)
    raise AnalysisError(f"not a command: {cmd!r}")


def _run(search: _Search, init: StratState, bfs: bool) -> bool:
    try:
        if bfs:
            search.bfs(init)
        else:
            search.dfs(init)
        return False
    except BudgetExhausted:
        return True


def _run_trew(cmd: CmdTrew, interp, budget) -> Tuple[List[Solution], bool]:
    # states after exactly `depth` rounds; levels are deduplicated
    # individually (a state may recur at several depths)
    level = [interp.model.init]
    try:
        for _ in range(cmd.depth):
            keys = set()
            fresh = []
            for state in level:
                budget.spend()
                interp.stats.states_explored += 1
                for nxt in interp.eval_round(cmd.mu, cmd.tau, state):
                    if nxt.canon not in keys:
                        keys.add(nxt.canon)
                        fresh.append(nxt)
            level = fresh
            if not level:
                break
    except BudgetExhausted:
        return [], True
    solutions = []
    seen = set()
    for state in level:
        if state.clocked.canon not in seen:
            seen.add(state.clocked.canon)
            solutions.append(Solution(state, cmd.depth))
        if cmd.limit is not None and len(solutions) >= cmd.limit:
            break
    return solutions, False


def _find_latest(cmd: CmdFind, interp, budget, limits, init):
    search = _Search(interp, cmd.mu, cmd.tau,
                     emit=lambda st: interp.eval_cond(cmd.cond, st),
                     expand=lambda st: not interp.eval_cond(cmd.cond, st),
                     budget=budget, n=None, max_rounds=limits.max_rounds)
    exhausted = _run(search, init, bfs=True)
    if exhausted:
        interp.stats.incomplete = True
    return _max_clock(search.solutions), exhausted


def _max_clock(solutions):
    if not solutions:
        return []
    top = max(s.clock for s in solutions)
    return [s for s in solutions if s.clock == top]


def _find_earliest(cmd: CmdFind, interp, budget, limits, init):
    # branch and bound: find one solution, then search again below its
    # clock (ticking past the bound is cut off) until nothing is found
    best = None
    bound = None
    while True:
        if bound is None:
            cond, step_mu = cmd.cond, cmd.mu
        else:
            cond = CAnd(cmd.cond, CBefore(bound))
            step_mu = SIf(CAfter(bound), SStop(), cmd.mu)
        search = _Search(interp, step_mu, cmd.tau,
                         emit=lambda st, c=cond: interp.eval_cond(c, st),
                         expand=lambda st, c=cond: not interp.eval_cond(c, st),
                         budget=budget, n=1, max_rounds=limits.max_rounds)
        if _run(search, init, bfs=True):
            interp.stats.incomplete = True
            return ([best] if best is not None else []), True
        if not search.solutions:
            break
        best = search.solutions[0]
        bound = best.clock
        if bound == 0:
            break
    return ([best] if best is not None else []), False
