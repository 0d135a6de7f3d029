"""System states: multisets of objects and (delayed) messages.

Entities are immutable after construction and carry a canonical text form
computed eagerly.  Canonical forms are the engine's dedup keys: two
configurations are equal as multisets iff their canonical strings are
equal, regardless of construction order.  The same strings double as the
printed output, so what the CLI shows is exactly what the engine dedups on.
"""

from __future__ import annotations

from .timedomain import INF, format_time, is_time, is_time_inf

EMPTY_CONFIG_TEXT = "none"


def format_value(v) -> str:
    """Render a scalar value (time, INF, bool, symbol)."""
    if v is INF:
        return "INF"
    if type(v) is bool:
        return "true" if v else "false"
    if type(v) is int:
        return str(v)
    if isinstance(v, str):
        return v
    if isinstance(v, Msg):
        return v.canon
    raise TypeError(f"not a value: {v!r}")


class Obj:
    """An object: identifier, class, and attribute map."""

    __slots__ = ("oid", "cls", "attrs", "canon")

    def __init__(self, oid: str, cls: str, attrs):
        self.oid = oid
        self.cls = cls
        self.attrs = dict(attrs)
        body = ", ".join(f"{k} : {format_value(v)}" for k, v in sorted(self.attrs.items()))
        self.canon = f"< {oid} : {cls} | {body} >"

    def __eq__(self, other):
        return isinstance(other, Obj) and self.canon == other.canon

    def __hash__(self):
        return hash(self.canon)

    def __repr__(self):
        return self.canon


class Msg:
    """A ripe (undelayed) message."""

    __slots__ = ("name", "args", "canon")

    def __init__(self, name: str, args=()):
        self.name = name
        self.args = tuple(args)
        self.canon = f"{name}({', '.join(format_value(a) for a in self.args)})"

    def __eq__(self, other):
        return isinstance(other, Msg) and self.canon == other.canon

    def __hash__(self):
        return hash(self.canon)

    def __repr__(self):
        return self.canon


class DlyMsg:
    """A message with remaining delay in [lower, upper]."""

    __slots__ = ("msg", "lower", "upper", "canon")

    def __init__(self, msg: Msg, lower: int, upper):
        if not is_time(lower):
            raise ValueError(f"dly lower bound must be a finite time: {lower!r}")
        if not is_time_inf(upper):
            raise ValueError(f"dly upper bound must be a time or INF: {upper!r}")
        if upper < lower:
            raise ValueError(f"dly bounds out of order: {lower} > {format_time(upper)}")
        self.msg = msg
        self.lower = lower
        self.upper = upper
        self.canon = f"dly({msg.canon}, {lower}, {format_time(upper)})"

    def __eq__(self, other):
        return isinstance(other, DlyMsg) and self.canon == other.canon

    def __hash__(self):
        return hash(self.canon)

    def __repr__(self):
        return self.canon


class Configuration:
    """Multiset of entities, stored sorted by canonical form."""

    __slots__ = ("entities", "canon", "_index")

    def __init__(self, entities=()):
        self.entities = tuple(sorted(entities, key=lambda e: e.canon))
        self.canon = " ".join(e.canon for e in self.entities) or EMPTY_CONFIG_TEXT
        self._index = None

    def index(self):
        """Entity positions grouped by shape, for matching: object class,
        message name, delayed-message name (plus all delayed positions)."""
        if self._index is None:
            by_class, by_msg, by_dly, dly_all = {}, {}, {}, []
            for i, e in enumerate(self.entities):
                if isinstance(e, Obj):
                    by_class.setdefault(e.cls, []).append(i)
                elif isinstance(e, DlyMsg):
                    by_dly.setdefault(e.msg.name, []).append(i)
                    dly_all.append(i)
                else:
                    by_msg.setdefault(e.name, []).append(i)
            self._index = (by_class, by_msg, by_dly, dly_all)
        return self._index

    def __eq__(self, other):
        return isinstance(other, Configuration) and self.canon == other.canon

    def __hash__(self):
        return hash(self.canon)

    def __len__(self):
        return len(self.entities)

    def __iter__(self):
        return iter(self.entities)

    def __repr__(self):
        return "{" + self.canon + "}"

    def replace(self, removed_indices, added_entities) -> "Configuration":
        """New configuration with the indexed entities swapped for new ones."""
        removed = set(removed_indices)
        kept = [e for i, e in enumerate(self.entities) if i not in removed]
        kept.extend(added_entities)
        return Configuration(kept)


def canonicalize(config: Configuration) -> str:
    """Order-insensitive canonical form; equal multisets yield equal strings."""
    return config.canon


class ClockedState:
    """A configuration paired with the total time elapsed since init."""

    __slots__ = ("config", "clock", "canon")

    def __init__(self, config: Configuration, clock: int):
        if not is_time(clock):
            raise ValueError(f"clock must be a finite time: {clock!r}")
        self.config = config
        self.clock = clock
        self.canon = f"{{{config.canon}}} in time {clock}"

    def __eq__(self, other):
        return isinstance(other, ClockedState) and self.canon == other.canon

    def __hash__(self):
        return hash(self.canon)

    def __repr__(self):
        return self.canon


def format_history(history) -> str:
    return ", ".join(f"'{k} |-> {format_value(v)}" for k, v in sorted(history.items()))


class StratState:
    """Unit of strategy evaluation: clocked configuration plus history map."""

    __slots__ = ("clocked", "history", "canon")

    def __init__(self, clocked: ClockedState, history=None):
        self.clocked = clocked
        self.history = dict(history) if history else {}
        if self.history:
            self.canon = f"{clocked.canon} | {format_history(self.history)}"
        else:
            self.canon = clocked.canon

    @property
    def config(self) -> Configuration:
        return self.clocked.config

    @property
    def clock(self) -> int:
        return self.clocked.clock

    def with_clocked(self, clocked: ClockedState) -> "StratState":
        return StratState(clocked, self.history)

    def with_history(self, history) -> "StratState":
        return StratState(self.clocked, history)

    def __eq__(self, other):
        return isinstance(other, StratState) and self.canon == other.canon

    def __hash__(self):
        return hash(self.canon)

    def __repr__(self):
        return self.canon
