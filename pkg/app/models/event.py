"""Timestamped action events and the event log they form."""

import enum
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.exceptions import UnknownNodeError


class ActionKind(str, enum.Enum):
    """Kind of action a user performs."""
    POST = "post"
    FAVORITE = "favorite"
    LIKE = "like"
    COMMENT = "comment"
    FOLLOW = "follow"


# Actions by which a user consumes someone else's content
CONSUMPTION_KINDS = frozenset({ActionKind.FAVORITE, ActionKind.LIKE, ActionKind.COMMENT})
TARGETED_KINDS = CONSUMPTION_KINDS | {ActionKind.FOLLOW}


class ActionEvent(BaseModel):
    """One action of `actor` at integer day `timestamp`.

    For a post, `target_post` is the id of the created post. For a
    consumption, it is the post being consumed (may be unknown).
    """
    model_config = ConfigDict(frozen=True)

    actor: int
    kind: ActionKind
    target_node: Optional[int] = None
    target_post: Optional[str] = None
    timestamp: int = Field(..., ge=0)

    @model_validator(mode="after")
    def check_target(self) -> "ActionEvent":
        if self.kind in TARGETED_KINDS and self.target_node is None:
            raise ValueError(f"kind={self.kind.value} requires target_node")
        if self.kind == ActionKind.POST and self.target_node is not None:
            raise ValueError("kind=post must not have target_node")
        return self

    @property
    def is_consumption(self) -> bool:
        return self.kind in CONSUMPTION_KINDS


class EventLog(BaseModel):
    """Time-ordered events plus the registry of node labels.

    Node ids are dense integers; `labels[i]` is the opaque string id of node i.
    Instances are immutable; the lookup indexes below are built lazily once.
    """
    model_config = ConfigDict(frozen=True)

    events: Tuple[ActionEvent, ...]
    labels: Tuple[str, ...]

    @model_validator(mode="after")
    def check_order(self) -> "EventLog":
        times = [event.timestamp for event in self.events]
        if any(a > b for a, b in zip(times, times[1:])):
            raise ValueError("events must be sorted by timestamp")
        return self

    @property
    def t_min(self) -> int:
        return self.events[0].timestamp if self.events else 0

    @property
    def t_max(self) -> int:
        return self.events[-1].timestamp if self.events else 0

    @property
    def timespan(self) -> Tuple[int, int]:
        return self.t_min, self.t_max

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @cached_property
    def index(self) -> Dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    @cached_property
    def times(self) -> np.ndarray:
        return np.fromiter((e.timestamp for e in self.events), dtype=np.int64, count=len(self.events))

    @cached_property
    def actions_by_actor(self) -> Dict[int, Tuple[int, ...]]:
        """Event positions per actor, in time order."""
        grouped: Dict[int, List[int]] = {}
        for pos, event in enumerate(self.events):
            grouped.setdefault(event.actor, []).append(pos)
        return {node: tuple(positions) for node, positions in grouped.items()}

    @cached_property
    def consumptions_by_pair(self) -> Dict[Tuple[int, int], Tuple[int, ...]]:
        """Consumption event positions keyed by (producer u, consumer v)."""
        grouped: Dict[Tuple[int, int], List[int]] = {}
        for pos, event in enumerate(self.events):
            if event.is_consumption and event.target_node != event.actor:
                grouped.setdefault((event.target_node, event.actor), []).append(pos)
        return {pair: tuple(positions) for pair, positions in grouped.items()}

    @cached_property
    def post_times(self) -> Dict[Tuple[int, str], int]:
        """Creation day of each (author, post id)."""
        found: Dict[Tuple[int, str], int] = {}
        for event in self.events:
            if event.kind == ActionKind.POST and event.target_post is not None:
                found.setdefault((event.actor, event.target_post), event.timestamp)
        return found

    @cached_property
    def posts_by_author(self) -> Dict[int, np.ndarray]:
        grouped: Dict[int, List[int]] = {}
        for event in self.events:
            if event.kind == ActionKind.POST:
                grouped.setdefault(event.actor, []).append(event.timestamp)
        return {node: np.asarray(days, dtype=np.int64) for node, days in grouped.items()}

    @cached_property
    def first_interaction(self) -> Dict[int, int]:
        """Day of each node's first interaction with another user, as actor or target."""
        first: Dict[int, int] = {}
        for event in self.events:
            if event.kind not in TARGETED_KINDS or event.target_node == event.actor:
                continue
            first.setdefault(event.actor, event.timestamp)
            first.setdefault(event.target_node, event.timestamp)
        return first

    def positions_between(self, start: int, end: int) -> range:
        """Positions of events with start <= timestamp <= end."""
        lo = int(np.searchsorted(self.times, start, side="left"))
        hi = int(np.searchsorted(self.times, end, side="right"))
        return range(lo, max(lo, hi))

    def has_node(self, node: int) -> bool:
        return 0 <= node < len(self.labels)

    def require_node(self, node: int) -> None:
        if not isinstance(node, (int, np.integer)) or not self.has_node(int(node)):
            raise UnknownNodeError(node)

    def node_id(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise UnknownNodeError(label)

    def label(self, node: int) -> str:
        self.require_node(node)
        return self.labels[node]

    def kind_counts(self) -> Dict[str, int]:
        counts = {kind.value: 0 for kind in ActionKind}
        for event in self.events:
            counts[event.kind.value] += 1
        return counts

    def production_time(self, event: ActionEvent) -> Optional[int]:
        """Day the content consumed by `event` was produced, if it can be resolved."""
        u = event.target_node
        if event.target_post is not None:
            known = self.post_times.get((u, event.target_post))
            if known is not None:
                return known
        days = self.posts_by_author.get(u)
        if days is None:
            return None
        i = int(np.searchsorted(days, event.timestamp, side="right"))
        return int(days[i - 1]) if i > 0 else None
