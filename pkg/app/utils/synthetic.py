"""Seeded synthetic event logs for end-to-end runs and tests."""

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Set

import numpy as np

from app.models.event import ActionKind
from app.schemas.rows import EventRow
from app.services.ingest_service import HEADER

logger = logging.getLogger(__name__)

# Action mixes, in KINDS order
KINDS = [ActionKind.POST, ActionKind.FAVORITE, ActionKind.LIKE, ActionKind.COMMENT, ActionKind.FOLLOW]
PRODUCER_MIX = [0.45, 0.15, 0.15, 0.15, 0.10]
LURKER_MIX = [0.03, 0.30, 0.40, 0.02, 0.25]


@dataclass
class SyntheticLog:
    rows: List[EventRow]
    counts: Dict[str, int] = field(default_factory=dict)

    def to_csv(self) -> bytes:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(HEADER)
        for row in self.rows:
            writer.writerow([row.actor, row.kind.value, row.target_node or "", row.target_post or "", row.timestamp])
        return buffer.getvalue().encode("utf-8")


def generate_events(
    n_events: int = 10000,
    n_users: int = 300,
    days: int = 196,
    lurker_share: float = 0.6,
    seed: int = 42
) -> SyntheticLog:
    """Generate a time-ordered log over days [0, days - 1].

    Users are split into producers and lurkers with different action mixes;
    activity levels are heavy tailed. Consumptions target existing posts,
    preferring the actor's followees; a consumption drawn before any foreign
    post exists becomes a post.
    """
    rng = np.random.default_rng(seed)
    users = [f"u{i:04d}" for i in range(n_users)]
    is_lurker = rng.random(n_users) < lurker_share
    activity = rng.pareto(1.5, n_users) + 1.0
    activity /= activity.sum()
    popularity = np.where(is_lurker, 0.2, 1.0) * (rng.pareto(1.2, n_users) + 1.0)
    popularity /= popularity.sum()

    times = np.sort(rng.integers(0, days, size=n_events))
    actors = rng.choice(n_users, size=n_events, p=activity)

    posts: List[tuple] = []  # (author, post id)
    posts_by_author: Dict[int, List[str]] = {}
    followees: Dict[int, Set[int]] = {}
    rows: List[EventRow] = []
    counts = {kind.value: 0 for kind in ActionKind}

    for t, a in zip(times, actors):
        a = int(a)
        mix = LURKER_MIX if is_lurker[a] else PRODUCER_MIX
        kind = KINDS[int(rng.choice(len(KINDS), p=mix))]
        target = post = None

        if kind == ActionKind.FOLLOW:
            u = int(rng.choice(n_users, p=popularity))
            if u == a:
                u = (u + 1) % n_users
            followees.setdefault(a, set()).add(u)
            target = users[u]
        elif kind != ActionKind.POST:
            candidates = [u for u in sorted(followees.get(a, ())) if posts_by_author.get(u)]
            if candidates and rng.random() < 0.7:
                u = candidates[int(rng.integers(len(candidates)))]
                post = posts_by_author[u][-1 - int(rng.integers(min(3, len(posts_by_author[u]))))]
            else:
                foreign = [p for p in posts[-200:] if p[0] != a]
                if not foreign:
                    kind = ActionKind.POST
                else:
                    u, post = foreign[int(rng.integers(len(foreign)))]
            if kind != ActionKind.POST:
                target = users[u]

        if kind == ActionKind.POST:
            post = f"p{len(posts):06d}"
            posts.append((a, post))
            posts_by_author.setdefault(a, []).append(post)

        rows.append(EventRow(actor=users[a], kind=kind, target_node=target, target_post=post, timestamp=int(t)))
        counts[kind.value] += 1

    logger.info(f"Generated {len(rows)} synthetic events over {n_users} users and {days} days")
    return SyntheticLog(rows=rows, counts=counts)
