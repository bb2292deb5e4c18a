"""Event-log and profile schemas: parsing, loading, windowing, activity filter.

The on-disk formats are line-delimited JSON (one object per line, UTF-8):

* ``events.jsonl`` -- ``kind`` ("fork" | "watch" | "follow"), ``actor``,
  ``target``, ``ts`` (integer epoch seconds).
* ``users.jsonl``  -- ``user_id, follower_count, following_count,
  repos_created, created_at, is_admin``.
* ``repos.jsonl``  -- ``repo_id, fork_count, issue_count, open_issue_count,
  watcher_count, created_at``.

Unknown extra fields are ignored with a warning.
"""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass

from .errors import DanglingReference, MalformedLine


class EventKind(enum.Enum):
    FORK = "fork"
    WATCH = "watch"
    FOLLOW = "follow"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    actor: str  # user id
    target: str  # user id for FOLLOW, repo id otherwise
    ts: int  # epoch seconds


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    follower_count: int
    following_count: int
    repos_created: int
    created_at: int
    is_admin: bool


@dataclass(frozen=True)
class RepoProfile:
    repo_id: str
    fork_count: int
    issue_count: int
    open_issue_count: int
    watcher_count: int
    created_at: int


@dataclass(frozen=True)
class Window:
    """Half-open time interval [start, end) in epoch seconds."""

    start: int
    end: int

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError(f"window start {self.start} must precede end {self.end}")

    def __contains__(self, ts):
        return self.start <= ts < self.end


_EVENT_FIELDS = {"kind", "actor", "target", "ts"}
_USER_FIELDS = {
    "user_id",
    "follower_count",
    "following_count",
    "repos_created",
    "created_at",
    "is_admin",
}
_REPO_FIELDS = {
    "repo_id",
    "fork_count",
    "issue_count",
    "open_issue_count",
    "watcher_count",
    "created_at",
}


def _decode_object(line, line_no):
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLine(f"invalid JSON: {exc}", line_no) from exc
    if not isinstance(obj, dict):
        raise MalformedLine("expected a JSON object", line_no)
    return obj


def _warn_extras(obj, known, line_no, path):
    extras = set(obj) - known
    if extras:
        warnings.warn(
            f"{path} line {line_no}: ignoring unknown fields {sorted(extras)}",
            stacklevel=3,
        )


def _require(obj, field, line_no):
    if field not in obj:
        raise MalformedLine(f"missing field {field!r}", line_no)
    return obj[field]


def _require_count(obj, field, line_no):
    value = _require(obj, field, line_no)
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedLine(f"field {field!r} must be an integer", line_no)
    if value < 0:
        raise MalformedLine(f"field {field!r} must be >= 0, got {value}", line_no)
    return value


def _require_str(obj, field, line_no):
    value = _require(obj, field, line_no)
    if not isinstance(value, str) or not value:
        raise MalformedLine(f"field {field!r} must be a non-empty string", line_no)
    return value


def parse_event_line(line, line_no=None):
    """Decode one events.jsonl line into an Event.

    Raises MalformedLine on bad JSON, missing fields, an unknown kind,
    a negative timestamp, or a self-follow.
    """
    obj = _decode_object(line, line_no)
    kind_raw = _require_str(obj, "kind", line_no)
    try:
        kind = EventKind(kind_raw)
    except ValueError:
        raise MalformedLine(f"unknown event kind {kind_raw!r}", line_no) from None
    actor = _require_str(obj, "actor", line_no)
    target = _require_str(obj, "target", line_no)
    ts = _require_count(obj, "ts", line_no)
    if kind is EventKind.FOLLOW and actor == target:
        raise MalformedLine(f"self-follow by {actor!r}", line_no)
    _warn_extras(obj, _EVENT_FIELDS, line_no, "events")
    return Event(kind, actor, target, ts)


def serialize_event(event):
    """Inverse of parse_event_line (round-trip exact)."""
    return json.dumps(
        {
            "kind": event.kind.value,
            "actor": event.actor,
            "target": event.target,
            "ts": event.ts,
        },
        separators=(",", ":"),
    )


def parse_user_line(line, line_no=None):
    obj = _decode_object(line, line_no)
    user_id = _require_str(obj, "user_id", line_no)
    is_admin = _require(obj, "is_admin", line_no)
    if not isinstance(is_admin, bool):
        raise MalformedLine("field 'is_admin' must be a JSON boolean", line_no)
    profile = UserProfile(
        user_id=user_id,
        follower_count=_require_count(obj, "follower_count", line_no),
        following_count=_require_count(obj, "following_count", line_no),
        repos_created=_require_count(obj, "repos_created", line_no),
        created_at=_require_count(obj, "created_at", line_no),
        is_admin=is_admin,
    )
    _warn_extras(obj, _USER_FIELDS, line_no, "users")
    return profile


def parse_repo_line(line, line_no=None):
    obj = _decode_object(line, line_no)
    profile = RepoProfile(
        repo_id=_require_str(obj, "repo_id", line_no),
        fork_count=_require_count(obj, "fork_count", line_no),
        issue_count=_require_count(obj, "issue_count", line_no),
        open_issue_count=_require_count(obj, "open_issue_count", line_no),
        watcher_count=_require_count(obj, "watcher_count", line_no),
        created_at=_require_count(obj, "created_at", line_no),
    )
    if profile.open_issue_count > profile.issue_count:
        raise MalformedLine(
            f"open_issue_count {profile.open_issue_count} exceeds issue_count "
            f"{profile.issue_count}",
            line_no,
        )
    _warn_extras(obj, _REPO_FIELDS, line_no, "repos")
    return profile


def _iter_lines(path):
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if line:
                yield line_no, line


def load_dataset(events_path, users_path, repos_path):
    """Load events plus user/repo profiles from three JSONL files.

    Returns (events sorted ascending by ts, {user_id: UserProfile},
    {repo_id: RepoProfile}). The event sort is stable, so same-ts events
    keep their file order. Raises DanglingReference if an event names an
    id with no profile, MalformedLine on duplicate or invalid records.
    """
    users = {}
    for line_no, line in _iter_lines(users_path):
        profile = parse_user_line(line, line_no)
        if profile.user_id in users:
            raise MalformedLine(f"duplicate user_id {profile.user_id!r}", line_no)
        users[profile.user_id] = profile

    repos = {}
    for line_no, line in _iter_lines(repos_path):
        profile = parse_repo_line(line, line_no)
        if profile.repo_id in repos:
            raise MalformedLine(f"duplicate repo_id {profile.repo_id!r}", line_no)
        repos[profile.repo_id] = profile

    events = []
    for line_no, line in _iter_lines(events_path):
        event = parse_event_line(line, line_no)
        if event.actor not in users:
            raise DanglingReference(
                f"line {line_no}: event actor {event.actor!r} has no user profile"
            )
        target_pool = users if event.kind is EventKind.FOLLOW else repos
        if event.target not in target_pool:
            raise DanglingReference(
                f"line {line_no}: event target {event.target!r} has no "
                f"{'user' if event.kind is EventKind.FOLLOW else 'repo'} profile"
            )
        events.append(event)

    events.sort(key=lambda e: e.ts)
    return events, users, repos


def split_window(events, window):
    """Events with start <= ts < end, input order preserved."""
    return [e for e in events if e.ts in window]


def filter_active(events, min_repo_forks=25, min_user_forks=10):
    """Activity filter over a training window.

    A repo is kept iff it received at least ``min_repo_forks`` fork events;
    a user is kept iff they forked at least ``min_user_forks`` distinct
    repositories. Returns (active user ids, active repo ids).
    """
    repo_fork_events = {}
    user_forked_repos = {}
    for event in events:
        if event.kind is not EventKind.FORK:
            continue
        repo_fork_events[event.target] = repo_fork_events.get(event.target, 0) + 1
        user_forked_repos.setdefault(event.actor, set()).add(event.target)

    active_repos = {r for r, n in repo_fork_events.items() if n >= min_repo_forks}
    active_users = {
        u for u, repos in user_forked_repos.items() if len(repos) >= min_user_forks
    }
    return active_users, active_repos
