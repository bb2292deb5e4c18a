"""Immutable heterogeneous graph of users and repositories.

Typed edges: directed follow (user -> user), timestamped fork
(user -> repo, earliest timestamp per pair), and watch (user -> repo).
Similarity queries run on the undirected collapsed view, where edge
direction is ignored and a fork plus a watch between the same pair count
as a single neighbour relation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import UnknownNode
from .events import EventKind


class NodeKind(enum.Enum):
    USER = "user"
    REPO = "repo"


@dataclass(frozen=True)
class NodeRef:
    kind: NodeKind
    id: str

    def __str__(self):
        return f"{self.kind.value}:{self.id}"


def user_ref(user_id):
    return NodeRef(NodeKind.USER, user_id)


def repo_ref(repo_id):
    return NodeRef(NodeKind.REPO, repo_id)


class Graph:
    """Built once by :func:`build_graph`; safe for concurrent reads."""

    def __init__(self, user_ids, repo_ids, follows, forks, watches, profiles,
                 dropped_events):
        self.user_ids = tuple(sorted(user_ids))
        self.repo_ids = tuple(sorted(repo_ids))
        self.follows = frozenset(follows)  # (follower, followee)
        self.forks = dict(forks)  # (user, repo) -> earliest ts
        self.watches = frozenset(watches)  # (user, repo)
        self.user_profiles, self.repo_profiles = profiles
        self.dropped_events = dropped_events

        # Combined integer index space: users first, then repos.
        self._user_index = {u: i for i, u in enumerate(self.user_ids)}
        n_users = len(self.user_ids)
        self._repo_index = {r: n_users + i for i, r in enumerate(self.repo_ids)}
        self.n_nodes = n_users + len(self.repo_ids)

        self.followers_of = {}  # followee -> sorted tuple of followers
        self.followees_of = {}
        for follower, followee in sorted(self.follows):
            self.followers_of.setdefault(followee, []).append(follower)
            self.followees_of.setdefault(follower, []).append(followee)
        self.forks_of_user = {}  # user -> sorted list of (repo, ts)
        self.forkers_of_repo = {}
        for (user, repo), ts in sorted(self.forks.items()):
            self.forks_of_user.setdefault(user, []).append((repo, ts))
            self.forkers_of_repo.setdefault(repo, []).append(user)

        self.indptr, self.indices = self._build_csr()

    def _build_csr(self):
        """CSR adjacency of the undirected collapsed view."""
        uidx = self._user_index
        ridx = self._repo_index
        src = []
        dst = []
        for follower, followee in self.follows:
            src.append(uidx[follower])
            dst.append(uidx[followee])
        pair_edges = {(uidx[u], ridx[r]) for u, r in self.forks}
        pair_edges.update((uidx[u], ridx[r]) for u, r in self.watches)
        for i, j in pair_edges:
            src.append(i)
            dst.append(j)
        if src:
            a = np.array(src + dst, dtype=np.int64)
            b = np.array(dst + src, dtype=np.int64)
            edges = np.unique(np.stack([a, b], axis=1), axis=0)
            rows, cols = edges[:, 0], edges[:, 1]
        else:
            rows = cols = np.empty(0, dtype=np.int64)
        indptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, cols.astype(np.int32)

    # -- lookups -----------------------------------------------------------

    def __contains__(self, node):
        index = self._user_index if node.kind is NodeKind.USER else self._repo_index
        return node.id in index

    def node_index(self, node):
        """Position of a node in the combined index space used by the kernels."""
        try:
            if node.kind is NodeKind.USER:
                return self._user_index[node.id]
            return self._repo_index[node.id]
        except KeyError:
            raise UnknownNode(f"node {node} not in graph") from None

    def neighbor_indices(self, index):
        return self.indices[self.indptr[index] : self.indptr[index + 1]]

    def node_at(self, index):
        n_users = len(self.user_ids)
        if index < n_users:
            return user_ref(self.user_ids[index])
        return repo_ref(self.repo_ids[index - n_users])

    def edge_counts(self):
        """Per-kind edge counts (the collapsed view merges fork+watch pairs)."""
        return {
            "follow": len(self.follows),
            "fork": len(self.forks),
            "watch": len(self.watches),
            "collapsed_undirected": len(self.indices) // 2,
        }

    def dump_edges(self, fh):
        """Debug dump: one `kind:id -> kind:id [edge_kind ts]` line per edge."""
        lines = []
        for follower, followee in self.follows:
            lines.append(f"user:{follower} -> user:{followee} [follow -]")
        for (user, repo), ts in self.forks.items():
            lines.append(f"user:{user} -> repo:{repo} [fork {ts}]")
        for user, repo in self.watches:
            lines.append(f"user:{user} -> repo:{repo} [watch -]")
        for line in sorted(lines):
            fh.write(line + "\n")


def build_graph(events, active_users, active_repos, profiles=(None, None)):
    """Assemble the graph from events restricted to the active id sets.

    Events touching an inactive endpoint are dropped (tallied in
    ``Graph.dropped_events``). Duplicate forks of the same (user, repo)
    pair collapse to the earliest timestamp.
    """
    active_users = set(active_users)
    active_repos = set(active_repos)
    follows = set()
    forks = {}
    watches = set()
    dropped = 0
    for event in events:
        if event.kind is EventKind.FOLLOW:
            if event.actor in active_users and event.target in active_users:
                follows.add((event.actor, event.target))
            else:
                dropped += 1
        elif event.kind is EventKind.FORK:
            if event.actor in active_users and event.target in active_repos:
                key = (event.actor, event.target)
                if key not in forks or event.ts < forks[key]:
                    forks[key] = event.ts
            else:
                dropped += 1
        else:
            if event.actor in active_users and event.target in active_repos:
                watches.add((event.actor, event.target))
            else:
                dropped += 1
    return Graph(active_users, active_repos, follows, forks, watches,
                 profiles, dropped)


def neighbors(g, node):
    """Undirected collapsed neighbourhood as a set of NodeRefs."""
    index = g.node_index(node)
    return {g.node_at(i) for i in g.neighbor_indices(index)}


def degree(g, node):
    index = g.node_index(node)
    return int(g.indptr[index + 1] - g.indptr[index])
