"""Triplet extraction, class balancing, and train/validation splitting.

A triplet is one candidate diffusion triangle: a followee forked a repo,
and one of their followers either re-forked it later (positive) or did
not (negative).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoPositives, TooFewSamples


@dataclass(frozen=True)
class Triplet:
    followee: str
    follower: str
    repo: str
    label: bool

    def key(self):
        return (self.followee, self.follower, self.repo)


def extract_triplets(g, forks=None):
    """All candidate triangles with their diffusion labels.

    For every fork edge (followee -> repo at t0) and every follower of the
    followee, emits one triplet labelled true iff the follower forked the
    same repo strictly after t0. ``forks`` defaults to the graph's own fork
    edges; passing a separate {(user, repo): ts} map scores triangles from
    a later window against this graph's follow topology.

    Output is sorted by (followee, follower, repo).
    """
    if forks is None:
        forks = g.forks
    forks_by_user = {}
    for (user, repo), ts in forks.items():
        forks_by_user.setdefault(user, []).append((repo, ts))

    out = []
    for followee in sorted(forks_by_user):
        followers = g.followers_of.get(followee)
        if not followers:
            continue
        for repo, t0 in sorted(forks_by_user[followee]):
            for follower in followers:
                follower_ts = forks.get((follower, repo))
                label = follower_ts is not None and follower_ts > t0
                out.append(Triplet(followee, follower, repo, label))
    out.sort(key=Triplet.key)
    return out


def extract_holdout_triplets(g, forks_later):
    """Triangles still open when the graph's window ends, labelled later.

    g carries the earlier window (follows, forks, watches); forks_later is
    the {(user, repo): ts} map of the following window. For every fork edge
    (followee -> repo at t0) and follower of the followee, emits a triplet
    unless the follower already forked that repo in the earlier window
    (such triangles are resolved and belong to the earlier window's set).
    Label is true iff the follower forks the repo in the later window,
    strictly after t0. Output is sorted by (followee, follower, repo).
    """
    forks_by_user = {}
    for (user, repo), ts in g.forks.items():
        forks_by_user.setdefault(user, []).append((repo, ts))

    out = []
    for followee in sorted(forks_by_user):
        followers = g.followers_of.get(followee)
        if not followers:
            continue
        for repo, t0 in sorted(forks_by_user[followee]):
            for follower in followers:
                if (follower, repo) in g.forks:
                    continue
                later_ts = forks_later.get((follower, repo))
                label = later_ts is not None and later_ts > t0
                out.append(Triplet(followee, follower, repo, label))
    out.sort(key=Triplet.key)
    return out


def balance_negatives(triplets, ratio=1.0, seed=0):
    """Keep all positives, down-sample negatives to floor(ratio * n_pos).

    Sampling is uniform without replacement; if fewer negatives exist they
    are all kept. Output is re-sorted to the canonical triplet order.
    """
    if ratio <= 0:
        raise ValueError(f"ratio must be > 0, got {ratio}")
    positives = [t for t in triplets if t.label]
    negatives = [t for t in triplets if not t.label]
    if not positives:
        raise NoPositives("cannot balance a triplet set with no positives")
    n_keep = min(int(ratio * len(positives)), len(negatives))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(negatives), size=n_keep, replace=False)
    kept = positives + [negatives[i] for i in sorted(chosen)]
    kept.sort(key=Triplet.key)
    return kept


def train_val_split(triplets, val_fraction=0.2, seed=0):
    """Stratified split: per class, shuffle and send ceil(f*n) to validation.

    Both halves keep at least one sample of each class; raises
    TooFewSamples when a class has fewer than two members.
    """
    if not 0 < val_fraction < 1:
        raise ValueError(f"val_fraction must be in (0,1), got {val_fraction}")
    rng = np.random.default_rng(seed)
    train, val = [], []
    for wanted in (True, False):
        group = [t for t in triplets if t.label is wanted]
        if len(group) < 2:
            raise TooFewSamples(
                f"need >= 2 {'positive' if wanted else 'negative'} triplets, "
                f"got {len(group)}"
            )
        perm = rng.permutation(len(group))
        n_val = math.ceil(val_fraction * len(group))
        n_val = min(max(n_val, 1), len(group) - 1)
        val.extend(group[i] for i in perm[:n_val])
        train.extend(group[i] for i in perm[n_val:])
    train.sort(key=Triplet.key)
    val.sort(key=Triplet.key)
    return train, val


def write_triplets_csv(triplets, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["followee", "follower", "repo", "label"])
        for t in triplets:
            writer.writerow([t.followee, t.follower, t.repo, int(t.label)])


def read_triplets_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [
            Triplet(r["followee"], r["follower"], r["repo"], r["label"] == "1")
            for r in reader
        ]
