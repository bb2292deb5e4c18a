"""Per-triplet feature vectors: profile-based, topological, and combined.

Feature order is frozen (see FEATURE_NAMES) so that dumps, checkpoints,
and ablation slices stay reproducible. Timestamps enter as ages in days
relative to a reference time (the end of the training window) so the
input scale stays commensurate before batch normalization.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NegativeAge, UnknownId
from .graph import repo_ref, user_ref

SECONDS_PER_DAY = 86400.0

KATZ_BETA = 0.005
KATZ_MAX_LEN = 3


class FeatureSet(enum.Enum):
    NODE_NO_WATCH = "node-no-watch"
    NODE = "node"
    TOPOLOGICAL = "topo"
    COMBINED = "combined"


FEATURE_DIM = {
    FeatureSet.NODE_NO_WATCH: 15,
    FeatureSet.NODE: 17,
    FeatureSet.TOPOLOGICAL: 12,
    FeatureSet.COMBINED: 29,
}

# Column slice of each mode within the combined 29-feature matrix.
FEATURE_SLICE = {
    FeatureSet.NODE_NO_WATCH: slice(0, 15),
    FeatureSet.NODE: slice(0, 17),
    FeatureSet.TOPOLOGICAL: slice(17, 29),
    FeatureSet.COMBINED: slice(0, 29),
}

_PROFILE_USER = ("follower_count", "following_count", "repos_created",
                 "account_age_days", "is_admin")
_PROFILE_REPO = ("fork_count", "issue_count", "open_issue_count",
                 "watcher_count", "age_days")

FEATURE_NAMES = (
    tuple(f"followee_{n}" for n in _PROFILE_USER)
    + tuple(f"follower_{n}" for n in _PROFILE_USER)
    + tuple(f"repo_{n}" for n in _PROFILE_REPO)
    + ("followee_watches_repo", "follower_watches_repo")
    + tuple(f"followee_repo_{n}" for n in kernels.SCORE_COLUMNS)
    + tuple(f"followee_follower_{n}" for n in kernels.SCORE_COLUMNS)
)


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    label: bool
    mode: FeatureSet

    def __post_init__(self):
        if len(self.values) != FEATURE_DIM[self.mode]:
            raise ValueError(
                f"{self.mode.value} vector must have {FEATURE_DIM[self.mode]} "
                f"entries, got {len(self.values)}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature vector contains NaN/Inf")


def _age_days(created_at, ref_time, owner):
    age = (ref_time - created_at) / SECONDS_PER_DAY
    if age < 0:
        raise NegativeAge(f"{owner} created_at {created_at} is after "
                          f"ref_time {ref_time}")
    return age


def _user_block(profile, ref_time):
    return [
        float(profile.follower_count),
        float(profile.following_count),
        float(profile.repos_created),
        _age_days(profile.created_at, ref_time, f"user {profile.user_id}"),
        1.0 if profile.is_admin else 0.0,
    ]


def node_features(triplet, g, ref_time, profiles=None):
    """17 profile-derived reals; fixed order per FEATURE_NAMES[0:17]."""
    users, repos = profiles if profiles is not None else (g.user_profiles,
                                                          g.repo_profiles)
    try:
        followee = users[triplet.followee]
        follower = users[triplet.follower]
        repo = repos[triplet.repo]
    except (KeyError, TypeError):
        raise UnknownId(
            f"triplet {triplet.key()} references an id without a profile"
        ) from None
    values = _user_block(followee, ref_time) + _user_block(follower, ref_time)
    values += [
        float(repo.fork_count),
        float(repo.issue_count),
        float(repo.open_issue_count),
        float(repo.watcher_count),
        _age_days(repo.created_at, ref_time, f"repo {repo.repo_id}"),
    ]
    values.append(1.0 if (triplet.followee, triplet.repo) in g.watches else 0.0)
    values.append(1.0 if (triplet.follower, triplet.repo) in g.watches else 0.0)
    return np.array(values, dtype=np.float64)


def node_features_no_watch(triplet, g, ref_time, profiles=None):
    """First 15 entries of node_features (watch bits removed)."""
    return node_features(triplet, g, ref_time, profiles)[:15]


def _pair_scores(g, a, b):
    ia = np.array([g.node_index(a)], dtype=np.int32)
    ib = np.array([g.node_index(b)], dtype=np.int32)
    return kernels.pair_scores(g.indptr, g.indices, ia, ib,
                               beta=KATZ_BETA, max_len=KATZ_MAX_LEN)[0]


def katz(g, a, b, beta=KATZ_BETA, max_len=KATZ_MAX_LEN):
    """Damped truncated walk count: sum over l<=max_len of beta^l * walks_l."""
    ia = np.array([g.node_index(a)], dtype=np.int32)
    ib = np.array([g.node_index(b)], dtype=np.int32)
    return float(kernels.pair_scores(g.indptr, g.indices, ia, ib,
                                     beta=beta, max_len=max_len)[0, 0])


def common_neighbors(g, a, b):
    return int(_pair_scores(g, a, b)[1])


def preferential_attachment(g, a, b):
    return int(_pair_scores(g, a, b)[2])


def adamic_adar(g, a, b):
    """Sum of 1/ln(degree) over common neighbours of degree >= 2."""
    return float(_pair_scores(g, a, b)[3])


def jaccard(g, a, b):
    return float(_pair_scores(g, a, b)[4])


def total_neighbors(g, a, b):
    return int(_pair_scores(g, a, b)[5])


def topo_features(triplet, g):
    """12 reals: six measures for (followee, repo), six for (followee, follower)."""
    followee = user_ref(triplet.followee)
    fr = _pair_scores(g, followee, repo_ref(triplet.repo))
    ff = _pair_scores(g, followee, user_ref(triplet.follower))
    return np.concatenate([fr, ff])


def assemble(triplet, mode, g, ref_time, profiles=None):
    """FeatureVector for one triplet in the requested mode."""
    if mode is FeatureSet.NODE:
        values = node_features(triplet, g, ref_time, profiles)
    elif mode is FeatureSet.NODE_NO_WATCH:
        values = node_features_no_watch(triplet, g, ref_time, profiles)
    elif mode is FeatureSet.TOPOLOGICAL:
        values = topo_features(triplet, g)
    else:
        values = np.concatenate(
            [node_features(triplet, g, ref_time, profiles),
             topo_features(triplet, g)]
        )
    return FeatureVector(values, triplet.label, mode)


def feature_matrix(triplets, g, ref_time, profiles=None):
    """Combined 29-column matrix plus labels for a list of triplets.

    Topological scores are computed once per distinct node pair; triangles
    sharing a followee-repo or followee-follower pair reuse the result.
    """
    n = len(triplets)
    out = np.empty((n, 29), dtype=np.float64)
    labels = np.empty(n, dtype=np.int64)
    for i, t in enumerate(triplets):
        out[i, :17] = node_features(t, g, ref_time, profiles)
        labels[i] = int(t.label)

    followee_idx = np.array(
        [g.node_index(user_ref(t.followee)) for t in triplets], dtype=np.int32)
    follower_idx = np.array(
        [g.node_index(user_ref(t.follower)) for t in triplets], dtype=np.int32)
    repo_idx = np.array(
        [g.node_index(repo_ref(t.repo)) for t in triplets], dtype=np.int32)

    for cols, other in ((slice(17, 23), repo_idx), (slice(23, 29), follower_idx)):
        pairs = np.stack([followee_idx, other], axis=1)
        uniq, inverse = np.unique(pairs, axis=0, return_inverse=True)
        scores = kernels.pair_scores(
            g.indptr, g.indices, uniq[:, 0].astype(np.int32),
            uniq[:, 1].astype(np.int32), beta=KATZ_BETA, max_len=KATZ_MAX_LEN)
        out[:, cols] = scores[inverse]
    if not np.all(np.isfinite(out)):
        raise ValueError("feature matrix contains NaN/Inf")
    return out, labels


def mode_matrix(combined, mode):
    """Slice a combined 29-column matrix down to one feature-set mode."""
    return combined[:, FEATURE_SLICE[mode]]


def write_features_csv(matrix, labels, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(FEATURE_NAMES) + ["label"])
        for row, label in zip(matrix, labels):
            writer.writerow([repr(v) for v in row] + [int(label)])


def read_features_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header[:-1]) != FEATURE_NAMES or header[-1] != "label":
            raise ValueError(f"{path} does not carry the frozen feature header")
        rows = list(reader)
    matrix = np.array([[float(v) for v in r[:-1]] for r in rows], dtype=np.float64)
    labels = np.array([int(r[-1]) for r in rows], dtype=np.int64)
    if matrix.size == 0:
        matrix = matrix.reshape(0, len(FEATURE_NAMES))
    return matrix, labels
