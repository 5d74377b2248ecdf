"""Recommendation re-ranking: ratings, item-based CF candidates, and
multi-objective top-N list selection.

Ratings are held in dense ``users x items`` arrays (NaN = not rated), which
is fine at desk scale (hundreds of users, a few thousand items).
"""

from __future__ import annotations

import csv
import logging
import re
import warnings
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ColdUser, EmptyDataset, InvalidN, ParseError
from .moea import EncodingKind, EvolutionConfig, ListProblem, ParetoArchive, evolve
from .select import McdmConfig, select

log = logging.getLogger(__name__)

HELDOUT_FRACTION = 0.2


class Split(Enum):
    TRAIN = "train"
    HELDOUT = "heldout"


def _natural_key(s: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", s)]


@dataclass(frozen=True, eq=False)
class RatingsMatrix:
    """Ratings with a per-rating TRAIN/HELDOUT tag.

    ``values[u, i]`` is NaN where user ``u`` did not rate item ``i``;
    ``heldout[u, i]`` is True for ratings withheld from training.
    """

    users: tuple[str, ...]
    items: tuple[str, ...]
    values: np.ndarray
    heldout: np.ndarray
    like_threshold: float
    r_min: float
    r_max: float

    def __post_init__(self) -> None:
        self.values.setflags(write=False)
        self.heldout.setflags(write=False)

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def rated(self) -> np.ndarray:
        return ~np.isnan(self.values)

    @property
    def n_ratings(self) -> int:
        return int(self.rated.sum())

    @property
    def density(self) -> float:
        return self.n_ratings / (self.n_users * self.n_items)

    @property
    def train_mask(self) -> np.ndarray:
        return self.rated & ~self.heldout

    def train_values(self) -> np.ndarray:
        """TRAIN ratings with zeros elsewhere."""
        return np.where(self.train_mask, self.values, 0.0)

    def heldout_likes(self) -> np.ndarray:
        return self.heldout & (np.nan_to_num(self.values, nan=-np.inf) >= self.like_threshold)

    def popularity(self) -> np.ndarray:
        """Number of TRAIN ratings per item."""
        return self.train_mask.sum(axis=0)

    def user_index(self, user: str | int) -> int:
        if isinstance(user, (int, np.integer)):
            if not 0 <= user < self.n_users:
                raise KeyError(f"user index {user} out of range")
            return int(user)
        try:
            return self.users.index(user)
        except ValueError:
            raise KeyError(f"unknown user {user!r}") from None


def _split_heldout(rated: np.ndarray, seed: int) -> np.ndarray:
    """Withhold ``floor(20%)`` of each user's ratings, chosen at random."""
    rng = np.random.default_rng(seed)
    heldout = np.zeros_like(rated)
    for u in range(rated.shape[0]):
        idx = np.flatnonzero(rated[u])
        k = int(HELDOUT_FRACTION * idx.size)
        if k:
            heldout[u, rng.choice(idx, k, replace=False)] = True
    return heldout


def build_matrix(
    triples: list[tuple[str, str, float]], like_threshold: float | None = None, seed: int = 0
) -> RatingsMatrix:
    """Assemble a matrix from ``(user, item, rating)`` triples."""
    if not triples:
        raise EmptyDataset("no ratings")
    users = tuple(sorted({t[0] for t in triples}, key=_natural_key))
    items = tuple(sorted({t[1] for t in triples}, key=_natural_key))
    u_pos = {u: k for k, u in enumerate(users)}
    i_pos = {i: k for k, i in enumerate(items)}
    values = np.full((len(users), len(items)), np.nan)
    for u, i, r in triples:
        values[u_pos[u], i_pos[i]] = r
    r = np.array([t[2] for t in triples])
    r_min, r_max = float(r.min()), float(r.max())
    if like_threshold is None:
        like_threshold = 0.5 * (r_min + r_max)
    heldout = _split_heldout(~np.isnan(values), seed)
    return RatingsMatrix(users, items, values, heldout, float(like_threshold), r_min, r_max)


def load_ratings(path, like_threshold: float | None = None, seed: int = 0) -> RatingsMatrix:
    """Read ``user_id,item_id,rating`` CSV. Row numbers in errors count the header as row 1."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyDataset(f"{path} is empty")
        if [h.strip() for h in header] != ["user_id", "item_id", "rating"]:
            raise ParseError("header must be user_id,item_id,rating", 1)
        triples = []
        seen = set()
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", row_no)
            u, i, r = (c.strip() for c in row)
            if not u or not i:
                raise ParseError("empty user_id or item_id", row_no)
            try:
                rating = float(r)
            except ValueError:
                raise ParseError(f"rating {r!r} is not a number", row_no) from None
            if not np.isfinite(rating):
                raise ParseError(f"rating {r!r} is not finite", row_no)
            if (u, i) in seen:
                raise ParseError(f"duplicate rating for ({u}, {i})", row_no)
            seen.add((u, i))
            triples.append((u, i, rating))
    if not triples:
        raise EmptyDataset(f"{path} has no ratings")
    return build_matrix(triples, like_threshold, seed)


def write_ratings(path, matrix: RatingsMatrix) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "item_id", "rating"])
        for u, i in zip(*np.nonzero(matrix.rated)):
            w.writerow([matrix.users[u], matrix.items[i], repr(float(matrix.values[u, i]))])


# --- collaborative filtering -------------------------------------------------------


def item_similarity(matrix: RatingsMatrix) -> np.ndarray:
    """Cosine similarity of item columns restricted to users who rated both.

    Items without co-raters get 0; the diagonal is 1.
    """
    R = matrix.train_values()
    B = matrix.train_mask.astype(float)
    num = R.T @ R
    A = (R**2).T @ B  # A[i, j] = sum of r_ui^2 over users who rated both i and j
    denom = np.sqrt(A * A.T)
    S = np.divide(num, denom, out=np.zeros_like(num), where=denom > 0)
    S = np.clip(S, -1.0, 1.0)
    np.fill_diagonal(S, 1.0)
    return S


@dataclass(frozen=True)
class Candidates:
    """Top-K item indices for one user, best first, with their CF scores."""

    user: int
    items: tuple[int, ...]
    scores: tuple[float, ...]
    cold: bool = False

    def __len__(self) -> int:
        return len(self.items)


def cf_scores(matrix: RatingsMatrix, sim: np.ndarray, user: int) -> np.ndarray:
    """Similarity-weighted average of the user's TRAIN ratings, per item.

    NaN where no rated item has non-zero similarity to the target.
    """
    mask = matrix.train_mask[user]
    r = matrix.values[user, mask]
    W = sim[mask]  # (rated, items)
    num = r @ W
    den = np.abs(W).sum(axis=0)
    return np.divide(num, den, out=np.full(num.shape, np.nan), where=den > 0)


def cf_topk(matrix: RatingsMatrix, sim: np.ndarray, user: str | int, K: int) -> Candidates:
    """Top-K unrated items by CF score; ties and unscored items ordered by item position.

    A user without TRAIN ratings gets the K most popular items and a
    ``ColdUser`` warning.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    u = matrix.user_index(user)
    unrated = np.flatnonzero(~matrix.train_mask[u])
    if not matrix.train_mask[u].any():
        msg = f"user {matrix.users[u]} has no TRAIN ratings; falling back to popularity"
        log.info(msg)
        warnings.warn(msg, ColdUser, stacklevel=2)
        pop = matrix.popularity().astype(float)
        order = unrated[np.lexsort((unrated, -pop[unrated]))][:K]
        return Candidates(u, tuple(int(i) for i in order), tuple(float(pop[i]) for i in order), cold=True)
    s = cf_scores(matrix, sim, u)[unrated]
    key = np.where(np.isnan(s), np.inf, -s)
    order = np.lexsort((unrated, key))[:K]
    return Candidates(u, tuple(int(unrated[k]) for k in order), tuple(float(s[k]) for k in order))


# --- list objectives ---------------------------------------------------------------


class RecListObjectives:
    """``(f_acc, f_div, f_nov)`` of item lists for one user, all minimized, all in [0, 1].

    * ``f_acc = 1 - precision@N`` against the user's held-out likes
    * ``f_div = mean pairwise similarity`` (one minus mean dissimilarity), floored at 0
    * ``f_nov = mean popularity / max popularity`` (one minus mean novelty)
    """

    names = ("f_acc", "f_div", "f_nov")

    def __init__(self, matrix: RatingsMatrix, sim: np.ndarray, user: str | int):
        self.user = matrix.user_index(user)
        self.likes = matrix.heldout_likes()[self.user]
        self.sim = sim
        pop = matrix.popularity().astype(float)
        top = pop.max()
        self.pop_share = pop / top if top > 0 else np.zeros_like(pop)

    def batch(self, lists: np.ndarray) -> np.ndarray:
        """``lists`` is ``(P, N)`` item indices; returns ``(P, 3)``."""
        L = np.atleast_2d(np.asarray(lists, dtype=int))
        N = L.shape[1]
        f_acc = 1.0 - self.likes[L].sum(axis=1) / N
        if N > 1:
            S = self.sim[L[:, :, None], L[:, None, :]]
            off = (S.sum(axis=(1, 2)) - np.trace(S, axis1=1, axis2=2)) / (N * (N - 1))
            f_div = np.clip(off, 0.0, 1.0)
        else:
            f_div = np.zeros(L.shape[0])
        f_nov = self.pop_share[L].mean(axis=1)
        return np.column_stack([f_acc, f_div, f_nov])

    def __call__(self, items) -> tuple[float, float, float]:
        return tuple(float(v) for v in self.batch(np.asarray(items)[None, :])[0])


def precision_at_n(matrix: RatingsMatrix, user: int, items) -> float:
    items = list(items)
    return float(matrix.heldout_likes()[user, items].sum() / len(items)) if items else 0.0


# --- re-ranking ----------------------------------------------------------------------


@dataclass
class RerankResult:
    user: int
    candidates: Candidates
    archive: ParetoArchive
    lists: list[tuple[int, ...]]  # catalog item indices per archive member
    objectives: np.ndarray
    selected: int
    scores: np.ndarray = field(repr=False)

    @property
    def selected_list(self) -> tuple[int, ...]:
        return self.lists[self.selected]

    @property
    def selected_objectives(self) -> tuple[float, float, float]:
        return tuple(float(v) for v in self.objectives[self.selected])


def rerank(
    matrix: RatingsMatrix,
    sim: np.ndarray,
    user: str | int,
    candidates: Candidates,
    N: int,
    config: EvolutionConfig = EvolutionConfig(),
    selection_method: str = "promethee",
    mcdm: McdmConfig = McdmConfig(),
) -> RerankResult:
    """Evolve N-of-K item lists over the three list objectives and pick one.

    The CF top-N list seeds the initial population. Lists in the archive are
    mutually non-dominated; list order within the selected list follows the
    CF ranking.
    """
    K = len(candidates)
    if N < 1:
        raise InvalidN("N must be at least 1")
    if N > K:
        raise InvalidN(f"N={N} exceeds the {K} candidates")
    objectives = RecListObjectives(matrix, sim, user)
    cand = np.asarray(candidates.items, dtype=int)
    problem = ListProblem(
        n_items=K,
        list_length=N,
        evaluate_lists=lambda idx: objectives.batch(cand[idx]),
        n_objectives=3,
        encoding=EncodingKind.BINARY,
        name=f"rerank:{matrix.users[objectives.user]}",
    )
    seed_genome = np.zeros(K, dtype=np.int8)
    seed_genome[:N] = 1
    archive = evolve(problem, config, initial=[seed_genome])
    lists = [tuple(int(cand[i]) for i in m.x) for m in archive]
    F = archive.objectives()
    if len(archive) == 1:
        idx, scores = 0, np.zeros(1)
    else:
        idx, scores = select(F, selection_method, mcdm)
    return RerankResult(objectives.user, candidates, archive, lists, F, idx, np.asarray(scores))


def write_recommendations(path, matrix: RatingsMatrix, results: list[RerankResult]) -> None:
    """``user_id,rank,item_id,f_acc,f_div,f_nov`` for each user's selected list."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "rank", "item_id", "f_acc", "f_div", "f_nov"])
        for res in results:
            f = [repr(v) for v in res.selected_objectives]
            for rank, item in enumerate(res.selected_list, start=1):
                w.writerow([matrix.users[res.user], rank, matrix.items[item], *f])


def write_archive(path, matrix: RatingsMatrix, result: RerankResult) -> None:
    """One row per archive list: ``id,items,f_acc,f_div,f_nov,selected``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "items", "f_acc", "f_div", "f_nov", "selected"])
        for k, (items, f) in enumerate(zip(result.lists, result.objectives)):
            names = " ".join(matrix.items[i] for i in items)
            w.writerow([k, names, *(repr(float(v)) for v in f), int(k == result.selected)])


# --- synthetic data ------------------------------------------------------------------

N_CLUSTERS = 5
N_GENRES = 5


def synth_dataset(
    users: int, items: int, seed: int = 0, density: float = 0.05, like_threshold: float | None = None
) -> RatingsMatrix:
    """Latent-cluster ratings on a 1..5 scale.

    Each user belongs to one of 5 clusters and each item to one of 5 genres.
    Cluster ``c`` favours genre ``c``: base affinity 4.5 there, 2.5 elsewhere,
    plus Gaussian noise, rounded and clipped. Which items get rated follows a
    Zipf popularity profile boosted 4x on the favoured genre. The rating
    count is exactly ``round(density * users * items)`` (at least one per user).
    """
    if users < 2 or items < 2:
        raise ValueError("need at least 2 users and 2 items")
    rng = np.random.default_rng(seed)
    cluster = rng.integers(N_CLUSTERS, size=users)
    genre = rng.integers(N_GENRES, size=items)
    popularity = 1.0 / np.arange(1, items + 1) ** 0.8
    popularity = popularity[rng.permutation(items)]
    total = min(max(round(density * users * items), users), users * items)
    per_user = np.full(users, total // users)
    per_user[rng.choice(users, total % users, replace=False)] += 1
    values = np.full((users, items), np.nan)
    for u in range(users):
        w = popularity * np.where(genre == cluster[u] % N_GENRES, 4.0, 1.0)
        chosen = rng.choice(items, int(per_user[u]), replace=False, p=w / w.sum())
        base = np.where(genre[chosen] == cluster[u] % N_GENRES, 4.5, 2.5)
        values[u, chosen] = np.clip(np.rint(base + rng.normal(0.0, 0.75, chosen.size)), 1, 5)
    width = max(len(str(users)), len(str(items)))
    uid = tuple(f"u{k:0{width}d}" for k in range(users))
    iid = tuple(f"i{k:0{width}d}" for k in range(items))
    rated = ~np.isnan(values)
    heldout = _split_heldout(rated, seed + 1)
    thr = 3.0 if like_threshold is None else float(like_threshold)
    return RatingsMatrix(uid, iid, values, heldout, thr, 1.0, 5.0)


def mean_metrics(matrix: RatingsMatrix, results: list[RerankResult]) -> dict[str, float]:
    """Mean precision, diversity and novelty of the selected lists."""
    if not results:
        return {"precision": float("nan"), "diversity": float("nan"), "novelty": float("nan")}
    F = np.array([r.selected_objectives for r in results])
    return {
        "precision": float(np.mean(1.0 - F[:, 0])),
        "diversity": float(np.mean(1.0 - F[:, 1])),
        "novelty": float(np.mean(1.0 - F[:, 2])),
    }


def ensure_parent(path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p
