"""Pick one solution from a Pareto front without a decision maker, and score fronts.

Every selector returns an index into the front it was given. Knee angles,
TOPSIS distances and PROMETHEE differences are computed on objectives
min-max normalized over the candidate front, so selection is unit-free.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import nondominated_mask, objective_matrix
from .errors import DegenerateObjective, EmptyInput, NegativeObjective, TooFewPoints, Unsupported
from .scalarize import check_weights

log = logging.getLogger(__name__)


def _front(front) -> np.ndarray:
    F = objective_matrix(front)
    if F.size == 0:
        raise EmptyInput("front is empty")
    return F


def _normalize(F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo, span = F.min(axis=0), np.ptp(F, axis=0)
    Z = np.divide(F - lo, span, out=np.zeros_like(F), where=span > 0)
    return Z, span > 0


# --- knee point ----------------------------------------------------------------


def knee_angles(front) -> np.ndarray:
    """Reflex angle (degrees) at each point of the f1-sorted front; NaN at the ends.

    The reflex angle at ``A_i`` is 360 degrees minus the angle
    ``A_{i-1} A_i A_{i+1}``; returned in the input order of ``front``.
    """
    F = _front(front)
    if F.shape[1] != 2:
        raise Unsupported("angle-based knee detection needs exactly two objectives")
    if F.shape[0] < 3:
        raise TooFewPoints("angle-based knee detection needs at least three points")
    order = np.lexsort((F[:, 1], F[:, 0]))
    Z, _ = _normalize(F)
    Z = Z[order]
    u = Z[:-2] - Z[1:-1]
    v = Z[2:] - Z[1:-1]
    nu, nv = np.linalg.norm(u, axis=1), np.linalg.norm(v, axis=1)
    denom = nu * nv
    cos = np.divide(np.sum(u * v, axis=1), denom, out=np.full(denom.shape, -1.0), where=denom > 0)
    inner = np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))
    out = np.full(F.shape[0], np.nan)
    out[order[1:-1]] = 360.0 - inner
    return out


def knee_by_angle(front) -> int:
    """Interior point with the largest reflex angle; ties go to the lowest index."""
    angles = knee_angles(front)
    best = np.nanmax(angles)
    return int(np.flatnonzero(angles == best)[0])


# --- hypervolume ---------------------------------------------------------------


class Orientation(Enum):
    PAPER_ORIGIN = "origin"
    STANDARD_NADIR = "nadir"


@dataclass(frozen=True)
class HypervolumeRef:
    """Reference point and box orientation.

    ``PAPER_ORIGIN``: each point owns the box between the reference (default
    the origin) and itself. ``STANDARD_NADIR``: each point owns the box
    between itself and a reference that should be worse than every point.
    """

    reference: tuple[float, ...] | None = None
    orientation: Orientation = Orientation.PAPER_ORIGIN

    def point(self, M: int) -> np.ndarray:
        if self.reference is None:
            if self.orientation is Orientation.STANDARD_NADIR:
                raise ValueError("STANDARD_NADIR needs an explicit reference point")
            return np.zeros(M)
        ref = np.asarray(self.reference, dtype=float)
        if ref.shape != (M,) or not np.all(np.isfinite(ref)):
            raise ValueError(f"reference must be {M} finite values")
        return ref


ORIGIN = HypervolumeRef()


def _boxes(F: np.ndarray, ref: HypervolumeRef) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper corners of every point's box."""
    r = ref.point(F.shape[1])
    if ref.orientation is Orientation.PAPER_ORIGIN:
        if np.any(F < r):
            raise NegativeObjective("origin-anchored hypervolume needs every objective >= the reference")
        return np.broadcast_to(r, F.shape), F
    return np.minimum(F, r), np.broadcast_to(r, F.shape)


def hypervolume_point(f: Sequence[float], ref: HypervolumeRef = ORIGIN) -> float:
    F = np.atleast_2d(np.asarray(f, dtype=float))
    lo, hi = _boxes(F, ref)
    return float(np.prod(hi - lo))


def hypervolume_set(front, ref: HypervolumeRef = ORIGIN) -> float:
    """Exact area of the union of the points' boxes (two objectives)."""
    F = _front(front)
    if F.shape[1] != 2:
        raise Unsupported("exact hypervolume is implemented for two objectives; use hypervolume_monte_carlo")
    lo, hi = _boxes(F, ref)
    # drop boxes contained in another one, so redundant points cannot perturb the rounding
    if ref.orientation is Orientation.PAPER_ORIGIN:
        hi = np.unique(hi[nondominated_mask(-hi)], axis=0)
        # boxes share the lower corner: sweep f1 downwards, track the tallest box so far
        r = lo[0]
        order = np.argsort(-hi[:, 0], kind="stable")
        x = hi[order, 0]
        tallest = np.maximum.accumulate(hi[order, 1])
        widths = x - np.append(x[1:], r[0])
        return float(np.sum(widths * (tallest - r[1])))
    lo = np.unique(lo[nondominated_mask(lo)], axis=0)
    # boxes share the upper corner: sweep f1 upwards, track the lowest floor so far
    r = hi[0]
    order = np.argsort(lo[:, 0], kind="stable")
    x = lo[order, 0]
    floor = np.minimum.accumulate(lo[order, 1])
    widths = np.append(x[1:], r[0]) - x
    return float(np.sum(widths * (r[1] - floor)))


def hypervolume_monte_carlo(
    front, ref: HypervolumeRef = ORIGIN, samples: int = 10**6, seed: int = 0, chunk: int = 200_000
) -> tuple[float, float]:
    """Monte-Carlo estimate of the union volume; returns ``(estimate, standard_error)``."""
    F = _front(front)
    lo, hi = _boxes(F, ref)
    box_lo, box_hi = lo.min(axis=0), hi.max(axis=0)
    vol = float(np.prod(box_hi - box_lo))
    if vol == 0.0:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        U = box_lo + rng.random((m, F.shape[1])) * (box_hi - box_lo)
        inside = np.zeros(m, dtype=bool)
        for a, b in zip(lo, hi):
            inside |= np.all((U >= a) & (U <= b), axis=1)
        hits += int(inside.sum())
        done += m
    p = hits / samples
    return vol * p, vol * math.sqrt(p * (1 - p) / samples)


def hypervolume_select(front, ref: HypervolumeRef = ORIGIN) -> int:
    """Point with the largest individual box; ties go to the lowest index."""
    F = _front(front)
    lo, hi = _boxes(F, ref)
    v = np.prod(hi - lo, axis=1)
    return int(np.argmax(v))


# --- MCDM ----------------------------------------------------------------------


class Preference(Enum):
    USUAL = "usual"
    LINEAR = "linear"


@dataclass(frozen=True)
class McdmConfig:
    """Criterion weights (uniform when ``None``) and the PROMETHEE preference function.

    ``LINEAR`` maps a normalized advantage ``d`` to ``clamp(d / delta, 0, 1)``;
    ``USUAL`` maps any positive advantage to 1.
    """

    weights: tuple[float, ...] | None = None
    preference: Preference = Preference.LINEAR
    delta: float = 1.0

    def weight_vector(self, M: int) -> np.ndarray:
        if self.weights is None:
            return np.full(M, 1.0 / M)
        w = np.asarray(check_weights(self.weights))
        if w.size != M:
            raise ValueError(f"{w.size} weights for {M} objectives")
        return w


def _warn_constant(active: np.ndarray) -> None:
    for i in np.flatnonzero(~active):
        msg = f"objective f_{i + 1} is constant over the front and is ignored"
        log.info(msg)
        warnings.warn(msg, DegenerateObjective, stacklevel=3)


def topsis_scores(front, config: McdmConfig = McdmConfig()) -> np.ndarray:
    """Closeness ``d- / (d+ + d-)`` to the utopia point of the normalized front."""
    F = _front(front)
    Z, active = _normalize(F)
    if F.shape[0] > 1:
        _warn_constant(active)
    w = config.weight_vector(F.shape[1]) * active
    d_plus = np.sqrt(np.sum((w * Z) ** 2, axis=1))
    d_minus = np.sqrt(np.sum((w * (1.0 - Z)) ** 2, axis=1))
    total = d_plus + d_minus
    return np.divide(d_minus, total, out=np.full(total.shape, 0.5), where=total > 0)


def topsis_select(front, config: McdmConfig = McdmConfig()) -> int:
    return int(np.argmax(topsis_scores(front, config)))


def promethee_flows(front, config: McdmConfig = McdmConfig()) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Positive, negative and net outranking flows."""
    F = _front(front)
    n = F.shape[0]
    if n < 2:
        raise TooFewPoints("PROMETHEE needs at least two solutions")
    Z, active = _normalize(F)
    w = config.weight_vector(F.shape[1])
    # adv[a, x, i] > 0 when a beats x on objective i (smaller is better)
    adv = Z[None, :, :] - Z[:, None, :]
    if config.preference is Preference.USUAL:
        pref = (adv > 0).astype(float)
    else:
        pref = np.clip(adv / config.delta, 0.0, 1.0)
    pi = pref @ w
    phi_plus = pi.sum(axis=1) / (n - 1)
    phi_minus = pi.sum(axis=0) / (n - 1)
    return phi_plus, phi_minus, phi_plus - phi_minus


def promethee_select(front, config: McdmConfig = McdmConfig()) -> tuple[int, np.ndarray]:
    _, _, phi = promethee_flows(front, config)
    return int(np.argmax(phi)), phi


SELECTORS = ("knee", "hypervolume", "topsis", "promethee")


def select(front, method: str, config: McdmConfig = McdmConfig(), ref: HypervolumeRef = ORIGIN) -> tuple[int, np.ndarray]:
    """Dispatch by name; returns ``(index, per-candidate scores)``."""
    F = _front(front)
    if method == "knee":
        scores = knee_angles(F)
        return knee_by_angle(F), scores
    if method == "hypervolume":
        lo, hi = _boxes(F, ref)
        return hypervolume_select(F, ref), np.prod(hi - lo, axis=1)
    if method == "topsis":
        scores = topsis_scores(F, config)
        return int(np.argmax(scores)), scores
    if method == "promethee":
        return promethee_select(F, config)
    raise ValueError(f"unknown selection method {method!r}; choose from {SELECTORS}")
