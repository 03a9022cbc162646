"""Pairwise household preference and scrapping matrices.

Cost distributions are Normal across households, so the fraction preferring
one technology over another has the closed form
Phi((mean_other - mean_own) / sqrt(sd_own^2 + sd_other^2)); only cost
differences matter. Matrices are indexed so that F[i, j] drives the flow of
households leaving j for i.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .costs import CostDistribution
from .errors import ValidationError

logger = logging.getLogger(__name__)


def pairwise_preference(gcoh_i: CostDistribution, gcoh_j: CostDistribution) -> float:
    """Fraction of households for whom technology i is cheaper than j."""
    spread = math.hypot(gcoh_i.sd, gcoh_j.sd)
    diff = gcoh_j.mean - gcoh_i.mean
    if spread == 0.0:
        if diff == 0.0:
            logger.debug("degenerate preference tie (equal means, zero spreads); returning 0.5")
            return 0.5
        return 1.0 if diff > 0 else 0.0
    return float(ndtr(diff / spread))


def scrap_preference(mc_i: CostDistribution, payback_j: CostDistribution) -> float:
    """Fraction of households whose running cost on i exceeds j's payback cost."""
    spread = math.hypot(mc_i.sd, payback_j.sd)
    diff = mc_i.mean - payback_j.mean
    if spread == 0.0:
        if diff == 0.0:
            logger.debug("degenerate scrap tie (equal means, zero spreads); returning 0.5")
            return 0.5
        return 1.0 if diff > 0 else 0.0
    return float(ndtr(diff / spread))


@dataclass(frozen=True)
class PreferenceMatrix:
    """F[i, j]: fraction preferring i over j, zeroed where switching j->i is blocked."""

    f: np.ndarray
    mask: np.ndarray        # mask[i, j] True when switching from j to i is permitted
    available: np.ndarray

    def __post_init__(self):
        if self.f.shape != self.mask.shape or self.f.shape[0] != self.f.shape[1]:
            raise ValidationError("preference matrix and mask must be square and congruent")


@dataclass(frozen=True)
class ScrapMatrix:
    """G[i, j]: fraction of i-holders for whom scrapping i in favour of j pays back."""

    g: np.ndarray
    mask: np.ndarray        # mask[i, j] True when scrapping i towards j is permitted


def preference_matrix(gcoh: list[CostDistribution], switch_allowed: np.ndarray,
                      available: np.ndarray) -> PreferenceMatrix:
    """Fill all unmasked pairs of available technologies.

    Antisymmetry (F_ij + F_ji = 1) is enforced by construction: each pair is
    evaluated once and mirrored. Unavailable technologies (zero share, not
    seeded) carry zero rows and columns.
    """
    n = len(gcoh)
    available = np.asarray(available, dtype=bool)
    switch_allowed = np.asarray(switch_allowed, dtype=bool)
    if switch_allowed.shape != (n, n) or available.shape != (n,):
        raise ValidationError("mask/availability shapes inconsistent with the cost list")
    if int(available.sum()) < 1:
        raise ValidationError("no available technologies")
    # a single available technology yields the trivial matrix (no pairs)
    f = np.zeros((n, n))
    for i in range(n):
        if not available[i]:
            continue
        f[i, i] = 0.5
        for j in range(i + 1, n):
            if not available[j]:
                continue
            fij = pairwise_preference(gcoh[i], gcoh[j])
            f[i, j] = fij
            f[j, i] = 1.0 - fij
    mask = switch_allowed & np.outer(available, available)
    np.fill_diagonal(mask, False)
    f = np.where(mask | np.eye(n, dtype=bool), f, 0.0)
    f = np.where(np.outer(available, available), f, 0.0)
    return PreferenceMatrix(f, mask, available)


def scrap_matrix(mc: list[CostDistribution], payback: list[CostDistribution],
                 scrap_allowed: np.ndarray, available: np.ndarray) -> ScrapMatrix:
    """Scrapping fractions for every permitted (incumbent, candidate) pair."""
    n = len(mc)
    available = np.asarray(available, dtype=bool)
    scrap_allowed = np.asarray(scrap_allowed, dtype=bool) & np.outer(available, available)
    np.fill_diagonal(scrap_allowed, False)
    g = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if scrap_allowed[i, j]:
                g[i, j] = scrap_preference(mc[i], payback[j])
    return ScrapMatrix(g, scrap_allowed)
