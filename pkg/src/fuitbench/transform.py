"""Fuzzy quantization of grayscale images.

A :class:`FuzzyPartition` tiles the pixel domain with triangular fuzzy sets.
Each pixel is replaced by the 1-based index of the set in which it attains
its maximal membership, producing an :class:`~fuitbench.images.IndexImage`.
A plain floor-division quantizer (:func:`hard_discretize`) is provided as
the non-fuzzy baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .images import ImageU8, IndexImage


@dataclass(frozen=True)
class FuzzySet:
    """A triangular fuzzy set with left foot ``p``, peak ``q``, right foot ``r``.

    Membership rises linearly from 0 at ``p`` to 1 at ``q`` and falls back to
    0 at ``r``.  Boundary sets may be shoulders: ``p == q`` makes the set flat
    at 1 for all ``x <= q`` (left shoulder), ``q == r`` flat at 1 for all
    ``x >= q`` (right shoulder).  A fully degenerate set (``p == q == r``) is
    rejected here so evaluation never divides by zero.
    """

    p: float
    q: float
    r: float

    def __post_init__(self) -> None:
        if not (self.p <= self.q <= self.r):
            raise ValueError(f"need p <= q <= r, got ({self.p}, {self.q}, {self.r})")
        if self.p == self.r:
            raise ValueError(f"degenerate fuzzy set: p == q == r == {self.p}")

    def membership(self, x: float) -> float:
        return triangular_membership(x, self)


def triangular_membership(x: float, fset: FuzzySet) -> float:
    """Evaluate the triangular membership of ``x`` in ``fset``.

    Piecewise linear: 0 for ``x <= p``, ``(x-p)/(q-p)`` on ``[p, q]``,
    ``(r-x)/(r-q)`` on ``[q, r]``, 0 for ``x >= r``.  For shoulder sets the
    zero-width ramp is skipped and the surviving ramp is clipped to [0, 1],
    so the flat side evaluates to 1.
    """
    p, q, r = fset.p, fset.q, fset.r
    if p == q:  # left shoulder: flat 1 below the peak
        return float(min(1.0, max(0.0, (r - x) / (r - q))))
    if q == r:  # right shoulder: flat 1 above the peak
        return float(min(1.0, max(0.0, (x - p) / (q - p))))
    if x <= p or x >= r:
        return 0.0
    if x <= q:
        return float((x - p) / (q - p))
    return float((r - x) / (r - q))


@dataclass(frozen=True)
class MembershipRecord:
    """The argmax result for one pixel: 1-based set index and its membership."""

    index: int
    mu: float


@dataclass(frozen=True)
class FuzzyPartition:
    """An ordered collection of fuzzy sets covering ``[domain_lo, domain_hi]``.

    Peaks must be strictly increasing and every point of the domain must have
    positive membership in at least one set.
    """

    sets: tuple[FuzzySet, ...]
    domain_lo: float = 0.0
    domain_hi: float = 255.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "sets", tuple(self.sets))
        if len(self.sets) < 2:
            raise ValueError(f"partition needs at least 2 sets, got {len(self.sets)}")
        if self.domain_lo >= self.domain_hi:
            raise ValueError(f"empty domain [{self.domain_lo}, {self.domain_hi}]")
        peaks = [s.q for s in self.sets]
        if any(b <= a for a, b in zip(peaks, peaks[1:])):
            raise ValueError(f"peaks must be strictly increasing, got {peaks}")
        self._check_coverage()

    def _check_coverage(self) -> None:
        # Membership is positive strictly inside the open interval (p, r);
        # shoulders extend the support to -inf / +inf on the flat side.  The
        # union of these open intervals must contain the closed domain.
        intervals = sorted(
            (
                -np.inf if s.p == s.q else s.p,
                np.inf if s.q == s.r else s.r,
            )
            for s in self.sets
        )
        if intervals[0][0] >= self.domain_lo:
            raise ValueError(f"no set has positive membership at domain_lo = {self.domain_lo}")
        covered = intervals[0][1]
        for lo, hi in intervals[1:]:
            if covered > self.domain_hi:
                return
            if lo >= covered:
                raise ValueError(f"no set has positive membership at x = {covered}")
            covered = max(covered, hi)
        if covered <= self.domain_hi:
            raise ValueError(f"no set has positive membership at x = {min(covered, self.domain_hi)}")

    @property
    def size(self) -> int:
        return len(self.sets)

    @property
    def peaks(self) -> np.ndarray:
        return np.array([s.q for s in self.sets])

    def memberships(self, x: float) -> np.ndarray:
        """Membership of ``x`` in every set, in set order."""
        return np.array([triangular_membership(x, s) for s in self.sets])

    @cached_property
    def _pixel_lut(self) -> np.ndarray:
        # index for every integer pixel 0..255; only valid for the default
        # 8-bit domain, which is the only one images use.
        return np.array([fuit_pixel(self, v).index for v in range(256)], dtype=np.int64)


def build_uniform_partition(
    r_sets: int, domain_lo: float = 0.0, domain_hi: float = 255.0
) -> FuzzyPartition:
    """Build ``r_sets`` evenly spaced triangles with 50% overlap.

    Peaks sit at ``domain_lo + (k - 0.5) * width / r_sets`` for ``k = 1..R``;
    each triangle's feet are the neighboring peaks, and the first/last sets
    are shouldered so the domain edges keep full membership.
    """
    if r_sets < 2:
        raise ValueError(f"need at least 2 fuzzy sets, got {r_sets}")
    if domain_lo >= domain_hi:
        raise ValueError(f"empty domain [{domain_lo}, {domain_hi}]")
    step = (domain_hi - domain_lo) / r_sets
    peaks = [domain_lo + (k - 0.5) * step for k in range(1, r_sets + 1)]
    sets = []
    for k, q in enumerate(peaks):
        p = peaks[k - 1] if k > 0 else q  # left shoulder on the first set
        r = peaks[k + 1] if k < r_sets - 1 else q  # right shoulder on the last
        sets.append(FuzzySet(p=p, q=q, r=r))
    return FuzzyPartition(sets=tuple(sets), domain_lo=domain_lo, domain_hi=domain_hi)


def fuit_pixel(partition: FuzzyPartition, pixel: float) -> MembershipRecord:
    """Map one pixel to its maximal-membership set (ties take the lowest index)."""
    mv = partition.memberships(pixel)
    idx = int(np.argmax(mv))
    return MembershipRecord(index=idx + 1, mu=float(mv[idx]))


def fuit_image(partition: FuzzyPartition, img: ImageU8) -> IndexImage:
    """Apply :func:`fuit_pixel` elementwise; shape is preserved.

    Integer pixels only take 256 values, so the argmax is computed once per
    gray level and applied through a lookup table.
    """
    lut = partition._pixel_lut
    return IndexImage(indices=lut[img.pixels], r_used=partition.size)


def fuit_images(partition: FuzzyPartition, pixels: np.ndarray) -> np.ndarray:
    """Vectorized index transform for a uint8 stack of any shape."""
    return partition._pixel_lut[np.asarray(pixels, dtype=np.uint8)]


def hard_discretize(img: ImageU8, level_width: int) -> IndexImage:
    """Floor-division quantizer: ``index = floor(pixel / L) + 1``.

    Shares the 1-based index convention with the fuzzy transform;
    ``r_used = floor(255 / L) + 1``.  Note that L=32 yields 8 occupied bins
    (indices 1..8) over the 8-bit range.
    """
    r_used = _discretize_bins(level_width)
    indices = img.pixels.astype(np.int64) // level_width + 1
    return IndexImage(indices=indices, r_used=r_used)


def discretize_images(pixels: np.ndarray, level_width: int) -> np.ndarray:
    """Vectorized floor-division transform for a uint8 stack of any shape."""
    _discretize_bins(level_width)
    return np.asarray(pixels, dtype=np.int64) // level_width + 1


def _discretize_bins(level_width: int) -> int:
    if not (1 <= level_width <= 255):
        raise ValueError(f"level width must be in [1, 255], got {level_width}")
    return 255 // level_width + 1


def unique_value_count(img: IndexImage | ImageU8 | np.ndarray) -> tuple[list[int], int]:
    """Distinct values of an image and their cardinality ||V||."""
    if isinstance(img, IndexImage):
        grid = img.indices
    elif isinstance(img, ImageU8):
        grid = img.pixels
    else:
        grid = np.asarray(img)
    values = [int(v) for v in np.unique(grid)]
    return values, len(values)
