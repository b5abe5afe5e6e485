"""
Recurrence seeded orbit scans.

Seeds are laid on the parameter box of the model, reduced by the symmetry of
the flow; near returns along each seed trajectory become shooting guesses,
and the converged orbits are clustered into families by period and by the
Hausdorff distance of their symmetry reduced images.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field
from scipy.signal import argrelmin
from scipy.spatial.distance import directed_hausdorff

from reebrigidity import config
from reebrigidity.dynamics.families import OrbitFamily
from reebrigidity.dynamics.flow import solve
from reebrigidity.dynamics.shooting import shoot_closed_orbit
from reebrigidity.exceptions import (
    ChartError,
    IntegrationError,
    MonodromyConditioning,
    SeedingExhausted,
    ShootingError,
    SingularReebSystem,
)
from reebrigidity.geometry.classes import HomotopyClass

logger = logging.getLogger(__name__)

_FAILURES = (ChartError, IntegrationError, ShootingError, SingularReebSystem, MonodromyConditioning)


class ScanReport(BaseModel):
    """
    Families found by one scan, with the statistics needed to judge how much
    of the phase space the scan actually covered.
    """

    model_config = ConfigDict(frozen=True)

    field: str
    homotopy_class: Optional[HomotopyClass] = None
    window: tuple[float, float]
    seeds: int
    seed_failures: int
    candidates: int
    shots: int
    converged: int
    rejected_class: int
    rejected_window: int
    families: tuple[OrbitFamily, ...] = ()

    @computed_field
    @property
    def coverage(self) -> float:
        if self.shots == 0:
            return 0.0
        return self.converged / self.shots

    @property
    def conclusive(self):
        return self.coverage >= config.COVERAGE_THRESHOLD


def seed_points(model, symmetries, seed_grid=None):
    """
    Seed points on the reduced parameter box. Symmetric axes sit at their
    anchor; the remaining axes share the seed budget.
    """
    axes = model.seed_axes()
    frozen = model.frozen_tags(symmetries)
    free = [j for j, axis in enumerate(axes) if axis.tag not in frozen]
    seed_grid = config.SEED_GRID if seed_grid is None else seed_grid
    if seed_grid:
        per_axis = seed_grid
    elif free:
        per_axis = max(2, int(math.floor(config.SEED_BUDGET ** (1.0 / len(free)) + 1e-9)))
    else:
        per_axis = 1
    grids = [axis.grid(per_axis) if j in free else np.array([axis.anchor]) for j, axis in enumerate(axes)]
    points = [model.normalize(model.from_parameters(params)) for params in itertools.product(*grids)]
    logger.debug("%d seeds on %s (%d free axes)", len(points), model.label, len(free))
    return np.array(points)


def recurrences(field, x0, window, cls=None, tol=None):
    """
    Near returns of the trajectory through x0 at times inside the widened
    window, as (time, residual) pairs sorted by residual.
    """
    model = field.model
    lo, hi = 0.95 * window[0], 1.05 * window[1]
    sol = solve(field, x0, hi, tol, dense_output=True)
    times = np.linspace(max(lo, 1e-9), hi, config.RECURRENCE_SAMPLES)
    states = sol.sol(times).T
    residuals = np.array([np.linalg.norm(model.wrap_difference(s - x0)) for s in states])
    minima = argrelmin(residuals, mode="clip")[0]
    found = []
    for i in minima:
        if residuals[i] >= config.RECURRENCE_TOL:
            continue
        if cls is not None and model.class_of(states[i] - x0) != cls:
            continue
        found.append((float(times[i]), float(residuals[i])))
    return sorted(found, key=lambda item: item[1])


def _shortlist(candidates, reduce, separation=0.05):
    """
    At most MAX_SHOTS guesses. Return times are bucketed; inside a bucket the
    best guesses are taken greedily, skipping seeds whose reduced position is
    within ``separation`` of a seed already chosen for that bucket.
    """
    buckets = {}
    for cand in sorted(candidates, key=lambda c: (c[2], c[1])):
        buckets.setdefault(round(cand[1], 2), []).append(cand)
    chosen = []
    for _, bucket in sorted(buckets.items()):
        taken = []
        for cand in bucket:
            position = reduce(cand[0])
            if any(np.linalg.norm(position - other) < separation for other in taken):
                continue
            taken.append(position)
            chosen.append(cand)
    chosen.sort(key=lambda c: c[2])
    return chosen[: config.MAX_SHOTS]


def orbit_image(field, orbit, points=None, tol=None):
    """
    The orbit image resampled at ``points`` arclength-uniform positions.
    """
    points = config.RESAMPLE_POINTS if points is None else points
    model = field.model
    sol = solve(field, model.coords_of(orbit.point), orbit.period, tol, dense_output=True)
    fine = sol.sol(np.linspace(0.0, orbit.period, 8 * points)).T
    arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(fine, axis=0), axis=1))])
    if arc[-1] <= 0:
        return fine[:points]
    targets = np.linspace(0.0, arc[-1], points, endpoint=False)
    return np.column_stack([np.interp(targets, arc, fine[:, j]) for j in range(fine.shape[1])])


def _reduced_images(field, orbits, symmetries):
    model = field.model
    images = []
    for orbit in orbits:
        raw = orbit_image(field, orbit)
        images.append(model.reduce_image(np.array([model.normalize(p) for p in raw]), symmetries))
    return images


def _spacing(image):
    if image.shape[1] == 0 or len(image) < 2:
        return 0.0
    return float(np.max(np.linalg.norm(np.diff(image, axis=0), axis=1)))


def _same_image(first, second):
    if first.shape[1] == 0:
        return True
    threshold = max(config.HAUSDORFF_TOL, _spacing(first), _spacing(second))
    distance = max(directed_hausdorff(first, second)[0], directed_hausdorff(second, first)[0])
    return distance < threshold


def cluster_orbits(field, orbits, symmetries=None):
    """
    Group orbits into families: equal period within PERIOD_MATCH_TOL and
    reduced images within the Hausdorff threshold.
    """
    model = field.model
    symmetries = field.symmetries if symmetries is None else symmetries
    orbits = sorted(orbits, key=lambda o: (o.period, o.point.coords))
    images = _reduced_images(field, orbits, symmetries)
    parent = list(range(len(orbits)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(len(orbits)), 2):
        if abs(orbits[i].period - orbits[j].period) >= config.PERIOD_MATCH_TOL:
            continue
        if orbits[i].homotopy_class != orbits[j].homotopy_class:
            continue
        if find(i) != find(j) and _same_image(images[i], images[j]):
            logger.debug("merging orbits at %s and %s", orbits[i].point, orbits[j].point)
            parent[find(j)] = find(i)

    groups = {}
    for i in range(len(orbits)):
        groups.setdefault(find(i), []).append(orbits[i])

    families = []
    for members in groups.values():
        head = members[0]
        nullities = {m.floquet.nullity for m in members if m.floquet is not None}
        dim = head.floquet.nullity if head.floquet is not None else 0
        x = model.coords_of(head.point)
        families.append(
            OrbitFamily(
                period=float(np.mean([m.period for m in members])),
                homotopy_class=head.homotopy_class,
                dim=dim,
                topology=model.family_topology(dim, x),
                members=tuple(members),
                morse_bott=len(nullities) <= 1,
                label=f"{head.homotopy_class.label}@{head.period:.9g}",
            )
        )
    return sorted(families, key=lambda f: (f.period, f.representative.point.coords))


def scan(field, cls=None, window=(0.0, 1.0), seed_grid=None, tol=None):
    """
    Scan for closed orbits of the field with period in ``window`` and class
    ``cls`` (any class when ``None``).

    :raises SeedingExhausted: when there were shooting guesses but none converged
    """
    lo, hi = float(window[0]), float(window[1])
    if not 0 <= lo <= hi or not math.isfinite(hi):
        raise ValueError("scan window must be finite with 0 <= lo <= hi")
    if isinstance(cls, str):
        cls = HomotopyClass.parse(cls)
    symmetries = field.symmetries
    seeds = seed_points(field.model, symmetries, seed_grid)

    candidates, seed_failures = [], 0
    for index, x0 in enumerate(seeds):
        try:
            returns = recurrences(field, x0, (lo, hi), cls, tol)
        except _FAILURES as e:
            logger.debug("seed %d failed: %s", index, e)
            seed_failures += 1
            continue
        candidates.extend((x0, t, res) for t, res in returns[:4])

    shortlist = _shortlist(candidates, lambda x: field.model.reduce_image(x, symmetries).ravel())

    def shoot(candidate):
        x0, t, _ = candidate
        try:
            return shoot_closed_orbit(field, x0, t, tol)
        except _FAILURES as e:
            logger.debug("shot from %s at T=%.6g failed: %s", x0, t, e)
            return None

    with ThreadPoolExecutor(max_workers=config.SCAN_WORKERS) as pool:
        results = list(pool.map(shoot, shortlist))

    converged = [orbit for orbit in results if orbit is not None]
    if shortlist and not converged:
        raise SeedingExhausted(
            {"seeds": len(seeds), "candidates": len(candidates), "shots": len(shortlist), "converged": 0}
        )
    slack = config.PERIOD_MATCH_TOL
    in_window = [o for o in converged if lo - slack <= o.period <= hi + slack]
    kept = [o for o in in_window if cls is None or o.homotopy_class == cls]

    families = cluster_orbits(field, kept, symmetries)
    report = ScanReport(
        field=field.label,
        homotopy_class=cls,
        window=(lo, hi),
        seeds=len(seeds),
        seed_failures=seed_failures,
        candidates=len(candidates),
        shots=len(shortlist),
        converged=len(converged),
        rejected_class=len(in_window) - len(kept),
        rejected_window=len(converged) - len(in_window),
        families=tuple(families),
    )
    if not report.conclusive:
        logger.warning("scan of %s covered %.0f%% of its shots", field.label, 100 * report.coverage)
    logger.info("scan of %s in [%g, %g]: %d families", field.label, lo, hi, len(families))
    return report


def scan_orbits(field, cls=None, window=(0.0, 1.0), seed_grid=None, tol=None):
    return list(scan(field, cls, window, seed_grid, tol).families)
