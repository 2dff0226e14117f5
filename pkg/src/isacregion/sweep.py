"""Region sweeps: evaluate strategies over allocations, extract fronts.

Each point owns a random stream derived from (base seed, point index), so a
sweep returns identical results for any worker count or scheduling order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .comm import ergodic_rate_mc
from .jsonio import fmt17
from .scenario import ScenarioConfig
from .sensing import SenseMatrix, bcrb_deterministic, bcrb_mixed_mc
from .strategy import (
    ChoiceSpec,
    DirectionCatalog,
    SimplexAllocation,
    TransmitStrategy,
    build_strategy,
)
from .streams import derive_rng

__all__ = [
    "RegionPoint",
    "SweepFailure",
    "evaluate_point",
    "run_sweep",
    "pareto_front",
    "write_region_csv",
    "write_pareto_csv",
]


@dataclass(frozen=True)
class RegionPoint:
    """One sweep outcome: allocation, per-target bounds, sum bound, rate."""

    choice_id: str
    lam: np.ndarray
    eps_per_target: np.ndarray
    eps_sum: float
    rate: float
    eps_stderr: np.ndarray
    rate_stderr: float

    def objective(self, key: str) -> float:
        if key == "eps_sum":
            return self.eps_sum
        if key == "rate":
            return self.rate
        if key.startswith("eps_"):
            return float(self.eps_per_target[int(key[4:]) - 1])
        raise KeyError(f"unknown objective key '{key}'")


@dataclass(frozen=True)
class SweepFailure:
    index: int
    message: str


def evaluate_point(
    strategy: TransmitStrategy,
    matrices: list[SenseMatrix],
    scenario: ScenarioConfig,
    rng: np.random.Generator,
    *,
    choice_id: str = "",
    lam: np.ndarray | None = None,
) -> RegionPoint:
    """Bounds and rate for one strategy.

    Purely deterministic strategies use the closed form (zero stderr); any
    Gaussian power routes through the Monte Carlo path.  The rate always
    comes from the Monte Carlo estimator, which is exactly zero without
    Gaussian power.
    """
    if np.any(strategy.gauss_powers > 0):
        eps, eps_stderr = bcrb_mixed_mc(
            strategy, matrices, scenario, rng, scenario.budgets.gauss_draws
        )
    else:
        eps = bcrb_deterministic(strategy, matrices, scenario)
        eps_stderr = np.zeros_like(eps)
    comm = scenario.comm_target
    rate, rate_stderr = ergodic_rate_mc(
        strategy,
        comm.angle_prior,
        scenario.comm_gain,
        scenario.sigma_c_sq,
        rng,
        draws=scenario.budgets.comm_draws,
        log_base=scenario.rate_log_base,
    )
    return RegionPoint(
        choice_id=choice_id,
        lam=np.array([]) if lam is None else np.asarray(lam, dtype=float),
        eps_per_target=eps,
        eps_sum=float(eps.sum()),
        rate=rate,
        eps_stderr=eps_stderr,
        rate_stderr=rate_stderr,
    )


def _evaluate_one(args) -> tuple[int, RegionPoint | None, str | None]:
    index, choice, alloc_lam, catalog, matrices, scenario, base_seed = args
    try:
        alloc = SimplexAllocation(alloc_lam)
        strategy = build_strategy(choice, alloc, catalog, scenario)
        rng = derive_rng(base_seed, index)
        point = evaluate_point(
            strategy, matrices, scenario, rng, choice_id=choice.choice_id, lam=alloc.lam
        )
        return index, point, None
    except Exception as exc:  # per-point failures must not kill the sweep
        return index, None, f"{type(exc).__name__}: {exc}"


def run_sweep(
    choice: ChoiceSpec,
    allocations: list[SimplexAllocation],
    catalog: DirectionCatalog,
    matrices: list[SenseMatrix],
    scenario: ScenarioConfig,
    base_seed: int | None = None,
    workers: int = 1,
) -> tuple[list[RegionPoint], list[SweepFailure]]:
    """Evaluate one point per allocation, in input order.

    Point index k uses the stream derived from (base_seed, k); failures are
    collected and the sweep continues.
    """
    if not allocations:
        raise ValueError("allocation list must be non-empty")
    if base_seed is None:
        base_seed = scenario.base_seed
    tasks = [
        (k, choice, alloc.lam, catalog, matrices, scenario, base_seed)
        for k, alloc in enumerate(allocations)
    ]
    if workers > 1:
        chunk = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_one, tasks, chunksize=chunk))
    else:
        results = [_evaluate_one(t) for t in tasks]

    points: list[RegionPoint] = []
    failures: list[SweepFailure] = []
    for index, point, message in results:
        if point is not None:
            points.append(point)
        else:
            failures.append(SweepFailure(index=index, message=message))
    return points, failures


def pareto_front(points: list[RegionPoint], objectives) -> list[RegionPoint]:
    """Non-dominated subset under signed objectives like
    (("eps_sum", "min"), ("rate", "max")); sorted by the first objective
    ascending, exact duplicates kept once.
    """
    if not points:
        raise ValueError("points must be non-empty")
    signs = []
    for key, direction in objectives:
        if direction not in ("min", "max"):
            raise ValueError("objective direction must be 'min' or 'max'")
        signs.append((key, 1.0 if direction == "min" else -1.0))
    # signed values: smaller is better on every axis
    vals = np.array([[sign * p.objective(key) for key, sign in signs] for p in points])

    keep: list[int] = []
    for i in range(len(points)):
        dominated = False
        duplicate = False
        for j in range(len(points)):
            if i == j:
                continue
            if np.all(np.abs(vals[j] - vals[i]) <= 1e-12):
                duplicate = duplicate or j < i  # keep the first duplicate only
                continue
            # strict dominance: ties in any single objective keep both points
            if np.all(vals[j] < vals[i]):
                dominated = True
                break
        if not dominated and not duplicate:
            keep.append(i)
    keep.sort(key=lambda i: (vals[i][0], *vals[i][1:]))
    return [points[i] for i in keep]


def _region_header(num_lambdas: int, num_targets: int) -> str:
    cols = ["choice"]
    cols += [f"lambda_{i + 1}" for i in range(num_lambdas)]
    cols += [f"eps_{i + 1}" for i in range(num_targets)]
    cols += ["eps_sum", "rate"]
    cols += [f"eps_stderr_{i + 1}" for i in range(num_targets)]
    cols += ["rate_stderr"]
    return ",".join(cols)


def _region_row(p: RegionPoint) -> str:
    fields = [p.choice_id]
    fields += [fmt17(v) for v in p.lam]
    fields += [fmt17(v) for v in p.eps_per_target]
    fields += [fmt17(p.eps_sum), fmt17(p.rate)]
    fields += [fmt17(v) for v in p.eps_stderr]
    fields += [fmt17(p.rate_stderr)]
    return ",".join(fields)


def write_region_csv(points: list[RegionPoint], path: str | Path) -> None:
    """Emit one row per point with fixed 17-significant-digit formatting."""
    if not points:
        raise ValueError("no points to write")
    num_lambdas = len(points[0].lam)
    num_targets = len(points[0].eps_per_target)
    lines = [_region_header(num_lambdas, num_targets)]
    lines += [_region_row(p) for p in points]
    Path(path).write_text("\n".join(lines) + "\n")


def write_pareto_csv(points: list[RegionPoint], objectives, path: str | Path) -> None:
    """Pareto front of `points` in the same row format as the region CSV."""
    front = pareto_front(points, objectives)
    write_region_csv(front, path)
