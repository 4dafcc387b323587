"""Horizontal Brownian motion on step-2 groups and caloric averaging.

The diffusion generated by the horizontal Laplacian sum_i X_i^2 has
horizontal increments dz = sqrt(2 dt) * N(0, I) and vertical components
driven by the Levy-area-type update

    sigma_l <- sigma_l + (1/2) zbar^T B^l dz,    zbar = z + dz/2,

which for skew B^l is exactly the group product G_(k+1) = G_k * (dz, 0):
the discrete path composes group increments on the left, matching the
left-invariant fields.  Horizontal marginals are exact Gaussians with
E z_i(t)^2 = 2 t; only the vertical bridge area is approximated.

Determinism contract: paths are split into ``n_blocks`` fixed blocks; block
``b`` draws from ``numpy.random.default_rng(SeedSequence(seed,
spawn_key=(b,)))``, one ``standard_normal((block_size, m))`` array per Euler
step.  Block boundaries depend only on (n_paths, n_blocks), and reductions
run in block order, so results are bit-identical for a given configuration
regardless of thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .fields import caloric_residual, carre_du_champ
from .groups import GroupSpec
from .numeval import poly_evaluator
from .poly import Poly

_TIME_TOL = 1e-9


def b_matrices_float(spec: GroupSpec) -> np.ndarray:
    """The bracket matrices as a float array of shape (m2, m, m)."""
    return np.array(
        [[[float(entry) for entry in row] for row in mat] for mat in spec.B]
    )


@dataclass(frozen=True)
class HeatConfig:
    """Simulation parameters; defaults sized for the acceptance runs."""

    n_paths: int = 100_000
    dt: float = 1e-3
    seed: int = 0
    n_blocks: int = 50
    threads: int = 1

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be positive")
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if not 1 <= self.n_blocks <= self.n_paths:
            raise ValueError("need 1 <= n_blocks <= n_paths")
        if self.threads < 1:
            raise ValueError("threads must be positive")


def _snap_to_steps(times: Sequence[float], dt: float) -> list[int]:
    steps = []
    for t in times:
        k = round(t / dt)
        if k < 1 or abs(k * dt - t) > _TIME_TOL * max(1.0, abs(t)):
            raise ValueError(
                f"observation time {t} is not a positive multiple of dt={dt}"
            )
        steps.append(k)
    if any(b <= a for a, b in zip(steps, steps[1:])):
        raise ValueError("observation times must be strictly increasing")
    return steps


@dataclass
class PathEnsemble:
    """Simulated paths observed at fixed times.

    z has shape (n_obs, n_paths, m) and sigma (n_obs, n_paths, m2); the
    block bounds record which contiguous path ranges share an RNG stream.
    """

    spec: GroupSpec
    config: HeatConfig
    observation_times: tuple[float, ...]
    observation_steps: tuple[int, ...]
    z: np.ndarray
    sigma: np.ndarray
    block_bounds: tuple[tuple[int, int], ...]

    @property
    def n_paths(self) -> int:
        return self.config.n_paths

    def time_index(self, t: float) -> int:
        for i, known in enumerate(self.observation_times):
            if abs(known - t) <= _TIME_TOL * max(1.0, abs(t)):
                return i
        raise ValueError(
            f"time {t} is not among the observation times {self.observation_times}"
        )

    def coords_at(self, index: int) -> tuple[np.ndarray, ...]:
        """Coordinate arrays (z_1, ..., z_m, s_1, ..., s_m2) at one time."""
        m, m2 = self.spec.m, self.spec.m2
        return tuple(self.z[index, :, i] for i in range(m)) + tuple(
            self.sigma[index, :, ell] for ell in range(m2)
        )


def _run_block(bmats, n_steps, dt, obs_steps, rng, out_z, out_s, lo, hi):
    m2, m, _ = bmats.shape
    nb = hi - lo
    z = np.zeros((nb, m))
    s = np.zeros((nb, m2))
    scale = math.sqrt(2.0 * dt)
    obs_pos = 0
    for k in range(1, n_steps + 1):
        dz = rng.standard_normal((nb, m)) * scale
        zbar = z + 0.5 * dz
        for ell in range(m2):
            s[:, ell] += 0.5 * np.sum(zbar * (dz @ bmats[ell].T), axis=1)
        z += dz
        if obs_pos < len(obs_steps) and obs_steps[obs_pos] == k:
            out_z[obs_pos, lo:hi] = z
            out_s[obs_pos, lo:hi] = s
            obs_pos += 1


def simulate(
    spec: GroupSpec,
    observation_times: Sequence[float],
    config: HeatConfig | None = None,
) -> PathEnsemble:
    """Run the Euler scheme and record the state at the given times.

    Observation times must be positive multiples of dt (within 1e-9
    relative), strictly increasing.
    """
    config = config or HeatConfig()
    steps = _snap_to_steps(observation_times, config.dt)
    n_steps = steps[-1]
    n_obs = len(steps)
    m, m2 = spec.m, spec.m2
    bmats = b_matrices_float(spec)

    out_z = np.empty((n_obs, config.n_paths, m))
    out_s = np.empty((n_obs, config.n_paths, m2))

    base = config.n_paths // config.n_blocks
    rem = config.n_paths % config.n_blocks
    bounds = []
    lo = 0
    for b in range(config.n_blocks):
        hi = lo + base + (1 if b < rem else 0)
        bounds.append((lo, hi))
        lo = hi

    def worker(block_index: int):
        lo, hi = bounds[block_index]
        rng = np.random.default_rng(
            np.random.SeedSequence(config.seed, spawn_key=(block_index,))
        )
        _run_block(bmats, n_steps, config.dt, steps, rng, out_z, out_s, lo, hi)

    if config.threads == 1:
        for b in range(config.n_blocks):
            worker(b)
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            list(pool.map(worker, range(config.n_blocks)))

    return PathEnsemble(
        spec=spec,
        config=config,
        observation_times=tuple(k * config.dt for k in steps),
        observation_steps=tuple(steps),
        z=out_z,
        sigma=out_s,
        block_bounds=tuple(bounds),
    )


def _block_mean_stderr(per_path: np.ndarray, bounds) -> tuple[float, float]:
    """Mean of a per-path statistic with a block-resampling standard error."""
    overall = float(per_path.mean())
    k = len(bounds)
    if k < 2:
        return overall, float("nan")
    n = per_path.shape[0]
    var = 0.0
    for lo, hi in bounds:
        weight = (hi - lo) / n
        block_mean = float(per_path[lo:hi].mean())
        var += weight * weight * (block_mean - overall) ** 2
    var *= k / (k - 1)
    return overall, math.sqrt(var)


@dataclass(frozen=True)
class HeatEstimate:
    t: float
    value: float
    stderr: float


def _heat_per_path(ensemble: PathEnsemble, f: Poly, t: float) -> np.ndarray:
    spec = ensemble.spec
    if f.shape != (spec.m, spec.m2):
        raise ValueError(f"polynomial shape {f.shape} does not match the group")
    if not caloric_residual(spec, f).is_zero():
        raise ValueError("heat functional needs a caloric input (Lap_H f = df/dt)")
    i_end = ensemble.time_index(t)
    taus = [0.0] + [ensemble.observation_times[j] for j in range(i_end + 1)]

    carre = carre_du_champ(spec, f, side="right")
    ev = poly_evaluator(carre)
    at_origin = float(
        carre.eval_exact([Fraction(0)] * (spec.m + spec.m2), t=Fraction(0))
    )

    weights = []
    for j in range(len(taus)):
        left = taus[j - 1] if j > 0 else taus[0]
        right = taus[j + 1] if j + 1 < len(taus) else taus[-1]
        weights.append(0.5 * (right - left))

    acc = np.full(ensemble.n_paths, weights[0] * at_origin)
    for j in range(1, len(taus)):
        coords = ensemble.coords_at(j - 1)
        values = np.broadcast_to(ev(coords, t=-taus[j]), (ensemble.n_paths,))
        acc = acc + weights[j] * values
    weight_sum = 0.0
    for w in weights:
        weight_sum += w
    return acc / weight_sum


def heat_functional(ensemble: PathEnsemble, f: Poly, t: float) -> HeatEstimate:
    """Time-averaged heat content of the right carre du champ.

    I(f, t) = (1/t) int_0^t E |grad-right f(G_tau, -tau)|^2 dtau, estimated
    by the trapezoid rule over the observation times up to t (which must be
    one of them) plus the exact tau = 0 endpoint.  The trapezoid weights are
    normalized by their computed sum, so a constant integrand gives exactly
    its value.  Requires caloric f (Lap_H f = df/dt).
    """
    per_path = _heat_per_path(ensemble, f, t)
    value, stderr = _block_mean_stderr(per_path, ensemble.block_bounds)
    return HeatEstimate(t=t, value=value, stderr=stderr)


def observable_mean(ensemble: PathEnsemble, g: Poly, t: float) -> HeatEstimate:
    """E g(G_t, t) with a block standard error."""
    spec = ensemble.spec
    if g.shape != (spec.m, spec.m2):
        raise ValueError(f"polynomial shape {g.shape} does not match the group")
    index = ensemble.time_index(t)
    ev = poly_evaluator(g)
    values = np.broadcast_to(
        ev(ensemble.coords_at(index), t=ensemble.observation_times[index]),
        (ensemble.n_paths,),
    )
    value, stderr = _block_mean_stderr(values, ensemble.block_bounds)
    return HeatEstimate(t=t, value=value, stderr=stderr)


@dataclass(frozen=True)
class PtScanRow:
    t: float
    value: float
    stderr: float
    diff: float
    diff_stderr: float


@dataclass(frozen=True)
class PtScan:
    rows: tuple[PtScanRow, ...]
    verdict: str

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(row.value for row in self.rows)


def _ci_scan(
    ensemble: PathEnsemble,
    times: Sequence[float],
    per_time: Sequence[np.ndarray],
    tol_sigma: float,
) -> PtScan:
    """Rows and verdict for a per-path statistic observed at several times.

    Consecutive differences are estimated per block on the same paths, which
    cancels most of the shared noise; a direction is asserted only when every
    difference clears tol_sigma standard errors, otherwise the verdict is
    inconclusive (flat within noise) or nonmonotone (significant moves both
    ways).
    """
    rows = []
    prev = None
    for t, values in zip(times, per_time):
        value, stderr = _block_mean_stderr(values, ensemble.block_bounds)
        if prev is None:
            diff, diff_stderr = float("nan"), float("nan")
        else:
            diff, diff_stderr = _block_mean_stderr(
                values - prev, ensemble.block_bounds
            )
        rows.append(
            PtScanRow(t=t, value=value, stderr=stderr, diff=diff, diff_stderr=diff_stderr)
        )
        prev = values

    values = [row.value for row in rows]
    scale = max(max(abs(v) for v in values), 1.0)
    if max(values) - min(values) <= 1e-12 * scale:
        verdict = "inconclusive"
    else:
        diffs = rows[1:]
        up_ok = all(r.diff >= -tol_sigma * r.diff_stderr for r in diffs)
        down_ok = all(r.diff <= tol_sigma * r.diff_stderr for r in diffs)
        if up_ok and down_ok:
            verdict = "inconclusive"
        elif up_ok:
            verdict = "nondecreasing"
        elif down_ok:
            verdict = "nonincreasing"
        else:
            verdict = "nonmonotone"
    return PtScan(rows=tuple(rows), verdict=verdict)


def pt_monotone_check(
    ensemble: PathEnsemble,
    g: Poly,
    times: Sequence[float] | None = None,
    *,
    tol_sigma: float = 3.0,
) -> PtScan:
    """Monotonicity of t -> E g(G_t, t) with paired-difference confidence."""
    spec = ensemble.spec
    if g.shape != (spec.m, spec.m2):
        raise ValueError(f"polynomial shape {g.shape} does not match the group")
    if times is None:
        times = ensemble.observation_times
    indices = [ensemble.time_index(t) for t in times]
    ev = poly_evaluator(g)
    resolved = [ensemble.observation_times[idx] for idx in indices]
    per_time = [
        np.broadcast_to(
            ev(ensemble.coords_at(idx), t=ensemble.observation_times[idx]),
            (ensemble.n_paths,),
        )
        for idx in indices
    ]
    return _ci_scan(ensemble, resolved, per_time, tol_sigma)


def heat_scan(
    ensemble: PathEnsemble,
    f: Poly,
    times: Sequence[float] | None = None,
    *,
    tol_sigma: float = 3.0,
) -> PtScan:
    """Monotonicity of t -> I(f, t) with paired-difference confidence."""
    if times is None:
        times = ensemble.observation_times
    resolved = [
        ensemble.observation_times[ensemble.time_index(t)] for t in times
    ]
    per_time = [_heat_per_path(ensemble, f, t) for t in resolved]
    return _ci_scan(ensemble, resolved, per_time, tol_sigma)


@dataclass(frozen=True)
class LowerBoundRow:
    t: float
    value: float
    stderr: float
    ok: bool


@dataclass(frozen=True)
class LowerBoundReport:
    bound: float
    rows: tuple[LowerBoundRow, ...]

    @property
    def all_ok(self) -> bool:
        return all(row.ok for row in self.rows)


def lower_bound_check(
    ensemble: PathEnsemble,
    f: Poly,
    times: Sequence[float] | None = None,
    *,
    tol_sigma: float = 3.0,
) -> LowerBoundReport:
    """Check I(f, t) >= |grad f(e, 0)|^2 at each time, within tol_sigma errors.

    The bound is the carre du champ of f at the identity at time zero (left
    and right gradients agree there).
    """
    spec = ensemble.spec
    if times is None:
        times = ensemble.observation_times
    carre = carre_du_champ(spec, f, side="right")
    bound = float(
        carre.eval_exact([Fraction(0)] * (spec.m + spec.m2), t=Fraction(0))
    )
    rows = []
    for t in times:
        est = heat_functional(ensemble, f, t)
        rows.append(
            LowerBoundRow(
                t=est.t,
                value=est.value,
                stderr=est.stderr,
                ok=est.value >= bound - tol_sigma * est.stderr,
            )
        )
    return LowerBoundReport(bound=bound, rows=tuple(rows))
