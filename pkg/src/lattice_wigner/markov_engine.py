"""Particle simulation of the stationary jump/drift/branch process.

Each particle carries a site (m, n), a phase alpha in [0, 2 pi) and a
positive weight w; the Wigner estimate at a site is sum(w cos alpha) over the
particles sitting there.  Between jumps the phase follows the exact flow
cos alpha(t) = cos alpha(0) exp(D t); jumps arrive at rate D, pick a
displacement with probability h~/|h~| and rotate alpha by one of two opposite
increments with probability 1/2 each.  A particle whose phase reaches 0 or pi
is replaced by two children at (target, 2 pi - target) carrying the parent's
weight; a particle landing on |cos alpha| <= eps is dropped.

Parallelism: particles are grouped into lineage blocks by their time-0
ancestor (``root // block_size``).  Every block draws from its own Philox
stream keyed by (seed, interval, block), so the output does not depend on how
blocks are spread over workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from lattice_wigner.hamiltonian import JumpTable
from lattice_wigner.lattice_algebra import index_of, wrap
from lattice_wigner.phase_lift import STOP_TOL, TWO_PI, LiftedDistribution

logger = logging.getLogger(__name__)

FLAT_TOL = 1e-12
BRANCH_AT_ZERO = np.pi / 3
BRANCH_AT_PI = 2 * np.pi / 3

# spawn-key namespaces for the per-run RNG streams
_BLOCK_STREAM, _RESAMPLE_STREAM, _INIT_STREAM = 0, 1, 2


@dataclass
class EngineConfig:
    mode: str = "event"  # "event" | "fixed"
    dt: float | None = None  # fixed-step mode only
    particles: int = 100_000
    seed: int = 0
    workers: int = 1
    population_cap: int | None = None  # defaults to ``particles``
    vanish_tol: float = 1e-12
    branch_at_zero: float = BRANCH_AT_ZERO
    branch_at_pi: float = BRANCH_AT_PI
    block_size: int = 4096
    sync_interval: float = 0.5

    def validate(self, rate: float = 0.0) -> list[str]:
        errors = []
        if self.mode not in ("event", "fixed"):
            errors.append(f"engine.mode: must be 'event' or 'fixed', got {self.mode!r}")
        if self.mode == "fixed":
            if self.dt is None:
                errors.append("engine.dt: required in fixed-step mode")
            elif not self.dt > 0:
                errors.append("engine.dt: must be positive")
            elif not rate * self.dt < 1:
                errors.append(f"engine.dt: need D*dt < 1, got {rate * self.dt:.3g}")
        if int(self.particles) < 1:
            errors.append("engine.particles: must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            errors.append("engine.seed: must be an unsigned 64-bit integer")
        if int(self.workers) < 1:
            errors.append("engine.workers: must be >= 1")
        if self.population_cap is not None and int(self.population_cap) < 1:
            errors.append("engine.population_cap: must be >= 1")
        if int(self.block_size) < 1:
            errors.append("engine.block_size: must be >= 1")
        if not self.sync_interval > 0:
            errors.append("engine.sync_interval: must be positive")
        if not self.vanish_tol >= 0:
            errors.append("engine.vanish_tol: must be non-negative")
        if abs(2 * math.cos(self.branch_at_zero) - 1) > 1e-12 or not 0 < self.branch_at_zero < np.pi:
            errors.append("engine.branch_at_zero: need 2 cos(target) = 1 with target in (0, pi)")
        if abs(2 * math.cos(self.branch_at_pi) + 1) > 1e-12 or not 0 < self.branch_at_pi < np.pi:
            errors.append("engine.branch_at_pi: need 2 cos(target) = -1 with target in (0, pi)")
        return errors

    @property
    def cap(self) -> int:
        return int(self.population_cap or self.particles)


@dataclass
class Particle:
    m: int
    n: int
    alpha: float
    weight: float


@dataclass
class Ensemble:
    """Particle population in structure-of-arrays form.

    ``root`` is the index of each particle's time-0 ancestor; it keys the
    lineage blocks and the standard-error grouping.
    """

    N: int
    m: np.ndarray
    n: np.ndarray
    alpha: np.ndarray
    weight: np.ndarray
    root: np.ndarray
    time: float = 0.0
    mass: float = 0.0
    n_roots: int = 0
    counters: dict = field(default_factory=lambda: dict(jumps=0, branches=0, vanishes=0, resamples=0, vanished_weight=0.0))

    def __len__(self) -> int:
        return len(self.weight)

    def arrays(self):
        return self.m, self.n, self.alpha, self.weight, self.root

    def with_arrays(self, m, n, alpha, weight, root) -> "Ensemble":
        return replace(self, m=m, n=n, alpha=alpha, weight=weight, root=root, counters=dict(self.counters))

    def estimate(self) -> np.ndarray:
        return _site_sum(self, self.weight * np.cos(self.alpha))


@dataclass
class Snapshot:
    time: float
    estimate: np.ndarray
    stderr: np.ndarray
    sine_estimate: np.ndarray
    sine_stderr: np.ndarray
    population: int
    counters: dict
    observables: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# single-particle rules


@dataclass(frozen=True)
class DriftResult:
    alpha: float | None = None
    branch_at: float | None = None
    time_to_branch: float | None = None

    @property
    def branched(self) -> bool:
        return self.branch_at is not None


def _check_off_stop(alpha) -> None:
    if np.any(np.abs(np.sin(alpha)) < STOP_TOL):
        raise ValueError("phase is at a stopping point (0 or pi); branch before drifting")


def _flow(alpha: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Phase with cosine ``c`` on the same half circle as ``alpha``."""
    a = np.arccos(np.clip(c, -1.0, 1.0))
    return np.where(alpha < np.pi, a, TWO_PI - a)


def drift(alpha: float, tau: float, D: float) -> DriftResult:
    """Advance a phase by ``tau`` under d(alpha)/dt = -D cot(alpha).

    Returns the new phase, or the stopping point hit (0 or pi) with the time
    needed to reach it when that happens before ``tau``.
    """
    alpha = float(np.mod(alpha, TWO_PI))
    _check_off_stop(alpha)
    if tau < 0:
        raise ValueError("tau must be non-negative")
    c = math.cos(alpha)
    if abs(c) <= FLAT_TOL:
        # cos alpha = 0 is a fixed point of the flow
        return DriftResult(alpha=alpha)
    if D > 0:
        t_branch = -math.log(abs(c)) / D
        if t_branch <= tau:
            return DriftResult(branch_at=0.0 if c > 0 else np.pi, time_to_branch=t_branch)
    return DriftResult(alpha=float(_flow(np.array(alpha), np.array(c * math.exp(D * tau)))))


def fixed_step_drift(alpha, D: float, dt: float):
    """f_dt(alpha) with (1 - D dt) cos f = cos alpha; NaN where no solution."""
    alpha = np.mod(np.asarray(alpha, dtype=float), TWO_PI)
    c = np.cos(alpha) / (1.0 - D * dt)
    return np.where(np.abs(c) < 1.0, _flow(alpha, c), np.nan)


def phase_increment(table: JumpTable, k, m_from, n_from, m_to, n_to):
    """The '+' branch phase increment of jump ``k``; the '-' branch is its negative."""
    N = table.N
    X = np.asarray(m_to) * np.asarray(n_from) - np.asarray(n_to) * np.asarray(m_from)
    return TWO_PI * (-2 * X + table.theta[k] - N / 4) / N


def _jump_arrays(table: JumpTable, m, n, alpha, u_disp, u_sign):
    k = np.minimum(np.searchsorted(np.cumsum(table.probabilities), u_disp, side="right"), len(table) - 1)
    dm, dn = table.displacements[k, 0], table.displacements[k, 1]
    m_new = wrap(m + dm, table.N)
    n_new = wrap(n + dn, table.N)
    inc = phase_increment(table, k, m, n, m_new, n_new)
    alpha_new = np.mod(alpha + np.where(u_sign < 0.5, inc, -inc), TWO_PI)
    return m_new, n_new, alpha_new


def jump(particle: Particle, table: JumpTable, rng: np.random.Generator) -> Particle:
    if table.is_free:
        raise ValueError("cannot jump with an empty jump table")
    u = rng.random(2)
    m, n, a = _jump_arrays(table, np.array([particle.m]), np.array([particle.n]), np.array([particle.alpha]), u[:1], u[1:])
    return Particle(int(m[0]), int(n[0]), float(a[0]), particle.weight)


def branch_targets(cos_sign, at_zero: float = BRANCH_AT_ZERO, at_pi: float = BRANCH_AT_PI):
    """Children phases for parents at 0 (cos_sign > 0) or pi (cos_sign < 0)."""
    t = np.where(np.asarray(cos_sign) > 0, at_zero, at_pi)
    return t, TWO_PI - t


def branch(particle: Particle, at_zero: float = BRANCH_AT_ZERO, at_pi: float = BRANCH_AT_PI) -> tuple[Particle, Particle]:
    c = math.cos(particle.alpha)
    if abs(math.sin(particle.alpha)) >= STOP_TOL:
        raise ValueError("branch needs a particle at a stopping point")
    a1, a2 = branch_targets(c, at_zero, at_pi)
    return (
        Particle(particle.m, particle.n, float(a1), particle.weight),
        Particle(particle.m, particle.n, float(a2), particle.weight),
    )


def vanish_check(particle: Particle, eps: float = 1e-12) -> bool:
    """True when the particle should be kept."""
    return abs(math.cos(particle.alpha)) > eps


# --------------------------------------------------------------------------
# block evolution


class _Block:
    """Mutable arrays for one lineage block while it is being advanced."""

    def __init__(self, m, n, alpha, weight, root):
        self.m, self.n, self.alpha, self.weight, self.root = (a.copy() for a in (m, n, alpha, weight, root))
        self.clock = np.zeros(len(weight))
        self.alive = np.ones(len(weight), dtype=bool)
        self.stats = dict(jumps=0, branches=0, vanishes=0, vanished_weight=0.0)

    def branch(self, idx: np.ndarray, cfg: EngineConfig, scale=None) -> np.ndarray:
        """Split particles ``idx`` at stopping points; return indices of the
        appended second children."""
        if len(idx) == 0:
            return idx
        a1, a2 = branch_targets(np.cos(self.alpha[idx]), cfg.branch_at_zero, cfg.branch_at_pi)
        if scale is not None:
            self.weight[idx] *= scale
        self.alpha[idx] = a1
        start = len(self.weight)
        self.m = np.concatenate([self.m, self.m[idx]])
        self.n = np.concatenate([self.n, self.n[idx]])
        self.alpha = np.concatenate([self.alpha, a2])
        self.weight = np.concatenate([self.weight, self.weight[idx]])
        self.root = np.concatenate([self.root, self.root[idx]])
        self.clock = np.concatenate([self.clock, self.clock[idx]])
        self.alive = np.concatenate([self.alive, np.ones(len(idx), dtype=bool)])
        self.stats["branches"] += len(idx)
        return np.arange(start, start + len(idx))

    def jump(self, idx: np.ndarray, table: JumpTable, rng: np.random.Generator, cfg: EngineConfig) -> np.ndarray:
        """Jump particles ``idx``; drop vanishers, branch stop-point landings.
        Returns indices of newly created children."""
        u = rng.random((2, len(idx)))
        self.m[idx], self.n[idx], self.alpha[idx] = _jump_arrays(table, self.m[idx], self.n[idx], self.alpha[idx], u[0], u[1])
        self.stats["jumps"] += len(idx)
        gone = idx[np.abs(np.cos(self.alpha[idx])) <= cfg.vanish_tol]
        if len(gone):
            self.alive[gone] = False
            self.stats["vanishes"] += len(gone)
            self.stats["vanished_weight"] += float(self.weight[gone].sum())
        stop = idx[self.alive[idx] & (np.abs(np.sin(self.alpha[idx])) < STOP_TOL)]
        return self.branch(stop, cfg)

    def result(self):
        keep = self.alive
        return (self.m[keep], self.n[keep], self.alpha[keep], self.weight[keep], self.root[keep]), self.stats


def advance_event(arrays, table: JumpTable, span: float, rng: np.random.Generator, cfg: EngineConfig):
    """Exact event-driven evolution of one block over a time ``span``."""
    blk = _Block(*arrays)
    D = table.rate
    if D == 0 or span <= 0:
        return blk.result()
    active = np.arange(len(blk.weight))
    while len(active):
        a = blk.alpha[active]
        c = np.cos(a)
        tau = rng.exponential(1.0 / D, size=len(active))
        with np.errstate(divide="ignore"):
            t_branch = -np.log(np.abs(c)) / D
        remaining = span - blk.clock[active]
        dt = np.minimum(np.minimum(tau, t_branch), remaining)
        finish = remaining <= np.minimum(tau, t_branch)
        hits_stop = ~finish & (t_branch <= tau)
        jumps = ~finish & ~hits_stop
        blk.clock[active] += dt
        blk.clock[active[finish]] = span
        blk.alpha[active] = _flow(a, c * np.exp(D * dt))
        hs = active[hits_stop]
        blk.alpha[hs] = np.where(c[hits_stop] > 0, 0.0, np.pi)
        born = blk.branch(hs, cfg)
        born_j = blk.jump(active[jumps], table, rng, cfg) if jumps.any() else born[:0]
        nxt = np.concatenate([hs, born, active[jumps], born_j])
        active = nxt[blk.alive[nxt]]
        # a particle dropped by the vanish rule stays dead
    return blk.result()


def advance_fixed(arrays, table: JumpTable, span: float, rng: np.random.Generator, cfg: EngineConfig):
    """Fixed-step evolution: per step each particle jumps with probability
    D dt, otherwise its phase moves to f_dt(alpha).  When f_dt has no solution
    the particle branches at the stopping point with its weight scaled by
    |cos alpha| / (1 - D dt), which keeps the expected contribution exact."""
    blk = _Block(*arrays)
    D = table.rate
    if D == 0 or span <= 0:
        return blk.result()
    nsteps = int(math.ceil(span / cfg.dt - 1e-9))
    h = span / nsteps
    keep = 1.0 - D * h
    for _ in range(nsteps):
        idx = np.flatnonzero(blk.alive)
        u = rng.random(len(idx))
        jumpers = idx[u < D * h]
        stay = idx[u >= D * h]
        c = np.cos(blk.alpha[stay]) / keep
        over = np.abs(c) >= 1.0
        ok = stay[~over]
        blk.alpha[ok] = _flow(blk.alpha[ok], c[~over])
        br = stay[over]
        blk.alpha[br] = np.where(c[over] > 0, 0.0, np.pi)
        blk.branch(br, cfg, scale=np.abs(c[over]))
        if len(jumpers):
            blk.jump(jumpers, table, rng, cfg)
    return blk.result()


# --------------------------------------------------------------------------
# ensemble-level operations


def _site_sum(ens: Ensemble, values: np.ndarray) -> np.ndarray:
    N = ens.N
    flat = index_of(ens.m, N) * N + index_of(ens.n, N)
    return np.bincount(flat, weights=values, minlength=N * N).reshape(N, N)


def _grouped_stats(ens: Ensemble, values: np.ndarray, groups: np.ndarray, ngroups: int):
    """Estimate and standard error of sum(values) per group when the particles
    descend from ``ens.n_roots`` independent time-0 ancestors.

    Contributions are summed per (root, group); the standard error is that of
    a sum of n_roots i.i.d. root totals.  Under stratified initial sampling
    this is conservative.
    """
    M = max(ens.n_roots, 1)
    key = ens.root.astype(np.int64) * ngroups + groups
    uniq, inv = np.unique(key, return_inverse=True)
    y = np.bincount(inv, weights=values, minlength=len(uniq))
    g = uniq % ngroups
    total = np.bincount(g, weights=y, minlength=ngroups)
    sq = np.bincount(g, weights=y * y, minlength=ngroups)
    var = (sq - total**2 / M) * M / max(M - 1, 1)
    return total, np.sqrt(np.maximum(var, 0.0))


def site_statistics(ens: Ensemble, values: np.ndarray):
    N = ens.N
    groups = index_of(ens.m, N) * N + index_of(ens.n, N)
    est, se = _grouped_stats(ens, values, groups, N * N)
    return est.reshape(N, N), se.reshape(N, N)


def observable_statistics(ens: Ensemble, coefficients: np.ndarray, component: str = "cos"):
    """Estimate and standard error of sum_(m,n) rho(m,n) c(m,n).

    With ``component="sin"`` the sine moment is used instead; its
    expectation vanishes for mirror-symmetric initial lifts.
    """
    N = ens.N
    trig = {"cos": np.cos, "sin": np.sin}[component]
    c = np.asarray(coefficients, dtype=float)[index_of(ens.m, N), index_of(ens.n, N)]
    est, se = _grouped_stats(ens, ens.weight * trig(ens.alpha) * c, np.zeros(len(ens), dtype=np.int64), 1)
    return float(est[0]), float(se[0])


def snapshot(ens: Ensemble, observables: dict | None = None) -> Snapshot:
    cos_est, cos_se = site_statistics(ens, ens.weight * np.cos(ens.alpha))
    sin_est, sin_se = site_statistics(ens, ens.weight * np.sin(ens.alpha))
    obs = {name: observable_statistics(ens, c) for name, c in (observables or {}).items()}
    return Snapshot(ens.time, cos_est, cos_se, sin_est, sin_se, len(ens), dict(ens.counters), obs)


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=key)))


def initial_ensemble(phi0: LiftedDistribution, particles: int, rng: np.random.Generator) -> Ensemble:
    """Stratified draw from phi0 / ||phi0||: floor(M p_k) copies of atom k plus
    a multinomial remainder; every particle carries weight ||phi0|| / M."""
    mass = phi0.total_mass
    M = int(particles)
    if len(phi0) == 0 or mass == 0:
        e = np.zeros(0)
        return Ensemble(phi0.N, e.astype(np.int64), e.astype(np.int64), e, e, e.astype(np.int64), 0.0, 0.0, M)
    if np.any(phi0.near_stopping_points()):
        raise ValueError("initial distribution has atoms at the stopping points 0 or pi")
    p = phi0.weight / mass
    base = np.floor(M * p).astype(np.int64)
    rest = M - int(base.sum())
    if rest:
        resid = M * p - base
        base += rng.multinomial(rest, resid / resid.sum())
    idx = np.repeat(np.arange(len(phi0)), base)
    return Ensemble(
        phi0.N,
        phi0.m[idx].copy(),
        phi0.n[idx].copy(),
        phi0.alpha[idx].copy(),
        np.full(M, mass / M),
        np.arange(M, dtype=np.int64),
        0.0,
        mass,
        M,
    )


def resample(ens: Ensemble, target: int, rng: np.random.Generator) -> Ensemble:
    """Systematic resampling proportional to weight; survivors share the total
    weight equally.  Expected sum(w cos alpha) per site is unchanged."""
    if target < 1:
        raise ValueError("target size must be >= 1")
    out = ens.with_arrays(*ens.arrays())
    out.counters["resamples"] += 1
    if len(ens) == 0:
        return out
    total = float(ens.weight.sum())
    cum = np.cumsum(ens.weight)
    cum[-1] = total
    pos = (rng.random() + np.arange(target)) * (total / target)
    idx = np.minimum(np.searchsorted(cum, pos, side="right"), len(ens) - 1)
    out.m, out.n, out.alpha, out.root = ens.m[idx], ens.n[idx], ens.alpha[idx], ens.root[idx]
    out.weight = np.full(target, total / target)
    return out


def _blocks(ens: Ensemble, block_size: int):
    bid = ens.root // block_size
    order = np.argsort(bid, kind="stable")
    bid = bid[order]
    cuts = np.flatnonzero(np.diff(bid)) + 1
    arrays = [a[order] for a in ens.arrays()]
    starts = np.concatenate([[0], cuts])
    ends = np.concatenate([cuts, [len(bid)]])
    return [(int(bid[s]), tuple(a[s:e] for a in arrays)) for s, e in zip(starts, ends)]


def advance(ens: Ensemble, table: JumpTable, span: float, cfg: EngineConfig, interval: int) -> Ensemble:
    """Advance every lineage block by ``span``; blocks use independent streams
    keyed by (seed, interval, block) and are merged in block order."""
    if len(ens) == 0:
        out = ens.with_arrays(*ens.arrays())
        out.time = ens.time + span
        return out
    step = advance_event if cfg.mode == "event" else advance_fixed
    blocks = _blocks(ens, cfg.block_size)

    def work(item):
        bid, arrays = item
        return step(arrays, table, span, _stream(cfg.seed, _BLOCK_STREAM, interval, bid), cfg)

    if cfg.workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(work, blocks))
    else:
        results = [work(b) for b in blocks]
    parts = list(zip(*(r[0] for r in results)))
    out = ens.with_arrays(*(np.concatenate(p) for p in parts))
    out.time = ens.time + span
    for _, stats in results:
        for k, v in stats.items():
            out.counters[k] += v
    return out


def _barriers(observation_times: np.ndarray, sync_interval: float) -> list[tuple[float, bool]]:
    """Barrier times (t, is_observation) including intermediate sync points."""
    out = []
    t = 0.0
    for target in observation_times:
        n = int(math.ceil((target - t) / sync_interval - 1e-9)) if target > t else 0
        for k in range(1, n):
            out.append((t + (target - t) * k / n, False))
        out.append((float(target), True))
        t = float(target)
    return out


def run(
    config: EngineConfig,
    phi0: LiftedDistribution,
    table: JumpTable,
    observation_times,
    observables: dict | None = None,
) -> list[Snapshot]:
    """Sample an ensemble from phi0 and record Wigner estimates at each
    observation time (ascending, >= 0)."""
    errors = config.validate(table.rate)
    if errors:
        raise ValueError("; ".join(errors))
    times = np.atleast_1d(np.asarray(observation_times, dtype=float))
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("observation times must be non-negative and ascending")
    ens = initial_ensemble(phi0, config.particles, _stream(config.seed, _INIT_STREAM))
    snaps = []
    for interval, (t, observe) in enumerate(_barriers(times, config.sync_interval)):
        if t > ens.time:
            ens = advance(ens, table, t - ens.time, config, interval)
            ens.time = t
        if len(ens) > 2 * config.cap:
            ens = resample(ens, config.cap, _stream(config.seed, _RESAMPLE_STREAM, interval))
            logger.debug("resampled to %d particles at t=%g", config.cap, t)
        if observe:
            snaps.append(snapshot(ens, observables))
    return snaps


# --------------------------------------------------------------------------
# deterministic transfer operator on atoms


def kernel_step(phi: LiftedDistribution, table: JumpTable, dt: float, cfg: EngineConfig | None = None) -> LiftedDistribution:
    """Apply the one-step kernel M_dt to an atom list exactly (no sampling).

    Staying mass (1 - D dt) w moves to f_dt(alpha); where f_dt does not exist
    it is replaced by branch children.  Jump mass D dt w is split over the
    table entries and the two phase branches.  Jump landings are subject to
    the same vanish and branch rules as the particle engine.
    """
    cfg = cfg or EngineConfig(mode="fixed", dt=dt)
    D = table.rate
    keep = 1.0 - D * dt
    if not keep > 0:
        raise ValueError("need D*dt < 1")
    N = phi.N
    c = np.cos(phi.alpha) / keep
    over = np.abs(c) >= 1.0
    parts = []
    ok = ~over
    parts.append((phi.m[ok], phi.n[ok], _flow(phi.alpha[ok], c[ok]), keep * phi.weight[ok]))
    a1, a2 = branch_targets(c[over], cfg.branch_at_zero, cfg.branch_at_pi)
    wb = keep * phi.weight[over] * np.abs(c[over])
    for a in (a1, a2):
        parts.append((phi.m[over], phi.n[over], a, wb))
    for k, (dm, dn) in enumerate(table.displacements):
        mt, nt = wrap(phi.m + dm, N), wrap(phi.n + dn, N)
        inc = phase_increment(table, k, phi.m, phi.n, mt, nt)
        w = phi.weight * D * dt * table.probabilities[k] / 2
        for s in (1.0, -1.0):
            a = np.mod(phi.alpha + s * inc, TWO_PI)
            live = np.abs(np.cos(a)) > cfg.vanish_tol
            stop = live & (np.abs(np.sin(a)) < STOP_TOL)
            free = live & ~stop
            parts.append((mt[free], nt[free], a[free], w[free]))
            b1, b2 = branch_targets(np.cos(a[stop]), cfg.branch_at_zero, cfg.branch_at_pi)
            parts.append((mt[stop], nt[stop], b1, w[stop]))
            parts.append((mt[stop], nt[stop], b2, w[stop]))
    m, n, alpha, weight = (np.concatenate(x) for x in zip(*parts))
    return LiftedDistribution(N, m, n, alpha, weight)
