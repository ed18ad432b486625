"""Run configuration, presets, output files and the ``lattice-wigner`` CLI.

Config files are JSON with this schema (all keys optional except where a
preset is absent)::

    {
      "preset": "sz3",                       # fills N, hamiltonian, initial_state
      "N": 3,
      "hamiltonian": "sz" | [[[re, im], ...], ...],   # preset name or row-major matrix
      "initial_state": "sz3" | "mixed"
                       | {"vector": [[re, im], ...]}
                       | {"wigner": [[...], ...]},
      "hbar": 1.0,
      "lift": "two_atom" | "smooth",
      "observation_times": [0.5, 1.0, 2.0],
      "ode_step": 0.001,
      "engine": {"mode": "event", "dt": null, "particles": 100000, "seed": 0,
                 "workers": 1, "population_cap": null, "vanish_tol": 1e-12,
                 "block_size": 4096, "sync_interval": 0.5},
      "sweep": {"particles": [1000, 10000, 100000, 1000000], "time": 1.0, "seeds": 1},
      "output": {"dir": "out", "csv": "results.csv", "metadata": "metadata.json"}
    }

The CSV columns are fixed: ``t, m, n, rho_est, stderr, rho_exact, abs_err``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from lattice_wigner import __version__
from lattice_wigner.hamiltonian import format_table, jump_table, polar_decompose, weyl_coefficients
from lattice_wigner.lattice_algebra import labels
from lattice_wigner.liouville_oracle import evolve_unitary, evolve_wigner_ode
from lattice_wigner.markov_engine import EngineConfig, run
from lattice_wigner.phase_lift import lift_smooth, lift_two_atom
from lattice_wigner.wigner import check_density, density_from_state, density_from_wigner, observable_weights, wigner_from_density

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("t", "m", "n", "rho_est", "stderr", "rho_exact", "abs_err")
WORKERS_ENV = "LATTICE_WIGNER_WORKERS"
PRESETS = ("sz3",)
HAMILTONIAN_PRESETS = ("sz", "sx", "sy")
STATE_PRESETS = ("sz3", "mixed")


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


def spin_matrices(N: int) -> dict[str, np.ndarray]:
    """Spin-j operators, j = (N-1)/2, in the descending S_z basis."""
    j = (N - 1) / 2
    mz = labels(N).astype(float)
    plus = np.zeros((N, N), dtype=complex)
    for k in range(1, N):
        m = mz[k]
        plus[k - 1, k] = np.sqrt(j * (j + 1) - m * (m + 1))
    minus = plus.conj().T
    return {
        "sz": np.diag(mz).astype(complex),
        "sx": (plus + minus) / 2,
        "sy": (plus - minus) / 2j,
    }


def sz3_state() -> np.ndarray:
    return np.array([1.0, np.sqrt(2.0), 1.0], dtype=complex) / 2


def _pairs(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [_pairs(row) for row in a]


def _complex(value, path: str, errors: list[str], ndim: int):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        errors.append(f"{path}: expected nested [re, im] pairs")
        return None
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        errors.append(f"{path}: expected {'a vector' if ndim == 1 else 'a matrix'} of [re, im] pairs, got shape {arr.shape}")
        return None
    return arr[..., 0] + 1j * arr[..., 1]


@dataclass
class RunConfig:
    N: int
    hamiltonian: np.ndarray
    rho0: np.ndarray
    W0: np.ndarray
    hbar: float = 1.0
    engine: EngineConfig = field(default_factory=EngineConfig)
    observation_times: list = field(default_factory=lambda: [0.5, 1.0, 2.0])
    lift: str = "two_atom"
    ode_step: float = 1e-3
    sweep: dict = field(default_factory=lambda: {"particles": [1000, 10000, 100000, 1000000], "time": 1.0, "seeds": 1})
    output: dict = field(default_factory=lambda: {"dir": "out", "csv": "results.csv", "metadata": "metadata.json"})
    state_spec: str | dict = "sz3"

    def echo(self) -> dict:
        """A config document that reproduces this run exactly when re-parsed."""
        return {
            "N": self.N,
            "hamiltonian": _pairs(self.hamiltonian),
            "initial_state": self.state_spec,
            "hbar": self.hbar,
            "lift": self.lift,
            "observation_times": list(self.observation_times),
            "ode_step": self.ode_step,
            "engine": asdict(self.engine),
            "sweep": dict(self.sweep),
            "output": dict(self.output),
        }


def build_config(doc: dict) -> RunConfig:
    """Validate a config document; raises :class:`ConfigError` listing every problem."""
    errors: list[str] = []
    doc = dict(doc)
    preset = doc.pop("preset", None)
    if preset is not None:
        if preset not in PRESETS:
            errors.append(f"preset: unknown preset {preset!r} (known: {', '.join(PRESETS)})")
        else:
            doc.setdefault("N", 3)
            doc.setdefault("hamiltonian", "sz")
            doc.setdefault("initial_state", "sz3")
    known = {"N", "hamiltonian", "initial_state", "hbar", "lift", "observation_times", "ode_step", "engine", "sweep", "output"}
    for key in sorted(set(doc) - known):
        errors.append(f"{key}: unknown field")

    N = doc.get("N")
    if N is None:
        errors.append("N: required")
    elif isinstance(N, bool) or not isinstance(N, int):
        errors.append(f"N: must be an integer, got {N!r}")
        N = None
    elif N < 3 or N % 2 == 0:
        errors.append("N: N must be odd and >= 3")
        N = None
    if N is None:
        raise ConfigError(errors)

    H = None
    h_spec = doc.get("hamiltonian")
    if h_spec is None:
        errors.append("hamiltonian: required")
    elif isinstance(h_spec, str):
        if h_spec not in HAMILTONIAN_PRESETS:
            errors.append(f"hamiltonian: unknown preset {h_spec!r} (known: {', '.join(HAMILTONIAN_PRESETS)})")
        else:
            H = spin_matrices(N)[h_spec]
    else:
        H = _complex(h_spec, "hamiltonian", errors, ndim=2)
        if H is not None and H.shape != (N, N):
            errors.append(f"hamiltonian: expected shape ({N}, {N}), got {H.shape}")
            H = None
        if H is not None and np.abs(H - H.conj().T).max() > 1e-10:
            errors.append("hamiltonian: matrix is not Hermitian")
            H = None

    rho0 = W0 = None
    s_spec = doc.get("initial_state")
    state_spec = s_spec
    if s_spec is None:
        errors.append("initial_state: required")
    elif isinstance(s_spec, str):
        if s_spec == "sz3":
            if N != 3:
                errors.append("initial_state: preset 'sz3' needs N = 3")
            else:
                rho0 = density_from_state(sz3_state())
        elif s_spec == "mixed":
            rho0 = np.eye(N, dtype=complex) / N
        else:
            errors.append(f"initial_state: unknown preset {s_spec!r} (known: {', '.join(STATE_PRESETS)})")
    elif isinstance(s_spec, dict) and "vector" in s_spec:
        psi = _complex(s_spec["vector"], "initial_state.vector", errors, ndim=1)
        if psi is not None:
            if psi.shape != (N,):
                errors.append(f"initial_state.vector: expected length {N}, got {psi.shape[0]}")
            elif abs(np.linalg.norm(psi) - 1) > 1e-8:
                errors.append(f"initial_state.vector: state is not normalized (norm {np.linalg.norm(psi):.10g})")
            else:
                rho0 = np.outer(psi, psi.conj())
    elif isinstance(s_spec, dict) and "wigner" in s_spec:
        try:
            W = np.asarray(s_spec["wigner"], dtype=float)
        except (TypeError, ValueError):
            W = None
        if W is None or W.shape != (N, N):
            errors.append(f"initial_state.wigner: expected a real {N}x{N} array")
        elif abs(W.sum() - 1) > 1e-8:
            errors.append(f"initial_state.wigner: values sum to {W.sum():.10g}, expected 1")
        else:
            W0 = W
            rho0 = density_from_wigner(W)
    else:
        errors.append("initial_state: expected a preset name, {'vector': ...} or {'wigner': ...}")
    if rho0 is not None and W0 is None:
        try:
            check_density(rho0)
            W0 = wigner_from_density(rho0)
        except ValueError as exc:
            errors.append(f"initial_state: {exc}")

    hbar = doc.get("hbar", 1.0)
    if not isinstance(hbar, (int, float)) or isinstance(hbar, bool) or not hbar > 0:
        errors.append("hbar: must be a positive number")

    lift = doc.get("lift", "two_atom")
    if lift not in ("two_atom", "smooth"):
        errors.append(f"lift: must be 'two_atom' or 'smooth', got {lift!r}")

    times = doc.get("observation_times", [0.5, 1.0, 2.0])
    try:
        times = [float(t) for t in times]
        if any(t < 0 for t in times) or sorted(times) != times:
            errors.append("observation_times: must be non-negative and ascending")
    except (TypeError, ValueError):
        errors.append("observation_times: must be a list of numbers")

    ode_step = doc.get("ode_step", 1e-3)
    if not isinstance(ode_step, (int, float)) or not ode_step > 0:
        errors.append("ode_step: must be positive")

    eng_doc = doc.get("engine", {}) or {}
    names = {f.name for f in fields(EngineConfig)}
    for key in sorted(set(eng_doc) - names):
        errors.append(f"engine.{key}: unknown field")
    engine = EngineConfig(**{k: v for k, v in eng_doc.items() if k in names})

    rate = None
    if H is not None and not errors:
        rate = jump_table(polar_decompose(weyl_coefficients(H)), hbar).rate
    errors.extend(engine.validate(rate or 0.0))

    sweep = {"particles": [1000, 10000, 100000, 1000000], "time": 1.0, "seeds": 1}
    sweep.update(doc.get("sweep", {}) or {})
    output = {"dir": "out", "csv": "results.csv", "metadata": "metadata.json"}
    output.update(doc.get("output", {}) or {})

    if errors:
        raise ConfigError(errors)
    return RunConfig(N, H, rho0, W0, float(hbar), engine, times, lift, float(ode_step), sweep, output, state_spec)


def parse_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError([f"config: cannot read {path}: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config: invalid JSON: {exc}"]) from exc
    if not isinstance(doc, dict):
        raise ConfigError(["config: top level must be an object"])
    return build_config(doc)


# --------------------------------------------------------------------------
# runs


@dataclass
class RunOutput:
    rows: list
    metadata: dict


def _lift(cfg: RunConfig):
    return lift_two_atom(cfg.W0) if cfg.lift == "two_atom" else lift_smooth(cfg.W0)


def _exact(cfg: RunConfig, times):
    return evolve_unitary(cfg.rho0, cfg.hamiltonian, times, cfg.hbar).states


def _rows(times, est, err, exact) -> list:
    est, err, exact = np.asarray(est), np.asarray(err), np.asarray(exact)
    L = labels(est.shape[-1])
    rows = []
    for t, e, s, x in zip(times, est, err, exact):
        for i, m in enumerate(L):
            for j, n in enumerate(L):
                rows.append((float(t), int(m), int(n), float(e[i, j]), float(s[i, j]), float(x[i, j]), float(abs(e[i, j] - x[i, j]))))
    return rows


def _tables(cfg: RunConfig):
    coeffs = weyl_coefficients(cfg.hamiltonian)
    polar = polar_decompose(coeffs)
    return coeffs, polar, jump_table(polar, cfg.hbar)


def simulate(cfg: RunConfig) -> RunOutput:
    coeffs, polar, table = _tables(cfg)
    phi0 = _lift(cfg)
    observables = {}
    if cfg.N == 3:
        observables = {k: observable_weights(v) for k, v in spin_matrices(3).items()}
    snaps = run(cfg.engine, phi0, table, cfg.observation_times, observables)
    times = [s.time for s in snaps]
    exact = _exact(cfg, times)
    rows = _rows(times, [s.estimate for s in snaps], [s.stderr for s in snaps], exact)
    last = snaps[-1].counters if snaps else {}
    jumps = max(last.get("jumps", 0), 1)
    meta = {
        "version": __version__,
        "config": cfg.echo(),
        "seed": cfg.engine.seed,
        "phi0_mass": phi0.total_mass,
        "phi0_atoms": len(phi0),
        "h_total": table.total_strength,
        "D": table.rate,
        "origin_strength_excluded": float(polar.strength[(cfg.N - 1) // 2, (cfg.N - 1) // 2]),
        "counters": [dict(time=s.time, population=s.population, **s.counters) for s in snaps],
        "branch_ratio": last.get("branches", 0) / jumps,
        "vanish_ratio": last.get("vanishes", 0) / jumps,
        "observables": [
            {"time": s.time, **{k: {"estimate": v[0], "stderr": v[1]} for k, v in s.observables.items()}} for s in snaps
        ],
    }
    return RunOutput(rows, meta)


def evolve_exact(cfg: RunConfig) -> RunOutput:
    """Both oracle routes; rho_est holds the coefficient-ODE values and
    rho_exact the unitary ones."""
    _, polar, table = _tables(cfg)
    times = cfg.observation_times
    ode = evolve_wigner_ode(cfg.W0, polar, times, cfg.hbar, cfg.ode_step).states
    exact = _exact(cfg, times)
    rows = _rows(times, ode, np.zeros_like(ode), exact)
    meta = {"version": __version__, "config": cfg.echo(), "D": table.rate, "h_total": table.total_strength}
    return RunOutput(rows, meta)


def validate_rows(rows, nsigma: float = 3.0, fraction: float = 0.95) -> tuple[bool, float]:
    ok = [r[6] <= nsigma * r[4] or r[6] == 0.0 for r in rows]
    frac = float(np.mean(ok)) if ok else 1.0
    return frac >= fraction, frac


def sweep(cfg: RunConfig) -> tuple[list, float]:
    """Sup-norm error at ``sweep.time`` for each particle count; returns rows
    (M, seed, sup_err) and the fitted log-log slope of mean error vs M."""
    _, _, table = _tables(cfg)
    phi0 = _lift(cfg)
    t = float(cfg.sweep.get("time", 1.0))
    exact = _exact(cfg, [t])[0]
    rows = []
    for M in cfg.sweep["particles"]:
        for k in range(int(cfg.sweep.get("seeds", 1))):
            eng = EngineConfig(**{**asdict(cfg.engine), "particles": int(M), "seed": cfg.engine.seed + k})
            est = run(eng, phi0, table, [t])[0].estimate
            rows.append((int(M), eng.seed, float(np.abs(est - exact).max())))
    Ms = np.array(sorted({r[0] for r in rows}), dtype=float)
    errs = np.array([np.mean([r[2] for r in rows if r[0] == M]) for M in Ms])
    slope = float(np.polyfit(np.log(Ms), np.log(errs), 1)[0]) if len(Ms) > 1 else float("nan")
    return rows, slope


def write_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([repr(x) for x in r])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_metadata(path, meta: dict) -> None:
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --------------------------------------------------------------------------
# command line


def _load(args) -> RunConfig:
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
    else:
        doc = {"preset": "sz3"}
    eng = dict(doc.get("engine", {}) or {})
    if args.seed is not None:
        eng["seed"] = args.seed
    if args.particles is not None:
        eng["particles"] = args.particles
    if args.mode is not None:
        eng["mode"] = args.mode
    if os.environ.get(WORKERS_ENV):
        eng["workers"] = int(os.environ[WORKERS_ENV])
    doc["engine"] = eng
    if args.out is not None:
        doc["output"] = {**(doc.get("output", {}) or {}), "dir": args.out}
    return build_config(doc)


def _outputs(cfg: RunConfig, out: RunOutput) -> Path:
    d = Path(cfg.output["dir"])
    d.mkdir(parents=True, exist_ok=True)
    write_csv(d / cfg.output["csv"], out.rows)
    write_metadata(d / cfg.output["metadata"], out.metadata)
    return d


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="lattice-wigner", description=__doc__.split("\n")[0])
    parser.add_argument("command", choices=["decompose", "evolve-exact", "simulate", "validate", "sweep"])
    parser.add_argument("--config", help="JSON run configuration (default: the sz3 preset)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--particles", type=int)
    parser.add_argument("--mode", choices=["event", "fixed"])
    parser.add_argument("--out", help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    try:
        cfg = _load(args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"invalid configuration:\n  config: {exc}", file=sys.stderr)
        return 2

    if args.command == "decompose":
        print(format_table(*_tables(cfg)))
        return 0
    if args.command == "evolve-exact":
        d = _outputs(cfg, evolve_exact(cfg))
        print(f"wrote {d / cfg.output['csv']}")
        return 0
    if args.command == "simulate":
        d = _outputs(cfg, simulate(cfg))
        print(f"wrote {d / cfg.output['csv']}")
        return 0
    if args.command == "validate":
        out = simulate(cfg)
        passed, frac = validate_rows(out.rows)
        out.metadata["validation"] = {"within_3_stderr": frac, "passed": passed}
        d = _outputs(cfg, out)
        print(f"wrote {d / cfg.output['csv']}")
        print(f"{'PASS' if passed else 'FAIL'}: {frac:.1%} of cells within 3 standard errors (need 95%)")
        return 0 if passed else 1
    rows, slope = sweep(cfg)
    d = Path(cfg.output["dir"])
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("particles", "seed", "sup_err"))
        w.writerows(rows)
    for M, seed, err in rows:
        print(f"M={M:>9d} seed={seed} sup_err={err:.4e}")
    print(f"log-log slope: {slope:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
