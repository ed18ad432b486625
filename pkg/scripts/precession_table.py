"""Print the exact Wigner function of the spin-1 S_z example over time."""
import numpy as np

from lattice_wigner.cli_io import build_config, evolve_exact

cfg = build_config({"preset": "sz3", "observation_times": list(np.linspace(0, 2 * np.pi, 9))})
out = evolve_exact(cfg)
print(f"{'t':>6} {'m':>3} {'n':>3} {'rho':>10}")
for t, m, n, _, _, exact, _ in out.rows:
    print(f"{t:6.3f} {m:3d} {n:3d} {exact:+10.6f}")
