"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run on the workload it sees in practice: per-pulse
observables of a thermal M block, a densely sampled alignment trace and
one semiclassical trajectory.  The end-to-end rows time full library calls
with each backend swapped in.
"""
import argparse
import math
import timeit

import numpy as np

from rotwall import PulseTrainSpec, ThermalEnsembleSpec, _kernels, energy_level, get_molecule
from rotwall import dynamics, semiclassical
from rotwall.rotor import cos2_matrix

N2 = get_molecule("N2")


def workloads():
    rng = np.random.default_rng(0)
    j_max, cols = 250, 30
    psi = rng.normal(size=(j_max + 1, cols)) + 1j * rng.normal(size=(j_max + 1, cols))
    psi = np.ascontiguousarray(psi / np.linalg.norm(psi, axis=0))
    w = rng.random(cols)
    J = np.arange(j_max + 1, dtype=float)
    E = energy_level(np.arange(j_max + 1), N2)
    c2 = cos2_matrix(0, j_max)
    times = np.linspace(0, 1, 200)
    return {
        "observables (251 x 30)": lambda k: k.observables(psi, w, J, E, c2.diag, c2.offdiag2),
        "alignment_trace (200 t)": lambda k: k.alignment_trace(psi, w, E, c2.diag, c2.offdiag2, times),
        "rk4_bloch (32k steps)": lambda k: k.rk4_bloch(3.0, N2.D_over_B, 0.0, math.pi / 4, 0.0, 1e-3, 32000, 1),
    }


def end_to_end():
    return {
        "integrate_bloch n=64": lambda: semiclassical.integrate_bloch(3.0, N2.D_over_B, n_max=64),
        "evolve_thermal 298 K, 32 pulses": lambda: dynamics.evolve_thermal(
            N2, PulseTrainSpec(3.0, 32), ThermalEnsembleSpec(298.0), workers=1
        ),
    }


def best_of(fn, repeat):
    t = timeit.Timer(fn)
    n, _ = t.autorange()
    return min(t.repeat(repeat=repeat, number=n)) / n


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    names = _kernels.available_backends()
    if "cython" not in names:
        print("compiled kernels not built; only the python backend is timed")
    print(f"{'kernel':34s}" + "".join(f"{n:>14s}" for n in names) + ("     speedup" if len(names) > 1 else ""))

    for label, fn in workloads().items():
        times = [best_of(lambda b=_kernels.get_backend(n): fn(b), args.repeat) for n in names]
        row = f"{label:34s}" + "".join(f"{t * 1e3:12.3f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)

    # swap the backend under the library and time whole calls
    for label, fn in end_to_end().items():
        times = []
        for n in names:
            b = _kernels.get_backend(n)
            for attr in ("observables", "alignment_trace", "rk4_bloch"):
                setattr(_kernels, attr, getattr(b, attr))
            times.append(best_of(fn, max(1, args.repeat // 2)))
        row = f"{label:34s}" + "".join(f"{t * 1e3:12.3f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
