"""Time the hot assembly kernels on both backends.

Without arguments the script re-runs itself once per backend (numba, numpy)
in a subprocess so each process imports the package with NSKDG_BACKEND fixed,
then prints a comparison table.  Timings cover StepAssembler.residual and
.jacobian on a representative mid-simulation state.

    python3 benchmarks/bench_kernels.py [--n-elems 512] [--degree 1]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def measure(n_elems: int, degree: int, iters: int) -> dict:
    import numpy as np

    from nskdg import (BACKEND, FluxFamily, NewtonConfig, PhysParams,
                       RunConfig, SchemeConfig, StepIC, StepState, run)
    from nskdg.scheme import StepAssembler, get_layout

    cfg = RunConfig(domain=(0.0, 1.0), n_elems=n_elems,
                    scheme=SchemeConfig(phys=PhysParams(gamma=1e-4, mu=1e-6),
                                        degree=degree, dt=1e-3,
                                        flux=FluxFamily.dissipative(0.5, 0.5)),
                    T=5e-3, ic=StepIC(), newton=NewtonConfig())
    result = run(cfg)
    state = result.final_state
    space = state.rho.space
    lay = get_layout(space)
    u = lay.pack(state.rho.elems, state.v.elems, result.final_tau.elems,
                 state.q.elems)
    A = StepAssembler(space, cfg.scheme)

    A.residual(state, u)  # trigger any jit compilation before timing
    A.jacobian(state, u)

    def best_of(fn, repeats=5):
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            for _ in range(iters):
                fn()
            times.append((time.perf_counter() - t0) / iters)
        return min(times)

    return {
        "backend": BACKEND,
        "residual_ms": 1e3 * best_of(lambda: A.residual(state, u)),
        "jacobian_ms": 1e3 * best_of(lambda: A.jacobian(state, u)),
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-elems", type=int, default=512)
    ap.add_argument("--degree", type=int, default=1)
    ap.add_argument("--iters", type=int, default=50)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.worker:
        print(json.dumps(measure(args.n_elems, args.degree, args.iters)))
        return 0

    results = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, NSKDG_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, __file__, "--worker",
             "--n-elems", str(args.n_elems), "--degree", str(args.degree),
             "--iters", str(args.iters)],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"{backend}: unavailable "
                  f"({proc.stderr.strip().splitlines()[-1]})")
            continue
        results[backend] = json.loads(proc.stdout)

    print(f"n_elems={args.n_elems} degree={args.degree} "
          f"(best of 5 x {args.iters} calls)")
    print(f"{'backend':<10}{'residual [ms]':>15}{'jacobian [ms]':>15}")
    for backend, r in results.items():
        print(f"{backend:<10}{r['residual_ms']:>15.3f}"
              f"{r['jacobian_ms']:>15.3f}")
    if len(results) == 2:
        nb, np_ = results["numba"], results["numpy"]
        print(f"{'speedup':<10}"
              f"{np_['residual_ms'] / nb['residual_ms']:>14.1f}x"
              f"{np_['jacobian_ms'] / nb['jacobian_ms']:>14.1f}x")
    return 0 if results else 1


if __name__ == "__main__":
    raise SystemExit(main())
