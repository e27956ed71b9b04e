"""Local-matrix kernel shootout: compiled extension vs the numpy fallback.

Both backends contract per-element quadrature coefficients into 8x8 local
stiffness/mass blocks. This times that contraction on element batches of
increasing size and, for scale, one full eigenvalue assembly+solve.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --elements 200000 --repeats 5
"""

import argparse
import time

import numpy as np

from layercert import kernels
from layercert import _kernels_py


def _coeffs(n_el, rng):
    # positive-definite-ish coefficient fields, shaped like real assemblies
    css = rng.uniform(0.5, 2.0, (n_el, 8))
    csv = rng.uniform(-0.3, 0.3, (n_el, 8))
    cvv = rng.uniform(0.5, 2.0, (n_el, 8))
    cuu = rng.uniform(0.5, 2.0, (n_el, 8))
    cm = rng.uniform(0.1, 1.0, (n_el, 8))
    return css, csv, cvv, cuu, cm


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_contraction(n_el, repeats, rng):
    args = _coeffs(n_el, rng)
    tabs = (kernels.REF_N, kernels.REF_DS, kernels.REF_DV, kernels.REF_DU)

    impls = [("numpy", lambda: _kernels_py.local_matrices(*args, *tabs))]
    if kernels.BACKEND == "compiled":
        from layercert import _kernels
        impls.append(("compiled", lambda: _kernels.local_matrices(*args, *tabs)))

    results = {}
    for name, fn in impls:
        dt = _time(fn, repeats)
        results[name] = dt
        rate = n_el / dt / 1e6
        print(f"  {name:>8}: {dt * 1e3:8.2f} ms  ({rate:6.2f} M elements/s)")
    if "compiled" in results:
        print(f"  speedup : {results['numpy'] / results['compiled']:.1f}x")

    # the two backends must agree to rounding before a timing means anything
    ka, ma = _kernels_py.local_matrices(*args, *tabs)
    kb, mb = kernels.local_matrices(*args)
    assert np.max(np.abs(ka - kb)) <= 1e-12
    assert np.max(np.abs(ma - mb)) <= 1e-12


def bench_assembly(repeats):
    import layercert as lc
    from layercert.spectrum import RadialMeshSpec, assemble_radial, \
        lowest_eigenvalues

    layer = lc.LayerModel(lc.make_surface("capped_cone"), 0.2)
    mesh = RadialMeshSpec(n_r=512, n_u=64, r_max=20.0, grade=4.0)
    forms = None

    def run():
        nonlocal forms
        forms = assemble_radial(layer, mesh)

    dt = _time(run, repeats)
    print(f"  assemble 512x64 radial mesh : {dt * 1e3:8.1f} ms "
          f"(backend: {kernels.BACKEND})")
    t0 = time.perf_counter()
    w, _, _ = lowest_eigenvalues(forms.stiffness, forms.mass, 1)
    print(f"  ground eigenvalue solve     : "
          f"{(time.perf_counter() - t0) * 1e3:8.1f} ms  (lambda1 = {w[0]:.6f})")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--elements", type=int, default=100000,
                    help="largest element batch (default 100000)")
    ap.add_argument("--repeats", type=int, default=3,
                    help="timing repeats, best-of (default 3)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"active backend: {kernels.BACKEND}")
    rng = np.random.default_rng(args.seed)
    for n_el in (1000, 10000, args.elements):
        print(f"local matrices, {n_el} elements:")
        bench_contraction(n_el, args.repeats, rng)
    print("end-to-end:")
    bench_assembly(args.repeats)


if __name__ == "__main__":
    main()
