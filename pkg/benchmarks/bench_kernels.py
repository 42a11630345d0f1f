"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from preservability import channels, numerics, preorder


def _hermitian(n, rng):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return A + A.conj().T


def _cases(rng):
    H4, H9 = _hermitian(4, rng), _hermitian(9, rng)
    R3 = rng.normal(size=(3, 3))
    src = channels.random_channel(3, "weyl_mixture", rng)
    tgt = channels.random_channel(3, "weyl_mixture", rng)
    lam = preorder.eigenvalue_vector(src).values
    mu = preorder.eigenvalue_vector(tgt).values
    return [
        ("hermitian_eig 4x4", lambda: numerics.hermitian_eig(H4)),
        ("hermitian_eig 9x9", lambda: numerics.hermitian_eig(H9)),
        ("real_svd 3x3", lambda: numerics.real_svd(R3)),
        ("feasibility d=3 (LP)", lambda: preorder.decide(lam, mu, 3)),
    ]


def _time(fn, repeat):
    fn()
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=500)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    cases = _cases(rng)
    backends = ["python"]
    prev = numerics.BACKEND
    try:
        numerics.use_backend("compiled")
        backends.insert(0, "compiled")
    except Exception:
        print("compiled kernels unavailable; timing the numpy fallback only")
    results = {}
    for b in backends:
        numerics.use_backend(b)
        for name, fn in cases:
            results[(name, b)] = _time(fn, args.repeat)
    numerics.use_backend(prev)
    print(f"{'kernel':<24}" + "".join(f"{b + ' (us)':>16}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, _ in cases:
        row = f"{name:<24}" + "".join(f"{1e6 * results[(name, b)]:>16.1f}" for b in backends)
        if len(backends) == 2:
            row += f"{results[(name, 'python')] / results[(name, 'compiled')]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
