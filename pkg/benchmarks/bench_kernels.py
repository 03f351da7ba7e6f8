"""Time the numba kernels against their numpy references, then time a full
AHOM logistic run under each backend (selected through AHOM_DISABLE_NUMBA in
a child process, since the choice is fixed at import).

    python benchmarks/bench_kernels.py [--repeat 5] [--m 208] [--d 60]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from ahom import _kernels as K

CASES = [
    ("rank_one_cube_sum", lambda Y, c: (Y, c)),
    ("trailing_cube_norms_sq", lambda Y, c: (K.rank_one_cube_sum_numpy(Y, c),)),
    ("trailing_gram_cube_norms_sq", lambda Y, c: (Y, c)),
    ("gram_cube_norm_sq", lambda Y, c: (Y, c)),
]

END_TO_END = """
import json, time, numpy as np
from ahom import BACKEND, AhomConfig, ahom_run, make_logistic, synthetic_dataset, to_logistic_problem
f = make_logistic(to_logistic_problem(synthetic_dataset({m}, {d}, 1), 1e-5))
ahom_run(f, np.zeros({d}), AhomConfig(max_iters=2))   # warm-up (JIT load)
t = time.perf_counter()
r = ahom_run(f, np.zeros({d}), AhomConfig())
print(json.dumps(dict(backend=BACKEND, seconds=time.perf_counter() - t, iters=len(r.trace),
                      f=r.trace[-1].f, status=r.status)))
"""


def best_of(fn, args, repeat):
    fn(*args)  # compile / warm caches
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t)
    return min(times)


def kernel_table(m, d, repeat):
    rng = np.random.default_rng(0)
    Y, c = rng.standard_normal((m, d)), rng.standard_normal(m)
    print(f"kernels on m={m}, d={d} (best of {repeat})")
    print(f"{'kernel':30s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name, make_args in CASES:
        args = make_args(Y, c)
        f_np = getattr(K, name + "_numpy")
        f_nb = getattr(K, name + "_numba")
        t_np = best_of(f_np, args, repeat)
        t_nb = best_of(f_nb, args, repeat)
        diff = float(np.max(np.abs(np.asarray(f_np(*args)) - np.asarray(f_nb(*args)))))
        print(f"{name:30s} {1e3 * t_np:10.3f} {1e3 * t_nb:10.3f} {t_np / t_nb:8.2f} {diff:10.2e}")


def end_to_end(m, d):
    print(f"\nAHOM on synthetic logistic ({m} x {d}), zero init")
    for disable in ("0", "1"):
        env = dict(os.environ, AHOM_DISABLE_NUMBA=disable)
        out = subprocess.run([sys.executable, "-c", END_TO_END.format(m=m, d=d)], env=env,
                             capture_output=True, text=True, check=True)
        r = json.loads(out.stdout.strip().splitlines()[-1])
        print(f"{r['backend']:6s} {r['seconds']:8.3f}s  {r['iters']} iterations  "
              f"f={r['f']!r}  {r['status']}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--m", type=int, default=208)
    ap.add_argument("--d", type=int, default=60)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")
    kernel_table(args.m, args.d, args.repeat)
    if not args.skip_end_to_end:
        end_to_end(args.m, args.d)


if __name__ == "__main__":
    main()
