"""Time the hot kernels under the numba and pure-numpy backends.

Each backend runs in its own interpreter because the backend flag is read
at import time.  Reports the first call (which includes JIT compilation
under numba) and the best of several warm repeats.

    python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, math, sys, time
import numpy as np
from lowres_psk import SepQuery, backend, sep_theorem3, DetectionContext
from lowres_psk.detector import cone_probabilities
from lowres_psk.montecarlo import count_errors, draw_block

repeats = int(sys.argv[1])

def timed(fn):
    t0 = time.perf_counter(); fn(); first = time.perf_counter() - t0
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t0)
    return first, best

q = SepQuery(8, 3, 1.0, 10.0)
sym, h, w = draw_block(q, 0, 0)
sym, h, w = np.tile(sym, 16), np.tile(h, 16), np.tile(w, 16)
ctx = DetectionContext.build(8, 3, 0.3 + 0.8j, 1.0)
z = ctx.rotated_points()
rho, alpha = np.abs(z), np.angle(z)

cases = {
    "count_errors (262144 trials)": lambda: count_errors(sym, h, w, math.sqrt(q.snr), q.M, q.n),
    "cone_probabilities (8 symbols)": lambda: cone_probabilities(rho, alpha, 0.0, math.pi / 4, 1e-9, 60),
    "sep_theorem3 M=4 n=3 m=2": lambda: sep_theorem3(SepQuery(4, 3, 2.0, 1e3)),
    "sep_theorem3 M=8 n=3 m=1": lambda: sep_theorem3(q),
}
print(json.dumps({"backend": backend(), "results": {k: timed(f) for k, f in cases.items()}}))
"""


def run(disable_numba: bool, repeats: int) -> dict:
    env = dict(os.environ)
    env["LOWRES_PSK_NO_NUMBA"] = "1" if disable_numba else "0"
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeats)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)
    numba_res = run(False, args.repeats)
    numpy_res = run(True, args.repeats)
    width = max(len(k) for k in numba_res["results"])
    print(f"{'kernel':<{width}}  {'numba first':>12} {'numba warm':>11} {'numpy warm':>11} {'speedup':>8}")
    for name, (nb_first, nb_warm) in numba_res["results"].items():
        np_warm = numpy_res["results"][name][1]
        print(f"{name:<{width}}  {nb_first:12.4f} {nb_warm:11.4f} {np_warm:11.4f} {np_warm / nb_warm:8.2f}x")


if __name__ == "__main__":
    main()
