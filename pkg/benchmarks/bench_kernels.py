"""Time the special-function kernels with numba and with the pure-Python fallback.

Each path runs in its own interpreter because the choice is made at import
time from TAILORDER_NO_NUMBA. Usage: python benchmarks/bench_kernels.py [n]
"""

import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
import numpy as np
from tailorder._jit import NUMBA_ENABLED
from tailorder.numerics import bessel_k, gammainc_q, log_gammainc_q
from tailorder.generators import ACIG

n = int(sys.argv[1])
x = np.geomspace(1e-3, 50.0, n)
cases = {
    "bessel_k(2.5, x)": lambda: bessel_k(2.5, x),
    "gammainc_q(1.5, x)": lambda: gammainc_q(1.5, x),
    "log_gammainc_q(2.0, x)": lambda: log_gammainc_q(2.0, x),
    "ACIG(1.5).psi(x)": lambda: ACIG(1.5).psi(x),
}
out = {"numba": NUMBA_ENABLED, "n": n, "seconds": {}}
for name, fn in cases.items():
    fn()  # warm-up (JIT compile or cache load)
    best = float("inf")
    for _ in range(5):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    out["seconds"][name] = best
print(json.dumps(out))
"""


def run(no_numba, n):
    env = dict(os.environ)
    if no_numba:
        env["TAILORDER_NO_NUMBA"] = "1"
    else:
        env.pop("TAILORDER_NO_NUMBA", None)
    res = subprocess.run([sys.executable, "-c", WORKLOAD, str(n)], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
    fast, slow = run(False, n), run(True, n)
    print(f"n = {n} points per call (best of 5)")
    print(f"{'kernel':<26}{'numba [ms]':>12}{'pure [ms]':>12}{'speed-up':>10}")
    for name in fast["seconds"]:
        a, b = fast["seconds"][name], slow["seconds"][name]
        print(f"{name:<26}{1e3 * a:>12.3f}{1e3 * b:>12.3f}{b / a:>9.1f}x")
    if not fast["numba"]:
        print("note: numba is not importable, both columns ran the pure path")


if __name__ == "__main__":
    main()
