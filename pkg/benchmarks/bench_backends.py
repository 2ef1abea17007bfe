"""Benchmark the pure-Python flow kernel against the compiled one.

Usage: python benchmarks/bench_backends.py [n_replicas]
The two backends are bit-identical (asserted below), so the only
difference worth printing is wall time.
"""

import sys
import time

import numpy as np

from orderdual import models
from orderdual import markov as mk
from orderdual._backend import both_kernels


def bench_mc(kern, imgs_x, imgs_y, cum, total, psi, n):
    start = time.perf_counter()
    out = kern.mc_duality(imgs_x, imgs_y, cum, total, 1.0, 1, 1, psi, n, 7)
    return out, time.perf_counter() - start


def bench_logs(kern, cum, total, n):
    start = time.perf_counter()
    events = 0
    for i in range(n):
        times, _ = kern.sample_log(i, total, cum, 0.0, 1.0)
        events += len(times)
    return events, time.perf_counter() - start


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
    vo = models.build_voter(2)
    dual = mk.dual_rep_additive(vo.pairing, vo.rep)
    imgs_x = np.asarray([m.img for m in vo.rep.maps()], dtype=np.int64)
    imgs_y = np.asarray([m.img for m in dual.maps()], dtype=np.int64)
    psi = vo.pairing.psi_table()
    rates = [float(r) for r in vo.rep.rates()]
    cum = np.cumsum(rates)
    total = float(sum(rates))

    results = {}
    print(f"voter |sites|=2, horizon 1.0, {n} replicas per side\n")
    print(f"{'backend':>10} {'mc_duality':>12} {'sample_log x' + str(n // 10):>16}")
    for name, kern in both_kernels():
        mc_out, mc_dt = bench_mc(kern, imgs_x, imgs_y, cum, total, psi, n)
        _, log_dt = bench_logs(kern, cum, total, n // 10)
        results[name] = mc_out
        print(f"{name:>10} {mc_dt:>10.3f}s {log_dt:>14.3f}s")
    if len(results) == 2:
        assert results["python"] == results["compiled"], "backends diverge!"
        print("\nbackends agree bit for bit")
    else:
        print("\ncompiled backend not available; ran pure Python only")


if __name__ == "__main__":
    main()
