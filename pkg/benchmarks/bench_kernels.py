"""Compare the numba kernels against the interpreted fallback.

Each workload runs in a fresh interpreter per mode (``SEMISUM_JIT=1`` and
``SEMISUM_JIT=0``).  One warm-up call absorbs compilation or cache loading,
then the best of ``--repeat`` timed calls is reported.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--only NAME ...]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _bands():
    from semisum.search import all_bands

    return sum(1 for _ in all_bands(4))


def _lz_scan():
    from semisum.search import lz_lemma_scan

    s = lz_lemma_scan(4)
    return s.algebras, s.congruences


def _satisfaction():
    from semisum import fixtures
    from semisum.algebra import satisfies_all
    from semisum.sums import free_semilattice

    A, _ = free_semilattice([f"x{i}" for i in range(6)])
    return satisfies_all(A, fixtures.axioms("semilattice")).holds


def _replicas():
    import numpy as np

    from semisum.congruence import semilattice_replica
    from semisum.search import random_commutative_sum

    rng = np.random.default_rng(7)
    return sum(len(semilattice_replica(random_commutative_sum(rng, 6)).blocks()) for _ in range(200))


WORKLOADS = {
    "band-search-4": _bands,
    "lz-lemma-scan-4": _lz_scan,
    "satisfaction-63": _satisfaction,
    "replica-200": _replicas,
}


def _child(name: str, repeat: int) -> None:
    fn = WORKLOADS[name]
    result = fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        again = fn()
        best = min(best, time.perf_counter() - t0)
        assert again == result
    print(json.dumps({"best": best, "result": repr(result)}))


def _run(name: str, jit: str, repeat: int) -> dict:
    env = dict(os.environ, SEMISUM_JIT=jit)
    proc = subprocess.run(
        [sys.executable, __file__, "--child", name, "--repeat", str(repeat)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--only", nargs="*", choices=sorted(WORKLOADS))
    ap.add_argument("--child", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        _child(args.child, args.repeat)
        return 0
    print(f"{'workload':<18}{'jit s':>10}{'python s':>12}{'speedup':>10}  agree")
    status = 0
    for name in args.only or WORKLOADS:
        fast, slow = _run(name, "1", args.repeat), _run(name, "0", args.repeat)
        agree = fast["result"] == slow["result"]
        status |= not agree
        ratio = slow["best"] / fast["best"] if fast["best"] > 0 else float("inf")
        print(f"{name:<18}{fast['best']:>10.4f}{slow['best']:>12.4f}{ratio:>9.1f}x  {agree}")
    return status


if __name__ == "__main__":
    sys.exit(main())
