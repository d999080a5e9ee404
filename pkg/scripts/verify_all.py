"""Run every verification suite over a few chain sizes and print a summary table."""

import argparse

from bethegeom.cli import RunConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    failed = 0
    for n in args.sizes:
        report = run(RunConfig(n=n, k=max(1, n // 2), seed=args.seed))
        print(f"n={n} k={max(1, n // 2)}")
        for chk in report.checks:
            failed += not chk.passed
            print(f"  {'ok  ' if chk.passed else 'FAIL'} {chk.name:28s} {chk.residual:10.2e} < {chk.tolerance:.0e}")
    print(f"{failed} failing checks")


if __name__ == "__main__":
    main()
