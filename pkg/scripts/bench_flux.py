"""Time the short-time boundary flux against the K-term series derivative."""

import argparse
import json

from rdlaplace import gallery
from rdlaplace.bench import bench_boundary_flux, bench_fd_scaling


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-t", type=int, default=1000)
    ap.add_argument("--K", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    spec = gallery.triangle_problem().spec
    rep = bench_boundary_flux(spec, args.n_t, K=args.K, repeat=args.repeat)
    rep["fd_scaling"] = bench_fd_scaling(spec)
    print(json.dumps(rep, indent=2))


if __name__ == "__main__":
    main()
