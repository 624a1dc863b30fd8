#!/usr/bin/env python3
"""Materialize the synthetic planted-signal benchmark on disk.

Writes train/ and test/ conversation directories in the ingestion
layout, gold-label key files, and the three pretraining corpora, so the
CLI can run the whole pipeline end to end without any external data.
"""

import argparse
import json

from rumorvet.synthetic import SyntheticSpec, materialize


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", help="directory to write the benchmark into")
    parser.add_argument("--train-per-cell", type=int, default=30)
    parser.add_argument("--test-per-cell", type=int, default=12)
    parser.add_argument("--replies-per-thread", type=int, default=4)
    parser.add_argument("--pretrain-per-class", type=int, default=60)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    spec = SyntheticSpec(
        n_train_per_cell=args.train_per_cell,
        n_test_per_cell=args.test_per_cell,
        replies_per_thread=args.replies_per_thread,
        pretrain_per_class=args.pretrain_per_class,
        seed=args.seed,
    )
    summary = materialize(spec, args.out_dir)
    print(json.dumps(summary, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
