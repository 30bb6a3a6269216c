"""Synthetic replication of the evaluation protocol across feature sets and architectures.

For each seed: 226 synthetic runs -> balanced pool of 225 -> 150 train / 75 test,
then every (feature set, architecture) pair is trained and scored. Prints mean and
minimum test hit ratio next to the Bayes accuracy of the matching feature view.

    python scripts/run_protocol.py --seeds 5 --noise 1.0
"""

import argparse
import time

import numpy as np

from satpredict import (
    FeatureSetSpec,
    GeneratorParams,
    TrainConfig,
    bayes_accuracy,
    build_balanced,
    build_model,
    evaluate,
    generate_corpus,
    label_run,
    split,
    train,
)


def run(seed, spec, arch, params, epochs):
    traces, _ = generate_corpus(113, params, seed=seed)
    labels = [label_run(t, params.time_limit) for t in traces]
    pool = build_balanced(traces, labels, spec, seed=seed, total=225)
    train_ds, test_ds = split(pool, 1 / 3, seed=seed)
    tm = train(build_model(arch, spec.length, seed=seed), train_ds, TrainConfig(epochs=epochs, seed=seed))
    return evaluate(tm, test_ds)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--noise", type=float, default=1.0)
    ap.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    ap.add_argument("--n-mc", type=int, default=100000)
    args = ap.parse_args()

    params = GeneratorParams(noise_scale=args.noise).validate()
    t0 = time.perf_counter()
    print(f"noise_scale={args.noise} seeds={args.seeds} epochs={args.epochs}")
    print(f"{'set':<5} {'arch':<4} {'oracle':>7} {'hit_mean':>9} {'hit_min':>8} {'train_acc':>10}")
    for set_id in ("set1", "set2"):
        spec = FeatureSetSpec(set_id, 2)
        oracle, _ = bayes_accuracy(params, args.n_mc, seed=0, features=spec)
        for arch in ("A", "B", "C"):
            reps = [run(s, spec, arch, params, args.epochs) for s in range(args.seeds)]
            hits = np.array([r.hit_ratio for r in reps])
            tr = np.mean([r.training_accuracy for r in reps])
            print(f"{set_id:<5} {arch:<4} {oracle:7.4f} {hits.mean():9.4f} {hits.min():8.4f} {tr:10.4f}")
    print(f"elapsed {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
