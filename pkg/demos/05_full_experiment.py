"""A complete experiment: synthetic dataset, collection, calibration, report.

Equivalent CLI session:

    swapjudge simulate-dataset --component 0.99,0.99,0.5 \
        --component 0.99,0.40,0.3 --component 0.98,0.02,0.2 \
        --size 400 --seed 21 --out /tmp/demo/data.jsonl
    swapjudge run --dataset /tmp/demo/data.jsonl --out /tmp/demo/run \
        --seed 33 --sim-confidence 0.5,0.5,0
    swapjudge replay --dataset /tmp/demo/data.jsonl --out /tmp/demo/run \
        --seed 33 --sim-confidence 0.5,0.5,0
"""

import tempfile
from pathlib import Path

from swapjudge import (
    MixtureComponent,
    RunConfig,
    run_experiment,
    simulate_dataset,
    write_dataset,
)

with tempfile.TemporaryDirectory() as tmp:
    workdir = Path(tmp)
    dataset = workdir / "data.jsonl"

    # Half the population is easy (both orderings agree), a third has one
    # stable ordering, and a fifth is contradictory with no right answer.
    components = [
        MixtureComponent(q1=0.99, q2=0.99, weight=0.5),
        MixtureComponent(q1=0.99, q2=0.40, weight=0.3),
        MixtureComponent(q1=0.98, q2=0.02, weight=0.2),
    ]
    write_dataset(simulate_dataset(components, size=400, seed=21), dataset)

    config = RunConfig(
        dataset=str(dataset),
        out_dir=str(workdir / "run"),
        seed=33,
        sim_confidence=(0.5, 0.5, 0.0),  # noiseless affine confidence model
    )
    report = run_experiment(config)

    print(f"instances: {report.n_instances} "
          f"({report.n_calibration} calibration, {report.n_evaluation} evaluation)")
    print(f"bias: pc={report.pc_ratio:.3f} primacy={report.primacy_ratio:.3f} "
          f"recency={report.recency_ratio:.3f} ambiguous={report.ambiguous_ratio:.3f}")
    print(f"observation violation rate: {report.violation_rate:.4f}")
    print()
    # avg calls counts what the policy itself issued; the +calibration column
    # adds the one-off gap-model training cost amortized over evaluation
    # instances (only the confidence-based policy pays it).
    header = (f"{'policy':>18} {'accuracy':>9} {'normalized':>11} "
              f"{'avg calls':>10} {'+calibration':>13} {'ties':>6}")
    print(header)
    for name in ("swap_once", "confidence_based", "early_stopping", "static_consensus"):
        m = report.policies[name]
        print(f"{name:>18} {m.accuracy:9.4f} {m.normalized_accuracy:11.4f} "
              f"{m.avg_calls_raw:10.3f} {m.avg_calls:13.3f} {m.tie_rate:6.3f}")
    print()
    print("artifacts written next to the transcripts:")
    for artifact in sorted(Path(config.out_dir).iterdir()):
        print("  ", artifact.name)
