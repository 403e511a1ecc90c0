"""Reference comparison protocol: semantics-aided network vs ablation.

Runs the full desk-scale experiment through the public command line
surfaces of both components: the map-construction tool generates the
train/test scenario files, this package trains both network variants over
several seeds, and the resulting loss curves and test RMSE figures decide
the three comparison criteria:

* benefit: semantics-aided test RMSE below the ablation's for most seeds,
* convergence: epochs to reach a shared loss threshold no greater with
  semantics than without, for most seeds (threshold per seed: the larger
  of the two final training losses, the level both curves reach),
* target-layer inference: the semantics-aided network beats the constant
  noise-floor predictor on the never-observed layer.

Training runs execute as subprocesses (optionally two at a time; the
convolutions scale poorly across cores, so two single-threaded workers
beat one two-threaded run).
"""

import json
import math
import os
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .container import read_scenarios

NOISE_FLOOR_DBM = -150.0


def _run(cmd, env_overrides=None):
    env = dict(os.environ)
    if env_overrides:
        env.update(env_overrides)
    proc = subprocess.run(cmd, capture_output=True, text=True, env=env)
    if proc.returncode != 0:
        raise RuntimeError(
            f"command failed ({proc.returncode}): {' '.join(cmd)}\n{proc.stderr}"
        )
    return proc.stdout


def generate_datasets(workdir, scenes_train=500, scenes_test=50, density=0.05):
    train_path = os.path.join(workdir, "train.bin")
    test_path = os.path.join(workdir, "test.bin")
    _run(["specmap", "generate", "--scenes", str(scenes_train),
          "--density", str(density), "--seed", "1000", "--out", train_path])
    _run(["specmap", "generate", "--scenes", str(scenes_test),
          "--density", str(density), "--seed", "2000", "--out", test_path])
    return train_path, test_path


def _train_and_eval(train_path, test_path, out_dir, use_semantics, seed,
                    epochs, base_width, single_thread):
    cmd = [sys.executable, "-m", "dsdtrainer.cli", "train",
           "--data", train_path, "--out-dir", out_dir,
           "--epochs", str(epochs), "--seed", str(seed),
           "--base-width", str(base_width)]
    if not use_semantics:
        cmd.append("--no-semantics")
    env = {"OMP_NUM_THREADS": "1", "MKL_NUM_THREADS": "1"} if single_thread else None
    _run(cmd, env)

    rows = open(os.path.join(out_dir, "loss.csv")).read().strip().splitlines()[1:]
    losses = [float(r.split(",")[1]) for r in rows]

    out = _run([sys.executable, "-m", "dsdtrainer.cli", "eval",
                "--checkpoint", os.path.join(out_dir, "model.pt"),
                "--data", test_path], env)
    report = dict(line.split("=") for line in out.strip().splitlines())
    return {
        "losses": losses,
        "overall_rmse_db": float(report["overall_rmse_db"]),
        "target_rmse_db": float(report["target_rmse_db"]),
        "checkpoint": os.path.join(out_dir, "model.pt"),
    }


def floor_predictor_target_rmse(test_path):
    """RMSE of always answering the noise floor on the target layer."""
    data = read_scenarios(test_path)
    sq = 0.0
    count = 0
    for sample in data.samples:
        err = sample.truth[:, :, data.target_index].astype(np.float64) - NOISE_FLOOR_DBM
        sq += (err ** 2).sum()
        count += err.size
    return float(np.sqrt(sq / count))


def epochs_to_reach(losses, threshold):
    for epoch, value in enumerate(losses, start=1):
        if value <= threshold:
            return epoch
    return math.inf


def run_protocol(workdir, seeds=(0, 1, 2), epochs=30, scenes_train=500,
                 scenes_test=50, density=0.05, base_width=64, jobs=2,
                 log=print):
    """Execute the complete comparison; returns the results dictionary."""
    os.makedirs(workdir, exist_ok=True)
    log(f"generating datasets ({scenes_train} train / {scenes_test} test, "
        f"density {density:.0%})")
    train_path, test_path = generate_datasets(workdir, scenes_train,
                                              scenes_test, density)

    tasks = []
    for seed in seeds:
        for use_semantics in (True, False):
            name = f"{'dsd' if use_semantics else 'ablation'}_seed{seed}"
            tasks.append((name, use_semantics, seed))

    results = {}
    single_thread = jobs > 1

    def execute(task):
        name, use_semantics, seed = task
        log(f"training {name} ({epochs} epochs)")
        out = _train_and_eval(
            train_path, test_path, os.path.join(workdir, name),
            use_semantics, seed, epochs, base_width, single_thread,
        )
        log(f"finished {name}: test overall {out['overall_rmse_db']:.3f} dB, "
            f"target {out['target_rmse_db']:.3f} dB, "
            f"final loss {out['losses'][-1]:.6f}")
        return name, out

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for name, out in pool.map(execute, tasks):
            results[name] = out

    results["floor_target_rmse_db"] = floor_predictor_target_rmse(test_path)
    results["meta"] = {
        "seeds": list(seeds), "epochs": epochs, "density": density,
        "scenes_train": scenes_train, "scenes_test": scenes_test,
        "base_width": base_width,
    }
    results["criteria"] = judge_criteria(results)
    return results


def judge_criteria(results):
    """Apply the three comparison criteria to a results dictionary."""
    seeds = results["meta"]["seeds"]
    benefit_wins = 0
    convergence_wins = 0
    target_wins = 0
    details = []
    for seed in seeds:
        dsd = results[f"dsd_seed{seed}"]
        abl = results[f"ablation_seed{seed}"]
        benefit = dsd["overall_rmse_db"] < abl["overall_rmse_db"]
        benefit_wins += benefit

        threshold = max(dsd["losses"][-1], abl["losses"][-1])
        e_dsd = epochs_to_reach(dsd["losses"], threshold)
        e_abl = epochs_to_reach(abl["losses"], threshold)
        convergence = e_dsd <= e_abl
        convergence_wins += convergence

        target = dsd["target_rmse_db"] < results["floor_target_rmse_db"]
        target_wins += target
        details.append({
            "seed": seed,
            "dsd_overall": dsd["overall_rmse_db"],
            "ablation_overall": abl["overall_rmse_db"],
            "benefit": benefit,
            "loss_threshold": threshold,
            "epochs_dsd": e_dsd,
            "epochs_ablation": e_abl,
            "convergence": convergence,
            "dsd_target": dsd["target_rmse_db"],
            "floor_target": results["floor_target_rmse_db"],
            "target_beats_floor": target,
        })
    majority = (len(seeds) // 2) + 1
    return {
        "details": details,
        "benefit_pass": benefit_wins >= majority,
        "convergence_pass": convergence_wins >= majority,
        "target_pass": target_wins >= majority,
        "benefit_wins": benefit_wins,
        "convergence_wins": convergence_wins,
        "target_wins": target_wins,
    }


def main(argv=None):
    import argparse

    parser = argparse.ArgumentParser(
        description="Run the full semantics-vs-ablation comparison protocol"
    )
    parser.add_argument("--workdir", required=True)
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--scenes-train", type=int, default=500)
    parser.add_argument("--scenes-test", type=int, default=50)
    parser.add_argument("--density", type=float, default=0.05)
    parser.add_argument("--base-width", type=int, default=64)
    parser.add_argument("--jobs", type=int, default=2)
    parser.add_argument("--out", default=None, help="results JSON path")
    args = parser.parse_args(argv)

    results = run_protocol(
        args.workdir, seeds=tuple(args.seeds), epochs=args.epochs,
        scenes_train=args.scenes_train, scenes_test=args.scenes_test,
        density=args.density, base_width=args.base_width, jobs=args.jobs,
    )
    out_path = args.out or os.path.join(args.workdir, "results.json")
    with open(out_path, "w") as fh:
        json.dump(results, fh, indent=2)
    crit = results["criteria"]
    print(f"\nresults written to {out_path}")
    print(f"[SECONDARY] semantics benefit: "
          f"{'PASS' if crit['benefit_pass'] else 'FAIL'} "
          f"({crit['benefit_wins']}/{len(results['meta']['seeds'])} seeds)")
    print(f"[SECONDARY] convergence ordering: "
          f"{'PASS' if crit['convergence_pass'] else 'FAIL'} "
          f"({crit['convergence_wins']}/{len(results['meta']['seeds'])} seeds)")
    print(f"[SECONDARY] target-layer inference beats floor: "
          f"{'PASS' if crit['target_pass'] else 'FAIL'} "
          f"({crit['target_wins']}/{len(results['meta']['seeds'])} seeds)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
