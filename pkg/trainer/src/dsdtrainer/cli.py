"""Command line front end for training and prediction."""

import argparse
import sys

from .model import TrainerConfig
from .train import evaluate_rmse, predict, train


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dsd-trainer",
        description="Train and run the spectrum map reconstruction network",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    tr = sub.add_parser("train", help="train on a scenario file")
    tr.add_argument("--data", required=True, help="scenario container file")
    tr.add_argument("--out-dir", required=True,
                    help="directory for checkpoint and loss curve CSV")
    tr.add_argument("--epochs", type=int, default=30)
    tr.add_argument("--batch-size", type=int, default=4)
    tr.add_argument("--learning-rate", type=float, default=3e-4)
    tr.add_argument("--lo", type=float, default=-150.0,
                    help="normalization lower bound in dBm")
    tr.add_argument("--hi", type=float, default=0.0,
                    help="normalization upper bound in dBm")
    tr.add_argument("--no-semantics", action="store_true",
                    help="ablation: observations only, no binary maps")
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--base-width", type=int, default=64)

    pr = sub.add_parser("predict", help="write a prediction file")
    pr.add_argument("--checkpoint", required=True)
    pr.add_argument("--data", required=True)
    pr.add_argument("--out", required=True)

    ev = sub.add_parser("eval", help="print test RMSE of a checkpoint")
    ev.add_argument("--checkpoint", required=True)
    ev.add_argument("--data", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.subcommand == "train":
            config = TrainerConfig(
                epochs=args.epochs,
                batch_size=args.batch_size,
                learning_rate=args.learning_rate,
                norm_lo_dbm=args.lo,
                norm_hi_dbm=args.hi,
                use_semantics=not args.no_semantics,
                seed=args.seed,
                base_width=args.base_width,
            )
            ckpt = train(args.data, config, args.out_dir)
            print(f"checkpoint written to {ckpt}")
        elif args.subcommand == "predict":
            count = predict(args.checkpoint, args.data, args.out)
            print(f"wrote {count} predictions to {args.out}")
        else:
            report = evaluate_rmse(args.checkpoint, args.data)
            print(f"overall_rmse_db={report['overall_rmse_db']:.4f}")
            print(f"target_rmse_db={report['target_rmse_db']:.4f}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
