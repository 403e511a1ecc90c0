"""Command line front end: generate, reconstruct, eval, render.

Every subcommand echoes its resolved configuration (one ``[manifest]``
line per value) so runs can be reproduced from their logs, writes output
files atomically, and exits non-zero with a single ``error: ...`` line on
any failure.
"""

import argparse
import os
import sys

import numpy as np

from .config import ExperimentConfig
from .dataset import (
    DatasetError,
    PredictionRecord,
    read_dataset,
    read_predictions,
    write_dataset,
    write_predictions,
    SCENARIO_MAGIC,
    PREDICTION_MAGIC,
)
from .metrics import MASK_POLICIES, aggregate_rmse, rmse
from .pipeline import METHODS, build_scenario, reconstruct_record
from .render import DEFAULT_HI_DBM, DEFAULT_LO_DBM, render_layer
from .scene import SceneConfig


class _Parser(argparse.ArgumentParser):
    """argparse with a machine-parsable single-line error prefix."""

    def error(self, message):
        self.exit(2, f"error: {message}\n")


class CliUsageError(ValueError):
    """Invalid flag combination or value; exits with status 2."""


class CliDataError(RuntimeError):
    """Input data problem discovered while running; exits with status 1."""


def _atomic_write(path: str, payload: bytes) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def _print_manifest(subcommand: str, values: dict) -> None:
    print(f"[manifest] subcommand={subcommand}")
    for key in values:
        print(f"[manifest] {key}={values[key]}")


def _load_config(path: str | None, broadband: bool) -> ExperimentConfig:
    config = ExperimentConfig.from_file(path) if path else ExperimentConfig()
    if broadband and not config.scene.broadband:
        scene_kwargs = {f: getattr(config.scene, f) for f in config.scene.__dataclass_fields__}
        scene_kwargs["broadband"] = True
        config = ExperimentConfig(
            scene=SceneConfig(**scene_kwargs),
            channel=config.channel,
            noise_sigma_db=config.noise_sigma_db,
        )
    return config


def _cmd_generate(args) -> int:
    if args.scenes < 1:
        raise CliUsageError("--scenes must be a positive integer")
    if not (0.0 < args.density <= 1.0):
        raise CliUsageError("--density must lie in (0, 1]")
    config = _load_config(args.config, args.broadband)
    manifest = {"scenes": args.scenes, "density": args.density, "seed": args.seed,
                "out": args.out, **config.describe()}
    _print_manifest("generate", manifest)

    records = [
        build_scenario(config, args.density, scene_id, args.seed)
        for scene_id in range(args.scenes)
    ]
    count = write_dataset(records, args.out)
    print(f"wrote {count} records to {args.out}")
    return 0


def _cmd_reconstruct(args) -> int:
    manifest = {"method": args.method, "in": getattr(args, "in"), "out": args.out,
                "power": args.power, "knn_k": args.knn_k,
                "neighborhood": args.neighborhood}
    _print_manifest("reconstruct", manifest)

    records = read_dataset(getattr(args, "in"))
    if not records:
        raise CliDataError("dataset holds no records")
    predictions = [
        PredictionRecord(
            scene_id=rec.scene_id,
            estimate_cube=reconstruct_record(
                rec, args.method,
                idw_power=args.power, knn_k=args.knn_k,
                kriging_neighborhood=args.neighborhood,
            ),
        )
        for rec in records
    ]
    first = records[0]
    count = write_predictions(predictions, args.out, first.n, len(first.frequencies_mhz))
    print(f"wrote {count} predictions to {args.out}")
    return 0


def _parse_pred_arg(raw: str) -> tuple[str, str]:
    if "=" in raw:
        label, path = raw.split("=", 1)
        return label, path
    stem = os.path.splitext(os.path.basename(raw))[0]
    return stem, raw


def _cmd_eval(args) -> int:
    preds = [_parse_pred_arg(p) for p in args.pred]
    manifest = {"truth": args.truth, "pred": ";".join(f"{l}={p}" for l, p in preds),
                "csv": args.csv, "mask": args.mask}
    _print_manifest("eval", manifest)

    truth_list = read_dataset(args.truth)
    truth_records = {rec.scene_id: rec for rec in truth_list}
    if len(truth_records) != len(truth_list):
        raise CliDataError("truth dataset contains duplicate scene_ids")
    if not truth_records:
        raise CliDataError("truth dataset holds no records")
    lines = ["scene_id,density,method,layer_freq_mhz,rmse_db,n_cells"]
    aggregate_lines = []
    for label, path in preds:
        prediction_map = {}
        for pred in read_predictions(path):
            if pred.scene_id not in truth_records:
                raise CliDataError(
                    f"prediction scene_id {pred.scene_id} in {path} "
                    "has no matching truth record"
                )
            prediction_map[pred.scene_id] = pred
        missing = sorted(set(truth_records) - set(prediction_map))
        if missing:
            raise CliDataError(
                f"{path} lacks predictions for scene_ids {missing[:10]}"
            )

        by_density: dict[float, list[tuple[int, float]]] = {}
        for scene_id in sorted(truth_records):
            truth = truth_records[scene_id]
            estimate = prediction_map[scene_id].estimate_cube
            report = rmse(
                estimate.astype(np.float64),
                truth.truth_cube.astype(np.float64),
                mask_policy=args.mask,
                buildings=truth.building_map,
            )
            n_layers = len(truth.frequencies_mhz)
            for k, freq in enumerate(truth.frequencies_mhz):
                lines.append(
                    f"{scene_id},{truth.density:.6g},{label},{freq:.6g},"
                    f"{report.per_layer_rmse_db[k]:.6f},{report.cells_per_layer}"
                )
            total_cells = report.cells_per_layer * n_layers
            lines.append(
                f"{scene_id},{truth.density:.6g},{label},overall,"
                f"{report.overall_rmse_db:.6f},{total_cells}"
            )
            by_density.setdefault(truth.density, []).append(
                (total_cells, report.overall_rmse_db)
            )
        for density in sorted(by_density):
            entries = by_density[density]
            total = sum(c for c, _ in entries)
            aggregate_lines.append(
                f"aggregate,{density:.6g},{label},overall,"
                f"{aggregate_rmse(entries):.6f},{total}"
            )

    payload = "\n".join(lines + aggregate_lines) + "\n"
    _atomic_write(args.csv, payload.encode("ascii"))
    print(f"wrote {len(lines) + len(aggregate_lines) - 1} rows to {args.csv}")
    return 0


def _sniff_magic(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read(4)


def _cmd_render(args) -> int:
    manifest = {"in": getattr(args, "in"), "scene": args.scene, "freq": args.freq,
                "layer": args.layer, "cube": args.cube, "lo": args.lo, "hi": args.hi,
                "out": args.out}
    _print_manifest("render", manifest)

    path = getattr(args, "in")
    magic = _sniff_magic(path)
    if magic == SCENARIO_MAGIC:
        records = {rec.scene_id: rec for rec in read_dataset(path)}
        if args.scene not in records:
            raise CliDataError(
                f"scene {args.scene} not in dataset "
                f"(available: {sorted(records)[:10]})"
            )
        record = records[args.scene]
        freqs = record.frequencies_mhz
        layer_index = _resolve_layer(args, freqs)
        cube = record.truth_cube if args.cube == "truth" else record.observed_cube
        layer = cube[:, :, layer_index]
    elif magic == PREDICTION_MAGIC:
        records = {rec.scene_id: rec for rec in read_predictions(path)}
        if args.scene not in records:
            raise CliDataError(
                f"scene {args.scene} not in predictions "
                f"(available: {sorted(records)[:10]})"
            )
        if args.freq is not None:
            raise CliUsageError(
                "prediction files store no frequency list; select with --layer"
            )
        cube = records[args.scene].estimate_cube
        layer_index = _resolve_layer(args, tuple(range(cube.shape[2])))
        layer = cube[:, :, layer_index]
    else:
        raise CliDataError(f"unrecognized file magic {magic!r} in {path}")

    _atomic_write(args.out, render_layer(layer, lo=args.lo, hi=args.hi))
    print(f"wrote {args.out}")
    return 0


def _resolve_layer(args, freqs) -> int:
    if (args.freq is None) == (args.layer is None):
        raise CliUsageError("select the layer with exactly one of --freq or --layer")
    if args.layer is not None:
        if not (0 <= args.layer < len(freqs)):
            raise CliDataError(
                f"layer {args.layer} out of range (0..{len(freqs) - 1})"
            )
        return args.layer
    matches = [k for k, f in enumerate(freqs) if f == args.freq]
    if not matches:
        raise CliDataError(
            f"frequency {args.freq:.6g} MHz not in dataset "
            f"(available: {', '.join(f'{f:.6g}' for f in freqs)})"
        )
    return matches[0]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specmap",
                     description="Synthetic spectrum map experiment pipeline")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    gen = sub.add_parser("generate", help="generate a scenario dataset")
    gen.add_argument("--scenes", type=int, default=500)
    gen.add_argument("--density", type=float, default=0.2)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--config", default=None, help="key=value config file")
    gen.add_argument("--broadband", action="store_true",
                     help="every transmitter emits on all frequencies")
    gen.set_defaults(func=_cmd_generate)

    rec = sub.add_parser("reconstruct", help="reconstruct cubes from a dataset")
    rec.add_argument("--method", required=True, choices=METHODS)
    rec.add_argument("--in", required=True)
    rec.add_argument("--out", required=True)
    rec.add_argument("--power", type=float, default=2.0, help="IDW exponent")
    rec.add_argument("--knn-k", type=int, default=5, help="KNN neighbor count")
    rec.add_argument("--neighborhood", type=int, default=32,
                     help="kriging neighborhood size")
    rec.set_defaults(func=_cmd_reconstruct)

    ev = sub.add_parser("eval", help="RMSE report joining truth and predictions")
    ev.add_argument("--truth", required=True)
    ev.add_argument("--pred", action="append", required=True,
                    metavar="LABEL=PATH", help="repeatable labeled prediction file")
    ev.add_argument("--csv", required=True)
    ev.add_argument("--mask", choices=MASK_POLICIES, default="all_cells")
    ev.set_defaults(func=_cmd_eval)

    ren = sub.add_parser("render", help="render one layer to grayscale PGM")
    ren.add_argument("--in", required=True, help="dataset or prediction file")
    ren.add_argument("--scene", type=int, required=True)
    ren.add_argument("--freq", type=float, default=None, help="layer frequency in MHz")
    ren.add_argument("--layer", type=int, default=None, help="layer index")
    ren.add_argument("--cube", choices=("truth", "observed"), default="truth")
    ren.add_argument("--lo", type=float, default=DEFAULT_LO_DBM)
    ren.add_argument("--hi", type=float, default=DEFAULT_HI_DBM)
    ren.add_argument("--out", required=True)
    ren.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliUsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CliDataError, DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
