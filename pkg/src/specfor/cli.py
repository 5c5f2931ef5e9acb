"""Command-line front end.

Exit codes: 0 ok, 2 input error, 3 flag error, 4 missing profiles.
``SPECFOR_THREADS`` caps batch parallelism.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .detector import anomaly_score, classify, enroll, load_profiles, save_profile
from .errors import (
    BadKernelError,
    BadWindowError,
    ForensicsError,
    ImageLoadError,
    NoProfilesError,
)
from .image import center_crop_even_square, load_image, to_grayscale
from .report import (
    AnalysisParams,
    analyze_image,
    write_renders,
    write_report,
)
from .spectrum import fingerprint

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_FLAGS = 3
EXIT_NO_PROFILES = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; the contract wants 3
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_FLAGS)


def _add_param_flags(sub):
    sub.add_argument("--k", type=int, default=3, help="median window (odd)")
    sub.add_argument("--tau", type=float, default=4.0, help="peak prominence threshold")
    sub.add_argument("--ela-quality", type=int, default=90)
    sub.add_argument("--ela-gain", type=float, default=20.0)
    sub.add_argument("--block", type=int, default=16, help="clone block size")
    sub.add_argument("--stride", type=int, default=8, help="clone scan stride")
    sub.add_argument("--sim", type=float, default=0.95, help="clone similarity threshold")
    sub.add_argument("--min-shift", type=int, default=16, help="minimum clone offset")
    sub.add_argument("--corr-window", type=int, default=7)
    sub.add_argument("--lap8", action="store_true",
                     help="use the 8-neighbor Laplacian stencil")


def _params_from(args) -> AnalysisParams:
    return AnalysisParams(
        k=args.k, tau=args.tau,
        ela_quality=args.ela_quality, ela_gain=args.ela_gain,
        block=args.block, stride=args.stride,
        sim_threshold=args.sim, min_shift=args.min_shift,
        corr_window=args.corr_window, eight_connected=args.lap8,
    )


def _check_params(parser, args) -> None:
    if args.k < 1 or args.k % 2 == 0:
        parser.error(f"--k must be odd and >= 1, got {args.k}")
    if args.tau <= 1:
        parser.error(f"--tau must be > 1, got {args.tau}")
    if not 1 <= args.ela_quality <= 100:
        parser.error(f"--ela-quality must be in [1, 100], got {args.ela_quality}")
    if args.ela_gain <= 0:
        parser.error(f"--ela-gain must be > 0, got {args.ela_gain}")
    if args.block < 8:
        parser.error(f"--block must be >= 8, got {args.block}")
    if args.stride < 1:
        parser.error(f"--stride must be >= 1, got {args.stride}")
    if not 0.0 <= args.sim <= 1.0:
        parser.error(f"--sim must be in [0, 1], got {args.sim}")
    if args.min_shift < 0:
        parser.error(f"--min-shift must be >= 0, got {args.min_shift}")
    if args.corr_window < 3 or args.corr_window % 2 == 0:
        parser.error(f"--corr-window must be odd and >= 3, got {args.corr_window}")


def _log_line(out_dir: Path, message: str) -> None:
    # timestamps live here, never in report.json
    out_dir.mkdir(parents=True, exist_ok=True)
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    with open(out_dir / "analysis.log", "a", encoding="utf-8") as fh:
        fh.write(f"{stamp} {message}\n")


def _load_profiles_or_none(directory):
    if directory is None:
        return None
    return load_profiles(directory)


def _cmd_analyze(args, parser) -> int:
    params = _params_from(args)
    out_dir = Path(args.out)
    try:
        profiles = _load_profiles_or_none(args.profiles)
    except NoProfilesError as exc:
        print(f"specfor analyze: {exc}", file=sys.stderr)
        return EXIT_NO_PROFILES

    try:
        result = analyze_image(args.image, params, profiles)
    except ImageLoadError as exc:
        print(f"specfor analyze: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BadWindowError, BadKernelError) as exc:
        print(f"specfor analyze: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except ForensicsError as exc:
        print(f"specfor analyze: {exc}", file=sys.stderr)
        return EXIT_INPUT

    report_path = write_report(result.report, out_dir)
    if args.render:
        write_renders(result, out_dir)
    _log_line(out_dir, f"analyze {args.image} -> {report_path}")
    return EXIT_OK


def _iter_images(directory: Path):
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
    )


def _cmd_enroll(args, parser) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        print(f"specfor enroll: {directory} is not a directory", file=sys.stderr)
        return EXIT_INPUT

    fps = []
    for path in _iter_images(directory):
        try:
            gray = center_crop_even_square(to_grayscale(load_image(path)))
            fps.append(fingerprint(gray, args.k))
        except ForensicsError as exc:
            print(f"specfor enroll: skipping {path.name}: {exc}", file=sys.stderr)
    if not fps:
        print(f"specfor enroll: no usable images in {directory}", file=sys.stderr)
        return EXIT_INPUT

    profile = enroll(args.label, fps)
    path = save_profile(profile, args.profiles)
    print(f"enrolled {profile.count} images as {profile.label!r} -> {path}")
    return EXIT_OK


def _cmd_classify(args, parser) -> int:
    try:
        profiles = load_profiles(args.profiles)
    except NoProfilesError as exc:
        print(f"specfor classify: {exc}", file=sys.stderr)
        return EXIT_NO_PROFILES

    try:
        gray = center_crop_even_square(to_grayscale(load_image(args.image)))
        fp = fingerprint(gray, args.k)
    except ForensicsError as exc:
        print(f"specfor classify: {exc}", file=sys.stderr)
        return EXIT_INPUT

    cls = classify(fp, profiles)
    payload = {
        "label": cls.label,
        "scores": {lbl: float(s) for lbl, s in cls.scores.items()},
        "margin": float(cls.margin),
    }
    real = next((p for p in profiles if p.label == "real"), None)
    if real is not None:
        payload["anomaly"] = float(anomaly_score(fp, real))
    print(json.dumps(payload, sort_keys=True, indent=2))
    return EXIT_OK


def _cmd_batch(args, parser) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        print(f"specfor batch: {directory} is not a directory", file=sys.stderr)
        return EXIT_INPUT
    images = _iter_images(directory)
    if not images:
        print(f"specfor batch: no images in {directory}", file=sys.stderr)
        return EXIT_INPUT

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = AnalysisParams()

    env_threads = os.environ.get("SPECFOR_THREADS", "")
    try:
        max_workers = max(1, int(env_threads)) if env_threads else min(len(images), os.cpu_count() or 1)
    except ValueError:
        print(f"specfor batch: ignoring bad SPECFOR_THREADS={env_threads!r}", file=sys.stderr)
        max_workers = min(len(images), os.cpu_count() or 1)

    def run_one(path: Path):
        try:
            result = analyze_image(path, params, None)
            sub = out_dir / path.name
            write_report(result.report, sub)
            return path, str(Path(path.name) / "report.json"), None
        except ForensicsError as exc:
            return path, None, str(exc)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        outcomes = list(pool.map(run_one, images))

    # summary index written once, single-threaded, in lexicographic order
    index = {
        "images": [
            {"path": str(path), "report": rel, "error": err}
            for path, rel, err in outcomes
        ]
    }
    (out_dir / "index.json").write_bytes(
        (json.dumps(index, sort_keys=True, indent=2) + "\n").encode("utf-8")
    )
    _log_line(out_dir, f"batch {directory} ({len(images)} images)")
    succeeded = sum(1 for _, rel, _ in outcomes if rel is not None)
    for path, _, err in outcomes:
        if err is not None:
            print(f"specfor batch: {path.name}: {err}", file=sys.stderr)
    return EXIT_OK if succeeded else EXIT_INPUT


def build_parser() -> _Parser:
    parser = _Parser(prog="specfor",
                     description="Spectral and classical image forensics")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_analyze = sub.add_parser("analyze", help="analyze one image")
    p_analyze.add_argument("image")
    p_analyze.add_argument("--out", required=True, help="output directory")
    p_analyze.add_argument("--render", action="store_true",
                           help="write stage/spectrum PNGs")
    p_analyze.add_argument("--profiles", default=None,
                           help="profile directory for classification")
    _add_param_flags(p_analyze)

    p_enroll = sub.add_parser("enroll", help="enroll a directory as one source profile")
    p_enroll.add_argument("label")
    p_enroll.add_argument("directory")
    p_enroll.add_argument("--profiles", required=True)
    p_enroll.add_argument("--k", type=int, default=3)

    p_classify = sub.add_parser("classify", help="classify one image against profiles")
    p_classify.add_argument("image")
    p_classify.add_argument("--profiles", required=True)
    p_classify.add_argument("--k", type=int, default=3)

    p_batch = sub.add_parser("batch", help="analyze every image in a directory")
    p_batch.add_argument("directory")
    p_batch.add_argument("--out", required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "k") and (args.k < 1 or args.k % 2 == 0):
        parser.error(f"--k must be odd and >= 1, got {args.k}")
    if args.command == "analyze":
        _check_params(parser, args)
        return _cmd_analyze(args, parser)
    if args.command == "enroll":
        return _cmd_enroll(args, parser)
    if args.command == "classify":
        return _cmd_classify(args, parser)
    return _cmd_batch(args, parser)


if __name__ == "__main__":
    sys.exit(main())
