"""Command-line interface: ``fadewm <verb> ...``.

Exit codes: 0 success, 1 partial batch failure, 2 usage or parameter error,
3 I/O or file format error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import attacks as atk
from .errors import FormatError, ParameterError, PrecisionMismatch, WatermarkError
from .fading import CarrierMode, collapse_logo, embed, extract, validate_params
from .harness import (
    SAMPLE_PREFIX,
    ExperimentManifest,
    default_sample_refs,
    export_samples,
    fade_sweep,
    fidelity_table,
    load_ref,
    prepare_pair,
    run_evaluation,
    table_csv,
    table_text,
    write_results,
)
from .imageio import FORMATS, format_from_path, write_image
from .metrics import report
from .oracle import build_error_table, exactness_fraction, table_to_csv
from .raster import quantize

log = logging.getLogger("fadewm")

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _existing(ref: str) -> str:
    if not ref.startswith(SAMPLE_PREFIX) and not Path(ref).is_file():
        raise UsageError(f"no such file: {ref}")
    return ref


def _out_format(path, fmt):
    if fmt:
        return fmt
    try:
        return format_from_path(path)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _print_json(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_embed(args) -> int:
    params = validate_params(args.alpha1)
    carrier = CarrierMode(args.carrier)
    cover, logo = prepare_pair(load_ref(_existing(args.cover)), load_ref(_existing(args.logo)),
                               args.gray, args.resize_logo)
    fmt = _out_format(args.out, args.format)
    if (carrier is CarrierMode.EXACT) != (fmt == "fwm"):
        raise UsageError("the exact carrier is written as .fwm; 8-bit carriers as bmp/pgm/ppm")
    h = embed(cover, logo, params, carrier)
    write_image(args.out, h, fmt)
    _print_json(report(cover, quantize(h)).to_json_dict())
    return EXIT_OK


def cmd_extract(args) -> int:
    params = validate_params(args.alpha1)
    watermarked = load_ref(_existing(args.watermarked))
    cover = load_ref(_existing(args.cover))
    reference = load_ref(_existing(args.reference)) if args.reference else None
    if args.gray:
        from .raster import to_gray
        cover = to_gray(cover)
    g = extract(watermarked, cover, params)
    if args.logo_plane != "all" or (reference is not None and reference.channels == 1):
        g = collapse_logo(g, "first" if args.logo_plane == "all" else args.logo_plane)
    fmt = _out_format(args.out, args.format)
    if fmt == "fwm":
        raise UsageError("extracted logos are 8-bit; choose bmp, pgm or ppm")
    write_image(args.out, g, fmt)
    if reference is not None:
        _print_json(report(reference, g).to_json_dict())
    return EXIT_OK


def _parse_attack(text: str):
    presets = dict(atk.standard_suite())
    if text in presets:
        return presets[text]
    try:
        d = json.loads(text)
    except json.JSONDecodeError:
        raise UsageError(f"attack must be a preset ({', '.join(presets)}) or a JSON object") from None
    return atk.spec_from_dict(d)


def cmd_attack(args) -> int:
    img = load_ref(_existing(args.image))
    spec = atk.with_seed(_parse_attack(args.attack), args.seed)
    out = atk.apply_attack(img, spec)
    if args.realign:
        out = atk.realign(out, spec, img.dims)
    write_image(args.out, out, _out_format(args.out, args.format))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    manifest_path = Path(_existing(args.manifest))
    try:
        manifest = ExperimentManifest.load(manifest_path)
    except json.JSONDecodeError as exc:
        raise UsageError(f"manifest is not valid JSON: {exc}") from None
    for ref in manifest.covers + manifest.logos:
        p = Path(ref)
        if not ref.startswith(SAMPLE_PREFIX) and not (p if p.is_absolute() else manifest.base_dir / p).is_file():
            raise UsageError(f"manifest references missing file {ref}")
    if args.out:
        manifest.output_dir = Path(args.out)
    if args.seed is not None:
        manifest.master_seed = args.seed
    if args.no_realign:
        manifest.realign = False
    rows = run_evaluation(manifest)
    write_results(manifest, rows)
    ok = sum(1 for r in rows if not r.error)
    log.info("%d of %d cells succeeded; results in %s", ok, len(rows), manifest.output_dir)
    return EXIT_OK if ok else EXIT_PARTIAL


def cmd_table(args) -> int:
    covers = args.covers or default_sample_refs()[0]
    logos = args.logos or default_sample_refs()[1]
    for ref in covers + logos:
        _existing(ref)
    table = fidelity_table(covers, logos, args.alpha1, CarrierMode(args.carrier), args.gray, args.resize_logo)
    csv_text = table_csv(table)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "table.csv").write_text(csv_text)
        (out / "table.txt").write_text(table_text(table))
    sys.stdout.write(table_text(table))
    return EXIT_OK


def cmd_fadesweep(args) -> int:
    cover, logo = prepare_pair(load_ref(_existing(args.cover)), load_ref(_existing(args.logo)),
                               args.gray, args.resize_logo)
    fmt = args.format or "bmp"
    if fmt == "fwm":
        raise UsageError("blends are written as 8-bit images")
    if fmt == "pgm" and cover.channels != 1:
        raise UsageError("PGM output needs grayscale input; pass --gray")
    rows = fade_sweep(cover, logo, args.out, fmt)
    for r in rows:
        print(f"{r['alpha1']:.2f}/{r['alpha2']:.2f}  mse={r['mse']:.4f}  mse_q8={r['mse_q8']:.4f}  {r['file']}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    table = build_error_table(validate_params(args.alpha1))
    Path(args.out).write_text(table_to_csv(table))
    print(f"exactness_fraction {exactness_fraction(table):.10f}")
    return EXIT_OK


def cmd_samples(args) -> int:
    for path in export_samples(args.out, args.format or "bmp", args.size, args.rgb):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha1", type=float, default=0.99, help="cover weight (default 0.99)")
    common.add_argument("--format", choices=FORMATS, help="output format (default: from extension)")
    common.add_argument("--gray", action="store_true", help="convert inputs to luma first")
    common.add_argument("--resize-logo", action="store_true", help="resize the logo to the cover size")
    common.add_argument("-v", "--verbose", action="store_true")

    carrier = argparse.ArgumentParser(add_help=False)
    carrier.add_argument("--carrier", choices=[m.value for m in CarrierMode], default="exact",
                         help="exact: keep full precision (.fwm); q8: round to 8 bits")

    p = argparse.ArgumentParser(prog="fadewm", description="Fade-blend image watermarking toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("embed", parents=[common, carrier], help="embed a logo into a cover")
    s.add_argument("cover")
    s.add_argument("logo")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("extract", parents=[common], help="extract a logo using the cover")
    s.add_argument("watermarked")
    s.add_argument("cover")
    s.add_argument("--out", required=True)
    s.add_argument("--reference", help="original logo; prints fidelity metrics")
    s.add_argument("--logo-plane", choices=["all", "first", "mean"], default="all")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("attack", parents=[common], help="apply one attack to an image")
    s.add_argument("image")
    s.add_argument("attack", help="preset name or JSON object with a 'type' key")
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--realign", action="store_true", help="undo geometric attacks afterwards")
    s.set_defaults(func=cmd_attack)

    s = sub.add_parser("evaluate", parents=[common], help="run a JSON experiment manifest")
    s.add_argument("manifest")
    s.add_argument("--out", help="override the manifest output_dir")
    s.add_argument("--seed", type=int, help="override the manifest master_seed")
    s.add_argument("--no-realign", action="store_true")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("table", parents=[common, carrier], help="fidelity table for covers x logos")
    s.add_argument("--covers", nargs="+", help="cover files (default: built-in samples)")
    s.add_argument("--logos", nargs="+", help="logo files (default: built-in samples)")
    s.add_argument("--out", help="directory for table.csv and table.txt")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("fadesweep", parents=[common], help="blend at each ratio of the alpha ladder")
    s.add_argument("cover")
    s.add_argument("logo")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_fadesweep)

    s = sub.add_parser("oracle", parents=[common], help="write the 8-bit extraction error table")
    s.add_argument("--out", required=True, help="CSV path")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("samples", parents=[common], help="write the procedural test images")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--size", type=int, default=256)
    s.add_argument("--rgb", action="store_true")
    s.set_defaults(func=cmd_samples)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ParameterError, PrecisionMismatch) as exc:
        print(f"fadewm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, OSError) as exc:
        print(f"fadewm: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except WatermarkError as exc:
        print(f"fadewm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"fadewm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
