"""Batch experiments: robustness evaluation, fidelity tables and alpha sweeps."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import attacks as atk
from .errors import DimensionMismatch, ParameterError, WatermarkError
from .fading import ALPHA_LADDER, CarrierMode, collapse_logo, embed, extract, validate_params
from .geometry import Interp, resize
from .imageio import read_image, write_image
from .metrics import MetricsReport, format_psnr, mse, psnr, report
from .prng import cell_seed
from .raster import Precision, RasterImage, quantize, to_gray
from .samples import COVER_NAMES, LOGO_NAMES, make_cover, make_logo

log = logging.getLogger(__name__)

SAMPLE_PREFIX = "sample:"
RESULT_COLUMNS = ("cover", "logo", "stage", "attack", "mse", "psnr_db", "ssim", "error")


def image_id(ref: str) -> str:
    if ref.startswith(SAMPLE_PREFIX):
        return ref[len(SAMPLE_PREFIX):]
    return Path(ref).stem


def load_ref(ref: str, base_dir: Path | None = None) -> RasterImage:
    """Load a file path or a ``sample:<name>`` procedural image."""
    if ref.startswith(SAMPLE_PREFIX):
        name = ref[len(SAMPLE_PREFIX):]
        if name in LOGO_NAMES:
            return make_logo(name)
        return make_cover(name)
    path = Path(ref)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    return read_image(path)


def prepare_pair(cover: RasterImage, logo: RasterImage, gray: bool = False, resize_logo: bool = False):
    if gray:
        cover, logo = to_gray(cover), to_gray(logo)
    if cover.dims != logo.dims:
        if not resize_logo:
            raise DimensionMismatch(
                f"dimension mismatch: cover is {cover.width}x{cover.height}, logo is {logo.width}x{logo.height}"
            )
        logo = quantize(resize(logo, cover.width, cover.height, Interp.BILINEAR))
    return cover, logo


def _logo_view(extracted: RasterImage, logo: RasterImage, how: str = "first") -> RasterImage:
    if logo.channels == 1 and extracted.channels > 1:
        return collapse_logo(extracted, how)
    return extracted


@dataclass
class ResultRow:
    cover: str
    logo: str
    stage: str
    attack: str = "none"
    metrics: MetricsReport | None = None
    error: str = ""

    def as_record(self) -> dict:
        m = self.metrics
        return {
            "cover": self.cover,
            "logo": self.logo,
            "stage": self.stage,
            "attack": self.attack,
            "mse": None if m is None else m.mse,
            "psnr_db": None if m is None else format_psnr(m.psnr_db),
            "ssim": None if m is None else m.ssim,
            "error": self.error,
        }


@dataclass
class ExperimentManifest:
    covers: list
    logos: list
    alpha1: float = 0.99
    carrier: CarrierMode = CarrierMode.EXACT
    attacks: list = field(default_factory=list)  # (attack_id, spec) pairs
    master_seed: int = 0
    output_dir: Path = Path("results")
    gray: bool = False
    realign: bool = True
    logo_plane: str = "first"
    base_dir: Path | None = None

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path | None = None) -> "ExperimentManifest":
        covers, logos = list(d.get("covers") or []), list(d.get("logos") or [])
        if not covers or not logos:
            raise ParameterError("manifest needs non-empty 'covers' and 'logos' lists")
        raw_attacks = d.get("attacks", [])
        if raw_attacks == "standard":
            attack_list = atk.standard_suite()
        else:
            attack_list = []
            for i, a in enumerate(raw_attacks):
                if isinstance(a, str):
                    presets = dict(atk.standard_suite())
                    if a not in presets:
                        raise ParameterError(f"unknown attack preset {a!r}")
                    attack_list.append((a, presets[a]))
                else:
                    attack_list.append((a.get("id") or f"{a.get('type')}_{i}", atk.spec_from_dict(a)))
        ids = [a for a, _ in attack_list]
        if len(set(ids)) != len(ids):
            raise ParameterError("attack ids must be unique")
        validate_params(d.get("alpha1", 0.99))
        out = Path(d.get("output_dir", "results"))
        if base_dir is not None and not out.is_absolute():
            out = base_dir / out
        return cls(
            covers=covers,
            logos=logos,
            alpha1=float(d.get("alpha1", 0.99)),
            carrier=CarrierMode(d.get("carrier", "exact")),
            attacks=attack_list,
            master_seed=int(d.get("master_seed", 0)),
            output_dir=out,
            gray=bool(d.get("gray", False)),
            realign=bool(d.get("realign", True)),
            logo_plane=d.get("logo_plane", "first"),
            base_dir=base_dir,
        )

    @classmethod
    def load(cls, path) -> "ExperimentManifest":
        path = Path(path)
        with open(path) as fh:
            return cls.from_dict(json.load(fh), base_dir=path.parent)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for row in rows:
        rec = row.as_record()
        writer.writerow([_fmt(rec[c]) for c in RESULT_COLUMNS])
    return buf.getvalue()


def evaluate_pair(manifest: ExperimentManifest, cover_ref: str, logo_ref: str) -> list[ResultRow]:
    cid, lid = image_id(cover_ref), image_id(logo_ref)
    params = validate_params(manifest.alpha1)
    try:
        cover, logo = prepare_pair(
            load_ref(cover_ref, manifest.base_dir), load_ref(logo_ref, manifest.base_dir), manifest.gray
        )
        watermarked = embed(cover, logo, params, manifest.carrier)
    except (WatermarkError, OSError) as exc:
        stages = [("watermarked", "none"), ("extracted", "none")]
        stages += [("extracted_after_attack", a) for a, _ in manifest.attacks]
        return [ResultRow(cid, lid, s, a, error=f"{type(exc).__name__}: {exc}") for s, a in stages]

    rows = [
        ResultRow(cid, lid, "watermarked", metrics=report(cover, quantize(watermarked))),
        ResultRow(cid, lid, "extracted",
                  metrics=report(logo, _logo_view(extract(watermarked, cover, params), logo, manifest.logo_plane))),
    ]
    for attack_id, spec in manifest.attacks:
        spec = atk.with_seed(spec, cell_seed(manifest.master_seed, cid, lid, attack_id))
        try:
            attacked = atk.apply_attack(watermarked, spec)
            if manifest.realign:
                attacked = atk.realign(attacked, spec, cover.dims)
            recovered = _logo_view(extract(attacked, cover, params), logo, manifest.logo_plane)
            rows.append(ResultRow(cid, lid, "extracted_after_attack", attack_id, report(logo, recovered)))
        except WatermarkError as exc:
            rows.append(ResultRow(cid, lid, "extracted_after_attack", attack_id,
                                  error=f"{type(exc).__name__}: {exc}"))
    return rows


def run_evaluation(manifest: ExperimentManifest) -> list[ResultRow]:
    rows = []
    for cover_ref in manifest.covers:
        for logo_ref in manifest.logos:
            log.info("evaluating %s x %s", cover_ref, logo_ref)
            rows.extend(evaluate_pair(manifest, cover_ref, logo_ref))
    return rows


def write_results(manifest: ExperimentManifest, rows) -> None:
    out = Path(manifest.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(rows_to_csv(rows))
    doc = {
        "config": {
            "alpha1": manifest.alpha1,
            "carrier": manifest.carrier.value,
            "color": "luma" if manifest.gray else "native",
            "realign": manifest.realign,
            "logo_plane": manifest.logo_plane,
            "master_seed": manifest.master_seed,
            "attacks": [{"id": a, **atk.spec_to_dict(s)} for a, s in manifest.attacks],
        },
        "rows": [r.as_record() for r in rows],
    }
    (out / "results.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# -- fidelity table -----------------------------------------------------------------

def _pretty(name: str) -> str:
    return {"logow": "LogoW", "logo1": "Logo1"}.get(name, name[:1].upper() + name[1:])


def fidelity_table(covers, logos, alpha1=0.99, carrier=CarrierMode.EXACT, gray=False, resize_logo=False):
    """Rows ordered per cover: every watermarked pair, then every extraction."""
    params = validate_params(alpha1)
    loaded_logos = [(image_id(l), load_ref(l)) for l in logos]
    table = []
    for cover_ref in covers:
        cid = image_id(cover_ref)
        cover_img = load_ref(cover_ref)
        marked, pulled = [], []
        for lid, logo_img in loaded_logos:
            cover, logo = prepare_pair(cover_img, logo_img, gray, resize_logo)
            h = embed(cover, logo, params, carrier)
            marked.append((f"{_pretty(cid)}(with {_pretty(lid)})", cid, lid, "watermarked",
                           report(cover, quantize(h))))
            g = _logo_view(extract(h, cover, params), logo)
            pulled.append((f"{_pretty(lid)}(from {_pretty(cid)})", cid, lid, "extracted", report(logo, g)))
        table.extend(marked + pulled)
    return table


def table_csv(table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label", "cover", "logo", "stage", "mse", "psnr_db", "ssim"])
    for label, cid, lid, stage, m in table:
        writer.writerow([label, cid, lid, stage, repr(m.mse), _fmt(format_psnr(m.psnr_db)), repr(m.ssim)])
    return buf.getvalue()


def table_text(table) -> str:
    lines = []
    width = max([len("image")] + [len(t[0]) for t in table])
    lines.append(f"{'image':<{width}}  {'MSE':>10}  {'PSNR':>10}  {'SSIM':>7}")
    for label, _, _, _, m in table:
        p = "∞" if math.isinf(m.psnr_db) else f"{m.psnr_db:.4f}"
        mse_s = "0" if m.mse == 0 else f"{m.mse:.4f}"
        lines.append(f"{label:<{width}}  {mse_s:>10}  {p:>10}  {m.ssim:7.4f}")
    return "\n".join(lines) + "\n"


# -- alpha sweep ------------------------------------------------------------------------

def fade_sweep(cover: RasterImage, logo: RasterImage, out_dir, fmt: str = "bmp", ladder=ALPHA_LADDER):
    """Write one 8-bit blend per ratio plus ``sweep.csv``; returns the CSV rows."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for a1 in ladder:
        params = validate_params(a1)
        exact = embed(cover, logo, params, CarrierMode.EXACT)
        q8 = quantize(exact)
        name = f"blend_{round(a1 * 100):02d}_{round(params.alpha2 * 100):02d}.{fmt}"
        write_image(out_dir / name, q8, fmt)
        m_exact = mse(cover, exact)
        m_q8 = mse(cover, q8)
        rows.append({
            "alpha1": a1, "alpha2": params.alpha2, "file": name,
            "mse": m_exact, "psnr_db": format_psnr(psnr(m_exact)), "mse_q8": m_q8,
        })
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _fmt(v) for k, v in r.items()})
    (out_dir / "sweep.csv").write_text(buf.getvalue())
    return rows


def default_sample_refs():
    return [SAMPLE_PREFIX + c for c in COVER_NAMES], [SAMPLE_PREFIX + l for l in LOGO_NAMES]


def export_samples(out_dir, fmt="bmp", size=256, rgb=False) -> list[str]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in COVER_NAMES:
        path = out_dir / f"{name}.{fmt}"
        write_image(path, make_cover(name, size, rgb and fmt != "pgm"), fmt)
        written.append(os.fspath(path))
    for name in LOGO_NAMES:
        path = out_dir / f"{name}.{fmt}"
        logo = make_logo(name, size)
        if fmt == "ppm":
            logo = RasterImage(logo.data.repeat(3, axis=0), Precision.CARRIER8)
        write_image(path, logo, fmt)
        written.append(os.fspath(path))
    return written
