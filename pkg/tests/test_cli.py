import csv
import json

import numpy as np
import pytest

from fadewm.cli import main
from fadewm.fading import CarrierMode, embed, validate_params
from fadewm.harness import ExperimentManifest, fade_sweep, fidelity_table, load_ref
from fadewm.imageio import read_image, write_image
from fadewm.oracle import build_error_table, joint_histogram, predict_mse
from fadewm.raster import Precision, RasterImage
from fadewm.samples import make_cover, make_logo

from conftest import random_image


@pytest.fixture
def files(tmp_path):
    write_image(tmp_path / "cover.pgm", make_cover("lena", 64))
    write_image(tmp_path / "logo.pgm", make_logo("logow", 64))
    write_image(tmp_path / "logo1.pgm", make_logo("logo1", 64))
    write_image(tmp_path / "small.pgm", make_logo("logow", 32))
    write_image(tmp_path / "rgb.bmp", make_cover("peppers", 64, rgb=True))
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_embed_extract_exact(files, capsys):
    code, out, _ = run(capsys, "embed", files / "cover.pgm", files / "logo.pgm", "--out", files / "w.fwm")
    assert code == 0 and (files / "w.fwm").exists()
    assert json.loads(out)["psnr_db"] > 40
    code, out, _ = run(capsys, "extract", files / "w.fwm", files / "cover.pgm", "--out", files / "g.pgm",
                       "--reference", files / "logo.pgm")
    assert code == 0
    assert json.loads(out) == {"mse": 0.0, "psnr_db": "inf", "ssim": 1.0}
    assert read_image(files / "g.pgm") == read_image(files / "logo.pgm")


def test_extract_with_wrong_alpha_reports_error(files, capsys):
    run(capsys, "embed", files / "cover.pgm", files / "logo.pgm", "--out", files / "w.fwm")
    code, out, _ = run(capsys, "extract", files / "w.fwm", files / "cover.pgm", "--alpha1", 0.95,
                       "--out", files / "g.pgm", "--reference", files / "logo.pgm")
    assert code == 0
    assert json.loads(out)["mse"] > 0


def test_embed_quantized_writes_8bit(files, capsys):
    code, _, _ = run(capsys, "embed", files / "cover.pgm", files / "logo.pgm", "--carrier", "q8",
                     "--out", files / "w.bmp")
    assert code == 0
    assert read_image(files / "w.bmp").precision is Precision.CARRIER8


def test_embed_errors(files, capsys):
    code, _, err = run(capsys, "embed", files / "cover.pgm", files / "small.pgm", "--out", files / "w.fwm")
    assert code == 2 and "dimension mismatch" in err
    code, _, _ = run(capsys, "embed", files / "cover.pgm", files / "small.pgm", "--resize-logo",
                     "--out", files / "w.fwm")
    assert code == 0
    code, _, err = run(capsys, "embed", files / "cover.pgm", files / "logo.pgm", "--alpha1", 1.0,
                       "--out", files / "w.fwm")
    assert code == 2 and "alpha1" in err
    code, _, _ = run(capsys, "embed", files / "cover.pgm", files / "logo.pgm", "--out", files / "w.bmp")
    assert code == 2


def test_missing_and_malformed_inputs(files, capsys):
    code, _, _ = run(capsys, "extract", files / "w.fwm", files / "nope.pgm", "--out", files / "g.pgm")
    assert code == 2
    (files / "bad.pgm").write_bytes(b"P5 4 4 255\n\x00")
    code, _, _ = run(capsys, "embed", files / "bad.pgm", files / "logo.pgm", "--out", files / "w.fwm")
    assert code == 3


def test_rgb_cover_with_gray_logo(files, capsys):
    code, _, _ = run(capsys, "embed", files / "rgb.bmp", files / "logo.pgm", "--out", files / "w.fwm")
    assert code == 0
    code, out, _ = run(capsys, "extract", files / "w.fwm", files / "rgb.bmp", "--out", files / "g.pgm",
                       "--reference", files / "logo.pgm")
    assert code == 0 and json.loads(out)["mse"] == 0.0


def test_attack_verb(files, capsys):
    code, _, _ = run(capsys, "attack", files / "cover.pgm", "rotate90", "--out", files / "r.pgm")
    assert code == 0
    assert read_image(files / "r.pgm") == RasterImage(np.rot90(make_cover("lena", 64).data, 1, axes=(1, 2)))
    code, _, _ = run(capsys, "attack", files / "cover.pgm", '{"type": "salt_pepper", "density": 0.1}',
                     "--seed", 3, "--out", files / "sp.pgm")
    assert code == 0
    code, _, _ = run(capsys, "attack", files / "cover.pgm", '{"type": "median", "k": 4}', "--out", files / "m.pgm")
    assert code == 2


def write_manifest(path, **kw):
    doc = {"covers": ["cover.pgm"], "logos": ["logo.pgm"], "alpha1": 0.99, "carrier": "exact",
           "attacks": [], "master_seed": 17, "output_dir": "out"}
    doc.update(kw)
    path.write_text(json.dumps(doc))
    return path


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_evaluate_no_attacks(files, capsys):
    m = write_manifest(files / "m.json")
    assert run(capsys, "evaluate", m)[0] == 0
    rows = read_rows(files / "out" / "results.csv")
    assert [r["stage"] for r in rows] == ["watermarked", "extracted"]
    assert rows[1]["psnr_db"] == "inf" and rows[1]["mse"] == "0.0"
    assert list(rows[0]) == ["cover", "logo", "stage", "attack", "mse", "psnr_db", "ssim", "error"]
    doc = json.loads((files / "out" / "results.json").read_text())
    assert doc["config"]["color"] == "native"
    assert doc["rows"][1]["psnr_db"] == "inf"


def test_evaluate_standard_rows_and_determinism(files, capsys):
    m = write_manifest(files / "m.json", attacks="standard")
    assert run(capsys, "evaluate", m, "--out", files / "a")[0] == 0
    assert run(capsys, "evaluate", m, "--out", files / "b")[0] == 0
    first = (files / "a" / "results.csv").read_bytes()
    assert first == (files / "b" / "results.csv").read_bytes()
    rows = read_rows(files / "a" / "results.csv")
    assert len(rows) == 17
    by_attack = {r["attack"]: r for r in rows if r["stage"] == "extracted_after_attack"}
    for exact in ("rotate90", "rotate180", "scale3x"):
        assert by_attack[exact]["mse"] == "0.0"
    assert float(by_attack["saltpepper50"]["mse"]) > float(by_attack["saltpepper2"]["mse"])
    assert run(capsys, "evaluate", m, "--out", files / "c", "--seed", 18)[0] == 0
    assert (files / "c" / "results.csv").read_bytes() != first


def test_evaluate_no_realign(files, capsys):
    m = write_manifest(files / "m.json", attacks=["rotate180"], output_dir="nr")
    assert run(capsys, "evaluate", m, "--no-realign")[0] == 0
    rows = read_rows(files / "nr" / "results.csv")
    assert float(rows[2]["mse"]) > 0


def test_evaluate_cell_errors(files, capsys):
    m = write_manifest(files / "m.json", logos=["small.pgm"], output_dir="bad")
    assert run(capsys, "evaluate", m)[0] == 1
    rows = read_rows(files / "bad" / "results.csv")
    assert all(r["error"].startswith("DimensionMismatch") for r in rows)
    m = write_manifest(files / "m2.json", logos=["logo.pgm", "small.pgm"], output_dir="mixed")
    assert run(capsys, "evaluate", m)[0] == 0


def test_evaluate_manifest_validation(files, capsys):
    assert run(capsys, "evaluate", write_manifest(files / "m.json", covers=["missing.pgm"]))[0] == 2
    assert run(capsys, "evaluate", write_manifest(files / "m.json", covers=[]))[0] == 2
    assert run(capsys, "evaluate", write_manifest(files / "m.json", attacks=[{"type": "jpeg", "quality": 0}]))[0] == 2
    (files / "broken.json").write_text("{")
    assert run(capsys, "evaluate", files / "broken.json")[0] == 2


def test_manifest_seeds_reach_attacks(files):
    m = ExperimentManifest.from_dict(
        {"covers": ["sample:lena"], "logos": ["sample:logow"],
         "attacks": [{"id": "sp", "type": "salt_pepper", "density": 0.1}]})
    assert m.attacks[0][0] == "sp"
    assert m.carrier is CarrierMode.EXACT and m.alpha1 == 0.99


def test_table_exact_and_q8(files, capsys):
    covers = [str(files / "cover.pgm")]
    logos = [str(files / "logo.pgm"), str(files / "logo1.pgm")]
    rows = fidelity_table(covers, logos, 0.99, CarrierMode.EXACT)
    assert len(rows) == len(covers) * len(logos) * 2
    assert [r[3] for r in rows] == ["watermarked", "watermarked", "extracted", "extracted"]
    for _, _, _, stage, m in rows:
        if stage == "extracted":
            assert (m.mse, m.ssim) == (0.0, 1.0)
    q8 = fidelity_table(covers, logos, 0.99, CarrierMode.QUANTIZED8)
    table = build_error_table(validate_params(0.99))
    cover = read_image(files / "cover.pgm")
    for (_, _, lid, stage, m), logo_path in zip(q8[2:], logos):
        assert m.mse == pytest.approx(predict_mse(table, joint_histogram(cover, read_image(logo_path))), abs=1e-9)
    code, out, _ = run(capsys, "table", "--covers", *covers, "--logos", *logos, "--out", files / "t")
    assert code == 0 and "∞" in out
    assert len((files / "t" / "table.csv").read_text().splitlines()) == 5


def test_table_default_samples(capsys):
    code, out, _ = run(capsys, "table")
    assert code == 0
    assert len(out.splitlines()) == 1 + 16
    assert out.splitlines()[1].startswith("Lena(with Logo1)")


def test_fadesweep(files, capsys):
    code, _, _ = run(capsys, "fadesweep", files / "cover.pgm", files / "logo.pgm", "--out", files / "sw",
                     "--format", "pgm")
    assert code == 0
    produced = sorted(p.name for p in (files / "sw").iterdir())
    assert len(produced) == 9 and "sweep.csv" in produced
    rows = read_rows(files / "sw" / "sweep.csv")
    errs = [float(r["mse"]) for r in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_fade_half_blend_is_symmetric(rng):
    a, b = random_image(rng, 8, 8), random_image(rng, 8, 8)
    p = validate_params(0.5)
    assert embed(a, b, p) == embed(b, a, p)


def test_oracle_verb(tmp_path, capsys):
    code, out, _ = run(capsys, "oracle", "--alpha1", 0.99, "--out", tmp_path / "e.csv")
    assert code == 0
    frac = float(out.split()[-1])
    assert 0 <= frac <= 1
    with open(tmp_path / "e.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 257
    assert rows[1 + 100][1 + 200] == "0"


def test_samples_verb(tmp_path, capsys):
    code, out, _ = run(capsys, "samples", "--out", tmp_path, "--format", "bmp", "--size", 32)
    assert code == 0
    assert len(out.splitlines()) == 6
    assert load_ref(str(tmp_path / "lena.bmp")).dims == (32, 32)
