import json

import pytest

from cfree.cli import main

FLIP_JSON = [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]
EYE_JSON = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
ZERO_JSON = [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]


def run_cli(args):
    return main(args)


def test_verify_exit_zero_and_report_files(tmp_path):
    out = tmp_path / "rep"
    code = run_cli(["verify", "--suite", "psi-product", "--dims", "2,2,2,2",
                    "--depth", "4", "--seed", "42", "--trials", "3",
                    "--tol", "1e-9", "--out", str(out)])
    assert code == 0
    assert (out / "summary.csv").exists()
    assert (out / "psi-product.jsonl").exists()
    assert (out / "psi-product.png").exists()
    first = json.loads((out / "psi-product.jsonl").read_text().splitlines()[0])
    assert first["schema"] == 1
    assert first["suite"] == "psi-product"
    assert set(first) >= {"check", "lhs", "rhs", "abs_err", "rel_err",
                          "tolerance", "pass", "context"}
    header = (out / "summary.csv").read_text().splitlines()[0]
    assert header == "suite,check,abs_err,rel_err,tol,pass"


def test_verify_csv_format_skips_jsonl(tmp_path):
    out = tmp_path / "rep"
    code = run_cli(["verify", "--suite", "lambda-properties", "--trials", "2",
                    "--out", str(out), "--format", "csv", "--no-figures"])
    assert code == 0
    assert (out / "summary.csv").exists()
    assert not (out / "lambda-properties.jsonl").exists()
    assert not (out / "lambda-properties.png").exists()


def test_verify_deterministic_reports(tmp_path):
    outs = []
    for tag in ("one", "two"):
        out = tmp_path / tag
        assert run_cli(["verify", "--suite", "psi-product", "--depth", "4",
                        "--seed", "7", "--trials", "2", "--out", str(out),
                        "--no-figures"]) == 0
        outs.append(out)
    a = (outs[0] / "psi-product.jsonl").read_bytes()
    b = (outs[1] / "psi-product.jsonl").read_bytes()
    assert a == b
    assert (outs[0] / "summary.csv").read_bytes() == \
        (outs[1] / "summary.csv").read_bytes()


def test_verify_zero_trials_is_valid(tmp_path):
    out = tmp_path / "rep"
    code = run_cli(["verify", "--suite", "lambda-properties", "--trials", "0",
                    "--out", str(out), "--no-figures"])
    assert code == 0
    assert (out / "summary.csv").read_text().splitlines() == \
        ["suite,check,abs_err,rel_err,tol,pass"]


def test_verify_invalid_config_exit_two(tmp_path):
    assert run_cli(["verify", "--suite", "cfree", "--dims", "1,1,1,1",
                    "--out", str(tmp_path)]) == 2
    assert run_cli(["verify", "--suite", "psi-product", "--dims", "3,3",
                    "--out", str(tmp_path)]) == 2
    assert run_cli(["verify", "--suite", "psi-product", "--trials", "-1",
                    "--out", str(tmp_path)]) == 2


def test_verify_failed_check_exit_one(tmp_path):
    # an absurd tolerance forces residual-bearing checks to fail
    code = run_cli(["verify", "--suite", "haagerup-lemmas", "--depth", "6",
                    "--trials", "1", "--tol", "1e-30",
                    "--out", str(tmp_path / "rep"), "--no-figures"])
    assert code == 1


def test_verify_all_on_degenerate_dims(tmp_path):
    code = run_cli(["verify", "--suite", "all", "--dims", "1,1,1,1", "--seed", "0",
                    "--trials", "1", "--out", str(tmp_path / "rep"),
                    "--no-figures"])
    assert code == 0


def _write_mats(tmp_path):
    paths = {}
    for name, data in (("ta", FLIP_JSON), ("sa", FLIP_JSON),
                       ("tb", EYE_JSON), ("sb", EYE_JSON)):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(data))
        paths[name] = str(p)
    return paths


def test_moments_flip_r_pattern(tmp_path, capsys):
    paths = _write_mats(tmp_path)
    out = tmp_path / "mom"
    code = run_cli(["moments", "--t-alpha", paths["ta"], "--s-alpha", paths["sa"],
                    "--t-beta", paths["tb"], "--s-beta", paths["sb"],
                    "--order", "8", "--out", str(out)])
    assert code == 0
    r = json.loads((out / "rtransform_a.json").read_text())
    coeffs = [c[0] for c in r["r_transform"]["coeffs"]]
    val = r["r_transform"]["valuation"]
    got = {val + i: c for i, c in enumerate(coeffs)}
    expected = {0: 0.0, 1: 1.0, 2: 0.0, 3: -1.0, 4: 0.0, 5: 2.0, 6: 0.0, 7: -5.0}
    for n, c in expected.items():
        assert got.get(n, 0.0) == pytest.approx(c, abs=1e-10)
    md = json.loads((out / "moments_a.json").read_text())
    assert [m[0] for m in md["phi"]] == pytest.approx([0, 1, 0, 1, 0, 1, 0, 1])


def test_moments_identity_and_zero(tmp_path):
    p_eye = tmp_path / "eye.json"
    p_eye.write_text(json.dumps(EYE_JSON))
    p_zero = tmp_path / "zero.json"
    p_zero.write_text(json.dumps(ZERO_JSON))
    out = tmp_path / "mom"
    code = run_cli(["moments", "--t-alpha", str(p_eye), "--s-alpha", str(p_eye),
                    "--t-beta", str(p_zero), "--s-beta", str(p_zero),
                    "--order", "6", "--out", str(out)])
    assert code == 0
    md_a = json.loads((out / "moments_a.json").read_text())
    assert all(m == [1.0, 0.0] for m in md_a["phi"])
    md_b = json.loads((out / "moments_b.json").read_text())
    assert all(m == [0.0, 0.0] for m in md_b["phi"])
    r_b = json.loads((out / "rtransform_b.json").read_text())
    assert all(abs(c[0]) < 1e-12 and abs(c[1]) < 1e-12
               for c in r_b["r_transform"]["coeffs"])
    r_a = json.loads((out / "rtransform_a.json").read_text())
    got = {r_a["r_transform"]["valuation"] + i: c[0]
           for i, c in enumerate(r_a["r_transform"]["coeffs"])}
    assert got.get(0, 0.0) == pytest.approx(1.0)
    assert all(abs(v) < 1e-12 for n, v in got.items() if n != 0)


def test_moments_malformed_file_exit_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[[1, 2], [3]]")
    good = tmp_path / "good.json"
    good.write_text(json.dumps(EYE_JSON))
    code = run_cli(["moments", "--t-alpha", str(bad), "--s-alpha", str(good),
                    "--t-beta", str(good), "--s-beta", str(good),
                    "--out", str(tmp_path / "mom")])
    assert code == 2
    code = run_cli(["moments", "--t-alpha", str(tmp_path / "missing.json"),
                    "--s-alpha", str(good), "--t-beta", str(good),
                    "--s-beta", str(good), "--out", str(tmp_path / "mom")])
    assert code == 2


def test_moments_csv_format(tmp_path):
    paths = _write_mats(tmp_path)
    out = tmp_path / "mom_csv"
    code = run_cli(["moments", "--t-alpha", paths["ta"], "--s-alpha", paths["sa"],
                    "--t-beta", paths["tb"], "--s-beta", paths["sb"],
                    "--order", "4", "--format", "csv", "--out", str(out)])
    assert code == 0
    text = (out / "moments_a.csv").read_text()
    lines = text.splitlines()
    assert lines[0] == "n,re_m_phi,im_m_phi,re_m_psi,im_m_psi"
    assert lines[1].startswith("1,0.0,")
    assert lines[2].startswith("2,1.0,")
    assert not (out / "moments_a.json").exists()
    assert (out / "rtransform_sum.json").exists()
