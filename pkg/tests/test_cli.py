import json

import pytest

from deltajet import modular_forms as mf
from deltajet.cli import build_config, build_parser, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expand_psi_p_prints_leading_monomials(capsys):
    code, out, _ = run(["expand", "psi-p", "--p", "5", "--terms", "4"], capsys)
    assert code == 0
    body = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert [ln.split(":")[0].split() for ln in body] == [["-5", "1"], ["-10", "2"], ["-15", "3"], ["-20", "4"]]
    assert body[0].endswith(": 0:1" + ".0" * 39)


def test_run_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["run", "hecke-identities", "--p", "5", "--N", "7", "--seed", "3", "--out", str(a)]) == 0
    assert main(["run", "hecke-identities", "--p", "5", "--N", "7", "--seed", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    last = json.loads(a.read_text().splitlines()[-1])
    assert last["summary"] and last["passed"]


def test_run_failure_exit_code(capsys):
    code, out, _ = run(["run", "example-psi", "--p", "5"], capsys)
    assert code == 1
    records = [json.loads(ln) for ln in out.splitlines()]
    failed = [r for r in records if not r["passed"]]
    assert any(r.get("witness") for r in failed)


def test_configuration_errors_exit_two(capsys):
    assert run(["run", "theorem-1.1", "--p", "7", "--N", "7"], capsys)[0] == 2
    assert run(["run", "prop-caff", "--p", "5", "--e", "3", "--pi", "cyclotomic"], capsys)[0] == 2
    assert run(["run", "delta-axioms", "--pi", "eisenstein:-25,0"], capsys)[0] == 2
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["run", "no-such-suite"])
    assert info.value.code == 2


def test_config_file_and_flag_override(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# acceptance cell\np = 7\nN = 11\nseed = 4\n")
    args = build_parser().parse_args(["run", "hecke-identities", "--config", str(cfg_file), "--seed", "9"])
    cfg = build_config(args)
    assert (cfg.p, cfg.N, cfg.seed) == (7, 11, 9)
    args = build_parser().parse_args(["run", "prop-caff", "--p", "5", "--e", "4"])
    assert build_config(args).pi == "cyclotomic"


def test_synth_hecke_and_ingest(capsys, tmp_path):
    f = tmp_path / "f.txt"
    assert main(["synth", "--p", "5", "--N", "7", "--q-prec", "60", "--seed", "2", "--out", str(f)]) == 0
    h = mf.ingest(f.read_text())
    code, out, _ = run(["hecke", "--op", "T", "--kappa", "2", "--M", "35", "--n", "5", "--in", str(f)], capsys)
    assert code == 0
    rows = [ln.split() for ln in out.splitlines() if not ln.startswith("#")]
    assert len(rows) == 13
    assert [int(c) for _, c in rows] == [0] + [h[n] for n in range(1, 13)]
    assert run(["ingest", "--in", str(f)], capsys)[0] == 0
    lines = f.read_text().splitlines()
    lines[13] = "12 999"
    f.write_text("\n".join(lines) + "\n")
    code, out, _ = run(["ingest", "--in", str(f)], capsys)
    assert code == 1 and json.loads(out)["witness"] == "a_12"
    f.write_text("garbage\n")
    assert run(["ingest", "--in", str(f)], capsys)[0] == 2


def test_overconv_and_radius(capsys, tmp_path):
    dump = tmp_path / "s.dump"
    assert main(["expand", "fsharp-p", "--p", "5", "--N", "7", "--seed", "1", "--out", str(dump)]) == 0
    code, out, _ = run(["overconv", "--in", str(dump), "--pi", "cyclotomic"], capsys)
    report = json.loads(out.splitlines()[0])
    assert code == 1 and report["defect"] == 1 and report["witness"] == "dq"
    assert "# coefficients ramified cyclotomic" in out
    code, out, _ = run(["radius", "--in", str(dump)], capsys)
    assert code == 0 and "slope" in json.loads(out)
