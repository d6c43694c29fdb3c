import pytest

from coded_relay import cli, gf, selftest


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    return dict(line.split(None, 1) for line in text.strip().splitlines())


def test_constants_n225(capsys):
    code, out, _ = run_cli(capsys, "constants")
    assert code == 0
    t = table(out)
    assert float(t["theta_prime"]) == pytest.approx(1 / 9)
    assert t["theta0_4dp"] == "0.0294"
    assert t["p2_4dp"] == "0.0147"
    assert t["spacing_k"] == "3"


def test_constants_c1_boundary(capsys):
    code, _, err = run_cli(capsys, "constants", "--c1", "18")
    assert code == 2
    assert "window" in err


def test_constants_n4(capsys):
    _, out, _ = run_cli(capsys, "constants", "--n", "4")
    assert float(table(out)["p1_n"]) == pytest.approx(0.261719, abs=5e-7)


def test_run_csv_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["run", "--n", "49", "--ragged", "--seeds", "1-2", "--horizon", "6000", "--warmup", "600"]
    assert run_cli(capsys, *args, "--out", str(a))[0] == 0
    assert run_cli(capsys, *args, "--out", str(b))[0] == 0
    ta, tb = a.read_bytes(), b.read_bytes()
    assert ta == tb
    lines = ta.decode().splitlines()
    assert lines[0].split(",") == list(cli.RUN_COLUMNS)
    assert len(lines) == 3
    man = (tmp_path / "a.csv.manifest").read_text()
    assert "seeds=1,2" in man and "config.horizon=6000" in man and "unstable.seed1=" in man


def test_manifest_reproduces_row(tmp_path, capsys):
    out = tmp_path / "r.csv"
    run_cli(capsys, "run", "--n", "49", "--ragged", "--seeds", "3", "--horizon", "5000", "--warmup", "0",
            "--out", str(out))
    cfgfile = tmp_path / "again.cfg"
    kv = dict(line.split("=", 1) for line in (tmp_path / "r.csv.manifest").read_text().splitlines())
    cfgfile.write_text(f"n={kv['config.n']}\nragged={kv['config.ragged']}\nhorizon={kv['config.horizon']}\n"
                       f"warmup={kv['config.warmup']}\nseeds={kv['seeds']}\n")
    code, text, _ = run_cli(capsys, "run", "--config", str(cfgfile))
    assert code == 0
    assert text == out.read_text()


def test_refuses_overwrite(tmp_path, capsys):
    out = tmp_path / "x.csv"
    out.write_text("keep")
    code, _, err = run_cli(capsys, "run", "--n", "9", "--horizon", "100", "--warmup", "0", "--out", str(out))
    assert code == 2 and "overwrite" in err
    assert out.read_text() == "keep"


def test_config_error_exit(capsys):
    assert run_cli(capsys, "run", "--n", "50")[0] == 2
    assert run_cli(capsys, "run", "--n", "49")[0] == 2  # 7 is not a multiple of 3


def test_config_file_and_override(tmp_path, capsys):
    f = tmp_path / "c.cfg"
    f.write_text("# comment\nn = 49\nragged = 1\nps=0.3\nhorizon=3000\nwarmup=0\n")
    code, out, _ = run_cli(capsys, "run", "--config", str(f), "--ps", "0.4")
    assert code == 0
    row = dict(zip(cli.RUN_COLUMNS, out.splitlines()[1].split(",")))
    assert row["p_s"] == "0.4" and row["n"] == "49"
    f.write_text("bogus=1\n")
    assert run_cli(capsys, "run", "--config", str(f))[0] == 2


def test_all_unstable_exit_3(capsys):
    code, *_ = run_cli(capsys, "run", "--n", "81", "--scheme", "2hop", "--horizon", "20000", "--warmup", "1000")
    assert code == 3


def test_event_log_written(tmp_path, capsys):
    log = tmp_path / "ev.txt"
    run_cli(capsys, "run", "--n", "9", "--horizon", "300", "--warmup", "0", "--event-log", str(log))
    text = log.read_text().splitlines()
    assert text[0] == "# seed 1"
    assert text[1].startswith("# slot cell")
    assert all(len(x.split()) == 9 for x in text[2:])


def test_probes_zero_samples(capsys):
    code, out, _ = run_cli(capsys, "probes", "--n", "81", "--samples", "0")
    assert code == 0
    assert out == ",".join(cli.PROBE_CSV_COLUMNS) + "\n"


def test_probes_rows(capsys):
    code, out, _ = run_cli(capsys, "probes", "--n", "81", "--samples", "4")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 5


def test_sweep_generic(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run_cli(capsys, "sweep", "generic", "--param", "ps", "--values", "0.3,0.6",
                         "--n", "49", "--ragged", "--horizon", "4000", "--warmup", "400", "--seeds", "1-2",
                         "--out", str(out))
    assert code == 0
    assert len(out.read_text().splitlines()) == 5
    summ = (tmp_path / "s.summary.csv").read_text().splitlines()
    assert summ[0].split(",") == list(cli.SUMMARY_COLUMNS)
    assert len(summ) == 3


def test_sweep_fig7_fit(tmp_path, capsys):
    out = tmp_path / "f7.csv"
    code, _, err = run_cli(capsys, "sweep", "fig7", "--values", "9,36,81", "--horizon-per-n", "200",
                           "--warmup-per-n", "20", "--out", str(out))
    assert code == 0
    assert "fit.preferred=" in err
    rows = out.read_text().splitlines()[1:]
    assert {r.split(",")[0] for r in rows} == {"2hrrsc", "2hop"}


def test_selftest_pass(capsys):
    code, out, _ = run_cli(capsys, "selftest")
    assert code == 0
    assert out.count("PASS") == 4
    assert "checks" in out


def test_selftest_fault_injection(monkeypatch):
    # x^3 + x + 1 replaced by the reducible x^3 + 1
    bad = selftest.run_all(moduli={3: 0b1001})
    assert not bad[0].ok and not bad[1].ok
    monkeypatch.setitem(gf.MODULI, 2, 0b101)
    assert not selftest.run_all()[0].ok


def test_mixing_flags(capsys):
    code, out, err = run_cli(capsys, "mixing", "--L", "3,5,7")
    assert code == 0
    assert len(out.splitlines()) == 4
    assert "FLAG" in err


def test_mobility_stats(capsys):
    code, out, _ = run_cli(capsys, "mobility-stats", "--L", "3", "--meetings", "5000")
    assert code == 0
    assert out.splitlines()[1].startswith("3,9,5000,")


def test_workers_env(monkeypatch):
    monkeypatch.setenv(cli.WORKERS_ENV, "3")
    assert cli.default_workers() == 3
    assert cli.parse_seeds("1-3,7") == [1, 2, 3, 7]
