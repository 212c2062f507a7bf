import csv
import io
import json

import pytest

from critperc.cli import EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE, main
from critperc.io import CSV_COLUMNS

SMALL_ARM = ["one-arm", "--mesh", "1/16", "--eps", "1/8,1/4,1/2", "--n", "3000", "--seed", "42"]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_one_arm_writes_csv(capsys):
    code, out, err = run(SMALL_ARM + ["--threshold", "bulk_slope_tol=1"], capsys)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(csv.reader(io.StringIO(out)).__next__()) == CSV_COLUMNS
    assert len(rows) >= 3
    assert "PASS" in err


def test_tolerance_failure_exit_code(capsys):
    code, _, err = run(SMALL_ARM + ["--threshold", "bulk_slope_tol=0"], capsys)
    assert code == EXIT_TOLERANCE
    assert "FAIL" in err and "observed" in err and "z" in err


@pytest.mark.parametrize("argv, flag", [
    (["one-arm", "--mesh", "-1"], "--mesh"),
    (["one-arm", "--n", "zero"], "--n"),
    (["anchored", "--points", "1+"], "--points"),
    (["gasket", "--domain", "blob:1", "--n", "10"], "blob"),
    (["one-arm", "--seed", "0x1ffffffffffffffff"], "--seed"),
    (["nonsense"], "nonsense"),
])
def test_usage_errors(argv, flag, capsys):
    code, _, err = run(argv, capsys)
    assert code == EXIT_USAGE
    assert flag in err


def test_gasket_point_outside_domain_is_usage_error(capsys):
    code, _, err = run(["gasket", "--mesh", "1/8", "--points", "2;0", "--n", "10"], capsys)
    assert code == EXIT_USAGE


def test_hex_seed_equals_decimal(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["anchored", "--mesh", "1/16", "--points", "0.5@90;0.5@30", "--n", "2000"]
    main(base + ["--seed", "0x2a", "--out", str(a)])
    main(base + ["--seed", "42", "--out", str(b)])
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_manifest_replay_is_byte_identical(tmp_path, capsys):
    out, man = tmp_path / "run.csv", tmp_path / "run.json"
    main(["images", "--mesh", "1/8", "--n", "3000", "--seed", "7", "--out", str(out),
          "--manifest", str(man)])
    meta = json.loads(man.read_text())
    assert meta["seed_hex"] == "0x0000000000000007"
    assert meta["events"] and "wall_time_s" in meta
    again = tmp_path / "again.csv"
    code = main(["replay", str(man), "--out", str(again), "--workers", "3"])
    capsys.readouterr()
    assert code in (EXIT_OK, EXIT_TOLERANCE)
    assert again.read_bytes() == out.read_bytes()


def test_workers_do_not_change_output(tmp_path, capsys):
    paths = []
    for w in (1, 4, 16):
        p = tmp_path / f"w{w}.csv"
        main(["multipoint", "--mesh", "1/32", "--n", "2000", "--workers", str(w), "--out", str(p)])
        paths.append(p.read_bytes())
    capsys.readouterr()
    assert paths[0] == paths[1] == paths[2]


def test_oracle_and_selftest(capsys):
    code, out, _ = run(["oracle", "--event", "anchored", "--n", "20000"], capsys)
    assert code == EXIT_OK and "anchored" in out
    code, out, _ = run(["selftest", "--n", "500"], capsys)
    assert code == EXIT_OK
