import csv
import io
import json
import subprocess
import sys

import pytest

from cutout_packing.cli import eps_grid, fmt, main

POWER = '{"model": "powerlaw", "L": 1, "d": 0.5}'
CANTOR = '{"model": "blockgeo", "rho": "1/3", "m": 2, "b": 1}'
HALF_THIRD = '{"model": "system", "ratios": ["1/2", "1/3"], "gaps": ["1/6"]}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(3) == "3"
    assert fmt(None) == ""


def test_eps_grid():
    grid = eps_grid(1e-2, 1e-4, 2)
    assert len(grid) == 5
    assert grid[0] == 1e-2 and grid[-1] == pytest.approx(1e-4)
    with pytest.raises(Exception):
        eps_grid(1e-4, 1e-2, 1)


def test_pack_curve(capsys):
    code, out, _ = run(capsys, "pack-curve", "--set", POWER, "--eps-start", "1e-2", "--eps-stop", "1e-3")
    table = rows(out)
    assert code == 0
    assert table[0] == ["epsilon", "count", "normalized", "lp_upper", "greedy_lower"]
    assert len(table) == 3
    for eps, count, normalized, lp, greedy in table[1:]:
        assert int(greedy) <= int(count) <= float(lp)


def test_pack_curve_on_system(capsys):
    code, out, _ = run(capsys, "pack-curve", "--set", HALF_THIRD, "--eps", "0.25")
    assert code == 0
    assert rows(out)[1][:2] == ["0.25", "5"]


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "--d", "0.5")
    table = rows(out)
    assert code == 0 and table[0] == ["d", "A_d", "A_d_tail", "p_d"]
    assert float(table[1][1]) == pytest.approx(1.8600250792, abs=1e-9)


def test_lp_verify(capsys):
    code, out, _ = run(capsys, "lp-verify", "--set", POWER, "--eps", "1e-3", "--cantor-a", "3/2", "--cantor-n", "6")
    table = rows(out)
    assert code == 0
    assert table[0] == ["instance", "K", "primalObj", "dualObj", "gap", "maxResidual"]
    assert len(table) == 3
    assert all(float(r[4]) <= 1e-9 * float(r[2]) for r in table[1:])


def test_renewal_report(capsys):
    code, out, _ = run(capsys, "renewal", "--system", HALF_THIRD)
    assert code == 0
    assert "delta = 1/6" in out
    assert "constant in [1.4693970127" in out


def test_renewal_grid_goes_to_stdout(capsys):
    code, out, err = run(capsys, "renewal", "--system", HALF_THIRD, "--eps-start", "0.1", "--eps-stop", "0.01")
    assert code == 0
    assert rows(out)[0] == ["epsilon", "count", "normalized"]
    assert "mu_mean" in err


def test_renewal_dependent_system_reports(capsys):
    code, out, _ = run(capsys, "renewal", "--system", '{"model": "system", "ratios": ["1/3", "1/3"], "gaps": ["1/3"]}')
    assert code == 0
    assert "constant unavailable" in out


def test_mssp(capsys):
    code, out, _ = run(capsys, "mssp", "--seq", POWER, "--eps", "1e-3")
    table = rows(out)
    assert code == 0 and table[0] == ["epsilon", "lower", "upper", "greedy", "tailbound"]
    lower, upper = int(table[1][1]), int(table[1][2])
    assert lower <= upper


def test_tube(capsys, tmp_path):
    target = tmp_path / "tube.csv"
    code, out, _ = run(capsys, "tube", "--set", CANTOR, "--eps-start", "1e-2", "--eps-stop", "1e-3", "--out", str(target))
    assert code == 0 and out == ""
    assert rows(target.read_text())[0] == ["epsilon", "tube_volume", "normalized_content"]


def test_descriptor_file(capsys, tmp_path):
    path = tmp_path / "gamma.json"
    path.write_text(json.dumps({"model": "powerlaw", "L": 1, "d": 0.4}))
    code, out, _ = run(capsys, "tube", "--set", str(path), "--eps", "1e-3")
    assert code == 0 and len(rows(out)) == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["pack-curve", "--set", '{"model": "nope"}'],
        ["pack-curve", "--set", "/no/such/file.json"],
        ["pack-curve", "--set", "{not json"],
        ["pack-curve", "--set", POWER, "--eps-start", "1e-4", "--eps-stop", "1e-2"],
        ["pack-curve", "--set", '{"model": "powerlaw", "L": 1, "d": 1.5}', "--eps", "0.1"],
        ["tube", "--set", '{"model": "explicit", "lengths": [0.5, 0.25]}', "--eps", "0.1"],
        ["renewal", "--system", POWER],
        ["lp-verify"],
    ],
)
def test_bad_input_exit_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["pack-curve", "--threads", "0", "--set", POWER])
    assert info.value.code == 2


def test_output_is_byte_stable(capsys):
    argv = ["mssp", "--seq", POWER, "--eps-start", "1e-2", "--eps-stop", "1e-3", "--per-decade", "3"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    _, threaded, _ = run(capsys, *argv, "--threads", "4")
    assert first == second == threaded


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cutout_packing.cli", "constants", "--d", "0.4"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "d,A_d,A_d_tail,p_d"
