import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holistic_burgers.cli import (
    ConfigError,
    RunConfig,
    SignalSpec,
    dump_config,
    main,
    parse_config,
    sample_rows,
)
from holistic_burgers.oracles import kink_solution

KINK = """\
# viscous shock on [-4, 4]
m = 31
h = 0.25
x_origin = -3.75
t1 = 1
order = 2
bc_left = dirichlet
bc_left_signal = exact-kink
bc_right = dirichlet
bc_right_signal = exact-kink
initial = kink
"""


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def read_csv(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.reader(lines))


def test_zero_run_writes_zero_body(tmp_path, capsys):
    cfg = write(tmp_path, "m = 8\nh = 0.5\nt1 = 0.5\norder = 1\n")
    assert main(["simulate", cfg]) == 0
    out = capsys.readouterr().out
    rows = read_csv(out)
    assert rows[0] == ["t"] + [f"u_{j}" for j in range(1, 9)]
    assert all(float(v) == 0.0 for r in rows[1:] for v in r[1:])
    assert "\r" not in out


def test_kink_final_row_matches_exact(tmp_path):
    out = tmp_path / "traj.csv"
    assert main(["simulate", write(tmp_path, KINK), "-o", str(out)]) == 0
    rows = read_csv(out.read_text())
    t = float(rows[-1][0])
    u = np.array([float(v) for v in rows[-1][1:]])
    x = -3.75 + 0.25 * np.arange(31)
    assert t == 1.0
    assert np.abs(u - kink_solution(x, 1.0)).max() < 5e-3


def test_output_is_deterministic(tmp_path):
    cfg = write(tmp_path, KINK)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", cfg, "-o", str(a)])
    main(["simulate", cfg, "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_neumann_header_note(tmp_path, capsys):
    cfg = write(tmp_path, "m = 8\nh = 0.5\nt1 = 0.1\nbc_left = neumann\nbc_left_signal = 0.2\n")
    assert main(["simulate", cfg]) == 0
    assert capsys.readouterr().out.startswith("# neumann")


@pytest.mark.parametrize("text", [
    "m = 8\nt1 = 1\n",                      # missing h
    "m = 8\nh = 0.5\nt1 = 1\ncolour = red\n",
    "m = 8\nh = 0.5\nt1 = 1\nbc_left = robin\n",
    "m = 8\nh = 0.5\nt1 = 1\ninitial = gaussian\n",
    "m = 8\nh = 0.5\nt1 = 1\nbc_left_signal = exp(t)\n",
    "m = 8\nh = 0.5\nt1 = 1\nm = 9\n",
    "m = 4\nh = 0.5\nt1 = 1\n",
    "m = 8\nh = 0.5\nt1 = 1\njust words\n",
])
def test_bad_config_exit_2(tmp_path, text, capsys):
    assert main(["simulate", write(tmp_path, text)]) == 2
    assert "error" in capsys.readouterr().err


def test_line_numbers_in_errors():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("m = 8\nh = 0.5\nbogus = 1\nt1 = 1\n")


def test_blow_up_exit_3(tmp_path):
    text = KINK.replace("t1 = 1", "t1 = 200\ndt = 2")
    with pytest.warns(RuntimeWarning):
        assert main(["simulate", write(tmp_path, text)]) == 3


def test_missing_file_exit_2(tmp_path):
    assert main(["simulate", str(tmp_path / "nope.cfg")]) == 2


def test_dump_config_round_trip(tmp_path, capsys):
    cfg = write(tmp_path, KINK + "output_every = 5\n")
    assert main(["simulate", cfg, "--dump-config"]) == 0
    dumped = capsys.readouterr().out
    assert parse_config(dumped) == parse_config(open(cfg).read())
    assert dump_config(parse_config(dumped)) == dumped


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 10), st.floats(-5, 5), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
       st.sampled_from(["dirichlet", "neumann"]), st.sampled_from([1, 2, 3]), st.booleans())
def test_round_trip_property(h, x0, c, w, phi, bc, p, rate):
    cfg = RunConfig(m=9, h=h, t1=1.0, x_origin=x0, order=p, bc_left=bc,
                    bc_left_signal=SignalSpec("sine", c, w, phi), bc_right_signal=SignalSpec("const", c),
                    rate_terms=rate, amplitude=c, dt=h / 7)
    assert parse_config(dump_config(cfg)) == cfg


@pytest.mark.parametrize("text,spec", [
    ("1.5", SignalSpec("const", 1.5)),
    ("-2e-1", SignalSpec("const", -0.2)),
    ("0.5*sin(3*t+0.25)", SignalSpec("sine", 0.5, 3.0, 0.25)),
    ("sin(2*t)", SignalSpec("sine", 1.0, 2.0, 0.0)),
    ("2*sin(1*t-1)", SignalSpec("sine", 2.0, 1.0, -1.0)),
    ("exact-kink", SignalSpec("exact-kink")),
])
def test_signal_forms(text, spec):
    assert SignalSpec.parse(text) == spec
    assert SignalSpec.parse(spec.text()) == spec


def test_verify_output(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    n = int(next(l for l in out.splitlines() if l.startswith("identities checked")).split(":")[1])
    assert n >= 20
    assert "resolved sign convention" in out and "f_c sign" in out


def test_converge_command(tmp_path, capsys):
    out = tmp_path / "conv.csv"
    assert main(["converge", "--problem", "kink", "--bc", "dirichlet", "--orders", "1,2",
                 "--grids", "16,32,64", "-o", str(out)]) == 0
    assert "fitted order" in capsys.readouterr().err
    rows = read_csv(out.read_text())
    assert rows[0] == ["p", "m", "h", "err_global", "err_interior"] and len(rows) == 7


def test_converge_two_grids_warns(capsys):
    assert main(["converge", "--orders", "1", "--grids", "16,32"]) == 0
    err = capsys.readouterr().err
    assert "warning" in err and "no fitted order" in err


def test_converge_unknown_problem():
    with pytest.raises(SystemExit) as info:
        main(["converge", "--problem", "tsunami"])
    assert info.value.code == 2


def _sample(tmp_path, capsys, text, *extra):
    assert main(["sample", write(tmp_path, text), *extra]) == 0
    return read_csv(capsys.readouterr().out)


def test_sample_r1_gives_grid_values(tmp_path, capsys):
    text = KINK.replace("t1 = 1", "t1 = 0.25")
    rows = _sample(tmp_path, capsys, text, "-r", "1")
    assert rows[0] == ["element", "x", "v", "approx"]
    main(["simulate", write(tmp_path, text, "b.cfg")])
    traj = read_csv(capsys.readouterr().out)
    assert [r[2] for r in rows[1:]] == traj[-1][1:]


def test_sample_affine_state_on_line(tmp_path, capsys):
    # a constant state with matching data stays put; its subgrid field is flat
    text = "m = 12\nh = 0.4\nt1 = 0.2\ninitial = constant\nvalue = 0.7\nbc_left_signal = 0.7\nbc_right_signal = 0.7\n"
    rows = _sample(tmp_path, capsys, text, "-r", "5")
    assert all(abs(float(r[2]) - 0.7) < 1e-12 for r in rows[1:])


def test_sample_rows_affine_line():
    cfg = RunConfig(m=12, h=0.3, t1=0.0, x_origin=0.3, bc_left_signal=SignalSpec("const", 0.0),
                    bc_right_signal=SignalSpec("const", 0.5 * 3.9))
    u = 0.5 * cfg.x
    rows = sample_rows(cfg, 0.0, u, 4)
    assert max(abs(v - 0.5 * x) for _, x, v, _ in rows) < 1e-12


def test_sample_approx_flags(tmp_path, capsys):
    rows = _sample(tmp_path, capsys, "m = 10\nh = 0.5\nt1 = 0.1\n", "-r", "2")
    flags = {int(r[0]): int(r[3]) for r in rows[1:]}
    assert [flags[j] for j in range(1, 11)] == [1, 1, 1, 0, 0, 0, 0, 1, 1, 1]


def test_sample_bad_index(tmp_path):
    assert main(["sample", write(tmp_path, "m = 8\nh = 0.5\nt1 = 0.1\n"), "--index", "999"]) == 2


def test_converge_compare_fd(capsys):
    assert main(["converge", "--bc", "neumann", "--orders", "1", "--grids", "8,12", "--compare-fd"]) == 0
    err = capsys.readouterr().err
    assert "standard" in err and "coarse-grid comparison" in err
    assert main(["converge", "--problem", "sine", "--grids", "8,12", "--orders", "1", "--compare-fd"]) == 2
