import csv
import subprocess
import sys

import pytest

from focusbif import builtins
from focusbif.bifurcation import check_system
from focusbif.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from focusbif.config import build_system, parse_config, render
from focusbif.errors import ParseError

NEURON = """
command = "bifurcate"
epsilon = 0.01

[system]
builtin = "neuron"
a = -1.0
b = 1.0
k = 1.0
"""

FILIPPOV_TABLES = """
command = "bifurcate"

[system]
class = "filippov"

[system.field_minus]
f = [[1, 0, 0.2], [0, 1, -1.0]]
g = [[1, 0, 1.0], [0, 1, 0.2]]

[system.field_plus]
f = [[0, 0, 0.0]]
g = [[0, 0, -1.0]]

[system.surface]
h = [[0, 1, 0, 1.0], [0, 0, 1, -1.0]]
"""


def _write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# ---------------------------------------------------------------- parsing

def test_neuron_config_valid():
    cfg = parse_config(NEURON)
    assert cfg.command == "bifurcate"
    assert cfg.system == {"builtin": "neuron", "a": -1.0, "b": 1.0, "k": 1.0}
    assert cfg.epsilon == (0.01,)


def test_unknown_key_reports_line():
    text = NEURON.replace("k = 1.0", "k = 1.0\nspeed = 3")
    with pytest.raises(ParseError) as info:
        parse_config(text)
    (line, msg), = info.value.errors
    assert "speed" in msg
    assert text.splitlines()[line - 1].startswith("speed")


def test_negative_k_rejected():
    with pytest.raises(ParseError) as info:
        parse_config(NEURON.replace("k = 1.0", "k = -1.0"))
    assert any("k > 0" in msg for _, msg in info.value.errors)


def test_all_errors_collected_in_line_order():
    text = 'command = "fly"\nseed = -1\n[integrator]\nrel_tol = 0\n'
    with pytest.raises(ParseError) as info:
        parse_config(text)
    assert [line for line, _ in info.value.errors] == [1, 2, 4]


def test_syntax_error_has_line():
    with pytest.raises(ParseError) as info:
        parse_config('command = "simulate"\nepsilon = = 1\n')
    assert info.value.errors[0][0] == 2


@pytest.mark.parametrize("eps", ["0", "-0.01", "[0.01, 0.0]", "nan"])
def test_nonpositive_epsilon_rejected(eps):
    with pytest.raises(ParseError):
        parse_config(f"epsilon = {eps}\n")


def test_render_round_trip():
    cfg = parse_config(FILIPPOV_TABLES + '\n[region]\nfamily = "filippov"\n'
                       'axis1 = {name = "ratio", lo = 0.1, hi = 2.0, steps = 4}\n')
    again = parse_config(render(cfg))
    assert again == cfg
    assert render(again) == render(cfg)


def test_coefficient_tables_match_builtin():
    sys_tables = build_system(parse_config(FILIPPOV_TABLES).system)
    a = check_system(sys_tables).to_dict()
    b = check_system(builtins.filippov_normal_form()).to_dict()
    assert a["verdict"] == b["verdict"] == "cycle-predicted"
    assert a["derivatives"] == pytest.approx(b["derivatives"])


def test_impacting_tables():
    text = """
[system]
class = "impacting"
[system.field]
f = [[1, 0, -0.1], [0, 1, -1.0]]
g = [[1, 0, 1.0], [0, 1, -0.1]]
[system.surface]
h = [[0, 1, 0, 1.0], [0, 0, 1, -1.0]]
[system.reset]
x = [[1, -2.0]]
y = [[1, 1.0]]
"""
    sys_ = build_system(parse_config(text).system)
    assert check_system(sys_).verdict == check_system(builtins.neuron()).verdict == "cycle-predicted"


def test_missing_class_table_reported():
    with pytest.raises(ParseError) as info:
        parse_config('[system]\nclass = "sweeping"\n[system.field]\nf = [[1, 0, 1.0]]\ng = []\n')
    assert any("[system.surface]" in msg for _, msg in info.value.errors)


# ---------------------------------------------------------------- running

def test_bifurcate_sweeping_predicted(tmp_path):
    code = main(["bifurcate", "--config", str(_write(tmp_path, '[system]\nbuiltin = "sweeping-halfplane"\na = 0.2\n')),
                 "--output", str(tmp_path / "out")])
    assert code == EXIT_OK
    text = (tmp_path / "out" / "report.txt").read_text()
    assert "verdict = cycle-predicted" in text
    assert (tmp_path / "out" / "report.json").exists()


def test_bifurcate_not_predicted_exit_code(tmp_path):
    cfg = _write(tmp_path, '[system]\nbuiltin = "sweeping-halfplane"\na = 0.5\n')
    assert main(["bifurcate", "--config", str(cfg), "--output", str(tmp_path)]) == EXIT_FAIL


def test_region_filippov_grid(tmp_path):
    cfg = _write(tmp_path, 'command = "region"\n[region]\nfamily = "filippov"\n'
                           'axis1 = {name = "ratio", lo = 0.01, hi = 2.0, steps = 200}\n'
                           'axis2 = {name = "m", lo = -3.0, hi = 3.0, steps = 200}\n')
    assert main(["--config", str(cfg), "--output", str(tmp_path)]) == EXIT_OK
    with open(tmp_path / "region.csv", encoding="utf-8") as fp:
        rows = list(csv.DictReader(fp))
    assert len(rows) == 200 * 200
    for row in rows:
        ratio, m = float(row["axis1"]), float(row["axis2"])
        assert (row["note"] == "m<-ratio") == (m < -ratio)
    assert (tmp_path / "region.csv.meta.json").exists()


def test_simulate_nonpositive_epsilon_is_input_error(tmp_path):
    cfg = _write(tmp_path, 'command = "simulate"\nepsilon = 0.0\n[system]\nbuiltin = "neuron"\n')
    assert main(["--config", str(cfg), "--output", str(tmp_path)]) == EXIT_INPUT
    cfg = _write(tmp_path, '[system]\nbuiltin = "neuron"\n')
    assert main(["simulate", "--config", str(cfg), "--epsilon=-1e-3"]) == EXIT_INPUT


def test_simulate_writes_trajectories(tmp_path):
    cfg = _write(tmp_path, '[system]\nbuiltin = "filippov-normal-form"\n[simulate]\nt_max = 20.0\n')
    assert main(["simulate", "--config", str(cfg), "--epsilon", "0.01,0.005",
                 "--output", str(tmp_path)]) == EXIT_OK
    for i in (0, 1):
        head = (tmp_path / f"trajectory-{i}.csv").read_text().splitlines()[0]
        assert head == "t,x,y,mode,event_kind"


def test_confirm_writes_cycle_and_convergence(tmp_path):
    cfg = _write(tmp_path, '[system]\nbuiltin = "sweeping-halfplane"\n')
    assert main(["confirm", "--config", str(cfg), "--epsilon", "0.01,0.005",
                 "--output", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "cycle.csv").exists()
    rows = (tmp_path / "convergence.csv").read_text().splitlines()
    assert rows[0] == "epsilon,amplitude,period,return_time,return_time_error" and len(rows) == 3


def test_confirm_outside_region_fails(tmp_path):
    cfg = _write(tmp_path, NEURON)
    assert main(["confirm", "--config", str(cfg), "--output", str(tmp_path)]) == EXIT_FAIL


def test_missing_command_and_bad_config(tmp_path):
    assert main(["--output", str(tmp_path)]) == EXIT_INPUT
    assert main(["bifurcate", "--config", str(tmp_path / "absent.toml")]) == EXIT_INPUT
    assert main(["bifurcate", "--config", str(_write(tmp_path, "oops = 1\n"))]) == EXIT_INPUT
    assert main(["bifurcate", "--output", str(tmp_path)]) == EXIT_INPUT


def test_runs_are_byte_identical(tmp_path):
    cfg = _write(tmp_path, '[system]\nbuiltin = "filippov-normal-form"\nc = 1.0\n')
    for out in ("a", "b"):
        assert main(["confirm", "--config", str(cfg), "--epsilon", "0.01",
                     "--output", str(tmp_path / out)]) == EXIT_OK
    for name in ("report.txt", "report.json", "cycle.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_module_entry_point(tmp_path):
    cfg = _write(tmp_path, '[system]\nbuiltin = "neuron"\n')
    proc = subprocess.run([sys.executable, "-m", "focusbif", "bifurcate", "--config", str(cfg),
                           "--output", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verdict = cycle-predicted" in proc.stdout
