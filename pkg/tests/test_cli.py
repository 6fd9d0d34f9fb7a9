import json

import numpy as np
import pytest

from fresnel_abcd import main
from utils.data_saver import parse_operator, read_csv_rows


@pytest.fixture
def workspace(tmp_path):
    """临时配置：输出目录指向 tmp_path，不写日志文件"""
    config = tmp_path / "config.yaml"
    config.write_text(f"output:\n  output_dir: '{tmp_path / 'output'}'\n"
                      "logging:\n  level: WARNING\n", encoding="utf-8")
    return tmp_path, ["--config", str(config)]


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_trace_prints_each_element(workspace, capsys):
    tmp_path, base = workspace
    system = _write(tmp_path / "system.json", '[{"kind": "free", "params": [1]}, '
                    '{"kind": "lens", "params": [1]}, {"kind": "free", "params": [1]}]')
    assert main(base + ["trace", system, "--ray", "1", "0"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "input: r=1 alpha=0"
    assert out[-1] == "final: r=0 alpha=-1"
    assert len(out) == 5


def test_trace_empty_system(workspace, capsys):
    tmp_path, base = workspace
    system = _write(tmp_path / "empty.json", "[]")
    assert main(base + ["trace", system, "--ray", "2", "0.5"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "final: r=2 alpha=0.5"


def test_malformed_system_exits_2(workspace):
    tmp_path, base = workspace
    system = _write(tmp_path / "bad.yaml", "- kind: free\n  params: [1]\n- kind: prism\n  params: [1]\n")
    assert main(base + ["trace", system]) == 2


def test_beam_pole_exits_3(workspace):
    tmp_path, base = workspace
    system = _write(tmp_path / "lens.json", '[{"kind": "lens", "params": [1]}]')
    # Im q0 > 0 但 |Cq0 + D| 低于极点阈值
    assert main(base + ["beam", system, "--q0", "1", "1e-20"]) == 3


def test_beam_writes_csv(workspace):
    tmp_path, base = workspace
    system = _write(tmp_path / "free.json", '[{"kind": "free", "params": [0.5]}]')
    out = tmp_path / "beam.csv"
    assert main(base + ["--out", str(out), "beam", system, "--q0", "0", "1"]) == 0
    rows = read_csv_rows(out)
    assert rows[0] == ["element", "re_q", "im_q"]
    assert rows[2] == ["1", "0.5", "1"]


def test_beam_rejects_lower_half_plane(workspace):
    tmp_path, base = workspace
    system = _write(tmp_path / "free.json", '[{"kind": "free", "params": [0.5]}]')
    assert main(base + ["beam", system, "--q0", "0", "-1"]) == 4
    assert main(base + ["beam", system, "--q0", "1", "0"]) == 4


def test_verify_failure_exits_5(tmp_path, capsys):
    config = tmp_path / "strict.yaml"
    config.write_text(f"output:\n  output_dir: '{tmp_path / 'output'}'\n"
                      "verification:\n  identity_tolerance: 1.0e-30\n"
                      "logging:\n  level: WARNING\n", encoding="utf-8")
    assert main(["--config", str(config), "--dim", "16", "verify", "identities"]) == 5
    assert "未通过" in capsys.readouterr().err


def test_operator_writes_identity(workspace, capsys):
    tmp_path, base = workspace
    out = tmp_path / "identity.txt"
    args = ["--dim", "8", "--out", str(out), "operator",
            "--A", "1", "--B", "0", "--C", "0", "--D", "1"]
    assert main(base + args) == 0
    assert np.allclose(parse_operator(out.read_text(encoding="utf-8")).entries, np.eye(8))
    assert "route=normal-order N=8" in capsys.readouterr().out


def test_operator_domain_errors_exit_4(workspace):
    tmp_path, base = workspace
    out = str(tmp_path / "op.txt")
    singular = ["operator", "--A", "1", "--B", "1", "--C", "1", "--D", "1"]
    assert main(base + ["--dim", "8", "--out", out] + singular) == 4
    assert main(base + ["--dim", "8", "--out", out] + singular + ["--fix-d"]) == 0
    flipped = ["operator", "--A", "-1", "--B", "0", "--C", "0", "--D", "-1",
               "--route", "canonical"]
    assert main(base + ["--dim", "8", "--out", out] + flipped) == 4


def test_kernel_writes_csv(workspace):
    tmp_path, base = workspace
    out = tmp_path / "kernel.csv"
    args = ["--dim", "32", "--out", str(out), "kernel",
            "--A", "1", "--B", "1", "--C", "0", "--D", "1", "--points", "3"]
    assert main(base + args) == 0
    rows = read_csv_rows(out)
    assert rows[0] == ["x1", "x2", "re_analytic", "im_analytic", "re_fock", "im_fock", "abs_err"]
    assert len(rows) == 10


def test_kernel_delta_limit_exits_4(workspace):
    _, base = workspace
    args = ["--dim", "8", "kernel", "--A", "1", "--B", "0", "--C", "-1", "--D", "1"]
    assert main(base + args) == 4


def test_verify_identities_writes_report(workspace, capsys):
    tmp_path, base = workspace
    out = tmp_path / "reports" / "identities.json"
    assert main(base + ["--dim", "32", "--out", str(out), "verify", "identities"]) == 0
    assert "identities" in capsys.readouterr().out
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["failed"] == 0
    assert all(case["pass"] for case in data["cases"])
    assert (tmp_path / "reports" / "verification_report.html").exists()


def test_verify_unknown_suite_exits_2(workspace):
    _, base = workspace
    assert main(base + ["verify", "nonsense"]) == 2


def test_damped_writes_rows(workspace):
    tmp_path, base = workspace
    out = tmp_path / "damped.csv"
    args = ["--dim", "32", "--out", str(out), "damped", "--gamma", "0.3", "--steps", "4"]
    assert main(base + args) == 0
    rows = read_csv_rows(out)
    assert rows[0] == ["t", "re_q2", "im_q2", "squeeze_magnitude", "fidelity_vs_operator_route"]
    assert len(rows) == 6
    assert float(rows[-1][4]) > 1.0 - 1e-9


def test_damped_overdamped_exits_4(workspace):
    _, base = workspace
    assert main(base + ["damped", "--gamma", "2.0"]) == 4


def test_usage_errors():
    assert main(["no-such-command"]) == 2
    assert main(["--help"]) == 0
