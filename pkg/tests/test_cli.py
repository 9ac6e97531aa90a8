import subprocess
import sys

import pytest

from cgs import telemetry
from cgs.checkpoint import read_stats
from cgs.cli import EXIT_TRUNCATED, classify, fit_exponent, main
from cgs.checkpoint import Checkpoint
from cgs.games import breakthrough_game


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_solve_nim(capsys):
    code, out = run(capsys, "solve", "--game", "nim", "--heaps", "3", "--sticks", "5")
    assert code == 0
    assert out.splitlines()[0] == "P1"
    assert "uncovered: 0" in out


def test_solve_breakthrough(capsys):
    code, out = run(capsys, "solve", "--game", "breakthrough", "--width", "2", "--height", "4")
    assert code == 0 and out.splitlines()[0] == "P2"


def test_solve_retro_mode(capsys):
    code, out = run(capsys, "solve", "--game", "nim", "--heaps", "2", "--sticks", "3", "--mode", "retro")
    assert code == 0 and out.splitlines()[0] == "P2"


def test_truncated_solve_exit_code(capsys):
    code, out = run(capsys, "solve", "--game", "breakthrough", "--width", "3", "--height", "4",
                    "--forward-plies", "2")
    assert code == EXIT_TRUNCATED
    assert out.splitlines()[0] == "UNKNOWN"


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--game", "nim", "--heaps", "3"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--game", "chess"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--game", "breakthrough", "--width", "1", "--height", "4"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--game", "nim", "--heaps", "0", "--sticks", "2"])
    assert exc.value.code == 2


def test_query_nim(tmp_path, capsys):
    ck = str(tmp_path / "nim")
    base = ["--game", "nim", "--heaps", "3", "--sticks", "5", "--checkpoint-dir", ck]
    run(capsys, "solve", *base, "--mode", "retro")
    assert run(capsys, "query", *base, "--position", "1,2,3 p1") == (0, "LOSS\n")
    assert run(capsys, "query", *base, "--position", "1,2,2 p2") == (0, "WIN\n")


def test_query_breakthrough(tmp_path, capsys):
    ck = str(tmp_path / "bt")
    base = ["--game", "breakthrough", "--width", "2", "--height", "4", "--checkpoint-dir", ck]
    run(capsys, "solve", *base)
    assert run(capsys, "query", *base, "--position", "11/11/22/22 p1") == (0, "LOSS\n")
    # not reachable from the start, so never classified
    assert run(capsys, "query", *base, "--position", "1./../../.2 p1") == (0, "UNKNOWN\n")


def test_query_uses_membership_only(tmp_path):
    game = breakthrough_game(2, 5)
    main(["solve", "--game", "breakthrough", "--width", "2", "--height", "5",
          "--checkpoint-dir", str(tmp_path)])
    ck = Checkpoint.open_existing(tmp_path, game)
    with telemetry.measure() as delta:
        value = classify(ck, game.initial, game.initial_player)
    assert value == "LOSS"
    assert delta["set_ops"] == 0 and delta["products"] == 0
    assert delta["lookups"] > 0


def test_query_errors(tmp_path, capsys):
    base = ["--game", "nim", "--heaps", "2", "--sticks", "2"]
    assert main(["query", *base, "--checkpoint-dir", str(tmp_path), "--position", "1,1 p1"]) == 1
    assert main(["query", *base, "--position", "1,1 p1"]) == 1
    run(capsys, "solve", *base, "--checkpoint-dir", str(tmp_path))
    assert main(["query", *base, "--checkpoint-dir", str(tmp_path), "--position", "1,x p1"]) == 1
    assert main(["query", *base, "--checkpoint-dir", str(tmp_path), "--position", "1,1"]) == 1


def test_resume_reprints_result_without_work(tmp_path, capsys):
    base = ["solve", "--game", "breakthrough", "--width", "2", "--height", "5",
            "--checkpoint-dir", str(tmp_path)]
    first = run(capsys, *base)
    with telemetry.measure() as delta:
        second = run(capsys, *base, "--resume")
    assert second == first
    assert delta["set_ops"] == 0


def test_reach_writes_stats(tmp_path, capsys):
    stats = tmp_path / "s.csv"
    code, out = run(capsys, "reach", "--game", "nim", "--heaps", "2", "--sticks", "2", "--stats", str(stats))
    assert code == 0
    rows = read_stats(stats)
    assert [int(r["positions"]) for r in rows] == [1, 4, 6, 3, 1, 0]
    assert [int(r["ply_forward"]) for r in rows] == list(range(6))
    assert "exponent: n/a" in out


def test_reach_exponent_is_finite(tmp_path, capsys):
    code, out = run(capsys, "reach", "--game", "breakthrough", "--width", "3", "--height", "5",
                    "--checkpoint-dir", str(tmp_path))
    line = [x for x in out.splitlines() if x.startswith("exponent:")][0]
    c = float(line.split()[1])
    assert 0 < c < 1
    # resuming reloads every set and reports the same fit
    code, again = run(capsys, "reach", "--game", "breakthrough", "--width", "3", "--height", "5",
                      "--checkpoint-dir", str(tmp_path), "--resume")
    assert line in again


def test_fit_exponent():
    points = [(10**k, 3 * 10 ** (k / 2)) for k in range(2, 9)]
    assert fit_exponent(points) == pytest.approx(0.5)
    assert fit_exponent([(10, 5), (100, 7)]) is None


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "cgs", "solve", "--game", "nim", "--heaps", "2", "--sticks", "2"],
        capture_output=True, text=True, check=False,
    )
    assert out.returncode == 0
    assert out.stdout.splitlines()[0] == "P2"
