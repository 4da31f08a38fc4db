import numpy as np
import pytest

from nrnet import fixtures
from nrnet.cli import main
from nrnet.generators import random_chain, random_network
from nrnet.io import Labels, ParseError, format_chain, format_network, parse_chain, parse_costs, parse_network

CYCLE_FILE = """# three-state cycle
states 3
p 0 1 0.7
p 0 2 0.3
p 1 2 0.7
p 1 0 0.3
p 2 0 0.7
p 2 1 0.3
"""


@pytest.fixture
def files(tmp_path):
    paths = {}

    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        paths[name] = str(path)
        return str(path)

    write("cycle.chain", CYCLE_FILE)
    write("flip.chain", "states 2\np 0 1 1\np 1 0 1\n")
    write("sym.chain", "states 3\np 0 1 .5\np 0 2 .5\np 1 0 .5\np 1 2 .5\np 2 0 .5\np 2 1 .5\n")
    write("resistor.net", "vertices 2 a b\nunit a b R=2 gain=1\n")
    write("fixture.net", format_network(fixtures.nonmonotone_network(2.0), Labels(list(fixtures.NAMES))))
    write("bad.net", "vertices 2\nunit 0 1 R=1\nwire 0 1\n")
    write("amp.net", "vertices 2\nunit 0 1 R=1 gain=2\n")
    write("costs.k", "default 1\nk 0 1 2.5\n")
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


# -- file formats ---------------------------------------------------------------

def test_network_round_trip_exact():
    rng = np.random.default_rng(0)
    for _ in range(20):
        net = random_network(6, rng)
        back, _ = parse_network(format_network(net))
        assert back == net


def test_chain_round_trip_exact():
    rng = np.random.default_rng(1)
    for _ in range(20):
        chain = random_chain(6, rng)
        back, _ = parse_chain(format_chain(chain))
        assert np.array_equal(back.transition, chain.transition)


def test_named_vertices_round_trip():
    text = format_network(fixtures.nonmonotone_network(2.0), Labels(list(fixtures.NAMES)))
    assert text.startswith("vertices 4 a x y b")
    net, labels = parse_network(text)
    assert labels.names == list(fixtures.NAMES)
    assert net == fixtures.nonmonotone_network(2.0)


@pytest.mark.parametrize("text", [
    "unit 0 1 R=1\n",
    "vertices 2\nunit 0 1\n",
    "vertices 2\nunit 0 5 R=1\n",
    "vertices 2\nunit 0 1 R=1 colour=red\n",
    "vertices 2\nunit 0 1 R=-1\n",
    "vertices 2\n",
    "vertices two\n",
])
def test_bad_network_files(text):
    with pytest.raises(ParseError):
        parse_network(text)


def test_bad_chain_files():
    with pytest.raises(ParseError):
        parse_chain("states 2\np 0 1 1\np 0 1 1\n")
    with pytest.raises(ParseError):
        parse_chain("states 2\nq 0 1 1\n")


def test_costs():
    k = parse_costs("default 2\nk 0 1 5\n", Labels(["0", "1"]))
    assert k.tolist() == [[2.0, 5.0], [2.0, 2.0]]
    with pytest.raises(ParseError):
        parse_costs("cost 0 1 5\n", Labels(["0", "1"]))


# -- commands ---------------------------------------------------------------------

def test_solve_resistor(files, capsys):
    code, out, _ = run(capsys, "solve", "--network", files["resistor.net"], "--boundary", "a=1,b=0")
    assert code == 0
    assert "a->b 0.5" in out


def test_solve_fixture_csv(files, capsys):
    code, out, _ = run(capsys, "solve", "--network", files["fixture.net"], "--boundary", "a=5,b=0", "--csv")
    assert code == 0
    rows = {line.split(",")[1]: line.split(",") for line in out.splitlines()[1:]}
    assert float(rows["x"][2]) == pytest.approx(92 / 66, rel=1e-12)
    assert float(rows["y"][2]) == pytest.approx(172 / 66, rel=1e-12)


def test_malformed_file_no_output(files, capsys):
    code, out, err = run(capsys, "solve", "--network", files["bad.net"], "--boundary", "0=1")
    assert code == 1
    assert out == ""
    assert "wire" in err


def test_missing_file(capsys, tmp_path):
    code, out, _ = run(capsys, "solve", "--network", str(tmp_path / "nope.net"), "--boundary", "0=1")
    assert code == 1 and out == ""


def test_quantities_cycle(files, capsys):
    code, out, _ = run(capsys, "quantities", "--chain", files["cycle.chain"], "--A", "0", "--B", "2",
                       "--commute", "0", "2", "--k", files["costs.k"])
    assert code == 0
    values = {}
    for line in out.splitlines():
        head, _, tail = line.rpartition(" ")
        values[head.strip()] = tail
    assert float(values["capacity (probabilistic)"]) == pytest.approx(0.79 / 3, rel=1e-12)
    assert float(values["R_eff"]) == pytest.approx(3 / 0.79, rel=1e-12)
    assert float(values["escape probability"]) == pytest.approx(0.79, rel=1e-12)
    assert "not reversible" in out


def test_quantities_reversible_note(files, capsys):
    code, out, _ = run(capsys, "quantities", "--chain", files["sym.chain"], "--A", "0", "--B", "2")
    assert code == 0
    assert "all gains 1" in out


def test_quantities_overlapping_sets(files, capsys):
    code, out, _ = run(capsys, "quantities", "--chain", files["cycle.chain"], "--A", "0,1", "--B", "1")
    assert code == 1 and out == ""


def test_nonmonotone_csv(capsys):
    code, out, _ = run(capsys, "nonmonotone", "--rmin", "0.5", "--rmax", "16", "--steps", "6")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "R,u_x,u_y,R_eff"
    rows = [list(map(float, line.split(","))) for line in lines[1:7]]
    assert [r[0] for r in rows] == [0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
    assert rows[2][3] == pytest.approx(2970 / 1348, rel=1e-12)
    assert rows[4][3] == pytest.approx(7020 / 3448, rel=1e-12)
    assert all(a[3] > b[3] for a, b in zip(rows, rows[1:]))
    assert lines[-1].startswith("# fit") and "1.9285714285714286" in lines[-1]


def test_nonmonotone_bad_range(capsys):
    code, out, _ = run(capsys, "nonmonotone", "--rmin", "2", "--rmax", "1")
    assert code == 1 and out == ""


def test_solve_accepts_non_markovian(files, capsys):
    code, _, _ = run(capsys, "solve", "--network", files["amp.net"], "--boundary", "0=1")
    assert code == 0


def test_truncation_is_precondition_failure(files, capsys):
    code, out, err = run(capsys, "mc", "commute", "--chain", files["cycle.chain"], "--a", "0", "--b", "2",
                         "--n", "1000", "--max-steps", "1")
    assert code == 2 and out == ""
    assert "max_steps" in err


def test_mc_flip_commute(files, capsys):
    code, out, _ = run(capsys, "mc", "commute", "--chain", files["flip.chain"], "--a", "0", "--b", "1",
                       "--n", "1000", "--seed", "3")
    assert code == 0
    assert "estimate 2.0 se 0.0" in out


def test_mc_absorption_deterministic(files, capsys):
    argv = ["mc", "absorption", "--chain", files["cycle.chain"], "--A", "0", "--B", "2",
            "--start", "1", "--n", "50000", "--seed", "11"]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    z = float(out1.split(" z ")[1])
    assert abs(z) <= 4


def test_mc_edges(files, capsys):
    code, out, _ = run(capsys, "mc", "edges", "--chain", files["cycle.chain"], "--a", "0", "--B", "2",
                       "--n", "20000")
    assert code == 0
    assert out.splitlines()[0] == "edge,estimate,se,analytic,z"


def test_mc_disagreement_exit_code(files, capsys, monkeypatch):
    import nrnet.cli as cli

    monkeypatch.setattr(cli, "absorption_probabilities", lambda *a: np.array([1.0, 0.9, 0.0]))
    code, out, _ = run(capsys, "mc", "absorption", "--chain", files["cycle.chain"], "--A", "0",
                       "--B", "2", "--start", "1", "--n", "20000")
    assert code == 3
    assert "DISAGREEMENT" in out


def test_mc_missing_option(files):
    with pytest.raises(SystemExit) as info:
        main(["mc", "escape", "--chain", files["cycle.chain"], "--A", "0"])
    assert info.value.code == 1


def test_fixture_command(capsys):
    code, out, _ = run(capsys, "fixture", "--r", "2")
    assert code == 0
    net, _ = parse_network(out)
    assert net == fixtures.nonmonotone_network(2.0)
