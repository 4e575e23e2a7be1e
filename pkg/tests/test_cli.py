import json

import pytest

from cli import main
from services.text_io import load_ideal, parse_ideal_text
from tests.conftest import SEVEN_GENS, STABLE_NOT_BOREL


def run(capsys, *argv):
    status = main(list(argv))
    return status, capsys.readouterr().out


def test_polarize(capsys):
    status, out = run(capsys, "polarize", "--ideal", "x1^3, x1^2*x2, x1*x2^2, x2^3")
    assert status == 0
    assert out.splitlines() == [
        "x[1,1]*x[1,2]*x[1,3]",
        "x[1,1]*x[1,2]*x[2,3]",
        "x[1,1]*x[2,2]*x[2,3]",
        "x[2,1]*x[2,2]*x[2,3]",
    ]


def test_polarize_json_echoes_the_config(capsys):
    status, out = run(capsys, "polarize", "--ideal", "x1^2, x1*x2, x2^2", "--format", "json")
    assert status == 0
    doc = json.loads(out)
    assert doc["config"]["command"] == "polarize"
    assert doc["result"]["ring"] == {"kind": "double", "n": 2, "d": 2}


def test_format_help_names_the_document(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["polarize", "--help"])
    assert exc.value.code == 0
    assert "structured document" in capsys.readouterr().out


def test_sq_of_a_variable(capsys):
    assert run(capsys, "sq", "--ideal", "x1") == (0, "x1\n")


def test_gamma_matches_sq(capsys, small_corpus):
    for ideal in small_corpus:
        text = ", ".join(str(g) for g in ideal.gens)
        a = ",".join(str(k) for k in range(ideal.maxdeg))
        _, sq_out = run(capsys, "sq", "--ideal", text)
        status, gamma_out = run(capsys, "gamma", "--ideal", text, f"--a={a}")
        assert status == 0
        assert gamma_out == sq_out


def test_gamma_needs_a(capsys):
    status, _ = run(capsys, "gamma", "--ideal", "x1^2")
    assert status == 2


def test_resolve(capsys):
    status, out = run(capsys, "resolve", "--ideal", SEVEN_GENS)
    assert status == 0
    assert "ranks [1, 7, 12, 8, 2]" in out


def test_resolve_rejects_non_borel(capsys):
    status, _ = run(capsys, "resolve", "--ideal", STABLE_NOT_BOREL)
    assert status == 2
    status, out = run(capsys, "resolve", "--ideal", STABLE_NOT_BOREL, "--closure")
    assert status == 0


def test_resolved_document_verifies(capsys, tmp_path):
    ideal_file = tmp_path / "seven.txt"
    ideal_file.write_text(SEVEN_GENS.replace(", ", "\n"))
    for target in ("bpol", "S"):
        status, out = run(capsys, "resolve", str(ideal_file), "--target", target, "--format", "json")
        assert status == 0
        doc_file = tmp_path / f"{target}.json"
        doc_file.write_text(out)
        status, report = run(capsys, "verify", str(ideal_file), "--complex", str(doc_file))
        assert status == 0, report
        assert report.startswith("PASS")


def test_corrupted_document_fails(capsys, tmp_path):
    status, out = run(capsys, "resolve", "--ideal", SEVEN_GENS, "--format", "json")
    doc = json.loads(out)
    entry = doc["levels"][2]["entries"][0]
    entry["sign"] = -entry["sign"]
    doc_file = tmp_path / "broken.json"
    doc_file.write_text(json.dumps(doc))
    status, report = run(capsys, "verify", "--ideal", SEVEN_GENS, "--complex", str(doc_file))
    assert status == 1
    assert report.startswith("FAIL")


def test_verify_full(capsys):
    status, out = run(capsys, "verify", "--ideal", "x1^2, x1*x2, x1*x3, x2^2")
    assert status == 0, out
    assert out.splitlines()[-1].startswith("PASS")


def test_verify_bpol_on_stable_ideal(capsys):
    status, out = run(capsys, "verify", "--ideal", STABLE_NOT_BOREL, "--bpol")
    assert status == 1
    assert "Betti tables DIFFER" in out
    assert "beta[1,3]: 4 for I, 3 for b-pol(I)" in out


def test_betti(capsys):
    status, out = run(capsys, "betti", "--ideal", SEVEN_GENS, "--bpol")
    assert status == 0
    assert out.splitlines()[-1].split() == ["total", "7", "12", "8", "2"]


def test_diagram(capsys):
    status, out = run(
        capsys, "diagram", "--ideal", "x1^2*x2*x6^2", "--closure",
        "--generator", "x1^2*x2*x6^2", "--rows", "1,2,3,4,5",
    )
    assert status == 0
    assert "BBW..\n..BW.\n...W.\n...W.\n...W.\n...BB" in out
    assert "rmv block (1,3) (2,3)" in out


def test_diagram_from_grid(capsys, tmp_path):
    args = ("diagram", "--ideal", "x1^2*x2*x6^2", "--closure")
    _, out = run(capsys, *args, "--generator", "x1^2*x2*x6^2", "--rows", "1,3,4")
    pair_line, *rest = out.splitlines()
    diagram = "\n".join(line for line in rest if not line.startswith("rmv"))
    assert diagram.splitlines()[1] == "..B.."
    grid = tmp_path / "pair.txt"
    grid.write_text(diagram)
    status, again = run(capsys, *args, "--grid", str(grid))
    assert status == 0
    assert again.splitlines()[0] == pair_line


def test_poset_dot(capsys):
    status, out = run(capsys, "poset", "--ideal", SEVEN_GENS, "--format", "dot")
    assert status == 0
    assert out.count("label=") == 29


def test_morse_cell_and_verify(capsys):
    status, out = run(capsys, "morse", "--ideal", SEVEN_GENS, "--cell", "[3,4,5]")
    assert status == 0
    assert "u = 2, n = x[1,1]*x[3,2]" in out
    assert "matched with [2,3,4,5]" in out

    status, out = run(capsys, "morse", "--ideal", SEVEN_GENS, "--verify")
    assert status == 0
    assert out.startswith("PASS")
    assert "[2,3,4,5] -> [3,4,5]" in out


def test_morse_size_bound(capsys):
    status, _ = run(capsys, "morse", "--ideal", SEVEN_GENS, "--max-gens", "4")
    assert status == 2


def test_corpus(capsys):
    status, out = run(
        capsys, "corpus", "--seed", "3", "--size", "2", "--max-n", "3", "--max-degree", "2", "--morse-limit", "0"
    )
    assert status == 0
    assert out.splitlines()[-1] == "2/2 ideals passed"


def test_lcm_lattice_joins(capsys):
    ideal = "x1^2, x1*x2, x1*x3, x2^2, x2*x3"
    status, out = run(
        capsys, "lcm-lattice", "--ideal", ideal,
        "--join", "x1*x2", "x1*x3", "--join", "x1*x2", "x2*x3", "--join", "x1*x3", "x2*x3",
    )
    assert status == 0
    assert "joins: x1*x2*x3, x1*x2*x3, x1*x2*x3" in out
    assert "distinct: False, coincide: True" in out

    status, out = run(
        capsys, "lcm-lattice", "--ideal", ideal, "--bpol",
        "--join", "x[1,1]*x[2,2]", "x[1,1]*x[3,2]",
        "--join", "x[1,1]*x[2,2]", "x[2,1]*x[3,2]",
        "--join", "x[1,1]*x[3,2]", "x[2,1]*x[3,2]",
    )
    assert status == 0
    assert "distinct: True, coincide: False" in out


def test_missing_input(capsys, tmp_path):
    assert main(["polarize"]) == 2
    assert main(["polarize", str(tmp_path / "absent.txt")]) == 2
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_outputs_are_repeatable(capsys):
    _, first = run(capsys, "resolve", "--ideal", SEVEN_GENS, "--format", "json")
    _, second = run(capsys, "resolve", "--ideal", SEVEN_GENS, "--format", "json")
    assert first == second


def test_unreadable_complex_document(capsys, tmp_path):
    doc_file = tmp_path / "broken.json"
    doc_file.write_text("{not json")
    status = main(["verify", "--ideal", SEVEN_GENS, "--complex", str(doc_file)])
    assert status == 2
    assert "invalid complex document" in capsys.readouterr().err


def test_json_output_reads_back_as_input(capsys, tmp_path):
    status, out = run(capsys, "sq", "--ideal", "x1^2, x1*x2, x2^2", "--format", "json")
    assert status == 0
    sq_file = tmp_path / "sq.json"
    sq_file.write_text(out)
    status, out = run(capsys, "polarize", str(sq_file))
    assert status == 0
    assert out.splitlines() == ["x[1,1]*x[2,2]", "x[1,1]*x[3,2]", "x[2,1]*x[3,2]"]

    status, out = run(capsys, "polarize", "--ideal", SEVEN_GENS, "--format", "json")
    polarized_file = tmp_path / "bpol.json"
    polarized_file.write_text(out)
    _, direct = run(capsys, "polarize", "--ideal", SEVEN_GENS)
    status, _ = run(capsys, "lcm-lattice", str(polarized_file))
    assert status == 0
    assert load_ideal(polarized_file).gens == parse_ideal_text(direct).gens


@pytest.mark.slow
def test_full_corpus(capsys):
    status, out = run(
        capsys, "corpus", "--seed", "2024", "--size", "50",
        "--max-n", "5", "--max-degree", "5", "--max-gens", "30",
    )
    rows = out.splitlines()
    assert status == 0
    assert rows[-1] == "50/50 ideals passed"
    assert all(row.startswith("PASS") for row in rows[:-1])
