import json

import pytest

from cutsdp.cli import main
from cutsdp.graph import load_edge_list
from cutsdp.ordering import cutwidth_of_ordering, exact_cutwidth_subset_dp, Permutation


def read_sections(path):
    """Split a CLI CSV file into {section: list of row dicts}."""
    sections = {}
    current = None
    header = None
    with open(path, encoding="utf-8") as fp:
        for line in fp:
            line = line.rstrip("\n")
            if line.startswith("# generated"):
                continue
            if line.startswith("# "):
                current = line[2:]
                sections[current] = []
                header = None
                continue
            if not line:
                continue
            if header is None:
                header = line.split(",")
                continue
            sections[current].append(dict(zip(header, line.split(","))))
    return sections


@pytest.fixture
def k2_file(tmp_path):
    path = tmp_path / "k2.txt"
    path.write_text("2 1\n1 2\n")
    return str(path)


class TestGen:
    def test_roundtrip(self, tmp_path):
        out = str(tmp_path / "g.txt")
        assert main(["gen", "--er", "7,0.5", "--seed", "3", "--out", out]) == 0
        g = load_edge_list(open(out).read())
        assert g.n == 7

    def test_deterministic(self, tmp_path):
        a, b = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
        main(["gen", "--rgg", "6,0.5", "--seed", "9", "--out", a, "--no-timestamp"])
        main(["gen", "--rgg", "6,0.5", "--seed", "9", "--out", b, "--no-timestamp"])
        assert open(a).read() == open(b).read()


class TestExact:
    def test_matches_oracle(self, capsys):
        assert main(["exact", "--er", "8,0.5", "--seed", "1"]) == 0
        printed = int(capsys.readouterr().out.strip())
        from cutsdp.graph import gen_erdos_renyi

        assert printed == exact_cutwidth_subset_dp(gen_erdos_renyi(8, 0.5, seed=1))

    def test_size_cap_exit_code(self):
        assert main(["exact", "--er", "30,0.5", "--seed", "1"]) == 3


class TestLb:
    def test_k2_summary(self, k2_file, tmp_path):
        out = str(tmp_path / "lb.csv")
        code = main(["lb", "--graph", k2_file, "--seed", "1", "--out", out,
                     "--no-timestamp"])
        assert code == 0
        sections = read_sections(out)
        summary = sections["summary"][0]
        assert float(summary["lb_init"]) == pytest.approx(0.5, abs=1e-3)
        assert float(summary["lb_final"]) == pytest.approx(0.5, abs=1e-3)
        assert summary["lb_integer"] == "1"
        assert summary["ub"] == "1"
        assert sections["iterations"][0]["iteration"] == "0"

    def test_byte_identical_reruns(self, k2_file, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = str(tmp_path / name)
            main(["lb", "--graph", k2_file, "--seed", "7", "--out", out,
                  "--no-timestamp"])
            outs.append(open(out).read())
        assert outs[0] == outs[1]

    def test_json_lines(self, k2_file, tmp_path):
        out = str(tmp_path / "lb.jsonl")
        main(["lb", "--graph", k2_file, "--seed", "1", "--out", out,
              "--no-timestamp", "--format", "json-lines"])
        records = [json.loads(line) for line in open(out)]
        assert any(r.get("section") == "summary" for r in records)


class TestUb:
    def test_witness_is_valid(self, tmp_path, capsys):
        out = str(tmp_path / "g.txt")
        main(["gen", "--er", "7,0.6", "--seed", "2", "--out", out])
        assert main(["ub", "--graph", out, "--seed", "2"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        ub = int(lines[0])
        witness = [int(v) for v in lines[1].split()]
        g = load_edge_list(open(out).read())
        assert sorted(witness) == list(range(1, 8))
        assert cutwidth_of_ordering(g, Permutation.from_order(witness)) == ub


class TestBench:
    def test_grid_rows_and_invariants(self, tmp_path):
        out = str(tmp_path / "bench.csv")
        code = main(["bench", "--er", "6,0.4:0.6:0.2", "--seeds", "1..2",
                     "--out", out, "--no-timestamp"])
        assert code == 0
        rows = read_sections(out)["summary"]
        assert len(rows) == 4  # 2 p-values x 2 seeds
        for row in rows:
            assert float(row["lb_final"]) >= float(row["lb_init"]) - 2e-3
            assert int(row["ub"]) >= int(row["lb_integer"])

    def test_usage_error(self):
        assert main(["bench", "--seeds", "1"]) == 1


class TestTrace:
    def test_schedules_present_and_padded(self, tmp_path):
        out = str(tmp_path / "trace.csv")
        code = main(["trace", "--er", "6,0.6", "--seed", "3", "--max-iter", "3",
                     "--out", out, "--no-timestamp"])
        assert code == 0
        rows = read_sections(out)["trace"]
        schedules = {r["schedule"] for r in rows}
        assert schedules == {"dicycle", "triangle", "all"}
        for schedule in schedules:
            iters = [int(r["iteration"]) for r in rows if r["schedule"] == schedule]
            assert iters == [0, 1, 2, 3]


class TestErrorPaths:
    def test_usage_exit(self):
        assert main(["lb", "--er", "5,0.5", "--rgg", "5,0.5"]) == 1
        assert main(["lb"]) == 1

    def test_unreadable_file(self):
        assert main(["lb", "--graph", "/nonexistent/file.txt"]) == 1

    def test_parse_error_exit(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("3 1\n1 9\n")
        assert main(["lb", "--graph", str(bad)]) == 2
