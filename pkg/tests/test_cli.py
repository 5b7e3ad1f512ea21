import csv
import json
from pathlib import Path

import pytest

from hhnet import io
from hhnet.cli import main, parse_grid
from hhnet.errors import ValidationError
from hhnet.randgraph import clique_of_cliques


def write_bundle(directory: Path, bundle, prefix=""):
    directory.mkdir(parents=True, exist_ok=True)
    nodes = directory / f"{prefix}nodes.csv"
    edges = directory / f"{prefix}edges.csv"
    nodes.write_text(io.csv_text(io.NODE_COLUMNS, [
        (v, bundle.partition.household_of(v), bundle.attributes.gender(v)) for v in bundle.network.nodes]))
    edges.write_text(io.csv_text(io.EDGE_COLUMNS, [
        (e.source, e.target, e.layer, e.weight) for e in bundle.network.edges]))
    return nodes, edges


@pytest.fixture
def fixture_files(tmp_path):
    nodes = tmp_path / "nodes.csv"
    edges = tmp_path / "edges.csv"
    nodes.write_text("person_id,household_id,gender\n1,h1,F\n2,h1,M\n3,h2,F\n4,h2,M\n")
    edges.write_text("source,target,layer,weight\n1,2,kin,1\n1,3,kin,1\n2,4,rice,1\n3,4,kin,1\n")
    return nodes, edges


@pytest.fixture
def synthetic(tmp_path):
    return write_bundle(tmp_path / "syn", clique_of_cliques(seed=1))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_contract_fixture_gives_one_row(tmp_path, fixture_files):
    nodes, edges = fixture_files
    out = tmp_path / "hh.csv"
    assert main(["contract", "--rule", "basic", "--nodes", str(nodes), "--edges", str(edges),
                 "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 1 and {rows[0]["source"], rows[0]["target"]} == {"h1", "h2"}
    prov = json.loads(Path(str(out) + ".provenance.json").read_text())
    assert prov["provenance"]["rule"] == "basic"
    manifest = json.loads(Path(str(out) + ".manifest.json").read_text())
    assert manifest["inputs"][str(nodes)] == io.sha256(nodes)
    assert manifest["outputs"][str(out)] == io.sha256(out)


def test_all_contraction_rules_run(tmp_path, fixture_files):
    nodes, edges = fixture_files
    base = ["--nodes", str(nodes), "--edges", str(edges)]
    for k, extra in enumerate([["--rule", "weighted", "--normalize"], ["--rule", "gendered", "--gender", "F"],
                               ["--rule", "layered", "--layers", "rice"]]):
        assert main(["contract", *extra, *base, "--out", str(tmp_path / f"o{k}.csv")]) == 0
    assert len(read_csv(tmp_path / "o2.csv")) == 1


def test_outputs_are_not_overwritten_without_force(tmp_path, fixture_files):
    nodes, edges = fixture_files
    args = ["contract", "--nodes", str(nodes), "--edges", str(edges), "--out", str(tmp_path / "o.csv")]
    assert main(args) == 0
    assert main(args) == 3
    assert main(["--force", *args]) == 0
    assert main([*args, "--force"]) == 0


def test_exit_codes(tmp_path, fixture_files):
    nodes, edges = fixture_files
    assert main(["metrics", "--nodes", str(tmp_path / "nope.csv"), "--edges", str(edges)]) == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("person_id,household_id\n1,h1\n1,h2\n")
    assert main(["metrics", "--nodes", str(bad), "--edges", str(edges)]) == 2
    assert main(["contract", "--rule", "layered", "--layers", "zzz", "--nodes", str(nodes),
                 "--edges", str(edges), "--out", str(tmp_path / "x.csv")]) == 2
    # same-gender components that share no household with the full network's
    n2 = tmp_path / "n2.csv"
    e2 = tmp_path / "e2.csv"
    n2.write_text("person_id,household_id,gender\na,A,M\nb,B,M\nc,C,M\nd,D,F\ne,E,F\n")
    e2.write_text("source,target\na,b\nb,c\nd,e\n")
    assert main(["dc-gendered", "--nodes", str(n2), "--edges", str(e2), "--out", str(tmp_path / "g.json")]) == 4


def test_validation_errors_carry_line_numbers(tmp_path, fixture_files, capsys):
    nodes, _ = fixture_files
    edges = tmp_path / "e.csv"
    edges.write_text("source,target\n1,2\n1,99\n")
    assert main(["metrics", "--nodes", str(nodes), "--edges", str(edges)]) == 2
    assert f"{edges}: line 3" in capsys.readouterr().err


def test_seed_comes_from_flag_or_environment(tmp_path, synthetic, monkeypatch):
    nodes, edges = synthetic
    monkeypatch.delenv("HHNET_SEED", raising=False)
    base = ["seeds", "--nodes", str(nodes), "--edges", str(edges), "--k", "2", "--reps", "50"]
    assert main([*base, "--out", str(tmp_path / "a.json")]) == 2
    monkeypatch.setenv("HHNET_SEED", "7")
    assert main([*base, "--out", str(tmp_path / "b.json")]) == 0
    assert main([*base, "--seed", "7", "--out", str(tmp_path / "c.json")]) == 0
    b = json.loads((tmp_path / "b.json").read_text())
    c = json.loads((tmp_path / "c.json").read_text())
    assert b["params"]["seed"] == 7
    assert b["result"] == c["result"]


def test_config_file_with_flag_override(tmp_path, synthetic):
    nodes, edges = synthetic
    seeds = tmp_path / "seeds.txt"
    seeds.write_text("0\n5\n")
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "cascade", "nodes": str(nodes), "edges": str(edges),
                               "seeds": str(seeds), "reps": 10, "seed": 1, "q": 0.2}))
    out = tmp_path / "c.json"
    assert main(["--config", str(cfg), "cascade", "--reps", "30", "--out", str(out)]) == 0
    result = json.loads(out.read_text())
    assert result["params"]["reps"] == 30 and result["params"]["q"] == 0.2
    assert len(result["result"]["reaches"]) == 30
    cfg.write_text(json.dumps({"command": "cascade", "bogus": 1}))
    assert main(["--config", str(cfg), "--force", "cascade", "--out", str(out)]) == 2


@pytest.mark.parametrize("cmd", [
    ["seeds", "--k", "3", "--reps", "100", "--seed", "4"],
    ["sweep-inversity", "--grid", "0.2:1.0:0.4", "--reps", "10", "--seed", "2"],
    ["metrics", "--partition-from-attributes"],
    ["dc", "--gendered", "F,M", "--T", "3"],
])
def test_rerun_from_manifest_is_byte_identical(tmp_path, synthetic, cmd):
    nodes, edges = synthetic
    out = tmp_path / "out"
    assert main([*cmd, "--nodes", str(nodes), "--edges", str(edges), "--out", str(out)]) == 0
    before = out.read_bytes()
    assert main(["rerun", str(out) + ".manifest.json"]) == 0
    assert out.read_bytes() == before


def test_rerun_refuses_changed_inputs(tmp_path, synthetic):
    nodes, edges = synthetic
    out = tmp_path / "m.json"
    assert main(["metrics", "--nodes", str(nodes), "--edges", str(edges), "--out", str(out)]) == 0
    edges.write_text(edges.read_text() + "0,39,extra,1\n")
    assert main(["rerun", str(out) + ".manifest.json"]) == 2


def test_sweep_csv_columns(tmp_path, synthetic):
    nodes, edges = synthetic
    out = tmp_path / "s.csv"
    assert main(["sweep-inversity", "--nodes", str(nodes), "--edges", str(edges), "--grid", "0.1:1.0:0.1",
                 "--reps", "5", "--seed", "1", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["p", "mean_inversity", "q05", "q95", "undefined_count"]
    assert [float(r["p"]) for r in rows] == [round(0.1 * k, 1) for k in range(1, 11)]


def test_parse_grid():
    assert parse_grid("0.1:0.5:0.2") == [0.1, 0.3, 0.5]
    assert parse_grid("0,0.5,1") == [0.0, 0.5, 1.0]
    with pytest.raises(ValidationError):
        parse_grid("1:0:0.1")


def test_gen_er_and_verify_er(tmp_path):
    edges = tmp_path / "er.csv"
    nodes = tmp_path / "er_nodes.csv"
    assert main(["gen-er", "--n", "20", "--p", "0.2", "--seed", "1", "--sizes", "2,3",
                 "--nodes-out", str(nodes), "--out", str(edges)]) == 0
    assert main(["metrics", "--nodes", str(nodes), "--edges", str(edges), "--partition-from-attributes",
                 "--out", str(tmp_path / "m.json")]) == 0
    report = tmp_path / "v.json"
    assert main(["verify-er", "--n", "10", "--p", "0", "--sizes", "1,2,3,4", "--draws", "100",
                 "--seed", "3", "--out", str(report)]) == 0
    rep = json.loads(report.read_text())["result"]
    assert rep["pass"] and all(pr["empirical"] == 0 for pr in rep["pairs"])


def test_cascade_compare_and_cross_eval(tmp_path, synthetic):
    nodes, edges = synthetic
    s_i = tmp_path / "si.json"
    s_h = tmp_path / "sh.json"
    assert main(["seeds", "--nodes", str(nodes), "--edges", str(edges), "--k", "3", "--reps", "100",
                 "--seed", "1", "--out", str(s_i)]) == 0
    assert main(["seeds", "--nodes", str(nodes), "--edges", str(edges), "--k", "3", "--reps", "100",
                 "--seed", "1", "--level", "household", "--out", str(s_h)]) == 0
    si = json.loads(s_i.read_text())["result"]["seeds"]
    sh = json.loads(s_h.read_text())["result"]["seeds"]
    s_i.write_text(json.dumps(si))
    s_h.write_text(json.dumps(sh))
    out = tmp_path / "cmp.json"
    assert main(["compare-seeds", "--nodes", str(nodes), "--individual-seeds", str(s_i),
                 "--household-seeds", str(s_h), "--out", str(out)]) == 0
    assert 0 <= json.loads(out.read_text())["result"]["proportion"] <= 1
    out = tmp_path / "x.json"
    assert main(["cross-eval", "--nodes", str(nodes), "--edges", str(edges), "--individual-seeds", str(s_i),
                 "--household-seeds", str(s_h), "--reps", "100", "--seed", "2", "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["result"]["reach"]) == 4


def test_recommend(tmp_path, monkeypatch, capsys):
    fixtures = Path(__file__).parent / "fixtures"
    out = tmp_path / "r.json"
    assert main(["recommend", "--answers", str(fixtures / "answers_salt.json"), "--out", str(out)]) == 0
    rec = json.loads(out.read_text())["result"]["recommendation"]
    assert rec["node_scope"] == "role-subgroup" and rec["trace"]
    import io as stdio
    monkeypatch.setattr("sys.stdin", stdio.StringIO("yes\nr\nno\nr\nyes\n\nr\nno\nr\n"))
    assert main(["recommend", "--interactive"]) == 0
    shown = json.loads(capsys.readouterr().out)
    assert shown["result"]["recommendation"]["level"] == "individual"
    assert main(["recommend"]) == 2


def make_villages(root: Path, count=3, malformed=None):
    for k in range(count):
        name = f"village{k:02d}"
        if k == malformed:
            (root / name).mkdir(parents=True)
            (root / name / "nodes.csv").write_text("person_id,household_id\n1,a\n")
            (root / name / "edges.csv").write_text("source,target\n1,2\n")
        else:
            write_bundle(root / name, clique_of_cliques(seed=k, cross_degree=0.8))


def test_ingest_skips_malformed_village(tmp_path):
    make_villages(tmp_path, 3, malformed=1)
    bundles, skipped = io.ingest_village_bundle(tmp_path)
    assert sorted(bundles) == ["village00", "village02"]
    assert [s["village"] for s in skipped] == ["village01"]
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(ValidationError):
        io.ingest_village_bundle(empty)


def test_flat_village_layout(tmp_path):
    write_bundle(tmp_path, clique_of_cliques(seed=0), prefix="alpha_")
    write_bundle(tmp_path, clique_of_cliques(seed=1), prefix="beta_")
    bundles, skipped = io.ingest_village_bundle(tmp_path)
    assert sorted(bundles) == ["alpha", "beta"] and not skipped


def test_batch_outputs_and_order_independence(tmp_path):
    make_villages(tmp_path / "v", 2)
    # same villages created in the opposite order
    for k in (1, 0):
        write_bundle(tmp_path / "w" / f"village{k:02d}", clique_of_cliques(seed=k, cross_degree=0.8))
    common = ["--k", "2", "--reps", "50", "--seed", "3", "--dc-genders", "F,M", "--T", "2",
              "--sweep-grid", "0.5,1.0", "--sweep-reps", "5"]
    assert main(["batch", "--villages", str(tmp_path / "v"), "--out", str(tmp_path / "o1"), *common]) == 0
    assert main(["batch", "--villages", str(tmp_path / "w"), "--out", str(tmp_path / "o2"),
                 "--workers", "2", *common]) == 0
    for name in ("metrics.csv", "seed_overlap.csv", "dc_correlations.csv", "sweep.csv"):
        assert (tmp_path / "o1" / name).read_bytes() == (tmp_path / "o2" / name).read_bytes()
    rows = read_csv(tmp_path / "o1" / "metrics.csv")
    assert list(rows[0]) == ["village", "network", "metric", "value"]
    per_village = {}
    for r in rows:
        per_village.setdefault(r["village"], set()).add((r["network"], r["metric"]))
    assert sorted(per_village) == ["village00", "village01"]
    assert all(("household", "average_clustering") in v for v in per_village.values())
    assert len(read_csv(tmp_path / "o1" / "seed_overlap.csv")) == 2
    assert (tmp_path / "o1" / "manifest.json").exists()
