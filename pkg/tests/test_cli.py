import json
import math
import re

import numpy as np
import pytest

from kgvec.cli import main
from kgvec.graph import build_vocabulary
from kgvec.lstm import load_scorer
from kgvec.model import EmbeddingModel, save_model
from kgvec.synth import typed_graph, write_ntriples


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A small typed graph plus a trained model, shared across CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "graph.nt"
    write_ntriples(
        data,
        typed_graph(seed=5, n_entities=60, n_classes=3, n_relations=5, n_facts=240),
    )
    model = root / "model.txt"
    rc = main(
        [
            "train",
            str(data),
            "--out",
            str(model),
            "--dim",
            "8",
            "--epochs",
            "4",
            "--seed",
            "3",
        ]
    )
    assert rc == 0
    return root, data, model


def _train_payload(capsys):
    """The machine-readable JSON line a train run leaves on stdout."""
    out = capsys.readouterr().out
    return json.loads(out.strip().splitlines()[-1]), out


def test_train_reports_phases_rate_and_stats(tmp_path, capsys):
    data = tmp_path / "g.nt"
    write_ntriples(data, typed_graph(seed=2, n_entities=30, n_classes=2, n_relations=3, n_facts=90))
    model = tmp_path / "m.txt"
    stats = tmp_path / "stats.json"
    rc = main(
        ["train", str(data), "--out", str(model), "--dim", "6", "--epochs", "2",
         "--stats", str(stats), "--vocab-out", str(tmp_path / "vocab.tsv")]
    )
    assert rc == 0
    payload, out = _train_payload(capsys)
    for phase in ("vocab-count", "train", "save"):
        assert f"phase {phase}:" in out
        assert payload["phases"][phase] >= 0
    assert "rate:" in out
    assert payload["rate"] > 0
    assert payload["vocabulary"] > 0
    assert payload["parse"]["triples"] > 0
    assert len(payload["epoch_losses"]) == 2

    header = model.read_text().splitlines()[0].split()
    assert header == [str(payload["vocabulary"]), "6"]
    assert len(model.read_text().splitlines()) == payload["vocabulary"] + 1
    assert json.loads(stats.read_text()) == payload
    assert (tmp_path / "vocab.tsv").exists()


def test_min_count_shrinks_vocabulary(tmp_path, capsys):
    data = tmp_path / "g.nt"
    write_ntriples(data, typed_graph(seed=4, n_entities=40, n_classes=2, n_relations=4, n_facts=120))
    sizes = {}
    for mc in (1, 3):
        rc = main(
            ["train", str(data), "--out", str(tmp_path / f"m{mc}.txt"),
             "--dim", "4", "--epochs", "1", "--min-count", str(mc)]
        )
        assert rc == 0
        sizes[mc], _ = _train_payload(capsys)
    assert sizes[3]["vocabulary"] < sizes[1]["vocabulary"]


def test_unreadable_input_is_usage_error(tmp_path, capsys):
    rc = main(["train", str(tmp_path / "missing.nt"), "--out", str(tmp_path / "m.txt")])
    assert rc == 2
    assert "ingest" in capsys.readouterr().err


def test_unreadable_model_is_usage_error(workspace, tmp_path, capsys):
    _, data, _ = workspace
    rc = main(["eval", str(tmp_path / "no-model.txt"), str(data)])
    assert rc == 2
    assert "ingest" in capsys.readouterr().err


def test_train_byte_identical_across_reruns(tmp_path):
    data = tmp_path / "g.nt"
    write_ntriples(data, typed_graph(seed=6, n_entities=30, n_classes=2, n_relations=3, n_facts=100))
    outs = []
    for name in ("a.txt", "b.txt"):
        rc = main(
            ["train", str(data), "--out", str(tmp_path / name),
             "--dim", "5", "--epochs", "2", "--seed", "9"]
        )
        assert rc == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    rc = main(
        ["train", str(data), "--out", str(tmp_path / "c.txt"),
         "--dim", "5", "--epochs", "2", "--seed", "10"]
    )
    assert rc == 0
    assert (tmp_path / "c.txt").read_bytes() != outs[0]


def test_eval_writes_report(workspace, capsys):
    root, data, model = workspace
    rc = main(["eval", str(model), str(data), "--seed", "2"])
    assert rc == 0
    captured = capsys.readouterr()
    payload = json.loads(captured.out)
    assert set(payload) >= {"hits@1", "hits@3", "hits@10", "mean_rank", "skipped"}
    assert payload["hits@1"] <= payload["hits@3"] <= payload["hits@10"]
    assert payload["config"]["scorer"] == "analogy"
    assert "hits@1" in captured.err and "mean rank" in captured.err


def test_eval_report_deterministic(workspace, tmp_path):
    root, data, model = workspace
    reports = []
    for name in ("r1.json", "r2.json"):
        rc = main(
            ["eval", str(model), str(data), "--seed", "7", "--out", str(tmp_path / name)]
        )
        assert rc == 0
        reports.append((tmp_path / name).read_bytes())
    assert reports[0] == reports[1]


def test_eval_lstm_serialization(workspace, tmp_path, capsys):
    root, data, model = workspace
    scorer_path = tmp_path / "scorer.bin"
    summary_path = tmp_path / "scorer.json"
    rc = main(
        ["eval", str(model), str(data), "--scorer", "lstm", "--scorer-epochs", "2",
         "--seed", "4", "--scorer-out", str(scorer_path), "--dump-json", str(summary_path)]
    )
    assert rc == 0
    capsys.readouterr()
    loaded = load_scorer(scorer_path)
    assert loaded.dim == 8
    summary = json.loads(summary_path.read_text())
    assert summary["dim"] == 8
    assert summary["tensors"]["W_i"]["shape"] == [16, 8]

    rc = main(["info", str(scorer_path)])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["dim"] == 8


def test_eval_scorer_dump_needs_lstm(workspace, tmp_path, capsys):
    root, data, model = workspace
    rc = main(
        ["eval", str(model), str(data), "--scorer", "analogy",
         "--scorer-out", str(tmp_path / "s.bin")]
    )
    assert rc == 2
    assert "error [flags]" in capsys.readouterr().err


def test_metrics_prints_value_and_trace(workspace, tmp_path, capsys):
    root, data, model = workspace
    trace_path = tmp_path / "trace.tsv"
    rc = main(
        ["metrics", str(model), str(data), "--metric", "nst", "--neighbours", "2",
         "--sample", "15", "--stride", "4", "--out", str(trace_path)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    match = re.fullmatch(r"nst = (\d\.\d{10})\n", out)
    assert match
    assert 0.0 <= float(match.group(1)) <= 1.0
    lines = trace_path.read_text().splitlines()
    assert lines[0] == "i\tentity_uri\tpartial_value"
    assert len(lines) == 1 + math.ceil(15 / 4)
    assert lines[-1].split("\t")[0] == "15"


def test_metrics_tct_uses_default_type_predicates(workspace, capsys):
    root, data, model = workspace
    rc = main(["metrics", str(model), str(data), "--metric", "tct", "--sample", "20"])
    assert rc == 0
    value = float(capsys.readouterr().out.split("=")[1])
    assert 0.0 <= value <= 1.0


def test_metrics_ordering_file(workspace, tmp_path, capsys):
    root, data, model = workspace
    uris = [f"http://example.org/entity/{i}" for i in range(5)]
    ordering = tmp_path / "order.txt"
    ordering.write_text("\n".join(uris) + "\n")
    trace_path = tmp_path / "trace.tsv"
    rc = main(
        ["metrics", str(model), str(data), "--ordering", str(ordering),
         "--out", str(trace_path)]
    )
    assert rc == 0
    capsys.readouterr()
    rows = trace_path.read_text().splitlines()[1:]
    assert len(rows) == 5
    assert [r.split("\t")[1] for r in rows] == uris


def test_metrics_clone_graph_reaches_one(tmp_path, capsys):
    raw = [(f"s{i}", "p", "hub") for i in range(5)]
    data = tmp_path / "clone.nt"
    write_ntriples(data, raw)
    vocab = build_vocabulary(raw)
    model = EmbeddingModel.initialize(vocab, 3, dtype=np.float64)
    for i in range(5):
        model.input_vectors[vocab.id_of(f"s{i}")] = [1.0, 2.0, 3.0]
    model.input_vectors[vocab.id_of("hub")] = [-3.0, 0.0, 1.0]
    model_path = tmp_path / "clone.txt"
    save_model(model, model_path)
    ordering = tmp_path / "order.txt"
    ordering.write_text("\n".join(f"s{i}" for i in range(5)) + "\n")
    rc = main(
        ["metrics", str(model_path), str(data), "--ordering", str(ordering),
         "--neighbours", "1"]
    )
    assert rc == 0
    assert capsys.readouterr().out == "nst = 1.0000000000\n"


def test_project_stdout_and_file(workspace, tmp_path, capsys):
    root, data, model = workspace
    rc = main(["project", str(model), "--rank", "2"])
    assert rc == 0
    captured = capsys.readouterr()
    rows = captured.out.splitlines()
    n_tokens = int(model.read_text().splitlines()[0].split()[0])
    assert len(rows) == n_tokens  # loaded models carry no roles: all tokens
    assert all(len(r.split("\t")) == 3 for r in rows)
    assert "explained variance ratio:" in captured.err

    out_path = tmp_path / "coords.tsv"
    rc = main(["project", str(model), "--rank", "2", "--out", str(out_path)])
    assert rc == 0
    capsys.readouterr()
    assert len(out_path.read_text().splitlines()) == n_tokens


def test_project_entity_subset(workspace, tmp_path, capsys):
    root, data, model = workspace
    subset = tmp_path / "subset.txt"
    uris = [f"http://example.org/entity/{i}" for i in range(8)]
    subset.write_text("\n".join(uris) + "\n")
    rc = main(["project", str(model), "--rank", "3", "--entities", str(subset)])
    assert rc == 0
    rows = capsys.readouterr().out.splitlines()
    assert len(rows) == 8
    assert rows[0].split("\t")[0] == uris[0]


def test_project_rank_bounds(workspace, capsys):
    root, data, model = workspace
    rc = main(["project", str(model), "--rank", "99"])
    assert rc == 2
    assert "error [flags]" in capsys.readouterr().err


def test_info_reports_norms(workspace, capsys):
    root, data, model = workspace
    rc = main(["info", str(model)])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["dim"] == 8
    assert payload["min_norm"] <= payload["mean_norm"] <= payload["max_norm"]
    assert len(payload["first_tokens"]) == 5


def test_help_and_bad_subcommand(capsys):
    assert main(["--help"]) == 0
    capsys.readouterr()
    assert main(["mystery"]) == 2
