import json
from pathlib import Path

import pytest

from inquest import (
    ComparisonReport,
    Thresholds,
    compare_report,
    figure4,
    generate_cases,
    run_trials,
    serialize_network,
)
from inquest.cli import main, render_report
from inquest.strategies import Mode, StrategySpec

REPO = Path(__file__).parent.parent


@pytest.fixture()
def network_file(tmp_path, fig4):
    path = tmp_path / "figure4.json"
    path.write_text(serialize_network(fig4))
    return str(path)


@pytest.fixture()
def grouped_file(tmp_path):
    path = tmp_path / "grouped.json"
    path.write_text(json.dumps({"mode": "grouped"}))
    return str(path)


@pytest.fixture()
def flat_file(tmp_path):
    path = tmp_path / "flat.json"
    path.write_text(json.dumps({"mode": "flat"}))
    return str(path)


def test_validate_valid_network(network_file, capsys):
    assert main(["validate", "--network", network_file]) == 0
    assert capsys.readouterr().out.strip() == "valid"


def test_validate_repo_fixture_file(capsys):
    assert main(["validate", "--network", str(REPO / "networks" / "figure4.json")]) == 0
    assert capsys.readouterr().out.strip() == "valid"


def test_validate_broken_network(tmp_path, fig4, capsys):
    data = json.loads(serialize_network(fig4))
    data["links"][0]["p_given_true"] = 1.3
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(data))
    assert main(["validate", "--network", str(path)]) == 1
    out = capsys.readouterr().out
    assert "invalid" in out and "out of range" in out


def test_transform_emits_chained_virtual_link(network_file, capsys):
    assert main(["transform", "--network", network_file, "--depth-vector", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    link = next(l for l in data["links"] if l["child"] == "N111")
    assert link["parent"] == "N1"
    assert link["p_given_true"] == pytest.approx(0.73, abs=1e-9)
    assert link["p_given_false"] == pytest.approx(0.24, abs=1e-9)
    assert data["provenance"]["N1->N111"] == ["N1", "N11", "N111"]


def test_transform_bad_vector_is_usage_error(network_file, capsys):
    assert main(["transform", "--network", network_file, "--depth-vector", "x"]) == 2
    assert main(["transform", "--network", network_file, "--depth-vector", "5"]) == 1


def test_generate_deterministic_stdout(network_file, capsys):
    argv = ["generate", "--network", network_file, "--n", "25", "--seed", "42"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    assert first.splitlines()[0] == "case_id,N1,N11,N12,N111,N112,N113,N121,N122,N123"
    assert len(first.splitlines()) == 26


def test_generate_requires_seed(network_file, capsys):
    assert main(["generate", "--network", network_file, "--n", "5"]) == 2


def test_simulate_zero_cases_is_usage_error(network_file, grouped_file, capsys):
    code = main(
        ["simulate", "--network", network_file, "--strategy", grouped_file,
         "--n", "0", "--seed", "1"]
    )
    assert code == 2


def test_simulate_byte_identical_reports(network_file, grouped_file, capsys):
    argv = [
        "simulate", "--network", network_file, "--strategy", grouped_file,
        "--n", "60", "--seed", "42", "--format", "json",
    ]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    parsed = json.loads(first)
    assert parsed["network"] == "figure4"
    assert parsed["seed"] == 42


def test_simulate_accepts_dataset_file(tmp_path, network_file, grouped_file, capsys):
    dataset = tmp_path / "cases.csv"
    assert main(
        ["generate", "--network", network_file, "--n", "30", "--seed", "7",
         "--out", str(dataset)]
    ) == 0
    capsys.readouterr()
    code = main(
        ["simulate", "--network", network_file, "--strategy", grouped_file,
         "--dataset", str(dataset), "--seed", "7", "--format", "json"]
    )
    assert code == 0
    assert json.loads(capsys.readouterr().out)["strategies"][0]["trials"] == 30


def test_compare_rows_sorted_by_mean_queries(tmp_path, fig4, grouped_file, flat_file, capsys):
    spec = fig4.with_thresholds({"N1": Thresholds(0.85, 0.15)})
    network = tmp_path / "reachable.json"
    network.write_text(serialize_network(spec))
    code = main(
        ["compare", "--network", str(network), "--strategy", grouped_file,
         "--strategy", flat_file, "--n", "80", "--seed", "3", "--format", "json"]
    )
    assert code == 0
    rows = json.loads(capsys.readouterr().out)["strategies"]
    assert len(rows) == 2
    assert rows[0]["mean_queries"] <= rows[1]["mean_queries"]


def test_compare_table_format(network_file, grouped_file, flat_file, capsys):
    code = main(
        ["compare", "--network", network_file, "--strategy", grouped_file,
         "--strategy", flat_file, "--n", "10", "--seed", "3"]
    )
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].split() == [
        "strategy", "trials", "mean_q", "median_q", "mean_cost", "+", "-", "?", "accuracy",
    ]
    assert len(lines) == 4


def test_render_report_json_round_trip(fig4):
    spec = fig4.with_thresholds({"N1": Thresholds(0.85, 0.15)})
    cases = generate_cases(spec, 40, seed=11)
    strategy = StrategySpec(mode=Mode.GROUPED, name="grouped")
    report = compare_report(spec, {"grouped": run_trials(spec, strategy, cases)}, seed=11)
    text = render_report(report, "json")
    assert ComparisonReport.from_dict(json.loads(text)) == report
    table = render_report(report, "table")
    assert "grouped" in table


def test_missing_network_file_is_domain_error(grouped_file, capsys):
    assert main(["validate", "--network", "/nonexistent.json"]) == 1


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == 2


def test_interactive_run_matches_service_record(tmp_path, network_file, grouped_file, monkeypatch, capsys):
    """Terminal sessions and API sessions produce the same record for the
    same answer sequence."""
    from inquest.service import SessionService

    answers = iter(["1", "0", "quit"])
    monkeypatch.setattr("builtins.input", lambda prompt: next(answers))
    store_a = tmp_path / "store_a"
    code = main(
        ["run", "--network", network_file, "--strategy", grouped_file,
         "--store", str(store_a)]
    )
    assert code == 0
    record_cli = json.loads(capsys.readouterr().out)

    service = SessionService(tmp_path / "store_b")
    from inquest import load_network

    service.register_network_spec(load_network(Path(network_file).read_bytes()))
    view = service.create_session("figure4", {"mode": "grouped", "name": "grouped"})
    sid = view["session_id"]
    service.observe(sid, view["suggestion"], 1)
    view = service.get_state(sid)
    service.observe(sid, view["suggestion"], 0)
    record_api = service.close_session(sid)

    assert record_cli["final"]["posteriors"] == record_api["final"]["posteriors"]
    assert record_cli["final"]["query_log"] == record_api["final"]["query_log"]
    cli_events = [
        {k: v for k, v in e.items() if k in ("type", "node", "value", "override")}
        for e in record_cli["events"]
    ]
    api_events = [
        {k: v for k, v in e.items() if k in ("type", "node", "value", "override")}
        for e in record_api["events"]
    ]
    assert cli_events == api_events


def test_interactive_skip_reselects_and_records_override(network_file, grouped_file, monkeypatch, capsys):
    answers = iter(["skip", "1", "quit"])
    monkeypatch.setattr("builtins.input", lambda prompt: next(answers))
    assert main(["run", "--network", network_file, "--strategy", grouped_file]) == 0
    record = json.loads(capsys.readouterr().out)
    observed = [e for e in record["events"] if e["type"] == "observed"]
    # N111 was skipped for one round; its grouped successor N112 was
    # answered, which is off-suggestion and therefore an override
    assert observed == [{"type": "observed", "node": "N112", "value": 1, "override": True}]
    assert record["final"]["evidence"] == {"N112": 1}
