import json

import pytest

from stableride.errors import InputError
from stableride.experiment import ExperimentConfig, report_document, run_experiment, write_distribution_csvs
from stableride.workload import generate_workload, records_to_requests

# regression snapshot: 200 synthetic trips, seed 7, default configuration
SEED7_OPTIMUM = 1032.2128513168636
SEED7 = {
    "eq": ("stable", 1.066030786752676, 33),
    "ega": ("stable", 1.0055357995595957, 55),
    "pp": ("stable", 1.0008994233003081, 57),
    "sb": ("cyclic_failure", 1.0154436821432156, 47),
}


@pytest.fixture(scope="module")
def seed7():
    trips, net, _ = records_to_requests(generate_workload(200, seed=7))
    return run_experiment(net, trips, ExperimentConfig(rng_seed=7))


def test_seed7_snapshot(seed7):
    assert seed7.optimum.social_cost == pytest.approx(SEED7_OPTIMUM, abs=1e-9)
    for mech, (status, ratio, pairs) in SEED7.items():
        out = seed7.outcomes[mech]
        assert out.status == status
        assert out.report["optimality_ratio"] == pytest.approx(ratio, abs=1e-12)
        assert out.report["matched_pairs"] == pairs
        assert 1.0 <= out.report["optimality_ratio"] <= 1.5


def test_report_document_shape(seed7):
    doc = json.loads(seed7.to_json())
    assert set(doc) == {"config", "instance", "optimum", "mechanisms", "notes"}
    assert doc["config"]["pairing_window_s"] == 180.0
    assert doc["instance"]["commuters"] == 200
    assert doc["mechanisms"]["sb"]["cycles"]
    assert "indicative only" in doc["notes"][0]
    assert doc["mechanisms"]["pp"]["summaries"]["delay_ratios"]["count"] == 57


def test_report_deterministic(seed7):
    trips, net, _ = records_to_requests(generate_workload(200, seed=7))
    again = run_experiment(net, trips, ExperimentConfig(rng_seed=7))
    assert again.to_json() == seed7.to_json()


def test_workers_do_not_change_report(seed7):
    trips, net, _ = records_to_requests(generate_workload(200, seed=7))
    threaded = run_experiment(net, trips, ExperimentConfig(rng_seed=7, workers=4))
    assert threaded.to_json() == seed7.to_json()


def test_distribution_csvs(seed7, tmp_path):
    paths = write_distribution_csvs(seed7, tmp_path)
    assert [p.name for p in paths] == ["normalized_utilities.csv", "standalone_cost_ratios.csv",
                                       "delay_ratios.csv", "separation_distances_km.csv"]
    rows = paths[2].read_text().splitlines()
    assert rows[0] == "mechanism,index,value"
    assert len(rows) == 1 + sum(o.report["matched_pairs"] for o in seed7.outcomes.values())


def test_one_trip():
    trips, net, _ = records_to_requests(generate_workload(1, seed=1))
    res = run_experiment(net, trips)
    assert res.oracle_checked
    for out in res.outcomes.values():
        assert out.report["optimality_ratio"] == 1.0
        assert out.report["matched_fraction"] == 0.0


def test_four_experiment(four_network, four_trips):
    res = run_experiment(four_network, four_trips, ExperimentConfig(pairing_window_s=0))
    doc = report_document(res)
    assert doc["optimum"]["pairs"] == [["i", "k"], ["j", "l"]]
    got = {m: doc["mechanisms"][m]["assignment"]["pairs"] for m in ("eq", "ega", "pp", "sb")}
    assert got == {"eq": [["i", "j"]], "ega": [["i", "k"], ["j", "l"]],
                   "pp": [["i", "k"], ["j", "l"]], "sb": [["i", "j"]]}


@pytest.mark.parametrize("kwargs", [
    {"pairing_window_s": -1}, {"fare_per_km": -0.1}, {"mechanisms": ()}, {"mechanisms": ("eq", "eq")},
    {"mechanisms": ("xx",)}, {"mean_speed_kmh": 0}, {"detour_factor": 0.5},
])
def test_config_validation(kwargs):
    with pytest.raises(InputError):
        ExperimentConfig(**kwargs)


def test_empty_trips_rejected(four_network):
    with pytest.raises(InputError):
        run_experiment(four_network, [])
