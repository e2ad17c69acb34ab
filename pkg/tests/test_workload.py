import statistics

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stableride.errors import InputError
from stableride.road import RoadNetwork
from stableride.workload import (TRIP_FIELDS, Region, TimeWindowPolicy, generate_workload, ingest_trips,
                                 parse_time, write_trips)

HEADER = ",".join(TRIP_FIELDS) + "\n"


def test_empty_file_with_header(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text(HEADER)
    assert ingest_trips(p).trips == []


def test_latitude_out_of_range_rejected(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text(HEADER + "r1,-73.98,95.0,-73.97,40.76,1361620800,2.0,\n"
                 + "r2,-73.98,40.75,-73.97,40.76,1361620800,2.0,\n")
    res = ingest_trips(p)
    assert [t.commuter_id for t in res.trips] == ["r2"]
    (line, rid, msg), = res.rejections
    assert (line, rid) == (2, "r1")
    assert "pickup_lat" in msg


@pytest.mark.parametrize("row, field", [
    ("r,-73.98,40.75,-73.97,40.76,1361620800,0,", "trip_distance_km"),
    ("r,-73.98,40.75,-73.97,40.76,yesterday,2,", "pickup_time"),
    ("r,abc,40.75,-73.97,40.76,1361620800,2,", "pickup_lon"),
    ("r,-73.98,40.75,-73.97,40.76,1361620800,2,-5", "slack_minutes"),
    ("r,-73.98,40.75,-73.98,40.75,1361620800,,", "coincide"),
])
def test_bad_rows_named(tmp_path, row, field):
    p = tmp_path / "t.csv"
    p.write_text(HEADER + row + "\n")
    res = ingest_trips(p)
    assert res.trips == []
    assert field in res.rejections[0][2]


def test_malformed_header_is_fatal(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("id,lon,lat\n1,2,3\n")
    with pytest.raises(InputError, match="header"):
        ingest_trips(p)


def test_unreadable_file(tmp_path):
    with pytest.raises(InputError):
        ingest_trips(tmp_path / "missing.csv")


def test_time_window_derivation(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text(HEADER + "r,0.0,0.0,0.0,0.1,1000,,\n" + "s,0.0,0.0,0.0,0.1,2013-02-23T12:00:00,,5\n")
    res = ingest_trips(p, TimeWindowPolicy(detour_factor=1.5, slack_minutes=10))
    r, s = res.trips
    direct = res.network.distance_km(r.source, r.destination) / 20.0 * 3600
    assert r.earliest_departure == 1000
    assert r.latest_arrival == pytest.approx(1000 + 1.5 * direct + 600)
    assert s.earliest_departure == 1361620800
    assert s.latest_arrival == pytest.approx(1361620800 + 1.5 * direct + 300)


def test_parse_time():
    assert parse_time("1361620800") == 1361620800
    assert parse_time("2013-02-23T12:00:00Z") == 1361620800
    assert parse_time("2013-02-23T07:00:00-05:00") == 1361620800


def test_network_layout_needs_network(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("commuter_id,source,destination,earliest_departure,latest_arrival\nx,a,b,0,10\n")
    with pytest.raises(InputError):
        ingest_trips(p)
    net = RoadNetwork()
    net.add_junction("a")
    net.add_junction("b")
    net.add_segment("a", "b", 1, 1)
    assert len(ingest_trips(p, network=net).trips) == 1


def test_network_layout_unknown_junction(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("commuter_id,source,destination,earliest_departure,latest_arrival\nx,a,zz,0,10\n")
    net = RoadNetwork()
    net.add_junction("a")
    res = ingest_trips(p, network=net)
    assert res.trips == [] and "destination" in res.rejections[0][2]


def test_generate_empty_and_deterministic():
    assert generate_workload(0, seed=3) == []
    assert generate_workload(50, seed=3) == generate_workload(50, seed=3)
    assert generate_workload(50, seed=3) != generate_workload(50, seed=4)


def test_degenerate_region():
    with pytest.raises(InputError):
        Region(-73.9, 40.7, -73.9, 40.8)
    with pytest.raises(InputError):
        Region.parse("1,2,3")


def test_generated_mean_distance():
    recs = generate_workload(10_000, seed=11)
    assert abs(statistics.fmean(r.trip_distance_km for r in recs) - 4.2) <= 0.5


def test_generated_times_and_region():
    region = Region()
    recs = generate_workload(500, region, seed=5)
    assert all(1361620800 <= r.pickup_time <= 1361620800 + 3600 for r in recs)
    assert all(region.contains(r.pickup_lon, r.pickup_lat) for r in recs)
    assert all(region.contains(r.dropoff_lon, r.dropoff_lat) for r in recs)


def test_roundtrip_5000_rows(tmp_path):
    recs = generate_workload(5000, seed=21)
    p = tmp_path / "w.csv"
    write_trips(p, recs)
    res = ingest_trips(p)
    assert len(res.trips) == 5000 and res.rejections == []
    assert [t.commuter_id for t in res.trips] == [r.record_id for r in recs]


@given(st.integers(0, 40), st.integers(0, 2**31))
def test_generated_rows_always_valid(n, seed):
    recs = generate_workload(n, seed=seed)
    assert len(recs) == n
    assert all(r.trip_distance_km > 0 for r in recs)
    assert len({r.record_id for r in recs}) == n
