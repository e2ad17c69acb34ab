"""Trip data: CSV ingestion, synthetic workloads, random test instances."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InputError
from .planner import TripRequest
from .road import FareModel, GeometricNetwork, RoadNetwork, haversine_km

TRIP_FIELDS = ("record_id", "pickup_lon", "pickup_lat", "dropoff_lon", "dropoff_lat",
               "pickup_time", "trip_distance_km", "slack_minutes")
NETWORK_TRIP_FIELDS = ("commuter_id", "source", "destination", "earliest_departure", "latest_arrival")

KM_PER_DEG_LAT = 111.195


@dataclass(frozen=True)
class TripRecord:
    record_id: str
    pickup_lon: float
    pickup_lat: float
    dropoff_lon: float
    dropoff_lat: float
    pickup_time: float
    trip_distance_km: float | None = None
    slack_minutes: float | None = None

    def as_row(self) -> list[str]:
        return [self.record_id, f"{self.pickup_lon:.6f}", f"{self.pickup_lat:.6f}",
                f"{self.dropoff_lon:.6f}", f"{self.dropoff_lat:.6f}", f"{self.pickup_time:.0f}",
                "" if self.trip_distance_km is None else f"{self.trip_distance_km:.3f}",
                "" if self.slack_minutes is None else f"{self.slack_minutes:g}"]


@dataclass(frozen=True)
class Region:
    lon_min: float = -74.03
    lat_min: float = 40.70
    lon_max: float = -73.90
    lat_max: float = 40.82

    def __post_init__(self) -> None:
        if not (self.lon_min < self.lon_max and self.lat_min < self.lat_max):
            raise InputError("degenerate region: min must be below max on both axes")
        if not (-180 <= self.lon_min and self.lon_max <= 180 and -90 <= self.lat_min and self.lat_max <= 90):
            raise InputError("region outside valid lon/lat ranges")

    @classmethod
    def parse(cls, text: str) -> "Region":
        try:
            parts = [float(x) for x in text.split(",")]
        except ValueError as exc:
            raise InputError(f"bad region {text!r}") from exc
        if len(parts) != 4:
            raise InputError("region needs lon_min,lat_min,lon_max,lat_max")
        return cls(*parts)

    def contains(self, lon: float, lat: float) -> bool:
        return self.lon_min <= lon <= self.lon_max and self.lat_min <= lat <= self.lat_max


@dataclass
class TimeWindowPolicy:
    """How deadlines are derived for dataset trips, which only record pickups."""

    fare: FareModel = field(default_factory=FareModel)
    detour_factor: float = 1.5
    slack_minutes: float = 10.0

    def latest_arrival(self, pickup_time: float, distance_km: float, slack: float | None) -> float:
        direct = distance_km / self.fare.mean_speed_kmh * 3600.0
        extra = self.slack_minutes if slack is None else slack
        return pickup_time + direct * self.detour_factor + extra * 60.0


@dataclass
class Ingested:
    trips: list[TripRequest]
    network: GeometricNetwork | RoadNetwork
    rejections: list[tuple[int, str, str]] = field(default_factory=list)


def parse_time(text: str) -> float:
    """Epoch seconds or ISO-8601 (naive timestamps are taken as UTC)."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    stamp = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.timestamp()


def _optional(text: str | None) -> float | None:
    return None if text is None or text.strip() == "" else float(text)


def record_from_row(row: dict[str, str]) -> TripRecord:
    """Validate one CSV row; raises ValueError naming the offending field."""
    def num(name: str) -> float:
        try:
            value = float(row[name])
        except (TypeError, ValueError):
            raise ValueError(f"{name}: not a number ({row.get(name)!r})") from None
        if not math.isfinite(value):
            raise ValueError(f"{name}: not finite")
        return value

    rec_id = (row.get("record_id") or "").strip()
    if not rec_id:
        raise ValueError("record_id: empty")
    coords = {}
    for name, bound in (("pickup_lon", 180), ("pickup_lat", 90), ("dropoff_lon", 180), ("dropoff_lat", 90)):
        coords[name] = num(name)
        if abs(coords[name]) > bound:
            raise ValueError(f"{name}: {coords[name]} outside [-{bound}, {bound}]")
    try:
        pickup = parse_time(row["pickup_time"] or "")
    except (TypeError, ValueError):
        raise ValueError(f"pickup_time: unparsable ({row.get('pickup_time')!r})") from None
    try:
        dist = _optional(row.get("trip_distance_km"))
        slack = _optional(row.get("slack_minutes"))
    except ValueError as exc:
        raise ValueError(f"trip_distance_km/slack_minutes: {exc}") from None
    if dist is not None and not dist > 0:
        raise ValueError(f"trip_distance_km: must be > 0, got {dist}")
    if slack is not None and slack < 0:
        raise ValueError(f"slack_minutes: must be >= 0, got {slack}")
    return TripRecord(rec_id, coords["pickup_lon"], coords["pickup_lat"], coords["dropoff_lon"],
                      coords["dropoff_lat"], pickup, dist, slack)


def records_to_requests(records: Sequence[TripRecord], policy: TimeWindowPolicy | None = None,
                        ) -> tuple[list[TripRequest], GeometricNetwork, list[tuple[int, str, str]]]:
    """Map GPS records onto the implicit complete graph of their endpoints."""
    policy = policy or TimeWindowPolicy()
    net = GeometricNetwork(policy.fare)
    trips, rejections = [], []
    for pos, rec in enumerate(records):
        src = net.add_point(rec.pickup_lon, rec.pickup_lat)
        dst = net.add_point(rec.dropoff_lon, rec.dropoff_lat)
        if src == dst:
            rejections.append((pos, rec.record_id, "pickup and dropoff coincide"))
            continue
        dist = net.distance_km(src, dst)
        latest = policy.latest_arrival(rec.pickup_time, dist, rec.slack_minutes)
        trips.append(TripRequest(rec.record_id, src, dst, rec.pickup_time, latest))
    return trips, net, rejections


def _read_rows(path: str | Path) -> tuple[list[str], list[tuple[int, dict[str, str]]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = [h.strip() for h in (reader.fieldnames or [])]
            reader.fieldnames = header
            rows = [(reader.line_num, row) for row in reader]
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise InputError(f"cannot read trips {path}: {exc}") from exc
    return header, rows


def ingest_trips(path: str | Path, policy: TimeWindowPolicy | None = None,
                 network: RoadNetwork | None = None) -> Ingested:
    """Load a trip file in either supported layout.

    GPS layout (``record_id,pickup_lon,...``) builds a geometric network.
    Junction layout (``commuter_id,source,destination,earliest_departure,
    latest_arrival``) needs an explicit road ``network``. Bad rows are
    collected as ``(line, id, message)``; a bad header is fatal.
    """
    header, rows = _read_rows(path)
    if set(NETWORK_TRIP_FIELDS) <= set(header):
        if network is None:
            raise InputError(f"{path}: junction-based trips need a road network file")
        return _ingest_network_trips(rows, network)
    missing = [f for f in TRIP_FIELDS[:6] if f not in header]
    if missing:
        raise InputError(f"{path}: malformed header, missing {', '.join(missing)}")
    records, rejections = [], []
    for line, row in rows:
        try:
            records.append((line, record_from_row(row)))
        except ValueError as exc:
            rejections.append((line, (row.get("record_id") or "").strip(), str(exc)))
    trips, net, dropped = records_to_requests([r for _, r in records], policy)
    rejections += [(records[pos][0], rid, msg) for pos, rid, msg in dropped]
    return Ingested(trips, net, sorted(rejections))


def _ingest_network_trips(rows, network: RoadNetwork) -> Ingested:
    trips, rejections = [], []
    for line, row in rows:
        cid = (row.get("commuter_id") or "").strip()
        try:
            src, dst = row["source"].strip(), row["destination"].strip()
            for name, junction in (("source", src), ("destination", dst)):
                if junction not in network.junctions:
                    raise ValueError(f"{name}: unknown junction {junction!r}")
            trips.append(TripRequest(cid, src, dst, parse_time(row["earliest_departure"]),
                                     parse_time(row["latest_arrival"])))
        except (ValueError, AttributeError, InputError) as exc:
            rejections.append((line, cid, str(exc)))
    return Ingested(trips, network, rejections)


def write_trips(path: str | Path, records: Sequence[TripRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRIP_FIELDS)
        for rec in records:
            writer.writerow(rec.as_row())


def _offset(lon: float, lat: float, dx_km: float, dy_km: float) -> tuple[float, float]:
    dlat = dy_km / KM_PER_DEG_LAT
    dlon = dx_km / (KM_PER_DEG_LAT * math.cos(math.radians(lat)))
    return lon + dlon, lat + dlat


def generate_workload(n: int, region: Region | None = None, seed: int = 0, *,
                      start_time: float = 1361620800.0, duration_s: float = 3600.0,
                      mean_km: float = 4.2, sigma: float = 0.55, hotspots: int = 8,
                      hotspot_share: float = 0.75, hotspot_spread_km: float = 0.6,
                      ) -> list[TripRecord]:
    """Reproducible synthetic taxi trips.

    Pickups cluster around ``hotspots`` random centres (the rest are uniform),
    trip lengths are log-normal with mean ``mean_km`` and pickup times are
    uniform over ``duration_s`` seconds from ``start_time``.
    """
    if n < 0:
        raise InputError("n must be >= 0")
    region = region or Region()
    rng = np.random.default_rng(seed)
    pad_lon = 0.1 * (region.lon_max - region.lon_min)
    pad_lat = 0.1 * (region.lat_max - region.lat_min)
    centres = np.column_stack([
        rng.uniform(region.lon_min + pad_lon, region.lon_max - pad_lon, max(hotspots, 1)),
        rng.uniform(region.lat_min + pad_lat, region.lat_max - pad_lat, max(hotspots, 1)),
    ])
    mu = math.log(mean_km) - sigma**2 / 2
    records = []
    width = max(6, len(str(max(n - 1, 0))))
    for k in range(n):
        if hotspots > 0 and rng.random() < hotspot_share:
            c = centres[rng.integers(len(centres))]
            lon, lat = _offset(c[0], c[1], *rng.normal(0.0, hotspot_spread_km, 2))
        else:
            lon = rng.uniform(region.lon_min, region.lon_max)
            lat = rng.uniform(region.lat_min, region.lat_max)
        lon = min(max(lon, region.lon_min), region.lon_max)
        lat = min(max(lat, region.lat_min), region.lat_max)
        length = max(0.3, rng.lognormal(mu, sigma))
        for _ in range(16):
            theta = rng.uniform(0.0, 2 * math.pi)
            dlon, dlat = _offset(lon, lat, length * math.cos(theta), length * math.sin(theta))
            if region.contains(dlon, dlat):
                break
        dlon = min(max(dlon, region.lon_min), region.lon_max)
        dlat = min(max(dlat, region.lat_min), region.lat_max)
        lon, lat, dlon, dlat = (round(x, 6) for x in (lon, lat, dlon, dlat))
        dist = haversine_km((lon, lat), (dlon, dlat))
        if dist < 0.05:
            dlat = round(lat + 0.3 / KM_PER_DEG_LAT * (1 if lat < region.lat_max - 0.01 else -1), 6)
            dist = haversine_km((lon, lat), (dlon, dlat))
        pickup = float(round(start_time + rng.uniform(0.0, duration_s)))
        records.append(TripRecord(f"t{k:0{width}d}", lon, lat, dlon, dlat, pickup, round(dist, 3)))
    return records


def random_geometric_instance(n: int, seed: int, *, region_km: float = 4.0, window_s: float = 180.0,
                              policy: TimeWindowPolicy | None = None):
    """Small dense instance for property tests: ``n`` trips in a compact box.

    Returns ``(trips, network)``; every pair departs within ``window_s``.
    """
    dlat = region_km / KM_PER_DEG_LAT
    dlon = region_km / (KM_PER_DEG_LAT * math.cos(math.radians(40.75)))
    region = Region(-73.98, 40.75, -73.98 + dlon, 40.75 + dlat)
    records = generate_workload(n, region, seed, duration_s=window_s, mean_km=region_km / 2.5,
                                hotspots=2, hotspot_spread_km=region_km / 6)
    trips, net, _ = records_to_requests(records, policy)
    return trips, net
