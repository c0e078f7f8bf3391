#!/usr/bin/env python3
"""Writes the synthetic bike station feed: 2 stations, 7 days, hourly."""
import datetime
import json
import sys

STATIONS = [
    ("urn:BikeHireDockingStation:santander-01", "Plaza del Ayuntamiento", 20, 12, [-3.8099, 43.4628]),
    ("urn:BikeHireDockingStation:santander-02", "Puertochico", 15, 8, [-3.7995, 43.4614]),
]
START = datetime.datetime(2021, 11, 1, tzinfo=datetime.timezone.utc)  # a Monday


def available(station, i):
    day, hour = divmod(i, 24)
    base = STATIONS[station][3]
    rush = 4 if day < 5 and hour in (8, 9, 18, 19) else 0
    return max(0, base + (hour * 5 + day * 3 + station * 7) % 7 - 3 - rush)


def main(path):
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        for i in range(7 * 24):
            t = START + datetime.timedelta(hours=i)
            for s, (sid, name, slots, _, coords) in enumerate(STATIONS):
                doc = {
                    "id": sid,
                    "type": "BikeHireDockingStation",
                    "name": name,
                    "availableBikeNumber": available(s, i),
                    "totalSlotNumber": slots,
                    "dateObserved": t.strftime("%Y-%m-%dT%H:%M:%S.00Z"),
                    "location": {"type": "Point", "coordinates": coords},
                }
                out.write(json.dumps(doc, separators=(",", ":")) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/bike-feed.jsonl")
