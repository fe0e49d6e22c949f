"""Regenerates the bundled 427-site fixture (deterministic).

32 European countries, 427 employment sites, 45 of which are missing at least
one signal. Signals are drawn so that site attractiveness correlates
moderately with the country's unemployment rate.
"""
import json
import math
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent.parent

RATES = {  # percent, approximate 2013 annual averages
    "AT": 4.9, "BE": 8.4, "BG": 13.0, "CH": 4.4, "CY": 15.9, "CZ": 7.0,
    "DE": 5.2, "DK": 7.0, "EE": 8.6, "ES": 26.1, "FI": 8.2, "FR": 10.3,
    "GB": 7.6, "GR": 27.5, "HR": 17.3, "HU": 10.2, "IE": 13.1, "IS": 5.4,
    "IT": 12.1, "LT": 11.8, "LU": 5.9, "LV": 11.9, "MT": 6.4, "NL": 6.7,
    "NO": 3.5, "PL": 10.3, "PT": 16.4, "RO": 7.1, "SE": 8.0, "SI": 10.1,
    "SK": 14.2, "TR": 8.7,
}
N_SITES = 427
N_INCOMPLETE = 45


def main():
    rng = random.Random(20131029)
    countries = sorted(RATES)
    mean_rate = sum(RATES.values()) / len(RATES)
    sd_rate = math.sqrt(sum((r - mean_rate) ** 2 for r in RATES.values()) / (len(RATES) - 1))

    rows = []
    for i in range(N_SITES):
        cc = countries[i % len(countries)]
        z = (RATES[cc] - mean_rate) / sd_rate
        attract = 0.6 * z + 0.8 * rng.gauss(0, 1)
        rank = max(1, int(round(math.exp(13.5 - 1.2 * attract + 0.5 * rng.gauss(0, 1)))))
        trend = round(max(0.0, min(100.0, 50 + 15 * attract + 8 * rng.gauss(0, 1))), 1)
        traffic = int(round(math.exp(8.5 + 1.1 * attract + 0.5 * rng.gauss(0, 1))))
        url = f"jobs{i:03d}.example.{cc.lower()}"
        rows.append({"url": url, "country": cc, "rank": rank, "trend": trend, "traffic": traffic})

    for idx in rng.sample(range(N_SITES), N_INCOMPLETE):
        fields = ["rank", "trend", "traffic"]
        for f in rng.sample(fields, rng.choice([1, 1, 1, 2, 3])):
            rows[idx][f] = None

    def cell(v):
        return "" if v is None else str(v)

    with open(HERE / "sites.csv", "w", newline="") as fh:
        fh.write("url,country,rank,trend,traffic\n")
        for r in rows:
            fh.write(",".join([r["url"], r["country"], cell(r["rank"]), cell(r["trend"]), cell(r["traffic"])]) + "\n")

    with open(HERE / "indicators.csv", "w", newline="") as fh:
        fh.write("country,unemployment_rate\n")
        for cc in countries:
            fh.write(f"{cc},{RATES[cc]}\n")

    replay = {r["url"]: {"rank": r["rank"], "trend": r["trend"], "traffic": r["traffic"]} for r in rows}
    with open(HERE / "replay.json", "w") as fh:
        json.dump(replay, fh, indent=1, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
