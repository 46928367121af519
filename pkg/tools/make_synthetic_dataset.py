#!/usr/bin/env python3
"""Regenerate the bundled synthetic weather table (data/forestfires_synthetic.csv).

The file mimics the classic 13-column Montesinho / UCI "forestfires" layout
and marginals (fire-season heavy months, zero-inflated rain and burned area,
correlated temperature/humidity) without being the published dataset, which
is not redistributed here. Five reference rows used by the classification
tests are embedded verbatim near their natural position. 517 rows, seeded,
byte-stable across runs.
"""

import math
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "firedss" / "data" / "forestfires_synthetic.csv"

HEADER = "X,Y,month,day,FFMC,DMC,DC,ISI,temp,RH,wind,rain,area"

REFERENCE_ROWS = [
    "8,6,aug,mon,92.3,88.9,495.6,8.5,24.1,27,3.1,0.0,0.0",
    "1,4,aug,sat,94.4,146.0,614.7,11.3,25.6,42,4.0,0.0,0.0",
    "7,4,aug,sun,81.6,56.7,665.6,1.9,21.2,70,6.7,0.0,11.16",
    "2,4,aug,sun,81.6,56.7,665.6,1.9,21.9,71,5.8,0.0,54.29",
    "4,3,aug,sun,81.6,56.7,665.6,1.9,27.8,32,2.7,0.0,6.44",
]

MONTHS = ("jan", "feb", "mar", "apr", "may", "jun",
          "jul", "aug", "sep", "oct", "nov", "dec")
DAYS = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")

# rough seasonal climate anchors: (temp mean, DC mean, month weight)
SEASON = {
    "jan": (8, 60, 2), "feb": (9, 50, 16), "mar": (12, 80, 40),
    "apr": (13, 120, 7), "may": (16, 200, 2), "jun": (20, 350, 14),
    "jul": (23, 480, 26), "aug": (23, 560, 150), "sep": (20, 580, 140),
    "oct": (16, 400, 12), "nov": (12, 150, 1), "dec": (9, 80, 7),
}


def clamp(v, lo, hi):
    return min(max(v, lo), hi)


def main():
    rng = np.random.default_rng(20240817)
    weights = np.array([SEASON[m][2] for m in MONTHS], dtype=float)
    weights /= weights.sum()

    rows = []
    for _ in range(517 - len(REFERENCE_ROWS)):
        month = MONTHS[rng.choice(12, p=weights)]
        day = DAYS[rng.integers(0, 7)]
        x = int(rng.integers(1, 10))
        y = int(rng.integers(2, 10))

        t_mean, dc_mean, _ = SEASON[month]
        temp = clamp(rng.normal(t_mean, 4.5), 1.0, 34.0)
        rh = clamp(rng.normal(68 - 1.4 * (temp - 15), 11), 15, 100)
        wind = clamp(rng.gamma(3.2, 1.35), 0.4, 9.4)
        rain = 0.0
        if rng.random() < 0.035:
            rain = round(float(rng.gamma(1.4, 1.8)), 1)

        dryness = clamp((temp - 5) / 30 + (100 - rh) / 160, 0.05, 1.0)
        ffmc = clamp(rng.normal(78 + 18 * dryness, 3.0), 30.0, 96.2)
        dmc = clamp(rng.normal(110 * dryness, 28), 1.1, 290.0)
        dc = clamp(rng.normal(dc_mean, 90), 8.0, 860.0)
        if rain > 0.0:
            ffmc = clamp(ffmc - 12 * math.sqrt(rain), 18.7, 96.2)
            dmc = max(dmc - 8 * rain, 1.1)
        m = 147.2 * (101.0 - ffmc) / (59.5 + ffmc)
        ff = 19.1152 * math.exp(-0.1386 * m) * (1.0 + m ** 5.31 / 4.93e7)
        isi = clamp(ff * math.exp(0.05039 * wind) * rng.normal(1.0, 0.07), 0.0, 22.7)

        area = 0.0
        if rng.random() < 0.48 * dryness + 0.18:
            area = round(float(rng.lognormal(0.9 + 1.2 * dryness, 1.25)), 2)

        rows.append(",".join([
            str(x), str(y), month, day,
            f"{ffmc:.1f}", f"{dmc:.1f}", f"{dc:.1f}", f"{isi:.1f}",
            f"{temp:.1f}", str(int(round(rh))), f"{wind:.1f}",
            f"{rain:.1f}", f"{area:.2f}" if area else "0.0",
        ]))

    # interleave the reference rows at fixed positions
    for i, ref in enumerate(REFERENCE_ROWS):
        rows.insert(137 + 61 * i, ref)

    OUT.write_text(HEADER + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
