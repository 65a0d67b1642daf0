"""Writes params_grid.json: lambda and tau for 100 box-game configs at 50 digits."""
import json
import math
import os

from mpmath import mp, mpf, log, sqrt, power

mp.dps = 50

rows = []
for m in (1, 2, 3, 4):
    for b in (1, 2, 3, 5, 8):
        for i, e in enumerate((8, 16, 64, 200, 1000)):
            big_m = math.ceil(9 * (m + b) * math.log(e)) + 37 * i * m
            lam = sqrt((m + b) * log(mpf(e)) / big_m) / m
            tau = power(1 + m * lam, mpf(1) / b) - 1
            rows.append({
                "m": m,
                "b": b,
                "e": e,
                "M": big_m,
                "lambda": mp.nstr(lam, 30),
                "tau": mp.nstr(tau, 30),
            })

out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "params_grid.json")
with open(out, "w") as f:
    json.dump(rows, f, indent=1)
    f.write("\n")
