#!/usr/bin/env python3
"""Write the bundled network fixtures to data/networks/.

asia.json uses the well-known lung-cancer network probabilities.

sports.json reproduces the shape of the football-match network (nine
variables, fifteen arcs, in-degree at most two, 1049 free parameters) with
smooth ordinal CPTs, since only the structure and state counts are public.
"""

import json
import math
import os
import random

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "networks")


def asia():
    yn = ["yes", "no"]
    variables = [{"name": n, "states": yn}
                 for n in ["asia", "tub", "smoke", "lung", "bronc", "either", "xray", "dysp"]]
    parents = {
        "asia": [], "tub": ["asia"], "smoke": [], "lung": ["smoke"], "bronc": ["smoke"],
        "either": ["lung", "tub"], "xray": ["either"], "dysp": ["bronc", "either"],
    }
    cpts = {
        "asia": [0.01, 0.99],
        "tub": [0.05, 0.95, 0.01, 0.99],
        "smoke": [0.5, 0.5],
        "lung": [0.1, 0.9, 0.01, 0.99],
        "bronc": [0.6, 0.4, 0.3, 0.7],
        "either": [1, 0, 1, 0, 1, 0, 0, 1],
        "xray": [0.98, 0.02, 0.05, 0.95],
        "dysp": [0.9, 0.1, 0.8, 0.2, 0.7, 0.3, 0.1, 0.9],
    }
    return {"variables": variables, "parents": parents, "cpts": cpts}


def ordinal_row(r, centre, spread):
    """Discretised bell over states 0..r-1 centred at `centre` (in [0, 1])."""
    mu = centre * (r - 1)
    w = [math.exp(-0.5 * ((k - mu) / spread) ** 2) + 1e-3 for k in range(r)]
    s = sum(w)
    return [x / s for x in w]


def sports():
    rng = random.Random(20240611)
    card = {
        "RDlevel": 3, "possession": 3, "HTshots": 9, "ATshots": 10, "HTshotOnTarget": 9,
        "ATshotsOnTarget": 11, "HTgoals": 6, "ATgoals": 6, "HDA": 3,
    }
    parents = {
        "RDlevel": [], "possession": ["RDlevel"],
        "HTshots": ["RDlevel", "possession"], "ATshots": ["RDlevel", "possession"],
        "HTshotOnTarget": ["HTshots", "RDlevel"], "ATshotsOnTarget": ["ATshots", "RDlevel"],
        "HTgoals": ["HTshotOnTarget", "possession"], "ATgoals": ["ATshotsOnTarget", "possession"],
        "HDA": ["HTgoals", "ATgoals"],
    }
    # Signed influence of each parent's (normalised) state on the child's centre.
    weight = {
        ("possession", "RDlevel"): 0.6,
        ("HTshots", "RDlevel"): 0.35, ("HTshots", "possession"): 0.45,
        ("ATshots", "RDlevel"): -0.35, ("ATshots", "possession"): -0.45,
        ("HTshotOnTarget", "HTshots"): 0.75, ("HTshotOnTarget", "RDlevel"): 0.2,
        ("ATshotsOnTarget", "ATshots"): 0.75, ("ATshotsOnTarget", "RDlevel"): -0.2,
        ("HTgoals", "HTshotOnTarget"): 0.7, ("HTgoals", "possession"): 0.2,
        ("ATgoals", "ATshotsOnTarget"): 0.7, ("ATgoals", "possession"): -0.2,
    }
    names = list(card)
    variables = []
    for n in names:
        if n == "HDA":
            states = ["H", "D", "A"]
        elif n in ("RDlevel", "possession"):
            states = ["low", "mid", "high"]
        else:
            states = [str(k) for k in range(card[n])]
        variables.append({"name": n, "states": states})

    cpts = {}
    for n in names:
        ps = parents[n]
        r = card[n]
        configs = [[]]
        for p in ps:
            configs = [c + [s] for c in configs for s in range(card[p])]
        rows = []
        for c in configs:
            if n == "HDA":
                h, a = c
                p = [0.04, 0.04, 0.04]
                p[0 if h > a else 1 if h == a else 2] = 0.92
                rows += p
                continue
            centre = 0.5
            if n in ("HTgoals", "ATgoals", "HTshotOnTarget", "ATshotsOnTarget"):
                centre = 0.15
            for p, s in zip(ps, c):
                centre += weight[(n, p)] * (s / (card[p] - 1) - 0.5)
            centre = min(1.0, max(0.0, centre + rng.uniform(-0.03, 0.03)))
            rows += ordinal_row(r, centre, spread=max(0.6, r / 6))
        if not ps:
            rows = [0.3, 0.4, 0.3]
        cpts[n] = [round(x, 12) for x in rows]
        # Re-normalise after rounding so every row sums to one exactly enough.
        for i in range(0, len(cpts[n]), r):
            row = cpts[n][i:i + r]
            row[-1] = round(1.0 - sum(row[:-1]), 12)
            cpts[n][i:i + r] = row
    return {"variables": variables, "parents": parents, "cpts": cpts}


def main():
    os.makedirs(OUT, exist_ok=True)
    for name, net in (("asia", asia()), ("sports", sports())):
        with open(os.path.join(OUT, name + ".json"), "w") as f:
            json.dump(net, f, indent=1)
            f.write("\n")


if __name__ == "__main__":
    main()
