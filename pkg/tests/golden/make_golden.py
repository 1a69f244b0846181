"""Regenerate the frozen reference values in this directory.

    python3 tests/golden/make_golden.py

Each file carries a ``_config`` header naming the generator and its inputs.
The tests recompute every entry through :data:`BUILDERS` and compare.
"""

import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from compact_clt import __version__
from compact_clt.cumulants import cumulant_trace, local_cumulant
from compact_clt.determinants import fredholm_mgf, szego_residual, toeplitz_mgf
from compact_clt.fourier import LocalTestFunction, make_poly

HERE = Path(__file__).resolve().parent

COS = make_poly([(1, 1), (-1, 1)])
F2 = make_poly([(1, 1), (-1, 1), (2, Fraction(1, 2)), (-2, Fraction(1, 2))])
SYMBOLS = {"2cos": COS, "2cos+cos2": F2}


def mgf_values():
    config = {"ensembles": ["u", "so-even", "so-odd", "sp"], "n": [4, 8, 12], "t": [0.1, 0.3, 0.5],
              "f": sorted(SYMBOLS)}
    rows = []
    for kind in config["ensembles"]:
        for name in config["f"]:
            for n in config["n"]:
                for t in config["t"]:
                    f = SYMBOLS[name]
                    v = toeplitz_mgf(f, t, n) if kind == "u" else fredholm_mgf(kind, f, t, n)
                    rows.append({"ensemble": kind, "f": name, "n": n, "t": t, "value": v})
    return config, rows


def exact_cumulants():
    config = {"ensembles": ["so-even", "so-odd", "sp"], "n": [1, 2, 3], "ell": [1, 2, 3, 4], "f": "2cos+cos2"}
    rows = []
    for kind in config["ensembles"]:
        for n in config["n"]:
            for ell in config["ell"]:
                rows.append({"ensemble": kind, "n": n, "ell": ell, "value": str(cumulant_trace(kind, F2, n, ell))})
    return config, rows


def szego_residuals():
    config = {"f": "2cos", "t": 0.4, "n": list(range(2, 33, 2)), "dps": 50}
    rows = [{"n": n, "residual": szego_residual(COS, config["t"], n, dps=config["dps"])} for n in config["n"]]
    return config, rows


def local_cumulants():
    config = {"g": {"family": "triangle", "params": {"width": 1.0}}, "L": 8.0,
              "cells": [["u", 64, 0.0], ["so-even", 64, math.pi / 2]], "ell": [1, 2]}
    g = LocalTestFunction("triangle", {"width": 1.0})
    rows = []
    for kind, n, theta0 in config["cells"]:
        for ell in config["ell"]:
            rows.append({"ensemble": kind, "n": n, "theta0": theta0, "ell": ell,
                         "value": local_cumulant(kind, g, config["L"], n, theta0, ell)})
    return config, rows


BUILDERS = {
    "mgf_values.json": mgf_values,
    "exact_cumulants.json": exact_cumulants,
    "szego_residuals.json": szego_residuals,
    "local_cumulants.json": local_cumulants,
}


def write_all():
    for fname, build in BUILDERS.items():
        config, rows = build()
        payload = {"_config": {"generator": f"tests/golden/make_golden.py:{build.__name__}",
                               "package_version": __version__, **config},
                   "rows": rows}
        (HERE / fname).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
        print(f"wrote {fname} ({len(rows)} rows)")


if __name__ == "__main__":
    sys.exit(write_all())
