"""Bundled and loadable case-study datasets.

Two public datasets back the fitting case studies:

* Aarset device lifetimes (n = 50): failure times of 50 devices on life
  test, the classic bathtub-hazard sample from Aarset, IEEE Transactions on
  Reliability 36 (1987).  Bundled below.
* Australian Institute of Sport lean body mass (n = 202): the ``lbm``
  column of the AIS athlete data (Cook & Weisberg, 1994; distributed with
  the R packages ``DAAG`` and ``sn``).  Not redistributable from this build
  environment, so :func:`load_ais_lbm` reads it from a user-supplied CSV.
"""

from __future__ import annotations

import os
from importlib import resources

import numpy as np

from .fit import Dataset

AARSET_LIFETIMES = np.array([
    0.1, 0.2, 1, 1, 1, 1, 1, 2, 3, 6,
    7, 11, 12, 18, 18, 18, 18, 18, 21, 32,
    36, 40, 45, 46, 47, 50, 55, 60, 63, 63,
    67, 67, 67, 67, 72, 75, 79, 82, 82, 83,
    84, 84, 84, 85, 85, 85, 85, 85, 86, 86,
], dtype=float)


def load_aarset():
    """Aarset (1987) device lifetimes, n = 50."""
    return Dataset(AARSET_LIFETIMES.copy(), name="aarset",
                   source="Aarset (1987), IEEE Trans. Reliability 36")


class DatasetUnavailableError(FileNotFoundError):
    """A known public dataset is not present in this installation."""


_AIS_ENV = "BIMODAL_AIS_LBM"


def load_ais_lbm(path=None):
    """AIS lean body mass (n = 202) from a single-column CSV.

    Search order: explicit ``path``, the ``BIMODAL_AIS_LBM`` environment
    variable, then ``data/ais_lbm.csv`` inside the installed package.  The
    values are the ``lbm`` column of the AIS data; from R:
    ``data(ais, package = "DAAG"); write.csv(ais$lbm, "ais_lbm.csv", row.names = FALSE)``.
    """
    candidates = []
    if path:
        candidates.append(str(path))
    if os.environ.get(_AIS_ENV):
        candidates.append(os.environ[_AIS_ENV])
    pkg_file = resources.files(__package__).joinpath("data/ais_lbm.csv")
    try:
        if pkg_file.is_file():
            candidates.append(str(pkg_file))
    except Exception:
        pass
    for cand in candidates:
        if os.path.isfile(cand):
            values = _read_single_column(cand)
            if values.size != 202:
                raise DatasetUnavailableError(
                    f"{cand}: expected the 202 AIS lean-body-mass values, got {values.size}")
            return Dataset(values, name="ais-lbm",
                           source="AIS athlete data (Cook & Weisberg 1994), lbm column")
    raise DatasetUnavailableError(
        "AIS lean-body-mass data not found. Provide a single-column CSV of the "
        "202 'lbm' values from the public AIS athlete dataset (R packages DAAG "
        f"or sn) via load_ais_lbm(path=...) or the {_AIS_ENV} environment variable.")


def _read_single_column(path):
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            token = line.strip().split(",")[-1].strip().strip('"')
            if not token:
                continue
            try:
                out.append(float(token))
            except ValueError:
                continue  # header or row label
    return np.asarray(out, float)
