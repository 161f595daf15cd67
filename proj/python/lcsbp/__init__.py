"""Boundary classification, formulas, simulation and duality checks for logistic CSBPs."""

import json as _json

from ._lcsbp import *  # noqa: F401,F403
from ._lcsbp import __version__, classify as _classify


def classify(spec, theta=1.0):
    """Boundary report as a dict."""
    return _json.loads(_classify(spec, theta))
