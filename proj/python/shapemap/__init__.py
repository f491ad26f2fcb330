"""Bayesian shape classification: planar marginal likelihood, MAP
classification, a quaternion rotation kernel and brute-force oracles."""

import json

import numpy as np

from . import _shapemap
from ._shapemap import extract_boundary, families, load_shape, resample, synth

__all__ = [
    "classify",
    "extract_boundary",
    "families",
    "load_shape",
    "log_marginal",
    "quat3d_marginal",
    "resample",
    "run_benchmark",
    "synth",
    "train",
    "verify_eq2",
]


def log_marginal(y, v, regs=None, allow_reversal=False):
    """Log marginal likelihood of data y under template v, aggregated over
    cyclic correspondences. Returns (value, offset, reversed) where offset and
    reversed describe the single best correspondence."""
    return _shapemap.log_marginal(np.asarray(y), np.asarray(v), json.dumps(regs or {}), allow_reversal)


def train(labeled, n, options=None):
    """Model dict from (label, points) pairs, every shape resampled to n."""
    pairs = [(label, np.asarray(p)) for label, p in labeled]
    return json.loads(_shapemap.train(pairs, n, json.dumps(options or {})))


def classify(points, models):
    """[(label, log_posterior), ...] best first."""
    return _shapemap.classify(np.asarray(points), json.dumps(models))


def verify_eq2(trials=10, trials_5=3, tol=1e-3, seed=1):
    passed, spread, residual = _shapemap.verify_eq2(trials, trials_5, tol, seed)
    return {"pass": passed, "max_spread": spread, "max_residual": residual}


def quat3d_marginal(y, v, sigma, method="series", samples=1_000_000, order=4, seed=1):
    value, std_error = _shapemap.quat3d_marginal(np.asarray(y), np.asarray(v), sigma, method, samples, order, seed)
    return {"log_marginal": value, "std_error": std_error}


def run_benchmark(spec, sweep=False):
    """Report dict, same layout as the benchmark command's JSON output."""
    return json.loads(_shapemap.run_benchmark(json.dumps(spec), sweep))
