"""Recover the system coefficients from sampled (output, inputs) data.

Two-stage gradient matching: estimate the input growth rates from the
ordered sample with finite differences, then regress each rate on
``[1, x_1, ..., x_n]`` by least squares. Since the system is affine in
both state and coefficients, stage two is ordinary linear regression,
solved with an orthogonal factorization rather than normal equations.

A single solved path often cannot identify every coefficient (the demo
two-input system keeps its inputs exactly proportional along the path, so
the design matrix is rank deficient). The fitter therefore accepts a list
of segments, each one a separately ordered sample, and optionally a ridge
penalty on the non-intercept columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from effode.efficiency import Sample
from effode.errors import CollinearityError, OrderingError, SampleSizeError
from effode.model import InputSystem

CONDITION_LIMIT = 1e10


@dataclass(frozen=True)
class FitResult:
    """Estimated system plus regression diagnostics.

    ``residual_norms[i]`` is the root-mean-square residual of equation i
    (currency per output unit); ``derivative_estimates`` holds the stage-one
    growth-rate estimates, one row per data point in segment order.
    """

    system: InputSystem
    residual_norms: np.ndarray
    derivative_estimates: np.ndarray


def _segment_arrays(sample: Sample):
    ys = np.array([obs.output for obs in sample], dtype=np.float64)
    X = np.array([obs.inputs for obs in sample], dtype=np.float64)
    return ys, X


def estimate_derivatives(sample: Sample) -> np.ndarray:
    """Finite-difference growth-rate estimates, one row per observation.

    Central three-point differences on interior points, one-sided
    second-order differences at the two ends. The sample must be sorted by
    output with no duplicates.
    """
    if len(sample) < 3:
        raise SampleSizeError(
            f"need at least 3 observations to estimate derivatives, got {len(sample)}"
        )
    ys, X = _segment_arrays(sample)
    if not (np.diff(ys) > 0).all():
        raise OrderingError("sample output levels must be strictly increasing")

    m = ys.shape[0]
    out = np.empty_like(X)
    # non-uniform three-point formulas, exact on quadratics
    for k in range(m):
        if k == 0:
            h1 = ys[1] - ys[0]
            h2 = ys[2] - ys[1]
            out[k] = (
                X[0] * (-(2 * h1 + h2) / (h1 * (h1 + h2)))
                + X[1] * ((h1 + h2) / (h1 * h2))
                + X[2] * (-h1 / (h2 * (h1 + h2)))
            )
        elif k == m - 1:
            h1 = ys[-2] - ys[-3]
            h2 = ys[-1] - ys[-2]
            out[k] = (
                X[-3] * (h2 / (h1 * (h1 + h2)))
                + X[-2] * (-(h1 + h2) / (h1 * h2))
                + X[-1] * ((h1 + 2 * h2) / (h2 * (h1 + h2)))
            )
        else:
            h1 = ys[k] - ys[k - 1]
            h2 = ys[k + 1] - ys[k]
            out[k] = (
                X[k - 1] * (-h2 / (h1 * (h1 + h2)))
                + X[k] * ((h2 - h1) / (h1 * h2))
                + X[k + 1] * (h1 / (h2 * (h1 + h2)))
            )
    return out


def _offending_columns(design: np.ndarray) -> list[str]:
    # components of the right singular vector for the smallest singular
    # value point at the (nearly) dependent columns
    _, _, vt = np.linalg.svd(design, full_matrices=False)
    v = np.abs(vt[-1])
    names = ["intercept"] + [f"x{i}" for i in range(1, design.shape[1])]
    keep = v > 0.1 * v.max()
    return [name for name, flag in zip(names, keep) if flag]


def fit(
    data: Union[Sample, Sequence[Sample]],
    ridge: float = 0.0,
) -> FitResult:
    """Estimate the input system from one sample or a list of segments.

    Parameters
    ----------
    data : Sample or sequence of Sample
        Each segment must be sorted by output with distinct levels;
        output levels may repeat across segments.
    ridge : float
        Optional penalty weight on the non-intercept columns. Zero (the
        default) means plain least squares with a rank check.

    Raises
    ------
    CollinearityError
        When ``ridge`` is zero and the design matrix condition number
        exceeds 1e10; the message names the dependent columns.
    """
    segments = [data] if isinstance(data, Sample) else list(data)
    if not segments:
        raise SampleSizeError("no data segments supplied")
    dims = {seg.dim for seg in segments}
    if len(dims) > 1:
        raise SampleSizeError(f"segments mix input dimensions {sorted(dims)}")
    n = dims.pop()

    deriv_blocks = [estimate_derivatives(seg) for seg in segments]
    state_blocks = [_segment_arrays(seg)[1] for seg in segments]
    rates = np.concatenate(deriv_blocks)
    states = np.concatenate(state_blocks)

    m = states.shape[0]
    if m < n + 2:
        raise SampleSizeError(
            f"need at least {n + 2} observations to fit {n} inputs, got {m}"
        )

    design = np.column_stack([np.ones(m), states])
    if ridge == 0.0:
        sv = np.linalg.svd(design, compute_uv=False)
        cond = np.inf if sv[-1] == 0 else sv[0] / sv[-1]
        if cond > CONDITION_LIMIT:
            cols = ", ".join(_offending_columns(design))
            raise CollinearityError(
                f"design matrix is rank deficient (condition {cond:.3g}); "
                f"dependent columns: {cols}. Supply additional segments or a "
                "ridge penalty."
            )
        lhs, rhs = design, rates
    else:
        penalty = np.sqrt(ridge) * np.eye(n + 1)[1:]  # intercept unpenalized
        lhs = np.vstack([design, penalty])
        rhs = np.vstack([rates, np.zeros((n, n))])

    beta, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    residuals = design @ beta - rates
    residual_norms = np.sqrt(np.mean(residuals**2, axis=0))

    system = InputSystem(dim=n, intercepts=beta[0], coefficients=beta[1:].T)
    return FitResult(
        system=system,
        residual_norms=residual_norms,
        derivative_estimates=rates,
    )
