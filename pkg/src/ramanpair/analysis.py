"""Trace post-processing: oscillation maxima, periods, damping checks.

The slow pair-exchange oscillation carries fast micromotion ripple, so
lobes are segmented on a lightly smoothed copy of the trace (contiguous
regions above half its maximum) and each lobe contributes the argmax of
the raw trace.
"""

from __future__ import annotations

import numpy as np


def _smooth(values: np.ndarray, frac: float = 0.02) -> np.ndarray:
    """Moving average over ~frac of the trace; edges padded by repetition."""
    n = len(values)
    w = max(1, int(round(n * frac)))
    if w % 2 == 0:
        w += 1
    if w < 3:
        return values
    padded = np.pad(values, w // 2, mode="edge")
    kernel = np.ones(w) / w
    return np.convolve(padded, kernel, mode="valid")


def _lobes(values: np.ndarray, threshold: float):
    above = values > threshold
    lobes = []
    start = None
    for i, flag in enumerate(above):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            lobes.append((start, i, True))
            start = None
    if start is not None:
        lobes.append((start, len(values), False))  # cut off by the window end
    return lobes


def principal_maxima(times, values, frac: float = 0.5):
    """One (t, value, closed) entry per oscillation lobe.

    `closed` is False for a lobe truncated by the end of the window, whose
    argmax may not be a genuine maximum.
    """
    times = np.asarray(times)
    values = np.asarray(values, dtype=float)
    if values.max() <= 0:
        return []
    smooth = _smooth(values)
    out = []
    for start, end, closed in _lobes(smooth, frac * smooth.max()):
        k = start + int(np.argmax(values[start:end]))
        if not closed and k == end - 1:
            continue  # still rising at the window edge
        out.append((_refine_peak_time(times, values, k), float(values[k]), closed))
    return out


def _refine_peak_time(times, values, k) -> float:
    """Quadratic vertex through the three samples around k."""
    if k == 0 or k == len(values) - 1:
        return float(times[k])
    y0, y1, y2 = values[k - 1], values[k], values[k + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return float(times[k])
    shift = 0.5 * (y0 - y2) / denom
    dt = times[k + 1] - times[k]
    return float(times[k] + shift * dt)


def oscillation_period(times, values, frac: float = 0.5):
    """Mean spacing of interior lobe maxima; None if the trace has too few."""
    peaks = [t for t, _, closed in principal_maxima(times, values, frac) if closed]
    interior = [t for t in peaks if t > times[0]]
    if len(interior) >= 2:
        return float(np.mean(np.diff(interior)))
    if len(interior) == 1 and interior[0] > 0:
        return float(2.0 * interior[0])  # first maximum of a sin^2-type transfer
    return None


def strictly_decreasing(seq) -> bool:
    seq = list(seq)
    return all(b < a for a, b in zip(seq, seq[1:]))


def values_at_maxima(times, values, probe, frac: float = 0.5):
    """probe trace sampled at the principal maxima of `values`."""
    times = np.asarray(times)
    probe = np.asarray(probe)
    out = []
    for t, _, _ in principal_maxima(times, values, frac):
        k = int(np.argmin(np.abs(times - t)))
        out.append((float(times[k]), float(probe[k])))
    return out
