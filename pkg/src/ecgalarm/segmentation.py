"""R-peak detection (Pan-Tompkins) and P/Q/S/T delineation at 250 Hz.

The detector follows the classic recipe: bandpass, five-point derivative,
squaring, 150 ms moving-window integration, adaptive signal/noise thresholds
on both the integrated and the filtered streams, a 200 ms refractory, T-wave
slope rejection, and 1.66xRR search-back. Filter recursions are the original
integer ones with delays rescaled from 200 Hz to 250 Hz; all group delays
are compensated so detected indices line up with the raw signal.

Delineation places Q/S at the signal minima and P/T at the maxima inside
fixed windows around each R, clipped to record bounds and to midpoints
between neighbouring R-peaks. Landmark amplitudes are read from the raw
(unfiltered) signal so downstream morphology features stay physical.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import EmptySignal

REFRACTORY_SAMPLES = 50  # 200 ms at 250 Hz
INTEGRATION_WINDOW = 38  # 150 ms at 250 Hz
SEARCHBACK_FACTOR = 1.66

# Delineation windows in ms relative to R.
Q_WINDOW_MS = 60.0
P_WINDOW_MS = 240.0
S_WINDOW_MS = 60.0
T_MIN_MS = 80.0
T_MAX_MS = 400.0

LANDMARKS = ("P", "Q", "R", "S", "T", "OnQRS", "OffQRS")


@dataclass
class Beat:
    """Seven landmarks of one cardiac cycle, absolute sample indices + mV."""

    px: int
    py: float
    qx: int
    qy: float
    rx: int
    ry: float
    sx: int
    sy: float
    tx: int
    ty: float
    on_x: int
    on_y: float
    off_x: int
    off_y: float

    @property
    def r_index(self) -> int:
        return self.rx

    def xy(self, landmark: str) -> tuple[int, float]:
        key = {"P": "p", "Q": "q", "R": "r", "S": "s", "T": "t",
               "OnQRS": "on_", "OffQRS": "off_"}[landmark]
        return getattr(self, key + "x"), getattr(self, key + "y")


@dataclass
class BeatSequence:
    record_name: str
    beats: list[Beat]
    sampling_rate: float

    def __len__(self) -> int:
        return len(self.beats)

    def landmark_array(self) -> np.ndarray:
        """(N, 7, 2) array of (x, y) per landmark in LANDMARKS order."""
        out = np.empty((len(self.beats), len(LANDMARKS), 2), dtype=np.float64)
        for i, beat in enumerate(self.beats):
            for j, name in enumerate(LANDMARKS):
                out[i, j] = beat.xy(name)
        return out


def _bandpass_kernel() -> tuple[np.ndarray, int]:
    """FIR bandpass kernel (~5-15 Hz at 250 Hz) and its group delay."""
    # Low-pass: (moving sum of 8)^2 -> triangular FIR, delay 7, gain 64.
    lp = np.convolve(np.ones(8), np.ones(8)) / 64.0
    # High-pass: 20-sample delay minus 40-wide moving average, delay ~20.
    hp = np.full(40, -1.0 / 40.0)
    hp[20] += 1.0
    return np.convolve(lp, hp), 27


def _filter_aligned(samples: np.ndarray, kernel: np.ndarray, delay: int) -> np.ndarray:
    """Convolve with edge padding and shift out the group delay."""
    pad = len(kernel)
    padded = np.pad(samples, pad, mode="edge")
    full = np.convolve(padded, kernel, mode="valid")  # length n + pad + 1
    return full[delay : delay + len(samples)]


def bandpass(samples: np.ndarray, fs: float = 250.0) -> np.ndarray:
    """QRS-emphasis bandpass; output aligned with and same length as input."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise EmptySignal("bandpass needs a non-empty signal")
    kernel, delay = _bandpass_kernel()
    return _filter_aligned(samples, kernel, delay)


def _derivative(samples: np.ndarray) -> np.ndarray:
    # Five-point derivative, delay 2, compensated.
    kernel = np.array([2.0, 1.0, 0.0, -1.0, -2.0]) / 8.0
    return _filter_aligned(samples, kernel, 2)


def _integrate(squared: np.ndarray) -> np.ndarray:
    # Causal moving average; its lag is intentional (threshold crossings
    # then sit near QRS onset, where the R search window is anchored).
    kernel = np.ones(INTEGRATION_WINDOW) / INTEGRATION_WINDOW
    return np.convolve(squared, kernel, mode="full")[: len(squared)]


def _local_maxima(x: np.ndarray) -> np.ndarray:
    if x.size < 3:
        return np.empty(0, dtype=int)
    interior = (x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:])
    return np.flatnonzero(interior) + 1


class _Thresholds:
    """Adaptive signal/noise levels for one detection stream."""

    def __init__(self, signal_level: float, noise_level: float):
        self.spk = signal_level
        self.npk = noise_level

    @property
    def threshold(self) -> float:
        return self.npk + 0.25 * (self.spk - self.npk)

    def mark_signal(self, peak: float, searchback: bool = False) -> None:
        frac = 0.25 if searchback else 0.125
        self.spk = frac * peak + (1.0 - frac) * self.spk

    def mark_noise(self, peak: float) -> None:
        self.npk = 0.125 * peak + 0.875 * self.npk


def detect_r_peaks(samples: np.ndarray, fs: float = 250.0) -> np.ndarray:
    """Detect R-peak sample indices; empty array for flatline input."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        return np.empty(0, dtype=int)

    filtered = bandpass(samples, fs)
    deriv = _derivative(filtered)
    integ = _integrate(deriv**2)
    abs_f = np.abs(filtered)
    n = samples.size

    candidates = _local_maxima(integ)
    if candidates.size == 0:
        return np.empty(0, dtype=int)

    init = slice(0, min(500, n))  # first 2 s
    thr_i = _Thresholds(float(np.max(integ[init])), float(np.mean(integ[init])))
    thr_f = _Thresholds(float(np.max(abs_f[init])), float(np.mean(abs_f[init])))

    r_peaks: list[int] = []
    qrs_integ_idx: list[int] = []  # integrator candidate index per accepted QRS
    qrs_slopes: list[float] = []
    rr_recent: list[float] = []
    rr_selected: list[float] = []
    # Strongest noise candidate since the last QRS: (integ idx, peak, fpeak, slope)
    best_noise: tuple[int, float, float, float] | None = None

    def window_peak(stream: np.ndarray, idx: int) -> float:
        lo = max(0, idx - INTEGRATION_WINDOW + 1)
        return float(np.max(stream[lo : idx + 1]))

    def refine_r(cross_idx: int) -> int:
        lo = max(0, cross_idx - 10)
        hi = min(n, cross_idx + 11)
        return lo + int(np.argmax(abs_f[lo:hi]))

    def crossing_before(idx: int, level: float) -> int:
        j = idx
        while j > 0 and integ[j - 1] >= level:
            j -= 1
        return j

    def rr_average() -> float:
        if rr_selected:
            return float(np.mean(rr_selected[-8:]))
        if rr_recent:
            return float(np.mean(rr_recent[-8:]))
        return float(fs)  # neutral prior: 60 bpm

    def record_rr(new_idx: int) -> None:
        if qrs_integ_idx:
            rr = float(new_idx - qrs_integ_idx[-1])
            rr_recent.append(rr)
            avg = rr_average()
            if 0.92 * avg <= rr <= 1.16 * avg:
                rr_selected.append(rr)

    def accept_qrs(idx: int, peak: float, fpeak: float, slope: float,
                   searchback: bool = False) -> None:
        nonlocal best_noise
        level = 0.5 * thr_i.threshold if searchback else thr_i.threshold
        cross = crossing_before(idx, min(level, peak))
        r = refine_r(cross)
        if r_peaks and r - r_peaks[-1] < REFRACTORY_SAMPLES:
            return
        record_rr(idx)
        r_peaks.append(r)
        qrs_integ_idx.append(idx)
        qrs_slopes.append(slope)
        thr_i.mark_signal(peak, searchback)
        thr_f.mark_signal(fpeak, searchback)
        if best_noise is not None and best_noise[0] <= idx:
            best_noise = None

    def mark_noise(idx: int, peak: float, fpeak: float, slope: float) -> None:
        nonlocal best_noise
        thr_i.mark_noise(peak)
        thr_f.mark_noise(fpeak)
        if not qrs_integ_idx or idx > qrs_integ_idx[-1] + REFRACTORY_SAMPLES:
            if best_noise is None or peak > best_noise[1]:
                best_noise = (idx, peak, fpeak, slope)

    for idx in candidates:
        peak = float(integ[idx])
        fpeak = window_peak(abs_f, idx)
        slope = window_peak(np.abs(deriv), idx)

        # Search-back: a long gap since the last QRS means one was missed;
        # revisit the strongest rejected candidate at half threshold.
        if qrs_integ_idx and idx - qrs_integ_idx[-1] > SEARCHBACK_FACTOR * rr_average():
            if best_noise is not None and best_noise[1] > 0.5 * thr_i.threshold:
                accept_qrs(*best_noise, searchback=True)

        if qrs_integ_idx and idx - qrs_integ_idx[-1] < REFRACTORY_SAMPLES:
            continue

        # T-wave rejection: close to the last QRS with a much weaker slope.
        if qrs_integ_idx and idx - qrs_integ_idx[-1] < int(0.36 * fs):
            if qrs_slopes and slope < 0.5 * qrs_slopes[-1]:
                mark_noise(int(idx), peak, fpeak, slope)
                continue

        if peak > thr_i.threshold and fpeak > thr_f.threshold:
            accept_qrs(int(idx), peak, fpeak, slope)
        else:
            mark_noise(int(idx), peak, fpeak, slope)

    # Enforce strict ordering and the refractory on the final index list.
    out: list[int] = []
    for r in sorted(set(r_peaks)):
        if out and r - out[-1] < REFRACTORY_SAMPLES:
            if abs_f[r] > abs_f[out[-1]]:
                out[-1] = r
            continue
        out.append(r)
    return np.asarray(out, dtype=int)


def _ms(ms: float, fs: float) -> int:
    return int(round(ms * fs / 1000.0))


def delineate(
    samples: np.ndarray,
    fs: float,
    r_peaks: np.ndarray,
    record_name: str = "",
) -> BeatSequence:
    """Locate P/Q/S/T around each R-peak and assemble the beat list.

    Beats whose P or T search window is clipped empty (record edges) are
    dropped. Every window is also clipped to the midpoints between adjacent
    R-peaks so neighbouring beats never share samples.
    """
    samples = np.asarray(samples, dtype=np.float64)
    r_peaks = np.asarray(r_peaks, dtype=int)
    n = samples.size
    beats: list[Beat] = []

    w_q = _ms(Q_WINDOW_MS, fs)
    w_p = _ms(P_WINDOW_MS, fs)
    w_s = _ms(S_WINDOW_MS, fs)
    w_t_min = _ms(T_MIN_MS, fs)
    w_t_max = _ms(T_MAX_MS, fs)

    for k, r in enumerate(r_peaks):
        left = 0 if k == 0 else (r_peaks[k - 1] + r + 1) // 2
        right = n - 1 if k == len(r_peaks) - 1 else (r + r_peaks[k + 1]) // 2

        # Q: minimum on [r - 60ms, r)
        q_lo = max(r - w_q, left, 0)
        if q_lo >= r:
            continue
        qx = q_lo + int(np.argmin(samples[q_lo:r]))

        # S: minimum on (r, r + 60ms]
        s_hi = min(r + w_s, right, n - 1)
        if s_hi <= r:
            continue
        sx = r + 1 + int(np.argmin(samples[r + 1 : s_hi + 1]))

        # P: maximum on [r - 240ms, r - 60ms)
        p_lo = max(r - w_p, left, 0)
        p_hi = r - w_q  # exclusive
        if p_lo >= p_hi:
            continue
        px = p_lo + int(np.argmax(samples[p_lo:p_hi]))

        # T: maximum on (r + 80ms, min(r + 400ms, r + 2/3 RR_next)]
        t_hi = min(r + w_t_max, right, n - 1)
        if k < len(r_peaks) - 1:
            t_hi = min(t_hi, r + (2 * (r_peaks[k + 1] - r)) // 3)
        t_lo = r + w_t_min  # exclusive
        if t_lo >= t_hi:
            continue
        tx = t_lo + 1 + int(np.argmax(samples[t_lo + 1 : t_hi + 1]))

        on_x = round((px + qx) / 2)
        off_x = round((sx + tx) / 2)
        beats.append(
            Beat(
                px=int(px), py=float(samples[px]),
                qx=int(qx), qy=float(samples[qx]),
                rx=int(r), ry=float(samples[r]),
                sx=int(sx), sy=float(samples[sx]),
                tx=int(tx), ty=float(samples[tx]),
                on_x=int(on_x), on_y=float(samples[on_x]),
                off_x=int(off_x), off_y=float(samples[off_x]),
            )
        )
    return BeatSequence(record_name=record_name, beats=beats, sampling_rate=fs)


def segment_record(samples: np.ndarray, fs: float, record_name: str = "") -> BeatSequence:
    """Convenience: detect R-peaks then delineate."""
    return delineate(samples, fs, detect_r_peaks(samples, fs), record_name)


def dump_beats_csv(seq: BeatSequence, path: str | Path) -> None:
    """Debug dump of the five named waves per beat."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["beat_idx", "P_x", "P_y", "Q_x", "Q_y", "R_x", "R_y", "S_x", "S_y", "T_x", "T_y"]
        )
        for i, b in enumerate(seq.beats):
            writer.writerow(
                [i, b.px, repr(b.py), b.qx, repr(b.qy), b.rx, repr(b.ry),
                 b.sx, repr(b.sy), b.tx, repr(b.ty)]
            )
