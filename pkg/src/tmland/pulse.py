"""Control pulses: time grids, the Blackman ansatz, and pulse diagnostics.

Controls are complex, piecewise-constant amplitudes eps(t) in the rotating
frame, sampled on the midpoints of a uniform time grid (states live on the
n_steps + 1 boundary points).  A real eps corresponds to driving exactly at
the rotating-frame frequency; the complex phase encodes detuning/chirp.
"""

from dataclasses import dataclass

import numpy as np

from .units import MHZ, NS, fmt

__all__ = [
    "TimeGrid",
    "ControlPulse",
    "blackman_window",
    "blackman_pulse",
    "pulse_spectrum",
    "phase_derivative",
    "save_pulse",
    "load_pulse",
]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid over [t_start, t_stop] with n_steps intervals."""

    t_start: float
    t_stop: float
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not self.t_stop > self.t_start:
            raise ValueError("t_stop must be > t_start")

    @property
    def dt(self) -> float:
        return (self.t_stop - self.t_start) / self.n_steps

    @property
    def duration(self) -> float:
        return self.t_stop - self.t_start

    def midpoints(self) -> np.ndarray:
        """Times of the control samples (interval midpoints)."""
        return self.t_start + self.dt * (np.arange(self.n_steps) + 0.5)

    def boundaries(self) -> np.ndarray:
        """Times of the state samples (interval boundaries)."""
        return self.t_start + self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class ControlPulse:
    """Complex control samples on the midpoints of ``grid``.

    ``omega_r`` records the rotating-frame frequency (rad/s) the samples
    refer to; it is metadata and does not enter the sample values.
    """

    grid: TimeGrid
    samples: np.ndarray
    omega_r: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (self.grid.n_steps,):
            raise ValueError(
                "expected %d samples, got shape %s"
                % (self.grid.n_steps, samples.shape)
            )
        if not np.all(np.isfinite(samples)):
            raise ValueError("pulse samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def with_samples(self, samples: np.ndarray) -> "ControlPulse":
        return ControlPulse(grid=self.grid, samples=samples, omega_r=self.omega_r)


def blackman_window(t, t_start: float, t_stop: float):
    """Blackman envelope (a = 0.16) spanning [t_start, t_stop].

    Exactly zero at t_start and t_stop by construction (the coefficients
    0.42, 0.5, 0.08 sum to zero at the endpoints); zero outside the span.
    """
    t = np.asarray(t, dtype=float)
    s = (t - t_start) / (t_stop - t_start)
    win = 0.42 - 0.5 * np.cos(2 * np.pi * s) + 0.08 * np.cos(4 * np.pi * s)
    win = np.where((s >= 0) & (s <= 1), win, 0.0)
    return win if win.ndim else float(win)


def blackman_pulse(grid: TimeGrid, e0: float, omega_r: float = 0.0) -> ControlPulse:
    """Real Blackman-shaped pulse with peak amplitude e0 (rad/s)."""
    if e0 < 0:
        raise ValueError("peak amplitude must be >= 0")
    samples = e0 * blackman_window(grid.midpoints(), grid.t_start, grid.t_stop)
    return ControlPulse(grid=grid, samples=samples.astype(complex), omega_r=omega_r)


def pulse_spectrum(pulse: ControlPulse):
    """Spectrum of the pulse relative to the rotating frame.

    Returns (delta, magnitude) with delta the angular frequency offsets
    (rad/s, ascending, zero bin centered) and magnitude = |F(eps)| with the
    normalization sum |eps_k|^2 dt = sum |F_m|^2 (discrete Parseval).  A
    pulse eps(t) = e^{+i delta0 t} peaks at +delta0.
    """
    n = pulse.grid.n_steps
    if n < 2:
        raise ValueError("spectrum requires at least 2 samples")
    dt = pulse.grid.dt
    spec = np.fft.fftshift(np.fft.fft(pulse.samples)) * np.sqrt(dt / n)
    delta = 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(n, d=dt))
    return delta, np.abs(spec)


def phase_derivative(pulse: ControlPulse, smoothing_window: int = 1):
    """Smoothed time derivative of the complex pulse phase, d(phi)/dt.

    The phase arg(eps) is unwrapped and differentiated by central
    differences, then moving-average smoothed over ``smoothing_window``
    samples (odd, >= 1).  Values where |eps| < 1e-3 * max|eps| are masked:
    the phase carries no information at negligible amplitude.  Returns a
    masked array in rad/s on the midpoint times.
    """
    if smoothing_window < 1 or smoothing_window % 2 == 0:
        raise ValueError("smoothing_window must be odd and >= 1")
    amp = np.abs(pulse.samples)
    peak = amp.max()
    mask = amp < 1e-3 * peak  # True = masked; all-zero pulse masks everything
    if peak == 0.0:
        return np.ma.masked_all(pulse.grid.n_steps)
    phase = np.unwrap(np.angle(pulse.samples))
    dphi = np.gradient(phase, pulse.grid.dt)
    if smoothing_window > 1:
        kernel = np.ones(smoothing_window)
        norm = np.convolve(np.ones_like(dphi), kernel, mode="same")
        dphi = np.convolve(dphi, kernel, mode="same") / norm
    return np.ma.masked_array(dphi, mask=mask)


def save_pulse(pulse: ControlPulse, path) -> None:
    """Write a pulse CSV: columns (t_ns, re_eps_MHz_2pi, im_eps_MHz_2pi).

    Comment lines record the rotating-frame frequency and the exact grid so
    the pulse round-trips losslessly.
    """
    g = pulse.grid
    with open(path, "w") as fh:
        fh.write("# omega_r_GHz_2pi = %s\n" % fmt(pulse.omega_r / (1e3 * MHZ)))
        fh.write("# t_start_ns = %s\n" % fmt(g.t_start / NS))
        fh.write("# t_stop_ns = %s\n" % fmt(g.t_stop / NS))
        fh.write("# duration_ns = %s\n" % fmt(g.duration / NS))
        fh.write("t_ns,re_eps_MHz_2pi,im_eps_MHz_2pi\n")
        for t, eps in zip(g.midpoints(), pulse.samples):
            fh.write(
                "%s,%s,%s\n"
                % (fmt(t / NS), fmt(eps.real / MHZ), fmt(eps.imag / MHZ))
            )


def load_pulse(path) -> ControlPulse:
    """Read a pulse CSV written by `save_pulse`."""
    meta = {}
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "=" in line:
                    key, _, val = line.lstrip("#").partition("=")
                    meta[key.strip()] = val.strip()
                continue
            if line.startswith("t_ns"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(
                    "%s:%d: expected 3 comma-separated fields, got %r"
                    % (path, lineno, line)
                )
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError:
                raise ValueError(
                    "%s:%d: malformed float in %r" % (path, lineno, line)
                ) from None
    if not rows:
        raise ValueError("%s: no pulse samples" % (path,))
    try:
        t_start = float(meta["t_start_ns"]) * NS
        t_stop = float(meta["t_stop_ns"]) * NS
        omega_r = float(meta["omega_r_GHz_2pi"]) * 1e3 * MHZ
    except KeyError as exc:
        raise ValueError("%s: missing header comment %s" % (path, exc)) from None
    grid = TimeGrid(t_start=t_start, t_stop=t_stop, n_steps=len(rows))
    samples = np.array([complex(re, im) for (_, re, im) in rows]) * MHZ
    return ControlPulse(grid=grid, samples=samples, omega_r=omega_r)
