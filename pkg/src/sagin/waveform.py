"""Multicarrier, chirp and delay-Doppler waveforms with PAPR and ambiguity metrics.

All transforms use orthonormal DFTs, so every modulator preserves energy
and its demodulator is an exact inverse on an ideal channel.

Conventions
-----------
* Multicarrier symbol grids are ``N x S``: subcarrier along axis 0, symbol
  index along axis 1. Samples are emitted symbol after symbol.
* OTFS grids are ``M x N``: delay bin along axis 0, Doppler bin along axis 1.
* Oversampling by ``L`` zero-pads the spectrum about DC, so the waveform is
  the same band-limited signal sampled ``L`` times faster.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import ConfigError, DomainError

#: documented default seed for every random draw in this package
DEFAULT_SEED = 20240607
PAPR_OVERSAMPLE = 4
DEFAULT_PERCENTILES = (50.0, 90.0, 99.0, 99.9)
_QPSK = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / math.sqrt(2.0)


class WaveformFamily(str, enum.Enum):
    OFDM = "OFDM"
    DFTS_OFDM = "DFTS_OFDM"
    OTFS = "OTFS"
    AFDM = "AFDM"
    FMCW = "FMCW"


@dataclass(frozen=True)
class WaveformFrame:
    samples: np.ndarray
    sample_rate: float  # Hz
    family: WaveformFamily
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex).ravel()
        if samples.size == 0:
            raise DomainError("waveform has no samples")
        if not self.sample_rate > 0:
            raise ConfigError("sample_rate must be > 0")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "family", WaveformFamily(self.family))

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    @property
    def energy(self) -> float:
        return float(np.vdot(self.samples, self.samples).real)


@dataclass(frozen=True)
class AmbiguitySurface:
    delay_axis: np.ndarray  # s
    doppler_axis: np.ndarray  # Hz
    magnitude: np.ndarray  # len(delay_axis) x len(doppler_axis), peak 1

    def __post_init__(self):
        if self.magnitude.shape != (self.delay_axis.size, self.doppler_axis.size):
            raise DomainError("ambiguity matrix does not match its axes")

    def peak(self) -> tuple[int, int]:
        """(delay index, Doppler index) of the largest cell."""
        i, j = np.unravel_index(int(np.argmax(self.magnitude)), self.magnitude.shape)
        return int(i), int(j)

    def peak_location(self) -> tuple[float, float]:
        i, j = self.peak()
        return float(self.delay_axis[i]), float(self.doppler_axis[j])


# ---------------------------------------------------------------------------
# helpers

def qpsk(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-energy Gray QPSK symbols."""
    return _QPSK[rng.integers(0, 4, size=shape)]


def _as_grid(symbols, name="symbols") -> np.ndarray:
    x = np.asarray(symbols, dtype=complex)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-D or 2-D array")
    return x


def _check_power_of_two(n: int) -> None:
    if n < 2 or n & (n - 1):
        raise DomainError(f"number of subcarriers must be a power of two >= 2, got {n}")


def _zero_pad_centered(spectrum: np.ndarray, oversample: int) -> np.ndarray:
    """Insert zeros at the band edge (Nyquist) of axis 0."""
    n = spectrum.shape[0]
    if oversample == 1:
        return spectrum
    half = n // 2
    pad = np.zeros((n * (oversample - 1),) + spectrum.shape[1:], dtype=complex)
    return np.concatenate([spectrum[:half], pad, spectrum[half:]], axis=0)


def _strip_padding(spectrum: np.ndarray, n: int) -> np.ndarray:
    half = n // 2
    total = spectrum.shape[0]
    if total == n:
        return spectrum
    return np.concatenate([spectrum[:half], spectrum[total - (n - half):]], axis=0)


def idft_core(symbols: np.ndarray) -> np.ndarray:
    """Orthonormal inverse DFT along axis 0: the bare multicarrier core."""
    return np.fft.ifft(symbols, axis=0, norm="ortho")


def _multicarrier(grid: np.ndarray, cp_len: int, oversample: int) -> np.ndarray:
    n = grid.shape[0]
    if not 0 <= cp_len < n:
        raise DomainError("cyclic prefix length must satisfy 0 <= cp_len < N")
    if oversample < 1:
        raise ConfigError("oversample factor must be >= 1")
    # scale so the oversampled samples keep the symbol energy
    blocks = idft_core(_zero_pad_centered(grid, oversample))
    cp = cp_len * oversample
    if cp:
        blocks = np.concatenate([blocks[-cp:], blocks], axis=0)
    return blocks.T.ravel()


def _multicarrier_inverse(samples: np.ndarray, n: int, n_sym: int, cp_len: int, oversample: int) -> np.ndarray:
    block = (n + cp_len) * oversample
    if samples.size != block * n_sym:
        raise DomainError("sample count does not match the frame grid")
    blocks = samples.reshape(n_sym, block).T[cp_len * oversample:]
    return _strip_padding(np.fft.fft(blocks, axis=0, norm="ortho"), n)


# ---------------------------------------------------------------------------
# OFDM and DFT-spread OFDM

def ofdm_modulate(symbols, cp_len: int = 0, oversample: int = 1, subcarrier_spacing: float = 1.0) -> WaveformFrame:
    """Per-symbol IDFT plus cyclic prefix over an ``N x S`` symbol grid."""
    grid = _as_grid(symbols)
    n, s = grid.shape
    _check_power_of_two(n)
    samples = _multicarrier(grid, cp_len, oversample)
    meta = {"n_subcarriers": n, "n_symbols": s, "cp_len": cp_len, "oversample": oversample}
    return WaveformFrame(samples, n * oversample * subcarrier_spacing, WaveformFamily.OFDM, meta)


def ofdm_demodulate(frame: WaveformFrame) -> np.ndarray:
    g = frame.grid
    return _multicarrier_inverse(frame.samples, g["n_subcarriers"], g["n_symbols"], g["cp_len"], g["oversample"])


def dfts_modulate(symbols, cp_len: int = 0, oversample: int = 1, subcarrier_spacing: float = 1.0) -> WaveformFrame:
    """DFT-spread OFDM: a forward DFT across the data of each symbol, then OFDM."""
    grid = _as_grid(symbols)
    _check_power_of_two(grid.shape[0])
    spread = np.fft.fft(grid, axis=0, norm="ortho")
    frame = ofdm_modulate(spread, cp_len, oversample, subcarrier_spacing)
    return WaveformFrame(frame.samples, frame.sample_rate, WaveformFamily.DFTS_OFDM, frame.grid)


def dfts_demodulate(frame: WaveformFrame) -> np.ndarray:
    return np.fft.ifft(ofdm_demodulate(frame), axis=0, norm="ortho")


# ---------------------------------------------------------------------------
# OTFS

def otfs_modulate(dd_symbols, delay_resolution: float = 1.0) -> WaveformFrame:
    """Place an ``M x N`` delay-Doppler grid on the air.

    ISFFT to the time-frequency plane, then a rectangular-pulse Heisenberg
    transform (one length-M IDFT per time slot). ``delay_resolution`` is the
    sample period in seconds.
    """
    x = np.asarray(dd_symbols, dtype=complex)
    if x.ndim != 2 or min(x.shape) < 2:
        raise DomainError("delay-Doppler grid must be M x N with M, N >= 2")
    m, n = x.shape
    tf = np.fft.ifft(np.fft.fft(x, axis=0, norm="ortho"), axis=1, norm="ortho")
    blocks = np.fft.ifft(tf, axis=0, norm="ortho")
    meta = {"delay_bins": m, "doppler_bins": n}
    return WaveformFrame(blocks.T.ravel(), 1.0 / delay_resolution, WaveformFamily.OTFS, meta)


def otfs_demodulate(frame: WaveformFrame) -> np.ndarray:
    m, n = frame.grid["delay_bins"], frame.grid["doppler_bins"]
    if frame.samples.size != m * n:
        raise DomainError("sample count does not match the delay-Doppler grid")
    blocks = frame.samples.reshape(n, m).T
    tf = np.fft.fft(blocks, axis=0, norm="ortho")
    return np.fft.ifft(np.fft.fft(tf, axis=1, norm="ortho"), axis=0, norm="ortho")


def delay_doppler_channel(samples, paths) -> np.ndarray:
    """Cyclic multipath channel: ``paths`` holds (gain, delay taps, Doppler bins).

    A Doppler of ``k`` bins rotates the phase by ``2 pi k q / len(samples)``
    at sample ``q``, matching one Doppler bin of an OTFS frame.
    """
    s = np.asarray(samples, dtype=complex)
    q = np.arange(s.size)
    out = np.zeros_like(s)
    for gain, delay, doppler in paths:
        shifted = np.roll(s, int(delay))
        out += gain * shifted * np.exp(2j * np.pi * doppler * (q - int(delay)) / s.size)
    return out


# ---------------------------------------------------------------------------
# AFDM

def afdm_c1(max_doppler: float, n: int) -> float:
    """Chirp rate c1 = (2 nu_max + 1) / (2N), nu_max in Doppler bins."""
    if n < 2 or max_doppler < 0:
        raise DomainError("need N >= 2 and max_doppler >= 0")
    return (2.0 * max_doppler + 1.0) / (2.0 * n)


def _chirp(c: float, n: int) -> np.ndarray:
    idx = np.arange(n, dtype=float)
    # reduce the quadratic phase modulo one turn before scaling by 2 pi
    return np.exp(2j * np.pi * np.mod(c * idx * idx, 1.0))


def afdm_modulate(symbols, c1: float = 0.0, c2: float = 0.0, cpp_len: int = 0, sample_rate: float = 1.0) -> WaveformFrame:
    """Inverse discrete affine Fourier transform x = L1^H F^H L2^H s.

    ``L_c = diag(exp(-j 2 pi c n^2))``. ``cpp_len`` prepends a chirp-periodic
    prefix; with ``cpp_len = 0`` the transform is unitary.
    """
    s = np.asarray(symbols, dtype=complex)
    if s.ndim != 1 or s.size < 2:
        raise DomainError("AFDM symbols must be a 1-D array of length >= 2")
    n = s.size
    if not 0 <= cpp_len < n:
        raise DomainError("prefix length must satisfy 0 <= cpp_len < N")
    x = _chirp(c1, n) * idft_core(_chirp(c2, n) * s)
    if cpp_len:
        m = np.arange(-cpp_len, 0)
        prefix = x[n + m] * np.exp(-2j * np.pi * np.mod(c1 * (n * n + 2 * n * m), 1.0))
        x = np.concatenate([prefix, x])
    meta = {"n_subcarriers": n, "c1": c1, "c2": c2, "cpp_len": cpp_len}
    return WaveformFrame(x, sample_rate, WaveformFamily.AFDM, meta)


def afdm_demodulate(frame: WaveformFrame) -> np.ndarray:
    g = frame.grid
    n = g["n_subcarriers"]
    x = frame.samples[g["cpp_len"]:]
    if x.size != n:
        raise DomainError("sample count does not match the AFDM frame")
    return np.conj(_chirp(g["c2"], n)) * np.fft.fft(np.conj(_chirp(g["c1"], n)) * x, norm="ortho")


# ---------------------------------------------------------------------------
# FMCW

def fmcw_chirp(bandwidth: float, duration: float, sample_rate: float, direction: str = "up") -> WaveformFrame:
    """Complex-baseband linear chirp exp(+-j pi (B/T) t^2) over [0, T)."""
    if not (bandwidth > 0 and duration > 0):
        raise ConfigError("chirp bandwidth and duration must be > 0")
    if sample_rate < bandwidth:
        raise ConfigError(f"sample rate {sample_rate:g} Hz undersamples a {bandwidth:g} Hz sweep")
    if direction not in ("up", "down"):
        raise ConfigError("direction must be 'up' or 'down'")
    n = int(round(duration * sample_rate))
    if n < 2:
        raise ConfigError("chirp must span at least two samples")
    t = np.arange(n) / sample_rate
    sign = 1.0 if direction == "up" else -1.0
    slope = bandwidth / duration
    samples = np.exp(sign * 1j * np.pi * np.mod(slope * t * t, 2.0))
    meta = {"bandwidth_hz": bandwidth, "duration_s": duration, "direction": direction}
    return WaveformFrame(samples, sample_rate, WaveformFamily.FMCW, meta)


def instantaneous_frequency(frame: WaveformFrame) -> np.ndarray:
    """Phase derivative in Hz between consecutive samples."""
    phase = np.unwrap(np.angle(frame.samples))
    return np.diff(phase) * frame.sample_rate / (2.0 * np.pi)


def fmcw_range_profile(rx, chirp: WaveformFrame, n_fft: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Dechirp ``rx`` against ``chirp`` and return (range axis m, |FFT|).

    A target at range R gives a beat tone at 2 R B / (c T) Hz.
    """
    rx = np.asarray(rx, dtype=complex)
    if rx.size != chirp.samples.size:
        raise DomainError("received block must match the chirp length")
    n_fft = n_fft or rx.size
    beat = np.conj(rx) * chirp.samples
    spectrum = np.abs(np.fft.fft(beat, n_fft))
    freqs = np.arange(n_fft) * chirp.sample_rate / n_fft
    slope = chirp.grid["bandwidth_hz"] / chirp.grid["duration_s"]
    return SPEED_OF_LIGHT * freqs / (2.0 * slope), spectrum


# ---------------------------------------------------------------------------
# metrics

def papr(frame) -> float:
    """Peak-to-average power ratio in dB."""
    s = frame.samples if isinstance(frame, WaveformFrame) else np.asarray(frame, dtype=complex)
    if s.size == 0:
        raise DomainError("empty waveform")
    power = np.abs(s) ** 2
    mean = power.mean()
    if mean == 0:
        raise DomainError("PAPR of an all-zero waveform is undefined")
    return float(10.0 * np.log10(power.max() / mean))


def _papr_rows(blocks: np.ndarray) -> np.ndarray:
    power = np.abs(blocks) ** 2
    return 10.0 * np.log10(power.max(axis=0) / power.mean(axis=0))


def oversample(samples, factor: int) -> np.ndarray:
    """Band-limited interpolation by zero-padding the spectrum about DC."""
    s = np.asarray(samples, dtype=complex)
    if factor < 1:
        raise ConfigError("oversample factor must be >= 1")
    if factor == 1:
        return s
    spectrum = np.fft.fft(s, norm="ortho")[:, None]
    return idft_core(_zero_pad_centered(spectrum, factor))[:, 0]


def random_frame(family, rng: np.random.Generator, **params) -> WaveformFrame:
    """One frame of random QPSK data (FMCW carries none) for metric studies.

    Parameters by family (defaults in brackets):
    OFDM, DFTS_OFDM: n_subcarriers [256], n_symbols [1], cp_len [0], oversample [1];
    OTFS: delay_bins [32], doppler_bins [16];
    AFDM: n_subcarriers [256], c1 or max_doppler_bins [1], c2 [0], cpp_len [0];
    FMCW: bandwidth_hz, duration_s, sample_rate_hz, direction [up].
    """
    family = WaveformFamily(family)
    p = dict(params)
    if family in (WaveformFamily.OFDM, WaveformFamily.DFTS_OFDM):
        n = int(p.get("n_subcarriers", 256))
        grid = qpsk(rng, (n, int(p.get("n_symbols", 1))))
        mod = ofdm_modulate if family is WaveformFamily.OFDM else dfts_modulate
        return mod(grid, int(p.get("cp_len", 0)), int(p.get("oversample", 1)), float(p.get("subcarrier_spacing_hz", 1.0)))
    if family is WaveformFamily.OTFS:
        grid = qpsk(rng, (int(p.get("delay_bins", 32)), int(p.get("doppler_bins", 16))))
        return otfs_modulate(grid, 1.0 / float(p.get("sample_rate_hz", 1.0)))
    if family is WaveformFamily.AFDM:
        n = int(p.get("n_subcarriers", 256))
        c1 = p["c1"] if "c1" in p else afdm_c1(float(p.get("max_doppler_bins", 1.0)), n)
        return afdm_modulate(qpsk(rng, n), float(c1), float(p.get("c2", 0.0)), int(p.get("cpp_len", 0)),
                             float(p.get("sample_rate_hz", 1.0)))
    try:
        return fmcw_chirp(float(p["bandwidth_hz"]), float(p["duration_s"]), float(p["sample_rate_hz"]),
                          p.get("direction", "up"))
    except KeyError as exc:
        raise ConfigError(f"FMCW needs parameter {exc.args[0]}") from None


def papr_samples(
    family,
    n_frames: int = 10_000,
    seed: int = DEFAULT_SEED,
    oversample_factor: int = PAPR_OVERSAMPLE,
    chunk: int = 1024,
    **params,
) -> np.ndarray:
    """PAPR (dB) of ``n_frames`` random QPSK frames.

    Frame ``i`` draws its symbols from ``default_rng([seed, i])``, so the
    result does not depend on chunking or on how frames are distributed.
    Multicarrier frames are oversampled by ``oversample_factor``; FMCW is
    deterministic and measured at its own sample rate.
    """
    family = WaveformFamily(family)
    if n_frames < 1:
        raise ConfigError("n_frames must be >= 1")
    if family is WaveformFamily.FMCW:
        return np.full(n_frames, papr(random_frame(family, None, **params)))
    n = int(params.get("n_subcarriers", 256))
    fast = family in (WaveformFamily.OFDM, WaveformFamily.DFTS_OFDM) and int(params.get("n_symbols", 1)) == 1
    if not fast:
        return np.array([
            papr(oversample(random_frame(family, np.random.default_rng([seed, i]), **params).samples, oversample_factor))
            for i in range(n_frames)
        ])
    # one-symbol multicarrier frames, vectorized over a chunk of frames
    _check_power_of_two(n)
    out = np.empty(n_frames)
    for start in range(0, n_frames, chunk):
        stop = min(start + chunk, n_frames)
        grid = np.stack([qpsk(np.random.default_rng([seed, i]), n) for i in range(start, stop)], axis=1)
        if family is WaveformFamily.DFTS_OFDM:
            grid = np.fft.fft(grid, axis=0, norm="ortho")
        out[start:stop] = _papr_rows(idft_core(_zero_pad_centered(grid, oversample_factor)))
    return out


def papr_statistics(family, percentiles=DEFAULT_PERCENTILES, **kw) -> dict:
    values = papr_samples(family, **kw)
    return {
        "family": WaveformFamily(family).value,
        "n_frames": int(values.size),
        "mean_db": float(values.mean()),
        "percentiles_db": {f"{p:g}": float(np.percentile(values, p)) for p in percentiles},
    }


def doppler_shift(fc: float, v: float) -> float:
    """Doppler shift in Hz of carrier ``fc`` for radial speed ``v`` m/s."""
    return fc * v / SPEED_OF_LIGHT


def _delay_taps(delays, fs: float, length: int) -> np.ndarray:
    taps = np.rint(np.asarray(delays, dtype=float) * fs).astype(int)
    if np.any(np.abs(taps) >= length):
        raise DomainError("delay grid exceeds the frame duration")
    return taps


def cross_ambiguity(rx, ref: WaveformFrame, delays, dopplers) -> AmbiguitySurface:
    """|sum_t rx(t) ref*(t - tau) exp(-j 2 pi nu t)| on a delay x Doppler grid.

    Delays are rounded to whole samples (the reported axis holds the rounded
    values); the shifted reference is zero outside its support.
    """
    rx = np.asarray(rx, dtype=complex)
    s = ref.samples
    if rx.size != s.size:
        raise DomainError("received block must match the reference length")
    delays = np.atleast_1d(np.asarray(delays, dtype=float))
    dopplers = np.atleast_1d(np.asarray(dopplers, dtype=float))
    if delays.size == 0 or dopplers.size == 0:
        raise DomainError("ambiguity grids must be non-empty")
    fs, n = ref.sample_rate, s.size
    taps = _delay_taps(delays, fs, n)
    t = np.arange(n) / fs
    products = np.zeros((taps.size, n), dtype=complex)
    for row, d in enumerate(taps):
        if d >= 0:
            products[row, d:] = rx[d:] * np.conj(s[: n - d])
        else:
            products[row, : n + d] = rx[: n + d] * np.conj(s[-d:])
    kernel = np.exp(-2j * np.pi * np.outer(t, dopplers))
    mag = np.abs(products @ kernel)
    peak = mag.max()
    if peak == 0:
        raise DomainError("ambiguity surface is identically zero")
    return AmbiguitySurface(taps / fs, dopplers.copy(), mag / peak)


def ambiguity(frame: WaveformFrame, delays, dopplers) -> AmbiguitySurface:
    """Auto-ambiguity surface of ``frame``, normalized to its grid peak."""
    return cross_ambiguity(frame.samples, frame, delays, dopplers)


def inject_echo(frame: WaveformFrame, delay: float, doppler: float, snr_db: float | None = None, seed: int = DEFAULT_SEED):
    """Delayed, Doppler-shifted copy of ``frame`` plus optional complex AWGN."""
    s = frame.samples
    n = s.size
    d = int(_delay_taps([delay], frame.sample_rate, n)[0])
    echo = np.zeros(n, dtype=complex)
    if d >= 0:
        echo[d:] = s[: n - d]
    else:
        echo[: n + d] = s[-d:]
    echo *= np.exp(2j * np.pi * doppler * np.arange(n) / frame.sample_rate)
    if snr_db is not None:
        rng = np.random.default_rng(seed)
        power = np.mean(np.abs(s) ** 2) * 10.0 ** (-snr_db / 10.0)
        echo += math.sqrt(power / 2.0) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return echo
