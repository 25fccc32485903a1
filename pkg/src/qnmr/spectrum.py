"""Free-induction-decay assembly, Fourier processing and comparison metrics.

Sign conventions: the decay series stores <M_X> + i <M_Y> per time point,
so an isolated offset omega shows up as exp(+i omega t)/2 and lands at a
positive frequency (+omega/2pi Hz) after the forward DFT. The frequency
axis covers (-1/(2 dt), +1/(2 dt)] with the Nyquist bin mapped to the
positive side; ppm = f / (reference_hz * 1e-6) + carrier. Axes are stored
descending in ppm, the usual display direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, ValidationError


@dataclass(frozen=True)
class FidSeries:
    """Complex transverse magnetization sampled at k * dwell_time."""

    dwell_time: float
    samples: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        if not (self.dwell_time > 0.0 and math.isfinite(self.dwell_time)):
            raise ValidationError(f"dwell_time must be positive, got {self.dwell_time}")
        object.__setattr__(self, "dwell_time", float(self.dwell_time))
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 1 or samples.size == 0:
            raise ValidationError("samples must be a nonempty 1d series")
        object.__setattr__(self, "samples", samples)

    @property
    def times(self) -> np.ndarray:
        return self.dwell_time * np.arange(self.samples.size)

    def energy(self) -> float:
        """Discrete signal energy dt * sum |x|^2 (integral convention)."""
        return float(self.dwell_time * np.sum(np.abs(self.samples) ** 2))


@dataclass(frozen=True)
class Spectrum:
    """One-dimensional spectrum on a descending ppm axis."""

    ppm: np.ndarray
    intensity: np.ndarray
    reference_hz: float
    freq_hz: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        n = len(self.ppm)
        if not (len(self.intensity) == len(self.freq_hz) == len(self.values) == n):
            raise ValidationError("spectrum arrays must share one length")
        if n > 1 and not np.all(np.diff(self.ppm) < 0):
            raise ValidationError("ppm axis must be strictly descending")
        if not (self.reference_hz > 0):
            raise ValidationError("reference frequency must be positive")

    def energy(self) -> float:
        """Bin width times sum |V|^2; matches FidSeries.energy (Parseval)."""
        df = abs(self.freq_hz[0] - self.freq_hz[1]) if len(self.freq_hz) > 1 else 1.0
        return float(df * np.sum(np.abs(self.values) ** 2))


def assemble_fid(re, im, dwell_time: float, label: str = "") -> FidSeries:
    re = np.asarray(re, dtype=float)
    im = np.asarray(im, dtype=float)
    if re.shape != im.shape:
        raise ValidationError(f"length mismatch: {re.shape} vs {im.shape}")
    return FidSeries(dwell_time, re + 1j * im, label)


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def to_spectrum(
    fid: FidSeries,
    reference_hz: float,
    pad_factor: int = 1,
    apodization_hz: float | None = None,
    carrier_ppm: float = 0.0,
    phase0: float = 0.0,
) -> Spectrum:
    """FFT of the (optionally apodized, zero-padded) decay series.

    Padding goes to pad_factor times the next power of two of the sample
    count. Apodization multiplies by exp(-pi * lb * t), lb in Hz.
    """
    if pad_factor < 1 or int(pad_factor) != pad_factor:
        raise ValidationError(f"pad_factor must be a positive integer, got {pad_factor}")
    if reference_hz <= 0:
        raise ValidationError(f"reference frequency must be positive, got {reference_hz}")
    x = fid.samples
    if apodization_hz is not None:
        if apodization_hz < 0:
            raise ValidationError("apodization width must be nonnegative")
        x = x * np.exp(-math.pi * apodization_hz * fid.times)
    n = int(pad_factor) * _next_pow2(x.size)
    buf = np.zeros(n, dtype=complex)
    buf[: x.size] = x
    values = np.fft.fft(buf) * fid.dwell_time
    freqs = np.fft.fftfreq(n, d=fid.dwell_time)
    if n % 2 == 0:
        freqs[n // 2] = -freqs[n // 2]  # Nyquist bin belongs to the + side
    order = np.argsort(freqs)[::-1]
    freqs = freqs[order]
    values = values[order] * np.exp(1j * phase0)
    ppm = freqs / (reference_hz * 1e-6) + carrier_ppm
    return Spectrum(
        ppm=ppm,
        intensity=values.real.copy(),
        reference_hz=float(reference_hz),
        freq_hz=freqs,
        values=values,
    )


def mse(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValidationError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.mean(np.abs(a - b) ** 2))


def cosine_similarity(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValidationError(f"length mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise NumericalError("cosine similarity undefined for a zero vector")
    return float(np.real(np.vdot(a, b)) / (na * nb))


def peak_positions(spectrum: Spectrum, threshold: float = 0.05) -> np.ndarray:
    """ppm of strict local maxima at or above threshold * max intensity.

    Sorted by intensity, strongest first.
    """
    y = spectrum.intensity
    if y.size < 3:
        return np.empty(0)
    interior = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])
    cut = threshold * y.max()
    idx = np.nonzero(interior & (y[1:-1] >= cut))[0] + 1
    idx = idx[np.argsort(-y[idx], kind="stable")]
    return spectrum.ppm[idx]


def write_fid_csv(path: str, fid: FidSeries) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if fid.label:
            fh.write(f"# label {fid.label}\n")
        fh.write(f"# dwell_time_s {fid.dwell_time!r}\n")
        fh.write("t_seconds,re,im\n")
        for t, z in zip(fid.times, fid.samples):
            fh.write(f"{float(t)!r},{float(z.real)!r},{float(z.imag)!r}\n")


def read_fid_csv(path: str) -> FidSeries:
    dwell = None
    label = ""
    re, im = [], []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    parts = line[1:].split()
                    if parts and parts[0] == "dwell_time_s":
                        dwell = float(parts[1])
                    elif parts and parts[0] == "label":
                        label = " ".join(parts[1:])
                    continue
                if line.startswith("t_seconds"):
                    continue
                cells = line.split(",")
                re.append(float(cells[1]))
                im.append(float(cells[2]))
    except OSError as exc:
        raise ValidationError(f"cannot read FID {path}: {exc}") from exc
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"malformed FID row in {path}: {exc}") from exc
    if dwell is None:
        if len(re) < 1:
            raise ValidationError(f"no FID rows in {path}")
        raise ValidationError(f"missing dwell_time_s header in {path}")
    return assemble_fid(re, im, dwell, label)


def write_spectrum_csv(path: str, spectrum: Spectrum) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# reference_hz {spectrum.reference_hz!r}\n")
        fh.write("ppm,intensity\n")
        for p, y in zip(spectrum.ppm, spectrum.intensity):
            fh.write(f"{float(p)!r},{float(y)!r}\n")


def read_spectrum_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """ppm and intensity columns; enough for comparisons and plots."""
    ppm, intensity = [], []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith("#") or line.startswith("ppm"):
                    continue
                cells = line.split(",")
                ppm.append(float(cells[0]))
                intensity.append(float(cells[1]))
    except OSError as exc:
        raise ValidationError(f"cannot read spectrum {path}: {exc}") from exc
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"malformed spectrum row in {path}: {exc}") from exc
    if not ppm:
        raise ValidationError(f"no spectrum rows in {path}")
    return np.asarray(ppm), np.asarray(intensity)


def write_svg_plot(
    path: str,
    x: np.ndarray,
    y: np.ndarray,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    flip_x: bool = False,
    width: int = 900,
    height: int = 420,
) -> None:
    """Small static line plot; no plotting dependency required."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValidationError("plot needs two equal-length arrays, length >= 2")
    margin = 60
    xw, yw = width - 2 * margin, height - 2 * margin
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    fx = (x - x0) / (x1 - x0)
    if flip_x:
        fx = 1.0 - fx
    px = margin + fx * xw
    py = margin + (1.0 - (y - y0) / (y1 - y0)) * yw
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    x_lo, x_hi = (x1, x0) if flip_x else (x0, x1)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<rect x="{margin}" y="{margin}" width="{xw}" height="{yw}" '
        f'fill="none" stroke="#999"/>',
        f'<polyline points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="1"/>',
        f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{x_label}</text>',
        f'<text x="16" y="{height / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {height / 2:.0f})">{y_label}</text>',
        f'<text x="{margin}" y="{height - 34}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{x_lo:.4g}</text>',
        f'<text x="{width - margin}" y="{height - 34}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{x_hi:.4g}</text>',
        f'<text x="{margin - 6}" y="{margin + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{y1:.4g}</text>',
        f'<text x="{margin - 6}" y="{height - margin + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{y0:.4g}</text>',
        "</svg>",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
