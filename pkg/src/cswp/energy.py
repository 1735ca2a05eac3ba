"""Hamming-weight instruction power model: static/dynamic apportioning,
synthetic measurement grids, least-squares fitting, and trace energy.

Power measured while alternating an instruction with all-zero operands splits
into a base term plus linear contributions per input bit set (c_in) and per
output bit set (c_out). Grids here are synthetic: the generator plants known
coefficients plus seeded Gaussian noise, and the fit recovers them.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import core
from .core import CswpError, Program, execute


class FitRankError(CswpError):
    """The fit's design matrix is rank deficient; names the collinear column."""


@dataclass
class EnergyModel:
    """Per-bit power coefficients plus the operating point.

    p_idle_single is the single-core idle power (mW), c_in/c_out the mW per
    input/output Hamming unit, v_dd the supply (V), f the clock (Hz).
    """

    p_idle_single: float
    c_in: float
    c_out: float
    v_dd: float = 1.0
    f: float = 500e6

    def __post_init__(self):
        if self.p_idle_single < 0 or self.c_in < 0 or self.c_out < 0:
            raise CswpError("power coefficients must be non-negative")
        if self.f <= 0:
            raise CswpError("clock frequency must be positive")


# coefficients published for the XS1-L case study: 164 mW idle single core,
# 1.3 mW per input bit set, 4.4 mW per output bit set, 1.0 V, 500 MHz
PRESETS = {
    "xs1l-paper": EnergyModel(p_idle_single=164.0, c_in=1.3, c_out=4.4, v_dd=1.0, f=500e6),
}


def load_model(spec: str) -> EnergyModel:
    """A preset name or a JSON file with keys p_idle_single_mw, c_in_mw,
    c_out_mw, and optional v_dd_v, f_hz."""
    if spec in PRESETS:
        return PRESETS[spec]
    try:
        with open(spec) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise CswpError(f"unknown preset and unreadable model file {spec!r}: {e}") from None
    try:
        return EnergyModel(
            p_idle_single=float(raw["p_idle_single_mw"]),
            c_in=float(raw["c_in_mw"]),
            c_out=float(raw["c_out_mw"]),
            v_dd=float(raw.get("v_dd_v", 1.0)),
            f=float(raw.get("f_hz", 500e6)),
        )
    except KeyError as e:
        raise CswpError(f"model file {spec!r} missing key {e}") from None


@dataclass
class Measurement:
    """One grid point: operands, their Hamming units, measured power (mW)."""

    op_a: int
    op_b: int
    h_in: int
    h_out: int
    power: float


@dataclass
class FitResult:
    base: float
    c_in: float
    c_out: float
    mean_abs_error: float
    residuals: np.ndarray = field(repr=False)

    def report_lines(self) -> list[str]:
        return [
            f"base_mw={self.base:.3f}",
            f"c_in_mw={self.c_in:.3f}",
            f"c_out_mw={self.c_out:.3f}",
            f"mae_mw={self.mean_abs_error:.3f}",
        ]


@dataclass
class PowerSummary:
    p_tdual: float
    p_tsingle: float
    p_dmin: float
    p_dmax: float
    p_drng: float
    pct_min: float
    pct_max: float

    def report_lines(self) -> list[str]:
        return [
            f"p_tdual_mw={self.p_tdual:.3f}",
            f"p_tsingle_mw={self.p_tsingle:.3f}",
            f"p_dmin_mw={self.p_dmin:.3f}",
            f"p_dmax_mw={self.p_dmax:.3f}",
            f"p_drng_mw={self.p_drng:.3f}",
            f"pct_min={self.pct_min:.4f}",
            f"pct_max={self.pct_max:.4f}",
        ]


def summarize_power(p_tdual: float, test_powers: Sequence[float]) -> PowerSummary:
    """Split idle power across the two cores and express the observed dynamic
    range as a fraction of single-core power: p_x / (p_tsingle + p_x)."""
    if not test_powers:
        raise CswpError("need at least one test power")
    if any(p < 0 for p in test_powers):
        raise CswpError("test powers must be non-negative")
    p_tsingle = p_tdual / 2
    p_dmin = min(test_powers) - p_tdual
    p_dmax = max(test_powers) - p_tdual
    return PowerSummary(
        p_tdual=p_tdual,
        p_tsingle=p_tsingle,
        p_dmin=p_dmin,
        p_dmax=p_dmax,
        p_drng=p_dmax - p_dmin,
        pct_min=p_dmin / (p_tsingle + p_dmin),
        pct_max=p_dmax / (p_tsingle + p_dmax),
    )


GRID_MNEMONICS = ("add", "sub", "and", "or", "xor", "shl", "shr")
MAX_GRID_WIDTH = 8


def gen_synthetic_grid(
    width: int,
    mnemonic: str,
    model: EnergyModel,
    base: float,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> list[Measurement]:
    """Every operand pair (a, b) in [0, 2^width)^2 for a two-input mnemonic:
    h_in = weight(a) + weight(b), h_out = weight(result), power = base +
    c_in*h_in + c_out*h_out + N(0, sigma). Deterministic for a fixed seed."""
    if mnemonic not in GRID_MNEMONICS:
        raise CswpError(f"grid generation supports {', '.join(GRID_MNEMONICS)}; got {mnemonic!r}")
    if not 1 <= width <= MAX_GRID_WIDTH:
        raise CswpError(f"grid width {width} outside 1..{MAX_GRID_WIDTH} (full grids only)")
    size = 1 << width
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, noise_sigma, size * size) if noise_sigma > 0 else np.zeros(size * size)
    out = []
    k = 0
    for a in range(size):
        for b in range(size):
            result = core.apply_mnemonic(mnemonic, (a, b), width)
            h_in = a.bit_count() + b.bit_count()
            h_out = result.bit_count()
            power = base + model.c_in * h_in + model.c_out * h_out + float(noise[k])
            out.append(Measurement(op_a=a, op_b=b, h_in=h_in, h_out=h_out, power=power))
            k += 1
    return out


def fit_hamming_model(measurements: Sequence[Measurement]) -> FitResult:
    """Ordinary least squares for power ~ base + c_in*h_in + c_out*h_out."""
    if len(measurements) < 3:
        raise CswpError(f"need at least 3 measurements, got {len(measurements)}")
    h_in = np.array([m.h_in for m in measurements], dtype=float)
    h_out = np.array([m.h_out for m in measurements], dtype=float)
    power = np.array([m.power for m in measurements], dtype=float)

    design = np.column_stack([np.ones_like(h_in), h_in, h_out])
    if np.linalg.matrix_rank(design) < 3:
        if np.ptp(h_in) == 0:
            raise FitRankError("design matrix rank deficient: h_in is constant")
        if np.ptp(h_out) == 0:
            raise FitRankError("design matrix rank deficient: h_out is constant")
        raise FitRankError("design matrix rank deficient: h_in and h_out are collinear")

    coef, _, _, _ = np.linalg.lstsq(design, power, rcond=None)
    base, c_in, c_out = (float(c) for c in coef)
    residuals = power - design @ coef
    return FitResult(
        base=base,
        c_in=c_in,
        c_out=c_out,
        mean_abs_error=float(np.mean(np.abs(residuals))),
        residuals=residuals,
    )


def predict_power(model: EnergyModel, base: float, h_in: int, h_out: int) -> float:
    return base + model.c_in * h_in + model.c_out * h_out


def trace_energy(
    program: Program,
    assignment,
    model: EnergyModel,
    include_input_term: bool = False,
) -> float:
    """Energy (nJ) of one execution at one instruction per clock cycle:
    each transition costs (p_idle_single + c_out * output Hamming distance)
    for one period. include_input_term adds c_in times the Hamming distance
    on the operand buses, assuming a bus holds its last driven value until
    the next instruction drives it."""
    trace = execute(program, assignment)
    vals = [bv.value for bv in trace.outputs]
    period_s = 1.0 / model.f

    bus = [0, 0, 0]
    bus_dist = []
    for args in trace.input_values:
        d = 0
        for k, v in enumerate(args):
            d += (bus[k] ^ v).bit_count()
            bus[k] = v
        bus_dist.append(d)

    total_mw_cycles = 0.0
    for i in range(len(vals) - 1):
        h_out = (vals[i] ^ vals[i + 1]).bit_count()
        p = model.p_idle_single + model.c_out * h_out
        if include_input_term:
            p += model.c_in * bus_dist[i + 1]
        total_mw_cycles += p
    return total_mw_cycles * period_s * 1e6  # mW*s -> nJ


def dynamic_power(alpha: float, c_sw: float, v_dd: float, f: float) -> float:
    """Switching power in watts: activity factor x switched capacitance (F)
    x supply squared x frequency."""
    if not 0 <= alpha <= 1:
        raise CswpError(f"activity factor {alpha} outside [0, 1]")
    return alpha * c_sw * v_dd * v_dd * f


# ---------------------------------------------------------------------------
# CSV and heat-map export

CSV_HEADER = ["op_a", "op_b", "h_in", "h_out", "power_mw"]


def measurements_to_csv(measurements: Sequence[Measurement], width: int) -> str:
    digits = max(1, (width + 3) // 4)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for m in measurements:
        writer.writerow(
            [f"0x{m.op_a:0{digits}x}", f"0x{m.op_b:0{digits}x}", m.h_in, m.h_out, f"{m.power:.6f}"]
        )
    return buf.getvalue()


def measurements_from_csv(text: str) -> list[Measurement]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != CSV_HEADER:
        raise CswpError(f"bad measurement CSV header {header!r}, want {CSV_HEADER!r}")
    out = []
    for row in reader:
        if not row:
            continue
        out.append(
            Measurement(
                op_a=int(row[0], 0),
                op_b=int(row[1], 0),
                h_in=int(row[2]),
                h_out=int(row[3]),
                power=float(row[4]),
            )
        )
    return out


HEATMAP_STAGES = ("raw", "minus-out", "minus-in", "residual")


def heatmap_matrix(
    measurements: Sequence[Measurement],
    stage: str,
    c_in: float,
    c_out: float,
) -> np.ndarray:
    """Dense op_a x op_b power matrix for one decomposition stage: the raw
    grid, the grid minus c_out*h_out, minus c_in*h_in, or minus both."""
    if stage not in HEATMAP_STAGES:
        raise CswpError(f"unknown heatmap stage {stage!r}, want one of {', '.join(HEATMAP_STAGES)}")
    size = max(max(m.op_a, m.op_b) for m in measurements) + 1
    if len(measurements) != size * size:
        raise CswpError(f"need a full {size}x{size} grid, got {len(measurements)} rows")
    grid = np.zeros((size, size))
    for m in measurements:
        value = m.power
        if stage in ("minus-out", "residual"):
            value -= c_out * m.h_out
        if stage in ("minus-in", "residual"):
            value -= c_in * m.h_in
        grid[m.op_a, m.op_b] = value
    return grid


def heatmap_to_csv(matrix: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in matrix:
        writer.writerow([f"{v:.6f}" for v in row])
    return buf.getvalue()
