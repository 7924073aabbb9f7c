"""Rate, distortion, cost and energy accounting for simulated runs."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from collections import Counter
from contextlib import contextmanager
from dataclasses import asdict, dataclass

import numpy as np

ENERGY_PER_BIT = 430e-9  # joules


class CostMeter:
    """Counts abstract unit operations of one codec invocation.

    Kinds used by the codecs: ``probe`` (table lookup), ``compare`` (search
    comparison), ``compute`` (arithmetic step) and ``row`` (GF(2) row
    product). Simulated time is ``total * cost_per_op_us``.
    """

    def __init__(self, cost_per_op_us: float = 1.0):
        self.cost_per_op_us = cost_per_op_us
        self.counts = Counter()
        self.wall_ns = 0

    def tick(self, kind: str, n: int = 1) -> None:
        self.counts[kind] += n

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def simulated_us(self) -> int:
        return int(round(self.total * self.cost_per_op_us))

    @contextmanager
    def timing(self):
        start = time.perf_counter_ns()
        try:
            yield self
        finally:
            self.wall_ns += time.perf_counter_ns() - start

    def __repr__(self):
        return f"CostMeter({dict(self.counts)})"


class _NullMeter:
    def tick(self, kind, n=1):
        pass


NULL_METER = _NullMeter()


def meter_or_null(meter):
    return NULL_METER if meter is None else meter


@dataclass
class RunningStats:
    """Count, sum and sum of squares; merging is associative and commutative."""

    n: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    def add(self, value: float) -> None:
        self.n += 1
        self.total += value
        self.total_sq += value * value

    def extend(self, values) -> "RunningStats":
        for v in values:
            self.add(float(v))
        return self

    def merge(self, other: "RunningStats") -> "RunningStats":
        return RunningStats(self.n + other.n, self.total + other.total, self.total_sq + other.total_sq)

    @property
    def mean(self) -> float:
        return self.total / self.n if self.n else 0.0

    @property
    def std(self) -> float:
        """Population standard deviation."""
        if not self.n:
            return 0.0
        var = self.total_sq / self.n - self.mean**2
        return math.sqrt(max(var, 0.0))


@dataclass(frozen=True)
class EnergyModel:
    energy_per_bit: float = ENERGY_PER_BIT

    def __post_init__(self):
        if not self.energy_per_bit > 0:
            raise ValueError("energy_per_bit must be positive")


def transmission_energy(total_bits: int, model: EnergyModel = EnergyModel()) -> float:
    if total_bits < 0:
        raise ValueError("total_bits must be non-negative")
    return total_bits * model.energy_per_bit


def error_stats(pairs) -> tuple[float, float]:
    """Mean and population std of ``decoded - original``."""
    arr = np.asarray(list(pairs), dtype=float)
    if arr.size == 0:
        raise ValueError("error_stats needs at least one (original, decoded) pair")
    err = arr[:, 1] - arr[:, 0]
    return float(err.mean()), float(err.std())


def _transmissions(log):
    return [e for e in log if e.kind == "transmit"]


def avg_bits(log) -> float:
    """Mean length field over all sensor packets in an event log."""
    tx = _transmissions(log)
    if not tx:
        raise ValueError("event log contains no transmissions")
    return math.fsum(e.length for e in tx) / len(tx)


def total_bits(log) -> int:
    return sum(e.length for e in _transmissions(log))


@dataclass
class MetricsReport:
    codec: str
    avg_bits: float
    error_mean: float
    error_std: float
    encode_mean: float
    encode_std: float
    decode_mean: float
    decode_std: float
    total_bits: int
    total_energy: float
    sample_count: int
    error_count: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def report_from_log(log, codec: str, model: EnergyModel = EnergyModel()) -> MetricsReport:
    tx = _transmissions(log)
    decoded = [e for e in log if e.kind == "decode"]
    errors = [e for e in log if e.kind == "error"]
    enc = RunningStats().extend(e.latency for e in tx)
    dec = RunningStats().extend(e.decode_latency for e in decoded)
    err = RunningStats().extend(e.decode_data - e.original_data for e in decoded)
    bits = total_bits(log)
    return MetricsReport(
        codec=codec,
        avg_bits=avg_bits(log),
        error_mean=err.mean,
        error_std=err.std,
        encode_mean=enc.mean,
        encode_std=enc.std,
        decode_mean=dec.mean,
        decode_std=dec.std,
        total_bits=bits,
        total_energy=transmission_energy(bits, model),
        sample_count=len(tx),
        error_count=len(errors),
    )


# -- entropy -----------------------------------------------------------------

@dataclass(frozen=True)
class EntropyReport:
    H_X: float
    H_Y: float
    H_XY: float
    H_Y_given_X: float
    rate: float

    @property
    def joint_upper(self) -> float:
        return self.H_X + self.H_Y


def _plugin_entropy(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    counts = counts[counts > 0]
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def entropy_report(pairs, achieved_bits: float) -> EntropyReport:
    """Plug-in entropies of a paired stream next to an achieved pair rate."""
    arr = np.asarray(list(pairs), dtype=np.int64)
    if arr.size == 0:
        raise ValueError("entropy_report needs at least one pair")
    arr = arr.reshape(-1, 2)
    _, cx = np.unique(arr[:, 0], return_counts=True)
    _, cy = np.unique(arr[:, 1], return_counts=True)
    _, cxy = np.unique(arr, axis=0, return_counts=True)
    hx, hy, hxy = _plugin_entropy(cx), _plugin_entropy(cy), _plugin_entropy(cxy)
    return EntropyReport(hx, hy, hxy, max(hxy - hx, 0.0), achieved_bits)


# -- rendering ---------------------------------------------------------------

TABLE_COLUMNS = [
    ("Code", "codec", "{}"),
    ("Avg Bits", "avg_bits", "{:.4f}"),
    ("Err mu", "error_mean", "{:.4f}"),
    ("Err sigma", "error_std", "{:.4f}"),
    ("Enc mu", "encode_mean", "{:.4f}"),
    ("Enc sigma", "encode_std", "{:.4f}"),
    ("Dec mu", "decode_mean", "{:.4f}"),
    ("Dec sigma", "decode_std", "{:.4f}"),
    ("Energy (J)", "total_energy", "{:.6e}"),
]


def render_table(rows) -> str:
    """Aligned text table; ``rows`` holds MetricsReports or (codec, message) failures."""
    body = []
    for r in rows:
        if isinstance(r, MetricsReport):
            body.append([fmt.format(getattr(r, key)) for _, key, fmt in TABLE_COLUMNS])
        else:
            codec, msg = r
            body.append([codec, f"FAILED: {msg}"] + [""] * (len(TABLE_COLUMNS) - 2))
    header = [h for h, _, _ in TABLE_COLUMNS]
    widths = [max(len(header[i]), *(len(b[i]) for b in body)) if body else len(header[i])
              for i in range(len(header))]
    lines = [" | ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("-+-".join("-" * w for w in widths))
    for b in body:
        lines.append(" | ".join(c.ljust(w) for c, w in zip(b, widths)).rstrip())
    return "\n".join(lines) + "\n"


def render_csv(rows) -> str:
    buf = io.StringIO()
    fields = list(MetricsReport.__dataclass_fields__) + ["status"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        if isinstance(r, MetricsReport):
            w.writerow({**r.as_dict(), "status": "ok"})
        else:
            w.writerow({"codec": r[0], "status": f"failed: {r[1]}"})
    return buf.getvalue()


def render_json(rows) -> str:
    out = []
    for r in rows:
        out.append({**r.as_dict(), "status": "ok"} if isinstance(r, MetricsReport)
                   else {"codec": r[0], "status": f"failed: {r[1]}"})
    return json.dumps(out, indent=2, sort_keys=True) + "\n"
