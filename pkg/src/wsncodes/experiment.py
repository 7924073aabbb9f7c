"""Experiment configuration, assembly and artifact writing."""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .codebook import read_histogram_csv
from .distributed import DiscusCodec, HaarCodec, ModuloCodec, PairCodec
from .metrics import MetricsReport, render_csv, render_json, render_table, report_from_log
from .netsim import ConfigError, MAX_RATE_HZ, MIN_RATE_HZ, NetworkConfig, run_simulation
from .scalar import CompanderCodec, DPCMCodec, FibonacciCodec, TCodeCodec
from .sources import CorrelationModel, PairStream, PseudoSource, TraceError, load_trace

CODECS = (
    "alaw", "mulaw", "dpcm", "fibonacci", "fibonacci-pseudo",
    "tcode", "tcode-pseudo", "modulo", "haar", "discus",
)
PAIR_CODECS = ("modulo", "haar", "discus")
FORMATS = ("csv", "json", "table")


@dataclass
class ExperimentConfig:
    codec: str = ""
    source: str = ""
    correlation: Optional[str] = None
    rate: float = 2.0
    samples: int = 100
    frame: int = 16
    modulo_n: int = 8
    seed: int = 0
    cost_per_op: float = 1.0
    out: Optional[str] = None
    format: str = "table"

    def validate(self) -> "ExperimentConfig":
        if self.codec not in CODECS:
            raise ConfigError(f"unknown codec {self.codec!r}; choose from {', '.join(CODECS)}")
        kind, _, path = self.source.partition(":")
        if kind not in ("trace", "pseudo") or not path:
            raise ConfigError(f"source must be 'trace:PATH' or 'pseudo:PATH', got {self.source!r}")
        if not os.path.isfile(path):
            raise ConfigError(f"source file not found: {path}")
        if not MIN_RATE_HZ <= self.rate <= MAX_RATE_HZ:
            raise ConfigError(f"rate must lie in {MIN_RATE_HZ}..{MAX_RATE_HZ} Hz, got {self.rate}")
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        if self.frame < 1:
            raise ConfigError("frame must be at least 1")
        if self.modulo_n < 2:
            raise ConfigError("modulo-n must be at least 2")
        if self.cost_per_op <= 0:
            raise ConfigError("cost-per-op must be positive")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.correlation is not None:
            try:
                model = CorrelationModel.parse(self.correlation)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            if self.codec == "discus" and model.kind != "bitflip":
                raise ConfigError("discus codes 7-bit words and needs a bitflip correlation model")
        return self

    @property
    def correlation_model(self) -> CorrelationModel:
        if self.correlation is not None:
            return CorrelationModel.parse(self.correlation)
        return CorrelationModel("bitflip", t=1) if self.codec == "discus" else CorrelationModel("additive")

    def render(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                lines.append(f"{f.name.replace('_', '-')} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "ExperimentConfig":
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in types:
                raise ConfigError(f"config line {lineno}: expected 'key = value' with a known key, got {raw!r}")
            values[key] = _coerce(key, value.strip(), types[key])
        return cls(**values)

    def override(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _coerce(key, value, annotation):
    try:
        if "int" in str(annotation):
            return int(value)
        if "float" in str(annotation):
            return float(value)
    except ValueError:
        raise ConfigError(f"config key {key!r}: cannot parse {value!r}") from None
    return value


def make_codec(cfg: ExperimentConfig):
    return {
        "alaw": lambda: CompanderCodec(law="A"),
        "mulaw": lambda: CompanderCodec(law="mu"),
        "dpcm": lambda: DPCMCodec(frame_length=cfg.frame),
        "fibonacci": lambda: FibonacciCodec(ranking="identity"),
        "fibonacci-pseudo": lambda: FibonacciCodec(ranking="frequency"),
        "tcode": lambda: TCodeCodec(ranking="identity"),
        "tcode-pseudo": lambda: TCodeCodec(ranking="frequency"),
        "modulo": lambda: ModuloCodec(n=cfg.modulo_n),
        "haar": lambda: HaarCodec(),
        "discus": lambda: DiscusCodec(),
    }[cfg.codec]()


def make_source(cfg: ExperimentConfig):
    kind, _, path = cfg.source.partition(":")
    try:
        if kind == "trace":
            return load_trace(path)
        return PseudoSource.from_counts(read_histogram_csv(path))
    except (TraceError, ValueError) as exc:
        raise ConfigError(f"cannot load source: {exc}") from None


def build_network(cfg: ExperimentConfig) -> NetworkConfig:
    cfg.validate()
    codec = make_codec(cfg)
    probe = make_source(cfg)
    if not isinstance(probe, PseudoSource) and len(probe) < cfg.samples:
        raise ConfigError(f"trace has {len(probe)} samples, fewer than the {cfg.samples} requested")
    if codec.__class__ in (FibonacciCodec, TCodeCodec) and codec.ranking == "frequency":
        if isinstance(probe, PseudoSource):
            syms = list(probe.counts)
            codec.fit(syms, sample_weight=[probe.counts[s] for s in syms])
        else:
            codec.fit(list(probe.samples))
    else:
        codec.fit()
    if isinstance(codec, PairCodec):
        samplers = (PairStream(cfg.correlation_model, make_source(cfg), cfg.seed),)
    else:
        samplers = tuple(make_source(cfg) for _ in range(2))
    return NetworkConfig(codec, samplers, cfg.rate, cfg.samples, cfg.cost_per_op)


@dataclass
class RunResult:
    config: ExperimentConfig
    log: object
    report: MetricsReport


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    log = run_simulation(build_network(cfg))
    return RunResult(cfg, log, report_from_log(log, cfg.codec))


def series_csv(log) -> str:
    """Per-packet raw/coded/decoded values, bits and error (plot data)."""
    decoded = {e.packet: e.decode_data for e in log if e.kind == "decode"}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["packet", "node_id", "sequence", "time_us", "raw", "coded", "bits", "decoded", "error"])
    for e in log:
        if e.kind != "transmit":
            continue
        d = decoded.get(e.packet)
        w.writerow([e.packet, e.node_id, e.sequence, e.time, e.original_data, e.code_data, e.length,
                    "" if d is None else d, "" if d is None else d - e.original_data])
    return buf.getvalue()


def render_rows(rows, fmt: str) -> str:
    return {"csv": render_csv, "json": render_json, "table": render_table}[fmt](rows)


def artifacts(result: RunResult) -> dict:
    fmt = result.config.format
    log_name, log_text = ("events.jsonl", result.log.to_jsonl()) if fmt == "json" else ("events.csv", result.log.to_csv())
    report_name = {"csv": "report.csv", "json": "report.json", "table": "report.txt"}[fmt]
    return {
        log_name: log_text,
        report_name: render_rows([result.report], fmt),
        "series.csv": series_csv(result.log),
        "packets.hex": result.log.hexdump(),
        "config.txt": replace(result.config, out=None).render(),
    }


def write_artifacts(out_dir, files: dict) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)
