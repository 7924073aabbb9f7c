"""Deterministic TDMA simulation of two sensor nodes and one base station.

Time is integer microseconds. Each sampling period is split into one slot
per node; a resync epoch opens with a broadcast slot, after which the nodes
alternate until both have sent sequence number 255. The channel is lossless
and instantaneous unless a ``channel`` drop hook is given.
"""
from __future__ import annotations

import csv
import io
import json
import struct
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, ClassVar, Optional

from .distributed import PairCodec
from .exceptions import CodecError
from .metrics import CostMeter
from .scalar import DPCMCodec, ScalarCodec

N_NODES = 2
MAX_CODE_BITS = 16
CMD_RESET = 1
SENSOR_PHOTO = 1
SEQ_MOD = 256
MIN_RATE_HZ, MAX_RATE_HZ = 2, 125


class PacketError(ValueError):
    pass


class ConfigError(ValueError):
    pass


def _check_width(name, value, nbytes):
    if not 0 <= value < 1 << (8 * nbytes):
        raise PacketError(f"{name}={value} does not fit in {nbytes} byte(s)")


@dataclass(frozen=True)
class SensorDataPacket:
    node_id: int
    sequence: int
    code_data: int
    original_data: int
    length: int
    latency: int

    FORMAT: ClassVar[struct.Struct] = struct.Struct("<BBHHBH")
    WIDTHS: ClassVar[tuple] = (1, 1, 2, 2, 1, 2)

    def validate(self):
        for f, w in zip(fields(self), self.WIDTHS):
            _check_width(f.name, getattr(self, f.name), w)
        if self.length > MAX_CODE_BITS:
            raise PacketError(f"length {self.length} exceeds the {MAX_CODE_BITS}-bit code field")
        if self.code_data >> self.length:
            raise PacketError(f"code_data {self.code_data} wider than length {self.length}")


@dataclass(frozen=True)
class BroadcastPacket:
    command: int = CMD_RESET
    timer: int = 0
    sensor: int = SENSOR_PHOTO

    FORMAT: ClassVar[struct.Struct] = struct.Struct("<HHB")
    WIDTHS: ClassVar[tuple] = (2, 2, 1)

    def validate(self):
        for f, w in zip(fields(self), self.WIDTHS):
            _check_width(f.name, getattr(self, f.name), w)


@dataclass(frozen=True)
class PcDataPacket:
    sensor_packet: SensorDataPacket
    decode_data: int
    decode_latency: int
    receive_time: int
    overflow: int

    TAIL: ClassVar[struct.Struct] = struct.Struct("<HHIH")
    WIDTHS: ClassVar[tuple] = (2, 2, 4, 2)

    def validate(self):
        self.sensor_packet.validate()
        for name, w in zip(("decode_data", "decode_latency", "receive_time", "overflow"), self.WIDTHS):
            _check_width(name, getattr(self, name), w)


PACKET_SIZES = {
    SensorDataPacket: SensorDataPacket.FORMAT.size,
    BroadcastPacket: BroadcastPacket.FORMAT.size,
    PcDataPacket: SensorDataPacket.FORMAT.size + PcDataPacket.TAIL.size,
}


def serialize_packet(pkt) -> bytes:
    pkt.validate()
    if isinstance(pkt, PcDataPacket):
        return serialize_packet(pkt.sensor_packet) + pkt.TAIL.pack(
            pkt.decode_data, pkt.decode_latency, pkt.receive_time, pkt.overflow
        )
    return pkt.FORMAT.pack(*(getattr(pkt, f.name) for f in fields(pkt)))


def deserialize_packet(kind, data: bytes):
    if len(data) != PACKET_SIZES[kind]:
        raise PacketError(f"{kind.__name__} needs {PACKET_SIZES[kind]} bytes, got {len(data)}")
    if kind is PcDataPacket:
        head = deserialize_packet(SensorDataPacket, data[:9])
        return PcDataPacket(head, *PcDataPacket.TAIL.unpack(data[9:]))
    return kind(*kind.FORMAT.unpack(data))


# -- event log ---------------------------------------------------------------

@dataclass
class Event:
    time: int
    kind: str  # broadcast | transmit | decode | error
    end: Optional[int] = None
    packet: Optional[int] = None  # index into EventLog.sensor_packets
    node_id: Optional[int] = None
    sequence: Optional[int] = None
    code_data: Optional[int] = None
    original_data: Optional[int] = None
    length: Optional[int] = None
    latency: Optional[int] = None
    decode_data: Optional[int] = None
    decode_latency: Optional[int] = None
    receive_time: Optional[int] = None
    overflow: Optional[int] = None
    detail: str = ""

    @classmethod
    def from_sensor(cls, time, kind, pkt: SensorDataPacket, **kw):
        return cls(time, kind, node_id=pkt.node_id, sequence=pkt.sequence, code_data=pkt.code_data,
                   original_data=pkt.original_data, length=pkt.length, latency=pkt.latency, **kw)


EVENT_FIELDS = [f.name for f in fields(Event)]


@dataclass
class EventLog:
    events: list = field(default_factory=list)
    sensor_packets: list = field(default_factory=list)
    pc_packets: list = field(default_factory=list)
    broadcasts: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)

    def of_kind(self, kind):
        return [e for e in self.events if e.kind == kind]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=EVENT_FIELDS, lineterminator="\n")
        w.writeheader()
        for e in self.events:
            w.writerow({k: ("" if v is None else v) for k, v in asdict(e).items()})
        return buf.getvalue()

    def hexdump(self) -> str:
        """Serialized packets, one ``kind hexbytes`` line each, for golden files."""
        lines = [f"broadcast {serialize_packet(p).hex()}" for p in self.broadcasts]
        lines += [f"sensor {serialize_packet(p).hex()}" for p in self.sensor_packets]
        lines += [f"pc {serialize_packet(p).hex()}" for p in self.pc_packets]
        return "\n".join(lines) + "\n"

    def to_jsonl(self) -> str:
        return "".join(json.dumps(asdict(e), sort_keys=True) + "\n" for e in self.events)


# -- nodes -------------------------------------------------------------------

@dataclass(frozen=True)
class SlotTick:
    time: int
    owner: int  # node id allowed to transmit, 0 for the base station
    period: int  # sampling period index within the run


class PairFeed:
    """Hands both nodes the same correlated pair for a sampling period."""

    def __init__(self, stream):
        self.stream = stream
        self._cache = {}

    def pair(self, period: int):
        if period not in self._cache:
            self._cache.clear()
            self._cache[period] = self.stream.next_pair()
        return self._cache[period]


class SensorNode:
    def __init__(self, node_id, codec, sampler, cost_per_op_us=1.0):
        self.node_id = node_id
        self.codec = codec
        self.sampler = sampler
        self.cost_per_op_us = cost_per_op_us
        self.reset()

    def reset(self):
        self.sequence = 0
        self.previous = None

    def _sample(self, tick):
        if isinstance(self.codec, PairCodec):
            x, y = self.sampler.pair(tick.period)
            return (x if self.node_id % 2 == 1 else y), (x, y)
        return self.sampler.next_sample(), None

    def step(self, tick: SlotTick):
        """Sample, encode and packetize if ``tick`` is this node's slot.

        Returns ``(packet, error)``; both are None outside the node's slot.
        """
        if tick.owner != self.node_id:
            return None, None
        value, pair = self._sample(tick)
        meter = CostMeter(self.cost_per_op_us)
        try:
            if pair is not None:
                code, nbits = self.codec.encode_node(self.node_id, *pair, meter=meter)
            else:
                prev = self.previous if self._in_frame() else None
                code, nbits = self.codec.encode_sample(value, prev, meter=meter)
            pkt = SensorDataPacket(self.node_id, self.sequence, code, value, nbits, meter.simulated_us)
            pkt.validate()
        except (CodecError, PacketError, ValueError) as exc:
            return None, (value, f"encode failed: {exc}")
        self.previous = value
        self.sequence += 1
        return pkt, None

    def _in_frame(self):
        if isinstance(self.codec, DPCMCodec):
            return self.sequence % self.codec.frame_length_ != 0
        return self.previous is not None


class BaseStation:
    def __init__(self, codec, cost_per_op_us=1.0):
        self.codec = codec
        self.cost_per_op_us = cost_per_op_us
        self.overflow = 0
        self.reset()

    def reset(self):
        self.previous = {}
        self.pending = {}

    def _pc(self, pkt, decoded, latency, now):
        return PcDataPacket(pkt, decoded, latency, now % (1 << 32), self.overflow)

    def receive(self, pkt: SensorDataPacket, now: int):
        """Decode a packet; returns lists of PcDataPackets and (packet, reason) errors."""
        if isinstance(self.codec, PairCodec):
            return self._receive_pair(pkt, now)
        meter = CostMeter(self.cost_per_op_us)
        in_frame = not (isinstance(self.codec, DPCMCodec) and pkt.sequence % self.codec.frame_length_ == 0)
        prev = self.previous.get(pkt.node_id) if in_frame else None
        try:
            decoded = self.codec.decode_sample(pkt.code_data, pkt.length, prev, meter=meter)
        except CodecError as exc:
            self.previous.pop(pkt.node_id, None)
            return [], [(pkt, f"decode failed: {exc}")]
        self.previous[pkt.node_id] = decoded
        return [self._pc(pkt, decoded, meter.simulated_us, now)], []

    def _receive_pair(self, pkt, now):
        errors = []
        stale = self.pending.get(pkt.node_id)
        if stale is not None:
            self.overflow += 1
            errors.append((stale, "buffer overrun: partner packet never arrived"))
        self.pending[pkt.node_id] = pkt
        if len(self.pending) < N_NODES:
            return [], errors
        p1, p2 = self.pending[1], self.pending[2]
        self.pending.clear()
        if p1.sequence != p2.sequence:
            return [], errors + [(p1, "sequence mismatch"), (p2, "sequence mismatch")]
        meter = CostMeter(self.cost_per_op_us)
        try:
            x, y = self.codec.decode_pair(p1.code_data, p1.length, p2.code_data, p2.length, meter=meter)
        except CodecError as exc:
            return [], errors + [(p1, f"decode failed: {exc}"), (p2, f"decode failed: {exc}")]
        lat = meter.simulated_us
        return [self._pc(p1, x, lat, now), self._pc(p2, y, lat, now)], errors

    def flush(self):
        left = [(p, "unpaired at end of run") for _, p in sorted(self.pending.items())]
        self.pending.clear()
        return left


# -- simulation --------------------------------------------------------------

@dataclass
class NetworkConfig:
    """One simulated experiment.

    ``samplers`` holds one source per node for scalar codecs, or a single
    :class:`~wsncodes.sources.PairStream` for pair codecs.
    """

    codec: object
    samplers: tuple
    rate_hz: float = 2.0
    samples: int = 100
    cost_per_op_us: float = 1.0
    channel: Optional[Callable[[SensorDataPacket], bool]] = None

    def validate(self):
        if not MIN_RATE_HZ <= self.rate_hz <= MAX_RATE_HZ:
            raise ConfigError(f"sampling rate {self.rate_hz} Hz outside {MIN_RATE_HZ}..{MAX_RATE_HZ}")
        if self.samples < 0:
            raise ConfigError("samples must be non-negative")
        if not isinstance(self.codec, (ScalarCodec, PairCodec)):
            raise ConfigError(f"unsupported codec {type(self.codec).__name__}")
        if not hasattr(self.codec, "n_features_in_"):
            raise ConfigError("codec must be fitted before simulation")
        want = 1 if isinstance(self.codec, PairCodec) else N_NODES
        if len(self.samplers) != want:
            raise ConfigError(f"{type(self.codec).__name__} needs {want} sampler(s), got {len(self.samplers)}")
        if self.cost_per_op_us <= 0:
            raise ConfigError("cost_per_op_us must be positive")

    @property
    def period_us(self) -> int:
        return int(round(1_000_000 / self.rate_hz))

    @property
    def slot_us(self) -> int:
        return self.period_us // N_NODES


def node_step(node: SensorNode, tick: SlotTick):
    return node.step(tick)


def base_station_step(station: BaseStation, pkt: SensorDataPacket, now: int = 0):
    return station.receive(pkt, now)


def run_simulation(config: NetworkConfig) -> EventLog:
    config.validate()
    slot, period = config.slot_us, config.period_us
    if isinstance(config.codec, PairCodec):
        feed = PairFeed(config.samplers[0])
        samplers = (feed, feed)
    else:
        samplers = config.samplers
    nodes = [SensorNode(i + 1, config.codec, samplers[i], config.cost_per_op_us) for i in range(N_NODES)]
    station = BaseStation(config.codec, config.cost_per_op_us)
    log = EventLog()
    timer_ms = max(period // 1000, 1)

    def broadcast(now):
        pkt = BroadcastPacket(CMD_RESET, timer_ms, SENSOR_PHOTO)
        pkt.validate()
        log.broadcasts.append(pkt)
        log.events.append(Event(now, "broadcast", end=now + slot, detail=serialize_packet(pkt).hex()))
        for n in nodes:
            n.reset()
        station.reset()

    index_of = {}

    def error(now, pkt, reason):
        log.events.append(Event.from_sensor(now, "error", pkt, packet=index_of.get(id(pkt)),
                                            overflow=station.overflow, detail=reason))

    broadcast(0)
    epoch_start = slot
    k_epoch = 0
    for k in range(config.samples):
        if k_epoch == SEQ_MOD:
            now = epoch_start + k_epoch * period
            for p, reason in station.flush():
                error(now, p, reason)
            broadcast(now)
            epoch_start = now + slot
            k_epoch = 0
        for idx, node in enumerate(nodes):
            now = epoch_start + k_epoch * period + idx * slot
            pkt, failure = node.step(SlotTick(now, node.node_id, k))
            if failure is not None:
                value, reason = failure
                log.events.append(Event(now, "error", node_id=node.node_id, original_data=value,
                                        overflow=station.overflow, detail=reason))
                continue
            if pkt.latency > slot:
                station.overflow += 1
                error(now, pkt, "missed slot: encode latency exceeds slot")
                continue
            index_of[id(pkt)] = len(log.sensor_packets)
            log.sensor_packets.append(pkt)
            log.events.append(Event.from_sensor(now, "transmit", pkt, end=now + slot,
                                                packet=index_of[id(pkt)]))
            if config.channel is not None and config.channel(pkt):
                station.overflow += 1
                error(now, pkt, "dropped by channel")
                continue
            decoded, errors = station.receive(pkt, now)
            for p, reason in errors:
                error(now, p, reason)
            for pc in decoded:
                pc.validate()
                log.pc_packets.append(pc)
                log.events.append(Event.from_sensor(
                    now, "decode", pc.sensor_packet, packet=index_of[id(pc.sensor_packet)],
                    decode_data=pc.decode_data,
                    decode_latency=pc.decode_latency, receive_time=now, overflow=pc.overflow,
                ))
        k_epoch += 1
    end = epoch_start + k_epoch * period
    for p, reason in station.flush():
        error(end, p, reason)
    return log
