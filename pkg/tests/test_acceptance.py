"""Exit criteria, one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines
appear in the "acceptance criteria" section of the pytest report.
"""
import functools
import itertools
import math
import random
import time


from conftest import ACCEPTANCE_LINES
from wsncodes.codebook import (
    FrequencyTable,
    build_fibonacci_codebook,
    build_tcode_codebook,
    fibonacci_codeword,
    is_prefix_free,
    read_histogram_csv,
    t_augment,
)
from wsncodes.distributed import (
    ModuloParams,
    default_discus_code,
    discus_encode,
    discus_joint_decode,
    haar_decode_pair,
    haar_encode_pair,
    modulo_encode,
    modulo_joint_decode,
)
from wsncodes.experiment import ExperimentConfig, run_experiment
from wsncodes.metrics import CostMeter, entropy_report
from wsncodes.netsim import (
    BroadcastPacket,
    PcDataPacket,
    SensorDataPacket,
    deserialize_packet,
    serialize_packet,
)
from wsncodes.scalar import CompanderCodec, DPCMCodec, FibonacciCodec, TCodeCodec, symbol_decode, symbol_encode
from wsncodes.sources import CorrelationModel, PairStream, PseudoSource

ENERGY_NJ_PER_BIT = 430


def criterion(number, title, max_seconds=None):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            status = "FAIL"
            try:
                fn(*args, **kwargs)
                elapsed = time.perf_counter() - start
                if max_seconds is not None:
                    assert elapsed < max_seconds, f"took {elapsed:.3f}s, limit {max_seconds}s"
                status = "PASS"
            finally:
                elapsed = time.perf_counter() - start
                line = f"[{status}] AC{number:>2} {title} ({elapsed:.3f}s)"
                ACCEPTANCE_LINES.append(line)
                print(line)
        return run
    return wrap


def experiment(**kw):
    return run_experiment(ExperimentConfig(**kw).validate())


@criterion(1, "Fibonacci code of 10 is 010011; n=1..10000 end in 11, prefix-free", max_seconds=1.0)
def test_ac01_fibonacci_codewords():
    assert str(fibonacci_codeword(10)) == "010011"
    codes = [fibonacci_codeword(n).bits for n in range(1, 10001)]
    assert all(c.endswith("11") and "11" not in c[:-1] for c in codes)
    assert is_prefix_free(codes)


@criterion(2, "T-code levels S(0,1) and S(0,1,00) reproduced verbatim", max_seconds=1.0)
def test_ac02_tcode_sets():
    level2 = t_augment(["1", "00", "01"], "1")
    assert {c.bits for c in level2} == {"00", "01", "11", "100", "101"}
    level3 = t_augment(level2, "00")
    assert {c.bits for c in level3} == {
        "01", "11", "100", "101", "0000", "0001", "0011", "00100", "00101"
    }
    book9 = build_tcode_codebook(FrequencyTable.uniform(range(9)))
    assert {c.bits for c in book9.entries.values()} == {c.bits for c in level3}


@criterion(3, "DISCUS exact on all 1024 pairs with d_H<=1; rate 5.0 bits/sample/node", max_seconds=1.0)
def test_ac03_discus(flat_histogram):
    code = default_discus_code()
    assert code.H1.shape[0] == code.H2.shape[0] == 5
    pairs = [(x, x ^ e) for x in range(128) for e in [0] + [1 << i for i in range(7)]]
    assert len(pairs) == 1024
    for x, y in pairs:
        s1, s2 = discus_encode(x, 1), discus_encode(y, 2)
        assert 0 <= s1 < 32 and 0 <= s2 < 32
        got = discus_joint_decode(s1, s2)
        assert (got.x, got.y) == (x, y)
    res = experiment(codec="discus", source=f"pseudo:{flat_histogram}", correlation="bitflip:1",
                     samples=100, seed=7)
    assert res.report.avg_bits == 5.0
    assert (res.report.error_mean, res.report.error_std) == (0.0, 0.0)


@criterion(4, "Modulo-8 exact iff same bin over all 65536 pairs; 40,44 -> 40,4 -> 44", max_seconds=1.0)
def test_ac04_modulo():
    p = ModuloParams(8)
    assert (modulo_encode(40, 2, p), modulo_encode(44, 1, p)) == (40, 4)
    assert modulo_joint_decode(40, 4, p) == 44
    for x, y in itertools.product(range(256), repeat=2):
        exact = modulo_joint_decode(y, x % 8, p) == x
        assert exact == (x // 8 == y // 8)


@criterion(5, "Lossless rows: Fibonacci/T-code (+pseudo) error (0,0); Haar and DPCM exact")
def test_ac05_lossless(walk_trace, skewed_histogram):
    for codec in ("fibonacci", "tcode", "fibonacci-pseudo", "tcode-pseudo", "dpcm", "haar"):
        for source in (f"trace:{walk_trace}", f"pseudo:{skewed_histogram}"):
            r = experiment(codec=codec, source=source, samples=600).report
            assert (r.error_mean, r.error_std) == (0.0, 0.0), (codec, source)
            assert r.error_count == 0 and r.sample_count == 1200
    for a, b in itertools.product(range(256), repeat=2):
        assert haar_decode_pair(*haar_encode_pair(a, b)) == (a, b)
    rng = random.Random(3)
    dpcm = DPCMCodec(frame_length=16).fit()
    for _ in range(200):
        frame = [rng.randrange(256) for _ in range(16)]
        assert dpcm.inverse_transform(dpcm.transform(frame)).tolist() == frame


@criterion(6, "Energy equals total bits x 430 nJ for three runs")
def test_ac06_energy(walk_trace):
    seen = set()
    for samples in (10, 257, 900):
        res = experiment(codec="dpcm", source=f"trace:{walk_trace}", samples=samples)
        bits = sum(p.length for p in res.log.sensor_packets)
        seen.add(bits)
        assert res.report.total_bits == bits
        assert res.report.total_energy == bits * 430e-9
        assert math.isclose(res.report.total_energy * 1e9, bits * ENERGY_NJ_PER_BIT, rel_tol=1e-12)
    assert len(seen) == 3


@criterion(7, "Sequence 255 triggers rebroadcast and restart; 125 Hz run has zero overflow")
def test_ac07_resync(walk_trace, flat_histogram):
    log = experiment(codec="fibonacci", source=f"trace:{walk_trace}", samples=300).log
    kinds = [e.kind for e in log]
    assert kinds.count("broadcast") == 2
    second = kinds.index("broadcast", 1)
    before = [e.sequence for e in log.events[:second] if e.kind == "transmit"]
    after = [e for e in log.events[second:] if e.kind == "transmit"]
    assert max(before) == 255
    assert [e.sequence for e in after[:2]] == [0, 0]
    for codec, source, corr in (("tcode-pseudo", f"trace:{walk_trace}", None),
                                ("discus", f"pseudo:{flat_histogram}", "bitflip:1")):
        fast = experiment(codec=codec, source=source, correlation=corr, rate=125, samples=1000).log
        assert fast.pc_packets and all(p.overflow == 0 for p in fast.pc_packets)
        assert not fast.of_kind("error")


@criterion(8, "Packets 9/19/5 bytes; 10^5 randomized serialize/deserialize roundtrips")
def test_ac08_packets():
    rng = random.Random(8)
    for _ in range(100_000):
        length = rng.randint(1, 16)
        s = SensorDataPacket(rng.randrange(256), rng.randrange(256), rng.randrange(1 << length),
                             rng.randrange(1 << 16), length, rng.randrange(1 << 16))
        pc = PcDataPacket(s, rng.randrange(1 << 16), rng.randrange(1 << 16), rng.randrange(1 << 32),
                          rng.randrange(1 << 16))
        raw_s, raw_pc = serialize_packet(s), serialize_packet(pc)
        assert len(raw_s) == 9 and len(raw_pc) == 19
        assert deserialize_packet(SensorDataPacket, raw_s) == s
        assert deserialize_packet(PcDataPacket, raw_pc) == pc
    assert len(serialize_packet(BroadcastPacket(1, 500, 1))) == 5


@criterion(9, "Cost orderings: LUT encode 1 probe; Fibonacci log decode; T-code linear decode")
def test_ac09_complexity():
    for codec in (CompanderCodec("A").fit(), CompanderCodec("mu").fit(),
                  FibonacciCodec().fit(), TCodeCodec().fit()):
        for v in range(0, 240, 7):
            m = CostMeter()
            codec.encode_sample(v, meter=m)
            assert m.total == 1
    worst_tcode = {}
    for n in (64, 128, 256):
        freqs = FrequencyTable.uniform(range(n))
        fib = build_fibonacci_codebook(freqs)
        bound = math.ceil(math.log2(n)) + 1
        for sym in fib.entries:
            m = CostMeter()
            symbol_decode(fib[sym], fib, m)
            assert m.counts["compare"] <= bound
        tc = build_tcode_codebook(freqs)
        for book in (fib, tc):
            for sym in book.entries:
                m = CostMeter()
                symbol_encode(sym, book, m)
                assert m.total == 1
        costs = []
        for sym in tc.entries:
            m = CostMeter()
            symbol_decode(tc[sym], tc, m)
            costs.append(m.counts["compare"])
        worst_tcode[n] = max(costs)
    assert worst_tcode == {64: 64, 128: 128, 256: 256}


@criterion(10, "Matched code on pseudo source: avg_bits = sum l_i p_i within 1/period, below identity")
def test_ac10_rate_optimality(skewed_histogram):
    counts = read_histogram_csv(skewed_histogram)
    period = PseudoSource.from_counts(counts).period
    for matched, identity in (("fibonacci-pseudo", "fibonacci"), ("tcode-pseudo", "tcode")):
        m = experiment(codec=matched, source=f"pseudo:{skewed_histogram}", samples=2 * period)
        i = experiment(codec=identity, source=f"pseudo:{skewed_histogram}", samples=2 * period)
        freqs = FrequencyTable.from_counts(counts)
        book = (build_fibonacci_codebook if matched.startswith("fib") else build_tcode_codebook)(
            FrequencyTable.from_counts(counts, alphabet=range(256))
        )
        lavg = math.fsum(book[s].length * p for s, p in freqs.as_dict().items())
        assert abs(m.report.avg_bits - lavg) <= 1 / period
        assert m.report.avg_bits < i.report.avg_bits


@criterion(11, "Slepian-Wolf chain H_XY <= DISCUS 10 bits/pair <= H_X + H_Y over 10^4 pairs")
def test_ac11_slepian_wolf(flat_histogram):
    source = PseudoSource.from_counts(read_histogram_csv(flat_histogram))
    pairs = PairStream(CorrelationModel("bitflip", t=1), source, seed=11).take(20_000)
    res = experiment(codec="discus", source=f"pseudo:{flat_histogram}", correlation="bitflip:1",
                     samples=200, seed=11)
    achieved = 2 * res.report.avg_bits
    rep = entropy_report(pairs, achieved)
    assert achieved == 10.0
    assert rep.H_XY <= achieved <= rep.H_X + rep.H_Y
    assert rep.H_X + rep.H_Y > achieved
