"""Command-line experiment runner: ``wsncodes run`` and ``wsncodes compare``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .exceptions import CodecError
from .experiment import (
    CODECS, FORMATS, ExperimentConfig, artifacts, render_rows, run_experiment, write_artifacts,
)
from .netsim import ConfigError

log = logging.getLogger("wsncodes")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_flags(p):
    p.add_argument("--config", action="append", default=[], help="key = value experiment file")
    p.add_argument("--codec", help=f"one of: {', '.join(CODECS)}")
    p.add_argument("--source", help="trace:PATH (one sample per line) or pseudo:PATH (symbol,count CSV)")
    p.add_argument("--correlation", help="bitflip:T, same-bin:N or additive:D (pair codecs)")
    p.add_argument("--rate", type=float, help="sampling rate in Hz (2..125)")
    p.add_argument("--samples", type=int, help="samples per node")
    p.add_argument("--frame", type=int, help="DPCM frame length")
    p.add_argument("--modulo-n", type=int, dest="modulo_n", help="modulus for the modulo codec")
    p.add_argument("--seed", type=int)
    p.add_argument("--cost-per-op", type=float, dest="cost_per_op", help="simulated us per unit operation")
    p.add_argument("--out", help="directory for artifacts")
    p.add_argument("--format", choices=FORMATS)


def build_parser():
    parser = _Parser(prog="wsncodes", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_flags(sub.add_parser("run", help="simulate one codec and write its log, report and series"))
    _add_flags(sub.add_parser("compare", help="run several codecs and print one row per codec"))
    return parser


_FLAG_KEYS = ("codec", "source", "correlation", "rate", "samples", "frame", "modulo_n",
              "seed", "cost_per_op", "out", "format")


def _configs(args) -> list:
    flags = {k: getattr(args, k) for k in _FLAG_KEYS}
    bases = [ExperimentConfig.parse(Path(p).read_text()) for p in args.config] or [ExperimentConfig()]
    if args.command == "run":
        if len(bases) > 1:
            raise ConfigError("run takes at most one --config")
        return [bases[0].override(**flags)]
    codecs = flags.pop("codec")
    if not codecs and not args.config:
        raise ConfigError("compare needs --codec NAME[,NAME...] or one or more --config files")
    if codecs:
        names = [c.strip() for c in codecs.split(",") if c.strip()]
        bases = [b.override(codec=name) for b in bases for name in names]
    return [b.override(**flags) for b in bases]


def _run(cfg) -> int:
    cfg.validate()
    result = run_experiment(cfg)
    files = artifacts(result)
    if cfg.out:
        write_artifacts(cfg.out, files)
    sys.stdout.write(render_rows([result.report], cfg.format))
    return EXIT_OK


def _compare(configs) -> int:
    if not configs:
        raise ConfigError("compare needs at least one config")
    rows, failed = [], False
    for cfg in configs:
        try:
            rows.append(run_experiment(cfg.validate()).report)
        except (ConfigError, CodecError, ValueError) as exc:
            failed = True
            log.warning("%s failed: %s", cfg.codec, exc)
            rows.append((cfg.codec, str(exc)))
    fmt = configs[0].format
    text = render_rows(rows, fmt)
    if configs[0].out:
        name = {"csv": "compare.csv", "json": "compare.json", "table": "compare.txt"}[fmt]
        write_artifacts(configs[0].out, {name: text})
    sys.stdout.write(text)
    return EXIT_RUNTIME if failed else EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        configs = _configs(args)
        if args.command == "run":
            return _run(configs[0])
        return _compare(configs)
    except ConfigError as exc:
        sys.stderr.write(f"wsncodes: config error: {exc}\n")
        return EXIT_CONFIG
    except (CodecError, ValueError, OSError) as exc:
        sys.stderr.write(f"wsncodes: runtime error: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
