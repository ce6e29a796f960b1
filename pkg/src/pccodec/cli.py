"""Command-line front end: compression, simulation, and theory reports.

Exit codes: 0 success, 2 usage errors, 3 data or corruption errors. CSV goes
to stdout, diagnostics to stderr; all runs are deterministic under --seed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import codec, occupancy, redundancy
from .envelopes import envelope_distribution, parse_envelope
from .errors import PccodecError

DEFAULT_SEED = 1789  # fixed for reproducibility of all reports

_BOUNDS_HEADER = "env,n,r_f,upper_integral,upper_count,upper_mass,head_term,lower_integral,lower_EfKn"
_EMPIRICAL_HEADER = "env,source,n,trial,code_bits,ideal_bits,neg_log_p,redundancy_bits"
_LEMMAS_HEADER = "lemma,n,param,lhs,rhs,slack,status"


def _fmt(x: float) -> str:
    return format(x, ".12g")


def _read_symbols(path: str, mode: str) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    if mode == "bytes":
        # each byte b maps to symbol b+1 so arbitrary binary files compress
        return np.frombuffer(raw, dtype=np.uint8).astype(np.int64) + 1
    tokens = raw.decode("ascii").split()
    syms = np.empty(len(tokens), dtype=np.int64)
    for i, tok in enumerate(tokens):
        try:
            v = int(tok)
        except ValueError as exc:
            raise PccodecError(f"token {tok!r} is not an integer") from exc
        if not 1 <= v <= codec.MAX_SYMBOL:
            raise PccodecError(f"symbol {v} outside [1, 2**62]")
        syms[i] = v
    return syms


def _write_symbols(path: str, symbols: np.ndarray, mode: str) -> None:
    if mode == "bytes":
        if symbols.size and (symbols.min() < 1 or symbols.max() > 256):
            raise PccodecError("decoded symbols outside byte range; not a bytes-mode stream")
        data = (symbols - 1).astype(np.uint8).tobytes()
    else:
        data = (" ".join(str(int(s)) for s in symbols) + "\n").encode("ascii") if symbols.size else b""
    with open(path, "wb") as fh:
        fh.write(data)


def _cmd_encode(args) -> int:
    syms = _read_symbols(args.input, args.mode)
    container = codec.encode(syms)
    container.write(args.output)
    ideal = codec.ideal_codelength(syms)
    print(f"symbols={syms.size} payload_bits={container.bit_length} "
          f"ideal_mixture_bits={ideal.mixture_bits:.3f} ideal_elias_bits={ideal.elias_bits:.0f} "
          f"distinct={ideal.distinct}", file=sys.stderr)
    return 0


def _cmd_decode(args) -> int:
    container = codec.PcContainer.read(args.input)
    syms = codec.decode(container)
    _write_symbols(args.output, syms, args.mode)
    print(f"symbols={syms.size}", file=sys.stderr)
    return 0


def _cmd_bounds(args) -> int:
    ed = envelope_distribution(parse_envelope(args.env))
    print(_BOUNDS_HEADER)
    for n in args.n:
        rep = redundancy.redundancy_report(ed, n)
        print(",".join([ed.envelope.spec_string(), str(n), _fmt(rep.r_f),
                        _fmt(rep.upper_integral), _fmt(rep.upper_count), _fmt(rep.upper_mass),
                        _fmt(rep.head_term), _fmt(rep.lower_integral), _fmt(rep.lower_occupancy)]))
    return 0


def _cmd_simulate(args) -> int:
    ed = envelope_distribution(parse_envelope(args.env))
    env_name = ed.envelope.spec_string()
    print(_EMPIRICAL_HEADER)
    for n in args.n:
        rows = redundancy.redundancy_trials(ed, n, args.trials, args.seed,
                                            idealized_elias=args.ideal_elias)
        for t, code_bits, ideal_bits, neg_log_p in rows:
            print(",".join([env_name, "envelope", str(n), str(t), _fmt(code_bits),
                            _fmt(ideal_bits), _fmt(neg_log_p), _fmt(ideal_bits - neg_log_p)]))
    return 0


def _cmd_lemmas(args) -> int:
    ed = envelope_distribution(parse_envelope(args.env))
    env_name = ed.envelope.spec_string()
    print(_LEMMAS_HEADER)

    def emit(lemma, n, param, row):
        status = "OK" if row.ok else "FAIL"
        print(",".join([lemma, str(n), param, _fmt(row.lhs), _fmt(row.rhs),
                        _fmt(row.slack), status]))

    for n in args.n:
        report = occupancy.check_occupancy_lemma(ed, n, trials=args.trials, seed=args.seed)
        for row in report.rows:
            emit(row.name, n, env_name, row)
    for bn in (1, 10, 100):
        for p in (0.1, 0.5, 0.9):
            emit("binomial_inverse", bn, f"p={p:g}", occupancy.check_binomial_inverse_lemma(bn, p))
    for lam in (1.0, 10.0, 100.0):
        for t in (1.0, 5.0, 25.0):
            emit("poisson_tail", int(lam), f"t={t:g}", occupancy.poisson_tail_slack(lam, t))
    return 0


def _int_list(text: str):
    return [int(tok) for tok in text.split(",") if tok]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pccodec",
        description="Pattern-censoring compression and envelope-class redundancy reports.")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="compress a file of symbols")
    enc.add_argument("input")
    enc.add_argument("output")
    enc.add_argument("--mode", choices=("text", "bytes"), default="text")
    enc.set_defaults(func=_cmd_encode)

    dec = sub.add_parser("decode", help="decompress a container")
    dec.add_argument("input")
    dec.add_argument("output")
    dec.add_argument("--mode", choices=("text", "bytes"), default="text")
    dec.set_defaults(func=_cmd_decode)

    bounds = sub.add_parser("bounds", help="redundancy bound terms for an envelope class")
    bounds.add_argument("--env", required=True)
    bounds.add_argument("--n", type=_int_list, required=True)
    bounds.set_defaults(func=_cmd_bounds)

    sim = sub.add_parser("simulate", help="Monte Carlo codec redundancy on the envelope law")
    sim.add_argument("--env", required=True)
    sim.add_argument("--n", type=_int_list, required=True)
    sim.add_argument("--trials", type=int, default=100)
    sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sim.add_argument("--ideal-elias", action="store_true",
                     help="report ideal bits with the analytical integer-code cost")
    sim.set_defaults(func=_cmd_simulate)

    lem = sub.add_parser("lemmas", help="occupancy and concentration inequality reports")
    lem.add_argument("--env", required=True)
    lem.add_argument("--n", type=_int_list, required=True)
    lem.add_argument("--trials", type=int, default=2000)
    lem.add_argument("--seed", type=int, default=DEFAULT_SEED)
    lem.set_defaults(func=_cmd_lemmas)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PccodecError as exc:
        print(f"pccodec: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"pccodec: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
