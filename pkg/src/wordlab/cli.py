"""Batch front end: one subcommand per workflow, CSV or JSON out.

Outputs are deterministic functions of argv (and the seed where one is
used): the resolved configuration is embedded in every emission, there
are no timestamps, and --workers never changes bytes.  Budget overruns
refuse with exit code 2 instead of truncating; malformed input exits 1.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .chevalley import parse_carrier_literal, unipotent_cover_fraction
from .counting import (
    DiagnosticSeries,
    ModuleSpace,
    SeriesRow,
    additive_fourier,
    commutator_fourier_check,
    epsilon_flat_estimate,
    fiber_count,
    flatness_scan,
    hx_sequence,
    lct_estimate_via_jets,
    measure_convolve,
    measures_equal,
    mixing_time,
    word_measure_exact,
    word_measure_sampled,
)
from .dph import dph_build, dph_to_json
from .pointcount import count_affine_solutions, count_tpoly_solutions
from .polymaps import ideal_from_strings, ideal_sl, jet_of_polymap
from .rings import BudgetExceeded, parse_ring_literal, ring_make
from .words import magnus_symbol, parse_word, word_concat

SUBCOMMANDS = ("measure", "fiber", "mix", "convolve", "fourier",
               "verify-commutator", "scan-flat", "eps-flat", "hx", "jets",
               "lct", "dph", "symbol", "cover")


class _Parser(argparse.ArgumentParser):
    """argparse with exit code 1 on malformed input (2 is for budgets)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_grid(text: str) -> List[Tuple[int, int]]:
    """p=3,5,7;k=1..3 -> the (p, k) product, k defaulting to 1."""
    parts: Dict[str, List[int]] = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        key, _, spec = chunk.partition("=")
        key = key.strip()
        if key not in ("p", "k") or not spec:
            raise ValueError(f"bad grid chunk {chunk!r}")
        vals: List[int] = []
        for item in spec.split(","):
            item = item.strip()
            if ".." in item:
                lo, hi = item.split("..", 1)
                vals.extend(range(int(lo), int(hi) + 1))
            else:
                vals.append(int(item))
        parts[key] = vals
    if "p" not in parts or not parts["p"]:
        raise ValueError("grid needs at least p=...")
    return [(p, k) for p in parts["p"] for k in parts.get("k", [1])]


def _infer_kind(text: str, kind: Optional[str]) -> str:
    if kind:
        return kind
    return "lie" if "[" in text else "group"


def _resolve_carrier(args):
    tag, payload = parse_carrier_literal(args.carrier)
    if tag == "group":
        return ("group", payload)
    return payload


def _resolve_ideal(args):
    if getattr(args, "poly", None):
        return ideal_from_strings(args.poly, args.dim_q,
                                  n_vars=getattr(args, "n_vars", None))
    if args.carrier:
        tag, payload = parse_carrier_literal(args.carrier)
        if tag == "group":
            return ideal_sl(payload)
    raise ValueError("need --poly lines or an sl:n carrier")


def _config(args, **extra) -> Dict[str, object]:
    # workers is deliberately not echoed: it never changes results, and
    # embedding it would break byte-identity across worker counts
    keep = ("subcommand", "word", "word2", "kind", "carrier", "ring", "grid",
            "target", "seed", "budget", "format", "tolerance_c",
            "samples", "a", "t_max", "mode", "moduli", "poly", "dim_q", "m",
            "m_max", "s_max", "tolerance", "n", "steps", "power")
    out: Dict[str, object] = {}
    for key in keep:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    out.update(extra)
    return out


class _Emitter:
    """Collects one run's output and writes it once, byte-stable."""

    def __init__(self, args):
        self.fmt = args.format
        self.out = args.out
        self.config: Dict[str, object] = {}
        self.lines: List[str] = []
        self.payload: Dict[str, object] = {}
        self.text: Optional[str] = None

    def csv_series(self, series: DiagnosticSeries,
                   extra_rows: Sequence[str] = ()) -> str:
        body = series.to_csv()
        for row in extra_rows:
            body += row + "\n"
        return body

    def emit(self) -> None:
        if self.text is not None:
            blob = self.text
        elif self.fmt == "json":
            blob = json.dumps({"config": self.config, **self.payload},
                              sort_keys=True, indent=2) + "\n"
        else:
            head = [f"# {k}={self.config[k]}" for k in sorted(self.config)]
            blob = "\n".join(head) + "\n" + "".join(self.lines)
        if self.out:
            with open(self.out, "w") as fh:
                fh.write(blob)
        else:
            sys.stdout.write(blob)


def _series_json(series: DiagnosticSeries) -> dict:
    return series.to_json()


def _frac_cells(fr: Fraction) -> Tuple[int, int, float]:
    return fr.numerator, fr.denominator, float(fr)


# -- subcommand bodies --


def _cmd_measure(args, em: _Emitter) -> None:
    kind = _infer_kind(args.word, args.kind)
    word = parse_word(args.word, kind)
    carrier = _resolve_carrier(args)
    ring = parse_ring_literal(args.ring)
    if args.samples:
        mu = word_measure_sampled(word, carrier, ring, args.samples,
                                  seed=args.seed, workers=args.workers)
    else:
        mu = word_measure_exact(word, carrier, ring, budget=args.budget,
                                workers=args.workers)
    em.config = _config(args, kind=kind, denominator=mu.denom)
    em.payload = {"measure": mu.to_json()}
    rows = ["code,count,denominator,mass"]
    for code in mu.support():
        c = int(mu.counts[code])
        rows.append(f"{int(code)},{c},{mu.denom},{c / mu.denom:.12g}")
    em.lines = [r + "\n" for r in rows]


def _cmd_fiber(args, em: _Emitter) -> None:
    kind = _infer_kind(args.word, args.kind)
    word = parse_word(args.word, kind)
    carrier = _resolve_carrier(args)
    ring = parse_ring_literal(args.ring)
    target = None
    if args.target is not None:
        if "," in args.target:
            target = [int(v) for v in args.target.split(",")]
        elif kind == "group":
            target = int(args.target)  # element index
        else:
            # single integer on a module carrier: coordinate-space code
            space = ModuleSpace(carrier, ring)
            code = int(args.target)
            if not 0 <= code < space.size:
                raise ValueError("target code out of range")
            target = space.decode(np.array([code], dtype=np.int64))[0]
    count = fiber_count(word, carrier, ring, target=target,
                        budget=args.budget, workers=args.workers)
    em.config = _config(args, kind=kind)
    if args.format == "json":
        em.payload = {"count": count}
    else:
        em.text = f"{count}\n"


def _cmd_mix(args, em: _Emitter) -> None:
    kind = _infer_kind(args.word, args.kind)
    word = parse_word(args.word, kind)
    carrier = _resolve_carrier(args)
    ring = parse_ring_literal(args.ring)
    mu = word_measure_exact(word, carrier, ring, budget=args.budget,
                            workers=args.workers)
    norms = [a.strip() for a in args.a.split(",")]
    rows: List[SeriesRow] = []
    summary: Dict[str, Optional[int]] = {}
    for a_text in norms:
        a: object = a_text if a_text == "inf" else (
            int(a_text) if a_text.isdigit() else float(a_text))
        rep = mixing_time(mu, a, t_max=args.t_max)
        summary[a_text] = rep.t_mix
        for row in rep.rows:
            if row.squared:
                # the exact channel carries the square; the root is float
                num, den, val = _frac_cells(row.exact)
                rows.append(SeriesRow(ring.p, ring.k,
                                      f"distance_sq[a={a_text}]@t={row.t}",
                                      num, den, val))
                rows.append(SeriesRow(ring.p, ring.k,
                                      f"distance[a={a_text}]@t={row.t}",
                                      None, None, row.value))
            else:
                num, den, _ = _frac_cells(row.exact)
                rows.append(SeriesRow(ring.p, ring.k,
                                      f"distance[a={a_text}]@t={row.t}",
                                      num, den, row.value))
        rows.append(SeriesRow(
            ring.p, ring.k, f"t_mix[a={a_text}]", rep.t_mix,
            None if rep.t_mix is None else 1,
            math.nan if rep.t_mix is None else float(rep.t_mix)))
    series = DiagnosticSeries(f"mixing:{word}", 0, 0, tuple(rows))
    em.config = _config(args, kind=kind)
    em.payload = {"series": _series_json(series), "t_mix": summary}
    em.lines = [em.csv_series(series)]


def _cmd_convolve(args, em: _Emitter) -> None:
    kind = _infer_kind(args.word, args.kind)
    w1 = parse_word(args.word, kind)
    w2 = parse_word(args.word2, kind)
    carrier = _resolve_carrier(args)
    ring = parse_ring_literal(args.ring)
    lhs = measure_convolve(
        word_measure_exact(w1, carrier, ring, budget=args.budget,
                           workers=args.workers),
        word_measure_exact(w2, carrier, ring, budget=args.budget,
                           workers=args.workers))
    rhs = word_measure_exact(word_concat(w1, w2), carrier, ring,
                             budget=args.budget, workers=args.workers)
    match = measures_equal(lhs, rhs)
    em.config = _config(args, kind=kind)
    verdict = "IDENTITY HOLDS" if match else "IDENTITY FAILS"
    em.payload = {"match": match, "verdict": verdict,
                  "convolution": lhs.to_json()}
    rows = [f"match,{int(match)},1,{float(match):.12g}"]
    for code in lhs.support():
        c = int(lhs.counts[code])
        rows.append(f"mass@{int(code)},{c},{lhs.denom},{c / lhs.denom:.12g}")
    em.lines = ["statistic,numerator,denominator,float\n"]
    em.lines += [r + "\n" for r in rows]


def _cmd_fourier(args, em: _Emitter) -> None:
    kind = _infer_kind(args.word, args.kind)
    word = parse_word(args.word, kind)
    carrier = _resolve_carrier(args)
    ring = parse_ring_literal(args.ring)
    mu = word_measure_exact(word, carrier, ring, budget=args.budget,
                            workers=args.workers)
    rep = additive_fourier(mu, mode=args.mode)
    em.config = _config(args, kind=kind, pairing=rep.pairing,
                        resolved_mode=rep.mode)
    if rep.mode == "exact":
        em.payload = {
            "pairing": rep.pairing,
            "denominator": rep.denom,
            "class_counts": [[int(v) for v in row]
                             for row in rep.class_counts],
        }
        lines = ["statistic,numerator,denominator,float\n"]
        for z in range(rep.class_counts.shape[0]):
            val = rep.value_as_integer(z)
            if val is not None:
                lines.append(f"value@z={z},{val.numerator},"
                             f"{val.denominator},{float(val):.12g}\n")
            else:
                for j in range(rep.p):
                    c = int(rep.class_counts[z, j])
                    lines.append(f"class[z={z}][j={j}],{c},{rep.denom},"
                                 f"{c / rep.denom:.12g}\n")
        em.lines = lines
    else:
        em.payload = {
            "pairing": rep.pairing,
            "values": [[float(v.real), float(v.imag)] for v in rep.values],
        }
        lines = ["statistic,numerator,denominator,float\n"]
        for z, v in enumerate(rep.values):
            lines.append(f"re@z={z},,,{v.real:.12g}\n")
            lines.append(f"im@z={z},,,{v.imag:.12g}\n")
        em.lines = lines


def _cmd_verify_commutator(args, em: _Emitter) -> None:
    tag, payload = parse_carrier_literal(args.carrier)
    if tag != "algebra":
        raise ValueError("verify-commutator runs on algebra carriers (A:n)")
    ring = parse_ring_literal(args.ring)
    if ring.short_kind != "fp":
        raise ValueError("verify-commutator needs a prime field ring")
    rep = commutator_fourier_check(payload, ring.p, budget=args.budget,
                                   census_only=args.census_only,
                                   workers=args.workers)
    em.config = _config(args, resolved_mode=rep.mode)
    if rep.mode == "census-only":
        head = (f"CENSUS ONLY at p={ring.p}: centralizer square census = "
                f"{rep.rhs}")
        body = [head,
                "  convolution route skipped (census-only or over budget)"]
    else:
        tagline = "EXACT MATCH" if rep.match else "MISMATCH"
        head = f"{tagline} at p={ring.p}: {rep.lhs} == {rep.rhs}"
        body = [head,
                f"  second convolution at zero, scaled: {rep.lhs}",
                f"  centralizer square census:          {rep.rhs}"]
    em.payload = {
        "mode": rep.mode,
        "match": rep.match,
        "lhs": None if rep.lhs is None else str(rep.lhs),
        "rhs": str(rep.rhs),
    }
    em.text = "\n".join(body) + "\n"
    if args.format == "json":
        em.text = None


def _cmd_scan_flat(args, em: _Emitter) -> None:
    kind = _infer_kind(args.word, args.kind)
    word = parse_word(args.word, kind)
    carrier = _resolve_carrier(args)
    grid = _parse_grid(args.grid)
    if any(k != 1 for _, k in grid):
        raise ValueError("scan-flat runs over prime fields (k=1 grid)")
    primes = [p for p, _ in grid]
    rep = flatness_scan(word, carrier, primes,
                        c=Fraction(args.tolerance_c),
                        budget=args.budget, workers=args.workers)
    em.config = _config(args, kind=kind)
    extra = [f"{p},1,flat_verdict,{int(rep.verdicts[p])},1,"
             f"{float(rep.verdicts[p]):.12g}" for p in primes]
    em.payload = {"series": _series_json(rep.series),
                  "verdicts": {str(p): bool(rep.verdicts[p])
                               for p in primes},
                  "c": str(rep.c)}
    em.lines = [em.csv_series(rep.series, extra)]


def _cmd_eps_flat(args, em: _Emitter) -> None:
    kind = _infer_kind(args.word, args.kind)
    word = parse_word(args.word, kind)
    carrier = _resolve_carrier(args)
    levels = _parse_grid(args.grid)
    rep = epsilon_flat_estimate(word, carrier, levels, budget=args.budget,
                                workers=args.workers)
    em.config = _config(args, kind=kind)
    extra = [f"0,0,epsilon_min,,,{rep.epsilon_min:.12g}"]
    em.payload = {"series": _series_json(rep.series),
                  "epsilon_min": rep.epsilon_min}
    em.lines = [em.csv_series(rep.series, extra)]


def _cmd_hx(args, em: _Emitter) -> None:
    ideal = _resolve_ideal(args)
    if args.moduli:
        moduli = [int(v) for v in args.moduli.split(",")]
    elif args.grid:
        moduli = [p**k for p, k in _parse_grid(args.grid)]
    else:
        raise ValueError("need --moduli or --grid")
    series = hx_sequence(ideal, moduli, budget=args.budget)
    em.config = _config(args, resolved_moduli=",".join(map(str, moduli)))
    em.payload = {"series": _series_json(series)}
    em.lines = [em.csv_series(series)]


def _cmd_jets(args, em: _Emitter) -> None:
    ideal = _resolve_ideal(args)
    grid = _parse_grid(args.grid)
    if any(k != 1 for _, k in grid):
        raise ValueError("jets compares over prime fields (k=1 grid)")
    rows: List[SeriesRow] = []
    all_match = True
    for p, _ in grid:
        ring = ring_make("fp", p)
        for m in range(args.m + 1):
            arcs = count_tpoly_solutions(ideal.equations, ring, m + 1,
                                         budget=args.budget)[m]
            jets = count_affine_solutions(
                jet_of_polymap(ideal.equations, m, "taylor"), p,
                budget=args.budget)
            ok = arcs == jets
            all_match = all_match and ok
            rows.append(SeriesRow(p, 1, f"arc_count@m={m}", arcs, 1,
                                  float(arcs)))
            rows.append(SeriesRow(p, 1, f"jet_count@m={m}", jets, 1,
                                  float(jets)))
            rows.append(SeriesRow(p, 1, f"match@m={m}", int(ok), 1,
                                  float(ok)))
    series = DiagnosticSeries("jet-identification", ideal.equations.n_in,
                              ideal.dim_q, tuple(rows))
    em.config = _config(args)
    em.payload = {"series": _series_json(series), "all_match": all_match}
    em.lines = [em.csv_series(series)]


def _cmd_lct(args, em: _Emitter) -> None:
    ideal = _resolve_ideal(args)
    grid = _parse_grid(args.grid)
    if any(k != 1 for _, k in grid):
        raise ValueError("lct scans prime base fields (k=1 grid)")
    rep = lct_estimate_via_jets(ideal, args.m_max, [p for p, _ in grid],
                                budget=args.budget, s_max=args.s_max,
                                tolerance=args.tolerance)
    rows: List[SeriesRow] = []
    payload_entries = []
    for entry in rep.entries:
        for m, d in enumerate(entry.dims):
            rows.append(SeriesRow(entry.p, 1, f"jet_dim@m={m}", d,
                                  None if d is None else 1,
                                  math.nan if d is None else float(d)))
        if entry.estimate is None:
            rows.append(SeriesRow(entry.p, 1, "estimate", None, None,
                                  math.nan))
        else:
            num, den, val = _frac_cells(entry.estimate)
            rows.append(SeriesRow(entry.p, 1, "estimate", num, den, val))
        payload_entries.append({
            "p": entry.p,
            "dims": list(entry.dims),
            "slopes": [list(s) for s in entry.slopes],
            "estimate": None if entry.estimate is None
            else str(entry.estimate),
            "unresolved": list(entry.unresolved),
        })
    series = DiagnosticSeries("lct-upper-bounds", ideal.equations.n_in,
                              ideal.dim_q, tuple(rows))
    em.config = _config(args)
    em.payload = {"series": _series_json(series), "entries": payload_entries}
    em.lines = [em.csv_series(series)]


def _cmd_dph(args, em: _Emitter) -> None:
    em.fmt = "json"  # the encoding is structural; csv has no shape for it
    kind = _infer_kind(args.word, args.kind)
    if kind != "lie":
        raise ValueError("dph encodes homogeneous Lie words")
    word = parse_word(args.word, "lie")
    tag, payload = parse_carrier_literal(args.carrier)
    if tag != "algebra":
        raise ValueError("dph runs on algebra carriers (A:n, B:n, ...)")
    ph = dph_build(payload, word)
    em.config = _config(args, kind=kind)
    em.payload = {"dph": dph_to_json(ph)}


def _cmd_symbol(args, em: _Emitter) -> None:
    word = parse_word(args.word, "group")
    symb, degree = magnus_symbol(word)
    text = str(symb).replace("x", "X")
    em.config = _config(args)
    if args.format == "json":
        em.payload = {"degree": degree, "symbol": text}
    else:
        em.text = f"degree={degree} symbol={text}\n"


def _cmd_cover(args, em: _Emitter) -> None:
    grid = _parse_grid(args.grid)
    rows: List[SeriesRow] = []
    for p, k in grid:
        if k != 1:
            raise ValueError("cover runs over prime fields (k=1 grid)")
        frac = unipotent_cover_fraction(args.n, p, args.steps)
        num, den, val = _frac_cells(frac)
        rows.append(SeriesRow(p, 1, f"cover@steps={args.steps}", num, den,
                              val))
    series = DiagnosticSeries("unipotent-cover", 0, 0, tuple(rows))
    em.config = _config(args)
    em.payload = {"series": _series_json(series)}
    em.lines = [em.csv_series(series)]


_BODIES = {
    "measure": _cmd_measure,
    "fiber": _cmd_fiber,
    "mix": _cmd_mix,
    "convolve": _cmd_convolve,
    "fourier": _cmd_fourier,
    "verify-commutator": _cmd_verify_commutator,
    "scan-flat": _cmd_scan_flat,
    "eps-flat": _cmd_eps_flat,
    "hx": _cmd_hx,
    "jets": _cmd_jets,
    "lct": _cmd_lct,
    "dph": _cmd_dph,
    "symbol": _cmd_symbol,
    "cover": _cmd_cover,
}


def build_parser() -> _Parser:
    parser = _Parser(prog="wordlab", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")

    def add(name, **needs):
        sp = sub.add_parser(name)
        if needs.get("word"):
            sp.add_argument("--word", required=True)
            sp.add_argument("--kind", choices=("group", "lie", "assoc"))
        if needs.get("word2"):
            sp.add_argument("--word2", required=True)
        if needs.get("carrier"):
            sp.add_argument("--carrier", required=needs["carrier"] == "req")
        if needs.get("ring"):
            sp.add_argument("--ring", required=True)
        if needs.get("grid"):
            sp.add_argument("--grid", required=needs["grid"] == "req")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=2**24)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        return sp

    sp = add("measure", word=True, carrier="req", ring=True)
    sp.add_argument("--samples", type=int)

    sp = add("fiber", word=True, carrier="req", ring=True)
    sp.add_argument("--target")

    sp = add("mix", word=True, carrier="req", ring=True)
    sp.add_argument("--a", default="2")
    sp.add_argument("--t-max", type=int, default=16)

    add("convolve", word=True, word2=True, carrier="req", ring=True)

    sp = add("fourier", word=True, carrier="req", ring=True)
    sp.add_argument("--mode", choices=("auto", "exact", "float"),
                    default="auto")

    sp = add("verify-commutator", carrier="req", ring=True)
    sp.add_argument("--census-only", action="store_true")

    sp = add("scan-flat", word=True, carrier="req", grid="req")
    sp.add_argument("--tolerance-c", default="3")

    add("eps-flat", word=True, carrier="req", grid="req")

    sp = add("hx", carrier="opt", grid="opt")
    sp.add_argument("--moduli")
    sp.add_argument("--poly", action="append")
    sp.add_argument("--dim-q", type=int, default=0)
    sp.add_argument("--n-vars", type=int)

    sp = add("jets", carrier="opt", grid="req")
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--poly", action="append")
    sp.add_argument("--dim-q", type=int, default=0)
    sp.add_argument("--n-vars", type=int)

    sp = add("lct", carrier="opt", grid="req")
    sp.add_argument("--m-max", type=int, required=True)
    sp.add_argument("--s-max", type=int, default=3)
    sp.add_argument("--tolerance", type=float, default=0.1)
    sp.add_argument("--poly", action="append")
    sp.add_argument("--dim-q", type=int, default=0)
    sp.add_argument("--n-vars", type=int)

    add("dph", word=True, carrier="req")

    add("symbol", word=True)

    sp = add("cover", grid="req")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--steps", type=int, required=True)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return 1
    em = _Emitter(args)
    try:
        _BODIES[args.subcommand](args, em)
    except BudgetExceeded as exc:
        print(f"wordlab: budget refused: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"wordlab: error: {exc}", file=sys.stderr)
        return 1
    em.emit()
    return 0


if __name__ == "__main__":
    sys.exit(main())
