"""Command-line front end; every subcommand writes CSV.

Exit codes: 0 success, 1 claim failure, 2 bad arguments, 3 numerical
failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .bounds import (
    A_HIGH_K,
    A_LOW_K,
    B_TAYLOR,
    BERG_LOWER,
    CATALOG,
    CATALOG_SIDE,
    NU0,
    NU1,
    NU_L0,
    NU_L1,
    NU_LINF,
    NU_U,
    ab_locus,
    eval_affine,
    eval_berg_upper,
    eval_chen_rubin_lower,
    eval_chen_rubin_upper,
    geometric_grid,
    percentile_of,
    scaled_margin,
)
from .claims import CLAIM_IDS, run_claims
from .interpolation import (
    P0,
    PINF,
    TABLE2_FORMULAS,
    TABLE2_ROWS,
    TABLE2_SIDES,
    Arctan,
    Rational1,
    a_of_k,
    b_of_k,
    eval_interpolator,
    ideal_g,
    interpolated_median,
    table2_parameter,
)
from .median import median
from .search import CACHE_ENV, SearchConfig, SearchError, run_search
from .special import ConvergenceError, DomainError

EXIT_CLAIM_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


@dataclass
class OutputTable:
    header: list[str]
    rows: list[tuple] = field(default_factory=list)
    metadata: list[str] = field(default_factory=list)
    precision: int = 17

    def add(self, *values) -> None:
        if len(values) != len(self.header):
            raise ValueError(f"row has {len(values)} values, header has {len(self.header)}")
        self.rows.append(tuple(values))

    def _cell(self, v) -> str:
        if v is None:
            return ""
        if isinstance(v, bool):
            return str(v)
        if isinstance(v, float):
            return f"{v:.{self.precision}g}"
        return str(v)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for line in self.metadata:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([self._cell(v) for v in row])
        return buf.getvalue()


def _parse_cell(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(text: str) -> OutputTable:
    """Parse CSV written by ``OutputTable.to_csv``."""
    lines = text.splitlines(keepends=True)
    meta = []
    while lines and lines[0].startswith("#"):
        meta.append(lines.pop(0)[2:].rstrip("\n"))
    reader = csv.reader(io.StringIO("".join(lines)))
    header = next(reader)
    table = OutputTable(header, metadata=meta)
    for row in reader:
        table.rows.append(tuple(_parse_cell(c) for c in row))
    return table


_NATURAL_LOG_LIMIT = 300.0 * math.log(10.0)

# -- median ------------------------------------------------------------------


def median_table(ks: Sequence[float]) -> OutputTable:
    t = OutputTable(["k", "scaled_median", "log_natural_median", "natural_median", "cdf_residual"])
    for k in ks:
        sol = median(k)
        v = sol.value
        # below ~1e-300 only the log column is meaningful
        natural = v.natural if abs(v.log_natural) <= _NATURAL_LOG_LIMIT else None
        t.add(k, v.scaled, v.log_natural, natural, sol.cdf_residual)
    return t


# -- tables ------------------------------------------------------------------

_TABLE1_TEXT = {
    "berg_lower": ("0", "1", "Berg lower bound 2^(-1/k) k"),
    "nu0": ("exp(-gamma)", "0", "Berg low-k asymptote, a lower bound"),
    "nu1": ("exp(-gamma)", "exp(-gamma) pi^2/12", "improved low-k asymptote; not a bound"),
    "nuL0": ("exp(-gamma)", "numeric (tight)", "tight lower bound, best at low k"),
    "nuL1": ("numeric", "numeric", "tight lower bound, tangent at k = 1"),
    "nuLinf": ("ln2 - 1/3", "1", "tight lower bound, best at high k"),
    "nuU": ("exp(-gamma)", "1", "uniquely tight upper bound"),
}


def table1() -> OutputTable:
    t = OutputTable(["name", "A", "B", "A_formula", "B_formula", "side", "description"])
    t.add("berg_upper", None, None, "exp(-1/(3k)) k", "", "U", "Berg upper bound, high-k asymptote")
    t.add("gamma_power", None, None, "2^(-1/k) Gamma(k+1)^(1/k)", "", "L", "lower bound, low-k asymptote")
    for name, b in CATALOG.items():
        a_txt, b_txt, desc = _TABLE1_TEXT[name]
        side = {"lower": "L", "upper": "U", None: "--"}[CATALOG_SIDE[name]]
        t.add(name, b.A, b.B, a_txt, b_txt, side, desc)
    return t


def table2() -> OutputTable:
    t = OutputTable(["family", "criterion", "formula", "value", "side"])
    for fam, crit in TABLE2_ROWS:
        t.add(fam, crit, TABLE2_FORMULAS[(fam, crit)], table2_parameter(fam, crit),
              TABLE2_SIDES.get((fam, crit), "--"))
    t.metadata.append(f"numeric-only rows come from the search cache ({CACHE_ENV})")
    return t


# -- figures -----------------------------------------------------------------


def _scaled_or_none(v):
    if v is None or math.isinf(v.scaled):
        return None
    return v.scaled


def _margin_or_none(v, k):
    mg = scaled_margin(v, k)
    return None if math.isinf(mg) else mg


def figure_prior_art(ks):
    evals = {
        "chen_upper": eval_chen_rubin_upper,
        "chen_lower": eval_chen_rubin_lower,
        "berg_upper": eval_berg_upper,
        "berg_lower": lambda k: eval_affine(BERG_LOWER, k),
        "nu0": lambda k: eval_affine(NU0, k),
    }
    header = ["k", "median_scaled", "log10_median"]
    for n in evals:
        header += [f"{n}_scaled", f"{n}_margin"]
    t = OutputTable(header, metadata=["values and margins premultiplied by 2^(1/k)"])
    for k in ks:
        v = median(k).value
        row = [k, v.scaled, v.log_natural / math.log(10.0)]
        for ev in evals.values():
            b = ev(k)
            row += [_scaled_or_none(b), _margin_or_none(b, k)]
        t.add(*row)
    return t


def _key_points():
    return [
        f"point {b.name} A={b.A:.17g} B={b.B:.17g}"
        for b in (NU_U, NU_LINF, NU_L0, NU_L1, NU1, NU0, BERG_LOWER)
    ] + ["line through k=1: A + B = 2 ln 2"]


def figure_ab_locus(ks):
    t = OutputTable(["k", "A_intercept", "B_slope", "B_at_A0"],
                    metadata=["each row is the line A = A_intercept + B_slope * B"] + _key_points())
    for k in ks:
        a0, slope = ab_locus(k)
        t.add(k, a0, slope, a0 / k)
    return t


def figure_components(ks):
    bounds = (NU_L0, NU_L1, NU_LINF, NU_U, NU1)
    header = ["k", "median_scaled"]
    for b in bounds:
        header += [f"{b.name}_scaled", f"{b.name}_margin"]
    t = OutputTable(header, metadata=["values and margins premultiplied by 2^(1/k)"])
    for k in ks:
        row = [k, median(k).value.scaled]
        for b in bounds:
            v = eval_affine(b, k)
            row += [v.scaled, scaled_margin(v, k)]
        t.add(*row)
    return t


def _percentile_curves():
    return {
        "chen_upper": eval_chen_rubin_upper,
        "chen_lower": eval_chen_rubin_lower,
        "berg_upper": eval_berg_upper,
        "berg_lower": lambda k: eval_affine(BERG_LOWER, k),
        "nuL0": lambda k: eval_affine(NU_L0, k),
        "nuL1": lambda k: eval_affine(NU_L1, k),
        "nuLinf": lambda k: eval_affine(NU_LINF, k),
        "nuU": lambda k: eval_affine(NU_U, k),
        "rational1_upper": lambda k: interpolated_median(Rational1(1.0 / P0), k),
        "rational1_lower": lambda k: interpolated_median(Rational1(PINF), k),
    }


def figure_percentiles(ks):
    curves = _percentile_curves()
    t = OutputTable(["k", *curves], metadata=["percentile = 100 P(k, bound)"])
    for k in ks:
        t.add(k, *(percentile_of(ev(k)) for ev in curves.values()))
    return t


def figure_ab_functions(ks):
    t = OutputTable(["k", "A_of_k", "B_of_k"], metadata=[
        f"A limits: {A_LOW_K:.17g} (k->0), {A_HIGH_K:.17g} (k->inf)",
        f"B limits: {B_TAYLOR:.17g} (k->0), 1 (k->inf)",
    ])
    for k in ks:
        t.add(k, a_of_k(k), b_of_k(k))
    return t


def _figure7_interps():
    return {
        "rational_upper": Rational1(table2_parameter("rational", "low_k")),
        "rational_lower": Rational1(table2_parameter("rational", "high_k")),
        "arctan_upper": Arctan(table2_parameter("arctan", "low_k")),
        "arctan_lower": Arctan(table2_parameter("arctan", "tangent_lower")),
    }


def figure_interpolators(ks):
    interps = _figure7_interps()
    header = ["k", "ideal_g"]
    header += [f"{n}_g" for n in interps]
    header += [f"{n}_g_margin" for n in interps]
    header += [f"{n}_median_margin" for n in interps]
    t = OutputTable(header, metadata=[
        "*_upper/*_lower refer to the median; g margins are g~ - g, median margins are scaled",
    ])
    for k in ks:
        g = ideal_g(k)
        vals = [eval_interpolator(it, k) for it in interps.values()]
        margins = [scaled_margin(interpolated_median(it, k), k) for it in interps.values()]
        t.add(k, g, *vals, *(v - g for v in vals), *margins)
    return t


def figure_arctan_errors(ks):
    rows = ("low_k", "tangent_lower", "high_k", "minimax_relative", "minimax_absolute", "exact_at_1")
    interps = {r: Arctan(table2_parameter("arctan", r)) for r in rows}
    t = OutputTable(["k", *(f"relerr_{r}" for r in rows)],
                    metadata=[f"b[{r}]={it.b:.17g}" for r, it in interps.items()])
    for k in ks:
        m = median(k).value.scaled
        t.add(k, *((interpolated_median(it, k).scaled - m) / m for it in interps.values()))
    return t


FIGURES = {
    1: figure_prior_art,
    2: figure_ab_locus,
    3: figure_ab_locus,
    4: figure_components,
    5: figure_percentiles,
    6: figure_ab_functions,
    7: figure_interpolators,
    8: figure_arctan_errors,
}


def figure_grid(fig: int, per_decade: int) -> list[float]:
    if fig == 2:
        return geometric_grid(1e-3, 1e3, max(1, per_decade // 5))
    if fig == 3:
        return geometric_grid(1e-2, 1.0, per_decade)
    return geometric_grid(1e-3, 1e3, per_decade)


def figure_table(fig: int, per_decade: int = 25) -> OutputTable:
    t = FIGURES[fig](figure_grid(fig, per_decade))
    t.metadata.insert(0, f"figure {fig}; gamma-median {__version__}")
    return t


# -- verify / search ---------------------------------------------------------


def verify_table(ids, per_decade: int) -> tuple[OutputTable, bool]:
    cfg = SearchConfig(per_decade=per_decade)
    results = run_claims(ids, cfg)
    t = OutputTable(["id", "description", "measured", "threshold", "status"])
    for r in results:
        t.add(r.id, r.description, r.measured, r.threshold, "PASS" if r.passed else "FAIL")
    return t, all(r.passed for r in results)


SEARCH_TARGETS = ("L0", "L1", "arctan-lower", "minimax-rel", "minimax-abs")


def search_table(target: str, cfg: SearchConfig) -> OutputTable:
    t = OutputTable(["target", "parameter", "abscissa", "extremum", "secondary"], metadata=[
        f"grid k in [{cfg.k_min:g}, {cfg.k_max:g}], {cfg.per_decade}/decade, refined 10x",
        f"param_tolerance={cfg.param_tolerance:g} margin_tolerance={cfg.margin_tolerance:g}",
    ])
    targets = [target, "minimax-abs-natural"] if target == "minimax-abs" else [target]
    for tg in targets:
        r = run_search(tg, cfg)
        t.add(r.target, r.parameter, r.abscissa, r.extremum, r.secondary)
    if target == "minimax-abs":
        t.metadata.append("minimax-abs uses 2^(1/k)|nu - nu~|; minimax-abs-natural uses |nu - nu~|")
    if target == "L1":
        t.metadata.append("parameter = B, secondary = A, extremum = margin at k = 1")
    if target == "L0":
        t.metadata.append("secondary = fixed A = exp(-gamma)")
    return t


# -- argument handling -------------------------------------------------------


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gamma-median", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("median", help="solve the median for one k or a geometric range")
    m.add_argument("--k", type=_positive_float)
    m.add_argument("--k-min", type=_positive_float)
    m.add_argument("--k-max", type=_positive_float)
    m.add_argument("--per-decade", type=_positive_int, default=10)

    t = sub.add_parser("table", help="emit the bound or interpolator catalog")
    t.add_argument("--which", choices=("table1", "table2"), required=True)

    f = sub.add_parser("figure", help="write the data behind a figure as CSV")
    f.add_argument("--fig", type=int, choices=range(1, 9), required=True)
    f.add_argument("--out", type=Path, required=True)
    f.add_argument("--per-decade", type=_positive_int, default=25)

    v = sub.add_parser("verify", help="check the quantitative claims")
    v.add_argument("--claims", default="all", help="'all' or comma-separated ids")
    v.add_argument("--per-decade", type=_positive_int, default=100)

    s = sub.add_parser("search", help="re-derive a numeric-only parameter")
    s.add_argument("--target", choices=SEARCH_TARGETS, required=True)
    s.add_argument("--per-decade", type=_positive_int, default=100)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "median":
            if args.k is not None:
                if args.k_min is not None or args.k_max is not None:
                    parser.error("use either --k or --k-min/--k-max")
                ks = [args.k]
            elif args.k_min is not None and args.k_max is not None:
                if args.k_min >= args.k_max:
                    parser.error("--k-min must be below --k-max")
                ks = geometric_grid(args.k_min, args.k_max, args.per_decade)
            else:
                parser.error("give --k or both --k-min and --k-max")
            out.write(median_table(ks).to_csv())
        elif args.command == "table":
            out.write((table1() if args.which == "table1" else table2()).to_csv())
        elif args.command == "figure":
            text = figure_table(args.fig, args.per_decade).to_csv()
            try:
                args.out.write_text(text)
            except OSError as exc:
                print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
                return EXIT_IO
        elif args.command == "verify":
            ids = None if args.claims == "all" else [c.strip() for c in args.claims.split(",") if c.strip()]
            bad = [c for c in ids or () if c not in CLAIM_IDS]
            if bad:
                parser.error(f"unknown claim ids {bad}; known: {', '.join(CLAIM_IDS)}")
            table, ok = verify_table(ids, args.per_decade)
            out.write(table.to_csv())
            return 0 if ok else EXIT_CLAIM_FAILED
        elif args.command == "search":
            out.write(search_table(args.target, SearchConfig(per_decade=args.per_decade)).to_csv())
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, SearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


__all__ = ["OutputTable", "read_csv", "main"]
