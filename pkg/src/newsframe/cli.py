"""Batch command-line front end.

Subcommands compose the library modules and write reproducible reports:
JSON for structured results, CSV for plot-data feeds, and PNG figures
rendered from the same data. Exit codes: 0 success, 2 usage or input
error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import date
from pathlib import Path

from . import datasets, figures, ingest, legislation
from .config import RunConfig, file_digest, load_config
from .corpus import ngram_text
from .errors import AuthError, NewsframeError
from .forest import ForestParams
from .framing import detect_with_coordinates
from .newscycle import AnnualFeatureSeries, annual_features, load_lexicon

USAGE_EXIT = 2
RUNTIME_EXIT = 3


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_json(path: Path, payload: dict):
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _digests(paths) -> dict:
    return {str(p): file_digest(p) for p in paths if p is not None}


def _build_config(args) -> RunConfig:
    config = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {}
    for name in ("k", "j", "window", "min_df", "threshold", "score_mode",
                 "threshold_mode", "bins", "alpha", "predictor_mode", "t",
                 "seed", "rate", "weighting"):
        if hasattr(args, name):
            overrides[name] = getattr(args, name)
    if getattr(args, "orders", None):
        overrides["orders"] = tuple(int(n) for n in args.orders.split(","))
    if getattr(args, "no_figures", False):
        overrides["figures"] = False
    return config.override(**overrides)


def _parse_date(text: str) -> date:
    return date.fromisoformat(text)


def read_laws_csv(path) -> dict:
    """Ground-truth legislation CSV (topic,year,count) -> {topic: {year: bool}}."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            topic = row["topic"].strip()
            year = int(row["year"])
            count = int(row.get("count", "1") or 1)
            out.setdefault(topic, {})
            out[topic][year] = out[topic].get(year, False) or count >= 1
        return out


def _load_series_dir(series_dir: Path, laws: dict | None):
    series = []
    for path in sorted(series_dir.glob("*.csv")):
        s = AnnualFeatureSeries.read_csv(path)
        if laws is not None:
            topic_laws = laws.get(s.topic, {})
            s = AnnualFeatureSeries(
                topic=s.topic, years=s.years, volume=s.volume,
                mean_sentiment=s.mean_sentiment, mnc=s.mnc,
                legislative=tuple(bool(topic_laws.get(y, False)) for y in s.years),
            )
        series.append(s)
    if not series:
        raise ValueError(f"no series CSV files found in {series_dir}")
    return series


# --- subcommands -------------------------------------------------------------

def cmd_fetch(args) -> int:
    adapter = ingest.ADAPTERS[args.adapter]
    job = ingest.FetchJob(
        adapter=adapter,
        keyword=args.query,
        period=(_parse_date(getattr(args, "from")), _parse_date(args.to)),
        max_pages=args.max_pages,
        cache_dir=Path(args.cache_dir),
    )
    corpus = ingest.fetch_topic(job, rate=args.rate)
    ingest.save_corpus(corpus, args.out)
    if len(corpus) == 0:
        print(f"warning: query {args.query!r} matched no articles", file=sys.stderr)
    print(f"fetch adapter={adapter.name} query={args.query} articles={len(corpus)} out={args.out}")
    return 0


def cmd_framing(args) -> int:
    config = _build_config(args)
    t1 = ingest.load_corpus(args.t1)
    t2 = ingest.load_corpus(args.t2)
    topic = args.topic or Path(args.t1).stem
    report, coords = detect_with_coordinates(t1, t2, config, topic=topic)

    out = Path(args.out)
    payload = report.to_dict()
    payload["inputs"] = _digests([args.t1, args.t2, getattr(args, "config", None)])
    _write_json(out / "report.json", payload)

    lines = ["ngram,ig_bits"]
    lines += [f"{ngram_text(g)},{s:.10g}" for g, s in report.keyword_set.keywords]
    _write_text(out / "keywords.csv", "\n".join(lines) + "\n")

    lines = ["ngram,x,y"]
    lines += [f"{ngram_text(g)},{x:.10g},{y:.10g}" for g, x, y in coords]
    _write_text(out / "coordinates.csv", "\n".join(lines) + "\n")

    lines = ["a,b,wmd,similarity"]
    lines += [
        f"{ngram_text(a)},{ngram_text(b)},{d:.10g},{s:.10g}"
        for a, b, d, s in report.distance_report.pairs
    ]
    _write_text(out / "pairs.csv", "\n".join(lines) + "\n")

    if config.figures:
        figures.render_keyword_map(coords, out / "keywords_2d.png",
                                   title=f"{topic}: discriminative keywords")
    print(report.summary_line())
    return 0


def cmd_cycle(args) -> int:
    config = _build_config(args)
    corpus = ingest.load_corpus(args.corpus)
    if args.lexicons:
        lex_dir = Path(args.lexicons)
        lex = load_lexicon(lex_dir / "positive.txt", lex_dir / "negative.txt")
    else:
        lex = load_lexicon()
    topic = args.topic or Path(args.corpus).stem
    labels = None
    if args.laws:
        labels = read_laws_csv(args.laws).get(topic, {})
    series = annual_features(corpus, lex, legislative_labels=labels, topic=topic)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    series.write_csv(out / "series.csv")
    _write_json(out / "report.json", {
        "topic": topic,
        "years": list(series.years),
        "volume": list(series.volume),
        "config": config.to_dict(),
        "inputs": _digests([args.corpus, args.laws, getattr(args, "config", None)]),
    })
    if config.figures:
        figures.render_annual_series(series, out / "cycle.png")
    print(f"cycle topic={topic} years={len(series.years)} articles={len(corpus)}")
    return 0


def _diff_series(args):
    laws = read_laws_csv(args.laws) if args.laws else None
    series = _load_series_dir(Path(args.series_dir), laws)
    return [legislation.normalized_annual_diffs(s) for s in series]


def cmd_legislate(args) -> int:
    config = _build_config(args)
    out = Path(args.out)
    diffs = _diff_series(args)
    inputs = _digests(
        sorted(str(p) for p in Path(args.series_dir).glob("*.csv"))
        + [p for p in (args.laws, getattr(args, "config", None)) if p]
    )

    if args.action == "fit":
        model = legislation.fit_model(
            diffs, bins=config.bins, alpha=config.alpha,
            mode=config.predictor_mode, t=config.t,
        )
        payload = model.to_dict()
        payload["config"] = config.to_dict()
        payload["inputs"] = inputs
        payload["warnings"] = []
        if config.alpha == 0:
            for f in model.features:
                empty = int((model.joint[f].sum(axis=1) == 0).sum())
                if empty:
                    payload["warnings"].append(
                        f"feature {f}: {empty} unsmoothed joint rows are empty; "
                        "prediction will fail for changes starting in those bins"
                    )
        _write_json(out / "model.json", payload)
        print(f"legislate-fit topics={len(diffs)} bins={config.bins} alpha={config.alpha:g} out={out / 'model.json'}")
        return 0

    if args.action == "predict":
        model_data = json.loads(Path(args.model).read_text("utf-8"))
        model = legislation.LegislationModel.from_dict(model_data)
        rows = []
        for fds in diffs:
            for year, prob, label, actual in legislation.predict_series(model, fds):
                rows.append((fds.topic, year, prob, label, actual))
        lines = ["topic,year,posterior,label"]
        lines += [f"{t},{y},{p:.12g},{lab}" for t, y, p, lab, _ in rows]
        _write_text(out / "predictions.csv", "\n".join(lines) + "\n")
        _write_json(out / "report.json", {
            "topics": sorted({t for t, *_ in rows}),
            "predictions": len(rows),
            "legislative": sum(1 for *_, lab, a in rows if lab == legislation.LEGISLATIVE),
            "config": config.to_dict(),
            "inputs": inputs,
        })
        if config.figures:
            for fds in diffs:
                topic_rows = legislation.predict_series(model, fds)
                figures.render_posteriors(topic_rows, out / f"posteriors_{fds.topic}.png",
                                          t=model.t, topic=fds.topic)
        n_leg = sum(1 for *_, lab, a in rows if lab == legislation.LEGISLATIVE)
        print(f"legislate-predict topics={len(diffs)} years={len(rows)} legislative={n_leg}")
        return 0

    # leave-one-out
    result = legislation.loo_evaluate(
        diffs, bins=config.bins, alpha=config.alpha,
        mode=config.predictor_mode, t=config.t,
    )
    result["config"] = config.to_dict()
    result["inputs"] = inputs
    _write_json(out / "metrics.json", result)
    if config.figures:
        figures.render_topic_f1(result["topics"], out / "loo_f1.png",
                                overall=result["overall"]["f1"])
    print(f"legislate-loo topics={len(result['topics'])} f1={result['overall']['f1']:.6f}")
    return 0


def cmd_bootstrap(args) -> int:
    config = _build_config(args)
    seeds = datasets.read_seed_labels(args.seeds)
    universal = ingest.load_corpus(args.universal)
    params = datasets.BootstrapParams(
        forest=ForestParams(seed=config.substream("forest")),
        orders=config.orders,
        min_df=config.min_df,
        include_seeds=config.include_seeds,
    )
    result = datasets.bootstrap_dataset(seeds, universal, params)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ingest.save_corpus(result.positives, out / "positives.jsonl")
    ingest.save_corpus(result.negatives, out / "negatives.jsonl")
    payload = dict(result.provenance)
    payload["config"] = config.to_dict()
    payload["inputs"] = _digests([args.seeds, args.universal, getattr(args, "config", None)])
    _write_json(out / "provenance.json", payload)
    print(
        f"bootstrap positives={len(result.positives)} "
        f"negatives={len(result.negatives)} m={result.provenance['m']}"
    )
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsframe",
        description="Framing-change detection, news-cycle features, and "
                    "legislative-activity prediction over news corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p, *names):
        p.add_argument("--config", help="key = value config file")
        flag_specs = {
            "k": (int, "top keywords"),
            "j": (int, "embedding dimensions"),
            "window": (int, "co-occurrence window"),
            "min_df": (int, "vocabulary document-frequency cutoff"),
            "threshold": (float, "fixed significance threshold"),
            "score_mode": (str, "mean_similarity or median_distance"),
            "threshold_mode": (str, "fixed, median, or em"),
            "bins": (int, "diff histogram bins"),
            "alpha": (float, "Laplace smoothing"),
            "predictor_mode": (str, "anomaly or class_conditional"),
            "t": (float, "anomaly decision threshold"),
            "seed": (int, "master seed"),
            "weighting": (str, "raw or ppmi"),
        }
        for name in names:
            typ, help_text = flag_specs[name]
            p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ,
                           default=None, help=help_text)
        p.add_argument("--orders", default=None, help="n-gram orders, e.g. 1,2")
        p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    p = sub.add_parser("fetch", help="query an article API into a JSONL corpus")
    p.add_argument("--adapter", choices=sorted(ingest.ADAPTERS), required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--from", required=True, help="period start, YYYY-MM-DD")
    p.add_argument("--to", required=True, help="period end, YYYY-MM-DD")
    p.add_argument("--out", required=True)
    p.add_argument("--max-pages", type=int, default=10)
    p.add_argument("--cache-dir", default="cache")
    p.add_argument("--rate", type=float, default=1.0, help="max requests per second")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("framing", help="detect a framing change between two period corpora")
    p.add_argument("--t1", required=True, help="period-1 corpus JSONL")
    p.add_argument("--t2", required=True, help="period-2 corpus JSONL")
    p.add_argument("--topic", default=None)
    p.add_argument("--out", required=True, help="output directory")
    add_config_flags(p, "k", "j", "window", "min_df", "threshold",
                     "score_mode", "threshold_mode", "seed", "weighting")
    p.set_defaults(func=cmd_framing)

    p = sub.add_parser("cycle", help="annual volume/sentiment/correlation features")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicons", default=None,
                   help="directory holding positive.txt and negative.txt")
    p.add_argument("--laws", default=None, help="ground truth CSV topic,year,count")
    p.add_argument("--topic", default=None)
    p.add_argument("--out", required=True)
    add_config_flags(p, "seed")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("legislate", help="fit/predict/evaluate the legislation model")
    p.add_argument("action", choices=("fit", "predict", "loo"))
    p.add_argument("--series-dir", required=True,
                   help="directory of per-topic feature series CSVs")
    p.add_argument("--laws", default=None, help="ground truth CSV topic,year,count")
    p.add_argument("--model", default=None, help="model JSON (predict)")
    p.add_argument("--out", required=True)
    add_config_flags(p, "bins", "alpha", "predictor_mode", "t", "seed")
    p.set_defaults(func=cmd_legislate)

    p = sub.add_parser("bootstrap", help="two-stage topic dataset construction")
    p.add_argument("--seeds", required=True, help="seed labels CSV (article_id,label)")
    p.add_argument("--universal", required=True, help="universal set JSONL")
    p.add_argument("--out", required=True)
    add_config_flags(p, "min_df", "seed")
    p.set_defaults(func=cmd_bootstrap)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "legislate" and args.action == "predict" and not args.model:
        parser.error("legislate predict requires --model")
    try:
        return args.func(args)
    except AuthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except NewsframeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
