"""Command-line interface: run experiments, search parameters, build reports."""
from __future__ import annotations

import argparse
import glob
import json
import sys
from dataclasses import replace
from pathlib import Path

from udicl import constructions, deps, lexicon
from udicl.gateway import Gateway, ModelConfig
from udicl.metrics.bertscore import ScoreCache, SidecarClient
from udicl.pipeline import Resources
from udicl.prompts import SETTING_NAMES
from udicl.runner.corpus import Corpus, load_corpus, subset_corpus
from udicl.runner.gridsearch import dep_grid, grid_search, lex_grid, select_diagnostic_subset
from udicl.runner.report import build_report, render_report
from udicl.runner.run import RunSpec, config_hash, read_records, run, write_records


class CliError(RuntimeError):
    pass


def load_config(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise CliError(f"config file {path} is not valid JSON: {exc}")


def build_resources(config: dict) -> Resources:
    dictionary = config.get("dictionary")
    if not dictionary or "path" not in dictionary:
        raise CliError("config must name a dictionary file under dictionary.path")
    with open(dictionary["path"], encoding="utf-8") as f:
        index = lexicon.ingest(f, dictionary.get("format", "normalized-tsv"))

    lex_params = lexicon.LexParams(**{
        **{"target_languages": ("en",)},
        **{
            k: (tuple(v) if k == "target_languages" else v)
            for k, v in config.get("lex_params", {}).items()
        },
    })
    dep_params = deps.DepParams(**config.get("dep_params", {}))
    gloss_table = deps.load_gloss_table(config.get("gloss_table"))
    ruleset = (
        constructions.load_rules(config["rules"]) if config.get("rules") else constructions.load_starter_rules()
    )
    translit = constructions.load_translit_table(config.get("translit_table"))
    return Resources(
        lexicon_index=index,
        lex_params=lex_params,
        dep_params=dep_params,
        gloss_table=gloss_table,
        ruleset=ruleset,
        translit=translit,
    )


def load_split(config: dict, split: str) -> Corpus:
    data = config.get("data", {}).get(split)
    if not data:
        raise CliError(f"config has no data entry for split {split!r}")
    return load_corpus(
        split,
        data["conllu"],
        data["references"],
        data.get("gold_conllu"),
    )


def build_gateway(config: dict, model_name: str, offline: bool) -> Gateway:
    models = config.get("models", {})
    if model_name not in models:
        raise CliError(f"config has no model named {model_name!r}")
    gateway = Gateway(ModelConfig(**models[model_name]), offline=offline)
    cache_path = config.get("cache")
    if cache_path and Path(cache_path).exists():
        gateway.cache_import(cache_path)
    return gateway


def open_sidecar(config: dict) -> tuple[SidecarClient | None, ScoreCache, str | None]:
    section = config.get("bertscore", {})
    cache = ScoreCache()
    cache_path = section.get("cache")
    if cache_path and Path(cache_path).exists():
        cache.load(cache_path)
    client = None
    if section.get("sidecar_cmd"):
        client = SidecarClient.from_command(section["sidecar_cmd"])
    elif section.get("socket"):
        host, port = section["socket"].rsplit(":", 1)
        client = SidecarClient.from_socket(host, int(port))
    return client, cache, section.get("model_id")


def save_side_state(config: dict, gateway: Gateway, cache: ScoreCache) -> None:
    if config.get("cache"):
        Path(config["cache"]).parent.mkdir(parents=True, exist_ok=True)
        gateway.cache_export(config["cache"])
    bert_cache_path = config.get("bertscore", {}).get("cache")
    if bert_cache_path and len(cache):
        Path(bert_cache_path).parent.mkdir(parents=True, exist_ok=True)
        cache.save(bert_cache_path)


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    parse_source = "gold" if args.parse == "gold" else "automatic"
    spec = RunSpec(
        split=args.split,
        setting=args.setting,
        model=args.model,
        parse_source=parse_source,
        context_budget=config.get("context_budget"),
    )
    corpus = load_split(config, args.split)
    resources = build_resources(config)
    gateway = build_gateway(config, args.model, args.offline)
    sidecar, bert_cache, bert_model_id = open_sidecar(config)
    try:
        records = run(
            spec, corpus, resources, gateway,
            sidecar=sidecar, bert_cache=bert_cache, bert_model_id=bert_model_id,
        )
    finally:
        if sidecar is not None:
            sidecar.close()

    out_dir = Path(config.get("output_dir", "runs"))
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{args.split}__{args.setting.replace('+', '_')}__{args.model}__{parse_source}"
    out_path = out_dir / f"{stem}.jsonl"
    manifest = {
        "spec": {
            "split": spec.split, "setting": spec.setting,
            "model": spec.model, "parse_source": spec.parse_source,
        },
        "config_hash": config_hash(config),
        "n_records": len(records),
    }
    write_records(records, out_path, manifest)
    save_side_state(config, gateway, bert_cache)
    print(f"wrote {len(records)} records to {out_path}")
    return 0


def cmd_gridsearch(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    corpus = load_split(config, args.split)
    resources = build_resources(config)
    component = args.component.upper()
    out_dir = Path(config.get("output_dir", "runs"))

    if component == "LEX":
        # the dictionary search runs with the best dependency setting when available
        dep_result = out_dir / "gridsearch_DEP.json"
        if dep_result.exists():
            best = json.loads(dep_result.read_text(encoding="utf-8"))["final"]
            resources.dep_params = deps.DepParams(**best)

    baseline = read_records(args.baseline_records)
    subset_ids = select_diagnostic_subset(baseline, k=args.k)

    gateway = build_gateway(config, args.model, args.offline)
    sidecar, bert_cache, bert_model_id = open_sidecar(config)
    grid = lex_grid() if component == "LEX" else dep_grid()

    def evaluate(params, sentence_ids) -> float:
        if component == "LEX":
            trial = replace(resources, lex_params=params)
        else:
            trial = replace(resources, dep_params=params)
        setting = "LEX" if component == "LEX" else "DEP"
        spec = RunSpec(split=args.split, setting=setting, model=args.model)
        # subset stage translates only the diagnostic sentences
        target = subset_corpus(corpus, sentence_ids) if sentence_ids is not None else corpus
        records = run(
            spec, target, trial, gateway,
            sidecar=sidecar, bert_cache=bert_cache, bert_model_id=bert_model_id,
        )
        scores = [r.scores.get("bertscore_f1") for r in records]
        if any(s is None for s in scores) or not scores:
            raise CliError("grid search needs BERTScore F1 for every sentence; configure the sidecar or cache")
        return sum(scores) / len(scores)

    try:
        result = grid_search(component, grid, subset_ids, evaluate)
    finally:
        if sidecar is not None:
            sidecar.close()

    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"gridsearch_{component}.json"
    payload = {
        "component": component,
        "subset_ids": subset_ids,
        "ranked": [[params.__dict__, score] for params, score in result.ranked],
        "shortlist": [params.__dict__ for params in result.shortlist],
        "final": result.final.__dict__,
        "final_score": result.final_score,
    }
    out_path.write_text(json.dumps(payload, indent=2, default=str) + "\n", encoding="utf-8")
    save_side_state(config, gateway, bert_cache)
    print(f"best {component} configuration: {result.final} (mean F1 {result.final_score:.4f})")
    print(f"wrote {out_path}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    corpus = load_split(config, args.split)
    records = []
    paths = sorted(p for pattern in args.runs for p in glob.glob(pattern))
    if not paths:
        raise CliError(f"no record files match {args.runs}")
    for path in paths:
        records.extend(read_records(path))
    report = build_report(records, corpus)
    text = render_report(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    if args.json:
        Path(args.json).write_text(
            json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        print(f"wrote {args.json}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="udicl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="translate and score one split under one setting")
    p_run.add_argument("--split", required=True, choices=("dev", "test", "ostraca"))
    p_run.add_argument("--setting", required=True, choices=SETTING_NAMES)
    p_run.add_argument("--model", required=True)
    p_run.add_argument("--parse", default="auto", choices=("auto", "gold"))
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--offline", action="store_true", help="forbid network; cache misses fail")
    p_run.set_defaults(func=cmd_run)

    p_gs = sub.add_parser("gridsearch", help="two-stage parameter search on the diagnostic subset")
    p_gs.add_argument("--component", required=True, choices=("lex", "dep"))
    p_gs.add_argument("--config", required=True)
    p_gs.add_argument("--model", required=True, help="pilot model name")
    p_gs.add_argument("--baseline-records", required=True)
    p_gs.add_argument("--split", default="dev")
    p_gs.add_argument("--k", type=int, default=10)
    p_gs.add_argument("--offline", action="store_true")
    p_gs.set_defaults(func=cmd_gridsearch)

    p_rep = sub.add_parser("report", help="tabulate persisted run records")
    p_rep.add_argument("--runs", nargs="+", required=True, help="record file globs")
    p_rep.add_argument("--split", default="dev")
    p_rep.add_argument("--config", required=True)
    p_rep.add_argument("--out")
    p_rep.add_argument("--json")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
