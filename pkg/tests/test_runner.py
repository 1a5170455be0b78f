import json
import random
import sys
from pathlib import Path

import pytest

from udicl.deps import DepParams
from udicl.gateway import Gateway, ModelConfig
from udicl.lexicon import LexParams, ingest
from udicl.metrics.bertscore import ScoreCache, SidecarClient
from udicl.pipeline import Resources
from udicl.runner import (
    RunSpec,
    TranslationRecord,
    dep_grid,
    grid_search,
    lex_grid,
    load_corpus,
    read_records,
    run,
    select_diagnostic_subset,
    write_records,
)
from udicl.runner.corpus import CorpusError

from stub_server import make_server

FIXTURES = Path(__file__).parent / "fixtures"
STUB_SIDECAR = [sys.executable, str(FIXTURES.parent / "stub_sidecar.py")]


@pytest.fixture()
def stub():
    server, state, url = make_server()
    yield state, url
    server.shutdown()
    server.server_close()


@pytest.fixture(scope="module")
def corpus():
    return load_corpus(
        "dev",
        FIXTURES / "dev_fixture.conllu",
        FIXTURES / "references.tsv",
        gold_conllu_path=FIXTURES / "dev_fixture.conllu",
    )


@pytest.fixture(scope="module")
def resources():
    with open(FIXTURES / "dictionary.tsv", encoding="utf-8") as f:
        return Resources(lexicon_index=ingest(f, "normalized-tsv"))


def make_gateway(url, **kwargs) -> Gateway:
    cfg = ModelConfig(endpoint=url, model="stub-model", retries=1, backoff=0.01, **kwargs)
    return Gateway(cfg)


# ------------------------------------------------------------------ corpus ---

def test_load_corpus(corpus):
    assert corpus.split == "dev"
    assert len(corpus.auto.sentences) == 5
    assert corpus.references["dev-003"] == "go up"
    assert corpus.bible_flag["dev-003"] is True
    assert corpus.bible_flag["dev-001"] is False


def test_missing_reference_rejected(tmp_path):
    refs = tmp_path / "refs.tsv"
    refs.write_text("sent_id\tenglish_reference\tbible_flag\ndev-001\tx\t0\n")
    with pytest.raises(CorpusError) as err:
        load_corpus("dev", FIXTURES / "dev_fixture.conllu", refs)
    assert "dev-002" in str(err.value)


def test_gold_document_selection(corpus):
    assert corpus.document("gold").parse_source == "gold"
    assert corpus.document("automatic").parse_source == "automatic"


def test_gold_missing_is_error():
    corpus = load_corpus("dev", FIXTURES / "dev_fixture.conllu", FIXTURES / "references.tsv")
    with pytest.raises(CorpusError):
        corpus.document("gold")


def test_subset_corpus(corpus):
    from udicl.runner.corpus import subset_corpus

    sub = subset_corpus(corpus, ["dev-002", "dev-004"])
    assert [s.source_id for s in sub.auto.sentences] == ["dev-002", "dev-004"]
    assert [s.source_id for s in sub.gold.sentences] == ["dev-002", "dev-004"]
    with pytest.raises(CorpusError):
        subset_corpus(corpus, ["nope"])


# --------------------------------------------------------------------- run ---

def test_baseline_run_no_component_headers(stub, corpus, resources):
    state, url = stub
    spec = RunSpec(split="dev", setting="baseline", model="stub-model")
    records = run(spec, corpus, resources, make_gateway(url))
    assert len(records) == 5
    assert [r.sentence_id for r in records] == [s.source_id for s in corpus.auto.sentences]
    assert all(r.completion == "canned translation" for r in records)
    assert all(r.status == "ok" for r in records)


def test_all_run_scores_and_keys(stub, corpus, resources):
    state, url = stub
    spec = RunSpec(split="dev", setting="ALL", model="stub-model")
    records = run(spec, corpus, resources, make_gateway(url))
    keys = {r.key() for r in records}
    assert len(keys) == 5
    for record in records:
        assert 0 <= record.scores["sentence_bleu_relaxed"] <= 100
        assert 0 <= record.scores["sentence_chrf"] <= 100
        assert record.scores["bertscore_f1"] is None


def test_run_with_sidecar_fills_f1(stub, corpus, resources):
    state, url = stub
    sidecar = SidecarClient.from_command(STUB_SIDECAR)
    try:
        spec = RunSpec(split="dev", setting="baseline", model="stub-model")
        records = run(spec, corpus, resources, make_gateway(url), sidecar=sidecar)
    finally:
        sidecar.close()
    assert all(isinstance(r.scores["bertscore_f1"], float) for r in records)


def test_run_with_prefilled_cache_no_sidecar(stub, corpus, resources):
    state, url = stub
    sidecar = SidecarClient.from_command(STUB_SIDECAR)
    cache = ScoreCache()
    try:
        spec = RunSpec(split="dev", setting="baseline", model="stub-model")
        first = run(spec, corpus, resources, make_gateway(url), sidecar=sidecar, bert_cache=cache)
        model_id = sidecar.model_id
    finally:
        sidecar.close()
    second = run(
        RunSpec(split="dev", setting="baseline", model="stub-model"),
        corpus, resources, make_gateway(url), bert_cache=cache, bert_model_id=model_id,
    )
    assert [r.scores["bertscore_f1"] for r in second] == [r.scores["bertscore_f1"] for r in first]


def test_empty_completion_warning(stub, corpus, resources):
    state, url = stub
    state.behavior = "empty"
    spec = RunSpec(split="dev", setting="baseline", model="stub-model")
    records = run(spec, corpus, resources, make_gateway(url))
    assert all("empty_completion" in r.warnings for r in records)
    assert all(r.scores["sentence_bleu_relaxed"] == 0.0 for r in records)


def test_context_budget_warning(stub, corpus, resources):
    _, url = stub
    spec = RunSpec(split="dev", setting="ALL", model="stub-model", context_budget=10)
    records = run(spec, corpus, resources, make_gateway(url))
    assert all("context_budget_exceeded" in r.warnings for r in records)


def test_records_roundtrip(stub, corpus, resources, tmp_path):
    _, url = stub
    spec = RunSpec(split="dev", setting="DEP+CON", model="stub-model")
    records = run(spec, corpus, resources, make_gateway(url))
    path = tmp_path / "records.jsonl"
    write_records(records, path, manifest={"config_hash": "abc"})
    loaded = read_records(path)
    assert loaded == records
    manifest = json.loads((tmp_path / "records.jsonl.manifest.json").read_text())
    assert manifest["config_hash"] == "abc"
    assert "records_sha256" in manifest


def test_replay_from_cache_byte_identical(stub, corpus, resources, tmp_path):
    state, url = stub
    spec = RunSpec(split="dev", setting="ALL", model="stub-model")
    gw1 = make_gateway(url)
    records1 = run(spec, corpus, resources, gw1)
    cache_path = tmp_path / "cache.jsonl"
    gw1.cache_export(str(cache_path))
    requests_before = state.requests

    gw2 = Gateway(ModelConfig(endpoint=url, model="stub-model"), offline=True)
    gw2.cache_import(str(cache_path))
    records2 = run(spec, corpus, resources, gw2)
    assert state.requests == requests_before  # warm replay: zero network calls

    p1, p2 = tmp_path / "r1.jsonl", tmp_path / "r2.jsonl"
    write_records(records1, p1)
    write_records(records2, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_unknown_setting_rejected():
    with pytest.raises(ValueError):
        RunSpec(split="dev", setting="LEX+CONLL", model="m")


# -------------------------------------------------------------- grid search ---

def test_dep_grid_has_exactly_12_points():
    grid = dep_grid()
    assert len(grid) == 12
    assert len(set(grid)) == 12
    assert all(isinstance(p, DepParams) for p in grid)


def test_lex_grid_nonempty():
    grid = lex_grid()
    assert len(grid) == 18
    assert all(isinstance(p, LexParams) for p in grid)


def _records_with_f1(values: dict[str, float]) -> list[TranslationRecord]:
    return [
        TranslationRecord(
            sentence_id=sid, setting="baseline", model="pilot", parse_source="automatic",
            prompt_hash="", completion="", status="ok", scores={"bertscore_f1": f1},
        )
        for sid, f1 in values.items()
    ]


def test_diagnostic_subset_boundary_selects_all():
    records = _records_with_f1({f"s{i:02d}": i / 100 for i in range(20)})
    subset = select_diagnostic_subset(records, k=10)
    assert len(subset) == 20
    assert set(subset) == {f"s{i:02d}" for i in range(20)}


def test_diagnostic_subset_strictly_increasing_scores():
    records = _records_with_f1({f"s{i:02d}": i / 100 for i in range(30)})
    subset = select_diagnostic_subset(records, k=10)
    assert subset[:10] == [f"s{i:02d}" for i in range(29, 19, -1)]   # ten easiest, best first
    assert subset[10:] == [f"s{i:02d}" for i in range(10)]          # ten hardest, worst first


def test_diagnostic_subset_tie_breaks_by_id():
    records = _records_with_f1({"b": 0.5, "a": 0.5, "d": 0.5, "c": 0.5})
    subset = select_diagnostic_subset(records, k=2)
    assert subset == ["a", "b", "a", "b"]  # ties: ascending ids in both blocks


def test_diagnostic_subset_too_small_errors():
    records = _records_with_f1({f"s{i}": i / 10 for i in range(5)})
    with pytest.raises(ValueError):
        select_diagnostic_subset(records, k=10)


def test_diagnostic_subset_matches_bruteforce_on_random_scores():
    rng = random.Random(77)
    for _ in range(30):
        values = {f"s{i:03d}": rng.random() for i in range(25)}
        records = _records_with_f1(values)
        subset = select_diagnostic_subset(records, k=10)
        ordered = sorted(values.items(), key=lambda kv: (-kv[1], kv[0]))
        expected_easy = [sid for sid, _ in ordered[:10]]
        ordered_hard = sorted(values.items(), key=lambda kv: (kv[1], kv[0]))
        expected_hard = [sid for sid, _ in ordered_hard[:10]]
        assert subset == expected_easy + expected_hard


def test_grid_search_singleton():
    result = grid_search("DEP", [DepParams()], ["a", "b"], lambda cfg, ids: 0.5)
    assert result.final == DepParams()
    assert result.final_score == 0.5


def test_grid_search_ranks_and_shortlists():
    grid = dep_grid()
    scores = {id(cfg): i / 100 for i, cfg in enumerate(grid)}

    def evaluate(cfg, ids):
        base = scores[id(cfg)]
        # the full-split pass flips the ordering inside the shortlist
        return base if ids is not None else 1.0 - base

    result = grid_search("DEP", grid, ["x"] * 20, evaluate)
    ranked_scores = [score for _, score in result.ranked]
    assert ranked_scores == sorted(ranked_scores, reverse=True)
    assert len(result.shortlist) == 4
    subset_best = result.ranked[0][0]
    assert result.final != subset_best  # full-split evaluation overrode the subset ranking
    assert result.final in result.shortlist


def test_grid_search_empty_grid_errors():
    with pytest.raises(ValueError):
        grid_search("DEP", [], ["a"], lambda cfg, ids: 0.0)


def test_grid_search_stub_oracle_ordering():
    grid = list(range(10))
    calls = []

    def evaluate(cfg, ids):
        calls.append((cfg, tuple(ids) if ids else None))
        return [0.3, 0.9, 0.1, 0.8, 0.85, 0.2, 0.7, 0.6, 0.5, 0.4][cfg] if ids else cfg / 10

    result = grid_search("LEX", grid, ["s1", "s2"], evaluate)
    ranked_configs = [cfg for cfg, _ in result.ranked]
    assert ranked_configs[:4] == [1, 4, 3, 6]
    assert result.shortlist == [1, 4, 3, 6]
    assert result.final == 6  # highest full-split score among the shortlist
