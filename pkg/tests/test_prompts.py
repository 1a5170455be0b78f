import itertools
import math
from pathlib import Path

import pytest

from udicl.conllu import parse_document
from udicl.lexicon import ingest
from udicl.pipeline import Resources, build_prompt, build_sections
from udicl.prompts import (
    CON_HEADER,
    CONLL_HEADER,
    DEP_HEADER,
    SETTINGS,
    AssemblyError,
    SectionText,
    assemble,
    conllu_section,
    default_base_template,
    default_closing_template,
)

FIXTURES = Path(__file__).parent / "fixtures"
GOLDENS = FIXTURES / "goldens" / "prompts"

SECTION_HEADERS = [
    "you are given dictionary entries for Coptic",
    CONLL_HEADER,
    DEP_HEADER,
    CON_HEADER,
]


@pytest.fixture(scope="module")
def resources():
    with open(FIXTURES / "dictionary.tsv", encoding="utf-8") as f:
        index = ingest(f, "normalized-tsv")
    return Resources(lexicon_index=index)


@pytest.fixture(scope="module")
def corpus():
    return parse_document((FIXTURES / "dev_fixture.conllu").read_text(encoding="utf-8"))


def test_templates_have_single_placeholder():
    assert default_base_template().count("{source}") == 1
    assert default_closing_template().count("{source}") == 1


def test_base_template_wording():
    base = default_base_template()
    assert base.startswith("You are a professional Coptic-to-English translator")
    assert "United States (en_US)" in base


def test_closing_cue_wording():
    closing = default_closing_template()
    assert closing.startswith("Using all the information provided above")
    assert "Remember your source sentence is:" in closing
    assert closing.endswith("The English translation is:")


def test_baseline_prompt_is_base_alone():
    prompt = assemble("src-text", [], SETTINGS["baseline"])
    assert prompt.text == default_base_template().format(source="src-text")
    for header in SECTION_HEADERS:
        assert header not in prompt.text


def test_baseline_contains_source_once():
    prompt = assemble("srcXYZ", [], SETTINGS["baseline"])
    assert prompt.text.count("srcXYZ") == 1


def test_non_baseline_contains_source_twice(resources, corpus):
    for sentence in corpus.sentences:
        prompt = build_prompt(sentence, SETTINGS["ALL"], resources)
        assert prompt.text.count(sentence.source_text()) == 2


def test_all_ordering_matches_figure(resources, corpus):
    prompt = build_prompt(corpus.sentences[0], SETTINGS["ALL"], resources)
    positions = [prompt.text.find(h) for h in SECTION_HEADERS]
    assert all(p >= 0 for p in positions)
    assert positions == sorted(positions)
    assert prompt.text.index("You are a professional") < positions[0]
    assert prompt.text.rindex("Using all the information") > positions[-1]


def test_permuting_section_list_does_not_change_bytes(resources, corpus):
    sentence = corpus.sentences[0]
    sections = build_sections(sentence, SETTINGS["ALL"], resources)
    texts = set()
    for perm in itertools.permutations(sections):
        prompt = assemble(sentence.source_text(), list(perm), SETTINGS["ALL"])
        texts.add(prompt.text)
    assert len(texts) == 1


def test_empty_body_section_dropped():
    empty = SectionText(kind="CON", header=CON_HEADER, body="")
    prompt = assemble("s", [empty], SETTINGS["CON"])
    assert CON_HEADER not in prompt.text


def test_disallowed_section_raises():
    dep = SectionText(kind="DEP", header=DEP_HEADER, body="x is the root.")
    with pytest.raises(AssemblyError):
        assemble("s", [dep], SETTINGS["LEX"])


def test_duplicate_section_raises():
    dep = SectionText(kind="DEP", header=DEP_HEADER, body="x is the root.")
    with pytest.raises(AssemblyError):
        assemble("s", [dep, dep], SETTINGS["DEP"])


def test_setting_algebra():
    assert SETTINGS["baseline"].included_kinds == frozenset()
    assert SETTINGS["ALL"].included_kinds == frozenset({"LEX", "CONLL", "DEP", "CON"})
    assert SETTINGS["DEP+CON"].included_kinds == frozenset({"DEP", "CON"})
    union = (
        SETTINGS["LEX"].included_kinds
        | SETTINGS["CONLL"].included_kinds
        | SETTINGS["DEP"].included_kinds
        | SETTINGS["CON"].included_kinds
    )
    assert union == SETTINGS["ALL"].included_kinds


def test_token_estimate(resources, corpus):
    prompt = build_prompt(corpus.sentences[0], SETTINGS["ALL"], resources)
    assert prompt.token_estimate == math.ceil(len(prompt.text.encode("utf-8")) / 4)


def test_conllu_section_single_token():
    doc = parse_document("1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n\n")
    section = conllu_section(doc.sentences[0])
    assert section.header == CONLL_HEADER
    assert section.body == "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_"


def test_conllu_section_equals_serialization_minus_comments(corpus):
    from udicl.conllu import serialize_sentence

    for sentence in corpus.sentences:
        section = conllu_section(sentence)
        expected = "\n".join(
            ln for ln in serialize_sentence(sentence).split("\n") if not ln.startswith("#")
        )
        assert section.body == expected


def test_conllu_section_figure_rows_verbatim(corpus):
    section = conllu_section(corpus.sentences[0])
    assert section.body.startswith("1\tm\tn\tADP\tPREP\t_\t3\tcase\t_\t_\n")


def test_conllu_section_comments_flag(corpus):
    with_comments = conllu_section(corpus.sentences[0], include_comments=True)
    assert with_comments.body.startswith("# sent_id = dev-001\n")


def test_golden_prompts(resources, corpus):
    assert GOLDENS.is_dir(), "prompt goldens missing; regenerate with tests/gen_prompt_goldens.py"
    checked = 0
    for sentence in corpus.sentences:
        for name, setting in SETTINGS.items():
            golden = GOLDENS / f"{sentence.source_id}__{name.replace('+', '_')}.txt"
            prompt = build_prompt(sentence, setting, resources)
            assert prompt.text == golden.read_text(encoding="utf-8"), f"{golden.name} drifted"
            checked += 1
    assert checked == 35


def test_golden_baseline_has_no_headers(corpus, resources):
    for sentence in corpus.sentences:
        prompt = build_prompt(sentence, SETTINGS["baseline"], resources)
        for header in SECTION_HEADERS:
            assert header not in prompt.text


def test_consumers_leave_tokens_untouched(corpus, resources):
    # read-only invariant, checked by hashing the token tuples around a full build
    for sentence in corpus.sentences:
        before = hash(sentence.tokens)
        build_prompt(sentence, SETTINGS["ALL"], resources)
        assert hash(sentence.tokens) == before
        assert [t.id for t in sentence.tokens] == list(range(1, len(sentence.tokens) + 1))


def test_golden_all_has_all_headers(corpus, resources):
    for sentence in corpus.sentences:
        prompt = build_prompt(sentence, SETTINGS["ALL"], resources)
        for header in SECTION_HEADERS[:3]:
            assert header in prompt.text
        # CON section only present when the sentence has matches or names
        if sentence.source_id in ("dev-002", "dev-004"):
            assert CON_HEADER in prompt.text
