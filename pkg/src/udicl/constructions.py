"""Tree-pattern rules, matching, instruction templates and name transliteration.

A rule declares nodes (attribute tests), edges (parent/precedence relations
between them) and an English template instantiated for every match.  Proper
nouns additionally yield transliteration instructions.
"""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from udicl.conllu import Sentence, Token
from udicl.prompts import CON, CON_HEADER, SectionText

NODE_ATTRIBUTES = ("form", "lemma", "upos", "xpos", "deprel")

PARENT_OF = "parent_of"
PRECEDES = "precedes"
IMMEDIATELY_PRECEDES = "immediately_precedes"

_NODE_RE = re.compile(r"^#(\d+)(?::(.+))?$")
_EDGE_LABELED_RE = re.compile(r"^#(\d+)>([^>\s<]+)>#(\d+)$")
_EDGE_PLAIN_RE = re.compile(r"^#(\d+)>#(\d+)$")
_EDGE_PRECEDES_RE = re.compile(r"^#(\d+)<<#(\d+)$")
_EDGE_IMMEDIATE_RE = re.compile(r"^#(\d+)<#(\d+)$")
_PLACEHOLDER_RE = re.compile(r"\{\{#(\d+)\.([A-Za-z:]+)\}\}")
_META_RE = re.compile(r"^#:\s*(.*)$")
_COMMENT_RE = re.compile(r"^\s*#(?!\d)")


class RuleSyntaxError(ValueError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


@dataclass(frozen=True)
class NodeTest:
    attribute: str          # form, lemma, upos, xpos, deprel or feat:<Name>
    pattern: str
    is_regex: bool

    def matches(self, token: Token) -> bool:
        value = token.attribute(self.attribute)
        if self.is_regex:
            return re.fullmatch(self.pattern, value) is not None
        return value == self.pattern


@dataclass(frozen=True)
class NodeConstraint:
    node_ref: int
    tests: tuple[NodeTest, ...]

    def matches(self, token: Token) -> bool:
        return all(t.matches(token) for t in self.tests)


@dataclass(frozen=True)
class EdgeConstraint:
    kind: str               # parent_of | precedes | immediately_precedes
    from_ref: int
    to_ref: int
    label: str = ""         # deprel for labeled parent_of, else empty

    def holds(self, sentence: Sentence, from_id: int, to_id: int) -> bool:
        if self.kind == PARENT_OF:
            child = sentence.token_by_id(to_id)
            if child.head != from_id:
                return False
            return not self.label or child.deprel == self.label
        if self.kind == PRECEDES:
            return from_id < to_id
        if self.kind == IMMEDIATELY_PRECEDES:
            return to_id == from_id + 1
        raise ValueError(f"unknown edge kind {self.kind!r}")


@dataclass(frozen=True)
class Rule:
    rule_id: str
    nodes: tuple[NodeConstraint, ...]
    edges: tuple[EdgeConstraint, ...]
    template: str
    priority: int = 0

    def node_refs(self) -> tuple[int, ...]:
        return tuple(sorted(n.node_ref for n in self.nodes))


@dataclass(frozen=True)
class Match:
    rule_id: str
    bindings: tuple[tuple[int, int], ...]  # (node_ref, token id), refs ascending

    def token_id(self, ref: int) -> int:
        for node_ref, tid in self.bindings:
            if node_ref == ref:
                return tid
        raise KeyError(ref)


RuleSet = tuple[Rule, ...]


def _validate_attribute(attr: str, line_no: int) -> None:
    if attr in NODE_ATTRIBUTES or (attr.startswith("feat:") and len(attr) > 5):
        return
    raise RuleSyntaxError(line_no, f"unknown attribute {attr!r}")


def _parse_node(decl: str, line_no: int) -> NodeConstraint:
    m = _NODE_RE.match(decl)
    if not m:
        raise RuleSyntaxError(line_no, f"bad node declaration {decl!r}")
    ref = int(m.group(1))
    tests: list[NodeTest] = []
    if m.group(2):
        for piece in m.group(2).split("&"):
            if "=" not in piece:
                raise RuleSyntaxError(line_no, f"bad node test {piece!r} (expected attr=value)")
            attr, value = piece.split("=", 1)
            _validate_attribute(attr, line_no)
            if len(value) >= 2 and value.startswith("/") and value.endswith("/"):
                pattern = value[1:-1]
                try:
                    re.compile(pattern)
                except re.error as exc:
                    raise RuleSyntaxError(line_no, f"bad regular expression {pattern!r}: {exc}")
                tests.append(NodeTest(attr, pattern, True))
            else:
                tests.append(NodeTest(attr, value, False))
    return NodeConstraint(node_ref=ref, tests=tuple(tests))


def _parse_edge(decl: str, line_no: int, declared: set[int]) -> EdgeConstraint:
    for regex, kind, label_group in (
        (_EDGE_LABELED_RE, PARENT_OF, 2),
        (_EDGE_PLAIN_RE, PARENT_OF, None),
        (_EDGE_PRECEDES_RE, PRECEDES, None),
        (_EDGE_IMMEDIATE_RE, IMMEDIATELY_PRECEDES, None),
    ):
        m = regex.match(decl)
        if not m:
            continue
        if label_group is not None:
            from_ref, to_ref = int(m.group(1)), int(m.group(3))
            label = m.group(2)
        else:
            from_ref, to_ref = int(m.group(1)), int(m.group(2))
            label = ""
        for ref in (from_ref, to_ref):
            if ref not in declared:
                raise RuleSyntaxError(line_no, f"edge references undeclared node #{ref}")
        return EdgeConstraint(kind=kind, from_ref=from_ref, to_ref=to_ref, label=label)
    raise RuleSyntaxError(line_no, f"bad edge declaration {decl!r}")


def _validate_template(template: str, line_no: int, declared: set[int]) -> None:
    if not template:
        raise RuleSyntaxError(line_no, "missing template section")
    for m in _PLACEHOLDER_RE.finditer(template):
        ref = int(m.group(1))
        if ref not in declared:
            raise RuleSyntaxError(line_no, f"template references undeclared node #{ref}")
        _validate_attribute(m.group(2), line_no)


def parse_rules(text: str) -> RuleSet:
    """Parse a rule file: one rule per line (backslash continuations allowed).

    Line shape: node declarations ; edge declarations ; template.  A comment
    of the form "#: id=NAME priority=N" names and orders the next rule.
    """
    rules: list[Rule] = []
    pending_id: str | None = None
    pending_priority: int | None = None

    lines = text.split("\n")
    i = 0
    while i < len(lines):
        line_no = i + 1
        line = lines[i]
        while line.rstrip().endswith("\\") and i + 1 < len(lines):
            i += 1
            line = line.rstrip()[:-1].rstrip() + " " + lines[i].strip()
        i += 1
        stripped = line.strip()
        if not stripped:
            continue
        meta = _META_RE.match(stripped)
        if meta:
            for piece in meta.group(1).split():
                if piece.startswith("id="):
                    pending_id = piece[3:]
                elif piece.startswith("priority="):
                    try:
                        pending_priority = int(piece[9:])
                    except ValueError:
                        raise RuleSyntaxError(line_no, f"bad priority {piece!r}")
            continue
        if _COMMENT_RE.match(stripped):
            continue

        sections = stripped.split(";", 2)
        if len(sections) != 3:
            raise RuleSyntaxError(line_no, "expected three sections: nodes ; edges ; template")
        node_decls = sections[0].split()
        if not node_decls:
            raise RuleSyntaxError(line_no, "rule declares no nodes")
        nodes = tuple(_parse_node(d, line_no) for d in node_decls)
        declared = {n.node_ref for n in nodes}
        if len(declared) != len(nodes):
            raise RuleSyntaxError(line_no, "duplicate node reference")
        edges = tuple(_parse_edge(d, line_no, declared) for d in sections[1].split())
        template = sections[2].strip()
        _validate_template(template, line_no, declared)

        rules.append(
            Rule(
                rule_id=pending_id or f"rule_{len(rules) + 1}",
                nodes=nodes,
                edges=edges,
                template=template,
                priority=pending_priority if pending_priority is not None else 0,
            )
        )
        pending_id = None
        pending_priority = None
    return tuple(rules)


def pretty_print(rules: RuleSet) -> str:
    """Render rules back to file syntax; parse(pretty_print(parse(x))) == parse(x)."""
    out: list[str] = []
    for rule in rules:
        out.append(f"#: id={rule.rule_id} priority={rule.priority}")
        nodes = []
        for node in rule.nodes:
            if node.tests:
                tests = "&".join(
                    f"{t.attribute}=/{t.pattern}/" if t.is_regex else f"{t.attribute}={t.pattern}"
                    for t in node.tests
                )
                nodes.append(f"#{node.node_ref}:{tests}")
            else:
                nodes.append(f"#{node.node_ref}")
        edges = []
        for edge in rule.edges:
            if edge.kind == PARENT_OF and edge.label:
                edges.append(f"#{edge.from_ref}>{edge.label}>#{edge.to_ref}")
            elif edge.kind == PARENT_OF:
                edges.append(f"#{edge.from_ref}>#{edge.to_ref}")
            elif edge.kind == PRECEDES:
                edges.append(f"#{edge.from_ref}<<#{edge.to_ref}")
            else:
                edges.append(f"#{edge.from_ref}<#{edge.to_ref}")
        out.append(f"{' '.join(nodes)} ; {' '.join(edges)} ; {rule.template}")
    return "\n".join(out) + ("\n" if out else "")


def load_starter_rules() -> RuleSet:
    text = resources.files("udicl.data").joinpath("starter.rules").read_text(encoding="utf-8")
    return parse_rules(text)


def load_rules(path: str | Path) -> RuleSet:
    return parse_rules(Path(path).read_text(encoding="utf-8"))


def match_rule(rule: Rule, sentence: Sentence) -> list[Match]:
    """All injective node-to-token assignments satisfying the rule.

    Matches come out in lexicographic order of the bound token ids, node
    references taken in ascending order.
    """
    refs = rule.node_refs()
    by_ref = {n.node_ref: n for n in rule.nodes}
    candidates = {
        ref: [t.id for t in sentence.tokens if by_ref[ref].matches(t)] for ref in refs
    }
    matches: list[Match] = []

    def edges_hold(partial: dict[int, int]) -> bool:
        for edge in rule.edges:
            if edge.from_ref in partial and edge.to_ref in partial:
                if not edge.holds(sentence, partial[edge.from_ref], partial[edge.to_ref]):
                    return False
        return True

    def extend(idx: int, partial: dict[int, int], used: set[int]) -> None:
        if idx == len(refs):
            matches.append(Match(rule.rule_id, tuple((r, partial[r]) for r in refs)))
            return
        ref = refs[idx]
        for tid in candidates[ref]:
            if tid in used:
                continue
            partial[ref] = tid
            if edges_hold(partial):
                used.add(tid)
                extend(idx + 1, partial, used)
                used.remove(tid)
            del partial[ref]

    extend(0, {}, set())
    return matches


def instantiate_template(
    rule: Rule, match: Match, sentence: Sentence, warnings: list[str] | None = None
) -> str:
    """Fill the rule's template from the match; empty attributes fall back to the form."""

    def substitute(m: re.Match) -> str:
        ref = int(m.group(1))
        attr = m.group(2)
        token = sentence.token_by_id(match.token_id(ref))
        value = token.attribute(attr)
        if value == "":
            if warnings is not None:
                warnings.append(
                    f"rule {rule.rule_id}: empty attribute {attr!r} on token {token.id}; used form"
                )
            return token.form
        return value

    return _PLACEHOLDER_RE.sub(substitute, rule.template)


class TransliterationTable:
    """Greedy longest-match character mapping; input is casefolded first."""

    def __init__(self, mapping: dict[str, str]):
        self.mapping = dict(mapping)
        self.max_key_len = max((len(k) for k in mapping), default=1)

    def transliterate(self, text: str, warnings: list[str] | None = None) -> str:
        folded = text.casefold()
        out: list[str] = []
        i = 0
        while i < len(folded):
            for width in range(min(self.max_key_len, len(folded) - i), 0, -1):
                chunk = folded[i : i + width]
                if chunk in self.mapping:
                    out.append(self.mapping[chunk])
                    i += width
                    break
            else:
                if warnings is not None and not folded[i].isascii():
                    warnings.append(f"no transliteration for {folded[i]!r}; passed through")
                out.append(folded[i])
                i += 1
        return "".join(out)


def load_translit_table(path: str | Path | None = None) -> TransliterationTable:
    if path is None:
        text = resources.files("udicl.data").joinpath("coptic_translit.tsv").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(text.splitlines(), delimiter="\t", quoting=csv.QUOTE_NONE)
    header = next(reader)
    if header[:2] != ["sequence", "latin"]:
        raise ValueError("transliteration table must have columns: sequence, latin")
    mapping = {}
    for cols in reader:
        if not cols:
            continue
        mapping[cols[0]] = cols[1] if len(cols) > 1 else ""
    return TransliterationTable(mapping)


def transliterate_propn(
    sentence: Sentence, table: TransliterationTable, warnings: list[str] | None = None
) -> list[str]:
    """One instruction line per proper-noun token, with its Latin rendering."""
    lines = []
    for tok in sentence.tokens:
        if tok.upos != "PROPN":
            continue
        latin = table.transliterate(tok.form, warnings)
        lines.append(f"The word {tok.form} is a proper name, transliterated into Latin characters as '{latin}'.")
    return lines


def verbalize_constructions(
    sentence: Sentence,
    ruleset: RuleSet,
    table: TransliterationTable,
    warnings: list[str] | None = None,
) -> SectionText:
    """Instantiated construction instructions plus transliteration lines.

    Instructions are ordered by (rule priority, rule file order, match order);
    an empty body means the prompt assembler drops the whole section.
    """
    keyed: list[tuple[int, int, int, str]] = []
    for file_order, rule in enumerate(ruleset):
        for match_order, match in enumerate(match_rule(rule, sentence)):
            text = instantiate_template(rule, match, sentence, warnings)
            keyed.append((rule.priority, file_order, match_order, text))
    keyed.sort(key=lambda item: item[:3])
    pieces = [text for _, _, _, text in keyed]
    pieces.extend(transliterate_propn(sentence, table, warnings))
    return SectionText(kind=CON, header=CON_HEADER, body=" ".join(pieces))
