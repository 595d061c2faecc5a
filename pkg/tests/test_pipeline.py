import json
import logging

import pytest

from loire.grammar import parse_fact, rule_id
from loire.llm.client import CallableClient, ClientError, ReplayClient
from loire.llm.pipeline import (
    STAGES,
    PipelineConfig,
    PipelineReport,
    all_object_pairs,
    estimate_verbal_fact_count,
    generate_premises,
    parse_verdict,
    prepare_conclusions,
    run_pipeline,
    self_critic_filter,
)
from loire.prompts import MULTI_FACT_LINE
from loire.store import MemoryStore, RuleStore
from loire.validator import run_checks

CANDRIVE_REPLY = (
    "1. CanDrive(Person X, Vehicle Y):- Have(Person X, Age Z1), RequireMinimumAge(Vehicle Y, Age Z2), "
    "BiggerThan(Age Z1, Age Z2);\n"
    "If Person X has Age Z1 and the minimum age requirement for driving Vehicle Y is Age Z2, "
    "Age Z1 is bigger than Age Z2, then Person X can drive Vehicle Y.\n"
    "2. CanDrive(Person X, Vehicle Y):- Obtain(Person X, Authorization Z), "
    "RequiredForDriving(Authorization Z, Vehicle Y);\n"
    "If Person X have obtained a specific Authorization Z and Authorization Z is required for "
    "driving Vehicle Y, then Person X can drive Vehicle Y."
)


def const(text, logit_bias=True):
    return CallableClient(lambda r: text, supports_logit_bias=logit_bias)


# ------------------------------------------------------------------ Step 1

def test_prepare_conclusions_demo_line():
    client = const("CanBeAdaptedFrom(Show X, Artwork Y)")
    facts = prepare_conclusions(("Show", "Artwork"), "affordance", client)
    assert [str(f) for f in facts] == [
        "CanBeAdaptedFrom(Show X, Artwork Y)",
        "CanNotBeAdaptedFrom(Show X, Artwork Y)",
    ]
    prompt = client.requests[0].prompt
    assert "to describe the object affordance." in prompt
    assert prompt.endswith("Object: Show, Artwork\nPredicate:")


def test_prepare_conclusions_unparseable(caplog):
    with caplog.at_level(logging.WARNING):
        facts = prepare_conclusions(("Person", "Food"), "affordance",
                                    const("Here are some ideas about people and food."))
    assert facts == []
    assert "no parseable conclusions" in caplog.text


def test_prepare_conclusions_location_not_negated():
    reply = "1. LocatedIn(Person X, Food Y)\n2. BoughtIn(Food X, Region Z)"
    facts = prepare_conclusions(("Person", "Food"), "location", const(reply))
    assert [str(f) for f in facts] == ["LocatedIn(Person X, Food Y)"]


def test_prepare_conclusions_identical_pair_and_bad_object():
    facts = prepare_conclusions(("Person", "Person"), "interaction",
                                const("CanTeach(Person X, Person Y)"))
    assert len(facts) == 2
    with pytest.raises(ValueError):
        prepare_conclusions(("Laptop", "Person"), "affordance", const(""))


# ------------------------------------------------------------------ Step 2

def test_generate_premises_demo_reply():
    client = CallableClient(lambda r: CANDRIVE_REPLY if MULTI_FACT_LINE in r.prompt else "")
    rules = generate_premises(parse_fact("CanDrive(Person X, Vehicle Y)"), "affordance", client)
    assert len(client.requests) == 2  # single-fact and multi-fact prompts
    assert [r.premise[0].predicate for r in rules] == ["Have", "Obtain"]
    assert rules[1].verbalization.startswith("If Person X have obtained a specific Authorization Z")
    assert all(r.provenance == "generated" and r.domain == "affordance" for r in rules)
    assert all("fact_count_mismatch" not in r.flags for r in rules)
    bias = client.requests[0].logit_bias
    assert bias["Person"] == 5.0 and bias["Phenomenon"] == 5.0 and bias["BoilingPoint"] == 5.0


def test_generate_premises_without_logit_bias(caplog):
    client = const("", logit_bias=False)
    with caplog.at_level(logging.INFO):
        rules = generate_premises(parse_fact("CanDrive(Person X, Vehicle Y)"), "affordance", client)
    assert rules == []
    assert all(r.logit_bias is None for r in client.requests)
    assert "logit bias" in caplog.text


def test_generate_premises_flags_fact_count_mismatch():
    reply = (
        "1. CanEat(Person X, Food Y):- Has(Person X, Money Z1), PriceOf(Food Y, Price Z2), "
        "BiggerThan(Money Z1, Price Z2);\n"
        "If Person X can pay for Food Y, then Person X can eat Food Y."
    )
    rules = generate_premises(parse_fact("CanEat(Person X, Food Y)"), "affordance", const(reply),
                              kinds=("multi",))
    assert len(rules) == 1
    assert "fact_count_mismatch" in rules[0].flags


def test_generate_premises_same_line_and_skips():
    reply = (
        "Rules:\n"
        "1. CanEat(Person X, Food Y):- Bought(Person X, Food Y); If Person X bought Food Y, then "
        "Person X can eat Food Y.\n"
        "2. CanEat(Person X, Food Y):- Bought(Person X Food Y);\n"
        "3. CanCook(Person X, Food Y):- Bought(Person X, Food Y);\n"
    )
    rules = generate_premises(parse_fact("CanEat(Person X, Food Y)"), "affordance", const(reply),
                              kinds=("single",))
    assert len(rules) == 1
    assert rules[0].verbalization == "If Person X bought Food Y, then Person X can eat Food Y."


def test_generate_premises_requires_xy():
    with pytest.raises(ValueError):
        generate_premises(parse_fact("Has(Person X, Tool Z)"), "affordance", const(""))


@pytest.mark.parametrize(
    "text, n",
    [
        ("If Person X can use Tool Z which is used for cooking Food Y, then Person X can cook Food Y.", 2),
        ("If Person X has a Height Z1, and Event Y requires a Height above Z2, and Height Z1 is "
         "smaller than Height Z2.", 3),
        ("If Person X learned Skill Y, then Person X has Skill Y.", 1),
    ],
)
def test_estimate_verbal_fact_count(text, n):
    assert estimate_verbal_fact_count(text) == n


# ------------------------------------------------------------------ Step 3

ALLERGY_RULE_TEXT = (
    "CanNotEat(Person X, Food Y):- AllergicTo(Person X, Substance Z), Contains(Food Y, Substance Z)."
)


def _allergy_rule():
    from loire.grammar import parse_rule

    return parse_rule(ALLERGY_RULE_TEXT, domain="affordance")


def test_critic_true():
    client = const("True. Because Person X has achieved the required condition.")
    verdict, explanation = self_critic_filter(_allergy_rule(), "affordance", client)
    assert verdict is True
    assert explanation == "Person X has achieved the required condition."
    assert client.requests[0].temperature == 0.0
    assert client.requests[0].prompt.endswith(
        "Input: If Person X is allergic to Substance Z and Food Y contains Substance Z, "
        "then Person X cannot eat Food Y.\nOutput:"
    )


def test_critic_false_and_unparseable():
    verdict, explanation = self_critic_filter(
        _allergy_rule(), "affordance", const("False. Because a person's birth season is irrelevant."))
    assert verdict is False and explanation.startswith("a person's birth season")
    assert self_critic_filter(_allergy_rule(), "affordance", const("Maybe.")) == (False, "critic_unparseable")


def test_parse_verdict_variants():
    assert parse_verdict("Output: true - fine")[0] is True
    assert parse_verdict("FALSE")[0] is False
    assert parse_verdict("Truely not")[0] is None


# ---------------------------------------------------------------- pipeline

def _fixture_config(fixtures_dir, **overrides):
    data = json.loads((fixtures_dir / "generate" / "config.json").read_text())
    data.pop("fixtures")
    data.update(overrides)
    return PipelineConfig.from_dict(data)


def _replay(fixtures_dir):
    return ReplayClient(fixtures_dir / "generate")


def test_fixture_run_hand_counted(fixtures_dir):
    store = MemoryStore()
    report = run_pipeline(_fixture_config(fixtures_dir), _replay(fixtures_dir), store)
    # Hand count over the fixture replies (see tests/fixtures/generate/responses.jsonl):
    # Person/Food yields 13 candidates, Person/Drug yields 3.
    assert report.counts == {
        "generated": 16,
        "grammar_rejected": 1,   # Likes(Person X, Food Z) never mentions Y
        "primitive_rejected": 1,  # Recipe is not an abstract type
        "trivial_rejected": 1,   # CanNotEat :- CanNotAccess
        "critic_rejected": 2,    # "Maybe." and the birth-period rule
        "dedup_rejected": 1,     # second Has/PriceOf/BiggerThan variant
        "kept": 10,
    }
    assert report.per_domain == {"affordance": report.counts}
    assert report.balanced()
    assert report.completed_cells == 2 and report.incomplete_cells == []
    records = store.records()
    assert len(records) == 10
    provenances = [r.provenance for r in records]
    assert provenances.count("diversified_forward") == 2
    assert provenances.count("diversified_backward") == 2
    ids = {r.id for r in records}
    for rec in records:
        rule = rec.to_rule()
        assert all(rep.passed for rep in run_checks(rule))
        if rec.provenance.startswith("diversified"):
            assert rec.parent_ids[0] in ids


def test_empty_pair_list():
    report = run_pipeline(PipelineConfig(pairs=[]), const(""), MemoryStore())
    assert report.counts == {s: 0 for s in STAGES}
    assert report.balanced() and report.completed_cells == 0


def test_default_cells():
    assert len(all_object_pairs()) == 528
    assert len(PipelineConfig().cells()) == 528 * 5


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        PipelineConfig.from_dict({"temperature": 1})
    with pytest.raises(ValueError):
        PipelineConfig(domains=["weather"])


def test_client_exhaustion_aborts_only_that_cell(fixtures_dir):
    replay = _replay(fixtures_dir)

    def fn(request):
        if "Object: Person, Drug" in request.prompt:
            raise ClientError("quota exhausted")
        return replay.complete(request)

    store = MemoryStore()
    report = run_pipeline(_fixture_config(fixtures_dir), CallableClient(fn), store)
    assert report.incomplete_cells == ["Person|Drug|affordance"]
    assert report.completed_cells == 1
    assert report.counts["generated"] == 13 and report.balanced()
    assert len(store.records()) == 7


class Interrupt(BaseException):
    pass


def test_resume_after_interrupt_matches_uninterrupted(fixtures_dir, tmp_path):
    full = tmp_path / "full.jsonl"
    run_pipeline(_fixture_config(fixtures_dir), _replay(fixtures_dir), RuleStore(full))

    replay = _replay(fixtures_dir)

    def crashing(request):
        if "Object: Person, Drug" in request.prompt:
            raise Interrupt()
        return replay.complete(request)

    out = tmp_path / "resumed.jsonl"
    ckpt = tmp_path / "ckpt.json"
    config = _fixture_config(fixtures_dir, checkpoint=str(ckpt))
    with pytest.raises(Interrupt):
        run_pipeline(config, CallableClient(crashing), RuleStore(out))
    assert list(json.loads(ckpt.read_text())["completed"]) == ["Person|Food|affordance"]

    report = run_pipeline(config, _replay(fixtures_dir), RuleStore(out))
    assert out.read_bytes() == full.read_bytes()
    assert report.counts["generated"] == 16 and report.balanced()


def test_concurrent_cells_commit_in_order(fixtures_dir, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run_pipeline(_fixture_config(fixtures_dir), _replay(fixtures_dir), RuleStore(a))
    run_pipeline(_fixture_config(fixtures_dir, concurrency=4), _replay(fixtures_dir), RuleStore(b))
    assert a.read_bytes() == b.read_bytes()


def test_existing_store_seeds_repetition_filter(fixtures_dir):
    store = MemoryStore()
    run_pipeline(_fixture_config(fixtures_dir), _replay(fixtures_dir), store)
    again = run_pipeline(_fixture_config(fixtures_dir), _replay(fixtures_dir), store)
    assert again.counts["kept"] == 0
    assert again.counts["dedup_rejected"] == 11
    assert len(store.records()) == 10


def test_report_balance_detects_drift():
    report = PipelineReport()
    report.add("need", "generated", 2)
    report.add("need", "kept", 1)
    assert not report.balanced()
    report.add("need", "critic_rejected", 1)
    assert report.balanced()
