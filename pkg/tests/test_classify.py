import math
import random
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from oracles import ap_oracle, map_oracle, score_oracle, voting_oracle
from wikivote.classify import (
    CategoryWithNoRecords,
    EmptyCorpus,
    EWikiCBag,
    ModelFormatError,
    NoEvidence,
    NoGoldLabels,
    Prediction,
    UnknownCategory,
    bag_of_record,
    evaluate_map,
    expand_ewikic,
    format_model,
    parse_model,
    predict,
    score,
    train,
)
from wikivote.extract import Concept
from wikivote.kb import Sense


def concept(surface, *wikics):
    return Concept(surface, Sense(surface.title(), frozenset(wikics)))


@pytest.mark.parametrize(
    "wikic, expected",
    [
        ("Capitals in Asia", ["capitals in asia", "capitals", "asia"]),
        ("Births", ["births"]),
        ("Geography of Iceland", ["geography of iceland", "geography", "iceland"]),
        ("The Beatles and the Stones", ["the beatles and the stones", "beatles", "stones"]),
        ("Songs  songs", ["songs songs", "songs"]),
    ],
)
def test_expand(wikic, expected):
    assert expand_ewikic(wikic) == expected


def test_bag_single_and_multiplicity():
    assert bag_of_record([concept("tokyo", "Capitals in Asia")]) == {
        "capitals in asia": 1, "capitals": 1, "asia": 1,
    }
    bag = bag_of_record([concept("a", "Cities in Japan"), concept("b", "Cities in Japan")])
    assert bag == {"cities in japan": 2, "cities": 2, "japan": 2}
    assert bag_of_record([]) == {}
    assert bag.total == 6


@pytest.mark.filterwarnings("ignore::wikivote.classify.CategoryWithNoRecords")
def test_proximity_single_record():
    model = train([("c1", {"w1": 2, "w2": 1})], ["c1", "c2"])
    assert model.proximity("w1", 0) == pytest.approx(2 / 3, abs=1e-15)
    assert model.proximity("w2", 0) == pytest.approx(1 / 3, abs=1e-15)
    assert model.proximity("w1", 1) == 0.0


def test_worked_two_category_token():
    # proximity (3, 1) from three c1 records and one c2 record holding only t
    examples = [("c1", {"t": 1})] * 3 + [("c2", {"t": 1})]
    model = train(examples, ["c1", "c2"], alpha=0.01)
    oracle = voting_oracle(examples, ["c1", "c2"], 0.01)["t"]
    # values frozen from the brute-force oracle
    assert oracle[1] == pytest.approx([0.7487562189054726, 0.2512437810945274], abs=1e-12)
    assert oracle[2] == pytest.approx(0.813243525849074, abs=1e-12)
    assert oracle[3] == pytest.approx([0.922232979619427, 0.30741099320647564], abs=1e-12)
    st_ = model.stats["t"]
    assert st_.proximity == (3.0, 1.0)
    assert st_.normalized == pytest.approx(oracle[1], abs=1e-12)
    assert st_.entropy == pytest.approx(oracle[2], abs=1e-12)
    assert st_.votes == pytest.approx(oracle[3], abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 15])
def test_uniform_token(n):
    cats = [f"c{i}" for i in range(n)]
    model = train([(c, {"u": 1}) for c in cats], cats)
    assert model.entropy("u") == pytest.approx(math.log2(n), abs=1e-12)
    assert model.votes("u") == pytest.approx([1 / (math.log2(n) * n)] * n, abs=1e-12)


def test_train_errors_and_warnings():
    with pytest.raises(EmptyCorpus):
        train([], ["a", "b"])
    with pytest.raises(UnknownCategory):
        train([("z", {"t": 1})], ["a", "b"])
    with pytest.raises(ValueError):
        train([("a", {"t": 1})], ["a"])
    with pytest.warns(CategoryWithNoRecords):
        model = train([("a", {"t": 1})], ["a", "b"])
    assert model.proximity("t", 1) == 0.0


def test_empty_bag_record_contributes_nothing():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        model = train([("a", {}), ("a", {"t": 1})], ["a", "b"])
    assert model.proximity("t", 0) == 1.0


def test_score_examples():
    model = train([("a", {"t1": 1}), ("b", {"t2": 1}), ("a", {"t2": 1, "t1": 2})], ["a", "b"])
    assert score(EWikiCBag(), model) == (0.0, 0.0)
    assert score({"t1": 1}, model) == model.votes("t1")
    expected = tuple(2 * x + y for x, y in zip(model.votes("t1"), model.votes("t2")))
    assert score({"t1": 2, "t2": 1}, model) == pytest.approx(expected, abs=1e-15)
    assert score({"unseen": 4}, model) == (0.0, 0.0)


def fixed_model(categories):
    # one token per category voting only for it
    examples = [(c, {f"tok-{c}": 1}) for c in categories]
    return train(examples, categories)


def test_predict_argmax_and_ties():
    model = fixed_model(["A", "B", "C"])
    p = predict({"tok-B": 1}, model, "r1")
    assert p.predicted == "B" and p.record_id == "r1"
    p = predict({"tok-A": 1, "tok-B": 1}, model)
    assert p.scores[0] == p.scores[1]
    assert p.predicted == "A"
    with pytest.raises(NoEvidence):
        predict({"nothing": 3}, model, "r2")
    with pytest.raises(NoEvidence):
        predict([], model)


def test_predict_accepts_concepts():
    cats = ["Music", "Sports"]
    music = [concept("gaga", "1986 births", "Pop singers")]
    sports = [concept("real madrid", "Football clubs in Madrid")]
    model = train([("Music", bag_of_record(music)), ("Sports", bag_of_record(sports))], cats)
    assert predict(music, model).predicted == "Music"
    assert predict(sports, model).predicted == "Sports"


def test_ap_examples():
    rep = evaluate_map(
        [Prediction("r1", (0.9, 0.0), "A", "A"), Prediction("r2", (0.1, 0.0), "A", "B")], ["A", "B"]
    )
    assert rep.ap[0] == 1.0
    rep = evaluate_map(
        [Prediction("r1", (0.9, 0.0), "A", "B"), Prediction("r2", (0.1, 0.0), "A", "A")], ["A", "B"]
    )
    assert rep.ap[0] == 0.5


def test_map_six_record_fixture():
    cats = ["x", "y", "z"]
    preds = [
        Prediction("r1", (0.9, 0.1, 0.0), "x", "x"),
        Prediction("r2", (0.2, 0.7, 0.1), "y", "x"),
        Prediction("r3", (0.3, 0.3, 0.4), "z", "y"),
        Prediction("r4", (0.0, 0.5, 0.5), "y", "z"),
        Prediction("r5", (0.6, 0.2, 0.2), "x", "z"),
        Prediction("r6", (0.3, 0.3, 0.3), "x", "y"),
    ]
    items = [(p.record_id, p.scores, p.gold) for p in preds]
    aps, m = map_oracle(items, cats)
    rep = evaluate_map(preds, cats)
    assert rep.ap == pytest.approx(aps, abs=1e-12)
    assert rep.map == pytest.approx(m, abs=1e-12)


def test_map_skips_categories_without_gold():
    preds = [Prediction("r1", (1.0, 0.0, 0.0), "a", "a"), Prediction("r2", (0.0, 1.0, 0.0), "b", "b")]
    rep = evaluate_map(preds, ["a", "b", "c"])
    assert rep.ap[2] is None and rep.map == 1.0
    assert "c\tn/a" in rep.format()
    assert rep.format().endswith("MAP\t1.000000\n")


def test_map_errors():
    with pytest.raises(NoGoldLabels):
        evaluate_map([Prediction("r", (1.0, 0.0), "a", None)], ["a", "b"])
    with pytest.raises(NoGoldLabels):
        evaluate_map([], ["a", "b"])
    with pytest.raises(UnknownCategory):
        evaluate_map([Prediction("r", (1.0, 0.0), "a", "q")], ["a", "b"])
    with pytest.raises(ValueError):
        evaluate_map([Prediction("r", (1.0,), "a", "a")], ["a", "b"])


def random_corpus(rng, n_cats=None, n_records=None, n_tokens=None):
    n_cats = n_cats or rng.randint(2, 5)
    cats = [f"cat{i}" for i in range(n_cats)]
    vocab = [f"t{i}" for i in range(n_tokens or rng.randint(1, 40))]
    examples = []
    for _ in range(n_records or rng.randint(1, 30)):
        bag = {t: rng.randint(1, 4) for t in rng.sample(vocab, rng.randint(0, min(8, len(vocab))))}
        examples.append((rng.choice(cats), bag))
    return cats, vocab, examples


def test_model_invariants_random():
    rng = random.Random(5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CategoryWithNoRecords)
        for _ in range(50):
            cats, _, examples = random_corpus(rng)
            model = train(examples, cats)
            n = len(cats)
            for t, st_ in model.stats.items():
                assert abs(math.fsum(st_.normalized) - 1) <= 1e-9
                assert 0 <= st_.entropy <= math.log2(n) + 1e-9
                assert all(math.isfinite(v) and v >= 0 for v in st_.votes)


def test_training_order_invariance():
    rng = random.Random(9)
    cats, _, examples = random_corpus(rng, 4, 30, 40)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CategoryWithNoRecords)
        ref = train(examples, cats)
        for _ in range(10):
            shuffled = examples[:]
            rng.shuffle(shuffled)
            assert train(shuffled, cats) == ref
            assert format_model(train(shuffled, cats)) == format_model(ref)


@settings(max_examples=60, deadline=None)
@given(
    st.dictionaries(st.sampled_from([f"t{i}" for i in range(10)]), st.integers(1, 5), max_size=6),
    st.dictionaries(st.sampled_from([f"t{i}" for i in range(10)]), st.integers(1, 5), max_size=6),
    st.integers(1, 7),
)
def test_score_linearity_and_scaling(b1, b2, factor):
    rng = random.Random(1)
    cats, _, examples = random_corpus(rng, 3, 20, 10)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CategoryWithNoRecords)
        model = train(examples, cats)
    union = EWikiCBag(b1) + EWikiCBag(b2)
    s1, s2, su = score(b1, model), score(b2, model), score(union, model)
    assert su == pytest.approx([x + y for x, y in zip(s1, s2)], abs=1e-12)
    scaled = score(EWikiCBag(b1).scaled(factor), model)
    assert scaled == pytest.approx([factor * x for x in s1], abs=1e-12)
    if any(s1):
        assert predict(EWikiCBag(b1).scaled(factor), model).predicted == predict(b1, model).predicted


def test_separable_corpus_classifies_itself():
    rng = random.Random(21)
    for _ in range(20):
        cats = [f"c{i}" for i in range(rng.randint(2, 5))]
        examples = []
        for i in range(rng.randint(len(cats), 20)):
            label = cats[i % len(cats)]
            bag = {f"{label}-t{j}": rng.randint(1, 3) for j in rng.sample(range(6), rng.randint(1, 4))}
            examples.append((label, bag))
        model = train(examples, cats)
        for label, bag in examples:
            assert predict(bag, model).predicted == label


def test_model_round_trip():
    rng = random.Random(2)
    cats, _, examples = random_corpus(rng, 4, 25, 30)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CategoryWithNoRecords)
        model = train(examples, cats, alpha=0.05)
    text = format_model(model)
    assert text.splitlines()[0] == "wikivote-model v1\tn=4\talpha=0.05"
    again = parse_model(text.splitlines(keepends=True))
    assert again == model
    assert format_model(again) == text


@pytest.mark.parametrize(
    "text",
    [
        "",
        "other-model v1\tn=2\talpha=0.01\ncategories\ta\tb\n",
        "wikivote-model v1\tn=3\talpha=0.01\ncategories\ta\tb\n",
        "wikivote-model v1\tn=2\talpha=0.01\ncategories\ta\tb\nt\t0\t1.0\t0.5\t1.0\t1.0\n",
        "wikivote-model v1\tn=2\talpha=0.01\ncategories\ta\tb\nt\t5\t1.0\t0.5\t1.0\t1.0\n",
    ],
)
def test_model_format_errors(text):
    with pytest.raises(ModelFormatError):
        parse_model(text.splitlines(keepends=True))


def test_oracle_agreement_single_case():
    rng = random.Random(77)
    cats, vocab, examples = random_corpus(rng, 3, 12, 8)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CategoryWithNoRecords)
        model = train(examples, cats)
    table = voting_oracle(examples, cats, 0.01)
    assert set(table) == set(model.stats)
    bag = {t: 2 for t in vocab[:3]}
    assert score(bag, model) == pytest.approx(score_oracle(bag, table, 3), abs=1e-12)
    items = [("r1", (0.5, 0.2, 0.1), cats[0]), ("r2", (0.5, 0.1, 0.3), cats[1])]
    assert ap_oracle(items, 0, cats[0]) == 1.0
