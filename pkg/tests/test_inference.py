import json
import random
from fractions import Fraction

import pytest

from xmr import (
    CrossModalRule,
    RuleStore,
    Transaction,
    infer_image,
    infer_stream,
    merge_stores,
    save_concepts,
)
from xmr.errors import ArityError, OriginError
from xmr.rules import Provenance
from xmr.transactions import ORIGIN_CROSS, ORIGIN_IMAGE

D = 8


def image(items, source_id="img"):
    return Transaction(items=tuple(items), origin=ORIGIN_IMAGE, source_id=source_id)


def store_from(rules, vocab_size=6):
    """rules: iterable of (antecedent tuple, word, joint, ante)."""
    words = {D + i: f"w{chr(ord('a') + i)}" for i in range(vocab_size)}
    store = RuleStore(feature_dim=D, vocab_size=vocab_size, words=words)
    lookup = {w: item for item, w in words.items()}
    for antecedent, word, joint, ante in rules:
        rule = CrossModalRule(tuple(antecedent), lookup[word], joint, ante)
        store.add(rule, [Provenance("t", joint, ante)])
    return store


def spec_store():
    return store_from([
        ((1,), "wa", 3, 4),
        ((2,), "wb", 3, 4),
        ((1, 5), "wc", 2, 3),
    ])


class TestInferImage:
    def test_spec_example(self):
        concepts = infer_image(image({1, 5}), spec_store())
        assert set(concepts.concepts) == {"wa", "wc"}

    def test_empty_store(self):
        empty = store_from([])
        assert infer_image(image({1, 5}), empty).concepts == ()

    def test_saturation(self):
        concepts = infer_image(image({1, 2, 5}), spec_store())
        assert set(concepts.concepts) == {"wa", "wb", "wc"}

    def test_no_items_match(self):
        assert infer_image(image({0, 7}), spec_store()).concepts == ()

    def test_partial_antecedent_does_not_fire(self):
        store = store_from([((1, 5), "wc", 2, 3)])
        assert infer_image(image({1}), store).concepts == ()

    def test_text_items_rejected(self):
        with pytest.raises(OriginError):
            infer_image(image({1, D + 1}), spec_store())

    def test_non_image_origin_rejected(self):
        t = Transaction(items=(1,), origin=ORIGIN_CROSS)
        with pytest.raises(OriginError):
            infer_image(t, spec_store())

    def test_provenance_traces_each_word(self):
        concepts = infer_image(image({1, 5}), spec_store())
        assert [r.antecedent for r in concepts.support["wa"]] == [(1,)]
        assert [r.antecedent for r in concepts.support["wc"]] == [(1, 5)]
        assert concepts.best_confidence("wc") == Fraction(2, 3)

    def test_duplicate_words_from_multiple_rules(self):
        store = store_from([
            ((1,), "wa", 3, 4),
            ((2,), "wa", 2, 4),
        ])
        concepts = infer_image(image({1, 2}), store)
        assert concepts.concepts == ("wa",)
        assert len(concepts.support["wa"]) == 2
        assert concepts.best_confidence("wa") == Fraction(3, 4)


def five(items_per_image):
    return [image(items, source_id=f"i{n}") for n, items in enumerate(items_per_image)]


class TestInferStream:
    def test_union(self):
        store = store_from([
            ((1,), "wa", 3, 4),
            ((2,), "wb", 3, 4),
        ])
        concepts = infer_stream("s", five([{1}, {1, 2}, set(), set(), set()]), store)
        assert set(concepts.concepts) == {"wa", "wb"}
        assert concepts.story_id == "s"

    def test_all_empty(self):
        concepts = infer_stream("s", five([set()] * 5), spec_store())
        assert concepts.concepts == ()
        assert len(concepts) == 0

    def test_disjoint_sizes_sum(self):
        store = store_from([
            ((0,), "wa", 1, 1),
            ((1,), "wb", 1, 1),
            ((2,), "wc", 1, 1),
            ((3,), "wd", 1, 1),
            ((4,), "we", 1, 1),
            ((5,), "wf", 1, 1),
        ])
        concepts = infer_stream(
            "s", five([{0}, {1, 2}, {3, 4, 5}, set(), set()]), store
        )
        assert len(concepts) == 6

    def test_wrong_arity(self):
        with pytest.raises(ArityError, match="4"):
            infer_stream("s", five([{1}] * 5)[:4], spec_store())

    def test_order_is_first_inference_then_word(self):
        store = store_from([
            ((1,), "wd", 1, 1),
            ((2,), "wa", 1, 1),
            ((3,), "wb", 1, 1),
        ])
        concepts = infer_stream("s", five([{1, 3}, {2}, set(), set(), set()]), store)
        assert concepts.concepts == ("wb", "wd", "wa")

    def test_word_counted_once_across_images(self):
        store = store_from([((1,), "wa", 1, 1)])
        concepts = infer_stream("s", five([{1}, {1}, {1}, set(), set()]), store)
        assert concepts.concepts == ("wa",)


class TestInferenceProperties:
    def random_store_pair(self, seed):
        rng = random.Random(seed)
        pool = [((rng.randrange(D),), f"w{chr(ord('a') + rng.randrange(6))}")
                for _ in range(8)]
        pool += [(tuple(sorted(rng.sample(range(D), 2))),
                  f"w{chr(ord('a') + rng.randrange(6))}") for _ in range(4)]
        seen = set()
        rules = []
        for antecedent, word in pool:
            if (antecedent, word) in seen:
                continue
            seen.add((antecedent, word))
            ante = rng.randint(2, 9)
            rules.append((antecedent, word, rng.randint(1, ante), ante))
        cut = rng.randrange(1, len(rules))
        return store_from(rules[:cut]), store_from(rules[cut:]), rules

    def test_monotone_in_rules(self):
        for seed in range(10):
            a, b, rules = self.random_store_pair(seed)
            bigger = merge_stores(a, b)
            t = image(set(random.Random(seed + 100).sample(range(D), 4)))
            assert set(infer_image(t, a).concepts) <= set(infer_image(t, bigger).concepts)

    def test_monotone_in_items(self):
        store = spec_store()
        rng = random.Random(42)
        for _ in range(20):
            small = set(rng.sample(range(D), 3))
            big = small | set(rng.sample(range(D), 2))
            assert set(infer_image(image(small), store).concepts) <= \
                set(infer_image(image(big), store).concepts)

    def test_merge_consistency(self):
        for seed in range(10):
            a, b, _ = self.random_store_pair(seed)
            merged = merge_stores(a, b)
            rng = random.Random(seed + 7)
            for _ in range(5):
                t = image(set(rng.sample(range(D), rng.randint(1, D))))
                union = set(infer_image(t, a).concepts) | set(infer_image(t, b).concepts)
                assert set(infer_image(t, merged).concepts) == union

    def test_idempotence(self):
        store = spec_store()
        t = image({1, 2, 5})
        assert infer_image(t, store) == infer_image(t, store)
        stream = five([{1}, {2}, {5, 1}, set(), {2}])
        assert infer_stream("s", stream, store) == infer_stream("s", stream, store)


class TestSaveConcepts:
    def test_jsonl_schema(self, tmp_path):
        store = spec_store()
        concepts = [
            infer_stream("s1", five([{1}, {5, 1}, set(), set(), set()]), store),
            infer_stream("s2", five([set()] * 5), store),
        ]
        path = tmp_path / "concepts.jsonl"
        save_concepts(concepts, path)
        lines = [json.loads(line) for line in path.read_text().splitlines()]
        assert lines[0]["story_id"] == "s1"
        assert lines[0]["concepts"] == ["wa", "wc"]
        assert lines[0]["provenance"]["wc"] == [
            {"antecedent": [1, 5], "confidence": [2, 3]}
        ]
        assert lines[1] == {"story_id": "s2", "concepts": [], "provenance": {}}

    def test_provenance_can_be_omitted(self, tmp_path):
        store = spec_store()
        concepts = [infer_image(image({1}), store)]
        path = tmp_path / "concepts.jsonl"
        save_concepts(concepts, path, with_provenance=False)
        (line,) = [json.loads(l) for l in path.read_text().splitlines()]
        assert "provenance" not in line
        assert line["concepts"] == ["wa"]
