from xmr.lexicon import IRREGULAR_FORMS, STOPWORDS, lemmatize


def test_irregular_table_hits():
    assert lemmatize("ran") == "run"
    assert lemmatize("went") == "go"
    assert lemmatize("children") == "child"
    assert lemmatize("men") == "man"
    assert lemmatize("took") == "take"
    assert lemmatize("feet") == "foot"
    assert lemmatize("better") == "good"


def test_plural_stripping():
    assert lemmatize("dogs") == "dog"
    assert lemmatize("horses") == "horse"
    assert lemmatize("boxes") == "box"
    assert lemmatize("dishes") == "dish"
    assert lemmatize("churches") == "church"
    assert lemmatize("glasses") == "glass"
    assert lemmatize("parties") == "party"
    assert lemmatize("days") == "day"


def test_plural_guards():
    # Short or suffix-less words pass through untouched.
    assert lemmatize("bus") == "bus"
    assert lemmatize("is") == "is"
    assert lemmatize("this") == "this"
    assert lemmatize("grass") == "grass"


def test_ing_stripping():
    assert lemmatize("running") == "run"
    assert lemmatize("walking") == "walk"
    assert lemmatize("making") == "make"
    assert lemmatize("falling") == "fall"
    assert lemmatize("smiling") == "smile"
    # Vowelless or too-short stems keep the surface form.
    assert lemmatize("spring") == "spring"
    assert lemmatize("sing") == "sing"


def test_ed_stripping():
    assert lemmatize("jumped") == "jump"
    assert lemmatize("stopped") == "stop"
    assert lemmatize("moved") == "move"
    assert lemmatize("smiled") == "smile"
    assert lemmatize("red") == "red"


def test_undoubling_keeps_ll_ss_zz():
    assert lemmatize("falling") == "fall"
    assert lemmatize("passing") == "pass"
    assert lemmatize("buzzing") == "buzz"


def test_idempotence_on_common_nouns():
    for word in ["dog", "park", "beach", "family", "pumpkin", "water"]:
        assert lemmatize(word) == word


def test_stopwords_cover_function_words():
    for word in ["the", "a", "an", "and", "of", "to", "was", "were", "is"]:
        assert word in STOPWORDS
    for word in ["dog", "run", "park", "happy"]:
        assert word not in STOPWORDS


def test_irregular_table_is_lowercase_and_nontrivial():
    assert len(IRREGULAR_FORMS) >= 150
    for surface, lemma in IRREGULAR_FORMS.items():
        assert surface == surface.lower()
        assert lemma == lemma.lower()
