"""Built-in stopword list and rule-based lemmatizer for heuristic text mode.

The heuristic mode is a self-contained stand-in for an external POS tagger
and lemmatizer: function words are dropped, surviving tokens are reduced to
a base form via an irregular-form table plus suffix rules (plural -s/-es,
-ing/-ed with doubled-consonant repair).  Users with a real tagger should
feed pre-processed tokens through passthrough mode instead.
"""

# Function words: articles, pronouns, prepositions, conjunctions,
# auxiliaries, determiners, and contraction remnants left behind by the
# alphanumeric tokenizer ("don't" -> "don", "t").
STOPWORDS = frozenset("""
a about above after again against all almost along already also although
always am among an and another any anybody anyone anything are around as
at b be because been before being below between both but by c can cannot
could d did do does doing down during e each either else enough even ever
every everybody everyone everything f few for from further g h had has
have having he hence her here hers herself him himself his how however i
if in into is it its itself j just k l let ll m may maybe me might mine
more most much must my myself n neither never no nobody none nor not
nothing now o of off on once only onto or other our ours ourselves out
over own p q quite r rather re s same shall she should since so some
somebody someone something soon still such t than that the their theirs
them themselves then there these they this those though through thus to
too towards u under until unto up upon us v ve very w was we were what
when whenever where whether which while who whom whose why will with
within without would x y yet you your yours yourself yourselves z
""".split())

# Irregular surface forms mapped to their base form: irregular verb pasts
# and participles, irregular plurals, and irregular comparison forms.
# Forms that are themselves stopwords (was, did, went unaffected) never
# reach the lemmatizer, so auxiliaries are omitted.
IRREGULAR_FORMS = {
    # verbs: past / past participle -> base
    "arose": "arise", "arisen": "arise",
    "ate": "eat", "eaten": "eat",
    "awoke": "awake", "awoken": "awake",
    "bore": "bear", "born": "bear", "borne": "bear",
    "beat": "beat", "beaten": "beat",
    "became": "become", "become": "become",
    "began": "begin", "begun": "begin",
    "bent": "bend",
    "bet": "bet",
    "bound": "bind",
    "bit": "bite", "bitten": "bite",
    "bled": "bleed",
    "blew": "blow", "blown": "blow",
    "broke": "break", "broken": "break",
    "bred": "breed",
    "brought": "bring",
    "built": "build",
    "burnt": "burn",
    "burst": "burst",
    "bought": "buy",
    "caught": "catch",
    "chose": "choose", "chosen": "choose",
    "clung": "cling",
    "came": "come",
    "cost": "cost",
    "crept": "creep",
    "cut": "cut",
    "dealt": "deal",
    "dug": "dig",
    "dove": "dive",
    "drew": "draw", "drawn": "draw",
    "dreamt": "dream",
    "drank": "drink", "drunk": "drink",
    "drove": "drive", "driven": "drive",
    "fell": "fall", "fallen": "fall",
    "fed": "feed",
    "felt": "feel",
    "fought": "fight",
    "found": "find",
    "fled": "flee",
    "flung": "fling",
    "flew": "fly", "flown": "fly",
    "forbade": "forbid", "forbidden": "forbid",
    "forgot": "forget", "forgotten": "forget",
    "forgave": "forgive", "forgiven": "forgive",
    "froze": "freeze", "frozen": "freeze",
    "got": "get", "gotten": "get",
    "gave": "give", "given": "give",
    "went": "go", "gone": "go", "goes": "go",
    "ground": "grind",
    "grew": "grow", "grown": "grow",
    "hung": "hang",
    "heard": "hear",
    "hid": "hide", "hidden": "hide",
    "hit": "hit",
    "held": "hold",
    "hurt": "hurt",
    "kept": "keep",
    "knelt": "kneel",
    "lay": "lie", "lain": "lie",
    "let": "let",
    "knew": "know", "known": "know",
    "laid": "lay",
    "led": "lead",
    "leapt": "leap",
    "left": "leave",
    "lent": "lend",
    "lain": "lie",
    "lit": "light",
    "lost": "lose",
    "made": "make",
    "meant": "mean",
    "met": "meet",
    "paid": "pay",
    "proved": "prove", "proven": "prove",
    "put": "put",
    "quit": "quit",
    "rode": "ride", "ridden": "ride",
    "rang": "ring", "rung": "ring",
    "rose": "rise", "risen": "rise",
    "ran": "run", "run": "run",
    "said": "say",
    "saw": "see", "seen": "see",
    "sought": "seek",
    "sold": "sell",
    "sent": "send",
    "set": "set",
    "sewn": "sew",
    "shook": "shake", "shaken": "shake",
    "shone": "shine",
    "shot": "shoot",
    "shown": "show",
    "shrank": "shrink", "shrunk": "shrink",
    "shut": "shut",
    "sang": "sing", "sung": "sing",
    "sank": "sink", "sunk": "sink",
    "sat": "sit",
    "slept": "sleep",
    "slid": "slide",
    "slung": "sling",
    "spoke": "speak", "spoken": "speak",
    "sped": "speed",
    "spent": "spend",
    "spun": "spin",
    "spat": "spit",
    "split": "split",
    "spread": "spread",
    "sprang": "spring", "sprung": "spring",
    "stood": "stand",
    "stole": "steal", "stolen": "steal",
    "stuck": "stick",
    "stung": "sting",
    "stank": "stink", "stunk": "stink",
    "struck": "strike",
    "strung": "string",
    "strove": "strive", "striven": "strive",
    "swore": "swear", "sworn": "swear",
    "swept": "sweep",
    "swollen": "swell",
    "swam": "swim", "swum": "swim",
    "swung": "swing",
    "took": "take", "taken": "take",
    "taught": "teach",
    "tore": "tear", "torn": "tear",
    "told": "tell",
    "thought": "think",
    "threw": "throw", "thrown": "throw",
    "understood": "understand",
    "woke": "wake", "woken": "wake",
    "wore": "wear", "worn": "wear",
    "wove": "weave", "woven": "weave",
    "wept": "weep",
    "won": "win",
    "wound": "wind",
    "wrung": "wring",
    "wrote": "write", "written": "write",
    # irregular plurals
    "children": "child",
    "mice": "mouse",
    "men": "man",
    "women": "woman",
    "feet": "foot",
    "teeth": "tooth",
    "geese": "goose",
    "people": "person",
    "oxen": "ox",
    "lives": "life",
    "wives": "wife",
    "knives": "knife",
    "leaves": "leaf",
    "wolves": "wolf",
    "shelves": "shelf",
    "loaves": "loaf",
    "thieves": "thief",
    "halves": "half",
    "calves": "calf",
    "scarves": "scarf",
    # irregular comparison
    "better": "good", "best": "good",
    "worse": "bad", "worst": "bad",
    "less": "little", "least": "little",
    "farther": "far", "furthest": "far", "farthest": "far",
    "elder": "old", "eldest": "old",
}

_VOWELS = set("aeiou")


def _has_vowel(word: str) -> bool:
    return any(c in _VOWELS or c == "y" for c in word)


def _undouble(stem: str) -> str:
    """Collapse a final doubled consonant ("runn" -> "run").

    Final l/s/z stay doubled so "fall", "miss", "buzz" survive intact.
    """
    if (
        len(stem) >= 2
        and stem[-1] == stem[-2]
        and stem[-1] not in _VOWELS
        and stem[-1] not in "lsz"
    ):
        return stem[:-1]
    return stem


def _restore_e(stem: str) -> str:
    """Append the dropped final "e" after a short consonant-vowel-consonant
    stem ("mov" -> "move", "hop" -> "hope"); longer stems are left alone."""
    if len(stem) == 3 or (len(stem) == 4 and stem[0] not in _VOWELS):
        if (
            stem[-1] not in _VOWELS
            and stem[-1] not in "wxy"
            and stem[-2] in _VOWELS
            and stem[-3] not in _VOWELS
        ):
            return stem + "e"
    return stem


def _strip_participle(word: str, suffix: str) -> str | None:
    stem = word[: -len(suffix)]
    if len(stem) < 3 or not _has_vowel(stem):
        return None
    doubled = _undouble(stem)
    if doubled != stem:
        return doubled
    return _restore_e(stem)


def lemmatize(word: str) -> str:
    """Reduce a lowercase token to its base form.

    Lookup order: irregular table, plural rules (-ies, -es, -s), then
    -ing / -ed stripping with doubled-consonant repair.  Tokens no rule
    matches are returned unchanged.
    """
    if word in IRREGULAR_FORMS:
        return IRREGULAR_FORMS[word]
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("es") and len(word) > 4:
        # x/z/ch/sh take -es; a plain -ses plural ("horses") keeps its e
        # and is handled by the -s rule below.
        if word[-3] in "xz" or word[-4:-2] in ("ch", "sh"):
            return word[:-2]
    if (
        word.endswith("s")
        and len(word) > 3
        and not word.endswith(("ss", "us", "is"))
    ):
        return word[:-1]
    if word.endswith("ing") and len(word) > 5:
        stem = _strip_participle(word, "ing")
        if stem is not None:
            return stem
    if word.endswith("ed") and len(word) > 4:
        stem = _strip_participle(word, "ed")
        if stem is not None:
            return stem
    return word
