import io
import random

import pytest

from app import corpus
from app.errors import MissingGold


AMBIGUOUS_TEXT = """# text=sample-a
# id=first
They\tSUBJ
have\t+FAUXV
been\t-FMAINV
less\tPCOMPL-S/AD-A>\tAD-A>
attentive\t<NOM/PCOMPL-S\tPCOMPL-S
.\tPUNCT

# a comment line
# id=second
He\tSUBJ
left\t+FMAINV

"""


def _read(text, mode="ambiguous", **kwargs):
    return corpus.read_corpus(io.StringIO(text), mode, **kwargs)


def test_read_corpus_parses_tokens_candidates_and_gold():
    parsed = _read(AMBIGUOUS_TEXT)

    assert [sentence.id for sentence in parsed] == ["first", "second"]
    first = parsed.sentences[0]
    assert first.text == "sample-a"
    assert first.tokens[3] == corpus.Token("less", ("PCOMPL-S", "AD-A>"), "AD-A>")
    assert first.tokens[0].gold is None
    assert first.tokens[5].is_punct
    assert first.reading_count == 4
    assert parsed.sentences[1].text == "sample-a"
    assert parsed.token_count == 8


def test_sentences_without_id_get_ordinal_ids():
    parsed = _read("a\tSUBJ\n\nb\tOBJ\n")
    assert [sentence.id for sentence in parsed] == ["s1", "s2"]


def test_write_corpus_round_trips_byte_for_byte():
    parsed = _read(AMBIGUOUS_TEXT)
    buffer = io.StringIO()
    corpus.write_corpus(parsed, buffer, include_gold=True)
    rendered = buffer.getvalue()

    again = io.StringIO()
    corpus.write_corpus(_read(rendered), again, include_gold=True)
    assert again.getvalue() == rendered
    assert _read(rendered) == parsed


def test_gold_mode_rejects_ambiguity_with_line_number():
    with pytest.raises(corpus.GoldModeAmbiguity) as excinfo:
        _read("x\tSUBJ\ny\tOBJ/SUBJ\n", "gold")
    assert excinfo.value.line == 2


def test_gold_mode_sets_gold_from_the_single_tag():
    parsed = _read("x\tSUBJ\n", "gold")
    assert parsed.sentences[0].tokens[0].gold == "SUBJ"


@pytest.mark.parametrize(
    "text, line",
    [
        ("x\tSUBJ\ty\tz\n", 1),
        ("x\tSUBJ\n\t OBJ\n", 2),
        ("x\tSUBJ//OBJ\n", 1),
        ("x\tSUBJ/SUBJ\n", 1),
        ("just words\n", 1),
    ],
)
def test_malformed_lines_name_their_line(text, line):
    with pytest.raises(corpus.MalformedLine) as excinfo:
        _read(text)
    assert excinfo.value.line == line
    assert str(excinfo.value).count("line ") == 1


def test_id_directive_without_tokens_is_an_empty_sentence():
    with pytest.raises(corpus.EmptySentence):
        _read("# id=lonely\n\n# id=next\nx\tSUBJ\n")
    with pytest.raises(corpus.EmptySentence):
        _read("x\tSUBJ\n\n# id=trailing\n")


def test_duplicate_sentence_ids_are_rejected():
    with pytest.raises(corpus.DuplicateSentenceId):
        _read("# id=a\nx\tSUBJ\n\n# id=a\ny\tOBJ\n")


def test_unknown_tags_are_rejected_against_an_inventory(inventory):
    with pytest.raises(corpus.UnknownTag) as excinfo:
        _read("x\tSUBJ\ny\tNOTATAG\n", inventory=inventory)
    assert excinfo.value.line == 2
    # punctuation is always allowed
    _read("x\tSUBJ\n.\tPUNCT\n", inventory=inventory)


def test_enumerate_readings_varies_the_last_token_fastest():
    sentence = _read(AMBIGUOUS_TEXT).sentences[0]
    readings = list(corpus.enumerate_readings(sentence, cap=10))

    assert [reading.choices[3:5] for reading in readings] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert readings[1].tags[3:5] == ("PCOMPL-S", "PCOMPL-S")
    assert all(corpus.reading_is_valid(sentence, reading) for reading in readings)


def test_enumerate_readings_refuses_over_the_cap():
    sentence = _read(AMBIGUOUS_TEXT).sentences[0]
    with pytest.raises(corpus.TooManyReadings) as excinfo:
        list(corpus.enumerate_readings(sentence, cap=3))
    assert excinfo.value.product_size == 4
    assert excinfo.value.cap == 3
    assert excinfo.value.sentence_id == "first"


def test_apply_reading_keeps_gold_and_reduces_candidates():
    sentence = _read(AMBIGUOUS_TEXT).sentences[0]
    reading = list(corpus.enumerate_readings(sentence, cap=10))[2]
    reduced = corpus.apply_reading(sentence, reading)
    assert [token.candidates for token in reduced.tokens][3:5] == [("AD-A>",), ("<NOM",)]
    assert reduced.tokens[3].gold == "AD-A>"


def test_resolved_tag_prefers_gold_then_single_candidate():
    sentence = _read(AMBIGUOUS_TEXT).sentences[0]
    assert corpus.resolved_tag(sentence, 3) == "AD-A>"
    assert corpus.resolved_tag(sentence, 0) == "SUBJ"
    stripped = _read("x\tSUBJ/OBJ\n").sentences[0]
    with pytest.raises(MissingGold):
        corpus.resolved_tag(stripped, 0)
    with pytest.raises(MissingGold):
        corpus.gold_reading(sentence)


def test_corpus_stats_reports_ambiguity_and_error_rates():
    text = "a\tSUBJ/OBJ\tSUBJ\nb\t+FMAINV\t+FMAINV\nc\tOBJ/I-OBJ\tPCOMPL-S\nd\tADVL\tADVL\n.\tPUNCT\tPUNCT\n"
    stats = corpus.corpus_stats(_read(text))
    assert stats == corpus.CorpusStats(4, 2, 1, 0.5, 0.25)
    with_punct = corpus.corpus_stats(_read(text), include_punct=True)
    assert with_punct.word_count == 5


def test_corpus_stats_has_no_error_rate_without_gold():
    stats = corpus.corpus_stats(_read("a\tSUBJ/OBJ\nb\tOBJ\n"))
    assert stats.error_rate is None
    assert stats.error_count is None
    assert stats.ambiguity_rate == 0.5


_TAGS = ("SUBJ", "OBJ", "+FMAINV", "-FMAINV", "ADVL", "DN>", "PUNCT")


def _random_corpus(rng, count):
    sentences = []
    text = None
    for index in range(count):
        if rng.random() < 0.3:
            text = rng.choice([None, "alpha", "beta", "gamma"])
        tokens = []
        for position in range(rng.randint(1, 6)):
            candidates = tuple(rng.sample(_TAGS, rng.randint(1, 3)))
            gold = rng.choice([None, candidates[0], rng.choice(_TAGS)])
            tokens.append(corpus.Token(f"t{index}.{position}", candidates, gold))
        sentences.append(corpus.Sentence(f"id{index}", tuple(tokens), text))
    return corpus.Corpus("corpus", tuple(sentences))


def test_random_corpora_survive_a_write_and_read():
    rng = random.Random(31)
    for _ in range(200):
        original = _random_corpus(rng, rng.randint(1, 6))
        buffer = io.StringIO()
        corpus.write_corpus(original, buffer, include_gold=True)
        assert _read(buffer.getvalue()) == original


def test_corpus_stats_ignore_sentence_order():
    rng = random.Random(37)
    for _ in range(200):
        original = _random_corpus(rng, rng.randint(1, 6))
        shuffled = list(original.sentences)
        rng.shuffle(shuffled)
        reordered = corpus.Corpus("reordered", tuple(shuffled))
        for include_punct in (False, True):
            assert corpus.corpus_stats(reordered, include_punct=include_punct) == corpus.corpus_stats(
                original, include_punct=include_punct
            )
