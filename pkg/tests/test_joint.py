import io
import random

import pytest

from app import joint
from app.corpus import Corpus, Reading, Sentence, Token, read_corpus
from app.errors import EmptyCorpus
from app.joint import JointParams
from app.tagset import BOS, EOS

CAT_SAT = "a\tDN>\ncat\tSUBJ\nsat\t+FMAINV\n\n" * 10


def _gold(text):
    return read_corpus(io.StringIO(text), "gold")


def _random_gold(rng, sentences, tags=("A", "B", "C", "D")):
    built = []
    for index in range(sentences):
        length = rng.randint(1, 7)
        tokens = tuple(
            Token(f"w{position}", (tag,), tag)
            for position, tag in enumerate(rng.choice(tags) for _ in range(length))
        )
        built.append(Sentence(f"s{index}", tokens))
    return Corpus("random", tuple(built))


def test_training_events_pad_sentence_edges():
    events = list(joint.training_events(_gold("a\tDN>\ncat\tSUBJ\nsat\t+FMAINV\n"), max_len=2))
    assert events == [
        joint.TrainingEvent("DN>", (BOS,), ("SUBJ", "+FMAINV")),
        joint.TrainingEvent("SUBJ", (BOS, "DN>"), ("+FMAINV", EOS)),
        joint.TrainingEvent("+FMAINV", ("DN>", "SUBJ"), (EOS,)),
    ]
    assert joint.windows(("A",), 0, 1) == ((BOS,), (EOS,))


def test_generate_joints_on_repeated_sentence():
    params = JointParams(error_margin=0.5, absolute_margin=2, max_len=2)
    db = joint.generate_joints(_gold(CAT_SAT), params)

    subject = {item.context for item in db.joints["SUBJ"]}
    assert subject == {
        (("DN>",), ()),
        ((), ("+FMAINV",)),
        ((BOS, "DN>"), ()),
        (("DN>",), ("+FMAINV",)),
        ((), ("+FMAINV", EOS)),
    }
    assert all(item.support == 10 and item.freq == 1.0 for item in db.joints["SUBJ"])
    assert db.target_counts == {"+FMAINV": 10, "DN>": 10, "SUBJ": 10}
    assert [item.length for item in db.joints["SUBJ"]] == [1, 1, 2, 2, 2]

    reading = Reading(("DN>", "SUBJ", "+FMAINV"))
    assert joint.longest_context_match(db, reading, 1) == 2
    assert joint.score_reading(db, reading) == 6
    with pytest.raises(IndexError):
        joint.longest_context_match(db, reading, 3)


@pytest.mark.parametrize(
    "error_margin, absolute_margin, keeps_rare",
    [(0.0, 1, True), (0.2, 1, False), (0.0, 2, False)],
)
def test_margins_filter_rare_contexts(error_margin, absolute_margin, keeps_rare):
    gold = _gold("b\tB\na\tA\n\n" * 9 + "c\tC\na\tA\n")
    params = JointParams(error_margin=error_margin, absolute_margin=absolute_margin, max_len=1)
    db = joint.generate_joints(gold, params)

    contexts = {item.context: item for item in db.joints["A"]}
    assert contexts[(("B",), ())].support == 9
    assert contexts[(("B",), ())].freq == pytest.approx(0.9)
    assert contexts[((), (EOS,))].support == 10
    assert ((("C",), ()) in contexts) is keeps_rare


def test_unknown_targets_and_empty_databases_score_zero():
    db = joint.JointDB.empty()
    assert len(db) == 0
    assert joint.score_reading(db, Reading(("A", "B"))) == 0


def test_generate_joints_rejects_an_empty_corpus():
    with pytest.raises(EmptyCorpus):
        joint.generate_joints(Corpus("empty"), JointParams())


@pytest.mark.parametrize(
    "kwargs",
    [
        {"error_margin": 1.5},
        {"error_margin": -0.1},
        {"absolute_margin": 0},
        {"max_len": 0},
        {"algorithm": "greedy"},
    ],
)
def test_joint_params_validate(kwargs):
    with pytest.raises(joint.InvalidJointParams):
        JointParams(**kwargs)


def test_exhaustive_and_incremental_databases_render_identically():
    rng = random.Random(11)
    for _ in range(120):
        gold = _random_gold(rng, rng.randint(1, 25))
        params = JointParams(
            error_margin=rng.choice([0.0, 0.05, 0.2, 0.5]),
            absolute_margin=rng.randint(1, 4),
            max_len=rng.randint(1, 4),
        )
        exhaustive = joint.generate_joints_exhaustive(gold, params)
        incremental = joint.generate_joints_incremental(gold, params)

        assert joint.render_joint_db(exhaustive) == joint.render_joint_db(incremental)
        assert exhaustive == incremental


def test_generated_databases_are_prefix_closed_with_monotone_support():
    rng = random.Random(5)
    for _ in range(60):
        gold = _random_gold(rng, rng.randint(3, 30))
        db = joint.generate_joints(gold, JointParams(error_margin=0.0, absolute_margin=2, max_len=3))
        joint.check_prefix_closure(db)
        for item in db.all_joints():
            assert 1 <= item.length <= 3
            assert item.support <= db.target_counts[item.target]
            if item.length < 2:
                continue
            supports = {other.context: other.support for other in db.joints[item.target]}
            parents = []
            if item.left:
                parents.append((item.left[1:], item.right))
            if item.right:
                parents.append((item.left, item.right[:-1]))
            assert any(supports.get(parent, -1) >= item.support for parent in parents)


def test_joint_db_round_trips_through_text():
    rng = random.Random(3)
    for _ in range(20):
        gold = _random_gold(rng, 15)
        db = joint.generate_joints(gold, JointParams(error_margin=0.1, absolute_margin=2, max_len=3))
        buffer = io.StringIO()
        joint.dump_joint_db(db, buffer)

        reloaded = joint.load_joint_db(io.StringIO(buffer.getvalue()))
        assert reloaded == db
        assert joint.render_joint_db(reloaded) == buffer.getvalue()


def test_rendered_joint_db_layout():
    db = joint.generate_joints(
        _gold(CAT_SAT), JointParams(error_margin=0.5, absolute_margin=2, max_len=2)
    )
    lines = joint.render_joint_db(db).splitlines()
    assert lines[0] == "PARAMS error_margin=0.5 absolute_margin=2 max_len=2 algorithm=incremental"
    assert lines[1:4] == ["TARGETCOUNT +FMAINV 10", "TARGETCOUNT DN> 10", "TARGETCOUNT SUBJ 10"]
    assert "JOINT SUBJ : <s> DN> _ | COUNT 10" in lines
    assert "JOINT SUBJ : _ +FMAINV </s> | COUNT 10" in lines


PARAMS_LINE = "PARAMS error_margin=0.1 absolute_margin=2 max_len=2 algorithm=incremental\n"


@pytest.mark.parametrize(
    "text, line",
    [
        ("TARGETCOUNT SUBJ 3\n", None),
        ("PARAMS error_margin=2 absolute_margin=2 max_len=2 algorithm=incremental\n", 1),
        ("PARAMS error_margin=0.1 absolute_margin=2\n", 1),
        (PARAMS_LINE + "TARGETCOUNT SUBJ 10\nJOINT SUBJ : DN> _ | COUNT 1\n", 3),
        (PARAMS_LINE + "TARGETCOUNT SUBJ 10\nJOINT SUBJ : DN> _ | COUNT 11\n", 3),
        (PARAMS_LINE + "JOINT SUBJ : DN> _ | COUNT 4\n", 2),
        (PARAMS_LINE + "TARGETCOUNT SUBJ 10\nJOINT SUBJ : _ <s> | COUNT 4\n", 3),
        (PARAMS_LINE + "TARGETCOUNT SUBJ 10\nJOINT SUBJ : A B C _ | COUNT 4\n", 3),
        (PARAMS_LINE + "TARGETCOUNT SUBJ 10\nJOINT SUBJ DN> _ | COUNT 4\n", 3),
        (PARAMS_LINE + "TARGETCOUNT SUBJ ten\n", 2),
        (PARAMS_LINE + "WHAT\n", 2),
    ],
)
def test_load_joint_db_rejects_malformed_files(text, line):
    with pytest.raises(joint.MalformedJointFile) as excinfo:
        joint.load_joint_db(io.StringIO(text))
    assert excinfo.value.line == line


def test_load_joint_db_requires_prefix_closure():
    text = PARAMS_LINE + "TARGETCOUNT SUBJ 10\nJOINT SUBJ : <s> DN> _ | COUNT 10\n"
    with pytest.raises(joint.PrefixClosureViolation):
        joint.load_joint_db(io.StringIO(text))


def test_load_joint_db_rederives_frequencies():
    text = (
        PARAMS_LINE
        + "TARGETCOUNT SUBJ 8\n"
        + "JOINT SUBJ : DN> _ | COUNT 4\n"
        + "JOINT SUBJ : <s> DN> _ | COUNT 2\n"
    )
    db = joint.load_joint_db(io.StringIO(text))
    assert [item.freq for item in db.joints["SUBJ"]] == [0.5, 0.25]


def test_scores_do_not_depend_on_storage_order():
    rng = random.Random(17)
    for _ in range(100):
        gold = _random_gold(rng, rng.randint(1, 15))
        db = joint.generate_joints(gold, JointParams(error_margin=0.0, absolute_margin=1, max_len=3))
        targets = list(db.joints)
        rng.shuffle(targets)
        shuffled = joint.JointDB(
            db.params,
            {target: tuple(rng.sample(db.joints[target], len(db.joints[target]))) for target in targets},
            dict(db.target_counts),
        )
        for sentence in _random_gold(rng, 10).sentences:
            reading = Reading(tuple(token.gold for token in sentence.tokens))
            assert joint.score_reading(shuffled, reading) == joint.score_reading(db, reading)


def test_written_params_name_the_canonical_algorithm():
    params = JointParams(error_margin=0.5, absolute_margin=2, max_len=2, algorithm="exhaustive")
    db = joint.generate_joints(_gold(CAT_SAT), params)
    assert db.params.algorithm == joint.CANONICAL_ALGORITHM
    assert joint.render_joint_db(db).splitlines()[0].endswith(" algorithm=incremental")

    loaded = joint.load_joint_db(
        io.StringIO(joint.render_joint_db(db).replace("algorithm=incremental", "algorithm=exhaustive"))
    )
    assert loaded.params.algorithm == "exhaustive"
    assert loaded.joints == db.joints
