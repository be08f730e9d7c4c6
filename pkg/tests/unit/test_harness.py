"""Tests for synthetic worlds, questions, articles and scoring."""

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deepqna.harness import (
    InfeasibleChain,
    fixture_world,
    generate_questions,
    generate_world,
    make_question,
    oracle_answer,
    related,
    render_articles,
    score_question,
    score_relaxed_numeric,
    score_set_f1,
    score_token_f1,
    validate_world,
)
from deepqna.models.report import Metric
from deepqna.models.world import Anchor, AnchorKind, Hop, HopKind, WorldSpec


def parse_articles(documents):
    """Relations and attributes read back from rendered article text."""
    relations = Counter()
    attributes = {}
    for doc in documents:
        marker = f" of {doc.title} is "
        section = None
        for line in doc.body.splitlines():
            if line.startswith("## "):
                section = line
                continue
            if not line.startswith("The ") or marker not in line or not line.endswith("."):
                continue
            key, _, value = line[len("The ") : -1].partition(marker)
            if section == "## Family":
                relations[(doc.title, key, value)] += 1
            else:
                attributes[(doc.title, key.replace(" ", "_"))] = value
    return relations, attributes


def traverse(documents, anchor, chain):
    """Answer a chain by walking parsed article text."""
    relations, attributes = parse_articles(documents)
    targets = {}
    for (name, role, value) in relations:
        targets.setdefault((name, role), set()).add(value)

    def step(name, role):
        def base(who, r):
            return targets.get((who, r), set())

        if role == "daughter-in-law":
            found = {w for s in base(name, "son") for w in base(s, "wife")}
        elif role == "son-in-law":
            found = {h for d in base(name, "daughter") for h in base(d, "husband")}
        elif role in ("brother", "sister"):
            child = "son" if role == "brother" else "daughter"
            found = {c for p in base(name, "mother") | base(name, "father") for c in base(p, child)}
        else:
            found = set(base(name, role))
        return found - {name}

    names = {doc.title for doc in documents}
    if anchor.kind is AnchorKind.NAME:
        frontier = {anchor.value} & names
    else:
        frontier = {n for n in names if attributes.get((n, anchor.key)) == anchor.value}
    for hop in chain:
        if hop.kind is HopKind.RELATION:
            frontier = {t for n in frontier for t in step(n, hop.name)}
        elif hop.kind is HopKind.ATTRIBUTE:
            return {attributes[(n, hop.name)] for n in frontier if (n, hop.name) in attributes}
        else:
            return {str(len(frontier))} if frontier else set()
    return frontier


def relation(role):
    return Hop(kind=HopKind.RELATION, name=role)


def test_fixture_world_is_valid(world):
    """Test the hand-built world satisfies every invariant."""
    assert validate_world(world) == []
    assert len(world.persons) == 8


def test_generate_world_smallest():
    """Test a two-person world is valid."""
    world = generate_world(WorldSpec(size=2, seed=1))

    assert len(world.persons) == 2
    assert validate_world(world) == []


def test_generate_world_is_deterministic():
    """Test the same size and seed give the same world, and seeds differ."""
    first = generate_world(WorldSpec(size=50, seed=1))

    assert first == generate_world(WorldSpec(size=50, seed=1))
    other = generate_world(WorldSpec(size=50, seed=2))
    assert Counter(p.name for p in first.persons) != Counter(p.name for p in other.persons)


@settings(max_examples=200, deadline=None)
@given(size=st.integers(min_value=2, max_value=60), seed=st.integers(min_value=0, max_value=10_000))
def test_generated_worlds_are_valid(size, seed):
    """Test generated worlds have the requested size and no invariant violations."""
    world = generate_world(WorldSpec(size=size, seed=seed))

    assert len(world.persons) == size
    assert validate_world(world) == []


def test_world_spec_validation():
    """Test sizes below two and unknown schema versions are rejected."""
    with pytest.raises(ValueError):
        WorldSpec(size=1)
    with pytest.raises(ValueError):
        WorldSpec(schema_version=99)


def test_validate_world_reports_problems():
    """Test missing inverses, bad dates and shared dates are reported."""
    world = fixture_world()
    people = world.by_name()
    people["Reggie Coe"].relations["father"] = []
    people["Lissa Coe"].attributes["date_of_birth"] = "1013-13-40"
    people["Bobbie Luu"].attributes["date_of_birth"] = "0984-05-03"

    problems = validate_world(world)
    assert "Earle Coe: son Reggie Coe lacks the inverse father link" in problems
    assert "Lissa Coe: malformed date of birth '1013-13-40'" in problems
    assert "Bobbie Luu and Earle Coe share the date of birth 0984-05-03" in problems


def test_article_layout(world):
    """Test headers and the relation and attribute sentences."""
    articles = {doc.title: doc for doc in render_articles(world)}
    earle = articles["Earle Coe"].body.splitlines()

    assert earle[:2] == ["# Earle Coe", "## Family"]
    assert "The son of Earle Coe is Reggie Coe." in earle
    assert "The date of birth of Earle Coe is 0984-05-03." in earle
    assert "The occupation of Earle Coe is petroleum engineer." in earle
    assert earle.index("The mother of Earle Coe is Alycia Coe.") < earle.index("The son of Earle Coe is Reggie Coe.")


def test_article_without_friends(world):
    """Test a person with no friends keeps both sections."""
    body = {doc.title: doc for doc in render_articles(world)}["Christoper Coe"].body

    assert "The friend of" not in body
    assert "## Family" in body
    assert "## Attributes" in body


def test_articles_round_trip_relations():
    """Test parsing rendered articles recovers the world's relations."""
    world = generate_world(WorldSpec(size=50, seed=3))
    relations, attributes = parse_articles(render_articles(world))

    expected = Counter(
        (p.name, role, target) for p in world.persons for role, targets in p.relations.items() for target in targets
    )
    assert relations == expected
    assert len(attributes) == 3 * len(world.persons)


def test_fixture_questions(questions):
    """Test gold answers and question text of the fixture questions."""
    assert [q.id for q in questions] == ["q0", "q1", "q2", "q3", "q4"]
    assert [q.gold for q in questions] == [
        ["Bobbie Luu"],
        ["Reggie Coe"],
        ["petroleum engineer"],
        ["2"],
        ["Alycia Coe"],
    ]
    assert questions[0].surface == (
        "Who is the friend of the daughter-in-law of the person whose date of birth is 0984-05-03?"
    )
    assert questions[3].surface == "How many sons does Christoper Coe have?"
    assert [q.metric for q in questions] == [
        Metric.SET_F1,
        Metric.SET_F1,
        Metric.TOKEN_F1,
        Metric.RELAXED_NUMERIC,
        Metric.SET_F1,
    ]


def test_oracle_answer(world):
    """Test traversal over base and derived roles."""
    dob = Anchor(kind=AnchorKind.ATTRIBUTE, key="date_of_birth", value="0984-05-03")
    earle = Anchor(kind=AnchorKind.NAME, value="Earle Coe")

    assert oracle_answer(world, dob, [relation("son"), relation("wife"), relation("friend")]) == {"Bobbie Luu"}
    assert oracle_answer(world, earle, [relation("son")]) == {"Reggie Coe"}
    assert oracle_answer(world, earle, [relation("daughter-in-law")]) == {"Lissa Coe"}
    assert oracle_answer(world, earle, [Hop(kind=HopKind.ATTRIBUTE, name="hobby")]) == {"sailing"}
    assert oracle_answer(world, Anchor(kind=AnchorKind.NAME, value="Nobody"), [relation("son")]) == set()


def test_hops_exclude_the_person(world):
    """Test a person is never among their own hop results."""
    earle = world.person("Earle Coe")

    assert related(world, earle, "brother") == {"Dorian Coe"}
    with pytest.raises(ValueError):
        related(world, earle, "cousin")


def test_make_question_rejects_empty_gold(world):
    """Test a chain with no answer is infeasible."""
    with pytest.raises(InfeasibleChain):
        make_question(world, "q9", Anchor(kind=AnchorKind.NAME, value="Bobbie Luu"), [relation("son")])


def test_generate_questions_is_deterministic():
    """Test sampling is reproducible and ids are sequential."""
    world = generate_world(WorldSpec(size=50, seed=1))
    first = generate_questions(world, 20, seed=4)

    assert first == generate_questions(world, 20, seed=4)
    assert [q.id for q in first] == [f"q{i}" for i in range(len(first))]
    assert all(1 <= len(q.chain) <= 4 for q in first)


@pytest.mark.parametrize("max_hops", [0, 6])
def test_generate_questions_hop_range(world, max_hops):
    """Test max_hops outside [1, 5] is rejected."""
    with pytest.raises(ValueError):
        generate_questions(world, 1, seed=0, max_hops=max_hops)


def test_oracle_matches_article_traversal():
    """Test gold sets equal an independent walk over the rendered articles."""
    checked = 0
    for seed in range(20):
        world = generate_world(WorldSpec(size=50, seed=seed))
        documents = render_articles(world)
        for question in generate_questions(world, 50, seed=seed, max_hops=5):
            assert set(question.gold) == traverse(documents, question.anchor, question.chain), question.surface
            checked += 1
    assert checked > 800


def test_score_set_f1():
    """Test set F1 examples and edge cases."""
    assert score_set_f1({"Bobbie Luu"}, {"Bobbie Luu"}) == 1.0
    assert score_set_f1({"A", "B"}, {"A", "C"}) == 0.5
    assert score_set_f1(set(), {"A"}) == 0.0
    assert score_set_f1(set(), set()) == 1.0


def test_score_token_f1():
    """Test token F1 examples."""
    assert score_token_f1("San Francisco", "San Francisco CA") == pytest.approx(0.8, abs=1e-12)
    assert score_token_f1("Petroleum Engineer", "petroleum engineer") == 1.0
    assert score_token_f1("", "anything") == 0.0


def test_score_relaxed_numeric():
    """Test the five percent tolerance and the exact zero rule."""
    assert score_relaxed_numeric(9985, 10000)
    assert score_relaxed_numeric(991, 1000)
    assert not score_relaxed_numeric(1, 10)
    assert score_relaxed_numeric(0, 0)
    assert not score_relaxed_numeric(0.001, 0)
    assert score_relaxed_numeric("2", "2")
    assert not score_relaxed_numeric("two", "2")
    with pytest.raises(ValueError):
        score_relaxed_numeric(1, 1, tolerance=-0.1)


@given(
    st.sets(st.sampled_from("abcdef")),
    st.sets(st.sampled_from("abcdef")),
)
def test_metric_bounds_and_symmetry(pred, gold):
    """Test set F1 stays in [0, 1] and is symmetric."""
    score = score_set_f1(pred, gold)

    assert 0.0 <= score <= 1.0
    assert score == score_set_f1(gold, pred)
    if pred:
        assert score_set_f1(pred, pred) == 1.0


def test_score_question(questions):
    """Test each question is scored with its own metric."""
    q0, q1, q2, q3, _ = questions

    assert score_question(q0, "Bobbie Luu") == (1.0, 1.0)
    score, exact = score_question(q0, ["Bobbie Luu", "Lissa Coe"])
    assert score == pytest.approx(2 / 3)
    assert exact == 0.0
    assert score_question(q1, None) == (0.0, 0.0)
    assert score_question(q2, "Petroleum Engineer") == (1.0, 1.0)
    assert score_question(q3, 2) == (1.0, 1.0)
    assert score_question(q3, [2]) == (1.0, 1.0)
    assert score_question(q3, "many") == (0.0, 0.0)
