"""Multi-hop questions over a world, with a brute-force answer oracle."""

import logging
import random
from typing import Dict, List, Optional, Sequence, Set

from deepqna.models.world import (
    ATTRIBUTE_KEYS,
    DERIVED_ROLES,
    MAX_HOPS,
    RELATION_ROLES,
    Anchor,
    AnchorKind,
    AnswerType,
    Hop,
    HopKind,
    Person,
    QuestionSpec,
    WorldGraph,
    attribute_words,
)

logger = logging.getLogger(__name__)

ALL_ROLES = RELATION_ROLES + DERIVED_ROLES

PLURALS = {
    "mother": "mothers",
    "father": "fathers",
    "son": "sons",
    "daughter": "daughters",
    "wife": "wives",
    "husband": "husbands",
    "friend": "friends",
    "daughter-in-law": "daughters-in-law",
    "son-in-law": "sons-in-law",
    "brother": "brothers",
    "sister": "sisters",
}

# Answer type weights when sampling
_TYPE_WEIGHTS = ((AnswerType.NAMES, 6), (AnswerType.ATTRIBUTE, 3), (AnswerType.COUNT, 2))


class InfeasibleChain(Exception):
    """A sampled chain has an empty gold answer."""


def related(world: WorldGraph, person: Person, role: str) -> Set[str]:
    """Names reached from a person by one base or derived role, excluding the person."""
    people = world.by_name()
    if role in RELATION_ROLES:
        found = set(person.related(role))
    elif role == "daughter-in-law":
        found = {w for son in person.related("son") for w in people[son].related("wife")}
    elif role == "son-in-law":
        found = {h for daughter in person.related("daughter") for h in people[daughter].related("husband")}
    elif role in ("brother", "sister"):
        child_role = "son" if role == "brother" else "daughter"
        parents = person.related("mother") + person.related("father")
        found = {c for parent in parents for c in people[parent].related(child_role)}
    else:
        raise ValueError(f"Unknown relation role: {role}")
    found.discard(person.name)
    return found


def anchor_persons(world: WorldGraph, anchor: Anchor) -> List[Person]:
    if anchor.kind is AnchorKind.NAME:
        person = world.person(anchor.value)
        return [person] if person is not None else []
    return [p for p in world.persons if p.attributes.get(anchor.key or "") == anchor.value]


def oracle_answer(world: WorldGraph, anchor: Anchor, chain: Sequence[Hop]) -> Set[str]:
    """
    Exhaustive traversal from every person matching the anchor.

    Relation hops map the frontier to the union of its related persons; a
    final attribute hop yields attribute values and a final count hop yields
    the size of the frontier as a string.

    Args:
        world: World to traverse
        anchor: Starting predicate
        chain: Hops in order

    Returns:
        The answer set; possibly empty
    """
    people = world.by_name()
    frontier = {p.name for p in anchor_persons(world, anchor)}
    for hop in chain:
        if hop.kind is HopKind.RELATION:
            frontier = {name for current in frontier for name in related(world, people[current], hop.name)}
        elif hop.kind is HopKind.ATTRIBUTE:
            return {people[n].attributes[hop.name] for n in frontier if hop.name in people[n].attributes}
        else:
            return {str(len(frontier))} if frontier else set()
    return frontier


def anchor_phrase(anchor: Anchor) -> str:
    if anchor.kind is AnchorKind.NAME:
        return anchor.value
    return f"the person whose {attribute_words(anchor.key or '')} is {anchor.value}"


def chain_phrase(anchor: Anchor, roles: Sequence[str]) -> str:
    """E.g. "the friend of the daughter-in-law of Earle Coe"; roles are applied first to last."""
    phrase = anchor_phrase(anchor)
    for role in roles:
        phrase = f"the {role} of {phrase}"
    return phrase


def surface(anchor: Anchor, chain: Sequence[Hop]) -> str:
    """The question text for a chain."""
    last = chain[-1]
    roles = [hop.name for hop in chain if hop.kind is HopKind.RELATION]
    if last.kind is HopKind.ATTRIBUTE:
        return f"What is the {attribute_words(last.name)} of {chain_phrase(anchor, roles)}?"
    if last.kind is HopKind.COUNT:
        counted = roles[-1]
        return f"How many {PLURALS[counted]} does {chain_phrase(anchor, roles[:-1])} have?"
    return f"Who is {chain_phrase(anchor, roles)}?"


def answer_type(chain: Sequence[Hop]) -> AnswerType:
    last = chain[-1].kind
    if last is HopKind.ATTRIBUTE:
        return AnswerType.ATTRIBUTE
    if last is HopKind.COUNT:
        return AnswerType.COUNT
    return AnswerType.NAMES


def make_question(world: WorldGraph, question_id: str, anchor: Anchor, chain: Sequence[Hop]) -> QuestionSpec:
    """
    Build a question whose gold set comes from the oracle.

    Raises:
        InfeasibleChain: If the gold set is empty
    """
    gold = oracle_answer(world, anchor, chain)
    if not gold:
        raise InfeasibleChain(f"{surface(anchor, chain)} has no answer")
    return QuestionSpec(
        id=question_id,
        anchor=anchor,
        chain=list(chain),
        surface=surface(anchor, chain),
        gold=sorted(gold),
        answer_type=answer_type(chain),
    )


def _sample_chain(world: WorldGraph, rng: random.Random, max_hops: int) -> QuestionSpec:
    people = world.by_name()
    start = rng.choice(world.persons)
    if rng.random() < 0.5:
        anchor = Anchor(kind=AnchorKind.NAME, value=start.name)
    else:
        anchor = Anchor(kind=AnchorKind.ATTRIBUTE, key="date_of_birth", value=start.attributes["date_of_birth"])

    kinds = [t for t, _ in _TYPE_WEIGHTS]
    kind = rng.choices(kinds, weights=[w for _, w in _TYPE_WEIGHTS])[0]
    if kind is AnswerType.COUNT and max_hops < 2:
        kind = AnswerType.NAMES
    relation_hops = {
        AnswerType.NAMES: rng.randint(1, max_hops),
        AnswerType.ATTRIBUTE: rng.randint(0, max_hops - 1),
        AnswerType.COUNT: rng.randint(1, max_hops - 1),
    }[kind]

    chain: List[Hop] = []
    frontier = {start.name}
    for _ in range(relation_hops):
        options = []
        for role in ALL_ROLES:
            reached = {n for current in frontier for n in related(world, people[current], role)}
            if reached:
                options.append((role, reached))
        if not options:
            raise InfeasibleChain("walk reached a dead end")
        role, frontier = rng.choice(options)
        chain.append(Hop(kind=HopKind.RELATION, name=role))

    if kind is AnswerType.ATTRIBUTE:
        chain.append(Hop(kind=HopKind.ATTRIBUTE, name=rng.choice(ATTRIBUTE_KEYS)))
    elif kind is AnswerType.COUNT:
        chain.append(Hop(kind=HopKind.COUNT))
    return make_question(world, "", anchor, chain)


def generate_questions(
    world: WorldGraph,
    count: int,
    seed: int,
    max_hops: int = 4,
    resample_attempts: int = 20,
) -> List[QuestionSpec]:
    """
    Sample questions by random walks over the world.

    A chain whose gold set is empty is resampled up to `resample_attempts`
    times, then the question is skipped.

    Args:
        world: World to ask about
        count: Number of questions to attempt
        seed: Sampling seed
        max_hops: Longest chain, in [1, 5]
        resample_attempts: Samples per question before skipping

    Returns:
        Questions with ids q0, q1, ... in sampling order

    Raises:
        ValueError: If max_hops is out of range
    """
    if not 1 <= max_hops <= MAX_HOPS:
        raise ValueError(f"max_hops must be between 1 and {MAX_HOPS}, got {max_hops}")
    rng = random.Random(f"questions:{seed}")
    questions: List[QuestionSpec] = []
    skipped = 0
    for _ in range(count):
        question: Optional[QuestionSpec] = None
        for _ in range(resample_attempts):
            try:
                question = _sample_chain(world, rng, max_hops)
                break
            except InfeasibleChain:
                continue
        if question is None:
            skipped += 1
            continue
        questions.append(question.model_copy(update={"id": f"q{len(questions)}"}))
    if skipped:
        logger.warning(f"Skipped {skipped} questions with no feasible chain")
    return questions


def fixture_questions(world: WorldGraph) -> List[QuestionSpec]:
    """Five hand-picked questions over the fixture world."""
    dob = Anchor(kind=AnchorKind.ATTRIBUTE, key="date_of_birth", value="0984-05-03")
    chains: Dict[str, tuple] = {
        "q0": (dob, [Hop(kind=HopKind.RELATION, name="daughter-in-law"), Hop(kind=HopKind.RELATION, name="friend")]),
        "q1": (Anchor(kind=AnchorKind.NAME, value="Earle Coe"), [Hop(kind=HopKind.RELATION, name="son")]),
        "q2": (dob, [Hop(kind=HopKind.ATTRIBUTE, name="occupation")]),
        "q3": (
            Anchor(kind=AnchorKind.NAME, value="Christoper Coe"),
            [Hop(kind=HopKind.RELATION, name="son"), Hop(kind=HopKind.COUNT)],
        ),
        "q4": (
            Anchor(kind=AnchorKind.NAME, value="Christina Coe"),
            [Hop(kind=HopKind.RELATION, name="husband"), Hop(kind=HopKind.RELATION, name="mother")],
        ),
    }
    return [make_question(world, qid, anchor, chain) for qid, (anchor, chain) in chains.items()]
