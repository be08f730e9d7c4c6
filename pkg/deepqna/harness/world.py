"""Synthetic family-and-friends universes."""

import logging
import random
import re
from datetime import date
from typing import Dict, List, Set

from deepqna.models.world import (
    ATTRIBUTE_KEYS,
    RELATION_ROLES,
    Gender,
    Person,
    WorldGraph,
    WorldSpec,
)

logger = logging.getLogger(__name__)

FEMALE_NAMES = (
    "Alycia", "Bobbie", "Christina", "Lissa", "Marva", "Odessa", "Tressa", "Ilene", "Wynona", "Carmela",
    "Delphia", "Ellyn", "Fawne", "Georgeanne", "Hermina", "Ivette", "Jolene", "Kassie", "Lorine", "Mireya",
    "Nelda", "Orlena", "Petrina", "Queenie", "Rosalva", "Sherrie", "Tamela", "Ursula", "Velda", "Winnifred",
    "Yesenia", "Zelma", "Adelle", "Bettye", "Corrine", "Dorthea", "Elvera", "Filomena", "Gerri", "Hollis",
)
MALE_NAMES = (
    "Earle", "Reggie", "Christoper", "Dorian", "Alphonso", "Barton", "Cletus", "Dewitt", "Elbert", "Ferris",
    "Garnet", "Hobart", "Isiah", "Jarrod", "Kermit", "Lonnie", "Merle", "Norris", "Orville", "Percival",
    "Quincy", "Rosario", "Sheldon", "Thaddeus", "Ulysses", "Vernon", "Wilbert", "Xavier", "Yancey", "Zachery",
    "Ambrose", "Burl", "Cornell", "Delmer", "Emmitt", "Fletcher", "Grover", "Harlan", "Irving", "Jasper",
)
SURNAMES = (
    "Coe", "Luu", "Arvizu", "Bembry", "Calcote", "Dabbs", "Eckles", "Fennell", "Gaddy", "Hackler",
    "Imler", "Jarboe", "Kettler", "Lasseter", "Mcelwee", "Nevins", "Oakes", "Pittman", "Quarles", "Rideout",
    "Sauceda", "Tubbs", "Umphrey", "Vanover", "Wingo", "Yocum", "Zeller", "Ashby", "Burrus", "Crain",
)
OCCUPATIONS = (
    "petroleum engineer", "archivist", "glassblower", "cartographer", "tax adviser", "farrier",
    "radio producer", "orthodontist", "ferry pilot", "stonemason", "actuary", "bookbinder",
    "hydrologist", "set designer", "locksmith", "beekeeper",
)
HOBBIES = (
    "birdwatching", "fencing", "origami", "geocaching", "beekeeping", "calligraphy", "bouldering",
    "pottery", "sailing", "chess", "knitting", "orienteering", "woodturning", "astronomy",
)

PARENT_ROLE = {Gender.FEMALE: "mother", Gender.MALE: "father"}
CHILD_ROLE = {Gender.FEMALE: "daughter", Gender.MALE: "son"}
SPOUSE_ROLE = {Gender.FEMALE: "wife", Gender.MALE: "husband"}

_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


class _Builder:
    """Mutable world under construction."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.persons: Dict[str, Person] = {}
        self.generation: Dict[str, int] = {}
        self.dates: Set[str] = set()

    def new_person(self, gender: Gender, surname: str, generation: int) -> Person:
        pool = FEMALE_NAMES if gender is Gender.FEMALE else MALE_NAMES
        firsts = list(pool)
        self.rng.shuffle(firsts)
        name = next((f"{first} {surname}" for first in firsts if f"{first} {surname}" not in self.persons), None)
        while name is None or name in self.persons:
            name = f"{self.rng.choice(pool)} {chr(ord('A') + self.rng.randrange(26))}. {surname}"
        person = Person(
            name=name,
            gender=gender,
            relations={},
            attributes={
                "date_of_birth": self.unique_date(generation),
                "occupation": self.rng.choice(OCCUPATIONS),
                "hobby": self.rng.choice(HOBBIES),
            },
        )
        self.persons[name] = person
        self.generation[name] = generation
        return person

    def unique_date(self, generation: int) -> str:
        while True:
            year = 900 + 30 * generation + self.rng.randrange(12)
            value = f"{year:04d}-{self.rng.randint(1, 12):02d}-{self.rng.randint(1, 28):02d}"
            if value not in self.dates:
                self.dates.add(value)
                return value

    def link(self, a: Person, role: str, b: Person) -> None:
        targets = a.relations.setdefault(role, [])
        if b.name not in targets:
            targets.append(b.name)

    def marry(self, wife: Person, husband: Person) -> None:
        self.link(wife, "husband", husband)
        self.link(husband, "wife", wife)

    def add_child(self, mother: Person, father: Person, child: Person) -> None:
        for parent in (mother, father):
            self.link(child, PARENT_ROLE[parent.gender], parent)
            self.link(parent, CHILD_ROLE[child.gender], child)

    def befriend(self, a: Person, b: Person) -> None:
        self.link(a, "friend", b)
        self.link(b, "friend", a)


def _random_gender(rng: random.Random) -> Gender:
    return Gender.FEMALE if rng.random() < 0.5 else Gender.MALE


def generate_world(spec: WorldSpec) -> WorldGraph:
    """
    Generate a world as a pure function of (size, seed, schema version).

    Couples are formed either from two newcomers or from an unmarried
    member of an existing family and a newcomer; each couple gets up to
    three children carrying the father's surname. Friendships are added last.

    Args:
        spec: World parameters

    Returns:
        WorldGraph: Exactly `spec.size` persons
    """
    rng = random.Random(f"world:{spec.schema_version}:{spec.size}:{spec.seed}")
    builder = _Builder(rng)
    surnames = list(SURNAMES)
    rng.shuffle(surnames)
    singles: List[Person] = []

    def remaining() -> int:
        return spec.size - len(builder.persons)

    while remaining() > 0:
        if remaining() == 1:
            person = builder.new_person(_random_gender(rng), rng.choice(surnames), 0)
            singles.append(person)
            continue

        if singles and rng.random() < 0.6:
            partner = rng.choice(singles)
            singles.remove(partner)
            generation = builder.generation[partner.name]
            if partner.gender is Gender.MALE:
                husband = partner
                wife = builder.new_person(Gender.FEMALE, husband.name.split()[-1], generation)
            else:
                wife = partner
                husband = builder.new_person(Gender.MALE, rng.choice(surnames), generation)
        else:
            surname = surnames[rng.randrange(len(surnames))]
            husband = builder.new_person(Gender.MALE, surname, 0)
            wife = builder.new_person(Gender.FEMALE, surname, 0)
            generation = 0
        builder.marry(wife, husband)

        for _ in range(min(rng.randint(0, 3), remaining())):
            child = builder.new_person(_random_gender(rng), husband.name.split()[-1], generation + 1)
            builder.add_child(wife, husband, child)
            singles.append(child)

    people = list(builder.persons.values())
    for person in people:
        for _ in range(rng.choice((0, 0, 1, 1, 2))):
            other = rng.choice(people)
            if other is not person:
                builder.befriend(person, other)

    world = WorldGraph(spec=spec, persons=people)
    logger.debug(f"Generated world of {len(people)} persons with seed {spec.seed}")
    return world


def validate_world(world: WorldGraph) -> List[str]:
    """
    Check the world invariants.

    Returns:
        Problem descriptions; empty when the world is valid
    """
    problems: List[str] = []
    names = [p.name for p in world.persons]
    if len(set(names)) != len(names):
        problems.append("person names are not unique")
    people = world.by_name()
    dates: Dict[str, str] = {}

    for person in world.persons:
        for role, targets in person.relations.items():
            if role not in RELATION_ROLES:
                problems.append(f"{person.name}: unknown role {role}")
                continue
            for target_name in targets:
                target = people.get(target_name)
                if target is None:
                    problems.append(f"{person.name}: {role} {target_name} does not exist")
                    continue
                if target_name == person.name:
                    problems.append(f"{person.name} is their own {role}")
                inverse = _inverse(role, person)
                if person.name not in target.related(inverse):
                    problems.append(f"{person.name}: {role} {target_name} lacks the inverse {inverse} link")

        missing = [k for k in ATTRIBUTE_KEYS if k not in person.attributes]
        if missing:
            problems.append(f"{person.name}: missing attributes {', '.join(missing)}")
        dob = person.attributes.get("date_of_birth", "")
        if not _valid_date(dob):
            problems.append(f"{person.name}: malformed date of birth {dob!r}")
        elif dob in dates:
            problems.append(f"{person.name} and {dates[dob]} share the date of birth {dob}")
        else:
            dates[dob] = person.name
    return problems


def _inverse(role: str, person: Person) -> str:
    if role in ("mother", "father"):
        return CHILD_ROLE[person.gender]
    if role in ("son", "daughter"):
        return PARENT_ROLE[person.gender]
    if role in ("wife", "husband"):
        return SPOUSE_ROLE[person.gender]
    return "friend"


def _valid_date(value: str) -> bool:
    if not _DATE.match(value):
        return False
    year, month, day = (int(part) for part in value.split("-"))
    try:
        date(year, month, day)
    except ValueError:
        return False
    return True


def fixture_world() -> WorldGraph:
    """A small hand-built world around the Coe family."""
    people = {
        "Christoper Coe": (Gender.MALE, "0951-02-17", "stonemason", "chess"),
        "Alycia Coe": (Gender.FEMALE, "0953-09-30", "archivist", "pottery"),
        "Earle Coe": (Gender.MALE, "0984-05-03", "petroleum engineer", "sailing"),
        "Christina Coe": (Gender.FEMALE, "0985-11-12", "cartographer", "origami"),
        "Dorian Coe": (Gender.MALE, "0987-07-21", "farrier", "fencing"),
        "Reggie Coe": (Gender.MALE, "1012-01-08", "ferry pilot", "astronomy"),
        "Lissa Coe": (Gender.FEMALE, "1013-06-25", "beekeeper", "knitting"),
        "Bobbie Luu": (Gender.FEMALE, "1011-03-14", "actuary", "bouldering"),
    }
    builder = _Builder(random.Random(0))
    for name, (gender, dob, occupation, hobby) in people.items():
        builder.persons[name] = Person(
            name=name,
            gender=gender,
            attributes={"date_of_birth": dob, "occupation": occupation, "hobby": hobby},
        )
    p = builder.persons
    builder.add_child(p["Alycia Coe"], p["Christoper Coe"], p["Earle Coe"])
    builder.add_child(p["Alycia Coe"], p["Christoper Coe"], p["Dorian Coe"])
    builder.marry(p["Alycia Coe"], p["Christoper Coe"])
    builder.add_child(p["Christina Coe"], p["Earle Coe"], p["Reggie Coe"])
    builder.marry(p["Christina Coe"], p["Earle Coe"])
    builder.marry(p["Lissa Coe"], p["Reggie Coe"])
    builder.befriend(p["Lissa Coe"], p["Bobbie Luu"])
    return WorldGraph(spec=WorldSpec(size=len(people), seed=0), persons=list(p.values()))


def persons_matching(world: WorldGraph, key: str, value: str) -> List[Person]:
    return [p for p in world.persons if p.attributes.get(key) == value]
