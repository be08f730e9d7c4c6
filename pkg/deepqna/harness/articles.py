"""Rendering worlds as article corpora."""

import re
from typing import List

from deepqna.models.document import Document
from deepqna.models.world import ATTRIBUTE_KEYS, RELATION_ROLES, Person, WorldGraph, attribute_words

FAMILY_HEADER = "## Family"
ATTRIBUTES_HEADER = "## Attributes"


def article_id(name: str) -> str:
    """File-system friendly id derived from a person's name."""
    return re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")


def render_article(person: Person) -> Document:
    """One person's article: relation lines under Family, attribute lines under Attributes."""
    lines = [f"# {person.name}", FAMILY_HEADER]
    for role in RELATION_ROLES:
        for target in person.related(role):
            lines.append(f"The {role} of {person.name} is {target}.")
    lines.append(ATTRIBUTES_HEADER)
    for key in ATTRIBUTE_KEYS:
        if key in person.attributes:
            lines.append(f"The {attribute_words(key)} of {person.name} is {person.attributes[key]}.")
    return Document(id=article_id(person.name), title=person.name, body="\n".join(lines))


def render_articles(world: WorldGraph) -> List[Document]:
    """
    One document per person, titled with the person's name.

    Args:
        world: World to render

    Returns:
        Documents in world order
    """
    return [render_article(person) for person in world.persons]
