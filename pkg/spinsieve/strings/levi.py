"""Levi subsets of a Dynkin diagram and the string count built on them.

A Levi subset is any set of simple roots. Its induced subdiagram splits into
connected components of type A, D or E, each identified with its own Bourbaki
labels through a node map. An I-string of the Dirac series attaches to a Levi
subset the scattered part of each factor, so the number of strings on the
subsets of size i is a sum of products of per-type scattered counts N_G.
"""

import json
import logging
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations
from math import prod
from pathlib import Path

import networkx as nx

from spinsieve.common.constants import (
    PINNED_STRING_CONSTANTS,
    PUBLISHED_STRING_COUNTS,
    STRING_CONSTANT_TYPES,
)
from spinsieve.common.exceptions import ConstantsError, UsageError
from spinsieve.common.rootsystem import RootDatum, parse_type_label
from spinsieve.common.weyl import InvolutionRecord, WeylElement, from_word

logger = logging.getLogger(__name__)

# Components sort E before D before A, then by rank, largest first.
FAMILY_ORDER: dict[str, int] = {"E": 2, "D": 1, "A": 0}


@dataclass(frozen=True)
class LeviComponent:
    """A connected component; ``node_map[i - 1]`` is the node carrying label i."""

    type_label: str
    node_map: tuple[int, ...]

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(self.node_map)

    @property
    def sort_key(self) -> tuple[int, int]:
        family, rank = parse_type_label(self.type_label)
        return FAMILY_ORDER[family], rank


@dataclass(frozen=True)
class LeviSubset:
    nodes: frozenset[int]
    components: tuple[LeviComponent, ...]

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def type_key(self) -> tuple[str, ...]:
        """Component types, largest first."""
        ordered = sorted(self.components, key=lambda c: c.sort_key, reverse=True)
        return tuple(component.type_label for component in ordered)

    def component_of(self, node: int) -> LeviComponent:
        for component in self.components:
            if node in component.nodes:
                return component
        raise UsageError(f"Node {node} is not in the Levi subset {sorted(self.nodes)}")


def _arm(graph: nx.Graph, branch: int, start: int) -> list[int]:
    """The path leaving ``branch`` through ``start``, in order."""
    path = [start]
    previous, current = branch, start
    while True:
        following = [n for n in graph.neighbors(current) if n != previous]
        if not following:
            return path
        previous, current = current, following[0]
        path.append(current)


def _classify_component(graph: nx.Graph) -> LeviComponent:
    nodes = sorted(graph.nodes)
    size = len(nodes)
    branches = [n for n in nodes if graph.degree(n) >= 3]

    if not branches:
        if size == 1:
            return LeviComponent("A1", (nodes[0],))
        ends = sorted(n for n in nodes if graph.degree(n) == 1)
        order = nx.shortest_path(graph, ends[0], ends[1])
        return LeviComponent(f"A{size}", tuple(order))

    branch = branches[0]
    arms = sorted(
        (_arm(graph, branch, start) for start in graph.neighbors(branch)),
        key=lambda arm: (len(arm), max(arm)),
    )
    lengths = tuple(len(arm) for arm in arms)

    if lengths[:2] == (1, 1):
        # D_k: label 1 ends the long arm, label k-2 is the branch node and the
        # two short leaves get k-1, k in descending node order.
        long_arm = arms[2]
        leaves = sorted((arms[0][0], arms[1][0]), reverse=True)
        return LeviComponent(f"D{size}", tuple(reversed(long_arm)) + (branch, *leaves))

    if lengths == (1, 2, 2):
        # E6: label 2 is the short leaf, labels 3, 1 follow the arm holding the
        # smaller node.
        first, second = sorted(arms[1:], key=min)
        node_map = (first[1], arms[0][0], first[0], branch, second[0], second[1])
        return LeviComponent("E6", node_map)

    if lengths == (1, 2, 3):
        node_map = (arms[1][1], arms[0][0], arms[1][0], branch, *arms[2])
        return LeviComponent("E7", node_map)

    raise UsageError(f"Subdiagram on {nodes} is not of type A, D or E")


def classify(datum: RootDatum, nodes: Iterable[int]) -> LeviSubset:
    """Split a set of nodes into typed components."""

    node_set = frozenset(int(n) for n in nodes)
    if not node_set <= set(range(1, datum.rank + 1)):
        raise UsageError(f"Nodes {sorted(node_set)} outside 1..{datum.rank}")
    diagram = datum.dynkin_diagram().subgraph(node_set)
    components = tuple(
        _classify_component(diagram.subgraph(component).copy())
        for component in sorted(nx.connected_components(diagram), key=min)
    )
    return LeviSubset(node_set, components)


def classify_levi_subsets(datum: RootDatum) -> list[LeviSubset]:
    """All 2^rank Levi subsets, by size then node order."""

    nodes = range(1, datum.rank + 1)
    return [
        classify(datum, subset)
        for size in range(datum.rank + 1)
        for subset in combinations(nodes, size)
    ]


def format_type_key(type_key: Sequence[str]) -> str:
    """``A2A1A1`` style key; a type repeated four or more times becomes ``A1^4``."""
    if not type_key:
        return "empty"
    counts = Counter(type_key)
    parts = []
    for label in dict.fromkeys(type_key):
        count = counts[label]
        parts.append(f"{label}^{count}" if count >= 4 else label * count)
    return "".join(parts)


def coefficient_table(datum: RootDatum) -> dict[int, dict[tuple[str, ...], int]]:
    """Number of Levi subsets per size and component type multiset."""

    table: dict[int, Counter] = {size: Counter() for size in range(datum.rank + 1)}
    for levi in classify_levi_subsets(datum):
        table[levi.size][levi.type_key] += 1

    def order(key: tuple[str, ...]) -> tuple:
        # Largest component first; on a tie the finer split of the rest wins.
        ranked = [(FAMILY_ORDER[label[0]], int(label[1:])) for label in key]
        return ranked[:1], len(ranked), ranked[1:]

    return {
        size: dict(sorted(counts.items(), key=lambda item: order(item[0]), reverse=True))
        for size, counts in table.items()
    }


def format_coefficient_line(coefficients: Mapping[tuple[str, ...], int]) -> str:
    return " ".join(f"{format_type_key(key)}:{count}" for key, count in coefficients.items())


@dataclass(frozen=True)
class StringConstants:
    """Per-type scattered counts N_G, each with the source it was taken from."""

    values: dict[str, int]
    sources: dict[str, str]

    def missing(self, labels: Iterable[str] = STRING_CONSTANT_TYPES) -> list[str]:
        return sorted(set(labels) - set(self.values))


def load_constants(path: str | Path) -> StringConstants:
    """Read ``{"A1": {"value": 1, "source": "..."}, ...}``.

    Raises:
        ConstantsError: If the file cannot be read or an entry is malformed.
    """
    try:
        with open(path, encoding="utf-8") as constants_file:
            raw = json.load(constants_file)
    except (OSError, json.JSONDecodeError) as ex:
        raise ConstantsError(f"Could not read string constants {path}: {ex}") from ex

    values, sources, problems = {}, {}, []
    for label, entry in raw.items():
        if not isinstance(entry, dict) or not isinstance(entry.get("value"), int):
            problems.append(f"{label}: expected an object with an integer 'value'")
            continue
        if not entry.get("source"):
            problems.append(f"{label}: missing 'source'")
            continue
        values[label] = entry["value"]
        sources[label] = entry["source"]
    if problems:
        raise ConstantsError(f"Malformed string constants in {path}", problems)
    return StringConstants(values, sources)


def count_strings(
    datum: RootDatum, constants: StringConstants, strict: bool = True
) -> tuple[tuple[int, ...], int]:
    """(N_0, ..., N_{rank-1}) and their total.

    N_i sums, over the Levi subsets of size i, the product of N_G over their
    components. The full diagram is the scattered part itself and is not a
    string.

    Raises:
        ConstantsError: If an entry is missing, or with ``strict`` if the
            constants contradict the pinned values or the published counts.
    """
    table = coefficient_table(datum)
    needed = {label for size in range(datum.rank) for key in table[size] for label in key}
    missing = constants.missing(needed)
    if missing:
        raise ConstantsError(f"Missing string constants: {', '.join(missing)}", missing)

    counts = tuple(
        sum(
            coefficient * prod(constants.values[label] for label in key)
            for key, coefficient in table[size].items()
        )
        for size in range(datum.rank)
    )

    if datum.type_label == "E7":
        problems = [
            f"N_{label} = {constants.values[label]}, expected {expected}"
            for label, expected in PINNED_STRING_CONSTANTS.items()
            if constants.values[label] != expected
        ]
        problems += [
            f"N_{size} = {count}, expected {expected}"
            for size, (count, expected) in enumerate(zip(counts, PUBLISHED_STRING_COUNTS))
            if count != expected
        ]
        if problems and strict:
            raise ConstantsError("Inconsistent string constants", problems)
        for problem in problems:
            logger.warning("Inconsistent string constants: %s", problem)

    return counts, sum(counts)


def embed_levi_involution(
    datum: RootDatum, levi: LeviSubset, elements: Sequence[WeylElement]
) -> InvolutionRecord:
    """Rewrite one involution per Levi component as an element of the full group.

    Raises:
        UsageError: If the elements do not match the components or one of them
            is not an involution.
    """
    if len(elements) != len(levi.components):
        raise UsageError(
            f"{len(levi.components)} components but {len(elements)} elements given"
        )
    word: list[int] = []
    for component, element in zip(levi.components, elements):
        if element.datum.type_label != component.type_label:
            raise UsageError(
                f"{element!r} does not belong to the {component.type_label} component"
            )
        if not element.is_involution:
            raise UsageError(f"{element!r} is not an involution")
        letters = element.word
        if letters is None:
            raise UsageError(f"{element!r} carries no word to embed")
        word.extend(component.node_map[i - 1] for i in letters)
    return InvolutionRecord.from_element(from_word(datum, word))
