"""Symbolic coding of white tiles and preimage points by words over d letters."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Optional

from .complex import TILE, CellRef, ComplexTower
from .dynamics import PointAddress, pull_back
from .measure import TileMeasure
from .rulekit import BLACK, WHITE, SubdivisionRule
from .utils.general import ThurstonError


DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


class NonGenericBasePoint(ThurstonError):
    pass


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...]
    d: int

    def __post_init__(self):
        for letter in self.letters:
            if not 0 <= letter < self.d:
                raise ValueError(f"letter {letter} is outside the alphabet 0..{self.d - 1}")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return word_to_string(self)

    def shift(self) -> "Word":
        return shift(self)


def word_from_string(text: str, d: int) -> Word:
    if d > len(DIGITS):
        raise ValueError(f"words can be written for d <= {len(DIGITS)}, got d = {d}")
    letters = []
    for ch in text.strip().lower():
        value = DIGITS.find(ch)
        if value < 0 or value >= d:
            raise ValueError(f"'{ch}' is not a digit in base {d}")
        letters.append(value)
    return Word(tuple(letters), d)


def word_to_string(word: Word) -> str:
    if word.d > len(DIGITS):
        raise ValueError(f"words can be written for d <= {len(DIGITS)}, got d = {word.d}")
    return "".join(DIGITS[x] for x in word.letters)


def shift(word: Word) -> Word:
    """Drop the first letter."""
    if not word.letters:
        raise ValueError("the empty word cannot be shifted")
    return Word(word.letters[1:], word.d)


def all_words(n: int, d: int) -> Iterator[Word]:
    for letters in product(range(d), repeat=n):
        yield Word(letters, d)


@dataclass(frozen=True)
class CodingTable:
    """Letter -> level-1 tile, one bijection per color."""

    white_order: tuple[int, ...]
    black_order: tuple[int, ...]

    def order(self, color: int) -> tuple[int, ...]:
        return self.white_order if color == WHITE else self.black_order

    def validate(self, rule: SubdivisionRule) -> None:
        for color in (WHITE, BLACK):
            expected = sorted(i for i, t in enumerate(rule.tiles) if t.color == color)
            if sorted(self.order(color)) != expected or len(expected) != rule.d:
                raise ValueError(
                    f"coding table is not a bijection onto the {rule.d} level-1 tiles "
                    f"of color {color}"
                )


def default_coding_table(rule: SubdivisionRule) -> CodingTable:
    return CodingTable(
        white_order=tuple(i for i, t in enumerate(rule.tiles) if t.color == WHITE),
        black_order=tuple(i for i, t in enumerate(rule.tiles) if t.color == BLACK),
    )


def _table(tower: ComplexTower, table: Optional[CodingTable]) -> CodingTable:
    if table is None:
        return default_coding_table(tower.rule)
    table.validate(tower.rule)
    return table


def _check_word(tower: ComplexTower, word: Word) -> None:
    if word.d != tower.d:
        raise ValueError(f"word over {word.d} letters used with a degree-{tower.d} map")


def word_to_tile(
    tower: ComplexTower, word: Word, table: Optional[CodingTable] = None
) -> CellRef:
    """The white level-n tile coded by a word of length n.

    tile(i·I) is the tile inside the level-1 sheet chosen by i whose image is
    tile(I); the sheet is taken from the color class of tile(I)'s 0-tile.
    """
    _check_word(tower, word)
    table = _table(tower, table)
    t = CellRef(0, TILE, WHITE)
    for letter in reversed(word.letters):
        cx = tower.level(t.level)
        sheet = table.order(cx.root[TILE][t.id][1])[letter]
        finer = tower.level(t.level + 1)
        t = CellRef(t.level + 1, TILE, finer.lookup(TILE, (TILE, sheet, t.id)))
    return t


def tile_to_word(
    tower: ComplexTower, t: CellRef, table: Optional[CodingTable] = None
) -> Word:
    table = _table(tower, table)
    if t.dim != TILE or tower.level(t.level).color(t.id) != WHITE:
        raise ValueError(f"{t} is not a white tile")
    letters = []
    while t.level > 0:
        _, sheet, image = tower.level(t.level).keys[TILE][t.id]
        letters.append(table.order(tower.sheets.tile_color[sheet]).index(sheet))
        t = CellRef(t.level - 1, TILE, image)
    return Word(tuple(letters), tower.d)


def word_to_preimage(
    tower: ComplexTower,
    word: Word,
    p: PointAddress,
    table: Optional[CodingTable] = None,
) -> PointAddress:
    """The point of f^-n(p) lying in tile(word)."""
    _check_word(tower, word)
    if not p.is_generic or p.cells[0].id != WHITE:
        raise NonGenericBasePoint(f"{p} is not an interior point of the white 0-tile")
    table = _table(tower, table)
    q = p
    for letter in reversed(word.letters):
        q = pull_back(tower, q, (TILE, table.order(q.cells[0].id)[letter]))
    return q


def cylinder_pushforward(
    tower: ComplexTower, n: int, level: int, table: Optional[CodingTable] = None
) -> TileMeasure:
    """Uniform measure on words of length n, pushed to level-m ancestors of tile(I)."""
    if not 0 <= level <= n:
        raise ValueError(f"need 0 <= level <= n, got level={level}, n={n}")
    table = _table(tower, table)
    masses = [Fraction(0)] * tower.level(level).num_tiles
    weight = Fraction(1, tower.d**n)
    for word in all_words(n, tower.d):
        ancestor = tower.ancestor(word_to_tile(tower, word, table), level)
        masses[ancestor.id] += weight
    return TileMeasure(level, tuple(masses))
