import random

import pytest

from cswp.core import BINARY01, FULL, Const, Free, Instruction, MemRead, PriorOutput, Program
from cswp.textfmt import ParseError, parse_program, serialize_program

from randprog import random_program


class TestParse:
    def test_minimal_program(self):
        p = parse_program("width 4\no1: mov #0x0\n")
        assert p.width == 4
        assert p.mem_size == 0
        assert len(p.instructions) == 1
        assert p.instructions[0] == Instruction("mov", (Const(0),))

    def test_full_header_and_sources(self):
        text = (
            "width 8\n"
            "mem 4\n"
            "free a 01\n"
            "free b full\n"
            "o1: mov freea\n"
            "o2: xor o1, #0x1\n"
            "o3: store o2 -> m[3]\n"
            "o4: load m[3]\n"
            "o5: ite o4, freeb, #0xff\n"
        )
        p = parse_program(text)
        assert p.free_inputs == (("a", BINARY01), ("b", FULL))
        assert p.instructions[0].inputs == (Free("a", BINARY01),)
        assert p.instructions[2].mem_dest == 3
        assert p.instructions[3].inputs == (MemRead(3),)
        assert p.instructions[4].inputs == (PriorOutput(3), Free("b", FULL), Const(0xFF))

    def test_comments_and_blank_lines_ignored(self):
        text = (
            "# a comment\n"
            "width 4\n"
            "\n"
            "o1: mov #0x5  # trailing comment\n"
        )
        p = parse_program(text)
        assert p.instructions[0] == Instruction("mov", (Const(5),))

    def test_hex_constant_not_eaten_by_comment_stripping(self):
        p = parse_program("width 8\no1: mov #0xab # but this is a comment\n")
        assert p.instructions[0] == Instruction("mov", (Const(0xAB),))

    def test_wrong_arity_is_a_parse_error_with_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_program("width 4\no1: add free0\n")

    def test_nonsequential_index_rejected(self):
        with pytest.raises(ParseError, match="o3"):
            parse_program("width 4\no3: mov #0x0\n")

    def test_unknown_mnemonic_rejected(self):
        with pytest.raises(ParseError, match="frob"):
            parse_program("width 4\no1: frob #0x0\n")

    def test_missing_width_rejected(self):
        with pytest.raises(ParseError, match="width"):
            parse_program("o1: mov #0x0\n")

    def test_bad_source_rejected(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_program("width 4\no1: mov ??\n")

    def test_header_after_instructions_rejected(self):
        with pytest.raises(ParseError, match="precede"):
            parse_program("width 4\no1: mov #0x0\nmem 2\n")


class TestRoundTrip:
    def test_simple_round_trip(self):
        p = Program(
            width=4,
            mem_size=2,
            instructions=(
                Instruction("mov", (Free("x", BINARY01),)),
                Instruction("store", (PriorOutput(0),), mem_dest=1),
                Instruction("or", (PriorOutput(0), Const(0x3))),
            ),
            free_inputs=(("x", BINARY01),),
        )
        assert parse_program(serialize_program(p)) == p

    def test_random_programs_round_trip(self):
        rng = random.Random(23)
        for _ in range(200):
            p = random_program(rng)
            assert parse_program(serialize_program(p)) == p

    def test_serialize_is_stable(self):
        rng = random.Random(5)
        p = random_program(rng)
        assert serialize_program(p) == serialize_program(p)
