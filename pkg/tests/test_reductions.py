import itertools
import random

import pytest

from cswp.analysis import brute_force_worst_case, maxsat_oracle
from cswp.core import CswpError, evaluate_switching, execute, validate_program
from cswp.reductions import (
    build_checksat_program,
    embed_assignment,
    emit_checksat,
    lit_addr,
    load_gap,
    load_reduced,
    recover_assignment,
    reduce_maxsat2,
    reduce_sat_gap,
    serialize_gap,
    serialize_reduced,
)
from cswp.sat import Literal, MaxSat2Instance, SatInstance, count_satisfied


def all_assignments(n):
    return itertools.product((False, True), repeat=n)


def random_maxsat2(rng, max_vars=4, max_clauses=6):
    n = rng.randint(1, max_vars)
    clauses = [
        [rng.choice([1, -1]) * rng.randint(1, n) for _ in range(rng.randint(1, 2))]
        for _ in range(rng.randint(0, max_clauses))
    ]
    return MaxSat2Instance(n, clauses)


def random_sat(rng, max_vars=3, max_clauses=8):
    n = rng.randint(1, max_vars)
    clauses = [
        [rng.choice([1, -1]) * v
         for v in rng.sample(range(1, n + 1), rng.randint(1, n))]
        for _ in range(rng.randint(1, max_clauses))
    ]
    return SatInstance(n, clauses)


class TestReduceMaxsat2:
    def test_single_unit_clause(self):
        inst = MaxSat2Instance(1, [[1]])
        red = reduce_maxsat2(inst, width=4)
        assert validate_program(red.program) == []
        result = brute_force_worst_case(red.program)
        # oracle first: the instance is satisfiable, so one clause at best
        best, _ = maxsat_oracle(inst)
        assert best == 1
        assert result.max_switching == red.k_var + red.k_clause + 2
        assert result.witness == {"0": 1}

    def test_no_clauses_gives_constant_switching(self):
        red = reduce_maxsat2(MaxSat2Instance(1, []), width=4)
        totals = {
            evaluate_switching(red.program, embed_assignment(red, [b])).total
            for b in (False, True)
        }
        assert totals == {red.k_var}

    def test_complementary_units(self):
        inst = MaxSat2Instance(2, [[1], [-1]])
        red = reduce_maxsat2(inst, width=4)
        best, _ = maxsat_oracle(inst)
        assert best == 1
        result = brute_force_worst_case(red.program)
        assert result.max_switching == 2 * red.k_var + 2 * red.k_clause + 2
        # every assignment satisfies exactly one of the two clauses
        for bools in all_assignments(2):
            total = evaluate_switching(red.program, embed_assignment(red, bools)).total
            assert total == result.max_switching

    def test_identity_on_random_instances(self):
        rng = random.Random(101)
        for _ in range(30):
            inst = random_maxsat2(rng)
            red = reduce_maxsat2(inst, width=rng.randint(1, 8))
            for bools in all_assignments(inst.num_vars):
                total = evaluate_switching(red.program, embed_assignment(red, bools)).total
                assert total == red.predicted_switching(count_satisfied(inst, bools))

    def test_literal_addresses_follow_layout(self):
        red = reduce_maxsat2(MaxSat2Instance(3, [[1, -2], [3]]), width=4)
        for i in (1, 2, 3):
            assert red.lit_to_addr[Literal(i, False)] == 2 * (i - 1)
            assert red.lit_to_addr[Literal(i, True)] == 2 * (i - 1) + 1
        assert lit_addr(Literal(2, True)) == 3

    def test_program_length_is_instance_sized(self):
        # a*n + b*|C| + 1 instructions, independent of any assignment
        for n, m in [(1, 0), (2, 3), (4, 6)]:
            inst = MaxSat2Instance(n, [[1]] * m)
            red = reduce_maxsat2(inst, width=4)
            assert len(red.program.instructions) == 1 + 5 * n + 8 * m

    def test_invalid_width_rejected(self):
        with pytest.raises(CswpError):
            reduce_maxsat2(MaxSat2Instance(1, [[1]]), width=0)


class TestEmitChecksat:
    def run_checksat(self, instance, bools, width=4):
        program, result_index = build_checksat_program(instance, width=width)
        assignment = {str(i): int(b) for i, b in enumerate(bools)}
        return execute(program, assignment).outputs[result_index].value

    def test_positive_unit(self):
        assert self.run_checksat(SatInstance(1, [[1]]), [True]) == 1

    def test_negated_unit(self):
        assert self.run_checksat(SatInstance(1, [[-1]]), [True]) == 0

    def test_two_clause_example(self):
        inst = SatInstance(2, [[1, 2], [-1]])
        assert self.run_checksat(inst, [False, True]) == 1

    def test_matches_direct_evaluation_everywhere(self):
        rng = random.Random(103)
        for _ in range(25):
            inst = random_sat(rng)
            for bools in all_assignments(inst.num_vars):
                expected = 1 if count_satisfied(inst, bools) == len(inst.clauses) else 0
                assert self.run_checksat(inst, bools) == expected

    def test_empty_clause_set_is_true(self):
        assert self.run_checksat(SatInstance(1, []), [False]) == 1

    def test_instruction_count_linear_in_literals(self):
        inst = SatInstance(3, [[1, -2, 3], [-1, 2], [3]])
        insns, _ = emit_checksat(inst, 0)
        literal_occurrences = 6
        negations = 2
        ors = 3  # one less than clause length, per clause
        ands = 2
        assert len(insns) == literal_occurrences + negations + ors + ands


class TestReduceSatGap:
    def test_satisfiable_unit(self):
        gap = reduce_sat_gap(SatInstance(1, [[1]]), width=4)
        assert validate_program(gap.program) == []
        report = evaluate_switching(gap.program, {"0": 1})
        phase = gap.phase_transitions(report.transitions)
        assert phase == (4,) * (gap.switching_len - 1)
        assert brute_force_worst_case(gap.program).max_switching >= gap.gap_bits

    def test_unsatisfiable_phase_is_silent(self):
        gap = reduce_sat_gap(SatInstance(1, [[1], [-1]]), width=4)
        for v in (0, 1):
            report = evaluate_switching(gap.program, {"0": v})
            assert gap.phase_transitions(report.transitions) == (0,) * (gap.switching_len - 1)

    def test_phase_length_rule(self):
        for n_clauses in (1, 3, 6):
            inst = SatInstance(2, [[1, 2]] * n_clauses)
            gap = reduce_sat_gap(inst, width=4)
            assert gap.switching_len >= gap.decision_len / 2 + 1
            assert gap.decision_len + gap.switching_len == len(gap.program.instructions)

    def test_factor_scales_phase(self):
        inst = SatInstance(3, [[1, 2, 3]])
        gap1 = reduce_sat_gap(inst, width=4, factor=1)
        gap2 = reduce_sat_gap(inst, width=4, factor=2)
        assert gap2.decision_len == gap1.decision_len
        assert gap2.switching_len >= 2 * gap2.decision_len

    def test_fractional_factor(self):
        inst = SatInstance(2, [[1], [2]])
        gap = reduce_sat_gap(inst, width=4, factor=1.5)
        assert gap.switching_len >= 1.5 * gap.decision_len / 2 + 1

    def test_factor_below_one_rejected(self):
        with pytest.raises(CswpError):
            reduce_sat_gap(SatInstance(1, [[1]]), width=4, factor=0.5)

    def test_gap_bits_definition(self):
        gap = reduce_sat_gap(SatInstance(1, [[1]]), width=8)
        assert gap.gap_bits == 8 * (gap.switching_len - 1)

    def test_phase_alternates_pattern_and_zero(self):
        from cswp.core import Const, PriorOutput
        gap = reduce_sat_gap(SatInstance(2, [[1, -2]]), width=4)
        phase = gap.program.instructions[gap.decision_len:]
        bit_pattern = PriorOutput(gap.decision_len - 1)
        for i, insn in enumerate(phase):
            assert insn.mnemonic == "mov"
            assert insn.inputs == ((bit_pattern,) if i % 2 == 0 else (Const(0),))

    def test_size_polynomial_in_instance_and_factor(self):
        rng = random.Random(109)
        for _ in range(10):
            inst = random_sat(rng)
            literals = sum(len(c) for c in inst.clauses)
            for factor in (1, 2, 3):
                gap = reduce_sat_gap(inst, width=4, factor=factor)
                # decision: 2n reads/stores + at most 2 insns per literal
                # + clause/conjunction folds + the widening ite
                decision_cap = 2 * inst.num_vars + 2 * literals + len(inst.clauses) + 2
                assert gap.decision_len <= decision_cap
                assert gap.switching_len <= factor * gap.decision_len + 4

    def test_program_length_independent_of_assignment(self):
        rng = random.Random(107)
        for _ in range(10):
            inst = random_sat(rng)
            gap = reduce_sat_gap(inst, width=2)
            lengths = set()
            for bools in all_assignments(inst.num_vars):
                trace = execute(gap.program, {str(i): int(b) for i, b in enumerate(bools)})
                lengths.add(len(trace.outputs))
            assert len(lengths) == 1


class TestEmbedRecover:
    def test_embed_examples(self):
        red = reduce_maxsat2(MaxSat2Instance(1, [[1]]), width=4)
        assert embed_assignment(red, [True]) == {"0": 1}
        red2 = reduce_maxsat2(MaxSat2Instance(2, []), width=4)
        assert embed_assignment(red2, [False, True]) == {"0": 0, "1": 1}

    def test_round_trip(self):
        red = reduce_maxsat2(MaxSat2Instance(3, [[1, 2]]), width=4)
        for bools in all_assignments(3):
            assert recover_assignment(red, embed_assignment(red, list(bools))) == list(bools)

    def test_recover_from_witness_attains_oracle(self):
        inst = MaxSat2Instance(2, [[1], [2]])
        red = reduce_maxsat2(inst, width=4)
        result = brute_force_worst_case(red.program)
        bools = recover_assignment(red, result.witness)
        best, _ = maxsat_oracle(inst)
        assert best == 2
        assert count_satisfied(inst, bools) == best
        # the identity also recovers the count from the switching total
        assert (result.max_switching - red.k_var * 2 - red.k_clause * 2) // red.k_sat == best

    def test_arity_mismatch_rejected(self):
        red = reduce_maxsat2(MaxSat2Instance(2, []), width=4)
        with pytest.raises(CswpError):
            embed_assignment(red, [True])

    def test_non_binary_witness_rejected(self):
        red = reduce_maxsat2(MaxSat2Instance(1, []), width=4)
        with pytest.raises(CswpError, match="not 0/1"):
            recover_assignment(red, {"0": 5})


class TestMetadataRoundTrip:
    def test_reduced_program_file(self):
        red = reduce_maxsat2(MaxSat2Instance(2, [[1, -2], [2]]), width=4)
        text = serialize_reduced(red)
        back = load_reduced(text)
        assert back.program == red.program
        assert back.lit_to_addr == red.lit_to_addr
        assert (back.k_var, back.k_clause, back.k_sat) == (red.k_var, red.k_clause, red.k_sat)
        assert (back.num_vars, back.num_clauses) == (red.num_vars, red.num_clauses)

    def test_gap_program_file(self):
        gap = reduce_sat_gap(SatInstance(2, [[1], [-2]]), width=4, factor=2)
        back = load_gap(serialize_gap(gap))
        assert back == gap

    def test_meta_lines_present(self):
        red = reduce_maxsat2(MaxSat2Instance(1, [[1]]), width=4)
        text = serialize_reduced(red)
        assert "# meta kind=maxsat2" in text
        assert "# lit x1 -> m[0]" in text
        assert "# lit ~x1 -> m[1]" in text
