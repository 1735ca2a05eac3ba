"""Exact worst-case switching by exhaustive enumeration, Boolean-side oracles,
and the two sound upper bounds (coarse max-activity and known-bits).

Enumeration is the only exact method on offer: the worst case over free inputs
is exponential in the input bits, and the budget guard turns that wall into an
explicit error instead of a silently truncated "maximum".
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import prod

from .core import (
    BINARY01,
    Const,
    CswpError,
    Free,
    MemRead,
    Program,
    ProgramValidationError,
    _run_values,
    validate_program,
)
from .knownbits import KnownBits, knownbits_transfer
from .sat import MaxSat2Instance, SatInstance, all_satisfied, count_satisfied

DEFAULT_BUDGET = 1 << 24


class EnumerationBudgetError(CswpError):
    """Exhaustive enumeration would exceed the assignment budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"exhaustive search needs {required} assignments, budget is {budget}"
        )


@dataclass
class WorstCaseResult:
    """Exact maximum switching, the lexicographically smallest witness
    (free inputs in declaration order, values as unsigned integers), and the
    number of assignments enumerated."""

    max_switching: int
    witness: dict
    explored: int

    def report_lines(self) -> list[str]:
        lines = [f"max={self.max_switching}"]
        for name, value in self.witness.items():
            lines.append(f"witness.free{name}=0x{value:x}")
        lines.append(f"explored={self.explored}")
        return lines


def _input_domains(program: Program) -> tuple[list[str], list[range]]:
    names = [name for name, _ in program.free_inputs]
    domains = [
        range(2) if domain == BINARY01 else range(1 << program.width)
        for _, domain in program.free_inputs
    ]
    return names, domains


def _scan_range(program: Program, names, domains, lo: int, hi: int):
    """Best (total, witness values) over enumeration indices [lo, hi): first
    attaining tuple in lexicographic order wins."""
    best = -1
    best_combo = None
    for combo in itertools.islice(itertools.product(*domains), lo, hi):
        outputs, _, _ = _run_values(program, dict(zip(names, combo)))
        total = 0
        for i in range(len(outputs) - 1):
            total += (outputs[i] ^ outputs[i + 1]).bit_count()
        if total > best:
            best = total
            best_combo = combo
    return best, best_combo


def brute_force_worst_case(
    program: Program,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> WorstCaseResult:
    """Enumerate every free-input assignment and return the exact maximum.

    With workers > 1 the assignment space is split into contiguous chunks;
    the merge keeps the maximum and breaks ties toward the earlier chunk, so
    the result is identical to the sequential scan.
    """
    violations = validate_program(program)
    if violations:
        raise ProgramValidationError(violations)

    names, domains = _input_domains(program)
    total_assignments = prod(len(d) for d in domains)
    if total_assignments > budget:
        raise EnumerationBudgetError(total_assignments, budget)

    if workers <= 1 or total_assignments < 2 * workers:
        best, combo = _scan_range(program, names, domains, 0, total_assignments)
    else:
        chunk = -(-total_assignments // workers)
        bounds = [
            (lo, min(lo + chunk, total_assignments))
            for lo in range(0, total_assignments, chunk)
        ]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda b: _scan_range(program, names, domains, *b), bounds)
            )
        best, combo = -1, None
        for cand_best, cand_combo in results:  # chunk order == enumeration order
            if cand_best > best:
                best, combo = cand_best, cand_combo

    return WorstCaseResult(
        max_switching=best,
        witness=dict(zip(names, combo)),
        explored=total_assignments,
    )


# ---------------------------------------------------------------------------
# Boolean-side oracles (independent of program execution)

def _check_bool_budget(num_vars: int, budget: int):
    if 1 << num_vars > budget:
        raise EnumerationBudgetError(1 << num_vars, budget)


def maxsat_oracle(
    instance: MaxSat2Instance, budget: int = DEFAULT_BUDGET
) -> tuple[int, tuple[bool, ...]]:
    """Exact maximum satisfied-clause count and the lexicographically smallest
    maximizing assignment (False < True, variables in index order)."""
    _check_bool_budget(instance.num_vars, budget)
    best = -1
    best_assignment = None
    for assignment in itertools.product((False, True), repeat=instance.num_vars):
        score = count_satisfied(instance, assignment)
        if score > best:
            best = score
            best_assignment = assignment
    return best, best_assignment


def sat_oracle(
    instance: SatInstance, budget: int = DEFAULT_BUDGET
) -> tuple[bool, tuple[bool, ...] | None]:
    """Decision form: (satisfiable, first satisfying model or None)."""
    _check_bool_budget(instance.num_vars, budget)
    for assignment in itertools.product((False, True), repeat=instance.num_vars):
        if all_satisfied(instance, assignment):
            return True, assignment
    return False, None


# ---------------------------------------------------------------------------
# Sound upper bounds

def coarse_upper_bound(program: Program) -> int:
    """Maximum-activity bound: every transition flips all w bits."""
    n = len(program.instructions)
    return max(0, n - 1) * program.width


def knownbits_outputs(program: Program) -> list[KnownBits]:
    """Abstract execution: one KnownBits value per instruction output.

    Free inputs start fully unknown (or {0,1} for binary domains). A memory
    cell holds the join of everything stored to it so far; loads from
    never-written cells see the all-zero initial state.
    """
    w = program.width
    domains = dict(program.free_inputs)
    outputs: list[KnownBits] = []
    stored: dict[int, KnownBits] = {}

    for insn in program.instructions:
        args = []
        for src in insn.inputs:
            if isinstance(src, Const):
                args.append(KnownBits.from_constant(src.value, w))
            elif isinstance(src, Free):
                if domains[src.name] == BINARY01:
                    args.append(KnownBits.binary01(w))
                else:
                    args.append(KnownBits.top(w))
            elif isinstance(src, MemRead):
                args.append(stored.get(src.addr, KnownBits.from_constant(0, w)))
            else:  # PriorOutput
                args.append(outputs[src.index])
        out = knownbits_transfer(insn.mnemonic, args)
        if insn.mem_dest is not None:
            prev = stored.get(insn.mem_dest)
            stored[insn.mem_dest] = out if prev is None else prev.join(out)
        outputs.append(out)
    return outputs


def _possibly_differing_bits(a: KnownBits, b: KnownBits) -> int:
    both_known_equal = a.knowns & b.knowns & ~(a.ones ^ b.ones)
    return a.width - both_known_equal.bit_count()


def knownbits_upper_bound(program: Program) -> int:
    """Sum over adjacent output pairs of the bits not known equal on both
    sides; always between the exact maximum and the coarse bound."""
    violations = validate_program(program)
    if violations:
        raise ProgramValidationError(violations)
    outs = knownbits_outputs(program)
    return sum(
        _possibly_differing_bits(outs[i], outs[i + 1]) for i in range(len(outs) - 1)
    )
