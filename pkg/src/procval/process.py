"""Process-matrix model: party bookkeeping, term-type classification, and the
validity decision for candidate processes.

A process on parties A, B, ... lives on the interleaved tensor order
(a_in, a_out, b_in, b_out, ...). A candidate is a valid process when it is
positive semidefinite, its trace equals the product of output dimensions, and
every nontrivial term of its operator-basis expansion acts as a pure input
(input part non-identity, output part identity) on at least one party.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import hsbasis, linalg
from .hsbasis import HSTerm

__all__ = [
    "Party",
    "PartyLayout",
    "ProcessMatrix",
    "PartyTag",
    "TermSignature",
    "Tolerances",
    "ValidityReport",
    "PartyReduction",
    "classify_term",
    "is_valid_process",
    "signalling_directions",
    "reduced_process",
]


class PartyTag(enum.IntFlag):
    """How a basis term acts on one party: on its input, its output, both,
    or neither."""

    TRIVIAL = 0
    IN = 1
    OUT = 2
    INOUT = 3

    @property
    def code(self) -> str:
        """Compact case code: '0', '1', '2' or '12'."""
        return {0: "0", 1: "1", 2: "2", 3: "12"}[int(self)]


@dataclass(frozen=True)
class Party:
    name: str
    d_in: int
    d_out: int

    def __post_init__(self):
        if self.d_in < 1 or self.d_out < 1:
            raise ValueError(f"party {self.name!r}: dimensions must be >= 1")


@dataclass(frozen=True)
class PartyLayout:
    """Ordered parties; fixes the global tensor order as input then output per
    party, parties in declared order."""

    parties: tuple[Party, ...]

    def __post_init__(self):
        names = [p.name for p in self.parties]
        if len(set(names)) != len(names):
            raise ValueError(f"party names must be unique, got {names}")
        if not self.parties:
            raise ValueError("layout needs at least one party")

    @staticmethod
    def of(*parties: tuple[str, int, int]) -> "PartyLayout":
        return PartyLayout(tuple(Party(*p) for p in parties))

    @property
    def n_parties(self) -> int:
        return len(self.parties)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parties)

    def subsystem_dims(self) -> tuple[int, ...]:
        dims = []
        for p in self.parties:
            dims += [p.d_in, p.d_out]
        return tuple(dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.subsystem_dims()))

    @property
    def d_out(self) -> int:
        return int(np.prod([p.d_out for p in self.parties]))

    @property
    def d_in(self) -> int:
        return int(np.prod([p.d_in for p in self.parties]))

    def party_index(self, name: str) -> int:
        for i, p in enumerate(self.parties):
            if p.name == name:
                return i
        raise KeyError(f"unknown party {name!r} (have {list(self.names)})")


@dataclass(frozen=True, eq=False)
class ProcessMatrix:
    """A candidate or validated process: a layout plus the operator on the
    full party space. Construction checks the shape only; validity is decided
    by :func:`is_valid_process`."""

    layout: PartyLayout
    op: np.ndarray

    def __post_init__(self):
        a = linalg.as_operator(self.op)
        if a.shape[0] != self.layout.dim:
            raise ValueError(
                f"operator dimension {a.shape[0]} does not match layout dimension "
                f"{self.layout.dim}"
            )
        object.__setattr__(self, "op", a)

    @property
    def dim(self) -> int:
        return self.layout.dim

    @property
    def d_out(self) -> int:
        return self.layout.d_out

    def terms(self, tol: float | None = None) -> list[HSTerm]:
        """Operator-basis expansion of the process operator."""
        return hsbasis.decompose(self.op, self.layout.subsystem_dims(), tol=tol)


@dataclass(frozen=True)
class TermSignature:
    """Per-party classification of one basis term."""

    tags: tuple[PartyTag, ...]

    def is_trivial(self) -> bool:
        return all(t == PartyTag.TRIVIAL for t in self.tags)

    def is_allowed(self) -> bool:
        """True when the term is a pure input on at least one party (or is
        the trivial term) and may therefore appear in a valid process."""
        return self.is_trivial() or any(t == PartyTag.IN for t in self.tags)

    def type_string(self, layout: PartyLayout) -> str:
        """Human-readable type, e.g. 'x2 y1' for an X-output/Y-input term."""
        tokens = []
        for tag, party in zip(self.tags, layout.parties):
            stem = party.name.lower()
            if tag & PartyTag.IN:
                piece = stem + "1"
                if tag & PartyTag.OUT:
                    piece += stem + "2"
                tokens.append(piece)
            elif tag & PartyTag.OUT:
                tokens.append(stem + "2")
        return " ".join(tokens) if tokens else "trivial"

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(t.code for t in self.tags)


def classify_term(term: HSTerm, layout: PartyLayout) -> TermSignature:
    """Tag a basis term on every party: input index != 0 sets the IN flag,
    output index != 0 sets the OUT flag."""
    if len(term.indices) != 2 * layout.n_parties:
        raise ValueError(
            f"term has {len(term.indices)} indices, layout expects "
            f"{2 * layout.n_parties}"
        )
    tags = []
    for k in range(layout.n_parties):
        tag = PartyTag.TRIVIAL
        if term.indices[2 * k] != 0:
            tag |= PartyTag.IN
        if term.indices[2 * k + 1] != 0:
            tag |= PartyTag.OUT
        tags.append(PartyTag(tag))
    return TermSignature(tags=tuple(tags))


@dataclass(frozen=True)
class Tolerances:
    """Validity thresholds; ``None`` means scale-aware default."""

    psd: float | None = None
    trace: float | None = None
    term: float | None = None

    def psd_limit(self, op: np.ndarray) -> float:
        return self.psd if self.psd is not None else 1e-9 * linalg.frobenius(op)

    def trace_limit(self, d_out: int) -> float:
        return self.trace if self.trace is not None else 1e-9 * d_out


@dataclass(frozen=True)
class ValidityReport:
    verdict: bool
    psd_defect: float
    trace_defect: float
    forbidden_terms: tuple[tuple[HSTerm, TermSignature], ...]


def is_valid_process(w: ProcessMatrix, tolerances: Tolerances | None = None) -> ValidityReport:
    """Decide whether ``w`` is a valid process.

    Checks, in order: positive semidefiniteness, trace equal to the product
    of output dimensions, and the term rule (every nontrivial expansion term
    must be a pure input on some party). ``psd_defect`` is minus the smallest
    eigenvalue; ``forbidden_terms`` lists each term violating the term rule
    together with its signature.
    """
    tolerances = tolerances or Tolerances()
    lam_min = linalg.min_eigenvalue(w.op)
    psd_defect = -lam_min
    trace_defect = abs(float(w.op.trace().real) - w.d_out)
    forbidden = []
    for term in w.terms(tol=tolerances.term):
        sig = classify_term(term, w.layout)
        if not sig.is_allowed():
            forbidden.append((term, sig))
    verdict = (
        psd_defect <= tolerances.psd_limit(w.op)
        and trace_defect <= tolerances.trace_limit(w.d_out)
        and not forbidden
    )
    return ValidityReport(
        verdict=verdict,
        psd_defect=psd_defect,
        trace_defect=trace_defect,
        forbidden_terms=tuple(forbidden),
    )


def signalling_directions(w: ProcessMatrix, frm: str, to: str,
                          tol: float | None = None) -> bool:
    """True when some nontrivial term acts on the output (or both ends) of
    ``frm`` and as a pure input on ``to`` — the pattern that lets ``frm``'s
    output influence ``to``'s input statistics."""
    i = w.layout.party_index(frm)
    j = w.layout.party_index(to)
    if i == j:
        raise ValueError("signalling needs two distinct parties")
    for term in w.terms(tol=tol):
        sig = classify_term(term, w.layout)
        if sig.tags[i] & PartyTag.OUT and sig.tags[j] == PartyTag.IN:
            return True
    return False


@dataclass(frozen=True)
class PartyReduction:
    """Factorization of one party into aligned sub-parties and the set to keep.

    ``in_factors[k]`` and ``out_factors[k]`` are the input/output dimensions
    of sub-party k; ``keep`` lists the sub-party slots that survive. Input and
    output factors must pair up — discarding an input without its output is
    rejected.
    """

    in_factors: tuple[int, ...]
    out_factors: tuple[int, ...]
    keep: tuple[int, ...]

    def __post_init__(self):
        if len(self.in_factors) != len(self.out_factors):
            raise ValueError(
                "input and output factor lists must align sub-party by sub-party "
                f"(got {self.in_factors} vs {self.out_factors})"
            )
        n = len(self.in_factors)
        keep = sorted(set(self.keep))
        if not keep:
            raise ValueError("keep set must not be empty")
        if keep[0] < 0 or keep[-1] >= n:
            raise IndexError(f"keep slots {keep} out of range for {n} sub-parties")
        object.__setattr__(self, "keep", tuple(keep))

    @staticmethod
    def whole(party: Party) -> "PartyReduction":
        return PartyReduction((party.d_in,), (party.d_out,), (0,))


def reduced_process(w: ProcessMatrix,
                    keep: Mapping[str, PartyReduction]) -> ProcessMatrix:
    """Trace out whole sub-parties and renormalize.

    Each entry of ``keep`` factorizes one party and selects the sub-parties to
    retain; parties not mentioned are kept whole. The partial trace is divided
    by the product of the discarded output dimensions so the result again has
    trace equal to its output dimension.
    """
    for name in keep:
        w.layout.party_index(name)  # raises on unknown party
    refined_dims: list[int] = []
    discard: list[int] = []
    new_parties: list[Party] = []
    pos = 0
    for party in w.layout.parties:
        red = keep.get(party.name) or PartyReduction.whole(party)
        if int(np.prod(red.in_factors)) != party.d_in:
            raise ValueError(
                f"party {party.name!r}: input factors {red.in_factors} do not "
                f"multiply to {party.d_in}"
            )
        if int(np.prod(red.out_factors)) != party.d_out:
            raise ValueError(
                f"party {party.name!r}: output factors {red.out_factors} do not "
                f"multiply to {party.d_out}"
            )
        kept = set(red.keep)
        for k, d in enumerate(red.in_factors):
            refined_dims.append(d)
            if k not in kept:
                discard.append(pos)
            pos += 1
        for k, d in enumerate(red.out_factors):
            refined_dims.append(d)
            if k not in kept:
                discard.append(pos)
            pos += 1
        new_parties.append(Party(
            name=party.name,
            d_in=int(np.prod([red.in_factors[k] for k in red.keep])),
            d_out=int(np.prod([red.out_factors[k] for k in red.keep])),
        ))
    traced = linalg.partial_trace(w.op, refined_dims, discard)
    discarded_out = w.layout.d_out // int(np.prod([p.d_out for p in new_parties]))
    return ProcessMatrix(layout=PartyLayout(tuple(new_parties)),
                         op=traced / discarded_out)
