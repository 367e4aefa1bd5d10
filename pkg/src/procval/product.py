"""Party merging and tensor products of processes, plus the decision of when
such a product is itself a valid process.

Two processes with the same number of parties combine party-wise: paired
parties merge into one party whose input (output) is the tensor product of the
two inputs (outputs). The product operator is always positive semidefinite
with the right trace when both factors are, so only the term rule can fail; it
fails exactly when some pair of nontrivial terms, one from each factor, merges
into a term that is a pure input on no party. Such pairs are reported as
blocking pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import linalg
from .hsbasis import HSTerm
from .process import (
    Party,
    PartyLayout,
    PartyTag,
    ProcessMatrix,
    TermSignature,
    classify_term,
    is_valid_process,
)

__all__ = [
    "PartyPairing",
    "ProductReport",
    "SequenceReport",
    "combined_layout",
    "tensor_product",
    "find_blocking_pairs",
    "two_party_product_invalid",
    "check_sequence",
]


@dataclass(frozen=True)
class PartyPairing:
    """Bijection between the parties of two processes; each pair carries the
    name of the merged party."""

    pairs: tuple[tuple[str, str, str], ...]

    def __post_init__(self):
        w_names = [p[0] for p in self.pairs]
        z_names = [p[1] for p in self.pairs]
        merged = [p[2] for p in self.pairs]
        for side, names in (("first", w_names), ("second", z_names), ("merged", merged)):
            if len(set(names)) != len(names):
                raise ValueError(f"{side} party names must be unique, got {names}")

    @staticmethod
    def positional(w_layout: PartyLayout, z_layout: PartyLayout) -> "PartyPairing":
        """Pair parties in declared order; the merged party keeps the first
        factor's name when both agree, else concatenates the two."""
        if w_layout.n_parties != z_layout.n_parties:
            raise ValueError(
                f"party count mismatch: {w_layout.n_parties} vs {z_layout.n_parties}"
            )
        pairs = []
        for pw, pz in zip(w_layout.parties, z_layout.parties):
            name = pw.name if pw.name == pz.name else pw.name + pz.name
            pairs.append((pw.name, pz.name, name))
        return PartyPairing(tuple(pairs))


def _resolve_pairing(w: ProcessMatrix, z: ProcessMatrix,
                     pairing: PartyPairing | None) -> PartyPairing:
    if pairing is None:
        return PartyPairing.positional(w.layout, z.layout)
    if len(pairing.pairs) != w.layout.n_parties or len(pairing.pairs) != z.layout.n_parties:
        raise ValueError("pairing must cover every party of both processes exactly once")
    for wn, zn, _ in pairing.pairs:
        w.layout.party_index(wn)
        z.layout.party_index(zn)
    return pairing


def combined_layout(w_layout: PartyLayout, z_layout: PartyLayout,
                    pairing: PartyPairing) -> PartyLayout:
    parties = []
    for wn, zn, name in pairing.pairs:
        pw = w_layout.parties[w_layout.party_index(wn)]
        pz = z_layout.parties[z_layout.party_index(zn)]
        parties.append(Party(name=name, d_in=pw.d_in * pz.d_in,
                             d_out=pw.d_out * pz.d_out))
    return PartyLayout(tuple(parties))


def tensor_product(w: ProcessMatrix, z: ProcessMatrix,
                   pairing: PartyPairing | None = None) -> ProcessMatrix:
    """Kronecker product of two processes, reordered into the merged-party
    layout (first factor's subsystem before the second's within each merged
    input and output). No term-rule check is performed here."""
    pairing = _resolve_pairing(w, z, pairing)
    layout = combined_layout(w.layout, z.layout, pairing)
    raw = linalg.tensor(w.op, z.op)
    dims = w.layout.subsystem_dims() + z.layout.subsystem_dims()
    nw = 2 * w.layout.n_parties
    perm = []
    for wn, zn, _ in pairing.pairs:
        i = w.layout.party_index(wn)
        j = z.layout.party_index(zn)
        perm += [2 * i, nw + 2 * j, 2 * i + 1, nw + 2 * j + 1]
    return ProcessMatrix(layout=layout, op=linalg.permute_subsystems(raw, dims, perm))


def _merged_tag(a: PartyTag, b: PartyTag) -> PartyTag:
    return PartyTag(a | b)


def _case_codes(sig_w: TermSignature, sig_z: TermSignature) -> tuple[tuple[str, str], ...]:
    order = {"0": 0, "1": 1, "2": 2, "12": 3}
    out = []
    for a, b in zip(sig_w.tags, sig_z.tags):
        pair = sorted((a.code, b.code), key=order.__getitem__)
        out.append((pair[0], pair[1]))
    return tuple(out)


@dataclass(frozen=True)
class ProductReport:
    """Verdict on a tensor product plus the witnesses against it.

    ``blocking_pairs[k]`` is a pair of nontrivial terms (one per factor) whose
    merged term is a pure input on no party; ``per_party_cases[k]`` lists that
    pair's unordered tag-code pair on each merged party. ``w_valid``/
    ``z_valid`` record whether the inputs were themselves valid processes —
    the verdict only speaks for the term rule of the product when they are.
    """

    verdict: bool
    blocking_pairs: tuple[tuple[HSTerm, HSTerm], ...]
    per_party_cases: tuple[tuple[tuple[str, str], ...], ...]
    w_valid: bool
    z_valid: bool
    layout: PartyLayout


def find_blocking_pairs(w: ProcessMatrix, z: ProcessMatrix,
                        pairing: PartyPairing | None = None,
                        tol: float | None = None) -> ProductReport:
    """Search the term grid of two processes for pairs that invalidate their
    tensor product.

    A pair of nontrivial terms blocks when, on every merged party, the union
    of the two tags is not a pure input; equivalently, when no party pairs a
    pure-input tag with a trivial or pure-input tag. The product is a valid
    process exactly when no blocking pair exists (for valid inputs).
    Blocking pairs are reported in lexicographic index order.
    """
    pairing = _resolve_pairing(w, z, pairing)
    layout = combined_layout(w.layout, z.layout, pairing)
    w_idx = [w.layout.party_index(p[0]) for p in pairing.pairs]
    z_idx = [z.layout.party_index(p[1]) for p in pairing.pairs]

    w_terms = [(t, classify_term(t, w.layout)) for t in w.terms(tol=tol)]
    z_terms = [(t, classify_term(t, z.layout)) for t in z.terms(tol=tol)]
    w_terms = [(t, s) for t, s in w_terms if not s.is_trivial()]
    z_terms = [(t, s) for t, s in z_terms if not s.is_trivial()]

    blocking = []
    for tw, sw in w_terms:
        tags_w = [sw.tags[i] for i in w_idx]
        for tz, sz in z_terms:
            tags_z = [sz.tags[j] for j in z_idx]
            merged = [_merged_tag(a, b) for a, b in zip(tags_w, tags_z)]
            if all(tag != PartyTag.IN for tag in merged):
                blocking.append((
                    (tw, tz),
                    _case_codes(TermSignature(tuple(tags_w)), TermSignature(tuple(tags_z))),
                ))
    blocking.sort(key=lambda item: (item[0][0].indices, item[0][1].indices))
    return ProductReport(
        verdict=not blocking,
        blocking_pairs=tuple(pair for pair, _ in blocking),
        per_party_cases=tuple(cases for _, cases in blocking),
        w_valid=is_valid_process(w).verdict,
        z_valid=is_valid_process(z).verdict,
        layout=layout,
    )


def two_party_product_invalid(w: ProcessMatrix, z: ProcessMatrix,
                              tol: float | None = None) -> bool:
    """Shortcut decision for two-party factors: their product is invalid
    exactly when both factors carry signalling terms and the two factors'
    signalling terms jointly cover both directions.

    Signalling terms here are the nontrivial terms acting on the output (or
    both ends) of one party and as a pure input on the other.
    """
    for p in (w, z):
        if p.layout.n_parties != 2:
            raise ValueError("this check applies to two-party processes only")

    def directions(p: ProcessMatrix) -> set[str]:
        dirs: set[str] = set()
        for term in p.terms(tol=tol):
            sig = classify_term(term, p.layout)
            a, b = sig.tags
            if a & PartyTag.OUT and b == PartyTag.IN:
                dirs.add("ab")
            if b & PartyTag.OUT and a == PartyTag.IN:
                dirs.add("ba")
        return dirs

    dw, dz = directions(w), directions(z)
    return bool(dw) and bool(dz) and (dw | dz) == {"ab", "ba"}


@dataclass(frozen=True)
class SequenceReport:
    """Step-by-step verdicts of a left-to-right product construction."""

    verdict: bool
    steps: tuple[ProductReport, ...]
    first_invalid_step: int | None


def check_sequence(ps: Sequence[ProcessMatrix],
                   pairings: Sequence[PartyPairing | None] | None = None,
                   max_factors: int = 8) -> SequenceReport:
    """Fold a list of processes into one product, checking each step.

    Step k pairs the accumulated product with factor k+1 (positionally by
    default) and records its blocking-pair report; the overall verdict is the
    conjunction of the step verdicts. The final verdict does not depend on the
    fold order: an invalidating pair survives any regrouping. The dense
    operator of the last product is never materialized; only intermediate
    products needed for later steps are built.
    """
    if len(ps) < 2:
        raise ValueError("need at least two processes to form a product")
    if len(ps) > max_factors:
        raise ValueError(f"refusing to fold more than {max_factors} factors")
    if pairings is not None and len(pairings) != len(ps) - 1:
        raise ValueError(f"expected {len(ps) - 1} pairings, got {len(pairings)}")

    steps: list[ProductReport] = []
    first_bad: int | None = None
    acc = ps[0]
    for k, nxt in enumerate(ps[1:]):
        pairing = pairings[k] if pairings is not None else None
        report = find_blocking_pairs(acc, nxt, pairing=pairing)
        steps.append(report)
        if not report.verdict and first_bad is None:
            first_bad = k
        if k + 2 < len(ps):
            acc = tensor_product(acc, nxt, pairing=pairing)
    return SequenceReport(
        verdict=all(s.verdict for s in steps),
        steps=tuple(steps),
        first_invalid_step=first_bad,
    )
