"""Tests for party merging, tensor products and the blocking-pair decision."""

import itertools

import numpy as np
import pytest

from procval import (
    PartyLayout,
    PartyPairing,
    ProcessMatrix,
    check_sequence,
    find_blocking_pairs,
    gallery_entry,
    is_valid_process,
    linalg,
    maximally_mixed,
    min_eigenvalue,
    oneway_channel_process,
    state_process,
    tensor_product,
    two_party_product_invalid,
    twoway_channel_process,
)

from helpers import bipartite_qubit_suite, suite_pairs


def one_party_state(diag):
    layout = PartyLayout.of(("A", 2, 2))
    return state_process(np.diag(diag).astype(complex), layout)


class TestPairing:
    def test_positional_names(self):
        w = twoway_channel_process(2)
        pairing = PartyPairing.positional(w.layout, w.layout)
        assert pairing.pairs == (("X", "X", "X"), ("Y", "Y", "Y"))

    def test_positional_distinct_names(self):
        a = one_party_state([0.5, 0.5])
        layout_b = PartyLayout.of(("B", 2, 2))
        b = state_process(maximally_mixed(2), layout_b)
        pairing = PartyPairing.positional(a.layout, layout_b)
        assert pairing.pairs == (("A", "B", "AB"),)

    def test_party_count_mismatch(self):
        w = twoway_channel_process(2)
        s = one_party_state([1.0, 0.0])
        with pytest.raises(ValueError):
            tensor_product(w, s)

    def test_explicit_pairing_checked(self):
        w = twoway_channel_process(2)
        bad = PartyPairing((("X", "Q", "A"), ("Y", "Y", "B")))
        with pytest.raises(KeyError):
            tensor_product(w, w, pairing=bad)

    def test_duplicate_merged_names_rejected(self):
        with pytest.raises(ValueError):
            PartyPairing((("X", "X", "A"), ("Y", "Y", "A")))


class TestTensorProduct:
    def test_state_processes_compose_freely(self):
        a = one_party_state([0.25, 0.75])
        b = one_party_state([0.5, 0.5])
        p = tensor_product(a, b)
        assert p.layout.parties[0].d_in == 4
        assert is_valid_process(p).verdict
        joint = state_process(
            linalg.tensor(np.diag([0.25, 0.75]), maximally_mixed(2)),
            PartyLayout.of(("AA", 4, 4)),
        )
        assert np.abs(p.op - joint.op).max() < 1e-14

    def test_squared_twoway_operator(self):
        w = twoway_channel_process(2)
        p = tensor_product(w, w)
        assert p.dim == 256
        assert p.op.trace().real == pytest.approx(16.0)
        assert min_eigenvalue(p.op) >= -1e-12
        assert not is_valid_process(p).verdict

    def test_oneway_same_direction_composes(self):
        w = oneway_channel_process(2, "xy")
        p = tensor_product(w, w)
        assert is_valid_process(p).verdict

    def test_trace_multiplies(self):
        w = twoway_channel_process(2)
        z = gallery_entry("state-bell-d2").process
        p = tensor_product(w, z)
        expected = w.op.trace().real * z.op.trace().real
        assert abs(p.op.trace().real - expected) <= 1e-12 * abs(expected)
        assert p.op.trace().real == pytest.approx(p.d_out)


class TestFindBlockingPairs:
    def test_states_never_block(self):
        a = gallery_entry("state-bell-d2").process
        b = gallery_entry("state-product-d2").process
        report = find_blocking_pairs(a, b)
        assert report.verdict
        assert report.blocking_pairs == ()
        assert report.w_valid and report.z_valid

    def test_squared_twoway_blocks_both_ways(self):
        w = twoway_channel_process(2)
        report = find_blocking_pairs(w, w)
        assert not report.verdict
        pairs = [(tw.indices, tz.indices) for tw, tz in report.blocking_pairs]
        assert pairs == [((0, 3, 3, 0), (3, 0, 0, 3)), ((3, 0, 0, 3), (0, 3, 3, 0))]
        for cases in report.per_party_cases:
            assert cases == (("1", "2"), ("1", "2"))

    def test_oneway_same_direction_passes(self):
        w = oneway_channel_process(2, "xy")
        report = find_blocking_pairs(w, w)
        assert report.verdict

    def test_oneway_opposite_directions_block(self):
        report = find_blocking_pairs(oneway_channel_process(2, "xy"),
                                     oneway_channel_process(2, "yx"))
        assert not report.verdict

    def test_symmetry_under_argument_swap(self):
        w = twoway_channel_process(2)
        z = gallery_entry("oneway-xy-d2").process
        fwd = find_blocking_pairs(w, z)
        rev = find_blocking_pairs(z, w)
        assert fwd.verdict == rev.verdict
        fwd_pairs = sorted((a.indices, b.indices) for a, b in fwd.blocking_pairs)
        rev_pairs = sorted((b.indices, a.indices) for a, b in rev.blocking_pairs)
        assert fwd_pairs == rev_pairs

    def test_invalid_input_flagged(self):
        layout = PartyLayout.of(("X", 2, 2), ("Y", 2, 2))
        bad = ProcessMatrix(layout, np.eye(16))  # trace 16, required 4
        report = find_blocking_pairs(bad, twoway_channel_process(2))
        assert not report.w_valid
        assert report.z_valid

    def test_matches_direct_validation_on_random_suite(self):
        suite = bipartite_qubit_suite(seed=99, n_mixtures=4, n_random=4)
        for w, z in suite_pairs(suite, seed=3, n=40):
            report = find_blocking_pairs(w, z)
            direct = is_valid_process(tensor_product(w, z))
            assert report.verdict == direct.verdict

    def test_pair_tangled_on_a_third_party_blocks(self):
        # a pair can merge into a forbidden term even where both members act
        # on input AND output of the same party; three parties are needed to
        # exhibit it between individually valid processes
        import functools
        from procval.hsbasis import HSTerm, reconstruct

        layout = PartyLayout.of(("A", 2, 2), ("B", 2, 2), ("C", 2, 2))
        dims = layout.subsystem_dims()
        base = layout.d_out / layout.dim

        def valid_with_term(pattern):
            bump = reconstruct([HSTerm(pattern, 0.5 * base)], dims)
            op = base * np.eye(layout.dim) + bump
            p = ProcessMatrix(layout, op)
            assert is_valid_process(p).verdict
            return p

        t_w = (3, 3, 3, 0, 3, 3)  # A: both ends, B: pure input, C: both ends
        t_z = (3, 0, 0, 3, 3, 3)  # A: pure input, B: output, C: both ends
        w = valid_with_term(t_w)
        z = valid_with_term(t_z)

        report = find_blocking_pairs(w, z)
        assert not report.verdict
        assert report.per_party_cases == (
            (("1", "12"), ("1", "2"), ("12", "12")),
        )

        # dense evidence: the merged refined pattern carries the product of
        # the two coefficients (diagonal basis factors, so a diagonal trace)
        prod = tensor_product(w, z)
        merged = (3, 3, 3, 0, 3, 0, 0, 3, 3, 3, 3, 3)
        vec = {0: np.ones(2), 3: np.array([1.0, -1.0])}
        diag = functools.reduce(np.kron, [vec[i] for i in merged])
        coeff = float(np.real(np.diag(prod.op) @ diag)) / prod.dim
        assert coeff == pytest.approx((0.5 * base) ** 2, abs=1e-12)


class TestTwoPartyCheck:
    def test_same_direction_pair_is_fine(self):
        w = oneway_channel_process(2, "xy")
        assert two_party_product_invalid(w, w) is False

    def test_twoway_pair_is_invalid(self):
        w = twoway_channel_process(2)
        assert two_party_product_invalid(w, w) is True

    def test_non_signalling_factor_cannot_close_a_loop(self):
        w = gallery_entry("state-bell-d2").process
        z = twoway_channel_process(2)
        assert two_party_product_invalid(w, z) is False

    def test_requires_two_parties(self):
        s = one_party_state([1.0, 0.0])
        with pytest.raises(ValueError):
            two_party_product_invalid(s, s)

    def test_agrees_with_blocking_pairs(self):
        names = ["twoway-d2", "oneway-xy-d2", "oneway-yx-d2",
                 "state-bell-d2", "state-product-d2"]
        procs = [gallery_entry(n).process for n in names]
        for w, z in itertools.product(procs, repeat=2):
            assert two_party_product_invalid(w, z) == (
                not find_blocking_pairs(w, z).verdict
            )


class TestCheckSequence:
    def test_three_states_valid_in_every_order(self):
        states = [one_party_state([1.0, 0.0]),
                  one_party_state([0.5, 0.5]),
                  one_party_state([0.25, 0.75])]
        for order in itertools.permutations(states):
            report = check_sequence(list(order))
            assert report.verdict
            assert report.first_invalid_step is None

    def test_two_twoways_poison_every_order(self):
        procs = [twoway_channel_process(2), twoway_channel_process(2),
                 gallery_entry("state-bell-d2").process]
        seen_steps = set()
        for order in itertools.permutations(procs):
            report = check_sequence(list(order))
            assert not report.verdict
            seen_steps.add(report.first_invalid_step)
        # the two-way factors meet at step 0 or step 1 depending on the order
        assert seen_steps == {0, 1}

    def test_opposite_oneways_invalid_both_orders(self):
        xy = oneway_channel_process(2, "xy")
        yx = oneway_channel_process(2, "yx")
        assert not check_sequence([xy, yx]).verdict
        assert not check_sequence([yx, xy]).verdict

    def test_three_same_direction_oneways_valid(self):
        xy = oneway_channel_process(2, "xy")
        for order in itertools.permutations([xy, xy, xy]):
            assert check_sequence(list(order)).verdict

    def test_four_factor_order_independence(self):
        # prep/measure parties keep the folded dimension tiny (4 -> 16 -> 64)
        layout = PartyLayout.of(("P", 1, 2), ("M", 2, 1))
        ident = np.zeros((4, 4), dtype=complex)
        flipped = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                ident[i * 2 + i, j * 2 + j] = 1.0
                flipped[i * 2 + (1 - i), j * 2 + (1 - j)] = 1.0
        procs = [
            ProcessMatrix(layout, ident),
            ProcessMatrix(layout, flipped),
            state_process(np.diag([0.5, 0.5]).astype(complex), layout),
            state_process(np.diag([0.9, 0.1]).astype(complex), layout),
        ]
        assert all(is_valid_process(p).verdict for p in procs)
        for order in itertools.permutations(procs):
            assert check_sequence(list(order)).verdict

    def test_needs_two_processes(self):
        with pytest.raises(ValueError):
            check_sequence([twoway_channel_process(2)])

    def test_pairings_arity_checked(self):
        w = twoway_channel_process(2)
        with pytest.raises(ValueError, match="pairings"):
            check_sequence([w, w], pairings=[None, None])

    def test_factor_cap(self):
        s = one_party_state([0.5, 0.5])
        with pytest.raises(ValueError, match="factors"):
            check_sequence([s] * 9)
