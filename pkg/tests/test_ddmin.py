from pathlib import Path

import pytest

from mcreduce.ddmin import (
    COMPLEMENTS,
    SUBSETS,
    DdminState,
    StateError,
    Verdict,
    init_ddmin,
    next_candidate,
    split,
    update_ddmin,
)

GOLDEN = Path(__file__).parent / "golden"


def drive(candidates, verdicts):
    """Run the machine against a verdict script.

    `verdicts` maps 1-based attempt numbers to survivor lists (an accept);
    anything else is a reject.  Returns the formatted attempt trace.
    """
    state = init_ddmin(candidates)
    trace = []
    attempt = 0
    while True:
        chosen = next_candidate(state)
        if chosen is None:
            return trace
        attempt += 1
        line = f"{state.phase} n={state.n} cursor={state.cursor} -> " + " ".join(
            str(c) for c in chosen
        )
        if attempt in verdicts:
            survivors = verdicts[attempt]
            line += " [ACCEPT survivors=" + ",".join(str(s) for s in survivors) + "]"
            state = update_ddmin(state, survivors, Verdict(True))
        else:
            state = update_ddmin(state, None, Verdict(False))
        trace.append(line)


def read_golden(name):
    return (GOLDEN / name).read_text().splitlines()


def test_golden_4_all_reject():
    assert drive([1, 2, 3, 4], {}) == read_golden("ddmin_4_all_reject.txt")


def test_golden_8_all_reject():
    assert drive(list(range(1, 9)), {}) == read_golden("ddmin_8_all_reject.txt")


def test_golden_4_scripted_accept():
    trace = drive([1, 2, 3, 4], {2: [1, 2]})
    assert trace == read_golden("ddmin_4_scripted_accept.txt")


def test_golden_8_scripted_accept():
    trace = drive(list(range(1, 9)), {7: [1, 2]})
    assert trace == read_golden("ddmin_8_scripted_accept.txt")


def test_init_empty_is_exhausted():
    state = init_ddmin([])
    assert state.exhausted
    assert next_candidate(state) is None


def test_single_candidate_only_attempt():
    state = init_ddmin([7])
    assert next_candidate(state) == (7,)
    state = update_ddmin(state, None, Verdict(False))
    assert state.exhausted


def test_single_candidate_accept_empties():
    state = init_ddmin([7])
    state = update_ddmin(state, [], Verdict(True))
    assert state.exhausted and state.candidates == ()


def test_first_attempt_is_first_half():
    state = init_ddmin([1, 2, 3, 4])
    assert next_candidate(state) == (1, 2)


def test_complement_at_n4():
    state = DdminState((1, 2, 3, 4), 4, 1, COMPLEMENTS, False)
    assert next_candidate(state) == (1, 3, 4)


def test_reject_on_last_complement_at_full_granularity_exhausts():
    state = DdminState((1, 2, 3, 4), 4, 3, COMPLEMENTS, False)
    state = update_ddmin(state, None, Verdict(False))
    assert state.exhausted


def test_accept_of_everything_exhausts():
    state = init_ddmin([1])
    state = update_ddmin(state, [], Verdict(True))
    assert state.exhausted and not state.candidates


def test_subset_accept_restarts_at_two_over_survivors():
    state = init_ddmin([1, 2, 3, 4])
    state = update_ddmin(state, [3, 4, 5], Verdict(True))
    assert state.candidates == (3, 4, 5)
    assert state.n == 2 and state.cursor == 0 and state.phase == SUBSETS


def test_complement_accept_decrements_granularity():
    state = DdminState(tuple(range(1, 9)), 6, 0, COMPLEMENTS, False)
    state = update_ddmin(state, [1, 2, 3, 4, 5], Verdict(True))
    assert state.n == 5 and state.candidates == (1, 2, 3, 4, 5)
    assert state.phase == SUBSETS and state.cursor == 0


def test_accept_requires_new_candidates():
    state = init_ddmin([1, 2])
    with pytest.raises(StateError):
        update_ddmin(state, None, Verdict(True))


def test_update_on_exhausted_state_raises():
    state = init_ddmin([])
    with pytest.raises(StateError):
        update_ddmin(state, None, Verdict(False))


def test_split_sizes():
    assert split([1, 2, 3, 4], 2) == [(1, 2), (3, 4)]
    assert split([1, 2, 3, 4, 5], 2) == [(1, 2), (3, 4, 5)]
    assert split([1, 2, 3], 3) == [(1,), (2,), (3,)]


def test_granularity_clamped_to_length():
    # length 5: n grows 2 -> 4 -> 5, then exhausts.
    state = init_ddmin([1, 2, 3, 4, 5])
    seen_n = set()
    while True:
        chosen = next_candidate(state)
        if chosen is None:
            break
        seen_n.add(state.n)
        state = update_ddmin(state, None, Verdict(False))
    assert seen_n == {2, 4, 5}


def test_determinism():
    script = {3: [2, 3, 4, 5], 7: [2, 3]}
    first = drive(list(range(1, 7)), dict(script))
    second = drive(list(range(1, 7)), dict(script))
    assert first == second
