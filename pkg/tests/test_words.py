import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from charvar4.errors import InputError, SingularMatrix
from charvar4.words import (
    Letter,
    Word,
    apply_iota,
    apply_tau,
    evaluate,
    evaluate_all,
    invert,
    reduce,
    trace_all,
    weighted_length,
)

from oracles import random_matrix, random_word, word_product

X, Y, XI, YI = Letter.X, Letter.Y, Letter.XINV, Letter.YINV

raw_words = st.text(alphabet="xyXY", max_size=14)


def test_letter_inverses():
    assert X.inverse is XI and XI.inverse is X
    assert Y.inverse is YI and YI.inverse is Y
    assert len(set(Letter)) == 4
    assert [l.weight for l in Letter] == [1, 1, 3, 3]


def test_reduce_examples():
    assert reduce([X, XI]) == Word("")
    assert reduce([X, Y, YI, X]) == Word("xx")
    assert reduce([XI, Y, Y, X, Y]).letters == "Xyyxy"


def test_reduce_cascades():
    assert Word("xyYX").letters == ""
    assert Word("xyYXyx").letters == "yx"


@given(raw_words)
def test_reduce_is_idempotent_and_reduced(s):
    w = Word(s)
    assert Word(w.letters) == w
    assert all(a != b.swapcase() for a, b in zip(w.letters, w.letters[1:]))


def test_invert_examples():
    assert invert(Word("xy")).pretty() == "y⁻¹x⁻¹"
    assert invert(Word("")) == Word("")
    assert invert(Word("Xy")).pretty() == "y⁻¹x"


def test_tau_examples():
    assert apply_tau(Word("xxy")).pretty() == "y²x"
    assert apply_tau(Word("Xyyxy")).pretty() == "y⁻¹x²yx"
    assert apply_tau(Word("")) == Word("")


def test_iota_examples():
    assert apply_iota(Word("x")).pretty() == "x⁻¹"
    assert apply_iota(Word("xy")).pretty() == "x⁻¹y⁻¹"
    assert apply_iota(Word("Xyyxy")).pretty() == "xy⁻²x⁻¹y⁻¹"


def test_weighted_length_examples():
    assert weighted_length(Word("Xyyxy")) == 7
    assert weighted_length(Word("XYxy")) == 8
    assert weighted_length(Word("x")) == 1


def test_parser_rejects_other_letters():
    with pytest.raises(InputError):
        Word("xz")
    with pytest.raises(InputError):
        Word("x y")


def test_pretty_empty():
    assert Word("").pretty() == "1"


@settings(max_examples=1000)
@given(raw_words)
def test_involutions(s):
    w = Word(s)
    assert apply_tau(apply_tau(w)) == w
    assert apply_iota(apply_iota(w)) == w
    assert invert(invert(w)) == w


@given(raw_words)
def test_weighted_length_counts(s):
    w = Word(s)
    plain = sum(c.islower() for c in w.letters)
    assert weighted_length(w) == plain + 3 * (len(w) - plain)


def test_evaluate_empty_and_xy(sl4_pair):
    A, B = sl4_pair
    assert np.array_equal(evaluate("", A, B), np.eye(4))
    np.testing.assert_allclose(evaluate("xy", A, B), A @ B, rtol=0, atol=1e-14)


def test_evaluate_against_left_fold(sl4_pair):
    A, B = sl4_pair
    got = evaluate("Xyyxy", A, B)
    ref = word_product("Xyyxy", A, B)
    assert np.max(np.abs(got - ref)) / np.max(np.abs(ref)) < 1e-12


def test_evaluate_random_words_against_left_fold(rng, sl4_pair):
    A, B = sl4_pair
    for _ in range(50):
        w = random_word(rng, 10)
        ref = word_product(Word(w).letters, A, B)
        assert np.max(np.abs(evaluate(w, A, B) - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))


def test_evaluate_all_matches_evaluate(rng, sl4_pair):
    A, B = sl4_pair
    words = [random_word(rng, 8) for _ in range(20)]
    for w, m in zip(words, evaluate_all(words, A, B)):
        np.testing.assert_allclose(m, evaluate(w, A, B), atol=1e-12)


def test_evaluate_stacked_inputs(rng):
    As = np.stack([random_matrix(rng) for _ in range(3)])
    Bs = np.stack([random_matrix(rng) for _ in range(3)])
    out = trace_all(["xY", "yyX"], As, Bs)
    assert out.shape == (3, 2)
    for k in range(3):
        assert abs(out[k, 0] - np.trace(word_product("xY", As[k], Bs[k]))) < 1e-10


def test_singular_inverse_letter():
    A = np.diag([1, 1, 1, 0]).astype(complex)
    with pytest.raises(SingularMatrix):
        evaluate("X", A, np.eye(4))
    # plain letters never need an inverse
    np.testing.assert_array_equal(evaluate("xx", A, np.eye(4)), A)


def test_inverse_word_times_word_is_identity(rng, sl4_pair):
    A, B = sl4_pair
    for _ in range(100):
        w = Word(random_word(rng, 10))
        prod = evaluate(invert(w), A, B) @ evaluate(w, A, B)
        assert np.max(np.abs(prod - np.eye(4))) < 1e-10


def test_trace_cyclic_invariance(rng):
    for _ in range(100):
        A, B = np.linalg.qr(random_matrix(rng))[0], np.linalg.qr(random_matrix(rng))[0]
        w = Word(random_word(rng, 10)).letters
        if not w:
            continue
        k = int(rng.integers(len(w)))
        rotated = w[k:] + w[:k]
        assert abs(np.trace(evaluate(w, A, B)) - np.trace(evaluate(rotated, A, B))) < 1e-10


def test_cyclic_normal_form():
    assert Word("xyX").cyclic_reduce() == Word("y")
    assert Word("yxx").cyclic_normal_form() == Word("xxy").cyclic_normal_form()
    assert Word("").cyclic_normal_form() == ""


def test_tau_trace_swaps_arguments(rng, sl4_pair):
    A, B = sl4_pair
    for _ in range(100):
        w = Word(random_word(rng, 10))
        assert abs(np.trace(evaluate(apply_tau(w), A, B)) - np.trace(evaluate(w, B, A))) < 1e-12


def test_word_algebra_operators():
    w = Word("xy")
    assert (w * w.inverse()) == Word("")
    assert w ** 2 == Word("xyxy")
    assert w ** -1 == Word("YX")
    assert w.exponent_sums() == (1, 1)
    assert Word.from_letters([X, Y]) == w
