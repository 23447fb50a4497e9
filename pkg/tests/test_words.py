import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from endogrowth.ball import L_k_table
from endogrowth.errors import UnknownGeneratorError, ValidationError
from endogrowth.families import HeisenbergMachine, KleinMachine
from endogrowth.words import (
    Endomorphism,
    GenSet,
    Word,
    check_homomorphism,
    elem_pow,
    endo_power_image,
    evaluate,
    eventually_trivial,
    parse_word,
    reduce_word,
    word_str,
)

AB = GenSet(("a", "b"))


class TestReduce:
    def test_cancellation(self):
        assert reduce_word(parse_word_raw("a a^-1")) == Word()

    def test_merge_across_cancellation(self):
        assert reduce_word(parse_word_raw("a b b^-1 a")) == Word(((0, 2),))

    def test_partial_cancel(self):
        assert reduce_word(parse_word_raw("a^2 a^-3")) == Word(((0, -1),))


def parse_word_raw(text):
    return Word(tuple((AB.index(n.partition("^")[0]), int(n.partition("^")[2] or 1)) for n in text.split()))


class TestParsing:
    def test_roundtrip(self):
        w = parse_word("a^2 b^-1 a", AB)
        assert word_str(w, AB) == "a^2 b^-1 a"

    def test_zero_exponent_rejected(self):
        with pytest.raises(ValidationError):
            parse_word("a^0", AB)

    def test_unknown_generator(self):
        with pytest.raises(UnknownGeneratorError):
            parse_word("c", AB)

    def test_bad_names(self):
        with pytest.raises(ValidationError):
            GenSet(("a", "a"))
        with pytest.raises(ValidationError):
            GenSet(("a b",))


class TestEvaluate:
    def test_heisenberg_commutator(self, heis1):
        w = parse_word("a1^-1 a2^-1 a1 a2", heis1.gens)
        assert evaluate(heis1, w) == (0, 0, -1)

    def test_free_abelian(self, z2):
        assert evaluate(z2, parse_word("e1 e2 e1", z2.gens)) == (2, 1)

    def test_klein_flip(self, klein):
        assert evaluate(klein, parse_word("y x y^-1", klein.gens)) == (-1, 0)

    def test_big_exponents(self, heis1):
        w = parse_word("a1^100000000000 a1^-99999999999", heis1.gens)
        assert evaluate(heis1, w) == (1, 0, 0)


class TestEndoPowerImage:
    def test_klein_square_of_y(self, klein):
        # phi(y)=y^r x^l with r odd kills the x part of phi(y^2)
        phi = Endomorphism.from_strings(klein.gens, {"x": "x^2", "y": "y^3 x^5"})
        w = phi.image_of_word(parse_word("y^2", klein.gens))
        assert evaluate(klein, w) == (0, 6)
        phi_even = Endomorphism.from_strings(klein.gens, {"x": "", "y": "y^2 x^5"})
        w2 = phi_even.image_of_word(parse_word("y^2", klein.gens))
        assert evaluate(klein, w2) == (10, 4)

    def test_trivial_endo(self, z2):
        phi = Endomorphism.from_strings(z2.gens, {"e1": "", "e2": ""})
        assert endo_power_image(phi, "e1", 1) == Word()

    def test_linear_powers(self, z2):
        phi = Endomorphism.from_strings(z2.gens, {"e1": "e1^2 e2", "e2": "e1 e2"})
        for k in range(5):
            w = endo_power_image(phi, "e1", k)
            vec = evaluate(z2, w)
            expect = [(1, 0), (2, 1), (5, 3), (13, 8), (34, 21)][k]
            assert vec == expect

    def test_additivity_of_powers(self, heis1):
        phi = Endomorphism.from_strings(heis1.gens, {"a1": "a1 a2", "a2": "a2", "a3": "a3"})
        for j, k in [(1, 2), (2, 2), (0, 3)]:
            w1 = endo_power_image(phi, "a1", j + k)
            w2 = (phi**k).image_of_word(endo_power_image(phi, "a1", j))
            assert evaluate(heis1, w1) == evaluate(heis1, w2)


class TestCheckHomomorphism:
    def test_identity_valid_everywhere(self, any_machine):
        assert check_homomorphism(any_machine, Endomorphism.identity(any_machine.gens)).valid

    def test_sol_commuting_pair(self, sol_fib):
        phi = Endomorphism.from_strings(
            sol_fib.gens, {"a1": "a1 a2^2", "a2": "a1^2 a2^-1", "tau": "tau"}
        )
        assert check_homomorphism(sol_fib, phi).valid

    def test_klein_even_r_nonzero_q_rejected(self, klein):
        phi = Endomorphism.from_strings(klein.gens, {"x": "x^2", "y": "y^2 x"})
        verdict = check_homomorphism(klein, phi)
        assert not verdict.valid
        assert verdict.violated_relator is not None
        assert verdict.witness != klein.identity


class TestEventuallyTrivial:
    def test_trivial_is_yes_one(self, z2):
        phi = Endomorphism.from_strings(z2.gens, {"e1": "", "e2": ""})
        res = eventually_trivial(z2, phi)
        assert res.status == "yes" and res.power == 1

    def test_torsion_survivor_is_no(self, counter_machine):
        phi = Endomorphism.from_strings(counter_machine.gens, {"alpha": "", "beta": "beta"})
        assert eventually_trivial(counter_machine, phi).status == "no"

    def test_nilpotent_heisenberg_endo(self, heis1):
        phi = Endomorphism.from_strings(heis1.gens, {"a1": "a2", "a2": "", "a3": ""})
        res = eventually_trivial(heis1, phi)
        assert res.status == "yes" and res.power == 2

    def test_yes_implies_zero_lengths(self, heis1):
        phi = Endomorphism.from_strings(heis1.gens, {"a1": "a2", "a2": "", "a3": ""})
        res = eventually_trivial(heis1, phi)
        table = L_k_table(heis1, phi, kmax=6, radius=3)
        for k, length in zip(table.ks, table.lengths):
            if k >= res.power:
                assert length == 0


words_strategy = st.lists(
    st.tuples(st.integers(0, 2), st.integers(-3, 3).filter(lambda e: e != 0)),
    max_size=10,
).map(lambda ls: Word(tuple(ls)))


@settings(max_examples=60)
@given(words_strategy)
def test_reduce_preserves_element(w):
    machine = HeisenbergMachine(1)
    assert evaluate(machine, w) == evaluate(machine, reduce_word(w))


def test_reduce_preserves_element_every_family(any_machine):
    import random

    rng = random.Random(7)
    n = len(any_machine.gens)
    for _ in range(30):
        letters = tuple(
            (rng.randrange(n), rng.choice([-2, -1, 1, 2])) for _ in range(rng.randint(0, 8))
        )
        w = Word(letters)
        assert evaluate(any_machine, w) == evaluate(any_machine, reduce_word(w))


@settings(max_examples=60)
@given(words_strategy, words_strategy)
def test_reduce_respects_concatenation(u, v):
    machine = HeisenbergMachine(1)
    lhs = evaluate(machine, reduce_word(u) * reduce_word(v))
    rhs = evaluate(machine, u * v)
    assert lhs == rhs


@given(st.integers(-50, 50))
def test_elem_pow_matches_iteration(n):
    machine = KleinMachine()
    x = (1, 1)
    expected = machine.identity
    step = x if n >= 0 else machine.inv(x)
    for _ in range(abs(n)):
        expected = machine.mul(expected, step)
    assert elem_pow(machine, x, n) == expected


def test_compose_matches_substitution(z2):
    phi = Endomorphism.from_strings(z2.gens, {"e1": "e1 e2", "e2": "e2"})
    psi = Endomorphism.from_strings(z2.gens, {"e1": "e1^2", "e2": "e1 e2^3"})
    comp = phi.compose(psi)
    for g in z2.gens.names:
        w = Word(((z2.gens.index(g), 1),))
        assert evaluate(z2, comp.image_of_word(w)) == evaluate(z2, phi.image_of_word(psi.image_of_word(w)))
