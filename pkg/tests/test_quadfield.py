"""Tests for imaginary quadratic fields and decomposition counts."""

import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from lamtransfer.arith import primes_in_range

from lamtransfer.quadfield import (
    BinaryQuadraticForm,
    ImagQuadField,
    NoRepresentation,
    QuadFieldError,
    QuadInt,
    Splitting,
    brink_s_ell,
    class_number,
    norm_form_representation,
    quadint_pow,
    reduced_forms,
    splitting_type,
)

# h(-d) for fundamental discriminants -d
CLASS_NUMBERS = {
    3: 1, 4: 1, 7: 1, 8: 1, 11: 1, 15: 2, 19: 1, 20: 2, 23: 3, 24: 2,
    31: 3, 35: 2, 39: 4, 40: 2, 43: 1, 47: 5, 51: 2, 52: 2, 55: 4,
    56: 4, 59: 3, 67: 1, 71: 7, 84: 4, 163: 1, 164: 8,
}


SQUAREFREE_D = [1, 2, 3, 5, 6, 7, 10, 11, 13, 19, 23, 29, 31, 43, 51, 163]


def squarefree(n):
    return all(e == 1 for e in sympy.factorint(abs(n)).values())


def is_fundamental(disc):
    if disc % 4 == 1:
        return squarefree(disc)
    if disc % 4 == 0:
        m = disc // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


def count_reduced_forms(disc):
    count = 0
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            count += 1
        a += 1
    return count


class TestClassNumber:
    @pytest.mark.parametrize("d, h", sorted(CLASS_NUMBERS.items()))
    def test_table(self, d, h):
        assert class_number(-d) == h

    def test_fundamental_discriminants_to_500(self):
        checked = 0
        for disc in range(-3, -501, -1):
            if not is_fundamental(disc):
                continue
            assert class_number(disc) == count_reduced_forms(disc), disc
            checked += 1
        assert checked == 153

    def test_forms_of_minus_51(self):
        assert [str(f) for f in reduced_forms(-51)] == ["(1, 1, 13)", "(3, 3, 5)"]

    def test_non_fundamental_counts_primitive_only(self):
        # (2, 0, 2) has discriminant -16 but is not primitive
        assert [str(f) for f in reduced_forms(-16)] == ["(1, 0, 4)"]
        assert class_number(-12) == 1

    def test_bad_discriminant(self):
        with pytest.raises(QuadFieldError):
            class_number(-5)
        with pytest.raises(QuadFieldError):
            class_number(5)

    def test_reduced_predicate(self):
        assert BinaryQuadraticForm(3, 3, 5).is_reduced()
        assert not BinaryQuadraticForm(3, -3, 5).is_reduced()
        assert not BinaryQuadraticForm(5, 3, 3).is_reduced()
        assert BinaryQuadraticForm(3, 3, 5).discriminant == -51

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=3, max_value=3000))
    def test_every_form_is_reduced_and_primitive(self, d):
        if (-d) % 4 not in (0, 1):
            return
        for form in reduced_forms(-d):
            assert form.discriminant == -d
            assert form.is_reduced()
            assert form.is_primitive


class TestField:
    def test_field_51(self):
        K = ImagQuadField(51)
        assert K.disc == -51
        assert K.class_number == 2
        assert (K.omega_trace, K.omega_norm) == (1, 13)
        assert str(K) == "Q(sqrt -51)"

    def test_field_1_mod_4(self):
        K = ImagQuadField(5)
        assert K.disc == -20
        assert K.class_number == 2
        assert (K.omega_trace, K.omega_norm) == (0, 5)

    def test_rejects_bad_D(self):
        with pytest.raises(QuadFieldError):
            ImagQuadField(0)
        with pytest.raises(QuadFieldError):
            ImagQuadField(-3)
        with pytest.raises(QuadFieldError):
            ImagQuadField(12)

    def test_multiplication_is_norm_multiplicative(self):
        K = ImagQuadField(51)
        z, w = QuadInt(12, 11), QuadInt(4, 5)
        assert K.norm(K.mul(z, w)) == K.norm(z) * K.norm(w)
        assert K.norm(z) == 43 ** 2
        assert K.mul(z, K.conjugate(z)) == QuadInt(K.norm(z), 0)

    def test_norm_is_multiplicative_on_random_samples(self):
        rng = random.Random(20261018)
        fields = [ImagQuadField(D) for D in SQUAREFREE_D]
        for _ in range(10 ** 4):
            K = rng.choice(fields)
            z = QuadInt(rng.randint(-10 ** 6, 10 ** 6), rng.randint(-10 ** 6, 10 ** 6))
            w = QuadInt(rng.randint(-10 ** 6, 10 ** 6), rng.randint(-10 ** 6, 10 ** 6))
            assert K.norm(K.mul(z, w)) == K.norm(z) * K.norm(w)

    @settings(max_examples=200, deadline=None)
    @given(
        st.sampled_from(SQUAREFREE_D),
        st.integers(-50, 50),
        st.integers(-50, 50),
        st.integers(0, 12),
        st.integers(0, 12),
    )
    def test_powers_add(self, D, x, y, m, n):
        K = ImagQuadField(D)
        z = QuadInt(x, y)
        assert K.mul(quadint_pow(z, m, K), quadint_pow(z, n, K)) == quadint_pow(z, m + n, K)
        assert K.norm(quadint_pow(z, n, K)) == K.norm(z) ** n

    @pytest.mark.parametrize("D", [1, 2, 7, 29, 51, 163])
    def test_splitting_partitions_primes_to_ten_thousand(self, D):
        K = ImagQuadField(D)
        seen = {kind: [] for kind in Splitting}
        for ell in primes_in_range(2, 10 ** 4 + 1):
            kind = splitting_type(K, ell)
            seen[kind].append(ell)
            if K.disc % ell == 0:
                expected = Splitting.RAMIFIED
            elif ell == 2:
                expected = Splitting.SPLIT if K.disc % 8 == 1 else Splitting.INERT
            else:
                residue = pow(K.disc % ell, (ell - 1) // 2, ell)
                expected = Splitting.SPLIT if residue == 1 else Splitting.INERT
            assert kind is expected, (D, ell)
        assert sum(len(v) for v in seen.values()) == 1229
        assert seen[Splitting.RAMIFIED] == sympy.primefactors(abs(K.disc))
        assert seen[Splitting.SPLIT] and seen[Splitting.INERT]

    def test_quadint_str(self):
        assert str(QuadInt(115116, -952105)) == "115116 - 952105ω"
        assert str(QuadInt(1, 2)) == "1 + 2ω"

    @pytest.mark.parametrize(
        "ell, kind",
        [
            (5, Splitting.SPLIT),
            (19, Splitting.SPLIT),
            (43, Splitting.SPLIT),
            (7, Splitting.INERT),
            (3, Splitting.RAMIFIED),
            (17, Splitting.RAMIFIED),
            (2, Splitting.INERT),
        ],
    )
    def test_splitting(self, ell, kind):
        assert splitting_type(ImagQuadField(51), ell) is kind


class TestNormForm:
    def test_representations(self):
        K = ImagQuadField(51)
        assert norm_form_representation(K, 43 ** 2, p=5) == (12, 11)
        assert norm_form_representation(K, 19 ** 2, p=5) == (4, 5)
        assert norm_form_representation(K, 13 ** 2, p=5) == (12, 1)

    def test_primitive_preferred(self):
        K = ImagQuadField(51)
        assert norm_form_representation(K, 11 ** 2, p=5) == (1, 3)

    def test_not_a_norm(self):
        with pytest.raises(NoRepresentation):
            norm_form_representation(ImagQuadField(51), 2)
        with pytest.raises(NoRepresentation):
            norm_form_representation(ImagQuadField(51), 0)

    def test_power(self):
        K = ImagQuadField(51)
        assert quadint_pow(QuadInt(12, 11), 2, K) == QuadInt(-1429, 385)
        assert quadint_pow(QuadInt(12, 11), 4, K) == QuadInt(115116, -952105)
        assert quadint_pow(QuadInt(12, 11), 0, K) == QuadInt(1, 0)
        with pytest.raises(ValueError):
            quadint_pow(QuadInt(1, 1), -1, K)


class TestBrink:
    def test_ell_43(self):
        result = brink_s_ell(ImagQuadField(51), 43, 5)
        assert result.rep == (12, 11)
        assert result.power == QuadInt(115116, -952105)
        assert (result.t, result.s_ell) == (1, 1)
        assert result.flags == ()

    def test_ell_19(self):
        result = brink_s_ell(ImagQuadField(51), 19, 5)
        assert result.power == QuadInt(40556, -35945)
        assert result.s_ell == 1

    def test_higher_valuation(self):
        result = brink_s_ell(ImagQuadField(51), 13, 5)
        assert result.power == QuadInt(9036, 7175)
        assert (result.t, result.s_ell) == (2, 5)

    def test_to_dict(self):
        assert brink_s_ell(ImagQuadField(51), 43, 5).to_dict() == {
            "ell": 43,
            "a": 12,
            "b": 11,
            "astar": 115116,
            "bstar": -952105,
            "t": 1,
            "s_ell": 1,
            "flags": [],
        }

    def test_recipe_based_flag(self):
        result = brink_s_ell(ImagQuadField(23), 2, 13)
        assert result.rep == (1, 1)
        assert result.power == QuadInt(261379, -45045)
        assert result.s_ell == 1
        assert "recipe_based" in result.flags

        result = brink_s_ell(ImagQuadField(7), 37, 11)
        assert (result.t, result.s_ell) == (3, 121)

    @pytest.mark.parametrize(
        "D, ell, p",
        [
            (51, 7, 5),  # ell inert
            (51, 17, 5),  # ell ramified
            (51, 43, 7),  # p inert
            (23, 2, 3),  # p divides h
            (51, 45, 5),  # ell not prime
            (5, 3, 7),  # D = 1 mod 4
        ],
    )
    def test_rejections(self, D, ell, p):
        with pytest.raises(QuadFieldError):
            brink_s_ell(ImagQuadField(D), ell, p)
