import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from airabel import (
    Mobius,
    RationalAIR,
    StepKind,
    TransformChain,
    TransformStep,
    apply_mobius_x,
    apply_mobius_y,
    chain_invert,
    classify,
)
from airabel.classify import CanonicalClass, ClassTag, projective_roots
from airabel.core import equation_distance
from airabel.errors import InvalidArgumentError, PoleError

from helpers import (
    crand,
    random_equation,
    random_mobius,
    rhs_after_x_substitution,
    rhs_after_y_substitution,
)


def rel_close(e1: RationalAIR, e2: RationalAIR, tol: float) -> bool:
    return equation_distance(e1, e2) <= tol


class TestRationalAIR:
    def test_rejects_all_zero_numerator(self):
        with pytest.raises(InvalidArgumentError):
            RationalAIR((0, 0, 0, 0), (1, 0, 0), (0, 0, 1))

    def test_rejects_zero_denominator(self):
        with pytest.raises(InvalidArgumentError):
            RationalAIR((1, 0, 0, 0), (0, 0, 0), (0, 0, 0))

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidArgumentError):
            RationalAIR((float("nan"), 0, 0, 0), (1, 0, 0), (0, 0, 1))

    def test_rhs_reads_coefficients(self):
        eq = RationalAIR((0, -1, 0, 1), (0, 1, 0), (7, 0, 1))
        x, y = 0.3 + 0.1j, -0.7 + 0.2j
        assert eq.rhs(x, y) == pytest.approx((y**3 - y) / (x * y + x * x + 7))

    def test_vector_round_trip(self):
        eq = random_equation(np.random.default_rng(1))
        assert RationalAIR.from_vector(eq.vector()) == eq


class TestMobius:
    def test_degenerate_rejected(self):
        with pytest.raises(InvalidArgumentError):
            Mobius(1, 2, 2, 4)

    def test_identity_map_y(self):
        eq = random_equation(np.random.default_rng(2))
        assert rel_close(apply_mobius_y(eq, Mobius.identity()), eq, 1e-14)

    def test_identity_map_x(self):
        eq = random_equation(np.random.default_rng(3))
        assert rel_close(apply_mobius_x(eq, Mobius.identity()), eq, 1e-14)

    def test_inverse_composes_to_identity(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            m = random_mobius(rng)
            assert m.compose(m.inverse()).is_identity(1e-12)
            v = crand(rng)
            assert m.inverse()(m(v)) == pytest.approx(v, rel=1e-10, abs=1e-10)

    def test_infinity_handling(self):
        m = Mobius(1, 2, 3, 4)
        assert m(None) == pytest.approx(0.5)
        assert m(-0.75) is None


class TestApplyMobiusY:
    def test_roots_012_fixing_0_and_1(self):
        # y(y-1)(y-2); m fixes 0 and 1, so the new roots are 0, 1, m^-1(2)
        eq = RationalAIR((0, 2, -3, 1), (1, 0.5, 0), (0.3, 0, 1))
        m = Mobius(0, 1, 0.4, 0.6)
        assert m(0) == 0 and m(1) == pytest.approx(1)
        out = apply_mobius_y(eq, m)
        rho = m.inverse()(2)
        expected = np.array([0, rho, -(1 + rho), 1])
        got = np.array(out.a) / out.a[3]
        np.testing.assert_allclose(got, expected, atol=1e-12)

    def test_reciprocal_of_triple_root(self):
        # y' = y^3/(x y + 1) with y = 1/Y gives Y' = -1/(Y + x): root 0 (triple) moves to infinity
        eq = RationalAIR((0, 0, 0, 1), (0, 1, 0), (1, 0, 0))
        out = apply_mobius_y(eq, Mobius(1, 0, 0, 1))
        assert projective_roots(out.a, 3) == [(None, 3)]
        assert rel_close(out, RationalAIR((-1, 0, 0, 0), (1, 0, 0), (0, 1, 0)), 1e-14)

    def test_chain_rule_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            eq, m = random_equation(rng), random_mobius(rng)
            out = apply_mobius_y(eq, m)
            pts = [(crand(rng), crand(rng)) for _ in range(5)]
            want = np.array([rhs_after_y_substitution(eq, m, x, Y) for x, Y in pts])
            got = np.array([out.rhs(x, Y) for x, Y in pts])
            ratio = got / want
            np.testing.assert_allclose(ratio, ratio[0], rtol=1e-8)

    def test_root_covariance(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            eq, m = random_equation(rng), random_mobius(rng)
            out = apply_mobius_y(eq, m)
            old = _root_multiset(eq.a)
            inv = m.inverse()
            expected = sorted((_img(inv, r) for r in old), key=_order)
            got = sorted(_root_multiset(out.a), key=_order)
            for e, g in zip(expected, got):
                if e is None or g is None:
                    assert e is None and g is None
                else:
                    assert abs(e - g) <= 1e-8 * (1 + abs(e))


def _root_multiset(a):
    return [r for r, k in projective_roots(a, 3) for _ in range(k)]


def _img(m, r):
    v = m(r)
    if v is not None and abs(v) > 1e9:
        return None
    return v


def _order(z):
    return (1, 0, 0) if z is None else (0, round(z.real, 6), round(z.imag, 6))


class TestApplyMobiusX:
    def test_chain_rule_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            eq, m = random_equation(rng), random_mobius(rng)
            out = apply_mobius_x(eq, m)
            pts = [(crand(rng), crand(rng)) for _ in range(5)]
            want = np.array([rhs_after_x_substitution(eq, m, X, y) for X, y in pts])
            got = np.array([out.rhs(X, y) for X, y in pts])
            ratio = got / want
            np.testing.assert_allclose(ratio, ratio[0], rtol=1e-8)

    def test_kappa_step_cancels_x2_term(self):
        # denominator (x^2 + 1) y + x^2; kappa a root of the y-coefficient
        eq = RationalAIR((0, 1, 0, 0), (1, 0, 1), (0, 0, 1))
        kappa = 1j
        out = apply_mobius_x(eq, Mobius(1, kappa, 0, 1))  # x = 1/X + kappa
        assert abs(out.s[2]) <= 1e-14

    def test_kappa_step_reaches_constant_y_coefficient(self):
        # Stated expectation for this input: s1 = s2 = 0 after the kappa step.
        eq = RationalAIR((0, 1, 0, 0), (1, 0, 1), (0, 0, 1))
        for kappa in (1j, -1j):
            out = apply_mobius_x(eq, Mobius(1, kappa, 0, 1))
            assert abs(out.s[2]) <= 1e-14
            assert abs(out.s[1]) <= 1e-14

    def test_y_coefficient_discriminant_is_invariant(self):
        # S(x) as a binary quadratic form: its discriminant scales by det^2 under x-Mobius,
        # so a non-square S can never be made constant.
        rng = np.random.default_rng(8)
        for _ in range(20):
            eq, m = random_equation(rng), random_mobius(rng)
            out = apply_mobius_x(eq, m)
            d_old = _disc(eq.s) / eq.a[np.argmax(np.abs(eq.a))] ** 2
            d_new = _disc(out.s) / out.a[np.argmax(np.abs(eq.a))] ** 2
            assert d_new == pytest.approx(d_old, rel=1e-8, abs=1e-12)

    def test_b2_scaling_makes_x2_coefficient_one(self):
        # Eq (11)-form: constant y-coefficient, numerator y
        b2 = 2.5 - 0.5j
        eq = RationalAIR((0, 1, 0, 0), (0.7, 0, 0), (0.3, -1.1, b2))
        out = apply_mobius_x(eq, Mobius.scaling(1 / b2))
        out = RationalAIR.from_vector(out.vector() / out.a[1])
        assert out.r[2] == pytest.approx(1, abs=1e-14)
        assert out.s[1] == 0 and out.s[2] == 0


def _disc(q):
    q0, q1, q2 = q
    return q1 * q1 - 4 * q0 * q2


class TestProperties:
    def test_closure_100_random_maps(self):
        rng = np.random.default_rng(9)
        eq = random_equation(rng)
        for _ in range(100):
            m = random_mobius(rng)
            for out in (apply_mobius_x(eq, m), apply_mobius_y(eq, m)):
                assert isinstance(out, RationalAIR)
                assert np.all(np.isfinite(out.vector()))
                assert np.max(np.abs(out.vector())) == pytest.approx(1)

    def test_group_property(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            eq, m1, m2 = random_equation(rng), random_mobius(rng), random_mobius(rng)
            for apply in (apply_mobius_x, apply_mobius_y):
                two = apply(apply(eq, m1), m2)
                one = apply(eq, m1.compose(m2))
                assert rel_close(two, one, 1e-10)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(-2, 2, allow_nan=False), min_size=10, max_size=10),
        st.lists(st.floats(-2, 2, allow_nan=False), min_size=8, max_size=8),
    )
    def test_group_property_hypothesis(self, v, mm):
        if max(map(abs, v[:4])) < 0.1 or max(map(abs, v[4:])) < 0.1:
            return
        eq = RationalAIR.from_vector(v)
        try:
            m1, m2 = Mobius(*mm[:4]), Mobius(*mm[4:])
        except InvalidArgumentError:
            return
        if abs(m1.det) < 0.1 or abs(m2.det) < 0.1:
            return
        two = apply_mobius_y(apply_mobius_y(eq, m1), m2)
        one = apply_mobius_y(eq, m1.compose(m2))
        assert rel_close(two, one, 1e-8)


class TestTransformChain:
    def test_step_double_inverse(self):
        rng = np.random.default_rng(11)
        for kind in StepKind:
            value = random_mobius(rng) if kind.value.startswith("Mobius") else crand(rng) + 0.5
            step = TransformStep(kind, value)
            back = step.inverse().inverse()
            if isinstance(value, Mobius):
                m1, m2 = back.value, step.value
                k = m2.r / m1.r if m1.r else m2.s / m1.s
                for a, b in zip((m1.p, m1.q, m1.r, m1.s), (m2.p, m2.q, m2.r, m2.s)):
                    assert abs(a * k - b) <= 1e-12 * (1 + abs(b))
            else:
                assert back.value == pytest.approx(value, rel=1e-12)

    def test_empty_chain_inverts_to_empty(self):
        assert len(chain_invert(TransformChain())) == 0

    def test_shift_inverts_to_negative_shift(self):
        inv = chain_invert(TransformChain([TransformStep(StepKind.SHIFT_X, 1.5)]))
        assert len(inv) == 1
        assert inv.steps[0].kind is StepKind.SHIFT_X and inv.steps[0].value == -1.5

    def test_random_chain_round_trip(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            eq = random_equation(rng)
            steps = [
                TransformStep(StepKind.MOBIUS_X if rng.random() < 0.5 else StepKind.MOBIUS_Y, random_mobius(rng))
                for _ in range(4)
            ]
            chain = TransformChain(steps)
            back = chain_invert(chain).apply(chain.apply(eq))
            assert rel_close(back, eq, 1e-10)

    def test_classify_chain_round_trip_class1(self):
        rng = np.random.default_rng(13)
        cls = CanonicalClass(ClassTag.C1, (1.1, 0.4, -0.7))
        eq = apply_mobius_x(apply_mobius_y(cls.equation(), random_mobius(rng)), random_mobius(rng))
        found, chain = classify(eq)
        assert found.tag is ClassTag.C1
        assert rel_close(chain_invert(chain).apply(found.equation()), eq, 1e-10)

    def test_map_point_matches_substitution(self):
        rng = np.random.default_rng(14)
        eq = random_equation(rng)
        chain = TransformChain([TransformStep(StepKind.MOBIUS_X, random_mobius(rng)),
                                TransformStep(StepKind.MOBIUS_Y, random_mobius(rng))])
        new = chain.apply(eq)
        # a solution curve through (x, y) maps to one of the new equation: compare slopes
        x, y = 0.2 + 0.1j, 0.3 - 0.2j
        X, Y = chain.map_point(x, y)
        h = 1e-6
        X2, Y2 = chain.map_point(x + h, y + h * eq.rhs(x, y))
        assert (Y2 - Y) / (X2 - X) == pytest.approx(new.rhs(X, Y), rel=1e-4)

    def test_map_point_pole(self):
        step = TransformStep(StepKind.MOBIUS_X, Mobius(1, 0, 0, 1))  # x = 1/X
        with pytest.raises(PoleError):
            step.map_point(0, 1)
