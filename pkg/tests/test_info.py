import numpy as np
import pytest

from rdeq.info import (
    CondPmf,
    DistortionMatrix,
    JointTable,
    Pmf,
    ValidationError,
    assemble_joint,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    h2,
    mutual_information,
    star,
)
from helpers import oracle_cmi, oracle_conditional_entropy, oracle_entropy, oracle_mi, random_joint

H2_01 = 0.4689955935892812  # h2(0.1)


class TestPmfValidation:
    def test_negative_entry_rejected(self):
        with pytest.raises(ValidationError):
            Pmf([0.5, 0.6, -0.1])

    def test_bad_sum_rejected(self):
        with pytest.raises(ValidationError):
            Pmf([0.5, 0.4])

    def test_tiny_float_noise_accepted(self):
        Pmf([0.3, 0.7 + 5e-13])

    def test_cond_pmf_rows_validated(self):
        with pytest.raises(ValidationError):
            CondPmf([[0.5, 0.5], [0.7, 0.2]])

    def test_joint_table_sum(self):
        with pytest.raises(ValidationError):
            JointTable(np.full((2, 2), 0.3))

    def test_distortion_bounds(self):
        with pytest.raises(ValidationError):
            DistortionMatrix([[0.0, -1.0], [1.0, 0.0]])
        d = DistortionMatrix.hamming(3)
        assert d.d_max == 1.0


class TestEntropy:
    def test_uniform_four(self):
        assert entropy(Pmf.uniform(4)) == pytest.approx(2.0, abs=1e-12)

    def test_point_mass(self):
        assert entropy(Pmf([1.0, 0.0])) == 0.0

    def test_skewed_binary(self):
        assert entropy(Pmf([0.1, 0.9])) == pytest.approx(H2_01, abs=1e-12)

    def test_matches_oracle_on_random_pmfs(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            p = rng.dirichlet(np.ones(int(rng.integers(2, 9))))
            assert entropy(Pmf(p)) == pytest.approx(oracle_entropy(p), abs=1e-12)


class TestConditionalEntropy:
    def test_independent_pair(self):
        joint = JointTable(np.full((2, 3), 1.0 / 6.0))
        assert conditional_entropy(joint, (0,), (1,)) == pytest.approx(1.0, abs=1e-12)

    def test_deterministic_function(self):
        # target = given
        joint = JointTable(np.diag([0.2, 0.3, 0.5]))
        assert conditional_entropy(joint, (0,), (1,)) == pytest.approx(0.0, abs=1e-12)

    def test_bsc_side_information(self):
        # uniform binary through BSC(0.1): H(A|E) = h2(0.1)
        joint = JointTable(np.array([[0.45, 0.05], [0.05, 0.45]]))
        got = conditional_entropy(joint, (0,), (1,))
        assert got == pytest.approx(H2_01, abs=1e-12)
        assert got == pytest.approx(oracle_conditional_entropy(joint.probs, (0,), (1,)), abs=1e-12)

    def test_empty_given_is_marginal_entropy(self):
        joint = JointTable(np.array([[0.45, 0.05], [0.05, 0.45]]))
        assert conditional_entropy(joint, (0,), ()) == pytest.approx(1.0, abs=1e-12)

    def test_axis_out_of_range(self):
        joint = JointTable(np.full((2, 2), 0.25))
        with pytest.raises(ValidationError):
            conditional_entropy(joint, (0,), (2,))
        with pytest.raises(ValidationError):
            conditional_entropy(joint, (0,), (0,))


class TestMutualInformation:
    def test_independent(self):
        joint = JointTable(np.full((2, 2), 0.25))
        assert mutual_information(joint, (0,), (1,)) == 0.0

    def test_identical_uniform(self):
        joint = JointTable(np.diag([0.5, 0.5]))
        assert mutual_information(joint, (0,), (1,)) == pytest.approx(1.0, abs=1e-12)

    def test_bsc(self):
        joint = JointTable(np.array([[0.45, 0.05], [0.05, 0.45]]))
        assert mutual_information(joint, (0,), (1,)) == pytest.approx(
            1.0 - H2_01, abs=1e-12
        )

    def test_overlap_rejected(self):
        joint = JointTable(np.full((2, 2), 0.25))
        with pytest.raises(ValidationError):
            mutual_information(joint, (0,), (0,))


class TestConditionalMutualInformation:
    def test_markov_chain_is_zero(self):
        # X - Z - Y assembled as a product, so I(X;Y|Z) = 0 exactly
        rng = np.random.default_rng(1)
        pz = rng.dirichlet(np.ones(3))
        px_z = rng.dirichlet(np.ones(2), size=3)
        py_z = rng.dirichlet(np.ones(2), size=3)
        probs = np.einsum("z,zx,zy->xyz", pz, px_z, py_z)
        joint = JointTable(probs)
        assert conditional_mutual_information(joint, (0,), (1,), (2,)) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_independent_conditioner(self):
        rng = np.random.default_rng(2)
        pxy = rng.dirichlet(np.ones(4)).reshape(2, 2)
        pz = rng.dirichlet(np.ones(3))
        joint = JointTable(np.einsum("xy,z->xyz", pxy, pz))
        cmi = conditional_mutual_information(joint, (0,), (1,), (2,))
        mi = mutual_information(JointTable(pxy), (0,), (1,))
        assert cmi == pytest.approx(mi, abs=1e-10)

    def test_matches_bruteforce_on_random_2x2x2(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            probs = rng.dirichlet(np.ones(8)).reshape(2, 2, 2)
            joint = JointTable(probs)
            got = conditional_mutual_information(joint, (0,), (1,), (2,))
            assert got == pytest.approx(oracle_cmi(probs, (0,), (1,), (2,)), abs=1e-10)


class TestRandomOracleBattery:
    def test_measures_match_bruteforce(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            joint = random_joint(rng)
            axes = list(range(joint.ndim))
            rng.shuffle(axes)
            ha = conditional_entropy(joint, (axes[0],), ())
            assert ha == pytest.approx(
                oracle_conditional_entropy(joint.probs, (axes[0],), ()), abs=1e-10
            )
            mi = mutual_information(joint, (axes[0],), (axes[1],))
            assert mi == pytest.approx(oracle_mi(joint.probs, (axes[0],), (axes[1],)), abs=1e-10)
            if joint.ndim >= 3:
                cmi = conditional_mutual_information(joint, (axes[0],), (axes[1],), (axes[2],))
                assert cmi == pytest.approx(
                    oracle_cmi(joint.probs, (axes[0],), (axes[1],), (axes[2],)), abs=1e-10
                )

    def test_information_inequalities(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            joint = random_joint(rng)
            assert mutual_information(joint, (0,), (1,)) >= 0.0
            assert conditional_entropy(joint, (0,), (1,)) <= conditional_entropy(
                joint, (0,), ()
            ) + 1e-10
            if joint.ndim >= 3:
                assert conditional_mutual_information(joint, (0,), (1,), (2,)) >= 0.0


class TestBinaryHelpers:
    def test_h2_examples(self):
        assert h2(0.0) == 0.0
        assert h2(1.0) == 0.0
        assert h2(0.5) == pytest.approx(1.0, abs=1e-15)
        assert h2(0.1) == pytest.approx(H2_01, abs=1e-15)

    def test_h2_symmetric(self):
        for x in np.linspace(0.0, 0.5, 51):
            assert h2(float(x)) == pytest.approx(h2(float(1.0 - x)), abs=1e-12)

    def test_h2_domain(self):
        with pytest.raises(ValidationError):
            h2(-0.01)
        with pytest.raises(ValidationError):
            h2(1.01)

    def test_star_examples(self):
        assert star(0.1, 0.1) == pytest.approx(0.18, abs=1e-15)
        for a in np.linspace(0.0, 1.0, 21):
            assert star(float(a), 0.0) == pytest.approx(float(a), abs=1e-15)
            assert star(float(a), 0.5) == pytest.approx(0.5, abs=1e-15)
            assert star(float(a), 0.3) == pytest.approx(star(0.3, float(a)), abs=1e-15)

    def test_star_domain(self):
        with pytest.raises(ValidationError):
            star(1.2, 0.1)

    def test_convolution_increases_entropy(self):
        grid = np.linspace(0.0, 0.5, 100)
        for a in grid:
            for b in grid:
                assert h2(star(float(a), float(b))) >= max(h2(float(a)), h2(float(b))) - 1e-12


class TestAssembleJoint:
    def test_single_pmf(self):
        jt = assemble_joint([("a", Pmf([0.3, 0.7]))])
        assert jt.dims == (2,)
        assert jt.names == ("a",)
        np.testing.assert_allclose(jt.probs, [0.3, 0.7])

    def test_bec_product_entry(self):
        bec = CondPmf([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5]])
        jt = assemble_joint([("a", Pmf.uniform(2)), ("b", bec, ("a",))])
        assert jt.probs[0, 1] == pytest.approx(0.25, abs=1e-15)

    def test_chain_induces_markov(self):
        rng = np.random.default_rng(5)
        pv = CondPmf(rng.dirichlet(np.ones(3), size=2))
        pu = CondPmf(rng.dirichlet(np.ones(2), size=3))
        jt = assemble_joint(
            [("a", Pmf([0.4, 0.6])), ("v", pv, ("a",)), ("u", pu, ("v",))]
        )
        cmi = conditional_mutual_information(
            jt, jt.axes_of("u"), jt.axes_of("a"), jt.axes_of("v")
        )
        assert cmi == pytest.approx(0.0, abs=1e-12)

    def test_total_mass_and_factor_recovery(self):
        rng = np.random.default_rng(6)
        pa = rng.dirichlet(np.ones(3))
        pb_a = rng.dirichlet(np.ones(2), size=3)
        pc_ab = rng.dirichlet(np.ones(4), size=6)
        jt = assemble_joint(
            [
                ("a", Pmf(pa)),
                ("b", CondPmf(pb_a), ("a",)),
                ("c", CondPmf(pc_ab), ("a", "b")),
            ]
        )
        assert jt.probs.sum() == pytest.approx(1.0, abs=1e-12)
        # every factor is recovered as a conditional marginal
        np.testing.assert_allclose(jt.marginal(jt.axes_of("a")).probs, pa, atol=1e-12)
        m_ab = jt.marginal(jt.axes_of("a", "b")).probs
        np.testing.assert_allclose(m_ab, pa[:, None] * pb_a, atol=1e-12)
        m_abc = jt.probs
        cond_c = m_abc / m_ab[:, :, None]
        np.testing.assert_allclose(cond_c.reshape(6, 4), pc_ab, atol=1e-12)

    def test_multi_output_factor(self):
        pyz = CondPmf([[0.5, 0.0, 0.0, 0.5], [0.25, 0.25, 0.25, 0.25]])
        jt = assemble_joint([("x", Pmf.uniform(2)), (("y", "z"), pyz, ("x",), (2, 2))])
        assert jt.dims == (2, 2, 2)
        assert jt.names == ("x", "y", "z")

    def test_joint_root_factor(self):
        inner = JointTable(np.full((2, 2), 0.25))
        jt = assemble_joint([(("a", "b"), inner)])
        assert jt.names == ("a", "b")

    def test_reintroduced_variable_rejected(self):
        with pytest.raises(ValidationError):
            assemble_joint([("a", Pmf.uniform(2)), ("a", Pmf.uniform(2))])

    def test_unintroduced_given_rejected(self):
        cond = CondPmf(np.eye(2))
        with pytest.raises(ValidationError):
            assemble_joint([("a", Pmf.uniform(2)), ("b", cond, ("c",))])

    def test_dimension_mismatch_rejected(self):
        cond = CondPmf(np.eye(3))
        with pytest.raises(ValidationError):
            assemble_joint([("a", Pmf.uniform(2)), ("b", cond, ("a",))])
