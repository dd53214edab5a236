"""Tests for the seeded verification harness."""

import numpy as np
import pytest

from lfmsemi import embedding as emb
from lfmsemi.embedding import build_semigroup, embed_hyperbolic, embed_parabolic
from lfmsemi.maps import BALL, SIEGEL, BallMap, SiegelMap, identity_ball_map, to_proj

from lfmsemi.verify import (
    CheckReport,
    SamplerCfg,
    check_conjugacy,
    check_generator,
    check_identity_at_zero,
    check_self_map,
    check_semigroup_law,
    check_time_one,
    verify_family,
)

from test_embedding import hyperbolic_nf, parabolic_nf, split_nf


def scaling_family(factor=0.5):
    nf = split_nf([], [[factor]])
    return build_semigroup(emb.embed_elliptic_split(nf))


class TestSelfMap:
    def test_identity_margin(self):
        cfg = SamplerCfg(count=100, domain=BALL)
        rep = check_self_map(identity_ball_map(2), cfg)
        assert rep.passed
        assert rep.worst_margin == pytest.approx(1 - 0.95, abs=1e-12)

    def test_contraction(self):
        f = BallMap(np.eye(2) / 2, np.zeros(2), np.zeros(2), 1.0)
        rep = check_self_map(f, SamplerCfg(count=64, domain=BALL))
        assert rep.passed and rep.worst_margin > 0.5

    def test_scaled_up_fails_with_witness(self):
        # bypass the constructor check to plant a violation
        f = identity_ball_map(1)
        object.__setattr__(f, "A", np.array([[1.01]], dtype=complex))
        cfg = SamplerCfg(count=64, domain=BALL, radius_schedule=(0.5, 0.9, 0.995))
        rep = check_self_map(f, cfg)
        assert not rep.passed
        assert rep.worst_point is not None
        assert abs(rep.worst_point[0]) == pytest.approx(0.995, abs=1e-12)


class TestSemigroupLaw:
    def test_elliptic_tight(self):
        sg = scaling_family()
        rep = check_semigroup_law(sg, [0.3, 0.7, 1.2], SamplerCfg(count=40), tol=1e-12)
        assert rep.passed

    def test_parabolic_family(self):
        sg = build_semigroup(embed_parabolic(
            parabolic_nf([0.2], [np.exp(0.9j)], [0.5], [0.4], 2.0j)))
        cfg = SamplerCfg(count=40, domain=SIEGEL)
        rep = check_semigroup_law(sg, [0.25, 0.5, 1.0], cfg)
        assert rep.passed

    def test_corrupted_path_fails(self):
        cert = embed_parabolic(parabolic_nf([], [], [0.5], [0.4], 2.0j))
        sg = build_semigroup(cert)
        bad = emb.SemigroupFamily("parabolic_linear_path", dict(sg.parameters), SIEGEL)

        class BadFamily:
            domain = SIEGEL

            def at(self, t):
                good = sg.at(t)
                # replace the coefficient path by the (wrong) linear one
                return SiegelMap(good.lam, t * cert.generator_data["c"] *
                                 np.ones(1), good.b, good.M, good.c)

        rep = check_semigroup_law(BadFamily(), [0.3, 0.6], SamplerCfg(count=30, domain=SIEGEL))
        assert not rep.passed


class TestTimeOne:
    def test_identity_family(self):
        sg = scaling_family(1.0 - 1e-14)
        rep = check_time_one(sg, sg.at(1.0), SamplerCfg(count=30))
        assert rep.passed

    def test_built_family_hits_target(self):
        cert = embed_parabolic(parabolic_nf([0.1], [], [0.5], [0.3], 1.5j))
        sg = build_semigroup(cert)
        rep = check_time_one(sg, cert.target, SamplerCfg(count=50, domain=SIEGEL))
        assert rep.passed and rep.worst_margin > -1e-9

    def test_wrong_branch_fails(self):
        # a half-turn shift is not a logarithm of the same map
        nf = split_nf([], [[0.5]])
        cert = emb.embed_elliptic_split(nf)
        sg = build_semigroup(cert)
        bad_params = dict(sg.parameters)
        bad_params["M"] = sg.parameters["M"] + 1j * np.pi * np.eye(1)
        bad = emb.SemigroupFamily("elliptic_split", bad_params, BALL, sg.target)
        rep = check_time_one(bad, nf.normal_map, SamplerCfg(count=30))
        assert not rep.passed


class TestGenerator:
    def test_linear_family_residual_tiny(self):
        sg = scaling_family()
        rep = check_generator(sg, SamplerCfg(count=20))
        assert rep.passed and rep.worst_margin > -1e-7

    def test_u0_family(self):
        from lfmsemi.normal_forms import elliptic_u0

        f = BallMap([[0.5]], [0.0], [0.3 * (0.5 - 1.0)], 1.0)
        cert = emb.embed_elliptic_u0(elliptic_u0(f))
        sg = build_semigroup(cert)
        rep = check_generator(sg, SamplerCfg(count=30))
        assert rep.passed

    def test_h_refinement_quadratic(self):
        sg = build_semigroup(embed_hyperbolic(
            hyperbolic_nf(3.0, [], [0.3], [0.2], [], 0.5j)))
        cfg = SamplerCfg(count=20, domain=SIEGEL)
        r1 = check_generator(sg, cfg, h=2e-3)
        r2 = check_generator(sg, cfg, h=1e-3)
        assert r1.worst_margin / r2.worst_margin == pytest.approx(4.0, rel=0.25)


class TestConjugacy:
    def test_identity_conjugation(self):
        f = identity_ball_map(2)
        rep = check_conjugacy(f, f, identity_ball_map(2), SamplerCfg(count=30))
        assert rep.passed

    def test_normal_form_chain(self):
        from lfmsemi.maps import cayley_to_ball, heisenberg_map
        from lfmsemi.normal_forms import chain_map, parabolic_normal_form

        g = heisenberg_map(np.array([0.3]), 1j * 0.09 + 0.4)
        f = cayley_to_ball(g)
        nf = parabolic_normal_form(f)
        s = chain_map(nf.conjugations)
        rep = check_conjugacy(f, nf.normal_map, s, SamplerCfg(count=60, domain=BALL))
        assert rep.passed

    def test_perturbed_chain_fails(self):
        from lfmsemi.maps import cayley_to_ball, heisenberg_map
        from lfmsemi.normal_forms import chain_map, parabolic_normal_form

        g = heisenberg_map(np.array([0.3]), 1j * 0.09 + 0.4)
        f = cayley_to_ball(g)
        nf = parabolic_normal_form(f)
        s = chain_map(nf.conjugations)
        bad = to_proj(s)
        object.__setattr__(bad, "mat", bad.mat + 1e-3)
        rep = check_conjugacy(f, nf.normal_map, bad, SamplerCfg(count=30, domain=BALL))
        assert not rep.passed


class TestFamilyBattery:
    def test_full_battery(self):
        cert = embed_hyperbolic(hyperbolic_nf(4.0, [np.exp(0.5j)], [0.4], [0.5], [], 1.0j))
        sg = build_semigroup(cert)
        reports = verify_family(sg)
        assert all(r.passed for r in reports), [str(r) for r in reports]
        names = [r.check_id for r in reports]
        assert names == ["identity_at_zero", "semigroup_law", "self_map",
                         "time_one", "generator_fd"]

    def test_determinism(self):
        cert = embed_parabolic(parabolic_nf([0.2], [np.exp(0.9j)], [0.5], [0.4], 2.0j))
        sg = build_semigroup(cert)
        r1 = verify_family(sg, seed=7)
        r2 = verify_family(sg, seed=7)
        for a, b in zip(r1, r2):
            assert a.worst_margin == b.worst_margin
            assert a.passed == b.passed

    def test_identity_at_zero(self):
        sg = scaling_family()
        rep = check_identity_at_zero(sg, SamplerCfg(count=20))
        assert rep.passed and rep.worst_margin > -1e-12
