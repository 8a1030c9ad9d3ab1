import random
from fractions import Fraction

import pytest

from boxops import graphs
from boxops.cubes import (
    AffineEmbedding,
    CubeConfig,
    LittleCube,
    blend,
    brute_force_realizes_below,
    compose_configs,
    factorization_checks,
    realization_certificate,
    stage_homotopy,
    realizes_below,
    realizes,
    infimum_check,
    less_i,
    permute_config,
    reedy_counterexample,
    sample_config,
    verify_cycle_certificate,
    witness,
)
from boxops.errors import FamilyError
from boxops.graphs import from_arcs, is_morphism
from boxops.textform import from_box_expr

from conftest import family_members

H = Fraction(1, 2)
T = Fraction(1, 3)


def worked_config():
    c1 = LittleCube.from_intervals((0, H), (0, T), (H, 1))
    c2 = LittleCube.from_intervals((0, 1), (T, 2 * T), (0, H))
    c3 = LittleCube.from_intervals((H, 1), (2 * T, 1), (H, 1))
    return CubeConfig(3, (c1, c2, c3))


def test_affine_embedding_validation():
    with pytest.raises(ValueError):
        AffineEmbedding(Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(ValueError):
        AffineEmbedding(Fraction(-1, 2), Fraction(1, 2))
    f = AffineEmbedding(Fraction(1, 4), Fraction(3, 4))
    assert f(Fraction(0)) == Fraction(1, 4)
    assert f(Fraction(1)) == Fraction(3, 4)


def test_less_i_boundary_and_self():
    c = LittleCube.from_intervals((0, H))
    d = LittleCube.from_intervals((H, 1))
    assert less_i(c, d, 1)  # touching closures allowed
    assert not less_i(d, c, 1)
    assert not less_i(c, c, 1)  # a < b forces overlap with itself


def test_less_i_worked_coordinate():
    p = worked_config()
    assert less_i(p.cubes[1], p.cubes[0], 3)  # 1/2 <= 1/2


def test_worked_config_separated_and_in_both():
    p = worked_config()
    assert p.separated()
    mu1 = from_box_expr("1[]2 2[]2 3", 3)
    mu2 = from_box_expr("2[]3(1[]1 3)", 3)
    assert realizes(p, mu1)
    assert realizes(p, mu2)


def test_in_G_fails_on_monochromatic_cycle():
    cyc = from_arcs(2, 3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)])
    rng = random.Random(5)
    for _ in range(10):
        cfg = sample_config(rng, 2, 3)
        assert not realizes(cfg, cyc)


def test_witness_two_elements():
    mu = from_box_expr("1[]2 2", 2)
    cfg = witness(mu)
    # both coordinates split by rank; label-1 ranks fall back to index order
    assert cfg.cubes[0].coords[0].a == 0 and cfg.cubes[0].coords[0].b == H
    assert cfg.cubes[1].coords[0].a == H and cfg.cubes[1].coords[0].b == 1
    assert cfg.cubes[0].coords[1].b == H
    assert realizes(cfg, mu)


def test_witness_single_cube_is_identity():
    cfg = witness(graphs.point(3))
    for f in cfg.cubes[0].coords:
        assert (f.a, f.b) == (0, 1)


def test_witness_or_cycle_exhaustive_g23():
    for mu in family_members("g", 2, 3):
        kind, payload = realization_certificate(mu)
        if graphs.in_family(mu, graphs.KE):
            assert kind == "witness"
            assert realizes(payload, mu)
            assert payload.separated()
        else:
            assert kind == "cycle"
            assert verify_cycle_certificate(mu, payload)


def test_witness_refusal_names_cycle():
    cyc = from_arcs(2, 3, [(0, 1, 2), (1, 2, 2), (2, 0, 2)])
    with pytest.raises(FamilyError):
        witness(cyc)


def test_infimum_check_identity_and_worked_instance():
    mu1 = from_box_expr("1[]2 2[]2 3", 3)
    mu2 = from_box_expr("2[]3(1[]1 3)", 3)
    p = worked_config()
    assert infimum_check(mu1, mu1, p) == mu1
    mu0 = infimum_check(mu1, mu2, p)
    assert is_morphism(mu0, mu1) and is_morphism(mu0, mu2)
    assert realizes(p, mu0)


def test_infimum_check_seeded_pairs():
    rng = random.Random(333)
    objs = list(family_members("ke", 2, 3))
    done = 0
    while done < 60:
        cfg = sample_config(rng, 2, 3)
        holders = [mu for mu in objs if realizes(cfg, mu)]
        if len(holders) < 2:
            continue
        mu1, mu2 = rng.sample(holders, 2)
        infimum_check(mu1, mu2, cfg)  # raises on any failed verification
        done += 1


def test_in_G_implies_in_F():
    rng = random.Random(12)
    objs = list(family_members("ke", 2, 3))
    for _ in range(40):
        cfg = sample_config(rng, 2, 3)
        for mu in objs:
            if realizes(cfg, mu):
                assert realizes_below(cfg, mu, check_separated=False)


def test_realizes_below_worked_instance():
    p = worked_config()
    nu = from_box_expr("2[]3(1[]2 3)", 3)
    assert realizes_below(p, nu)


def test_in_F_matches_brute_force_union_seeded():
    rng = random.Random(99)
    objs = list(family_members("ke", 2, 3))
    for _ in range(50):
        cfg = sample_config(rng, 2, 3)
        for nu in objs:
            got = realizes_below(cfg, nu, check_separated=False)
            want = brute_force_realizes_below(cfg, nu, objs)
            assert got == want


def test_in_F_monotone_seeded():
    rng = random.Random(4242)
    objs = list(family_members("ke", 2, 3))
    for _ in range(40):
        cfg = sample_config(rng, 2, 3)
        nu1 = rng.choice(objs)
        ups = [o for o in objs if is_morphism(nu1, o)]
        nu2 = rng.choice(ups)
        if realizes_below(cfg, nu1, check_separated=False):
            assert realizes_below(cfg, nu2, check_separated=False)


def test_homotopy_endpoint_identities():
    rng = random.Random(7)
    objs = list(family_members("ke", 2, 3))
    nu = objs[17]
    anchor = witness(nu)
    cfg = sample_config(rng, 2, 3)
    assert stage_homotopy(2, cfg, 0, anchor) == CubeConfig(
        2, (cfg.cubes[0], cfg.cubes[1], cfg.cubes[2])
    )
    assert stage_homotopy(1, cfg, 1, anchor) == anchor
    # chaining: H_j(-, 1) == H_{j-1}(-, 0)
    assert stage_homotopy(2, cfg, 1, anchor) == stage_homotopy(1, cfg, 0, anchor)
    with pytest.raises(ValueError):
        stage_homotopy(1, cfg, Fraction(3, 2), anchor)
    bad_anchor = sample_config(rng, 2, 3)
    if not realizes(bad_anchor, nu):
        with pytest.raises(ValueError):
            stage_homotopy(1, cfg, H, bad_anchor, nu=nu)


def test_homotopy_preserves_membership_seeded():
    rng = random.Random(606)
    objs = list(family_members("ke", 2, 3))
    done = 0
    while done < 60:
        nu = rng.choice(objs)
        anchor = witness(nu)
        cfg = sample_config(rng, 2, 3)
        if not realizes_below(cfg, nu, check_separated=False):
            continue
        j = rng.randint(1, 2)
        t = Fraction(rng.randint(0, 6), 6)
        moved = stage_homotopy(j, cfg, t, anchor, nu=nu)
        assert realizes_below(moved, nu, check_separated=False)
        done += 1


def test_blend_convexity_seeded():
    rng = random.Random(31)
    objs = list(family_members("ke", 2, 3))
    done = 0
    while done < 40:
        mu = rng.choice(objs)
        c1 = sample_config(rng, 2, 3)
        c2 = sample_config(rng, 2, 3)
        if not (realizes(c1, mu) and realizes(c2, mu)):
            continue
        lam = Fraction(rng.randint(0, 8), 8)
        assert realizes(blend(c1, c2, lam), mu)
        done += 1


def test_permute_and_compose_units():
    mu = from_box_expr("1[]2 2[]2 3", 2)
    cfg = witness(mu)
    assert permute_config(cfg, (0, 1, 2)) == cfg
    unit = witness(graphs.point(2))
    assert compose_configs(unit, [cfg]) == cfg


def test_factorization_checks_pass():
    report = factorization_checks(seed=20260808, gamma_samples=30)
    assert report["sigma_checked"] == 60 * 6
    assert report["gamma_checked"] == 30


def test_reedy_counterexample_all_steps():
    report = reedy_counterexample()
    assert report["step1_in_both"]
    assert len(report["step2_interval"]) == 2
    assert len(report["step3_below"]) == 1
    assert report["step4_fiber_size"] >= 2
    assert len(report["step4_components"]) >= 2
    assert report["not_injective"]


def test_config_text_round_trip():
    p = worked_config()
    assert CubeConfig.from_text(3, p.to_text()) == p


def test_down_family_infimum_sampled_property():
    # the labelwise minimum of two decreasing decomposables sharing a
    # configuration stays in the decreasing family (sampled, not certified)
    rng = random.Random(2718)
    downs = list(family_members("mdown", 2, 3))
    done = 0
    while done < 40:
        cfg = sample_config(rng, 2, 3)
        holders = [mu for mu in downs if realizes(cfg, mu)]
        if len(holders) < 2:
            continue
        mu1, mu2 = rng.sample(holders, 2)
        mu0 = infimum_check(mu1, mu2, cfg)
        assert graphs.in_family(mu0, graphs.MDOWN)
        done += 1
