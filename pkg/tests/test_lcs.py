"""Graded degree-2/3 data, the tau/delta calculus, and the kappa obstruction."""

import random

import pytest

from arrlcs.config import glue_c13, maclane_c8
from arrlcs.exactlin import IntMatrix, Lattice, dot, lattice_sum, member, perp, vec_mat
from arrlcs.lcs import (
    ConfigMismatchError,
    HomR2P3,
    automorphism_from_line_perm,
    b_lattice,
    bracket_to_l3,
    build_lcs,
    builtin_g_difference,
    builtin_g_map,
    builtin_generator_lists,
    generator_lists_consistent,
    check_equivariance,
    class_of_glued,
    delta_bar,
    delta_bar_from_lift,
    delta_kernel,
    delta_lift_rows,
    glued_g_map,
    kappa,
    maclane_dual_basis,
    omega_functionals,
    t_functional,
    tau_kernel,
    tau_kernel_equals_u,
    tau_lift_rows,
    tau_preimage,
    tau_preimage_equals_u_plus_b,
    tau_star_identities,
    tau_tilde,
    transport_group,
    u_lattice,
)
from arrlcs.words import AbelianGMap, GMap, Word, abelianize, parse_word


def random_abelian(rng: random.Random, data, bound: int = 2) -> AbelianGMap:
    vec = [
        rng.randint(-bound, bound) if rng.random() < 0.3 else 0
        for _ in range(data.a_rank)
    ]
    return AbelianGMap.from_vector(data.config, vec)


# -- graded ranks -------------------------------------------------------------


def test_maclane_graded_ranks(maclane_data):
    data = maclane_data
    assert data.n == 7
    assert data.npairs == 21
    assert data.dim3 == 112
    assert data.r2.rank == 13
    assert data.p2.free_rank == 8
    assert data.p2.is_torsion_free
    assert data.r3.rank == 91
    assert data.p3.free_rank == 21
    assert data.p3.is_torsion_free
    assert data.r3perp.rank == 21
    assert data.a_rank == 147
    assert data.hw_rank == 147
    assert data.tau_matrix.shape == (147, 13 * 21)
    assert data.im_delta.ambient_rank == 13 * 21


def test_r3perp_routes_agree(maclane_data):
    assert maclane_data._r3perp_via_dstar() == maclane_data._r3perp_via_lie()


def test_glued_degree_two(c13_data):
    data = c13_data
    assert data.n == 12
    assert data.npairs == 66
    assert data.r2.rank == 51
    assert data.p2.free_rank == 15
    assert data.p2.is_torsion_free
    assert data.dim3 == 572


def test_degree_two_on_asymmetric_config(asymmetric_config):
    data = build_lcs(asymmetric_config)
    assert data.n == 8
    assert data.r2.rank == len(data.gens) == 20
    assert data.p2.free_rank == 8
    assert data.p2.is_torsion_free


# -- the kernel lattices ------------------------------------------------------


def test_u_generators_lie_in_kernel(maclane_data):
    data = maclane_data
    u = u_lattice(data.config)
    assert u.rank == 129
    for row in u.basis.entries:
        a = AbelianGMap.from_vector(data.config, row)
        assert tau_tilde(data, a).is_zero()


def test_b_generators_map_into_im_delta(maclane_data):
    data = maclane_data
    b = b_lattice(data.config)
    assert b.rank == 49
    for row in b.basis.entries:
        a = AbelianGMap.from_vector(data.config, row)
        value = tau_tilde(data, a)
        res = member(value.flat, data.im_delta)
        assert res.ok
        assert vec_mat(res.coefficients, data.im_delta.basis) == value.flat


def test_kernel_and_preimage_lattices(maclane_data):
    data = maclane_data
    u = u_lattice(data.config)
    b = b_lattice(data.config)
    both = lattice_sum(u, b)
    assert both.rank == 143
    assert tau_kernel(data) == u
    assert tau_kernel_equals_u(data)
    assert tau_preimage(data) == both
    assert tau_preimage_equals_u_plus_b(data)


# -- tau and delta ------------------------------------------------------------


def test_tau_is_additive(maclane_data):
    data = maclane_data
    for k in range(100):
        rng = random.Random(k)
        a = random_abelian(rng, data)
        b = random_abelian(rng, data)
        c = random_abelian(rng, data)
        lhs = tau_tilde(data, a + b) + tau_tilde(data, c)
        rhs = tau_tilde(data, a) + (tau_tilde(data, b) + tau_tilde(data, c))
        assert lhs == rhs


def test_tau_accepts_gmap_via_abelianization(maclane_data):
    data = maclane_data
    g = builtin_g_map("plus")
    assert tau_tilde(data, g) == tau_tilde(data, abelianize(g))


def test_tau_lift_rows_project_to_tau_value(maclane_data):
    data = maclane_data
    proj = data.p3.projection
    for k in range(20):
        rng = random.Random(k)
        a = random_abelian(rng, data)
        lift = tau_lift_rows(data, a)
        flat = []
        for g in range(len(data.gens)):
            flat.extend(vec_mat(bracket_to_l3(data, lift.row(g)), proj))
        assert tuple(flat) == tau_tilde(data, a).flat


def test_delta_bar_is_lift_independent(maclane_data):
    data = maclane_data
    for k in range(20):
        rng = random.Random(k)
        f = IntMatrix(
            [[rng.randint(-3, 3) for _ in range(data.p2.free_rank)] for _ in range(data.n)],
            data.p2.free_rank,
        )
        fhat = f @ data.p2.section
        assert delta_bar(data, f) == delta_bar_from_lift(data, fhat)
        shifted = [list(fhat.row(i)) for i in range(data.n)]
        for _ in range(3):
            i = rng.randrange(data.n)
            r = rng.choice(data.r2.basis.entries)
            c = rng.randint(-2, 2)
            shifted[i] = [x + c * y for x, y in zip(shifted[i], r)]
        assert delta_bar_from_lift(data, IntMatrix(shifted, data.npairs)) == delta_bar(data, f)


def test_delta_lift_rows_project_to_delta_value(maclane_data):
    data = maclane_data
    proj = data.p3.projection
    for k in range(10):
        rng = random.Random(k)
        fhat = IntMatrix(
            [[rng.randint(-2, 2) for _ in range(data.npairs)] for _ in range(data.n)],
            data.npairs,
        )
        lift = delta_lift_rows(data, fhat)
        flat = []
        for g in range(len(data.gens)):
            flat.extend(vec_mat(bracket_to_l3(data, lift.row(g)), proj))
        assert tuple(flat) == delta_bar_from_lift(data, fhat).flat


def test_delta_kernel_complements_image(maclane_data):
    data = maclane_data
    ker = delta_kernel(data)
    assert ker.rank == 7
    assert ker.rank + data.im_delta.rank == data.n * data.p2.free_rank
    for row in ker.basis.entries:
        f = IntMatrix(
            [row[i * data.p2.free_rank : (i + 1) * data.p2.free_rank] for i in range(data.n)],
            data.p2.free_rank,
        )
        assert delta_bar(data, f).is_zero()


def test_pairing_identity_at_shared_points(maclane_data):
    # <S(i,j), lift of delta f(rbar(k,p))> = -<omega_ij, f(x_k)> whenever
    # p is the finite intersection of lines i and k.
    data = maclane_data
    config = data.config
    duals = {e.label: e for e in maclane_dual_basis()}
    omegas = {e.label: e for e in omega_functionals(config)}
    gp = data.index.gen_pos
    checked = 0
    for seed in range(3):
        rng = random.Random(seed)
        f = IntMatrix(
            [[rng.randint(-4, 4) for _ in range(data.p2.free_rank)] for _ in range(data.n)],
            data.p2.free_rank,
        )
        fhat = f @ data.p2.section
        lift = delta_lift_rows(data, fhat)
        for label, e in duals.items():
            if e.tag != "S":
                continue
            inner = label[2:-1].split(",")
            if len(inner) != 2:
                continue
            i, j = int(inner[0]), int(inner[1])
            lo, hi = min(i, j), max(i, j)
            sign = 1 if i < j else -1
            om = omegas[f"omega({lo},{hi})"].coords
            for p in data.index.p0:
                lines_p = config.lines_through(p)
                if i not in lines_p:
                    continue
                for k in lines_p:
                    if k == i or (k, p) not in gp:
                        continue
                    lhs = dot(e.coords, lift.row(gp[(k, p)]))
                    assert lhs == -sign * dot(om, fhat.row(k - 1))
                    checked += 1
    assert checked == 60


# -- dual bases and transport -------------------------------------------------


def test_dual_basis_spans(maclane_data):
    data = maclane_data
    duals = maclane_dual_basis()
    by_tag = {}
    for e in duals:
        by_tag.setdefault(e.tag, []).append(e)
    assert len(by_tag["S"]) == 16  # 6 ordered infinity pairs + 2 per finite triple point
    assert len(by_tag["T"]) == 5
    assert sum(len(by_tag[t]) for t in ("I", "J", "K1", "K2")) == 18
    st_rows = [e.coords for e in duals if e.space == "hwedge"]
    assert Lattice(data.hw_rank, IntMatrix(st_rows, data.hw_rank)) == data.r3perp
    ijk_rows = [e.coords for e in duals if e.space == "aflags"]
    assert Lattice(data.a_rank, IntMatrix(ijk_rows, data.a_rank)) == perp(
        u_lattice(data.config)
    )


def test_tau_star_identities(maclane_data):
    rep = tau_star_identities(maclane_data)
    assert len(rep.identities) == 7
    assert all(ok for _, ok in rep.identities)
    assert rep.transport_consistent
    assert len(rep.point_coverage) == 8
    assert all(ok for _, ok in rep.point_coverage)
    assert rep.all_ok


def test_transport_group_and_equivariance(maclane_data):
    data = maclane_data
    group = transport_group(data)
    assert len(group) == 6
    for perm in ((0, 6, 5, 4, 3, 2, 1, 7), (0, 3, 4, 5, 6, 1, 2, 7)):
        sigma = automorphism_from_line_perm(data.config, perm)
        assert check_equivariance(data, sigma)


def test_line_perm_must_preserve_incidence(maclane_data):
    with pytest.raises(ValueError):
        automorphism_from_line_perm(maclane_data.config, (0, 2, 1, 3, 4, 5, 6, 7))


# -- bundled conjugator data --------------------------------------------------


def test_builtin_g_maps(maclane_data):
    plus = builtin_g_map("plus")
    minus = builtin_g_map("minus")
    assert plus.value(4, "p45") == parse_word("w6^-1 w3^-1")
    assert minus.value(4, "p45") == parse_word("w7^-1")
    assert plus != minus
    with pytest.raises(ValueError):
        builtin_g_map("other")


def test_builtin_generator_lists_consistent():
    assert generator_lists_consistent("plus")
    assert generator_lists_consistent("minus")
    lists = builtin_generator_lists("plus")
    assert set(lists) == {"p135", "p147", "p16", "p23", "p246", "p257", "p367", "p45"}
    with pytest.raises(ValueError):
        builtin_generator_lists("other")


def test_builtin_difference_values():
    diff = builtin_g_difference()
    assert diff.value(4, "p45") == (0, 0, -1, 0, 0, -1, 1)
    assert diff.value(2, "p23") == (0, 0, 0, 0, -1, 0, 0)
    assert diff.value(6, "p246") == (0, 0, 0, 0, 0, 0, -1)


def test_t_functional_values(maclane_data):
    data = maclane_data
    assert t_functional(builtin_g_difference()) == 1
    for row in u_lattice(data.config).basis.entries:
        assert t_functional(AbelianGMap.from_vector(data.config, row)) == 0
    for row in b_lattice(data.config).basis.entries:
        assert t_functional(AbelianGMap.from_vector(data.config, row)) == 0
    with pytest.raises(ConfigMismatchError):
        t_functional(abelianize(GMap(glue_c13())))


# -- kappa --------------------------------------------------------------------


def test_kappa_separates_builtin_pair(maclane_data):
    data = maclane_data
    rep = kappa(data, builtin_g_map("plus"), builtin_g_map("minus"))
    assert not rep.zero
    assert rep.certificate is None
    assert rep.t_value == 1
    w = rep.witness
    assert w is not None and w.modulus > 0
    assert w.pairing % w.modulus != 0
    assert dot(w.functional, rep.tau_value.flat) % w.modulus == w.pairing
    for row in data.im_delta.basis.entries:
        assert dot(w.functional, row) % w.modulus == 0


def test_kappa_vanishes_on_equal_arguments(maclane_data):
    data = maclane_data
    for which in ("plus", "minus"):
        g = builtin_g_map(which)
        rep = kappa(data, g, g)
        assert rep.zero
        assert rep.witness is None
        assert rep.t_value == 0
        assert rep.difference.is_zero()
        assert delta_bar(data, rep.certificate) == rep.tau_value


def test_kappa_certificate_reconstructs_value(maclane_data):
    data = maclane_data
    plus = abelianize(builtin_g_map("plus"))
    b = b_lattice(data.config)
    for k in range(5):
        rng = random.Random(k)
        shift = [0] * data.a_rank
        for _ in range(3):
            row = rng.choice(b.basis.entries)
            c = rng.randint(-2, 2)
            shift = [x + c * y for x, y in zip(shift, row)]
        moved = plus + AbelianGMap.from_vector(data.config, shift)
        rep = kappa(data, plus, moved)
        assert rep.zero
        assert delta_bar(data, rep.certificate) == rep.tau_value


def test_kappa_ignores_kernel_shifts(maclane_data):
    data = maclane_data
    plus = abelianize(builtin_g_map("plus"))
    minus = abelianize(builtin_g_map("minus"))
    u = u_lattice(data.config)
    for k in range(5):
        rng = random.Random(k)
        row = rng.choice(u.basis.entries)
        moved = plus + AbelianGMap.from_vector(data.config, row)
        assert kappa(data, plus, moved).zero
        assert not kappa(data, moved, minus).zero


def test_kappa_rejects_foreign_config(maclane_data):
    with pytest.raises(ConfigMismatchError):
        tau_tilde(maclane_data, abelianize(GMap(glue_c13())))
    with pytest.raises(ConfigMismatchError):
        kappa(maclane_data, abelianize(GMap(glue_c13())), abelianize(GMap(glue_c13())))


def test_hom_r2p3_algebra(maclane_data):
    data = maclane_data
    a = tau_tilde(data, abelianize(builtin_g_map("plus")))
    b = tau_tilde(data, abelianize(builtin_g_map("minus")))
    assert (a - b) + b == a
    assert (a - a).is_zero()
    assert a.matrix().shape == (13, 21)
    other = HomR2P3(((1, "q"),), 1, (0,))
    with pytest.raises(ConfigMismatchError):
        a + other


def test_kappa_report_json_shape(maclane_data):
    rep = kappa(maclane_data, builtin_g_map("plus"), builtin_g_map("minus"))
    d = rep.to_json_dict()
    assert d["zero"] is False
    assert d["witness"]["modulus"] == rep.witness.modulus
    assert d["certificate"] is None
    assert "(4,p45)" in d["difference"]
    assert d["t_value"] == 1


# -- glued configurations -----------------------------------------------------


def test_glued_g_map_transports_assignments():
    plus = builtin_g_map("plus")
    minus = builtin_g_map("minus")
    glued = glued_g_map(plus, minus)
    assert glued.config == glue_c13()
    assert glued.value(4, "p45") == plus.value(4, "p45")
    line_map = {i: i + 5 for i in range(3, 8)}
    assert glued.value(9, "p'45") == minus.value(4, "p45").relabeled(line_map)
    assert glued.value(8, "p'135") == minus.value(3, "p135").relabeled(line_map)
    assert glued.value(1, "p'135") == minus.value(1, "p135").relabeled(line_map)
    for p in glue_c13().points:
        if p.startswith("p''"):
            for i in glue_c13().lines_through(p):
                assert glued.value(i, p) == Word.identity()
    with pytest.raises(ConfigMismatchError):
        glued_g_map(GMap(glue_c13()), plus)


def test_class_of_glued_sign_combinations(maclane_data):
    c13 = glue_c13()
    plus = builtin_g_map("plus")
    minus = builtin_g_map("minus")
    assert class_of_glued(c13, plus, plus) == 0
    assert class_of_glued(c13, plus, minus) == 1
    assert class_of_glued(c13, minus, plus) == 1
    assert class_of_glued(c13, minus, minus) == 0
    assert class_of_glued(c13, abelianize(plus), abelianize(minus)) == 1
    with pytest.raises(ConfigMismatchError):
        class_of_glued(maclane_c8(), plus, minus)
