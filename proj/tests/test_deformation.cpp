#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "resurgence/deformation.hpp"

using namespace resurgence;

namespace {

DeformationOptions opts(double rho, double delta) {
    DeformationOptions o;
    o.rho = rho;
    o.delta = delta;
    return o;
}

const FilteredSet& single_point() {
    static const FilteredSet omega({{{1.0, 0.0}, 1.0}}, 10.0);
    return omega;
}

PathSpec around_above() { return normalize_radial_head(PathSpec({0.0, 0.5, {0.5, 0.6}, {1.5, 0.6}}), 0.3); }

}  // namespace

TEST_CASE("without singularities the deformation is the radial scaling") {
    const auto omega = FilteredSet::empty(10.0);
    const auto path = normalize_radial_head(PathSpec({0.0, {0.6, 0.2}, {1.0, 1.0}}), 0.2);
    const std::vector<std::pair<std::string, SimplexPoint>> cases{
        {"(())", {1.0, 0.7}}, {"(()())", {1.0, 0.3, 0.5}}, {"((()))", {1.0, 0.7, 0.4}}};
    for (const auto& [enc, s] : cases) {
        const auto tree = IterationTree::parse(enc);
        DeformationProblem p(tree, omega, path, opts(0.2, 0.2));
        REQUIRE(in_simplex(tree, s));
        const auto r = p.integrate(s);
        const cplx end = path.endpoint();
        for (std::size_t v = 0; v < s.size(); ++v) {
            CHECK(std::abs(r.final_state.zeta[v].xi - s[v] * end) < 1e-9);
            CHECK(r.final_state.zeta[v].lambda == doctest::Approx(s[v] * path.length()).epsilon(1e-9));
        }
        // each sibling block is gamma(1) times the identity
        cplx det_expect = 1.0;
        for (std::size_t v = 0; v < s.size(); ++v)
            for (std::size_t i = 0; i < tree.children(static_cast<int>(v)).size(); ++i) det_expect *= end;
        CHECK(std::abs(r.jacobian_det - det_expect) < 1e-8 * std::abs(det_expect));
        CHECK(r.monitors.radial_deviation < 1e-9);
        CHECK(r.monitors.sum_face < 1e-9);
        CHECK(r.monitors.lambda_excess < 1e-9);
        CHECK(r.monitors.jacobian_ratio <= 1.0 + 1e-9);
    }
}

TEST_CASE("faces of the simplex are preserved") {
    const auto tree = IterationTree::parse("(()())");
    DeformationProblem p(tree, single_point(), around_above(), opts(0.3, 0.25));
    SUBCASE("zero face") {
        const auto r = p.integrate({1.0, 0.0, 0.6});
        for (const auto& st : r.trajectory) {
            CHECK(st.zeta[1].lambda == 0.0);
            CHECK(st.zeta[1].xi == cplx(0.0, 0.0));
        }
        CHECK(r.monitors.zero_face == 0.0);
    }
    SUBCASE("sum face") {
        const auto r = p.integrate({1.0, 0.4, 0.6});
        CHECK(r.monitors.sum_face < 1e-8);
        const auto& z = r.final_state.zeta;
        CHECK(std::abs(z[0].xi - z[1].xi - z[2].xi) < 1e-8);
        CHECK(std::abs(z[0].lambda - z[1].lambda - z[2].lambda) < 1e-8);
    }
}

TEST_CASE("invariants along a deformation past a singular point") {
    const auto tree = IterationTree::parse("(()())");
    DeformationProblem p(tree, single_point(), around_above(), opts(0.3, 0.25));
    CHECK(p.vertex_set(0).size() == 2);
    CHECK(p.vertex_set(1).size() == 1);
    for (const SimplexPoint& s : {SimplexPoint{1.0, 0.2, 0.3}, SimplexPoint{1.0, 0.7, 0.1}, SimplexPoint{1.0, 0.05, 0.9}}) {
        const auto r = p.integrate(s);
        const auto& m = r.monitors;
        CHECK(m.lambda_excess < 1e-8);
        CHECK(m.lambda_decrease < 1e-8);
        CHECK(m.clearance_margin > -1e-6);
        CHECK(m.speed_mismatch < 1e-8);
        CHECK(m.radial_deviation < 1e-8);
        CHECK(m.guard_ratio >= 1.0);
        CHECK(m.jacobian_ratio <= 1.0 + 1e-8);
        CHECK(r.final_state.zeta[0].lambda == doctest::Approx(p.path().length()).epsilon(1e-12));
        CHECK(std::abs(r.final_state.zeta[0].xi - p.path().endpoint()) < 1e-12);
        for (int u : {0, 1, 2})
            for (const auto& st : r.trajectory) {
                const auto& z = st.zeta[u];
                CHECK(dist_to_support(p.vertex_set(u), z.lambda, z.xi) >= p.delta_prime(st.tau) - 1e-6);
            }
        const auto vp = p.vertex_path(r, s, 1);
        CHECK(vp.vertices().front() == cplx(0.0, 0.0));
        CHECK(std::abs(vp.endpoint() - r.final_state.zeta[1].xi) < 1e-15);
        const auto ap = p.argument_path(r, s, 0);
        CHECK(std::abs(ap.endpoint() - (r.final_state.zeta[0].xi - r.final_state.zeta[1].xi - r.final_state.zeta[2].xi)) <
              1e-15);
    }
}

TEST_CASE("analytic Jacobian against finite differences") {
    for (const auto& enc : {"(())", "(()())", "((()))"}) {
        const auto tree = IterationTree::parse(enc);
        DeformationProblem p(tree, single_point(), around_above(), opts(0.3, 0.25));
        SimplexPoint s = tree.size() == 2 ? SimplexPoint{1.0, 0.6} : SimplexPoint{1.0, 0.6, 0.45};
        if (tree.children(0).size() == 2) s = {1.0, 0.35, 0.4};
        const auto rep = jacobian_monitor(p, s);
        INFO(enc);
        CHECK(rep.structure_holds);
        CHECK(rep.max_block_error < 1e-4);
        CHECK(rep.max_outside_dependency < 1e-8);
        CHECK(std::abs(rep.det_analytic - rep.det_fd) < 1e-4 * std::max(1.0, std::abs(rep.det_analytic)));
        CHECK(rep.bound_holds);
        CHECK(std::abs(rep.det_analytic) <= rep.bound);
    }
}

TEST_CASE("Lipschitz dependence on sibling coordinates") {
    const auto tree = IterationTree::parse("(()())");
    DeformationProblem p(tree, single_point(), around_above(), opts(0.3, 0.25));
    const auto rep = lipschitz_check(p, {1.0, 0.2, 0.3}, {1.0, 0.25, 0.28}, 0);
    CHECK(rep.holds);
    CHECK(rep.lhs > 0.0);
    CHECK(rep.lhs <= rep.rhs);
    CHECK_THROWS_AS(lipschitz_check(p, {1.0, 0.2, 0.3}, {1.0, 0.25, 0.28}, 1), std::invalid_argument);
}

TEST_CASE("deformation preconditions") {
    const auto tree = IterationTree::parse("(())");
    const auto& omega = single_point();
    CHECK_THROWS_AS(DeformationProblem(tree, omega, around_above(), opts(0.6, 0.25)), std::invalid_argument);
    CHECK_THROWS_AS(DeformationProblem(tree, omega, around_above(), opts(0.3, 0.4)), std::invalid_argument);
    CHECK_THROWS_AS(DeformationProblem(tree, omega, PathSpec({0.0, {1.5, 0.6}}), opts(0.3, 0.25)), std::invalid_argument);
    const auto through = normalize_radial_head(PathSpec({0.0, 1.5}), 0.3);
    CHECK_THROWS_AS(DeformationProblem(tree, omega, through, opts(0.3, 0.25)), std::invalid_argument);
    const auto too_long = normalize_radial_head(PathSpec({0.0, {0.0, 12.0}}), 0.3);
    CHECK_THROWS_AS(DeformationProblem(tree, omega, too_long, opts(0.3, 0.25)), std::invalid_argument);
    DeformationProblem p(tree, omega, around_above(), opts(0.3, 0.25));
    CHECK_THROWS_AS(p.integrate({1.0}), std::invalid_argument);
    CHECK(p.delta_prime(p.head_length()) == doctest::Approx(0.3));
    CHECK(p.c_bound(p.head_length()) == doctest::Approx(0.3));
    CHECK(p.delta_prime(p.path().length()) < p.delta_prime(p.head_length()));
    CHECK(p.c_bound(p.path().length()) > p.c_bound(p.head_length()));
}

TEST_CASE("trajectory CSV") {
    const auto tree = IterationTree::parse("(())");
    DeformationProblem p(tree, single_point(), around_above(), opts(0.3, 0.25));
    const auto r = p.integrate({1.0, 0.5});
    std::ostringstream os;
    write_trajectory_csv(os, p, r);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,vertex,lambda,re_xi,im_xi,clearance");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 5);
    }
    CHECK(rows == r.trajectory.size() * tree.size());
    CHECK(r.grid.size() == r.trajectory.size());
    const auto replay = p.integrate_on_grid({1.0, 0.5}, r.grid);
    CHECK(std::abs(replay.final_state.zeta[1].xi - r.final_state.zeta[1].xi) < 1e-12);
}
