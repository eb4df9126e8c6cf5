#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "resurgence/tree_series.hpp"
#include "resurgence/trees.hpp"

using namespace resurgence;

namespace {

// All trees on k labelled vertices with parent[v] < v (every rooted tree
// has such a labelling), reduced to canonical encodings.
std::set<std::string> brute_force_trees(int k) {
    std::set<std::string> out;
    std::vector<int> parent(k, -1);
    std::function<void(int)> rec = [&](int v) {
        if (v == k) {
            out.insert(IterationTree(parent).encoding());
            return;
        }
        for (int p = 0; p < v; ++p) {
            parent[v] = p;
            rec(v + 1);
        }
    };
    rec(1);
    return out;
}

// Ordered derivation trees of the component-ordered recursion: a vertex of
// colour a picks a component b and a multi-index l, then an ordered list of
// children whose colours are l_1 ones, l_2 twos, ... in that order.
struct Ordered {
    int a, b;
    std::vector<Ordered> kids;
};

std::string canonical(const Ordered& t) {
    std::vector<std::string> parts;
    for (const auto& c : t.kids) parts.push_back(canonical(c));
    std::sort(parts.begin(), parts.end());
    std::string s = "(" + std::to_string(t.a) + "," + std::to_string(t.b);
    for (const auto& p : parts) s += p;
    return s + ")";
}

std::vector<Ordered> ordered_derivations(int size, int color, int n) {
    std::vector<Ordered> out;
    if (size == 1) {
        for (int b = 1; b <= n; ++b) out.push_back({color, b, {}});
        return out;
    }
    // colour sequences of length j, nondecreasing (one per multi-index)
    for (int j = 1; j <= size - 1; ++j) {
        std::vector<std::vector<int>> seqs;
        std::vector<int> cur;
        std::function<void(int)> colours = [&](int lo) {
            if (static_cast<int>(cur.size()) == j) {
                seqs.push_back(cur);
                return;
            }
            for (int c = lo; c <= n; ++c) {
                cur.push_back(c);
                colours(c);
                cur.pop_back();
            }
        };
        colours(1);
        for (const auto& seq : seqs) {
            // ordered compositions of size-1 into j positive parts
            std::function<void(std::size_t, int, std::vector<Ordered>&)> fill = [&](std::size_t i, int left,
                                                                                  std::vector<Ordered>& acc) {
                if (i == seq.size()) {
                    if (left == 0)
                        for (int b = 1; b <= n; ++b) out.push_back({color, b, acc});
                    return;
                }
                const int remaining = static_cast<int>(seq.size() - i - 1);
                for (int s = 1; s <= left - remaining; ++s)
                    for (auto& child : ordered_derivations(s, seq[i], n)) {
                        acc.push_back(child);
                        fill(i + 1, left - s, acc);
                        acc.pop_back();
                    }
            };
            std::vector<Ordered> acc;
            fill(0, size - 1, acc);
        }
    }
    return out;
}

IterationTree relabelled(const IterationTree& t, std::mt19937_64& rng) {
    const int k = static_cast<int>(t.size());
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> parent(k);
    for (int v = 0; v < k; ++v) parent[perm[v]] = t.parent(v) < 0 ? -1 : perm[t.parent(v)];
    return IterationTree(parent);
}

}  // namespace

TEST_CASE("tree enumeration matches brute force over parent arrays") {
    const int known[] = {1, 1, 2, 4, 9, 20, 48, 115};
    for (int k = 1; k <= 8; ++k) {
        const auto trees = enumerate_trees(k);
        CHECK(static_cast<int>(trees.size()) == known[k - 1]);
        std::set<std::string> got;
        for (const auto& t : trees) {
            CHECK(static_cast<int>(t.size()) == k);
            got.insert(t.encoding());
        }
        CHECK(got == brute_force_trees(k));
    }
}

TEST_CASE("encodings are invariant under relabelling") {
    std::mt19937_64 rng(4);
    for (const auto& t : enumerate_trees(7))
        for (int i = 0; i < 3; ++i) {
            const auto r = relabelled(t, rng);
            CHECK(r.encoding() == t.encoding());
            CHECK(IterationTree::parse(r.encoding()).encoding() == t.encoding());
        }
}

TEST_CASE("tree structure queries") {
    // root 0 with children 1, 2; vertex 1 has children 3, 4; vertex 3 has child 5
    const IterationTree t(std::vector<int>{-1, 0, 0, 1, 1, 3});
    CHECK(t.root() == 0);
    CHECK(t.weight(0) == 3);
    CHECK(t.weight(1) == 2);
    CHECK(t.weight(5) == 1);
    CHECK(t.leaves() == std::vector<int>{2, 4, 5});
    CHECK(t.path_to_root(5) == std::vector<int>{5, 3, 1, 0});
    auto b = t.branch(1);
    std::sort(b.begin(), b.end());
    CHECK(b == std::vector<int>{1, 3, 4, 5});
    // W_5: root, children of 3, of 1 and of 0.
    CHECK(t.dependency_set(5) == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(t.dependency_set(2) == std::vector<int>{0, 1, 2});
    CHECK(t.dependency_set(4) == std::vector<int>{0, 1, 2, 3, 4});
    const auto td = t.top_down();
    for (int v = 1; v < 6; ++v)
        CHECK(std::find(td.begin(), td.end(), t.parent(v)) < std::find(td.begin(), td.end(), v));
    CHECK(IterationTree::join({IterationTree(), IterationTree::parse("(())")}).encoding() == "((())())");
    CHECK_THROWS_AS(IterationTree(std::vector<int>{-1, -1}), std::invalid_argument);
    CHECK_THROWS_AS(IterationTree(std::vector<int>{1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(IterationTree::parse("(()"), std::invalid_argument);
}

TEST_CASE("multiplicities count ordered derivations") {
    for (int n = 1; n <= 2; ++n)
        for (int k = 1; k <= (n == 1 ? 6 : 5); ++k) {
            std::map<std::string, long> ordered;
            long total = 0;
            for (int j = 1; j <= n; ++j)
                for (const auto& t : ordered_derivations(k, j, n)) {
                    ++ordered[canonical(t)];
                    ++total;
                }
            std::map<std::string, long> classes;
            for (int j = 1; j <= n; ++j)
                for (const auto& d : enumerate_decorated(k, n, j)) classes[d.encoding()] = d.multiplicity().get_si();
            CHECK(classes == ordered);
            const auto N = decorated_count_recursion(k, n);
            CHECK(N[k - 1] * n == total);
        }
}

TEST_CASE("decorated counts and the counting bound") {
    for (int n = 1; n <= 2; ++n) {
        const auto N = decorated_count_recursion(6, n);
        for (int k = 1; k <= 6; ++k) {
            mpz_class sum = 0;
            for (const auto& d : enumerate_decorated(k, n, 1)) sum += d.multiplicity();
            CHECK(sum == N[k - 1]);
        }
        const auto rep = count_bound_check(50, n, 1.0 / (2.0 * n));
        CHECK(rep.b_inequality_holds);
        CHECK(rep.bound_holds);
        for (int k = 1; k <= 50; ++k) {
            const double lhs = rep.counts[k - 1].get_d();
            CHECK(lhs <= rep.delta * b_weight(k) * std::pow(rep.smallest_c, k) * (1.0 + 1e-9));
        }
    }
    CHECK(decorated_count_recursion(3, 1) == std::vector<mpz_class>{1, 1, 2});
}

TEST_CASE("the B weight satisfies the sub-convolution inequality") {
    // sum over compositions k_1 + ... + k_j = k of prod B(k_i) <= C_j B(k)
    for (int j = 2; j <= 4; ++j) {
        double worst = 0.0;
        for (int k = j; k <= 40; ++k) {
            std::vector<double> conv(k + 1, 0.0);
            for (int a = 1; a <= k; ++a) conv[a] = b_weight(a);
            for (int r = 1; r < j; ++r) {
                std::vector<double> next(k + 1, 0.0);
                for (int a = 1; a <= k; ++a)
                    for (int b = 1; a + b <= k; ++b) next[a + b] += conv[a] * b_weight(b);
                conv = next;
            }
            worst = std::max(worst, conv[k] / b_weight(k));
        }
        CHECK(worst <= 1.0);
    }
}

TEST_CASE("simplex volume, membership and the stick-breaking map") {
    for (int k = 1; k <= 5; ++k)
        for (const auto& t : enumerate_trees(k)) {
            const auto vc = simplex_volume_check(t, 20000, 1234);
            CHECK(vc.within_3_sigma);
            CHECK(vc.exact == doctest::Approx(1.0 / std::tgamma(k)));
            SimplexMap m(t);
            CHECK(m.dimension() == static_cast<std::size_t>(k - 1));
            std::mt19937_64 rng(k);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (int i = 0; i < 20; ++i) {
                std::vector<double> x(k - 1);
                for (auto& c : x) c = u(rng);
                const auto [s, jac] = m.map(x);
                CHECK(in_simplex(t, s));
                CHECK(jac >= 0.0);
            }
        }
    const IterationTree chain(std::vector<int>{-1, 0, 1});
    CHECK(in_simplex(chain, {1.0, 0.5, 0.25}));
    CHECK_FALSE(in_simplex(chain, {1.0, 0.5, 0.75}));
    CHECK_FALSE(in_simplex(chain, {0.5, 0.5, 0.25}));
}

TEST_CASE("stick-breaking Jacobian integrates to the simplex volume") {
    // Midpoint rule in the cube, independent of any library quadrature.
    for (int k = 2; k <= 4; ++k)
        for (const auto& t : enumerate_trees(k)) {
            SimplexMap m(t);
            const int d = k - 1, n = 24;
            double sum = 0.0;
            std::vector<int> idx(d, 0);
            while (true) {
                std::vector<double> x(d);
                for (int i = 0; i < d; ++i) x[i] = (idx[i] + 0.5) / n;
                sum += m.map(x).second;
                int i = 0;
                while (i < d && ++idx[i] == n) idx[i++] = 0;
                if (i == d) break;
            }
            sum /= std::pow(n, d);
            CHECK(sum == doctest::Approx(1.0 / std::tgamma(k)).epsilon(1e-3));
        }
}

TEST_CASE("iterated convolution series matches the simplex integral") {
    const int order = 14;
    auto germ = [&](std::vector<cplx> c) { return GermSeries<cplx>::polynomial(c, order); };
    const auto f0 = germ({1.0, 0.5}), f1 = germ({2.0, 0.0, -1.0}), f2 = germ({0.5, 0.25});
    const auto p0 = germ({1.0, -0.3}), p1 = germ({1.0, 0.0, 0.2}), p2 = germ({-1.0, 1.0});
    const cplx z{0.35, 0.2};
    auto ev = [&](const GermSeries<cplx>& g, cplx x) { return g.evaluate(x); };

    SUBCASE("chain of three") {
        const IterationTree t(std::vector<int>{-1, 0, 1});
        const auto psi = iterated_convolution_series<cplx>(t, {f0, f1, f2}, {p0, p1, p2});
        // s_0 = 1 >= s_1 >= s_2 >= 0
        const cplx direct = z * z * oracle::integrate01([&](double a) {
            const double s1 = a;
            return s1 * oracle::integrate01([&](double b) {
                const double s2 = s1 * b;
                return ev(p0, z) * ev(f0, (1.0 - s1) * z) * ev(p1, s1 * z) * ev(f1, (s1 - s2) * z) * ev(p2, s2 * z) *
                       ev(f2, s2 * z);
            }, 40);
        }, 40);
        CHECK(std::abs(psi.evaluate(z) - direct) < 1e-10);
    }
    SUBCASE("cherry") {
        const IterationTree t(std::vector<int>{-1, 0, 0});
        const auto psi = iterated_convolution_series<cplx>(t, {f0, f1, f2}, {p0, p1, p2});
        // s_1 + s_2 <= 1
        const cplx direct = z * z * oracle::integrate01([&](double a) {
            const double s1 = a;
            return (1.0 - s1) * oracle::integrate01([&](double b) {
                const double s2 = (1.0 - s1) * b;
                return ev(p0, z) * ev(f0, (1.0 - s1 - s2) * z) * ev(p1, s1 * z) * ev(f1, s1 * z) * ev(p2, s2 * z) *
                       ev(f2, s2 * z);
            }, 40);
        }, 40);
        CHECK(std::abs(psi.evaluate(z) - direct) < 1e-10);
    }
    CHECK_THROWS_AS(iterated_convolution_series<cplx>(IterationTree(), {germ({1.0})}, {GermSeries<cplx>(3)}), TruncationError);
}
