#pragma once

// Formal solutions of dPhi/dx = F(1/x, Phi) and Phi(x+1) - Phi(x) = F(1/x, Phi),
// their Borel-side recursion, the tree expansion, the predicted singular
// set and a Gevrey-1 growth certificate.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "resurgence/dfs.hpp"
#include "resurgence/series.hpp"
#include "resurgence/tree_series.hpp"
#include "resurgence/trees.hpp"

namespace resurgence {

enum class EquationKind { differential, difference };

std::string to_string(EquationKind kind);
EquationKind equation_kind_from_string(const std::string& s);

template <class S>
struct EquationSpec {
    EquationKind kind = EquationKind::differential;
    NonlinearRHS<S> rhs;
    int order = 10;        // truncation order N in 1/x
    double horizon = 5.0;  // horizon of the predicted singular set
};

struct ResonanceError : std::runtime_error {
    int order;
    ResonanceError(const std::string& what, int k) : std::runtime_error(what), order(k) {}
};

/// P(xi) = -xi - A (differential) or (e^{-xi} - 1) I - A (difference).
template <class S>
class MeromorphicKernel {
public:
    MeromorphicKernel(EquationKind kind, Matrix<S> a) : kind_(kind), a_(std::move(a)) {}

    EquationKind kind() const { return kind_; }
    std::size_t dim() const { return a_.rows(); }

    /// Scalar part p(xi) with P(xi) = p(xi) I - A.
    cplx scalar_part(cplx xi) const { return kind_ == EquationKind::differential ? -xi : std::exp(-xi) - 1.0; }

    Matrix<cplx> evaluate(cplx xi) const {
        Matrix<cplx> p = a_.template convert<cplx>().scaled(cplx{-1.0, 0.0});
        const cplx s = scalar_part(xi);
        for (std::size_t i = 0; i < dim(); ++i) p(i, i) += s;
        return p;
    }
    Matrix<cplx> inverse(cplx xi) const { return LuSolver<cplx>(evaluate(xi)).inverse(); }

    /// Taylor coefficients of p(xi) at 0 up to `order`.
    std::vector<S> scalar_taylor(int order) const {
        std::vector<S> p(order + 1, scalar_traits<S>::zero());
        if (order >= 1) p[1] = -scalar_traits<S>::one();
        if (kind_ == EquationKind::difference) {
            S c = -scalar_traits<S>::one();
            for (int i = 2; i <= order; ++i) {
                c = divide_by_int(-c, i);
                p[i] = c;
            }
        }
        return p;
    }

    /// Q_0..Q_order with P(xi)^{-1} = sum_m Q_m xi^m near 0.
    std::vector<Matrix<S>> inverse_taylor(int order) const {
        const std::size_t n = dim();
        const auto p = scalar_taylor(order);
        LuSolver<S> lu0(a_.scaled(-scalar_traits<S>::one()));
        const Matrix<S> p0_inv = lu0.inverse();
        std::vector<Matrix<S>> q;
        q.reserve(order + 1);
        q.push_back(p0_inv);
        for (int m = 1; m <= order; ++m) {
            Matrix<S> acc(n, n);
            for (int i = 1; i <= m; ++i)
                if (!scalar_traits<S>::is_zero(p[i])) acc = acc + q[m - i].scaled(p[i]);
            q.push_back((p0_inv * acc).scaled(-scalar_traits<S>::one()));
        }
        return q;
    }

    /// Entry (r, c) of P^{-1} as a germ of the given order (0-based indices).
    GermSeries<S> inverse_entry_germ(std::size_t r, std::size_t c, int order) const {
        const auto q = inverse_taylor(order);
        GermSeries<S> g(order);
        for (int m = 0; m <= order; ++m) g[m] = q[m](r, c);
        return g;
    }

private:
    EquationKind kind_;
    Matrix<S> a_;
};

template <class S>
MeromorphicKernel<S> kernel_of(const EquationSpec<S>& spec) {
    return MeromorphicKernel<S>(spec.kind, spec.rhs.linear_part());
}

/// Phi_1..Phi_N (Phi_0 = 0) by matching powers of 1/x. At order m the
/// unknown enters only through A Phi_m.
template <class S>
SeriesVector<FormalSeries<S>> solve_formal(const EquationSpec<S>& spec) {
    const auto& F = spec.rhs;
    const int n = F.dim();
    const int N = spec.order;
    if (N < 0) throw std::invalid_argument("solve_formal: order must be >= 0");
    SeriesVector<FormalSeries<S>> phi(n, FormalSeries<S>::zero(N));
    std::unique_ptr<LuSolver<S>> lu;
    try {
        lu = std::make_unique<LuSolver<S>>(F.linear_part());
    } catch (const SingularMatrixError& e) {
        throw ResonanceError(std::string("solve_formal: singular system: ") + e.what(), 1);
    }
    for (int m = 1; m <= N; ++m) {
        SeriesVector<FormalSeries<S>> trial(n);
        for (int i = 0; i < n; ++i) trial[i] = phi[i].truncated(m);  // coefficient m is still zero
        const auto rhs = compose_rhs(F, trial);
        SeriesVector<FormalSeries<S>> lhs(n);
        for (int i = 0; i < n; ++i)
            lhs[i] = spec.kind == EquationKind::differential ? derivative_x(trial[i]).truncated(m)
                                                             : forward_difference(trial[i]);
        std::vector<S> b(n);
        for (int i = 0; i < n; ++i) b[i] = lhs[i][m] - rhs[i][m];
        const auto x = lu->solve(b);
        for (int i = 0; i < n; ++i) phi[i][m] = x[i];
    }
    return phi;
}

/// compose_rhs(F, Phi) minus the left-hand side, at the order of Phi.
template <class S>
SeriesVector<FormalSeries<S>> substitution_residual(const EquationSpec<S>& spec, const SeriesVector<FormalSeries<S>>& phi) {
    const int N = common_order(phi);
    auto out = compose_rhs(spec.rhs, phi);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const auto lhs = spec.kind == EquationKind::differential ? derivative_x(phi[i]).truncated(N) : forward_difference(phi[i]);
        out[i] -= lhs;
    }
    return out;
}

/// Phi-hat_1..Phi-hat_N as germ vectors of order N-1.
template <class S>
std::vector<SeriesVector<GermSeries<S>>> borel_recursion(const EquationSpec<S>& spec) {
    const auto& F = spec.rhs;
    if (!F.normalized()) throw std::invalid_argument("borel_recursion: every F_l must have zero constant term");
    const int n = F.dim();
    const int N = spec.order;
    if (N < 1) throw std::invalid_argument("borel_recursion: order must be >= 1");
    const int g = N - 1;
    const auto Q = kernel_of(spec).inverse_taylor(g);

    auto apply_kernel = [&](const SeriesVector<GermSeries<S>>& v) {
        SeriesVector<GermSeries<S>> out(n, GermSeries<S>::zero(g));
        for (int m = 0; m <= g; ++m)
            for (int i = 0; i <= m; ++i)
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c < n; ++c) {
                        if (scalar_traits<S>::is_zero(v[c][m - i])) continue;
                        out[r][m] += Q[i](r, c) * v[c][m - i];
                    }
        return out;
    };

    auto hat = [&](const MultiIndex& ell, int comp) { return borel_transform(F.term_series(ell, comp, N)).germ; };

    std::vector<SeriesVector<GermSeries<S>>> result;
    SeriesVector<GermSeries<S>> f0(n);
    for (int i = 0; i < n; ++i) f0[i] = hat(F.zero_index(), i);
    result.push_back(apply_kernel(f0));

    struct TermData {
        MultiIndex ell;
        std::vector<int> colors;                        // component of each factor of Phi^l
        SeriesVector<GermSeries<S>> f_hat;              // per equation component
        std::vector<std::map<int, GermSeries<S>>> conv;  // conv[i][m]: first i+1 factors, total order m
    };
    std::vector<TermData> terms;
    for (const auto& [ell, _] : F.terms()) {
        const int d = degree(ell);
        if (d == 0 || !F.has_term(ell)) continue;
        TermData t;
        t.ell = ell;
        for (int c = 0; c < n; ++c)
            for (int e = 0; e < ell[c]; ++e) t.colors.push_back(c);
        for (int i = 0; i < n; ++i) t.f_hat.push_back(hat(ell, i));
        t.conv.resize(d);
        terms.push_back(std::move(t));
    }

    // Sum over compositions k_1 + .. + k_i = m of the convolution of the first i factors.
    std::function<const GermSeries<S>&(TermData&, int, int)> partial = [&](TermData& t, int i, int m) -> const GermSeries<S>& {
        auto it = t.conv[i].find(m);
        if (it != t.conv[i].end()) return it->second;
        GermSeries<S> acc = GermSeries<S>::zero(g);
        if (i == 0) {
            acc = result[m - 1][t.colors[0]];
        } else {
            for (int last = 1; last <= m - i; ++last) {
                const auto& head = partial(t, i - 1, m - last);
                if (head.is_zero()) continue;
                const auto& tail = result[last - 1][t.colors[i]];
                if (tail.is_zero()) continue;
                acc += convolve(head, tail).truncated(g);
            }
        }
        return t.conv[i].emplace(m, std::move(acc)).first->second;
    };

    for (int k = 1; k < N; ++k) {
        SeriesVector<GermSeries<S>> acc(n, GermSeries<S>::zero(g));
        for (auto& t : terms) {
            const int j = static_cast<int>(t.colors.size());
            if (j > k) continue;
            const auto& prod = partial(t, j - 1, k);
            if (prod.is_zero()) continue;
            for (int i = 0; i < n; ++i) {
                if (t.f_hat[i].is_zero()) continue;
                acc[i] += convolve(t.f_hat[i], prod).truncated(g);
            }
        }
        result.push_back(apply_kernel(acc));
    }
    return result;
}

/// Germ of B(Phi) minus sum_k Phi-hat_k, per component.
template <class S>
SeriesVector<GermSeries<S>> borel_consistency_gap(const SeriesVector<FormalSeries<S>>& phi,
                                                  const std::vector<SeriesVector<GermSeries<S>>>& hats) {
    SeriesVector<GermSeries<S>> gap;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        GermSeries<S> d = borel_transform(phi[i]).germ;
        for (const auto& h : hats) d -= h[i];
        gap.push_back(std::move(d));
    }
    return gap;
}

template <class S>
double max_abs_coeff(const GermSeries<S>& g) {
    double m = 0.0;
    for (const auto& c : g.coeffs()) m = std::max(m, scalar_traits<S>::magnitude(c));
    return m;
}

struct TreeExpansionOrder {
    int k = 0;
    std::size_t classes = 0;       // decorated classes with nonzero vertex germs
    std::size_t enumerated = 0;    // all decorated classes
    double max_abs_difference = 0.0;
    double max_abs_value = 0.0;
    bool exact_equal = false;      // coefficient-wise equality (bitwise in exact mode)
};

struct TreeExpansionReport {
    int n = 1;
    int germ_order = 0;
    std::vector<TreeExpansionOrder> orders;
    bool passed = false;
};

inline constexpr int kTreeEnumerationCap = 9;

/// Phi-hat_k^{(j)} assembled as sum over decorated classes of mu * psi,
/// compared with borel_recursion for k = 1..k_max. In floating point mode
/// `tol` bounds the accepted relative difference.
template <class S>
TreeExpansionReport tree_expansion_check(const EquationSpec<S>& spec, int k_max, double tol = 1e-12) {
    if (k_max > kTreeEnumerationCap) throw std::invalid_argument("tree_expansion_check: k exceeds the enumeration cap");
    const auto& F = spec.rhs;
    const int n = F.dim();
    const auto hats = borel_recursion(spec);
    const int g = spec.order - 1;
    const auto kernel = kernel_of(spec);
    const auto Q = kernel.inverse_taylor(g);

    std::vector<std::vector<GermSeries<S>>> pinv(n, std::vector<GermSeries<S>>(n, GermSeries<S>::zero(g)));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            for (int m = 0; m <= g; ++m) pinv[r][c][m] = Q[m](r, c);

    std::map<std::pair<MultiIndex, int>, GermSeries<S>> fhat_cache;
    auto fhat = [&](const MultiIndex& ell, int comp) -> const GermSeries<S>& {
        auto key = std::make_pair(ell, comp);
        auto it = fhat_cache.find(key);
        if (it != fhat_cache.end()) return it->second;
        return fhat_cache.emplace(key, borel_transform(F.term_series(ell, comp, spec.order)).germ).first->second;
    };

    TreeExpansionReport rep;
    rep.n = n;
    rep.germ_order = g;
    rep.passed = true;
    std::map<std::string, GermSeries<S>> psi_memo;  // keyed by decorated branch encoding

    for (int k = 1; k <= k_max; ++k) {
        TreeExpansionOrder ord;
        ord.k = k;
        ord.exact_equal = true;
        for (int j = 1; j <= n; ++j) {
            GermSeries<S> total = GermSeries<S>::zero(g);
            for (const auto& dt : enumerate_decorated(k, n, j)) {
                ++ord.enumerated;
                const auto& tree = dt.tree();
                bool vanishes = false;
                for (std::size_t v = 0; v < tree.size() && !vanishes; ++v) {
                    const auto lam = dt.lambda(static_cast<int>(v));
                    if (!F.has_term(lam)) vanishes = true;
                    else if (fhat(lam, dt.nu()[v].second - 1).is_zero()) vanishes = true;
                }
                if (vanishes) continue;
                ++ord.classes;
                std::function<GermSeries<S>(int)> psi = [&](int v) -> GermSeries<S> {
                    const std::string key = dt.branch_encoding(v);
                    auto it = psi_memo.find(key);
                    if (it != psi_memo.end()) return it->second;
                    const auto [a, b] = dt.nu()[v];
                    GermSeries<S> acc = fhat(dt.lambda(v), b - 1);
                    for (int u : tree.children(v)) acc = convolve(acc, psi(u)).truncated(g);
                    GermSeries<S> out = cauchy_product(pinv[a - 1][b - 1], acc);
                    psi_memo.emplace(key, out);
                    return out;
                };
                const mpz_class mu = dt.multiplicity();
                total += psi(tree.root()).scaled(scalar_traits<S>::from_int(mu.get_si()));
            }
            const auto& ref = hats[k - 1][j - 1];
            for (int m = 0; m <= g; ++m) {
                const double d = scalar_traits<S>::magnitude(total[m] - ref[m]);
                ord.max_abs_difference = std::max(ord.max_abs_difference, d);
                ord.max_abs_value = std::max(ord.max_abs_value, scalar_traits<S>::magnitude(ref[m]));
                if (scalar_traits<S>::exact) {
                    if (!(total[m] == ref[m])) ord.exact_equal = false;
                }
            }
        }
        if (!scalar_traits<S>::exact)
            ord.exact_equal = ord.max_abs_difference <= tol * std::max(1.0, ord.max_abs_value);
        if (!ord.exact_equal) rep.passed = false;
        rep.orders.push_back(ord);
    }
    return rep;
}

/// Poles of P(xi)^{-1} up to the horizon, each at level |xi|.
FilteredSet predicted_dfs(EquationKind kind, const Matrix<cplx>& linear_part, double horizon);

template <class S>
FilteredSet predicted_dfs(const EquationSpec<S>& spec) {
    return predicted_dfs(spec.kind, spec.rhs.linear_part().template convert<cplx>(), spec.horizon);
}

struct GevreyReport {
    std::vector<double> g;      // g_k for k = 1..k_max (index k-1)
    double sup = 0.0;
    double tail_slope = 0.0;    // least-squares slope of log g_k over the last third
    double fitted_c = 0.0;      // exp of the fitted intercept plus slope at k_max (informational)
    bool passed = false;
};

inline constexpr double kGevreySlopeThreshold = 0.01;

/// log|Phi_k^{(j)}| for k = 1..k_max, j = 1..n; -inf for zero coefficients.
GevreyReport gevrey_from_log_magnitudes(const std::vector<std::vector<double>>& log_abs);

template <class S>
double log_magnitude(const S& x) {
    if constexpr (scalar_traits<S>::exact) {
        if (scalar_traits<S>::is_zero(x)) return -std::numeric_limits<double>::infinity();
        // |x|^2 as a rational, logged via mantissa/exponent to avoid overflow.
        mpq_class m2 = x.re * x.re + x.im * x.im;
        long en = 0, ed = 0;
        const double mn = mpz_get_d_2exp(&en, m2.get_num_mpz_t());
        const double md = mpz_get_d_2exp(&ed, m2.get_den_mpz_t());
        return 0.5 * (std::log(mn) - std::log(md) + static_cast<double>(en - ed) * std::log(2.0));
    } else {
        const double a = std::abs(x);
        return a == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(a);
    }
}

template <class S>
GevreyReport gevrey_certificate(const SeriesVector<FormalSeries<S>>& phi, int k_max) {
    std::vector<std::vector<double>> la(k_max);
    for (int k = 1; k <= k_max; ++k)
        for (const auto& p : phi) la[k - 1].push_back(log_magnitude(p[k]));
    return gevrey_from_log_magnitudes(la);
}

template <class S>
GevreyReport gevrey_certificate(const EquationSpec<S>& spec, int k_max) {
    EquationSpec<S> s = spec;
    s.order = std::max(spec.order, k_max);
    return gevrey_certificate(solve_formal(s), k_max);
}

}  // namespace resurgence
