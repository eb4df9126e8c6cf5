#pragma once

// Truncated power series in one variable: Borel-plane germs in xi and
// formal series in 1/x, with the Borel transform between them.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "resurgence/scalar.hpp"

namespace resurgence {

struct TruncationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

// Shared storage for both series flavours: coefficients 0..order, where
// order == -1 denotes a series about which nothing is known.
template <class S>
class TruncatedCoeffs {
public:
    TruncatedCoeffs() = default;
    explicit TruncatedCoeffs(int order) : coeffs_(checked_size(order), scalar_traits<S>::zero()) {}
    explicit TruncatedCoeffs(std::vector<S> coeffs) : coeffs_(std::move(coeffs)) {}

    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<S>& coeffs() const { return coeffs_; }
    const S& operator[](std::size_t i) const { return coeffs_.at(i); }
    S& operator[](std::size_t i) { return coeffs_.at(i); }
    bool is_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const S& c) { return scalar_traits<S>::is_zero(c); });
    }
    friend bool operator==(const TruncatedCoeffs& a, const TruncatedCoeffs& b) { return a.coeffs_ == b.coeffs_; }

protected:
    std::vector<S> coeffs_;

private:
    static std::size_t checked_size(int order) {
        if (order < -1) throw TruncationError("truncation order must be >= -1");
        return static_cast<std::size_t>(order + 1);
    }
};

}  // namespace detail

/// Germ at the origin of the Borel plane: sum_j c_j xi^j, known up to order().
template <class S>
class GermSeries : public detail::TruncatedCoeffs<S> {
    using Base = detail::TruncatedCoeffs<S>;

public:
    using Base::Base;
    using Base::coeffs;
    using Base::order;

    static GermSeries zero(int order) { return GermSeries(order); }
    static GermSeries constant(const S& c, int order) {
        GermSeries g(order);
        if (order >= 0) g[0] = c;
        return g;
    }
    /// Polynomial coefficients taken as exact, padded or cut to `order`.
    static GermSeries polynomial(const std::vector<S>& c, int order) {
        GermSeries g(order);
        for (int i = 0; i <= order && i < static_cast<int>(c.size()); ++i) g[i] = c[i];
        return g;
    }

    GermSeries truncated(int order) const {
        if (order > this->order()) throw TruncationError("cannot extend a truncated germ");
        return GermSeries(std::vector<S>(this->coeffs_.begin(), this->coeffs_.begin() + (order + 1)));
    }

    template <class T>
    GermSeries<T> convert() const {
        std::vector<T> c;
        c.reserve(this->coeffs_.size());
        for (const auto& x : this->coeffs_) c.push_back(scalar_traits<T>::from_cplx(scalar_traits<S>::to_cplx(x)));
        return GermSeries<T>(std::move(c));
    }

    cplx evaluate(cplx xi) const {
        cplx acc{0.0, 0.0};
        for (int i = order(); i >= 0; --i) acc = acc * xi + scalar_traits<S>::to_cplx((*this)[i]);
        return acc;
    }

    GermSeries& operator+=(const GermSeries& o) {
        *this = this->truncated(std::min(order(), o.order()));
        for (int i = 0; i <= order(); ++i) (*this)[i] += o[i];
        return *this;
    }
    GermSeries& operator-=(const GermSeries& o) {
        *this = this->truncated(std::min(order(), o.order()));
        for (int i = 0; i <= order(); ++i) (*this)[i] -= o[i];
        return *this;
    }
    friend GermSeries operator+(GermSeries a, const GermSeries& b) { return a += b; }
    friend GermSeries operator-(GermSeries a, const GermSeries& b) { return a -= b; }
    GermSeries scaled(const S& c) const {
        GermSeries g = *this;
        for (auto& x : g.coeffs_) x *= c;
        return g;
    }
};

/// Formal series sum_j phi_j x^{-j}; index j holds the coefficient of x^{-j}.
template <class S>
class FormalSeries : public detail::TruncatedCoeffs<S> {
    using Base = detail::TruncatedCoeffs<S>;

public:
    using Base::Base;
    using Base::coeffs;
    using Base::order;

    static FormalSeries zero(int order) { return FormalSeries(order); }
    static FormalSeries polynomial(const std::vector<S>& c, int order) {
        FormalSeries f(order);
        for (int i = 0; i <= order && i < static_cast<int>(c.size()); ++i) f[i] = c[i];
        return f;
    }

    FormalSeries truncated(int order) const {
        if (order > this->order()) throw TruncationError("cannot extend a truncated series");
        return FormalSeries(std::vector<S>(this->coeffs_.begin(), this->coeffs_.begin() + (order + 1)));
    }

    template <class T>
    FormalSeries<T> convert() const {
        std::vector<T> c;
        c.reserve(this->coeffs_.size());
        for (const auto& x : this->coeffs_) c.push_back(scalar_traits<T>::from_cplx(scalar_traits<S>::to_cplx(x)));
        return FormalSeries<T>(std::move(c));
    }

    FormalSeries& operator+=(const FormalSeries& o) {
        *this = this->truncated(std::min(order(), o.order()));
        for (int i = 0; i <= order(); ++i) (*this)[i] += o[i];
        return *this;
    }
    FormalSeries& operator-=(const FormalSeries& o) {
        *this = this->truncated(std::min(order(), o.order()));
        for (int i = 0; i <= order(); ++i) (*this)[i] -= o[i];
        return *this;
    }
    friend FormalSeries operator+(FormalSeries a, const FormalSeries& b) { return a += b; }
    friend FormalSeries operator-(FormalSeries a, const FormalSeries& b) { return a -= b; }
    FormalSeries scaled(const S& c) const {
        FormalSeries f = *this;
        for (auto& x : f.coeffs_) x *= c;
        return f;
    }
};

/// n-vector of series sharing one truncation order.
template <class Series>
using SeriesVector = std::vector<Series>;

template <class Series>
int common_order(const SeriesVector<Series>& v) {
    if (v.empty()) throw std::invalid_argument("empty series vector");
    int n = v.front().order();
    for (const auto& s : v)
        if (s.order() != n) throw TruncationError("series vector entries must share one truncation order");
    return n;
}

// Cauchy product of coefficient sequences, truncated at the smaller order.
template <class Series>
Series cauchy_product(const Series& a, const Series& b) {
    const int n = std::min(a.order(), b.order());
    Series c(n);
    for (int i = 0; i <= n; ++i) {
        if (scalar_traits<std::decay_t<decltype(a[0])>>::is_zero(a[i])) continue;
        for (int j = 0; i + j <= n; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

/// Borel-plane convolution (f*g)(xi) = int_0^xi f(xi-t) g(t) dt on Taylor
/// coefficients. The result is known one order beyond the shorter operand.
template <class S>
GermSeries<S> convolve(const GermSeries<S>& f, const GermSeries<S>& g) {
    const int n = std::min(f.order(), g.order());
    GermSeries<S> out(n + 1);
    // weight(i, m) = i! (m-i)! / (m+1)!, walked in i via (i+1)/(m-i).
    for (int m = 0; m <= n; ++m) {
        S w = divide_by_int(scalar_traits<S>::one(), m + 1);
        for (int i = 0; i <= m; ++i) {
            const int j = m - i;
            if (!scalar_traits<S>::is_zero(f[i]) && !scalar_traits<S>::is_zero(g[j])) out[m + 1] += f[i] * g[j] * w;
            if (i < m) w = divide_by_int(w * scalar_traits<S>::from_int(i + 1), m - i);
        }
    }
    return out;
}

template <class S>
struct BorelImage {
    S constant;
    GermSeries<S> germ;
};

/// B(phi) = phi_0 delta + sum_{j>=1} phi_j xi^{j-1}/(j-1)!.
template <class S>
BorelImage<S> borel_transform(const FormalSeries<S>& phi) {
    if (phi.order() < 0) throw TruncationError("borel_transform needs order >= 0");
    GermSeries<S> germ(phi.order() - 1);
    for (int j = 1; j <= phi.order(); ++j) germ[j - 1] = divide_by_factorial(phi[j], j - 1);
    return {phi[0], std::move(germ)};
}

template <class S>
FormalSeries<S> inverse_borel(const S& constant, const GermSeries<S>& germ) {
    FormalSeries<S> phi(germ.order() + 1);
    phi[0] = constant;
    for (int j = 1; j <= phi.order(); ++j) phi[j] = multiply_by_factorial(germ[j - 1], j - 1);
    return phi;
}

/// d/dx of sum phi_j x^{-j}: coefficient of x^{-(j+1)} is -j phi_j.
template <class S>
FormalSeries<S> derivative_x(const FormalSeries<S>& phi) {
    FormalSeries<S> d(phi.order() + 1);
    for (int j = 1; j <= phi.order(); ++j) d[j + 1] = phi[j] * scalar_traits<S>::from_int(-j);
    return d;
}

/// phi(x+1) - phi(x), using (1+1/x)^{-j} = sum_m (-1)^m C(j+m-1,m) x^{-m}.
/// Exact up to the input order.
template <class S>
FormalSeries<S> forward_difference(const FormalSeries<S>& phi) {
    const int n = phi.order();
    FormalSeries<S> d(n);
    for (int j = 1; j <= n; ++j) {
        if (scalar_traits<S>::is_zero(phi[j])) continue;
        S binom = scalar_traits<S>::one();  // C(j+m-1, m) at m = 0
        for (int m = 1; j + m <= n; ++m) {
            binom = divide_by_int(binom * scalar_traits<S>::from_int(j + m - 1), m);
            S term = phi[j] * binom;
            if (m % 2) term = -term;
            d[j + m] += term;
        }
    }
    return d;
}

using MultiIndex = std::vector<int>;

inline int degree(const MultiIndex& ell) {
    int s = 0;
    for (int e : ell) s += e;
    return s;
}

/// F(1/x, Phi) = F_0(1/x) + A Phi + sum_{|l|>=1} F_l(1/x) Phi^l with the
/// F_l held as exact polynomials in 1/x.
template <class S>
class NonlinearRHS {
public:
    using TermVector = std::vector<std::vector<S>>;  // per component, coefficients of x^{-j}

    NonlinearRHS(int dim, Matrix<S> linear_part, std::map<MultiIndex, TermVector> terms)
        : dim_(dim), linear_part_(std::move(linear_part)), terms_(std::move(terms)) {
        validate();
    }

    int dim() const { return dim_; }
    const Matrix<S>& linear_part() const { return linear_part_; }
    const std::map<MultiIndex, TermVector>& terms() const { return terms_; }

    /// True when every F_l has vanishing constant term.
    bool normalized() const { return normalized_; }
    int max_degree() const {
        int d = 0;
        for (const auto& [ell, _] : terms_) d = std::max(d, degree(ell));
        return d;
    }

    bool has_term(const MultiIndex& ell) const {
        auto it = terms_.find(ell);
        if (it == terms_.end()) return false;
        for (const auto& comp : it->second)
            for (const auto& c : comp)
                if (!scalar_traits<S>::is_zero(c)) return true;
        return false;
    }

    /// Component `comp` of F_l as a series of the given order (zero if absent).
    FormalSeries<S> term_series(const MultiIndex& ell, int comp, int order) const {
        auto it = terms_.find(ell);
        if (it == terms_.end()) return FormalSeries<S>::zero(order);
        return FormalSeries<S>::polynomial(it->second.at(comp), order);
    }

    MultiIndex zero_index() const { return MultiIndex(dim_, 0); }

private:
    void validate() {
        if (dim_ < 1) throw std::invalid_argument("NonlinearRHS: dim must be >= 1");
        if (linear_part_.rows() != static_cast<std::size_t>(dim_) || linear_part_.cols() != static_cast<std::size_t>(dim_))
            throw std::invalid_argument("NonlinearRHS: linear_part must be dim x dim");
        try {
            LuSolver<S> lu(linear_part_);
        } catch (const SingularMatrixError&) {
            throw std::invalid_argument("NonlinearRHS: det(dF/dPhi(0,0)) must be nonzero");
        }
        normalized_ = true;
        for (const auto& [ell, tv] : terms_) {
            if (static_cast<int>(ell.size()) != dim_) throw std::invalid_argument("NonlinearRHS: multi-index length must equal dim");
            for (int e : ell)
                if (e < 0) throw std::invalid_argument("NonlinearRHS: negative multi-index entry");
            if (static_cast<int>(tv.size()) != dim_) throw std::invalid_argument("NonlinearRHS: term must have dim components");
            const int d = degree(ell);
            for (const auto& comp : tv) {
                if (comp.empty() || scalar_traits<S>::is_zero(comp[0])) continue;
                if (d == 0) throw std::invalid_argument("NonlinearRHS: F(0,0) must vanish (F_0 has a constant term)");
                if (d == 1)
                    throw std::invalid_argument("NonlinearRHS: degree-1 terms must have zero constant term (fold it into linear_part)");
                normalized_ = false;
            }
        }
    }

    int dim_;
    Matrix<S> linear_part_;
    std::map<MultiIndex, TermVector> terms_;
    bool normalized_ = true;
};

/// Exact truncated expansion of F(1/x, Phi(x)) at the order of Phi.
template <class S>
SeriesVector<FormalSeries<S>> compose_rhs(const NonlinearRHS<S>& F, const SeriesVector<FormalSeries<S>>& phi) {
    const int n = F.dim();
    if (static_cast<int>(phi.size()) != n) throw std::invalid_argument("compose_rhs: dimension mismatch");
    const int order = common_order(phi);
    for (const auto& p : phi)
        if (order >= 0 && !scalar_traits<S>::is_zero(p[0]))
            throw std::invalid_argument("compose_rhs: Phi must have zero constant term");

    SeriesVector<FormalSeries<S>> out(n, FormalSeries<S>::zero(order));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i] += phi[j].scaled(F.linear_part()(i, j));

    // powers[j][p] = phi_j^p
    std::vector<std::vector<FormalSeries<S>>> powers(n);
    auto power = [&](int j, int p) -> const FormalSeries<S>& {
        auto& pw = powers[j];
        if (pw.empty()) {
            FormalSeries<S> one(order);
            if (order >= 0) one[0] = scalar_traits<S>::one();
            pw.push_back(std::move(one));
        }
        while (static_cast<int>(pw.size()) <= p) pw.push_back(cauchy_product(pw.back(), phi[j]));
        return pw[p];
    };

    for (const auto& [ell, _] : F.terms()) {
        if (degree(ell) > order && degree(ell) > 0) continue;  // Phi^l vanishes to this order
        FormalSeries<S> mono(order);
        if (order >= 0) mono[0] = scalar_traits<S>::one();
        for (int j = 0; j < n; ++j)
            if (ell[j] > 0) mono = cauchy_product(mono, power(j, ell[j]));
        for (int i = 0; i < n; ++i) out[i] += cauchy_product(F.term_series(ell, i, order), mono);
    }
    return out;
}

}  // namespace resurgence
