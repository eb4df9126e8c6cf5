#pragma once

#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace resurgence {

using cplx = std::complex<double>;

/// Exact complex number with rational real and imaginary parts.
struct QComplex {
    mpq_class re{0};
    mpq_class im{0};

    QComplex() = default;
    QComplex(long v) : re(v), im(0) {}
    QComplex(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }

    QComplex& operator+=(const QComplex& o) { re += o.re; im += o.im; return *this; }
    QComplex& operator-=(const QComplex& o) { re -= o.re; im -= o.im; return *this; }
    QComplex& operator*=(const QComplex& o) {
        mpq_class r = re * o.re - im * o.im;
        mpq_class i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    QComplex& operator/=(const QComplex& o) {
        mpq_class d = o.re * o.re + o.im * o.im;
        if (d == 0) throw std::domain_error("QComplex: division by zero");
        mpq_class r = (re * o.re + im * o.im) / d;
        mpq_class i = (im * o.re - re * o.im) / d;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    friend QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
    friend QComplex operator-(QComplex a, const QComplex& b) { return a -= b; }
    friend QComplex operator*(QComplex a, const QComplex& b) { return a *= b; }
    friend QComplex operator/(QComplex a, const QComplex& b) { return a /= b; }
    friend QComplex operator-(const QComplex& a) { return QComplex(-a.re, -a.im); }
    friend bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const QComplex& a, const QComplex& b) { return !(a == b); }
    friend std::ostream& operator<<(std::ostream& os, const QComplex& z) {
        return os << "(" << z.re.get_str() << "," << z.im.get_str() << ")";
    }
};

/// Uniform access to the two coefficient fields used throughout the library.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<cplx> {
    static constexpr bool exact = false;
    static cplx zero() { return {0.0, 0.0}; }
    static cplx one() { return {1.0, 0.0}; }
    static cplx from_int(long v) { return {static_cast<double>(v), 0.0}; }
    static cplx from_cplx(cplx z) { return z; }
    static cplx to_cplx(const cplx& z) { return z; }
    static bool is_zero(const cplx& z) { return z.real() == 0.0 && z.imag() == 0.0; }
    static double magnitude(const cplx& z) { return std::abs(z); }
    // Picks the pivot of largest modulus.
    static bool better_pivot(const cplx& cand, const cplx& cur) { return std::abs(cand) > std::abs(cur); }
};

template <>
struct scalar_traits<QComplex> {
    static constexpr bool exact = true;
    static QComplex zero() { return {}; }
    static QComplex one() { return QComplex(1); }
    static QComplex from_int(long v) { return QComplex(v); }
    // Doubles are dyadic rationals, so this conversion is exact.
    static QComplex from_cplx(cplx z) { return QComplex(mpq_class(z.real()), mpq_class(z.imag())); }
    static cplx to_cplx(const QComplex& z) { return {z.re.get_d(), z.im.get_d()}; }
    static bool is_zero(const QComplex& z) { return z.re == 0 && z.im == 0; }
    static double magnitude(const QComplex& z) { return std::abs(to_cplx(z)); }
    static bool better_pivot(const QComplex& cand, const QComplex& cur) { return is_zero(cur) && !is_zero(cand); }
};

template <class S>
S divide_by_int(const S& x, long d) {
    return x / scalar_traits<S>::from_int(d);
}

/// x / m! evaluated by repeated division, so neither m! nor intermediate
/// quotients overflow in floating point.
template <class S>
S divide_by_factorial(S x, long m) {
    for (long i = 2; i <= m; ++i) x = divide_by_int(x, i);
    return x;
}

template <class S>
S multiply_by_factorial(S x, long m) {
    for (long i = 2; i <= m; ++i) x *= scalar_traits<S>::from_int(i);
    return x;
}

/// Row-major dense square or rectangular matrix over a coefficient field.
template <class S>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, scalar_traits<S>::zero()) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = scalar_traits<S>::one();
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix: shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (scalar_traits<S>::is_zero(a(i, k))) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
        return a;
    }
    friend Matrix operator-(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
        return a;
    }
    Matrix scaled(const S& c) const {
        Matrix m = *this;
        for (auto& x : m.data_) x *= c;
        return m;
    }
    std::vector<S> apply(const std::vector<S>& v) const {
        std::vector<S> out(rows_, scalar_traits<S>::zero());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
        return out;
    }

    template <class T>
    Matrix<T> convert() const {
        Matrix<T> m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                m(i, j) = scalar_traits<T>::from_cplx(scalar_traits<S>::to_cplx((*this)(i, j)));
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<S> data_;
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// LU factorisation with partial pivoting; exact in QComplex mode.
template <class S>
class LuSolver {
public:
    explicit LuSolver(Matrix<S> a) : lu_(std::move(a)), perm_(lu_.rows()) {
        const std::size_t n = lu_.rows();
        if (lu_.cols() != n) throw std::invalid_argument("LuSolver: matrix must be square");
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t p = c;
            for (std::size_t r = c + 1; r < n; ++r)
                if (scalar_traits<S>::better_pivot(lu_(r, c), lu_(p, c))) p = r;
            if (scalar_traits<S>::is_zero(lu_(p, c)) ||
                (!scalar_traits<S>::exact && scalar_traits<S>::magnitude(lu_(p, c)) < 1e-300))
                throw SingularMatrixError("singular matrix at column " + std::to_string(c));
            if (p != c) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(p, j), lu_(c, j));
                std::swap(perm_[p], perm_[c]);
            }
            for (std::size_t r = c + 1; r < n; ++r) {
                if (scalar_traits<S>::is_zero(lu_(r, c))) continue;
                S f = lu_(r, c) / lu_(c, c);
                lu_(r, c) = f;
                for (std::size_t j = c + 1; j < n; ++j) lu_(r, j) -= f * lu_(c, j);
            }
        }
    }

    std::vector<S> solve(const std::vector<S>& b) const {
        const std::size_t n = lu_.rows();
        std::vector<S> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            S acc = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
            x[i] = acc;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            S acc = x[ii];
            for (std::size_t j = ii + 1; j < n; ++j) acc -= lu_(ii, j) * x[j];
            x[ii] = acc / lu_(ii, ii);
        }
        return x;
    }

    Matrix<S> inverse() const {
        const std::size_t n = lu_.rows();
        Matrix<S> inv(n, n);
        for (std::size_t c = 0; c < n; ++c) {
            std::vector<S> e(n, scalar_traits<S>::zero());
            e[c] = scalar_traits<S>::one();
            auto col = solve(e);
            for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
        }
        return inv;
    }

private:
    Matrix<S> lu_;
    std::vector<std::size_t> perm_;
};

}  // namespace resurgence
