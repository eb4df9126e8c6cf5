#pragma once

// Germs that can be evaluated at the end of a path from the origin, i.e.
// along their analytic continuation.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "resurgence/dfs.hpp"
#include "resurgence/series.hpp"
#include "resurgence/solver.hpp"

namespace resurgence {

struct GermDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

class EvaluableGerm {
public:
    virtual ~EvaluableGerm() = default;

    /// Value of the continuation along `path` at its endpoint.
    virtual cplx evaluate(const PathSpec& path) const = 0;
    /// Value at xi along the straight segment [0, xi].
    virtual cplx at(cplx xi) const { return evaluate(PathSpec::straight(xi)); }
    /// False when the value depends only on the endpoint.
    virtual bool path_dependent() const { return false; }
    /// Taylor coefficients at the origin, if known.
    virtual GermSeries<cplx> taylor(int order) const;
    virtual std::string describe() const = 0;
};

using Germ = std::shared_ptr<const EvaluableGerm>;

class PolynomialGerm : public EvaluableGerm {
public:
    explicit PolynomialGerm(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {}
    cplx evaluate(const PathSpec& path) const override { return at(path.endpoint()); }
    cplx at(cplx xi) const override;
    GermSeries<cplx> taylor(int order) const override { return GermSeries<cplx>::polynomial(coeffs_, order); }
    std::string describe() const override { return "polynomial"; }

private:
    std::vector<cplx> coeffs_;
};

/// N(xi) / D(xi) with D(0) != 0.
class RationalGerm : public EvaluableGerm {
public:
    RationalGerm(std::vector<cplx> numerator, std::vector<cplx> denominator);
    /// c / (1 - xi/omega).
    static std::shared_ptr<RationalGerm> simple_pole(cplx omega, cplx c = 1.0);

    cplx evaluate(const PathSpec& path) const override { return at(path.endpoint()); }
    cplx at(cplx xi) const override;
    GermSeries<cplx> taylor(int order) const override;
    std::string describe() const override { return "rational"; }

private:
    std::vector<cplx> num_;
    std::vector<cplx> den_;
};

/// Entry (r, c) of P(xi)^{-1} for the kernel of an equation.
class KernelEntryGerm : public EvaluableGerm {
public:
    KernelEntryGerm(MeromorphicKernel<cplx> kernel, std::size_t r, std::size_t c)
        : kernel_(std::move(kernel)), r_(r), c_(c) {}
    cplx evaluate(const PathSpec& path) const override { return at(path.endpoint()); }
    cplx at(cplx xi) const override;
    GermSeries<cplx> taylor(int order) const override { return kernel_.inverse_entry_germ(r_, c_, order); }
    std::string describe() const override { return "kernel-entry"; }

private:
    MeromorphicKernel<cplx> kernel_;
    std::size_t r_, c_;
};

/// c * log(1 - xi/omega), principal branch at the origin, continued along
/// the path by accumulating the winding of 1 - xi/omega segment by segment.
class LogGerm : public EvaluableGerm {
public:
    LogGerm(cplx omega, cplx c = 1.0);
    cplx evaluate(const PathSpec& path) const override;
    bool path_dependent() const override { return true; }
    GermSeries<cplx> taylor(int order) const override;
    std::string describe() const override { return "log"; }
    /// Winding of 1 - xi/omega along the path, in units of 2 pi.
    double winding(const PathSpec& path) const;

private:
    cplx omega_, c_;
};

/// Taylor polynomial trusted only inside the open disc of the given radius.
class PartialSumGerm : public EvaluableGerm {
public:
    PartialSumGerm(GermSeries<cplx> series, double radius) : series_(std::move(series)), radius_(radius) {}
    cplx evaluate(const PathSpec& path) const override;
    cplx at(cplx xi) const override;
    GermSeries<cplx> taylor(int order) const override;
    std::string describe() const override { return "partial-sum"; }

private:
    GermSeries<cplx> series_;
    double radius_;
};

/// Single-valued germ given by a function of the endpoint.
class FunctionGerm : public EvaluableGerm {
public:
    FunctionGerm(std::function<cplx(cplx)> f, std::string name) : f_(std::move(f)), name_(std::move(name)) {}
    cplx evaluate(const PathSpec& path) const override { return f_(path.endpoint()); }
    cplx at(cplx xi) const override { return f_(xi); }
    std::string describe() const override { return name_; }

private:
    std::function<cplx(cplx)> f_;
    std::string name_;
};

Germ constant_germ(cplx c);

}  // namespace resurgence
