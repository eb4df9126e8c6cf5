#include "resurgence/germ.hpp"

#include <cmath>

namespace resurgence {

GermSeries<cplx> EvaluableGerm::taylor(int) const {
    throw GermDomainError(describe() + " germ has no Taylor expansion available");
}

cplx PolynomialGerm::at(cplx xi) const {
    cplx acc{0.0, 0.0};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * xi + *it;
    return acc;
}

RationalGerm::RationalGerm(std::vector<cplx> numerator, std::vector<cplx> denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    if (den_.empty() || den_[0] == cplx{0.0, 0.0})
        throw std::invalid_argument("RationalGerm: denominator must not vanish at the origin");
}

std::shared_ptr<RationalGerm> RationalGerm::simple_pole(cplx omega, cplx c) {
    if (omega == cplx{0.0, 0.0}) throw std::invalid_argument("RationalGerm: pole at the origin");
    return std::make_shared<RationalGerm>(std::vector<cplx>{c}, std::vector<cplx>{1.0, -1.0 / omega});
}

cplx RationalGerm::at(cplx xi) const {
    cplx n{0.0, 0.0}, d{0.0, 0.0};
    for (auto it = num_.rbegin(); it != num_.rend(); ++it) n = n * xi + *it;
    for (auto it = den_.rbegin(); it != den_.rend(); ++it) d = d * xi + *it;
    if (std::abs(d) == 0.0) throw GermDomainError("RationalGerm: evaluation at a pole");
    return n / d;
}

GermSeries<cplx> RationalGerm::taylor(int order) const {
    // q with d q = n, solved coefficient by coefficient.
    GermSeries<cplx> q(order);
    for (int m = 0; m <= order; ++m) {
        cplx acc = m < static_cast<int>(num_.size()) ? num_[m] : cplx{0.0, 0.0};
        for (int i = 1; i <= m && i < static_cast<int>(den_.size()); ++i) acc -= den_[i] * q[m - i];
        q[m] = acc / den_[0];
    }
    return q;
}

cplx KernelEntryGerm::at(cplx xi) const {
    try {
        return kernel_.inverse(xi)(r_, c_);
    } catch (const SingularMatrixError&) {
        throw GermDomainError("KernelEntryGerm: evaluation at a pole of P^{-1}");
    }
}

LogGerm::LogGerm(cplx omega, cplx c) : omega_(omega), c_(c) {
    if (omega == cplx{0.0, 0.0}) throw std::invalid_argument("LogGerm: branch point at the origin");
}

double LogGerm::winding(const PathSpec& path) const {
    // Along a straight segment avoiding 0, the continuous argument change of
    // w = 1 - xi/omega is the principal argument of w_end / w_start.
    double total = 0.0;
    const auto& vs = path.vertices();
    cplx prev = 1.0 - vs.front() / omega_;
    for (std::size_t i = 1; i < vs.size(); ++i) {
        const cplx w = 1.0 - vs[i] / omega_;
        if (std::abs(w) == 0.0 || std::abs(prev) == 0.0) throw GermDomainError("LogGerm: path through the branch point");
        total += std::arg(w / prev);
        prev = w;
    }
    return total / (2.0 * M_PI);
}

cplx LogGerm::evaluate(const PathSpec& path) const {
    const cplx w = 1.0 - path.endpoint() / omega_;
    if (std::abs(w) == 0.0) throw GermDomainError("LogGerm: evaluation at the branch point");
    // Principal log at the start (w = 1) plus the accumulated argument.
    const double arg = 2.0 * M_PI * winding(path);
    return c_ * cplx{std::log(std::abs(w)), arg};
}

GermSeries<cplx> LogGerm::taylor(int order) const {
    GermSeries<cplx> g(order);
    cplx p = 1.0;
    for (int m = 1; m <= order; ++m) {
        p /= omega_;
        g[m] = -c_ * p / static_cast<double>(m);
    }
    return g;
}

cplx PartialSumGerm::evaluate(const PathSpec& path) const {
    for (const auto& v : path.vertices())
        if (std::abs(v) >= radius_) throw GermDomainError("PartialSumGerm: path leaves the disc of validity");
    return series_.evaluate(path.endpoint());
}

cplx PartialSumGerm::at(cplx xi) const {
    if (std::abs(xi) >= radius_) throw GermDomainError("PartialSumGerm: point outside the disc of validity");
    return series_.evaluate(xi);
}

GermSeries<cplx> PartialSumGerm::taylor(int order) const {
    if (order <= series_.order()) return series_.truncated(order);
    return GermSeries<cplx>::polynomial(series_.coeffs(), order);
}

Germ constant_germ(cplx c) { return std::make_shared<PolynomialGerm>(std::vector<cplx>{c}); }

}  // namespace resurgence
