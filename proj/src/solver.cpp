#include "resurgence/solver.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace resurgence {

std::string to_string(EquationKind kind) { return kind == EquationKind::differential ? "differential" : "difference"; }

EquationKind equation_kind_from_string(const std::string& s) {
    if (s == "differential") return EquationKind::differential;
    if (s == "difference") return EquationKind::difference;
    throw std::invalid_argument("unknown equation kind '" + s + "' (expected differential or difference)");
}

FilteredSet predicted_dfs(EquationKind kind, const Matrix<cplx>& linear_part, double horizon) {
    const auto n = static_cast<Eigen::Index>(linear_part.rows());
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = linear_part(i, j);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("predicted_dfs: eigenvalue computation failed");

    std::vector<FilteredPoint> pts;
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx lam = es.eigenvalues()[i];
        if (kind == EquationKind::differential) {
            const cplx w = -lam;
            if (std::abs(w) <= horizon) pts.push_back({w, std::abs(w)});
            continue;
        }
        if (std::abs(1.0 + lam) < 1e-14)
            throw std::domain_error("predicted_dfs: eigenvalue -1 makes e^{-xi} - 1 - lambda vanish nowhere (log singularity)");
        const cplx base = -std::log(1.0 + lam);
        const double two_pi = 2.0 * std::numbers::pi;
        const long m_lo = static_cast<long>(std::ceil((-horizon - base.imag()) / two_pi));
        const long m_hi = static_cast<long>(std::floor((horizon - base.imag()) / two_pi));
        for (long m = m_lo; m <= m_hi; ++m) {
            const cplx w = base + cplx{0.0, two_pi * static_cast<double>(m)};
            if (std::abs(w) <= horizon) pts.push_back({w, std::abs(w)});
        }
    }
    return FilteredSet(std::move(pts), horizon);
}

GevreyReport gevrey_from_log_magnitudes(const std::vector<std::vector<double>>& log_abs) {
    GevreyReport r;
    const int k_max = static_cast<int>(log_abs.size());
    std::vector<double> log_g(k_max, -std::numeric_limits<double>::infinity());
    for (int k = 1; k <= k_max; ++k) {
        for (double la : log_abs[k - 1]) {
            if (!std::isfinite(la)) continue;
            log_g[k - 1] = std::max(log_g[k - 1], (la - std::lgamma(static_cast<double>(k))) / k);
        }
        r.g.push_back(std::exp(log_g[k - 1]));
    }
    r.sup = 0.0;
    for (double x : r.g) r.sup = std::max(r.sup, x);

    const int first = k_max - k_max / 3 + 1;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int k = std::max(first, 1); k <= k_max; ++k) {
        if (!std::isfinite(log_g[k - 1])) continue;
        sx += k;
        sy += log_g[k - 1];
        sxx += static_cast<double>(k) * k;
        sxy += k * log_g[k - 1];
        ++cnt;
    }
    if (cnt >= 2) {
        const double den = cnt * sxx - sx * sx;
        r.tail_slope = (cnt * sxy - sx * sy) / den;
        const double intercept = (sy - r.tail_slope * sx) / cnt;
        r.fitted_c = std::exp(intercept + r.tail_slope * k_max);
    } else {
        r.tail_slope = 0.0;
        r.fitted_c = r.sup;
    }
    r.passed = r.tail_slope < kGevreySlopeThreshold;
    return r;
}

}  // namespace resurgence
