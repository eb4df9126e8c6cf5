#pragma once

// Analytic continuation of an iterated convolution along a path: the
// integral over the simplex Delta_T is pushed along the adapted deformation
// and evaluated by adaptive tensor Gauss-Legendre cubature.

#include <string>
#include <vector>

#include "resurgence/deformation.hpp"
#include "resurgence/dfs.hpp"
#include "resurgence/germ.hpp"
#include "resurgence/trees.hpp"

namespace resurgence {

struct QuadratureSpec {
    std::size_t nodes = 32;      // Gauss-Legendre nodes per dimension and box
    double tol = 1e-9;           // per box: relative to the box magnitude or to max(1, |value|) vol
    std::size_t max_boxes = 20000;
};

struct ContinuationOptions {
    double rho = 0.0;
    double delta = 0.0;
    QuadratureSpec quadrature;
    DeformationOptions deformation;  // rho and delta are overwritten
};

enum class ContinuationRegime { direct, disc, deformed };
std::string to_string(ContinuationRegime r);

struct ContinuationResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
    bool converged = false;
    ContinuationRegime regime = ContinuationRegime::direct;
    std::size_t evaluations = 0;
    std::size_t boxes = 0;
    MonitorReport monitors;
    PathSpec normalized_path;
};

inline constexpr int kMaxContinuationVertices = 4;

/// psi_T continued along `path`, where psi_v = phi_v (f_v * psi_u1 * ... * psi_ul).
/// f and phi are indexed by vertex. Throws NumericAbort when the cubature
/// does not converge within the box budget.
ContinuationResult continue_iterated_convolution(const IterationTree& tree, const std::vector<Germ>& f,
                                                 const std::vector<Germ>& phi, const FilteredSet& omega,
                                                 const PathSpec& path, const ContinuationOptions& options);

/// |psi(gamma(1))| against c(1)^{k-1}/(k-1)! prod_v |phi_v| |f_v|, where the
/// germ factors are seminorm estimates over Omega with parameters (delta'(1), L).
struct NormBoundReport {
    double value = 0.0;
    double bound = 0.0;
    double c_end = 0.0;
    double delta_end = 0.0;
    std::vector<double> factor_estimates;  // phi_v then f_v, per vertex
    bool holds = false;
};
NormBoundReport norm_bound_check(const IterationTree& tree, const std::vector<Germ>& f, const std::vector<Germ>& phi,
                                 const FilteredSet& omega, const PathSpec& path, const ContinuationOptions& options,
                                 const ContinuationResult& result, std::size_t budget = 2000, unsigned seed = 1);

}  // namespace resurgence
