#pragma once

// Adapted deformation of the simplex D(gamma(a)): every vertex v of an
// iteration diagram carries zeta_v = (lambda_v, xi_v) in R>=0 x C, the root
// follows the lifted path and each child moves with velocity
// eta_u(zeta_u) / D_v * d zeta_v/dt.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "resurgence/dfs.hpp"
#include "resurgence/trees.hpp"

namespace resurgence {

struct NumericAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Zeta {
    double lambda = 0.0;
    cplx xi{0.0, 0.0};
};

/// eta(zeta) = dist((lambda, xi), {(0,0)} u closure of the support of omega).
double eta(const FilteredSet& omega, const Zeta& z);

/// D_v = sum_u eta_u(zeta_u) + |zeta_v - sum_u zeta_u| (Euclidean norm in R^3).
double d_v(const Zeta& zv, const std::vector<Zeta>& children, const std::vector<const FilteredSet*>& child_sets);

struct DeformationState {
    double tau = 0.0;         // arclength along the path
    double t = 0.0;           // tau / total length
    std::vector<Zeta> zeta;   // indexed by vertex
};

struct DeformationOptions {
    double rho = 0.0;     // radius of the radial head
    double delta = 0.0;   // the path keeps distance >= delta from the support
    double rtol = 1e-12;
    double atol = 1e-14;
    double step_clearance_fraction = 0.25;  // h * |velocity| <= fraction * eta
    double guard_fraction = 1e-3;           // guard D_v >= fraction * (lower bound on eta_v)
    double min_step = 1e-13;
    std::size_t max_steps = 2000000;
    bool sensitivities = true;
    bool record = true;
};

struct MonitorReport {
    double zero_face = 0.0;         // max |zeta_v| with s_v = 0
    double sum_face = 0.0;          // max |zeta_v - sum zeta_u| with sum s_u = s_v
    double lambda_excess = 0.0;     // max (sum lambda_u - lambda_v)^+
    double clearance_margin = 1e300;  // min dist(zeta_v, support of Omega_v) - delta'(t)
    double lambda_decrease = 0.0;   // max decrease of lambda_v between accepted steps
    double speed_mismatch = 0.0;    // max | d lambda/dt - |d xi/dt| |
    double radial_deviation = 0.0;  // max |zeta_u - s_u/s_v zeta_v| while 0 < lambda_v <= rho
    double guard_ratio = 1e300;     // min D_v / guard
    double jacobian_ratio = 0.0;    // max |det| / c(t)^{k-1}
    std::size_t steps = 0;
    std::size_t rejected = 0;

    void merge(const MonitorReport& o);
};

struct DeformationResult {
    std::vector<DeformationState> trajectory;  // accepted states (if recorded), starting at t = a
    std::vector<double> grid;                  // accepted arclength values
    DeformationState final_state;
    /// Block of d xi_u / d s_u' over siblings u, u' of each internal vertex, row-major.
    std::vector<std::vector<cplx>> jacobian_blocks;
    cplx jacobian_det{1.0, 0.0};
    MonitorReport monitors;
};

/// Deformation problem for a fixed tree, base d.f.s. and normalized path.
class DeformationProblem {
public:
    DeformationProblem(const IterationTree& tree, const FilteredSet& omega, const PathSpec& path, DeformationOptions opts);

    const IterationTree& tree() const { return tree_; }
    const PathSpec& path() const { return path_; }
    const DeformationOptions& options() const { return opts_; }
    /// Omega_v = Omega^{*w_v}.
    const FilteredSet& vertex_set(int v) const { return sets_.at(v); }
    double head_length() const { return tau_a_; }

    /// delta'(tau) = rho exp(-2 sqrt 2 L_a / delta) and c(tau) = rho exp(3 L_a / delta).
    double delta_prime(double tau) const;
    double c_bound(double tau) const;

    DeformationResult integrate(const SimplexPoint& s) const;
    /// Replays a fixed arclength grid (no error control); used for finite differences.
    DeformationResult integrate_on_grid(const SimplexPoint& s, const std::vector<double>& grid) const;

    /// Paths followed by xi_v and by xi_v - sum_u xi_u, from 0 (radial head then trajectory).
    PathSpec vertex_path(const DeformationResult& r, const SimplexPoint& s, int v) const;
    PathSpec argument_path(const DeformationResult& r, const SimplexPoint& s, int v) const;

private:
    DeformationResult run(const SimplexPoint& s, const std::vector<double>* grid) const;
    void rhs(const SimplexPoint& s, cplx direction, const std::vector<double>& y, std::vector<double>& dy,
             std::vector<double>* guard_d) const;
    void unpack(const std::vector<double>& y, double tau, DeformationState& st) const;
    void monitor(const SimplexPoint& s, const std::vector<double>& y, const std::vector<double>& dy, double tau,
                 const DeformationState* prev, MonitorReport& m) const;
    std::vector<std::vector<cplx>> blocks(const std::vector<double>& y) const;

    IterationTree tree_;
    FilteredSet omega_;
    PathSpec path_;
    DeformationOptions opts_;
    std::vector<FilteredSet> sets_;
    double tau_a_ = 0.0;
    std::size_t state_dim_ = 0;
    std::vector<std::size_t> sens_offset_;  // per vertex: offset of its sibling block (children of v)
};

/// Finite-difference check of the Jacobian: analytic sibling blocks against
/// central differences replayed on the same grid, the zero pattern outside
/// W_v, and the bound |det| <= c(t)^{k-1} at the endpoint.
struct JacobianReport {
    double max_block_error = 0.0;        // analytic vs finite difference, sibling blocks
    double max_outside_dependency = 0.0; // |d xi_v / d s_u| for u outside W_v
    cplx det_analytic{1.0, 0.0};
    cplx det_fd{1.0, 0.0};
    double bound = 1.0;                  // c(1)^{k-1}
    bool bound_holds = true;
    bool structure_holds = true;
};
JacobianReport jacobian_monitor(const DeformationProblem& problem, const SimplexPoint& s, double h = 1e-6,
                                double fd_tol = 1e-4);

/// Paired runs s, s' differing only on the children of v: the final value of
/// sum_u |xi_u - xi'_u| against c(t) sum_u |s_u - s'_u|.
struct LipschitzReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};
LipschitzReport lipschitz_check(const DeformationProblem& problem, const SimplexPoint& s, const SimplexPoint& s2, int v);

/// Columns t, vertex, lambda, re_xi, im_xi, clearance.
void write_trajectory_csv(std::ostream& os, const DeformationProblem& problem, const DeformationResult& r);

}  // namespace resurgence
