#include "resurgence/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/LU>

namespace resurgence {

namespace {

struct Vec3 {
    double x[3] = {0.0, 0.0, 0.0};
    double& operator[](int i) { return x[i]; }
    double operator[](int i) const { return x[i]; }
};

double norm3(const double* a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

double dot3(const double* a, const double* b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double zeta_norm(const Zeta& z) { return std::sqrt(z.lambda * z.lambda + std::norm(z.xi)); }

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
constexpr double kE[7] = {71.0 / 57600, 0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

}  // namespace

double eta(const FilteredSet& omega, const Zeta& z) { return dist_to_support(omega, z.lambda, z.xi, true); }

double d_v(const Zeta& zv, const std::vector<Zeta>& children, const std::vector<const FilteredSet*>& child_sets) {
    if (children.size() != child_sets.size()) throw std::invalid_argument("d_v: one d.f.s. per child required");
    double sum = 0.0;
    Zeta rest = zv;
    for (std::size_t i = 0; i < children.size(); ++i) {
        sum += eta(*child_sets[i], children[i]);
        rest.lambda -= children[i].lambda;
        rest.xi -= children[i].xi;
    }
    return sum + zeta_norm(rest);
}

void MonitorReport::merge(const MonitorReport& o) {
    zero_face = std::max(zero_face, o.zero_face);
    sum_face = std::max(sum_face, o.sum_face);
    lambda_excess = std::max(lambda_excess, o.lambda_excess);
    clearance_margin = std::min(clearance_margin, o.clearance_margin);
    lambda_decrease = std::max(lambda_decrease, o.lambda_decrease);
    speed_mismatch = std::max(speed_mismatch, o.speed_mismatch);
    radial_deviation = std::max(radial_deviation, o.radial_deviation);
    guard_ratio = std::min(guard_ratio, o.guard_ratio);
    jacobian_ratio = std::max(jacobian_ratio, o.jacobian_ratio);
    steps += o.steps;
    rejected += o.rejected;
}

DeformationProblem::DeformationProblem(const IterationTree& tree, const FilteredSet& omega, const PathSpec& path,
                                       DeformationOptions opts)
    : tree_(tree), omega_(omega), path_(path), opts_(opts) {
    if (!(opts_.rho > 0.0)) throw std::invalid_argument("DeformationProblem: rho must be positive");
    if (!(2.0 * opts_.rho < rho(omega_))) throw std::invalid_argument("DeformationProblem: need 2 rho < rho(Omega)");
    if (!(opts_.delta > 0.0 && opts_.delta <= opts_.rho))
        throw std::invalid_argument("DeformationProblem: need 0 < delta <= rho");
    if (!path_.marker()) throw std::invalid_argument("DeformationProblem: path must carry a radial-head marker");
    tau_a_ = *path_.head_length();
    if (std::abs(std::abs(path_.point_at_arclength(tau_a_)) - opts_.rho) > 1e-9 * std::max(1.0, opts_.rho))
        throw std::invalid_argument("DeformationProblem: radial head must end on |xi| = rho");
    if (path_.length() > omega_.horizon())
        throw std::invalid_argument("DeformationProblem: path is longer than the d.f.s. horizon");

    sets_.reserve(tree_.size());
    for (std::size_t v = 0; v < tree_.size(); ++v) sets_.push_back(dfs_star_power(omega_, tree_.weight(static_cast<int>(v))));

    const auto rep = is_allowed_path(sets_[tree_.root()], path_, opts_.delta, path_.length());
    if (!rep.allowed)
        throw std::invalid_argument("DeformationProblem: path is not delta-allowed (clearance " +
                                    std::to_string(rep.min_clearance) + " at arclength " +
                                    std::to_string(rep.worst_arclength) + ")");

    state_dim_ = 3 * tree_.size();
    sens_offset_.assign(tree_.size(), 0);
    if (opts_.sensitivities) {
        for (std::size_t v = 0; v < tree_.size(); ++v) {
            const std::size_t l = tree_.children(static_cast<int>(v)).size();
            sens_offset_[v] = state_dim_;
            state_dim_ += 3 * l * l;
        }
    }
}

double DeformationProblem::delta_prime(double tau) const {
    const double la = std::max(0.0, tau - tau_a_);
    return opts_.rho * std::exp(-2.0 * std::sqrt(2.0) * la / opts_.delta);
}

double DeformationProblem::c_bound(double tau) const {
    const double la = std::max(0.0, tau - tau_a_);
    return opts_.rho * std::exp(3.0 * la / opts_.delta);
}

void DeformationProblem::rhs(const SimplexPoint& s, cplx direction, const std::vector<double>& y,
                             std::vector<double>& dy, std::vector<double>* guard_d) const {
    std::fill(dy.begin(), dy.end(), 0.0);
    const int root = tree_.root();
    dy[3 * root] = 1.0;
    dy[3 * root + 1] = direction.real();
    dy[3 * root + 2] = direction.imag();
    if (guard_d) guard_d->assign(tree_.size(), -1.0);

    std::vector<double> eta_u;
    std::vector<Vec3> grad_u;
    for (int v : tree_.top_down()) {
        const auto& ch = tree_.children(v);
        if (ch.empty() || s[v] <= 0.0) continue;
        const std::size_t l = ch.size();
        const double* vel_v = &dy[3 * v];
        eta_u.assign(l, 0.0);
        grad_u.assign(l, Vec3{});
        double xi_vec[3] = {y[3 * v], y[3 * v + 1], y[3 * v + 2]};
        double D = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            const int u = ch[i];
            if (s[u] > 0.0) {
                const auto dg = dist_to_support_with_gradient(sets_[u], y[3 * u], {y[3 * u + 1], y[3 * u + 2]}, true);
                eta_u[i] = dg.distance;
                for (int c = 0; c < 3; ++c) grad_u[i][c] = dg.grad[c];
            }
            D += eta_u[i];
            for (int c = 0; c < 3; ++c) xi_vec[c] -= y[3 * u + c];
        }
        const double xi_norm = norm3(xi_vec);
        D += xi_norm;
        if (guard_d) (*guard_d)[v] = D;
        if (!(D > 0.0)) continue;
        for (std::size_t i = 0; i < l; ++i) {
            const double f = eta_u[i] / D;
            for (int c = 0; c < 3; ++c) dy[3 * ch[i] + c] = f * vel_v[c];
        }
        if (!opts_.sensitivities) continue;

        // On the face sum s_u = s_v the remainder is rounding noise; use the zero subgradient.
        double xi_hat[3] = {0.0, 0.0, 0.0};
        if (xi_norm > 1e-13 * norm3(&y[3 * v]))
            for (int c = 0; c < 3; ++c) xi_hat[c] = xi_vec[c] / xi_norm;
        const std::size_t off = sens_offset_[v];
        auto J = [&](std::size_t i, std::size_t j) { return &y[off + 3 * (i * l + j)]; };
        for (std::size_t j = 0; j < l; ++j) {
            double sg = 0.0;
            double sj[3] = {0.0, 0.0, 0.0};
            for (std::size_t w = 0; w < l; ++w) {
                const double* Jw = J(w, j);
                sg += dot3(grad_u[w].x, Jw);
                for (int c = 0; c < 3; ++c) sj[c] += Jw[c];
            }
            const double dD = sg - dot3(xi_hat, sj);
            for (std::size_t i = 0; i < l; ++i) {
                const double df = dot3(grad_u[i].x, J(i, j)) / D - eta_u[i] * dD / (D * D);
                double* out = &dy[off + 3 * (i * l + j)];
                for (int c = 0; c < 3; ++c) out[c] = df * vel_v[c];
            }
        }
    }
}

void DeformationProblem::unpack(const std::vector<double>& y, double tau, DeformationState& st) const {
    st.tau = tau;
    st.t = tau / path_.length();
    st.zeta.resize(tree_.size());
    for (std::size_t v = 0; v < tree_.size(); ++v) st.zeta[v] = {y[3 * v], {y[3 * v + 1], y[3 * v + 2]}};
}

std::vector<std::vector<cplx>> DeformationProblem::blocks(const std::vector<double>& y) const {
    std::vector<std::vector<cplx>> out(tree_.size());
    for (std::size_t v = 0; v < tree_.size(); ++v) {
        const std::size_t l = tree_.children(static_cast<int>(v)).size();
        out[v].resize(l * l);
        for (std::size_t q = 0; q < l * l; ++q) {
            const double* J = &y[sens_offset_[v] + 3 * q];
            out[v][q] = {J[1], J[2]};
        }
    }
    return out;
}

namespace {

cplx block_det(const std::vector<cplx>& b, std::size_t l) {
    if (l == 0) return {1.0, 0.0};
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l));
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = b[i * l + j];
    return m.determinant();
}

}  // namespace

void DeformationProblem::monitor(const SimplexPoint& s, const std::vector<double>& y, const std::vector<double>& dy,
                                 double tau, const DeformationState* prev, MonitorReport& m) const {
    const double dp = delta_prime(tau);
    for (std::size_t vi = 0; vi < tree_.size(); ++vi) {
        const int v = static_cast<int>(vi);
        const double* z = &y[3 * v];
        if (s[v] == 0.0) m.zero_face = std::max(m.zero_face, norm3(z));
        const double clear = dist_to_support(sets_[v], z[0], {z[1], z[2]}, false);
        m.clearance_margin = std::min(m.clearance_margin, clear - dp);
        if (prev) m.lambda_decrease = std::max(m.lambda_decrease, prev->zeta[v].lambda - z[0]);
        const double* dz = &dy[3 * v];
        m.speed_mismatch = std::max(m.speed_mismatch, std::abs(dz[0] - std::hypot(dz[1], dz[2])));

        const auto& ch = tree_.children(v);
        if (ch.empty()) continue;
        double sum_s = 0.0, sum_l = 0.0;
        double rest[3] = {z[0], z[1], z[2]};
        for (int u : ch) {
            sum_s += s[u];
            sum_l += y[3 * u];
            for (int c = 0; c < 3; ++c) rest[c] -= y[3 * u + c];
        }
        m.lambda_excess = std::max(m.lambda_excess, sum_l - z[0]);
        if (std::abs(sum_s - s[v]) <= 1e-15 * std::max(1.0, s[v])) m.sum_face = std::max(m.sum_face, norm3(rest));
        if (s[v] > 0.0 && z[0] > 0.0 && z[0] <= opts_.rho) {
            for (int u : ch) {
                const double r = s[u] / s[v];
                double d[3];
                for (int c = 0; c < 3; ++c) d[c] = y[3 * u + c] - r * z[c];
                m.radial_deviation = std::max(m.radial_deviation, norm3(d));
            }
        }
    }
    if (opts_.sensitivities && tree_.size() > 1) {
        const auto b = blocks(y);
        cplx det{1.0, 0.0};
        for (std::size_t v = 0; v < tree_.size(); ++v) det *= block_det(b[v], tree_.children(static_cast<int>(v)).size());
        const double bound = std::pow(c_bound(tau), static_cast<double>(tree_.size() - 1));
        m.jacobian_ratio = std::max(m.jacobian_ratio, std::abs(det) / bound);
    }
}

DeformationResult DeformationProblem::integrate(const SimplexPoint& s) const { return run(s, nullptr); }

DeformationResult DeformationProblem::integrate_on_grid(const SimplexPoint& s, const std::vector<double>& grid) const {
    return run(s, &grid);
}

DeformationResult DeformationProblem::run(const SimplexPoint& s, const std::vector<double>* grid) const {
    if (s.size() != tree_.size()) throw std::invalid_argument("DeformationProblem: simplex point has wrong size");
    const std::size_t n = state_dim_;
    const int root = tree_.root();
    const cplx ga = path_.point_at_arclength(tau_a_);

    std::vector<double> y(n, 0.0);
    for (std::size_t v = 0; v < tree_.size(); ++v) {
        y[3 * v] = s[v] * tau_a_;
        y[3 * v + 1] = s[v] * ga.real();
        y[3 * v + 2] = s[v] * ga.imag();
    }
    if (opts_.sensitivities)
        for (std::size_t v = 0; v < tree_.size(); ++v) {
            const std::size_t l = tree_.children(static_cast<int>(v)).size();
            for (std::size_t i = 0; i < l; ++i) {
                double* J = &y[sens_offset_[v] + 3 * (i * l + i)];
                J[0] = tau_a_;
                J[1] = ga.real();
                J[2] = ga.imag();
            }
        }

    DeformationResult res;
    MonitorReport& mon = res.monitors;
    std::vector<std::vector<double>> k(7, std::vector<double>(n));
    std::vector<double> ytmp(n), ynew(n), err(n), guard_d;

    const auto& arcs = path_.arclengths();
    const auto& verts = path_.vertices();
    auto direction_of = [&](double tau_mid) { return path_.direction_at_arclength(tau_mid); };

    const double sqrt2 = std::sqrt(2.0);
    auto guard_ok = [&](double tau, const std::vector<double>& d) {
        const double la = std::max(0.0, tau - tau_a_);
        bool ok = true;
        for (std::size_t v = 0; v < tree_.size(); ++v) {
            if (d[v] < 0.0) continue;  // leaf or s_v = 0
            const double lower = opts_.guard_fraction * sqrt2 * s[v] * opts_.rho * std::exp(-sqrt2 * la / opts_.delta);
            if (lower <= 0.0) continue;
            mon.guard_ratio = std::min(mon.guard_ratio, d[v] / lower);
            if (d[v] < lower) ok = false;
        }
        return ok;
    };

    DeformationState prev;
    double tau = tau_a_;
    cplx dir = direction_of(tau + 1e-300);
    rhs(s, dir, y, k[0], &guard_d);
    if (!guard_ok(tau, guard_d)) throw NumericAbort("deformation guard violated at the start");
    unpack(y, tau, prev);
    monitor(s, y, k[0], tau, nullptr, mon);
    if (opts_.record) res.trajectory.push_back(prev);
    res.grid.push_back(tau);

    // Segment ends after the head.
    std::vector<double> ends;
    for (std::size_t i = 1; i < arcs.size(); ++i)
        if (arcs[i] > tau_a_ + 1e-15) ends.push_back(arcs[i]);
    (void)verts;

    auto stage_step = [&](double h, const cplx& d) {
        // k[0] must hold f(y) for this direction.
        for (int st = 1; st < 7; ++st) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = y[i];
                for (int j = 0; j < st; ++j) acc += h * kA[st][j] * k[j][i];
                ytmp[i] = acc;
            }
            rhs(s, d, ytmp, k[st], st == 6 ? &guard_d : nullptr);
        }
        // ytmp now holds the 5th-order solution (FSAL row equals kB).
        ynew = ytmp;
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 7; ++j) acc += kE[j] * k[j][i];
            const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            e = std::max(e, std::abs(h * acc) / sc);
        }
        return e;
    };

    auto accept = [&](double tau_new) {
        y.swap(ynew);
        std::swap(k[0], k[6]);
        tau = tau_new;
        DeformationState cur;
        unpack(y, tau, cur);
        monitor(s, y, k[0], tau, &prev, mon);
        if (opts_.record) res.trajectory.push_back(cur);
        res.grid.push_back(tau);
        prev = std::move(cur);
        ++mon.steps;
    };

    if (grid) {
        for (std::size_t g = 1; g < grid->size(); ++g) {
            const double t0 = (*grid)[g - 1], t1 = (*grid)[g];
            const cplx d = direction_of(0.5 * (t0 + t1));
            if (d != dir) {
                dir = d;
                rhs(s, dir, y, k[0], nullptr);
            }
            stage_step(t1 - t0, dir);
            accept(t1);
        }
    } else {
        double h = 0.0;
        for (double seg_end : ends) {
            const cplx d = direction_of(0.5 * (tau + seg_end));
            if (d != dir || h == 0.0) {
                dir = d;
                rhs(s, dir, y, k[0], nullptr);
            }
            if (h == 0.0) h = std::min(seg_end - tau, 0.05 * opts_.delta);
            while (seg_end - tau > 1e-14 * std::max(1.0, seg_end)) {
                // Cap the step by clearance over speed for every moving vertex.
                double cap = seg_end - tau;
                for (std::size_t v = 0; v < tree_.size(); ++v) {
                    if (static_cast<int>(v) == root || s[v] <= 0.0) continue;
                    const double speed = norm3(&k[0][3 * v]);
                    if (speed <= 0.0) continue;
                    const double e = dist_to_support(sets_[v], y[3 * v], {y[3 * v + 1], y[3 * v + 2]}, true);
                    cap = std::min(cap, opts_.step_clearance_fraction * e / speed);
                }
                h = std::min(h, cap);
                if (h < opts_.min_step)
                    throw NumericAbort("deformation step underflow at arclength " + std::to_string(tau));
                const double e = stage_step(h, dir);
                if (e <= 1.0 && guard_ok(tau + h, guard_d)) {
                    const double tau_new = (seg_end - (tau + h) <= 1e-14 * std::max(1.0, seg_end)) ? seg_end : tau + h;
                    accept(tau_new);
                    const double fac = e > 0.0 ? std::min(5.0, 0.9 * std::pow(e, -0.2)) : 5.0;
                    h *= fac;
                } else {
                    ++mon.rejected;
                    h *= e > 1.0 ? std::max(0.2, 0.9 * std::pow(e, -0.2)) : 0.5;
                }
                if (mon.steps + mon.rejected > opts_.max_steps) throw NumericAbort("deformation exceeded the step budget");
            }
        }
    }

    unpack(y, tau, res.final_state);
    if (opts_.sensitivities) {
        res.jacobian_blocks = blocks(y);
        res.jacobian_det = {1.0, 0.0};
        for (std::size_t v = 0; v < tree_.size(); ++v)
            res.jacobian_det *= block_det(res.jacobian_blocks[v], tree_.children(static_cast<int>(v)).size());
    }
    return res;
}

PathSpec DeformationProblem::vertex_path(const DeformationResult& r, const SimplexPoint& s, int v) const {
    if (r.trajectory.empty()) throw std::logic_error("vertex_path: trajectory was not recorded");
    std::vector<cplx> pts{cplx{0.0, 0.0}};
    (void)s;
    for (const auto& st : r.trajectory) pts.push_back(st.zeta[v].xi);
    return PathSpec(std::move(pts));
}

PathSpec DeformationProblem::argument_path(const DeformationResult& r, const SimplexPoint& s, int v) const {
    if (r.trajectory.empty()) throw std::logic_error("argument_path: trajectory was not recorded");
    (void)s;
    std::vector<cplx> pts{cplx{0.0, 0.0}};
    for (const auto& st : r.trajectory) {
        cplx z = st.zeta[v].xi;
        for (int u : tree_.children(v)) z -= st.zeta[u].xi;
        pts.push_back(z);
    }
    return PathSpec(std::move(pts));
}

JacobianReport jacobian_monitor(const DeformationProblem& problem, const SimplexPoint& s, double h, double fd_tol) {
    JacobianReport rep;
    const auto& tree = problem.tree();
    const int k = static_cast<int>(tree.size());
    rep.bound = std::pow(problem.c_bound(problem.path().length()), k - 1);
    if (k == 1) return rep;
    if (!problem.options().sensitivities) throw std::invalid_argument("jacobian_monitor: sensitivities must be enabled");

    const auto base = problem.integrate(s);
    rep.det_analytic = base.jacobian_det;

    std::vector<int> coords;  // non-root vertices
    for (int v = 0; v < k; ++v)
        if (v != tree.root()) coords.push_back(v);
    const std::size_t m = coords.size();
    // fd(v, u) = d xi_v / d s_u
    std::vector<std::vector<cplx>> fd(k, std::vector<cplx>(k, {0.0, 0.0}));
    for (int u : coords) {
        SimplexPoint sp = s, sm = s;
        sp[u] += h;
        sm[u] -= h;
        const auto rp = problem.integrate_on_grid(sp, base.grid);
        const auto rm = problem.integrate_on_grid(sm, base.grid);
        for (int v : coords) fd[v][u] = (rp.final_state.zeta[v].xi - rm.final_state.zeta[v].xi) / (2.0 * h);
    }

    Eigen::MatrixXcd full(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fd[coords[i]][coords[j]];
    rep.det_fd = full.determinant();

    for (int v : coords) {
        const auto w = tree.dependency_set(v);
        for (int u : coords)
            if (!std::binary_search(w.begin(), w.end(), u))
                rep.max_outside_dependency = std::max(rep.max_outside_dependency, std::abs(fd[v][u]));
    }
    for (int v = 0; v < k; ++v) {
        const auto& ch = tree.children(v);
        const std::size_t l = ch.size();
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t j = 0; j < l; ++j) {
                const cplx a = base.jacobian_blocks[v][i * l + j];
                const cplx f = fd[ch[i]][ch[j]];
                rep.max_block_error = std::max(rep.max_block_error, std::abs(a - f) / std::max(1.0, std::abs(a)));
            }
    }
    rep.structure_holds = rep.max_outside_dependency <= fd_tol && rep.max_block_error <= fd_tol;
    rep.bound_holds = std::abs(rep.det_analytic) <= rep.bound * (1.0 + 1e-12) &&
                      std::abs(rep.det_fd) <= rep.bound * (1.0 + fd_tol);
    return rep;
}

LipschitzReport lipschitz_check(const DeformationProblem& problem, const SimplexPoint& s, const SimplexPoint& s2, int v) {
    const auto& tree = problem.tree();
    for (std::size_t u = 0; u < tree.size(); ++u) {
        const auto& ch = tree.children(v);
        const bool is_child = std::find(ch.begin(), ch.end(), static_cast<int>(u)) != ch.end();
        if (!is_child && s[u] != s2[u]) throw std::invalid_argument("lipschitz_check: points may differ only on the children of v");
    }
    DeformationOptions o = problem.options();
    const auto r1 = problem.integrate(s);
    const auto r2 = problem.integrate_on_grid(s2, r1.grid);
    double ds = 0.0;
    for (int u : tree.children(v)) ds += std::abs(s[u] - s2[u]);
    LipschitzReport rep;
    rep.holds = true;
    // Compare on every grid point when both runs recorded their states.
    const std::size_t npts = std::min(r1.trajectory.size(), r2.trajectory.size());
    for (std::size_t g = 0; g < npts; ++g) {
        double lhs = 0.0;
        for (int u : tree.children(v)) lhs += std::abs(r1.trajectory[g].zeta[u].xi - r2.trajectory[g].zeta[u].xi);
        const double rhs = problem.c_bound(r1.trajectory[g].tau) * ds;
        if (lhs > rhs * (1.0 + 1e-9) + 1e-13) rep.holds = false;
        rep.lhs = lhs;
        rep.rhs = rhs;
    }
    (void)o;
    return rep;
}

void write_trajectory_csv(std::ostream& os, const DeformationProblem& problem, const DeformationResult& r) {
    os << "t,vertex,lambda,re_xi,im_xi,clearance\n";
    char buf[256];
    for (const auto& st : r.trajectory)
        for (std::size_t v = 0; v < st.zeta.size(); ++v) {
            const auto& z = st.zeta[v];
            const double c = dist_to_support(problem.vertex_set(static_cast<int>(v)), z.lambda, z.xi, false);
            std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%.17g,%.17g\n", st.t, v, z.lambda, z.xi.real(),
                          z.xi.imag(), c);
            os << buf;
        }
}

}  // namespace resurgence
