#include "resurgence/continuation.hpp"

#include <cmath>
#include <deque>

#include "resurgence/quadrature.hpp"

namespace resurgence {

std::string to_string(ContinuationRegime r) {
    switch (r) {
        case ContinuationRegime::direct: return "direct";
        case ContinuationRegime::disc: return "disc";
        case ContinuationRegime::deformed: return "deformed";
    }
    return "unknown";
}

namespace {

using Integrand = std::function<cplx(const std::vector<double>&)>;

struct Box {
    std::vector<double> lo, hi;
    cplx estimate;
};

class Cubature {
public:
    Cubature(std::size_t dim, const QuadratureSpec& spec, Integrand f)
        : dim_(dim), spec_(spec), rule_(gauss_legendre(spec.nodes)), f_(std::move(f)) {}

    cplx box_value(const std::vector<double>& lo, const std::vector<double>& hi) {
        const std::size_t n = rule_.nodes.size();
        std::vector<std::size_t> idx(dim_, 0);
        std::vector<double> x(dim_);
        double vol = 1.0;
        for (std::size_t d = 0; d < dim_; ++d) vol *= hi[d] - lo[d];
        cplx sum{0.0, 0.0};
        while (true) {
            double w = 1.0;
            for (std::size_t d = 0; d < dim_; ++d) {
                x[d] = lo[d] + (hi[d] - lo[d]) * rule_.nodes[idx[d]];
                w *= rule_.weights[idx[d]];
            }
            sum += w * f_(x);
            ++evaluations;
            std::size_t d = 0;
            while (d < dim_ && ++idx[d] == n) idx[d++] = 0;
            if (d == dim_) break;
        }
        return vol * sum;
    }

    void run(ContinuationResult& out) {
        std::deque<Box> work;
        work.push_back({std::vector<double>(dim_, 0.0), std::vector<double>(dim_, 1.0), {}});
        work.front().estimate = box_value(work.front().lo, work.front().hi);
        boxes = 1;
        const double tol_abs = spec_.tol * std::max(1.0, std::abs(work.front().estimate));
        cplx total{0.0, 0.0};
        double err = 0.0;
        const std::size_t nchild = std::size_t{1} << dim_;
        while (!work.empty()) {
            Box b = std::move(work.front());
            work.pop_front();
            double vol = 1.0;
            for (std::size_t d = 0; d < dim_; ++d) vol *= b.hi[d] - b.lo[d];
            std::vector<Box> kids;
            kids.reserve(nchild);
            cplx sum{0.0, 0.0};
            double mag = 0.0;
            for (std::size_t c = 0; c < nchild; ++c) {
                Box k{b.lo, b.hi, {}};
                for (std::size_t d = 0; d < dim_; ++d) {
                    const double mid = 0.5 * (b.lo[d] + b.hi[d]);
                    if (c >> d & 1U) k.lo[d] = mid;
                    else k.hi[d] = mid;
                }
                k.estimate = box_value(k.lo, k.hi);
                sum += k.estimate;
                mag += std::abs(k.estimate);
                kids.push_back(std::move(k));
            }
            boxes += nchild;
            const double diff = std::abs(sum - b.estimate);
            if (diff <= std::max(tol_abs * vol, spec_.tol * mag)) {
                total += sum;
                err += diff;
                continue;
            }
            if (boxes > spec_.max_boxes)
                throw NumericAbort("cubature did not converge within " + std::to_string(spec_.max_boxes) + " boxes");
            for (auto& k : kids) work.push_back(std::move(k));
        }
        out.value = total;
        out.error_estimate = err;
        out.converged = true;
    }

    std::size_t evaluations = 0;
    std::size_t boxes = 0;

private:
    std::size_t dim_;
    QuadratureSpec spec_;
    const QuadratureRule& rule_;
    Integrand f_;
};

cplx germ_value(const Germ& g, const PathSpec* path, cplx end) {
    if (g->path_dependent() && path) return g->evaluate(*path);
    return g->at(end);
}

void check_inputs(const IterationTree& tree, const std::vector<Germ>& f, const std::vector<Germ>& phi) {
    if (f.size() != tree.size() || phi.size() != tree.size())
        throw std::invalid_argument("continuation: one f and one phi germ per vertex required");
    for (std::size_t v = 0; v < tree.size(); ++v)
        if (!f[v] || !phi[v]) throw std::invalid_argument("continuation: missing germ");
    if (static_cast<int>(tree.size()) > kMaxContinuationVertices)
        throw std::invalid_argument("continuation: at most " + std::to_string(kMaxContinuationVertices) +
                                    " vertices are supported");
}

}  // namespace

ContinuationResult continue_iterated_convolution(const IterationTree& tree, const std::vector<Germ>& f,
                                                 const std::vector<Germ>& phi, const FilteredSet& omega,
                                                 const PathSpec& path, const ContinuationOptions& options) {
    check_inputs(tree, f, phi);
    ContinuationResult res;
    res.normalized_path = path;
    const std::size_t k = tree.size();
    const int root = tree.root();
    const cplx zeta = path.endpoint();

    if (k == 1) {
        res.regime = ContinuationRegime::direct;
        res.value = germ_value(phi[root], &path, zeta) * germ_value(f[root], &path, zeta);
        res.converged = true;
        res.evaluations = 1;
        return res;
    }

    bool in_disc = true;
    for (const auto& v : path.vertices())
        if (std::abs(v) > options.rho) in_disc = false;

    SimplexMap smap(tree);
    const auto& top = tree.top_down();

    if (in_disc) {
        res.regime = ContinuationRegime::disc;
        const cplx det = std::pow(zeta, static_cast<double>(k - 1));
        Cubature cub(smap.dimension(), options.quadrature, [&](const std::vector<double>& x) -> cplx {
            const auto [s, jac] = smap.map(x);
            if (jac == 0.0) return {0.0, 0.0};
            cplx prod = det * jac;
            for (int v : top) {
                double rest = s[v];
                for (int u : tree.children(v)) rest -= s[u];
                prod *= phi[v]->at(s[v] * zeta) * f[v]->at(rest * zeta);
            }
            return prod;
        });
        cub.run(res);
        res.evaluations = cub.evaluations;
        res.boxes = cub.boxes;
        return res;
    }

    res.regime = ContinuationRegime::deformed;
    res.normalized_path = normalize_radial_head(path, options.rho);
    bool need_paths = false;
    for (std::size_t v = 0; v < k; ++v) need_paths = need_paths || f[v]->path_dependent() || phi[v]->path_dependent();
    DeformationOptions dopts = options.deformation;
    dopts.rho = options.rho;
    dopts.delta = options.delta;
    dopts.sensitivities = true;
    dopts.record = need_paths;
    const DeformationProblem problem(tree, omega, res.normalized_path, dopts);

    Cubature cub(smap.dimension(), options.quadrature, [&](const std::vector<double>& x) -> cplx {
        const auto [s, jac] = smap.map(x);
        if (jac == 0.0) return {0.0, 0.0};
        const auto r = problem.integrate(s);
        res.monitors.merge(r.monitors);
        cplx prod = r.jacobian_det * jac;
        for (int v : top) {
            const cplx xv = r.final_state.zeta[v].xi;
            cplx arg = xv;
            for (int u : tree.children(v)) arg -= r.final_state.zeta[u].xi;
            if (need_paths) {
                std::optional<PathSpec> pv, pa;
                if (phi[v]->path_dependent()) pv = problem.vertex_path(r, s, v);
                if (f[v]->path_dependent()) pa = problem.argument_path(r, s, v);
                prod *= germ_value(phi[v], pv ? &*pv : nullptr, xv) * germ_value(f[v], pa ? &*pa : nullptr, arg);
            } else {
                prod *= phi[v]->at(xv) * f[v]->at(arg);
            }
        }
        return prod;
    });
    cub.run(res);
    res.evaluations = cub.evaluations;
    res.boxes = cub.boxes;
    return res;
}

NormBoundReport norm_bound_check(const IterationTree& tree, const std::vector<Germ>& f, const std::vector<Germ>& phi,
                                 const FilteredSet& omega, const PathSpec& path, const ContinuationOptions& options,
                                 const ContinuationResult& result, std::size_t budget, unsigned seed) {
    check_inputs(tree, f, phi);
    NormBoundReport rep;
    const std::size_t k = tree.size();
    const double L = path.length();
    const double tau_a = result.regime == ContinuationRegime::deformed ? *result.normalized_path.head_length() : L;
    const double la = std::max(0.0, L - tau_a);
    rep.c_end = options.rho * std::exp(3.0 * la / options.delta);
    rep.delta_end = options.rho * std::exp(-2.0 * std::sqrt(2.0) * la / options.delta);
    const auto family = seminorm_path_family(omega, rep.delta_end, L, budget, seed);
    double prod = 1.0;
    for (std::size_t v = 0; v < k; ++v)
        for (const Germ& g : {phi[v], f[v]}) {
            const PathEvaluator ev = [&g](const PathSpec& p) { return g->evaluate(p); };
            const auto est = seminorm_estimate_on(ev, omega, rep.delta_end, L, family);
            rep.factor_estimates.push_back(est.value);
            prod *= est.value;
        }
    rep.value = std::abs(result.value);
    rep.bound = std::pow(rep.c_end, static_cast<double>(k - 1)) / std::tgamma(static_cast<double>(k)) * prod;
    rep.holds = rep.value <= rep.bound * (1.0 + 1e-9);
    return rep;
}

}  // namespace resurgence
