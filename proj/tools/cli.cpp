#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "resurgence/continuation.hpp"
#include "resurgence/deformation.hpp"
#include "resurgence/dfs.hpp"
#include "resurgence/germ.hpp"
#include "resurgence/solver.hpp"
#include "resurgence/trees.hpp"

namespace resurgence::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- output

namespace {

void emit(const json& j, std::string& out, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string pad_close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) {
                    out += ",";
                    out += nl;
                }
                first = false;
                out += pad;
                out += json(it.key()).dump();
                out += indent > 0 ? ": " : ":";
                emit(it.value(), out, indent, depth + 1);
            }
            out += nl;
            out += pad_close;
            out += "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Short arrays of scalars stay on one line.
            bool flat = j.size() <= 4;
            for (const auto& e : j) flat = flat && !e.is_structured();
            out += "[";
            if (!flat) out += nl;
            bool first = true;
            for (const auto& e : j) {
                if (!first) {
                    out += ",";
                    out += flat ? " " : nl;
                }
                first = false;
                if (!flat) out += pad;
                emit(e, out, indent, depth + 1);
            }
            if (!flat) {
                out += nl;
                out += pad_close;
            }
            out += "]";
            return;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);  // no negative zero
            out += buf;
            return;
        }
        default: out += j.dump();
    }
}

}  // namespace

std::string format_json(const json& j, int indent) {
    std::string out;
    emit(j, out, indent, 0);
    out += "\n";
    return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

// ---------------------------------------------------------------- config

void RunConfig::load() {
    std::ifstream is(input, std::ios::binary);
    if (!is) throw InputError("cannot open input file " + input.string());
    std::stringstream ss;
    ss << is.rdbuf();
    const std::string text = ss.str();
    try {
        document = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < pos; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw InputError(input.string() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
    if (!document.is_object()) throw InputError(input.string() + ": top level must be an object");
}

json RunConfig::effective() const {
    json o = document.contains("options") ? document["options"] : json::object();
    if (!o.is_object()) throw InputError("field 'options': expected an object");
    if (order) o["order"] = *order;
    if (kmax) o["kmax"] = *kmax;
    if (horizon) o["horizon"] = *horizon;
    if (delta) o["delta"] = *delta;
    if (arclen) o["arclen"] = *arclen;
    if (nodes) o["nodes"] = *nodes;
    if (tol) o["tol"] = *tol;
    o["seed"] = seed;
    o["rational"] = rational;
    return o;
}

void RunConfig::validate() const {
    if (order && *order < 0) throw InputError("--order must be >= 0");
    if (kmax && *kmax < 1) throw InputError("--kmax must be >= 1");
    if (horizon && !(*horizon > 0.0)) throw InputError("--horizon must be positive");
    if (delta && !(*delta > 0.0)) throw InputError("--delta must be positive");
    if (arclen && !(*arclen > 0.0)) throw InputError("--arclen must be positive");
    if (nodes && (*nodes < 1 || *nodes > 128)) throw InputError("--nodes must lie in [1, 128]");
    if (tol && !(*tol > 0.0)) throw InputError("--tol must be positive");
}

namespace {

// ---------------------------------------------------------------- parsing helpers

const json& field(const json& obj, const std::string& name, const std::string& where) {
    if (!obj.is_object() || !obj.contains(name)) throw InputError("missing field '" + where + name + "'");
    return obj.at(name);
}

double real_of(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        try {
            return mpq_class(j.get<std::string>()).get_d();
        } catch (const std::exception&) {
        }
    }
    throw InputError("field '" + where + "': expected a number or a \"p/q\" string");
}

mpq_class rational_of(const json& j, const std::string& where) {
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    if (j.is_number()) return mpq_class(j.get<double>());
    if (j.is_string()) {
        try {
            mpq_class q(j.get<std::string>());
            q.canonicalize();
            return q;
        } catch (const std::exception&) {
        }
    }
    throw InputError("field '" + where + "': expected a number or a \"p/q\" string");
}

template <class S>
S scalar_of(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw InputError("field '" + where + "': expected a [re, im] pair");
    if constexpr (scalar_traits<S>::exact) {
        return QComplex(rational_of(j[0], where + "[0]"), rational_of(j[1], where + "[1]"));
    } else {
        return cplx{real_of(j[0], where + "[0]"), real_of(j[1], where + "[1]")};
    }
}

template <class S>
std::vector<S> scalar_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw InputError("field '" + where + "': expected a list of [re, im] pairs");
    std::vector<S> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(scalar_of<S>(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

int int_option(const json& o, const char* name, int fallback) {
    if (!o.contains(name)) return fallback;
    if (!o[name].is_number_integer()) throw InputError(std::string("field 'options.") + name + "': expected an integer");
    return o[name].get<int>();
}

double real_option(const json& o, const char* name, double fallback) {
    if (!o.contains(name)) return fallback;
    return real_of(o[name], std::string("options.") + name);
}

template <class S>
EquationSpec<S> equation_of(const json& doc, const json& opts) {
    EquationKind kind;
    try {
        kind = equation_kind_from_string(field(doc, "kind", "").get<std::string>());
    } catch (const json::exception&) {
        throw InputError("field 'kind': expected a string");
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("field 'kind': ") + e.what());
    }
    const json& nj = field(doc, "n", "");
    if (!nj.is_number_integer() || nj.get<int>() < 1) throw InputError("field 'n': expected a positive integer");
    const int n = nj.get<int>();

    const json& lp = field(doc, "linear_part", "");
    if (!lp.is_array() || static_cast<int>(lp.size()) != n) throw InputError("field 'linear_part': expected n rows");
    Matrix<S> A(n, n);
    for (int r = 0; r < n; ++r) {
        const std::string w = "linear_part[" + std::to_string(r) + "]";
        const auto row = scalar_list<S>(lp[r], w);
        if (static_cast<int>(row.size()) != n) throw InputError("field '" + w + "': expected n entries");
        for (int c = 0; c < n; ++c) A(r, c) = row[c];
    }

    std::map<MultiIndex, typename NonlinearRHS<S>::TermVector> terms;
    const json empty = json::array();
    const json& tj = doc.contains("terms") ? doc["terms"] : empty;
    if (!tj.is_array()) throw InputError("field 'terms': expected a list");
    for (std::size_t t = 0; t < tj.size(); ++t) {
        const std::string w = "terms[" + std::to_string(t) + "].";
        const json& ell_j = field(tj[t], "ell", w);
        MultiIndex ell;
        if (!ell_j.is_array()) throw InputError("field '" + w + "ell': expected a list of integers");
        for (const auto& e : ell_j) {
            if (!e.is_number_integer()) throw InputError("field '" + w + "ell': expected a list of integers");
            ell.push_back(e.get<int>());
        }
        const json& sj = field(tj[t], "series", w);
        typename NonlinearRHS<S>::TermVector tv;
        // A single component may be given as a flat list of pairs.
        const bool flat = n == 1 && sj.is_array() && (sj.empty() || (sj[0].is_array() && sj[0].size() == 2 && !sj[0][0].is_array()));
        if (flat) {
            tv.push_back(scalar_list<S>(sj, w + "series"));
        } else {
            if (!sj.is_array() || static_cast<int>(sj.size()) != n)
                throw InputError("field '" + w + "series': expected one coefficient list per component");
            for (int c = 0; c < n; ++c) tv.push_back(scalar_list<S>(sj[c], w + "series[" + std::to_string(c) + "]"));
        }
        if (terms.count(ell)) throw InputError("field '" + w + "ell': duplicate multi-index");
        terms.emplace(std::move(ell), std::move(tv));
    }
    try {
        NonlinearRHS<S> rhs(n, std::move(A), std::move(terms));
        return EquationSpec<S>{kind, std::move(rhs), int_option(opts, "order", 10), real_option(opts, "horizon", 5.0)};
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

template <class S>
json scalar_json(const S& x) {
    const cplx z = scalar_traits<S>::to_cplx(x);
    return json::array({z.real(), z.imag()});
}

template <class S>
json exact_json(const S& x) {
    if constexpr (scalar_traits<S>::exact) return json::array({x.re.get_str(), x.im.get_str()});
    else return scalar_json(x);
}

json points_json(const FilteredSet& a) {
    json out = json::array();
    for (const auto& p : a.points())
        out.push_back(json{{"re", p.omega.real()}, {"im", p.omega.imag()}, {"level", p.level}});
    return out;
}

FilteredSet omega_of(const json& doc, double horizon) {
    const json& arr = field(doc, "omega", "");
    if (!arr.is_array()) throw InputError("field 'omega': expected a list of {re, im, level}");
    std::vector<FilteredPoint> pts;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string w = "omega[" + std::to_string(i) + "].";
        const double re = real_of(field(arr[i], "re", w), w + "re");
        const double im = real_of(field(arr[i], "im", w), w + "im");
        const double level = arr[i].contains("level") ? real_of(arr[i]["level"], w + "level") : std::hypot(re, im);
        pts.push_back({cplx{re, im}, level});
    }
    try {
        return FilteredSet(std::move(pts), horizon);
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("field 'omega': ") + e.what());
    }
}

IterationTree tree_of(const json& doc) {
    const json& t = field(doc, "tree", "");
    try {
        if (t.is_string()) return IterationTree::parse(t.get<std::string>());
        if (t.is_array()) return IterationTree(t.get<std::vector<int>>());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("field 'tree': ") + e.what());
    } catch (const json::exception&) {
    }
    throw InputError("field 'tree': expected an encoding string or a parent array");
}

PathSpec path_of(const json& doc) {
    const auto pts = scalar_list<cplx>(field(doc, "path", ""), "path");
    try {
        return PathSpec(pts);
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("field 'path': ") + e.what());
    }
}

Germ germ_of(const json& g, const std::string& where, const json& doc, const json& opts) {
    const std::string type = field(g, "type", where).get<std::string>();
    if (type == "constant") return constant_germ(scalar_of<cplx>(field(g, "value", where), where + "value"));
    if (type == "polynomial")
        return std::make_shared<PolynomialGerm>(scalar_list<cplx>(field(g, "coeffs", where), where + "coeffs"));
    if (type == "rational") {
        try {
            return std::make_shared<RationalGerm>(scalar_list<cplx>(field(g, "num", where), where + "num"),
                                                  scalar_list<cplx>(field(g, "den", where), where + "den"));
        } catch (const std::invalid_argument& e) {
            throw InputError("field '" + where + "': " + e.what());
        }
    }
    const cplx c = g.contains("c") ? scalar_of<cplx>(g["c"], where + "c") : cplx{1.0, 0.0};
    if (type == "pole") return RationalGerm::simple_pole(scalar_of<cplx>(field(g, "omega", where), where + "omega"), c);
    if (type == "log") return std::make_shared<LogGerm>(scalar_of<cplx>(field(g, "omega", where), where + "omega"), c);
    if (type == "kernel_entry") {
        const auto spec = equation_of<cplx>(doc, opts);
        const int r = field(g, "row", where).get<int>(), col = field(g, "col", where).get<int>();
        if (r < 0 || col < 0 || r >= spec.rhs.dim() || col >= spec.rhs.dim())
            throw InputError("field '" + where + "': kernel entry index out of range");
        return std::make_shared<KernelEntryGerm>(kernel_of(spec), r, col);
    }
    throw InputError("field '" + where + "type': unknown germ type '" + type + "'");
}

std::vector<Germ> germs_of(const json& doc, const char* name, std::size_t k, const json& opts) {
    const json& arr = field(field(doc, "germs", ""), name, "germs.");
    if (!arr.is_array() || arr.size() != k)
        throw InputError(std::string("field 'germs.") + name + "': expected one germ per vertex");
    std::vector<Germ> out;
    for (std::size_t v = 0; v < k; ++v)
        out.push_back(germ_of(arr[v], std::string("germs.") + name + "[" + std::to_string(v) + "].", doc, opts));
    return out;
}

json header(const RunConfig& cfg) {
    return json{{"command", cfg.command}, {"input", cfg.document}, {"options", cfg.effective()}};
}

// ---------------------------------------------------------------- commands

template <class S>
int cmd_solve(const RunConfig& cfg, std::ostream& log) {
    const json opts = cfg.effective();
    const auto spec = equation_of<S>(cfg.document, opts);
    const auto phi = solve_formal(spec);
    const int n = spec.rhs.dim();
    const int N = spec.order;

    json coeffs = json::array();
    std::string csv = "k,component,re,im\n";
    char buf[160];
    for (int i = 0; i < n; ++i) {
        json comp = json::array();
        for (int k = 0; k <= N; ++k) {
            json entry{{"k", k}, {"value", scalar_json(phi[i][k])}};
            if constexpr (scalar_traits<S>::exact) entry["exact"] = exact_json(phi[i][k]);
            comp.push_back(entry);
            const cplx z = scalar_traits<S>::to_cplx(phi[i][k]);
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", k, i, z.real() + 0.0, z.imag() + 0.0);
            csv += buf;
        }
        coeffs.push_back(comp);
    }
    json out = header(cfg);
    out["n"] = n;
    out["order"] = N;
    out["phi"] = coeffs;
    write_atomic(cfg.out_dir / "coefficients.json", format_json(out));
    write_atomic(cfg.out_dir / "coefficients.csv", csv);

    json borel = header(cfg);
    json germs = json::array();
    for (int i = 0; i < n; ++i) {
        json comp = json::array();
        if (N >= 1) {
            const auto img = borel_transform(phi[i]);
            for (int m = 0; m <= img.germ.order(); ++m) comp.push_back(scalar_json(img.germ[m]));
        }
        germs.push_back(comp);
    }
    borel["germs"] = germs;
    write_atomic(cfg.out_dir / "borel.json", format_json(borel));

    const auto res = substitution_residual(spec, phi);
    // Residual at order m relative to m max_{j <= m} |Phi_j|.
    double worst = 0.0, worst_abs = 0.0;
    for (int m = 0; m <= N; ++m) {
        double scale = 1.0;
        for (const auto& p : phi)
            for (int j = 0; j <= m; ++j) scale = std::max(scale, m * scalar_traits<S>::magnitude(p[j]));
        for (const auto& r : res) {
            const double a = scalar_traits<S>::magnitude(r[m]);
            worst_abs = std::max(worst_abs, a);
            worst = std::max(worst, a / scale);
        }
    }
    const double tol = scalar_traits<S>::exact ? 0.0 : real_option(opts, "tol", 1e-10);
    json rep = header(cfg);
    rep["max_abs_residual"] = worst_abs;
    rep["max_relative_residual"] = worst;
    rep["tolerance"] = tol;
    rep["passed"] = worst <= tol;
    write_atomic(cfg.out_dir / "residual.json", format_json(rep));
    log << "solve: order " << N << ", max relative residual " << worst << (worst <= tol ? " PASS" : " FAIL") << "\n";
    return worst <= tol ? kSuccess : kCheckFailed;
}

int cmd_singularities(const RunConfig& cfg, std::ostream& log) {
    const json opts = cfg.effective();
    const auto spec = equation_of<cplx>(cfg.document, opts);
    const FilteredSet base = predicted_dfs(spec);
    const FilteredSet closure = dfs_star_closure(base);
    json out = header(cfg);
    out["horizon"] = spec.horizon;
    out["base"] = points_json(base);
    out["closure"] = points_json(closure);
    write_atomic(cfg.out_dir / "singularities.json", format_json(out));
    std::string csv = "set,re,im,level\n";
    char buf[160];
    for (const auto& [name, set] : {std::pair<const char*, const FilteredSet*>{"base", &base}, {"closure", &closure}})
        for (const auto& p : set->points()) {
            std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g\n", name, p.omega.real() + 0.0, p.omega.imag() + 0.0, p.level);
            csv += buf;
        }
    write_atomic(cfg.out_dir / "singularities.csv", csv);
    log << "singularities: " << base.size() << " base points, " << closure.size() << " in the closure up to "
        << spec.horizon << "\n";
    return kSuccess;
}

template <class S>
int cmd_gevrey(const RunConfig& cfg, std::ostream& log) {
    const json opts = cfg.effective();
    const auto spec = equation_of<S>(cfg.document, opts);
    const int kmax = int_option(opts, "kmax", 40);
    const auto rep = gevrey_certificate(spec, kmax);
    json out = header(cfg);
    out["kmax"] = kmax;
    out["g"] = rep.g;
    out["sup"] = rep.sup;
    out["tail_slope"] = rep.tail_slope;
    out["slope_threshold"] = kGevreySlopeThreshold;
    out["fitted_c"] = rep.fitted_c;
    out["verdict"] = rep.passed ? "PASS" : "FAIL";
    write_atomic(cfg.out_dir / "gevrey.json", format_json(out));
    log << "gevrey: sup g_k = " << rep.sup << ", tail slope " << rep.tail_slope << (rep.passed ? " PASS" : " FAIL") << "\n";
    return rep.passed ? kSuccess : kCheckFailed;
}

template <class S>
int cmd_trees(const RunConfig& cfg, std::ostream& log) {
    const json opts = cfg.effective();
    const auto spec = equation_of<S>(cfg.document, opts);
    const int kmax = int_option(opts, "kmax", 5);
    if (kmax > kTreeEnumerationCap) throw InputError("--kmax exceeds the tree enumeration cap of " + std::to_string(kTreeEnumerationCap));
    EquationSpec<S> s = spec;
    s.order = std::max(spec.order, kmax + 1);
    const auto rep = tree_expansion_check(s, kmax, real_option(opts, "tol", 1e-12));

    const int n = spec.rhs.dim();
    const int count_kmax = int_option(opts, "count_kmax", 50);
    const auto counts = count_bound_check(count_kmax, n, 1.0 / (2.0 * n), 5, spec.rhs.max_degree());

    json out = header(cfg);
    json orders = json::array();
    for (const auto& o : rep.orders)
        orders.push_back(json{{"k", o.k},
                              {"classes", o.classes},
                              {"enumerated", o.enumerated},
                              {"max_abs_difference", o.max_abs_difference},
                              {"max_abs_value", o.max_abs_value},
                              {"exact_equal", o.exact_equal}});
    out["expansion"] = json{{"n", rep.n}, {"germ_order", rep.germ_order}, {"orders", orders}, {"passed", rep.passed}};
    json nk = json::array();
    for (const auto& c : counts.counts) nk.push_back(c.get_str());
    out["counting"] = json{{"kmax", counts.k_max},
                           {"N", nk},
                           {"b_inequality_worst_ratio", counts.b_inequality_worst_ratio},
                           {"b_inequality_worst_k", counts.b_inequality_worst_k},
                           {"b_inequality_worst_j", counts.b_inequality_worst_j},
                           {"b_inequality_holds", counts.b_inequality_holds},
                           {"delta", counts.delta},
                           {"smallest_c", counts.smallest_c},
                           {"bound_holds", counts.bound_holds}};
    const bool pass = rep.passed && counts.b_inequality_holds && counts.bound_holds;
    out["verdict"] = pass ? "PASS" : "FAIL";
    write_atomic(cfg.out_dir / "trees.json", format_json(out));
    log << "trees: expansion up to k = " << kmax << (rep.passed ? " equal" : " MISMATCH") << ", counting C = "
        << counts.smallest_c << (pass ? " PASS" : " FAIL") << "\n";
    return pass ? kSuccess : kCheckFailed;
}

struct ContinueSetup {
    IterationTree tree;
    FilteredSet omega;
    PathSpec path;
    std::vector<Germ> f, phi;
    ContinuationOptions options;
};

ContinueSetup continue_setup(const RunConfig& cfg, const json& opts) {
    ContinueSetup s;
    s.tree = tree_of(cfg.document);
    s.path = path_of(cfg.document);
    s.omega = omega_of(cfg.document, real_option(opts, "horizon", std::max(5.0, 2.0 * s.path.length())));
    s.f = germs_of(cfg.document, "f", s.tree.size(), opts);
    s.phi = germs_of(cfg.document, "phi", s.tree.size(), opts);
    s.options.rho = real_option(opts, "rho", 0.25 * rho(s.omega));
    s.options.delta = real_option(opts, "delta", s.options.rho);
    s.options.quadrature.nodes = static_cast<std::size_t>(int_option(opts, "nodes", 32));
    s.options.quadrature.tol = real_option(opts, "tol", 1e-9);
    s.options.quadrature.max_boxes = static_cast<std::size_t>(int_option(opts, "max_boxes", 20000));
    return s;
}

json monitors_json(const MonitorReport& m) {
    return json{{"zero_face", m.zero_face},
                {"sum_face", m.sum_face},
                {"lambda_excess", m.lambda_excess},
                {"clearance_margin", m.clearance_margin},
                {"lambda_decrease", m.lambda_decrease},
                {"speed_mismatch", m.speed_mismatch},
                {"radial_deviation", m.radial_deviation},
                {"guard_ratio", m.guard_ratio},
                {"jacobian_ratio", m.jacobian_ratio},
                {"steps", m.steps},
                {"rejected", m.rejected}};
}

bool monitors_pass(const MonitorReport& m) {
    return m.zero_face <= 1e-8 && m.sum_face <= 1e-8 && m.lambda_excess <= 1e-8 && m.clearance_margin >= -1e-6 &&
           m.lambda_decrease <= 1e-8 && m.speed_mismatch <= 1e-8 && m.radial_deviation <= 1e-8 &&
           m.jacobian_ratio <= 1.0 + 1e-4;
}

int cmd_continue(const RunConfig& cfg, std::ostream& log) {
    const json opts = cfg.effective();
    const auto s = continue_setup(cfg, opts);
    const auto r = continue_iterated_convolution(s.tree, s.f, s.phi, s.omega, s.path, s.options);

    json out = header(cfg);
    out["regime"] = to_string(r.regime);
    out["value"] = scalar_json(r.value);
    out["error_estimate"] = r.error_estimate;
    out["evaluations"] = r.evaluations;
    out["boxes"] = r.boxes;
    bool pass = r.converged;
    if (r.regime == ContinuationRegime::deformed) {
        out["monitors"] = monitors_json(r.monitors);
        pass = pass && monitors_pass(r.monitors);
    }
    if (cfg.document.contains("expect")) {
        const json& e = cfg.document["expect"];
        const cplx ref = scalar_of<cplx>(field(e, "value", "expect."), "expect.value");
        const double tol = e.contains("tol") ? real_of(e["tol"], "expect.tol") : 1e-6;
        const double diff = std::abs(r.value - ref);
        json ex{{"value", scalar_json(ref)}, {"difference", diff}, {"tol", tol}, {"passed", diff <= tol}};
        if (e.contains("principal")) {
            const cplx p = scalar_of<cplx>(e["principal"], "expect.principal");
            ex["principal"] = scalar_json(p);
            ex["jump"] = scalar_json(r.value - p);
        }
        out["expect"] = ex;
        pass = pass && diff <= tol;
    }
    out["verdict"] = pass ? "PASS" : "FAIL";
    write_atomic(cfg.out_dir / "continue.json", format_json(out));

    if (r.regime == ContinuationRegime::deformed) {
        // Trajectory of the simplex point at the centre of the cube.
        DeformationOptions d;
        d.rho = s.options.rho;
        d.delta = s.options.delta;
        const DeformationProblem problem(s.tree, s.omega, r.normalized_path, d);
        SimplexMap smap(s.tree);
        const auto sp = smap.map(std::vector<double>(smap.dimension(), 0.5)).first;
        const auto traj = problem.integrate(sp);
        std::ostringstream csv;
        write_trajectory_csv(csv, problem, traj);
        write_atomic(cfg.out_dir / "trajectory.csv", csv.str());
    }
    log << "continue: " << to_string(r.regime) << " value " << r.value << (pass ? " PASS" : " FAIL") << "\n";
    return pass ? kSuccess : kCheckFailed;
}

int cmd_norms(const RunConfig& cfg, std::ostream& log) {
    const json opts = cfg.effective();
    auto s = continue_setup(cfg, opts);
    const auto r = continue_iterated_convolution(s.tree, s.f, s.phi, s.omega, s.path, s.options);
    const std::size_t budget = static_cast<std::size_t>(int_option(opts, "budget", 2000));
    const auto rep = norm_bound_check(s.tree, s.f, s.phi, s.omega, s.path, s.options, r, budget, cfg.seed);

    json out = header(cfg);
    out["value"] = scalar_json(r.value);
    out["abs_value"] = rep.value;
    out["c_end"] = rep.c_end;
    out["delta_end"] = rep.delta_end;
    out["factor_estimates"] = rep.factor_estimates;
    out["bound"] = rep.bound;
    out["margin"] = rep.bound - rep.value;
    out["verdict"] = rep.holds ? "PASS" : "FAIL";
    write_atomic(cfg.out_dir / "norms.json", format_json(out));
    log << "norms: |psi| = " << rep.value << ", bound " << rep.bound << (rep.holds ? " PASS" : " FAIL") << "\n";
    return rep.holds ? kSuccess : kCheckFailed;
}

}  // namespace

int run(RunConfig cfg, std::ostream& log) {
    try {
        cfg.validate();
        cfg.load();
        const std::string& c = cfg.command;
        if (c == "solve") return cfg.rational ? cmd_solve<QComplex>(cfg, log) : cmd_solve<cplx>(cfg, log);
        if (c == "singularities") return cmd_singularities(cfg, log);
        if (c == "gevrey") return cfg.rational ? cmd_gevrey<QComplex>(cfg, log) : cmd_gevrey<cplx>(cfg, log);
        if (c == "trees") return cfg.rational ? cmd_trees<QComplex>(cfg, log) : cmd_trees<cplx>(cfg, log);
        if (c == "continue") return cmd_continue(cfg, log);
        if (c == "norms") return cmd_norms(cfg, log);
        throw InputError("unknown command '" + c + "'");
    } catch (const InputError& e) {
        log << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const json::exception& e) {
        log << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const NumericAbort& e) {
        log << "numeric abort: " << e.what() << "\n";
        return kNumericAbort;
    } catch (const GermDomainError& e) {
        log << "numeric abort: " << e.what() << "\n";
        return kNumericAbort;
    } catch (const ResonanceError& e) {
        log << "numeric abort: " << e.what() << "\n";
        return kNumericAbort;
    } catch (const std::invalid_argument& e) {
        log << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        log << "numeric abort: " << e.what() << "\n";
        return kNumericAbort;
    }
}

}  // namespace resurgence::cli
