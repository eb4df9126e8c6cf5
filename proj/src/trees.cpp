#include "resurgence/trees.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace resurgence {

IterationTree::IterationTree() : parent_{-1} { build(); }

IterationTree::IterationTree(std::vector<int> parent) : parent_(std::move(parent)) { build(); }

void IterationTree::build() {
    const int k = static_cast<int>(parent_.size());
    if (k == 0) throw std::invalid_argument("IterationTree: empty tree");
    children_.assign(k, {});
    root_ = -1;
    for (int v = 0; v < k; ++v) {
        const int p = parent_[v];
        if (p == -1) {
            if (root_ != -1) throw std::invalid_argument("IterationTree: more than one root");
            root_ = v;
        } else {
            if (p < 0 || p >= k || p == v) throw std::invalid_argument("IterationTree: bad parent index");
            children_[p].push_back(v);
        }
    }
    if (root_ == -1) throw std::invalid_argument("IterationTree: no root");

    order_.clear();
    order_.push_back(root_);
    for (std::size_t i = 0; i < order_.size(); ++i)
        for (int c : children_[order_[i]]) order_.push_back(c);
    if (static_cast<int>(order_.size()) != k) throw std::invalid_argument("IterationTree: not connected (cycle)");

    weight_.assign(k, 0);
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
        const int v = *it;
        if (children_[v].empty()) {
            weight_[v] = 1;
        } else {
            for (int c : children_[v]) weight_[v] += weight_[c];
        }
    }
}

std::vector<int> IterationTree::leaves() const {
    std::vector<int> out;
    for (int v : order_)
        if (children_[v].empty()) out.push_back(v);
    return out;
}

std::vector<int> IterationTree::branch(int v) const {
    std::vector<int> out{v};
    for (std::size_t i = 0; i < out.size(); ++i)
        for (int c : children_[out[i]]) out.push_back(c);
    return out;
}

std::vector<int> IterationTree::path_to_root(int v) const {
    std::vector<int> out;
    for (int u = v; u != -1; u = parent_.at(u)) out.push_back(u);
    return out;
}

std::vector<int> IterationTree::dependency_set(int v) const {
    std::vector<int> out{root_};
    for (int u = parent_.at(v); u != -1; u = parent_[u])
        for (int c : children_[u]) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
}

std::string IterationTree::branch_encoding(int v) const {
    std::vector<std::string> parts;
    for (int c : children_.at(v)) parts.push_back(branch_encoding(c));
    std::sort(parts.begin(), parts.end());
    std::string s = "(";
    for (auto& p : parts) s += p;
    return s + ")";
}

IterationTree IterationTree::parse(const std::string& encoding) {
    std::vector<int> parent;
    std::vector<int> stack;
    for (std::size_t i = 0; i < encoding.size(); ++i) {
        const char c = encoding[i];
        if (c == '(') {
            if (stack.empty() && !parent.empty()) throw std::invalid_argument("IterationTree::parse: trailing input");
            parent.push_back(stack.empty() ? -1 : stack.back());
            stack.push_back(static_cast<int>(parent.size()) - 1);
        } else if (c == ')') {
            if (stack.empty()) throw std::invalid_argument("IterationTree::parse: unbalanced ')'");
            stack.pop_back();
        } else {
            throw std::invalid_argument(std::string("IterationTree::parse: unexpected character '") + c + "'");
        }
    }
    if (!stack.empty() || parent.empty()) throw std::invalid_argument("IterationTree::parse: unbalanced encoding");
    return IterationTree(std::move(parent));
}

IterationTree IterationTree::join(const std::vector<IterationTree>& children) {
    std::vector<std::string> parts;
    for (const auto& c : children) parts.push_back(c.encoding());
    std::sort(parts.begin(), parts.end());
    std::string s = "(";
    for (auto& p : parts) s += p;
    return parse(s + ")");
}

namespace {

// Calls `emit` with every multiset of items (given by id, with sizes) whose
// sizes sum to `budget`, as nondecreasing id sequences.
void for_each_multiset(const std::vector<int>& sizes, int budget, int first, std::vector<int>& chosen,
                       const std::function<void(const std::vector<int>&)>& emit) {
    if (budget == 0) {
        emit(chosen);
        return;
    }
    for (int id = first; id < static_cast<int>(sizes.size()); ++id) {
        if (sizes[id] > budget) continue;
        chosen.push_back(id);
        for_each_multiset(sizes, budget - sizes[id], id, chosen, emit);
        chosen.pop_back();
    }
}

}  // namespace

std::vector<IterationTree> enumerate_trees(int k) {
    if (k < 1) throw std::invalid_argument("enumerate_trees: k must be >= 1");
    // Encodings of every class of size < k, grouped with their sizes.
    std::vector<std::string> enc;
    std::vector<int> sizes;
    std::vector<std::string> current;
    for (int s = 1; s <= k; ++s) {
        current.clear();
        std::vector<int> chosen;
        for_each_multiset(sizes, s - 1, 0, chosen, [&](const std::vector<int>& ids) {
            std::vector<std::string> parts;
            for (int id : ids) parts.push_back(enc[id]);
            std::sort(parts.begin(), parts.end());
            std::string e = "(";
            for (auto& p : parts) e += p;
            current.push_back(e + ")");
        });
        if (s == k) break;
        for (auto& e : current) {
            enc.push_back(e);
            sizes.push_back(s);
        }
    }
    std::sort(current.begin(), current.end());
    std::vector<IterationTree> out;
    out.reserve(current.size());
    for (const auto& e : current) out.push_back(IterationTree::parse(e));
    return out;
}

DecoratedTree::DecoratedTree(IterationTree tree, std::vector<Decoration> nu, int n)
    : tree_(std::move(tree)), nu_(std::move(nu)), n_(n) {
    if (n < 1) throw std::invalid_argument("DecoratedTree: n must be >= 1");
    if (nu_.size() != tree_.size()) throw std::invalid_argument("DecoratedTree: one decoration per vertex required");
    for (const auto& [a, b] : nu_)
        if (a < 1 || a > n || b < 1 || b > n) throw std::invalid_argument("DecoratedTree: decoration out of range");
}

std::vector<int> DecoratedTree::lambda(int v) const {
    std::vector<int> l(n_, 0);
    for (int u : tree_.children(v)) ++l[nu_[u].first - 1];
    return l;
}

std::string DecoratedTree::branch_encoding(int v) const {
    std::vector<std::string> parts;
    for (int c : tree_.children(v)) parts.push_back(branch_encoding(c));
    std::sort(parts.begin(), parts.end());
    std::string s = "(" + std::to_string(nu_[v].first) + "," + std::to_string(nu_[v].second);
    for (auto& p : parts) s += p;
    return s + ")";
}

mpz_class DecoratedTree::multiplicity() const {
    mpz_class mu = 1;
    for (std::size_t v = 0; v < tree_.size(); ++v) {
        const auto& ch = tree_.children(static_cast<int>(v));
        if (ch.empty()) continue;
        mpz_class f;
        for (int lj : lambda(static_cast<int>(v))) {
            mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(lj));
            mu *= f;
        }
        std::map<std::string, int> classes;
        for (int u : ch) ++classes[branch_encoding(u)];
        for (const auto& [_, count] : classes) {
            mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(count));
            mu /= f;
        }
    }
    return mu;
}

namespace {

struct DecoratedClass {
    std::string encoding;
    int size;
    Decoration root;
    std::vector<int> children;  // ids into the class table
};

// Flattens a class into parent array + decorations in preorder.
void flatten(const std::vector<DecoratedClass>& table, int id, int parent, std::vector<int>& parents,
             std::vector<Decoration>& nu) {
    const int me = static_cast<int>(parents.size());
    parents.push_back(parent);
    nu.push_back(table[id].root);
    for (int c : table[id].children) flatten(table, c, me, parents, nu);
}

}  // namespace

std::vector<DecoratedTree> enumerate_decorated(int k, int n, int j) {
    if (k < 1) throw std::invalid_argument("enumerate_decorated: k must be >= 1");
    if (n < 1 || j < 1 || j > n) throw std::invalid_argument("enumerate_decorated: need 1 <= j <= n");
    std::vector<DecoratedClass> table;
    std::vector<int> sizes;
    std::vector<DecoratedClass> top;
    for (int s = 1; s <= k; ++s) {
        std::vector<DecoratedClass> fresh;
        std::vector<int> chosen;
        for_each_multiset(sizes, s - 1, 0, chosen, [&](const std::vector<int>& ids) {
            std::vector<std::string> parts;
            for (int id : ids) parts.push_back(table[id].encoding);
            std::sort(parts.begin(), parts.end());
            std::string tail;
            for (auto& p : parts) tail += p;
            for (int a = 1; a <= n; ++a) {
                if (s == k && a != j) continue;
                for (int b = 1; b <= n; ++b) {
                    std::string e = "(" + std::to_string(a) + "," + std::to_string(b) + tail + ")";
                    fresh.push_back({e, s, {a, b}, ids});
                }
            }
        });
        if (s == k) {
            top = std::move(fresh);
            break;
        }
        for (auto& c : fresh) {
            sizes.push_back(s);
            table.push_back(std::move(c));
        }
    }
    std::sort(top.begin(), top.end(), [](const DecoratedClass& x, const DecoratedClass& y) { return x.encoding < y.encoding; });
    std::vector<DecoratedTree> out;
    out.reserve(top.size());
    for (const auto& c : top) {
        std::vector<int> parents{-1};
        std::vector<Decoration> nu{c.root};
        for (int ch : c.children) flatten(table, ch, 0, parents, nu);
        out.emplace_back(IterationTree(std::move(parents)), std::move(nu), n);
    }
    return out;
}

bool in_simplex(const IterationTree& tree, const SimplexPoint& s, double tol) {
    if (s.size() != tree.size()) return false;
    if (std::abs(s[tree.root()] - 1.0) > tol) return false;
    for (std::size_t v = 0; v < tree.size(); ++v) {
        if (s[v] < -tol) return false;
        double sum = 0.0;
        for (int u : tree.children(static_cast<int>(v))) sum += s[u];
        if (sum > s[v] + tol) return false;
    }
    return true;
}

std::vector<SimplexPoint> sample_simplex(const IterationTree& tree, std::size_t count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<SimplexPoint> out;
    out.reserve(count);
    SimplexPoint s(tree.size());
    while (out.size() < count) {
        for (std::size_t v = 0; v < tree.size(); ++v) s[v] = uni(rng);
        s[tree.root()] = 1.0;
        if (in_simplex(tree, s, 0.0)) out.push_back(s);
    }
    return out;
}

VolumeCheck simplex_volume_check(const IterationTree& tree, std::size_t samples, std::uint64_t seed) {
    const int k = static_cast<int>(tree.size());
    double exact = 1.0;
    for (int i = 2; i <= k - 1; ++i) exact /= i;
    if (k == 1) return {1.0, 0.0, 1.0, true};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    SimplexPoint s(tree.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        for (std::size_t v = 0; v < tree.size(); ++v) s[v] = uni(rng);
        s[tree.root()] = 1.0;
        if (in_simplex(tree, s, 0.0)) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(samples));
    return {p, sigma, exact, std::abs(p - exact) <= 3.0 * sigma};
}

SimplexMap::SimplexMap(const IterationTree& tree) : tree_(&tree), dim_(tree.size() - 1) {
    for (int v : tree.top_down())
        for (int u : tree.children(v)) coord_vertex_.push_back(u);
}

std::pair<SimplexPoint, double> SimplexMap::map(const std::vector<double>& x) const {
    if (x.size() != dim_) throw std::invalid_argument("SimplexMap: wrong cube dimension");
    const auto& tree = *tree_;
    SimplexPoint s(tree.size(), 0.0);
    s[tree.root()] = 1.0;
    double jac = 1.0;
    std::size_t idx = 0;
    for (int v : tree.top_down()) {
        const auto& ch = tree.children(v);
        const int l = static_cast<int>(ch.size());
        double remain = 1.0;  // prod_{p<i} (1 - x_p)
        for (int i = 0; i < l; ++i) {
            const double xi = x[idx++];
            s[ch[i]] = s[v] * remain * xi;
            jac *= s[v] * remain;
            remain *= 1.0 - xi;
        }
    }
    return {std::move(s), jac};
}

double b_weight(int k) { return 3.0 / (2.0 * std::numbers::pi * std::numbers::pi * (k + 1.0) * (k + 1.0)); }

namespace {

mpz_class binomial(long n, long r) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(r));
    return c;
}

}  // namespace

std::vector<mpz_class> decorated_count_recursion(int k_max, int n, int max_degree) {
    if (k_max < 1 || n < 1) throw std::invalid_argument("decorated_count_recursion: need k_max >= 1 and n >= 1");
    std::vector<mpz_class> N(k_max + 1, 0);  // index k
    N[1] = n;
    // conv[j][k] = sum over compositions k_1+..+k_j = k of prod N_{k_i}
    std::vector<std::vector<mpz_class>> conv(k_max + 1, std::vector<mpz_class>(k_max + 1, 0));
    conv[0][0] = 1;
    for (int k = 1; k < k_max; ++k) {
        // N_1..N_k are final; refresh the j-fold convolutions at total k.
        for (int j = 1; j <= k; ++j) {
            mpz_class acc = 0;
            for (int last = 1; last <= k - (j - 1); ++last) acc += conv[j - 1][k - last] * N[last];
            conv[j][k] = acc;
        }
        mpz_class total = 0;
        const int jmax = max_degree < 0 ? k : std::min(k, max_degree);
        for (int j = 1; j <= jmax; ++j) total += binomial(j + n - 1, n - 1) * conv[j][k];
        N[k + 1] = n * total;
    }
    return std::vector<mpz_class>(N.begin() + 1, N.end());
}

CountBoundReport count_bound_check(int k_max, int n, double delta, int j_max, int max_degree) {
    CountBoundReport r;
    r.n = n;
    r.k_max = k_max;
    r.delta = delta;
    r.counts = decorated_count_recursion(k_max, n, max_degree);

    // conv[j][k] for B, j <= j_max.
    std::vector<std::vector<double>> conv(j_max + 1, std::vector<double>(k_max + 1, 0.0));
    conv[0][0] = 1.0;
    for (int j = 1; j <= j_max; ++j)
        for (int k = j; k <= k_max; ++k) {
            double acc = 0.0;
            for (int last = 1; last <= k - (j - 1); ++last) acc += conv[j - 1][k - last] * b_weight(last);
            conv[j][k] = acc;
        }
    r.b_inequality_worst_ratio = 0.0;
    for (int j = 1; j <= j_max; ++j)
        for (int k = j; k <= k_max; ++k) {
            const double ratio = conv[j][k] / b_weight(k);
            if (ratio > r.b_inequality_worst_ratio) {
                r.b_inequality_worst_ratio = ratio;
                r.b_inequality_worst_k = k;
                r.b_inequality_worst_j = j;
            }
        }
    r.b_inequality_holds = r.b_inequality_worst_ratio <= 1.0;

    double log_c = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= k_max; ++k) {
        long e = 0;
        const double mant = mpz_get_d_2exp(&e, r.counts[k - 1].get_mpz_t());
        const double log_n = std::log(mant) + static_cast<double>(e) * std::log(2.0);
        log_c = std::max(log_c, (log_n - std::log(delta * b_weight(k))) / k);
    }
    // The reported C is rounded up slightly so the inequality holds in floating point.
    r.smallest_c = std::exp(log_c) * (1.0 + 1e-12);
    r.bound_holds = true;
    for (int k = 1; k <= k_max; ++k) {
        long e = 0;
        const double mant = mpz_get_d_2exp(&e, r.counts[k - 1].get_mpz_t());
        const double log_n = std::log(mant) + static_cast<double>(e) * std::log(2.0);
        if (log_n > std::log(delta * b_weight(k)) + k * std::log(r.smallest_c) + 1e-12) r.bound_holds = false;
    }
    return r;
}

}  // namespace resurgence
