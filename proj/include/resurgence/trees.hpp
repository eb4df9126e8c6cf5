#pragma once

// Iteration diagrams (rooted trees whose vertices have at most one outgoing
// edge, directed towards the root), their decorations and multiplicities,
// and the simplex Delta_T attached to each tree.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace resurgence {

class IterationTree {
public:
    /// Single-vertex tree.
    IterationTree();
    /// parent[v] is the head of v's outgoing edge; exactly one entry (the root) is -1.
    explicit IterationTree(std::vector<int> parent);

    /// Tree with the given canonical encoding, vertices numbered in preorder.
    static IterationTree parse(const std::string& encoding);
    /// Root joined to the roots of `children`.
    static IterationTree join(const std::vector<IterationTree>& children);

    std::size_t size() const { return parent_.size(); }
    int root() const { return root_; }
    int parent(int v) const { return parent_.at(v); }
    const std::vector<int>& children(int v) const { return children_.at(v); }
    bool is_leaf(int v) const { return children_.at(v).empty(); }
    /// Number of leaves above v.
    int weight(int v) const { return weight_.at(v); }
    std::vector<int> leaves() const;
    /// Vertices of the branch T_v (v first).
    std::vector<int> branch(int v) const;
    /// Vertices ordered so that parents precede children (root first).
    const std::vector<int>& top_down() const { return order_; }
    /// Depth-first path v, parent(v), ..., root.
    std::vector<int> path_to_root(int v) const;
    /// W_v: the root together with the children-sets of every vertex on the
    /// path from parent(v) to the root.
    std::vector<int> dependency_set(int v) const;

    /// Canonical nested-parenthesis encoding; equal iff isomorphic.
    std::string encoding() const { return branch_encoding(root_); }
    std::string branch_encoding(int v) const;

    friend bool operator==(const IterationTree& a, const IterationTree& b) { return a.encoding() == b.encoding(); }

private:
    void build();

    std::vector<int> parent_;
    std::vector<std::vector<int>> children_;
    std::vector<int> weight_;
    std::vector<int> order_;
    int root_ = 0;
};

/// All isomorphism classes of iteration diagrams with k vertices, canonical
/// and sorted by encoding.
std::vector<IterationTree> enumerate_trees(int k);

/// Decoration nu(v) = (nu1, nu2), both 1-based in {1..n}.
using Decoration = std::pair<int, int>;

class DecoratedTree {
public:
    DecoratedTree(IterationTree tree, std::vector<Decoration> nu, int n);

    const IterationTree& tree() const { return tree_; }
    const std::vector<Decoration>& nu() const { return nu_; }
    int colors() const { return n_; }

    /// lambda(v)_j = #{children u of v with nu1(u) = j}, j = 1..n.
    std::vector<int> lambda(int v) const;

    /// Number of ordered realizations of this class produced by the
    /// component-ordered recursion: prod_v prod_j lambda_j(v)! / prod_[u] #[u]!.
    mpz_class multiplicity() const;

    std::string encoding() const { return branch_encoding(tree_.root()); }
    std::string branch_encoding(int v) const;

private:
    IterationTree tree_;
    std::vector<Decoration> nu_;
    int n_;
};

/// All decorated classes with k vertices, n colours and root nu1 = j.
std::vector<DecoratedTree> enumerate_decorated(int k, int n, int j);

/// Point of Delta_T = {s : sum_{u child of v} s_u <= s_v, s_root = 1}, indexed by vertex.
using SimplexPoint = std::vector<double>;

bool in_simplex(const IterationTree& tree, const SimplexPoint& s, double tol = 1e-12);

/// Uniform samples of Delta_T by rejection from the unit cube.
std::vector<SimplexPoint> sample_simplex(const IterationTree& tree, std::size_t count, std::mt19937_64& rng);

struct VolumeCheck {
    double estimate;
    double sigma;
    double exact;  // 1/(k-1)!
    bool within_3_sigma;
};
VolumeCheck simplex_volume_check(const IterationTree& tree, std::size_t samples, std::uint64_t seed);

/// Stick-breaking map from the cube [0,1]^{k-1} onto Delta_T. Coordinates
/// are consumed vertex by vertex in top-down order, one per child.
class SimplexMap {
public:
    explicit SimplexMap(const IterationTree& tree);
    std::size_t dimension() const { return dim_; }
    /// s(x) and the Jacobian determinant ds/dx.
    std::pair<SimplexPoint, double> map(const std::vector<double>& x) const;
    /// Vertex whose coordinate is the i-th cube coordinate's image.
    const std::vector<int>& coordinate_vertices() const { return coord_vertex_; }

private:
    const IterationTree* tree_;
    std::size_t dim_;
    std::vector<int> coord_vertex_;
};

struct CountBoundReport {
    int n = 1;
    int k_max = 0;
    std::vector<mpz_class> counts;     // N_1..N_kmax from the recursion, index k-1
    double b_inequality_worst_ratio = 0.0;  // max over (k, j) of sum_comp prod B / B(k)
    int b_inequality_worst_k = 0;
    int b_inequality_worst_j = 0;
    bool b_inequality_holds = false;
    double delta = 0.0;
    double smallest_c = 0.0;  // smallest C with N_k <= delta B(k) C^k for all k <= k_max
    bool bound_holds = false;
};

/// B(k) = 3 / (2 pi^2 (k+1)^2).
double b_weight(int k);

/// N_k via N_1 = n, N_{k+1} = n sum_{j=1}^{min(k, max_degree)} sum_{|l|=j}
/// sum_{k_1+..+k_j=k} N_{k_1}..N_{k_j}.
std::vector<mpz_class> decorated_count_recursion(int k_max, int n, int max_degree = -1);

CountBoundReport count_bound_check(int k_max, int n, double delta, int j_max = 5, int max_degree = -1);

}  // namespace resurgence
