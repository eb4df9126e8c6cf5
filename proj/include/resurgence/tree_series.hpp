#pragma once

// Iterated convolution psi_v = phi_v . (f_v * prod* psi_u) on truncated
// Taylor series, evaluated from the leaves to the root.

#include <vector>

#include "resurgence/series.hpp"
#include "resurgence/trees.hpp"

namespace resurgence {

/// `f` and `phi` are indexed by vertex and must share one truncation order.
/// The empty convolution product is the unit delta, so leaves give phi_v f_v.
template <class S>
GermSeries<S> iterated_convolution_series(const IterationTree& tree, const std::vector<GermSeries<S>>& f,
                                          const std::vector<GermSeries<S>>& phi) {
    const std::size_t k = tree.size();
    if (f.size() != k || phi.size() != k) throw std::invalid_argument("iterated_convolution_series: one germ per vertex");
    const int order = f.front().order();
    for (std::size_t v = 0; v < k; ++v)
        if (f[v].order() != order || phi[v].order() != order)
            throw TruncationError("iterated_convolution_series: all germs must share one truncation order");

    std::vector<GermSeries<S>> psi(k);
    const auto& order_td = tree.top_down();
    for (auto it = order_td.rbegin(); it != order_td.rend(); ++it) {
        const int v = *it;
        GermSeries<S> acc = f[v];
        for (int u : tree.children(v)) acc = convolve(acc, psi[u]).truncated(order);
        psi[v] = cauchy_product(phi[v], acc);
    }
    return psi[tree.root()];
}

}  // namespace resurgence
