#pragma once

// Independent reference implementations used as oracles. These deliberately
// share no code with the library: neighbor construction scans for maxima
// instead of partial-sorting, sequence scores use memoized recursion instead
// of iterative DP, and sums are plain left-to-right accumulation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "align/kernel.hpp"
#include "align/matrix.hpp"
#include "align/neighbors.hpp"

namespace oracle {

// Full-pairwise cosine kNN by repeated max scans.
inline std::vector<std::vector<std::uint32_t>> naive_knn(const align::EmbeddingMatrix& x,
                                                         std::size_t k) {
    const std::size_t n = x.n_samples();
    const std::size_t d = x.n_dims();

    std::vector<std::vector<double>> unit(n, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) sq += x.at(i, j) * x.at(i, j);
        if (sq > 0.0) {
            const double inv = 1.0 / std::sqrt(sq);
            for (std::size_t j = 0; j < d; ++j) unit[i][j] = x.at(i, j) * inv;
        }
    }

    std::vector<std::vector<std::uint32_t>> lists(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> sim(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t t = 0; t < d; ++t) sim[j] += unit[i][t] * unit[j][t];
        }
        std::vector<bool> taken(n, false);
        for (std::size_t pick = 0; pick < k; ++pick) {
            std::size_t best = n;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || taken[j]) continue;
                if (best == n || sim[j] > sim[best]) best = j;
            }
            taken[best] = true;
            lists[i].push_back(static_cast<std::uint32_t>(best));
        }
    }
    return lists;
}

inline double brute_mutual_knn(const align::NeighborList& a, const align::NeighborList& b) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        for (std::uint32_t x : a.list(i)) {
            for (std::uint32_t y : b.list(i)) {
                if (x == y) {
                    ++total;
                    break;
                }
            }
        }
    }
    return static_cast<double>(total) / (static_cast<double>(a.n()) * static_cast<double>(a.k()));
}

inline double brute_cycle_knn(const align::NeighborList& a, const align::NeighborList& b) {
    std::size_t returned = 0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        bool back = false;
        for (std::uint32_t j : b.list(i)) {
            for (std::uint32_t t : a.list(j)) {
                if (t == static_cast<std::uint32_t>(i)) back = true;
            }
        }
        if (back) ++returned;
    }
    return static_cast<double>(returned) / static_cast<double>(a.n());
}

namespace detail {

inline std::size_t lcs_rec(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                           std::size_t i, std::size_t j,
                           std::map<std::pair<std::size_t, std::size_t>, std::size_t>& memo) {
    if (i == a.size() || j == b.size()) return 0;
    const auto key = std::make_pair(i, j);
    const auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::size_t best;
    if (a[i] == b[j]) {
        best = 1 + lcs_rec(a, b, i + 1, j + 1, memo);
    } else {
        best = std::max(lcs_rec(a, b, i + 1, j, memo), lcs_rec(a, b, i, j + 1, memo));
    }
    memo.emplace(key, best);
    return best;
}

inline std::size_t lev_rec(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                           std::size_t i, std::size_t j,
                           std::map<std::pair<std::size_t, std::size_t>, std::size_t>& memo) {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    const auto key = std::make_pair(i, j);
    const auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::size_t best = lev_rec(a, b, i + 1, j + 1, memo) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, lev_rec(a, b, i + 1, j, memo) + 1);
    best = std::min(best, lev_rec(a, b, i, j + 1, memo) + 1);
    memo.emplace(key, best);
    return best;
}

}  // namespace detail

inline double brute_lcs_knn(const align::NeighborList& a, const align::NeighborList& b) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
        total += detail::lcs_rec(a.list(i), b.list(i), 0, 0, memo);
    }
    return static_cast<double>(total) / static_cast<double>(a.n());
}

inline double brute_edit_knn(const align::NeighborList& a, const align::NeighborList& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
        const std::size_t dist = detail::lev_rec(a.list(i), b.list(i), 0, 0, memo);
        total += 1.0 - static_cast<double>(dist) / static_cast<double>(a.k());
    }
    return total / static_cast<double>(a.n());
}

// Plain exponential recursion, usable for sequences up to length ~8.
template <typename Seq>
std::size_t naive_levenshtein(const Seq& a, const Seq& b, std::size_t i = 0, std::size_t j = 0) {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    const std::size_t sub = naive_levenshtein(a, b, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    const std::size_t del = naive_levenshtein(a, b, i + 1, j) + 1;
    const std::size_t ins = naive_levenshtein(a, b, i, j + 1) + 1;
    return std::min({sub, del, ins});
}

// |Pearson correlation| of two equal-length vectors.
inline double abs_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return std::abs(sxy) / std::sqrt(sxx * syy);
}

// Exhaustive off-diagonal cosine similarity of two centered kernels; the
// k = n-1 limit of cknna.
inline double offdiag_kernel_cosine(const align::KernelMatrix& k, const align::KernelMatrix& l) {
    double num = 0.0, dk = 0.0, dl = 0.0;
    for (std::size_t i = 0; i < k.n; ++i) {
        for (std::size_t j = 0; j < k.n; ++j) {
            if (i == j) continue;
            num += k.at(i, j) * l.at(i, j);
            dk += k.at(i, j) * k.at(i, j);
            dl += l.at(i, j) * l.at(i, j);
        }
    }
    return num / std::sqrt(dk * dl);
}

}  // namespace oracle
