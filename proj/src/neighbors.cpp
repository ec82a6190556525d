#include "align/neighbors.hpp"

#include <algorithm>
#include <cmath>

#include "align/edit_distance.hpp"
#include "align/pool.hpp"
#include "internal.hpp"

namespace align {

namespace {

void require_pair(const NeighborList& a, const NeighborList& b) {
    if (a.n() != b.n() || a.k() != b.k()) {
        throw ValidationError("neighbor lists disagree on n or k");
    }
}

NeighborList knn_impl(const EmbeddingMatrix& x, std::size_t k, unsigned threads,
                      bool normalize) {
    const std::size_t n = x.n_samples();
    if (n < 2) {
        throw ValidationError("knn requires n_samples >= 2");
    }
    if (k < 1 || k > n - 1) {
        throw ValidationError("knn: k must satisfy 1 <= k <= n-1");
    }

    Eigen::MatrixXd rows(n, x.n_dims());
    if (normalize) {
        const NormalizeResult normed = l2_normalize_rows(x);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < x.n_dims(); ++j) {
                rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    normed.matrix.at(i, j);
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < x.n_dims(); ++j) {
                rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x.at(i, j);
            }
        }
    }

    Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(n, n);
    sim.selfadjointView<Eigen::Lower>().rankUpdate(rows);
    sim.triangularView<Eigen::Upper>() = sim.transpose();

    std::vector<std::uint32_t> flat(n * k);
    detail::parallel_for(n, threads, [&](std::size_t i) {
        std::vector<std::uint32_t> order;
        order.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) order.push_back(static_cast<std::uint32_t>(j));
        }
        const Eigen::Index ei = static_cast<Eigen::Index>(i);
        auto better = [&](std::uint32_t a, std::uint32_t b) {
            const double sa = sim(ei, static_cast<Eigen::Index>(a));
            const double sb = sim(ei, static_cast<Eigen::Index>(b));
            if (sa != sb) return sa > sb;
            return a < b;
        };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                          order.end(), better);
        std::copy(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                  flat.begin() + static_cast<std::ptrdiff_t>(i * k));
    });
    return NeighborList(n, k, std::move(flat));
}

}  // namespace

NeighborList::NeighborList(std::size_t n, std::size_t k, std::vector<std::uint32_t> flat)
    : n_(n), k_(k), flat_(std::move(flat)) {
    if (n_ < 2 || k_ < 1 || k_ > n_ - 1) {
        throw ValidationError("neighbor list requires n >= 2 and 1 <= k <= n-1");
    }
    if (flat_.size() != n_ * k_) {
        throw ValidationError("neighbor list length does not match n * k");
    }
    std::vector<std::uint8_t> seen(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t t = 0; t < k_; ++t) {
            const std::uint32_t j = flat_[i * k_ + t];
            if (j >= n_) throw ValidationError("neighbor index out of range");
            if (j == i) throw ValidationError("neighbor list contains its own sample");
            if (seen[j]) throw ValidationError("neighbor list contains a duplicate");
            seen[j] = 1;
        }
        for (std::size_t t = 0; t < k_; ++t) seen[flat_[i * k_ + t]] = 0;
    }
}

NeighborList knn(const EmbeddingMatrix& x, std::size_t k, unsigned threads) {
    return knn_impl(x, k, threads, true);
}

NeighborList knn_inner_product(const EmbeddingMatrix& x, std::size_t k, unsigned threads) {
    return knn_impl(x, k, threads, false);
}

AlignmentScore mutual_knn(const NeighborList& a, const NeighborList& b) {
    require_pair(a, b);
    const std::size_t n = a.n();
    const std::size_t k = a.k();
    std::vector<std::uint8_t> in_b(n, 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint32_t j : b.list(i)) in_b[j] = 1;
        for (std::uint32_t j : a.list(i)) total += in_b[j];
        for (std::uint32_t j : b.list(i)) in_b[j] = 0;
    }
    const double value = static_cast<double>(total) / (static_cast<double>(n) * static_cast<double>(k));
    return AlignmentScore{Metric::mutual_knn, value, static_cast<int>(k), false};
}

AlignmentScore cycle_knn(const NeighborList& a, const NeighborList& b) {
    require_pair(a, b);
    const std::size_t n = a.n();
    std::size_t returned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool back = false;
        for (std::uint32_t j : b.list(i)) {
            const auto hops = a.list(j);
            if (std::find(hops.begin(), hops.end(), static_cast<std::uint32_t>(i)) !=
                hops.end()) {
                back = true;
                break;
            }
        }
        returned += back ? 1 : 0;
    }
    const double value = static_cast<double>(returned) / static_cast<double>(n);
    return AlignmentScore{Metric::cycle_knn, value, static_cast<int>(a.k()), false};
}

namespace {

std::size_t lcs_length(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    const std::size_t m = b.size();
    std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            cur[j + 1] = (a[i] == b[j]) ? prev[j] + 1 : std::max(prev[j + 1], cur[j]);
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

}  // namespace

AlignmentScore lcs_knn(const NeighborList& a, const NeighborList& b) {
    require_pair(a, b);
    const std::size_t n = a.n();
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total += lcs_length(a.list(i), b.list(i));
    }
    const double value = static_cast<double>(total) / static_cast<double>(n);
    return AlignmentScore{Metric::lcs_knn, value, static_cast<int>(a.k()), false};
}

AlignmentScore edit_knn(const NeighborList& a, const NeighborList& b) {
    require_pair(a, b);
    const std::size_t n = a.n();
    const double k = static_cast<double>(a.k());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t dist = levenshtein(a.list(i), b.list(i));
        total += 1.0 - static_cast<double>(dist) / k;
    }
    return AlignmentScore{Metric::edit_knn, total / static_cast<double>(n),
                          static_cast<int>(a.k()), false};
}

}  // namespace align
