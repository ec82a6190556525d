#pragma once

// Internal helpers shared by the library's .cpp files. Not installed.

#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "align/matrix.hpp"

namespace align::detail {

// Pairwise (cascade) summation; error grows O(log n) instead of O(n).
// Deterministic for a fixed input.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 32) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Static block partition over [0, count); fn(i) must be independent per
// index so results do not depend on the thread count. The first exception
// thrown by any worker is rethrown after the join.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(threads, count));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            const std::size_t lo = count * w / workers;
            const std::size_t hi = count * (w + 1) / workers;
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// Column-centered copy of an embedding matrix (each column minus its mean).
inline Eigen::MatrixXd centered_eigen(const EmbeddingMatrix& m) {
    Eigen::MatrixXd x(m.n_samples(), m.n_dims());
    for (std::size_t i = 0; i < m.n_samples(); ++i) {
        for (std::size_t j = 0; j < m.n_dims(); ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.at(i, j);
        }
    }
    x.rowwise() -= x.colwise().mean();
    return x;
}

}  // namespace align::detail
