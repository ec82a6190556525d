#include "align/svcca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "internal.hpp"

namespace align {

namespace {

void validate(const SvccaConfig& cfg) {
    if (!(cfg.energy_threshold > 0.0) || cfg.energy_threshold > 1.0) {
        throw ValidationError("svcca: energy_threshold must lie in (0, 1]");
    }
    if (cfg.ridge < 0.0) {
        throw ValidationError("svcca: ridge must be non-negative");
    }
}

// Inverse square root of a symmetric positive definite matrix via
// eigendecomposition. `allow_singular` is false when ridge == 0, in which
// case a non-positive or numerically tiny eigenvalue is an error.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& m, bool ridge_regularized) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition failed during whitening");
    }
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double max_lambda = lambda.maxCoeff();
    const double tol = std::max(1e-300, max_lambda * static_cast<double>(m.rows()) *
                                            std::numeric_limits<double>::epsilon());
    Eigen::VectorXd inv_sqrt(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) <= tol) {
            if (!ridge_regularized) {
                throw NumericalError("singular covariance; set a positive ridge");
            }
            inv_sqrt(i) = 0.0;
        } else {
            inv_sqrt(i) = 1.0 / std::sqrt(lambda(i));
        }
    }
    return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

EmbeddingMatrix svd_reduce(const EmbeddingMatrix& x, const SvccaConfig& cfg) {
    validate(cfg);
    if (x.n_samples() < 2) {
        throw ValidationError("svd_reduce requires n_samples >= 2");
    }
    const Eigen::MatrixXd xc = detail::centered_eigen(x);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(xc, Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    if (sigma_max <= 0.0) {
        throw DegenerateInput("svd_reduce: rank-zero input (all rows equal)");
    }

    const double rank_tol = sigma_max * static_cast<double>(std::max(x.n_samples(), x.n_dims())) *
                            std::numeric_limits<double>::epsilon();
    Eigen::Index numerical_rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > rank_tol) ++numerical_rank;
    }

    double total = 0.0;
    for (Eigen::Index i = 0; i < numerical_rank; ++i) total += sigma(i) * sigma(i);

    Eigen::Index r = numerical_rank;
    double cumulative = 0.0;
    for (Eigen::Index i = 0; i < numerical_rank; ++i) {
        cumulative += sigma(i) * sigma(i);
        if (cumulative >= cfg.energy_threshold * total) {
            r = i + 1;
            break;
        }
    }

    const Eigen::MatrixXd projected = xc * svd.matrixV().leftCols(r);
    std::vector<double> values(x.n_samples() * static_cast<std::size_t>(r));
    for (std::size_t i = 0; i < x.n_samples(); ++i) {
        for (Eigen::Index j = 0; j < r; ++j) {
            values[i * static_cast<std::size_t>(r) + static_cast<std::size_t>(j)] =
                projected(static_cast<Eigen::Index>(i), j);
        }
    }
    return EmbeddingMatrix(x.n_samples(), static_cast<std::size_t>(r), std::move(values),
                           x.modality, x.layer);
}

std::vector<double> cca_correlations(const EmbeddingMatrix& x, const EmbeddingMatrix& y,
                                     const SvccaConfig& cfg) {
    validate(cfg);
    if (x.n_samples() != y.n_samples()) {
        throw ValidationError("cca: sample counts differ");
    }
    if (x.n_samples() < 2) {
        throw ValidationError("cca requires n_samples >= 2");
    }
    const Eigen::MatrixXd xc = detail::centered_eigen(x);
    const Eigen::MatrixXd yc = detail::centered_eigen(y);
    const double scale = 1.0 / static_cast<double>(x.n_samples() - 1);

    Eigen::MatrixXd cxx = (xc.transpose() * xc) * scale;
    Eigen::MatrixXd cyy = (yc.transpose() * yc) * scale;
    const Eigen::MatrixXd cxy = (xc.transpose() * yc) * scale;
    cxx.diagonal().array() += cfg.ridge;
    cyy.diagonal().array() += cfg.ridge;

    const bool regularized = cfg.ridge > 0.0;
    const Eigen::MatrixXd wx = inverse_sqrt(cxx, regularized);
    const Eigen::MatrixXd wy = inverse_sqrt(cyy, regularized);

    const Eigen::MatrixXd t = wx * cxy * wy;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(t);
    const Eigen::VectorXd& sigma = svd.singularValues();

    std::vector<double> rho(static_cast<std::size_t>(sigma.size()));
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        rho[static_cast<std::size_t>(i)] = std::clamp(sigma(i), 0.0, 1.0);
    }
    return rho;
}

AlignmentScore svcca_score(const EmbeddingMatrix& x, const EmbeddingMatrix& y,
                           const SvccaConfig& cfg) {
    const EmbeddingMatrix rx = svd_reduce(x, cfg);
    const EmbeddingMatrix ry = svd_reduce(y, cfg);
    const std::vector<double> rho = cca_correlations(rx, ry, cfg);
    double sum = 0.0;
    for (double r : rho) sum += r;
    const double value = rho.empty() ? 0.0 : sum / static_cast<double>(rho.size());
    return AlignmentScore{Metric::svcca, value, std::nullopt, false};
}

}  // namespace align
