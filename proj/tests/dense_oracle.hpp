#pragma once

// Reference GP computations through an explicit matrix inverse and an LU
// determinant, written independently of the Cholesky path under test.

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "epigym/gp.hpp"

namespace epigym::testing {

inline double oracle_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sf2, const std::vector<double>& ell) {
    double q = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double l = ell.size() == 1 ? ell[0] : ell[static_cast<std::size_t>(j)];
        q += (a(j) - b(j)) * (a(j) - b(j)) / (l * l);
    }
    return sf2 * std::exp(-0.5 * q);
}

struct DenseOracle {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;  // standardized
    Eigen::MatrixXd k_inv;
    double log_det = 0.0;
    double sf2 = 1.0;
    std::vector<double> ell;
    double mean0 = 0.0;
    double scale = 1.0;

    DenseOracle(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, const GPHyperparams& hyper, double noise)
        : x(inputs), sf2(hyper.signal_variance), ell(hyper.length_scales) {
        const auto n = inputs.rows();
        mean0 = targets.mean();
        double var = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) var += (targets(i) - mean0) * (targets(i) - mean0);
        var /= static_cast<double>(n);
        scale = (n > 1 && var > 0.0) ? std::sqrt(var) : 1.0;
        y = (targets.array() - mean0) / scale;
        Eigen::MatrixXd k(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                k(i, j) = oracle_kernel(inputs.row(i).transpose(), inputs.row(j).transpose(), sf2, ell) + (i == j ? noise : 0.0);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
        k_inv = lu.inverse();
        log_det = 0.0;
        const Eigen::MatrixXd u = lu.matrixLU().triangularView<Eigen::Upper>();
        for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(std::abs(u(i, i)));
    }

    GPPrediction predict(const Eigen::VectorXd& q) const {
        Eigen::VectorXd ks(x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i) ks(i) = oracle_kernel(x.row(i).transpose(), q, sf2, ell);
        const double mu = ks.dot(k_inv * y);
        const double v = sf2 - ks.dot(k_inv * ks);
        return {mean0 + scale * mu, std::max(0.0, v) * scale * scale};
    }

    double log_marginal_likelihood() const {
        const double n = static_cast<double>(y.size());
        return -0.5 * y.dot(k_inv * y) - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
    }
};

inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-12) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), abs_floor});
}

struct RandomDataset {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    GPHyperparams hyper;
};

// Well-conditioned random regression problem: n <= 30, d <= 5.
inline RandomDataset random_dataset(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_dist(1, 30), d_dist(1, 5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = n_dist(rng), d = d_dist(rng);
    RandomDataset ds;
    ds.x.resize(n, d);
    ds.y.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) ds.x(i, j) = u(rng);
        ds.y(i) = std::sin(6.0 * ds.x(i, 0)) + 10.0 * u(rng) - 3.0;
    }
    ds.hyper.signal_variance = 0.5 + u(rng);
    ds.hyper.length_scales.assign(static_cast<std::size_t>(d), 0.0);
    for (auto& l : ds.hyper.length_scales) l = 0.1 + 0.4 * u(rng);
    ds.hyper.noise_variance = std::pow(10.0, -4.0 + 3.0 * u(rng));
    return ds;
}

}  // namespace epigym::testing
