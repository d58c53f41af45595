/*
 * Copyright 2026 The epigym Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "epigym/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "epigym/error.hpp"

namespace epigym {

void GPHyperparams::validate() const {
    if (!(signal_variance > 0)) throw Error(ErrorCode::ConfigInvalid, "signal_variance must be positive");
    if (length_scales.empty()) throw Error(ErrorCode::ConfigInvalid, "length_scales must not be empty");
    for (double l : length_scales) {
        if (!(l > 0)) throw Error(ErrorCode::ConfigInvalid, "length scales must be positive");
    }
    if (!(noise_variance >= 0)) throw Error(ErrorCode::ConfigInvalid, "noise_variance must be nonnegative");
}

double kernel(std::span<const double> x1, std::span<const double> x2, const GPHyperparams& hyper) {
    if (x1.size() != x2.size()) throw Error(ErrorCode::DimMismatch, "kernel inputs differ in dimension");
    if (hyper.length_scales.size() != 1 && hyper.length_scales.size() != x1.size())
        throw Error(ErrorCode::DimMismatch, "length_scales do not match input dimension");
    double q = 0.0;
    for (std::size_t j = 0; j < x1.size(); ++j) {
        const double z = (x1[j] - x2[j]) / hyper.length_scale(j);
        q += z * z;
    }
    return hyper.signal_variance * std::exp(-0.5 * q);
}

namespace {

std::span<const double> row_span(const Eigen::MatrixXd& m, Eigen::Index r, std::vector<double>& scratch) {
    scratch.resize(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) scratch[static_cast<std::size_t>(c)] = m(r, c);
    return scratch;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, const GPHyperparams& hyper) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd k(n, n);
    std::vector<double> a, b;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto xi = row_span(x, i, a);
        for (Eigen::Index j = 0; j <= i; ++j) {
            k(i, j) = k(j, i) = kernel(xi, row_span(x, j, b), hyper);
        }
    }
    return k;
}

}  // namespace

GPPosterior gp_fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, const GPHyperparams& hyper) {
    hyper.validate();
    const Eigen::Index n = inputs.rows();
    if (n < 1) throw Error(ErrorCode::DimMismatch, "gp_fit needs at least one observation");
    if (targets.size() != n) throw Error(ErrorCode::DimMismatch, "inputs and targets differ in length");
    if (hyper.length_scales.size() != 1 && static_cast<Eigen::Index>(hyper.length_scales.size()) != inputs.cols())
        throw Error(ErrorCode::DimMismatch, "length_scales do not match input dimension");

    GPPosterior post;
    post.inputs = inputs;
    post.hyper = hyper;
    post.target_mean = targets.mean();
    double scale = 1.0;
    if (n > 1) {
        const double var = (targets.array() - post.target_mean).square().mean();
        if (var > 0) scale = std::sqrt(var);
    }
    post.target_scale = scale;
    post.targets = (targets.array() - post.target_mean) / scale;

    const Eigen::MatrixXd k = kernel_matrix(inputs, hyper);
    double noise = std::max(hyper.noise_variance, 1e-9 * hyper.signal_variance);
    for (int attempt = 0; attempt < 2; ++attempt, noise *= 10.0) {
        Eigen::MatrixXd a = k;
        a.diagonal().array() += noise;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) {
            post.cholesky = llt.matrixL();
            post.alpha = llt.solve(post.targets);
            post.noise_used = noise;
            return post;
        }
    }
    throw Error(ErrorCode::NotPositiveDefinite, "kernel matrix is not positive definite after jitter escalation");
}

GPPrediction gp_predict(const GPPosterior& post, std::span<const double> x) {
    if (x.size() != post.dims()) throw Error(ErrorCode::DimMismatch, "query dimension does not match the posterior");
    const Eigen::Index n = post.inputs.rows();
    Eigen::VectorXd kstar(n);
    std::vector<double> scratch;
    for (Eigen::Index i = 0; i < n; ++i) kstar(i) = kernel(x, row_span(post.inputs, i, scratch), post.hyper);

    const double mean_std = kstar.dot(post.alpha);
    const Eigen::VectorXd v = post.cholesky.triangularView<Eigen::Lower>().solve(kstar);
    double var_std = post.hyper.signal_variance - v.squaredNorm();
    if (var_std < 0) var_std = 0;  // rounding at or near training points

    return {post.target_mean + post.target_scale * mean_std, var_std * post.target_scale * post.target_scale};
}

double ucb_score(double mean, double variance, double ucb_beta) { return mean + std::sqrt(ucb_beta * variance); }

double ucb_acquisition(const GPPosterior& post, std::span<const double> x, double ucb_beta) {
    const auto p = gp_predict(post, x);
    return ucb_score(p.mean, p.variance, ucb_beta);
}

double log_marginal_likelihood(const GPPosterior& post) {
    const double n = static_cast<double>(post.targets.size());
    const double log_det_half = post.cholesky.diagonal().array().log().sum();
    return -0.5 * post.targets.dot(post.alpha) - log_det_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

GPHyperparams fit_hyperparams(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                              const std::vector<GPHyperparams>& grid) {
    if (grid.empty()) throw Error(ErrorCode::ConfigInvalid, "hyperparameter grid is empty");
    if (inputs.rows() < 2) throw Error(ErrorCode::DimMismatch, "fit_hyperparams needs at least two observations");
    const GPHyperparams* best = nullptr;
    double best_lml = -std::numeric_limits<double>::infinity();
    for (const auto& h : grid) {
        try {
            const double lml = log_marginal_likelihood(gp_fit(inputs, targets, h));
            if (best == nullptr || lml > best_lml) {
                best = &h;
                best_lml = lml;
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotPositiveDefinite) throw;
        }
    }
    if (best == nullptr) throw Error(ErrorCode::NotPositiveDefinite, "every hyperparameter grid point failed");
    return *best;
}

std::vector<GPHyperparams> default_hyper_grid() {
    std::vector<GPHyperparams> grid;
    for (double l : {0.05, 0.1, 0.2, 0.5, 1.0}) {
        for (double noise : {1e-6, 1e-4, 1e-2}) grid.push_back({1.0, {l}, noise});
    }
    return grid;
}

}  // namespace epigym
