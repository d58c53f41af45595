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
#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace epigym {

struct GPHyperparams {
    double signal_variance = 1.0;
    // One entry per input dimension, or a single entry shared by all.
    std::vector<double> length_scales{0.2};
    double noise_variance = 1e-6;

    double length_scale(std::size_t dim) const { return length_scales.size() == 1 ? length_scales[0] : length_scales[dim]; }
    void validate() const;
};

/// Squared exponential: sf2 * exp(-0.5 * sum_j ((x1_j - x2_j) / l_j)^2).
double kernel(std::span<const double> x1, std::span<const double> x2, const GPHyperparams& hyper);

/// Exact GP regression state on standardized targets.
struct GPPosterior {
    Eigen::MatrixXd inputs;       // n x d
    Eigen::VectorXd targets;      // standardized
    Eigen::MatrixXd cholesky;     // lower factor of K + noise I
    Eigen::VectorXd alpha;        // (K + noise I)^-1 targets
    GPHyperparams hyper;
    double noise_used = 0.0;      // noise after the jitter floor and any escalation
    double target_mean = 0.0;
    double target_scale = 1.0;

    std::size_t dims() const { return static_cast<std::size_t>(inputs.cols()); }
};

// Throws NotPositiveDefinite if the factorization still fails after raising the noise tenfold once.
GPPosterior gp_fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, const GPHyperparams& hyper);

struct GPPrediction {
    double mean = 0.0;
    double variance = 0.0;  // latent function variance in target units squared
};

GPPrediction gp_predict(const GPPosterior& post, std::span<const double> x);

double ucb_score(double mean, double variance, double ucb_beta);
double ucb_acquisition(const GPPosterior& post, std::span<const double> x, double ucb_beta);

// Log marginal likelihood of the standardized targets.
double log_marginal_likelihood(const GPPosterior& post);

/// Grid point with the largest log marginal likelihood, earliest on ties.
/// Points whose factorization fails are skipped.
GPHyperparams fit_hyperparams(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                              const std::vector<GPHyperparams>& grid);

// Length scales {0.05, 0.1, 0.2, 0.5, 1.0} x noise {1e-6, 1e-4, 1e-2}, unit signal variance.
std::vector<GPHyperparams> default_hyper_grid();

}  // namespace epigym
