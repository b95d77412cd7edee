// SPDX-License-Identifier: Apache-2.0
//
// cbsel: UE-assisted adaptive codebook selection laboratory
// Copyright (C) 2026 The cbsel authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CBSEL_PREDICTOR_HPP
#define CBSEL_PREDICTOR_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cbsel {

struct DenseLayer
{
    Eigen::MatrixXd weight; // (out x in)
    Eigen::VectorXd bias;
};

/// Fully-connected regressor: inputs are standardized as (x - offset) * scale,
/// then every layer (hidden and output) applies an affine map and a rectifier.
struct PredictorModel
{
    std::vector<DenseLayer> layers;
    Eigen::VectorXd input_offset;
    Eigen::VectorXd input_scale;
    std::uint64_t seed = 0;

    int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols()); }
    int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows()); }
    std::vector<int> layer_widths() const;
    std::size_t parameter_count() const;
};

/// Hidden width floor((n1*n2 + F + Q) / 2).
int default_hidden_width(int ports_per_pol, int F, int Q);

/// He-uniform weights U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero hidden biases,
/// output biases 0.5. `hidden_width` 0 means max(1, input_dim / 2).
PredictorModel init_model(int input_dim, int hidden_layers, int outputs, std::uint64_t seed, int hidden_width = 0);

Eigen::VectorXd forward(const PredictorModel &model, const Eigen::Ref<const Eigen::VectorXd> &features);

/// Row-wise forward: (rows x input_dim) -> (rows x G).
Eigen::MatrixXd predict(const PredictorModel &model, const Eigen::Ref<const Eigen::MatrixXd> &features);

/// Squared distance averaged over the outputs.
template <typename D1, typename D2>
double loss(const Eigen::MatrixBase<D1> &pred, const Eigen::MatrixBase<D2> &label)
{
    return (pred - label).squaredNorm() / static_cast<double>(pred.size());
}

struct Gradients
{
    std::vector<Eigen::MatrixXd> weight;
    std::vector<Eigen::VectorXd> bias;

    static Gradients zeros_like(const PredictorModel &model);
    void set_zero();
};

/// Adds d(loss)/d(theta) for one sample to `grad` and returns the loss.
double accumulate_gradient(const PredictorModel &model, const Eigen::Ref<const Eigen::VectorXd> &features,
                           const Eigen::Ref<const Eigen::VectorXd> &label, Gradients &grad);

enum class Split : std::uint8_t { train, validation, test };

struct Provenance
{
    int scenario_id = 0;
    std::uint64_t seed = 0;
    int delta = 0;
};

struct Dataset
{
    Eigen::MatrixXd features; // rows x d
    Eigen::MatrixXd labels;   // rows x G
    std::vector<Provenance> provenance;
    std::vector<Split> split;
    std::vector<std::string> feature_names;
    std::vector<int> codebook_ids;
    int base_feature_count = 0; // n1*n2 + F + Q of the generating report

    int rows() const { return static_cast<int>(features.rows()); }
    int feature_count() const { return static_cast<int>(features.cols()); }
    int output_count() const { return static_cast<int>(labels.cols()); }

    void validate() const;
    Dataset subset(Split which) const;
    Dataset filter_rows(const std::function<bool(int)> &keep) const;
    Dataset select_features(const std::vector<bool> &mask) const;
};

/// Seeded split assignment: a shuffled row order is cut at the given fractions.
void assign_splits(Dataset &dataset, double train_fraction, double validation_fraction, std::uint64_t seed);

/// Mask over dataset columns keeping names that start with any of the prefixes.
std::vector<bool> feature_mask_for_groups(const std::vector<std::string> &names, const std::vector<std::string> &groups);

struct TrainConfig
{
    double learning_rate = 1e-3;
    int epochs = 300;
    int batch_size = 32;
    double train_fraction = 0.70;
    double validation_fraction = 0.15;
    double test_fraction = 0.15;
    std::uint64_t seed = 1;
    int hidden_layers = 2;
    int hidden_width = 0; // 0: from the dataset's base feature count
    bool standardize_inputs = true;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

struct TrainResult
{
    PredictorModel model; // best-validation checkpoint
    std::vector<double> train_loss;
    std::vector<double> validation_loss;
    int best_epoch = 0;
};

/// Mini-batch Adam on the mean squared error over the dataset's train split.
/// Deterministic in (dataset, config).
TrainResult train(const Dataset &dataset, const TrainConfig &config);

struct GradientCheckOptions
{
    double step = 1e-5;
    double kink_margin = 1e-3;
    double relative_floor = 1e-6;
    std::function<void(Gradients &)> corrupt; // test hook, applied to the analytic gradient
};

struct GradientCheckResult
{
    double max_relative_error = 0.0;
    bool kink_free = true; // no pre-activation within kink_margin of zero
};

/// Analytic gradient vs central differences; per-parameter error
/// |a - n| / max(|a|, |n|, relative_floor).
GradientCheckResult gradient_check(const PredictorModel &model, const Eigen::Ref<const Eigen::VectorXd> &features,
                                   const Eigen::Ref<const Eigen::VectorXd> &label,
                                   const GradientCheckOptions &options = {});

/// Per-output MSE over all rows of `data`.
Eigen::VectorXd evaluate_mse(const PredictorModel &model, const Dataset &data);

/// Mean MSE increase when one feature column is permuted across rows, averaged over repeats.
Eigen::VectorXd permutation_importance(const PredictorModel &model, const Dataset &data, int repeats,
                                       std::uint64_t seed);

struct PruneResult
{
    std::vector<bool> mask;
    TrainResult training;
    Eigen::VectorXd test_mse;
    double overhead_reduction_pct = 0.0;
};

/// Keeps the round(keep_fraction * d) (at least one) most important features,
/// retrains from scratch and reports per-output test MSE.
PruneResult prune_and_retrain(const Dataset &dataset, const Eigen::VectorXd &importance, double keep_fraction,
                              const TrainConfig &config);

// Checkpoints --------------------------------------------------------------

inline constexpr char checkpoint_magic[8] = {'C', 'B', 'S', 'E', 'L', 'N', 'N', '\0'};
inline constexpr std::uint32_t checkpoint_version = 1;

/// Little-endian layout: magic[8], u32 version, u32 metadata length, metadata bytes,
/// u64 seed, u32 width count, u32 widths[], f64 input_offset[in], f64 input_scale[in],
/// then per layer f64 weight (row-major, out x in) and f64 bias[out].
void save_checkpoint(std::ostream &out, const PredictorModel &model, const std::string &metadata);

struct Checkpoint
{
    PredictorModel model;
    std::string metadata;
};

Checkpoint load_checkpoint(std::istream &in);

} // namespace cbsel

#endif
