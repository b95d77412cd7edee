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

#include "cbsel/predictor.hpp"

#include "cbsel/errors.hpp"
#include "cbsel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace cbsel {

namespace {

Eigen::VectorXd standardize(const PredictorModel &model, const Eigen::Ref<const Eigen::VectorXd> &x)
{
    if (x.size() != model.input_dim())
        throw ShapeError("predictor: feature length " + std::to_string(x.size()) + " does not match input dimension " +
                         std::to_string(model.input_dim()));
    if (model.input_offset.size() == x.size())
        return (x - model.input_offset).cwiseProduct(model.input_scale);
    return x;
}

// Fisher-Yates with the portable generator.
void shuffle(std::vector<int> &order, CounterRng &rng)
{
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(order[i - 1], order[j]);
    }
}

double mean_mse(const PredictorModel &model, const Dataset &data)
{
    if (data.rows() == 0)
        return std::numeric_limits<double>::quiet_NaN();
    return evaluate_mse(model, data).mean();
}

} // namespace

std::vector<int> PredictorModel::layer_widths() const
{
    std::vector<int> widths;
    if (layers.empty())
        return widths;
    widths.push_back(input_dim());
    for (const auto &l : layers)
        widths.push_back(static_cast<int>(l.weight.rows()));
    return widths;
}

std::size_t PredictorModel::parameter_count() const
{
    std::size_t n = 0;
    for (const auto &l : layers)
        n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

int default_hidden_width(int ports_per_pol, int F, int Q) { return std::max(1, (ports_per_pol + F + Q) / 2); }

PredictorModel init_model(int input_dim, int hidden_layers, int outputs, std::uint64_t seed, int hidden_width)
{
    if (input_dim < 1 || outputs < 1 || hidden_layers < 0)
        throw ConfigError("init_model: dimensions must be >= 1");
    const int width = hidden_width > 0 ? hidden_width : std::max(1, input_dim / 2);

    PredictorModel model;
    model.seed = seed;
    model.input_offset = Eigen::VectorXd::Zero(input_dim);
    model.input_scale = Eigen::VectorXd::Ones(input_dim);

    CounterRng rng(derive_seed(seed, "init"));
    int fan_in = input_dim;
    for (int i = 0; i <= hidden_layers; ++i) {
        const bool output = i == hidden_layers;
        const int fan_out = output ? outputs : width;
        const double limit = std::sqrt(6.0 / fan_in);
        DenseLayer layer;
        layer.weight.resize(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c)
                layer.weight(r, c) = rng.uniform(-limit, limit);
        layer.bias = Eigen::VectorXd::Constant(fan_out, output ? 0.5 : 0.0);
        model.layers.push_back(std::move(layer));
        fan_in = fan_out;
    }
    return model;
}

Eigen::VectorXd forward(const PredictorModel &model, const Eigen::Ref<const Eigen::VectorXd> &features)
{
    Eigen::VectorXd h = standardize(model, features);
    for (const auto &layer : model.layers)
        h = (layer.weight * h + layer.bias).cwiseMax(0.0);
    return h;
}

Eigen::MatrixXd predict(const PredictorModel &model, const Eigen::Ref<const Eigen::MatrixXd> &features)
{
    if (features.cols() != model.input_dim())
        throw ShapeError("predict: feature width does not match the model input dimension");
    Eigen::MatrixXd h = features;
    if (model.input_offset.size() == features.cols())
        h = (h.rowwise() - model.input_offset.transpose()).array().rowwise() * model.input_scale.transpose().array();
    for (const auto &layer : model.layers)
        h = ((h * layer.weight.transpose()).rowwise() + layer.bias.transpose()).cwiseMax(0.0);
    return h;
}

Gradients Gradients::zeros_like(const PredictorModel &model)
{
    Gradients g;
    for (const auto &l : model.layers) {
        g.weight.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
        g.bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }
    return g;
}

void Gradients::set_zero()
{
    for (auto &w : weight)
        w.setZero();
    for (auto &b : bias)
        b.setZero();
}

double accumulate_gradient(const PredictorModel &model, const Eigen::Ref<const Eigen::VectorXd> &features,
                           const Eigen::Ref<const Eigen::VectorXd> &label, Gradients &grad)
{
    if (label.size() != model.output_dim())
        throw ShapeError("accumulate_gradient: label length does not match the output dimension");
    const std::size_t n = model.layers.size();
    std::vector<Eigen::VectorXd> inputs(n);
    std::vector<Eigen::VectorXd> pre(n);
    Eigen::VectorXd h = standardize(model, features);
    for (std::size_t i = 0; i < n; ++i) {
        inputs[i] = h;
        pre[i] = model.layers[i].weight * h + model.layers[i].bias;
        h = pre[i].cwiseMax(0.0);
    }
    const double g = static_cast<double>(label.size());
    Eigen::VectorXd upstream = 2.0 * (h - label) / g;
    for (std::size_t i = n; i-- > 0;) {
        const Eigen::VectorXd delta = upstream.cwiseProduct((pre[i].array() > 0.0).cast<double>().matrix());
        grad.weight[i].noalias() += delta * inputs[i].transpose();
        grad.bias[i] += delta;
        if (i > 0)
            upstream = model.layers[i].weight.transpose() * delta;
    }
    return loss(h, label);
}

void Dataset::validate() const
{
    const auto n = static_cast<std::size_t>(features.rows());
    if (static_cast<std::size_t>(labels.rows()) != n || provenance.size() != n || split.size() != n)
        throw ShapeError("dataset: row counts of features, labels, provenance and splits differ");
    if (!feature_names.empty() && feature_names.size() != static_cast<std::size_t>(features.cols()))
        throw ShapeError("dataset: feature name count does not match the feature width");
    if (!codebook_ids.empty() && codebook_ids.size() != static_cast<std::size_t>(labels.cols()))
        throw ShapeError("dataset: codebook id count does not match the label width");
    if (labels.size() > 0 && (labels.minCoeff() < 0.0 || labels.maxCoeff() > 1.0 + 1e-9))
        throw ConfigError("dataset: labels must lie in [0, 1]");
}

Dataset Dataset::filter_rows(const std::function<bool(int)> &keep) const
{
    std::vector<int> idx;
    for (int r = 0; r < rows(); ++r)
        if (keep(r))
            idx.push_back(r);
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(idx.size()), features.cols());
    out.labels.resize(static_cast<Eigen::Index>(idx.size()), labels.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(idx[i]);
        out.labels.row(static_cast<Eigen::Index>(i)) = labels.row(idx[i]);
        out.provenance.push_back(provenance[static_cast<std::size_t>(idx[i])]);
        out.split.push_back(split[static_cast<std::size_t>(idx[i])]);
    }
    out.feature_names = feature_names;
    out.codebook_ids = codebook_ids;
    out.base_feature_count = base_feature_count;
    return out;
}

Dataset Dataset::subset(Split which) const
{
    return filter_rows([&](int r) { return split[static_cast<std::size_t>(r)] == which; });
}

Dataset Dataset::select_features(const std::vector<bool> &mask) const
{
    if (mask.size() != static_cast<std::size_t>(features.cols()))
        throw ShapeError("select_features: mask length does not match the feature width");
    std::vector<Eigen::Index> cols;
    for (std::size_t c = 0; c < mask.size(); ++c)
        if (mask[c])
            cols.push_back(static_cast<Eigen::Index>(c));
    Dataset out = *this;
    out.features = features(Eigen::all, cols);
    out.feature_names.clear();
    if (!feature_names.empty())
        for (auto c : cols)
            out.feature_names.push_back(feature_names[static_cast<std::size_t>(c)]);
    return out;
}

void assign_splits(Dataset &dataset, double train_fraction, double validation_fraction, std::uint64_t seed)
{
    const int n = dataset.rows();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(derive_seed(seed, "split"));
    shuffle(order, rng);
    const int n_train = static_cast<int>(std::llround(train_fraction * n));
    const int n_val = static_cast<int>(std::llround(validation_fraction * n));
    dataset.split.assign(static_cast<std::size_t>(n), Split::test);
    for (int i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(order[static_cast<std::size_t>(i)]);
        if (i < n_train)
            dataset.split[row] = Split::train;
        else if (i < n_train + n_val)
            dataset.split[row] = Split::validation;
    }
}

std::vector<bool> feature_mask_for_groups(const std::vector<std::string> &names, const std::vector<std::string> &groups)
{
    std::vector<bool> mask(names.size(), false);
    for (std::size_t i = 0; i < names.size(); ++i)
        for (const auto &g : groups)
            if (names[i].rfind(g, 0) == 0)
                mask[i] = true;
    return mask;
}

void TrainConfig::validate() const
{
    if (learning_rate < 0.0 || epochs < 1 || batch_size < 1 || hidden_layers < 0 || hidden_width < 0)
        throw ConfigError("train config: learning rate must be >= 0, epochs and batch size >= 1");
    if (train_fraction <= 0.0 || validation_fraction < 0.0 || test_fraction < 0.0 ||
        std::abs(train_fraction + validation_fraction + test_fraction - 1.0) > 1e-9)
        throw ConfigError("train config: split fractions must be non-negative and sum to 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0))
        throw ConfigError("train config: invalid Adam moments");
}

TrainResult train(const Dataset &dataset, const TrainConfig &config)
{
    config.validate();
    dataset.validate();
    const Dataset train_set = dataset.subset(Split::train);
    const Dataset val_set = dataset.subset(Split::validation);
    if (train_set.rows() == 0)
        throw ConfigError("train: the train split is empty");

    const int width = config.hidden_width > 0             ? config.hidden_width
                      : dataset.base_feature_count > 0 ? std::max(1, dataset.base_feature_count / 2)
                                                       : 0;
    PredictorModel model =
        init_model(dataset.feature_count(), config.hidden_layers, dataset.output_count(), config.seed, width);

    if (config.standardize_inputs) {
        model.input_offset = train_set.features.colwise().mean().transpose();
        const Eigen::VectorXd var =
            (train_set.features.rowwise() - model.input_offset.transpose()).colwise().squaredNorm().transpose() /
            static_cast<double>(train_set.rows());
        for (Eigen::Index i = 0; i < var.size(); ++i)
            model.input_scale(i) = var(i) > 1e-24 ? 1.0 / std::sqrt(var(i)) : 1.0;
    }

    Gradients grad = Gradients::zeros_like(model);
    Gradients m1 = Gradients::zeros_like(model);
    Gradients m2 = Gradients::zeros_like(model);
    std::int64_t step = 0;

    auto adam = [&](auto &param, const auto &g, auto &m, auto &v, double scale, double c1, double c2) {
        m = config.beta1 * m + (1.0 - config.beta1) * (g * scale);
        v = config.beta2 * v + (1.0 - config.beta2) * (g * scale).cwiseAbs2();
        param.array() -= config.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + config.epsilon);
    };

    TrainResult result;
    double best = std::numeric_limits<double>::infinity();
    result.model = model;

    std::vector<int> order(static_cast<std::size_t>(train_set.rows()));
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        CounterRng rng(derive_seed(config.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
        shuffle(order, rng);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            grad.set_zero();
            for (std::size_t i = start; i < stop; ++i)
                accumulate_gradient(model, train_set.features.row(order[i]).transpose(),
                                    train_set.labels.row(order[i]).transpose(), grad);
            ++step;
            const double scale = 1.0 / static_cast<double>(stop - start);
            const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                adam(model.layers[l].weight, grad.weight[l], m1.weight[l], m2.weight[l], scale, c1, c2);
                adam(model.layers[l].bias, grad.bias[l], m1.bias[l], m2.bias[l], scale, c1, c2);
            }
        }
        const double train_mse = mean_mse(model, train_set);
        const double val_mse = val_set.rows() > 0 ? mean_mse(model, val_set) : train_mse;
        if (!std::isfinite(train_mse))
            throw NumericalError("train: loss diverged at epoch " + std::to_string(epoch));
        result.train_loss.push_back(train_mse);
        result.validation_loss.push_back(val_mse);
        if (val_mse < best) {
            best = val_mse;
            result.model = model;
            result.best_epoch = epoch;
        }
    }
    return result;
}

GradientCheckResult gradient_check(const PredictorModel &model, const Eigen::Ref<const Eigen::VectorXd> &features,
                                   const Eigen::Ref<const Eigen::VectorXd> &label, const GradientCheckOptions &options)
{
    GradientCheckResult result;

    // Kink detection on the unperturbed model.
    Eigen::VectorXd h = standardize(model, features);
    for (const auto &layer : model.layers) {
        const Eigen::VectorXd z = layer.weight * h + layer.bias;
        if ((z.array().abs() < options.kink_margin).any())
            result.kink_free = false;
        h = z.cwiseMax(0.0);
    }

    Gradients analytic = Gradients::zeros_like(model);
    accumulate_gradient(model, features, label, analytic);
    if (options.corrupt)
        options.corrupt(analytic);

    PredictorModel probe = model;
    auto eval = [&]() { return loss(forward(probe, features), label); };
    auto compare = [&](double &param, double a) {
        const double saved = param;
        param = saved + options.step;
        const double up = eval();
        param = saved - options.step;
        const double down = eval();
        param = saved;
        const double numeric = (up - down) / (2.0 * options.step);
        const double diff = std::abs(a - numeric);
        if (diff == 0.0)
            return;
        const double denom = std::max({std::abs(a), std::abs(numeric), options.relative_floor});
        result.max_relative_error = std::max(result.max_relative_error, diff / denom);
    };

    for (std::size_t l = 0; l < probe.layers.size(); ++l) {
        auto &layer = probe.layers[l];
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
                compare(layer.weight(r, c), analytic.weight[l](r, c));
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
            compare(layer.bias(r), analytic.bias[l](r));
    }
    return result;
}

Eigen::VectorXd evaluate_mse(const PredictorModel &model, const Dataset &data)
{
    if (data.output_count() != model.output_dim())
        throw ShapeError("evaluate_mse: label width does not match the model output");
    if (data.rows() == 0)
        throw ConfigError("evaluate_mse: empty split");
    const Eigen::MatrixXd pred = predict(model, data.features);
    return (pred - data.labels).cwiseAbs2().colwise().mean().transpose();
}

Eigen::VectorXd permutation_importance(const PredictorModel &model, const Dataset &data, int repeats,
                                       std::uint64_t seed)
{
    if (repeats < 1)
        throw ConfigError("permutation_importance: repeats must be >= 1");
    const double baseline = evaluate_mse(model, data).mean();
    const int d = data.feature_count();
    Eigen::VectorXd importance = Eigen::VectorXd::Zero(d);
    Dataset work = data;
    std::vector<int> order(static_cast<std::size_t>(data.rows()));
    for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int r = 0; r < repeats; ++r) {
            std::iota(order.begin(), order.end(), 0);
            CounterRng rng(derive_seed(seed, "permutation", static_cast<std::uint64_t>(j) * 65536u + r));
            shuffle(order, rng);
            for (int i = 0; i < data.rows(); ++i)
                work.features(i, j) = data.features(order[static_cast<std::size_t>(i)], j);
            acc += evaluate_mse(model, work).mean() - baseline;
        }
        work.features.col(j) = data.features.col(j);
        importance(j) = acc / repeats;
    }
    return importance;
}

PruneResult prune_and_retrain(const Dataset &dataset, const Eigen::VectorXd &importance, double keep_fraction,
                              const TrainConfig &config)
{
    const int d = dataset.feature_count();
    if (importance.size() != d)
        throw ShapeError("prune_and_retrain: importance length does not match the feature width");
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
        throw ConfigError("prune_and_retrain: keep_fraction must lie in (0, 1]");

    const int keep = std::clamp(static_cast<int>(std::llround(keep_fraction * d)), 1, d);
    std::vector<int> rank(static_cast<std::size_t>(d));
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) { return importance(a) > importance(b); });

    PruneResult result;
    result.mask.assign(static_cast<std::size_t>(d), false);
    for (int i = 0; i < keep; ++i)
        result.mask[static_cast<std::size_t>(rank[static_cast<std::size_t>(i)])] = true;

    const Dataset pruned = dataset.select_features(result.mask);
    result.training = train(pruned, config);
    result.test_mse = evaluate_mse(result.training.model, pruned.subset(Split::test));
    result.overhead_reduction_pct = 100.0 * (1.0 - keep_fraction);
    return result;
}

} // namespace cbsel
