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

#include "cbsel/errors.hpp"
#include "cbsel/predictor.hpp"
#include "cbsel/rng.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace cbsel;

namespace {

// labels = clip(A x + b, 0, 1) with uniform features; optional extra columns.
// A positive `lead` gives every output the coefficient `lead` on feature 0 and weak
// coefficients elsewhere.
Dataset linear_task(int rows, int dim, int outputs, std::uint64_t seed, bool constant_column = false,
                    bool noise_column = false, double lead = 0.0)
{
    CounterRng rng(seed);
    Eigen::MatrixXd a(outputs, dim);
    const double spread = lead > 0.0 ? 0.05 : 0.3 / std::sqrt(static_cast<double>(dim));
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a.data()[i] = rng.uniform(-spread, spread);
    if (lead > 0.0)
        a.col(0).setConstant(lead);
    const int extra = (constant_column ? 1 : 0) + (noise_column ? 1 : 0);
    Dataset d;
    d.features.resize(rows, dim + extra);
    d.labels.resize(rows, outputs);
    for (int r = 0; r < rows; ++r) {
        Eigen::VectorXd x(dim);
        for (int c = 0; c < dim; ++c)
            x(c) = rng.uniform(-1.0, 1.0);
        d.features.row(r).head(dim) = x.transpose();
        int c = dim;
        if (constant_column)
            d.features(r, c++) = 0.25;
        if (noise_column)
            d.features(r, c++) = rng.uniform(-1.0, 1.0);
        d.labels.row(r) = (a * x).array().transpose() + 0.5;
        d.labels.row(r) = d.labels.row(r).cwiseMax(0.0).cwiseMin(1.0);
        d.provenance.push_back({0, static_cast<std::uint64_t>(r), 0});
    }
    d.split.assign(static_cast<std::size_t>(rows), Split::train);
    for (int c = 0; c < d.feature_count(); ++c)
        d.feature_names.push_back("x" + std::to_string(c));
    assign_splits(d, 0.7, 0.15, seed + 1);
    return d;
}

Eigen::VectorXd reference_forward(const PredictorModel &m, const Eigen::VectorXd &x)
{
    Eigen::VectorXd h(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        h(i) = (x(i) - m.input_offset(i)) * m.input_scale(i);
    for (const auto &layer : m.layers) {
        Eigen::VectorXd next(layer.weight.rows());
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
            double s = layer.bias(r);
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
                s += layer.weight(r, c) * h(c);
            next(r) = s > 0.0 ? s : 0.0;
        }
        h = next;
    }
    return h;
}

} // namespace

TEST_CASE("default hidden width and layer widths", "[predictor]")
{
    CHECK(default_hidden_width(8, 8, 4) == 10);
    const auto m = init_model(20, 2, 5, 7, default_hidden_width(8, 8, 4));
    CHECK(m.layer_widths() == std::vector<int>{20, 10, 10, 5});
    CHECK(init_model(20, 2, 5, 7).layer_widths() == std::vector<int>{20, 10, 10, 5});
    CHECK(m.parameter_count() == static_cast<std::size_t>(20 * 10 + 10 + 10 * 10 + 10 + 10 * 5 + 5));
    CHECK_THROWS_AS(init_model(0, 2, 5, 1), ConfigError);
    CHECK_THROWS_AS(init_model(3, 2, 0, 1), ConfigError);
}

TEST_CASE("initialization is fan-in scaled uniform and deterministic", "[predictor]")
{
    const auto a = init_model(20, 2, 5, 99);
    const auto b = init_model(20, 2, 5, 99);
    const auto c = init_model(20, 2, 5, 100);
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(a.layers[l].weight.cols()));
        CHECK(a.layers[l].weight.cwiseAbs().maxCoeff() <= limit);
        CHECK(a.layers[l].weight == b.layers[l].weight);
        CHECK(a.layers[l].bias == b.layers[l].bias);
    }
    CHECK(a.layers[0].weight != c.layers[0].weight);
    CHECK(a.layers[0].bias.isZero());
    CHECK(a.layers[1].bias.isZero());
    CHECK(a.layers[2].bias.isApprox(Eigen::VectorXd::Constant(5, 0.5)));
}

TEST_CASE("zero biases map the zero input to the zero vector", "[predictor]")
{
    auto m = init_model(20, 2, 5, 3);
    for (auto &l : m.layers)
        l.bias.setZero();
    CHECK(forward(m, Eigen::VectorXd::Zero(20)).isZero(0.0));
}

TEST_CASE("forward pass", "[predictor]")
{
    PredictorModel id;
    id.layers.push_back({Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1)});
    id.layers.push_back({Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1)});
    id.input_offset = Eigen::VectorXd::Zero(1);
    id.input_scale = Eigen::VectorXd::Ones(1);
    CHECK(forward(id, Eigen::VectorXd::Constant(1, 0.7))(0) == Catch::Approx(0.7).margin(1e-15));

    auto m = init_model(6, 2, 4, 11, 5);
    m.input_offset = Eigen::VectorXd::LinSpaced(6, -0.2, 0.3);
    m.input_scale = Eigen::VectorXd::LinSpaced(6, 0.5, 2.0);
    CounterRng rng(5);
    Eigen::MatrixXd batch(50, 6);
    for (Eigen::Index i = 0; i < batch.size(); ++i)
        batch.data()[i] = rng.uniform(-3.0, 3.0);
    const Eigen::MatrixXd all = predict(m, batch);
    for (int r = 0; r < 50; ++r) {
        const Eigen::VectorXd out = forward(m, batch.row(r).transpose());
        CHECK((out.array() >= 0.0).all());
        CHECK((out - reference_forward(m, batch.row(r).transpose())).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((all.row(r).transpose() - out).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK_THROWS_AS(forward(m, Eigen::VectorXd::Zero(5)), ShapeError);
    CHECK_THROWS_AS(predict(m, Eigen::MatrixXd::Zero(2, 5)), ShapeError);
}

TEST_CASE("loss is the output-averaged squared distance", "[predictor]")
{
    const Eigen::Vector2d p(1.0, 0.0), y(0.0, 1.0);
    CHECK(loss(p, p) == 0.0);
    CHECK(loss(p, y) == Catch::Approx(1.0));
    CounterRng rng(8);
    Eigen::VectorXd a(7), b(7);
    for (int i = 0; i < 7; ++i) {
        a(i) = rng.uniform();
        b(i) = rng.uniform();
    }
    double s = 0.0;
    for (int i = 0; i < 7; ++i)
        s += (a(i) - b(i)) * (a(i) - b(i));
    CHECK(loss(a, b) == Catch::Approx(s / 7.0).epsilon(1e-14));
}

TEST_CASE("gradient check", "[predictor]")
{
    auto m = init_model(6, 2, 3, 21, 5);
    CounterRng rng(4);
    int checked = 0;
    for (int trial = 0; trial < 40 && checked < 10; ++trial) {
        Eigen::VectorXd x(6), y(3);
        for (int i = 0; i < 6; ++i)
            x(i) = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < 3; ++i)
            y(i) = rng.uniform();
        const auto r = gradient_check(m, x, y);
        if (!r.kink_free)
            continue;
        ++checked;
        CHECK(r.max_relative_error <= 1e-4);
    }
    CHECK(checked >= 5);

    SECTION("all units dead gives zero error")
    {
        auto dead = m;
        for (auto &l : dead.layers) {
            l.weight.setZero();
            l.bias.setConstant(-1.0);
        }
        Eigen::VectorXd x = Eigen::VectorXd::Constant(6, 0.3);
        Gradients g = Gradients::zeros_like(dead);
        accumulate_gradient(dead, x, Eigen::VectorXd::Constant(3, 0.5), g);
        for (const auto &w : g.weight)
            CHECK(w.isZero(0.0));
        const auto r = gradient_check(dead, x, Eigen::VectorXd::Constant(3, 0.5));
        CHECK(r.max_relative_error == 0.0);
    }

    SECTION("a corrupted gradient is detected")
    {
        Eigen::VectorXd x(6), y(3);
        GradientCheckResult clean;
        for (int trial = 0; trial < 40; ++trial) {
            for (int i = 0; i < 6; ++i)
                x(i) = rng.uniform(-1.0, 1.0);
            y = Eigen::VectorXd::Zero(3);
            clean = gradient_check(m, x, y);
            Gradients g = Gradients::zeros_like(m);
            accumulate_gradient(m, x, y, g);
            if (clean.kink_free && g.weight.back().cwiseAbs().maxCoeff() > 1e-3)
                break;
        }
        REQUIRE(clean.kink_free);
        Gradients g = Gradients::zeros_like(m);
        accumulate_gradient(m, x, y, g);
        Eigen::Index r = 0, c = 0;
        g.weight.back().cwiseAbs().maxCoeff(&r, &c);
        GradientCheckOptions opt;
        opt.corrupt = [&](Gradients &grad) { grad.weight.back()(r, c) = -grad.weight.back()(r, c); };
        CHECK(gradient_check(m, x, y, opt).max_relative_error > 0.5);
    }
}

TEST_CASE("training", "[predictor]")
{
    TrainConfig cfg;
    cfg.epochs = 200;

    SECTION("constant labels are fitted at desk size")
    {
        Dataset d = linear_task(2000, 20, 5, 31);
        d.labels.setConstant(0.37);
        const auto r = train(d, cfg);
        CHECK(r.train_loss.size() == 200u);
        CHECK(r.validation_loss.size() == 200u);
        CHECK(r.train_loss.back() <= 1e-4);
    }

    SECTION("learning rate zero leaves the loss constant")
    {
        cfg.learning_rate = 0.0;
        cfg.epochs = 10;
        const auto r = train(linear_task(120, 3, 2, 32), cfg);
        for (double v : r.train_loss)
            CHECK(v == r.train_loss.front());
    }

    SECTION("a clipped affine task beats the variance baseline tenfold")
    {
        cfg.epochs = 300;
        const Dataset d = linear_task(2000, 20, 5, 33);
        const auto r = train(d, cfg);
        const Dataset test = d.subset(Split::test);
        const Eigen::VectorXd mse = evaluate_mse(r.model, test);
        const Eigen::RowVectorXd mean = test.labels.colwise().mean();
        const Eigen::VectorXd var =
            ((test.labels.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(test.rows())).transpose();
        for (Eigen::Index g = 0; g < mse.size(); ++g)
            CHECK(mse(g) <= 0.1 * var(g));
    }

    SECTION("training is deterministic")
    {
        cfg.epochs = 15;
        cfg.hidden_width = 4;
        const Dataset d = linear_task(150, 3, 2, 34);
        const auto a = train(d, cfg);
        const auto b = train(d, cfg);
        CHECK(a.train_loss == b.train_loss);
        CHECK(a.best_epoch == b.best_epoch);
        for (std::size_t l = 0; l < a.model.layers.size(); ++l)
            CHECK(a.model.layers[l].weight == b.model.layers[l].weight);
    }

    SECTION("an empty train split is a configuration error")
    {
        Dataset d = linear_task(20, 3, 2, 35);
        d.split.assign(20, Split::test);
        CHECK_THROWS_AS(train(d, cfg), ConfigError);
        cfg.train_fraction = 0.5;
        CHECK_THROWS_AS(train(linear_task(20, 3, 2, 35), cfg), ConfigError);
    }
}

TEST_CASE("evaluation of fixed predictors", "[predictor]")
{
    const Dataset d = linear_task(300, 3, 4, 41);
    const Eigen::RowVectorXd mean = d.labels.colwise().mean();
    PredictorModel m;
    m.layers.push_back({Eigen::MatrixXd::Zero(4, 3), mean.transpose()});
    const Eigen::VectorXd mse = evaluate_mse(m, d);
    const Eigen::VectorXd var =
        ((d.labels.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(d.rows())).transpose();
    CHECK((mse - var).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK_THROWS_AS(evaluate_mse(init_model(3, 1, 2, 1), d), ShapeError);
}

TEST_CASE("permutation importance", "[predictor]")
{
    TrainConfig cfg;
    cfg.epochs = 150;
    cfg.hidden_width = 8;
    const Dataset d = linear_task(600, 3, 2, 51, true, true);
    const auto r = train(d, cfg);
    const Dataset test = d.subset(Split::test);
    const Eigen::VectorXd imp = permutation_importance(r.model, test, 5, 9);
    REQUIRE(imp.size() == 5);
    CHECK(std::abs(imp(3)) <= 1e-9);
    CHECK(imp(4) <= 0.05 * imp.maxCoeff());
    CHECK(imp == permutation_importance(r.model, test, 5, 9));
    CHECK_THROWS_AS(permutation_importance(r.model, test, 0, 9), ConfigError);

    SECTION("duplicated features share their importance")
    {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const Dataset base = linear_task(2000, 19, 5, 52 + seed, false, false, 0.3);
            Dataset dup = base;
            dup.features.conservativeResize(Eigen::NoChange, 20);
            dup.features.col(19) = base.features.col(0);
            dup.feature_names.push_back("x0_copy");
            TrainConfig plain;
            plain.seed = seed;
            const auto alone = train(base, plain);
            const auto both = train(dup, plain);
            const double imp_alone = permutation_importance(alone.model, base.subset(Split::test), 5, 3)(0);
            const Eigen::VectorXd imp_dup = permutation_importance(both.model, dup.subset(Split::test), 5, 3);
            CHECK(imp_dup(0) <= imp_alone);
            CHECK(imp_dup(19) <= imp_alone);
        }
    }
}

TEST_CASE("pruning", "[predictor]")
{
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.hidden_width = 6;
    const Dataset d = linear_task(300, 4, 2, 61);
    const Eigen::VectorXd imp = (Eigen::VectorXd(4) << 0.1, 0.4, 0.4, 0.05).finished();

    const auto full = prune_and_retrain(d, imp, 1.0, cfg);
    CHECK(full.mask == std::vector<bool>(4, true));
    CHECK(full.overhead_reduction_pct == 0.0);
    const auto ref = train(d, cfg);
    CHECK(full.test_mse == evaluate_mse(ref.model, d.subset(Split::test)));

    const auto half = prune_and_retrain(d, imp, 0.5, cfg);
    CHECK(half.mask == std::vector<bool>{false, true, true, false});
    CHECK(half.overhead_reduction_pct == Catch::Approx(50.0));

    const auto one = prune_and_retrain(d, imp, 0.05, cfg);
    CHECK(one.mask == std::vector<bool>{false, true, false, false});

    CHECK_THROWS_AS(prune_and_retrain(d, imp, 0.0, cfg), ConfigError);
    CHECK_THROWS_AS(prune_and_retrain(d, Eigen::VectorXd::Zero(3), 0.5, cfg), ShapeError);
}

TEST_CASE("dataset utilities", "[predictor]")
{
    Dataset d = linear_task(1000, 2, 1, 71);
    int counts[3] = {0, 0, 0};
    for (auto s : d.split)
        ++counts[static_cast<int>(s)];
    CHECK(counts[0] == 700);
    CHECK(counts[1] == 150);
    CHECK(counts[2] == 150);

    Dataset e = linear_task(1000, 2, 1, 71);
    CHECK(e.split == d.split);

    const auto mask = feature_mask_for_groups({"sdcp[0,0]", "fdcp[1]", "tdcp[0]", "delta"}, {"sdcp", "tdcp"});
    CHECK(mask == std::vector<bool>{true, false, true, false});

    const Dataset sel = d.select_features({false, true});
    CHECK(sel.feature_count() == 1);
    CHECK(sel.feature_names == std::vector<std::string>{"x1"});
    CHECK(sel.features.col(0) == d.features.col(1));

    d.labels(0, 0) = 1.5;
    CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("checkpoint round trip", "[predictor]")
{
    auto m = init_model(5, 2, 3, 77, 4);
    m.input_offset = Eigen::VectorXd::LinSpaced(5, 0.1, 0.5);
    m.input_scale = Eigen::VectorXd::LinSpaced(5, 1.0, 3.0);
    std::ostringstream out;
    save_checkpoint(out, m, "{\"k\":1}");
    const std::string bytes = out.str();

    std::istringstream in(bytes);
    const auto ck = load_checkpoint(in);
    CHECK(ck.metadata == "{\"k\":1}");
    CHECK(ck.model.seed == 77u);
    CHECK(ck.model.input_offset == m.input_offset);
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        CHECK(ck.model.layers[l].weight == m.layers[l].weight);
        CHECK(ck.model.layers[l].bias == m.layers[l].bias);
    }
    std::ostringstream again;
    save_checkpoint(again, ck.model, ck.metadata);
    CHECK(again.str() == bytes);

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    std::istringstream s1(bad_magic);
    CHECK_THROWS_AS(load_checkpoint(s1), FormatError);

    std::string bad_version = bytes;
    bad_version[8] = 9;
    std::istringstream s2(bad_version);
    CHECK_THROWS_AS(load_checkpoint(s2), VersionError);

    std::istringstream s3(bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(load_checkpoint(s3), FormatError);
}
