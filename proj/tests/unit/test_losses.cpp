// Copyright 2026 The Calipso Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "doctest.h"

#include "calipso/losses.hpp"
#include "../support/oracles.hpp"

using namespace calipso;
using testing::make_batch;
using testing::RowSpec;

namespace {

LossConfig default_loss() {
  LossConfig c;  // sigma 2, lambda 10, gamma 100
  return c;
}

}  // namespace

TEST_CASE("class reference is the member mean") {
  const auto batch =
      make_batch({{RowSpec{{1, 2}, 0, 1}}, {RowSpec{{0, 0}, 1, 1}, RowSpec{{2, 4}, 1, 1}}});
  CHECK(class_reference(batch, 0) == std::vector<double>({1, 2}));
  CHECK(class_reference(batch, 1) == std::vector<double>({1, 2}));

  const auto batch1d = make_batch({{RowSpec{{0}, 0, 1}, RowSpec{{3}, 0, 1}, RowSpec{{9}, 0, 1}}});
  CHECK(class_reference(batch1d, 0) == std::vector<double>({4}));
}

TEST_CASE("pull loss hand cases") {
  const LossConfig config = default_loss();

  SUBCASE("identical members give zero") {
    const auto batch = make_batch(
        {{RowSpec{{1.5, -2}, 0, 1}, RowSpec{{1.5, -2}, 0, 1}}, {RowSpec{{3, 3}, 1, 1}}});
    CHECK(pull_loss(batch, config) == doctest::Approx(0.0));
  }
  SUBCASE("one non-interacting class {0,2} gives 1") {
    const auto batch = make_batch({{RowSpec{{0}, 0, 1}, RowSpec{{2}, 0, 1}}}, {false});
    CHECK(pull_loss(batch, config) == doctest::Approx(1.0));
  }
  SUBCASE("the same class flagged interacting scales by lambda") {
    const auto batch = make_batch({{RowSpec{{0}, 0, 1}, RowSpec{{2}, 0, 1}}}, {true});
    CHECK(pull_loss(batch, config) == doctest::Approx(10.0));
  }
}

TEST_CASE("push loss hand cases") {
  LossConfig config = default_loss();

  SUBCASE("identical references, gamma 1 everywhere") {
    const auto batch = make_batch({{RowSpec{{1, 1}, 0, 1}}, {RowSpec{{1, 1}, 1, 2}}});
    // No usual-target sets configured: gamma stays 1; (1/4) * 2 * exp(0).
    CHECK(push_loss(batch, 0, config) == doctest::Approx(0.5));
  }
  SUBCASE("distant references decay to zero") {
    const auto batch = make_batch({{RowSpec{{0, 0}, 0, 1}}, {RowSpec{{100, 0}, 1, 2}}});
    CHECK(push_loss(batch, 0, config) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("usual-target pairs scale by gamma") {
    config.usual_targets[0] = {1, 2};
    const auto batch = make_batch({{RowSpec{{1, 1}, 0, 1}}, {RowSpec{{1, 1}, 1, 2}}});
    CHECK(push_loss(batch, 0, config) == doctest::Approx(50.0));
  }
  SUBCASE("same-box usual targets do not trigger gamma") {
    config.usual_targets[0] = {1};
    const auto batch = make_batch({{RowSpec{{1, 1}, 0, 1}}, {RowSpec{{1, 1}, 0, 1}}});
    CHECK(push_loss(batch, 0, config) == doctest::Approx(0.5));
  }
  SUBCASE("a single class yields zero") {
    const auto batch = make_batch({{RowSpec{{1, 1}, 0, 1}}});
    CHECK(push_loss(batch, 0, config) == 0.0);
  }
  SUBCASE("symmetric halving halves the ordered-pair sum") {
    config.symmetric_halving = true;
    const auto batch = make_batch({{RowSpec{{1, 1}, 0, 1}}, {RowSpec{{1, 1}, 1, 2}}});
    CHECK(push_loss(batch, 0, config) == doctest::Approx(0.25));
  }
}

TEST_CASE("pull zero-set: zero iff all members equal their class mates") {
  const LossConfig config = default_loss();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto batch = testing::random_batch(rng);
    const double loss = pull_loss(batch, config);
    bool all_equal = true;
    for (std::size_t c = 0; c < batch.classes.size(); ++c)
      for (int r : batch.classes[c])
        for (int t = 0; t < batch.dim; ++t)
          if (batch.row(r)[t] != batch.row(batch.classes[c][0])[t]) all_equal = false;
    CHECK((loss == 0.0) == all_equal);
  }
}

TEST_CASE("push monotonicity: separating two references never increases it") {
  const LossConfig config = default_loss();
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    const double a = value(rng), b = value(rng);
    const auto near = make_batch({{RowSpec{{a}, 0, 1}}, {RowSpec{{b}, 1, 2}}});
    const double gap = std::abs(a - b);
    const auto far = make_batch({{RowSpec{{a}, 0, 1}}, {RowSpec{{a + gap + 0.5}, 1, 2}}});
    CHECK(push_loss(far, 0, config) <= push_loss(near, 0, config) + 1e-12);
  }
}

TEST_CASE("weight scaling is linear in lambda and gamma") {
  LossConfig config = default_loss();
  const auto batch = make_batch({{RowSpec{{0}, 0, 1}, RowSpec{{2}, 0, 1}}}, {true});
  const double at10 = pull_loss(batch, config);
  config.lambda_pull = 20;
  CHECK(pull_loss(batch, config) == doctest::Approx(2 * at10));

  LossConfig push_config = default_loss();
  push_config.usual_targets[0] = {1, 2};
  const auto push_batch = make_batch({{RowSpec{{1, 1}, 0, 1}}, {RowSpec{{1, 1}, 1, 2}}});
  const double at100 = push_loss(push_batch, 0, push_config);
  push_config.gamma_push = 200;
  CHECK(push_loss(push_batch, 0, push_config) == doctest::Approx(2 * at100));
}

TEST_CASE("analytic gradients match central finite differences") {
  std::mt19937_64 rng(2024);
  const LossConfig config = default_loss();
  LossConfig flagged = default_loss();
  flagged.usual_targets[0] = {1, 2};

  for (int trial = 0; trial < 10; ++trial) {
    const auto batch = testing::random_batch(rng);

    std::vector<double> grad(batch.rows.size(), 0.0);
    pull_loss_grad(batch, config, grad);
    const auto fd_pull = testing::finite_difference_grad(
        batch, [&](const EmbeddingBatch& b) { return pull_loss(b, config); });
    for (std::size_t i = 0; i < grad.size(); ++i)
      CHECK(testing::relative_error(grad[i], fd_pull[i]) < 1e-4);

    std::vector<double> pgrad(batch.rows.size(), 0.0);
    push_loss_grad(batch, 0, flagged, pgrad);
    const auto fd_push = testing::finite_difference_grad(
        batch, [&](const EmbeddingBatch& b) { return push_loss(b, 0, flagged); });
    for (std::size_t i = 0; i < pgrad.size(); ++i)
      CHECK(testing::relative_error(pgrad[i], fd_push[i]) < 1e-4);
  }
}

TEST_CASE("translation invariance of the embedding losses") {
  std::mt19937_64 rng(31);
  LossConfig config = default_loss();
  config.usual_targets[0] = {1, 2, 3, 4};
  std::uniform_real_distribution<double> shift_dist(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto batch = testing::random_batch(rng);
    const double pull0 = pull_loss(batch, config);
    const double push0 = push_loss(batch, 0, config);
    std::vector<double> shift(batch.dim);
    for (double& s : shift) s = shift_dist(rng);
    for (int r = 0; r < batch.n_rows(); ++r)
      for (int t = 0; t < batch.dim; ++t) batch.rows[r * batch.dim + t] += shift[t];
    CHECK(pull_loss(batch, config) == doctest::Approx(pull0).epsilon(1e-9));
    CHECK(push_loss(batch, 0, config) == doctest::Approx(push0).epsilon(1e-9));
  }
}

TEST_CASE("total loss follows the fixed combination") {
  CHECK(total_loss(0, 0, {0, 0}, 2) == 0.0);
  CHECK(total_loss(1, 2, {3, 5}, 2) == doctest::Approx(7.0));
  CHECK(total_loss(0.5, 0.25, {6}, 1) == doctest::Approx(6.75));
  CHECK_THROWS_AS(total_loss(std::nan(""), 0, {0}, 1), std::runtime_error);
}

TEST_CASE("loss report additivity holds to machine precision") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> value(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double verb = value(rng), target = value(rng);
    std::vector<double> per_verb(6);
    for (double& x : per_verb) x = value(rng);
    double emb_sum = 0;
    for (double x : per_verb) emb_sum += x;
    CHECK(total_loss(verb, target, per_verb, 6) ==
          doctest::Approx(verb + target + emb_sum / 6.0).epsilon(1e-15));
  }
}
