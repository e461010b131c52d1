#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ghcm/config.hpp"
#include "ghcm/error.hpp"
#include "ghcm/model.hpp"
#include "support.hpp"

using namespace ghcm;

namespace {

ConfigTree parse(const std::string& text) {
  std::istringstream in(text);
  return read_config_tree(in);
}

const char* kPiecewiseConfig = R"(
[model]
lambda = 2
n = 2000
r = 1
d = 1
pi = 0.3 0.7

[family]
kind = bernoulli
f_0_0 = 0 0.5 1 : 0.9 ; 0.3
f_0_1 = 0 0.5 1 : 0.1 ; 0.5
f_1_1 = 0 1 : 0.8 -0.2
)";

}  // namespace

TEST_CASE("mean degree matches intensity times visible volume") {
  const auto config = testing::symmetric_bernoulli_config(0.9, 0.1, 1.0, 1e4, 1.0, 2);
  const double expected = std::numbers::pi * std::log(1e4);
  CHECK(expected == doctest::Approx(28.9).epsilon(0.01));
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = sample_instance(config, seed);
    total += 2.0 * static_cast<double>(inst.graph.edge_count()) /
             static_cast<double>(inst.vertex_count());
  }
  CHECK(std::abs(total / 20.0 - expected) <= 0.05 * expected);
}

TEST_CASE("degenerate prior puts everyone in community zero") {
  auto config = testing::make_config(1.0, 500.0, 1.0, 2, {1.0, 0.0},
                                     symmetric_bernoulli(0.9, 0.1, 1.0));
  const auto inst = sample_instance(config, 4);
  for (Community c : inst.true_labels) CHECK(c == 0);
}

TEST_CASE("sampling is deterministic per seed") {
  const auto config = testing::symmetric_bernoulli_config(0.7, 0.2, 1.0, 3000.0, 1.0, 2);
  const auto a = sample_instance(config, 17);
  const auto b = sample_instance(config, 17);
  CHECK(a.graph.locations == b.graph.locations);
  CHECK(a.graph.adjacency == b.graph.adjacency);
  CHECK(a.true_labels == b.true_labels);
  const auto c = sample_instance(config, 18);
  CHECK(c.graph.locations != a.graph.locations);
}

TEST_CASE("normalized distance divides by the visibility scale") {
  auto config = testing::symmetric_bernoulli_config(0.9, 0.1, 1.0, std::exp(100.0), 1.0, 1);
  const ObservedGraph graph{config, {{{0.0}}, {{50.0}}}, {{}, {}}};
  CHECK(normalized_distance(graph, 0, 1) == doctest::Approx(0.5));
  CHECK(normalized_distance(graph, 1, 1) == 0.0);
}

TEST_CASE("stored distances and adjacency are self-consistent") {
  const auto config = testing::make_config(1.5, 2000.0, 1.0, 2, {0.4, 0.6},
                                           symmetric_gaussian(1.0, 1.0, 1.0));
  const auto inst = sample_instance(config, 9);
  const auto& g = inst.graph;
  std::size_t directed = 0;
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    for (std::size_t e = 0; e < g.adjacency[u].size(); ++e) {
      const auto& nb = g.adjacency[u][e];
      if (e > 0) CHECK(g.adjacency[u][e - 1].id < nb.id);
      CHECK(nb.y == doctest::Approx(normalized_distance(g, u, nb.id)));
      CHECK(nb.y <= config.r);
      const Neighbor* back = g.find(nb.id, u);
      REQUIRE(back != nullptr);
      CHECK(back->x == nb.x);
      ++directed;
    }
  }
  CHECK(directed == 2 * g.edge_count());
  // Every pair within the visibility radius is present.
  const auto all = testing::brute_force_pairs(g.locations, config.side(), config.visibility_radius());
  CHECK(all.size() == g.edge_count());
}

TEST_CASE("model validation rejects bad configurations") {
  auto config = testing::symmetric_bernoulli_config(0.9, 0.1, 1.0, 1e4, 1.0, 2);
  CHECK_NOTHROW(config.validate());
  auto bad = config;
  bad.pi = {0.6, 0.6};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = config;
  bad.n = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = config;
  bad.n = 3.0;  // visibility radius exceeds half the side
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("smallest admissible n"), ConfigError);
  bad = config;
  bad.pi = {0.2, 0.3, 0.5};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("minimal admissible size satisfies the radius bound") {
  for (int d = 1; d <= 3; ++d) {
    const double n = minimal_admissible_n(1.0, d, 2.0);
    CHECK(std::pow(std::log(n), 1.0 / d) <= std::pow(n, 1.0 / d) / 2.0 * (1 + 1e-9));
  }
}

TEST_CASE("config text round trip") {
  const auto config = model_config_from_tree(parse(kPiecewiseConfig));
  CHECK(config.lambda == 2.0);
  CHECK(config.d == 1);
  CHECK(config.pi == std::vector<double>{0.3, 0.7});
  const auto& gate = std::get<BernoulliGate>(config.family.payload());
  CHECK(gate.f[0](0.2) == doctest::Approx(0.9));
  CHECK(gate.f[0](0.7) == doctest::Approx(0.3));
  CHECK(gate.f[2](0.5) == doctest::Approx(0.7));

  ConfigTree tree;
  model_config_to_tree(config, tree);
  const auto again = model_config_from_tree(parse(write_config_tree(tree)));
  CHECK(std::get<BernoulliGate>(again.family.payload()).f == gate.f);
  CHECK(again.pi == config.pi);
  CHECK(again.n == config.n);
}

TEST_CASE("gaussian and table families round trip through text") {
  const auto gauss = testing::make_config(1.0, 1e4, 1.0, 2, {0.5, 0.5}, symmetric_gaussian(2.0, 0.5, 1.0));
  TablePMF t;
  t.alphabet = {-1.0, 0.0, 2.5};
  t.bins = {0.0, 0.25, 1.0};
  t.pmf = {{{0.5, 0.25, 0.25}, {0.2, 0.2, 0.6}},
           {{0.1, 0.1, 0.8}, {0.3, 0.3, 0.4}},
           {{0.6, 0.3, 0.1}, {1.0 / 3, 1.0 / 3, 1.0 / 3}}};
  const auto table = testing::make_config(1.0, 1e4, 1.0, 2, {0.5, 0.5}, DistributionFamily(2, 1.0, t, 4.0));
  for (const auto& config : {gauss, table}) {
    ConfigTree tree;
    model_config_to_tree(config, tree);
    const auto again = model_config_from_tree(parse(write_config_tree(tree)));
    CHECK(again.family.kind() == config.family.kind());
    CHECK(again.family.eta_bound() == config.family.eta_bound());
    for (double y : {0.1, 0.5, 0.9}) {
      for (double x : {-1.0, 0.0, 2.5}) {
        CHECK(log_density(again.family, 0, 1, x, y) == log_density(config.family, 0, 1, x, y));
      }
    }
  }
}

TEST_CASE("config errors name the offending key") {
  CHECK_THROWS_WITH_AS(model_config_from_tree(parse("[model]\nlambda = 1\n")),
                       doctest::Contains("'n'"), ConfigError);
  CHECK_THROWS_WITH_AS(
      model_config_from_tree(parse("[model]\nlambda=1\nn=100\nr=1\nd=1\npi=0.5 0.5\n[family]\nkind=poisson\n")),
      doctest::Contains("poisson"), ConfigError);
  CHECK_THROWS_WITH_AS(
      model_config_from_tree(parse("[model]\nlambda=x\nn=100\nr=1\nd=1\npi=0.5 0.5\n")),
      doctest::Contains("lambda"), ConfigError);
}

TEST_CASE("instance text round trip is exact") {
  const auto config = model_config_from_tree(parse(kPiecewiseConfig));
  const auto inst = sample_instance(config, 23);
  std::stringstream buffer;
  write_instance(buffer, inst);
  const auto back = read_instance(buffer);
  CHECK(back.seed == inst.seed);
  CHECK(back.true_labels == inst.true_labels);
  CHECK(back.graph.locations == inst.graph.locations);
  CHECK(back.graph.adjacency == inst.graph.adjacency);
  std::stringstream again;
  write_instance(again, back);
  std::stringstream first;
  write_instance(first, inst);
  CHECK(again.str() == first.str());
}

TEST_CASE("malformed instance text is rejected") {
  std::istringstream wrong_version("ghcm-instance 7\n");
  CHECK_THROWS_AS(read_instance(wrong_version), ConfigError);
  std::istringstream garbage("hello\n");
  CHECK_THROWS_AS(read_instance(garbage), ConfigError);
}
