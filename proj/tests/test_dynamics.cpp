#include <doctest.h>

#include <random>

#include "sheafnet/dynamics.hpp"
#include "sheafnet/error.hpp"
#include "sheafnet/presheaf.hpp"
#include "support.hpp"

using namespace sheafnet;
using namespace sheafnet::dyn;
using testing_support::fixture;

namespace {

site::SiteGraph line_graph(std::size_t n) {
  site::SiteGraph g;
  for (std::size_t i = 0; i < n; ++i) {
    g.vertices.push_back("v" + std::to_string(i));
    g.roles.push_back(i == 0 ? site::Role::input : (i + 1 == n ? site::Role::output : site::Role::ordinary));
    if (i > 0) g.edges.emplace_back(i - 1, i);
  }
  return g;
}

Vec random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = g(rng);
  return v;
}

std::vector<Vec> random_inputs(std::mt19937_64& rng, const WeightedNetwork& net) {
  std::vector<Vec> out;
  for (std::size_t v : net.input_vertices()) out.push_back(random_vec(rng, net.node(v).dim));
  return out;
}

std::vector<Vec> random_targets(std::mt19937_64& rng, const WeightedNetwork& net) {
  std::vector<Vec> out;
  for (std::size_t v : net.output_vertices()) out.push_back(random_vec(rng, net.node(v).dim));
  return out;
}

}  // namespace

TEST_CASE("scalar chain gradient") {
  const WeightedNetwork net = WeightedNetwork::make(line_graph(3), std::vector<NodeSpec>(3));
  REQUIRE(net.parameter_count() == 2);
  Vec w(2);
  w << 0.7, -1.3;
  const std::vector<Vec> x{Vec::Constant(1, 2.0)};
  const std::vector<Vec> t{Vec::Constant(1, 0.5)};
  const double r = w[1] * w[0] * 2.0 - 0.5;
  const PathGradient g = gradient_paths(net, w, x, t);
  CHECK(g.path_count == 2);
  CHECK(g.gradient[0] == doctest::Approx(r * w[1] * 2.0).epsilon(1e-14));
  CHECK(g.gradient[1] == doctest::Approx(r * w[0] * 2.0).epsilon(1e-14));
  CHECK(loss(net, w, x, t) == doctest::Approx(0.5 * r * r));
}

TEST_CASE("linear chain gradient matches the matrix product") {
  std::mt19937_64 rng(11);
  std::vector<NodeSpec> nodes(4);
  const std::size_t dims[] = {3, 2, 4, 2};
  for (std::size_t i = 0; i < 4; ++i) nodes[i].dim = dims[i];
  const WeightedNetwork net = WeightedNetwork::make(line_graph(4), nodes);
  const Vec w = net.random_parameters(rng, 1.0);
  const auto x = random_inputs(rng, net);
  const auto t = random_targets(rng, net);
  const Mat w1 = net.weight_matrix(w, 1), w2 = net.weight_matrix(w, 2), w3 = net.weight_matrix(w, 3);
  const Vec e = w3 * w2 * w1 * x[0] - t[0];
  const Mat g1 = (w3 * w2).transpose() * e * x[0].transpose();
  const Mat g3 = e * (w2 * w1 * x[0]).transpose();
  const Vec g = gradient_paths(net, w, x, t).gradient;
  const Mat got1 = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      g.data() + net.offset(1), 2, 3);
  const Mat got3 = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      g.data() + net.offset(3), 2, 4);
  CHECK((got1 - g1).norm() <= 1e-12 * g1.norm());
  CHECK((got3 - g3).norm() <= 1e-12 * g3.norm());
}

TEST_CASE("two paths through a join add up") {
  site::SiteGraph g = site::load_architecture(fixture("diamond.json"));
  std::vector<NodeSpec> nodes(4);
  nodes[3].op = Op::sum;
  const WeightedNetwork net = WeightedNetwork::make(g, nodes);
  REQUIRE(net.parameter_count() == 2);
  Vec w(2);
  w << 0.4, 1.1;
  const std::vector<Vec> x{Vec::Constant(1, -1.5)};
  const std::vector<Vec> t{Vec::Constant(1, 0.25)};
  const double r = (w[0] + w[1]) * -1.5 - 0.25;
  const PathGradient pg = gradient_paths(net, w, x, t);
  CHECK(pg.path_count == 2);
  CHECK(pg.gradient[0] == doctest::Approx(r * -1.5));
  CHECK(pg.gradient[1] == doctest::Approx(r * -1.5));

  // With a product at the join each path carries the other branch.
  nodes[3].op = Op::hadamard;
  const WeightedNetwork prod = WeightedNetwork::make(g, nodes);
  const double r2 = w[0] * w[1] * 2.25 - 0.25;
  const Vec gp = gradient_paths(prod, w, x, t).gradient;
  CHECK(gp[0] == doctest::Approx(r2 * w[1] * 2.25));
  CHECK(gp[1] == doctest::Approx(r2 * w[0] * 2.25));
}

TEST_CASE("path, reverse and finite-difference gradients agree on random fork networks") {
  std::mt19937_64 rng(2024);
  double worst_fd = 0.0, worst_rev = 0.0;
  std::size_t with_joins = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const WeightedNetwork net = random_fork_network(rng);
    const Vec w = net.random_parameters(rng, 0.7);
    const auto x = random_inputs(rng, net);
    const auto t = random_targets(rng, net);
    const PathGradient pg = gradient_paths(net, w, x, t);
    worst_fd = std::max(worst_fd, relative_error(pg.gradient, gradient_fd(net, w, x, t)));
    worst_rev = std::max(worst_rev, relative_error(pg.gradient, gradient_reverse(net, w, x, t)));
    if (!site::fork_surgery(net.graph()).forks.empty()) ++with_joins;
  }
  CHECK(worst_fd <= 1e-6);
  CHECK(worst_rev <= 1e-12);
  CHECK(with_joins > 50);
}

TEST_CASE("every op is differentiated correctly") {
  std::mt19937_64 rng(5);
  for (Op op : {Op::hadamard, Op::one_minus_hadamard, Op::tanh_hadamard, Op::sum}) {
    site::SiteGraph g = site::load_architecture(fixture("diamond.json"));
    std::vector<NodeSpec> nodes(4);
    for (auto& n : nodes) n.dim = 3;
    nodes[1].act = Activation::sigmoid;
    nodes[2].act = Activation::tanh;
    nodes[3].op = op;
    const WeightedNetwork net = WeightedNetwork::make(g, nodes);
    const Vec w = net.random_parameters(rng, 0.8);
    const auto x = random_inputs(rng, net);
    const auto t = random_targets(rng, net);
    CHECK(relative_error(gradient_reverse(net, w, x, t), gradient_fd(net, w, x, t)) <= 1e-7);
  }
  for (Op op : {Op::cube, Op::activation}) {
    std::vector<NodeSpec> nodes(4);
    for (auto& n : nodes) n.dim = 2;
    nodes[2].op = op;
    nodes[2].act = Activation::tanh;
    const WeightedNetwork net = WeightedNetwork::make(line_graph(4), nodes);
    const Vec w = net.random_parameters(rng, 0.8);
    const auto x = random_inputs(rng, net);
    const auto t = random_targets(rng, net);
    CHECK(relative_error(gradient_paths(net, w, x, t).gradient, gradient_fd(net, w, x, t)) <= 1e-7);
  }
}

TEST_CASE("network validation") {
  site::SiteGraph g = site::load_architecture(fixture("diamond.json"));
  std::vector<NodeSpec> nodes(4);
  nodes[1].op = Op::hadamard;
  CHECK_THROWS_AS(WeightedNetwork::make(g, nodes), InputError);
  nodes[1].op = Op::affine;
  nodes[3].op = Op::hadamard;
  nodes[2].dim = 2;
  CHECK_THROWS_AS(WeightedNetwork::make(g, nodes), InputError);
  nodes[2].dim = 1;
  nodes[3].inputs = {1, 0};
  CHECK_THROWS_AS(WeightedNetwork::make(g, nodes), InputError);
  nodes[3].inputs = {2, 1};
  CHECK_NOTHROW(WeightedNetwork::make(g, nodes));
  CHECK_THROWS_AS(WeightedNetwork::make(g, std::vector<NodeSpec>(3)), InputError);
  CHECK_THROWS_AS(feedforward(WeightedNetwork::make(g, nodes), Vec::Zero(2), {}), InputError);
}

TEST_CASE("saturated units are reported") {
  std::vector<NodeSpec> nodes(2);
  nodes[1].act = Activation::sigmoid;
  const WeightedNetwork net = WeightedNetwork::make(line_graph(2), nodes);
  const std::vector<Vec> t{Vec::Zero(1)};
  CHECK(gradient_paths(net, Vec::Constant(1, 1.0), {Vec::Constant(1, 5.0)}, t).saturated == std::vector<std::size_t>{1});
  CHECK(gradient_paths(net, Vec::Constant(1, 1.0), {Vec::Constant(1, 3.0)}, t).saturated.empty());
}

TEST_CASE("fork activations") {
  const site::SiteGraph g = site::load_architecture(fixture("diamond.json"));
  const WeightedNetwork net = default_network(g, 2);
  std::mt19937_64 rng(3);
  const Vec w = net.random_parameters(rng, 1.0);
  const Evaluation ev = feedforward(net, w, {Vec::Constant(2, 0.3)});
  const site::ForkGraph fg = site::fork_surgery(g);
  const auto val = fork_activations(net, fg, ev);
  REQUIRE(fg.forks.size() == 1);
  const site::Fork& f = fg.forks[0];
  Vec expected(4);
  expected << val[f.tines[0]], val[f.tines[1]];
  CHECK(val[f.tang] == expected);
  CHECK(val[f.star] == expected);
  for (std::size_t v = 0; v < g.size(); ++v) CHECK(val[fg.index_of(g.vertices[v])] == ev.value[v]);
}

TEST_CASE("induced presheaf sections are the feed-forward runs") {
  std::mt19937_64 rng(77);
  for (const char* name : {"diamond.json", "lstm.json", "gru.json", "mgu2.json", "chain.json"}) {
    CAPTURE(name);
    const site::SiteGraph g = site::load_architecture(fixture(name));
    const WeightedNetwork net = default_network(g, 1);
    const Vec w = net.random_parameters(rng, 1.0);
    std::vector<std::vector<Vec>> samples;
    std::size_t expected = 1;
    for (std::size_t i = 0; i < net.input_vertices().size(); ++i) {
      samples.push_back({Vec::Constant(1, -0.5), Vec::Constant(1, 0.75)});
      expected *= 2;
    }
    const InducedPresheaf ip = induce_presheaf(net, w, samples);
    const presheaf::SectionSet s = presheaf::sections(ip.presheaf);
    CHECK(s.size() == expected);
    for (const auto& tuple : s.tuples) {
      std::vector<Vec> x;
      for (std::size_t v : net.input_vertices()) x.push_back(ip.table[ip.forks.index_of(g.vertices[v])][tuple[ip.forks.index_of(g.vertices[v])]]);
      const Evaluation ev = feedforward(net, w, x);
      for (std::size_t v = 0; v < g.size(); ++v) {
        const std::size_t f = ip.forks.index_of(g.vertices[v]);
        CHECK(ip.table[f][tuple[f]] == ev.value[v]);
      }
    }
  }
}
