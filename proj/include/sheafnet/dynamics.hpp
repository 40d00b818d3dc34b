#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sheafnet/presheaf.hpp"
#include "sheafnet/site.hpp"

namespace sheafnet::dyn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Activation { identity, sigmoid, tanh };
std::string to_string(Activation a);
Activation parse_activation(const std::string& s);

double sigmoid(double z);

/// Local map of a vertex from the tuple of its inputs.
enum class Op {
  input,
  /// act(W [x_1; ...; x_k] + b); the only op with weights.
  affine,
  /// x_1 (.) x_2.
  hadamard,
  /// x_1 + ... + x_k.
  sum,
  /// (1 - x_1) (.) x_2.
  one_minus_hadamard,
  /// tanh(x_1) (.) x_2.
  tanh_hadamard,
  /// x_1 (.) x_1 (.) x_1.
  cube,
  /// act(x_1) elementwise.
  activation,
};
std::string to_string(Op op);
Op parse_op(const std::string& s);

struct NodeSpec {
  Op op = Op::affine;
  Activation act = Activation::identity;
  bool bias = false;
  std::size_t dim = 1;
  /// Ordered predecessors; empty means the order of the edges in the site graph.
  std::vector<std::size_t> inputs;
};

/// Feed-forward network over a classical directed graph.  Weights live in one
/// flat vector; each affine vertex owns a row-major block W followed by b.
class WeightedNetwork {
 public:
  static WeightedNetwork make(site::SiteGraph graph, std::vector<NodeSpec> nodes);

  const site::SiteGraph& graph() const { return graph_; }
  std::size_t size() const { return nodes_.size(); }
  const NodeSpec& node(std::size_t v) const { return nodes_[v]; }
  const std::vector<std::size_t>& inputs_of(std::size_t v) const { return nodes_[v].inputs; }
  const std::vector<std::size_t>& successors(std::size_t v) const { return succ_[v]; }
  const std::vector<std::size_t>& topological_order() const { return topo_; }
  const std::vector<std::size_t>& input_vertices() const { return inputs_; }
  const std::vector<std::size_t>& output_vertices() const { return outputs_; }
  std::size_t in_dim(std::size_t v) const;

  std::size_t parameter_count() const { return param_count_; }
  /// Weight-matrix entries only, biases excluded.
  std::size_t weight_count() const;
  std::size_t offset(std::size_t v) const { return offset_[v]; }
  std::size_t block_size(std::size_t v) const;

  Vec random_parameters(std::mt19937_64& rng, double scale) const;
  Mat weight_matrix(const Vec& w, std::size_t v) const;
  Vec bias_vector(const Vec& w, std::size_t v) const;

 private:
  site::SiteGraph graph_;
  std::vector<NodeSpec> nodes_;
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::size_t> topo_;
  std::vector<std::size_t> inputs_;
  std::vector<std::size_t> outputs_;
  std::vector<std::size_t> offset_;
  std::size_t param_count_ = 0;
};

struct Evaluation {
  std::vector<Vec> value;
  /// Pre-activation of affine and activation vertices.
  std::vector<Vec> pre;
};

/// `inputs` is aligned with net.input_vertices().
Evaluation feedforward(const WeightedNetwork& net, const Vec& w, const std::vector<Vec>& inputs);

/// Values on the fork graph: original vertices and input copies carry their
/// activation, tangs and stars the concatenated tine activations.
std::vector<Vec> fork_activations(const WeightedNetwork& net, const site::ForkGraph& fg, const Evaluation& ev);

/// F = 1/2 sum over outputs of |xi_o - target_o|^2; targets aligned with output_vertices().
double loss(const WeightedNetwork& net, const Vec& w, const std::vector<Vec>& inputs, const std::vector<Vec>& targets);

/// Jacobian of vertex v with respect to its k-th input block.
Mat input_jacobian(const WeightedNetwork& net, const Vec& w, const Evaluation& ev, std::size_t v, std::size_t k);
/// Jacobian of vertex v with respect to its own weight block.
Mat weight_jacobian(const WeightedNetwork& net, const Vec& w, const Evaluation& ev, std::size_t v);

struct PathGradient {
  Vec gradient;
  std::size_t path_count = 0;
  /// Vertices with a sigmoid or tanh pre-activation beyond the saturation threshold.
  std::vector<std::size_t> saturated;
};

inline constexpr double kSaturationThreshold = 4.0;

/// Sum over every directed path from a weighted vertex to an output of the
/// chain-rule product along the path.
PathGradient gradient_paths(const WeightedNetwork& net, const Vec& w, const std::vector<Vec>& inputs,
                            const std::vector<Vec>& targets);
/// Reverse-mode accumulation of adjoints in reverse topological order.
Vec gradient_reverse(const WeightedNetwork& net, const Vec& w, const std::vector<Vec>& inputs,
                     const std::vector<Vec>& targets);
/// Central differences with step h.
Vec gradient_fd(const WeightedNetwork& net, const Vec& w, const std::vector<Vec>& inputs,
                const std::vector<Vec>& targets, double h = 1e-5);

/// |a - b| / max(|b|, floor) in the Euclidean norm.
double relative_error(const Vec& a, const Vec& b, double floor = 1e-12);

struct RandomNetworkOptions {
  std::size_t max_layers = 6;
  std::size_t max_units = 4;
  std::size_t max_width = 2;
  double weight_scale = 0.7;
};

/// Random layered network with joins, Hadamard and sum nodes; inputs have no
/// predecessors and outputs no successors.
WeightedNetwork random_fork_network(std::mt19937_64& rng, const RandomNetworkOptions& opt = {});

/// Default network on an architecture graph: every non-input vertex is an
/// affine tanh map with bias of dimension `dim`.
WeightedNetwork default_network(const site::SiteGraph& g, std::size_t dim = 2);

struct InducedPresheaf {
  presheaf::Presheaf presheaf;
  site::ForkGraph forks;
  /// Distinct values per original vertex and input copy, indexed like the
  /// carriers; empty for tangs and stars.
  std::vector<std::vector<Vec>> table;
};

/// Discretizes the network: input carriers are the given sample values, and
/// every other carrier is the set of values reached from them.
InducedPresheaf induce_presheaf(const WeightedNetwork& net, const Vec& w, const std::vector<std::vector<Vec>>& samples);

}  // namespace sheafnet::dyn
