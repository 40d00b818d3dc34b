#include "sheafnet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sheafnet/error.hpp"

namespace sheafnet::dyn {

namespace {

using Key = std::vector<double>;

Key key_of(const Vec& v) { return Key(v.data(), v.data() + v.size()); }

double act_value(Activation a, double z) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::sigmoid: return sigmoid(z);
    case Activation::tanh: return std::tanh(z);
  }
  return z;
}

double act_derivative(Activation a, double z) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::sigmoid: {
      const double s = sigmoid(z);
      return s * (1.0 - s);
    }
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

Vec apply_act(Activation a, const Vec& z) { return z.unaryExpr([a](double x) { return act_value(a, x); }); }
Vec act_slope(Activation a, const Vec& z) { return z.unaryExpr([a](double x) { return act_derivative(a, x); }); }

Vec stack(const std::vector<const Vec*>& parts) {
  Eigen::Index n = 0;
  for (const Vec* p : parts) n += p->size();
  Vec out(n);
  Eigen::Index at = 0;
  for (const Vec* p : parts) {
    out.segment(at, p->size()) = *p;
    at += p->size();
  }
  return out;
}

/// Value and pre-activation of vertex v from its ordered input values.
std::pair<Vec, Vec> local_map(const WeightedNetwork& net, const Vec& w, std::size_t v, const std::vector<const Vec*>& in) {
  const NodeSpec& s = net.node(v);
  switch (s.op) {
    case Op::input: throw InputError("input vertices have no local map");
    case Op::affine: {
      Vec pre = net.weight_matrix(w, v) * stack(in);
      if (s.bias) pre += net.bias_vector(w, v);
      return {apply_act(s.act, pre), pre};
    }
    case Op::hadamard: return {in[0]->cwiseProduct(*in[1]), Vec()};
    case Op::sum: {
      Vec out = *in[0];
      for (std::size_t k = 1; k < in.size(); ++k) out += *in[k];
      return {out, Vec()};
    }
    case Op::one_minus_hadamard: return {(Vec::Ones(in[0]->size()) - *in[0]).cwiseProduct(*in[1]), Vec()};
    case Op::tanh_hadamard: return {in[0]->array().tanh().matrix().cwiseProduct(*in[1]), Vec()};
    case Op::cube: return {in[0]->array().cube().matrix(), Vec()};
    case Op::activation: return {apply_act(s.act, *in[0]), *in[0]};
  }
  return {};
}

std::size_t arity(Op op) {
  switch (op) {
    case Op::input: return 0;
    case Op::hadamard:
    case Op::one_minus_hadamard:
    case Op::tanh_hadamard: return 2;
    case Op::cube:
    case Op::activation: return 1;
    case Op::affine:
    case Op::sum: return 0;  // any positive number
  }
  return 0;
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  return "identity";
}

Activation parse_activation(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "tanh") return Activation::tanh;
  throw InputError("unknown activation '" + s + "'");
}

std::string to_string(Op op) {
  switch (op) {
    case Op::input: return "input";
    case Op::affine: return "affine";
    case Op::hadamard: return "hadamard";
    case Op::sum: return "sum";
    case Op::one_minus_hadamard: return "one_minus_hadamard";
    case Op::tanh_hadamard: return "tanh_hadamard";
    case Op::cube: return "cube";
    case Op::activation: return "activation";
  }
  return "affine";
}

Op parse_op(const std::string& s) {
  for (Op op : {Op::input, Op::affine, Op::hadamard, Op::sum, Op::one_minus_hadamard, Op::tanh_hadamard, Op::cube,
                Op::activation}) {
    if (to_string(op) == s) return op;
  }
  throw InputError("unknown op '" + s + "'");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

WeightedNetwork WeightedNetwork::make(site::SiteGraph graph, std::vector<NodeSpec> nodes) {
  const std::size_t n = graph.size();
  if (nodes.size() != n) throw InputError("one node specification per vertex is required");
  if (!site::check_classical_directed(graph).ok()) throw StructureError("network graph must be a classical directed graph");
  WeightedNetwork net;
  std::vector<std::vector<std::size_t>> preds(n);
  net.succ_.assign(n, {});
  for (auto [s, t] : graph.edges) {
    preds[t].push_back(s);
    net.succ_[s].push_back(t);
  }
  for (std::size_t v = 0; v < n; ++v) {
    NodeSpec& s = nodes[v];
    if (s.dim == 0) throw InputError("vertex '" + graph.vertices[v] + "' has dimension zero");
    if (preds[v].empty()) {
      if (s.op != Op::input) s.op = Op::input;
      s.inputs.clear();
      continue;
    }
    if (s.op == Op::input) throw InputError("vertex '" + graph.vertices[v] + "' has predecessors but is marked input");
    if (s.inputs.empty()) {
      s.inputs = preds[v];
    } else {
      std::vector<std::size_t> a = s.inputs;
      std::vector<std::size_t> b = preds[v];
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) throw InputError("input order of '" + graph.vertices[v] + "' does not match its predecessors");
    }
    const std::size_t need = arity(s.op);
    if (need != 0 && s.inputs.size() != need) {
      throw InputError("op " + to_string(s.op) + " at '" + graph.vertices[v] + "' needs " + std::to_string(need) + " inputs");
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    const NodeSpec& s = nodes[v];
    auto dim_of = [&](std::size_t k) { return nodes[s.inputs[k]].dim; };
    switch (s.op) {
      case Op::hadamard:
      case Op::one_minus_hadamard:
      case Op::tanh_hadamard:
      case Op::sum:
      case Op::cube:
      case Op::activation:
        for (std::size_t k = 0; k < s.inputs.size(); ++k) {
          if (dim_of(k) != s.dim) throw InputError("dimension mismatch at '" + graph.vertices[v] + "'");
        }
        break;
      default: break;
    }
  }
  // Kahn order, smallest index first for determinism.
  std::vector<std::size_t> indeg(n, 0);
  for (auto [s, t] : graph.edges) ++indeg[t];
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indeg[v] == 0) ready.push_back(v);
  }
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    const std::size_t v = ready.back();
    ready.pop_back();
    net.topo_.push_back(v);
    for (std::size_t t : net.succ_[v]) {
      if (--indeg[t] == 0) ready.push_back(t);
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (preds[v].empty()) net.inputs_.push_back(v);
    if (net.succ_[v].empty() || graph.roles[v] == site::Role::output) net.outputs_.push_back(v);
  }
  net.graph_ = std::move(graph);
  net.nodes_ = std::move(nodes);
  net.offset_.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    net.offset_[v] = net.param_count_;
    net.param_count_ += net.block_size(v);
  }
  return net;
}

std::size_t WeightedNetwork::in_dim(std::size_t v) const {
  std::size_t d = 0;
  for (std::size_t p : nodes_[v].inputs) d += nodes_[p].dim;
  return d;
}

std::size_t WeightedNetwork::block_size(std::size_t v) const {
  const NodeSpec& s = nodes_[v];
  if (s.op != Op::affine) return 0;
  return s.dim * in_dim(v) + (s.bias ? s.dim : 0);
}

std::size_t WeightedNetwork::weight_count() const {
  std::size_t c = 0;
  for (std::size_t v = 0; v < size(); ++v) {
    if (nodes_[v].op == Op::affine) c += nodes_[v].dim * in_dim(v);
  }
  return c;
}

Vec WeightedNetwork::random_parameters(std::mt19937_64& rng, double scale) const {
  std::normal_distribution<double> g(0.0, scale);
  Vec w(static_cast<Eigen::Index>(param_count_));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = g(rng);
  return w;
}

Mat WeightedNetwork::weight_matrix(const Vec& w, std::size_t v) const {
  if (static_cast<std::size_t>(w.size()) != param_count_) throw InputError("parameter vector has the wrong length");
  const auto rows = static_cast<Eigen::Index>(nodes_[v].dim);
  const auto cols = static_cast<Eigen::Index>(in_dim(v));
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      w.data() + offset_[v], rows, cols);
}

Vec WeightedNetwork::bias_vector(const Vec& w, std::size_t v) const {
  const std::size_t at = offset_[v] + nodes_[v].dim * in_dim(v);
  return w.segment(static_cast<Eigen::Index>(at), static_cast<Eigen::Index>(nodes_[v].dim));
}

Evaluation feedforward(const WeightedNetwork& net, const Vec& w, const std::vector<Vec>& inputs) {
  if (inputs.size() != net.input_vertices().size()) throw InputError("one input vector per input vertex is required");
  Evaluation ev;
  ev.value.assign(net.size(), Vec());
  ev.pre.assign(net.size(), Vec());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::size_t v = net.input_vertices()[i];
    if (static_cast<std::size_t>(inputs[i].size()) != net.node(v).dim) {
      throw InputError("input '" + net.graph().vertices[v] + "' has the wrong dimension");
    }
    ev.value[v] = inputs[i];
  }
  for (std::size_t v : net.topological_order()) {
    if (net.node(v).op == Op::input) continue;
    std::vector<const Vec*> in;
    for (std::size_t p : net.inputs_of(v)) in.push_back(&ev.value[p]);
    auto [val, pre] = local_map(net, w, v, in);
    ev.value[v] = std::move(val);
    ev.pre[v] = std::move(pre);
  }
  return ev;
}

std::vector<Vec> fork_activations(const WeightedNetwork& net, const site::ForkGraph& fg, const Evaluation& ev) {
  std::vector<Vec> out(fg.size());
  for (std::size_t v = 0; v < fg.size(); ++v) {
    if (v < net.size()) out[v] = ev.value[net.graph().index_of(fg.ids[v])];
  }
  for (auto [copy, original] : fg.input_copies) out[copy] = out[original];
  for (const site::Fork& f : fg.forks) {
    std::vector<const Vec*> parts;
    for (std::size_t t : f.tines) parts.push_back(&out[t]);
    out[f.tang] = stack(parts);
    out[f.star] = out[f.tang];
  }
  return out;
}

double loss(const WeightedNetwork& net, const Vec& w, const std::vector<Vec>& inputs, const std::vector<Vec>& targets) {
  if (targets.size() != net.output_vertices().size()) throw InputError("one target per output vertex is required");
  const Evaluation ev = feedforward(net, w, inputs);
  double f = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) f += 0.5 * (ev.value[net.output_vertices()[i]] - targets[i]).squaredNorm();
  return f;
}

Mat input_jacobian(const WeightedNetwork& net, const Vec& w, const Evaluation& ev, std::size_t v, std::size_t k) {
  const NodeSpec& s = net.node(v);
  const std::size_t p = s.inputs.at(k);
  const auto dp = static_cast<Eigen::Index>(net.node(p).dim);
  switch (s.op) {
    case Op::input: throw InputError("input vertices have no Jacobian");
    case Op::affine: {
      Eigen::Index col = 0;
      for (std::size_t j = 0; j < k; ++j) col += static_cast<Eigen::Index>(net.node(s.inputs[j]).dim);
      const Mat wm = net.weight_matrix(w, v);
      return act_slope(s.act, ev.pre[v]).asDiagonal() * wm.middleCols(col, dp);
    }
    case Op::hadamard: return Mat(ev.value[s.inputs[1 - k]].asDiagonal());
    case Op::sum: return Mat::Identity(dp, dp);
    case Op::one_minus_hadamard: {
      const Vec& gate = ev.value[s.inputs[0]];
      const Vec& x = ev.value[s.inputs[1]];
      if (k == 0) return Mat((-x).asDiagonal());
      return Mat((Vec::Ones(gate.size()) - gate).asDiagonal());
    }
    case Op::tanh_hadamard: {
      const Vec t = ev.value[s.inputs[0]].array().tanh().matrix();
      const Vec& x = ev.value[s.inputs[1]];
      if (k == 0) return Mat((Vec::Ones(t.size()) - t.cwiseProduct(t)).cwiseProduct(x).asDiagonal());
      return Mat(t.asDiagonal());
    }
    case Op::cube: return Mat((3.0 * ev.value[p].array().square()).matrix().asDiagonal());
    case Op::activation: return Mat(act_slope(s.act, ev.pre[v]).asDiagonal());
  }
  return {};
}

Mat weight_jacobian(const WeightedNetwork& net, const Vec& /*w*/, const Evaluation& ev, std::size_t v) {
  const NodeSpec& s = net.node(v);
  const auto rows = static_cast<Eigen::Index>(s.dim);
  const auto cols = static_cast<Eigen::Index>(net.block_size(v));
  Mat j = Mat::Zero(rows, cols);
  if (s.op != Op::affine) return j;
  std::vector<const Vec*> in;
  for (std::size_t p : s.inputs) in.push_back(&ev.value[p]);
  const Vec z = stack(in);
  const Vec slope = act_slope(s.act, ev.pre[v]);
  const Eigen::Index nin = z.size();
  for (Eigen::Index r = 0; r < rows; ++r) {
    j.block(r, r * nin, 1, nin) = slope[r] * z.transpose();
    if (s.bias) j(r, rows * nin + r) = slope[r];
  }
  return j;
}

PathGradient gradient_paths(const WeightedNetwork& net, const Vec& w, const std::vector<Vec>& inputs,
                            const std::vector<Vec>& targets) {
  if (targets.size() != net.output_vertices().size()) throw InputError("one target per output vertex is required");
  const Evaluation ev = feedforward(net, w, inputs);
  PathGradient out;
  out.gradient = Vec::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  std::map<std::size_t, Vec> dloss;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::size_t o = net.output_vertices()[i];
    dloss[o] = ev.value[o] - targets[i];
  }
  for (std::size_t v = 0; v < net.size(); ++v) {
    const NodeSpec& s = net.node(v);
    if ((s.op == Op::affine || s.op == Op::activation) && s.act != Activation::identity &&
        ev.pre[v].cwiseAbs().maxCoeff() > kSaturationThreshold) {
      out.saturated.push_back(v);
    }
  }

  // Jacobian of the path from the weighted vertex up to the current vertex,
  // extended one edge at a time; each vertex reached that is an output closes a path.
  for (std::size_t a = 0; a < net.size(); ++a) {
    if (net.block_size(a) == 0) continue;
    Vec ga = Vec::Zero(static_cast<Eigen::Index>(net.block_size(a)));
    std::vector<std::pair<std::size_t, Mat>> stack_frames{{a, weight_jacobian(net, w, ev, a)}};
    while (!stack_frames.empty()) {
      auto [v, jac] = std::move(stack_frames.back());
      stack_frames.pop_back();
      if (auto it = dloss.find(v); it != dloss.end()) {
        ga += jac.transpose() * it->second;
        ++out.path_count;
      }
      for (std::size_t t : net.successors(v)) {
        const auto& ins = net.inputs_of(t);
        const std::size_t k = static_cast<std::size_t>(std::find(ins.begin(), ins.end(), v) - ins.begin());
        stack_frames.emplace_back(t, input_jacobian(net, w, ev, t, k) * jac);
      }
    }
    out.gradient.segment(static_cast<Eigen::Index>(net.offset(a)), ga.size()) = ga;
  }
  return out;
}

Vec gradient_reverse(const WeightedNetwork& net, const Vec& w, const std::vector<Vec>& inputs,
                     const std::vector<Vec>& targets) {
  if (targets.size() != net.output_vertices().size()) throw InputError("one target per output vertex is required");
  const Evaluation ev = feedforward(net, w, inputs);
  std::vector<Vec> adj(net.size());
  for (std::size_t v = 0; v < net.size(); ++v) adj[v] = Vec::Zero(static_cast<Eigen::Index>(net.node(v).dim));
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::size_t o = net.output_vertices()[i];
    adj[o] += ev.value[o] - targets[i];
  }
  Vec grad = Vec::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  const auto& order = net.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    if (net.node(v).op == Op::input) continue;
    if (net.block_size(v) > 0) {
      grad.segment(static_cast<Eigen::Index>(net.offset(v)), static_cast<Eigen::Index>(net.block_size(v))) =
          weight_jacobian(net, w, ev, v).transpose() * adj[v];
    }
    for (std::size_t k = 0; k < net.inputs_of(v).size(); ++k) {
      adj[net.inputs_of(v)[k]] += input_jacobian(net, w, ev, v, k).transpose() * adj[v];
    }
  }
  return grad;
}

Vec gradient_fd(const WeightedNetwork& net, const Vec& w, const std::vector<Vec>& inputs,
                const std::vector<Vec>& targets, double h) {
  Vec grad(w.size());
  Vec wp = w;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    wp[i] = w[i] + h;
    const double fp = loss(net, wp, inputs, targets);
    wp[i] = w[i] - h;
    const double fm = loss(net, wp, inputs, targets);
    wp[i] = w[i];
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

double relative_error(const Vec& a, const Vec& b, double floor) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

WeightedNetwork random_fork_network(std::mt19937_64& rng, const RandomNetworkOptions& opt) {
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  site::SiteGraph g;
  std::vector<NodeSpec> nodes;
  std::vector<std::vector<std::size_t>> layers;
  const std::size_t depth = pick(2, std::max<std::size_t>(opt.max_layers, 2));
  for (std::size_t l = 0; l < depth; ++l) {
    std::vector<std::size_t> layer;
    const std::size_t width = pick(1, opt.max_width);
    for (std::size_t i = 0; i < width; ++i) {
      const std::size_t v = g.vertices.size();
      g.vertices.push_back("L" + std::to_string(l) + "_" + std::to_string(i));
      g.roles.push_back(l == 0 ? site::Role::input : site::Role::ordinary);
      NodeSpec s;
      s.dim = pick(1, opt.max_units);
      if (l == 0) {
        s.op = Op::input;
      } else {
        std::vector<std::size_t> pool;
        for (std::size_t j = 0; j < l; ++j) pool.insert(pool.end(), layers[j].begin(), layers[j].end());
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<std::size_t> preds{layers[l - 1][pick(0, layers[l - 1].size() - 1)]};
        const std::size_t extra = pick(0, 2);
        for (std::size_t p : pool) {
          if (preds.size() > extra) break;
          if (std::find(preds.begin(), preds.end(), p) == preds.end()) preds.push_back(p);
        }
        const bool same_dim = std::all_of(preds.begin(), preds.end(), [&](std::size_t p) { return nodes[p].dim == nodes[preds[0]].dim; });
        const std::size_t choice = pick(0, 9);
        if (same_dim && preds.size() == 2 && choice < 2) {
          s.op = Op::hadamard;
        } else if (same_dim && preds.size() == 2 && choice < 3) {
          s.op = Op::tanh_hadamard;
        } else if (same_dim && preds.size() >= 2 && choice < 4) {
          s.op = Op::sum;
        } else if (preds.size() == 1 && choice == 9) {
          s.op = Op::cube;
        } else {
          s.op = Op::affine;
          s.act = std::array{Activation::identity, Activation::sigmoid, Activation::tanh}[pick(0, 2)];
          s.bias = pick(0, 1) == 1;
        }
        if (s.op != Op::affine) s.dim = nodes[preds[0]].dim;
        for (std::size_t p : preds) g.edges.emplace_back(p, v);
        s.inputs = preds;
      }
      nodes.push_back(s);
      layer.push_back(v);
    }
    layers.push_back(std::move(layer));
  }
  std::vector<bool> has_succ(g.vertices.size(), false);
  for (auto [s, t] : g.edges) has_succ[s] = true;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (!has_succ[v] && g.roles[v] != site::Role::input) g.roles[v] = site::Role::output;
  }
  // An input nobody reads would be an isolated vertex; feed it to the last layer.
  for (std::size_t v : layers[0]) {
    if (has_succ[v]) continue;
    const std::size_t t = layers.back().front();
    if (nodes[t].op != Op::affine) {
      nodes[t].op = Op::affine;
      nodes[t].act = Activation::tanh;
    }
    g.edges.emplace_back(v, t);
    nodes[t].inputs.push_back(v);
  }
  return WeightedNetwork::make(std::move(g), std::move(nodes));
}

WeightedNetwork default_network(const site::SiteGraph& g, std::size_t dim) {
  std::vector<NodeSpec> nodes(g.size());
  for (NodeSpec& s : nodes) {
    s.op = Op::affine;
    s.act = Activation::tanh;
    s.bias = true;
    s.dim = dim;
  }
  return WeightedNetwork::make(g, std::move(nodes));
}

InducedPresheaf induce_presheaf(const WeightedNetwork& net, const Vec& w, const std::vector<std::vector<Vec>>& samples) {
  if (samples.size() != net.input_vertices().size()) throw InputError("one sample list per input vertex is required");
  constexpr std::size_t kTableBound = 100'000;
  std::vector<std::vector<Vec>> table(net.size());
  std::vector<std::map<Key, std::size_t>> index(net.size());
  auto intern = [&](std::size_t v, Vec x) {
    auto [it, fresh] = index[v].emplace(key_of(x), table[v].size());
    if (fresh) table[v].push_back(std::move(x));
    return it->second;
  };
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t v = net.input_vertices()[i];
    if (samples[i].empty()) throw InputError("every input needs at least one sample value");
    for (const Vec& x : samples[i]) {
      if (static_cast<std::size_t>(x.size()) != net.node(v).dim) throw InputError("sample has the wrong dimension");
      intern(v, x);
    }
  }
  for (std::size_t v : net.topological_order()) {
    if (net.node(v).op == Op::input) continue;
    const auto& ins = net.inputs_of(v);
    std::size_t combos = 1;
    for (std::size_t p : ins) {
      combos *= table[p].size();
      if (combos > kTableBound) throw BoundExceeded("discretized carrier exceeds bound");
    }
    std::vector<std::size_t> idx(ins.size(), 0);
    for (std::size_t c = 0; c < combos; ++c) {
      std::vector<const Vec*> in;
      for (std::size_t k = 0; k < ins.size(); ++k) in.push_back(&table[ins[k]][idx[k]]);
      intern(v, local_map(net, w, v, in).first);
      for (std::size_t k = 0; k < ins.size(); ++k) {
        if (++idx[k] < table[ins[k]].size()) break;
        idx[k] = 0;
      }
    }
  }

  site::ForkGraph fg = site::fork_surgery(net.graph());
  std::vector<std::size_t> sizes(fg.size(), 0);
  std::vector<std::size_t> site_of(fg.size(), fg.size());
  for (std::size_t v = 0; v < fg.size(); ++v) {
    if (v < net.size()) site_of[v] = v;
  }
  for (auto [copy, original] : fg.input_copies) site_of[copy] = original;
  for (std::size_t v = 0; v < fg.size(); ++v) {
    if (site_of[v] < net.size()) sizes[v] = table[site_of[v]].size();
  }
  std::map<std::size_t, const site::Fork*> fork_of_handle;
  for (const site::Fork& f : fg.forks) {
    for (std::size_t h : f.handles) fork_of_handle[h] = &f;
  }

  const presheaf::Dynamics dynamics = [&](std::size_t v, std::span<const presheaf::State> source) {
    const std::size_t sv = site_of[v];
    const auto& ins = net.inputs_of(sv);
    std::vector<const Vec*> in(ins.size());
    if (auto it = fork_of_handle.find(v); it != fork_of_handle.end()) {
      const site::Fork& f = *it->second;
      for (std::size_t k = 0; k < ins.size(); ++k) {
        for (std::size_t j = 0; j < f.tines.size(); ++j) {
          if (site_of[f.tines[j]] == ins[k]) in[k] = &table[ins[k]][source[j]];
        }
      }
    } else {
      in[0] = &table[ins[0]][source[0]];
    }
    return index[sv].at(key_of(local_map(net, w, sv, in).first));
  };
  presheaf::Presheaf p = presheaf::feed_forward_presheaf(fg, sizes, dynamics);
  std::vector<std::vector<Vec>> fg_table(fg.size());
  for (std::size_t v = 0; v < fg.size(); ++v) {
    if (site_of[v] < net.size()) fg_table[v] = table[site_of[v]];
  }
  return {std::move(p), std::move(fg), std::move(fg_table)};
}

}  // namespace sheafnet::dyn
