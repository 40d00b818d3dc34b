#include "sheafnet/cells.hpp"

#include <Eigen/SVD>

#include "sheafnet/error.hpp"

namespace sheafnet::dyn {

namespace {

Mat random_mat(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Mat out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = g(rng);
  return out;
}

Vec random_vec(std::mt19937_64& rng, std::size_t r, double scale) { return random_mat(rng, r, 1, scale); }

Mat zero_mat(std::size_t r, std::size_t c) {
  return Mat::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

Vec zero_vec(std::size_t r) { return Vec::Zero(static_cast<Eigen::Index>(r)); }

void expect_shape(const Mat& a, std::size_t r, std::size_t c, const char* name) {
  if (static_cast<std::size_t>(a.rows()) != r || static_cast<std::size_t>(a.cols()) != c) {
    throw InputError(std::string("matrix ") + name + " must be " + std::to_string(r) + "x" + std::to_string(c));
  }
}

void expect_len(const Vec& a, std::size_t r, const char* name) {
  if (static_cast<std::size_t>(a.size()) != r) {
    throw InputError(std::string("vector ") + name + " must have length " + std::to_string(r));
  }
}

Vec sig(const Vec& z) { return z.unaryExpr([](double t) { return sigmoid(t); }); }
Vec th(const Vec& z) { return z.array().tanh().matrix(); }

Vec gate_of(Activation a, const Vec& z) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::sigmoid: return sig(z);
    case Activation::tanh: return th(z);
  }
  return z;
}

/// Writes the blocks of an affine vertex: one matrix per input, in order, then the bias.
void set_affine(const WeightedNetwork& net, Vec& w, std::size_t v, const std::vector<const Mat*>& blocks,
                const Vec* bias) {
  const auto rows = static_cast<Eigen::Index>(net.node(v).dim);
  const auto cols = static_cast<Eigen::Index>(net.in_dim(v));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> wm(
      w.data() + net.offset(v), rows, cols);
  Eigen::Index at = 0;
  for (const Mat* b : blocks) {
    wm.middleCols(at, b->cols()) = *b;
    at += b->cols();
  }
  if (bias != nullptr) w.segment(static_cast<Eigen::Index>(net.offset(v)) + rows * cols, rows) = *bias;
}

struct Builder {
  const site::SiteGraph& g;
  std::vector<NodeSpec> nodes;

  explicit Builder(const site::SiteGraph& graph) : g(graph), nodes(graph.size()) {}

  std::size_t id(const std::string& name) const { return g.index_of(name); }

  void input(const std::string& name, std::size_t dim) {
    NodeSpec& s = nodes[id(name)];
    s.op = Op::input;
    s.dim = dim;
  }

  void node(const std::string& name, Op op, std::size_t dim, const std::vector<std::string>& ins,
            Activation act = Activation::identity, bool bias = false) {
    NodeSpec& s = nodes[id(name)];
    s.op = op;
    s.act = act;
    s.bias = bias;
    s.dim = dim;
    s.inputs.clear();
    for (const auto& in : ins) s.inputs.push_back(id(in));
  }
};

CellNetwork finish(WeightedNetwork net, const std::string& output) {
  CellNetwork out{std::move(net), Vec(), {}, 0};
  out.w = Vec::Zero(static_cast<Eigen::Index>(out.net.parameter_count()));
  for (std::size_t v : out.net.input_vertices()) out.input_names.push_back(out.net.graph().vertices[v]);
  out.output = out.net.graph().index_of(output);
  return out;
}

void require_vertices(const site::SiteGraph& g, const std::vector<std::string>& names, const char* cell) {
  for (const auto& n : names) {
    bool found = false;
    for (const auto& v : g.vertices) found = found || v == n;
    if (!found) throw InputError(std::string(cell) + " graph lacks vertex '" + n + "'");
  }
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t m, std::size_t n) {
  LstmParams p;
  p.m = m;
  p.n = n;
  p.Wf = p.Wi = p.Wo = p.Wh = zero_mat(m, n);
  p.Uf = p.Ui = p.Uo = p.Uh = zero_mat(m, m);
  p.bf = p.bi = p.bo = p.bh = zero_vec(m);
  return p;
}

LstmParams LstmParams::random(std::mt19937_64& rng, std::size_t m, std::size_t n, double scale) {
  LstmParams p;
  p.m = m;
  p.n = n;
  for (Mat* w : {&p.Wf, &p.Wi, &p.Wo, &p.Wh}) *w = random_mat(rng, m, n, scale);
  for (Mat* u : {&p.Uf, &p.Ui, &p.Uo, &p.Uh}) *u = random_mat(rng, m, m, scale);
  for (Vec* b : {&p.bf, &p.bi, &p.bo, &p.bh}) *b = random_vec(rng, m, scale);
  return p;
}

std::size_t LstmParams::weight_count() const {
  std::size_t c = 0;
  for (const Mat* a : {&Wf, &Uf, &Wi, &Ui, &Wo, &Uo, &Wh, &Uh}) c += static_cast<std::size_t>(a->size());
  return c;
}

void LstmParams::validate() const {
  for (const Mat* w : {&Wf, &Wi, &Wo, &Wh}) expect_shape(*w, m, n, "W");
  for (const Mat* u : {&Uf, &Ui, &Uo, &Uh}) expect_shape(*u, m, m, "U");
  for (const Vec* b : {&bf, &bi, &bo, &bh}) expect_len(*b, m, "b");
}

LstmState lstm_step(const LstmParams& p, const Vec& x, const Vec& h_prev, const Vec& c_prev) {
  p.validate();
  expect_len(x, p.n, "x");
  expect_len(h_prev, p.m, "h_prev");
  expect_len(c_prev, p.m, "c_prev");
  const Vec f = sig(p.Wf * x + p.Uf * h_prev + p.bf);
  const Vec i = sig(p.Wi * x + p.Ui * h_prev + p.bi);
  const Vec o = sig(p.Wo * x + p.Uo * h_prev + p.bo);
  const Vec ht = th(p.Wh * x + p.Uh * h_prev + p.bh);
  LstmState s;
  s.c = c_prev.cwiseProduct(f) + i.cwiseProduct(ht);
  s.h = o.cwiseProduct(th(s.c));
  return s;
}

GruParams GruParams::zeros(std::size_t m, std::size_t n) {
  GruParams p;
  p.m = m;
  p.n = n;
  p.Wz = p.Wr = p.Wx = zero_mat(m, n);
  p.Uz = p.Ur = p.Ux = zero_mat(m, m);
  p.bz = p.br = p.bx = zero_vec(m);
  return p;
}

GruParams GruParams::random(std::mt19937_64& rng, std::size_t m, std::size_t n, double scale) {
  GruParams p;
  p.m = m;
  p.n = n;
  for (Mat* w : {&p.Wz, &p.Wr, &p.Wx}) *w = random_mat(rng, m, n, scale);
  for (Mat* u : {&p.Uz, &p.Ur, &p.Ux}) *u = random_mat(rng, m, m, scale);
  for (Vec* b : {&p.bz, &p.br, &p.bx}) *b = random_vec(rng, m, scale);
  return p;
}

std::size_t GruParams::weight_count() const {
  std::size_t c = 0;
  for (const Mat* a : {&Wz, &Uz, &Wr, &Ur, &Wx, &Ux}) c += static_cast<std::size_t>(a->size());
  return c;
}

void GruParams::validate() const {
  for (const Mat* w : {&Wz, &Wr, &Wx}) expect_shape(*w, m, n, "W");
  for (const Mat* u : {&Uz, &Ur, &Ux}) expect_shape(*u, m, m, "U");
  for (const Vec* b : {&bz, &br, &bx}) expect_len(*b, m, "b");
}

Vec gru_step(const GruParams& p, const Vec& x, const Vec& h_prev) {
  p.validate();
  expect_len(x, p.n, "x");
  expect_len(h_prev, p.m, "h_prev");
  const Vec z = sig(p.Wz * x + p.Uz * h_prev + p.bz);
  const Vec r = sig(p.Wr * x + p.Ur * h_prev + p.br);
  const Vec cand = th(p.Wx * x + p.Ux * r.cwiseProduct(h_prev) + p.bx);
  return (Vec::Ones(z.size()) - z).cwiseProduct(h_prev) + z.cwiseProduct(cand);
}

Mgu2Params Mgu2Params::zeros(std::size_t m, std::size_t n) {
  Mgu2Params p;
  p.m = m;
  p.n = n;
  p.Uz = p.U = zero_mat(m, m);
  p.W = zero_mat(m, n);
  p.b = zero_vec(m);
  return p;
}

Mgu2Params Mgu2Params::random(std::mt19937_64& rng, std::size_t m, std::size_t n, double scale) {
  Mgu2Params p;
  p.m = m;
  p.n = n;
  p.Uz = random_mat(rng, m, m, scale);
  p.W = random_mat(rng, m, n, scale);
  p.U = random_mat(rng, m, m, scale);
  p.b = random_vec(rng, m, scale);
  return p;
}

std::size_t Mgu2Params::weight_count() const { return static_cast<std::size_t>(Uz.size() + W.size() + U.size()); }

void Mgu2Params::validate() const {
  expect_shape(Uz, m, m, "Uz");
  expect_shape(W, m, n, "W");
  expect_shape(U, m, m, "U");
  expect_len(b, m, "b");
}

Vec mgu2_step(const Mgu2Params& p, const Vec& x, const Vec& h_prev) {
  p.validate();
  expect_len(x, p.n, "x");
  expect_len(h_prev, p.m, "h_prev");
  const Vec z = sig(p.Uz * h_prev);
  const Vec cand = th(p.W * x + p.U * z.cwiseProduct(h_prev) + p.b);
  return (Vec::Ones(z.size()) - z).cwiseProduct(h_prev) + z.cwiseProduct(cand);
}

CubicParams CubicParams::zeros(std::size_t m, std::size_t n) {
  CubicParams p;
  p.m = m;
  p.n = n;
  p.alpha = zero_mat(m, m);
  p.U = p.V = zero_mat(m, n);
  return p;
}

CubicParams CubicParams::identity_regime(std::size_t m, std::size_t n) {
  CubicParams p = zeros(m, n);
  p.alpha = Mat::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  p.gate = Activation::identity;
  return p;
}

CubicParams CubicParams::random(std::mt19937_64& rng, std::size_t m, std::size_t n, double scale) {
  CubicParams p;
  p.m = m;
  p.n = n;
  p.alpha = random_mat(rng, m, m, scale);
  p.U = random_mat(rng, m, n, scale);
  p.V = random_mat(rng, m, n, scale);
  return p;
}

std::size_t CubicParams::weight_count() const { return static_cast<std::size_t>(alpha.size() + U.size() + V.size()); }

void CubicParams::validate() const {
  expect_shape(alpha, m, m, "alpha");
  expect_shape(U, m, n, "U");
  expect_shape(V, m, n, "V");
}

Vec cubic_cell_step(const CubicParams& p, const Vec& x, const Vec& h_prev) {
  p.validate();
  expect_len(x, p.n, "x");
  expect_len(h_prev, p.m, "h_prev");
  const Vec s = gate_of(p.gate, p.alpha * h_prev);
  const Vec u = p.saturate_inputs ? th(p.U * x) : Vec(p.U * x);
  const Vec v = p.saturate_inputs ? th(p.V * x) : Vec(p.V * x);
  return s.array().cube().matrix() + u.cwiseProduct(s) + v;
}

std::size_t lstm_parameter_count(std::size_t m, std::size_t n) { return 4 * m * m + 4 * m * n; }
std::size_t gru_parameter_count(std::size_t m, std::size_t n) { return 3 * m * m + 3 * m * n; }
std::size_t mgu2_parameter_count(std::size_t m, std::size_t n) { return 2 * m * m + m * n; }
std::size_t cubic_parameter_count(std::size_t m, std::size_t n) { return m * m + 2 * m * n; }

std::vector<Vec> CellNetwork::inputs(const std::map<std::string, Vec>& by_name) const {
  std::vector<Vec> out;
  for (const auto& name : input_names) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw InputError("missing value for input '" + name + "'");
    out.push_back(it->second);
  }
  return out;
}

CellNetwork lstm_network(const LstmParams& p, const site::SiteGraph& g) {
  p.validate();
  require_vertices(g, {"c_prev", "h_prev", "x", "f", "i", "o", "h_tilde", "v_f", "v_i", "c", "h"}, "lstm");
  Builder b(g);
  b.input("c_prev", p.m);
  b.input("h_prev", p.m);
  b.input("x", p.n);
  for (const char* gate : {"f", "i", "o"}) b.node(gate, Op::affine, p.m, {"x", "h_prev"}, Activation::sigmoid, true);
  b.node("h_tilde", Op::affine, p.m, {"x", "h_prev"}, Activation::tanh, true);
  b.node("v_f", Op::hadamard, p.m, {"c_prev", "f"});
  b.node("v_i", Op::hadamard, p.m, {"h_tilde", "i"});
  b.node("c", Op::sum, p.m, {"v_f", "v_i"});
  b.node("h", Op::tanh_hadamard, p.m, {"c", "o"});
  for (std::size_t v = 0; v < g.size(); ++v) {
    // Any extra read-out such as y mirrors h.
    if (g.vertices[v] == "y") b.node("y", Op::tanh_hadamard, p.m, {"c", "o"});
  }
  CellNetwork cn = finish(WeightedNetwork::make(g, std::move(b.nodes)), "h");
  set_affine(cn.net, cn.w, b.id("f"), {&p.Wf, &p.Uf}, &p.bf);
  set_affine(cn.net, cn.w, b.id("i"), {&p.Wi, &p.Ui}, &p.bi);
  set_affine(cn.net, cn.w, b.id("o"), {&p.Wo, &p.Uo}, &p.bo);
  set_affine(cn.net, cn.w, b.id("h_tilde"), {&p.Wh, &p.Uh}, &p.bh);
  return cn;
}

CellNetwork gru_network(const GruParams& p, const site::SiteGraph& g) {
  p.validate();
  require_vertices(g, {"h_prev", "x", "z", "r", "v_1mz", "v_r", "v_x", "v_h", "h"}, "gru");
  Builder b(g);
  b.input("h_prev", p.m);
  b.input("x", p.n);
  b.node("z", Op::affine, p.m, {"x", "h_prev"}, Activation::sigmoid, true);
  b.node("r", Op::affine, p.m, {"x", "h_prev"}, Activation::sigmoid, true);
  b.node("v_1mz", Op::one_minus_hadamard, p.m, {"z", "h_prev"});
  b.node("v_r", Op::hadamard, p.m, {"h_prev", "r"});
  b.node("v_x", Op::affine, p.m, {"x", "v_r"}, Activation::tanh, true);
  b.node("v_h", Op::hadamard, p.m, {"v_x", "z"});
  b.node("h", Op::sum, p.m, {"v_h", "v_1mz"});
  CellNetwork cn = finish(WeightedNetwork::make(g, std::move(b.nodes)), "h");
  set_affine(cn.net, cn.w, b.id("z"), {&p.Wz, &p.Uz}, &p.bz);
  set_affine(cn.net, cn.w, b.id("r"), {&p.Wr, &p.Ur}, &p.br);
  set_affine(cn.net, cn.w, b.id("v_x"), {&p.Wx, &p.Ux}, &p.bx);
  return cn;
}

CellNetwork mgu2_network(const Mgu2Params& p, const site::SiteGraph& g) {
  p.validate();
  require_vertices(g, {"h_prev", "x", "z", "v_1mz", "v_r", "v_x", "v_h", "h"}, "mgu2");
  Builder b(g);
  b.input("h_prev", p.m);
  b.input("x", p.n);
  b.node("z", Op::affine, p.m, {"h_prev"}, Activation::sigmoid, false);
  b.node("v_1mz", Op::one_minus_hadamard, p.m, {"z", "h_prev"});
  b.node("v_r", Op::hadamard, p.m, {"h_prev", "z"});
  b.node("v_x", Op::affine, p.m, {"x", "v_r"}, Activation::tanh, true);
  b.node("v_h", Op::hadamard, p.m, {"v_x", "z"});
  b.node("h", Op::sum, p.m, {"v_h", "v_1mz"});
  CellNetwork cn = finish(WeightedNetwork::make(g, std::move(b.nodes)), "h");
  set_affine(cn.net, cn.w, b.id("z"), {&p.Uz}, nullptr);
  set_affine(cn.net, cn.w, b.id("v_x"), {&p.W, &p.U}, &p.b);
  return cn;
}

CellNetwork cubic_network(const CubicParams& p) {
  p.validate();
  site::SiteGraph g;
  g.vertices = {"h_prev", "x", "s", "s3", "u", "us", "v", "h"};
  using site::Role;
  g.roles = {Role::input, Role::input, Role::ordinary, Role::ordinary, Role::ordinary, Role::ordinary, Role::ordinary,
             Role::output};
  auto e = [&](const char* a, const char* c) { g.edges.emplace_back(g.index_of(a), g.index_of(c)); };
  e("h_prev", "s");
  e("s", "s3");
  e("x", "u");
  e("u", "us");
  e("s", "us");
  e("x", "v");
  e("s3", "h");
  e("us", "h");
  e("v", "h");
  const Activation in_act = p.saturate_inputs ? Activation::tanh : Activation::identity;
  Builder b(g);
  b.input("h_prev", p.m);
  b.input("x", p.n);
  b.node("s", Op::affine, p.m, {"h_prev"}, p.gate, false);
  b.node("s3", Op::cube, p.m, {"s"});
  b.node("u", Op::affine, p.m, {"x"}, in_act, false);
  b.node("us", Op::hadamard, p.m, {"u", "s"});
  b.node("v", Op::affine, p.m, {"x"}, in_act, false);
  b.node("h", Op::sum, p.m, {"s3", "us", "v"});
  std::vector<NodeSpec> nodes = std::move(b.nodes);
  CellNetwork cn = finish(WeightedNetwork::make(g, std::move(nodes)), "h");
  set_affine(cn.net, cn.w, g.index_of("s"), {&p.alpha}, nullptr);
  set_affine(cn.net, cn.w, g.index_of("u"), {&p.U}, nullptr);
  set_affine(cn.net, cn.w, g.index_of("v"), {&p.V}, nullptr);
  return cn;
}

LineFit cubic_line_fit(const CubicParams& p, const Vec& x, const Vec& h0, const Vec& dir, std::size_t a,
                       std::size_t degree, double radius, std::size_t samples) {
  if (a >= p.m) throw InputError("component out of range");
  if (samples <= degree) throw InputError("need more samples than the fit degree");
  const auto rows = static_cast<Eigen::Index>(samples);
  const auto cols = static_cast<Eigen::Index>(degree + 1);
  Mat vander(rows, cols);
  Vec y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double t = -radius + 2.0 * radius * static_cast<double>(i) / static_cast<double>(samples - 1);
    double pw = 1.0;
    for (Eigen::Index k = 0; k < cols; ++k, pw *= t) vander(i, k) = pw;
    y[i] = cubic_cell_step(p, x, h0 + t * dir)[static_cast<Eigen::Index>(a)];
  }
  LineFit fit;
  fit.coefficients = vander.colPivHouseholderQr().solve(y);
  fit.max_residual = (vander * fit.coefficients - y).cwiseAbs().maxCoeff();
  return fit;
}

RankProbe gate_jacobian_rank(const CubicParams& p, const Vec& h, double tol) {
  p.validate();
  expect_len(h, p.m, "h");
  const Vec z = p.alpha * h;
  Vec slope(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    switch (p.gate) {
      case Activation::identity: slope[i] = 1.0; break;
      case Activation::sigmoid: slope[i] = sigmoid(z[i]) * (1.0 - sigmoid(z[i])); break;
      case Activation::tanh: slope[i] = 1.0 - std::tanh(z[i]) * std::tanh(z[i]); break;
    }
  }
  const Mat jac = slope.asDiagonal() * p.alpha;
  Eigen::JacobiSVD<Mat> svd(jac);
  const Vec sv = svd.singularValues();
  RankProbe r;
  r.max_singular = sv.size() > 0 ? sv[0] : 0.0;
  r.min_singular = sv.size() > 0 ? sv[sv.size() - 1] : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > tol * std::max(1.0, r.max_singular)) ++r.rank;
  }
  return r;
}

}  // namespace sheafnet::dyn
