#pragma once

#include <cstddef>
#include <map>
#include <random>

#include "sheafnet/dynamics.hpp"

namespace sheafnet::dyn {

/// Gate matrices act on x (W, m x n) and on h_prev (U, m x m).
struct LstmParams {
  std::size_t m = 1, n = 1;
  Mat Wf, Uf, Wi, Ui, Wo, Uo, Wh, Uh;
  Vec bf, bi, bo, bh;

  static LstmParams zeros(std::size_t m, std::size_t n);
  static LstmParams random(std::mt19937_64& rng, std::size_t m, std::size_t n, double scale = 0.5);
  /// Entries of the weight matrices, biases excluded.
  std::size_t weight_count() const;
  void validate() const;
};

struct LstmState {
  Vec h;
  Vec c;
};

LstmState lstm_step(const LstmParams& p, const Vec& x, const Vec& h_prev, const Vec& c_prev);

struct GruParams {
  std::size_t m = 1, n = 1;
  Mat Wz, Uz, Wr, Ur, Wx, Ux;
  Vec bz, br, bx;

  static GruParams zeros(std::size_t m, std::size_t n);
  static GruParams random(std::mt19937_64& rng, std::size_t m, std::size_t n, double scale = 0.5);
  std::size_t weight_count() const;
  void validate() const;
};

Vec gru_step(const GruParams& p, const Vec& x, const Vec& h_prev);

/// Single gate z = sigma(Uz h_prev) with no bias and no dependence on x.
struct Mgu2Params {
  std::size_t m = 1, n = 1;
  Mat Uz, W, U;
  Vec b;

  static Mgu2Params zeros(std::size_t m, std::size_t n);
  static Mgu2Params random(std::mt19937_64& rng, std::size_t m, std::size_t n, double scale = 0.5);
  std::size_t weight_count() const;
  void validate() const;
};

Vec mgu2_step(const Mgu2Params& p, const Vec& x, const Vec& h_prev);

/// eta = s^3 + tanh(U x) (.) s + tanh(V x) with s = gate(alpha h_prev).
/// With identity gate and U = V = 0 this is the organizing centre h_prev^3.
struct CubicParams {
  std::size_t m = 1, n = 1;
  Mat alpha, U, V;
  Activation gate = Activation::sigmoid;
  /// Apply tanh to U x and V x; false keeps them linear.
  bool saturate_inputs = true;

  static CubicParams zeros(std::size_t m, std::size_t n);
  static CubicParams identity_regime(std::size_t m, std::size_t n);
  static CubicParams random(std::mt19937_64& rng, std::size_t m, std::size_t n, double scale = 0.5);
  std::size_t weight_count() const;
  void validate() const;
};

Vec cubic_cell_step(const CubicParams& p, const Vec& x, const Vec& h_prev);

std::size_t lstm_parameter_count(std::size_t m, std::size_t n);
std::size_t gru_parameter_count(std::size_t m, std::size_t n);
std::size_t mgu2_parameter_count(std::size_t m, std::size_t n);
std::size_t cubic_parameter_count(std::size_t m, std::size_t n);

/// A cell as a weighted network over its architecture graph.  The input
/// vertices are listed by name in `input_names`, in the order feedforward
/// expects them.
struct CellNetwork {
  WeightedNetwork net;
  Vec w;
  std::vector<std::string> input_names;
  std::size_t output;

  std::vector<Vec> inputs(const std::map<std::string, Vec>& by_name) const;
};

/// Built on the shipped lstm fixture graph; inputs c_prev, h_prev, x.
CellNetwork lstm_network(const LstmParams& p, const site::SiteGraph& g);
/// Built on the gru fixture graph; inputs h_prev, x.
CellNetwork gru_network(const GruParams& p, const site::SiteGraph& g);
/// Built on the mgu2 fixture graph; inputs h_prev, x.
CellNetwork mgu2_network(const Mgu2Params& p, const site::SiteGraph& g);
/// Generated graph h_prev -> s -> s^3, x -> u, v, joined in a sum.
CellNetwork cubic_network(const CubicParams& p);

struct LineFit {
  /// Coefficients in increasing degree.
  Vec coefficients;
  double max_residual = 0.0;
};

/// Least-squares polynomial fit of component `a` of the cubic cell along
/// h_prev = h0 + t dir, t in [-radius, radius].
LineFit cubic_line_fit(const CubicParams& p, const Vec& x, const Vec& h0, const Vec& dir, std::size_t a,
                       std::size_t degree = 3, double radius = 0.5, std::size_t samples = 41);

struct RankProbe {
  std::size_t rank = 0;
  double min_singular = 0.0;
  double max_singular = 0.0;
};

/// Numerical rank of the Jacobian of h -> gate(alpha h) at h.
RankProbe gate_jacobian_rank(const CubicParams& p, const Vec& h, double tol = 1e-10);

}  // namespace sheafnet::dyn
