#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sheafnet::dyn {

enum class RootRegime { three_real_roots, boundary, one_real_root };
std::string to_string(RootRegime r);

/// 4u^3 + 27v^2 for z^3 + u z + v.
double discriminant(double u, double v);
RootRegime classify_discriminant(double u, double v);

/// Real roots of z^3 + u z + v, ascending, repeated by multiplicity when the
/// discriminant is exactly zero.
std::vector<double> cubic_roots(double u, double v);

/// Number of distinct real roots from the eigenvalues of the companion matrix.
std::size_t companion_real_root_count(double u, double v, double imag_tol = 1e-7);

using IntMat2 = Eigen::Matrix<std::int64_t, 2, 2>;

struct BraidRep {
  IntMat2 sigma1;
  IntMat2 sigma2;

  /// sigma1 = [[1,1],[0,1]], sigma2 = [[1,0],[-1,1]].
  static BraidRep standard();
};

struct BraidReport {
  bool determinants_one = false;
  bool relation_holds = false;
  IntMat2 lhs;
  IntMat2 rhs;
  /// (sigma1 sigma2)^3.
  IntMat2 center;
  /// +1 or -1 when the centre element is +-Identity, else 0.
  int center_sign = 0;
  bool sixth_power_identity = false;
};

BraidReport braid_relation_check(const BraidRep& rep);

struct CuspRow {
  double u, v, delta;
  std::size_t root_count;
};

/// Grid of (u, v) over [-range, range]^2, root counts from cubic_roots.
std::vector<CuspRow> cusp_scan(std::size_t grid, double range = 2.0);

}  // namespace sheafnet::dyn
