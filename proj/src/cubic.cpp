#include "sheafnet/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "sheafnet/error.hpp"

namespace sheafnet::dyn {

namespace {

double polish(double z, double u, double v) {
  for (int k = 0; k < 3; ++k) {
    const double f = z * z * z + u * z + v;
    const double d = 3.0 * z * z + u;
    if (d == 0.0 || f == 0.0) break;
    const double next = z - f / d;
    if (std::abs(next * next * next + u * next + v) >= std::abs(f)) break;
    z = next;
  }
  return z;
}

}  // namespace

std::string to_string(RootRegime r) {
  switch (r) {
    case RootRegime::three_real_roots: return "three_real_roots";
    case RootRegime::boundary: return "boundary";
    case RootRegime::one_real_root: return "one_real_root";
  }
  return "boundary";
}

double discriminant(double u, double v) { return 4.0 * u * u * u + 27.0 * v * v; }

RootRegime classify_discriminant(double u, double v) {
  if (!std::isfinite(u) || !std::isfinite(v)) throw InputError("coefficients must be finite");
  const double d = discriminant(u, v);
  if (d < 0) return RootRegime::three_real_roots;
  if (d > 0) return RootRegime::one_real_root;
  return RootRegime::boundary;
}

std::vector<double> cubic_roots(double u, double v) {
  std::vector<double> roots;
  switch (classify_discriminant(u, v)) {
    case RootRegime::boundary:
      if (u == 0.0) {
        roots = {0.0, 0.0, 0.0};
      } else {
        const double simple = 3.0 * v / u;
        const double twice = -1.5 * v / u;
        roots = {simple, twice, twice};
      }
      break;
    case RootRegime::one_real_root: {
      // Cardano with the sum of cube roots arranged to avoid cancellation.
      const double q = v / 2.0;
      const double s = std::sqrt(q * q + u * u * u / 27.0);
      const double a = std::cbrt(-q - std::copysign(s, q));
      const double z = a == 0.0 ? 0.0 : a - u / (3.0 * a);
      roots = {polish(z, u, v)};
      break;
    }
    case RootRegime::three_real_roots: {
      const double r = 2.0 * std::sqrt(-u / 3.0);
      const double arg = std::clamp(1.5 * v / u * std::sqrt(-3.0 / u), -1.0, 1.0);
      const double phi = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k) roots.push_back(polish(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0), u, v));
      break;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::size_t companion_real_root_count(double u, double v, double imag_tol) {
  Eigen::Matrix3d c;
  c << 0, 0, -v, 1, 0, -u, 0, 1, 0;
  const Eigen::Vector3cd ev = Eigen::EigenSolver<Eigen::Matrix3d>(c, false).eigenvalues();
  const double scale = std::max({1.0, std::abs(u), std::abs(v)});
  std::size_t real = 0;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(ev[i].imag()) <= imag_tol * scale) ++real;
  }
  return real;
}

BraidRep BraidRep::standard() {
  BraidRep b;
  b.sigma1 << 1, 1, 0, 1;
  b.sigma2 << 1, 0, -1, 1;
  return b;
}

BraidReport braid_relation_check(const BraidRep& rep) {
  BraidReport r;
  auto det = [](const IntMat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); };
  r.determinants_one = det(rep.sigma1) == 1 && det(rep.sigma2) == 1;
  r.lhs = rep.sigma1 * rep.sigma2 * rep.sigma1;
  r.rhs = rep.sigma2 * rep.sigma1 * rep.sigma2;
  r.relation_holds = r.lhs == r.rhs;
  const IntMat2 p = rep.sigma1 * rep.sigma2;
  r.center = p * p * p;
  if (r.center == IntMat2::Identity()) r.center_sign = 1;
  if (r.center == IntMat2(-IntMat2::Identity())) r.center_sign = -1;
  r.sixth_power_identity = r.center * r.center == IntMat2::Identity();
  return r;
}

std::vector<CuspRow> cusp_scan(std::size_t grid, double range) {
  if (grid < 2) throw InputError("grid needs at least two points per axis");
  std::vector<CuspRow> rows;
  rows.reserve(grid * grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double u = -range + 2.0 * range * static_cast<double>(i) / static_cast<double>(grid - 1);
    for (std::size_t j = 0; j < grid; ++j) {
      const double v = -range + 2.0 * range * static_cast<double>(j) / static_cast<double>(grid - 1);
      std::vector<double> roots = cubic_roots(u, v);
      roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
      rows.push_back({u, v, discriminant(u, v), roots.size()});
    }
  }
  return rows;
}

}  // namespace sheafnet::dyn
