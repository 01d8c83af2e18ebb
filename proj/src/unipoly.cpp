#include "lcm/unipoly.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>

#include "lcm/errors.hpp"

namespace lcm {

void UniPoly::normalize() {
  while (!coeff.empty() && coeff.back() == 0) coeff.pop_back();
}

Rational UniPoly::evaluate(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double UniPoly::evaluate(double x) const {
  double acc = 0;
  for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) acc = acc * x + to_double(*it);
  return acc;
}

UniPoly UniPoly::derivative() const {
  std::vector<Rational> d;
  for (std::size_t i = 1; i < coeff.size(); ++i) d.push_back(coeff[i] * BigInt(i));
  return UniPoly(std::move(d));
}

UniPoly interpolate_univariate(const std::vector<std::pair<Rational, Rational>>& points) {
  if (points.empty()) throw InputError("interpolation needs at least one point");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i].first == points[j].first)
        throw InputError("interpolation abscissae must be distinct");

  std::size_t m = points.size();
  std::vector<Rational> acc(m, Rational(0));
  std::vector<Rational> basis;  // coefficients of prod (x - x_j) for j != i
  for (std::size_t i = 0; i < m; ++i) {
    basis.assign(1, Rational(1));
    Rational denom = 1;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      // multiply basis by (x - x_j)
      basis.push_back(Rational(0));
      for (std::size_t k = basis.size() - 1; k >= 1; --k)
        basis[k] = basis[k - 1] - points[j].first * basis[k];
      basis[0] = -points[j].first * basis[0];
      denom *= points[i].first - points[j].first;
    }
    Rational scale = points[i].second / denom;
    for (std::size_t k = 0; k < basis.size(); ++k) acc[k] += scale * basis[k];
  }
  return UniPoly(std::move(acc));
}

namespace {

std::complex<double> horner(const std::vector<double>& c, std::complex<double> x) {
  std::complex<double> acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// A few Newton steps; stops early if the derivative underflows (multiple
// root) or the update stops improving.
std::complex<double> polish(const std::vector<double>& c, const std::vector<double>& dc,
                            std::complex<double> z) {
  for (int iter = 0; iter < 8; ++iter) {
    std::complex<double> f = horner(c, z);
    std::complex<double> df = horner(dc, z);
    if (std::abs(df) < 1e-14 * std::max(1.0, std::abs(f))) break;
    std::complex<double> step = f / df;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
    z -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

std::vector<std::complex<double>> all_roots(std::vector<double> c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  if (c.empty()) throw InputError("real_roots: zero polynomial");
  int deg = static_cast<int>(c.size()) - 1;
  if (deg == 0) return {};
  double lead = c.back();
  for (double& v : c) v /= lead;

  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<std::size_t>(i)];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);

  std::vector<double> dc;
  for (std::size_t i = 1; i < c.size(); ++i) dc.push_back(c[i] * static_cast<double>(i));

  std::vector<std::complex<double>> roots;
  for (int i = 0; i < deg; ++i)
    roots.push_back(polish(c, dc, es.eigenvalues()(i)));
  return roots;
}

}  // namespace

std::vector<double> real_roots(const std::vector<double>& coeff_low_to_high) {
  std::vector<double> out;
  for (const auto& z : all_roots(coeff_low_to_high)) {
    if (std::abs(z.imag()) <= 1e-8 * std::max(1.0, std::abs(z))) out.push_back(z.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> real_roots(const UniPoly& p) {
  if (p.is_zero()) throw InputError("real_roots: zero polynomial");
  std::vector<double> c;
  for (const Rational& q : p.coeff) c.push_back(to_double(q));
  return real_roots(c);
}

std::optional<std::vector<double>> recover_multiset(const std::vector<double>& e) {
  if (e.empty()) throw InputError("recover_multiset: need at least one value");
  std::size_t m = e.size();
  // p(z) = z^m - e1 z^{m-1} + e2 z^{m-2} - ... + (-1)^m e_m
  std::vector<double> c(m + 1, 0.0);
  c[m] = 1.0;
  double sign = -1.0;
  for (std::size_t t = 1; t <= m; ++t) {
    c[m - t] = sign * e[t - 1];
    sign = -sign;
  }
  std::vector<double> xs;
  for (const auto& z : all_roots(c)) {
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) return std::nullopt;
    xs.push_back(z.real());
  }
  std::sort(xs.begin(), xs.end());

  // Confirm the multiset reproduces the inputs: guards against the lossy
  // float path silently returning a wrong inverse.
  std::vector<double> esp(m + 1, 0.0);
  esp[0] = 1.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = std::min(i + 1, m); j >= 1; --j) esp[j] += xs[i] * esp[j - 1];
  for (std::size_t t = 1; t <= m; ++t)
    if (std::abs(esp[t] - e[t - 1]) > 1e-6 * std::max(1.0, std::abs(e[t - 1])))
      return std::nullopt;
  return xs;
}

}  // namespace lcm
