#include "specflow/filter/filter.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "specflow/core/dense.hpp"
#include "specflow/dynamics/spectral.hpp"

namespace specflow {
namespace {

using Gauss = boost::math::quadrature::gauss<double, 30>;

// Integrand phases per panel kept below this many radians.
constexpr double kPhasePerPanel = 40.0;

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

template <class F>
double gauss_panel(F&& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const auto& x = Gauss::abscissa();
  const auto& wt = Gauss::weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += wt[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
  return half * sum;
}

int next_pow2(long v) {
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

}  // namespace

double effective_gap(double declared_gap, bool clamp) {
  if (!(declared_gap > 0.0)) throw InvalidArgument("gap must be positive");
  return clamp ? std::min(declared_gap, 1.0) : declared_gap;
}

FilterFunction FilterFunction::build(const FilterParams& params) {
  if (!(params.gap > 0.0)) throw InvalidArgument("filter gap must be positive");
  if (params.order < 2) throw InvalidArgument("filter order must be at least 2");
  if (!(params.budget > 0.0 && params.budget <= 1.0)) throw InvalidArgument("frequency budget must lie in (0, 1]");
  if (!(params.tol > 0.0 && params.tol < 1.0)) throw InvalidArgument("filter tolerance must lie in (0, 1)");

  FilterFunction f;
  f.params_ = params;
  const int n = params.order;
  double harmonic = 0.0;
  for (int k = 1; k <= n; ++k) harmonic += 1.0 / (k * k);
  for (int k = 1; k <= n; ++k) f.a_.push_back(0.5 * params.budget * params.gap / (k * k) / harmonic);

  // w is c times the characteristic function of S = Σ_n (U_n + U'_n) with
  // U_n, U'_n uniform on [−a_n, a_n]. The density of S is a signed sum of
  // truncated powers over the 3^N ways of shifting each triangle.
  f.shifts_ = {0.0L};
  f.signs_ = {1.0L};
  long double scale = 1.0L;
  for (int k = 1; k <= 2 * n - 1; ++k) scale *= k;
  for (double a : f.a_) {
    std::vector<long double> sh, sg;
    for (std::size_t i = 0; i < f.shifts_.size(); ++i) {
      sh.push_back(f.shifts_[i] + 2.0L * a);
      sg.push_back(f.signs_[i]);
      sh.push_back(f.shifts_[i]);
      sg.push_back(-2.0L * f.signs_[i]);
      sh.push_back(f.shifts_[i] - 2.0L * a);
      sg.push_back(f.signs_[i]);
    }
    f.shifts_ = std::move(sh);
    f.signs_ = std::move(sg);
    scale *= (2.0L * a) * (2.0L * a);
  }
  f.density_scale_ = 1.0L / scale;
  const long double p0 = f.density(0.0L);
  f.c_ = static_cast<double>(1.0L / (2.0L * std::numbers::pi_v<long double> * p0));

  double prod_a2 = 1.0;
  for (double a : f.a_) prod_a2 *= a * a;
  const int m = 2 * n - 1;
  f.t_max_ = std::pow(2.0 * f.c_ / (prod_a2 * m * params.tol), 1.0 / m);
  f.tail_model_ = f.c_ * std::ldexp(1.0, -n) / (prod_a2 * m * std::pow(f.t_max_, m));

  const double max_len = std::min(1.0, 1.0 / (params.budget * params.gap));
  const long panels = std::max(1L, static_cast<long>(std::ceil(f.t_max_ / max_len)));
  f.panel_len_ = f.t_max_ / static_cast<double>(panels);
  f.tail_above_.assign(static_cast<std::size_t>(panels) + 1, 0.0);
  for (long p = panels - 1; p >= 0; --p) {
    const double lo = p * f.panel_len_;
    f.tail_above_[static_cast<std::size_t>(p)] =
        f.tail_above_[static_cast<std::size_t>(p) + 1] +
        gauss_panel([&f](double t) { return f.w(t); }, lo, lo + f.panel_len_);
  }
  f.V_above_.assign(f.tail_above_.size(), 0.0);
  for (long p = panels - 1; p >= 0; --p) {
    const double lo = p * f.panel_len_;
    f.V_above_[static_cast<std::size_t>(p)] =
        f.V_above_[static_cast<std::size_t>(p) + 1] +
        gauss_panel([&f](double t) { return f.W(t); }, lo, lo + f.panel_len_);
  }
  f.cache_ = std::make_shared<Cache>();
  return f;
}

long double FilterFunction::density(long double x) const {
  const int power = 2 * params_.order - 1;
  long double sum = 0.0L;
  for (std::size_t i = 0; i < shifts_.size(); ++i) {
    const long double u = x + shifts_[i];
    if (u > 0.0L) sum += signs_[i] * std::pow(u, power);
  }
  return sum * density_scale_;
}

double FilterFunction::w(double t) const {
  double v = c_;
  for (double a : a_) {
    const double s = sinc(a * t);
    v *= s * s;
  }
  return v;
}

double FilterFunction::W(double t) const {
  if (std::abs(t) > t_max_) throw InvalidArgument("W evaluated beyond the cutoff T");
  if (t == 0.0) return 0.0;
  if (t < 0.0) return -W(-t);
  const auto last = tail_above_.size() - 2;
  const auto p = std::min(static_cast<std::size_t>(t / panel_len_), last);
  const double edge = static_cast<double>(p + 1) * panel_len_;
  const double partial = gauss_panel([this](double u) { return w(u); }, t, edge);
  return tail_above_[p + 1] + partial + tail_model_;
}

double FilterFunction::V(double t) const {
  if (std::abs(t) > t_max_) throw InvalidArgument("V evaluated beyond the cutoff T");
  const double u = std::abs(t);
  const auto last = V_above_.size() - 2;
  const auto p = std::min(static_cast<std::size_t>(u / panel_len_), last);
  const double edge = static_cast<double>(p + 1) * panel_len_;
  return V_above_[p + 1] + gauss_panel([this](double v) { return W(v); }, u, edge);
}

double FilterFunction::fourier_w(double omega) const {
  const double x = std::abs(omega);
  if (x >= params_.budget * params_.gap) return 0.0;
  return static_cast<double>(density(x) / density(0.0L));
}

Complex FilterFunction::fourier_W(double omega) const {
  if (omega == 0.0) return 0.0;
  return Complex{0.0, (1.0 - fourier_w(omega)) / omega};
}

double FilterFunction::tail_bound() const {
  double prod_a2 = 1.0;
  for (double a : a_) prod_a2 *= a * a;
  const int m = 2 * params_.order - 1;
  return 2.0 * c_ / (prod_a2 * m * std::pow(t_max_, m));
}

int FilterFunction::initial_panels(double omega_max) const {
  const double omega = std::max(omega_max, params_.budget * params_.gap);
  return std::max(16, next_pow2(static_cast<long>(std::ceil(2.0 * t_max_ * omega / kPhasePerPanel))));
}

const QuadratureRule& FilterFunction::rule(int panels) const {
  if (panels < 2 || panels % 2 != 0) throw InvalidArgument("panel count must be even and at least 2");
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto& slot = cache_->rules[panels];
  if (slot) return *slot;
  auto r = std::make_unique<QuadratureRule>();
  r->panels = panels;
  const int half = panels / 2;
  const double len = t_max_ / half;
  const auto& x = Gauss::abscissa();
  const auto& wt = Gauss::weights();
  const std::size_t per = 2 * x.size();
  r->nodes.resize(per * static_cast<std::size_t>(half));
  r->base.resize(r->nodes.size());
  for (int p = 0; p < half; ++p) {
    const double mid = (p + 0.5) * len;
    std::size_t k = per * static_cast<std::size_t>(p);
    for (std::size_t i = x.size(); i-- > 0;) {
      r->nodes[k] = mid - 0.5 * len * x[i];
      r->base[k++] = 0.5 * len * wt[i];
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      r->nodes[k] = mid + 0.5 * len * x[i];
      r->base[k++] = 0.5 * len * wt[i];
    }
  }
  r->w_weights.resize(r->nodes.size());
  r->W_weights.resize(r->nodes.size());
  r->V_weights.resize(r->nodes.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t q = 0; q < static_cast<std::int64_t>(r->nodes.size()); ++q) {
    const auto i = static_cast<std::size_t>(q);
    r->w_weights[i] = r->base[i] * w(r->nodes[i]);
    r->W_weights[i] = r->base[i] * W(r->nodes[i]);
    r->V_weights[i] = r->base[i] * V(r->nodes[i]);
  }
  slot = std::move(r);
  return *slot;
}

double FilterFunction::normalization_residual(int panels) const {
  const auto& r = rule(panels);
  double sum = 0.0;
  for (double v : r.w_weights) sum += v;
  return std::abs(2.0 * sum - 1.0);
}

QuadResult quad_against(const FilterFunction& f, const std::function<Matrix(double)>& kernel,
                        FilterMode mode, double omega_max, double tol, int max_panels) {
  auto integrate = [&](int panels) {
    const auto& r = f.rule(panels);
    const auto& weights = mode == FilterMode::w ? r.w_weights : mode == FilterMode::W ? r.W_weights : r.V_weights;
    const double sign = mode == FilterMode::W ? -1.0 : 1.0;
    const std::size_t per = r.nodes.size() / static_cast<std::size_t>(panels / 2);
    std::vector<Matrix> partial(static_cast<std::size_t>(panels / 2));
    // Panels in parallel, summed afterwards in panel order for reproducibility.
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t p = 0; p < static_cast<std::int64_t>(partial.size()); ++p) {
      Matrix acc;
      for (std::size_t k = static_cast<std::size_t>(p) * per; k < (static_cast<std::size_t>(p) + 1) * per; ++k) {
        const Matrix term = weights[k] * (kernel(r.nodes[k]) + sign * kernel(-r.nodes[k]));
        if (acc.size() == 0)
          acc = term;
        else
          acc += term;
      }
      partial[static_cast<std::size_t>(p)] = std::move(acc);
    }
    Matrix total = partial.front();
    for (std::size_t p = 1; p < partial.size(); ++p) total += partial[p];
    return total;
  };
  int panels = std::min(f.initial_panels(omega_max), std::max(2, max_panels / 2));
  Matrix prev = integrate(panels);
  while (true) {
    if (2 * panels > max_panels)
      throw ConvergenceError("quadrature did not settle below " + std::to_string(max_panels) + " panels");
    panels *= 2;
    Matrix next = integrate(panels);
    const double change = max_norm(next - prev);
    if (change < tol) return {std::move(next), panels, change};
    prev = std::move(next);
  }
}

double verify_fourier_offgap(const FilterFunction& f, const Matrix& h, const Matrix& a) {
  const SpectralData spec = diagonalize(h);
  const Eigen::Index n = spec.energies.size();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double e = std::abs(spec.energies(i) - spec.energies(j));
      if (e > kGroundClusterTol && e < 2.0 * f.gap())
        throw InvalidArgument("level splitting " + std::to_string(e) + " is below 2g = " +
                              std::to_string(2.0 * f.gap()) +
                              "; the off-gap identity is only checked with that margin");
    }
  const double omega_max = spec.energies(n - 1) - spec.energies(0);
  const auto inv = quad_against(f, [&](double t) { return heisenberg_evolve(spec, a, t); }, FilterMode::W,
                                omega_max);
  Matrix off = spec.to_eigenbasis(a);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(spec.energies(i) - spec.energies(j)) <= kGroundClusterTol) off(i, j) = 0.0;
  const Matrix lhs = Complex{0.0, -1.0} * commutator(h, inv.value);
  return operator_norm(Matrix(lhs - spec.from_eigenbasis(off)));
}

}  // namespace specflow
