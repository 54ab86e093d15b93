#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "specflow/core/types.hpp"

namespace specflow {

struct FilterParams {
  double gap = 1.0;     // g
  int order = 6;        // N, number of sinc² factors
  double budget = 0.9;  // η, Fourier support is [−ηg, ηg]
  double tol = 1e-8;    // bound on the truncated mass ∫_{|t|>T} w
};

/// g = min(g0, 1) unless the clamp is switched off.
double effective_gap(double declared_gap, bool clamp);

/// Gauss-Legendre panels on [−T, T], symmetric about 0 with a panel boundary
/// at 0. Only the positive half is stored; the negative half is its mirror.
struct QuadratureRule {
  int panels = 0;                 // on the whole of [−T, T]
  std::vector<double> nodes;      // t_q > 0, increasing
  std::vector<double> base;       // Gauss-Legendre weights
  std::vector<double> w_weights;  // base · w(t_q), used for even integrands
  std::vector<double> W_weights;  // base · W(t_q), used for odd integrands
  std::vector<double> V_weights;  // base · V(t_q), used for even integrands
};

/// w and V are even, W is odd.
enum class FilterMode { w, W, V };

/// The weight pair (w, W):
///   w(t) = c · Π_{n≤N} sinc²(a_n t),  a_n ∝ 1/n²,  2 Σ a_n = ηg,
///   W(t) = ∫_t^∞ w for t ≥ 0, extended oddly,
///   V(t) = ∫_{|t|}^T W, so that ∫ W(t) ∫_0^t f(u) du dt = ∫ V(u) f(u) du on [−T, T].
/// w is a probability density whose Fourier transform vanishes outside [−ηg, ηg].
class FilterFunction {
 public:
  static FilterFunction build(const FilterParams& params);

  const FilterParams& params() const { return params_; }
  double gap() const { return params_.gap; }
  int order() const { return params_.order; }
  const std::vector<double>& coefficients() const { return a_; }
  double normalization() const { return c_; }
  /// Time cutoff T: the tail model bounds ∫_{|t|>T} w by tol.
  double cutoff() const { return t_max_; }

  double w(double t) const;
  /// Throws InvalidArgument for |t| > T.
  double W(double t) const;
  /// Throws InvalidArgument for |t| > T.
  double V(double t) const;

  /// ∫ w(t) e^{iωt} dt, in closed form.
  double fourier_w(double omega) const;
  /// ∫ W(t) e^{iωt} dt = i(1 − ∫w e^{iωt})/ω, in closed form.
  Complex fourier_W(double omega) const;

  /// Tail-model bound 2c / (Π a_n² (2N−1) T^{2N−1}) on ∫_{|t|>T} w.
  double tail_bound() const;

  /// Panel count for integrands oscillating up to angular frequency `omega_max`.
  int initial_panels(double omega_max) const;
  /// Cached rule with `panels` panels on [−T, T] (even, ≥ 2).
  const QuadratureRule& rule(int panels) const;

  /// |Σ w over the rule − 1|.
  double normalization_residual(int panels) const;

 private:
  FilterFunction() = default;
  long double density(long double x) const;  // p_S: w's Fourier transform up to scale

  FilterParams params_;
  std::vector<double> a_;
  double c_ = 0.0;
  double t_max_ = 0.0;
  double panel_len_ = 0.0;
  double tail_model_ = 0.0;  // estimate of ∫_T^∞ w added to W
  long double density_scale_ = 0.0L;
  std::vector<long double> shifts_;
  std::vector<long double> signs_;
  std::vector<double> tail_above_;  // ∫_{b_p}^T w at base panel edges b_p
  std::vector<double> V_above_;     // ∫_{b_p}^T W at base panel edges b_p

  struct Cache {
    std::mutex mutex;
    std::map<int, std::unique_ptr<QuadratureRule>> rules;
  };
  std::shared_ptr<Cache> cache_;
};

struct QuadResult {
  Matrix value;
  int panels = 0;
  double change = 0.0;  // max-norm difference to the previous doubling
};

/// ∫ f(t) K(t) dt over [−T, T] with f = w or W, doubling the panels until the
/// result changes by less than `tol` in max-norm. Throws ConvergenceError past
/// `max_panels`.
QuadResult quad_against(const FilterFunction& f, const std::function<Matrix(double)>& kernel,
                        FilterMode mode, double omega_max = 0.0, double tol = 1e-8,
                        int max_panels = 1 << 10);

/// For a Hermitian H whose distinct eigenvalues are all at least 2g apart,
/// returns ‖−i[H, 𝓘(A)] − offdiag(A)‖ where 𝓘(A) = ∫ W(t) e^{itH} A e^{−itH} dt
/// is computed by time-domain quadrature and offdiag is taken in H's eigenbasis.
double verify_fourier_offgap(const FilterFunction& f, const Matrix& h, const Matrix& a);

}  // namespace specflow
