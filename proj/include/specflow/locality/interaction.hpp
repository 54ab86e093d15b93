#pragma once

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specflow/core/lattice.hpp"
#include "specflow/core/majorana.hpp"

namespace specflow {

/// A finite map from site sets M to even, self-adjoint local operators Φ(M)
/// supported in M.
class Interaction {
 public:
  using Terms = std::map<SiteSet, MajoranaPolynomial>;

  explicit Interaction(Lattice lattice) : lattice_(std::move(lattice)) {}

  const Lattice& lattice() const { return lattice_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Adds `op` to Φ(M). Terms that cancel to zero are dropped.
  void add(SiteSet m, const MajoranaPolynomial& op);
  /// Φ(M), or zero if M carries no term.
  MajoranaPolynomial term(SiteSet m) const;
  /// Σ_M Φ(M).
  MajoranaPolynomial total() const;

  /// Throws InvalidArgument unless every term is supported in its set, even,
  /// and self-adjoint to `tol`, and Φ(∅) = 0.
  void validate(double tol = 1e-12) const;

  Interaction& operator+=(const Interaction& other);
  Interaction& operator*=(double c);
  friend Interaction operator+(Interaction a, const Interaction& b) { return a += b; }
  friend Interaction operator*(double c, Interaction a) { return a *= c; }

 private:
  Lattice lattice_;
  Terms terms_;
};

/// A one-parameter family s ↦ Φ_s on [s0, s1] with an optional analytic derivative.
class InteractionFamily {
 public:
  using Builder = std::function<Interaction(double)>;

  InteractionFamily(double s0, double s1, Builder family, std::optional<Builder> derivative = {},
                    bool constant = false);

  /// Piecewise-linear interpolation through (s, Φ_s) samples sorted by s; the
  /// derivative is the slope of the containing segment.
  static InteractionFamily tabulated(std::vector<std::pair<double, Interaction>> samples);

  double s0() const { return s0_; }
  double s1() const { return s1_; }
  bool constant() const { return constant_; }
  bool has_analytic_derivative() const { return derivative_.has_value(); }

  Interaction at(double s) const;
  /// Analytic derivative if present, otherwise a central difference with step
  /// `fd_step`; a constant family returns zero.
  Interaction derivative(double s, double fd_step = 1e-5) const;

  /// Checks term supports at sample points and, when an analytic derivative
  /// is present, compares it with central differences (h = 1e-4) at three
  /// points. Tabulated families are probed at segment midpoints, away from the kinks.
  void validate() const;

 private:
  double s0_;
  double s1_;
  Builder family_;
  std::optional<Builder> derivative_;
  bool constant_;
  std::vector<double> knots_;  // tabulated families only
};

/// Central difference (Φ_{s+h} − Φ_{s−h}) / 2h, term by term.
Interaction central_difference(const InteractionFamily::Builder& family, double s, double h);

void to_json(nlohmann::json& j, const Interaction& phi);
Interaction interaction_from_json(const Lattice& lattice, const nlohmann::json& j);

}  // namespace specflow
