#include "specflow/locality/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <nlohmann/json.hpp>

#include "specflow/core/dense.hpp"
#include "specflow/locality/norms.hpp"

namespace specflow {

void Interaction::add(SiteSet m, const MajoranaPolynomial& op) {
  require_same_lattice(lattice_, op.lattice());
  lattice_.check_sites(m);
  if (op.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, op);
  if (!inserted) {
    it->second += op;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

MajoranaPolynomial Interaction::term(SiteSet m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? MajoranaPolynomial(lattice_) : it->second;
}

MajoranaPolynomial Interaction::total() const {
  MajoranaPolynomial sum(lattice_);
  for (const auto& [m, op] : terms_) sum += op;
  return sum;
}

void Interaction::validate(double tol) const {
  for (const auto& [m, op] : terms_) {
    if (m.empty()) throw InvalidArgument("interaction assigns a nonzero term to the empty set");
    if (conditional_expectation(op, m).max_coefficient_distance(op) > 0.0)
      throw InvalidArgument("interaction term is not supported in its site set");
    if (!op.is_even()) throw InvalidArgument("interaction term is not even");
    if (!op.is_self_adjoint(tol)) throw InvalidArgument("interaction term is not self-adjoint");
  }
}

Interaction& Interaction::operator+=(const Interaction& other) {
  require_same_lattice(lattice_, other.lattice_);
  for (const auto& [m, op] : other.terms_) add(m, op);
  return *this;
}

Interaction& Interaction::operator*=(double c) {
  if (c == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, op] : terms_) op *= c;
  return *this;
}

InteractionFamily::InteractionFamily(double s0, double s1, Builder family,
                                     std::optional<Builder> derivative, bool constant)
    : s0_(s0), s1_(s1), family_(std::move(family)), derivative_(std::move(derivative)),
      constant_(constant) {
  if (!(s0_ < s1_)) throw InvalidArgument("family interval must satisfy s0 < s1");
  if (!family_) throw InvalidArgument("family builder is empty");
}

InteractionFamily InteractionFamily::tabulated(std::vector<std::pair<double, Interaction>> samples) {
  if (samples.size() < 2) throw InvalidArgument("a tabulated family needs at least two samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i - 1].first < samples[i].first))
      throw InvalidArgument("tabulated samples must be strictly increasing in s");
  auto table = std::make_shared<std::vector<std::pair<double, Interaction>>>(std::move(samples));
  auto segment = [table](double s) {
    const auto& t = *table;
    std::size_t i = 1;
    while (i + 1 < t.size() && s > t[i].first) ++i;
    return i;
  };
  Builder value = [table, segment](double s) {
    const auto& t = *table;
    const std::size_t i = segment(s);
    const double u = (s - t[i - 1].first) / (t[i].first - t[i - 1].first);
    return (1.0 - u) * t[i - 1].second + u * t[i].second;
  };
  Builder slope = [table, segment](double s) {
    const auto& t = *table;
    const std::size_t i = segment(s);
    const double inv = 1.0 / (t[i].first - t[i - 1].first);
    return inv * t[i].second + (-inv) * t[i - 1].second;
  };
  InteractionFamily fam(table->front().first, table->back().first, value, slope);
  for (const auto& [s, phi] : *table) fam.knots_.push_back(s);
  return fam;
}

Interaction InteractionFamily::at(double s) const { return family_(s); }

Interaction InteractionFamily::derivative(double s, double fd_step) const {
  if (constant_) return Interaction(family_(s0_).lattice());
  if (derivative_) return (*derivative_)(s);
  return central_difference(family_, s, fd_step);
}

Interaction central_difference(const InteractionFamily::Builder& family, double s, double h) {
  Interaction d = family(s + h);
  d += -1.0 * family(s - h);
  d *= 1.0 / (2.0 * h);
  return d;
}

void InteractionFamily::validate() const {
  std::vector<SiteSet> support;
  for (const double u : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double s = s0_ + u * (s1_ - s0_);
    const Interaction phi = family_(s);
    phi.validate();
    std::vector<SiteSet> sets;
    for (const auto& [m, op] : phi.terms()) sets.push_back(m);
    if (u == 0.0)
      support = sets;
    else if (!constant_ && sets != support)
      throw InvalidArgument("term supports of the family change with s");
  }
  if (!derivative_) return;
  constexpr double h = 1e-4;
  std::vector<double> probes;
  if (knots_.empty()) {
    for (const double u : {0.2, 0.5, 0.8}) probes.push_back(s0_ + u * (s1_ - s0_));
  } else {
    const std::size_t segs = knots_.size() - 1;
    for (const std::size_t i : {std::size_t{0}, segs / 2, segs - 1})
      probes.push_back(0.5 * (knots_[i] + knots_[i + 1]));
  }
  for (const double s : probes) {
    const Interaction analytic = (*derivative_)(s);
    const Interaction fd = central_difference(family_, s, h);
    Interaction diff = analytic;
    diff += -1.0 * fd;
    for (const auto& [m, op] : diff.terms())
      if (operator_norm(op) > 1e-6)
        throw InvalidArgument("analytic derivative disagrees with central difference at s = " +
                              std::to_string(s));
  }
}

void to_json(nlohmann::json& j, const Interaction& phi) {
  auto terms = nlohmann::json::array();
  for (const auto& [m, op] : phi.terms()) {
    nlohmann::json o;
    to_json(o, op);
    terms.push_back({{"sites", m.sites()}, {"operator", o}});
  }
  j = nlohmann::json{{"terms", terms}};
}

Interaction interaction_from_json(const Lattice& lattice, const nlohmann::json& j) {
  Interaction phi(lattice);
  for (const auto& t : j.at("terms")) {
    const auto sites = t.at("sites").get<std::vector<int>>();
    MajoranaPolynomial op = polynomial_from_json(t.at("operator"));
    require_same_lattice(lattice, op.lattice());
    phi.add(SiteSet::from(sites), op);
  }
  phi.validate();
  return phi;
}

}  // namespace specflow
