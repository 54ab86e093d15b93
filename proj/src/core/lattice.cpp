#include "specflow/core/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace specflow {

SiteSet SiteSet::of(std::initializer_list<int> sites) {
  return from(std::span<const int>(sites.begin(), sites.size()));
}

SiteSet SiteSet::from(std::span<const int> sites) {
  std::uint32_t bits = 0;
  for (int s : sites) {
    if (s < 0 || s >= 32) throw InvalidArgument("site index out of range: " + std::to_string(s));
    bits |= std::uint32_t{1} << s;
  }
  return SiteSet(bits);
}

std::vector<int> SiteSet::sites() const {
  std::vector<int> out;
  for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

Lattice::Lattice(int dimension, std::vector<int> extent, int orbitals, int max_fermions)
    : dimension_(dimension), extent_(std::move(extent)), orbitals_(orbitals),
      max_fermions_(max_fermions), num_sites_(1) {
  if (dimension_ != 1 && dimension_ != 2) throw InvalidArgument("lattice dimension must be 1 or 2");
  if (static_cast<int>(extent_.size()) != dimension_)
    throw InvalidArgument("lattice extent must list one size per axis");
  if (orbitals_ < 1) throw InvalidArgument("orbitals per site must be >= 1");
  if (max_fermions_ < 1 || max_fermions_ > kMaxFermions)
    throw InvalidArgument("fermion cap must lie in [1, " + std::to_string(kMaxFermions) + "]");
  for (int e : extent_) {
    if (e < 1) throw InvalidArgument("lattice extent must be positive");
    num_sites_ *= e;
  }
  if (num_sites_ * orbitals_ > max_fermions_)
    throw InvalidArgument("Hilbert space 2^" + std::to_string(num_sites_ * orbitals_) +
                          " exceeds the dimension cap 2^" + std::to_string(max_fermions_));
}

std::array<int, 2> Lattice::coords(int site) const {
  check_site(site);
  if (dimension_ == 1) return {site, 0};
  return {site % extent_[0], site / extent_[0]};
}

int Lattice::site_at(std::array<int, 2> c) const {
  if (c[0] < 0 || c[0] >= extent_[0]) throw InvalidArgument("coordinate outside lattice");
  if (dimension_ == 1) return c[0];
  if (c[1] < 0 || c[1] >= extent_[1]) throw InvalidArgument("coordinate outside lattice");
  return c[1] * extent_[0] + c[0];
}

Mask Lattice::modes(SiteSet sites) const {
  Mask m = 0;
  const Mask per_site = (Mask{1} << (2 * orbitals_)) - 1;
  for (int s : sites.sites()) {
    check_site(s);
    m |= per_site << (2 * orbitals_ * s);
  }
  return m;
}

int Lattice::distance(int a, int b) const {
  const auto ca = coords(a);
  const auto cb = coords(b);
  return std::max(std::abs(ca[0] - cb[0]), std::abs(ca[1] - cb[1]));
}

int Lattice::diameter(SiteSet sites) const {
  const auto s = sites.sites();
  int d = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) d = std::max(d, distance(s[i], s[j]));
  return d;
}

int Lattice::distance(SiteSet a, SiteSet b) const {
  if (a.empty() || b.empty()) throw InvalidArgument("distance between empty site sets");
  int d = 1 << 30;
  for (int x : a.sites())
    for (int y : b.sites()) d = std::min(d, distance(x, y));
  return d;
}

SiteSet Lattice::ball(int x, int k) const {
  check_site(x);
  std::uint32_t bits = 0;
  if (k < 0) return SiteSet();
  for (int y = 0; y < num_sites_; ++y)
    if (distance(x, y) <= k) bits |= std::uint32_t{1} << y;
  return SiteSet(bits);
}

int Lattice::exhaustion_radius(int x) const {
  int r = 0;
  for (int y = 0; y < num_sites_; ++y) r = std::max(r, distance(x, y));
  return r;
}

void Lattice::check_site(int site) const {
  if (!contains(site)) throw InvalidArgument("site " + std::to_string(site) + " outside lattice");
}

void Lattice::check_sites(SiteSet sites) const {
  if (!sites.subset_of(all_sites())) throw InvalidArgument("site set extends outside lattice");
}

void require_same_lattice(const Lattice& a, const Lattice& b) {
  if (!(a == b)) throw LatticeMismatch("operands live on different lattices");
}

}  // namespace specflow
