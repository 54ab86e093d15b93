#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "specflow/core/types.hpp"

namespace specflow {

/// Finite set of lattice sites, stored as a bitmask over site indices.
class SiteSet {
 public:
  constexpr SiteSet() = default;
  constexpr explicit SiteSet(std::uint32_t bits) : bits_(bits) {}

  static SiteSet of(std::initializer_list<int> sites);
  static SiteSet from(std::span<const int> sites);
  static constexpr SiteSet single(int site) { return SiteSet(std::uint32_t{1} << site); }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(int site) const { return (bits_ >> site) & 1u; }
  constexpr bool subset_of(SiteSet other) const { return (bits_ & ~other.bits_) == 0; }
  std::vector<int> sites() const;

  constexpr SiteSet operator|(SiteSet o) const { return SiteSet(bits_ | o.bits_); }
  constexpr SiteSet operator&(SiteSet o) const { return SiteSet(bits_ & o.bits_); }
  constexpr auto operator<=>(const SiteSet&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

/// A finite box of Z^d (d = 1 or 2) with n fermionic orbitals per site.
///
/// Fermions are indexed as site * n + orbital with sites in row-major order
/// (x fastest). Fermion k carries the Majorana modes 2k and 2k+1. The
/// Jordan-Wigner string follows the fermion index.
class Lattice {
 public:
  static constexpr int kMaxFermions = 12;

  Lattice(int dimension, std::vector<int> extent, int orbitals = 1,
          int max_fermions = kMaxFermions);

  static Lattice chain(int sites, int orbitals = 1) { return Lattice(1, {sites}, orbitals); }

  int dimension() const { return dimension_; }
  int extent(int axis) const { return extent_[static_cast<std::size_t>(axis)]; }
  const std::vector<int>& extents() const { return extent_; }
  int num_sites() const { return num_sites_; }
  int orbitals() const { return orbitals_; }
  int num_fermions() const { return num_sites_ * orbitals_; }
  int num_modes() const { return 2 * num_fermions(); }
  std::size_t hilbert_dim() const { return std::size_t{1} << num_fermions(); }
  int max_fermions() const { return max_fermions_; }

  std::array<int, 2> coords(int site) const;
  int site_at(std::array<int, 2> coords) const;
  bool contains(int site) const { return site >= 0 && site < num_sites_; }
  SiteSet all_sites() const { return SiteSet((std::uint64_t{1} << num_sites_) - 1); }

  int fermion(int site, int orbital = 0) const { return site * orbitals_ + orbital; }
  int mode(int site, int orbital, int component) const {
    return 2 * fermion(site, orbital) + component;
  }
  /// All Majorana modes carried by the sites of `sites`.
  Mask modes(SiteSet sites) const;
  Mask all_modes() const { return num_modes() == 32 ? ~Mask{0} : (Mask{1} << num_modes()) - 1; }

  /// Maximum-norm distance between two sites.
  int distance(int a, int b) const;
  /// Largest pairwise distance within the set (0 for singletons and the empty set).
  int diameter(SiteSet sites) const;
  /// Distance between two nonempty site sets.
  int distance(SiteSet a, SiteSet b) const;
  /// B_k(x) intersected with the lattice.
  SiteSet ball(int x, int k) const;
  /// Smallest k with B_k(x) covering the whole lattice.
  int exhaustion_radius(int x) const;

  void check_site(int site) const;
  void check_sites(SiteSet sites) const;

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.dimension_ == b.dimension_ && a.extent_ == b.extent_ && a.orbitals_ == b.orbitals_;
  }

 private:
  int dimension_;
  std::vector<int> extent_;
  int orbitals_;
  int max_fermions_;
  int num_sites_;
};

void require_same_lattice(const Lattice& a, const Lattice& b);

}  // namespace specflow
