#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "relcloud/errors.hpp"

namespace relcloud {

/// Kinds of independently failing elements tracked by the calculus.
enum class AtomKind { node, link, srng_event };

inline const char* to_string(AtomKind k) {
  switch (k) {
    case AtomKind::node: return "node";
    case AtomKind::link: return "link";
    case AtomKind::srng_event: return "srng_event";
  }
  return "?";
}

/// One failure-prone element and its probability of being operational.
struct RiskAtom {
  std::string id;
  AtomKind kind = AtomKind::node;
  double up_prob = 1.0;
};

using AtomId = std::int32_t;

/// Registry of risk atoms. Ids are unique and resolve to dense indices,
/// which is what the algorithms operate on internally.
class AtomUniverse {
 public:
  AtomId add_atom(std::string id, AtomKind kind, double up_prob) {
    if (!(up_prob > 0.0) || up_prob > 1.0)
      throw ArgumentError("atom '" + id + "': up_prob must lie in (0,1], got " +
                          std::to_string(up_prob));
    if (index_.count(id))
      throw ArgumentError("atom '" + id + "': duplicate id");
    AtomId a = static_cast<AtomId>(atoms_.size());
    index_.emplace(id, a);
    atoms_.push_back(RiskAtom{std::move(id), kind, up_prob});
    return a;
  }

  AtomId resolve(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw ResolutionError("unknown atom id '" + id + "'");
    return it->second;
  }

  const RiskAtom& atom(AtomId a) const {
    if (a < 0 || static_cast<std::size_t>(a) >= atoms_.size())
      throw ResolutionError("atom index " + std::to_string(a) +
                            " outside universe of size " +
                            std::to_string(atoms_.size()));
    return atoms_[static_cast<std::size_t>(a)];
  }

  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<RiskAtom>& atoms() const noexcept { return atoms_; }

 private:
  std::vector<RiskAtom> atoms_;
  std::unordered_map<std::string, AtomId> index_;
};

/// A set of atoms that must all be up for the group to function.
/// Stored sorted and de-duplicated; the empty group is the trivially-up
/// placement (availability 1).
class AtomGroup {
 public:
  AtomGroup() = default;

  explicit AtomGroup(std::vector<AtomId> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end());
    atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
  }

  static AtomGroup from_ids(const AtomUniverse& u,
                            std::span<const std::string> ids) {
    std::vector<AtomId> v;
    v.reserve(ids.size());
    for (const auto& id : ids) v.push_back(u.resolve(id));
    return AtomGroup(std::move(v));
  }

  const std::vector<AtomId>& atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }
  std::size_t size() const noexcept { return atoms_.size(); }

  bool contains(AtomId a) const {
    return std::binary_search(atoms_.begin(), atoms_.end(), a);
  }

  /// True when every atom of `other` is also in this group.
  bool contains_all(const AtomGroup& other) const {
    return std::includes(atoms_.begin(), atoms_.end(), other.atoms_.begin(),
                         other.atoms_.end());
  }

  friend bool operator==(const AtomGroup& a, const AtomGroup& b) {
    return a.atoms_ == b.atoms_;
  }
  friend auto operator<=>(const AtomGroup& a, const AtomGroup& b) {
    return a.atoms_ <=> b.atoms_;
  }

 private:
  std::vector<AtomId> atoms_;
};

namespace detail {

inline void check_group(const AtomUniverse& u, const AtomGroup& g) {
  for (AtomId a : g.atoms()) u.atom(a);  // bounds check, throws on failure
}

/// Compensated (Kahan) accumulator; the brute-force sum can have millions of
/// tiny terms and the closed form cancels terms of opposite sign.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

/// Drops duplicate groups and groups that are supersets of another group;
/// neither changes the union of the groups' up-events. Sorts the survivors
/// so the result is invariant under permutation of the input.
inline std::vector<AtomGroup> absorb(std::span<const AtomGroup> groups) {
  std::vector<AtomGroup> sorted(groups.begin(), groups.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<AtomGroup> kept;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < sorted.size() && !redundant; ++j) {
      if (i == j) continue;
      if (sorted[i].contains_all(sorted[j]) && sorted[i] != sorted[j])
        redundant = true;  // i is a strict superset of j
    }
    if (!redundant) kept.push_back(sorted[i]);
  }
  return kept;
}

}  // namespace detail

/// Probability that every atom in the group is simultaneously up
/// (independent atoms, each counted once). Empty group -> 1.
inline double atom_set_availability(const AtomUniverse& u, const AtomGroup& g) {
  detail::check_group(u, g);
  double p = 1.0;
  for (AtomId a : g.atoms()) p *= u.atom(a).up_prob;
  return p;
}

/// Probability that at least one group is fully up, by inclusion-exclusion
/// over group subsets; atoms shared between groups are counted once per
/// intersection term. Exponential in the number of groups (capped at 30).
inline double multi_group_availability(const AtomUniverse& u,
                                       std::span<const AtomGroup> groups) {
  if (groups.empty())
    throw ArgumentError("multi_group_availability: empty group list");
  if (groups.size() > 30)
    throw SizeError("multi_group_availability: " +
                    std::to_string(groups.size()) +
                    " groups exceeds the 30-group limit");
  for (const auto& g : groups) detail::check_group(u, g);

  std::vector<AtomGroup> gs = detail::absorb(groups);
  const std::size_t k = gs.size();
  if (gs.size() == 1) return atom_set_availability(u, gs[0]);

  // Map the distinct atoms to bit positions so subset unions are cheap.
  std::vector<AtomId> atoms;
  for (const auto& g : gs)
    atoms.insert(atoms.end(), g.atoms().begin(), g.atoms().end());
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  std::vector<double> prob(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i)
    prob[i] = u.atom(atoms[i]).up_prob;

  const std::size_t words = (atoms.size() + 63) / 64;
  std::vector<std::uint64_t> mask(k * words, 0);
  for (std::size_t gi = 0; gi < k; ++gi)
    for (AtomId a : gs[gi].atoms()) {
      std::size_t bit = static_cast<std::size_t>(
          std::lower_bound(atoms.begin(), atoms.end(), a) - atoms.begin());
      mask[gi * words + bit / 64] |= std::uint64_t{1} << (bit % 64);
    }

  // Depth-first over include/exclude decisions; the union mask and its
  // probability product are maintained incrementally on the include edges.
  detail::KahanSum total;
  std::vector<std::uint64_t> uni(words, 0);
  auto rec = [&](auto&& self, std::size_t gi, int count, double p) -> void {
    if (gi == k) {
      if (count > 0) total.add((count % 2 == 1) ? p : -p);
      return;
    }
    self(self, gi + 1, count, p);  // exclude group gi
    std::vector<std::uint64_t> added(words);
    double np = p;
    for (std::size_t w = 0; w < words; ++w) {
      added[w] = mask[gi * words + w] & ~uni[w];
      uni[w] |= added[w];
      std::uint64_t bits = added[w];
      while (bits) {
        unsigned b = static_cast<unsigned>(std::countr_zero(bits));
        bits &= bits - 1;
        np *= prob[w * 64 + b];
      }
    }
    self(self, gi + 1, count + 1, np);
    for (std::size_t w = 0; w < words; ++w) uni[w] &= ~added[w];
  };
  rec(rec, 0, 0, 1.0);
  return total.value();
}

/// Exhaustive oracle: enumerates up/down states of the distinct atoms that
/// appear in the groups and sums the probability of every state in which at
/// least one group is fully up. No groups -> 0. More than 24 distinct atoms
/// -> SizeError.
inline double brute_force_availability(const AtomUniverse& u,
                                       std::span<const AtomGroup> groups) {
  if (groups.empty()) return 0.0;
  for (const auto& g : groups) detail::check_group(u, g);

  std::vector<AtomId> atoms;
  for (const auto& g : groups)
    atoms.insert(atoms.end(), g.atoms().begin(), g.atoms().end());
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  if (atoms.size() > 24)
    throw SizeError("brute_force_availability: " +
                    std::to_string(atoms.size()) +
                    " distinct atoms exceeds the 24-atom limit");

  const std::size_t n = atoms.size();
  const std::size_t k = groups.size();
  // needs[g]: atoms of group g still undecided; a group dies when one of its
  // atoms is decided down and succeeds when needs reaches zero.
  std::vector<int> needs(k);
  std::vector<char> dead(k, 0);
  std::vector<std::vector<std::size_t>> groups_of(n);
  for (std::size_t gi = 0; gi < k; ++gi) {
    needs[gi] = static_cast<int>(groups[gi].size());
    for (AtomId a : groups[gi].atoms()) {
      std::size_t bit = static_cast<std::size_t>(
          std::lower_bound(atoms.begin(), atoms.end(), a) - atoms.begin());
      groups_of[bit].push_back(gi);
    }
  }
  int alive = static_cast<int>(k);
  int satisfied = 0;
  for (std::size_t gi = 0; gi < k; ++gi)
    if (needs[gi] == 0) ++satisfied;  // empty group: trivially up

  detail::KahanSum total;
  std::vector<std::vector<std::size_t>> killed_at(n);  // per-level undo stack
  auto rec = [&](auto&& self, std::size_t i, double p) -> void {
    if (satisfied > 0) {  // some group already fully up: whole subtree wins
      total.add(p);
      return;
    }
    if (alive == 0) return;  // every group lost an atom: subtree contributes 0
    // i < n here: a live group with all atoms decided would be satisfied.
    double up = u.atom(atoms[i]).up_prob;

    for (std::size_t gi : groups_of[i])
      if (!dead[gi] && --needs[gi] == 0) ++satisfied;
    self(self, i + 1, p * up);
    for (std::size_t gi : groups_of[i])
      if (!dead[gi] && needs[gi]++ == 0) --satisfied;

    if (up < 1.0) {
      // only groups killed at this level are resurrected on the way back
      auto& killed = killed_at[i];
      killed.clear();
      for (std::size_t gi : groups_of[i])
        if (!dead[gi]) { dead[gi] = 1; --alive; killed.push_back(gi); }
      self(self, i + 1, p * (1.0 - up));
      for (std::size_t gi : killed) { dead[gi] = 0; ++alive; }
    }
  };
  rec(rec, 0, 1.0);
  return total.value();
}

/// Monte Carlo estimate of multi-group availability. Deterministic for a
/// fixed seed. Sampling uses raw 53-bit draws from mt19937_64 so results do
/// not depend on library distribution internals.
inline double monte_carlo_availability(const AtomUniverse& u,
                                       std::span<const AtomGroup> groups,
                                       std::uint64_t samples,
                                       std::uint64_t seed) {
  if (groups.empty())
    throw ArgumentError("monte_carlo_availability: empty group list");
  if (samples == 0)
    throw ArgumentError("monte_carlo_availability: samples must be >= 1");
  for (const auto& g : groups) detail::check_group(u, g);

  std::vector<AtomId> atoms;
  for (const auto& g : groups)
    atoms.insert(atoms.end(), g.atoms().begin(), g.atoms().end());
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  std::vector<double> prob(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i)
    prob[i] = u.atom(atoms[i]).up_prob;
  std::vector<std::vector<std::size_t>> bits_of(groups.size());
  for (std::size_t gi = 0; gi < groups.size(); ++gi)
    for (AtomId a : groups[gi].atoms())
      bits_of[gi].push_back(static_cast<std::size_t>(
          std::lower_bound(atoms.begin(), atoms.end(), a) - atoms.begin()));

  std::mt19937_64 rng(seed);
  auto unit = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  std::vector<char> up(atoms.size());
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      up[i] = unit() < prob[i] ? 1 : 0;
    for (const auto& bits : bits_of) {
      bool ok = true;
      for (std::size_t b : bits)
        if (!up[b]) { ok = false; break; }
      if (ok) { ++hits; break; }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

/// Availability under the single-node-failure regime. `hosting` holds, per
/// VM, the distinct node atoms carrying a copy of it. A VM with two or more
/// hosts survives any single node loss; otherwise the placement is only as
/// good as the weakest node that carries some unreplicated VM.
inline double min_survivor_availability(
    const AtomUniverse& u, std::span<const AtomGroup> hosting) {
  double worst = 1.0;
  for (const auto& hosts : hosting) {
    if (hosts.empty())
      throw ArgumentError("min_survivor_availability: VM with no hosting node");
    for (AtomId a : hosts.atoms()) {
      const RiskAtom& atom = u.atom(a);
      if (atom.kind != AtomKind::node)
        throw ArgumentError("min_survivor_availability: atom '" + atom.id +
                            "' is not a node");
    }
    if (hosts.size() >= 2) continue;
    worst = std::min(worst, u.atom(hosts.atoms()[0]).up_prob);
  }
  return worst;
}

}  // namespace relcloud
