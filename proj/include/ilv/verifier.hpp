#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ilv/errors.hpp"
#include "ilv/interleaver.hpp"
#include "ilv/junction.hpp"
#include "ilv/modmath.hpp"

namespace ilv {

struct ClashWitness {
  std::uint64_t i = 0, j = 0;
  std::uint64_t cycle = 0;
  bool operator==(const ClashWitness&) const = default;
};

struct EaseWitness {
  std::uint64_t i = 0, j = 0;
  bool operator==(const EaseWitness&) const = default;
};

// Outcome of the two access-pattern properties. Witness lists are capped;
// the violation counters are exact.
struct VerificationReport {
  bool clash_free = true;
  bool address_ease = true;
  std::uint64_t pairs_checked = 0;
  std::uint64_t clash_violations = 0;
  std::uint64_t ease_violations = 0;
  std::vector<ClashWitness> clash_witnesses;
  std::vector<EaseWitness> ease_witnesses;
};

constexpr std::size_t kMaxWitnesses = 16;

namespace detail {

inline void validate_lefts(const JunctionConfig& c, const std::vector<std::uint32_t>& lefts) {
  if (lefts.size() != c.edge_count)
    throw ConsistencyError("left-neuron sequence length does not match edge count");
  for (std::uint32_t l : lefts)
    if (l >= c.left_neurons) throw ConsistencyError("left neuron index out of range");
}

inline void sort_and_cap(std::vector<ClashWitness>& w) {
  std::sort(w.begin(), w.end(), [](const ClashWitness& a, const ClashWitness& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  if (w.size() > kMaxWitnesses) w.resize(kMaxWitnesses);
}

inline void sort_and_cap(std::vector<EaseWitness>& w) {
  std::sort(w.begin(), w.end(), [](const EaseWitness& a, const EaseWitness& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  if (w.size() > kMaxWitnesses) w.resize(kMaxWitnesses);
}

}  // namespace detail

// Linear-time check. Clash freedom: within a cycle all activation memories
// (left % z) are distinct. Ease of address: two reads of the same memory in
// cycles k_i, k_j must satisfy (k_i - k_j) == (row_i - row_j) mod p/z, which
// holds for a whole group iff (row - k) mod p/z is constant on it — so the
// pairwise property reduces to a per-weight residue. With sweep_scoped (ss
// builds) the ease property is only required within a sweep.
inline VerificationReport verify_all(const JunctionConfig& config,
                                     const std::vector<std::uint32_t>& lefts,
                                     bool sweep_scoped) {
  detail::validate_lefts(config, lefts);
  VerificationReport rep;
  const std::uint32_t z = config.parallelism;
  const std::uint32_t rows = config.bank_rows();
  const std::uint64_t cycles = config.total_cycles();
  const std::uint64_t cps = config.cycles_per_sweep();

  // Clash pass, cycle by cycle.
  for (std::uint64_t k = 0; k < cycles; ++k) {
    bool dup = false;
    std::vector<std::uint32_t> count(z, 0);
    for (std::uint32_t c = 0; c < z; ++c) {
      std::uint32_t mem = lefts[k * z + c] % z;
      if (++count[mem] > 1) dup = true;
    }
    rep.pairs_checked += static_cast<std::uint64_t>(z) * (z - 1) / 2;
    if (!dup) continue;
    rep.clash_free = false;
    for (std::uint32_t a = 0; a < z; ++a) {
      for (std::uint32_t b = a + 1; b < z; ++b) {
        if (lefts[k * z + a] % z != lefts[k * z + b] % z) continue;
        ++rep.clash_violations;
        if (rep.clash_witnesses.size() < 4 * kMaxWitnesses)
          rep.clash_witnesses.push_back({k * z + a, k * z + b, k});
      }
    }
  }
  detail::sort_and_cap(rep.clash_witnesses);

  // Ease pass: group weights by (scope, memory) and bucket by residue.
  // Same-cycle pairs belong to the clash property, so they are subtracted
  // from both the checked and the agreeing counts.
  std::uint64_t scopes = sweep_scoped ? config.sweeps() : 1;
  std::uint64_t group_count = scopes * z;
  std::vector<std::vector<std::uint64_t>> groups(group_count);
  for (std::uint64_t i = 0; i < lefts.size(); ++i) {
    std::uint64_t scope = sweep_scoped ? (i / z) / cps : 0;
    groups[scope * z + lefts[i] % z].push_back(i);
  }
  auto choose2 = [](std::uint64_t n) { return n * (n - 1) / 2; };
  for (const auto& group : groups) {
    std::map<std::uint64_t, std::uint64_t> per_cycle;
    std::map<std::int64_t, std::uint64_t> per_residue;
    std::map<std::pair<std::uint64_t, std::int64_t>, std::uint64_t> per_both;
    for (std::uint64_t i : group) {
      std::uint64_t k = i / z;
      std::int64_t residue = floor_mod(static_cast<std::int64_t>(lefts[i] / z) -
                                           static_cast<std::int64_t>(k),
                                       rows);
      ++per_cycle[k];
      ++per_residue[residue];
      ++per_both[{k, residue}];
    }
    std::uint64_t all = choose2(group.size());
    std::uint64_t same_cycle = 0, same_residue = 0, same_both = 0;
    for (auto& [k, n] : per_cycle) same_cycle += choose2(n);
    for (auto& [r, n] : per_residue) same_residue += choose2(n);
    for (auto& [kr, n] : per_both) same_both += choose2(n);
    std::uint64_t cross = all - same_cycle;
    std::uint64_t agree_cross = same_residue - same_both;
    rep.pairs_checked += cross;
    std::uint64_t bad = cross - agree_cross;
    if (bad == 0) continue;
    rep.address_ease = false;
    rep.ease_violations += bad;
    if (rep.ease_witnesses.size() < 4 * kMaxWitnesses) {
      for (std::size_t a = 0; a + 1 < group.size(); ++a) {
        for (std::size_t b = a + 1; b < group.size(); ++b) {
          std::uint64_t i = group[a], j = group[b];
          if (i / z == j / z) continue;
          std::int64_t ri = floor_mod(
              static_cast<std::int64_t>(lefts[i] / z) - static_cast<std::int64_t>(i / z), rows);
          std::int64_t rj = floor_mod(
              static_cast<std::int64_t>(lefts[j] / z) - static_cast<std::int64_t>(j / z), rows);
          if (ri == rj) continue;
          rep.ease_witnesses.push_back({i, j});
          if (rep.ease_witnesses.size() >= 4 * kMaxWitnesses) break;
        }
        if (rep.ease_witnesses.size() >= 4 * kMaxWitnesses) break;
      }
    }
  }
  detail::sort_and_cap(rep.ease_witnesses);
  return rep;
}

// Literal pairwise reference: every (i, j) pair examined one by one. For
// small instances and equivalence tests against the linear path.
inline VerificationReport verify_all_exhaustive(const JunctionConfig& config,
                                                const std::vector<std::uint32_t>& lefts,
                                                bool sweep_scoped) {
  detail::validate_lefts(config, lefts);
  VerificationReport rep;
  const std::uint32_t z = config.parallelism;
  const std::uint32_t rows = config.bank_rows();
  const std::uint64_t cps = config.cycles_per_sweep();
  const std::uint64_t w = lefts.size();
  for (std::uint64_t i = 0; i + 1 < w; ++i) {
    for (std::uint64_t j = i + 1; j < w; ++j) {
      std::uint64_t ki = i / z, kj = j / z;
      if (ki == kj) {
        ++rep.pairs_checked;
        if (lefts[i] % z == lefts[j] % z) {
          rep.clash_free = false;
          ++rep.clash_violations;
          if (rep.clash_witnesses.size() < 4 * kMaxWitnesses)
            rep.clash_witnesses.push_back({i, j, ki});
        }
        continue;
      }
      if (sweep_scoped && ki / cps != kj / cps) continue;
      if (lefts[i] % z != lefts[j] % z) continue;
      ++rep.pairs_checked;
      std::int64_t dk = floor_mod(static_cast<std::int64_t>(ki) - static_cast<std::int64_t>(kj),
                                  rows);
      std::int64_t dr = floor_mod(static_cast<std::int64_t>(lefts[i] / z) -
                                      static_cast<std::int64_t>(lefts[j] / z),
                                  rows);
      if (dk != dr) {
        rep.address_ease = false;
        ++rep.ease_violations;
        if (rep.ease_witnesses.size() < 4 * kMaxWitnesses) rep.ease_witnesses.push_back({i, j});
      }
    }
  }
  detail::sort_and_cap(rep.clash_witnesses);
  detail::sort_and_cap(rep.ease_witnesses);
  return rep;
}

inline std::vector<std::uint32_t> left_neurons_of(const InterleaverBuild& build) {
  std::vector<std::uint32_t> lefts(build.config().edge_count);
  for (std::uint64_t i = 0; i < lefts.size(); ++i) lefts[i] = build.left_neuron(i);
  return lefts;
}

// Recover left neurons from an explicit weight map (need not be bijective).
inline std::vector<std::uint32_t> lefts_from_weight_map(const JunctionConfig& config,
                                                        const std::vector<std::uint64_t>& pw) {
  if (pw.size() != config.edge_count)
    throw ConsistencyError("weight map length does not match edge count");
  std::vector<std::uint32_t> lefts(pw.size());
  for (std::uint64_t i = 0; i < pw.size(); ++i) {
    if (pw[i] >= config.edge_count) throw ConsistencyError("weight map value out of range");
    lefts[i] = static_cast<std::uint32_t>(pw[i] / config.fan_out);
  }
  return lefts;
}

inline VerificationReport verify_all(const InterleaverBuild& build) {
  return verify_all(build.config(), left_neurons_of(build), build.variants().ss);
}

inline VerificationReport verify_all_exhaustive(const InterleaverBuild& build) {
  return verify_all_exhaustive(build.config(), left_neurons_of(build), build.variants().ss);
}

// Clash freedom is unconditional; ease of address is waived for dithered
// builds (the dither trades it away deliberately).
inline bool required_properties_hold(const VerificationReport& rep, VariantSet variants) {
  return rep.clash_free && (variants.md || rep.address_ease);
}

}  // namespace ilv
