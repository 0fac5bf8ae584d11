#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ilv/errors.hpp"
#include "ilv/junction.hpp"
#include "ilv/modmath.hpp"
#include "ilv/permutation.hpp"
#include "ilv/rng.hpp"

namespace ilv {

inline std::vector<std::uint32_t> make_base_perm(std::mt19937_64& g, std::uint32_t rows) {
  if (rows == 0) throw ConfigError("base permutation needs at least one row");
  return random_perm_values(g, rows);
}

// Start vector: one starting row per memory. Without sv it replicates (or
// truncates) a single base permutation; with sv it concatenates independent
// base permutations, the last one cut to fit.
inline std::vector<std::uint32_t> make_start_vector(
    const std::vector<std::vector<std::uint32_t>>& base_perms, std::uint32_t memories,
    std::uint32_t rows, bool sv) {
  for (const auto& r : base_perms)
    if (r.size() != rows)
      throw ConfigError("base permutation length " + std::to_string(r.size()) +
                        " does not match row count " + std::to_string(rows));
  std::vector<std::uint32_t> s(memories);
  if (!sv) {
    if (base_perms.size() != 1)
      throw ConfigError("non-sv start vector takes exactly one base permutation");
    for (std::uint32_t j = 0; j < memories; ++j) s[j] = base_perms[0][j % rows];
    return s;
  }
  if (memories <= rows)
    throw VariantError("sv needs more memories than rows per memory (z > p/z)");
  std::uint64_t blocks = ceil_div(memories, rows);
  if (base_perms.size() != blocks)
    throw ConfigError("sv start vector for " + std::to_string(memories) + " memories needs " +
                      std::to_string(blocks) + " base permutations, got " +
                      std::to_string(base_perms.size()));
  for (std::uint32_t j = 0; j < memories; ++j) s[j] = base_perms[j / rows][j % rows];
  return s;
}

// Row schedule for one sweep: the row each lane reads, advancing by one per
// cycle. t[x] = (s[x % z] + floor(x / z)) mod (p / z).
inline std::vector<std::uint32_t> make_row_schedule(const std::vector<std::uint32_t>& start,
                                                    std::uint32_t left_neurons,
                                                    std::uint32_t rows) {
  std::uint32_t memories = static_cast<std::uint32_t>(start.size());
  std::vector<std::uint32_t> t(left_neurons);
  for (std::uint32_t x = 0; x < left_neurons; ++x)
    t[x] = (start[x % memories] + x / memories) % rows;
  return t;
}

inline std::uint32_t right_neuron_of(const JunctionConfig& c, std::uint64_t edge) {
  if (edge >= c.edge_count) throw std::out_of_range("edge index out of range");
  return static_cast<std::uint32_t>(edge / c.fan_in);
}

// A concrete interleaver: the drawn (or injected) tables plus the mapping
// they induce from edge index to weight-memory slot.
class InterleaverBuild {
 public:
  struct Tables {
    // Base permutations in draw order (sweep-major, then sv block).
    std::vector<std::vector<std::uint32_t>> base_perms;
    // One start vector per sweep table (1, or fan_out when ss).
    std::vector<std::vector<std::uint32_t>> start_vectors;
    // Row schedules derived from the start vectors, same count.
    std::vector<std::vector<std::uint32_t>> row_schedules;
    // Dither tables, one per cycle (W/z) when md; empty otherwise.
    std::vector<std::vector<std::uint32_t>> dithers;
  };

  // Injection points for tests and replay; anything omitted is derived
  // (start vectors from base perms) or must be absent for the variant.
  struct TableOverrides {
    std::vector<std::vector<std::uint32_t>> base_perms;
    std::vector<std::vector<std::uint32_t>> start_vectors;
    std::vector<std::vector<std::uint32_t>> dithers;
  };

  static InterleaverBuild generate(const JunctionConfig& config, VariantSet variants,
                                   std::uint64_t seed) {
    variants.require_applicable(config);
    Tables tables;
    std::uint32_t rows = config.bank_rows();
    std::uint32_t sweep_tables = variants.ss ? config.fan_out : 1;
    std::uint64_t blocks = variants.sv ? ceil_div(config.parallelism, rows) : 1;
    for (std::uint32_t k = 0; k < sweep_tables; ++k) {
      std::vector<std::vector<std::uint32_t>> perms;
      for (std::uint64_t u = 0; u < blocks; ++u) {
        auto g = make_engine(seed, Stream::base_perm, k, u);
        perms.push_back(make_base_perm(g, rows));
      }
      tables.start_vectors.push_back(
          make_start_vector(perms, config.parallelism, rows, variants.sv));
      for (auto& r : perms) tables.base_perms.push_back(std::move(r));
    }
    if (variants.md) {
      // One dither per build, applied every cycle. Independent per-cycle
      // dithers are representable (see from_tables) but are not drawn: they
      // destroy bijectivity and the published statistics.
      auto g = make_engine(seed, Stream::dither);
      std::vector<std::uint32_t> v = random_perm_values(g, config.parallelism);
      tables.dithers.assign(config.total_cycles(), v);
    }
    return InterleaverBuild(config, variants, seed, std::move(tables));
  }

  static InterleaverBuild from_tables(const JunctionConfig& config, VariantSet variants,
                                      TableOverrides overrides, std::uint64_t seed = 0) {
    variants.require_applicable(config);
    Tables tables;
    std::uint32_t rows = config.bank_rows();
    std::uint32_t sweep_tables = variants.ss ? config.fan_out : 1;
    for (const auto& r : overrides.base_perms) check_perm(r, rows, "base permutation");
    tables.base_perms = std::move(overrides.base_perms);
    std::uint64_t blocks = variants.sv ? ceil_div(config.parallelism, rows) : 1;
    auto derive_start = [&](std::uint32_t k) {
      std::vector<std::vector<std::uint32_t>> group(tables.base_perms.begin() + k * blocks,
                                                    tables.base_perms.begin() + (k + 1) * blocks);
      return make_start_vector(group, config.parallelism, rows, variants.sv);
    };
    if (!overrides.start_vectors.empty()) {
      if (overrides.start_vectors.size() != sweep_tables)
        throw ConfigError("expected " + std::to_string(sweep_tables) + " start vectors, got " +
                          std::to_string(overrides.start_vectors.size()));
      for (const auto& s : overrides.start_vectors) {
        if (s.size() != config.parallelism)
          throw ConfigError("start vector length must equal memory count");
        for (std::uint32_t v : s)
          if (v >= rows) throw ConsistencyError("start vector entry out of row range");
      }
      tables.start_vectors = std::move(overrides.start_vectors);
      // Start vectors are derived data; when the base permutations are also
      // present the two must agree, or the document is lying about one of them.
      if (!tables.base_perms.empty()) {
        if (tables.base_perms.size() != sweep_tables * blocks)
          throw ConfigError("expected " + std::to_string(sweep_tables * blocks) +
                            " base permutations, got " + std::to_string(tables.base_perms.size()));
        for (std::uint32_t k = 0; k < sweep_tables; ++k)
          if (derive_start(k) != tables.start_vectors[k])
            throw ConsistencyError("start vector " + std::to_string(k) +
                                   " does not follow from its base permutations");
      }
    } else {
      if (tables.base_perms.size() != sweep_tables * blocks)
        throw ConfigError("expected " + std::to_string(sweep_tables * blocks) +
                          " base permutations, got " + std::to_string(tables.base_perms.size()));
      for (std::uint32_t k = 0; k < sweep_tables; ++k)
        tables.start_vectors.push_back(derive_start(k));
    }
    if (variants.md) {
      if (overrides.dithers.size() != config.total_cycles())
        throw ConfigError("md build needs one dither table per cycle (" +
                          std::to_string(config.total_cycles()) + "), got " +
                          std::to_string(overrides.dithers.size()));
      for (const auto& v : overrides.dithers) check_perm(v, config.parallelism, "dither");
      tables.dithers = std::move(overrides.dithers);
    } else if (!overrides.dithers.empty()) {
      throw ConfigError("dither tables given but md is not enabled");
    }
    return InterleaverBuild(config, variants, seed, std::move(tables));
  }

  // Weight-memory slot of edge i (Eq. form: (t[i%p]*z + column)*fo + sweep).
  std::uint64_t map_weight(std::uint64_t i) const {
    return static_cast<std::uint64_t>(left_neuron(i)) * config_.fan_out + i / config_.left_neurons;
  }

  // Left neuron feeding edge i; the memory it lives in is left % z.
  std::uint32_t left_neuron(std::uint64_t i) const {
    if (i >= config_.edge_count) throw std::out_of_range("edge index out of range");
    const auto& t = tables_.row_schedules[variants_.ss ? i / config_.left_neurons : 0];
    std::uint32_t column = variants_.md
                               ? tables_.dithers[i / config_.parallelism][i % config_.parallelism]
                               : static_cast<std::uint32_t>(i % config_.parallelism);
    return t[i % config_.left_neurons] * config_.parallelism + column;
  }

  std::uint32_t right_neuron(std::uint64_t i) const { return right_neuron_of(config_, i); }

  // Full weight interleaver; throws if the tables do not induce a bijection
  // (possible only with injected per-cycle dithers).
  Permutation weight_permutation() const {
    std::vector<std::uint32_t> out(config_.edge_count);
    for (std::uint64_t i = 0; i < config_.edge_count; ++i)
      out[i] = static_cast<std::uint32_t>(map_weight(i));
    return Permutation(std::move(out));
  }

  // Activation interleaver of one sweep: left neuron per lane-order index.
  Permutation activation_permutation(std::uint32_t sweep) const {
    if (sweep >= config_.fan_out) throw std::out_of_range("sweep index out of range");
    std::vector<std::uint32_t> out(config_.left_neurons);
    std::uint64_t base = static_cast<std::uint64_t>(sweep) * config_.left_neurons;
    for (std::uint32_t x = 0; x < config_.left_neurons; ++x)
      out[x] = left_neuron(base + x);
    return Permutation(std::move(out));
  }

  const JunctionConfig& config() const { return config_; }
  const VariantSet& variants() const { return variants_; }
  std::uint64_t seed() const { return seed_; }
  const Tables& tables() const { return tables_; }

 private:
  InterleaverBuild(const JunctionConfig& config, VariantSet variants, std::uint64_t seed,
                   Tables tables)
      : config_(config), variants_(variants), seed_(seed), tables_(std::move(tables)) {
    for (const auto& s : tables_.start_vectors)
      tables_.row_schedules.push_back(
          make_row_schedule(s, config_.left_neurons, config_.bank_rows()));
  }

  static void check_perm(const std::vector<std::uint32_t>& values, std::uint32_t n,
                         const char* what) {
    if (values.size() != n)
      throw ConfigError(std::string(what) + " has length " + std::to_string(values.size()) +
                        ", expected " + std::to_string(n));
    std::vector<bool> seen(n, false);
    for (std::uint32_t v : values) {
      if (v >= n || seen[v])
        throw ConsistencyError(std::string(what) + " is not a permutation of [0, " +
                               std::to_string(n) + ")");
      seen[v] = true;
    }
  }

  JunctionConfig config_;
  VariantSet variants_;
  std::uint64_t seed_;
  Tables tables_;
};

}  // namespace ilv
