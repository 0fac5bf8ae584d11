#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ilv/errors.hpp"
#include "ilv/modmath.hpp"

namespace ilv {

// Shape of one sparse junction: every left neuron drives fan_out edges, every
// right neuron receives fan_in, and the weight memories are split into
// `parallelism` banks read one cell each per cycle.
struct JunctionConfig {
  std::uint32_t left_neurons = 0;   // p
  std::uint32_t right_neurons = 0;  // n
  std::uint32_t fan_out = 0;        // fo
  std::uint32_t fan_in = 0;         // fi
  std::uint32_t parallelism = 0;    // z, memories per bank
  std::uint64_t edge_count = 0;     // W = p*fo = n*fi

  static JunctionConfig create(std::uint32_t left, std::uint32_t right,
                               std::uint32_t fan_out, std::uint32_t parallelism) {
    if (left == 0 || right == 0 || fan_out == 0 || parallelism == 0)
      throw ConfigError("junction dimensions must be positive");
    std::uint64_t edges = static_cast<std::uint64_t>(left) * fan_out;
    if (edges % right != 0)
      throw ConfigError("edge count " + std::to_string(edges) +
                        " not divisible by right neuron count " + std::to_string(right));
    std::uint64_t fan_in = edges / right;
    if (fan_out > right)
      throw ConfigError("fan-out exceeds right neuron count");
    if (fan_in > left)
      throw ConfigError("fan-in exceeds left neuron count");
    if (left % parallelism != 0)
      throw ConfigError("parallelism must divide left neuron count");
    JunctionConfig c;
    c.left_neurons = left;
    c.right_neurons = right;
    c.fan_out = fan_out;
    c.fan_in = static_cast<std::uint32_t>(fan_in);
    c.parallelism = parallelism;
    c.edge_count = edges;
    return c;
  }

  // Rows per activation memory; one sweep covers them all.
  std::uint32_t bank_rows() const { return left_neurons / parallelism; }
  std::uint32_t sweeps() const { return fan_out; }
  std::uint32_t cycles_per_sweep() const { return bank_rows(); }
  std::uint64_t total_cycles() const { return edge_count / parallelism; }

  // Non-fatal configuration smells (hardware prefers power-of-two banks).
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (!is_power_of_two(parallelism))
      w.push_back("parallelism " + std::to_string(parallelism) +
                  " is not a power of two; address hardware is costlier");
    return w;
  }

  bool operator==(const JunctionConfig&) const = default;
};

// Which shuffling stages are enabled on top of the basic construction.
struct VariantSet {
  bool sv = false;  // shuffle the start vector from several base permutations
  bool ss = false;  // fresh row schedule per sweep
  bool md = false;  // dither the memory column

  static VariantSet parse(const std::string& text) {
    VariantSet v;
    if (text == "basic" || text.empty()) return v;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, '+')) {
      if (part == "sv" && !v.sv) v.sv = true;
      else if (part == "ss" && !v.ss) v.ss = true;
      else if (part == "md" && !v.md) v.md = true;
      else if (part == "basic") continue;
      else throw ParseError("unknown variant token '" + part + "' in '" + text + "'");
    }
    return v;
  }

  std::string to_string() const {
    if (!sv && !ss && !md) return "basic";
    std::string s;
    auto add = [&s](const char* t) {
      if (!s.empty()) s += '+';
      s += t;
    };
    if (sv) add("sv");
    if (ss) add("ss");
    if (md) add("md");
    return s;
  }

  std::uint64_t bits() const { return (sv ? 1u : 0u) | (ss ? 2u : 0u) | (md ? 4u : 0u); }

  // Reason this variant set cannot be built on the given shape, or "" if ok.
  std::string applicability_issue(const JunctionConfig& c) const {
    if (sv && c.parallelism <= c.bank_rows())
      return "sv needs more memories than rows per memory (z > p/z)";
    if (ss && c.fan_out <= 1) return "ss needs more than one sweep (fo > 1)";
    return "";
  }

  bool applicable(const JunctionConfig& c) const { return applicability_issue(c).empty(); }

  void require_applicable(const JunctionConfig& c) const {
    std::string issue = applicability_issue(c);
    if (!issue.empty()) throw VariantError(to_string() + ": " + issue);
  }

  bool operator==(const VariantSet&) const = default;

  // Table row order: basic, md, ss, ss+md, sv, sv+md, sv+ss, sv+ss+md.
  static std::vector<VariantSet> all() {
    return {{false, false, false}, {false, false, true}, {false, true, false},
            {false, true, true},   {true, false, false}, {true, false, true},
            {true, true, false},   {true, true, true}};
  }
};

}  // namespace ilv
