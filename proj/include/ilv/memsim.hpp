#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ilv/errors.hpp"
#include "ilv/interleaver.hpp"
#include "ilv/junction.hpp"

namespace ilv {

// Where things live: weight i sits in weight memory i % z, cell floor(i/z);
// activation x sits in activation memory x % z, cell floor(x/z).
struct BankAccess {
  std::uint32_t weight_memory = 0;
  std::uint64_t weight_cell = 0;
  std::uint32_t activation_memory = 0;
  std::uint32_t activation_cell = 0;
};

struct CycleRecord {
  std::uint64_t cycle = 0;
  std::uint32_t sweep = 0;
  std::vector<BankAccess> accesses;  // one per lane, lane order
};

struct MemTrace {
  JunctionConfig config;
  std::uint32_t cycles_per_sweep = 0;
  std::uint64_t stall_count = 0;  // cycles with a repeated activation memory
  std::vector<CycleRecord> cycles;
};

enum class AddressMode { start_vector, lookup };

inline AddressMode parse_address_mode(const std::string& s) {
  if (s == "startvec" || s == "start_vector") return AddressMode::start_vector;
  if (s == "lookup") return AddressMode::lookup;
  throw ParseError("unknown address mode '" + s + "'");
}

// Per-memory starting cells for one sweep; the cell then just increments
// (mod p/z) every cycle. Meaningless for dithered builds, where the memory
// a lane reads is not fixed.
inline std::vector<std::uint32_t> plan_start_vector_addresses(const InterleaverBuild& build,
                                                              std::uint32_t sweep) {
  if (build.variants().md)
    throw VariantError("start-vector addressing cannot drive a dithered (md) build");
  if (sweep >= build.config().fan_out) throw std::out_of_range("sweep index out of range");
  return build.tables().start_vectors[build.variants().ss ? sweep : 0];
}

namespace detail {

inline std::uint64_t duplicate_activation_memories(const CycleRecord& rec,
                                                   std::vector<std::uint32_t>& scratch) {
  std::uint64_t dups = 0;
  for (const BankAccess& a : rec.accesses)
    if (++scratch[a.activation_memory] > 1) ++dups;
  for (const BankAccess& a : rec.accesses) scratch[a.activation_memory] = 0;
  return dups;
}

}  // namespace detail

// Drives one block cycle (every weight exactly once) and hands each cycle
// record to the sink; nothing is materialized here, so block cycles of any
// size stream through. Start-vector mode derives activation addresses from
// the start vectors alone and cross-checks them against the lookup values —
// a divergence would mean the build lost its ease-of-address structure.
inline std::uint64_t simulate_block_cycle_stream(
    const InterleaverBuild& build, AddressMode mode,
    const std::function<void(const CycleRecord&)>& sink) {
  const JunctionConfig& c = build.config();
  if (mode == AddressMode::start_vector && build.variants().md)
    throw VariantError("start-vector addressing cannot drive a dithered (md) build");
  const std::uint32_t z = c.parallelism;
  const std::uint32_t rows = c.bank_rows();
  std::uint64_t stalls = 0;
  std::vector<std::uint32_t> scratch(z, 0);
  CycleRecord rec;
  rec.accesses.resize(z);
  for (std::uint64_t k = 0; k < c.total_cycles(); ++k) {
    rec.cycle = k;
    rec.sweep = static_cast<std::uint32_t>(k / c.cycles_per_sweep());
    std::uint64_t cycle_in_sweep = k % c.cycles_per_sweep();
    const std::vector<std::uint32_t>* start = nullptr;
    if (mode == AddressMode::start_vector)
      start = &build.tables().start_vectors[build.variants().ss ? rec.sweep : 0];
    for (std::uint32_t lane = 0; lane < z; ++lane) {
      std::uint64_t i = k * z + lane;
      std::uint32_t left = build.left_neuron(i);
      BankAccess& a = rec.accesses[lane];
      a.weight_memory = lane;
      a.weight_cell = k;
      if (start) {
        a.activation_memory = lane;
        a.activation_cell =
            static_cast<std::uint32_t>(((*start)[lane] + cycle_in_sweep) % rows);
        if (a.activation_memory != left % z || a.activation_cell != left / z)
          throw ConsistencyError("start-vector address diverged from lookup at cycle " +
                                 std::to_string(k) + ", lane " + std::to_string(lane));
      } else {
        a.activation_memory = left % z;
        a.activation_cell = left / z;
      }
    }
    if (detail::duplicate_activation_memories(rec, scratch) > 0) ++stalls;
    sink(rec);
  }
  return stalls;
}

inline MemTrace simulate_block_cycle(const InterleaverBuild& build, AddressMode mode) {
  MemTrace trace;
  trace.config = build.config();
  trace.cycles_per_sweep = build.config().cycles_per_sweep();
  trace.cycles.reserve(build.config().total_cycles());
  trace.stall_count = simulate_block_cycle_stream(
      build, mode, [&trace](const CycleRecord& rec) { trace.cycles.push_back(rec); });
  return trace;
}

// Lookup-mode trace from an explicit left-neuron sequence (for adversarial
// patterns that no build produces).
inline MemTrace simulate_block_cycle(const JunctionConfig& config,
                                     const std::vector<std::uint32_t>& lefts) {
  if (lefts.size() != config.edge_count)
    throw ConsistencyError("left-neuron sequence length does not match edge count");
  MemTrace trace;
  trace.config = config;
  trace.cycles_per_sweep = config.cycles_per_sweep();
  const std::uint32_t z = config.parallelism;
  std::vector<std::uint32_t> scratch(z, 0);
  for (std::uint64_t k = 0; k < config.total_cycles(); ++k) {
    CycleRecord rec;
    rec.cycle = k;
    rec.sweep = static_cast<std::uint32_t>(k / config.cycles_per_sweep());
    rec.accesses.resize(z);
    for (std::uint32_t lane = 0; lane < z; ++lane) {
      std::uint32_t left = lefts[k * z + lane];
      rec.accesses[lane] = {lane, k, left % z, left / z};
    }
    if (detail::duplicate_activation_memories(rec, scratch) > 0) ++trace.stall_count;
    trace.cycles.push_back(std::move(rec));
  }
  return trace;
}

struct AuditSummary {
  std::uint64_t cycles = 0;
  std::uint32_t sweeps = 0;
  std::uint32_t cycles_per_sweep = 0;
  std::uint64_t total_accesses = 0;
  std::uint64_t stall_count = 0;
  std::uint32_t activation_reads_per_cell = 0;  // == fan_out
  std::uint32_t weight_reads_per_cell = 0;      // == 1
  // z/fi when fan-in divides the lane count, so each cycle finishes whole
  // right neurons; 0 when the quantity is undefined.
  std::uint32_t right_neurons_per_cycle = 0;
};

// Incremental trace auditor; feed cycles in order, then finish(). Checks the
// bank discipline a block cycle must obey and throws AuditError naming the
// first offending cycle and memory.
class TraceAuditor {
 public:
  explicit TraceAuditor(const JunctionConfig& config)
      : config_(config),
        activation_reads_(config.left_neurons, 0),
        seen_memory_(config.parallelism, 0) {}

  void on_cycle(const CycleRecord& rec) {
    const std::uint32_t z = config_.parallelism;
    if (rec.cycle != next_cycle_)
      throw AuditError("cycle " + std::to_string(rec.cycle) + " out of order");
    if (rec.sweep != next_cycle_ / config_.cycles_per_sweep())
      throw AuditError("cycle " + std::to_string(rec.cycle) + " carries wrong sweep index");
    if (rec.accesses.size() != z)
      throw AuditError("cycle " + std::to_string(rec.cycle) + " does not access every lane");
    bool stalled = false;
    for (std::uint32_t lane = 0; lane < z; ++lane) {
      const BankAccess& a = rec.accesses[lane];
      if (a.weight_memory != lane || a.weight_cell != rec.cycle)
        throw AuditError("cycle " + std::to_string(rec.cycle) + ": weight memory " +
                         std::to_string(a.weight_memory) + " read out of natural order");
      if (a.activation_memory >= z)
        throw AuditError("cycle " + std::to_string(rec.cycle) + ": activation memory " +
                         std::to_string(a.activation_memory) + " does not exist");
      if (a.activation_cell >= config_.bank_rows())
        throw AuditError("cycle " + std::to_string(rec.cycle) + ": activation memory " +
                         std::to_string(a.activation_memory) + " cell out of range");
      if (++seen_memory_[a.activation_memory] > 1) stalled = true;
      ++activation_reads_[static_cast<std::uint64_t>(a.activation_cell) * z +
                          a.activation_memory];
      ++total_accesses_;
    }
    for (const BankAccess& a : rec.accesses) {
      if (seen_memory_[a.activation_memory] > 1 && stall_detail_.empty())
        stall_detail_ = "cycle " + std::to_string(rec.cycle) + ": activation memory " +
                        std::to_string(a.activation_memory) + " read twice";
      seen_memory_[a.activation_memory] = 0;
    }
    if (stalled) ++stall_count_;
    ++next_cycle_;
  }

  // Throws if any per-cycle rule broke or the read counts are uneven; the
  // summary is only produced for a fully clean block cycle.
  AuditSummary finish() const {
    if (next_cycle_ != config_.total_cycles())
      throw AuditError("block cycle ended after " + std::to_string(next_cycle_) + " of " +
                       std::to_string(config_.total_cycles()) + " cycles");
    if (!stall_detail_.empty()) throw AuditError(stall_detail_);
    for (std::uint32_t x = 0; x < config_.left_neurons; ++x) {
      if (activation_reads_[x] != config_.fan_out)
        throw AuditError("activation memory " + std::to_string(x % config_.parallelism) +
                         " cell " + std::to_string(x / config_.parallelism) + " read " +
                         std::to_string(activation_reads_[x]) + " times, expected " +
                         std::to_string(config_.fan_out));
    }
    AuditSummary s;
    s.cycles = config_.total_cycles();
    s.sweeps = config_.sweeps();
    s.cycles_per_sweep = config_.cycles_per_sweep();
    s.total_accesses = total_accesses_;
    s.stall_count = stall_count_;
    s.activation_reads_per_cell = config_.fan_out;
    s.weight_reads_per_cell = 1;
    if (config_.parallelism % config_.fan_in == 0)
      s.right_neurons_per_cycle = config_.parallelism / config_.fan_in;
    return s;
  }

 private:
  JunctionConfig config_;
  std::vector<std::uint32_t> activation_reads_;
  std::vector<std::uint32_t> seen_memory_;
  std::string stall_detail_;
  std::uint64_t total_accesses_ = 0;
  std::uint64_t stall_count_ = 0;
  std::uint64_t next_cycle_ = 0;
};

inline AuditSummary audit_trace(const MemTrace& trace, const JunctionConfig& config) {
  TraceAuditor auditor(config);
  for (const CycleRecord& rec : trace.cycles) auditor.on_cycle(rec);
  return auditor.finish();
}

// Whole-block simulate-and-audit without materializing the trace.
inline AuditSummary audit_block_cycle(const InterleaverBuild& build, AddressMode mode) {
  TraceAuditor auditor(build.config());
  simulate_block_cycle_stream(build, mode,
                              [&auditor](const CycleRecord& rec) { auditor.on_cycle(rec); });
  return auditor.finish();
}

}  // namespace ilv
