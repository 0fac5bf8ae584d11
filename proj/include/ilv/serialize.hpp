#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ilv/errors.hpp"
#include "ilv/interleaver.hpp"
#include "ilv/junction.hpp"
#include "ilv/memsim.hpp"
#include "ilv/metrics.hpp"
#include "ilv/sparsenet.hpp"
#include "ilv/study.hpp"
#include "ilv/verifier.hpp"

namespace ilv {

// ordered_json keeps insertion order, so serializing twice gives identical
// bytes and diffs stay readable.
using json = nlohmann::ordered_json;

inline json to_json(const JunctionConfig& c) {
  return json{{"left_neurons", c.left_neurons}, {"right_neurons", c.right_neurons},
              {"fan_out", c.fan_out},           {"fan_in", c.fan_in},
              {"parallelism", c.parallelism},   {"edge_count", c.edge_count}};
}

inline json to_json(const VariantSet& v) {
  return json{{"name", v.to_string()}, {"sv", v.sv}, {"ss", v.ss}, {"md", v.md}};
}

inline JunctionConfig config_from_json(const json& j) {
  JunctionConfig c = JunctionConfig::create(j.at("left_neurons").get<std::uint32_t>(),
                                            j.at("right_neurons").get<std::uint32_t>(),
                                            j.at("fan_out").get<std::uint32_t>(),
                                            j.at("parallelism").get<std::uint32_t>());
  if (j.contains("fan_in") && j.at("fan_in").get<std::uint32_t>() != c.fan_in)
    throw ParseError("stored fan_in disagrees with the configured shape");
  if (j.contains("edge_count") && j.at("edge_count").get<std::uint64_t>() != c.edge_count)
    throw ParseError("stored edge_count disagrees with the configured shape");
  return c;
}

inline VariantSet variants_from_json(const json& j) {
  VariantSet v;
  v.sv = j.value("sv", false);
  v.ss = j.value("ss", false);
  v.md = j.value("md", false);
  if (j.contains("name") && VariantSet::parse(j.at("name").get<std::string>()) != v)
    throw ParseError("variant name disagrees with the variant flags");
  return v;
}

inline json to_json(const InterleaverBuild& build, bool include_weight_map = false) {
  json j;
  j["config"] = to_json(build.config());
  j["variants"] = to_json(build.variants());
  j["seed"] = build.seed();
  j["r"] = build.tables().base_perms;
  j["s"] = build.tables().start_vectors;
  j["t"] = build.tables().row_schedules;
  j["v"] = build.tables().dithers;
  if (include_weight_map) {
    std::vector<std::uint64_t> pw(build.config().edge_count);
    for (std::uint64_t i = 0; i < pw.size(); ++i) pw[i] = build.map_weight(i);
    j["pi_w"] = pw;
  }
  return j;
}

inline InterleaverBuild build_from_json(const json& j) {
  try {
    JunctionConfig config = config_from_json(j.at("config"));
    VariantSet variants = variants_from_json(j.at("variants"));
    InterleaverBuild::TableOverrides tables;
    tables.base_perms = j.value("r", std::vector<std::vector<std::uint32_t>>{});
    tables.start_vectors = j.value("s", std::vector<std::vector<std::uint32_t>>{});
    tables.dithers = j.value("v", std::vector<std::vector<std::uint32_t>>{});
    InterleaverBuild build = InterleaverBuild::from_tables(config, variants, std::move(tables),
                                                           j.value("seed", std::uint64_t{0}));
    if (j.contains("t") &&
        j.at("t").get<std::vector<std::vector<std::uint32_t>>>() !=
            build.tables().row_schedules)
      throw ParseError("stored row schedules disagree with the start vectors");
    return build;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed build document: ") + e.what());
  }
}

inline json to_json(const VerificationReport& r) {
  json cw = json::array(), ew = json::array();
  for (const ClashWitness& w : r.clash_witnesses)
    cw.push_back(json{{"i", w.i}, {"j", w.j}, {"cycle", w.cycle}});
  for (const EaseWitness& w : r.ease_witnesses) ew.push_back(json{{"i", w.i}, {"j", w.j}});
  return json{{"clash_free", r.clash_free},
              {"address_ease", r.address_ease},
              {"pairs_checked", r.pairs_checked},
              {"clash_violations", r.clash_violations},
              {"ease_violations", r.ease_violations},
              {"clash_witnesses", cw},
              {"ease_witnesses", ew}};
}

inline json to_json(const AuditSummary& s) {
  json j{{"cycles", s.cycles},
         {"sweeps", s.sweeps},
         {"cycles_per_sweep", s.cycles_per_sweep},
         {"total_accesses", s.total_accesses},
         {"stall_count", s.stall_count},
         {"activation_reads_per_cell", s.activation_reads_per_cell},
         {"weight_reads_per_cell", s.weight_reads_per_cell}};
  if (s.right_neurons_per_cycle)
    j["right_neurons_per_cycle"] = s.right_neurons_per_cycle;
  else
    j["right_neurons_per_cycle"] = nullptr;
  return j;
}

inline json to_json(const MetricsReport& m) {
  return json{{"size", m.size},
              {"spread", m.spread},
              {"pair_set_size", m.pair_set_size},
              {"dispersion", m.dispersion}};
}

// Fixed-width float text so identical runs give identical bytes.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

inline void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in '" + path + "': " + e.what());
  }
}

inline std::string variant_metrics_csv(const std::vector<VariantMetrics>& rows) {
  std::ostringstream out;
  out << "variant,pw_spread,pa_spread,pw_disp,pa_disp\n";
  for (const VariantMetrics& r : rows) {
    out << r.variants.to_string() << ',';
    if (r.applicable)
      out << format_double(r.pw_spread) << ',' << format_double(r.pa_spread) << ','
          << format_double(r.pw_dispersion) << ',' << format_double(r.pa_dispersion);
    else
      out << ",,,";  // skipped: inapplicable at this shape
    out << '\n';
  }
  return out.str();
}

inline json to_json(const std::vector<VariantMetrics>& rows) {
  json arr = json::array();
  for (const VariantMetrics& r : rows) {
    json row{{"variant", r.variants.to_string()}, {"applicable", r.applicable}};
    if (r.applicable) {
      row["pw_spread"] = r.pw_spread;
      row["pa_spread"] = r.pa_spread;
      row["pw_disp"] = r.pw_dispersion;
      row["pa_disp"] = r.pa_dispersion;
    } else {
      row["skip_reason"] = r.skip_reason;
    }
    arr.push_back(std::move(row));
  }
  return arr;
}

inline std::string trace_csv_header() { return "cycle,sweep,weight_mem,weight_cell,act_mem,act_cell\n"; }

inline void append_trace_csv(std::string& out, const CycleRecord& rec) {
  for (const BankAccess& a : rec.accesses) {
    out += std::to_string(rec.cycle);
    out += ',';
    out += std::to_string(rec.sweep);
    out += ',';
    out += std::to_string(a.weight_memory);
    out += ',';
    out += std::to_string(a.weight_cell);
    out += ',';
    out += std::to_string(a.activation_memory);
    out += ',';
    out += std::to_string(a.activation_cell);
    out += '\n';
  }
}

inline std::string trace_csv(const MemTrace& trace) {
  std::string out = trace_csv_header();
  for (const CycleRecord& rec : trace.cycles) append_trace_csv(out, rec);
  return out;
}

inline std::string study_history_csv(const std::vector<StudyRow>& rows) {
  std::ostringstream out;
  out << "variant,seed,epoch,val_accuracy\n";
  for (const StudyRow& row : rows) {
    if (!row.applicable) continue;
    for (const StudyRun& run : row.runs)
      for (std::size_t e = 0; e < run.val_accuracy.size(); ++e)
        out << row.variants.to_string() << ',' << run.seed_index << ',' << e << ','
            << format_double(run.val_accuracy[e]) << '\n';
  }
  return out.str();
}

inline json to_json(const std::vector<StudyRow>& rows) {
  json arr = json::array();
  for (const StudyRow& row : rows) {
    json r{{"variant", row.variants.to_string()}, {"applicable", row.applicable}};
    if (!row.applicable) {
      r["skip_reason"] = row.skip_reason;
      arr.push_back(std::move(r));
      continue;
    }
    r["pw_disp"] = row.pw_dispersion;
    r["pa_disp"] = row.pa_dispersion;
    r["mean_final_accuracy"] = row.mean_final_accuracy;
    json runs = json::array();
    for (const StudyRun& run : row.runs)
      runs.push_back(json{{"seed_index", run.seed_index},
                          {"network_seed", run.network_seed},
                          {"val_accuracy", run.val_accuracy}});
    r["runs"] = std::move(runs);
    arr.push_back(std::move(r));
  }
  return arr;
}

// label,b0..b63 rows; shape and generation parameters go in a sidecar.
inline std::string dataset_csv(const Dataset& data) {
  std::ostringstream out;
  out << "split,label";
  for (std::uint32_t b = 0; b < kMorseBins; ++b) out << ",b" << b;
  out << '\n';
  auto emit = [&out](const char* split, const std::vector<std::vector<double>>& xs,
                     const std::vector<std::uint32_t>& ys) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out << split << ',' << ys[i];
      for (double v : xs[i]) out << ',' << format_double(v);
      out << '\n';
    }
  };
  emit("train", data.train_inputs, data.train_labels);
  emit("val", data.val_inputs, data.val_labels);
  return out.str();
}

}  // namespace ilv
