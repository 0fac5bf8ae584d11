// Command-line front end: generate interleaver builds, verify their access
// properties, reproduce the variant comparison table, trace the banked
// memories, and run the sparse-network variant study.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ilv/interleaver.hpp"
#include "ilv/memsim.hpp"
#include "ilv/metrics.hpp"
#include "ilv/morse.hpp"
#include "ilv/serialize.hpp"
#include "ilv/study.hpp"
#include "ilv/verifier.hpp"

namespace {

// Stable exit codes, also listed in the README.
constexpr int kOk = 0;
constexpr int kOther = 1;
constexpr int kConfigExit = 2;
constexpr int kParseExit = 3;
constexpr int kVerifyExit = 4;
constexpr int kDivergeExit = 5;
constexpr int kConsistencyExit = 6;

using ilv::json;

void print_warnings(const ilv::JunctionConfig& config) {
  for (const std::string& w : config.warnings()) std::cerr << "warning: " << w << "\n";
}

std::vector<std::uint32_t> parse_uint_list(const std::string& text, const char* what) {
  std::vector<std::uint32_t> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      out.push_back(static_cast<std::uint32_t>(std::stoul(part)));
    } catch (const std::exception&) {
      throw ilv::ParseError(std::string("bad ") + what + " element '" + part + "'");
    }
  }
  if (out.empty()) throw ilv::ParseError(std::string("empty ") + what + " list");
  return out;
}

std::vector<ilv::VariantSet> parse_variant_args(const std::vector<std::string>& args) {
  if (args.empty()) return ilv::VariantSet::all();
  std::vector<ilv::VariantSet> out;
  for (const std::string& a : args) {
    if (a == "all") return ilv::VariantSet::all();
    out.push_back(ilv::VariantSet::parse(a));
  }
  return out;
}

struct GenerateOptions {
  std::string config_path;
  std::uint32_t p = 0, n = 0, fo = 0, z = 0;
  std::string variant;
  std::uint64_t seed = std::uint64_t(-1);
  std::string inject_r;
  std::string out;
};

// File values first, flags override.
void resolve_generate(GenerateOptions& o) {
  std::uint32_t p = 0, n = 0, fo = 0, z = 0;
  std::string variant = "basic";
  std::uint64_t seed = 1;
  if (!o.config_path.empty()) {
    json cfg = ilv::read_json_file(o.config_path);
    p = cfg.value("p", 0u);
    n = cfg.value("n", 0u);
    fo = cfg.value("fo", 0u);
    z = cfg.value("z", 0u);
    variant = cfg.value("variant", std::string("basic"));
    seed = cfg.value("seed", std::uint64_t{1});
  }
  if (o.p) p = o.p;
  if (o.n) n = o.n;
  if (o.fo) fo = o.fo;
  if (o.z) z = o.z;
  if (!o.variant.empty()) variant = o.variant;
  if (o.seed != std::uint64_t(-1)) seed = o.seed;
  if (!p || !fo || !z) throw ilv::ConfigError("generate needs --p, --fo and --z (or --config)");
  o.p = p;
  o.n = n ? n : p;  // square junction by default
  o.fo = fo;
  o.z = z;
  o.variant = variant;
  o.seed = seed;
}

int cmd_generate(GenerateOptions& o) {
  resolve_generate(o);
  ilv::JunctionConfig config = ilv::JunctionConfig::create(o.p, o.n, o.fo, o.z);
  ilv::VariantSet variants = ilv::VariantSet::parse(o.variant);
  print_warnings(config);
  ilv::InterleaverBuild build = [&] {
    if (o.inject_r.empty()) return ilv::InterleaverBuild::generate(config, variants, o.seed);
    if (variants.ss || variants.md)
      throw ilv::ConfigError("--inject-r supports non-ss, non-md variants only");
    ilv::InterleaverBuild::TableOverrides tables;
    tables.base_perms.push_back(parse_uint_list(o.inject_r, "--inject-r"));
    return ilv::InterleaverBuild::from_tables(config, variants, std::move(tables), o.seed);
  }();
  json out = ilv::to_json(build, /*include_weight_map=*/true);
  out["provenance"] = json{{"tool", "ilv"},
                           {"command", "generate"},
                           {"p", o.p},
                           {"n", o.n},
                           {"fo", o.fo},
                           {"z", o.z},
                           {"variant", variants.to_string()},
                           {"seed", o.seed},
                           {"injected_r", !o.inject_r.empty()}};
  ilv::write_json_file(o.out, out);
  std::cout << "wrote " << o.out << " (" << variants.to_string() << ", W=" << config.edge_count
            << ")\n";
  return kOk;
}

struct VerifyOptions {
  std::string in, out;
  bool exhaustive = false;
};

int cmd_verify(const VerifyOptions& o) {
  json doc = ilv::read_json_file(o.in);
  ilv::InterleaverBuild build = ilv::build_from_json(doc);
  ilv::VerificationReport report =
      o.exhaustive ? ilv::verify_all_exhaustive(build) : ilv::verify_all(build);
  json out = ilv::to_json(report);
  out["provenance"] = json{{"tool", "ilv"},
                           {"command", "verify"},
                           {"input", o.in},
                           {"exhaustive", o.exhaustive},
                           {"variant", build.variants().to_string()},
                           {"seed", build.seed()},
                           {"config", ilv::to_json(build.config())}};
  if (o.out.empty())
    std::cout << out.dump(2) << "\n";
  else
    ilv::write_json_file(o.out, out);
  bool ok = ilv::required_properties_hold(report, build.variants());
  std::cout << "clash_free=" << (report.clash_free ? "true" : "false")
            << " address_ease=" << (report.address_ease ? "true" : "false")
            << " pairs_checked=" << report.pairs_checked << "\n";
  return ok ? kOk : kVerifyExit;
}

struct TableOptions {
  std::uint32_t p = 64, n = 0, fo = 4, z = 16, iterations = 100;
  std::uint64_t seed = 1;
  std::vector<std::string> variants;
  std::string out, json_out;
};

int cmd_table1(const TableOptions& o) {
  ilv::JunctionConfig config = ilv::JunctionConfig::create(o.p, o.n ? o.n : o.p, o.fo, o.z);
  print_warnings(config);
  std::vector<ilv::VariantSet> variants = parse_variant_args(o.variants);
  std::vector<ilv::VariantMetrics> rows =
      ilv::variant_metrics_study(config, variants, o.iterations, o.seed);
  for (const ilv::VariantMetrics& r : rows) {
    if (!r.applicable) {
      std::cout << r.variants.to_string() << ": skipped (" << r.skip_reason << ")\n";
      continue;
    }
    std::cout << r.variants.to_string() << ": pw_spread=" << ilv::format_double(r.pw_spread)
              << " pa_spread=" << ilv::format_double(r.pa_spread)
              << " pw_disp=" << ilv::format_double(r.pw_dispersion)
              << " pa_disp=" << ilv::format_double(r.pa_dispersion) << "\n";
  }
  json prov{{"tool", "ilv"},
            {"command", "table1"},
            {"config", ilv::to_json(config)},
            {"iterations", o.iterations},
            {"seed", o.seed}};
  if (!o.out.empty()) {
    ilv::write_text_file(o.out, ilv::variant_metrics_csv(rows));
    ilv::write_json_file(o.out + ".meta.json", prov);
  }
  if (!o.json_out.empty()) {
    json doc{{"rows", ilv::to_json(rows)}, {"provenance", prov}};
    ilv::write_json_file(o.json_out, doc);
  }
  return kOk;
}

struct SimulateOptions {
  std::string in, mode = "lookup", out, audit_out;
};

int cmd_simulate(const SimulateOptions& o) {
  json doc = ilv::read_json_file(o.in);
  ilv::InterleaverBuild build = ilv::build_from_json(doc);
  ilv::AddressMode mode = ilv::parse_address_mode(o.mode);
  std::ofstream trace_file;
  if (!o.out.empty()) {
    trace_file.open(o.out, std::ios::binary);
    if (!trace_file) throw ilv::ConfigError("cannot open '" + o.out + "' for writing");
    trace_file << ilv::trace_csv_header();
  }
  ilv::TraceAuditor auditor(build.config());
  std::string chunk;
  std::uint64_t stalls = ilv::simulate_block_cycle_stream(
      build, mode, [&](const ilv::CycleRecord& rec) {
        auditor.on_cycle(rec);
        if (trace_file.is_open()) {
          chunk.clear();
          ilv::append_trace_csv(chunk, rec);
          trace_file << chunk;
        }
      });
  ilv::AuditSummary summary = auditor.finish();
  summary.stall_count = stalls;
  json prov{{"tool", "ilv"},
            {"command", "simulate"},
            {"input", o.in},
            {"mode", o.mode},
            {"variant", build.variants().to_string()},
            {"seed", build.seed()},
            {"config", ilv::to_json(build.config())}};
  if (!o.out.empty()) ilv::write_json_file(o.out + ".meta.json", prov);
  if (!o.audit_out.empty()) {
    json out = ilv::to_json(summary);
    out["provenance"] = prov;
    ilv::write_json_file(o.audit_out, out);
  }
  std::cout << "cycles=" << summary.cycles << " sweeps=" << summary.sweeps
            << " stalls=" << summary.stall_count
            << " reads_per_activation_cell=" << summary.activation_reads_per_cell << "\n";
  return kOk;
}

struct StudyOptions {
  std::string config_path;
  std::string layers, fos, zs;
  std::vector<std::string> variants;
  std::uint32_t seeds = 0, epochs = std::uint32_t(-1), batch = 0, jobs = 0;
  std::uint32_t train_per_class = 0, val_per_class = 0, jitter = std::uint32_t(-1);
  double lr = -1, noise = -1;
  std::uint64_t seed = std::uint64_t(-1);
  std::string out, summary_out, dataset_out;
};

ilv::StudyParams resolve_study(const StudyOptions& o) {
  ilv::StudyParams p;
  std::vector<std::string> variant_args;
  if (!o.config_path.empty()) {
    json cfg = ilv::read_json_file(o.config_path);
    try {
      if (cfg.contains("layers")) p.layer_sizes = cfg.at("layers").get<std::vector<std::uint32_t>>();
      if (cfg.contains("fos")) p.fan_outs = cfg.at("fos").get<std::vector<std::uint32_t>>();
      if (cfg.contains("zs")) p.parallelism = cfg.at("zs").get<std::vector<std::uint32_t>>();
      if (cfg.contains("variants"))
        variant_args = cfg.at("variants").get<std::vector<std::string>>();
      p.seeds = cfg.value("seeds", p.seeds);
      p.train.epochs = cfg.value("epochs", p.train.epochs);
      p.train.batch_size = cfg.value("batch", p.train.batch_size);
      p.train.learning_rate = cfg.value("learning_rate", p.train.learning_rate);
      p.dataset.train_per_class = cfg.value("train_per_class", p.dataset.train_per_class);
      p.dataset.val_per_class = cfg.value("val_per_class", p.dataset.val_per_class);
      p.dataset.noise = cfg.value("noise", p.dataset.noise);
      p.dataset.jitter = cfg.value("jitter", p.dataset.jitter);
      p.master_seed = cfg.value("seed", p.master_seed);
      p.jobs = cfg.value("jobs", p.jobs);
    } catch (const json::exception& e) {
      throw ilv::ParseError(std::string("malformed study config: ") + e.what());
    }
  }
  if (!o.layers.empty()) p.layer_sizes = parse_uint_list(o.layers, "--layers");
  if (!o.fos.empty()) p.fan_outs = parse_uint_list(o.fos, "--fos");
  if (!o.zs.empty()) p.parallelism = parse_uint_list(o.zs, "--zs");
  if (!o.variants.empty()) variant_args = o.variants;
  p.variants = parse_variant_args(variant_args);
  if (o.seeds) p.seeds = o.seeds;
  if (o.epochs != std::uint32_t(-1)) p.train.epochs = o.epochs;
  if (o.batch) p.train.batch_size = o.batch;
  if (o.lr >= 0) p.train.learning_rate = o.lr;
  if (o.train_per_class) p.dataset.train_per_class = o.train_per_class;
  if (o.val_per_class) p.dataset.val_per_class = o.val_per_class;
  if (o.noise >= 0) p.dataset.noise = o.noise;
  if (o.jitter != std::uint32_t(-1)) p.dataset.jitter = o.jitter;
  if (o.seed != std::uint64_t(-1)) p.master_seed = o.seed;
  if (o.jobs) p.jobs = o.jobs;
  return p;
}

int cmd_study(const StudyOptions& o) {
  ilv::StudyParams params = resolve_study(o);
  std::vector<ilv::StudyRow> rows = ilv::variant_study(params);
  for (const ilv::StudyRow& row : rows) {
    if (!row.applicable) {
      std::cout << row.variants.to_string() << ": skipped (" << row.skip_reason << ")\n";
      continue;
    }
    std::cout << row.variants.to_string()
              << ": mean_final_accuracy=" << ilv::format_double(row.mean_final_accuracy)
              << " pa_disp=" << ilv::format_double(row.pa_dispersion) << "\n";
  }
  json prov{{"tool", "ilv"},
            {"command", "study"},
            {"layers", params.layer_sizes},
            {"fos", params.fan_outs},
            {"zs", params.parallelism},
            {"seeds", params.seeds},
            {"epochs", params.train.epochs},
            {"batch", params.train.batch_size},
            {"learning_rate", params.train.learning_rate},
            {"train_per_class", params.dataset.train_per_class},
            {"val_per_class", params.dataset.val_per_class},
            {"noise", params.dataset.noise},
            {"jitter", params.dataset.jitter},
            {"seed", params.master_seed}};
  if (!o.out.empty()) {
    ilv::write_text_file(o.out, ilv::study_history_csv(rows));
    ilv::write_json_file(o.out + ".meta.json", prov);
  }
  if (!o.summary_out.empty()) {
    json doc{{"rows", ilv::to_json(rows)}, {"provenance", prov}};
    ilv::write_json_file(o.summary_out, doc);
  }
  if (!o.dataset_out.empty()) {
    ilv::Dataset data =
        ilv::gen_morse_dataset(ilv::derive_seed(params.master_seed, ilv::Stream::dataset),
                               params.dataset);
    ilv::write_text_file(o.dataset_out, ilv::dataset_csv(data));
    json meta = prov;
    meta["command"] = "study:dataset";
    meta["bins"] = ilv::kMorseBins;
    meta["classes"] = params.dataset.classes;
    ilv::write_json_file(o.dataset_out + ".meta.json", meta);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clash-free interleavers for sparse neural network accelerators"};
  app.require_subcommand(1);

  GenerateOptions gen;
  CLI::App* generate = app.add_subcommand("generate", "construct an interleaver build file");
  generate->add_option("--config", gen.config_path, "JSON config file (flags override)");
  generate->add_option("--p", gen.p, "left neuron count");
  generate->add_option("--n", gen.n, "right neuron count (default: p)");
  generate->add_option("--fo", gen.fo, "fan-out per left neuron");
  generate->add_option("--z", gen.z, "degree of parallelism");
  generate->add_option("--variant", gen.variant, "basic or any of sv/ss/md joined by '+'");
  generate->add_option("--seed", gen.seed, "master seed (default 1)");
  generate->add_option("--inject-r", gen.inject_r, "comma-separated base permutation to inject");
  generate->add_option("--out", gen.out, "output build JSON")->required();

  VerifyOptions ver;
  CLI::App* verify = app.add_subcommand("verify", "check clash freedom and ease of address");
  verify->add_option("--in", ver.in, "build JSON to verify")->required();
  verify->add_option("--out", ver.out, "report JSON (default: stdout)");
  verify->add_flag("--exhaustive", ver.exhaustive, "literal pairwise reference check");

  TableOptions tab;
  CLI::App* table1 = app.add_subcommand("table1", "variant spread/dispersion comparison");
  table1->add_option("--p", tab.p, "left neuron count (default 64)");
  table1->add_option("--n", tab.n, "right neuron count (default: p)");
  table1->add_option("--fo", tab.fo, "fan-out (default 4)");
  table1->add_option("--z", tab.z, "degree of parallelism (default 16)");
  table1->add_option("--iterations", tab.iterations, "seeded rebuilds per variant (default 100)");
  table1->add_option("--seed", tab.seed, "master seed (default 1)");
  table1->add_option("--variant", tab.variants, "variant (repeatable; default: all)");
  table1->add_option("--out", tab.out, "output CSV")->required();
  table1->add_option("--json", tab.json_out, "also write a JSON report");

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "drive one block cycle of bank reads");
  simulate->add_option("--in", sim.in, "build JSON to simulate")->required();
  simulate->add_option("--mode", sim.mode, "startvec or lookup (default lookup)");
  simulate->add_option("--out", sim.out, "trace CSV");
  simulate->add_option("--audit", sim.audit_out, "audit summary JSON");

  StudyOptions stu;
  CLI::App* study = app.add_subcommand("study", "train sparse networks per variant");
  study->add_option("--config", stu.config_path, "JSON study config (flags override)");
  study->add_option("--layers", stu.layers, "comma-separated layer sizes");
  study->add_option("--fos", stu.fos, "comma-separated per-junction fan-outs");
  study->add_option("--zs", stu.zs, "comma-separated per-junction parallelism");
  study->add_option("--variant", stu.variants, "variant (repeatable; default: all)");
  study->add_option("--seeds", stu.seeds, "training seeds per variant");
  study->add_option("--epochs", stu.epochs, "training epochs");
  study->add_option("--batch", stu.batch, "mini-batch size");
  study->add_option("--lr", stu.lr, "learning rate");
  study->add_option("--train-per-class", stu.train_per_class, "training samples per class");
  study->add_option("--val-per-class", stu.val_per_class, "validation samples per class");
  study->add_option("--noise", stu.noise, "dataset noise sigma");
  study->add_option("--jitter", stu.jitter, "dataset placement jitter");
  study->add_option("--seed", stu.seed, "master seed");
  study->add_option("--jobs", stu.jobs, "parallel training runs");
  study->add_option("--out", stu.out, "accuracy history CSV");
  study->add_option("--summary", stu.summary_out, "summary JSON with dispersion join");
  study->add_option("--dataset-out", stu.dataset_out, "dump the generated dataset as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigExit;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*verify) return cmd_verify(ver);
    if (*table1) return cmd_table1(tab);
    if (*simulate) return cmd_simulate(sim);
    if (*study) return cmd_study(stu);
    return kConfigExit;
  } catch (const ilv::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseExit;
  } catch (const ilv::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kDivergeExit;
  } catch (const ilv::ConsistencyError& e) {
    std::cerr << "consistency error: " << e.what() << "\n";
    return kConsistencyExit;
  } catch (const ilv::AuditError& e) {
    std::cerr << "audit error: " << e.what() << "\n";
    return kConsistencyExit;
  } catch (const ilv::MetricError& e) {
    std::cerr << "metric error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const ilv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}
