#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ilv/errors.hpp"
#include "ilv/junction.hpp"
#include "ilv/metrics.hpp"
#include "ilv/morse.hpp"
#include "ilv/sparsenet.hpp"

namespace ilv {

// One variant-comparison experiment: train the same sparse topology shape
// under each interleaver variant (several seeds each) on one shared dataset,
// and join the accuracies with the variant's dispersion signature measured
// at the canonical comparison config.
struct StudyParams {
  std::vector<std::uint32_t> layer_sizes = {64, 1024, 64};
  std::vector<std::uint32_t> fan_outs = {384, 24};
  std::vector<std::uint32_t> parallelism = {64, 64};
  std::vector<VariantSet> variants = VariantSet::all();
  std::uint32_t seeds = 3;
  TrainParams train;
  MorseParams dataset;
  std::uint64_t master_seed = 1;
  std::uint32_t jobs = 1;
  // Where the dispersion signature is measured.
  JunctionConfig metric_config = JunctionConfig::create(64, 64, 4, 16);
  std::uint32_t metric_iterations = 20;
};

struct StudyRun {
  std::uint32_t seed_index = 0;
  std::uint64_t network_seed = 0;
  std::vector<double> val_accuracy;
};

struct StudyRow {
  VariantSet variants;
  bool applicable = true;
  std::string skip_reason;
  double pw_dispersion = 0, pa_dispersion = 0;
  double mean_final_accuracy = 0;
  std::vector<StudyRun> runs;
};

inline std::vector<StudyRow> variant_study(const StudyParams& params) {
  if (params.seeds == 0) throw ConfigError("study needs at least one seed");
  if (params.layer_sizes.size() < 2) throw ConfigError("study network needs at least two layers");
  if (params.layer_sizes.front() != kMorseBins)
    throw ConfigError("first layer must have " + std::to_string(kMorseBins) + " neurons (one per input bin)");
  if (params.dataset.classes > params.layer_sizes.back())
    throw ConfigError("output layer is smaller than the class count");
  std::vector<JunctionConfig> junction_configs;
  for (std::size_t j = 0; j + 1 < params.layer_sizes.size(); ++j)
    junction_configs.push_back(JunctionConfig::create(params.layer_sizes[j],
                                                      params.layer_sizes[j + 1],
                                                      params.fan_outs[j],
                                                      params.parallelism[j]));
  Dataset data = gen_morse_dataset(derive_seed(params.master_seed, Stream::dataset),
                                   params.dataset);

  std::vector<StudyRow> rows(params.variants.size());
  struct Job {
    std::size_t row;
    std::uint32_t seed_index;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < params.variants.size(); ++v) {
    StudyRow& row = rows[v];
    row.variants = params.variants[v];
    for (const JunctionConfig& jc : junction_configs) {
      std::string issue = row.variants.applicability_issue(jc);
      if (!issue.empty()) {
        row.applicable = false;
        row.skip_reason = issue;
        break;
      }
    }
    if (!row.applicable) continue;
    row.runs.resize(params.seeds);
    for (std::uint32_t s = 0; s < params.seeds; ++s) jobs.push_back({v, s});
  }

  auto run_one = [&](const Job& job) {
    StudyRow& row = rows[job.row];
    StudyRun& run = row.runs[job.seed_index];
    run.seed_index = job.seed_index;
    run.network_seed = derive_seed(params.master_seed, Stream::study_build,
                                   row.variants.bits(), job.seed_index);
    NetworkConfig nc;
    nc.layer_sizes = params.layer_sizes;
    nc.fan_outs = params.fan_outs;
    nc.parallelism = params.parallelism;
    nc.variants.assign(junction_configs.size(), row.variants);
    nc.seed = run.network_seed;
    nc.train = params.train;
    SparseNetwork net = SparseNetwork::build(nc);
    run.val_accuracy = net.train(data, params.train).val_accuracy;
  };

  if (params.jobs <= 1) {
    for (const Job& job : jobs) run_one(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::uint32_t t = 0; t < params.jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t at = next.fetch_add(1); at < jobs.size(); at = next.fetch_add(1)) {
          try {
            run_one(jobs[at]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  // Dispersion signature per variant at the comparison config.
  for (StudyRow& row : rows) {
    if (!row.applicable) continue;
    auto sig = variant_metrics_study(params.metric_config, {row.variants},
                                     params.metric_iterations, params.master_seed);
    row.pw_dispersion = sig[0].pw_dispersion;
    row.pa_dispersion = sig[0].pa_dispersion;
    double sum = 0;
    for (const StudyRun& run : row.runs) sum += run.val_accuracy.back();
    row.mean_final_accuracy = sum / static_cast<double>(row.runs.size());
  }
  return rows;
}

}  // namespace ilv
