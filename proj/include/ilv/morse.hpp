#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ilv/errors.hpp"
#include "ilv/rng.hpp"
#include "ilv/sparsenet.hpp"

namespace ilv {

// Synthetic 64-bin "keyed signal" classification set. Each class is one of
// the dot/dash codewords of length 1..6, ordered short-first; a sample is
// the codeword rendered as a pulse train (dot = 2 hot bins, dash = 5, gap =
// 2 cold bins), placed near the center with bounded jitter, plus Gaussian
// noise, clipped to [-1, 2]. Nearby bins carry correlated evidence, which is
// exactly what input-side interleaving does or does not let a neuron see.
struct MorseParams {
  std::uint32_t classes = 64;
  std::uint32_t train_per_class = 60;
  std::uint32_t val_per_class = 20;
  double noise = 0.3;
  std::uint32_t jitter = 4;  // max displacement from centered placement
};

constexpr std::uint32_t kMorseBins = 64;

inline std::vector<std::string> morse_codewords(std::uint32_t count) {
  std::vector<std::string> words;
  for (std::uint32_t len = 1; len <= 6 && words.size() < count; ++len) {
    for (std::uint32_t bits = 0; bits < (1u << len) && words.size() < count; ++bits) {
      std::string w(len, '.');
      for (std::uint32_t b = 0; b < len; ++b)
        if (bits >> (len - 1 - b) & 1) w[b] = '-';
      words.push_back(std::move(w));
    }
  }
  if (words.size() < count)
    throw ConfigError("at most " + std::to_string(words.size()) + " classes available");
  return words;
}

inline std::vector<double> render_morse(const std::string& word, std::mt19937_64& g,
                                        const MorseParams& p) {
  std::vector<double> pulse;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) pulse.insert(pulse.end(), 2, 0.0);
    pulse.insert(pulse.end(), word[i] == '.' ? 2 : 5, 1.0);
  }
  if (pulse.size() > kMorseBins) throw ConfigError("codeword does not fit the input window");
  std::uint32_t len = static_cast<std::uint32_t>(pulse.size());
  std::int64_t base = (kMorseBins - len) / 2;
  std::int64_t shift = p.jitter == 0 ? 0
                                     : static_cast<std::int64_t>(bounded(g, 2 * p.jitter + 1)) -
                                           static_cast<std::int64_t>(p.jitter);
  std::int64_t offset = std::clamp<std::int64_t>(base + shift, 0, kMorseBins - len);
  std::vector<double> v(kMorseBins, 0.0);
  std::copy(pulse.begin(), pulse.end(), v.begin() + offset);
  if (p.noise > 0)
    for (double& x : v) x += gaussian(g, 0.0, p.noise);
  for (double& x : v) x = std::clamp(x, -1.0, 2.0);
  return v;
}

inline Dataset gen_morse_dataset(std::uint64_t seed, const MorseParams& params = {}) {
  if (params.classes < 2) throw ConfigError("need at least two classes");
  if (params.train_per_class == 0 || params.val_per_class == 0)
    throw ConfigError("need at least one sample per class per split");
  std::vector<std::string> words = morse_codewords(params.classes);
  Dataset data;
  auto g = make_engine(seed, Stream::dataset);
  for (std::uint32_t c = 0; c < params.classes; ++c) {
    for (std::uint32_t s = 0; s < params.train_per_class; ++s) {
      data.train_inputs.push_back(render_morse(words[c], g, params));
      data.train_labels.push_back(c);
    }
    for (std::uint32_t s = 0; s < params.val_per_class; ++s) {
      data.val_inputs.push_back(render_morse(words[c], g, params));
      data.val_labels.push_back(c);
    }
  }
  return data;
}

}  // namespace ilv
