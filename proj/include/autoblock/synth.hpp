#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autoblock/data_model.hpp"
#include "autoblock/random.hpp"

namespace autoblock {

enum class Regime { clean, dirty, unstructured };

Regime parse_regime(const std::string& name);
std::string regime_name(Regime regime);

/// Music-catalogue corpus: title, album, composer, songwriter. composer and
/// songwriter are the confusable pair that attribute swaps exchange. The
/// unstructured regime concatenates every value into one `record` attribute.
struct SynthSpec {
  std::size_t entity_count = 1000;
  std::size_t duplicates_per_entity = 2;
  double typo_rate = 0.0;            // per attribute value
  double token_drop_rate = 0.0;      // per attribute value
  double missing_attr_rate = 0.0;    // per attribute value
  double attr_swap_rate = 0.0;       // per duplicate
  double version_suffix_rate = 0.0;  // per duplicate
  Regime regime = Regime::dirty;

  /// Noise rates customary for a regime.
  static SynthSpec defaults(Regime regime);
  void validate() const;
};

struct SynthCorpus {
  Dataset dataset;
  LabelSet labels;  // every within-entity pair
};

SynthCorpus synthesize(const SynthSpec& spec, std::uint64_t seed);

/// One character edit (substitution, deletion, insertion or adjacent
/// transposition, equally likely) that always changes a non-empty word.
std::string typo(const std::string& word, Rng& rng);

}  // namespace autoblock
