#pragma once

#include <cstdint>

#include "vulnlib/corpus.hpp"

namespace vulnlib {

struct SyntheticOptions {
  std::size_t n_reports = 300;
  std::uint64_t seed = 7;
  Date start{2014, 1, 1};
  std::size_t days_between = 6;
  // Probability that a description never names its library.
  double omit_library = 0.4;
  // Libraries that only start appearing after this share of the stream.
  double late_library_start = 0.67;
  std::size_t concurrent_bursts = 3;
};

/// Chronological corpus of library-affecting reports. Library names are
/// built from shared sub-words, versions advance in bursts, informative
/// references sit on allowlisted domains and misleading ones do not.
Dataset generate_synthetic(const SyntheticOptions& opts = {});

}  // namespace vulnlib
