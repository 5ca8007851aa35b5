#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "citefair/model.hpp"

namespace citefair::synth {

struct ClusterProfile {
  std::string cluster_id;
  std::string name;
  std::size_t size = 0;              // N_g
  double mean_cites_per_item = 1.0;  // expected IF2 of an average journal
  double mean_refs = 20.0;           // mean reference-list length of citing papers
  double dispersion = 0.5;           // lognormal sigma of reference-list lengths
};

struct SynthProfile {
  std::string name = "custom";
  std::vector<ClusterProfile> clusters;
  std::int64_t items_min = 10;  // citable items per journal and year
  std::int64_t items_max = 80;
  int first_year = 2000;
  int census_year = 2010;
  std::uint64_t seed = 1;
  /// Lognormal sigma of the per-journal attractiveness multiplier.
  double journal_dispersion = 0.6;
  /// Yearly decay of citations with the age of the cited item.
  double aging = 0.8;
  /// Probability that a reference stays inside the citing paper's cluster.
  double field_affinity = 0.8;
  /// Probability that a reference lands on an indexed journal (the rest
  /// only lengthen the reference list).
  double indexed_share = 1.0;

  /// Throws std::invalid_argument when the profile cannot be generated.
  void check() const;
  [[nodiscard]] std::size_t journal_count() const;
};

/// Eleven clusters totalling 3,695 journals. Rates span math-like
/// (short reference lists, few citations) to biomedical-like regimes.
[[nodiscard]] SynthProfile paper2010_profile();

/// Known built-in profile names: "paper2010", "small".
[[nodiscard]] SynthProfile builtin_profile(const std::string& name);

/// A reduced profile (6 clusters, ~240 journals) for fast experiments.
[[nodiscard]] SynthProfile small_profile();

[[nodiscard]] SynthProfile load_profile(const std::filesystem::path& path);
void save_profile(const SynthProfile& profile, const std::filesystem::path& path);

/// Deterministic in the profile (including its seed). Journals are grouped by
/// cluster in profile order; all events cite in the census year.
[[nodiscard]] Dataset generate(const SynthProfile& profile);

}  // namespace citefair::synth
