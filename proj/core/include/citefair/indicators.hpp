#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "citefair/model.hpp"

namespace citefair {

/// Which indicator to compute. impact_factor and numerator_only need a 2 or
/// 5 year window; total_cites and cp_ratio count citations to all prior years.
struct IndicatorSpec {
  IndicatorKind kind = IndicatorKind::impact_factor;
  Window window = Window::two;
  Counting counting = Counting::integer;

  /// Throws std::invalid_argument for an impossible kind/window pairing.
  void check() const;

  /// Catalog tag, e.g. IF2-IC, IF5-FC, TC-IC, TC-FC2, CP-FC.
  [[nodiscard]] std::string id() const;
};

/// Every kind/window/counting combination the toolkit computes from events.
[[nodiscard]] std::vector<IndicatorSpec> indicator_catalog();

/// Citations in the census year to the journal's items of the window years.
/// Integer counting counts events; fractional sums 1/n_refs.
[[nodiscard]] double if_numerator(const Dataset& dataset, const std::string& journal_id, const IndicatorSpec& spec);

/// Citable items of the window years before the census year (missing years count 0).
[[nodiscard]] std::int64_t if_denominator(const Dataset& dataset, const std::string& journal_id, Window window);

/// Computes one indicator for every journal, in dataset journal order.
[[nodiscard]] IndicatorTable compute_table(const Dataset& dataset, const IndicatorSpec& spec);

/// Divides each DEFINED value by the arithmetic mean of the DEFINED values
/// of its cluster. Throws Error naming a cluster whose mean is zero or which
/// has no DEFINED values, and for journals missing from the partition.
[[nodiscard]] IndicatorTable rescale(const IndicatorTable& table, const Partition& partition);

struct RankedEntry {
  std::string journal_id;
  std::optional<double> value;
  std::size_t rank = 0;  // 1-based
};

/// Value descending, UNDEFINED last, ties by journal id ascending.
[[nodiscard]] std::vector<RankedEntry> rank_table(const IndicatorTable& table);

/// Tabular file: a "# key=value ..." provenance line, then journal_id/value
/// rows with NA for UNDEFINED. Values keep full round-trip precision.
void write_table(const IndicatorTable& table, const std::filesystem::path& path);
[[nodiscard]] IndicatorTable read_table(const std::filesystem::path& path);

/// Human-readable ranking (rank, journal, title, cluster, value with 3 decimals).
void write_ranked(const IndicatorTable& table, const Dataset& dataset, const std::filesystem::path& path);

}  // namespace citefair
