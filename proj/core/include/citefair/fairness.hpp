#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "citefair/model.hpp"
#include "citefair/stats.hpp"

namespace citefair {

struct ClusterFairness {
  std::string cluster_id;
  std::string name;
  std::size_t size = 0;     // N_g: journals with DEFINED values
  std::size_t members = 0;  // m_g: of those, how many are in the top set
  double pct = 0.0;         // 100 m_g / N_g
  double expected_pct = 0.0;
  stats::CountInterval ci;
  double ci_lo_pct = 0.0;
  double ci_hi_pct = 0.0;
  bool within_ci = false;
};

/// Unweighted summary over cluster percentages: mean, sample standard
/// deviation (n - 1; zero for a single cluster) and the summed absolute
/// deviation from z.
struct PercentSummary {
  double mean_pct = 0.0;
  double sd_pct = 0.0;
  double sum_abs_dev = 0.0;
};

[[nodiscard]] PercentSummary summarize_percentages(std::span<const double> pct, double z);

struct FairnessReport {
  std::string indicator_id;
  double z = 10.0;
  double ci_level = 0.90;
  std::size_t n_z = 0;
  std::size_t population = 0;
  std::vector<ClusterFairness> clusters;
  PercentSummary summary;
  bool all_within_ci = false;
};

/// Extracts the top z% of the table and checks every cluster's share against
/// the hypergeometric interval of a fair indicator. Throws Error when a
/// cluster has no DEFINED value and std::invalid_argument for bad z/level.
[[nodiscard]] FairnessReport fairness_test(const IndicatorTable& table, const Partition& partition, double z,
                                           double ci_level);

enum class Preference { first, second, tie, mixed };

[[nodiscard]] std::string_view to_string(Preference p);

struct ReportComparison {
  Preference sum_abs_dev = Preference::tie;
  Preference sd_pct = Preference::tie;
  Preference ci_membership = Preference::tie;  // set inclusion of within-CI clusters
  Preference overall = Preference::tie;
};

/// Both reports must share z and the cluster list (std::invalid_argument
/// otherwise). Overall names a report only when no criterion favours the
/// other one and at least one favours it.
[[nodiscard]] ReportComparison compare_reports(const FairnessReport& a, const FairnessReport& b);

struct CalibrationResult {
  std::vector<std::size_t> group_sizes;
  std::vector<double> coverage;        // empirical within_ci frequency
  std::vector<double> exact_coverage;  // P(lo <= m <= hi) under the null
  std::size_t trials = 0;
};

/// Runs the fairness test on i.i.d. uniform indicators over a partition with
/// the given cluster sizes. Trial t draws from its own generator seeded from
/// (seed, t), so results do not depend on evaluation order.
[[nodiscard]] CalibrationResult calibration(std::span<const std::size_t> group_sizes, std::size_t trials, double z,
                                            double ci_level, std::uint64_t seed);

/// One row per cluster, then "Mean (± st.dev.)" and "Σ|x−z|" rows.
/// Percentages carry two decimals.
void write_report_tsv(const FairnessReport& report, const std::filesystem::path& path);
void write_report_json(const FairnessReport& report, const std::filesystem::path& path);
[[nodiscard]] std::string format_report(const FairnessReport& report);

void write_comparison_tsv(const FairnessReport& a, const FairnessReport& b, const ReportComparison& cmp,
                          const std::filesystem::path& path);

}  // namespace citefair
