#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "citefair/error.hpp"
#include "citefair/fairness.hpp"
#include "citefair/indicators.hpp"
#include "citefair/ingest.hpp"
#include "citefair/stats.hpp"
#include "citefair/synth.hpp"
#include "citefair/tabular.hpp"

namespace citefair::cli {

namespace fs = std::filesystem;

namespace {

std::string default_out() {
  const char* env = std::getenv("CITEFAIR_OUT");
  return env != nullptr && *env != '\0' ? env : "citefair-out";
}

std::string fixed3(const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : "NA"; }

void announce(std::ostream& out, const fs::path& p) { out << "wrote " << p.string() << '\n'; }

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string profile = "paper2010";
  std::optional<std::uint64_t> seed;
  std::string out;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  auto profile = fs::exists(a.profile) ? synth::load_profile(a.profile) : synth::builtin_profile(a.profile);
  if (a.seed) profile.seed = *a.seed;
  const auto ds = synth::generate(profile);
  fs::create_directories(a.out);
  write_dataset(ds, a.out);
  synth::save_profile(profile, fs::path(a.out) / "profile.json");
  out << fmt::format("profile {}: {} clusters, {} journals, {} publication rows, {} citation events, seed {}\n",
                     profile.name, profile.clusters.size(), ds.journals.size(), ds.publications.size(),
                     ds.events.size(), profile.seed);
  for (const auto& c : profile.clusters) {
    out << fmt::format("  {:>3} {:<24} N_g={:<5} cites/item={:<5} refs={}\n", c.cluster_id, c.name, c.size,
                       c.mean_cites_per_item, c.mean_refs);
  }
  announce(out, a.out);
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string input;
  std::string journals;
  std::string publications;
  std::string citations;
  std::size_t min_cluster_size = 10;
  std::string unknown_cited = "drop";
  std::string zero_refs = "drop";
  std::string delimiter = "\t";
  std::optional<int> census_year;
  std::string out;
};

void cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  InputPaths paths;
  if (!a.input.empty()) paths = InputPaths::in_directory(a.input);
  if (!a.journals.empty()) paths.journals = a.journals;
  if (!a.publications.empty()) paths.publications = a.publications;
  if (!a.citations.empty()) paths.citations = a.citations;
  if (paths.journals.empty() || paths.publications.empty() || paths.citations.empty()) {
    throw std::invalid_argument("ingest needs --input DIR or all of --journals, --publications, --citations");
  }
  if (a.min_cluster_size < 1) throw std::invalid_argument("--min-cluster-size must be >= 1");
  std::string delim = a.delimiter == "\\t" || a.delimiter == "tab" ? "\t" : a.delimiter;
  if (delim.size() != 1) throw std::invalid_argument("--delimiter must be a single character");

  IngestConfig config;
  config.min_cluster_size = a.min_cluster_size;
  config.unknown_cited = a.unknown_cited == "error" ? UnknownCitedPolicy::error : UnknownCitedPolicy::drop;
  config.zero_refs = a.zero_refs == "error" ? ZeroRefsPolicy::error : ZeroRefsPolicy::drop_with_warning;
  config.delimiter = delim[0];
  config.census_year = a.census_year;

  const auto result = ingest_files(paths, config);
  for (const auto& w : result.summary.warnings) err << "warning: " << w << '\n';
  fs::create_directories(a.out);
  write_dataset(result.dataset, a.out);
  write_exclusion_summary(result.summary, fs::path(a.out) / "exclusions.tsv");
  const auto& s = result.summary;
  out << fmt::format("{} journals in {} clusters, {} citation events, census year {}\n",
                     result.dataset.journals.size(), result.dataset.clusters.size(), result.dataset.events.size(),
                     result.dataset.census_year);
  out << fmt::format("excluded {} clusters ({} journals); dropped events: {} excluded, {} unknown cited, {} zero refs\n",
                     s.excluded_clusters.size(), s.excluded_journals, s.events_dropped_excluded,
                     s.events_dropped_unknown_cited, s.events_dropped_zero_refs);
  for (const auto& c : s.excluded_clusters) {
    out << fmt::format("  excluded cluster {} ({}): {} journals\n", c.cluster_id, c.name, c.size);
  }
  announce(out, a.out);
}

// ---------------------------------------------------------------- indicators

struct IndicatorArgs {
  std::string dataset;
  bool all = false;
  std::string kind = "impact_factor";
  std::string window = "2";
  std::string counting = "integer";
  bool ranked = false;
  bool to_stdout = false;
  std::string out;
};

std::string normalize_kind(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

void cmd_indicators(const IndicatorArgs& a, std::ostream& out) {
  const auto ds = read_dataset(a.dataset);
  const auto partition = Partition::from_dataset(ds);

  std::vector<IndicatorSpec> specs;
  if (a.all) {
    specs = indicator_catalog();
  } else {
    IndicatorSpec spec;
    const auto kind = parse_kind(normalize_kind(a.kind));
    if (!kind || *kind == IndicatorKind::external) throw std::invalid_argument(fmt::format("unknown kind '{}'", a.kind));
    spec.kind = *kind;
    spec.window = *parse_window(a.window);
    spec.counting = *parse_counting(a.counting);
    if (spec.kind == IndicatorKind::total_cites || spec.kind == IndicatorKind::cp_ratio) spec.window = Window::all_prior;
    spec.check();
    specs.push_back(spec);
  }

  fs::create_directories(a.out);
  TabularWriter variance(fs::path(a.out) / "variance.tsv", '\t');
  variance.row({"indicator_id", "normalization", "n", "grand_mean", "ss_total", "ss_between", "ss_within",
                "eta_squared"});
  std::optional<IndicatorTable> first;
  for (const auto& spec : specs) {
    const auto raw = compute_table(ds, spec);
    const auto scaled = rescale(raw, partition);
    for (const auto* t : {&raw, &scaled}) {
      const auto path = fs::path(a.out) / (t->indicator_id + ".tsv");
      write_table(*t, path);
      announce(out, path);
      if (a.ranked) {
        const auto rpath = fs::path(a.out) / (t->indicator_id + ".ranked.tsv");
        write_ranked(*t, ds, rpath);
        announce(out, rpath);
      }
      const auto vd = stats::variance_decomposition(*t, partition);
      std::size_t n = 0;
      for (const auto& g : vd.group_means) n += g.count;
      variance.row({t->indicator_id, std::string(to_string(t->normalization)), std::to_string(n),
                    fmt::format("{}", vd.grand_mean), fmt::format("{}", vd.ss_total), fmt::format("{}", vd.ss_between),
                    fmt::format("{}", vd.ss_within), vd.eta_squared ? fmt::format("{}", *vd.eta_squared) : "NA"});
    }
    if (!first) first = scaled;
  }
  variance.close();
  announce(out, fs::path(a.out) / "variance.tsv");

  if (a.to_stdout && first) {
    const auto ranked = rank_table(*first);
    out << fmt::format("{} (top 25)\n", first->indicator_id);
    for (std::size_t i = 0; i < std::min<std::size_t>(25, ranked.size()); ++i) {
      out << fmt::format("{:>4}  {:<12} {}\n", ranked[i].rank, ranked[i].journal_id, fixed3(ranked[i].value));
    }
  }
}

// ---------------------------------------------------------------- fairness

struct FairnessArgs {
  std::string dataset;
  std::vector<std::string> tables;
  double z = 10.0;
  double ci_level = 0.90;
  std::string format = "both";
  bool to_stdout = false;
  std::string out;
};

void cmd_fairness(const FairnessArgs& a, std::ostream& out) {
  if (a.tables.empty() || a.tables.size() > 2) throw std::invalid_argument("fairness takes one or two --table files");
  const auto ds = read_dataset(a.dataset);
  const auto partition = Partition::from_dataset(ds);
  fs::create_directories(a.out);

  std::vector<FairnessReport> reports;
  for (const auto& path : a.tables) {
    const auto table = read_table(path);
    reports.push_back(fairness_test(table, partition, a.z, a.ci_level));
    const auto& r = reports.back();
    const auto stem = fs::path(a.out) / ("fairness_" + r.indicator_id);
    if (a.format != "json") {
      write_report_tsv(r, stem.string() + ".tsv");
      announce(out, stem.string() + ".tsv");
    }
    if (a.format != "tsv") {
      write_report_json(r, stem.string() + ".json");
      announce(out, stem.string() + ".json");
    }
    if (a.to_stdout) out << format_report(r);
  }
  if (reports.size() == 2) {
    const auto cmp = compare_reports(reports[0], reports[1]);
    const auto path =
        fs::path(a.out) / fmt::format("comparison_{}_vs_{}.tsv", reports[0].indicator_id, reports[1].indicator_id);
    write_comparison_tsv(reports[0], reports[1], cmp, path);
    announce(out, path);
    if (a.to_stdout) {
      out << fmt::format("sum_abs_dev {} | sd_pct {} | ci_membership {} | overall {}\n", to_string(cmp.sum_abs_dev),
                         to_string(cmp.sd_pct), to_string(cmp.ci_membership), to_string(cmp.overall));
    }
  }
}

// ---------------------------------------------------------------- correlate

struct CorrelateArgs {
  std::string dataset;
  std::vector<std::string> tables;
  std::size_t deciles = 10;
  bool to_stdout = false;
  std::string out;
};

void cmd_correlate(const CorrelateArgs& a, std::ostream& out) {
  if (a.tables.size() < 2) throw std::invalid_argument("correlate needs at least two --table files");
  const auto ds = read_dataset(a.dataset);
  const auto partition = Partition::from_dataset(ds);
  std::vector<IndicatorTable> tables;
  for (const auto& p : a.tables) tables.push_back(read_table(p));
  const std::size_t k = tables.size();
  fs::create_directories(a.out);

  // Spearman above the diagonal, Pearson below.
  std::vector<std::vector<std::string>> cells(k, std::vector<std::string>(k));
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto paired = stats::pair_tables(tables[i], tables[j]);
      if (paired.x.size() < 2) {
        throw std::invalid_argument(fmt::format("'{}' and '{}' share {} defined journals; need at least 2",
                                                tables[i].indicator_id, tables[j].indicator_id, paired.x.size()));
      }
      const auto r = stats::pearson(std::span<const double>(paired.x), std::span<const double>(paired.y));
      const auto rho = stats::spearman(std::span<const double>(paired.x), std::span<const double>(paired.y));
      cells[i][j] = fixed3(rho);
      cells[j][i] = fixed3(r);
      pairs.push_back({{"a", tables[i].indicator_id},
                       {"b", tables[j].indicator_id},
                       {"n", paired.x.size()},
                       {"pearson", r ? nlohmann::json(*r) : nlohmann::json()},
                       {"spearman", rho ? nlohmann::json(*rho) : nlohmann::json()}});
    }
  }
  {
    const auto path = fs::path(a.out) / "correlations.tsv";
    TabularWriter w(path, '\t');
    std::vector<std::string> header{"indicator"};
    for (const auto& t : tables) header.push_back(t.indicator_id);
    w.row(header);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<std::string> row{tables[i].indicator_id};
      row.insert(row.end(), cells[i].begin(), cells[i].end());
      w.row(row);
    }
    w.close();
    announce(out, path);
    std::ofstream js(fs::path(a.out) / "correlations.json", std::ios::binary | std::ios::trunc);
    js << nlohmann::json{{"pairs", pairs}}.dump(2) << '\n';
    announce(out, fs::path(a.out) / "correlations.json");
    if (a.to_stdout) {
      out << fmt::format("{:<20}", "");
      for (const auto& t : tables) out << fmt::format("{:>20}", t.indicator_id);
      out << '\n';
      for (std::size_t i = 0; i < k; ++i) {
        out << fmt::format("{:<20}", tables[i].indicator_id);
        for (const auto& c : cells[i]) out << fmt::format("{:>20}", c);
        out << '\n';
      }
    }
  }
  {
    const auto path = fs::path(a.out) / "deciles.tsv";
    TabularWriter w(path, '\t');
    w.row({"baseline", "other", "bin", "size", "baseline_max", "baseline_min", "rho"});
    for (std::size_t j = 1; j < k; ++j) {
      for (const auto& b : stats::decile_correlations(tables[0], tables[j], a.deciles)) {
        w.row({tables[0].indicator_id, tables[j].indicator_id, std::to_string(b.index + 1), std::to_string(b.size),
               fmt::format("{:.3f}", b.baseline_max), fmt::format("{:.3f}", b.baseline_min), fixed3(b.rho)});
      }
    }
    w.close();
    announce(out, path);
  }
  std::set<std::string> done;
  for (const auto& t : tables) {
    if (!done.insert(t.indicator_id).second) continue;
    const auto epath = fs::path(a.out) / ("ecdf_" + t.indicator_id + ".tsv");
    TabularWriter e(epath, '\t');
    e.row({"cluster_id", "value", "fraction"});
    for (const auto& g : stats::ecdf_by_group(t, partition)) {
      for (const auto& p : g.points) e.row({g.cluster_id, fmt::format("{}", p.value), fmt::format("{}", p.fraction)});
    }
    e.close();
    announce(out, epath);

    const auto groups = stats::values_by_group(t, partition);
    const auto& clusters = partition.clusters();
    const auto kpath = fs::path(a.out) / ("ks_" + t.indicator_id + ".tsv");
    TabularWriter m(kpath, '\t');
    std::vector<std::string> header{"cluster_id"};
    for (const auto& c : clusters) header.push_back(c.cluster_id);
    m.row(header);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::vector<std::string> row{clusters[g].cluster_id};
      for (std::size_t h = 0; h < groups.size(); ++h) {
        row.push_back(groups[g].empty() || groups[h].empty()
                          ? "NA"
                          : fmt::format("{:.3f}", stats::ks_two_sample(groups[g], groups[h])));
      }
      m.row(row);
    }
    m.close();
    announce(out, kpath);
  }
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::string sizes = "paper2010";
  std::size_t trials = 10000;
  double z = 10.0;
  double ci_level = 0.90;
  std::uint64_t seed = 1;
  std::string out;
};

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> sizes;
  if (!s.empty() && !std::isdigit(static_cast<unsigned char>(s[0]))) {
    for (const auto& c : synth::builtin_profile(s).clusters) sizes.push_back(c.size);
    return sizes;
  }
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto part = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      sizes.push_back(std::stoul(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      throw std::invalid_argument(fmt::format("--sizes: '{}' is not a count", part));
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return sizes;
}

void cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  const auto sizes = parse_sizes(a.sizes);
  const auto result = calibration(sizes, a.trials, a.z, a.ci_level, a.seed);
  fs::create_directories(a.out);
  const auto path = fs::path(a.out) / "calibration.tsv";
  TabularWriter w(path, '\t');
  w.raw_line(fmt::format("# trials={} z={} ci_level={} seed={}", a.trials, a.z, a.ci_level, a.seed));
  w.row({"group", "N_g", "coverage", "exact_coverage"});
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    w.row({std::to_string(g + 1), std::to_string(sizes[g]), fmt::format("{:.4f}", result.coverage[g]),
           fmt::format("{:.4f}", result.exact_coverage[g])});
  }
  w.close();
  announce(out, path);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"citefair: journal indicators, rescaling and field-fairness tests"};
  app.name("citefair");
  app.require_subcommand(1);
  const std::string out_default = default_out();
  const auto window_check = CLI::IsMember({"2", "5", "all"});
  const auto counting_check = CLI::IsMember({"integer", "fractional"});

  SynthArgs synth_args;
  synth_args.out = out_default;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset (the three ingest files)");
  synth_cmd->add_option("--profile", synth_args.profile, "Built-in profile name or profile JSON file")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.seed, "Override the profile seed");
  synth_cmd->add_option("-o,--out", synth_args.out, "Output directory (default $CITEFAIR_OUT)");

  IngestArgs ingest_args;
  ingest_args.out = out_default;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse, validate and persist a dataset bundle");
  ingest_cmd->add_option("-i,--input", ingest_args.input, "Directory with journals.tsv, publications.tsv, citations.tsv");
  ingest_cmd->add_option("--journals", ingest_args.journals, "Journals file");
  ingest_cmd->add_option("--publications", ingest_args.publications, "Publications file");
  ingest_cmd->add_option("--citations", ingest_args.citations, "Citations file");
  ingest_cmd->add_option("--min-cluster-size", ingest_args.min_cluster_size)->capture_default_str();
  ingest_cmd->add_option("--unknown-cited", ingest_args.unknown_cited)
      ->check(CLI::IsMember({"drop", "error"}))
      ->capture_default_str();
  ingest_cmd->add_option("--zero-refs", ingest_args.zero_refs)
      ->check(CLI::IsMember({"drop", "error"}))
      ->capture_default_str();
  ingest_cmd->add_option("--delimiter", ingest_args.delimiter, "Field delimiter (default tab)");
  ingest_cmd->add_option("--census-year", ingest_args.census_year, "Evaluation year (default: latest citing year)");
  ingest_cmd->add_option("-o,--out", ingest_args.out, "Bundle directory (default $CITEFAIR_OUT)");

  IndicatorArgs ind_args;
  ind_args.out = out_default;
  auto* ind_cmd = app.add_subcommand("indicators", "Compute indicator tables and their rescaled variants");
  ind_cmd->add_option("-d,--dataset", ind_args.dataset, "Ingested bundle directory")->required();
  ind_cmd->add_flag("--all", ind_args.all, "Compute the full catalog");
  ind_cmd->add_option("--kind", ind_args.kind)
      ->check(CLI::IsMember({"impact_factor", "total_cites", "cp_ratio", "cp-ratio", "numerator_only"}))
      ->capture_default_str();
  ind_cmd->add_option("--window", ind_args.window)->check(window_check)->capture_default_str();
  ind_cmd->add_option("--counting", ind_args.counting)->check(counting_check)->capture_default_str();
  ind_cmd->add_flag("--ranked", ind_args.ranked, "Also write ranked listings");
  ind_cmd->add_flag("--stdout", ind_args.to_stdout, "Print the top of the first rescaled table");
  ind_cmd->add_option("-o,--out", ind_args.out, "Output directory (default $CITEFAIR_OUT)");

  FairnessArgs fair_args;
  fair_args.out = out_default;
  auto* fair_cmd = app.add_subcommand("fairness", "Run the fairness test on one or two indicator tables");
  fair_cmd->add_option("-d,--dataset", fair_args.dataset, "Ingested bundle directory (partition)")->required();
  fair_cmd->add_option("-t,--table", fair_args.tables, "Indicator table file (repeat for a comparison)")->required();
  fair_cmd->add_option("-z,--z", fair_args.z, "Top percentage")->capture_default_str();
  fair_cmd->add_option("--ci-level", fair_args.ci_level)->capture_default_str();
  fair_cmd->add_option("--format", fair_args.format)
      ->check(CLI::IsMember({"tsv", "json", "both"}))
      ->capture_default_str();
  fair_cmd->add_flag("--stdout", fair_args.to_stdout, "Print the report table");
  fair_cmd->add_option("-o,--out", fair_args.out, "Output directory (default $CITEFAIR_OUT)");

  CorrelateArgs cor_args;
  cor_args.out = out_default;
  auto* cor_cmd = app.add_subcommand("correlate", "Correlation matrix, decile correlations, ECDFs and KS distances");
  cor_cmd->add_option("-d,--dataset", cor_args.dataset, "Ingested bundle directory (partition)")->required();
  cor_cmd->add_option("-t,--table", cor_args.tables, "Indicator table files; the first is the decile baseline")
      ->required();
  cor_cmd->add_option("-k,--deciles", cor_args.deciles, "Number of bins")->capture_default_str();
  cor_cmd->add_flag("--stdout", cor_args.to_stdout, "Print the correlation matrix");
  cor_cmd->add_option("-o,--out", cor_args.out, "Output directory (default $CITEFAIR_OUT)");

  CalibrateArgs cal_args;
  cal_args.out = out_default;
  auto* cal_cmd = app.add_subcommand("calibrate", "Monte Carlo coverage of the fairness intervals");
  cal_cmd->add_option("--sizes", cal_args.sizes, "Built-in profile name or comma-separated cluster sizes")
      ->capture_default_str();
  cal_cmd->add_option("--trials", cal_args.trials)->capture_default_str();
  cal_cmd->add_option("-z,--z", cal_args.z)->capture_default_str();
  cal_cmd->add_option("--ci-level", cal_args.ci_level)->capture_default_str();
  cal_cmd->add_option("--seed", cal_args.seed)->capture_default_str();
  cal_cmd->add_option("-o,--out", cal_args.out, "Output directory (default $CITEFAIR_OUT)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (synth_cmd->parsed()) cmd_synth(synth_args, out);
    if (ingest_cmd->parsed()) cmd_ingest(ingest_args, out, err);
    if (ind_cmd->parsed()) cmd_indicators(ind_args, out);
    if (fair_cmd->parsed()) cmd_fairness(fair_args, out);
    if (cor_cmd->parsed()) cmd_correlate(cor_args, out);
    if (cal_cmd->parsed()) cmd_calibrate(cal_args, out);
  } catch (const ValidationError& e) {
    err << "citefair: " << e.what() << '\n';
    for (const auto& v : e.violations()) err << "  " << v.rule << ": " << v.record << ": " << v.message << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "citefair: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "citefair: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "citefair: internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}

}  // namespace citefair::cli
