#include <cstdlib>
#include <filesystem>
#include <memory>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "citefair/indicators.hpp"
#include "citefair/ingest.hpp"
#include "citefair/synth.hpp"
#include "fixtures.hpp"

namespace citefair {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::TempDir;
using testing::write_file;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Outcome o;
  o.code = cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

/// One small synthetic bundle, ingested once and shared by the suite.
class Pipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<TempDir>();
    const auto raw = cli({"synth", "--profile", "small", "-o", path("raw")});
    ASSERT_EQ(raw.code, 0) << raw.err;
    const auto ing = cli({"ingest", "-i", path("raw"), "-o", path("bundle")});
    ASSERT_EQ(ing.code, 0) << ing.err;
    const auto ind = cli({"indicators", "-d", path("bundle"), "--all", "-o", path("tables")});
    ASSERT_EQ(ind.code, 0) << ind.err;
  }
  static void TearDownTestSuite() { dir_.reset(); }

  static std::string path(const std::string& name) { return (dir_->path() / name).string(); }
  static std::string table(const std::string& id) { return path("tables/" + id + ".tsv"); }

  static std::unique_ptr<TempDir> dir_;
};

std::unique_ptr<TempDir> Pipeline::dir_;

TEST_F(Pipeline, SynthWritesABundleAndItsProfile) {
  for (const char* f : {"journals.tsv", "publications.tsv", "citations.tsv", "dataset.json", "profile.json"}) {
    EXPECT_TRUE(fs::exists(path(std::string("raw/") + f))) << f;
  }
  EXPECT_EQ(synth::load_profile(path("raw/profile.json")).name, "small");
}

TEST_F(Pipeline, IndicatorsWritesEveryCatalogTable) {
  for (const auto& spec : indicator_catalog()) {
    EXPECT_TRUE(fs::exists(table(spec.id()))) << spec.id();
    EXPECT_TRUE(fs::exists(table(spec.id() + "-rescaled"))) << spec.id();
  }
  const auto variance = read_file(path("tables/variance.tsv"));
  EXPECT_EQ(variance.rfind("indicator_id\tnormalization\tn\tgrand_mean\tss_total\tss_between\tss_within\teta_squared\n", 0),
            0u);
}

TEST_F(Pipeline, RescaledTablesHaveUnitClusterMeans) {
  const auto t = read_table(table("IF5-FC-rescaled"));
  const auto part = Partition::from_dataset(read_dataset(path("bundle")));
  std::vector<double> sum(part.clusters().size(), 0.0);
  std::vector<double> n(part.clusters().size(), 0.0);
  for (const auto& e : t.entries) {
    if (!e.value) continue;
    const auto g = *part.cluster_of(e.journal_id);
    sum[g] += *e.value;
    n[g] += 1;
  }
  for (std::size_t g = 0; g < sum.size(); ++g) EXPECT_NEAR(sum[g] / n[g], 1.0, 1e-9);
}

TEST_F(Pipeline, FractionalTwoYearSelection) {
  TempDir out;
  const auto r = cli({"indicators", "-d", path("bundle"), "--window", "2", "--counting", "fractional", "--ranked", "-o",
                      out.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "IF2-FC.tsv"));
  EXPECT_TRUE(fs::exists(out / "IF2-FC-rescaled.tsv"));
  EXPECT_TRUE(fs::exists(out / "IF2-FC.ranked.tsv"));
  EXPECT_EQ(read_file(out / "IF2-FC.tsv"), read_file(table("IF2-FC")));
}

TEST_F(Pipeline, CpRatioKindAlias) {
  TempDir out;
  const auto r = cli({"indicators", "-d", path("bundle"), "--kind", "cp-ratio", "-o", out.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "CP-IC.tsv"));
}

TEST_F(Pipeline, FairnessComparisonWritesAllReports) {
  TempDir out;
  const auto r = cli({"fairness", "-d", path("bundle"), "-t", table("IF2-FC"), "-t", table("IF2-IC-rescaled"), "-o",
                      out.path().string(), "--stdout"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"fairness_IF2-FC.tsv", "fairness_IF2-FC.json", "fairness_IF2-IC-rescaled.tsv",
                        "fairness_IF2-IC-rescaled.json", "comparison_IF2-FC_vs_IF2-IC-rescaled.tsv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  EXPECT_TRUE(contains(r.out, "overall"));
}

TEST_F(Pipeline, TopQuartileSize) {
  TempDir out;
  const auto r = cli({"fairness", "-d", path("bundle"), "-t", table("IF2-IC"), "-z", "25", "--format", "json", "-o",
                      out.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(fs::exists(out / "fairness_IF2-IC.tsv"));
  const auto j = nlohmann::json::parse(read_file(out / "fairness_IF2-IC.json"));
  EXPECT_EQ(j["n_z"].get<std::size_t>(), j["population"].get<std::size_t>() / 4);
}

TEST_F(Pipeline, RerunsAreByteIdentical) {
  TempDir a;
  TempDir b;
  for (const auto* d : {&a, &b}) {
    ASSERT_EQ(cli({"indicators", "-d", path("bundle"), "--all", "-o", d->path().string()}).code, 0);
    ASSERT_EQ(cli({"fairness", "-d", path("bundle"), "-t", table("IF5-IC"), "-t", table("IF5-IC-rescaled"), "-o",
                   d->path().string()})
                  .code,
              0);
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a.path())) {
    ++files;
    const auto name = entry.path().filename().string();
    EXPECT_EQ(read_file(entry.path()), read_file(b / name)) << name;
  }
  EXPECT_GT(files, 24u);
}

TEST_F(Pipeline, CorrelateOutputs) {
  TempDir out;
  const auto r = cli({"correlate", "-d", path("bundle"), "-t", table("IF2-IC"), "-t", table("IF2-FC"), "-t",
                      table("TC-IC"), "-k", "5", "-o", out.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto matrix = read_file(out / "correlations.tsv");
  EXPECT_EQ(matrix.rfind("indicator\tIF2-IC\tIF2-FC\tTC-IC\nIF2-IC\t\t", 0), 0u);
  const auto j = nlohmann::json::parse(read_file(out / "correlations.json"));
  EXPECT_EQ(j["pairs"].size(), 3u);
  for (const char* f : {"deciles.tsv", "ecdf_IF2-IC.tsv", "ks_IF2-IC.tsv", "ecdf_TC-IC.tsv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  std::istringstream deciles(read_file(out / "deciles.tsv"));
  std::size_t lines = 0;
  for (std::string l; std::getline(deciles, l);) ++lines;
  EXPECT_EQ(lines, 1u + 2 * 5);
}

TEST_F(Pipeline, CorrelateNeedsTwoTables) {
  const auto r = cli({"correlate", "-d", path("bundle"), "-t", table("IF2-IC")});
  EXPECT_EQ(r.code, 2);
}

TEST_F(Pipeline, CorrelateRejectsTablesWithoutSharedJournals) {
  TempDir dir;
  const auto ds = read_dataset(path("bundle"));
  IndicatorTable a;
  IndicatorTable b;
  a.indicator_id = "A";
  b.indicator_id = "B";
  for (std::size_t i = 0; i < ds.journals.size(); ++i) {
    const bool first_half = i < ds.journals.size() / 2;
    a.entries.push_back({ds.journals[i].journal_id, first_half ? std::optional<double>(double(i)) : std::nullopt});
    b.entries.push_back({ds.journals[i].journal_id, first_half ? std::nullopt : std::optional<double>(double(i))});
  }
  write_table(a, dir / "a.tsv");
  write_table(b, dir / "b.tsv");
  const auto r = cli({"correlate", "-d", path("bundle"), "-t", (dir / "a.tsv").string(), "-t",
                      (dir / "b.tsv").string(), "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "share 0"));
}

TEST_F(Pipeline, DefaultOutputDirectoryFromEnvironment) {
  TempDir dir;
  ::setenv("CITEFAIR_OUT", (dir / "env-out").c_str(), 1);
  const auto r = cli({"fairness", "-d", path("bundle"), "-t", table("IF2-IC")});
  ::unsetenv("CITEFAIR_OUT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "env-out" / "fairness_IF2-IC.tsv"));
}

TEST(Cli, SingleClusterIsFair) {
  TempDir dir;
  synth::SynthProfile p;
  p.name = "one";
  p.clusters = {{"1", "Everything", 40, 2.0, 20, 0.5}};
  synth::save_profile(p, dir / "one.json");
  ASSERT_EQ(cli({"synth", "--profile", (dir / "one.json").string(), "-o", (dir / "raw").string()}).code, 0);
  ASSERT_EQ(cli({"ingest", "-i", (dir / "raw").string(), "-o", (dir / "b").string()}).code, 0);
  ASSERT_EQ(cli({"indicators", "-d", (dir / "b").string(), "-o", (dir / "t").string()}).code, 0);
  const auto r = cli({"fairness", "-d", (dir / "b").string(), "-t", (dir / "t" / "IF2-IC.tsv").string(), "-o",
                      (dir / "f").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(read_file(dir / "f" / "fairness_IF2-IC.json"));
  EXPECT_TRUE(j["per_cluster"][0]["within_ci"].get<bool>());
  EXPECT_TRUE(j["all_within_ci"].get<bool>());
}

/// Thirteen clusters, two of them (8 and 11) below the size threshold.
void write_thirteen_clusters(const fs::path& dir) {
  std::string journals = "journal_id\ttitle\tcluster_id\tcluster_name\n";
  std::string pubs = "journal_id\tyear\tcitable_items\n";
  std::string cites = "citing_paper_id\tciting_journal_id\tciting_year\tcited_journal_id\tcited_year\tn_refs\n";
  int n = 0;
  for (int c = 1; c <= 13; ++c) {
    const int size = c == 8 ? 2 : c == 11 ? 8 : 12;
    for (int k = 0; k < size; ++k, ++n) {
      const auto id = "J" + std::to_string(n);
      journals += id + "\tT" + std::to_string(n) + "\t" + std::to_string(c) + "\tField " + std::to_string(c) + "\n";
      pubs += id + "\t2009\t10\n" + id + "\t2008\t12\n";
      cites += "P" + std::to_string(n) + "\t" + id + "\t2010\tJ" + std::to_string((n * 7) % 130) + "\t2009\t3\n";
    }
  }
  write_file(dir / "journals.tsv", journals);
  write_file(dir / "publications.tsv", pubs);
  write_file(dir / "citations.tsv", cites);
}

TEST(Cli, IngestExcludesSmallClusters) {
  TempDir dir;
  write_thirteen_clusters(dir.path());
  const auto r = cli({"ingest", "-i", dir.path().string(), "-o", (dir / "b").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "132 journals in 11 clusters")) << r.out;
  EXPECT_TRUE(contains(r.out, "excluded 2 clusters (10 journals)")) << r.out;
  EXPECT_TRUE(contains(r.out, "excluded cluster 8 (Field 8): 2 journals"));
  EXPECT_TRUE(contains(r.out, "excluded cluster 11 (Field 11): 8 journals"));
  const auto summary = read_file(dir / "b" / "exclusions.tsv");
  EXPECT_TRUE(contains(summary, "excluded_clusters\t2\t"));
  EXPECT_TRUE(contains(summary, "excluded_journals\t10\t"));
}

TEST(Cli, MissingInputFileIsNamed) {
  TempDir dir;
  write_thirteen_clusters(dir.path());
  fs::remove(dir / "citations.tsv");
  const auto r = cli({"ingest", "-i", dir.path().string(), "-o", (dir / "b").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, (dir / "citations.tsv").string())) << r.err;
}

TEST(Cli, InvalidDatasetListsViolations) {
  TempDir dir;
  write_thirteen_clusters(dir.path());
  auto cites = read_file(dir / "citations.tsv");
  cites += "PX\tJ0\t2010\tJ1\t2011\t3\n";
  write_file(dir / "citations.tsv", cites);
  const auto r = cli({"ingest", "-i", dir.path().string(), "-o", (dir / "b").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "cited_after_citing")) << r.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"indicators"}).code, 2);
  EXPECT_EQ(cli({"indicators", "-d", "x", "--window", "3"}).code, 2);
  const auto r = cli({"synth", "--profile", "no-such-profile", "-o", "unused"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "no-such-profile"));
}

TEST(Cli, HelpSucceeds) {
  const auto r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "fairness"));
}

TEST(Cli, CalibrateWritesCoverageTable) {
  TempDir dir;
  const auto r = cli({"calibrate", "--sizes", "30,60,90", "--trials", "200", "-o", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = read_file(dir / "calibration.tsv");
  EXPECT_TRUE(contains(text, "group\tN_g\tcoverage\texact_coverage\n"));
  EXPECT_TRUE(contains(text, "\n3\t90\t"));
}

}  // namespace
}  // namespace citefair
