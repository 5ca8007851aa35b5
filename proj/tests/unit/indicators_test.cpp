#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "citefair/error.hpp"
#include "citefair/indicators.hpp"
#include "citefair/synth.hpp"
#include "fixtures.hpp"

namespace citefair {
namespace {

using testing::DatasetBuilder;
using testing::make_partition;
using testing::make_table;

constexpr IndicatorSpec kIF2{IndicatorKind::impact_factor, Window::two, Counting::integer};
constexpr IndicatorSpec kIF2F{IndicatorKind::impact_factor, Window::two, Counting::fractional};
constexpr IndicatorSpec kIF5{IndicatorKind::impact_factor, Window::five, Counting::integer};

std::optional<double> value_of(const IndicatorTable& t, const std::string& id) {
  for (const auto& e : t.entries) {
    if (e.journal_id == id) return e.value;
  }
  ADD_FAILURE() << "no entry " << id;
  return std::nullopt;
}

Dataset window_fixture() {
  DatasetBuilder b;
  b.cluster("c").journal("jA", "c").journal("jB", "c").journal("jC", "c");
  b.items("jA", 2009, 100).items("jA", 2008, 150).items("jA", 2010, 40);
  for (int y = 2005; y <= 2009; ++y) b.items("jB", y, 10);
  // One paper with a 4-item reference list citing jA twice in the window.
  b.cite("p1", "jB", 2010, "jA", 2009, 4).cite("p1", "jB", 2010, "jA", 2008, 4);
  // Out-of-window and wrong-year events that IF2 must ignore.
  b.cite("p1", "jB", 2010, "jA", 2005, 4).cite("p1", "jB", 2010, "jA", 2010, 4);
  b.cite("p0", "jB", 2009, "jA", 2008, 1);
  for (int i = 0; i < 5; ++i) b.cite("q" + std::to_string(i), "jA", 2010, "jB", 2009, 1);
  return b.build();
}

TEST(IndicatorSpec, IdsAndChecks) {
  EXPECT_EQ(kIF2.id(), "IF2-IC");
  EXPECT_EQ(kIF5.id(), "IF5-IC");
  EXPECT_EQ(kIF2F.id(), "IF2-FC");
  EXPECT_EQ((IndicatorSpec{IndicatorKind::cp_ratio, Window::all_prior, Counting::fractional}).id(), "CP-FC");
  EXPECT_EQ((IndicatorSpec{IndicatorKind::total_cites, Window::all_prior, Counting::integer}).id(), "TC-IC");
  EXPECT_EQ((IndicatorSpec{IndicatorKind::numerator_only, Window::five, Counting::fractional}).id(), "TC-FC5");
  EXPECT_THROW((IndicatorSpec{IndicatorKind::impact_factor, Window::all_prior, Counting::integer}).check(),
               std::invalid_argument);
  EXPECT_THROW((IndicatorSpec{IndicatorKind::cp_ratio, Window::two, Counting::integer}).check(),
               std::invalid_argument);
  EXPECT_EQ(indicator_catalog().size(), 12u);
}

TEST(Numerator, FractionalAndIntegerCounting) {
  const auto ds = window_fixture();
  EXPECT_DOUBLE_EQ(if_numerator(ds, "jA", kIF2F), 0.5);
  EXPECT_DOUBLE_EQ(if_numerator(ds, "jA", kIF2), 2.0);
  EXPECT_DOUBLE_EQ(if_numerator(ds, "jB", kIF2F), 5.0);
  EXPECT_DOUBLE_EQ(if_numerator(ds, "jB", kIF2), 5.0);
  EXPECT_DOUBLE_EQ(if_numerator(ds, "jA", kIF5), 3.0);
  EXPECT_DOUBLE_EQ(if_numerator(ds, "jC", kIF2), 0.0);
  EXPECT_DOUBLE_EQ(if_numerator(ds, "unknown", kIF2), 0.0);
}

TEST(Denominator, SumsWindowYears) {
  const auto ds = window_fixture();
  EXPECT_EQ(if_denominator(ds, "jA", Window::two), 250);
  EXPECT_EQ(if_denominator(ds, "jC", Window::two), 0);
  EXPECT_EQ(if_denominator(ds, "jB", Window::five), 50);
}

TEST(ComputeTable, ImpactFactorAndUndefined) {
  DatasetBuilder b;
  b.cluster("c").journal("jA", "c").journal("jZ", "c");
  b.items("jA", 2009, 100).items("jA", 2008, 150);
  for (int i = 0; i < 50; ++i) b.cite("p" + std::to_string(i), "jZ", 2010, "jA", 2009, 3);
  const auto t = compute_table(b.build(), kIF2);
  EXPECT_EQ(t.indicator_id, "IF2-IC");
  EXPECT_DOUBLE_EQ(*value_of(t, "jA"), 0.2);
  EXPECT_FALSE(value_of(t, "jZ").has_value());
  EXPECT_EQ(t.defined_count(), 1u);
}

TEST(ComputeTable, TotalCitesAndCpRatio) {
  const auto ds = window_fixture();
  const auto tc = compute_table(ds, {IndicatorKind::total_cites, Window::all_prior, Counting::integer});
  EXPECT_DOUBLE_EQ(*value_of(tc, "jA"), 4.0);  // every 2010 event, including the 2010 item
  const auto cp = compute_table(ds, {IndicatorKind::cp_ratio, Window::all_prior, Counting::fractional});
  EXPECT_DOUBLE_EQ(*value_of(cp, "jA"), 1.0 / 40.0);
  EXPECT_FALSE(value_of(cp, "jB").has_value());
}

TEST(ComputeTable, AllSingleReferenceListsMakeCountingModesCoincide) {
  DatasetBuilder b;
  b.cluster("c").journal("a", "c").journal("b", "c");
  b.items("a", 2009, 3).items("b", 2008, 4).items("a", 2010, 2).items("b", 2010, 1);
  for (int i = 0; i < 7; ++i) b.cite("p" + std::to_string(i), "a", 2010, i % 2 ? "a" : "b", 2008 + i % 2, 1);
  const auto ds = b.build();
  for (const auto& spec : indicator_catalog()) {
    if (spec.counting != Counting::integer) continue;
    auto frac = spec;
    frac.counting = Counting::fractional;
    EXPECT_EQ(compute_table(ds, spec).entries, compute_table(ds, frac).entries) << spec.id();
  }
}

TEST(ComputeTable, MatchesPerJournalFunctions) {
  auto profile = synth::small_profile();
  profile.seed = 3;
  const auto ds = synth::generate(profile);
  for (const auto& spec : {kIF2, kIF2F, kIF5}) {
    const auto t = compute_table(ds, spec);
    for (std::size_t j = 0; j < 40; ++j) {
      const auto& id = ds.journals[j].journal_id;
      const auto d = if_denominator(ds, id, spec.window);
      const auto v = value_of(t, id);
      if (d == 0) {
        EXPECT_FALSE(v.has_value());
      } else {
        EXPECT_NEAR(*v, if_numerator(ds, id, spec) / static_cast<double>(d), 1e-12);
      }
    }
  }
}

TEST(ComputeTable, FractionalNeverExceedsInteger) {
  const auto ds = synth::generate(synth::small_profile());
  for (const auto& spec : indicator_catalog()) {
    if (spec.counting != Counting::integer) continue;
    auto frac = spec;
    frac.counting = Counting::fractional;
    const auto a = compute_table(ds, spec);
    const auto b = compute_table(ds, frac);
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      if (a.entries[i].value) {
        EXPECT_LE(*b.entries[i].value, *a.entries[i].value + 1e-12);
      }
    }
  }
}

TEST(ComputeTable, OnePaperContributesAtMostOne) {
  DatasetBuilder b;
  b.cluster("c").journal("a", "c").journal("b", "c");
  // p1 lands all 3 of its references in the set, p2 only 2 of 5.
  b.cite("p1", "x", 2010, "a", 2009, 3).cite("p1", "x", 2010, "a", 2008, 3).cite("p1", "x", 2010, "b", 2001, 3);
  b.cite("p2", "x", 2010, "a", 2009, 5).cite("p2", "x", 2010, "b", 2009, 5);
  const auto ds = b.build();
  const auto t = compute_table(ds, {IndicatorKind::total_cites, Window::all_prior, Counting::fractional});
  const double total = *value_of(t, "a") + *value_of(t, "b");
  EXPECT_NEAR(total, 1.0 + 0.4, 1e-15);
}

TEST(Rescale, DividesByClusterMean) {
  const auto t = make_table("X", {{"a", 2.0}, {"b", 4.0}, {"c", 6.0}, {"d", 3.0}, {"e", 3.0}, {"f", std::nullopt}});
  const auto p = make_partition({{"a", "g1"}, {"b", "g1"}, {"c", "g1"}, {"d", "g2"}, {"e", "g2"}, {"f", "g2"}});
  const auto r = rescale(t, p);
  EXPECT_EQ(r.indicator_id, "X-rescaled");
  EXPECT_EQ(r.source_id, "X");
  EXPECT_EQ(r.normalization, Normalization::rescaled);
  EXPECT_DOUBLE_EQ(*value_of(r, "a"), 0.5);
  EXPECT_DOUBLE_EQ(*value_of(r, "b"), 1.0);
  EXPECT_DOUBLE_EQ(*value_of(r, "c"), 1.5);
  EXPECT_DOUBLE_EQ(*value_of(r, "d"), 1.0);
  EXPECT_FALSE(value_of(r, "f").has_value());
  ASSERT_EQ(r.cluster_means.size(), 2u);
  EXPECT_EQ(r.cluster_means[0], (ClusterMean{"g1", 4.0, 3}));
  EXPECT_EQ(r.cluster_means[1], (ClusterMean{"g2", 3.0, 2}));
}

TEST(Rescale, PublishedSocialSciencesQuotient) {
  // Ten journals whose mean is 0.576, one of them at 3.843.
  const double mean = 0.576;
  IndicatorTable single;
  single.indicator_id = "ISI-IF2";
  single.entries = {{"top", 3.843}};
  for (int i = 0; i < 9; ++i) single.entries.push_back({"f" + std::to_string(i), (10 * mean - 3.843) / 9.0});
  std::vector<std::pair<std::string, std::string>> members;
  for (const auto& e : single.entries) members.emplace_back(e.journal_id, "13");
  const auto r = rescale(single, make_partition(members));
  EXPECT_NEAR(r.cluster_means[0].mean, 0.576, 1e-12);
  EXPECT_NEAR(*value_of(r, "top"), 6.672, 5e-4);
}

TEST(Rescale, ConstantClusterBecomesOne) {
  const auto t = make_table("X", {{"a", 7.5}, {"b", 7.5}, {"c", 7.5}});
  const auto r = rescale(t, make_partition({{"a", "g"}, {"b", "g"}, {"c", "g"}}));
  for (const auto& e : r.entries) EXPECT_DOUBLE_EQ(*e.value, 1.0);
}

TEST(Rescale, AllZeroClusterIsAnErrorNamingIt) {
  const auto t = make_table("X", {{"a", 1.0}, {"b", 0.0}, {"c", 0.0}});
  try {
    (void)rescale(t, make_partition({{"a", "g1"}, {"b", "zeros"}, {"c", "zeros"}}));
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("zeros"), std::string::npos);
  }
}

TEST(Rescale, ClusterWithoutDefinedValuesIsAnError) {
  const auto t = make_table("X", {{"a", 1.0}, {"b", std::nullopt}});
  EXPECT_THROW((void)rescale(t, make_partition({{"a", "g1"}, {"b", "g2"}})), Error);
}

TEST(Rescale, PreservesOrderWithinClusterAndMeansAreOne) {
  const auto ds = synth::generate(synth::small_profile());
  const auto p = Partition::from_dataset(ds);
  for (const auto& spec : indicator_catalog()) {
    const auto raw = compute_table(ds, spec);
    const auto r = rescale(raw, p);
    std::map<std::size_t, std::pair<double, std::size_t>> sums;
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
      if (!r.entries[i].value) continue;
      auto& s = sums[*p.cluster_of(r.entries[i].journal_id)];
      s.first += *r.entries[i].value;
      ++s.second;
      for (std::size_t k = i + 1; k < std::min(r.entries.size(), i + 20); ++k) {
        if (!r.entries[k].value || p.cluster_of(r.entries[k].journal_id) != p.cluster_of(r.entries[i].journal_id)) {
          continue;
        }
        const auto raw_cmp = *raw.entries[i].value <=> *raw.entries[k].value;
        const auto new_cmp = *r.entries[i].value <=> *r.entries[k].value;
        EXPECT_EQ(raw_cmp, new_cmp) << spec.id();
      }
    }
    for (const auto& [g, s] : sums) EXPECT_NEAR(s.first / static_cast<double>(s.second), 1.0, 1e-9) << spec.id();
  }
}

TEST(RankTable, DescendingWithIdTieBreakAndUndefinedLast) {
  const auto r = rank_table(make_table("X", {{"b", 1.0}, {"n", std::nullopt}, {"c", 2.0}, {"a", 3.0}}));
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0].journal_id, "a");
  EXPECT_EQ(r[1].journal_id, "c");
  EXPECT_EQ(r[2].journal_id, "b");
  EXPECT_EQ(r[3].journal_id, "n");
  EXPECT_EQ(r[3].rank, 4u);

  const auto tie = rank_table(make_table("X", {{"b", 2.0}, {"a", 2.0}}));
  EXPECT_EQ(tie[0].journal_id, "a");
  EXPECT_EQ(tie[0].rank, 1u);
  EXPECT_EQ(tie[1].rank, 2u);
}

TEST(RankTable, PublishedTopOfRescaledList) {
  // Head of the rescaled ISI-IF2 ranking; the fixture embeds the published values.
  const auto t = make_table("ISI-IF2-rescaled", {{"NEW ENGL J MED", 15.558},
                                                 {"CA-CANCER J CLIN", 26.211},
                                                 {"ANNU REV IMMUNOL", 12.468},
                                                 {"REV MOD PHYS", 20.062}});
  const auto r = rank_table(t);
  EXPECT_EQ(r[0].journal_id, "CA-CANCER J CLIN");
  EXPECT_DOUBLE_EQ(*r[0].value, 26.211);
}

TEST(TableFile, RoundTripKeepsValuesAndProvenance) {
  testing::TempDir dir;
  const auto raw = compute_table(synth::generate(synth::small_profile()), kIF2F);
  const auto r = rescale(raw, Partition::from_dataset(synth::generate(synth::small_profile())));
  write_table(r, dir / "t.tsv");
  const auto back = read_table(dir / "t.tsv");
  EXPECT_EQ(back.indicator_id, r.indicator_id);
  EXPECT_EQ(back.kind, r.kind);
  EXPECT_EQ(back.window, r.window);
  EXPECT_EQ(back.counting, r.counting);
  EXPECT_EQ(back.normalization, Normalization::rescaled);
  EXPECT_EQ(back.census_year, r.census_year);
  EXPECT_EQ(back.source_id, "IF2-FC");
  EXPECT_EQ(back.cluster_means, r.cluster_means);
  EXPECT_EQ(back.entries, r.entries);
}

TEST(TableFile, ExternalValuesFile) {
  testing::TempDir dir;
  testing::write_file(dir / "ISI-IF2.tsv", "journal_id\tvalue\nA\t3.843\nB\tNA\n");
  const auto t = read_table(dir / "ISI-IF2.tsv");
  EXPECT_EQ(t.indicator_id, "ISI-IF2");
  EXPECT_EQ(t.kind, IndicatorKind::external);
  ASSERT_EQ(t.entries.size(), 2u);
  EXPECT_DOUBLE_EQ(*t.entries[0].value, 3.843);
  EXPECT_FALSE(t.entries[1].value.has_value());

  testing::write_file(dir / "bad.tsv", "journal_id\tvalue\nA\t-1\n");
  EXPECT_THROW((void)read_table(dir / "bad.tsv"), ParseError);
}

}  // namespace
}  // namespace citefair
