#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "tripurpose/error.hpp"
#include "tripurpose/metrics.hpp"
#include "tripurpose/rng.hpp"

using namespace tripurpose;
using tptest::kBase;
using tptest::make_staypoint;

namespace {

// Jensen-Shannon divergence in long double, straight from its definition.
long double reference_jsd(const std::vector<double>& p_in, const std::vector<double>& q_in) {
  long double ps = 0.0L, qs = 0.0L;
  for (double v : p_in) ps += v;
  for (double v : q_in) qs += v;
  auto term = [](long double x, long double m) {
    if (x <= 0.0L || m <= 0.0L) return 0.0L;
    return x * std::log2(x / m);
  };
  long double out = 0.0L;
  for (std::size_t i = 0; i < p_in.size(); ++i) {
    long double p = p_in[i] / ps;
    long double q = q_in[i] / qs;
    long double m = 0.5L * (p + q);
    out += 0.5L * term(p, m) + 0.5L * term(q, m);
  }
  return out;
}

StaypointCorpus labeled_corpus(const std::vector<std::pair<Activity, double>>& rows) {
  StaypointCorpus corpus(1);
  corpus[0].agent_id = "A";
  Instant t = 0;
  for (const auto& [activity, confidence] : rows) {
    corpus[0].points.push_back(make_staypoint(kBase, t, t + 1800, activity, confidence));
    t += 3600;
  }
  return corpus;
}

}  // namespace

TEST_CASE("identical distributions have zero divergence") {
  std::vector<double> p{0.25, 0.25, 0.5};
  CHECK(jsd(p, p) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("disjoint point masses are maximally divergent") {
  std::vector<double> p{1.0, 0.0};
  std::vector<double> q{0.0, 1.0};
  CHECK(jsd(p, q) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("divergence matches a high-precision restatement") {
  std::vector<double> p{0.5, 0.5};
  std::vector<double> q{0.25, 0.75};
  CHECK(jsd(p, q) == doctest::Approx(static_cast<double>(reference_jsd(p, q))).epsilon(1e-12));
  // Known value for this pair, from the definition.
  CHECK(jsd(p, q) == doctest::Approx(0.04879494069539847).epsilon(1e-6));
}

TEST_CASE("unnormalized inputs are renormalized before comparing") {
  std::vector<double> p{5.0, 5.0};
  std::vector<double> q{1.0, 3.0};
  std::vector<double> pn{0.5, 0.5};
  std::vector<double> qn{0.25, 0.75};
  CHECK(jsd(p, q) == doctest::Approx(jsd(pn, qn)).epsilon(1e-12));
}

TEST_CASE("length mismatch is a schema error") {
  std::vector<double> p{1.0, 0.0};
  std::vector<double> q{1.0, 0.0, 0.0};
  bool threw = false;
  try {
    (void)jsd(p, q);
  } catch (const Error& e) {
    threw = true;
    CHECK(e.kind() == ErrorKind::Schema);
  }
  CHECK(threw);
}

TEST_CASE("divergence is symmetric and bounded on random pairs") {
  Rng rng(808);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = static_cast<std::size_t>(rng.uniform_int(2, 20));
    std::vector<double> p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.uniform01();
      q[i] = rng.uniform01();
    }
    double forward = jsd(p, q);
    double backward = jsd(q, p);
    CHECK(forward == doctest::Approx(backward).epsilon(1e-12));
    CHECK(forward >= 0.0);
    CHECK(forward <= 1.0 + 1e-12);
  }
}

TEST_CASE("weighted temporal divergence is zero when histograms mirror the priors") {
  ReferenceStats ref = tptest::uniform_reference();
  LabelHistograms hist{};
  for (std::size_t a = 0; a < kActivityCount; ++a) {
    hist.freq[a] = 96.0;
    for (int s = 0; s < kSlotsPerDay; ++s) hist.start[a][static_cast<std::size_t>(s)] = 1.0;
    for (int b = 0; b < kDurationBins; ++b) hist.duration[a][static_cast<std::size_t>(b)] = 1.0;
  }
  hist.total = 96 * kActivityCount;
  CHECK(weighted_temporal_jsd(hist, ref, TemporalDimension::Start) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(weighted_temporal_jsd(hist, ref, TemporalDimension::Duration) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("weighted temporal divergence composes share-weighted per-activity terms") {
  ReferenceStats ref = tptest::uniform_reference();
  for (std::size_t a = 0; a < kActivityCount; ++a) ref.activity_shares[a] = 0.0;
  std::size_t home = index_of(Activity::Home);
  std::size_t work = index_of(Activity::Work);
  ref.activity_shares[home] = 0.75;
  ref.activity_shares[work] = 0.25;

  LabelHistograms hist{};
  hist.freq[home] = 10.0;
  hist.freq[work] = 10.0;
  // Home concentrates in slot 0 against a uniform prior; Work matches its
  // prior exactly.
  hist.start[home][0] = 10.0;
  for (int s = 0; s < kSlotsPerDay; ++s) hist.start[work][static_cast<std::size_t>(s)] = 1.0;
  hist.total = 20;

  std::vector<double> spike(kSlotsPerDay, 0.0);
  spike[0] = 1.0;
  std::vector<double> uniform(kSlotsPerDay, 1.0 / 96.0);
  double j_home = jsd(spike, uniform);
  double expected = 0.75 * j_home + 0.25 * 0.0;
  CHECK(weighted_temporal_jsd(hist, ref, TemporalDimension::Start) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero-share activities are skipped and the weights renormalized") {
  ReferenceStats ref = tptest::uniform_reference();
  for (std::size_t a = 0; a < kActivityCount; ++a) ref.activity_shares[a] = 0.0;
  std::size_t home = index_of(Activity::Home);
  std::size_t work = index_of(Activity::Work);
  ref.activity_shares[home] = 0.6;
  ref.activity_shares[work] = 0.0;  // never weighted, divergence ignored

  LabelHistograms hist{};
  hist.freq[home] = 4.0;
  hist.freq[work] = 4.0;
  hist.start[home][0] = 4.0;
  hist.start[work][50] = 4.0;
  hist.total = 8;

  std::vector<double> spike(kSlotsPerDay, 0.0);
  spike[0] = 1.0;
  std::vector<double> uniform(kSlotsPerDay, 1.0 / 96.0);
  // Only Home carries weight, so the weighted mean is exactly its JSD.
  CHECK(weighted_temporal_jsd(hist, ref, TemporalDimension::Start) ==
        doctest::Approx(jsd(spike, uniform)).epsilon(1e-12));
}

TEST_CASE("an activity the labeler never produced counts as maximally divergent") {
  ReferenceStats ref = tptest::uniform_reference();
  for (std::size_t a = 0; a < kActivityCount; ++a) ref.activity_shares[a] = 0.0;
  std::size_t home = index_of(Activity::Home);
  std::size_t worship = index_of(Activity::Worship);
  ref.activity_shares[home] = 0.5;
  ref.activity_shares[worship] = 0.5;

  LabelHistograms hist{};
  hist.freq[home] = 5.0;
  for (int s = 0; s < kSlotsPerDay; ++s) hist.start[home][static_cast<std::size_t>(s)] = 1.0;
  hist.total = 5;

  double got = weighted_temporal_jsd(hist, ref, TemporalDimension::Start);
  CHECK(got == doctest::Approx(0.5 * 0.0 + 0.5 * 1.0).epsilon(1e-12));
}

TEST_CASE("high-confidence rate counts the threshold as reached") {
  StaypointCorpus corpus = labeled_corpus(
      {{Activity::Home, 0.6}, {Activity::Work, 0.4}, {Activity::School, 0.5}});
  bool empty = true;
  double rate = hcr(corpus, 0.5, ActivityClass::Mandatory, &empty);
  CHECK_FALSE(empty);
  CHECK(rate == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  StaypointCorpus all_high = labeled_corpus({{Activity::Leisure, 1.0}, {Activity::Social, 1.0}});
  CHECK(hcr(all_high, 0.5, ActivityClass::NonMandatory) == doctest::Approx(1.0));
}

TEST_CASE("an empty class reports zero and raises the empty flag") {
  StaypointCorpus corpus = labeled_corpus({{Activity::Home, 0.9}});
  bool empty = false;
  double rate = hcr(corpus, 0.5, ActivityClass::NonMandatory, &empty);
  CHECK(empty);
  CHECK(rate == 0.0);
}

TEST_CASE("an all-home corpus reduces the frequency divergence to a point-mass comparison") {
  ReferenceStats ref = default_reference_stats();
  std::vector<std::pair<Activity, double>> rows(40, {Activity::Home, 0.8});
  StaypointCorpus corpus = labeled_corpus(rows);
  EvalReport report = build_report(corpus, ref);

  std::vector<double> e_home(kActivityCount, 0.0);
  e_home[index_of(Activity::Home)] = 1.0;
  std::vector<double> shares(ref.activity_shares.begin(), ref.activity_shares.end());
  CHECK(report.jsd_freq == doctest::Approx(jsd(e_home, shares)).epsilon(1e-12));
  CHECK(report.staypoint_count == 40);
  CHECK(report.hcr_mandatory == doctest::Approx(1.0));
  CHECK(report.hcr_nonmandatory_empty);
}

TEST_CASE("labels sampled from the reference priors converge to low divergences") {
  ReferenceStats ref = default_reference_stats();
  std::mt19937_64 gen(4242);
  std::discrete_distribution<std::size_t> pick_label(ref.activity_shares.begin(),
                                                     ref.activity_shares.end());

  StaypointCorpus corpus(50);
  for (std::size_t ag = 0; ag < corpus.size(); ++ag) {
    corpus[ag].agent_id = "A" + std::to_string(ag);
    for (int i = 0; i < 1000; ++i) {
      std::size_t a = pick_label(gen);
      std::discrete_distribution<int> pick_slot(ref.start_time_prior[a].begin(),
                                                ref.start_time_prior[a].end());
      std::discrete_distribution<int> pick_bin(ref.duration_prior[a].begin(),
                                               ref.duration_prior[a].end());
      int slot = pick_slot(gen);
      int bin = pick_bin(gen);
      // Place t_start inside the sampled local slot and use a mid-bin
      // duration so the histograms land in the intended cells.
      Instant local_t = static_cast<Instant>(slot) * kSlotSeconds + 450;
      Instant t_start = local_t - static_cast<Instant>(ref.timezone_offset_min) * 60;
      Instant duration = static_cast<Instant>(bin) * 900 + 450;
      corpus[ag].points.push_back(make_staypoint(
          kBase, t_start, t_start + duration, activity_from_code(static_cast<int>(a) + 1), 0.9));
    }
  }

  EvalReport report = build_report(corpus, ref);
  CHECK(report.jsd_freq <= 0.05);
  CHECK(report.jsd_start <= 0.05);
  CHECK(report.jsd_dur <= 0.05);
  CHECK(report.staypoint_count == 50000);
}

TEST_CASE("an unlabeled staypoint fails report construction") {
  StaypointCorpus corpus = labeled_corpus({{Activity::Home, 0.9}});
  corpus[0].points.push_back(make_staypoint(kBase, 90000, 95000));
  bool threw = false;
  try {
    (void)build_report(corpus, tptest::uniform_reference());
  } catch (const Error& e) {
    threw = true;
    CHECK(e.kind() == ErrorKind::IncompleteInference);
  }
  CHECK(threw);
}

TEST_CASE("agent order does not change the report") {
  ReferenceStats ref = default_reference_stats();
  Rng rng(31);
  StaypointCorpus corpus(6);
  for (std::size_t ag = 0; ag < corpus.size(); ++ag) {
    corpus[ag].agent_id = "A" + std::to_string(ag);
    Instant t = 0;
    for (int i = 0; i < 50; ++i) {
      t += rng.uniform_int(600, 7200);
      Activity a = all_activities()[static_cast<std::size_t>(rng.uniform_int(0, 14))];
      corpus[ag].points.push_back(make_staypoint(kBase, t, t + rng.uniform_int(600, 14400), a,
                                                 rng.uniform01()));
      t += 20000;
    }
  }
  EvalReport base = build_report(corpus, ref);

  StaypointCorpus shuffled = corpus;
  std::reverse(shuffled.begin(), shuffled.end());
  EvalReport redo = build_report(shuffled, ref);
  CHECK(redo.jsd_freq == doctest::Approx(base.jsd_freq).epsilon(1e-12));
  CHECK(redo.jsd_start == doctest::Approx(base.jsd_start).epsilon(1e-12));
  CHECK(redo.jsd_dur == doctest::Approx(base.jsd_dur).epsilon(1e-12));
  CHECK(redo.hcr_mandatory == doctest::Approx(base.hcr_mandatory).epsilon(1e-12));
  CHECK(redo.hcr_nonmandatory == doctest::Approx(base.hcr_nonmandatory).epsilon(1e-12));
}

TEST_CASE("histogram accumulation respects the timezone") {
  StaypointCorpus corpus(1);
  corpus[0].agent_id = "A";
  // Starts at UTC midnight; at UTC-8 that is 16:00 local, slot 64.
  corpus[0].points.push_back(make_staypoint(kBase, 0, 3600, Activity::Leisure, 0.5));
  LabelHistograms hist = accumulate_histograms(corpus, -480);
  CHECK(hist.start[index_of(Activity::Leisure)][64] == doctest::Approx(1.0));
  CHECK(hist.freq[index_of(Activity::Leisure)] == doctest::Approx(1.0));
  CHECK(hist.duration[index_of(Activity::Leisure)][4] == doctest::Approx(1.0));
  CHECK(hist.total == 1);
}
