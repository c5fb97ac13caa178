#include "tripurpose/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <utility>

#include "tripurpose/csv.hpp"
#include "tripurpose/enrichment.hpp"
#include "tripurpose/error.hpp"
#include "tripurpose/geo_grid.hpp"
#include "tripurpose/parallel.hpp"
#include "tripurpose/rng.hpp"
#include "tripurpose/time_grid.hpp"

namespace tripurpose {

namespace {

// 2024-01-01, a Monday, so a 14-day corpus holds exactly ten weekdays.
constexpr std::int64_t kStartDay = 19723;

constexpr double kSiteSeparationM = 300.0;  // agents never hop between closer anchors
// Plaza POIs sit on this ring around the site center. At four per ring the
// chord is ~106 m, just past the 100 m POI-clustering radius, so each stays
// its own zone; a visit in the middle sees four competing distributions.
constexpr double kPlazaRingM = 75.0;
constexpr std::int64_t kDayEndLocal = 85500;  // 23:45, latest away-visit end
constexpr std::int64_t kMinHomeStay = 1800;

// Mixed-use plaza menu: day-overlapping activities whose time-of-day priors
// are similar, so the planted ambiguity survives the temporal factors.
constexpr std::array<Activity, 5> kPlazaPool = {Activity::ShopGoods, Activity::ShopServices,
                                                Activity::MealsOut, Activity::Errands,
                                                Activity::Social};
constexpr std::size_t kPlazaMenuSize = 4;

std::vector<double> truncated_poisson_pmf(double lambda, int cap) {
  std::vector<double> pmf(static_cast<std::size_t>(std::max(cap, 0)) + 1, 0.0);
  if (lambda <= 0.0 || cap <= 0) {
    pmf[0] = 1.0;
    return pmf;
  }
  double p = std::exp(-lambda);
  double cumulative = 0.0;
  for (int k = 0; k < cap; ++k) {
    pmf[static_cast<std::size_t>(k)] = p;
    cumulative += p;
    p *= lambda / (k + 1);
  }
  pmf[static_cast<std::size_t>(cap)] = std::max(0.0, 1.0 - cumulative);  // lumped tail
  return pmf;
}

int sample_truncated_poisson(Rng& rng, const std::vector<double>& pmf) {
  return static_cast<int>(rng.categorical(pmf));
}

struct Site {
  Activity type = Activity::Other;  // cluster type; Work/School for anchor sites
  LatLon center{};
  std::vector<Activity> menu;  // non-empty only for plazas
};

struct Layout {
  std::vector<Site> sites;
  std::vector<std::size_t> work_sites;
  std::vector<std::size_t> school_sites;
  std::array<std::vector<std::size_t>, kActivityCount> typed{};
  std::array<std::vector<std::size_t>, kActivityCount> plazas{};
  std::vector<Poi> pois;
};

LatLon disc_jitter(Rng& rng, LatLon center, double radius_m) {
  double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  double r = radius_m * std::sqrt(rng.uniform01());
  return offset_by_meters(center, r * std::cos(angle), r * std::sin(angle));
}

void add_site_pois(Layout& layout, Rng& rng, LatLon center, Activity type, std::size_t count,
                   double spread_m) {
  auto categories = categories_for(type);
  for (std::size_t i = 0; i < count; ++i) {
    Poi poi;
    char id[16];
    std::snprintf(id, sizeof id, "P%06zu", layout.pois.size());
    poi.poi_id = id;
    poi.category = std::string(
        categories[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(categories.size()) - 1))]);
    poi.location = disc_jitter(rng, center, spread_m);
    poi.activity_dist = *category_affinity(poi.category);
    layout.pois.push_back(std::move(poi));
  }
}

Layout build_layout(const SynthConfig& config, Rng& rng) {
  Layout layout;

  auto site_count = [&](double role_prob, std::size_t per_site) -> std::size_t {
    if (role_prob <= 0.0) return 0;
    double need = static_cast<double>(config.agents) * role_prob / static_cast<double>(per_site);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(need)));
  };
  std::size_t n_work = site_count(config.p_work, config.agents_per_worksite);
  std::size_t n_school = site_count(config.p_school, config.agents_per_school);

  double nm_total = 0.0;
  for (Activity a : nonmandatory_activities()) {
    nm_total += config.ref.activity_shares[static_cast<std::size_t>(index_of(a))];
  }
  bool nm_active = config.nm_rate > 0.0 && nm_total > 0.0;
  std::size_t n_typed_per_type = nm_active ? std::max<std::size_t>(3, config.agents / 125) : 0;
  std::size_t n_plaza =
      nm_active && config.amb_frac > 0.0 ? std::max<std::size_t>(2, config.agents / 40) : 0;

  std::size_t needed = n_work + n_school + n_typed_per_type * kNonMandatoryCount + n_plaza;
  if (needed == 0) return layout;

  // Lay sites on a jittered grid inside the (inset) bounding box so any two
  // sit far enough apart to break staypoint episodes between visits.
  double lat_mid = 0.5 * (config.lat_min + config.lat_max);
  double m_per_lon = meters_per_deg_lon(lat_mid);
  double inset_lat = kSiteSeparationM / kMetersPerDegLat;
  double inset_lon = kSiteSeparationM / m_per_lon;
  double lat_extent_m = (config.lat_max - config.lat_min - 2 * inset_lat) * kMetersPerDegLat;
  double lon_extent_m = (config.lon_max - config.lon_min - 2 * inset_lon) * m_per_lon;
  if (lat_extent_m <= 0.0 || lon_extent_m <= 0.0) {
    fail(ErrorKind::Config, "bounding box too small for the site layout");
  }

  double spacing = 700.0;
  auto cells_at = [&](double s) {
    return static_cast<std::size_t>(std::max(1.0, std::floor(lat_extent_m / s))) *
           static_cast<std::size_t>(std::max(1.0, std::floor(lon_extent_m / s)));
  };
  while (spacing > 320.0 && cells_at(spacing) < needed + needed / 4 + 1) spacing *= 0.85;
  if (cells_at(spacing) < needed) {
    fail(ErrorKind::Config, "bounding box too small for the site layout");
  }

  auto n_lat = static_cast<std::size_t>(std::floor(lat_extent_m / spacing));
  auto n_lon = static_cast<std::size_t>(std::floor(lon_extent_m / spacing));
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  cells.reserve(n_lat * n_lon);
  for (std::size_t i = 0; i < n_lat; ++i) {
    for (std::size_t j = 0; j < n_lon; ++j) cells.emplace_back(i, j);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {  // Fisher-Yates
    auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(cells.size() - 1)));
    std::swap(cells[i], cells[j]);
  }

  double cell_lat_deg = spacing / kMetersPerDegLat;
  double cell_lon_deg = spacing / m_per_lon;
  auto cell_center = [&](std::size_t i, std::size_t j) {
    return LatLon{config.lat_min + inset_lat + (static_cast<double>(i) + 0.5) * cell_lat_deg,
                  config.lon_min + inset_lon + (static_cast<double>(j) + 0.5) * cell_lon_deg};
  };
  std::size_t next_cell = 0;
  auto place = [&]() {
    auto [i, j] = cells[next_cell++];
    LatLon c = cell_center(i, j);
    double jitter = 0.2 * spacing;
    return offset_by_meters(c, rng.uniform(-jitter, jitter), rng.uniform(-jitter, jitter));
  };

  for (std::size_t s = 0; s < n_work; ++s) {
    layout.work_sites.push_back(layout.sites.size());
    layout.sites.push_back({Activity::Work, place(), {}});
    add_site_pois(layout, rng, layout.sites.back().center, Activity::Work, config.pois_per_site,
                  50.0);
  }
  for (std::size_t s = 0; s < n_school; ++s) {
    layout.school_sites.push_back(layout.sites.size());
    layout.sites.push_back({Activity::School, place(), {}});
    add_site_pois(layout, rng, layout.sites.back().center, Activity::School, config.pois_per_site,
                  50.0);
  }
  for (Activity a : nonmandatory_activities()) {
    for (std::size_t s = 0; s < n_typed_per_type; ++s) {
      layout.typed[static_cast<std::size_t>(index_of(a))].push_back(layout.sites.size());
      layout.sites.push_back({a, place(), {}});
      add_site_pois(layout, rng, layout.sites.back().center, a, config.pois_per_site, 50.0);
    }
  }
  for (std::size_t s = 0; s < n_plaza; ++s) {
    Site site;
    site.type = Activity::Other;
    site.center = place();
    std::array<Activity, kPlazaPool.size()> pool = kPlazaPool;
    for (std::size_t i = 0; i < kPlazaMenuSize; ++i) {
      auto j = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size() - 1)));
      std::swap(pool[i], pool[j]);
      site.menu.push_back(pool[i]);
    }
    std::size_t index = layout.sites.size();
    // One POI per menu type on a ring wide enough that the POIs stay separate
    // density clusters: the mixture seen from the middle then shifts with the
    // query position instead of collapsing into one fixed merged zone.
    double rotation = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    for (std::size_t i = 0; i < site.menu.size(); ++i) {
      Activity a = site.menu[i];
      layout.plazas[static_cast<std::size_t>(index_of(a))].push_back(index);
      double angle =
          rotation + 2.0 * 3.14159265358979323846 * static_cast<double>(i) /
                         static_cast<double>(site.menu.size());
      LatLon spot = offset_by_meters(site.center, kPlazaRingM * std::cos(angle),
                                     kPlazaRingM * std::sin(angle));
      add_site_pois(layout, rng, spot, a, 1, 0.0);
    }
    layout.sites.push_back(std::move(site));
  }
  return layout;
}

struct AwayVisit {
  Instant start_local = 0;
  Instant end_local = 0;
  Activity type = Activity::Other;
  LatLon anchor{};
};

Instant sample_start_local(Rng& rng, std::int64_t day, const SlotHistogram& prior) {
  auto slot = static_cast<std::int64_t>(rng.categorical(prior));
  return day * kSecondsPerDay + slot * kSlotSeconds + rng.uniform_int(0, kSlotSeconds - 1);
}

std::int64_t sample_duration(Rng& rng, const BinHistogram& prior, std::int64_t lo,
                             std::int64_t hi) {
  auto bin = static_cast<std::int64_t>(rng.categorical(prior));
  return std::clamp(bin * kSlotSeconds + rng.uniform_int(0, kSlotSeconds - 1), lo, hi);
}

struct AgentPlan {
  AgentPings pings;
  AgentTruth truth;
};

class Generator {
 public:
  Generator(const SynthConfig& config, const Layout& layout, std::uint64_t seed)
      : config_(config),
        layout_(layout),
        seed_(seed),
        pmf_(truncated_poisson_pmf(config.nm_rate, config.nm_cap)),
        site_centers_(site_centers(layout)),
        site_grid_(site_centers_, kSiteSeparationM) {
    for (Activity a : nonmandatory_activities()) {
      nm_weights_.push_back(config.ref.activity_shares[static_cast<std::size_t>(index_of(a))]);
    }
    nm_active_ = config.nm_rate > 0.0;
    double total = 0.0;
    for (double w : nm_weights_) total += w;
    if (total <= 0.0) nm_active_ = false;
  }

  AgentPlan agent(std::size_t ai) const {
    Rng rng = Rng::stream(seed_, 1 + ai);
    AgentPlan plan;
    char id[16];
    std::snprintf(id, sizeof id, "A%05zu", ai);
    plan.truth.agent_id = id;
    plan.pings.agent_id = id;
    plan.truth.home = place_home(rng);

    const Site* anchor_site = nullptr;
    double u = rng.uniform01();
    if (u < config_.p_work && !layout_.work_sites.empty()) {
      anchor_site = &layout_.sites[pick(rng, layout_.work_sites)];
      plan.truth.second_type = Activity::Work;
    } else if (u < config_.p_work + config_.p_school && !layout_.school_sites.empty()) {
      anchor_site = &layout_.sites[pick(rng, layout_.school_sites)];
      plan.truth.second_type = Activity::School;
    }
    if (anchor_site) plan.truth.second = anchor_site->center;

    std::vector<AwayVisit> away;
    for (int d = 0; d < config_.days; ++d) {
      plan_day(rng, kStartDay + d, anchor_site, plan.truth, away);
    }
    stitch_and_emit(rng, away, plan);
    return plan;
  }

 private:
  static std::vector<LatLon> site_centers(const Layout& layout) {
    std::vector<LatLon> centers;
    centers.reserve(layout.sites.size());
    for (const Site& s : layout.sites) centers.push_back(s.center);
    return centers;
  }

  static std::size_t pick(Rng& rng, const std::vector<std::size_t>& ids) {
    return ids[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(ids.size()) - 1))];
  }

  LatLon place_home(Rng& rng) const {
    LatLon best{};
    double best_clearance = -1.0;
    for (int attempt = 0; attempt < 200; ++attempt) {
      LatLon candidate{rng.uniform(config_.lat_min, config_.lat_max),
                       rng.uniform(config_.lon_min, config_.lon_max)};
      double nearest = 1e18;
      if (!site_centers_.empty()) {
        site_grid_.for_candidates(candidate, [&](std::size_t i) {
          nearest = std::min(nearest, haversine_m(candidate, site_centers_[i]));
        });
      }
      if (nearest >= kSiteSeparationM) return candidate;
      if (nearest > best_clearance) {
        best_clearance = nearest;
        best = candidate;
      }
    }
    return best;  // saturated layout; keep the clearest draw
  }

  std::int64_t travel(Rng& rng) const { return rng.uniform_int(600, 1800); }

  void plan_day(Rng& rng, std::int64_t day, const Site* anchor_site, const AgentTruth& truth,
                std::vector<AwayVisit>& away) const {
    std::int64_t day0 = day * kSecondsPerDay;
    Instant day_end = day0 + kDayEndLocal;
    Instant cursor = day0 + 8 * 3600;

    if (anchor_site && !is_weekend_day(day) && rng.uniform01() < config_.attendance) {
      Activity type = *truth.second_type;
      std::size_t a = static_cast<std::size_t>(index_of(type));
      Instant start = sample_start_local(rng, day, config_.ref.start_time_prior[a]);
      std::int64_t dur = sample_duration(rng, config_.ref.duration_prior[a], 3600, 12 * 3600);
      Instant end = std::min(start + dur, day_end);
      if (end - start >= 3600) {
        away.push_back({start, end, type, anchor_site->center});
        cursor = std::max(cursor, end + travel(rng));
      }
    }

    if (!nm_active_) return;
    int k = sample_truncated_poisson(rng, pmf_);
    struct Proposal {
      Instant desired = 0;
      std::int64_t dur = 0;
      Activity type = Activity::Other;
      LatLon anchor{};
    };
    std::vector<Proposal> proposals;
    proposals.reserve(static_cast<std::size_t>(k));
    for (int v = 0; v < k; ++v) {
      auto nm_index = rng.categorical(nm_weights_);
      Activity type = nonmandatory_activities()[nm_index];
      std::size_t a = static_cast<std::size_t>(index_of(type));

      bool ambiguous =
          rng.uniform01() < config_.amb_frac && !layout_.plazas[a].empty();
      const std::vector<std::size_t>& sites = ambiguous ? layout_.plazas[a] : layout_.typed[a];
      if (sites.empty()) continue;  // type has no share-backed sites
      const Site& site = layout_.sites[pick(rng, sites)];

      Proposal p;
      p.type = type;
      // Ambiguous visits land inside the plaza ring but off-center, so one
      // competitor usually leads by a clear spatial margin: deleting that POI
      // flips the label where moderate positional noise does not.
      p.anchor = disc_jitter(rng, site.center, ambiguous ? 45.0 : 30.0);
      p.desired = sample_start_local(rng, day, config_.ref.start_time_prior[a]);
      // Ambiguous visits stay short but long enough for a handful of pings:
      // the re-extracted centroid wanders a little under noise (occasional
      // flips, growing with sigma) while losing the leading POI moves the
      // whole spatial balance (frequent flips under deletion).
      p.dur = ambiguous ? rng.uniform_int(900, 2100)
                        : sample_duration(rng, config_.ref.duration_prior[a], 300, 9 * 900);
      proposals.push_back(p);
    }
    std::sort(proposals.begin(), proposals.end(),
              [](const Proposal& x, const Proposal& y) { return x.desired < y.desired; });
    for (const Proposal& p : proposals) {
      Instant start = std::max(p.desired, cursor);
      if (start + 300 > day_end) continue;  // day is full; drop (rare)
      std::int64_t dur = std::min(p.dur, day_end - start);
      away.push_back({start, start + dur, p.type, p.anchor});
      cursor = start + dur + travel(rng);
    }
  }

  void stitch_and_emit(Rng& rng, const std::vector<AwayVisit>& away, AgentPlan& plan) const {
    Instant corpus_start = kStartDay * kSecondsPerDay;
    Instant corpus_end = (kStartDay + config_.days) * kSecondsPerDay;

    std::vector<AwayVisit> timeline;  // away visits with home stays interleaved
    Instant home_from = corpus_start;
    std::int64_t last_home_day = -1;
    for (const AwayVisit& v : away) {
      std::int64_t visit_day = floor_div(v.start_local, kSecondsPerDay);
      if (visit_day != last_home_day) {  // first away visit of its day
        Instant home_to = v.start_local - travel(rng);
        if (home_to - home_from >= kMinHomeStay) {
          timeline.push_back({home_from, home_to, Activity::Home, plan.truth.home});
        }
        last_home_day = visit_day;
      }
      timeline.push_back(v);
      home_from = v.end_local + travel(rng);
    }
    if (corpus_end - home_from >= kMinHomeStay) {
      timeline.push_back({home_from, corpus_end, Activity::Home, plan.truth.home});
    }

    std::int64_t tz_shift = static_cast<std::int64_t>(config_.ref.timezone_offset_min) * 60;
    for (const AwayVisit& v : timeline) {
      TruthVisit truth_visit;
      truth_visit.t_start = v.start_local - tz_shift;
      truth_visit.t_end = v.end_local - tz_shift;
      truth_visit.activity = v.type;
      truth_visit.anchor = v.anchor;
      plan.truth.visits.push_back(truth_visit);

      // Pings at the visit anchor, landing exactly on both boundaries so the
      // extracted staypoint inherits the planted timestamps.
      Instant t = truth_visit.t_start;
      while (true) {
        plan.pings.pings.push_back(
            {t, offset_by_meters(v.anchor, rng.normal(0.0, config_.gps_noise_m),
                                 rng.normal(0.0, config_.gps_noise_m))});
        Instant next = t + rng.uniform_int(config_.cadence_min_s, config_.cadence_max_s);
        if (next >= truth_visit.t_end) {
          plan.pings.pings.push_back(
              {truth_visit.t_end, offset_by_meters(v.anchor, rng.normal(0.0, config_.gps_noise_m),
                                                   rng.normal(0.0, config_.gps_noise_m))});
          break;
        }
        t = next;
      }
    }
  }

  const SynthConfig& config_;
  const Layout& layout_;
  std::uint64_t seed_;
  std::vector<double> pmf_;
  std::vector<double> nm_weights_;
  bool nm_active_ = true;
  std::vector<LatLon> site_centers_;
  GeoGrid site_grid_;
};

}  // namespace

void SynthConfig::validate() const {
  if (!(lat_min < lat_max) || !(lon_min < lon_max)) {
    fail(ErrorKind::Config, "empty bounding box");
  }
  if (agents == 0) fail(ErrorKind::Config, "agent count must be positive");
  if (days < 1) fail(ErrorKind::Config, "day count must be positive");
  if (cadence_min_s < 1 || cadence_max_s < cadence_min_s) {
    fail(ErrorKind::Config, "ping cadence bounds are inverted");
  }
  if (gps_noise_m < 0.0) fail(ErrorKind::Config, "gps noise must be non-negative");
  if (p_work < 0.0 || p_school < 0.0 || p_work + p_school > 1.0) {
    fail(ErrorKind::Config, "role probabilities must be non-negative and sum to at most 1");
  }
  if (attendance < 0.0 || attendance > 1.0) fail(ErrorKind::Config, "attendance must lie in [0,1]");
  if (nm_rate < 0.0) fail(ErrorKind::Config, "visit rate must be non-negative");
  if (nm_cap < 0) fail(ErrorKind::Config, "visit cap must be non-negative");
  if (amb_frac < 0.0 || amb_frac > 1.0) {
    fail(ErrorKind::Config, "ambiguous fraction must lie in [0,1]");
  }
  if (agents_per_worksite == 0 || agents_per_school == 0 || pois_per_site == 0) {
    fail(ErrorKind::Config, "site sizing parameters must be positive");
  }
}

SyntheticCorpus generate_synthetic(const SynthConfig& config, std::uint64_t seed,
                                   unsigned workers) {
  config.validate();

  Rng layout_rng = Rng::stream(seed, 0);
  Layout layout = build_layout(config, layout_rng);
  Generator generator(config, layout, seed);

  std::vector<AgentPlan> plans(config.agents);
  parallel_for(config.agents, workers, [&](std::size_t ai) { plans[ai] = generator.agent(ai); });

  // Every residence gets a small cluster of residential POIs so home
  // locations carry spatial evidence like any other anchor.  Three POIs of
  // near-identical affinity keep the cluster's mixture stable when
  // individual points drop out.  Planted after the (parallel) agent plans
  // from a dedicated stream, in agent order, so output is worker-independent.
  Rng home_poi_rng = Rng::stream(seed, 0x686f6d65);
  for (const AgentPlan& plan : plans) {
    add_site_pois(layout, home_poi_rng, plan.truth.home, Activity::Home, 3, 20.0);
  }

  SyntheticCorpus corpus;
  corpus.pois = std::move(layout.pois);
  corpus.pings.reserve(plans.size());
  corpus.truth.agents.reserve(plans.size());
  for (AgentPlan& plan : plans) {
    corpus.pings.push_back(std::move(plan.pings));
    corpus.truth.agents.push_back(std::move(plan.truth));
  }
  return corpus;
}

std::array<double, kActivityCount> expected_visit_shares(const SynthConfig& config) {
  config.validate();

  std::vector<double> pmf = truncated_poisson_pmf(config.nm_rate, config.nm_cap);
  double p_none = pmf[0];
  double mean_k = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) mean_k += static_cast<double>(k) * pmf[k];

  int weekdays = 0;
  for (int d = 0; d < config.days; ++d) {
    if (!is_weekend_day(kStartDay + d)) ++weekdays;
  }
  int weekends = config.days - weekdays;

  double nm_total = 0.0;
  for (Activity a : nonmandatory_activities()) {
    nm_total += config.ref.activity_shares[static_cast<std::size_t>(index_of(a))];
  }
  bool nm_active = config.nm_rate > 0.0 && nm_total > 0.0;
  double nm_per_agent = nm_active ? static_cast<double>(config.days) * mean_k : 0.0;

  // Home visits per agent: one per day that has any away visit, plus one
  // (leading stay; empty days merge into the surrounding home stays).
  auto expected_home = [&](bool anchored) {
    double p_away_weekday =
        anchored ? 1.0 - (1.0 - config.attendance) * (nm_active ? p_none : 1.0)
                 : (nm_active ? 1.0 - p_none : 0.0);
    double p_away_weekend = nm_active ? 1.0 - p_none : 0.0;
    return weekdays * p_away_weekday + weekends * p_away_weekend + 1.0;
  };

  double p_neither = 1.0 - config.p_work - config.p_school;
  std::array<double, kActivityCount> shares{};
  shares[index_of(Activity::Home)] =
      (config.p_work + config.p_school) * expected_home(true) + p_neither * expected_home(false);
  shares[index_of(Activity::Work)] = config.p_work * config.attendance * weekdays;
  shares[index_of(Activity::School)] = config.p_school * config.attendance * weekdays;
  if (nm_active) {
    for (Activity a : nonmandatory_activities()) {
      auto i = static_cast<std::size_t>(index_of(a));
      shares[i] = nm_per_agent * config.ref.activity_shares[i] / nm_total;
    }
  }

  double total = 0.0;
  for (double s : shares) total += s;
  for (double& s : shares) s /= total;
  return shares;
}

void write_truth(const std::string& path, const SyntheticGroundTruth& truth) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot open for writing: " + path);
  out << "agent_id,t_start,t_end,activity_code,lat,lon\n";
  for (const AgentTruth& agent : truth.agents) {
    for (const TruthVisit& v : agent.visits) {
      out << agent.agent_id << ',' << v.t_start << ',' << v.t_end << ',' << code_of(v.activity)
          << ',' << csv::format_double(v.anchor.lat) << ',' << csv::format_double(v.anchor.lon)
          << '\n';
    }
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

SyntheticGroundTruth load_truth(const std::string& path) {
  csv::LineReader reader(path);
  std::string line;
  if (!reader.next(line) || line != "agent_id,t_start,t_end,activity_code,lat,lon") {
    fail(ErrorKind::Schema, path + ": unexpected header");
  }
  SyntheticGroundTruth truth;
  std::unordered_map<std::string, std::size_t> agents;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = csv::split_fields(line);
    if (fields.size() != 6) {
      fail(ErrorKind::CorruptInput,
           "line " + std::to_string(reader.line_number()) + ": expected 6 fields");
    }
    TruthVisit v;
    v.t_start = csv::parse_int(fields[1], "t_start", reader.line_number());
    v.t_end = csv::parse_int(fields[2], "t_end", reader.line_number());
    if (v.t_end <= v.t_start) {
      fail(ErrorKind::CorruptInput,
           "line " + std::to_string(reader.line_number()) + ": visit ends before it starts");
    }
    v.activity = activity_from_code(
        static_cast<int>(csv::parse_int(fields[3], "activity_code", reader.line_number())));
    v.anchor.lat = csv::parse_double(fields[4], "lat", reader.line_number());
    v.anchor.lon = csv::parse_double(fields[5], "lon", reader.line_number());

    std::string id(fields[0]);
    auto [it, fresh] = agents.emplace(id, truth.agents.size());
    if (fresh) {
      truth.agents.emplace_back();
      truth.agents.back().agent_id = id;
    }
    truth.agents[it->second].visits.push_back(v);
  }
  return truth;
}

void write_anchors(const std::string& path, const SyntheticGroundTruth& truth) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot open for writing: " + path);
  out << "agent_id,home_lat,home_lon,second_code,second_lat,second_lon\n";
  for (const AgentTruth& agent : truth.agents) {
    int code = agent.second_type ? code_of(*agent.second_type) : 0;
    out << agent.agent_id << ',' << csv::format_double(agent.home.lat) << ','
        << csv::format_double(agent.home.lon) << ',' << code << ','
        << csv::format_double(agent.second_type ? agent.second.lat : 0.0) << ','
        << csv::format_double(agent.second_type ? agent.second.lon : 0.0) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

}  // namespace tripurpose
