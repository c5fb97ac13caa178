#include "tripurpose/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "tripurpose/csv.hpp"
#include "tripurpose/enrichment.hpp"
#include "tripurpose/error.hpp"

namespace tripurpose {
namespace {

constexpr std::string_view kPingHeader = "agent_id,timestamp_utc,lat,lon";
constexpr std::string_view kPingHeaderAcc = "agent_id,timestamp_utc,lat,lon,accuracy_m";
constexpr std::string_view kPoiHeaderShort = "poi_id,lat,lon,category";
constexpr std::string_view kStayHeader = "agent_id,lat,lon,t_start,t_end,duration_s";
constexpr std::string_view kLabeledStayHeader =
    "agent_id,lat,lon,t_start,t_end,duration_s,activity_code,confidence";

std::string strip_spaces(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\t') out.push_back(c);
  }
  return out;
}

void require_header(csv::LineReader& reader, std::initializer_list<std::string_view> allowed) {
  std::string line;
  if (!reader.next(line)) fail(ErrorKind::Schema, reader.path() + ": missing header");
  std::string got = strip_spaces(line);
  for (std::string_view h : allowed) {
    if (got == h) return;
  }
  fail(ErrorKind::Schema, reader.path() + ": unexpected header '" + line + "'");
}

void check_skip_ratio(const csv::LineReader& reader, const LoadStats& stats) {
  if (stats.rows > 0 && 10 * stats.skipped > stats.rows) {
    fail(ErrorKind::CorruptInput, reader.path() + ": " + std::to_string(stats.skipped) + " of " +
                                      std::to_string(stats.rows) + " rows malformed");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  return out;
}

std::vector<std::string_view> tokenize_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t begin = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > begin) tokens.push_back(line.substr(begin, i - begin));
  }
  return tokens;
}

}  // namespace

PingCorpus load_pings(const std::string& path, LoadStats* stats_out) {
  csv::LineReader reader(path);
  require_header(reader, {kPingHeader, kPingHeaderAcc});

  PingCorpus corpus;
  std::unordered_map<std::string, std::size_t> agent_slot;
  LoadStats stats;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    ++stats.rows;
    auto fields = csv::split_fields(line);
    if (fields.size() != 4 && fields.size() != 5) {
      ++stats.skipped;
      continue;
    }
    auto ts = csv::try_int(fields[1]);
    auto lat = csv::try_double(fields[2]);
    auto lon = csv::try_double(fields[3]);
    if (fields[0].empty() || !ts || !lat || !lon || !valid_coordinates({*lat, *lon})) {
      ++stats.skipped;
      continue;
    }
    auto [it, inserted] = agent_slot.try_emplace(std::string(fields[0]), corpus.size());
    if (inserted) corpus.push_back({it->first, {}});
    corpus[it->second].pings.push_back({*ts, {*lat, *lon}});
  }
  for (auto& agent : corpus) {
    std::stable_sort(agent.pings.begin(), agent.pings.end(),
                     [](const RawPing& a, const RawPing& b) { return a.timestamp < b.timestamp; });
    // Duplicate (agent, timestamp) rows count as malformed; timestamps must
    // be strictly increasing after the sort.
    auto last = std::unique(agent.pings.begin(), agent.pings.end(),
                            [](const RawPing& a, const RawPing& b) {
                              return a.timestamp == b.timestamp;
                            });
    stats.skipped += static_cast<std::size_t>(agent.pings.end() - last);
    agent.pings.erase(last, agent.pings.end());
  }
  check_skip_ratio(reader, stats);
  if (stats_out) *stats_out = stats;
  return corpus;
}

void write_pings(const std::string& path, const PingCorpus& corpus) {
  std::ofstream out = open_out(path);
  out << kPingHeader << '\n';
  for (const auto& agent : corpus) {
    for (const auto& p : agent.pings) {
      out << agent.agent_id << ',' << p.timestamp << ',' << csv::format_double(p.location.lat)
          << ',' << csv::format_double(p.location.lon) << '\n';
    }
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

std::vector<Poi> load_pois(const std::string& path, LoadStats* stats_out) {
  csv::LineReader reader(path);
  // Long-form files append p1..p15 to the header; accept both spellings.
  std::string long_header = std::string(kPoiHeaderShort);
  for (int i = 1; i <= static_cast<int>(kActivityCount); ++i) {
    long_header += ",p" + std::to_string(i);
  }
  require_header(reader, {kPoiHeaderShort, std::string_view(long_header)});

  std::vector<Poi> pois;
  LoadStats stats;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    ++stats.rows;
    auto fields = csv::split_fields(line);
    if (fields.size() != 4 && fields.size() != 4 + kActivityCount) {
      ++stats.skipped;
      continue;
    }
    auto lat = csv::try_double(fields[1]);
    auto lon = csv::try_double(fields[2]);
    if (fields[0].empty() || !lat || !lon || !valid_coordinates({*lat, *lon})) {
      ++stats.skipped;
      continue;
    }
    Poi poi;
    poi.poi_id = std::string(fields[0]);
    poi.location = {*lat, *lon};
    poi.category = std::string(fields[3]);
    if (fields.size() == 4 + kActivityCount) {
      ProbVector v{};
      bool ok = true;
      for (std::size_t i = 0; i < kActivityCount; ++i) {
        auto p = csv::try_double(fields[4 + i]);
        if (!p || *p < 0.0) {
          ok = false;
          break;
        }
        v[i] = *p;
      }
      if (!ok || v.sum() <= 0.0) {
        ++stats.skipped;
        continue;
      }
      poi.activity_dist = normalize(v);
    } else {
      const ProbVector* v = category_affinity(poi.category);
      if (v == nullptr) {
        ++stats.unmapped;
        continue;
      }
      poi.activity_dist = *v;
    }
    pois.push_back(std::move(poi));
  }
  check_skip_ratio(reader, stats);
  if (stats_out) *stats_out = stats;
  return pois;
}

void write_pois(const std::string& path, const std::vector<Poi>& pois) {
  std::ofstream out = open_out(path);
  out << kPoiHeaderShort;
  for (int i = 1; i <= static_cast<int>(kActivityCount); ++i) out << ",p" << i;
  out << '\n';
  for (const auto& poi : pois) {
    out << poi.poi_id << ',' << csv::format_double(poi.location.lat) << ','
        << csv::format_double(poi.location.lon) << ',' << poi.category;
    for (double p : poi.activity_dist) out << ',' << csv::format_double(p);
    out << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

namespace {

enum class RefSection { None, TzOffset, Shares, Start, Duration };

template <std::size_t N>
void fill_histogram_row(std::array<std::array<double, N>, kActivityCount>& table,
                        std::array<bool, kActivityCount>& seen,
                        const std::vector<std::string_view>& tokens, const std::string& path,
                        std::size_t line_no) {
  if (tokens.size() != N + 1) {
    fail(ErrorKind::Schema, path + ": line " + std::to_string(line_no) + ": expected code + " +
                                std::to_string(N) + " values, got " +
                                std::to_string(tokens.size()));
  }
  auto code = csv::parse_int(tokens[0], "activity code", line_no);
  if (!is_valid_code(code)) {
    fail(ErrorKind::Schema, path + ": line " + std::to_string(line_no) + ": bad activity code " +
                                std::to_string(code));
  }
  std::size_t idx = index_of(activity_from_code(static_cast<int>(code)));
  for (std::size_t i = 0; i < N; ++i) {
    double v = csv::parse_double(tokens[i + 1], "histogram value", line_no);
    if (v < 0.0) {
      fail(ErrorKind::CorruptInput,
           path + ": line " + std::to_string(line_no) + ": negative histogram value");
    }
    table[idx][i] = v;
  }
  seen[idx] = true;
}

template <std::size_t N>
void normalize_rows(std::array<std::array<double, N>, kActivityCount>& table,
                    std::array<bool, kActivityCount>& absent) {
  for (std::size_t a = 0; a < kActivityCount; ++a) {
    double total = 0.0;
    for (double v : table[a]) total += v;
    if (total <= 0.0) {
      absent[a] = true;
      continue;
    }
    for (double& v : table[a]) v /= total;
  }
}

void require_all_seen(const std::array<bool, kActivityCount>& seen, const std::string& path,
                      std::string_view section) {
  for (std::size_t i = 0; i < kActivityCount; ++i) {
    if (!seen[i]) {
      fail(ErrorKind::Schema, path + ": [" + std::string(section) + "] missing activity " +
                                  std::string(activity_name(all_activities()[i])));
    }
  }
}

}  // namespace

ReferenceStats load_reference(const std::string& path) {
  csv::LineReader reader(path);
  ReferenceStats ref;
  ProbVector shares{};
  std::array<bool, kActivityCount> shares_seen{};
  std::array<bool, kActivityCount> start_seen{};
  std::array<bool, kActivityCount> dur_seen{};
  bool tz_seen = false;

  RefSection section = RefSection::None;
  std::string line;
  while (reader.next(line)) {
    std::string_view sv = line;
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t')) sv.remove_suffix(1);
    if (sv.empty() || sv.front() == '#') continue;
    if (sv.front() == '[') {
      if (sv == "[TZ_OFFSET_MIN]") {
        section = RefSection::TzOffset;
      } else if (sv == "[SHARES]") {
        section = RefSection::Shares;
      } else if (sv == "[START]") {
        section = RefSection::Start;
      } else if (sv == "[DURATION]") {
        section = RefSection::Duration;
      } else {
        fail(ErrorKind::Schema, path + ": unknown section " + std::string(sv));
      }
      continue;
    }
    auto tokens = tokenize_ws(sv);
    switch (section) {
      case RefSection::None:
        fail(ErrorKind::Schema, path + ": data before first section header");
      case RefSection::TzOffset:
        ref.timezone_offset_min =
            static_cast<int>(csv::parse_int(tokens[0], "tz offset", reader.line_number()));
        tz_seen = true;
        break;
      case RefSection::Shares: {
        if (tokens.size() != 2) {
          fail(ErrorKind::Schema, path + ": line " + std::to_string(reader.line_number()) +
                                      ": expected 'code share'");
        }
        auto code = csv::parse_int(tokens[0], "activity code", reader.line_number());
        if (!is_valid_code(code)) {
          fail(ErrorKind::Schema, path + ": line " + std::to_string(reader.line_number()) +
                                      ": bad activity code " + std::to_string(code));
        }
        std::size_t idx = index_of(activity_from_code(static_cast<int>(code)));
        shares[idx] = csv::parse_double(tokens[1], "share", reader.line_number());
        shares_seen[idx] = true;
        break;
      }
      case RefSection::Start:
        fill_histogram_row(ref.start_time_prior, start_seen, tokens, path, reader.line_number());
        break;
      case RefSection::Duration:
        fill_histogram_row(ref.duration_prior, dur_seen, tokens, path, reader.line_number());
        break;
    }
  }

  if (!tz_seen) fail(ErrorKind::Schema, path + ": missing [TZ_OFFSET_MIN] section");
  require_all_seen(shares_seen, path, "SHARES");
  require_all_seen(start_seen, path, "START");
  require_all_seen(dur_seen, path, "DURATION");

  ref.activity_shares = normalize(shares);
  normalize_rows(ref.start_time_prior, ref.start_absent);
  normalize_rows(ref.duration_prior, ref.duration_absent);
  return ref;
}

void write_reference(const std::string& path, const ReferenceStats& ref) {
  std::ofstream out = open_out(path);
  out << "[TZ_OFFSET_MIN]\n" << ref.timezone_offset_min << '\n';
  out << "[SHARES]\n";
  for (Activity a : all_activities()) {
    out << code_of(a) << ' ' << csv::format_double(ref.activity_shares.at(a)) << '\n';
  }
  out << "[START]\n";
  for (Activity a : all_activities()) {
    out << code_of(a);
    for (double v : ref.start_prior(a)) out << ' ' << csv::format_double(v);
    out << '\n';
  }
  out << "[DURATION]\n";
  for (Activity a : all_activities()) {
    out << code_of(a);
    for (double v : ref.dur_prior(a)) out << ' ' << csv::format_double(v);
    out << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

void write_staypoints(const std::string& path, const StaypointCorpus& corpus) {
  bool labeled = false;
  for (const auto& agent : corpus) {
    if (!agent.points.empty()) {
      labeled = agent.points.front().labeled();
      break;
    }
  }
  std::ofstream out = open_out(path);
  out << (labeled ? kLabeledStayHeader : kStayHeader) << '\n';
  for (const auto& agent : corpus) {
    for (const auto& sp : agent.points) {
      out << agent.agent_id << ',' << csv::format_double(sp.location.lat) << ','
          << csv::format_double(sp.location.lon) << ',' << sp.t_start << ',' << sp.t_end << ','
          << sp.duration_s();
      if (labeled) {
        if (!sp.labeled()) {
          fail(ErrorKind::IncompleteInference,
               path + ": staypoint for agent " + agent.agent_id + " has no label");
        }
        out << ',' << static_cast<int>(code_of(*sp.label)) << ','
            << csv::format_double(*sp.confidence);
      }
      out << '\n';
    }
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

StaypointCorpus load_staypoints(const std::string& path) {
  csv::LineReader reader(path);
  std::string line;
  if (!reader.next(line)) fail(ErrorKind::Schema, path + ": missing header");
  std::string got = strip_spaces(line);
  bool labeled = false;
  if (got == kLabeledStayHeader) {
    labeled = true;
  } else if (got != kStayHeader) {
    fail(ErrorKind::Schema, path + ": unexpected header '" + line + "'");
  }

  StaypointCorpus corpus;
  std::unordered_map<std::string, std::size_t> agent_slot;
  std::size_t expected = labeled ? 8 : 6;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = csv::split_fields(line);
    if (fields.size() != expected) {
      fail(ErrorKind::CorruptInput, path + ": line " + std::to_string(reader.line_number()) +
                                        ": expected " + std::to_string(expected) + " fields");
    }
    Staypoint sp;
    sp.location.lat = csv::parse_double(fields[1], "lat", reader.line_number());
    sp.location.lon = csv::parse_double(fields[2], "lon", reader.line_number());
    sp.t_start = csv::parse_int(fields[3], "t_start", reader.line_number());
    sp.t_end = csv::parse_int(fields[4], "t_end", reader.line_number());
    if (!valid_coordinates(sp.location) || sp.t_end <= sp.t_start) {
      fail(ErrorKind::CorruptInput,
           path + ": line " + std::to_string(reader.line_number()) + ": invalid staypoint row");
    }
    if (labeled) {
      auto code = csv::parse_int(fields[6], "activity code", reader.line_number());
      if (!is_valid_code(code)) {
        fail(ErrorKind::CorruptInput, path + ": line " + std::to_string(reader.line_number()) +
                                          ": bad activity code " + std::to_string(code));
      }
      sp.label = activity_from_code(static_cast<int>(code));
      double conf = csv::parse_double(fields[7], "confidence", reader.line_number());
      if (conf < 0.0 || conf > 1.0) {
        fail(ErrorKind::CorruptInput, path + ": line " + std::to_string(reader.line_number()) +
                                          ": confidence outside [0,1]");
      }
      sp.confidence = conf;
    }
    auto [it, inserted] = agent_slot.try_emplace(std::string(fields[0]), corpus.size());
    if (inserted) corpus.push_back({it->first, {}});
    corpus[it->second].points.push_back(sp);
  }
  return corpus;
}

PingStreamReader::PingStreamReader(const std::string& path) : reader_(path) {
  require_header(reader_, {kPingHeader, kPingHeaderAcc});
}

bool PingStreamReader::next_row(std::string& agent_id, RawPing& ping) {
  std::string line;
  while (reader_.next(line)) {
    if (line.empty()) continue;
    ++stats_.rows;
    auto fields = csv::split_fields(line);
    if (fields.size() != 4 && fields.size() != 5) {
      ++stats_.skipped;
      continue;
    }
    auto ts = csv::try_int(fields[1]);
    auto lat = csv::try_double(fields[2]);
    auto lon = csv::try_double(fields[3]);
    if (fields[0].empty() || !ts || !lat || !lon || !valid_coordinates({*lat, *lon})) {
      ++stats_.skipped;
      continue;
    }
    agent_id.assign(fields[0]);
    ping = {*ts, {*lat, *lon}};
    return true;
  }
  return false;
}

bool PingStreamReader::next_agent(AgentPings& out) {
  if (done_) return false;
  out.agent_id.clear();
  out.pings.clear();

  if (has_pending_) {
    out.agent_id = pending_agent_;
    out.pings.push_back(pending_ping_);
    has_pending_ = false;
  }

  std::string id;
  RawPing ping;
  while (next_row(id, ping)) {
    if (out.agent_id.empty()) {
      if (!finished_agents_.insert(id).second) {
        fail(ErrorKind::CorruptInput,
             reader_.path() + ": agent " + id + " reappears after its block ended on line " +
                 std::to_string(reader_.line_number()) + "; rows must be grouped by agent");
      }
      out.agent_id = id;
      out.pings.push_back(ping);
      continue;
    }
    if (id == out.agent_id) {
      out.pings.push_back(ping);
      continue;
    }
    pending_agent_ = std::move(id);
    pending_ping_ = ping;
    has_pending_ = true;
    break;
  }

  if (out.agent_id.empty()) {
    done_ = true;
    check_skip_ratio(reader_, stats_);
    return false;
  }
  if (!has_pending_) {
    // Block ended at end of file; the ratio check still has to run exactly
    // once, and the next call must return false.
    done_ = true;
    check_skip_ratio(reader_, stats_);
  } else if (!finished_agents_.insert(pending_agent_).second) {
    fail(ErrorKind::CorruptInput,
         reader_.path() + ": agent " + pending_agent_ + " reappears after its block ended on line " +
             std::to_string(reader_.line_number()) + "; rows must be grouped by agent");
  }
  std::stable_sort(out.pings.begin(), out.pings.end(),
                   [](const RawPing& a, const RawPing& b) { return a.timestamp < b.timestamp; });
  auto last = std::unique(out.pings.begin(), out.pings.end(),
                          [](const RawPing& a, const RawPing& b) {
                            return a.timestamp == b.timestamp;
                          });
  stats_.skipped += static_cast<std::size_t>(out.pings.end() - last);
  out.pings.erase(last, out.pings.end());
  return true;
}

}  // namespace tripurpose
