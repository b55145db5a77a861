#include "focaler/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "focaler/paper_fixture_data.hpp"
#include "json.hpp"

namespace focaler {

ParseError::ParseError(std::size_t line, const std::string& what)
    : InvalidInput(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_exact(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace {

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

CornerBox corner_box(const std::vector<std::string>& f, std::size_t first, std::size_t line) {
  static constexpr const char* names[] = {"x1", "y1", "x2", "y2", "gx1", "gy1", "gx2", "gy2"};
  double v[4];
  for (std::size_t i = 0; i < 4; ++i) {
    auto parsed = parse_double(f[first + i]);
    if (!parsed) {
      throw ParseError(line, std::string("field ") + names[first - 1 + i] + " is not a finite number: '" +
                                 f[first + i] + "'");
    }
    v[i] = *parsed;
  }
  if (v[0] > v[2] || v[1] > v[3]) {
    throw ParseError(line, "corner ordering requires x1 <= x2 and y1 <= y2");
  }
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace

std::vector<BoxPairRecord> read_box_pairs(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<BoxPairRecord> records;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!have_header) {
      if (row != kBoxPairHeader) {
        throw ParseError(line_no, "expected header '" + std::string(kBoxPairHeader) + "'");
      }
      have_header = true;
      continue;
    }
    const auto fields = split_csv(row);
    if (fields.size() != 9) {
      throw ParseError(line_no, "expected 9 fields, found " + std::to_string(fields.size()));
    }
    BoxPairRecord r;
    r.id = std::string(trim(fields[0]));
    if (r.id.empty()) throw ParseError(line_no, "empty id");
    if (!ids.insert(r.id).second) throw ParseError(line_no, "duplicate id '" + r.id + "'");
    r.anchor = corner_box(fields, 1, line_no);
    r.gt = corner_box(fields, 5, line_no);
    records.push_back(std::move(r));
  }
  if (records.empty()) throw ParseError(0, "no records");
  return records;
}

std::vector<BoxPairRecord> read_box_pairs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read_box_pairs(in);
}

void write_box_pairs(std::ostream& out, const std::vector<BoxPairRecord>& records) {
  out << kBoxPairHeader << '\n';
  for (const auto& r : records) {
    out << r.id;
    for (double v : {r.anchor.x1, r.anchor.y1, r.anchor.x2, r.anchor.y2, r.gt.x1, r.gt.y1, r.gt.x2,
                     r.gt.y2}) {
      out << ',' << format_exact(v);
    }
    out << '\n';
  }
}

BoxPair to_box_pair(const BoxPairRecord& r) {
  return {Box::from_corners(r.anchor), Box::from_corners(r.gt), false};
}

BoxPairRecord to_record(const std::string& id, const BoxPair& p) {
  return {id, p.anchor.to_corners(), p.gt.to_corners()};
}

// ---------------------------------------------------------------------------
// Simulation config

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw InvalidInput("config." + path + ": " + what);
}

double get_number(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) config_error(path + key, "missing");
  const json& v = j.at(key);
  if (!v.is_number()) config_error(path + key, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error(path + key, "must be finite");
  return d;
}

std::size_t get_count(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) config_error(path + key, "missing");
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    config_error(path + key, "must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

Range get_range(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) config_error(path + key, "missing");
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    config_error(path + key, "must be a two-element numeric array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Box corner_array(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) config_error(path, "must be [x1, y1, x2, y2]");
  double c[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number()) config_error(path, "must be [x1, y1, x2, y2]");
    c[i] = v[i].get<double>();
  }
  try {
    return Box::from_corners(c[0], c[1], c[2], c[3]);
  } catch (const InvalidInput& e) {
    config_error(path, e.what());
  }
}

RunConfig parse_run_config(const json& j, const std::string& path) {
  RunConfig rc;
  if (!j.contains("kind") || !j.at("kind").is_string()) config_error(path + "kind", "missing loss token");
  auto kind = try_parse_loss_kind(j.at("kind").get<std::string>());
  if (!kind) config_error(path + "kind", "unknown loss; valid: " + valid_loss_tokens());
  rc.kind = *kind;
  const bool has_d = j.contains("focaler_d");
  const bool has_u = j.contains("focaler_u");
  if (has_d != has_u) config_error(path + "focaler_d", "focaler_d and focaler_u go together");
  if (has_d) {
    const double d = get_number(j, "focaler_d", path);
    const double u = get_number(j, "focaler_u", path);
    try {
      rc.interval = FocalerInterval(d, u);
    } catch (const InvalidInput& e) {
      config_error(path + "focaler_d", e.what());
    }
  }
  return rc;
}

}  // namespace

std::vector<BoxPair> SimulationConfig::resolve_pairs() const {
  if (scenario) return generate_scenarios(*scenario);
  return pairs;
}

SimulationConfig parse_simulation_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw InvalidInput("config: top level must be an object");

  SimulationConfig c;
  if (root.contains("scenario")) {
    const json& s = root.at("scenario");
    if (!s.is_object()) config_error("scenario", "must be an object");
    ScenarioSpec spec;
    spec.n_easy = get_count(s, "n_easy", "scenario.");
    spec.n_hard = get_count(s, "n_hard", "scenario.");
    if (spec.n_easy > 0) spec.easy_iou_range = get_range(s, "easy_iou_range", "scenario.");
    if (spec.n_hard > 0) spec.hard_iou_range = get_range(s, "hard_iou_range", "scenario.");
    spec.gt_size_range = get_range(s, "gt_size_range", "scenario.");
    spec.seed = get_count(s, "seed", "scenario.");
    try {
      spec.validate();
    } catch (const InvalidInput& e) {
      config_error("scenario", e.what());
    }
    if (spec.n_easy + spec.n_hard == 0) config_error("scenario", "generates no pairs");
    c.scenario = spec;
  } else if (root.contains("pairs")) {
    const json& p = root.at("pairs");
    if (!p.is_array() || p.empty()) config_error("pairs", "must be a non-empty array");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string path = "pairs[" + std::to_string(i) + "]";
      if (!p[i].is_object() || !p[i].contains("anchor") || !p[i].contains("gt")) {
        config_error(path, "must have anchor and gt");
      }
      c.pairs.push_back({corner_array(p[i].at("anchor"), path + ".anchor"),
                         corner_array(p[i].at("gt"), path + ".gt"), false});
    }
  } else {
    config_error("scenario", "missing (or give explicit pairs)");
  }

  c.lr = get_number(root, "lr", "");
  if (!(c.lr > 0.0)) config_error("lr", "must be > 0");
  c.steps = get_count(root, "steps", "");
  if (c.steps == 0) config_error("steps", "must be > 0");
  if (root.contains("threads")) {
    c.threads = static_cast<unsigned>(get_count(root, "threads", ""));
    if (c.threads == 0) config_error("threads", "must be > 0");
  }
  if (root.contains("trace_stride")) {
    c.trace_stride = get_count(root, "trace_stride", "");
    if (c.trace_stride == 0) config_error("trace_stride", "must be > 0");
  }
  if (root.contains("siou")) {
    const json& s = root.at("siou");
    if (!s.is_object()) config_error("siou", "must be an object");
    if (s.contains("theta")) c.siou.theta = get_number(s, "theta", "siou.");
    if (s.contains("eps")) c.siou.eps = get_number(s, "eps", "siou.");
    try {
      c.siou.validate();
    } catch (const InvalidInput& e) {
      config_error("siou", e.what());
    }
  }
  if (root.contains("configurations")) {
    const json& cfgs = root.at("configurations");
    if (!cfgs.is_array() || cfgs.empty()) config_error("configurations", "must be a non-empty array");
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      const std::string path = "configurations[" + std::to_string(i) + "].";
      if (!cfgs[i].is_object()) config_error(path.substr(0, path.size() - 1), "must be an object");
      c.configurations.push_back(parse_run_config(cfgs[i], path));
    }
  } else {
    c.configurations.push_back(parse_run_config(root, ""));
  }
  return c;
}

SimulationConfig load_simulation_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_simulation_config(ss.str());
}

void write_trace_csv(std::ostream& out, const RunResult& r, std::size_t stride) {
  if (stride == 0) stride = 1;
  out << kTraceHeader << '\n';
  for (std::size_t p = 0; p < r.per_pair.size(); ++p) {
    const auto& trace = r.per_pair[p].trace;
    for (std::size_t k = 0; k < trace.size(); ++k) {
      if (k % stride != 0 && k + 1 != trace.size()) continue;
      const StepRecord& s = trace[k];
      out << p << ',' << k << ',' << format_number(s.iou) << ',' << format_number(s.loss) << ','
          << format_number(s.grad.d_cx) << ',' << format_number(s.grad.d_cy) << ','
          << format_number(s.grad.d_w) << ',' << format_number(s.grad.d_h) << '\n';
    }
  }
}

void write_summary_row(std::ostream& out, const ConfigSummary& row) {
  out << row.config_id << ',' << to_string(row.config.kind) << ',';
  if (row.config.interval) {
    out << format_number(row.config.interval->d()) << ',' << format_number(row.config.interval->u());
  } else {
    out << ',';
  }
  out << ',' << format_number(row.mean_final_iou) << ',' << format_number(row.mean_final_l1) << ','
      << row.diverged << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<ConfigSummary>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& row : rows) write_summary_row(out, row);
}

// ---------------------------------------------------------------------------
// Paper fixture

PaperFixture parse_paper_fixture(std::string_view csv) {
  static constexpr std::string_view header =
      "detector,loss,ap50,map50_95,ap50_delta,map50_95_delta,table";
  PaperFixture f;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    if (!have_header) {
      if (row != header) throw ParseError(line_no, "unexpected fixture header");
      have_header = true;
      continue;
    }
    auto fields = split_csv(row);
    if (fields.size() != 7) throw ParseError(line_no, "fixture rows need 7 fields");
    for (std::size_t i : {2u, 3u}) {
      if (!parse_double(fields[i])) throw ParseError(line_no, "non-numeric fixture value");
    }
    for (std::size_t i : {4u, 5u}) {
      if (!fields[i].empty() && !parse_double(fields[i])) {
        throw ParseError(line_no, "non-numeric fixture delta");
      }
    }
    f.rows.push_back({fields[0], fields[1], fields[2], fields[3], fields[4], fields[5], fields[6]});
  }
  if (f.rows.empty()) throw ParseError(0, "empty paper fixture");
  return f;
}

const PaperFixture& bundled_paper_fixture() {
  static const PaperFixture fixture = parse_paper_fixture(kPaperResultsCsv);
  return fixture;
}

void render_paper_fixture(std::ostream& out, const PaperFixture& f) {
  out << "# paper-reported detector results (not reproduced by this tool)\n";
  out << "detector,loss,ap50,map50_95,ap50_delta,map50_95_delta,source\n";
  for (const auto& r : f.rows) {
    out << r.detector << ',' << r.loss_name << ',' << r.ap50 << ',' << r.map5095 << ','
        << r.ap50_delta << ',' << r.map5095_delta << ",Table " << r.table << '\n';
  }
}

}  // namespace focaler
