#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "focaler/geometry.hpp"
#include "focaler/simulator.hpp"

namespace focaler {

// Malformed file content; `line` is 1-based (0 when not tied to a line).
class ParseError : public InvalidInput {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kBoxPairHeader = "id,x1,y1,x2,y2,gx1,gy1,gx2,gy2";
inline constexpr std::string_view kEvalHeader = "id,iou,metric,loss,focaler_iou,focaler_loss";
inline constexpr std::string_view kTraceHeader = "pair_id,step,iou,loss,d_cx,d_cy,d_w,d_h";
inline constexpr std::string_view kSummaryHeader =
    "config_id,kind,focaler_d,focaler_u,mean_final_iou,mean_final_l1,diverged";

// Nine significant digits, shortest form. Used for every computed output.
std::string format_number(double v);
// Shortest text that parses back to exactly `v`; used for box-pair files so
// that write/read round trips are lossless.
std::string format_exact(double v);

struct BoxPairRecord {
  std::string id;
  CornerBox anchor;
  CornerBox gt;
};

// Requires the exact header line, unique ids and at least one record.
std::vector<BoxPairRecord> read_box_pairs(std::istream& in);
std::vector<BoxPairRecord> read_box_pairs_file(const std::string& path);
void write_box_pairs(std::ostream& out, const std::vector<BoxPairRecord>& records);

BoxPair to_box_pair(const BoxPairRecord& r);
BoxPairRecord to_record(const std::string& id, const BoxPair& p);

/// A simulation request: pairs (given or generated), optimizer settings and
/// the loss configurations to compare.
struct SimulationConfig {
  std::optional<ScenarioSpec> scenario;
  std::vector<BoxPair> pairs;  // used when no scenario is given
  double lr = 0.0;
  std::size_t steps = 0;
  unsigned threads = 1;
  std::size_t trace_stride = 1;
  SiouParams siou;
  std::vector<RunConfig> configurations;

  std::vector<BoxPair> resolve_pairs() const;
};

// Throws InvalidInput with a "config.<path>" prefix on schema errors.
SimulationConfig parse_simulation_config(std::string_view json_text);
SimulationConfig load_simulation_config(const std::string& path);

void write_trace_csv(std::ostream& out, const RunResult& r, std::size_t stride = 1);
void write_summary_csv(std::ostream& out, const std::vector<ConfigSummary>& rows);
void write_summary_row(std::ostream& out, const ConfigSummary& row);

struct PaperResultRow {
  std::string detector;
  std::string loss_name;
  std::string ap50;     // verbatim text, e.g. "69.8"
  std::string map5095;
  std::string ap50_delta;  // empty for baselines
  std::string map5095_delta;
  std::string table;
};

struct PaperFixture {
  std::vector<PaperResultRow> rows;
};

PaperFixture parse_paper_fixture(std::string_view csv);
// The fixture compiled into the library from data/paper_results.csv.
const PaperFixture& bundled_paper_fixture();
void render_paper_fixture(std::ostream& out, const PaperFixture& f);

}  // namespace focaler
