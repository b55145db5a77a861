#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "focaler/focaler.hpp"
#include "focaler/variants.hpp"

namespace focaler {

// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,      // validation, parse or usage error
  kExitCheckFailed = 2,  // gradcheck over tolerance
};

// An output path of "" or "-" means the `out` stream.
struct EvalArgs {
  std::string input;
  std::string output;
  std::string loss = "iou";
  std::optional<double> focaler_d;
  std::optional<double> focaler_u;
  SiouParams siou;
};

struct GradcheckArgs {
  std::vector<std::string> kinds;  // empty: all six
  std::size_t n = 1000;
  std::uint64_t seed = 7;
  double tol = 1e-4;
  bool with_focaler = false;
  bool json = false;
  unsigned threads = 1;
  SiouParams siou;
};

struct SimulateArgs {
  std::string config;
  std::string output_dir;
  std::optional<unsigned> threads;
};

struct SweepArgs {
  std::string config;
  std::vector<double> d_grid;
  std::vector<double> u_grid;
  std::string output;
  std::string curves;  // optional per-step mean IoU per row
  std::optional<unsigned> threads;
};

struct AnalyzeArgs {
  std::string input;
  std::string mode = "focus_hard";
  std::size_t bins = 10;
  std::string output;
};

struct ReportArgs {
  std::string output;
};

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

}  // namespace focaler
