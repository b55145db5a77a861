// focaler: evaluate, check and simulate IoU-family box regression losses.

#include <iostream>

#include "CLI11.hpp"
#include "focaler/commands.hpp"

namespace {

void add_siou_flags(CLI::App* cmd, focaler::SiouParams& p) {
  cmd->add_option("--siou-eps", p.eps, "SIoU angle-term guard")->capture_default_str();
  cmd->add_option("--siou-theta", p.theta, "SIoU shape exponent")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IoU-family box regression losses with Focaler interval remapping"};
  app.require_subcommand(1);

  focaler::EvalArgs eval;
  double eval_d = 0.0, eval_u = 1.0;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a loss over a box-pair CSV");
  eval_cmd->add_option("input", eval.input, "CSV with header id,x1,y1,x2,y2,gx1,gy1,gx2,gy2")
      ->required();
  eval_cmd->add_option("--loss", eval.loss, "iou, giou, diou, ciou, eiou or siou")
      ->capture_default_str();
  auto* eval_d_opt = eval_cmd->add_option("--focaler-d", eval_d, "Interval lower bound");
  auto* eval_u_opt = eval_cmd->add_option("--focaler-u", eval_u, "Interval upper bound");
  eval_cmd->add_option("--out", eval.output, "Output CSV (default stdout)");
  add_siou_flags(eval_cmd, eval.siou);

  focaler::GradcheckArgs gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  gc_cmd->add_option("--loss", gc.kinds, "Loss tokens to check (default: all)")->delimiter(',');
  gc_cmd->add_option("-n,--points", gc.n, "Points per loss")->capture_default_str();
  gc_cmd->add_option("--seed", gc.seed, "Sampling seed")->capture_default_str();
  gc_cmd->add_option("--tol", gc.tol, "Maximum relative error")->capture_default_str();
  gc_cmd->add_flag("--with-focaler", gc.with_focaler, "Also check with random Focaler intervals");
  gc_cmd->add_flag("--json", gc.json, "Print the report as JSON");
  gc_cmd->add_option("--threads", gc.threads, "Worker threads")->capture_default_str();
  add_siou_flags(gc_cmd, gc.siou);

  focaler::SimulateArgs sim;
  unsigned sim_threads = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "Run gradient-descent box regression");
  sim_cmd->add_option("config", sim.config, "JSON config")->required();
  sim_cmd->add_option("--out", sim.output_dir, "Output directory")->required();
  auto* sim_threads_opt = sim_cmd->add_option("--threads", sim_threads, "Override config threads");

  focaler::SweepArgs sweep;
  unsigned sweep_threads = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid-sweep Focaler intervals over a config");
  sweep_cmd->add_option("config", sweep.config, "JSON config")->required();
  sweep_cmd->add_option("--d-grid", sweep.d_grid, "Comma-separated d values")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--u-grid", sweep.u_grid, "Comma-separated u values")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--out", sweep.output, "Summary CSV (default stdout)");
  sweep_cmd->add_option("--curves", sweep.curves, "Per-step mean IoU CSV");
  auto* sweep_threads_opt = sweep_cmd->add_option("--threads", sweep_threads, "Override config threads");

  focaler::AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze", "IoU statistics and a recommended interval");
  an_cmd->add_option("input", an.input, "Box-pair CSV")->required();
  an_cmd->add_option("--mode", an.mode, "focus_hard or focus_easy")->capture_default_str();
  an_cmd->add_option("--bins", an.bins, "Histogram bins")->capture_default_str();
  an_cmd->add_option("--out", an.output, "Output JSON (default stdout)");

  focaler::ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Print the bundled published detector results");
  rep_cmd->add_option("--out", rep.output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return focaler::kExitInvalid;
  }

  if (*eval_d_opt) eval.focaler_d = eval_d;
  if (*eval_u_opt) eval.focaler_u = eval_u;
  if (*sim_threads_opt) sim.threads = sim_threads;
  if (*sweep_threads_opt) sweep.threads = sweep_threads;

  if (*eval_cmd) return focaler::cmd_eval(eval, std::cout, std::cerr);
  if (*gc_cmd) return focaler::cmd_gradcheck(gc, std::cout, std::cerr);
  if (*sim_cmd) return focaler::cmd_simulate(sim, std::cout, std::cerr);
  if (*sweep_cmd) return focaler::cmd_sweep(sweep, std::cout, std::cerr);
  if (*an_cmd) return focaler::cmd_analyze(an, std::cout, std::cerr);
  if (*rep_cmd) return focaler::cmd_report(rep, std::cout, std::cerr);
  return focaler::kExitInvalid;
}
