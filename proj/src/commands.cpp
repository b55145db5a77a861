#include "focaler/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "focaler/analysis.hpp"
#include "focaler/gradients.hpp"
#include "focaler/io.hpp"
#include "focaler/simulator.hpp"

namespace focaler {

namespace {

// Buffers output and writes it to a file or the fallback stream on commit.
class Sink {
 public:
  Sink(std::string path, std::ostream& fallback) : path_(std::move(path)), fallback_(fallback) {}

  std::ostream& stream() { return buffer_; }

  void commit() {
    if (path_.empty() || path_ == "-") {
      fallback_ << buffer_.str();
      return;
    }
    std::ofstream file(path_, std::ios::binary | std::ios::trunc);
    if (!file) throw InvalidInput("cannot write '" + path_ + "'");
    file << buffer_.str();
    file.flush();
    if (!file) throw InvalidInput("failed writing '" + path_ + "'");
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buffer_;
};

std::optional<FocalerInterval> interval_from(const std::optional<double>& d,
                                             const std::optional<double>& u) {
  if (!d && !u) return std::nullopt;
  if (!d || !u) throw InvalidInput("--focaler-d and --focaler-u must be given together");
  return FocalerInterval(*d, *u);
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LossKind kind = parse_loss_kind(args.loss);
    const auto iv = interval_from(args.focaler_d, args.focaler_u);
    args.siou.validate();
    const auto records = read_box_pairs_file(args.input);

    Sink sink(args.output, out);
    auto& os = sink.stream();
    os << kEvalHeader << '\n';
    for (const auto& r : records) {
      const BoxPair p = to_box_pair(r);
      const MetricBreakdown m = metric(kind, p.anchor, p.gt, args.siou);
      os << r.id << ',' << format_number(m.iou) << ',' << format_number(m.metric) << ','
         << format_number(1.0 - m.metric) << ',';
      if (iv) {
        const FocalerEval fe = focaler_loss(kind, p.anchor, p.gt, *iv, args.siou);
        os << format_number(fe.iou_focaler) << ',' << format_number(fe.focaler_loss);
      } else {
        os << ',';
      }
      os << '\n';
    }
    sink.commit();
    return kExitOk;
  });
}

int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    GradCheckOptions opts;
    if (!args.kinds.empty()) {
      opts.kinds.clear();
      for (const auto& k : args.kinds) opts.kinds.push_back(parse_loss_kind(k));
    }
    if (args.n == 0) throw InvalidInput("-n must be > 0");
    if (!(args.tol >= 0.0)) throw InvalidInput("--tol must be >= 0");
    opts.n = args.n;
    opts.seed = args.seed;
    opts.tol_rel = args.tol;
    opts.siou = args.siou;
    opts.threads = args.threads;

    GradCheckReport report = grad_check(opts);
    if (args.with_focaler) {
      opts.with_focaler = true;
      const GradCheckReport f = grad_check(opts);
      report.n_points += f.n_points;
      report.n_skipped += f.n_skipped;
      report.max_abs_err = std::max(report.max_abs_err, f.max_abs_err);
      if (f.max_rel_err > report.max_rel_err) {
        report.max_rel_err = f.max_rel_err;
        report.worst_case = f.worst_case;
      }
    }
    out << (args.json ? to_json(report) + "\n" : to_text(report));
    return report.passed() ? kExitOk : kExitCheckFailed;
  });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SimulationConfig cfg = load_simulation_config(args.config);
    if (args.threads) cfg.threads = std::max(1u, *args.threads);
    if (args.output_dir.empty()) throw InvalidInput("an output directory is required");
    std::error_code ec;
    std::filesystem::create_directories(args.output_dir, ec);
    if (ec) throw InvalidInput("cannot create '" + args.output_dir + "': " + ec.message());

    const auto rows =
        compare(cfg.configurations, cfg.resolve_pairs(), cfg.lr, cfg.steps, cfg.siou, cfg.threads);
    const std::filesystem::path dir(args.output_dir);
    for (const auto& row : rows) {
      Sink trace((dir / ("trace_" + std::to_string(row.config_id) + ".csv")).string(), out);
      write_trace_csv(trace.stream(), row.result, cfg.trace_stride);
      trace.commit();
    }
    Sink summary((dir / "summary.csv").string(), out);
    write_summary_csv(summary.stream(), rows);
    summary.commit();
    write_summary_csv(out, rows);
    return kExitOk;
  });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SimulationConfig cfg = load_simulation_config(args.config);
    if (args.threads) cfg.threads = std::max(1u, *args.threads);
    if (args.d_grid.empty() || args.u_grid.empty()) throw InvalidInput("empty d or u grid");
    for (double v : args.d_grid) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("d grid values must lie in [0, 1]");
    }
    for (double v : args.u_grid) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("u grid values must lie in [0, 1]");
    }
    std::vector<double> ds = args.d_grid, us = args.u_grid;
    std::sort(ds.begin(), ds.end());
    std::sort(us.begin(), us.end());

    const LossKind kind = cfg.configurations.front().kind;
    std::vector<RunConfig> configs;
    std::size_t skipped = 0;
    for (double d : ds) {
      for (double u : us) {
        if (!(d < u)) {
          ++skipped;
          continue;
        }
        configs.push_back({kind, FocalerInterval(d, u)});
      }
    }
    err << "sweep: " << configs.size() << " interval(s), " << skipped << " skipped (d >= u)\n";
    if (configs.empty()) throw InvalidInput("every (d, u) grid pair has d >= u");

    const auto rows = compare(configs, cfg.resolve_pairs(), cfg.lr, cfg.steps, cfg.siou, cfg.threads);
    Sink sink(args.output, out);
    write_summary_csv(sink.stream(), rows);
    sink.commit();

    if (!args.curves.empty()) {
      Sink curves(args.curves, out);
      curves.stream() << "config_id,focaler_d,focaler_u,step,mean_iou\n";
      for (const auto& row : rows) {
        const auto curve = mean_iou_curve(row.result);
        for (std::size_t k = 0; k < curve.size(); ++k) {
          curves.stream() << row.config_id << ',' << format_number(row.config.interval->d()) << ','
                          << format_number(row.config.interval->u()) << ',' << k << ','
                          << format_number(curve[k]) << '\n';
        }
      }
      curves.commit();
    }
    return kExitOk;
  });
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const FocusMode mode = parse_focus_mode(args.mode);
    const auto records = read_box_pairs_file(args.input);
    std::vector<BoxPair> pairs;
    pairs.reserve(records.size());
    std::size_t degenerate = 0;
    for (const auto& r : records) {
      pairs.push_back(to_box_pair(r));
      if (pairs.back().anchor.degenerate() || pairs.back().gt.degenerate()) ++degenerate;
    }
    if (degenerate > 0) err << "analyze: " << degenerate << " pair(s) contain zero-area boxes\n";
    const IoUHistogram h = iou_histogram(pairs, args.bins);
    const IntervalRecommendation rec = recommend_interval(h, mode);
    Sink sink(args.output, out);
    sink.stream() << analysis_json(h, rec) << '\n';
    sink.commit();
    return kExitOk;
  });
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Sink sink(args.output, out);
    render_paper_fixture(sink.stream(), bundled_paper_fixture());
    sink.commit();
    return kExitOk;
  });
}

}  // namespace focaler
