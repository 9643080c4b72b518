// Command-line front end: evaluates rate-distortion curves, asymptotic gap
// curves, distortion spectra, and critical distortions for symmetrically
// correlated Gaussian sources, and runs the self-verification suites.
//
// Exit codes: 0 success, 1 usage error, 2 numeric or verification failure.

#include <CLI11.hpp>
#include <iostream>
#include <numeric>

#include "gmsc/gmsc.hpp"

namespace {

struct CommonFlags {
  void attach(CLI::App* cmd, gmsc::cli::CurveRequest* req, bool needs_ell,
              bool needs_grid) {
    if (needs_ell)
      cmd->add_option("--ell", req->ell, "number of sources (>= 2)")
          ->required();
    cmd->add_option("--rho", req->rho, "correlation coefficient")->required();
    cmd->add_option("--m", req->ms,
                    "subset size; repeat for several curves (default: 1..ell)");
    if (needs_grid) {
      cmd->add_option("--d-min", req->grid.min, "distortion grid start");
      cmd->add_option("--d-max", req->grid.max, "distortion grid end");
      cmd->add_option("--d-count", req->grid.count, "grid point count (>= 2)");
      cmd->add_flag("--d-log", req->grid.log_spacing,
                    "geometric instead of linear spacing");
    }
    cmd->add_option("--out", req->out, "output file path")->required();
    cmd->add_option("--format", format_name, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  void finalize(gmsc::cli::CurveRequest* req, bool default_all_m) const {
    req->format = format_name == "json" ? gmsc::cli::Format::json
                                        : gmsc::cli::Format::csv;
    if (req->ms.empty() && default_all_m) {
      req->ms.resize(req->ell);
      std::iota(req->ms.begin(), req->ms.end(), 1);
    }
  }

  std::string format_name = "csv";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rate-distortion computations for symmetrically correlated Gaussian "
      "sources under multiterminal encoding"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "read defaults from a key=value file ([subcommand] sections; "
                 "command-line flags win)");

  gmsc::cli::CurveRequest rd_req;
  rd_req.quantity = gmsc::cli::Quantity::rate;
  CommonFlags rd_flags;
  bool rd_no_references = false;
  CLI::App* rd = app.add_subcommand(
      "rd-curve", "rates and bounds over a distortion grid");
  rd_flags.attach(rd, &rd_req, true, true);
  rd->add_flag("--no-references", rd_no_references,
               "omit the lower-bound / centralized / distributed series");

  gmsc::cli::CurveRequest gap_req;
  gap_req.quantity = gmsc::cli::Quantity::gap;
  CommonFlags gap_flags;
  CLI::App* gap = app.add_subcommand(
      "gap-curve", "asymptotic gap to the centralized rate, per m");
  gap_flags.attach(gap, &gap_req, false, true);

  gmsc::cli::CurveRequest spec_req;
  spec_req.quantity = gmsc::cli::Quantity::spectrum;
  CommonFlags spec_flags;
  CLI::App* spec = app.add_subcommand(
      "spectrum", "per-mode distortion allocation at a single distortion");
  spec_flags.attach(spec, &spec_req, true, false);
  spec->add_option("--d", spec_req.d, "distortion in (0, 1)")->required();

  gmsc::cli::CurveRequest crit_req;
  crit_req.quantity = gmsc::cli::Quantity::critical;
  CommonFlags crit_flags;
  CLI::App* crit = app.add_subcommand(
      "critical", "critical distortions and their large-ell limits");
  crit_flags.attach(crit, &crit_req, true, false);

  gmsc::verify::Options verify_opt;
  CLI::App* verify = app.add_subcommand(
      "verify", "closed forms against the dense conditional-covariance oracle");
  verify->add_option("--suite", verify_opt.suites,
                     "suite name; repeatable (default: all)")
      ->check(CLI::IsMember(gmsc::verify::suite_names()));
  verify->add_option("--ell", verify_opt.ell_max,
                     "largest source count in the grids");
  verify->add_option("--cap", verify_opt.ell_cap,
                     "oracle dimension cap (raise with care)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (rd->parsed()) {
      if (rd_no_references) rd_req.quantity = gmsc::cli::Quantity::bound;
      rd_flags.finalize(&rd_req, true);
      gmsc::cli::cmd_rd_curve(rd_req);
    } else if (gap->parsed()) {
      gap_flags.finalize(&gap_req, false);
      gmsc::cli::cmd_gap_curve(gap_req);
    } else if (spec->parsed()) {
      spec_flags.finalize(&spec_req, true);
      gmsc::cli::cmd_spectrum(spec_req);
    } else if (crit->parsed()) {
      crit_flags.finalize(&crit_req, true);
      gmsc::cli::cmd_critical(crit_req);
    } else if (verify->parsed()) {
      return gmsc::cli::cmd_verify(verify_opt, std::cout);
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
