// optlim: optimistic limits of the colored Jones polynomial and the Kashaev
// invariant from planar knot diagrams.
//
//   optlim compute --knot 4_1
//   optlim compute --pd diagram.pd --report out.json
//   optlim verify --suite lemma5 --samples 10000

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "optlim/pipeline.hpp"

namespace {

int exit_code(optlim::ComputeStatus s) { return static_cast<int>(s); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw optlim::ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimistic limits of quantum invariants from knot diagrams"};
  app.require_subcommand(1);

  auto* cmp = app.add_subcommand("compute", "full pipeline for one knot");
  optlim::ComputeOptions copts;
  std::string pd_file, report_file, dump_pot, dump_tri;
  int open_side = 0, unit_region = -1;
  cmp->add_option("--knot", copts.knot, "bundled fixture name (4_1, 5_2, ...)");
  cmp->add_option("--pd", pd_file, "PD code file");
  cmp->add_option("--open-side", open_side, "split side (arc id); 0 = auto");
  cmp->add_option("--unit-region", unit_region, "unit region id; -1 = auto");
  cmp->add_option("--seeds", copts.seeds, "solver seed count");
  cmp->add_option("--rng-seed", copts.rng_seed, "deterministic RNG seed");
  cmp->add_option("--tol", copts.tol, "solver residual tolerance");
  cmp->add_option("--threads", copts.threads, "worker thread cap");
  cmp->add_option("--report", report_file, "write the JSON report here");
  cmp->add_option("--dump-potential", dump_pot, "dump W as JSON");
  cmp->add_option("--dump-triangulation", dump_tri, "dump the Thurston triangulation");
  bool timings = false;
  cmp->add_flag("--timings", timings, "include wall time in the report");

  auto* ver = app.add_subcommand("verify", "property-test suites");
  std::string suite;
  optlim::SuiteOptions sopts;
  std::string suite_report;
  ver->add_option("--suite", suite,
                  "lemma5 | lemma31 | moves | edges | cancellation | numerics")
      ->required();
  ver->add_option("--samples", sopts.samples, "sample count");
  ver->add_option("--rng-seed", sopts.rng_seed, "deterministic RNG seed");
  ver->add_option("--threads", sopts.threads, "worker thread cap");
  ver->add_option("--report", suite_report, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmp->parsed()) {
      if (copts.knot.empty() == pd_file.empty()) {
        std::cerr << "exactly one of --knot / --pd is required\n";
        return 2;
      }
      if (!pd_file.empty()) copts.pd_text = slurp(pd_file);
      if (open_side > 0) copts.open_side = open_side;
      if (unit_region >= 0) copts.unit_region = unit_region;
      copts.with_timings = timings;

      if (!dump_pot.empty() || !dump_tri.empty()) {
        auto po = optlim::build_objects(copts);
        if (!dump_pot.empty()) write_out(dump_pot, po.W.to_json() + "\n");
        if (!dump_tri.empty()) write_out(dump_tri, po.thurston.to_json() + "\n");
      }
      auto rep = optlim::run_compute(copts);
      write_out(report_file, rep.to_json());
      if (rep.status != optlim::ComputeStatus::Ok && report_file != "-" &&
          !report_file.empty())
        std::cerr << "error: " << rep.error << "\n";
      return exit_code(rep.status);
    }
    auto res = optlim::run_suite(suite, sopts);
    write_out(suite_report, res.to_json());
    if (suite_report != "-" && !suite_report.empty()) {
      for (const auto& l : res.lines) std::cerr << "  " << l << "\n";
    }
    return res.pass ? 0 : 1;
  } catch (const optlim::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const optlim::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const optlim::AssumptionViolation& e) {
    std::cerr << "assumption violation: " << e.what() << "\n";
    return 3;
  } catch (const optlim::EndpointClash& e) {
    std::cerr << "endpoint clash: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
}
