#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "setreg/setreg.hpp"

namespace {

int list_estimators() {
  std::printf("str        upper-bound   subtransversality\n");
  std::printf("str_prime  upper-bound   one-sided subtransversality\n");
  std::printf("tr         upper-bound   transversality under translations\n");
  std::printf("tr_dual    upper-bound   dual normal-pair transversality\n");
  std::printf("str1       heuristic     localized slope constant\n");
  std::printf("itr        heuristic     intrinsic transversality\n");
  std::printf("itr_w      heuristic     two-scale intrinsic variant\n");
  std::printf("itr_c      heuristic     convex intrinsic variant\n");
  std::printf("rg         upper-bound   metric regularity of a mapping\n");
  std::printf("srg        upper-bound   metric subregularity of a mapping\n");
  return 0;
}

void dump_trace(const setreg::Scenario& sc) {
  setreg::APOptions opt;
  opt.max_iters = sc.ap->max_iters;
  opt.intersect = sc.config.intersect;
  setreg::APTrace tr = setreg::run_ap(sc.A, sc.B, sc.ap->x0, opt);
  std::printf("# trace %s (converged=%d, iterates=%zu)\n", sc.name.c_str(),
              tr.converged ? 1 : 0, tr.x_seq.size());
  std::printf("k,d_int,step\n");
  for (std::size_t k = 0; k < tr.d_int.size(); ++k) {
    double step = 2 * k < tr.step_norms.size() ? tr.step_norms[2 * k] : 0.0;
    std::printf("%zu,%.10g,%.10g\n", k, tr.d_int[k], step);
  }
}

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transversality constant battery"};
  bool list = false;
  app.add_flag("--list-estimators", list, "print estimator names and exit");

  auto* run = app.add_subcommand("run", "run scenario files and report");
  std::vector<std::string> files;
  std::string out_path;
  std::string format = "csv";
  int parallel = 0;
  std::uint64_t seed_override = 0;
  bool dump_traces = false;
  run->add_option("files", files, "scenario JSON files")
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_path, "write the report here (stdout if unset)");
  run->add_option("--format", format, "csv, markdown, or both")
      ->check(CLI::IsMember({"csv", "markdown", "both"}));
  run->add_option("--parallel", parallel,
                  "worker threads (0 = hardware default)");
  run->add_option("--seed-override", seed_override,
                  "replace every scenario seed");
  run->add_flag("--dump-traces", dump_traces,
                "print iteration traces for scenarios with an ap section");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (list) return list_estimators();
  if (!run->parsed() || files.empty()) {
    std::fprintf(stderr, "usage: %s run <scenario.json>... [options]\n",
                 argv[0]);
    return 2;
  }

  std::vector<setreg::Scenario> scenarios;
  for (const std::string& f : files) {
    try {
      scenarios.push_back(setreg::load_scenario(f));
    } catch (const setreg::Error& e) {
      std::fprintf(stderr, "error: %s: %s\n", f.c_str(), e.what());
      return 2;
    }
  }
  if (run->count("--seed-override"))
    for (setreg::Scenario& sc : scenarios) sc.config.seed = seed_override;

  setreg::Report rep = setreg::run_battery(scenarios, parallel);

  std::string csv = setreg::to_csv(rep);
  std::string md = setreg::to_markdown(rep);
  if (out_path.empty()) {
    if (format == "csv" || format == "both") std::fputs(csv.c_str(), stdout);
    if (format == "markdown" || format == "both")
      std::fputs(md.c_str(), stdout);
  } else {
    bool ok = true;
    if (format == "csv") ok = write_text(out_path, csv);
    else if (format == "markdown") ok = write_text(out_path, md);
    else
      ok = write_text(out_path, csv) && write_text(out_path + ".md", md);
    if (!ok) {
      std::fprintf(stderr, "error: cannot write '%s'\n", out_path.c_str());
      return 2;
    }
  }

  if (dump_traces)
    for (const setreg::Scenario& sc : scenarios)
      if (sc.ap) dump_trace(sc);

  int failed = 0;
  for (const setreg::ReportRow& r : rep.rows)
    if (!r.pass) ++failed;
  std::fprintf(stderr, "%zu rows, %d failed\n", rep.rows.size(), failed);
  return rep.all_pass() ? 0 : 1;
}
