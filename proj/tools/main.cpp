// Command-line front end: analyze | dump | check | corpus.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "loopbound/analysis.hpp"

namespace {

// Exit-status contract: 0 ok, 2 parse error, 3 irreducible CFG,
// 4 ranking failure, 5 unbounded, 6 oracle violation.
int status_code(lb::AnalysisStatus s) {
  switch (s) {
  case lb::AnalysisStatus::Ok: return 0;
  case lb::AnalysisStatus::ParseError: return 2;
  case lb::AnalysisStatus::Irreducible: return 3;
  case lb::AnalysisStatus::RankingFailure: return 4;
  case lb::AnalysisStatus::Unbounded: return 5;
  }
  return 1;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Symbolic loop-bound and amortized-complexity analyzer"};
  app.require_subcommand(1);

  lb::AnalysisConfig config;
  std::string file, dir, stage = "cfg", format = "text";
  bool corrupt = false;

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_flag("--scc-mode", config.scc_mode,
                  "entry values as parameters; no outer-loop wrapping");
    cmd->add_option("--merge-threshold", config.merge_threshold,
                    "collapse same-delta paths above this per-loop count");
  };

  CLI::App *analyze = app.add_subcommand("analyze", "full report");
  analyze->add_option("file", file)->required();
  add_common(analyze);
  analyze->add_option("--format", format)
      ->check(CLI::IsMember({"text", "structured"}));

  CLI::App *dump = app.add_subcommand("dump", "stage dump");
  dump->add_option("file", file)->required();
  add_common(dump);
  dump->add_option("--stage", stage)
      ->required()
      ->check(CLI::IsMember({"cfg", "paths", "vass", "ts", "ranking"}));

  CLI::App *check = app.add_subcommand("check", "oracle soundness check");
  check->add_option("file", file)->required();
  add_common(check);
  check->add_option("--grid-max", config.grid_max);
  check->add_option("--step-cap", config.step_cap);
  check->add_flag("--corrupt", corrupt,
                  "subtract 1 from every bound (violation self-test)");

  CLI::App *corpus = app.add_subcommand("corpus", "bucket a directory");
  corpus->add_option("dir", dir)->required();
  add_common(corpus);

  CLI11_PARSE(app, argc, argv);

  try {
    if (corpus->parsed()) {
      std::map<std::string, int> buckets;
      std::vector<std::filesystem::path> files;
      for (auto &e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".imp") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (auto &f : files) {
        lb::AnalysisResult r = lb::analyze_source(read_file(f), config);
        std::string bucket;
        switch (r.status) {
        case lb::AnalysisStatus::Ok: bucket = "bounded"; break;
        case lb::AnalysisStatus::Unbounded: bucket = "unbounded"; break;
        case lb::AnalysisStatus::RankingFailure:
          bucket = r.rank_failure &&
                           r.rank_failure->kind ==
                               lb::RankFailureKind::CyclicDependency
                       ? "cyclic-dependency"
                       : "no-ranking";
          break;
        case lb::AnalysisStatus::ParseError: bucket = "parse-error"; break;
        case lb::AnalysisStatus::Irreducible: bucket = "irreducible"; break;
        }
        ++buckets[bucket];
        std::cout << f.filename().string() << ": " << bucket;
        if (r.status == lb::AnalysisStatus::Ok && r.total)
          std::cout << " (total " << r.total->str() << ", class "
                    << r.complexity_class << ")";
        std::cout << "\n";
      }
      std::cout << "summary:";
      for (auto &[b, n] : buckets) std::cout << " " << b << "=" << n;
      std::cout << "\n";
      return 0;
    }

    lb::AnalysisResult r = lb::analyze_source(read_file(file), config);

    if (analyze->parsed()) {
      std::cout << (format == "structured" ? lb::render_json(r)
                                           : lb::render_text(r));
      return status_code(r.status);
    }
    if (dump->parsed()) {
      if (r.status == lb::AnalysisStatus::ParseError ||
          r.status == lb::AnalysisStatus::Irreducible) {
        std::cerr << "error: " << r.error << "\n";
        return status_code(r.status);
      }
      std::cout << lb::render_dump(r, stage);
      return 0;
    }
    // check
    if (r.status != lb::AnalysisStatus::Ok) {
      std::cerr << lb::render_text(r);
      return status_code(r.status);
    }
    lb::Oracle oracle = lb::make_oracle(r);
    lb::SoundnessReport rep =
        lb::check_soundness(oracle, r.cfg, r.bounds, r.total, config.grid_max,
                            config.step_cap, corrupt ? 1 : 0);
    for (auto &l : rep.lines) std::cout << l << "\n";
    if (!rep.ok) {
      std::cout << "violations:\n";
      for (auto &v : rep.violations) std::cout << "  " << v << "\n";
      return 6;
    }
    std::cout << "ok\n";
    return 0;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
