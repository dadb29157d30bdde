// snostat: stationarity analysis for structured nonsmooth problems.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sno/errors.hpp"
#include "sno/levelset.hpp"
#include "sno/morse.hpp"
#include "sno/reference_problems.hpp"
#include "sno/regularization.hpp"
#include "sno/report.hpp"

namespace {

enum Exit { Ok = 0, InputError = 2, Infeasible = 3, LicqFailure = 4, Unsupported = 5 };

std::vector<double> parse_list(const std::string& text, char sep, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw sno::InvalidArgument(std::string("cannot read ") + what + " from '" + text + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw sno::InvalidArgument(std::string("cannot read ") + what + " from '" + text + "'");
    out.push_back(v);
  }
  return out;
}

sno::Vector parse_point(const std::string& text) {
  const auto v = parse_list(text, ',', "point");
  return Eigen::Map<const sno::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// "lo1,hi1;lo2,hi2"
sno::Box parse_box(const std::string& text) {
  sno::Box box;
  std::stringstream ss(text);
  std::string axis;
  while (std::getline(ss, axis, ';')) {
    const auto v = parse_list(axis, ',', "box");
    if (v.size() != 2) throw sno::InvalidArgument("each box axis needs 'lo,hi'");
    box.bounds.emplace_back(v[0], v[1]);
  }
  return box;
}

struct Config {
  std::string problem;
  std::string point;
  std::string box;
  int resolution = 400;
  std::string levels;
  double t0 = 0.01;
  double theta = 0.1;
  int steps = 6;
  std::string format = "table";
  std::string out;
  sno::Tolerances tols;
};

class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {}
  std::ostream& stream() { return buffer_; }
  void flush() {
    if (path_.empty()) {
      std::cout << buffer_.str();
      return;
    }
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw sno::InvalidArgument("cannot write " + path_);
    f << buffer_.str();
  }

 private:
  std::string path_;
  std::ostringstream buffer_;
};

void require_format(const Config& cfg, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (cfg.format == a) return;
  }
  throw sno::InvalidArgument("format '" + cfg.format + "' is not available for this command");
}

int cmd_classify(const Config& cfg) {
  require_format(cfg, {"table", "json"});
  const auto p = sno::SnoProblem::from_file(cfg.problem);
  const sno::Vector x = parse_point(cfg.point);
  if (x.size() != p.dimension()) throw sno::InvalidArgument("point has the wrong dimension");
  const auto r = sno::analyze_point(p, x, cfg.tols);
  Output out(cfg.out);
  if (cfg.format == "json") {
    out.stream() << sno::to_json(r).dump(2) << "\n";
  } else {
    sno::render_table(out.stream(), p, r);
  }
  out.flush();
  return Ok;
}

int cmd_scan(const Config& cfg) {
  require_format(cfg, {"table", "json"});
  const auto p = sno::SnoProblem::from_file(cfg.problem);
  sno::ScanOptions opts;
  opts.tols = cfg.tols;
  const auto s = sno::stratified_scan(p, parse_box(cfg.box), opts);
  Output out(cfg.out);
  if (cfg.format == "json") {
    out.stream() << sno::to_json(s).dump(2) << "\n";
  } else {
    sno::render_table(out.stream(), p, s);
  }
  out.flush();
  return Ok;
}

int cmd_regularize(const Config& cfg) {
  require_format(cfg, {"table", "json"});
  const auto p = sno::SnoProblem::from_file(cfg.problem);
  if (p.cone() != sno::ConeKind::Complementarity) {
    throw sno::UnsupportedError("regularization is implemented for the complementarity cone only");
  }
  const sno::Vector start = parse_point(cfg.point);
  if (start.size() != p.dimension()) throw sno::InvalidArgument("start point has the wrong dimension");
  sno::PathOptions opts;
  opts.t0 = cfg.t0;
  opts.theta = cfg.theta;
  opts.steps = cfg.steps;
  opts.tols = cfg.tols;
  const auto path = sno::path_follow(p, start, opts);
  Output out(cfg.out);
  if (cfg.format == "json") {
    out.stream() << sno::to_json(path).dump(2) << "\n";
  } else {
    sno::render_table(out.stream(), p, path);
  }
  out.flush();
  return Ok;
}

int cmd_levelsets(const Config& cfg) {
  require_format(cfg, {"table", "json", "csv"});
  const auto p = sno::SnoProblem::from_file(cfg.problem);
  if (p.dimension() != 2) throw sno::UnsupportedError("level-set analysis needs a 2-dimensional problem");
  const auto lv = parse_list(cfg.levels, ',', "levels");
  if (lv.size() != 3 || lv[2] != std::floor(lv[2])) throw sno::InvalidArgument("--levels needs 'amin,amax,steps'");
  sno::SweepOptions opts;
  opts.resolution = cfg.resolution;
  opts.a_min = lv[0];
  opts.a_max = lv[1];
  opts.steps = static_cast<int>(lv[2]);
  opts.scan.tols = cfg.tols;
  const auto profile = sno::sweep(p, parse_box(cfg.box), opts);
  Output out(cfg.out);
  if (cfg.format == "csv") {
    out.stream() << sno::to_csv(profile);
    if (!cfg.out.empty()) {
      std::ofstream companion(cfg.out + ".json", std::ios::binary);
      companion << sno::to_json(profile).dump(2) << "\n";
    }
  } else if (cfg.format == "json") {
    auto j = sno::to_json(profile);
    j["csv"] = sno::to_csv(profile);
    out.stream() << j.dump(2) << "\n";
  } else {
    sno::render_table(out.stream(), profile);
  }
  out.flush();
  return Ok;
}

struct Expectation {
  std::string key;
  double l1, l2;
  bool nhat, n, t, nbar;
  sno::SaddleLabel label;  // label of the biactive pair at the origin
};

int run_bundled_examples(const sno::Tolerances& tols) {
  using L = sno::SaddleLabel;
  const std::vector<Expectation> expected = {
      {"regular_saddle", -2, -2, false, false, true, true, L::RegularSaddleIndex},
      {"singular_saddle_1", -1, 0, false, true, true, true, L::SingularSaddleIndex},
      {"singular_saddle_2", -1, 0, false, true, true, true, L::SingularSaddleIndex},
      {"singular_saddle_2_perturbed", -1, -0.05, false, false, true, true, L::RegularSaddleIndex},
      {"second_order_saddle", 0, 0, true, true, true, true, L::NotSaddleIndex},
      {"not_first_order_saddle", 1, 0, true, true, true, true, L::NotSaddleIndex},
      {"not_first_order_saddle_companion", 1, 0, true, true, true, true, L::NotSaddleIndex},
      {"non_t_stationary", 1, -1, false, false, false, true, L::NotSaddleIndex},
  };
  const sno::Box box{{{-0.5, 1.5}, {-0.5, 1.5}}};
  int mismatches = 0;
  const auto problems = sno::reference_problems();
  for (const auto& e : expected) {
    const auto& ref = *std::find_if(problems.begin(), problems.end(), [&](const auto& r) { return r.key == e.key; });
    const auto r = sno::analyze_point(ref.problem, sno::Vector::Zero(2), tols);
    const auto& pm = r.multipliers.pairs.at(0);
    const bool ok = std::abs(*pm.first - e.l1) <= 1e-9 && std::abs(*pm.second - e.l2) <= 1e-9 &&
                    r.flags.frechet_hat == e.nhat && r.flags.limiting == e.n && r.flags.t_stationary == e.t &&
                    r.flags.clarke_bar == e.nbar && r.saddle.per_index.at(0).second == e.label;
    const auto scan = sno::stratified_scan(ref.problem, box, {});
    std::printf("%-34s lambda=(%g, %g)  Nhat=%d N=%d T=%d Nbar=%d  %-9s scan: %zu point(s)  %s\n", e.key.c_str(),
                *pm.first, *pm.second, r.flags.frechet_hat, r.flags.limiting, r.flags.t_stationary,
                r.flags.clarke_bar, std::string(sno::to_string(r.saddle.per_index.at(0).second)).c_str(),
                scan.points.size(), ok ? "ok" : "MISMATCH");
    if (!ok) ++mismatches;
  }

  const auto path = sno::path_follow(sno::scholtes_example(), (sno::Vector(2) << 0.1, 0.1).finished(), {});
  const bool path_ok = path.completed && path.limit_report && path.limit_polished.norm() <= 1e-3 &&
                       path.limit_report->flags.t_stationary && !path.limit_report->flags.limiting &&
                       !path.limit_report->flags.frechet_hat;
  std::printf("%-34s limit=(%.3g, %.3g) after %zu states  %s\n", "scholtes", path.limit_polished(0),
              path.limit_polished(1), path.states.size(), path_ok ? "ok" : "MISMATCH");
  if (!path_ok) ++mismatches;
  std::printf("%d mismatch(es)\n", mismatches);
  return mismatches == 0 ? Ok : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationarity, saddle and Morse analysis for structured nonsmooth optimization"};
  app.require_subcommand(0, 1);
  Config cfg;
  bool bundled_examples = false;
  app.add_flag("--paper-examples", bundled_examples, "Run the bundled example problems and print a conformance summary");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--problem", cfg.problem, "Problem file (JSON)")->required();
    sub->add_option("--format", cfg.format, "table, json or csv")->check(CLI::IsMember({"table", "json", "csv"}));
    sub->add_option("--out", cfg.out, "Write output to this file");
    sub->add_option("--tol-activity", cfg.tols.activity)->check(CLI::PositiveNumber);
    sub->add_option("--tol-zero", cfg.tols.zero)->check(CLI::PositiveNumber);
    sub->add_option("--tol-eig", cfg.tols.eig)->check(CLI::PositiveNumber);
  };

  auto* classify = app.add_subcommand("classify", "Classify one feasible point");
  common(classify);
  classify->add_option("--point", cfg.point, "v1,v2,...")->required();

  auto* scan = app.add_subcommand("scan", "Find and classify all stationary points in a box");
  common(scan);
  scan->add_option("--box", cfg.box, "lo1,hi1;lo2,hi2;...")->required();

  auto* regularize = app.add_subcommand("regularize", "Follow a Scholtes regularization path");
  common(regularize);
  regularize->add_option("--point", cfg.point, "start point v1,v2,...")->required();
  regularize->add_option("--t0", cfg.t0);
  regularize->add_option("--theta", cfg.theta);
  regularize->add_option("--steps", cfg.steps);

  auto* levelsets = app.add_subcommand("levelsets", "Count components of lower level sets (n = 2)");
  common(levelsets);
  levelsets->add_option("--box", cfg.box, "lo1,hi1;lo2,hi2")->required();
  levelsets->add_option("--resolution", cfg.resolution);
  levelsets->add_option("--levels", cfg.levels, "amin,amax,steps")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Ok : InputError;
  }

  try {
    if (bundled_examples) return run_bundled_examples(cfg.tols);
    if (*classify) return cmd_classify(cfg);
    if (*scan) return cmd_scan(cfg);
    if (*regularize) return cmd_regularize(cfg);
    if (*levelsets) return cmd_levelsets(cfg);
    std::cerr << app.help();
    return InputError;
  } catch (const sno::InfeasiblePointError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return Infeasible;
  } catch (const sno::LicqError& e) {
    std::cerr << "LICQ fails: " << e.what() << "\n";
    return LicqFailure;
  } catch (const sno::UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return Unsupported;
  } catch (const sno::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return InputError;
  }
}
