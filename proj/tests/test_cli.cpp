#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run snostat(const std::string& args) {
  const std::string cmd = std::string(SNOSTAT_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string problem(const std::string& name) { return std::string("--problem ") + PROBLEM_DIR + "/" + name + ".json"; }

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

const std::string kBox = "--box \"-0.5,1.5;-0.5,1.5\"";

}  // namespace

TEST_CASE("classify") {
  auto r = snostat("classify " + problem("regular_saddle") + " --point 0,0 --format json");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["flags"]["T"] == true);
  CHECK(j["flags"]["N"] == false);
  CHECK(j["flags"]["Nhat"] == false);
  CHECK(j["flags"]["Nbar"] == true);
  CHECK(j["saddle"]["regular"] == true);
  CHECK(j["TI"] == 1);
  CHECK(j["multipliers"][0]["lambda1"] == -2.0);

  r = snostat("classify " + problem("second_order_saddle") + " --point 0,0 --format json");
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["flags"]["Nhat"] == true);
  CHECK(j["saddle"]["firstOrder"] == false);

  r = snostat("classify " + problem("regular_saddle") + " --point 1,0");
  CHECK(r.code == 0);
  CHECK(r.out.find("nondegenerate-local-min") != std::string::npos);
  // Notion flags appear in the order Nhat, N, T, Nbar.
  const auto nhat = r.out.find("Nhat");
  const auto t = r.out.find("\nT ");
  const auto nbar = r.out.find("Nbar");
  CHECK(nhat < t);
  CHECK(t < nbar);

  CHECK(snostat("classify " + problem("regular_saddle") + " --point 0.3,0.3").code == 3);
  CHECK(snostat("classify " + problem("regular_saddle") + " --point 0,0,0").code == 2);
  CHECK(snostat("classify " + problem("regular_saddle") + " --point 0,zz").code == 2);
  CHECK(snostat("classify " + problem("regular_saddle") + " --point 0,0 --tol-zero -1").code == 2);

  const auto dep = temp_file("snostat_dep.json",
                             R"({"n":2,"cone":"switching","objective":"x1","constraints":[{"F1":"x1","F2":"2*x1"}]})");
  CHECK(snostat("classify --problem " + dep + " --point 0,0").code == 4);
  const auto bad = temp_file("snostat_bad.json", R"({"n":2,"cone":"complementarity","objective":"x1 ** 2","constraints":[]})");
  CHECK(snostat("classify --problem " + bad + " --point 0,0").code == 2);
  CHECK(snostat("classify --problem /nonexistent.json --point 0,0").code == 2);
}

TEST_CASE("scan") {
  auto r = snostat("scan " + problem("singular_saddle_2") + " " + kBox + " --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 3);
  CHECK(j[0]["point"] == nlohmann::json({0.0, 0.0}));
  CHECK(j[0]["saddle"]["singular"] == true);
  CHECK(j[1]["point"] == nlohmann::json({0.0, 1.0}));
  CHECK(j[2]["point"] == nlohmann::json({1.0, 0.0}));
  CHECK(j[2]["verdict"] == "nondegenerate-local-min");

  r = snostat("scan " + problem("regular_saddle") + " --box \"1,0;0,1\" --format json");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).empty());

  const auto a = snostat("scan " + problem("singular_saddle_2_perturbed") + " " + kBox + " --format json");
  const auto b = snostat("scan " + problem("singular_saddle_2_perturbed") + " " + kBox + " --format json");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("regularize") {
  auto r = snostat("regularize " + problem("regular_saddle") + " --point 0.1,0.1 --format json");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 7);
  const auto& limit = j.back()["limit"];
  CHECK(std::abs(limit["x"][0].get<double>()) <= 1e-3);
  CHECK(limit["report"]["flags"]["T"] == true);
  CHECK(limit["report"]["flags"]["N"] == false);

  r = snostat("regularize " + problem("regular_saddle") + " --point 0.1,0.1 --steps 0 --format json");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).size() == 1);

  CHECK(snostat("regularize " + problem("regular_saddle") + " --point 0.1,0.1 --theta 1.5").code == 2);
  CHECK(snostat("regularize " + problem("vanishing_example") + " --point 0,0").code == 5);
}

TEST_CASE("levelsets") {
  const std::string args = "levelsets " + problem("regular_saddle") + " " + kBox + " --levels 0.5,2.5,21";
  auto r = snostat(args + " --format csv");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("a,components,feasible_cells\n0.5,0,0\n", 0) == 0);
  CHECK(r.out.find("\n1.5,2,") != std::string::npos);
  CHECK(r.out.find("\n2.5,1,") != std::string::npos);
  CHECK(snostat(args + " --format csv").out == r.out);

  const auto out = (std::filesystem::temp_directory_path() / "snostat_levels.csv").string();
  REQUIRE(snostat(args + " --format csv --out " + out).code == 0);
  const auto companion = nlohmann::json::parse(std::ifstream(out + ".json"));
  CHECK(companion["change_levels"].size() == 2);

  CHECK(snostat(args + " --resolution 8").code == 2);
  CHECK(snostat("levelsets " + problem("three_dim") + " --box \"0,1;0,1;0,1\" --levels 0,1,3").code == 5);
  CHECK(snostat(args + " --levels 1,2").code == 2);
}

TEST_CASE("bundled examples") {
  const auto r = snostat("--paper-examples");
  CHECK(r.code == 0);
  CHECK(r.out.find("0 mismatch(es)") != std::string::npos);
}
