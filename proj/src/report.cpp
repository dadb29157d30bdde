#include "sno/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace sno {

using nlohmann::json;

std::string format_number(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

json vec_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i) == 0.0 ? 0.0 : v(i));
  return a;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string vec_text(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", std::abs(v(i)) < 5e-13 ? 0.0 : v(i));
    s += buf;
  }
  return s + ")";
}

std::string opt_text(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", std::abs(*v) < 5e-13 ? 0.0 : *v);
  return buf;
}

const char* yn(bool b) { return b ? "yes" : "no"; }

}  // namespace

json to_json(const StationarityReport& r) {
  json j;
  j["point"] = vec_json(r.point);
  j["objective"] = r.objective;
  j["residual"] = r.multipliers.residual;
  j["licq"] = {{"holds", r.licq.holds}, {"rank", r.licq.rank},
               {"smallestSingularValue", opt_json(r.licq.smallest_singular_value)}};
  json mult = json::array();
  for (const auto& pm : r.multipliers.pairs) {
    mult.push_back({{"lambda1", opt_json(pm.first)}, {"lambda2", opt_json(pm.second)}});
  }
  j["multipliers"] = mult;
  json biactive = json::array();
  for (std::size_t i : r.pattern.biactive) biactive.push_back(i + 1);
  j["biactive"] = biactive;
  j["flags"] = {{"W", r.flags.w},
                {"Nhat", r.flags.frechet_hat},
                {"N", r.flags.limiting},
                {"Nbar", r.flags.clarke_bar},
                {"T", r.flags.t_stationary},
                {"C", r.c_stationary ? json(*r.c_stationary) : json(nullptr)}};
  json per_index = json::array();
  for (const auto& [i, label] : r.saddle.per_index) {
    per_index.push_back({{"index", i + 1}, {"label", std::string(to_string(label))}});
  }
  j["saddle"] = {{"perIndex", per_index},
                 {"firstOrder", r.saddle.is_first_order_saddle},
                 {"singular", r.saddle.is_singular},
                 {"regular", r.saddle.is_regular}};
  j["QI"] = r.morse.qi;
  j["BI"] = r.morse.bi;
  j["TI"] = r.morse.ti;
  j["ND"] = {{"ND1", r.morse.nd.nd1}, {"ND2", r.morse.nd.nd2}, {"ND3", r.morse.nd.nd3}};
  j["verdict"] = std::string(to_string(r.morse.verdict));
  return j;
}

json to_json(const ScanResult& s) {
  json a = json::array();
  for (const auto& r : s.points) a.push_back(to_json(r));
  return a;
}

json to_json(const ScholtesPath& path) {
  json a = json::array();
  for (const auto& st : path.states) a.push_back({{"t", st.t}, {"x", vec_json(st.x)}, {"residual", st.residual}});
  if (!a.empty()) {
    json limit;
    limit["x"] = vec_json(path.limit_polished);
    limit["completed"] = path.completed;
    if (!path.message.empty()) limit["message"] = path.message;
    limit["report"] = path.limit_report ? to_json(*path.limit_report) : json(nullptr);
    a.back()["limit"] = limit;
  }
  return a;
}

json to_json(const LevelProfile& profile) {
  json j;
  j["resolution"] = profile.resolution;
  j["change_levels"] = profile.change_levels;
  j["critical_values"] = profile.critical_values;
  json m = json::array();
  for (const auto& c : profile.matches) {
    m.push_back({{"level", c.level}, {"nearest", opt_json(c.nearest_value)}, {"gap", c.nearest_value ? json(c.gap) : json(nullptr)}});
  }
  j["matches"] = m;
  return j;
}

std::string to_csv(const LevelProfile& profile) {
  std::string out = "a,components,feasible_cells\n";
  for (const auto& e : profile.entries) {
    out += format_number(e.a) + "," + std::to_string(e.components) + "," + std::to_string(e.feasible_cells) + "\n";
  }
  return out;
}

void render_table(std::ostream& os, const SnoProblem& p, const StationarityReport& r) {
  os << "point          " << vec_text(r.point) << "\n";
  os << "objective      " << opt_text(r.objective) << "\n";
  os << "cone           " << to_string(p.cone()) << "\n";
  os << "LICQ           " << yn(r.licq.holds) << " (rank " << r.licq.rank << ")\n";
  os << "residual       " << opt_text(r.multipliers.residual) << "\n";
  for (std::size_t i = 0; i < r.multipliers.pairs.size(); ++i) {
    const auto& c = r.pattern.constraints[i];
    os << "  pair " << i + 1 << "  " << to_string(c.status) << "  lambda1=" << opt_text(r.multipliers.pairs[i].first)
       << "  lambda2=" << opt_text(r.multipliers.pairs[i].second) << "\n";
  }
  os << "W              " << yn(r.flags.w) << "\n";
  os << "Nhat           " << yn(r.flags.frechet_hat) << "\n";
  os << "N              " << yn(r.flags.limiting) << "\n";
  os << "T              " << yn(r.flags.t_stationary) << "\n";
  os << "Nbar           " << yn(r.flags.clarke_bar) << "\n";
  if (r.c_stationary) os << "C              " << yn(*r.c_stationary) << "\n";
  os << "saddle         "
     << (r.saddle.is_first_order_saddle ? (r.saddle.is_regular ? (r.saddle.is_singular ? "singular+regular" : "regular")
                                                                 : "singular")
                                        : "no")
     << "\n";
  for (const auto& [i, label] : r.saddle.per_index) os << "  index " << i + 1 << "  " << to_string(label) << "\n";
  os << "QI/BI/TI       " << r.morse.qi << "/" << r.morse.bi << "/" << r.morse.ti << "\n";
  os << "ND1/ND2/ND3    " << yn(r.morse.nd.nd1) << "/" << yn(r.morse.nd.nd2) << "/" << yn(r.morse.nd.nd3) << "\n";
  os << "verdict        " << to_string(r.morse.verdict) << "\n";
}

void render_table(std::ostream& os, const SnoProblem&, const ScanResult& s) {
  os << s.points.size() << " W-stationary point(s); " << s.newton_runs << " Newton runs, " << s.nonconvergent
     << " without convergence\n";
  os << "point                          f            Nhat N   T   Nbar saddle    TI  verdict\n";
  for (const auto& r : s.points) {
    char line[256];
    const char* saddle = r.saddle.is_first_order_saddle ? (r.saddle.is_regular ? "regular" : "singular") : "-";
    std::snprintf(line, sizeof line, "%-30s %-12s %-4s %-3s %-3s %-4s %-9s %-3d %s\n", vec_text(r.point).c_str(),
                  opt_text(r.objective).c_str(), yn(r.flags.frechet_hat), yn(r.flags.limiting),
                  yn(r.flags.t_stationary), yn(r.flags.clarke_bar), saddle, r.morse.ti,
                  std::string(to_string(r.morse.verdict)).c_str());
    os << line;
  }
}

void render_table(std::ostream& os, const SnoProblem& p, const ScholtesPath& path) {
  os << "t              x                              residual\n";
  for (const auto& st : path.states) {
    char line[160];
    std::snprintf(line, sizeof line, "%-14.6g %-30s %.3g\n", st.t, vec_text(st.x).c_str(), st.residual);
    os << line;
  }
  if (!path.message.empty()) os << "note: " << path.message << "\n";
  if (path.states.empty()) return;
  os << "limit          " << vec_text(path.limit_polished) << "\n";
  if (path.limit_report) {
    os << "\n";
    render_table(os, p, *path.limit_report);
  }
}

void render_table(std::ostream& os, const LevelProfile& profile) {
  os << "a              components  feasible_cells\n";
  for (const auto& e : profile.entries) {
    char line[96];
    std::snprintf(line, sizeof line, "%-14.6g %-11d %ld\n", e.a, e.components, e.feasible_cells);
    os << line;
  }
  for (const auto& m : profile.matches) {
    os << "change near a=" << opt_text(m.level);
    if (m.nearest_value) os << "  nearest T-stationary value " << opt_text(m.nearest_value) << " (gap " << opt_text(m.gap) << ")";
    os << "\n";
  }
}

}  // namespace sno
