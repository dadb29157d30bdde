#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "sno/levelset.hpp"
#include "sno/morse.hpp"
#include "sno/regularization.hpp"

namespace sno {

nlohmann::json to_json(const StationarityReport& r);
nlohmann::json to_json(const ScanResult& s);
/// One {t, x, residual} record per state; the last one also carries "limit".
nlohmann::json to_json(const ScholtesPath& path);
/// change_levels with their nearest T-stationary values.
nlohmann::json to_json(const LevelProfile& profile);

std::string to_csv(const LevelProfile& profile);

void render_table(std::ostream& os, const SnoProblem& p, const StationarityReport& r);
void render_table(std::ostream& os, const SnoProblem& p, const ScanResult& s);
void render_table(std::ostream& os, const SnoProblem& p, const ScholtesPath& path);
void render_table(std::ostream& os, const LevelProfile& profile);

/// Shortest decimal that reads back to the same double.
std::string format_number(double v);

}  // namespace sno
