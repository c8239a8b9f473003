#include "run_record.hpp"

#include <fstream>
#include <sstream>

#include "heatflow/error.hpp"

namespace heatflow::cli {

Json OptionRegistry::resolved() const {
  Json out = Json::object();
  for (const auto& [name, get] : getters_) out[name] = get();
  return out;
}

namespace {

std::string scalar_text(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

}  // namespace

std::vector<std::string> replay_arguments(const Json& echo) {
  if (!echo.contains("command") || !echo.contains("options"))
    throw UsageError("config echo needs \"command\" and \"options\"");
  std::vector<std::string> args;
  std::istringstream words(echo["command"].get<std::string>());
  for (std::string w; words >> w;) args.push_back(w);
  if (echo.contains("seed")) {
    args.push_back("--seed");
    args.push_back(scalar_text(echo["seed"]));
  }
  for (const auto& [name, value] : echo["options"].items()) {
    if (value.is_null()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + name);
      continue;
    }
    if (value.is_array()) {
      if (value.empty()) continue;
      std::string joined;
      for (const auto& item : value) joined += (joined.empty() ? "" : ",") + scalar_text(item);
      args.push_back("--" + name);
      args.push_back(joined);
      continue;
    }
    args.push_back("--" + name);
    args.push_back(scalar_text(value));
  }
  return args;
}

void PhaseTimer::add(const std::string& phase, double seconds) {
  for (auto& [name, total] : phases_)
    if (name == phase) {
      total += seconds;
      return;
    }
  phases_.emplace_back(phase, seconds);
}

Json PhaseTimer::to_json(const std::string& command) const {
  Json phases = Json::object();
  for (const auto& [name, seconds] : phases_) phases[name] = seconds;
  return Json{{"command", command}, {"total_seconds", seconds_since(start_)}, {"phases", phases}};
}

void write_json(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << value.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

std::filesystem::path sibling(const std::filesystem::path& primary, const std::string& tag) {
  std::filesystem::path p = primary;
  p.replace_extension("." + tag + ".json");
  return p;
}

}  // namespace heatflow::cli
