#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace heatflow::cli {

using Json = nlohmann::ordered_json;

/// Bad flag combinations found after parsing; exits with the usage code.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Flags bound to typed variables, so a run can be echoed as JSON with the
/// resolved values and turned back into an argument list.
class OptionRegistry {
public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& target, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + name, target, help);
    if constexpr (is_vector<T>::value) opt->delimiter(',');
    if constexpr (!std::is_same_v<T, std::string> && !std::is_same_v<T, std::filesystem::path> && !is_vector<T>::value)
      opt->capture_default_str();
    getters_.emplace_back(name, [&target] { return to_json(target); });
    return opt;
  }

  CLI::Option* add_flag(CLI::App* app, const std::string& name, bool& target, const std::string& help) {
    getters_.emplace_back(name, [&target] { return Json(target); });
    return app->add_flag("--" + name, target, help);
  }

  Json resolved() const;

private:
  template <class T>
  struct is_vector : std::false_type {};
  template <class T>
  struct is_vector<std::vector<T>> : std::true_type {};

  template <class T>
  static Json to_json(const T& value) {
    if constexpr (std::is_same_v<T, std::filesystem::path>)
      return value.empty() ? Json(nullptr) : Json(value.string());
    else if constexpr (std::is_same_v<T, std::string>)
      return value.empty() ? Json(nullptr) : Json(value);
    else
      return Json(value);
  }

  std::vector<std::pair<std::string, std::function<Json()>>> getters_;
};

/// Argument list (without the program name) that re-runs an echoed command.
std::vector<std::string> replay_arguments(const Json& echo);

/// Wall-clock phases of one run; written separately from the outputs so
/// those stay byte-identical between runs.
class PhaseTimer {
public:
  PhaseTimer() : start_(std::chrono::steady_clock::now()) {}

  template <class F>
  decltype(auto) time(const std::string& phase, F&& work) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Record {
      PhaseTimer& timer;
      const std::string& phase;
      std::chrono::steady_clock::time_point t0;
      ~Record() { timer.add(phase, seconds_since(t0)); }
    } record{*this, phase, t0};
    return work();
  }

  void add(const std::string& phase, double seconds);
  Json to_json(const std::string& command) const;

  static double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, double>> phases_;
};

void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);

/// out.csv -> out.<tag>.json
std::filesystem::path sibling(const std::filesystem::path& primary, const std::string& tag);

}  // namespace heatflow::cli
