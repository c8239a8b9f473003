#pragma once

#include <functional>
#include <string_view>

namespace heatflow {

using WarningHandler = std::function<void(std::string_view)>;

/// Replaces the sink for library warnings and returns the previous one.
/// The default handler writes to std::clog.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace heatflow
