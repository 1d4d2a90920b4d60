#pragma once

#include <functional>
#include <string_view>

namespace heatobs {

using WarningSink = std::function<void(std::string_view)>;

// Non-fatal diagnostics (under-resolved source, gain bound violated, rejected
// estimates). Default sink writes to stderr. Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace heatobs
