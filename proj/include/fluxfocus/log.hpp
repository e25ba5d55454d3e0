#pragma once

#include <functional>
#include <string>

namespace fluxfocus {

using WarningSink = std::function<void(const std::string&)>;

// default sink prints "fluxfocus: warning: ..." to stderr
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace fluxfocus
