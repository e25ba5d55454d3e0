#include "fluxfocus/log.hpp"

#include <iostream>
#include <mutex>

namespace fluxfocus {
namespace {

std::mutex sink_mutex;

WarningSink& sink() {
    static WarningSink s = [](const std::string& msg) {
        std::cerr << "fluxfocus: warning: " << msg << '\n';
    };
    return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
    std::lock_guard lock(sink_mutex);
    sink() = std::move(s);
}

void warn(const std::string& message) {
    std::lock_guard lock(sink_mutex);
    if (sink()) sink()(message);
}

}  // namespace fluxfocus
