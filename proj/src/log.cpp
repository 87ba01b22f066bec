#include "bubblemesh/log.hpp"

#include <iostream>
#include <mutex>

namespace bubblemesh {

namespace {

std::mutex g_mutex;

LogSink& sink() {
    static LogSink s = [](LogLevel level, const std::string& msg) {
        if (level == LogLevel::Warning) std::cerr << "warning: " << msg << '\n';
    };
    return s;
}

void emit(LogLevel level, const std::string& message) {
    std::lock_guard lock(g_mutex);
    if (sink()) sink()(level, message);
}

}  // namespace

void set_log_sink(LogSink s) {
    std::lock_guard lock(g_mutex);
    sink() = std::move(s);
}

void log_info(const std::string& message) { emit(LogLevel::Info, message); }
void log_warning(const std::string& message) { emit(LogLevel::Warning, message); }

}  // namespace bubblemesh
