#ifndef STRUCT_IMITATE_DIAGNOSTICS_HPP
#define STRUCT_IMITATE_DIAGNOSTICS_HPP

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <utility>

namespace struct_imitate {

using WarningHandler = std::function<void(const std::string&)>;

namespace detail {
    struct WarningSink {
        std::mutex mutex;
        WarningHandler handler = [](const std::string& msg) { std::cerr << "struct_imitate: warning: " << msg << '\n'; };
    };

    inline WarningSink& warning_sink()
    {
        static WarningSink sink;
        return sink;
    }
} // namespace detail

/// Replace the process-wide warning handler; returns the previous one.
/// Pass an empty function to silence warnings.
inline WarningHandler set_warning_handler(WarningHandler handler)
{
    auto& sink = detail::warning_sink();
    std::lock_guard<std::mutex> lock(sink.mutex);
    std::swap(sink.handler, handler);
    return handler;
}

inline void warn(const std::string& msg)
{
    auto& sink = detail::warning_sink();
    std::lock_guard<std::mutex> lock(sink.mutex);
    if (sink.handler)
        sink.handler(msg);
}

} // namespace struct_imitate

#endif // STRUCT_IMITATE_DIAGNOSTICS_HPP
