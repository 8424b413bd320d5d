#ifndef STRUCT_IMITATE_TESTS_HELPERS_HPP
#define STRUCT_IMITATE_TESTS_HELPERS_HPP

#include <initializer_list>
#include <string>
#include <vector>

#include <struct_imitate/diagnostics.hpp>
#include <struct_imitate/kernel.hpp>

namespace testing_support {

using struct_imitate::Matrix;
using struct_imitate::Vector;

inline Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

inline Matrix mat1(double v) { return Matrix::Constant(1, 1, v); }

/// Collects warnings for the lifetime of the object.
struct CapturedWarnings {
    CapturedWarnings()
        : previous(struct_imitate::set_warning_handler([this](const std::string& m) { messages.push_back(m); }))
    {
    }
    ~CapturedWarnings() { struct_imitate::set_warning_handler(previous); }
    std::vector<std::string> messages;
    struct_imitate::WarningHandler previous;
};

} // namespace testing_support

#endif // STRUCT_IMITATE_TESTS_HELPERS_HPP
