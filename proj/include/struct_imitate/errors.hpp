#ifndef STRUCT_IMITATE_ERRORS_HPP
#define STRUCT_IMITATE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace struct_imitate {

/// Base class of every error raised by the library. `kind()` is a short
/// machine-readable tag used by the CLI when reporting failures.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), _kind(std::move(kind)) {}

    const std::string& kind() const noexcept { return _kind; }

private:
    std::string _kind;
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error("dimension_mismatch", what) {}
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

struct DegenerateWeights : Error {
    explicit DegenerateWeights(const std::string& what) : Error("degenerate_weights", what) {}
};

struct SingularSystem : Error {
    SingularSystem(const std::string& what, double condition)
        : Error("singular_system", what), condition_estimate(condition) {}
    double condition_estimate;
};

struct OffManifold : Error {
    explicit OffManifold(const std::string& what) : Error("off_manifold", what) {}
};

struct CutLocus : Error {
    explicit CutLocus(const std::string& what) : Error("cut_locus", what) {}
};

struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& what) : Error("not_spd", what) {}
};

/// Schema violation while reading a record; `field` is a JSON-pointer-like path.
struct SchemaError : Error {
    SchemaError(std::string field_path, const std::string& what)
        : Error("schema", field_path + ": " + what), field(std::move(field_path)) {}
    std::string field;
};

} // namespace struct_imitate

#endif // STRUCT_IMITATE_ERRORS_HPP
