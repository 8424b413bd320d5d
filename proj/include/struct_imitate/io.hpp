#ifndef STRUCT_IMITATE_IO_HPP
#define STRUCT_IMITATE_IO_HPP

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "manifold.hpp"
#include "metrics.hpp"
#include "temporal.hpp"
#include "trajectory.hpp"

// JSON records.
//
//   trajectory:    {"inputs": [[f64;I];N], "means": [[f64;O];N],
//                   "covariances": [[[f64;D];D];N], "manifold": null | spec}
//   via-points:    trajectory fields plus "weights": [f64;J]
//   superposition: {"priorities": [f64;H], "trajectories": [trajectory;H]}
//   temporal data: {"inputs": [[t];N], "means": [[f64;O];N], "velocities": [[f64;O];N]}
//   desired states:{"desired": [{"t": f64, "position": [f64;O]|null,
//                                "velocity": [f64;O]|null, "weight": f64}]}
//   manifold spec: {"kind":"sphere","radius":r} | {"kind":"cylinder"} |
//                  {"kind":"circle"} | {"kind":"euclidean","dim":n} |
//                  {"kind":"product","components":[spec,...]}
//
// D is O for Euclidean data and the manifold's intrinsic dimension otherwise.
// Doubles are written in shortest round-trip form, so save/load is bit-exact.

namespace struct_imitate::io {

using json = nlohmann::json;

namespace detail {

    inline std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

    inline void require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed)
    {
        if (!j.is_object())
            throw SchemaError(path.empty() ? "<root>" : path, "expected an object");
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool ok = false;
            for (const char* key : allowed)
                ok = ok || it.key() == key;
            if (!ok)
                throw SchemaError(path + "/" + it.key(), "unknown field");
        }
    }

    inline const json& field(const json& j, const std::string& path, const char* key)
    {
        auto it = j.find(key);
        if (it == j.end())
            throw SchemaError(path + "/" + key, "missing required field");
        return *it;
    }

    inline double number(const json& j, const std::string& path)
    {
        if (!j.is_number())
            throw SchemaError(path, "expected a number");
        double v = j.get<double>();
        if (!std::isfinite(v))
            throw SchemaError(path, "non-finite number");
        return v;
    }

    inline const json& array(const json& j, const std::string& path)
    {
        if (!j.is_array())
            throw SchemaError(path, "expected an array");
        return j;
    }

    inline Vector vector(const json& j, const std::string& path, std::optional<Eigen::Index> length = std::nullopt)
    {
        array(j, path);
        if (length && static_cast<Eigen::Index>(j.size()) != *length)
            throw SchemaError(path, "expected " + std::to_string(*length) + " entries, got " + std::to_string(j.size()));
        Vector v(static_cast<Eigen::Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i)
            v[static_cast<Eigen::Index>(i)] = number(j[i], index_path(path, i));
        return v;
    }

    inline Matrix matrix(const json& j, const std::string& path, Eigen::Index dim)
    {
        array(j, path);
        if (static_cast<Eigen::Index>(j.size()) != dim)
            throw SchemaError(path, "expected " + std::to_string(dim) + " rows, got " + std::to_string(j.size()));
        Matrix m(dim, dim);
        for (std::size_t r = 0; r < j.size(); ++r)
            m.row(static_cast<Eigen::Index>(r)) = vector(j[r], index_path(path, r), dim).transpose();
        return m;
    }

    inline std::vector<Vector> vector_list(const json& j, const std::string& path, std::optional<std::size_t> count = std::nullopt)
    {
        array(j, path);
        if (count && j.size() != *count)
            throw SchemaError(path, "expected " + std::to_string(*count) + " entries, got " + std::to_string(j.size()));
        std::vector<Vector> out;
        out.reserve(j.size());
        std::optional<Eigen::Index> len;
        for (std::size_t i = 0; i < j.size(); ++i) {
            out.push_back(vector(j[i], index_path(path, i), len));
            len = out.back().size();
        }
        return out;
    }

    inline json to_array(const Vector& v)
    {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i]))
                throw InvalidArgument("cannot serialize a non-finite number");
            a.push_back(v[i]);
        }
        return a;
    }

    inline json to_array(const Matrix& m)
    {
        json a = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            a.push_back(to_array(Vector(m.row(r).transpose())));
        return a;
    }

    inline void write_points(json& j, const std::vector<GaussianPoint>& points)
    {
        json inputs = json::array(), means = json::array(), covs = json::array();
        for (const auto& p : points) {
            inputs.push_back(to_array(p.x));
            means.push_back(to_array(p.mu));
            covs.push_back(to_array(p.sigma));
        }
        j["inputs"] = std::move(inputs);
        j["means"] = std::move(means);
        j["covariances"] = std::move(covs);
    }

} // namespace detail

inline json manifold_to_json(const ManifoldSpec& spec)
{
    switch (spec.kind()) {
    case ManifoldSpec::Kind::Sphere:
        return {{"kind", "sphere"}, {"radius", spec.radius()}};
    case ManifoldSpec::Kind::Cylinder:
        return {{"kind", "cylinder"}};
    case ManifoldSpec::Kind::Circle:
        return {{"kind", "circle"}};
    case ManifoldSpec::Kind::Euclidean:
        return {{"kind", "euclidean"}, {"dim", spec.euclidean_dim()}};
    case ManifoldSpec::Kind::Product: {
        json comps = json::array();
        for (const auto& c : spec.components())
            comps.push_back(manifold_to_json(c));
        return {{"kind", "product"}, {"components", comps}};
    }
    }
    throw InvalidArgument("unknown manifold kind");
}

inline ManifoldSpec manifold_from_json(const json& j, const std::string& path = "/manifold")
{
    if (!j.is_object())
        throw SchemaError(path, "expected an object");
    const json& kind = detail::field(j, path, "kind");
    if (!kind.is_string())
        throw SchemaError(path + "/kind", "expected a string");
    const auto k = kind.get<std::string>();
    if (k == "sphere") {
        detail::require_object(j, path, {"kind", "radius"});
        double r = detail::number(detail::field(j, path, "radius"), path + "/radius");
        if (!(r > 0.0))
            throw SchemaError(path + "/radius", "must be positive");
        return ManifoldSpec::sphere(r);
    }
    if (k == "cylinder") {
        detail::require_object(j, path, {"kind"});
        return ManifoldSpec::cylinder();
    }
    if (k == "circle") {
        detail::require_object(j, path, {"kind"});
        return ManifoldSpec::circle();
    }
    if (k == "euclidean") {
        detail::require_object(j, path, {"kind", "dim"});
        const json& d = detail::field(j, path, "dim");
        if (!d.is_number_integer() || d.get<long>() <= 0)
            throw SchemaError(path + "/dim", "expected a positive integer");
        return ManifoldSpec::euclidean(d.get<long>());
    }
    if (k == "product") {
        detail::require_object(j, path, {"kind", "components"});
        const json& comps = detail::array(detail::field(j, path, "components"), path + "/components");
        if (comps.empty())
            throw SchemaError(path + "/components", "product needs at least one component");
        std::vector<ManifoldSpec> parts;
        for (std::size_t i = 0; i < comps.size(); ++i)
            parts.push_back(manifold_from_json(comps[i], detail::index_path(path + "/components", i)));
        return ManifoldSpec::product(std::move(parts));
    }
    throw SchemaError(path + "/kind", "unknown manifold kind '" + k + "'");
}

namespace detail {

    inline std::vector<GaussianPoint> read_points(const json& j, const std::string& path, const std::optional<ManifoldSpec>& manifold)
    {
        auto inputs = vector_list(field(j, path, "inputs"), path + "/inputs");
        auto means = vector_list(field(j, path, "means"), path + "/means", inputs.size());
        const json& covs = array(field(j, path, "covariances"), path + "/covariances");
        if (covs.size() != inputs.size())
            throw SchemaError(path + "/covariances", "expected " + std::to_string(inputs.size()) + " entries, got " + std::to_string(covs.size()));
        Eigen::Index dim = manifold ? manifold->intrinsic_dim() : (means.empty() ? 0 : means.front().size());
        std::vector<GaussianPoint> points;
        points.reserve(inputs.size());
        for (std::size_t n = 0; n < inputs.size(); ++n)
            points.push_back({inputs[n], means[n], matrix(covs[n], index_path(path + "/covariances", n), dim)});
        return points;
    }

    inline std::optional<ManifoldSpec> read_manifold(const json& j, const std::string& path)
    {
        auto it = j.find("manifold");
        if (it == j.end() || it->is_null())
            return std::nullopt;
        return manifold_from_json(*it, path + "/manifold");
    }

} // namespace detail

inline json trajectory_to_json(const ProbabilisticTrajectory& traj)
{
    json j;
    detail::write_points(j, traj.points);
    j["manifold"] = traj.manifold ? manifold_to_json(*traj.manifold) : json(nullptr);
    return j;
}

/// Parses and validates (shape, SPD, membership) a trajectory record.
inline ProbabilisticTrajectory trajectory_from_json(const json& j, const std::string& path = "")
{
    detail::require_object(j, path, {"inputs", "means", "covariances", "manifold"});
    ProbabilisticTrajectory traj;
    traj.manifold = detail::read_manifold(j, path);
    traj.points = detail::read_points(j, path, traj.manifold);
    traj.validate();
    return traj;
}

inline json via_to_json(const ViaPointSet& via, const std::optional<ManifoldSpec>& manifold = std::nullopt)
{
    json j;
    detail::write_points(j, via.points);
    json w = json::array();
    for (double v : via.weights)
        w.push_back(v);
    j["weights"] = std::move(w);
    j["manifold"] = manifold ? manifold_to_json(*manifold) : json(nullptr);
    return j;
}

/// Via-point covariances are D×D with D taken from `manifold` when given,
/// else from the file's own "manifold" field, else the mean length.
inline ViaPointSet via_from_json(const json& j, std::optional<ManifoldSpec> manifold = std::nullopt, const std::string& path = "")
{
    detail::require_object(j, path, {"inputs", "means", "covariances", "weights", "manifold"});
    if (!manifold)
        manifold = detail::read_manifold(j, path);
    ViaPointSet via;
    via.points = detail::read_points(j, path, manifold);
    Vector w = detail::vector(detail::field(j, path, "weights"), path + "/weights", static_cast<Eigen::Index>(via.points.size()));
    via.weights.assign(w.data(), w.data() + w.size());
    for (std::size_t i = 0; i < via.weights.size(); ++i)
        if (!(via.weights[i] > 1.0))
            throw SchemaError(detail::index_path(path + "/weights", i), "via-point weight must be > 1");
    return via;
}

inline json superposition_to_json(const SuperpositionSet& set)
{
    json traj = json::array();
    for (const auto& t : set.trajectories)
        traj.push_back(trajectory_to_json(t));
    return {{"priorities", set.priorities}, {"trajectories", traj}};
}

inline SuperpositionSet superposition_from_json(const json& j, const std::string& path = "")
{
    detail::require_object(j, path, {"priorities", "trajectories"});
    SuperpositionSet set;
    Vector p = detail::vector(detail::field(j, path, "priorities"), path + "/priorities");
    set.priorities.assign(p.data(), p.data() + p.size());
    const json& trajs = detail::array(detail::field(j, path, "trajectories"), path + "/trajectories");
    for (std::size_t h = 0; h < trajs.size(); ++h)
        set.trajectories.push_back(trajectory_from_json(trajs[h], detail::index_path(path + "/trajectories", h)));
    set.validate();
    return set;
}

inline json temporal_samples_to_json(const std::vector<TemporalSample>& samples)
{
    json inputs = json::array(), means = json::array(), vel = json::array();
    for (const auto& s : samples) {
        inputs.push_back(json::array({s.t}));
        means.push_back(detail::to_array(s.position));
        vel.push_back(detail::to_array(s.velocity));
    }
    return {{"inputs", inputs}, {"means", means}, {"velocities", vel}};
}

/// Scalar-time samples with positions and velocities. "covariances" and a
/// null "manifold" are tolerated so a trajectory file can be extended in place.
inline std::vector<TemporalSample> temporal_samples_from_json(const json& j, const std::string& path = "")
{
    detail::require_object(j, path, {"inputs", "means", "velocities", "covariances", "manifold"});
    if (auto it = j.find("manifold"); it != j.end() && !it->is_null())
        throw SchemaError(path + "/manifold", "temporal data must be Euclidean");
    auto inputs = detail::vector_list(detail::field(j, path, "inputs"), path + "/inputs");
    auto means = detail::vector_list(detail::field(j, path, "means"), path + "/means", inputs.size());
    auto vel = detail::vector_list(detail::field(j, path, "velocities"), path + "/velocities", inputs.size());
    std::vector<TemporalSample> out;
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        if (inputs[n].size() != 1)
            throw SchemaError(detail::index_path(path + "/inputs", n), "temporal input must be a single time value");
        if (vel[n].size() != means[n].size())
            throw SchemaError(detail::index_path(path + "/velocities", n), "velocity length differs from the mean");
        out.push_back({inputs[n][0], means[n], vel[n]});
    }
    return out;
}

inline json desired_states_to_json(const std::vector<DesiredState>& desired)
{
    json arr = json::array();
    for (const auto& d : desired)
        arr.push_back({{"t", d.t},
            {"position", d.position ? detail::to_array(*d.position) : json(nullptr)},
            {"velocity", d.velocity ? detail::to_array(*d.velocity) : json(nullptr)},
            {"weight", d.weight}});
    return {{"desired", arr}};
}

inline std::vector<DesiredState> desired_states_from_json(const json& j, const std::string& path = "")
{
    detail::require_object(j, path, {"desired"});
    const json& arr = detail::array(detail::field(j, path, "desired"), path + "/desired");
    std::vector<DesiredState> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string at = detail::index_path(path + "/desired", i);
        detail::require_object(arr[i], at, {"t", "position", "velocity", "weight"});
        DesiredState d;
        d.t = detail::number(detail::field(arr[i], at, "t"), at + "/t");
        d.weight = detail::number(detail::field(arr[i], at, "weight"), at + "/weight");
        if (!(d.weight > 0.0))
            throw SchemaError(at + "/weight", "must be positive");
        if (auto it = arr[i].find("position"); it != arr[i].end() && !it->is_null())
            d.position = detail::vector(*it, at + "/position");
        if (auto it = arr[i].find("velocity"); it != arr[i].end() && !it->is_null())
            d.velocity = detail::vector(*it, at + "/velocity");
        if (!d.position && !d.velocity)
            throw SchemaError(at, "needs a position or a velocity");
        out.push_back(std::move(d));
    }
    return out;
}

inline json report_to_json(const EvalReport& report)
{
    json per = json::array();
    for (const auto& [m, c] : report.per_point_errors)
        per.push_back({{"mean", m}, {"cov", c}});
    return {{"c_m", report.c_m}, {"c_cov", report.c_cov}, {"wall_time", report.wall_time}, {"per_point_errors", per}};
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("io", "cannot open '" + path + "'");
    try {
        return json::parse(in);
    }
    catch (const json::parse_error& e) {
        throw SchemaError(path, std::string("invalid JSON: ") + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out)
        throw Error("io", "cannot write '" + path + "'");
    out << j.dump(1) << '\n';
}

inline ProbabilisticTrajectory load_trajectory(const std::string& path) { return trajectory_from_json(read_json_file(path)); }

inline void save_trajectory(const std::string& path, const ProbabilisticTrajectory& traj) { write_json_file(path, trajectory_to_json(traj)); }

} // namespace struct_imitate::io

#endif // STRUCT_IMITATE_IO_HPP
