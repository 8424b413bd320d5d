// struct-imitate: ingest demonstrations, fit, adapt and predict trajectories,
// and evaluate predictions against a reference.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <struct_imitate/struct_imitate.hpp>

namespace si = struct_imitate;
using json = nlohmann::json;
using si::Matrix;
using si::Vector;

namespace {

const char* kColumnsHelp = R"(CSV output (one row per grid point, 17 significant digits):
  predict           x0..x{I-1}, mu0..mu{O-1}, sigma_r_c (row-major, O x O), flags
  predict-manifold  x0..x{I-1}, mu0..mu{A-1} (ambient), sigma_r_c (d x d, tangent basis), flags
  predict-temporal  t, pos0..pos{O-1}, vel0..vel{O-1}, flags
flags: bit 0 = some weights were negative (covariance clamped),
       bit 1 = manifold mean did not reach the gradient tolerance.
Environment: STRUCT_IMITATE_THREADS caps the number of worker threads.)";

// ---------------------------------------------------------------- run config

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RunConfig {
    std::optional<double> kappa, lambda, delta, tau, eta, tol, epsilon;
    std::optional<int> max_iter;
    std::optional<std::string> divergence, cov, grid, data, via, superpose, manifold, out;
};

void require_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        throw si::SchemaError(path.empty() ? "<root>" : path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
            throw si::SchemaError(path + "/" + it.key(), "unknown field");
}

template <typename T>
void read_opt(const json& j, const std::string& path, const char* key, std::optional<T>& out)
{
    auto it = j.find(key);
    if (it == j.end())
        return;
    try {
        out = it->get<T>();
    }
    catch (const json::exception&) {
        throw si::SchemaError(path + "/" + key, "wrong type");
    }
}

RunConfig load_run_config(const std::string& file)
{
    json j = si::io::read_json_file(file);
    require_keys(j, "", {"kernel", "mode", "delta", "tau", "epsilon", "rgd", "grid", "io"});
    RunConfig c;
    if (auto it = j.find("kernel"); it != j.end()) {
        require_keys(*it, "/kernel", {"kappa", "lambda"});
        read_opt(*it, "/kernel", "kappa", c.kappa);
        read_opt(*it, "/kernel", "lambda", c.lambda);
    }
    if (auto it = j.find("mode"); it != j.end()) {
        require_keys(*it, "/mode", {"divergence", "cov"});
        read_opt(*it, "/mode", "divergence", c.divergence);
        read_opt(*it, "/mode", "cov", c.cov);
    }
    read_opt(j, "", "delta", c.delta);
    read_opt(j, "", "tau", c.tau);
    read_opt(j, "", "epsilon", c.epsilon);
    if (auto it = j.find("rgd"); it != j.end()) {
        require_keys(*it, "/rgd", {"eta", "max_iter", "tol"});
        read_opt(*it, "/rgd", "eta", c.eta);
        read_opt(*it, "/rgd", "max_iter", c.max_iter);
        read_opt(*it, "/rgd", "tol", c.tol);
    }
    if (auto it = j.find("grid"); it != j.end()) {
        if (it->is_object()) {
            require_keys(*it, "/grid", {"start", "end", "count"});
            try {
                c.grid = fmt(it->at("start").get<double>()) + ":" + fmt(it->at("end").get<double>()) + ":" + std::to_string(it->at("count").get<long>());
            }
            catch (const json::exception&) {
                throw si::SchemaError("/grid", "needs numeric start, end and integer count");
            }
        }
        else if (it->is_array())
            c.grid = it->dump();
        else
            throw si::SchemaError("/grid", "expected {start, end, count} or a list");
    }
    if (auto it = j.find("io"); it != j.end()) {
        require_keys(*it, "/io", {"data", "via", "superpose", "out"});
        read_opt(*it, "/io", "data", c.data);
        read_opt(*it, "/io", "via", c.via);
        read_opt(*it, "/io", "superpose", c.superpose);
        read_opt(*it, "/io", "out", c.out);
    }
    return c;
}

/// Command-line values win over the config file.
template <typename T>
void overlay(std::optional<T>& cli, const std::optional<T>& file)
{
    if (!cli && file)
        cli = file;
}

void merge(RunConfig& cli, const RunConfig& file)
{
    overlay(cli.kappa, file.kappa);
    overlay(cli.lambda, file.lambda);
    overlay(cli.delta, file.delta);
    overlay(cli.tau, file.tau);
    overlay(cli.eta, file.eta);
    overlay(cli.tol, file.tol);
    overlay(cli.epsilon, file.epsilon);
    overlay(cli.max_iter, file.max_iter);
    overlay(cli.divergence, file.divergence);
    overlay(cli.cov, file.cov);
    overlay(cli.grid, file.grid);
    overlay(cli.data, file.data);
    overlay(cli.via, file.via);
    overlay(cli.superpose, file.superpose);
    overlay(cli.out, file.out);
}

si::KernelConfig kernel_config(const RunConfig& c)
{
    si::KernelConfig k;
    k.kappa = c.kappa.value_or(k.kappa);
    k.lambda = c.lambda.value_or(k.lambda);
    k.validate();
    return k;
}

si::CovVariant cov_variant(const RunConfig& c, si::CovVariant fallback)
{
    if (!c.cov)
        return fallback;
    if (*c.cov == "exact")
        return si::CovVariant::Exact;
    if (*c.cov == "approx")
        return si::CovVariant::Approx;
    throw si::InvalidArgument("--cov must be 'exact' or 'approx', got '" + *c.cov + "'");
}

si::ImitationMode imitation_mode(const RunConfig& c)
{
    si::ImitationMode m;
    std::string d = c.divergence.value_or("kl");
    if (d == "kl")
        m.divergence = si::Divergence::KL;
    else if (d == "rkl")
        m.divergence = si::Divergence::RKL;
    else
        throw si::InvalidArgument("--mode must be 'kl' or 'rkl', got '" + d + "'");
    m.kl_cov = cov_variant(c, si::CovVariant::Exact);
    return m;
}

si::RgdConfig rgd_config(const RunConfig& c)
{
    si::RgdConfig r;
    r.eta = c.eta.value_or(r.eta);
    r.max_iter = c.max_iter.value_or(r.max_iter);
    r.tol = c.tol.value_or(r.tol);
    r.validate();
    return r;
}

// ---------------------------------------------------------------- parsing helpers

double parse_number(const std::string& s, const std::string& what)
{
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v))
            throw std::invalid_argument(s);
        return v;
    }
    catch (const std::exception&) {
        throw si::InvalidArgument(what + ": '" + s + "' is not a finite number");
    }
}

/// "start:end:count" (scalar inputs), an inline JSON list, or a JSON file.
std::vector<Vector> parse_grid(const std::string& spec)
{
    json list;
    if (!spec.empty() && spec.front() == '[') {
        try {
            list = json::parse(spec);
        }
        catch (const json::parse_error& e) {
            throw si::SchemaError("--grid", std::string("invalid JSON list: ") + e.what());
        }
    }
    else if (std::count(spec.begin(), spec.end(), ':') == 2 && !std::filesystem::exists(spec)) {
        auto a = spec.find(':'), b = spec.rfind(':');
        double start = parse_number(spec.substr(0, a), "--grid start");
        double end = parse_number(spec.substr(a + 1, b - a - 1), "--grid end");
        double count = parse_number(spec.substr(b + 1), "--grid count");
        if (count < 1 || count != std::floor(count))
            throw si::InvalidArgument("--grid count must be a positive integer");
        const auto n = static_cast<long>(count);
        std::vector<Vector> out;
        for (long i = 0; i < n; ++i) {
            Vector x(1);
            x[0] = n == 1 ? start : start + (end - start) * static_cast<double>(i) / static_cast<double>(n - 1);
            out.push_back(x);
        }
        return out;
    }
    else
        list = si::io::read_json_file(spec);

    if (!list.is_array() || list.empty())
        throw si::SchemaError("--grid", "expected a non-empty list");
    std::vector<Vector> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const json& e = list[i];
        const std::string at = "--grid[" + std::to_string(i) + "]";
        if (e.is_number()) {
            Vector x(1);
            x[0] = e.get<double>();
            out.push_back(x);
        }
        else if (e.is_array()) {
            Vector x(static_cast<Eigen::Index>(e.size()));
            for (std::size_t k = 0; k < e.size(); ++k) {
                if (!e[k].is_number())
                    throw si::SchemaError(at + "[" + std::to_string(k) + "]", "expected a number");
                x[static_cast<Eigen::Index>(k)] = e[k].get<double>();
            }
            out.push_back(x);
        }
        else
            throw si::SchemaError(at, "expected a number or a list of numbers");
        if (!out.back().allFinite())
            throw si::SchemaError(at, "non-finite value");
    }
    return out;
}

/// "sphere[:r]", "circle", "cylinder", "euclidean:n", inline JSON, or a JSON file.
si::ManifoldSpec parse_manifold(const std::string& spec)
{
    if (!spec.empty() && spec.front() == '{') {
        try {
            return si::io::manifold_from_json(json::parse(spec), "--manifold");
        }
        catch (const json::parse_error& e) {
            throw si::SchemaError("--manifold", std::string("invalid JSON: ") + e.what());
        }
    }
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::optional<std::string> arg;
    if (colon != std::string::npos)
        arg = spec.substr(colon + 1);
    if (kind == "sphere")
        return si::ManifoldSpec::sphere(arg ? parse_number(*arg, "--manifold radius") : 1.0);
    if (kind == "circle" && !arg)
        return si::ManifoldSpec::circle();
    if (kind == "cylinder" && !arg)
        return si::ManifoldSpec::cylinder();
    if (kind == "euclidean" && arg)
        return si::ManifoldSpec::euclidean(static_cast<Eigen::Index>(parse_number(*arg, "--manifold dimension")));
    if (std::filesystem::exists(spec))
        return si::io::manifold_from_json(si::io::read_json_file(spec), "--manifold");
    throw si::InvalidArgument("--manifold: unrecognized specification '" + spec + "'");
}

/// Numeric CSV rows; a first line that does not parse as numbers is a header.
std::vector<std::vector<double>> read_csv(const std::string& path, std::vector<std::string>* header = nullptr)
{
    std::ifstream in(path);
    if (!in)
        throw si::Error("io", "cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        std::vector<double> row;
        bool numeric = true;
        for (const auto& c : cells) {
            try {
                std::size_t used = 0;
                std::string t = c;
                t.erase(0, t.find_first_not_of(" \t"));
                t.erase(t.find_last_not_of(" \t") + 1);
                row.push_back(std::stod(t, &used));
                if (used != t.size())
                    numeric = false;
            }
            catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (rows.empty() && header && header->empty()) {
                for (auto& c : cells) {
                    c.erase(0, c.find_first_not_of(" \t"));
                    c.erase(c.find_last_not_of(" \t") + 1);
                }
                *header = cells;
                continue;
            }
            if (rows.empty() && !header)
                continue;
            throw si::SchemaError(path + ":" + std::to_string(lineno), "non-numeric cell");
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw si::SchemaError(path + ":" + std::to_string(lineno), "expected " + std::to_string(rows.front().size()) + " columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------- output

class Output {
public:
    explicit Output(const std::optional<std::string>& path)
    {
        if (path && *path != "-") {
            _file.open(*path);
            if (!_file)
                throw si::Error("io", "cannot write '" + *path + "'");
        }
    }
    std::ostream& stream() { return _file.is_open() ? static_cast<std::ostream&>(_file) : std::cout; }

private:
    std::ofstream _file;
};

std::string header(Eigen::Index in_dim, Eigen::Index out_dim, Eigen::Index cov_dim)
{
    std::string h;
    for (Eigen::Index i = 0; i < in_dim; ++i)
        h += (h.empty() ? "x" : ",x") + std::to_string(i);
    for (Eigen::Index i = 0; i < out_dim; ++i)
        h += ",mu" + std::to_string(i);
    for (Eigen::Index r = 0; r < cov_dim; ++r)
        for (Eigen::Index c = 0; c < cov_dim; ++c)
            h += ",sigma_" + std::to_string(r) + "_" + std::to_string(c);
    return h + ",flags";
}

std::string row(const Vector& x, const si::Prediction& p)
{
    std::string s;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        s += (i ? "," : "") + fmt(x[i]);
    for (Eigen::Index i = 0; i < p.mu.size(); ++i)
        s += "," + fmt(p.mu[i]);
    for (Eigen::Index r = 0; r < p.sigma.rows(); ++r)
        for (Eigen::Index c = 0; c < p.sigma.cols(); ++c)
            s += "," + fmt(p.sigma(r, c));
    return s + "," + std::to_string(p.flags());
}

void write_predictions(const RunConfig& cfg, const std::vector<Vector>& grid, const std::vector<si::Prediction>& preds, Eigen::Index cov_dim)
{
    Output out(cfg.out);
    auto& os = out.stream();
    os << header(grid.front().size(), preds.front().mu.size(), cov_dim) << '\n';
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << row(grid[i], preds[i]) << '\n';
}

std::vector<Vector> grid_or_inputs(const RunConfig& cfg, const std::vector<Vector>& inputs)
{
    auto grid = cfg.grid ? parse_grid(*cfg.grid) : inputs;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i].size() != inputs.front().size())
            throw si::DimensionMismatch("grid point " + std::to_string(i) + " has " + std::to_string(grid[i].size()) + " coordinates, the data has " +
                std::to_string(inputs.front().size()));
    return grid;
}

template <typename Fn>
std::vector<si::Prediction> predict_grid(const std::vector<Vector>& grid, Fn&& fn)
{
    std::vector<si::Prediction> preds(grid.size());
    si::parallel_for(grid.size(), [&](std::size_t i) { preds[i] = fn(grid[i]); });
    return preds;
}

std::string require(const std::optional<std::string>& v, const char* flag)
{
    if (!v)
        throw si::InvalidArgument(std::string(flag) + " is required");
    return *v;
}

// ---------------------------------------------------------------- commands

void cmd_ingest(const std::vector<std::string>& files, int input_dim, const RunConfig& cfg)
{
    if (input_dim < 1)
        throw si::InvalidArgument("--input-dim must be at least 1");
    std::vector<si::Demonstration> demos;
    for (const auto& f : files) {
        auto rows = read_csv(f);
        if (rows.empty())
            throw si::InvalidArgument("demonstration '" + f + "' has no rows");
        if (rows.front().size() <= static_cast<std::size_t>(input_dim))
            throw si::DimensionMismatch("demonstration '" + f + "' needs more than " + std::to_string(input_dim) + " columns");
        si::Demonstration d;
        for (const auto& r : rows) {
            d.inputs.push_back(Eigen::Map<const Vector>(r.data(), input_dim));
            d.outputs.push_back(Eigen::Map<const Vector>(r.data() + input_dim, static_cast<Eigen::Index>(r.size()) - input_dim));
        }
        demos.push_back(std::move(d));
    }
    auto traj = cfg.manifold ? si::ingest_manifold_demonstrations(demos, parse_manifold(*cfg.manifold), cfg.epsilon)
                             : si::ingest_demonstrations(demos, cfg.epsilon);
    Output out(cfg.out);
    out.stream() << si::io::trajectory_to_json(traj).dump(1) << '\n';
}

void cmd_predict(const RunConfig& cfg)
{
    const auto kernel = kernel_config(cfg);
    const auto mode = imitation_mode(cfg);
    if (cfg.superpose) {
        if (cfg.via)
            throw si::InvalidArgument("--via cannot be combined with --superpose");
        if (cfg.data)
            throw si::InvalidArgument("--data cannot be combined with --superpose; the superposition file carries the trajectories");
        auto set = si::io::superposition_from_json(si::io::read_json_file(*cfg.superpose));
        const auto& ref = set.trajectories.front();
        auto model = si::fit(ref.inputs(), Vector::Ones(static_cast<Eigen::Index>(ref.size())), kernel);
        auto grid = grid_or_inputs(cfg, ref.inputs());
        auto preds = predict_grid(grid, [&](const Vector& x) { return si::superpose_predict(model, set, mode, x); });
        write_predictions(cfg, grid, preds, ref.output_dim());
        return;
    }
    auto data = si::io::load_trajectory(require(cfg.data, "--data"));
    if (data.manifold)
        throw si::InvalidArgument("trajectory is manifold-valued; use predict-manifold");
    si::ViaPointSet via;
    if (cfg.via)
        via = si::io::via_from_json(si::io::read_json_file(*cfg.via));
    // Always go through the weighted path so that an empty via file is a no-op bit for bit.
    auto merged = si::merge_via_points(data, via);
    auto model = si::fit(merged.data.inputs(), merged.row_weights, kernel);
    auto grid = grid_or_inputs(cfg, data.inputs());
    auto preds = predict_grid(grid, [&](const Vector& x) { return si::predict(model, merged.data, mode, x); });
    write_predictions(cfg, grid, preds, data.output_dim());
}

void cmd_predict_manifold(const RunConfig& cfg)
{
    const auto kernel = kernel_config(cfg);
    const auto rgd = rgd_config(cfg);
    const auto variant = cov_variant(cfg, si::CovVariant::Approx);
    json j = si::io::read_json_file(require(cfg.data, "--data"));
    if (cfg.manifold) {
        auto spec = parse_manifold(*cfg.manifold);
        if (auto it = j.find("manifold"); it != j.end() && !it->is_null() && !(si::io::manifold_from_json(*it) == spec))
            throw si::InvalidArgument("--manifold " + spec.name() + " contradicts the manifold recorded in the data file");
        j["manifold"] = si::io::manifold_to_json(spec);
    }
    auto data = si::io::trajectory_from_json(j);
    if (!data.manifold)
        throw si::InvalidArgument("data has no manifold; pass --manifold");
    si::ViaPointSet via;
    if (cfg.via)
        via = si::io::via_from_json(si::io::read_json_file(*cfg.via), data.manifold);
    auto merged = si::merge_via_points(data, via);
    auto model = si::fit(merged.data.inputs(), merged.row_weights, kernel);
    auto grid = grid_or_inputs(cfg, data.inputs());
    auto preds = predict_grid(grid, [&](const Vector& x) { return si::predict_manifold(model, merged.data, x, rgd, variant); });
    write_predictions(cfg, grid, preds, data.manifold->intrinsic_dim());
}

void cmd_predict_temporal(const RunConfig& cfg)
{
    const auto kernel = kernel_config(cfg);
    auto samples = si::io::temporal_samples_from_json(si::io::read_json_file(require(cfg.data, "--data")));
    auto model = si::fit_temporal(samples, kernel, cfg.delta);
    if (cfg.via)
        model = si::adapt_temporal(model, si::io::desired_states_from_json(si::io::read_json_file(*cfg.via)));
    const double tau = cfg.tau.value_or(1.0);
    si::phase_map(0.0, tau); // validates tau

    std::vector<Vector> inputs;
    for (const auto& s : samples)
        inputs.push_back(Vector::Constant(1, s.t * tau));
    auto grid = grid_or_inputs(cfg, inputs);
    std::vector<std::pair<Vector, Vector>> out(grid.size());
    si::parallel_for(grid.size(), [&](std::size_t i) { out[i] = si::predict_pos_vel_phase(model, grid[i][0], tau); });

    Output o(cfg.out);
    auto& os = o.stream();
    const auto O = model.output_dim();
    os << "t";
    for (Eigen::Index k = 0; k < O; ++k)
        os << ",pos" << k;
    for (Eigen::Index k = 0; k < O; ++k)
        os << ",vel" << k;
    os << ",flags\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        os << fmt(grid[i][0]);
        for (Eigen::Index k = 0; k < O; ++k)
            os << ',' << fmt(out[i].first[k]);
        for (Eigen::Index k = 0; k < O; ++k)
            os << ',' << fmt(out[i].second[k]);
        os << ",0\n";
    }
}

struct Table {
    std::vector<Vector> inputs, means;
    std::vector<Matrix> covs;
};

/// A prediction CSV (header names the columns) or a trajectory JSON record.
Table load_table(const std::string& path)
{
    Table t;
    if (std::filesystem::path(path).extension() == ".json") {
        auto traj = si::io::load_trajectory(path);
        t.inputs = traj.inputs();
        t.means = traj.means();
        t.covs = traj.covariances();
        return t;
    }
    std::vector<std::string> head;
    auto rows = read_csv(path, &head);
    if (head.empty())
        throw si::SchemaError(path, "prediction CSV needs a header row");
    std::vector<std::size_t> xs, mus, sigmas;
    for (std::size_t c = 0; c < head.size(); ++c) {
        const auto& h = head[c];
        if (h.rfind("sigma_", 0) == 0)
            sigmas.push_back(c);
        else if (h.rfind("mu", 0) == 0)
            mus.push_back(c);
        else if (h.rfind("x", 0) == 0)
            xs.push_back(c);
    }
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(sigmas.size()))));
    if (mus.empty() || sigmas.empty() || static_cast<std::size_t>(d * d) != sigmas.size())
        throw si::SchemaError(path, "header must name mu* and a square block of sigma_r_c columns");
    for (const auto& r : rows) {
        if (r.size() != head.size())
            throw si::SchemaError(path, "row length differs from the header");
        Vector x(static_cast<Eigen::Index>(xs.size())), mu(static_cast<Eigen::Index>(mus.size()));
        Matrix s(d, d);
        for (std::size_t k = 0; k < xs.size(); ++k)
            x[static_cast<Eigen::Index>(k)] = r[xs[k]];
        for (std::size_t k = 0; k < mus.size(); ++k)
            mu[static_cast<Eigen::Index>(k)] = r[mus[k]];
        for (std::size_t k = 0; k < sigmas.size(); ++k)
            s(static_cast<Eigen::Index>(k) / d, static_cast<Eigen::Index>(k) % d) = r[sigmas[k]];
        t.inputs.push_back(x);
        t.means.push_back(mu);
        t.covs.push_back(s);
    }
    return t;
}

void cmd_eval(const std::string& pred_path, const std::string& ref_path, const std::optional<std::string>& json_out)
{
    auto pred = load_table(pred_path);
    auto ref = load_table(ref_path);
    if (pred.means.size() != ref.means.size())
        throw si::DimensionMismatch("prediction has " + std::to_string(pred.means.size()) + " rows, reference has " + std::to_string(ref.means.size()));
    for (std::size_t n = 0; n < pred.inputs.size(); ++n)
        if (pred.inputs[n].size() == ref.inputs[n].size() && (pred.inputs[n] - ref.inputs[n]).cwiseAbs().maxCoeff() > 1e-9)
            throw si::InvalidArgument("row " + std::to_string(n) + ": prediction and reference inputs differ");
    auto start = std::chrono::steady_clock::now();
    auto report = si::evaluate(pred.means, pred.covs, ref.means, ref.covs);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (json_out)
        si::io::write_json_file(*json_out, si::io::report_to_json(report));
    std::printf("%-12s %-12s %-12s\n", "C_m", "C_cov", "Time [s]");
    std::printf("%-12.6g %-12.6g %-12.3g\n", report.c_m, report.c_cov, report.wall_time);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Probabilistic trajectory imitation by structured prediction."};
    app.require_subcommand(1);
    app.footer(kColumnsHelp);

    RunConfig cli;
    std::optional<std::string> config_path;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration; flags override it");
        sub->add_option("--out", cli.out, "Output file (default: stdout)");
    };
    auto add_kernel = [&](CLI::App* sub) {
        sub->add_option("--kappa", cli.kappa, "Gaussian kernel bandwidth (default 6)");
        sub->add_option("--lambda", cli.lambda, "Ridge regularization (default 1e-5)");
        sub->add_option("--grid", cli.grid, "Query grid: start:end:count, a JSON list, or a JSON file (default: data inputs)");
    };

    std::vector<std::string> demo_files;
    int input_dim = 1;
    auto* ingest = app.add_subcommand("ingest", "Aggregate demonstration CSVs into a probabilistic trajectory JSON");
    ingest->add_option("demos", demo_files, "Demonstration CSV files (input columns first)")->required();
    ingest->add_option("--input-dim", input_dim, "Number of leading input columns")->capture_default_str();
    ingest->add_option("--epsilon", cli.epsilon, "Covariance regularization added to the diagonal");
    ingest->add_option("--manifold", cli.manifold, "Output manifold: sphere[:r], circle, cylinder, euclidean:n, or JSON");
    add_common(ingest);

    auto* predict = app.add_subcommand("predict", "Predict a Euclidean trajectory (KL or RKL mode)");
    predict->add_option("--data", cli.data, "Trajectory JSON");
    predict->add_option("--mode", cli.divergence, "kl (default) or rkl");
    predict->add_option("--cov", cli.cov, "KL covariance variant: exact (default) or approx");
    predict->add_option("--via", cli.via, "Via-point JSON");
    predict->add_option("--superpose", cli.superpose, "Superposition JSON (replaces --data)");
    add_kernel(predict);
    add_common(predict);

    auto* temporal = app.add_subcommand("predict-temporal", "Predict positions and velocities");
    temporal->add_option("--data", cli.data, "Temporal samples JSON (inputs, means, velocities)");
    temporal->add_option("--delta", cli.delta, "Finite-difference half step (default 1e-4 x time span)");
    temporal->add_option("--via", cli.via, "Desired states JSON");
    temporal->add_option("--tau", cli.tau, "Phase rate: query time t maps to z = t / tau (default 1)");
    add_kernel(temporal);
    add_common(temporal);

    auto* manifold = app.add_subcommand("predict-manifold", "Predict a manifold-valued trajectory");
    manifold->add_option("--data", cli.data, "Trajectory JSON");
    manifold->add_option("--manifold", cli.manifold, "sphere[:r], circle, cylinder, euclidean:n, or JSON; must agree with the data");
    manifold->add_option("--rgd-eta", cli.eta, "Gradient step (default 0.01)");
    manifold->add_option("--rgd-max-iter", cli.max_iter, "Iteration cap (default 1000)");
    manifold->add_option("--rgd-tol", cli.tol, "Gradient-norm tolerance (default 1e-9)");
    manifold->add_option("--cov", cli.cov, "Covariance variant: approx (default) or exact");
    manifold->add_option("--via", cli.via, "Via-point JSON (covariances in the tangent basis)");
    add_kernel(manifold);
    add_common(manifold);

    std::string pred_path, ref_path;
    std::optional<std::string> eval_json;
    auto* eval = app.add_subcommand("eval", "Compare a prediction CSV with a reference (CSV or trajectory JSON)");
    eval->add_option("--pred", pred_path, "Prediction CSV")->required();
    eval->add_option("--ref", ref_path, "Reference CSV or trajectory JSON")->required();
    eval->add_option("--json", eval_json, "Also write the report as JSON");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "struct-imitate: error: usage: %s\n", e.what());
        return 2;
    }

    // Per-point warnings from negative weights are reported as one line each.
    std::size_t clamped = 0, saddles = 0;
    si::set_warning_handler([&](const std::string& msg) {
        if (msg.find("indefinite") != std::string::npos)
            ++saddles;
        else if (msg.find("negative weights") != std::string::npos)
            ++clamped;
        else
            std::fprintf(stderr, "struct-imitate: warning: %s\n", msg.c_str());
    });
    auto report_clamped = [&] {
        if (clamped)
            std::fprintf(stderr, "struct-imitate: warning: %zu predicted covariance(s) had negative eigenvalues from negative weights and were clamped at 0 (flags bit 0)\n", clamped);
        if (saddles)
            std::fprintf(stderr, "struct-imitate: warning: %zu reverse-KL mean(s) sit at a saddle because negative weights made the precision sum indefinite\n", saddles);
    };

    try {
        if (config_path)
            merge(cli, load_run_config(*config_path));
        if (*ingest)
            cmd_ingest(demo_files, input_dim, cli);
        else if (*predict)
            cmd_predict(cli);
        else if (*temporal)
            cmd_predict_temporal(cli);
        else if (*manifold)
            cmd_predict_manifold(cli);
        else if (*eval)
            cmd_eval(pred_path, ref_path, eval_json);
    }
    catch (const si::Error& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::fprintf(stderr, "struct-imitate: error: %s: %s\n", e.kind().c_str(), msg.c_str());
        return 1;
    }
    catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::fprintf(stderr, "struct-imitate: error: internal: %s\n", msg.c_str());
        return 1;
    }
    report_clamped();
    return 0;
}
