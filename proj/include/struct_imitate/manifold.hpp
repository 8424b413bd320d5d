#ifndef STRUCT_IMITATE_MANIFOLD_HPP
#define STRUCT_IMITATE_MANIFOLD_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace struct_imitate {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Geometry of a trajectory's output space.
///
/// Points are stored in ambient coordinates. Round factors (sphere S²(r) and
/// the unit circle S¹) are embedded as vectors of norm r; flat factors are
/// plain Euclidean blocks. The circular generalized cylinder R²×S¹ uses the
/// layout [e1, e2, c1, c2] with (c1, c2) a unit vector. A product is the
/// concatenation of its components, and every operation acts block-wise.
class ManifoldSpec {
public:
    enum class Kind { Euclidean, Sphere, Circle, Cylinder, Product };

    /// One flattened block of the ambient vector.
    struct Factor {
        bool round = false;
        double radius = 1.0;
        Eigen::Index offset = 0;          // into the ambient vector
        Eigen::Index ambient = 0;
        Eigen::Index tangent_offset = 0;  // into tangent-basis coordinates
        Eigen::Index intrinsic = 0;
    };

    static ManifoldSpec sphere(double radius)
    {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw InvalidArgument("sphere radius must be positive");
        ManifoldSpec s(Kind::Sphere);
        s._radius = radius;
        s._dim = 3;
        return s;
    }

    static ManifoldSpec circle()
    {
        ManifoldSpec s(Kind::Circle);
        s._dim = 2;
        return s;
    }

    static ManifoldSpec euclidean(Eigen::Index dim)
    {
        if (dim <= 0)
            throw InvalidArgument("euclidean factor dimension must be positive");
        ManifoldSpec s(Kind::Euclidean);
        s._dim = dim;
        return s;
    }

    static ManifoldSpec cylinder() { return ManifoldSpec(Kind::Cylinder); }

    static ManifoldSpec product(std::vector<ManifoldSpec> components)
    {
        if (components.empty())
            throw InvalidArgument("product manifold needs at least one component");
        ManifoldSpec s(Kind::Product);
        s._components = std::move(components);
        return s;
    }

    Kind kind() const { return _kind; }
    double radius() const { return _radius; }
    const std::vector<ManifoldSpec>& components() const { return _components; }

    std::vector<Factor> factors() const
    {
        std::vector<Factor> out;
        append_factors(out);
        Eigen::Index offset = 0, tangent = 0;
        for (auto& f : out) {
            f.offset = offset;
            f.tangent_offset = tangent;
            offset += f.ambient;
            tangent += f.intrinsic;
        }
        return out;
    }

    Eigen::Index ambient_dim() const
    {
        Eigen::Index d = 0;
        for (const auto& f : factors())
            d += f.ambient;
        return d;
    }

    Eigen::Index intrinsic_dim() const
    {
        Eigen::Index d = 0;
        for (const auto& f : factors())
            d += f.intrinsic;
        return d;
    }

    std::string name() const
    {
        switch (_kind) {
        case Kind::Euclidean:
            return "euclidean(" + std::to_string(_dim) + ")";
        case Kind::Sphere: {
            std::ostringstream os;
            os << "sphere(r=" << _radius << ")";
            return os.str();
        }
        case Kind::Circle:
            return "circle";
        case Kind::Cylinder:
            return "cylinder";
        case Kind::Product: {
            std::string s = "product(";
            for (std::size_t i = 0; i < _components.size(); ++i)
                s += (i ? ", " : "") + _components[i].name();
            return s + ")";
        }
        }
        return "?";
    }

    Eigen::Index euclidean_dim() const { return _dim; }

    friend bool operator==(const ManifoldSpec& a, const ManifoldSpec& b)
    {
        return a._kind == b._kind && a._radius == b._radius && a._dim == b._dim && a._components == b._components;
    }

private:
    explicit ManifoldSpec(Kind kind) : _kind(kind) {}

    void append_factors(std::vector<Factor>& out) const
    {
        switch (_kind) {
        case Kind::Euclidean:
            out.push_back({false, 1.0, 0, _dim, 0, _dim});
            break;
        case Kind::Sphere:
            out.push_back({true, _radius, 0, 3, 0, 2});
            break;
        case Kind::Circle:
            out.push_back({true, 1.0, 0, 2, 0, 1});
            break;
        case Kind::Cylinder:
            out.push_back({false, 1.0, 0, 2, 0, 2});
            out.push_back({true, 1.0, 0, 2, 0, 1});
            break;
        case Kind::Product:
            for (const auto& c : _components)
                c.append_factors(out);
            break;
        }
    }

    Kind _kind;
    double _radius = 1.0;
    Eigen::Index _dim = 0;
    std::vector<ManifoldSpec> _components;
};

namespace detail {

    inline constexpr double kMembershipTol = 1e-9;
    inline constexpr double kCoincident = 1e-12;
    inline constexpr double kCutLocusMargin = 1e-9;

    inline void check_size(const ManifoldSpec& spec, const Vector& v, const char* what)
    {
        if (v.size() != spec.ambient_dim())
            throw DimensionMismatch(std::string(what) + ": expected ambient length " + std::to_string(spec.ambient_dim()) + ", got " + std::to_string(v.size()));
    }

    /// Angle between two points of a round factor. The half-angle atan2 form
    /// keeps full relative precision for nearly coincident points and is
    /// exactly symmetric in p and q.
    struct RoundPair {
        double cos_angle; // p̂ᵀq̂
        Vector normal;    // q̂ − (p̂ᵀq̂) p̂
        double sin_angle; // ‖normal‖
        double angle;     // in [0, π]
    };

    inline RoundPair round_pair(const Eigen::Ref<const Vector>& p, const Eigen::Ref<const Vector>& q, double r)
    {
        Vector ph = p / r, qh = q / r;
        RoundPair rp;
        rp.cos_angle = ph.dot(qh);
        rp.normal = qh - rp.cos_angle * ph;
        rp.sin_angle = rp.normal.norm();
        rp.angle = 2.0 * std::atan2((ph - qh).norm(), (ph + qh).norm());
        return rp;
    }

    inline void check_cut_locus(const RoundPair& rp, const char* what)
    {
        if (rp.cos_angle <= -1.0 + kCutLocusMargin) {
            std::ostringstream msg;
            msg << what << ": points are antipodal (cosine " << rp.cos_angle << "), logarithmic map undefined";
            throw CutLocus(msg.str());
        }
    }

    /// θ / sin θ with its series near zero.
    inline double angle_over_sine(double angle, double sine)
    {
        if (angle < 1e-4)
            return 1.0 + angle * angle / 6.0;
        return angle / sine;
    }

} // namespace detail

inline bool contains(const ManifoldSpec& spec, const Vector& p, double tol = detail::kMembershipTol)
{
    if (p.size() != spec.ambient_dim() || !p.allFinite())
        return false;
    for (const auto& f : spec.factors())
        if (f.round && std::abs(p.segment(f.offset, f.ambient).norm() - f.radius) > tol * f.radius)
            return false;
    return true;
}

inline void check_point(const ManifoldSpec& spec, const Vector& p, const char* what)
{
    detail::check_size(spec, p, what);
    if (!contains(spec, p)) {
        std::ostringstream msg;
        msg << what << ": point is not on " << spec.name();
        throw OffManifold(msg.str());
    }
}

/// Tangency of v at base, relative to the magnitude of v.
inline bool is_tangent(const ManifoldSpec& spec, const Vector& base, const Vector& v, double tol = detail::kMembershipTol)
{
    if (v.size() != spec.ambient_dim() || !v.allFinite())
        return false;
    for (const auto& f : spec.factors()) {
        if (!f.round)
            continue;
        auto b = base.segment(f.offset, f.ambient);
        auto u = v.segment(f.offset, f.ambient);
        if (std::abs(b.dot(u)) > tol * std::max(u.norm(), 1.0) * f.radius)
            return false;
    }
    return true;
}

/// Nearest manifold point (renormalizes round factors).
inline Vector project(const ManifoldSpec& spec, const Vector& p)
{
    detail::check_size(spec, p, "project");
    Vector out = p;
    for (const auto& f : spec.factors()) {
        if (!f.round)
            continue;
        double n = p.segment(f.offset, f.ambient).norm();
        if (n == 0.0)
            throw InvalidArgument("project: zero vector has no nearest point on a round factor");
        out.segment(f.offset, f.ambient) *= f.radius / n;
    }
    return out;
}

/// Orthogonal projection of an ambient vector onto the tangent space at base.
inline Vector project_tangent(const ManifoldSpec& spec, const Vector& base, const Vector& v)
{
    detail::check_size(spec, base, "project_tangent");
    detail::check_size(spec, v, "project_tangent");
    Vector out = v;
    for (const auto& f : spec.factors()) {
        if (!f.round)
            continue;
        Vector bh = base.segment(f.offset, f.ambient) / f.radius;
        out.segment(f.offset, f.ambient) -= bh * bh.dot(v.segment(f.offset, f.ambient));
    }
    return out;
}

inline double dist(const ManifoldSpec& spec, const Vector& p, const Vector& q)
{
    check_point(spec, p, "dist");
    check_point(spec, q, "dist");
    double sum = 0.0;
    for (const auto& f : spec.factors()) {
        auto a = p.segment(f.offset, f.ambient);
        auto b = q.segment(f.offset, f.ambient);
        double d = f.round ? f.radius * detail::round_pair(a, b, f.radius).angle : (a - b).norm();
        sum += d * d;
    }
    return std::sqrt(sum);
}

/// Log_base(target), a tangent vector at base in ambient coordinates.
inline Vector log_map(const ManifoldSpec& spec, const Vector& base, const Vector& target)
{
    check_point(spec, base, "log_map");
    check_point(spec, target, "log_map");
    Vector out(base.size());
    for (const auto& f : spec.factors()) {
        auto a = base.segment(f.offset, f.ambient);
        auto b = target.segment(f.offset, f.ambient);
        if (!f.round) {
            out.segment(f.offset, f.ambient) = b - a;
            continue;
        }
        auto rp = detail::round_pair(a, b, f.radius);
        double d = f.radius * rp.angle;
        if (d < detail::kCoincident || rp.sin_angle == 0.0) {
            if (rp.cos_angle < 0.0)
                detail::check_cut_locus(rp, "log_map");
            out.segment(f.offset, f.ambient).setZero();
            continue;
        }
        detail::check_cut_locus(rp, "log_map");
        out.segment(f.offset, f.ambient) = d * rp.normal / rp.sin_angle;
    }
    return out;
}

inline Vector retract(const ManifoldSpec& spec, const Vector& base, const Vector& v)
{
    detail::check_size(spec, base, "retract");
    detail::check_size(spec, v, "retract");
    Vector out = base + v;
    for (const auto& f : spec.factors()) {
        if (!f.round)
            continue;
        double n = out.segment(f.offset, f.ambient).norm();
        if (!(n > 0.0))
            throw InvalidArgument("retract: base + step vanishes on a round factor");
        out.segment(f.offset, f.ambient) *= f.radius / n;
    }
    return out;
}

/// Γ_{from→to}(u): isometric transport along the connecting geodesic.
inline Vector parallel_transport(const ManifoldSpec& spec, const Vector& from, const Vector& to, const Vector& u)
{
    check_point(spec, from, "parallel_transport");
    check_point(spec, to, "parallel_transport");
    detail::check_size(spec, u, "parallel_transport");
    Vector out = u;
    for (const auto& f : spec.factors()) {
        if (!f.round)
            continue;
        auto a = from.segment(f.offset, f.ambient);
        auto b = to.segment(f.offset, f.ambient);
        auto rp = detail::round_pair(a, b, f.radius);
        double d = f.radius * rp.angle;
        if (d < detail::kCoincident)
            continue;
        detail::check_cut_locus(rp, "parallel_transport");
        Vector forward = d * rp.normal / rp.sin_angle;
        auto back = detail::round_pair(b, a, f.radius);
        Vector backward = d * back.normal / back.sin_angle;
        auto w = u.segment(f.offset, f.ambient);
        out.segment(f.offset, f.ambient) = w - (forward.dot(w) / (d * d)) * (forward + backward);
    }
    return out;
}

/// F(μ) = Σ α_n dist²(μ_n, μ).
inline double weighted_dist2(const ManifoldSpec& spec, const Vector& alpha, const std::vector<Vector>& anchors, const Vector& mu)
{
    if (alpha.size() != static_cast<Eigen::Index>(anchors.size()))
        throw DimensionMismatch("weighted_dist2: alpha and anchors differ in length");
    double sum = 0.0;
    for (std::size_t n = 0; n < anchors.size(); ++n) {
        double d = dist(spec, anchors[n], mu);
        sum += alpha[static_cast<Eigen::Index>(n)] * d * d;
    }
    return sum;
}

/// Riemannian gradient of F at μ (the ascent direction).
///
/// Round factors: 2 Σ α_n (μμᵀ/r² − I) [arccos(u_n)/√(1−u_n²)] μ_n with
/// u_n = μ_nᵀμ/r²; flat factors: 2 Σ α_n (μ − μ_n).
inline Vector riemannian_grad_weighted_dist2(const ManifoldSpec& spec, const Vector& alpha, const std::vector<Vector>& anchors, const Vector& mu)
{
    if (alpha.size() != static_cast<Eigen::Index>(anchors.size()))
        throw DimensionMismatch("riemannian_grad: alpha and anchors differ in length");
    check_point(spec, mu, "riemannian_grad");
    Vector grad = Vector::Zero(mu.size());
    const auto factors = spec.factors();
    for (std::size_t n = 0; n < anchors.size(); ++n) {
        const Vector& anchor = anchors[n];
        check_point(spec, anchor, "riemannian_grad");
        const double a = alpha[static_cast<Eigen::Index>(n)];
        for (const auto& f : factors) {
            auto m = mu.segment(f.offset, f.ambient);
            auto p = anchor.segment(f.offset, f.ambient);
            if (!f.round) {
                grad.segment(f.offset, f.ambient) += 2.0 * a * (m - p);
                continue;
            }
            auto rp = detail::round_pair(m, p, f.radius);
            if (rp.cos_angle <= -1.0 + detail::kCutLocusMargin) {
                std::ostringstream msg;
                msg << "riemannian_grad: anchor " << n << " is antipodal to the current mean";
                throw CutLocus(msg.str());
            }
            // (μμᵀ/r² − I) μ_n = −r (q̂ − u μ̂) = −r · normal
            double ratio = detail::angle_over_sine(rp.angle, rp.sin_angle);
            grad.segment(f.offset, f.ambient) -= 2.0 * a * ratio * f.radius * rp.normal;
        }
    }
    return grad;
}

/// Orthonormal basis of the tangent space at p (ambient × intrinsic).
///
/// Round factors use the trailing columns of the Householder reflection that
/// maps p̂ onto ±e₁, which is deterministic in p.
inline Matrix tangent_basis(const ManifoldSpec& spec, const Vector& p)
{
    check_point(spec, p, "tangent_basis");
    Matrix basis = Matrix::Zero(spec.ambient_dim(), spec.intrinsic_dim());
    for (const auto& f : spec.factors()) {
        if (!f.round) {
            basis.block(f.offset, f.tangent_offset, f.ambient, f.intrinsic).setIdentity();
            continue;
        }
        Vector ph = p.segment(f.offset, f.ambient) / f.radius;
        Vector v = ph;
        v[0] += ph[0] >= 0.0 ? 1.0 : -1.0;
        Matrix H = Matrix::Identity(f.ambient, f.ambient) - 2.0 * v * v.transpose() / v.squaredNorm();
        basis.block(f.offset, f.tangent_offset, f.ambient, f.intrinsic) = H.rightCols(f.intrinsic);
    }
    return basis;
}

} // namespace struct_imitate

#endif // STRUCT_IMITATE_MANIFOLD_HPP
