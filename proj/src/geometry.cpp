#include "circlepf/geometry.hpp"

#include <algorithm>

#include "circlepf/errors.hpp"

namespace circlepf {

CircleTuple CircleTuple::normalized() const {
    const double bn = norm(b);
    if (a != 0.0 && std::abs(a) > kLineRatio * bn) return scaled(1.0 / a);
    if (bn == 0.0) throw NotACircle("tuple describes neither a circle nor a line");
    return {0.0, (1.0 / bn) * b, c / bn};
}

double membership_residual(const CircleTuple& circle, PlanePoint p) {
    const CircleTuple n = circle.normalized();
    const double scale = std::max({1.0, norm(n.b), std::abs(n.c)});
    return std::abs(n.evaluate(p)) / scale;
}

CenterRadius tuple_center_radius(const CircleTuple& circle) {
    if (circle.a == 0.0) throw NotACircle("tuple with a = 0 is a line");
    const CircleTuple n = circle.scaled(1.0 / circle.a);
    return {-0.5 * n.b, norm_sq(n.b) / 4.0 - n.c};
}

bool is_real_circle(const CircleTuple& circle) {
    if (circle.a == 0.0) return norm_sq(circle.b) > 0.0;
    return tuple_center_radius(circle).radius_sq >= 0.0;
}

namespace {

// Degenerate power curve: the quadratic coefficient vanished.
CircleTuple line_or_circle(double a, PlanePoint b, double c) {
    return CircleTuple{a, b, c}.normalized();
}

}  // namespace

CircleTuple real_power_circle(const TCoefficients& t, double p_drawn) {
    // p = t1 |v|^2 + t2 v_r + t3 v_i  <=>  t1 |v|^2 + t2 v_r + t3 v_i - p = 0
    return line_or_circle(t.t1, {t.t2, t.t3}, -p_drawn);
}

CircleTuple reactive_power_circle(const TCoefficients& t, double q_drawn) {
    return line_or_circle(t.t4, {-t.t3, t.t2}, -q_drawn);
}

CircleTuple voltage_circle(double v_ref) { return {1.0, {0.0, 0.0}, -v_ref * v_ref}; }

CircleTuple radical_line(const CircleTuple& c1, const CircleTuple& c2) {
    const PlanePoint db = c1.b - c2.b;
    const double dc = c1.c - c2.c;
    if (std::abs(db.x) <= 1e-14 && std::abs(db.y) <= 1e-14 && std::abs(dc) <= 1e-14) {
        throw CoincidentCircles("radical line of coincident circles is undefined");
    }
    return {0.0, db, dc};
}

CircleTuple orthogonal_circle(const CircleTuple& c1, const CircleTuple& c2) {
    const PlanePoint db = c2.b - c1.b;
    const double db_sq = norm_sq(db);
    if (db_sq < 1e-24) throw CoincidentCenters("orthogonal circle of concentric circles");
    // k_i^2 = |b_i|^2 - 4 a_i c_i; the difference is expanded as
    // (b1 - b2).(b1 + b2) - 4 (c1 - c2) so it does not cancel for large |b|.
    const double k_diff = -dot(db, c1.b + c2.b) - 4.0 * (c1.a * c1.c - c2.a * c2.c);
    const double m = k_diff / (2.0 * db_sq);
    return {1.0, 0.5 * (c1.b + c2.b) + m * db, 0.5 * (c1.c + c2.c) + m * (c2.c - c1.c)};
}

const char* to_string(IntersectionKind kind) {
    switch (kind) {
        case IntersectionKind::TwoPoints: return "TwoPoints";
        case IntersectionKind::Tangent: return "Tangent";
        case IntersectionKind::NoIntersection: return "NoIntersection";
    }
    return "?";
}

namespace {

// Points of `ortho` along the chord direction perpendicular to `axis`.
IntersectionResult chord_points(const CircleTuple& ortho, PlanePoint axis) {
    const auto [center, radius_sq] = tuple_center_radius(ortho);
    IntersectionResult res;
    if (radius_sq < -kTangentTolerance) return res;
    const double radius = radius_sq > 0.0 ? std::sqrt(radius_sq) : 0.0;
    if (radius_sq <= kTangentTolerance || 2.0 * radius < kMinChord) {
        res.kind = IntersectionKind::Tangent;
        res.storage[0] = center;
        res.count = 1;
        return res;
    }
    const PlanePoint chord = (radius / norm(axis)) * quarter_turn(axis);
    res.kind = IntersectionKind::TwoPoints;
    res.storage = {center + chord, center - chord};
    res.count = 2;
    return res;
}

}  // namespace

CircleTuple shifted(const CircleTuple& circle, PlanePoint origin) {
    return {circle.a, circle.b + 2.0 * circle.a * origin, circle.evaluate(origin)};
}

PlanePoint local_origin(const CircleTuple& c1, const CircleTuple& c2) {
    const double k1 = norm_sq(c1.b) - 4.0 * c1.c;
    const double k2 = norm_sq(c2.b) - 4.0 * c2.c;
    return -0.5 * (k1 <= k2 ? c1.b : c2.b);
}

IntersectionResult intersect_circles(const CircleTuple& c1, const CircleTuple& c2) {
    const CircleTuple line = radical_line(c1, c2);
    if (norm_sq(line.b) < 1e-24) return {};  // concentric, distinct
    if (!is_real_circle(c1) || !is_real_circle(c2)) return {};
    // Work around the centre of the smaller circle: otherwise a tiny circle
    // next to a large one loses its chord in the cancellation of c.
    const PlanePoint origin = local_origin(c1, c2);
    const CircleTuple s1 = shifted(c1, origin), s2 = shifted(c2, origin);
    IntersectionResult res = chord_points(orthogonal_circle(s1, s2), radical_line(s1, s2).b);
    for (std::size_t i = 0; i < res.count; ++i) res.storage[i] = res.storage[i] + origin;
    return res;
}

IntersectionResult intersect_tuples(const CircleTuple& t1, const CircleTuple& t2) {
    const CircleTuple n1 = t1.normalized();
    const CircleTuple n2 = t2.normalized();
    if (!n1.is_line() && !n2.is_line()) return intersect_circles(n1, n2);
    if (n1.is_line() && n2.is_line()) throw NotACircle("intersection of two lines is not supported");

    const CircleTuple& line = n1.is_line() ? n1 : n2;
    const CircleTuple& circle = n1.is_line() ? n2 : n1;
    if (!is_real_circle(circle)) return {};
    // Pencil member circle + s * line with its centre -b/2 on the line.
    const double s = (2.0 * line.c - dot(line.b, circle.b)) / norm_sq(line.b);
    const CircleTuple ortho{1.0, circle.b + s * line.b, circle.c + s * line.c};
    return chord_points(ortho, line.b);
}

PlanePoint choose_pq_solution(const IntersectionResult& res) {
    if (res.kind == IntersectionKind::NoIntersection || res.count == 0) {
        throw NoSolution("circles do not intersect");
    }
    if (res.count == 1) return res.storage[0];
    const PlanePoint p = res.storage[0];
    const PlanePoint q = res.storage[1];
    const double np = norm_sq(p);
    const double nq = norm_sq(q);
    if (std::abs(np - nq) > 1e-12 * std::max(1.0, std::max(np, nq))) return np > nq ? p : q;
    if (p.x != q.x) return p.x > q.x ? p : q;
    return p.y >= q.y ? p : q;
}

PlanePoint choose_pv_solution(const IntersectionResult& res) {
    if (res.kind == IntersectionKind::NoIntersection || res.count == 0) {
        throw NoSolution("circles do not intersect");
    }
    if (res.count == 1) return res.storage[0];
    const PlanePoint p = res.storage[0];
    const PlanePoint q = res.storage[1];
    const double ap = std::abs(std::atan2(p.y, p.x));
    const double aq = std::abs(std::atan2(q.y, q.x));
    if (std::abs(ap - aq) > 1e-12) return ap < aq ? p : q;
    return p.y >= q.y ? p : q;
}

}  // namespace circlepf
