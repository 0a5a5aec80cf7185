#pragma once

// Circles and lines in the plane as 3-tuples (a, b, c) describing the point
// set a (x.x) + b.x + c = 0. Circles are kept with a = 1, lines have a = 0.
// Intersections go through the radical line and the orthogonal circle (the
// smallest circle through both intersection points) rather than through
// centers and radii, which keeps them accurate for very large or very small
// circles.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

#include "circlepf/netmodel.hpp"

namespace circlepf {

struct PlanePoint {
    double x = 0.0;
    double y = 0.0;

    friend PlanePoint operator+(PlanePoint p, PlanePoint q) { return {p.x + q.x, p.y + q.y}; }
    friend PlanePoint operator-(PlanePoint p, PlanePoint q) { return {p.x - q.x, p.y - q.y}; }
    friend PlanePoint operator*(double s, PlanePoint p) { return {s * p.x, s * p.y}; }
    friend bool operator==(PlanePoint, PlanePoint) = default;
};

inline double dot(PlanePoint p, PlanePoint q) { return p.x * q.x + p.y * q.y; }
inline double norm_sq(PlanePoint p) { return dot(p, p); }
inline double norm(PlanePoint p) { return std::hypot(p.x, p.y); }

// Quarter turn counter-clockwise, [[0, -1], [1, 0]].
inline PlanePoint quarter_turn(PlanePoint p) { return {-p.y, p.x}; }

struct CircleTuple {
    double a = 1.0;
    PlanePoint b{};
    double c = 0.0;

    bool is_line() const noexcept { return a == 0.0; }

    // a (p.p) + b.p + c
    double evaluate(PlanePoint p) const { return a * norm_sq(p) + dot(b, p) + c; }

    CircleTuple scaled(double k) const { return {k * a, k * b, k * c}; }

    // Same point set with a = 1 (circles) or |b| = 1 (lines).
    CircleTuple normalized() const;

    friend bool operator==(const CircleTuple&, const CircleTuple&) = default;
};

struct CenterRadius {
    PlanePoint center;
    double radius_sq = 0.0;
};

// |a p.p + b.p + c| of the normalized tuple, relative to max(1, |b|, |c|).
double membership_residual(const CircleTuple& circle, PlanePoint p);

// Throws NotACircle for lines.
CenterRadius tuple_center_radius(const CircleTuple& circle);

bool is_real_circle(const CircleTuple& circle);

// A tuple whose |a| is below this fraction of |b| is treated as a line.
inline constexpr double kLineRatio = 1e-9;

// Active power drawn p_d as a tuple (1, [t2/t1, t3/t1], -p_d/t1). A bus with
// no conductance to anything (t1 = 0) yields the line t2 v_r + t3 v_i = p_d.
CircleTuple real_power_circle(const TCoefficients& t, double p_drawn);

// Reactive power drawn q_d as (1, [-t3/t4, t2/t4], -q_d/t4); line when t4 = 0.
CircleTuple reactive_power_circle(const TCoefficients& t, double q_drawn);

// |v| = v_ref
CircleTuple voltage_circle(double v_ref);

// C1 - C2 for circles with a = 1. Throws CoincidentCircles when the tuples agree.
CircleTuple radical_line(const CircleTuple& c1, const CircleTuple& c2);

// Member of the pencil of C1, C2 whose diameter is their common chord.
// Throws CoincidentCenters for concentric inputs.
CircleTuple orthogonal_circle(const CircleTuple& c1, const CircleTuple& c2);

// Same point set in coordinates p' = p - origin.
CircleTuple shifted(const CircleTuple& circle, PlanePoint origin);
// Centre of the smaller of two circles (a = 1).
PlanePoint local_origin(const CircleTuple& c1, const CircleTuple& c2);

enum class IntersectionKind { TwoPoints, Tangent, NoIntersection };

const char* to_string(IntersectionKind kind);

struct IntersectionResult {
    IntersectionKind kind = IntersectionKind::NoIntersection;
    std::array<PlanePoint, 2> storage{};
    std::size_t count = 0;

    std::span<const PlanePoint> points() const { return {storage.data(), count}; }
};

// Absolute tolerance on the orthogonal circle's radius^2 separating tangent
// from disjoint inputs.
inline constexpr double kTangentTolerance = 1e-11;
// Intersection points closer than this are merged into one tangent point.
inline constexpr double kMinChord = 1e-9;

// Both inputs are normalized circles (a = 1).
IntersectionResult intersect_circles(const CircleTuple& c1, const CircleTuple& c2);

// Accepts any pair of tuples where at most one is a line; lines are
// intersected through the pencil member centred on the line.
IntersectionResult intersect_tuples(const CircleTuple& t1, const CircleTuple& t2);

// Higher voltage magnitude wins; equal magnitudes prefer larger x, then larger y.
// Throws NoSolution for NoIntersection.
PlanePoint choose_pq_solution(const IntersectionResult& res);

// Smallest |angle| wins; equal angles prefer positive y.
PlanePoint choose_pv_solution(const IntersectionResult& res);

}  // namespace circlepf
