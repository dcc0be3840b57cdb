#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace usm {

// Real interval with extended-real endpoints. Infinite endpoints are open.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_closed = false;
    bool hi_closed = false;

    Interval() = default;
    Interval(double l, double h, bool lc = false, bool hc = false)
        : lo(l), hi(h), lo_closed(lc && std::isfinite(l)), hi_closed(hc && std::isfinite(h)) {}

    static Interval all() { return Interval(); }
    static Interval open(double l, double h) { return Interval(l, h, false, false); }
    static Interval closed(double l, double h) { return Interval(l, h, true, true); }

    bool empty() const {
        if (lo > hi) return true;
        if (lo == hi) return !(lo_closed && hi_closed);
        return false;
    }
    double width() const { return hi - lo; }
    bool lo_infinite() const { return std::isinf(lo); }
    bool hi_infinite() const { return std::isinf(hi); }

    bool contains(double x) const {
        if (x < lo || x > hi) return false;
        if (x == lo && !lo_closed) return false;
        if (x == hi && !hi_closed) return false;
        return true;
    }
    bool contains(const Interval& o) const {
        if (o.empty()) return true;
        if (o.lo < lo || (o.lo == lo && o.lo_closed && !lo_closed)) return false;
        if (o.hi > hi || (o.hi == hi && o.hi_closed && !hi_closed)) return false;
        return true;
    }

    Interval intersect(const Interval& o) const {
        Interval r;
        if (lo > o.lo) { r.lo = lo; r.lo_closed = lo_closed; }
        else if (lo < o.lo) { r.lo = o.lo; r.lo_closed = o.lo_closed; }
        else { r.lo = lo; r.lo_closed = lo_closed && o.lo_closed; }
        if (hi < o.hi) { r.hi = hi; r.hi_closed = hi_closed; }
        else if (hi > o.hi) { r.hi = o.hi; r.hi_closed = o.hi_closed; }
        else { r.hi = hi; r.hi_closed = hi_closed && o.hi_closed; }
        return r;
    }

    std::string to_string() const;
};

} // namespace usm
