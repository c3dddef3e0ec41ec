#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ace {

// Domain of a single design coordinate: an interval, optionally restricted
// to a finite set of levels inside it.
struct CoordinateDomain {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> levels;  // empty means continuous

    bool continuous() const noexcept { return levels.empty(); }

    bool contains(double x) const noexcept {
        if (!(x >= lo && x <= hi)) return false;
        if (continuous()) return true;
        for (double level : levels) {
            if (level == x) return true;
        }
        return false;
    }
};

// An n x v design stored as the column-major vec of its design matrix:
// delta[j*n + k] holds variable j of run k.
class Design {
public:
    Design() = default;
    Design(std::size_t n, std::size_t v, std::vector<double> delta)
        : n_(n), v_(v), delta_(std::move(delta)) {
        if (delta_.size() != n_ * v_) {
            throw std::invalid_argument("Design: coordinate count must equal n*v");
        }
    }

    std::size_t n_runs() const noexcept { return n_; }
    std::size_t n_vars() const noexcept { return v_; }
    std::size_t q() const noexcept { return delta_.size(); }

    double coord(std::size_t i) const noexcept { return delta_[i]; }
    void set_coord(std::size_t i, double value) noexcept { delta_[i] = value; }

    double run_value(std::size_t run, std::size_t var) const noexcept {
        return delta_[var * n_ + run];
    }

    std::span<const double> coords() const noexcept { return delta_; }

    /// Column `var` as a contiguous span.
    std::span<const double> column(std::size_t var) const noexcept {
        return std::span<const double>(delta_).subspan(var * n_, n_);
    }

    Design with_coord(std::size_t i, double value) const {
        Design copy = *this;
        copy.delta_[i] = value;
        return copy;
    }

    /// Append a copy of run k (n+1 runs).
    Design append_run_copy(std::size_t k) const;

    /// Remove run h (n-1 runs).
    Design remove_run(std::size_t h) const;

    friend bool operator==(const Design& a, const Design& b) {
        return a.n_ == b.n_ && a.v_ == b.v_ && a.delta_ == b.delta_;
    }

private:
    std::size_t n_ = 0;
    std::size_t v_ = 0;
    std::vector<double> delta_;
};

// Would setting coordinate `i` of `current` to `value` keep the design
// feasible? Evaluated against the other coordinates, so constraints may
// couple coordinates (e.g. minimum spacing).
using CoordinateConstraint =
    std::function<bool(std::size_t i, double value, const Design& current)>;

struct DesignSpace {
    std::size_t n = 1;
    std::size_t v = 1;
    std::vector<CoordinateDomain> domains;  // one per coordinate, size n*v
    CoordinateConstraint constraint;        // optional

    std::size_t q() const noexcept { return n * v; }

    void validate() const {
        if (n < 1 || v < 1) throw std::invalid_argument("DesignSpace: n, v must be positive");
        if (domains.size() != q()) {
            throw std::invalid_argument("DesignSpace: need one domain per coordinate");
        }
    }

    /// Same interval for every coordinate of a column.
    static DesignSpace homogeneous(std::size_t n, std::size_t v,
                                   std::span<const CoordinateDomain> column_domains,
                                   CoordinateConstraint constraint = {});

    /// Domain for variable `var`, valid for designs whose run count differs
    /// from n (transient Phase-II designs); requires column-homogeneous
    /// domains.
    const CoordinateDomain& column_domain(std::size_t var) const { return domains[var * n]; }

    bool coordinate_feasible(std::size_t i, double value, const Design& current) const {
        if (!domains[i].contains(value)) return false;
        return !constraint || constraint(i, value, current);
    }

    /// Every coordinate inside its domain and passing the constraint.
    bool design_feasible(const Design& design) const;
};

} // namespace ace
