#include "ace/domain.hpp"

namespace ace {

Design Design::append_run_copy(std::size_t k) const {
    if (k >= n_) throw std::invalid_argument("append_run_copy: run index out of range");
    std::vector<double> delta((n_ + 1) * v_);
    for (std::size_t j = 0; j < v_; ++j) {
        for (std::size_t r = 0; r < n_; ++r) delta[j * (n_ + 1) + r] = delta_[j * n_ + r];
        delta[j * (n_ + 1) + n_] = delta_[j * n_ + k];
    }
    return Design(n_ + 1, v_, std::move(delta));
}

Design Design::remove_run(std::size_t h) const {
    if (h >= n_ || n_ < 2) throw std::invalid_argument("remove_run: run index out of range");
    std::vector<double> delta((n_ - 1) * v_);
    for (std::size_t j = 0; j < v_; ++j) {
        std::size_t out = 0;
        for (std::size_t r = 0; r < n_; ++r) {
            if (r == h) continue;
            delta[j * (n_ - 1) + out++] = delta_[j * n_ + r];
        }
    }
    return Design(n_ - 1, v_, std::move(delta));
}

DesignSpace DesignSpace::homogeneous(std::size_t n, std::size_t v,
                                     std::span<const CoordinateDomain> column_domains,
                                     CoordinateConstraint constraint) {
    if (column_domains.size() != v) {
        throw std::invalid_argument("DesignSpace::homogeneous: need one domain per column");
    }
    DesignSpace space;
    space.n = n;
    space.v = v;
    space.domains.reserve(n * v);
    for (std::size_t j = 0; j < v; ++j) {
        for (std::size_t k = 0; k < n; ++k) space.domains.push_back(column_domains[j]);
    }
    space.constraint = std::move(constraint);
    space.validate();
    return space;
}

bool DesignSpace::design_feasible(const Design& design) const {
    const bool nominal = design.n_runs() == n;
    for (std::size_t i = 0; i < design.q(); ++i) {
        const CoordinateDomain& dom =
            nominal ? domains[i] : column_domain(i / design.n_runs());
        if (!dom.contains(design.coord(i))) return false;
    }
    if (constraint && nominal) {
        for (std::size_t i = 0; i < design.q(); ++i) {
            if (!constraint(i, design.coord(i), design)) return false;
        }
    }
    return true;
}

} // namespace ace
