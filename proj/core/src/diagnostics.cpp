#include "cpals/diagnostics.hpp"

#include "cpals/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cpals {

std::string_view to_string(Phase phase) {
    return phase == Phase::reduced ? "reduced" : "regular";
}

namespace {

std::vector<double> column(const std::vector<IterationRecord>& records,
                           std::optional<double> IterationRecord::*field, const char* name) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        if (!(rec.*field)) throw std::logic_error(std::string("trace record lacks ") + name);
        out.push_back(*(rec.*field));
    }
    return out;
}

// Plain loop so that dot(u, v) and dot(v, u) round identically.
double dot(const Vector& u, const Vector& v) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) sum += u(i) * v(i);
    return sum;
}

void check_pair(const KruskalModel& model, const KruskalModel& truth) {
    if (model.order() != truth.order() || model.rank() != truth.rank() ||
        model.shape() != truth.shape())
        throw DimensionError("model and ground truth differ in shape or rank");
}

}  // namespace

std::vector<double> ConvergenceTrace::epsilons() const {
    return column(records, &IterationRecord::epsilon, "epsilon");
}

std::vector<double> ConvergenceTrace::weight_errors() const {
    return column(records, &IterationRecord::weight_error, "weight_error");
}

std::vector<double> ConvergenceTrace::relative_errors() const {
    std::vector<double> out;
    for (const auto& rec : records) out.push_back(rec.relative_error);
    return out;
}

double sin_angle(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) {
    if (u.size() != v.size()) throw DimensionError("sin_angle: length mismatch");
    const double nu = u.norm();
    const double nv = v.norm();
    if (!(nu > 0.0) || !(nv > 0.0)) throw DegenerateComponentError(0);
    const Vector uh = u / nu;
    const Vector vh = v / nv;
    // Equal spans give rounding-level residuals; report them as exactly 0.
    if (uh == vh || uh == -vh) return 0.0;
    const double c = dot(uh, vh);
    // Both residuals equal |sin| exactly in real arithmetic; averaging them
    // makes the result symmetric in (u, v) and invariant under u -> -u.
    const double s = 0.5 * ((uh - c * vh).norm() + (vh - c * uh).norm());
    return std::min(s, 1.0);
}

std::vector<std::size_t> component_pairing(const KruskalModel& model, const KruskalModel& truth,
                                           Pairing pairing) {
    check_pair(model, truth);
    const std::size_t rank = truth.rank();
    std::vector<std::size_t> match(rank);
    if (pairing == Pairing::identity) {
        for (std::size_t r = 0; r < rank; ++r) match[r] = r;
        return match;
    }

    const auto R = static_cast<Eigen::Index>(rank);
    Matrix cosines = Matrix::Zero(R, R);  // (truth r, model s)
    for (std::size_t n = 0; n < truth.order(); ++n) {
        const Matrix& a = truth.factors[n];
        const Matrix& b = model.factors[n];
        const Vector na = a.colwise().norm();
        const Vector nb = b.colwise().norm();
        for (Eigen::Index r = 0; r < R; ++r)
            for (Eigen::Index s = 0; s < R; ++s)
                cosines(r, s) += std::abs(a.col(r).dot(b.col(s))) / (na(r) * nb(s));
    }
    cosines /= static_cast<double>(truth.order());

    std::vector<bool> truth_used(rank, false), model_used(rank, false);
    for (std::size_t step = 0; step < rank; ++step) {
        double best = -1.0;
        std::size_t best_r = 0, best_s = 0;
        for (std::size_t r = 0; r < rank; ++r) {
            if (truth_used[r]) continue;
            for (std::size_t s = 0; s < rank; ++s) {
                if (model_used[s]) continue;
                const double c = cosines(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
                if (c > best) {
                    best = c;
                    best_r = r;
                    best_s = s;
                }
            }
        }
        truth_used[best_r] = model_used[best_s] = true;
        match[best_r] = best_s;
    }
    return match;
}

double epsilon_metric(const KruskalModel& model, const KruskalModel& truth, Pairing pairing) {
    const auto match = component_pairing(model, truth, pairing);
    double eps = 0.0;
    for (std::size_t n = 0; n < truth.order(); ++n)
        for (std::size_t r = 0; r < truth.rank(); ++r)
            eps = std::max(eps, sin_angle(model.factors[n].col(static_cast<Eigen::Index>(match[r])),
                                          truth.factors[n].col(static_cast<Eigen::Index>(r))));
    return eps;
}

double weight_error(const KruskalModel& model, const KruskalModel& truth, Pairing pairing) {
    const auto match = component_pairing(model, truth, pairing);
    double err = 0.0;
    for (std::size_t r = 0; r < truth.rank(); ++r) {
        const double w = truth.weights(static_cast<Eigen::Index>(r));
        const double wk = model.weights(static_cast<Eigen::Index>(match[r]));
        err = std::max(err, std::abs(w * w - wk * wk));
    }
    return err;
}

double coherence(const Matrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        if (std::abs(a.col(j).norm() - 1.0) > 1e-8)
            throw PreconditionError("coherence: column " + std::to_string(j) +
                                    " is not unit length");
    double mu = 0.0;
    for (Eigen::Index i = 0; i < a.cols(); ++i)
        for (Eigen::Index j = i + 1; j < a.cols(); ++j)
            mu = std::max(mu, std::abs(a.col(i).dot(a.col(j))));
    return std::min(mu, 1.0);
}

double kappa(const Vector& weights) {
    if (weights.size() == 0) throw DimensionError("kappa: empty weight vector");
    for (Eigen::Index r = 0; r < weights.size(); ++r)
        if (weights(r) == 0.0) throw DegenerateComponentError(static_cast<std::size_t>(r));
    const Vector a = weights.cwiseAbs();
    return a.maxCoeff() / a.minCoeff();
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("loglog_slope: length mismatch");
    if (x.size() < 2) throw InsufficientDataError("loglog_slope needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw InsufficientDataError("loglog_slope needs positive values");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (!(sxx > 0.0)) throw InsufficientDataError("loglog_slope: abscissae are all equal");
    return sxy / sxx;
}

std::vector<std::size_t> pre_saturation_window(std::span<const double> epsilons, double floor) {
    std::vector<std::size_t> window;
    for (std::size_t k = 1; k < epsilons.size(); ++k) {
        if (!(epsilons[k] >= floor)) break;
        window.push_back(k);
    }
    return window;
}

double estimate_order(std::span<const double> epsilons, double floor) {
    const auto window = pre_saturation_window(epsilons, floor);
    if (window.size() < 3)
        throw InsufficientDataError("estimate_order needs three entries above the floor, got " +
                                    std::to_string(window.size()));
    std::vector<double> prev, next;
    for (std::size_t i = 1; i < window.size(); ++i) {
        prev.push_back(epsilons[window[i - 1]]);
        next.push_back(epsilons[window[i]]);
    }
    return loglog_slope(prev, next);
}

std::vector<BoundReport> theorem_bound_check(std::span<const double> epsilons, double kappa_value,
                                             std::size_t rank, std::size_t order) {
    if (order < 2) throw DimensionError("theorem_bound_check: order must be at least 2");
    const double sqrt2 = std::numbers::sqrt2;
    const double R = static_cast<double>(rank);
    const double p = static_cast<double>(order - 1);
    std::vector<BoundReport> reports;
    for (std::size_t k = 1; k < epsilons.size(); ++k) {
        const double prev = epsilons[k - 1];
        BoundReport rep;
        rep.iteration = k;
        rep.hypothesis_holds = R * std::pow(2.0 * sqrt2 * prev, p) <= 1.0 / 3.0;
        rep.lhs = epsilons[k];
        rep.bound = 9.0 * kappa_value * std::sqrt(R) * std::pow(4.0 * sqrt2 * prev, p);
        rep.margin = rep.bound - rep.lhs;
        reports.push_back(rep);
    }
    return reports;
}

std::vector<std::size_t> weight_bound_violations(std::span<const double> epsilons,
                                                 std::span<const double> weight_errors,
                                                 double slack, double floor) {
    if (epsilons.size() != weight_errors.size())
        throw DimensionError("weight_bound_violations: length mismatch");
    if (epsilons.size() < 2 || !(epsilons[0] > 0.0))
        throw InsufficientDataError("weight_bound_violations needs eps_0 > 0 and one step");
    const double c = weight_errors[1] / epsilons[0];
    std::vector<std::size_t> violations;
    for (std::size_t k = 2; k < epsilons.size(); ++k) {
        if (!(epsilons[k - 1] >= floor)) break;
        if (weight_errors[k] > slack * c * epsilons[k - 1]) violations.push_back(k);
    }
    return violations;
}

}  // namespace cpals
