#include "cbi/scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "cbi/errors.hpp"
#include "cbi/numerics/parallel.hpp"

namespace cbi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using cplx = std::complex<double>;
using detail::require;

bool bounded_variation(const BranchingMechanism& bran) {
    return bran.alpha == 0.0 && (!bran.mu || bran.mu->finite_variation());
}

void require_scale_regime(const BranchingMechanism& bran) {
    require(!is_zero(bran), "scale function: R is identically zero");
    require(R_slope_at_zero(bran) <= 0.0, "scale function: supercritical mechanism (R'(0+) > 0)");
}

// Transforms of W and of W' (as a density on (0, inf)): -1/R(u) and
// -u/R(u) - W(0).  With bounded variation R(u) = -lambda0 u + Phi(u), and the
// second is rewritten as Phi / (lambda0 (lambda0 u - Phi)) to avoid cancellation.
struct Transforms {
    const BranchingMechanism* bran;
    double lambda0;
    bool bv;

    double W(double u) const { return -1.0 / eval_R(*bran, u); }
    cplx W(cplx u) const { return -1.0 / eval_R(*bran, u); }

    template <class T>
    T D(T u) const {
        if (bv) {
            const T phi = bran->mu ? bran->mu->laplace_increment(u) : T(0.0);
            return phi / (lambda0 * (lambda0 * u - phi));
        }
        return -u / eval_R(*bran, u);
    }
};

inversion::Result invert_at(const Transforms& tr, bool derivative, bool analytic, double x,
                            const inversion::Options& opts, double floor) {
    std::optional<inversion::ComplexTransform> fc;
    if (analytic) {
        if (derivative)
            fc = [tr](cplx u) { return tr.D(u); };
        else
            fc = [tr](cplx u) { return tr.W(u); };
    }
    if (derivative) return inversion::invert([&](double u) { return tr.D(u); }, fc, x, opts, floor);
    return inversion::invert([&](double u) { return tr.W(u); }, fc, x, opts, floor);
}

bool renewal_supported(const BranchingMechanism& bran) {
    if (!bran.mu) return true;
    const auto& fam = bran.mu->family();
    if (std::holds_alternative<FiniteAtoms>(fam)) return true;
    const auto* tab = std::get_if<TabulatedTail>(&fam);
    return tab && tab->extrapolation == TailExtrapolation::None;
}

// W on the uniform renewal grid, piecewise linear, with its running integral.
struct UniformW {
    double h = 0.0;
    std::vector<double> w, cum;

    std::pair<std::size_t, double> locate(double y) const {
        const std::size_t last = w.size() - 2;
        const double s = std::max(y, 0.0) / h;
        const std::size_t j = std::min(static_cast<std::size_t>(s), last);
        return {j, std::min(s - double(j), 1.0)};
    }
    double value(double y) const {
        const auto [j, t] = locate(y);
        return w[j] + t * (w[j + 1] - w[j]);
    }
    double integral(double y) const {
        const auto [j, t] = locate(y);
        return cum[j] + h * t * (w[j] + 0.5 * t * (w[j + 1] - w[j]));
    }
};

// int_(0,x] W(x - xi) mu(dxi) for atoms or a compact tabulated tail.
double convolve(const LevyMeasure& mu, const UniformW& W, double x) {
    if (const auto* a = std::get_if<FiniteAtoms>(&mu.family())) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a->weights.size(); ++i)
            if (a->locations[i] <= x) acc += a->weights[i] * W.value(x - a->locations[i]);
        return acc;
    }
    const auto& f = std::get<TabulatedTail>(mu.family());
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < f.x.size() && f.x[j] < x; ++j) {
        const double density = (f.tail[j] - f.tail[j + 1]) / (f.x[j + 1] - f.x[j]);
        const double top = std::min(f.x[j + 1], x);
        acc += density * (W.integral(x - f.x[j]) - W.integral(x - top));
    }
    return acc;
}

// Solves alpha W' + kappa W = 1 + int_0^x mubar(s) W(x - s) ds, kappa = -beta +
// int_(0,1] xi mu(dxi), on a uniform grid: exact cell masses of mubar against
// cell averages of W, trapezoid in x when alpha > 0.  Second order also across
// the kinks of W' that atoms and density jumps produce.
void solve_renewal(const BranchingMechanism& bran, double xmax, std::size_t cells, double slope0,
                   std::vector<double>& x, std::vector<double>& w, std::vector<double>& d) {
    const std::size_t m = cells;
    const double h = xmax / double(m);
    const double alpha = bran.alpha;
    const LevyMeasure* mu = bran.mu ? &*bran.mu : nullptr;
    const double kappa = (mu ? mu->first_moment(0.0, 1.0) : 0.0) - bran.beta;
    auto cumulative_tail = [&](double s) { return mu ? mu->first_moment(0.0, s) + s * mu->tail(s) : 0.0; };

    std::vector<double> c(m + 1, 0.0);
    double prev = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double next = cumulative_tail(double(k) * h);
        c[k] = next - prev;
        prev = next;
    }

    UniformW W{h, std::vector<double>(m + 1), std::vector<double>(m + 1, 0.0)};
    std::vector<double> D(m + 1), avg(m, 0.0);
    W.w[0] = alpha > 0.0 ? 0.0 : 1.0 / kappa;
    D[0] = slope0;
    for (std::size_t n = 1; n <= m; ++n) {
        double rest = 0.0;
        for (std::size_t k = 2; k <= n; ++k) rest += c[k] * avg[n - k];
        const double known = 1.0 + rest + 0.5 * c[1] * W.w[n - 1];
        if (alpha > 0.0) {
            const double g = 0.5 * h / alpha;
            W.w[n] = (W.w[n - 1] + 0.5 * h * D[n - 1] + g * known) / (1.0 - g * (0.5 * c[1] - kappa));
            D[n] = (known + (0.5 * c[1] - kappa) * W.w[n]) / alpha;
        } else {
            W.w[n] = known / (kappa - 0.5 * c[1]);
        }
        avg[n - 1] = 0.5 * (W.w[n - 1] + W.w[n]);
        W.cum[n] = W.cum[n - 1] + h * avg[n - 1];
    }
    if (alpha == 0.0) {
        // kappa W'(x) = mu(0, inf) W(x) - int_(0,x] W(x - xi) mu(dxi)
        const double mass = mu ? mu->total_mass() : 0.0;
        for (std::size_t n = 1; n <= m; ++n) {
            const double xn = double(n) * h;
            D[n] = (mass * W.w[n] - (mu ? convolve(*mu, W, xn) : 0.0)) / kappa;
        }
    }

    // geometric nodes inside the first cell from the cubic through both ends
    const std::size_t below = 64;
    const double lx0 = std::log(x.front()), lh = std::log(h);
    std::vector<double> nx, nw, nd;
    for (std::size_t i = 0; i < below && x.front() < h; ++i) {
        const double xi = std::exp(lx0 + (lh - lx0) * double(i) / double(below));
        const double t = xi / h, t2 = t * t, t3 = t2 * t;
        nx.push_back(xi);
        nw.push_back((2 * t3 - 3 * t2 + 1) * W.w[0] + (t3 - 2 * t2 + t) * h * D[0] + (-2 * t3 + 3 * t2) * W.w[1] +
                     (t3 - t2) * h * D[1]);
        nd.push_back(((6 * t2 - 6 * t) * (W.w[0] - W.w[1])) / h + (3 * t2 - 4 * t + 1) * D[0] +
                     (3 * t2 - 2 * t) * D[1]);
    }
    for (std::size_t n = 1; n <= m; ++n) {
        nx.push_back(double(n) * h);
        nw.push_back(W.w[n]);
        nd.push_back(D[n]);
    }
    nx.back() = xmax;
    x = std::move(nx);
    w = std::move(nw);
    d = std::move(nd);
}

}  // namespace

std::string to_string(ScaleFunction::Provenance p) {
    switch (p) {
        case ScaleFunction::Provenance::ClosedFormOU:
            return "closed-form (OU)";
        case ScaleFunction::Provenance::ClosedFormBrownian:
            return "closed-form (Brownian with drift)";
        case ScaleFunction::Provenance::NumericInversion:
            return "numeric inversion";
        case ScaleFunction::Provenance::NumericRenewal:
            return "numeric renewal equation";
    }
    return "?";
}

double effective_drift(const BranchingMechanism& bran) {
    require_scale_regime(bran);
    if (!bounded_variation(bran)) return kInf;
    const double lambda0 = (bran.mu ? bran.mu->first_moment(0.0, 1.0) : 0.0) - bran.beta;
    if (!(lambda0 > 0.0)) throw NumericError("effective_drift: lambda0 <= 0 for a non-supercritical mechanism");
    return lambda0;
}

double scale_slope_at_zero(const BranchingMechanism& bran) {
    if (bran.alpha > 0.0) return 1.0 / bran.alpha;
    if (!bounded_variation(bran)) return kInf;
    const double l0 = effective_drift(bran);
    return (bran.mu ? bran.mu->total_mass() : 0.0) / (l0 * l0);
}

ScaleFunction build_scale(const BranchingMechanism& bran, double xmax) {
    ScaleOptions opts;
    opts.xmax = xmax;
    return build_scale(bran, opts);
}

ScaleFunction build_scale(const BranchingMechanism& bran, const ScaleOptions& opts) {
    require_scale_regime(bran);
    require(opts.xmax > 0.0 && opts.nodes >= 4 && opts.min_ratio > 0.0 && opts.min_ratio < 1.0,
            "build_scale: invalid grid options");
    ScaleFunction sf(bran);
    sf.lambda0_ = effective_drift(bran);
    sf.w0_ = std::isinf(sf.lambda0_) ? 0.0 : 1.0 / sf.lambda0_;
    sf.slope0_ = scale_slope_at_zero(bran);
    sf.inv_opts_ = opts.inversion;

    if (!bran.mu && !opts.force_numeric) {
        sf.provenance_ = bran.alpha == 0.0 ? ScaleFunction::Provenance::ClosedFormOU
                                           : ScaleFunction::Provenance::ClosedFormBrownian;
        sf.xmax_ = kInf;
        return sf;
    }

    sf.xmax_ = opts.xmax;
    sf.rho_ = R_slope_at_zero(bran);
    const std::size_t n = opts.nodes;
    std::vector<double> x(n), w(n), d(n);
    const double lx0 = std::log(opts.xmax * opts.min_ratio), lx1 = std::log(opts.xmax);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(lx0 + (lx1 - lx0) * double(i) / double(n - 1));
    x.back() = opts.xmax;

    const bool renewal = opts.method == ScaleMethod::Renewal ||
                         (opts.method == ScaleMethod::Auto && bran.mu && renewal_supported(bran));
    if (renewal) {
        require(renewal_supported(bran), "build_scale: the renewal solver needs atoms or a compact tabulated mu");
        require(opts.renewal_cells >= 16, "build_scale: renewal_cells must be >= 16");
        sf.provenance_ = ScaleFunction::Provenance::NumericRenewal;
        x.resize(1);
        solve_renewal(bran, opts.xmax, opts.renewal_cells, sf.slope0_, x, w, d);
    } else {
        sf.provenance_ = ScaleFunction::Provenance::NumericInversion;
        const Transforms tr{&sf.bran_, sf.lambda0_, bounded_variation(bran)};
        const bool analytic = has_analytic_continuation(bran);
        auto run = [&](auto&& fn) {
            if (opts.parallel)
                parallel::for_each_index(n, fn);
            else
                for (std::size_t i = 0; i < n; ++i) fn(i);
        };
        run([&](std::size_t i) { w[i] = invert_at(tr, false, analytic, x[i], opts.inversion, 1e-10).value; });
        const double d_floor = 1e-6 * std::max(w.back(), sf.w0_) / opts.xmax;
        run([&](std::size_t i) { d[i] = invert_at(tr, true, analytic, x[i], opts.inversion, d_floor).value; });
    }

    // W is nondecreasing from W(0); the inversion noise is ~1e-5 relative.
    double running = sf.w0_;
    for (std::size_t i = 0; i < x.size(); ++i) {
        w[i] = std::max(w[i], running);
        running = w[i];
        d[i] = std::max(d[i], 0.0);
    }
    sf.interp_ = std::make_shared<const interp::MonotoneHermite>(std::move(x), std::move(w), std::move(d));
    return sf;
}

double ScaleFunction::invert_value(double x) const {
    const Transforms tr{&bran_, lambda0_, bounded_variation(bran_)};
    return std::max(w0_, invert_at(tr, false, has_analytic_continuation(bran_), x, inv_opts_, 1e-10).value);
}

double ScaleFunction::invert_derivative(double x) const {
    const Transforms tr{&bran_, lambda0_, bounded_variation(bran_)};
    const double floor = 1e-6 * std::max(value(x), w0_) / std::max(x, 1.0);
    return std::max(0.0, invert_at(tr, true, has_analytic_continuation(bran_), x, inv_opts_, floor).value);
}

// Past the renewal grid: linear continuation, capped at W(inf) = 1/|rho|.
double ScaleFunction::beyond_grid(double x, bool derivative) const {
    const double w = interp_->values().back(), d = interp_->slopes().back();
    const double cap = rho_ < 0.0 ? std::max(-1.0 / rho_, w) : kInf;
    const double linear = w + d * (x - xmax_);
    if (derivative) return linear < cap ? d : 0.0;
    return std::min(linear, cap);
}

double ScaleFunction::value(double x) const {
    if (x < 0.0) return 0.0;
    switch (provenance_) {
        case Provenance::ClosedFormOU:
            return w0_;
        case Provenance::ClosedFormBrownian: {
            const double a = bran_.alpha, b = bran_.beta;
            if (b == 0.0) return x / a;
            return std::expm1(x * b / a) / b;
        }
        case Provenance::NumericInversion:
        case Provenance::NumericRenewal:
            break;
    }
    if (x == 0.0) return w0_;
    const double x0 = interp_->front_x();
    if (x < x0) {
        const double y0 = interp_->values()[0];
        if (w0_ > 0.0) return w0_ + (y0 - w0_) * x / x0;
        const double p = std::max(x0 * interp_->slopes()[0] / y0, 1e-12);
        return y0 * std::pow(x / x0, p);
    }
    if (x <= xmax_) return interp_->value(x);
    if (provenance_ == Provenance::NumericRenewal) return beyond_grid(x, false);
    return std::max(invert_value(x), interp_->values().back());
}

double ScaleFunction::derivative(double x) const {
    require(x >= 0.0, "ScaleFunction::derivative: x must be >= 0");
    if (x == 0.0) return slope0_;
    switch (provenance_) {
        case Provenance::ClosedFormOU:
            return 0.0;
        case Provenance::ClosedFormBrownian:
            return std::exp(x * bran_.beta / bran_.alpha) / bran_.alpha;
        case Provenance::NumericInversion:
        case Provenance::NumericRenewal:
            break;
    }
    const double x0 = interp_->front_x();
    if (x < x0) {
        const double y0 = interp_->values()[0];
        if (w0_ > 0.0) return (y0 - w0_) / x0;
        const double p = std::max(x0 * interp_->slopes()[0] / y0, 1e-12);
        return p * value(x) / x;
    }
    if (x <= xmax_) return interp_->derivative(x);
    if (provenance_ == Provenance::NumericRenewal) return beyond_grid(x, true);
    return invert_derivative(x);
}

double excursion_height_intensity(const ScaleFunction& sf, double x) {
    require(x > 0.0, "excursion_height_intensity: x must be > 0");
    return sf.derivative(x) / sf.value(x);
}

}  // namespace cbi
