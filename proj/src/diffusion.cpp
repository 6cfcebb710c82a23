#include "mfg/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfg {

namespace {

// Cumulative integral of g from x_anchor, evaluated through a dense
// log-spaced Hermite table so nested quadratures stay cheap.
class CumulativeLogIntegral {
public:
    CumulativeLogIntegral(std::function<double(double)> g, double x_anchor,
                          double x_lo, double x_hi, int n_nodes = 2048)
        : g_(std::move(g)) {
        std::vector<double> t(n_nodes), v(n_nodes);
        const double t_lo = std::log(x_lo), t_hi = std::log(x_hi);
        for (int i = 0; i < n_nodes; ++i)
            t[i] = t_lo + (t_hi - t_lo) * i / (n_nodes - 1);
        // locate anchor node, integrate piecewise
        v[0] = 0.0;
        for (int i = 1; i < n_nodes; ++i)
            v[i] = v[i - 1] +
                   num::integrate(g_, std::exp(t[i - 1]), std::exp(t[i]), 1e-12);
        // shift so the value at x_anchor is zero
        const double ta = std::log(x_anchor);
        double at_anchor;
        {
            // interpolate with a local quadrature from nearest node
            auto it = std::lower_bound(t.begin(), t.end(), ta);
            std::size_t i = (it == t.begin()) ? 0 : (it - t.begin() - 1);
            i = std::min(i, t.size() - 2);
            at_anchor = v[i] + num::integrate(g_, std::exp(t[i]), x_anchor, 1e-12);
        }
        for (auto& y : v) y -= at_anchor;
        table_ = num::Pchip(std::move(t), std::move(v));
        x_lo_ = x_lo;
        x_hi_ = x_hi;
    }

    double operator()(double x) const {
        if (x >= x_lo_ && x <= x_hi_) return table_(std::log(x));
        // rare fall-back outside the cached window
        const double edge = std::clamp(x, x_lo_, x_hi_);
        return table_(std::log(edge)) + num::integrate(g_, edge, x, 1e-12);
    }

private:
    std::function<double(double)> g_;
    num::Pchip table_;
    double x_lo_ = 0, x_hi_ = 0;
};

}  // namespace

double DiffusionModel::vol(double x) const {
    const double s = sigma_(x);
    if (!(s > 0.0) || !std::isfinite(s))
        throw AssumptionError("DiffusionModel: sigma(x) must be positive, x=" +
                              std::to_string(x));
    return s;
}

double DiffusionModel::log_scale_density(double x) const {
    if (x <= 0.0)
        throw AssumptionError("DiffusionModel: state must be positive");
    return log_scale_(x);
}

double DiffusionModel::speed_density(double x) const {
    const double s = vol(x);
    return 2.0 / (s * s) * std::exp(-log_scale_density(x));
}

double DiffusionModel::scale_density_hat(double x) const {
    const double s = vol(x);
    return scale_density(x) / (s * s);
}

double DiffusionModel::speed_density_hat(double x) const {
    return 2.0 * std::exp(-log_scale_density(x));
}

DiffusionModel DiffusionModel::gbm(double delta, double sigma, double x_anchor) {
    if (!(sigma > 0.0) || !(x_anchor > 0.0))
        throw AssumptionError("gbm: need sigma > 0 and x_anchor > 0");
    DiffusionModel m;
    m.kind_ = DiffusionKind::gbm;
    m.x_anchor_ = x_anchor;
    m.delta_ = delta;
    m.sigma_const_ = sigma;
    m.b_ = [delta](double x) { return -delta * x; };
    m.b_prime_ = [delta](double) { return -delta; };
    m.sigma_ = [sigma](double x) { return sigma * x; };
    m.sigma_prime_ = [sigma](double) { return sigma; };
    const double expo = 2.0 * delta / (sigma * sigma);
    m.log_scale_ = [expo, x_anchor](double x) {
        return expo * std::log(x / x_anchor);
    };
    return m;
}

DiffusionModel DiffusionModel::affine(double kappa, double lambda, double sigma,
                                      double x_anchor) {
    if (!(sigma > 0.0) || !(x_anchor > 0.0))
        throw AssumptionError("affine: need sigma > 0 and x_anchor > 0");
    DiffusionModel m;
    m.kind_ = DiffusionKind::affine;
    m.x_anchor_ = x_anchor;
    m.b_ = [kappa, lambda](double x) { return kappa * (lambda - x); };
    m.b_prime_ = [kappa](double) { return -kappa; };
    m.sigma_ = [sigma](double x) { return sigma * x; };
    m.sigma_prime_ = [sigma](double) { return sigma; };
    // -int 2 kappa (lambda - z)/(sigma^2 z^2) dz
    //   = (2 kappa lambda / sigma^2)(1/x - 1/x0) + (2 kappa / sigma^2) log(x/x0)
    const double s2 = sigma * sigma;
    m.log_scale_ = [kappa, lambda, s2, x_anchor](double x) {
        return 2.0 * kappa * lambda / s2 * (1.0 / x - 1.0 / x_anchor) +
               2.0 * kappa / s2 * std::log(x / x_anchor);
    };
    return m;
}

DiffusionModel DiffusionModel::custom(std::vector<double> x, std::vector<double> b,
                                      std::vector<double> b_prime,
                                      std::vector<double> sigma,
                                      std::vector<double> sigma_prime,
                                      double x_anchor) {
    DiffusionModel m;
    m.kind_ = DiffusionKind::custom;
    m.x_anchor_ = x_anchor;
    const double x_lo = x.front(), x_hi = x.back();
    auto bi = std::make_shared<num::Pchip>(x, b);
    auto bpi = std::make_shared<num::Pchip>(x, b_prime);
    auto si = std::make_shared<num::Pchip>(x, sigma);
    auto spi = std::make_shared<num::Pchip>(std::move(x), sigma_prime);
    m.b_ = [bi](double y) { return (*bi)(y); };
    m.b_prime_ = [bpi](double y) { return (*bpi)(y); };
    m.sigma_ = [si](double y) { return (*si)(y); };
    m.sigma_prime_ = [spi](double y) { return (*spi)(y); };
    auto integrand = [bi, si](double z) {
        const double s = (*si)(z);
        const double v = 2.0 * (*bi)(z) / (s * s);
        if (!std::isfinite(v))
            throw AssumptionError("custom diffusion: non-finite 2b/sigma^2");
        return v;
    };
    auto cum = std::make_shared<CumulativeLogIntegral>(integrand, x_anchor,
                                                       x_lo, x_hi);
    m.log_scale_ = [cum](double y) { return -(*cum)(y); };
    return m;
}

DiffusionModel DiffusionModel::with_anchor(double x_anchor) const {
    DiffusionModel m = *this;
    // S' with a different anchor differs by the constant S'_old(anchor_new).
    const double shift = log_scale_(x_anchor);
    auto base = log_scale_;
    m.log_scale_ = [base, shift](double x) { return base(x) - shift; };
    m.x_anchor_ = x_anchor;
    return m;
}

std::optional<std::pair<double, double>> DiffusionModel::gbm_params() const {
    if (kind_ != DiffusionKind::gbm) return std::nullopt;
    return std::make_pair(delta_, sigma_const_);
}

ValidationReport DiffusionModel::validate(double r, std::span<const double> grid,
                                          bool ergodic) const {
    ValidationReport rep;
    if (grid.empty())
        throw AssumptionError("validate: empty grid");
    double gap = std::numeric_limits<double>::infinity();
    double xbs = 0.0;
    for (double x : grid) {
        vol(x);  // throws on degenerate sigma
        gap = std::min(gap, r - drift_prime(x));
        const double q = 2.0 * x * drift(x) + vol(x) * vol(x);
        if (q > 0.0) xbs = std::max(xbs, x);
    }
    rep.discount_gap = gap;
    rep.x_b_sigma = xbs;
    if (ergodic) {
        bool bp_neg = true;
        for (double x : grid) bp_neg = bp_neg && drift_prime(x) < 0.0;
        rep.discount_gap_ok = bp_neg;
        if (!bp_neg) rep.failures.push_back("b' not uniformly negative");
    } else {
        rep.discount_gap_ok = gap > 0.0;
        if (!rep.discount_gap_ok)
            rep.failures.push_back("r - b' not uniformly positive");
    }
    try {
        auto q = num::integrate_to_inf([this](double y) { return speed_density(y); },
                                       grid.front(), 1e-8, 1e-10);
        rep.speed_tail_mass = q.value;
        rep.positively_recurrent = !q.truncated_tail && std::isfinite(q.value);
    } catch (const NumericalError&) {
        rep.positively_recurrent = false;
    }
    if (!rep.positively_recurrent)
        rep.failures.push_back("speed measure tail not integrable");
    rep.natural_boundaries_checked = kind_ != DiffusionKind::custom;
    return rep;
}

}  // namespace mfg
