#include "lossless/impulse_response.hpp"

#include "lossless/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>
#include <numbers>
#include <sstream>

namespace lossless {

namespace {

std::string describe(const char* family, std::initializer_list<std::pair<const char*, double>> args)
{
    std::ostringstream out;
    out << family << '(';
    bool first = true;
    for (const auto& [name, v] : args) {
        if (!first)
            out << ", ";
        out << name << '=' << v;
        first = false;
    }
    out << ')';
    return out.str();
}

// Visits the pieces of the piecewise-linear interpolant on [a, b] as (s0, s1, p0, p1).
template <typename Visit>
void for_each_piece(std::span<const double> t, std::span<const double> v, double a, double b,
                    Visit&& visit)
{
    if (!(b > a))
        return;
    auto it = std::upper_bound(t.begin(), t.end(), a);
    std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    for (; i + 1 < t.size() && t[i] < b; ++i) {
        const double h = t[i + 1] - t[i];
        const double m = (v[i + 1] - v[i]) / h;
        const double s0 = std::max(a, t[i]);
        const double s1 = std::min(b, t[i + 1]);
        if (!(s1 > s0))
            continue;
        visit(s0, s1, v[i] + m * (s0 - t[i]), v[i] + m * (s1 - t[i]));
    }
}

double abs_linear_integral(double h, double p0, double p1)
{
    if ((p0 >= 0.0) == (p1 >= 0.0) || p0 == 0.0 || p1 == 0.0)
        return 0.5 * h * (std::abs(p0) + std::abs(p1));
    return 0.5 * h * (p0 * p0 + p1 * p1) / (std::abs(p0) + std::abs(p1));
}

} // namespace

double piecewise_linear_cosine_integral(std::span<const double> times,
                                        std::span<const double> values, double omega, double a,
                                        double b)
{
    std::vector<double> parts;
    for_each_piece(times, values, a, b, [&](double s0, double s1, double p0, double p1) {
        const double h = s1 - s0;
        if (omega == 0.0) {
            parts.push_back(0.5 * h * (p0 + p1));
            return;
        }
        const double m = (p1 - p0) / h;
        // int p cos = [p sin(w t)/w + m cos(w t)/w^2]
        const double first = (p1 * std::sin(omega * s1) - p0 * std::sin(omega * s0)) / omega;
        const double dcos =
            -2.0 * std::sin(0.5 * omega * (s0 + s1)) * std::sin(0.5 * omega * h);
        parts.push_back(first + m * dcos / (omega * omega));
    });
    return pairwise_sum(parts);
}

ImpulseResponse::ImpulseResponse() = default;

ImpulseResponse ImpulseResponse::zero()
{
    return {};
}

ImpulseResponse ImpulseResponse::exponential(double amplitude, double rate)
{
    if (!(rate > 0.0))
        throw InvalidArgument("exponential impulse response: rate must be positive");
    if (amplitude == 0.0)
        return zero();
    ImpulseResponse g;
    g.kind_ = Kind::closed_form;
    g.label_ = describe("exp", {{"amplitude", amplitude}, {"rate", rate}});
    Term term;
    term.g = [amplitude, rate](double t) { return amplitude * std::exp(-rate * t); };
    term.dg = [amplitude, rate](double t) { return -rate * amplitude * std::exp(-rate * t); };
    term.envelope = std::abs(amplitude);
    term.derivative_envelope = std::abs(amplitude) * rate;
    term.rate = rate;
    term.pure_exponential = true;
    term.analytic = true;
    term.amplitude = amplitude;
    g.terms_.push_back(std::move(term));
    g.finalize();
    return g;
}

ImpulseResponse ImpulseResponse::damped_cosine(double amplitude, double rate, double omega)
{
    if (omega == 0.0)
        return exponential(amplitude, rate);
    if (!(rate > 0.0))
        throw InvalidArgument("damped cosine impulse response: rate must be positive");
    if (amplitude == 0.0)
        return zero();
    ImpulseResponse g;
    g.kind_ = Kind::closed_form;
    g.label_ = describe("damped_cos", {{"amplitude", amplitude}, {"rate", rate}, {"omega", omega}});
    Term term;
    term.g = [=](double t) { return amplitude * std::exp(-rate * t) * std::cos(omega * t); };
    term.dg = [=](double t) {
        return -amplitude * std::exp(-rate * t) *
               (rate * std::cos(omega * t) + omega * std::sin(omega * t));
    };
    term.envelope = std::abs(amplitude);
    term.derivative_envelope = std::abs(amplitude) * std::hypot(rate, omega);
    term.rate = rate;
    term.oscillation = std::abs(omega);
    term.analytic = true;
    term.amplitude = amplitude;
    g.terms_.push_back(std::move(term));
    g.finalize();
    return g;
}

ImpulseResponse ImpulseResponse::closed_form(Fn g, Fn dg, double envelope,
                                             double derivative_envelope, double decay_rate,
                                             double oscillation, std::string label)
{
    if (!g || !dg)
        throw InvalidArgument("closed-form impulse response: g and g' are both required");
    if (!(decay_rate > 0.0))
        throw InvalidArgument("closed-form impulse response: decay rate must be positive");
    if (!(envelope >= 0.0) || !(derivative_envelope >= 0.0) || !std::isfinite(envelope) ||
        !std::isfinite(derivative_envelope))
        throw InvalidArgument("closed-form impulse response: envelopes must be finite and >= 0");
    ImpulseResponse out;
    out.kind_ = Kind::closed_form;
    out.label_ = std::move(label);
    Term term;
    term.g = std::move(g);
    term.dg = std::move(dg);
    term.envelope = envelope;
    term.derivative_envelope = derivative_envelope;
    term.rate = decay_rate;
    term.oscillation = std::abs(oscillation);
    out.terms_.push_back(std::move(term));
    out.finalize();
    return out;
}

ImpulseResponse ImpulseResponse::sampled(std::vector<double> times, std::vector<double> values)
{
    if (times.size() != values.size())
        throw InvalidArgument("sampled impulse response: times and values differ in length");
    if (times.size() < 2)
        throw InvalidArgument("sampled impulse response: need at least two samples");
    if (std::abs(times.front()) > 1e-12)
        throw InvalidArgument("sampled impulse response: samples must start at t = 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw InvalidArgument("sampled impulse response: times must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v))
            throw InvalidArgument("sampled impulse response: non-finite sample");

    ImpulseResponse g;
    g.kind_ = Kind::sampled;
    times.front() = 0.0;
    g.times_ = std::move(times);
    g.values_ = std::move(values);
    g.support_end_ = g.times_.back();
    g.label_ = describe("sampled", {{"samples", static_cast<double>(g.times_.size())},
                                    {"T_max", g.support_end_}});

    // Exponential fit of the last tenth of the record.
    const std::size_t n = g.times_.size();
    const std::size_t m = std::max<std::size_t>(8, n / 10);
    g.tail_reliable_ = false;
    if (n >= m) {
        const std::size_t first = n - m;
        bool all_zero = true;
        bool same_sign = true;
        for (std::size_t i = first; i < n; ++i) {
            all_zero = all_zero && g.values_[i] == 0.0;
            same_sign = same_sign && g.values_[i] != 0.0 &&
                        (g.values_[i] > 0.0) == (g.values_[first] > 0.0);
        }
        if (all_zero) {
            g.tail_reliable_ = true;
        } else if (same_sign) {
            double st = 0, sl = 0, stt = 0, stl = 0;
            for (std::size_t i = first; i < n; ++i) {
                const double t = g.times_[i];
                const double l = std::log(std::abs(g.values_[i]));
                st += t;
                sl += l;
                stt += t * t;
                stl += t * l;
            }
            const double mm = static_cast<double>(m);
            const double slope = (mm * stl - st * sl) / (mm * stt - st * st);
            const double intercept = (sl - slope * st) / mm;
            double ss_res = 0, ss_tot = 0;
            for (std::size_t i = first; i < n; ++i) {
                const double l = std::log(std::abs(g.values_[i]));
                ss_res += std::pow(l - (intercept + slope * g.times_[i]), 2);
                ss_tot += std::pow(l - sl / mm, 2);
            }
            const double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
            if (slope < 0.0 && r2 >= 0.99) {
                g.tail_rate_ = -slope;
                double amp = 0.0;
                for (std::size_t i = first; i < n; ++i)
                    amp = std::max(amp, std::abs(g.values_[i]) * std::exp(g.tail_rate_ * g.times_[i]));
                g.tail_amp_ = std::copysign(amp, g.values_.back());
                g.tail_reliable_ = true;
            }
        }
    }
    g.finalize();
    return g;
}

ImpulseResponse ImpulseResponse::scaled(double factor) const
{
    if (factor == 0.0 || kind_ == Kind::zero)
        return zero();
    if (kind_ == Kind::sampled) {
        std::vector<double> v = values_;
        for (auto& x : v)
            x *= factor;
        return sampled(times_, std::move(v));
    }
    ImpulseResponse out = *this;
    for (auto& term : out.terms_) {
        term.g = [f = term.g, factor](double t) { return factor * f(t); };
        term.dg = [f = term.dg, factor](double t) { return factor * f(t); };
        term.envelope *= std::abs(factor);
        term.derivative_envelope *= std::abs(factor);
        term.amplitude *= factor;
    }
    std::ostringstream label;
    label << factor << " * " << label_;
    out.label_ = label.str();
    out.finalize();
    return out;
}

ImpulseResponse operator+(const ImpulseResponse& a, const ImpulseResponse& b)
{
    using Kind = ImpulseResponse::Kind;
    if (a.kind_ == Kind::zero)
        return b;
    if (b.kind_ == Kind::zero)
        return a;
    if (a.kind_ == Kind::sampled || b.kind_ == Kind::sampled)
        throw InvalidArgument("impulse response: sums involving sampled records are not supported");
    ImpulseResponse out = a;
    out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
    out.label_ = a.label_ + " + " + b.label_;
    out.finalize();
    return out;
}

double ImpulseResponse::value(double t) const
{
    if (t < 0.0 || kind_ == Kind::zero)
        return 0.0;
    if (kind_ == Kind::closed_form) {
        double acc = 0.0;
        for (const auto& term : terms_)
            acc += term.g(t);
        return acc;
    }
    if (t > support_end_) {
        if (!tail_reliable_)
            throw InvalidArgument("impulse response: evaluation beyond the sampled record");
        return tail_amp_ * std::exp(-tail_rate_ * t);
    }
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end())
        return values_.back();
    const auto i = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double ImpulseResponse::derivative(double t) const
{
    if (t < 0.0 || kind_ == Kind::zero)
        return 0.0;
    if (kind_ == Kind::closed_form) {
        double acc = 0.0;
        for (const auto& term : terms_)
            acc += term.dg(t);
        return acc;
    }
    if (t >= support_end_) {
        if (!tail_reliable_)
            throw InvalidArgument("impulse response: evaluation beyond the sampled record");
        return -tail_rate_ * tail_amp_ * std::exp(-tail_rate_ * t);
    }
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const auto i = static_cast<std::size_t>(it - times_.begin()) - 1;
    return (values_[i + 1] - values_[i]) / (times_[i + 1] - times_[i]);
}

double ImpulseResponse::slowest_rate() const
{
    double r = std::numeric_limits<double>::infinity();
    for (const auto& term : terms_)
        r = std::min(r, term.rate);
    return r;
}

double ImpulseResponse::fastest_oscillation() const
{
    double w = 0.0;
    for (const auto& term : terms_)
        w = std::max(w, term.oscillation);
    return w;
}

double ImpulseResponse::envelope_tail(double t) const
{
    double acc = 0.0;
    for (const auto& term : terms_)
        acc += term.envelope * std::exp(-term.rate * t) / term.rate;
    return acc;
}

double ImpulseResponse::derivative_envelope_tail(double t) const
{
    double acc = 0.0;
    for (const auto& term : terms_)
        acc += term.derivative_envelope * std::exp(-term.rate * t) / term.rate;
    return acc;
}

double ImpulseResponse::far_point(double t, double scale) const
{
    const double total = envelope_tail(0.0) + derivative_envelope_tail(0.0);
    if (!(total > 0.0))
        return t;
    const double target = 1e-16 * std::max(scale, 1e-300);
    return std::max(t, std::log(total / target) / slowest_rate());
}

QuadratureResult ImpulseResponse::abs_integral(const Fn& f, double a, double b) const
{
    if (!(b > a))
        return {};
    double width = 1.0;
    if (const double w = fastest_oscillation(); w > 0.0)
        width = std::min(width, std::numbers::pi / w);
    for (const auto& term : terms_)
        width = std::min(width, 2.0 / term.rate);
    const auto panels =
        static_cast<std::size_t>(std::min(1e6, std::ceil((b - a) / width)));
    // |f| has kinks at sign changes; split there so each piece is smooth
    constexpr int scan = 8;
    const double h = (b - a) / static_cast<double>(panels);
    std::vector<double> values, errors;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double hi = p + 1 == panels ? b : lo + h;
        double left = lo;
        double f_left = f(lo);
        for (int i = 1; i <= scan; ++i) {
            const double right = i == scan ? hi : lo + (hi - lo) * i / scan;
            const double f_right = f(right);
            if ((f_left < 0.0 && f_right > 0.0) || (f_left > 0.0 && f_right < 0.0)) {
                double x0 = left, x1 = right, f0 = f_left;
                for (int it = 0; it < 200 && x1 - x0 > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x1);
                     ++it) {
                    const double mid = 0.5 * (x0 + x1);
                    const double fm = f(mid);
                    if ((fm < 0.0) == (f0 < 0.0)) {
                        x0 = mid;
                        f0 = fm;
                    } else {
                        x1 = mid;
                    }
                }
                const double root = 0.5 * (x0 + x1);
                const auto r = integrate([&f](double t) { return std::abs(f(t)); }, left, root);
                values.push_back(r.value);
                errors.push_back(r.error);
                left = root;
            }
            f_left = f_right;
        }
        const auto r = integrate([&f](double t) { return std::abs(f(t)); }, left, hi);
        values.push_back(r.value);
        errors.push_back(r.error);
    }
    return {pairwise_sum(values), pairwise_sum(errors)};
}

void ImpulseResponse::finalize()
{
    if (kind_ == Kind::zero) {
        sup_ = derivative_l1_ = l1_ = 0.0;
        return;
    }
    if (kind_ == Kind::sampled) {
        sup_ = 0.0;
        double var = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            sup_ = std::max(sup_, std::abs(values_[i]));
            if (i > 0)
                var += std::abs(values_[i] - values_[i - 1]);
        }
        if (tail_reliable_)
            var += std::abs(tail_amp_) * std::exp(-tail_rate_ * support_end_);
        derivative_l1_ = var;
        l1_ = tail_mass(0.0);
        return;
    }

    if (terms_.size() == 1 && terms_.front().pure_exponential) {
        const auto& term = terms_.front();
        sup_ = std::abs(term.amplitude);
        derivative_l1_ = std::abs(term.amplitude);
        l1_ = std::abs(term.amplitude) / term.rate;
        return;
    }

    const double far = far_point(0.0, envelope_tail(0.0));
    // Supremum: dense scan, then a local refinement around the best sample.
    double width = 1.0;
    if (const double w = fastest_oscillation(); w > 0.0)
        width = std::min(width, std::numbers::pi / w);
    const double step = std::max(width / 16.0, far / 200000.0);
    const auto count = static_cast<std::size_t>(std::ceil(far / step)) + 1;
    std::size_t best = 0;
    double best_val = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double v = std::abs(value(static_cast<double>(i) * step));
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double lo = best == 0 ? 0.0 : static_cast<double>(best - 1) * step;
    const double hi = static_cast<double>(best + 1) * step;
    const auto refined = boost::math::tools::brent_find_minima(
        [this](double t) { return -std::abs(value(t)); }, lo, hi, 52);
    sup_ = std::max(best_val, -refined.second);
    // A single damped cosine peaks at t = 0.
    if (terms_.size() == 1 && terms_.front().amplitude != 0.0)
        sup_ = std::abs(terms_.front().amplitude);

    const auto dl1 = abs_integral([this](double t) { return derivative(t); }, 0.0, far);
    derivative_l1_ = dl1.value + dl1.error + derivative_envelope_tail(far);
    l1_ = tail_mass(0.0);
}

double ImpulseResponse::tail_mass(double t) const
{
    t = std::max(t, 0.0);
    switch (kind_) {
    case Kind::zero:
        return 0.0;
    case Kind::sampled: {
        const double beyond = [&] {
            if (!tail_reliable_)
                return std::numeric_limits<double>::infinity();
            return std::abs(tail_amp_) * std::exp(-tail_rate_ * std::max(t, support_end_)) /
                   tail_rate_;
        }();
        if (t >= support_end_)
            return beyond;
        std::vector<double> parts;
        for_each_piece(times_, values_, t, support_end_,
                       [&](double s0, double s1, double p0, double p1) {
                           parts.push_back(abs_linear_integral(s1 - s0, p0, p1));
                       });
        return pairwise_sum(parts) + beyond;
    }
    case Kind::closed_form:
        break;
    }
    if (terms_.size() == 1 && terms_.front().pure_exponential) {
        const auto& term = terms_.front();
        return std::abs(term.amplitude) * std::exp(-term.rate * t) / term.rate;
    }
    const double scale = envelope_tail(0.0);
    const double env = envelope_tail(t);
    if (env <= 1e-15 * scale)
        return env;
    const double far = far_point(t, scale);
    const auto q = abs_integral([this](double s) { return value(s); }, t, far);
    return q.value + q.error + envelope_tail(far);
}

double ImpulseResponse::l2_norm_sq(double a, double b) const
{
    if (!(b > a) || kind_ == Kind::zero)
        return 0.0;
    a = std::max(a, 0.0);
    if (kind_ == Kind::sampled) {
        if (b > support_end_ * (1.0 + 1e-12))
            throw InvalidArgument("impulse response: sampled record does not cover the interval");
        std::vector<double> parts;
        for_each_piece(times_, values_, a, b, [&](double s0, double s1, double p0, double p1) {
            parts.push_back((s1 - s0) * (p0 * p0 + p0 * p1 + p1 * p1) / 3.0);
        });
        return pairwise_sum(parts);
    }
    return abs_integral([this](double t) {
               const double v = value(t);
               return v * v;
           },
                        a, b)
        .value;
}

QuadratureResult ImpulseResponse::cosine_integral(double omega, double a, double b) const
{
    if (!(b > a) || kind_ == Kind::zero)
        return {};
    a = std::max(a, 0.0);
    if (kind_ == Kind::sampled) {
        if (b > support_end_ * (1.0 + 1e-12))
            throw InvalidArgument("impulse response: sampled record does not cover the interval");
        return {piecewise_linear_cosine_integral(times_, values_, omega, a, std::min(b, support_end_)),
                0.0};
    }
    if (std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.analytic; })) {
        // e^{-rt} cos(w0 t) cos(w t) = (e^{-rt}/2)(cos((w0 - w)t) + cos((w0 + w)t))
        const auto antiderivative = [](double r, double nu, double t) {
            return std::exp(-r * t) * (nu * std::sin(nu * t) - r * std::cos(nu * t)) / (r * r + nu * nu);
        };
        std::vector<double> parts;
        for (const auto& term : terms_) {
            for (const double nu : {term.oscillation - omega, term.oscillation + omega}) {
                parts.push_back(0.5 * term.amplitude * antiderivative(term.rate, nu, b));
                parts.push_back(-0.5 * term.amplitude * antiderivative(term.rate, nu, a));
            }
        }
        double scale = 0.0;
        for (double p : parts)
            scale += std::abs(p);
        return {pairwise_sum(parts), 8.0 * std::numeric_limits<double>::epsilon() * scale};
    }
    double width = 1.0;
    const double w = std::max(fastest_oscillation(), std::abs(omega));
    if (w > 0.0)
        width = std::min(width, std::numbers::pi / w);
    for (const auto& term : terms_)
        width = std::min(width, 2.0 / term.rate);
    const auto panels = static_cast<std::size_t>(std::min(1e6, std::ceil((b - a) / width)));
    return integrate_panels([this, omega](double t) { return value(t) * std::cos(omega * t); }, a,
                            b, panels);
}

} // namespace lossless
